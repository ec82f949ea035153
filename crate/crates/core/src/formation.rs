//! Merge-only coalition formation in partition form.
//!
//! Starting from all singletons, the scan tries to merge `r` coalitions at a
//! time, `r` running from `min(q, |CS|)` down to 2, with candidates taken in
//! lexicographic order of coalition positions. Every member of a candidate
//! compares its utility after the merge against its current utility minus its
//! overhead and reports one of three messages. A candidate merges when nobody
//! loses and somebody gains; the scan then restarts from the top on the new
//! structure. The output admits no profitable merge of at most `q`
//! coalitions, which [`verify_stable`] checks exhaustively.

use serde::{Deserialize, Serialize};

use crate::beamforming::{coalition_beamformer, profile_for_structure, BfScheme, StrategyProfile};
use crate::coalition::{Coalition, CoalitionStructure};
use crate::combinatorics::lex_combinations;
use crate::error::{Error, Result};
use crate::rates::{rate_unchecked, rates_all};
use crate::scenario::{ChannelSet, NoisePower};

/// Largest structure [`verify_stable`] will enumerate.
pub const MAX_VERIFY_COALITIONS: usize = 16;

/// Relative tolerance under which two utilities count as equal.
pub const SAME_UTILITY_RTOL: f64 = 1e-12;

/// How much utility a player is willing to give up for a merge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum OverheadModel {
    #[default]
    Zero,
    Explicit(Vec<f64>),
    /// `|S| / K` times the player's grand-coalition rate, `S` the merged coalition.
    SizeProportional,
    /// `1 / K` times the player's grand-coalition rate.
    Uniform,
}

impl OverheadModel {
    pub fn tag(&self) -> &'static str {
        match self {
            OverheadModel::Zero => "zero",
            OverheadModel::Explicit(_) => "explicit",
            OverheadModel::SizeProportional => "size_proportional",
            OverheadModel::Uniform => "uniform",
        }
    }

    fn needs_grand_rates(&self) -> bool {
        matches!(self, OverheadModel::SizeProportional | OverheadModel::Uniform)
    }

    /// Per-player overheads when contemplating a merged coalition of
    /// `merged_size` players. `grand_rates` is only read by the two
    /// rate-proportional models.
    pub fn resolve(&self, merged_size: usize, grand_rates: &[f64]) -> Vec<f64> {
        let k = grand_rates.len();
        match self {
            OverheadModel::Zero => vec![0.0; k],
            OverheadModel::Explicit(v) => v.clone(),
            OverheadModel::SizeProportional => {
                let f = merged_size as f64 / k as f64;
                grand_rates.iter().map(|u| f * u).collect()
            }
            OverheadModel::Uniform => grand_rates.iter().map(|u| u / k as f64).collect(),
        }
    }

    fn validate(&self, k: usize) -> Result<()> {
        if let OverheadModel::Explicit(v) = self {
            if v.len() != k {
                return Err(Error::Config(format!("{} explicit overheads for {k} links", v.len())));
            }
            if let Some(e) = v.iter().find(|e| !(e.is_finite() && **e >= 0.0)) {
                return Err(Error::Config(format!("overheads must be finite and nonnegative, got {e}")));
            }
        }
        Ok(())
    }
}

/// Grand-coalition rates `u_i(F(N))` under `scheme`.
pub fn grand_coalition_rates(ch: &ChannelSet, noise: NoisePower, scheme: BfScheme) -> Result<Vec<f64>> {
    let k = ch.num_links();
    rates_all(&profile_for_structure(&CoalitionStructure::grand(k), ch, noise, scheme)?, ch, noise)
}

/// Overheads for a merge producing a coalition of `merged_size` players.
pub fn resolve_overheads(
    model: &OverheadModel,
    merged_size: usize,
    ch: &ChannelSet,
    noise: NoisePower,
    scheme: BfScheme,
) -> Result<Vec<f64>> {
    model.validate(ch.num_links())?;
    let grand =
        if model.needs_grand_rates() { grand_coalition_rates(ch, noise, scheme)? } else { vec![0.0; ch.num_links()] };
    Ok(model.resolve(merged_size, &grand))
}

/// Two-bit negotiation messages.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Message {
    /// Utility improves.
    M1,
    /// Utility is the same.
    M2,
    /// Utility decreases.
    M3,
    /// Coalition forms.
    M4,
}

impl Message {
    pub fn code(self) -> u8 {
        match self {
            Message::M1 => 0b00,
            Message::M2 => 0b01,
            Message::M3 => 0b10,
            Message::M4 => 0b11,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            0b00 => Some(Message::M1),
            0b01 => Some(Message::M2),
            0b10 => Some(Message::M3),
            0b11 => Some(Message::M4),
            _ => None,
        }
    }

    /// Compares `after` against `before - overhead`.
    pub fn compare(before: f64, after: f64, overhead: f64) -> Self {
        let diff = after - (before - overhead);
        let tol = SAME_UTILITY_RTOL * before.abs().max(1.0);
        if diff > tol {
            Message::M1
        } else if diff < -tol {
            Message::M3
        } else {
            Message::M2
        }
    }
}

/// True when the messages authorize a merge: nobody loses and someone gains.
pub fn merge_accepted(messages: impl IntoIterator<Item = Message>) -> bool {
    let mut gain = false;
    for m in messages {
        match m {
            Message::M1 => gain = true,
            Message::M2 => {}
            Message::M3 | Message::M4 => return false,
        }
    }
    gain
}

/// Merges the coalitions `t` of `cs` into one.
pub fn q_deviate(cs: &CoalitionStructure, t: &[Coalition]) -> Result<CoalitionStructure> {
    let positions = t
        .iter()
        .map(|c| {
            cs.coalitions()
                .iter()
                .position(|x| x == c)
                .ok_or_else(|| Error::InvalidDeviation(format!("{c} is not a coalition of {cs}")))
        })
        .collect::<Result<Vec<_>>>()?;
    cs.merge_positions(&positions)
}

/// Pareto dominance of `cs1` over `cs0` for the players in the merged
/// coalitions `t`, with `eps` deducted from their utilities in `cs0`.
pub fn pareto_dominates(
    cs0: &CoalitionStructure,
    cs1: &CoalitionStructure,
    t: &[Coalition],
    eps: &[f64],
    ch: &ChannelSet,
    noise: NoisePower,
    scheme: BfScheme,
) -> Result<bool> {
    if q_deviate(cs0, t)? != *cs1 {
        return Err(Error::InvalidDeviation(format!("{cs1} does not follow from merging within {cs0}")));
    }
    let before = rates_all(&profile_for_structure(cs0, ch, noise, scheme)?, ch, noise)?;
    let after = rates_all(&profile_for_structure(cs1, ch, noise, scheme)?, ch, noise)?;
    let merged = t.iter().fold(0u64, |m, c| m | c.mask());
    let merged = Coalition::from_mask(merged).expect("nonempty merge");
    Ok(merge_accepted(merged.members().map(|i| Message::compare(before[i], after[i], eps[i]))))
}

/// `r`-subsets of `{1..m}` in lexicographic order.
pub fn lex_r_combinations(m: usize, r: usize) -> Vec<Vec<usize>> {
    lex_combinations(m, r).into_iter().map(|c| c.into_iter().map(|x| x + 1).collect()).collect()
}

/// Candidate position sets in the order one full scan of `m` coalitions
/// visits them for a given `q`.
pub fn scan_order(m: usize, q: usize) -> Vec<Vec<usize>> {
    (2..=q.min(m)).rev().flat_map(|r| lex_combinations(m, r)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FormationConfig {
    pub q: usize,
    pub scheme: BfScheme,
    #[serde(default)]
    pub overhead: OverheadModel,
    /// Keep every candidate evaluation in the result.
    #[serde(default = "yes")]
    pub record_trace: bool,
}

fn yes() -> bool {
    true
}

impl FormationConfig {
    pub fn new(q: usize, scheme: BfScheme, overhead: OverheadModel) -> Self {
        FormationConfig { q, scheme, overhead, record_trace: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MemberReport {
    #[serde(serialize_with = "one_based")]
    pub link: usize,
    pub message: Message,
    pub utility_before: f64,
    pub utility_after: f64,
    pub overhead: f64,
}

fn one_based<S: serde::Serializer>(i: &usize, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_u64(*i as u64 + 1)
}

fn one_based_list<S: serde::Serializer>(v: &[usize], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|i| i + 1))
}

/// One candidate evaluation of the scan.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeviationEvent {
    /// Iteration counter value after this evaluation.
    pub iteration: u64,
    /// Number of merges performed before this evaluation.
    pub merges_before: usize,
    pub r: usize,
    pub candidate: Vec<Coalition>,
    /// The structure the candidate would produce.
    pub resulting: CoalitionStructure,
    pub merged: bool,
    pub members: Vec<MemberReport>,
    /// Links outside the merge that receive `M4`.
    #[serde(serialize_with = "one_based_list")]
    pub notified: Vec<usize>,
}

impl DeviationEvent {
    pub fn comparisons(&self) -> u64 {
        self.members.len() as u64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FormationResult {
    #[serde(rename = "final")]
    pub final_structure: CoalitionStructure,
    /// Total number of utility comparisons.
    pub theta: u64,
    pub n_iter: u64,
    pub merges: usize,
    pub rates: Vec<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub trace: Vec<DeviationEvent>,
}

impl FormationResult {
    pub fn average_rate(&self) -> f64 {
        crate::exec::compensated_sum(self.rates.iter().copied()) / self.rates.len() as f64
    }

    /// Recomputes `(theta, n_iter)` from the trace.
    pub fn replay_counts(&self) -> (u64, u64) {
        let theta = self.trace.iter().map(DeviationEvent::comparisons).sum();
        (theta, self.trace.len() as u64)
    }
}

/// Runs the merge scan from all singletons.
pub fn run_formation(
    ch: &ChannelSet,
    noise: NoisePower,
    model: OverheadModel,
    q: usize,
    scheme: BfScheme,
) -> Result<FormationResult> {
    run_formation_with(ch, noise, &FormationConfig::new(q, scheme, model))
}

pub fn run_formation_with(ch: &ChannelSet, noise: NoisePower, cfg: &FormationConfig) -> Result<FormationResult> {
    let k = ch.num_links();
    if k < 2 {
        return Err(Error::InvalidScenario("coalition formation needs at least 2 links".into()));
    }
    if cfg.q < 2 {
        return Err(Error::Config(format!("q must be at least 2, got {}", cfg.q)));
    }
    let sigma2 = noise.value();
    if sigma2 <= 0.0 {
        return Err(Error::InvalidNoise(sigma2));
    }
    cfg.overhead.validate(k)?;
    let grand =
        if cfg.overhead.needs_grand_rates() { grand_coalition_rates(ch, noise, cfg.scheme)? } else { vec![0.0; k] };

    let mut cs = CoalitionStructure::singletons(k);
    let mut profile = profile_for_structure(&cs, ch, noise, cfg.scheme)?;
    let mut rates = rates_all(&profile, ch, noise)?;
    let mut theta = 0u64;
    let mut n_iter = 0u64;
    let mut merges = 0usize;
    let mut trace = Vec::new();

    let mut r = cfg.q.min(cs.len());
    'scan: while r >= 2 && cs.len() >= 2 {
        for positions in lex_combinations(cs.len(), r) {
            n_iter += 1;
            let merged = positions.iter().fold(0u64, |m, &p| m | cs.coalitions()[p].mask());
            let merged = Coalition::from_mask(merged).expect("nonempty merge");
            let eps = cfg.overhead.resolve(merged.len(), &grand);

            let mut tentative: StrategyProfile = profile.clone();
            for i in merged.members() {
                tentative.set(i, coalition_beamformer(i, merged, ch, noise, cfg.scheme)?);
            }
            let members: Vec<MemberReport> = merged
                .members()
                .map(|i| {
                    let after = rate_unchecked(i, &tentative, ch, sigma2);
                    MemberReport {
                        link: i,
                        message: Message::compare(rates[i], after, eps[i]),
                        utility_before: rates[i],
                        utility_after: after,
                        overhead: eps[i],
                    }
                })
                .collect();
            theta += members.len() as u64;
            let accept = merge_accepted(members.iter().map(|m| m.message));
            let next = if accept || cfg.record_trace { Some(cs.merge_positions(&positions)?) } else { None };

            if cfg.record_trace {
                trace.push(DeviationEvent {
                    iteration: n_iter,
                    merges_before: merges,
                    r,
                    candidate: positions.iter().map(|&p| cs.coalitions()[p]).collect(),
                    resulting: next.clone().expect("built when tracing"),
                    merged: accept,
                    members,
                    notified: if accept { (0..k).filter(|&j| !merged.contains(j)).collect() } else { Vec::new() },
                });
            }

            if accept {
                cs = next.expect("built on accept");
                profile = tentative;
                rates = rates_all(&profile, ch, noise)?;
                merges += 1;
                r = cfg.q.min(cs.len());
                continue 'scan;
            }
        }
        r -= 1;
    }

    Ok(FormationResult { final_structure: cs, theta, n_iter, merges, rates, trace })
}

/// True iff no merge of between 2 and `q` coalitions of `cs` is a Pareto
/// improvement for its members.
pub fn verify_stable(
    cs: &CoalitionStructure,
    q: usize,
    model: &OverheadModel,
    ch: &ChannelSet,
    noise: NoisePower,
    scheme: BfScheme,
) -> Result<bool> {
    if cs.len() > MAX_VERIFY_COALITIONS {
        return Err(Error::TooManyLinks {
            what: "stability verification",
            links: cs.len(),
            cap: MAX_VERIFY_COALITIONS,
        });
    }
    if cs.num_links() != ch.num_links() {
        return Err(Error::InvalidDeviation(format!(
            "structure covers {} links, channels have {}",
            cs.num_links(),
            ch.num_links()
        )));
    }
    model.validate(ch.num_links())?;
    let grand =
        if model.needs_grand_rates() { grand_coalition_rates(ch, noise, scheme)? } else { vec![0.0; ch.num_links()] };
    for positions in scan_order(cs.len(), q) {
        let t: Vec<Coalition> = positions.iter().map(|&p| cs.coalitions()[p]).collect();
        let size = t.iter().map(|c| c.len()).sum();
        let eps = model.resolve(size, &grand);
        let next = cs.merge_positions(&positions)?;
        if pareto_dominates(cs, &next, &t, &eps, ch, noise, scheme)? {
            return Ok(false);
        }
    }
    Ok(true)
}
