//! Closed-form emptiness analysis of the weak and strong epsilon-core of the
//! zero-forcing coalitional game, with a brute-force rate comparison as the
//! independent check.
//!
//! For a player `i` in a deviating coalition `S`, staying in the grand
//! coalition is acceptable iff
//!
//! ```text
//! f(s) = (2^e - 1) s^2 + Psi s + 2^e C B >= 0,   s = sigma^2 > 0
//! Psi  = 2^e (B + C) - (B + A)
//! ```
//!
//! where `A = |h_ii^H w_zf(i->S)|^2`, `C = |h_ii^H w_zf(i->N)|^2` and `B` is the
//! MRT interference received from links outside `S`. The sign pattern of `f`
//! falls into one of four cases ([`PairCase`]); the resulting set of
//! admissible noise powers is a [`ConditionSet`]. The core is nonempty at a
//! given `sigma^2` iff every `(i, S)` pair admits it.

use std::fmt::Write as _;

use serde::Serialize;

use crate::beamforming::{mrt, profile_for_coalition, zf, BfScheme};
use crate::coalition::Coalition;
use crate::combinatorics::lex_combinations;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::output::{finite_or_null, sig12};
use crate::rates::rates_all;
use crate::scenario::{ChannelSet, NoisePower};

/// Default cap on `K` for anything that enumerates all subsets.
pub const DEFAULT_MAX_LINKS: usize = 16;

/// `|Delta| <= DELTA_CLAMP_RTOL * Psi^2` is treated as a double root.
const DELTA_CLAMP_RTOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CoreFlavor {
    /// Overhead `eps_i` for every deviation.
    Weak,
    /// Overhead `eps_i / |S|` for a deviation by `S`.
    Strong,
}

impl CoreFlavor {
    pub fn effective_overhead(self, eps: f64, coalition_size: usize) -> f64 {
        match self {
            CoreFlavor::Weak => eps,
            CoreFlavor::Strong => eps / coalition_size as f64,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnalysisOptions {
    pub max_links: usize,
    #[serde(skip)]
    pub exec: Execution,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions { max_links: DEFAULT_MAX_LINKS, exec: Execution::default() }
    }
}

fn guard(k: usize, cap: usize, what: &'static str) -> Result<()> {
    if k > cap {
        Err(Error::TooManyLinks { what, links: k, cap })
    } else {
        Ok(())
    }
}

/// Nonempty proper subsets of `{0..k}`, ordered by size and then
/// lexicographically.
pub fn proper_subsets(k: usize) -> Vec<Coalition> {
    (1..k).flat_map(|r| lex_combinations(k, r)).map(|m| Coalition::from_members(m).expect("nonempty")).collect()
}

/// Parameters of the deviation inequality of player `i` in coalition `S`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoalitionParams {
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "B")]
    pub b: f64,
    #[serde(rename = "C")]
    pub c: f64,
    #[serde(rename = "Psi")]
    pub psi: f64,
    #[serde(rename = "Delta")]
    pub delta: f64,
}

impl CoalitionParams {
    /// Fills in `Psi` and `Delta` for overhead `eps`.
    pub fn from_powers(a: f64, b: f64, c: f64, eps: f64) -> Self {
        let pow2 = eps.exp2();
        let slope = (eps * std::f64::consts::LN_2).exp_m1();
        let psi = pow2 * (b + c) - (b + a);
        let delta = psi * psi - 4.0 * slope * pow2 * c * b;
        CoalitionParams { a, b, c, psi, delta }
    }

    /// `f(sigma^2)` for overhead `eps`.
    pub fn quadratic(&self, eps: f64, sigma2: f64) -> f64 {
        let pow2 = eps.exp2();
        let slope = (eps * std::f64::consts::LN_2).exp_m1();
        slope * sigma2 * sigma2 + self.psi * sigma2 + pow2 * self.c * self.b
    }
}

/// Shared per-realization quantities: MRT interference gains and grand
/// coalition ZF gains.
struct GainTable {
    k: usize,
    /// `mrt_gain[j * k + i] = |h_ji^H w_j^MRT|^2`.
    mrt_gain: Vec<f64>,
    /// `C_i`.
    grand: Vec<f64>,
}

impl GainTable {
    fn new(ch: &ChannelSet) -> Result<Self> {
        let k = ch.num_links();
        let mut mrt_gain = vec![0.0; k * k];
        for j in 0..k {
            let w = mrt(ch.direct(j)).map_err(|_| Error::DegenerateChannel { link: j + 1 })?;
            for i in 0..k {
                mrt_gain[j * k + i] = w.gain(ch.get(j, i));
            }
        }
        let all = Coalition::grand(k);
        let grand = (0..k).map(|i| zf(i, all, ch).map(|w| w.gain(ch.direct(i)))).collect::<Result<Vec<_>>>()?;
        Ok(GainTable { k, mrt_gain, grand })
    }

    fn outside_interference(&self, i: usize, s: Coalition) -> f64 {
        (0..self.k).filter(|&j| !s.contains(j)).map(|j| self.mrt_gain[j * self.k + i]).sum()
    }

    fn powers(&self, i: usize, s: Coalition, ch: &ChannelSet) -> Result<(f64, f64, f64)> {
        let a = zf(i, s, ch)?.gain(ch.direct(i));
        Ok((a, self.outside_interference(i, s), self.grand[i]))
    }
}

/// `A`, `B`, `C`, `Psi`, `Delta` for player `i` in the proper coalition `s`.
pub fn coalition_params(i: usize, s: Coalition, ch: &ChannelSet, eps: f64) -> Result<CoalitionParams> {
    let k = ch.num_links();
    if !s.contains(i) || !s.is_subset_of(Coalition::grand(k)) || s == Coalition::grand(k) {
        return Err(Error::InvalidDeviation(format!("need link {} in a proper sub-coalition, got {s}", i + 1)));
    }
    let (a, b, c) = GainTable::new(ch)?.powers(i, s, ch)?;
    Ok(CoalitionParams::from_powers(a, b, c, eps))
}

/// Which branch of the sign analysis of `f` applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum PairCase {
    /// `eps = 0`: `f` is a line.
    I,
    /// `eps > 0`, `Delta < 0`: no real roots.
    II,
    /// `eps > 0`, `Delta >= 0`, `Psi >= 0`: both roots nonpositive.
    III,
    /// `eps > 0`, `Delta >= 0`, `Psi < 0`: two positive roots.
    IV,
}

/// Noise powers at which a single `(i, S)` deviation is not profitable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConditionSet {
    /// Every `sigma^2 > 0`.
    Always,
    /// `sigma^2 <= upper`.
    AtMost { upper: f64 },
    /// `sigma^2 <= upper` or `sigma^2 >= lower`, with `upper <= lower`.
    Outside { upper: f64, lower: f64 },
}

impl ConditionSet {
    pub fn holds(&self, sigma2: f64) -> bool {
        match *self {
            ConditionSet::Always => true,
            ConditionSet::AtMost { upper } => sigma2 <= upper,
            ConditionSet::Outside { upper, lower } => sigma2 <= upper || sigma2 >= lower,
        }
    }

    /// Upper threshold `sigma_bar^2_{i,S}` (infinity when unconstrained).
    pub fn upper(&self) -> f64 {
        match *self {
            ConditionSet::Always => f64::INFINITY,
            ConditionSet::AtMost { upper } | ConditionSet::Outside { upper, .. } => upper,
        }
    }

    /// Lower threshold `sigma_underbar^2_{i,S}` (zero when unconstrained).
    pub fn lower(&self) -> f64 {
        match *self {
            ConditionSet::Outside { lower, .. } => lower,
            _ => 0.0,
        }
    }

    /// The open interval of noise powers where the deviation pays off.
    pub fn empty_interval(&self) -> Option<(f64, f64)> {
        match *self {
            ConditionSet::Always => None,
            ConditionSet::AtMost { upper } => Some((upper, f64::INFINITY)),
            ConditionSet::Outside { upper, lower } => Some((upper, lower)),
        }
    }

    /// Finite thresholds, for proximity checks.
    pub fn thresholds(&self) -> Vec<f64> {
        match *self {
            ConditionSet::Always => vec![],
            ConditionSet::AtMost { upper } => vec![upper],
            ConditionSet::Outside { upper, lower } => vec![upper, lower],
        }
    }
}

/// Per-pair bounds together with the case they came from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SigmaBounds {
    pub case: PairCase,
    pub condition: ConditionSet,
}

/// Solves `f(sigma^2) >= 0, sigma^2 > 0` for one pair.
pub fn per_pair_condition_set(p: &CoalitionParams, eps: f64) -> SigmaBounds {
    if eps == 0.0 {
        // f(s) = (C - A) s + C B.
        let condition =
            if p.a > p.c { ConditionSet::AtMost { upper: p.c * p.b / (p.a - p.c) } } else { ConditionSet::Always };
        return SigmaBounds { case: PairCase::I, condition };
    }
    let pow2 = eps.exp2();
    let slope = (eps * std::f64::consts::LN_2).exp_m1();
    let mut delta = p.delta;
    if delta.abs() <= DELTA_CLAMP_RTOL * p.psi * p.psi {
        delta = 0.0;
    }
    if delta < 0.0 {
        return SigmaBounds { case: PairCase::II, condition: ConditionSet::Always };
    }
    if p.psi >= 0.0 {
        return SigmaBounds { case: PairCase::III, condition: ConditionSet::Always };
    }
    // Larger root without cancellation; the smaller one from the root product.
    let big = -p.psi + delta.sqrt();
    let lower = big / (2.0 * slope);
    let upper = 2.0 * pow2 * p.c * p.b / big;
    SigmaBounds { case: PairCase::IV, condition: ConditionSet::Outside { upper, lower } }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairEntry {
    #[serde(serialize_with = "one_based")]
    pub link: usize,
    pub coalition: Coalition,
    pub coalition_mask: u64,
    /// Overhead after the flavor's scaling.
    pub overhead: f64,
    pub params: CoalitionParams,
    pub bounds: SigmaBounds,
}

fn one_based<S: serde::Serializer>(i: &usize, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_u64(*i as u64 + 1)
}

/// Per-`(i, S)` table and aggregated noise thresholds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoreReport {
    pub flavor: CoreFlavor,
    pub epsilon: Vec<f64>,
    /// `min` of the per-pair upper thresholds.
    #[serde(serialize_with = "finite_or_null")]
    pub sigma_bar: f64,
    /// `max` of the per-pair lower thresholds.
    pub sigma_underbar: f64,
    pub pairs: Vec<PairEntry>,
}

impl CoreReport {
    pub fn build(ch: &ChannelSet, eps: &[f64], flavor: CoreFlavor, opts: &AnalysisOptions) -> Result<Self> {
        let k = ch.num_links();
        guard(k, opts.max_links, "epsilon-core analysis")?;
        if eps.len() != k {
            return Err(Error::Config(format!("{} overheads for {k} links", eps.len())));
        }
        if let Some(e) = eps.iter().find(|e| !(e.is_finite() && **e >= 0.0)) {
            return Err(Error::Config(format!("overheads must be finite and nonnegative, got {e}")));
        }
        let gains = GainTable::new(ch)?;
        let subsets = proper_subsets(k);
        let per_subset = opts.exec.map(subsets.len(), |n| {
            let s = subsets[n];
            s.members()
                .map(|i| {
                    let (a, b, c) = gains.powers(i, s, ch)?;
                    let e = flavor.effective_overhead(eps[i], s.len());
                    let params = CoalitionParams::from_powers(a, b, c, e);
                    Ok(PairEntry {
                        link: i,
                        coalition: s,
                        coalition_mask: s.mask(),
                        overhead: e,
                        params,
                        bounds: per_pair_condition_set(&params, e),
                    })
                })
                .collect::<Result<Vec<_>>>()
        });
        let mut pairs = Vec::new();
        for chunk in per_subset {
            pairs.extend(chunk?);
        }
        let sigma_bar = pairs.iter().map(|p| p.bounds.condition.upper()).fold(f64::INFINITY, f64::min);
        let sigma_underbar = pairs.iter().map(|p| p.bounds.condition.lower()).fold(0.0, f64::max);
        Ok(CoreReport { flavor, epsilon: eps.to_vec(), sigma_bar, sigma_underbar, pairs })
    }

    /// Exact verdict: every pair's condition set admits `sigma2`.
    pub fn is_nonempty_at(&self, sigma2: f64) -> bool {
        self.pairs.iter().all(|p| p.bounds.condition.holds(sigma2))
    }

    /// Verdict from the two aggregated thresholds alone: `sigma2 <= sigma_bar`
    /// or `sigma2 >= sigma_underbar`, capped by any zero-overhead constraint.
    /// Agrees with [`Self::is_nonempty_at`] whenever the per-pair empty
    /// intervals overlap.
    pub fn threshold_verdict(&self, sigma2: f64) -> bool {
        let cap = self
            .pairs
            .iter()
            .filter_map(|p| match p.bounds.condition {
                ConditionSet::AtMost { upper } => Some(upper),
                _ => None,
            })
            .fold(f64::INFINITY, f64::min);
        sigma2 <= self.sigma_bar || (sigma2 >= self.sigma_underbar && sigma2 <= cap)
    }

    /// Union of the per-pair open intervals on which the core is empty,
    /// merged and sorted.
    pub fn empty_intervals(&self) -> Vec<(f64, f64)> {
        let mut iv: Vec<(f64, f64)> =
            self.pairs.iter().filter_map(|p| p.bounds.condition.empty_interval()).filter(|(a, b)| a < b).collect();
        iv.sort_by(|x, y| x.0.total_cmp(&y.0));
        let mut merged: Vec<(f64, f64)> = Vec::new();
        for (a, b) in iv {
            match merged.last_mut() {
                Some(last) if a < last.1 => last.1 = last.1.max(b),
                _ => merged.push((a, b)),
            }
        }
        merged
    }

    /// Nonempty for every `sigma^2 > 0`: all pairs fall in Case II or III
    /// (or Case I with `A <= C`).
    pub fn nonempty_for_all_noise(&self) -> bool {
        self.pairs.iter().all(|p| p.bounds.condition == ConditionSet::Always)
    }

    /// Every finite threshold in the table.
    pub fn thresholds(&self) -> Vec<f64> {
        self.pairs.iter().flat_map(|p| p.bounds.condition.thresholds()).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("link,coalition_mask,A,B,C,Psi,Delta,lower,upper,case\n");
        for p in &self.pairs {
            let c = &p.bounds.condition;
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{:?}",
                p.link + 1,
                p.coalition_mask,
                sig12(p.params.a),
                sig12(p.params.b),
                sig12(p.params.c),
                sig12(p.params.psi),
                sig12(p.params.delta),
                sig12(c.lower()),
                sig12(c.upper()),
                p.bounds.case
            );
        }
        out
    }
}

pub fn weak_core_report(ch: &ChannelSet, eps: &[f64]) -> Result<CoreReport> {
    CoreReport::build(ch, eps, CoreFlavor::Weak, &AnalysisOptions::default())
}

pub fn strong_core_report(ch: &ChannelSet, eps: &[f64]) -> Result<CoreReport> {
    CoreReport::build(ch, eps, CoreFlavor::Strong, &AnalysisOptions::default())
}

/// Zero-overhead threshold: the core is nonempty iff `sigma^2 <= ` this value.
pub fn zero_overhead_threshold(ch: &ChannelSet) -> Result<f64> {
    let k = ch.num_links();
    guard(k, DEFAULT_MAX_LINKS, "zero-overhead threshold")?;
    let gains = GainTable::new(ch)?;
    let mut best = f64::INFINITY;
    for s in proper_subsets(k) {
        for i in s.members() {
            let (a, b, c) = gains.powers(i, s, ch)?;
            if a > c {
                best = best.min(b * c / (a - c));
            }
        }
    }
    Ok(best)
}

/// Direct check of the deviation inequalities
/// `u_i(V(S)) - eps_i' <= u_i(V(N))` for all `i in S`, `S` proper, computed
/// from rates of the induced ZF profiles.
pub fn core_nonempty_bruteforce(ch: &ChannelSet, eps: &[f64], noise: NoisePower, flavor: CoreFlavor) -> Result<bool> {
    let k = ch.num_links();
    guard(k, DEFAULT_MAX_LINKS, "brute-force core check")?;
    let grand = rates_all(&profile_for_coalition(Coalition::grand(k), ch, noise, BfScheme::Zf)?, ch, noise)?;
    for s in proper_subsets(k) {
        let dev = rates_all(&profile_for_coalition(s, ch, noise, BfScheme::Zf)?, ch, noise)?;
        for i in s.members() {
            if dev[i] - flavor.effective_overhead(eps[i], s.len()) > grand[i] {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

pub fn weak_core_nonempty_bruteforce(ch: &ChannelSet, eps: &[f64], noise: NoisePower) -> Result<bool> {
    core_nonempty_bruteforce(ch, eps, noise, CoreFlavor::Weak)
}

/// Noise level above which every link prefers its singleton to any coalition
/// it could join; `0` when no pair imposes a finite constraint.
pub fn singleton_threshold(ch: &ChannelSet) -> Result<f64> {
    let k = ch.num_links();
    if k < 2 {
        return Err(Error::InvalidScenario("singleton threshold needs at least 2 links".into()));
    }
    guard(k, DEFAULT_MAX_LINKS, "singleton threshold")?;
    let gains = GainTable::new(ch)?;
    let mut best = 0.0f64;
    for r in 2..=k {
        for members in lex_combinations(k, r) {
            let s = Coalition::from_members(members)?;
            for i in s.members() {
                let h2 = ch.direct(i).norm_squared();
                let a = zf(i, s, ch)?.gain(ch.direct(i));
                let denom = h2 - a;
                if denom <= 1e-12 * h2 {
                    continue;
                }
                let b_single = gains.outside_interference(i, Coalition::singleton(i));
                let b_s = gains.outside_interference(i, s);
                best = best.max((a * b_single - h2 * b_s) / denom);
            }
        }
    }
    Ok(best)
}

/// Smallest uniform overhead making the weak core nonempty at `noise`, by
/// bisection on the brute-force verdict (absolute tolerance `1e-7`).
pub fn cost_of_stability(ch: &ChannelSet, noise: NoisePower) -> Result<f64> {
    let k = ch.num_links();
    let nonempty = |e: f64| weak_core_nonempty_bruteforce(ch, &vec![e; k], noise);
    if nonempty(0.0)? {
        return Ok(0.0);
    }
    let mut hi = 1.0;
    while !nonempty(hi)? {
        hi *= 2.0;
        if hi > 1e6 {
            return Err(Error::InvalidNoise(noise.value()));
        }
    }
    let mut lo = 0.0;
    while hi - lo > 1e-7 {
        let mid = 0.5 * (lo + hi);
        if nonempty(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{sample_channels, Scenario};
    use approx::assert_relative_eq;
    use num_complex::Complex64;

    #[test]
    fn case_one_threshold() {
        let p = CoalitionParams::from_powers(4.0, 1.0, 2.0, 0.0);
        let b = per_pair_condition_set(&p, 0.0);
        assert_eq!(b.case, PairCase::I);
        assert_eq!(b.condition, ConditionSet::AtMost { upper: 1.0 });
        let p = CoalitionParams::from_powers(2.0, 1.0, 2.0, 0.0);
        assert_eq!(per_pair_condition_set(&p, 0.0).condition, ConditionSet::Always);
    }

    #[test]
    fn case_three_nonnegative_psi() {
        // C = 0 gives Delta = Psi^2; Psi = 2 * 1 - 1.5.
        let p = CoalitionParams::from_powers(0.5, 1.0, 0.0, 1.0);
        assert_relative_eq!(p.psi, 0.5, epsilon = 1e-15);
        let b = per_pair_condition_set(&p, 1.0);
        assert_eq!(b.case, PairCase::III);
        assert_eq!(b.condition, ConditionSet::Always);
    }

    #[test]
    fn case_two_negative_discriminant() {
        // Psi = 2*2 - 4 = 0 would be case III; shrink A to push Psi < 0 with Delta < 0.
        let p = CoalitionParams::from_powers(3.5, 1.0, 1.0, 1.0);
        assert!(p.psi < 0.0 && p.delta < 0.0, "{p:?}");
        assert_eq!(per_pair_condition_set(&p, 1.0).case, PairCase::II);
    }

    #[test]
    fn case_four_roots() {
        let p = CoalitionParams::from_powers(10.0, 1.0, 1.0, 1.0);
        assert_relative_eq!(p.psi, -7.0, epsilon = 1e-14);
        assert_relative_eq!(p.delta, 41.0, epsilon = 1e-13);
        let b = per_pair_condition_set(&p, 1.0);
        assert_eq!(b.case, PairCase::IV);
        let s41 = 41f64.sqrt();
        assert_relative_eq!(b.condition.upper(), (7.0 - s41) / 2.0, max_relative = 1e-14);
        assert_relative_eq!(b.condition.lower(), (7.0 + s41) / 2.0, max_relative = 1e-14);
    }

    #[test]
    fn small_overhead_roots_are_stable() {
        // As eps -> 0 the smaller root tends to the Case I threshold C B / (A - C).
        let p = CoalitionParams::from_powers(4.0, 1.0, 2.0, 1e-12);
        let b = per_pair_condition_set(&p, 1e-12);
        assert_eq!(b.case, PairCase::IV);
        assert_relative_eq!(b.condition.upper(), 1.0, max_relative = 1e-9);
    }

    #[test]
    fn singleton_coalition_params() {
        let ch = sample_channels(&Scenario::iid(3, 3), 21, 0).unwrap();
        let p = coalition_params(1, Coalition::singleton(1), &ch, 0.0).unwrap();
        assert_relative_eq!(p.a, ch.direct(1).norm_squared(), max_relative = 1e-13);
        assert!(coalition_params(1, Coalition::grand(3), &ch, 0.0).is_err());
        assert!(coalition_params(0, Coalition::singleton(1), &ch, 0.0).is_err());
    }

    #[test]
    fn orthogonal_cross_channels() {
        // Every cross channel is orthogonal to the direct channel at the transmitter.
        let c = |re: f64, im: f64| Complex64::new(re, im);
        let d = vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
        let x = vec![c(0.0, 0.0), c(0.3, 0.4), c(0.0, 1.0)];
        let h = vec![
            vec![d.clone(), x.clone(), x.clone()],
            vec![x.clone(), d.clone(), x.clone()],
            vec![x.clone(), x.clone(), d.clone()],
        ];
        let ch = ChannelSet::new(h).unwrap();
        let s = Coalition::from_members([0, 1]).unwrap();
        let p = coalition_params(0, s, &ch, 0.0).unwrap();
        assert_relative_eq!(p.a, 1.0, max_relative = 1e-14);
        assert_relative_eq!(p.c, 1.0, max_relative = 1e-14);
        assert_eq!(p.b, 0.0);
        assert_eq!(singleton_threshold(&ch).unwrap(), 0.0);
    }

    #[test]
    fn guard_caps_enumeration() {
        let ch = sample_channels(&Scenario::iid(17, 2), 0, 0).unwrap();
        let err = weak_core_report(&ch, &[0.0; 17]).unwrap_err();
        assert!(matches!(err, Error::TooManyLinks { links: 17, .. }));
    }

    #[test]
    fn subsets_are_ordered_by_size_then_lex() {
        let s: Vec<String> = proper_subsets(3).iter().map(|c| c.to_string()).collect();
        assert_eq!(s, ["{1}", "{2}", "{3}", "{1,2}", "{1,3}", "{2,3}"]);
        assert_eq!(proper_subsets(5).len(), 30);
    }

    #[test]
    fn empty_intervals_merge() {
        let ch = sample_channels(&Scenario::iid(3, 3), 2, 0).unwrap();
        let r = weak_core_report(&ch, &[0.3, 0.5, 0.2]).unwrap();
        let iv = r.empty_intervals();
        assert!(iv.windows(2).all(|w| w[0].1 <= w[1].0));
        for &(a, b) in &iv {
            if b.is_finite() {
                assert!(!r.is_nonempty_at(0.5 * (a + b)) || a == b);
            }
        }
    }

    #[test]
    fn csv_has_one_row_per_pair() {
        let ch = sample_channels(&Scenario::iid(3, 3), 2, 0).unwrap();
        let r = weak_core_report(&ch, &[0.0; 3]).unwrap();
        // 3 singletons + 3 pairs of 2 members.
        assert_eq!(r.pairs.len(), 9);
        assert_eq!(r.to_csv().lines().count(), 10);
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(json["pairs"].as_array().unwrap().len(), 9);
        assert_eq!(json["pairs"][0]["link"], 1);
    }
}
