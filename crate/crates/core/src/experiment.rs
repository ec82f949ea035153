//! Batch commands behind the CLI: threshold tables, single formation runs,
//! Monte-Carlo SNR sweeps and complexity tables.
//!
//! Sweeps fan out over `(snr, realization)` slots. Each slot draws its
//! channels from its own substream and writes to its own result slot, and the
//! averages are compensated sums taken in slot order, so output is identical
//! for any worker count.

use std::fmt::Write as _;

use serde::Serialize;

use crate::beamforming::{nash_profile, BfScheme};
use crate::combinatorics::CountTable;
use crate::config::{ComplexityConfig, FormationRunConfig, SweepConfig, ThresholdsConfig};
use crate::core_analysis::{singleton_threshold, zero_overhead_threshold, AnalysisOptions, CoreFlavor, CoreReport};
use crate::error::{Error, Result};
use crate::exec::{compensated_sum, Execution};
use crate::formation::{run_formation_with, FormationConfig, FormationResult, OverheadModel};
use crate::output::{finite_or_null, sig12};
use crate::rates::rates_all;
use crate::scenario::{db_to_linear, sample_channels, snr_to_sigma2};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdRow {
    pub epsilon: f64,
    pub weak_lower: f64,
    #[serde(serialize_with = "finite_or_null")]
    pub weak_upper: f64,
    pub strong_lower: f64,
    #[serde(serialize_with = "finite_or_null")]
    pub strong_upper: f64,
    /// Zero-overhead threshold, independent of `epsilon`.
    #[serde(serialize_with = "finite_or_null")]
    pub sigma_hat: f64,
    /// Noise level above which all links stay alone, independent of `epsilon`.
    pub sigma_check: f64,
    /// Noise intervals where the weak core is empty.
    pub weak_empty: Vec<Interval>,
    pub strong_empty: Vec<Interval>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub from: f64,
    #[serde(serialize_with = "finite_or_null")]
    pub to: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdTable {
    pub links: usize,
    pub rows: Vec<ThresholdRow>,
}

impl ThresholdTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "epsilon,weak_lower,weak_upper,strong_lower,strong_upper,sigma_hat,sigma_check,weak_empty,strong_empty\n",
        );
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                r.epsilon,
                sig12(r.weak_lower),
                sig12(r.weak_upper),
                sig12(r.strong_lower),
                sig12(r.strong_upper),
                sig12(r.sigma_hat),
                sig12(r.sigma_check),
                intervals_field(&r.weak_empty),
                intervals_field(&r.strong_empty),
            );
        }
        out
    }
}

/// `from:to` pairs joined by `;`.
fn intervals_field(v: &[Interval]) -> String {
    v.iter().map(|i| format!("{}:{}", sig12(i.from), sig12(i.to))).collect::<Vec<_>>().join(";")
}

fn intervals(report: &CoreReport) -> Vec<Interval> {
    report.empty_intervals().into_iter().map(|(from, to)| Interval { from, to }).collect()
}

/// Weak and strong core thresholds over a grid of uniform overheads.
pub fn cmd_thresholds(cfg: &ThresholdsConfig, exec: Execution) -> Result<ThresholdTable> {
    cfg.validate()?;
    let scenario = cfg.source.scenario()?;
    let ch = cfg.source.channels(&scenario)?;
    let k = ch.num_links();
    let opts = AnalysisOptions { max_links: cfg.max_links, exec };
    let sigma_hat = zero_overhead_threshold(&ch)?;
    let sigma_check = singleton_threshold(&ch)?;
    let rows = cfg
        .epsilon
        .iter()
        .map(|&e| {
            let eps = vec![e; k];
            let weak = CoreReport::build(&ch, &eps, CoreFlavor::Weak, &opts)?;
            let strong = CoreReport::build(&ch, &eps, CoreFlavor::Strong, &opts)?;
            Ok(ThresholdRow {
                epsilon: e,
                weak_lower: weak.sigma_underbar,
                weak_upper: weak.sigma_bar,
                strong_lower: strong.sigma_underbar,
                strong_upper: strong.sigma_bar,
                sigma_hat,
                sigma_check,
                weak_empty: intervals(&weak),
                strong_empty: intervals(&strong),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ThresholdTable { links: k, rows })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FormationRun {
    pub scheme: BfScheme,
    pub q: usize,
    pub overhead: OverheadModel,
    pub sigma2: f64,
    #[serde(flatten)]
    pub result: FormationResult,
}

/// One traced formation run.
pub fn cmd_formation(cfg: &FormationRunConfig) -> Result<FormationRun> {
    let scenario = cfg.source.scenario()?;
    let ch = cfg.source.channels(&scenario)?;
    let noise = cfg.noise.noise(&scenario)?;
    let fc = FormationConfig::new(cfg.q, cfg.scheme, cfg.overhead.clone());
    let result = run_formation_with(&ch, noise, &fc)?;
    Ok(FormationRun { scheme: cfg.scheme, q: cfg.q, overhead: cfg.overhead.clone(), sigma2: noise.value(), result })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub snr_db: f64,
    pub scheme: BfScheme,
    pub q: usize,
    pub overhead: String,
    pub avg_user_rate: f64,
    pub avg_num_coalitions: f64,
    pub avg_theta: f64,
    /// Average user rate when every link plays MRT.
    pub avg_ne_rate: f64,
    pub realizations: u64,
}

pub const SWEEP_HEADER: &str =
    "snr_db,scheme,q,overhead,avg_user_rate,avg_num_coalitions,avg_theta,avg_ne_rate,realizations";

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.snr_db,
            r.scheme,
            r.q,
            r.overhead,
            sig12(r.avg_user_rate),
            sig12(r.avg_num_coalitions),
            sig12(r.avg_theta),
            sig12(r.avg_ne_rate),
            r.realizations
        );
    }
    out
}

/// Outcome of one formation run inside a sweep slot.
#[derive(Debug, Clone, Copy)]
struct RunStats {
    rate: f64,
    coalitions: f64,
    theta: f64,
}

struct SlotResult {
    ne_rate: f64,
    runs: Vec<RunStats>,
}

fn mean(values: impl IntoIterator<Item = f64>, n: usize) -> f64 {
    compensated_sum(values) / n as f64
}

/// Monte-Carlo sweep: one row per `(snr, scheme, q, overhead)`, in that
/// nesting order.
pub fn cmd_sweep(cfg: &SweepConfig, exec: Execution) -> Result<Vec<SweepRow>> {
    cfg.validate()?;
    let scenario = cfg.scenario()?;
    let k = scenario.links;
    if k > cfg.max_links {
        return Err(Error::TooManyLinks { what: "sweep", links: k, cap: cfg.max_links });
    }
    if k < 2 {
        return Err(Error::InvalidScenario("a sweep needs at least 2 links".into()));
    }
    let noises = cfg.snr_db.iter().map(|&db| snr_to_sigma2(&scenario, db_to_linear(db))).collect::<Result<Vec<_>>>()?;

    let mut combos = Vec::new();
    for &scheme in &cfg.schemes {
        for &q in &cfg.q_values {
            for overhead in &cfg.overheads {
                let mut fc = FormationConfig::new(q, scheme, overhead.clone());
                fc.record_trace = false;
                combos.push(fc);
            }
        }
    }

    let reps = cfg.realizations as usize;
    let slots = exec.map(noises.len() * reps, |slot| -> Result<SlotResult> {
        let (s, r) = (slot / reps, slot % reps);
        let ch = sample_channels(&scenario, cfg.seed, r as u64)?;
        let noise = noises[s];
        let ne = rates_all(&nash_profile(&ch)?, &ch, noise)?;
        let runs = combos
            .iter()
            .map(|fc| {
                let res = run_formation_with(&ch, noise, fc)?;
                Ok(RunStats {
                    rate: res.average_rate(),
                    coalitions: res.final_structure.len() as f64,
                    theta: res.theta as f64,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SlotResult { ne_rate: mean(ne.iter().copied(), k), runs })
    });
    let slots = slots.into_iter().collect::<Result<Vec<_>>>()?;

    let mut rows = Vec::with_capacity(noises.len() * combos.len());
    for (s, &snr_db) in cfg.snr_db.iter().enumerate() {
        let block = &slots[s * reps..(s + 1) * reps];
        let avg_ne_rate = mean(block.iter().map(|x| x.ne_rate), reps);
        for (c, fc) in combos.iter().enumerate() {
            let stat = |f: fn(&RunStats) -> f64| mean(block.iter().map(|x| f(&x.runs[c])), reps);
            rows.push(SweepRow {
                snr_db,
                scheme: fc.scheme,
                q: fc.q,
                overhead: fc.overhead.tag().to_string(),
                avg_user_rate: stat(|x| x.rate),
                avg_num_coalitions: stat(|x| x.coalitions),
                avg_theta: stat(|x| x.theta),
                avg_ne_rate,
                realizations: cfg.realizations,
            });
        }
    }
    Ok(rows)
}

pub fn cmd_complexity(cfg: &ComplexityConfig) -> CountTable {
    CountTable::build(cfg.links.iter().copied(), &cfg.q_values)
}
