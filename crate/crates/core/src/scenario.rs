//! Topologies, channel realizations and the SNR convention.
//!
//! A [`Scenario`] fixes the link count, antenna counts and (optionally) the
//! planar positions of transmitters and receivers. [`sample_channels`] draws a
//! [`ChannelSet`] from it as a pure function of `(seed, realization)`: each
//! realization reads its own ChaCha20 stream, so realizations can be drawn in
//! any order or in parallel.
//!
//! With positions, `h_kl = d_kl^(-delta/2) * g / |g|` with `g ~ CN(0, I)`.
//! Without positions the draw is plain `CN(0, I)`.

use std::path::Path;

use nalgebra::DVector;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::coalition::MAX_LINKS;
use crate::error::{Error, Result};

pub type CVector = DVector<Complex64>;

/// Relative tolerance for deciding that two direct distances are equal.
const DISTANCE_RTOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Antennas {
    Uniform(usize),
    PerLink(Vec<usize>),
}

/// Static description of a K-link MISO interference channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub links: usize,
    pub antennas: Antennas,
    #[serde(default = "default_pathloss_exponent")]
    pub pathloss_exponent: f64,
    /// Reference direct distance in meters for position-free scenarios.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direct_distance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tx_positions: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rx_positions: Option<Vec<[f64; 2]>>,
}

fn default_pathloss_exponent() -> f64 {
    3.0
}

impl Scenario {
    /// Position-free scenario with `links` transmitters of `antennas` antennas each.
    pub fn iid(links: usize, antennas: usize) -> Self {
        Scenario {
            links,
            antennas: Antennas::Uniform(antennas),
            pathloss_exponent: default_pathloss_exponent(),
            direct_distance: None,
            tx_positions: None,
            rx_positions: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let s: Scenario = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        s.validate()?;
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Scenario::from_json(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn antenna_counts(&self) -> Vec<usize> {
        match &self.antennas {
            Antennas::Uniform(n) => vec![*n; self.links],
            Antennas::PerLink(v) => v.clone(),
        }
    }

    pub fn has_positions(&self) -> bool {
        self.tx_positions.is_some()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidScenario(m));
        if self.links == 0 || self.links > MAX_LINKS {
            return bad(format!("link count must be in 1..={MAX_LINKS}, got {}", self.links));
        }
        let ants = self.antenna_counts();
        if ants.len() != self.links {
            return bad(format!("{} antenna counts for {} links", ants.len(), self.links));
        }
        if let Some(n) = ants.iter().find(|&&n| n < 2) {
            return bad(format!("every transmitter needs at least 2 antennas, got {n}"));
        }
        if !(self.pathloss_exponent.is_finite() && self.pathloss_exponent > 0.0) {
            return bad(format!("path-loss exponent must be positive, got {}", self.pathloss_exponent));
        }
        if let Some(d) = self.direct_distance {
            if !(d.is_finite() && d > 0.0) {
                return bad(format!("direct distance must be positive, got {d}"));
            }
        }
        match (&self.tx_positions, &self.rx_positions) {
            (None, None) => Ok(()),
            (Some(tx), Some(rx)) => {
                if tx.len() != self.links || rx.len() != self.links {
                    return bad(format!(
                        "expected {} transmitter and receiver positions, got {} and {}",
                        self.links,
                        tx.len(),
                        rx.len()
                    ));
                }
                for i in 0..self.links {
                    for j in 0..self.links {
                        let d = self.distance(i, j).unwrap_or(0.0);
                        if !(d > 0.0 && d.is_finite()) {
                            return bad(format!("transmitter {} and receiver {} coincide", i + 1, j + 1));
                        }
                    }
                }
                Ok(())
            }
            _ => bad("transmitter and receiver positions must be given together".into()),
        }
    }

    /// Distance from transmitter `i` to receiver `j`, if positions are known.
    pub fn distance(&self, i: usize, j: usize) -> Option<f64> {
        let tx = self.tx_positions.as_ref()?.get(i)?;
        let rx = self.rx_positions.as_ref()?.get(j)?;
        Some((tx[0] - rx[0]).hypot(tx[1] - rx[1]))
    }

    /// The direct distance shared by all links, used by the SNR definition.
    pub fn reference_distance(&self) -> Result<f64> {
        if !self.has_positions() {
            return Ok(self.direct_distance.unwrap_or(1.0));
        }
        let direct: Vec<f64> = (0..self.links).filter_map(|k| self.distance(k, k)).collect();
        let min = direct.iter().copied().fold(f64::INFINITY, f64::min);
        let max = direct.iter().copied().fold(0.0, f64::max);
        if max - min > DISTANCE_RTOL * max {
            return Err(Error::AmbiguousSnr { min, max });
        }
        if let Some(d) = self.direct_distance {
            if (d - max).abs() > DISTANCE_RTOL * max {
                return Err(Error::AmbiguousSnr { min: d.min(max), max: d.max(max) });
            }
        }
        Ok(max)
    }
}

/// Additive noise power `sigma^2` in linear units.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NoisePower(f64);

impl NoisePower {
    pub fn new(sigma2: f64) -> Result<Self> {
        if sigma2.is_finite() && sigma2 >= 0.0 {
            Ok(NoisePower(sigma2))
        } else {
            Err(Error::InvalidNoise(sigma2))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// `sigma^2 = d_ref^(-delta) / snr`, with `snr` as a linear ratio.
pub fn snr_to_sigma2(scenario: &Scenario, snr: f64) -> Result<NoisePower> {
    if !(snr.is_finite() && snr > 0.0) {
        return Err(Error::InvalidNoise(snr));
    }
    let d = scenario.reference_distance()?;
    NoisePower::new(d.powf(-scenario.pathloss_exponent) / snr)
}

/// Every channel vector of one realization. `h(i, j)` is the channel from
/// transmitter `i` to receiver `j` and has length `N_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet {
    k: usize,
    antennas: Vec<usize>,
    h: Vec<CVector>,
}

impl ChannelSet {
    /// Builds a channel set from `h[i][j]` vectors.
    pub fn new(h: Vec<Vec<Vec<Complex64>>>) -> Result<Self> {
        let k = h.len();
        if k == 0 || k > MAX_LINKS {
            return Err(Error::InvalidScenario(format!("link count {k} out of range")));
        }
        let mut antennas = Vec::with_capacity(k);
        let mut flat = Vec::with_capacity(k * k);
        for (i, row) in h.into_iter().enumerate() {
            if row.len() != k {
                return Err(Error::InvalidScenario(format!(
                    "transmitter {} has {} channel vectors, expected {k}",
                    i + 1,
                    row.len()
                )));
            }
            let n = row[0].len();
            for (j, v) in row.into_iter().enumerate() {
                if v.len() != n {
                    return Err(Error::InvalidScenario(format!(
                        "channel {}->{} has length {}, expected {n}",
                        i + 1,
                        j + 1,
                        v.len()
                    )));
                }
                if v.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                    return Err(Error::InvalidScenario(format!("channel {}->{} is not finite", i + 1, j + 1)));
                }
                flat.push(CVector::from_vec(v));
            }
            antennas.push(n);
        }
        let set = ChannelSet { k, antennas, h: flat };
        for i in 0..k {
            if set.direct(i).norm() == 0.0 {
                return Err(Error::DegenerateChannel { link: i + 1 });
            }
        }
        Ok(set)
    }

    pub fn num_links(&self) -> usize {
        self.k
    }

    pub fn antennas(&self, i: usize) -> usize {
        self.antennas[i]
    }

    /// Channel from transmitter `i` to receiver `j`.
    pub fn get(&self, i: usize, j: usize) -> &CVector {
        &self.h[i * self.k + j]
    }

    pub fn direct(&self, i: usize) -> &CVector {
        self.get(i, i)
    }

    /// Plain nested representation `h[i][j][antenna] = [re, im]`.
    pub fn to_file(&self) -> ChannelFile {
        ChannelFile {
            h: (0..self.k)
                .map(|i| (0..self.k).map(|j| self.get(i, j).iter().map(|z| [z.re, z.im]).collect()).collect())
                .collect(),
        }
    }

    pub fn from_file(file: ChannelFile) -> Result<Self> {
        ChannelSet::new(
            file.h
                .into_iter()
                .map(|row| {
                    row.into_iter().map(|v| v.into_iter().map(|[re, im]| Complex64::new(re, im)).collect()).collect()
                })
                .collect(),
        )
    }
}

/// JSON layout of an explicit channel set.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelFile {
    pub h: Vec<Vec<Vec<[f64; 2]>>>,
}

/// Draws one `CN(0, 1)` sample: real and imaginary parts have variance 1/2.
fn complex_gaussian<R: rand::Rng>(rng: &mut R) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// The generator used for `(seed, realization)`.
pub fn realization_rng(seed: u64, realization: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(realization);
    rng
}

/// Samples the channels of one realization.
pub fn sample_channels(scenario: &Scenario, seed: u64, realization: u64) -> Result<ChannelSet> {
    scenario.validate()?;
    let k = scenario.links;
    let ants = scenario.antenna_counts();
    let mut rng = realization_rng(seed, realization);
    let mut h = Vec::with_capacity(k);
    for (i, &n) in ants.iter().enumerate() {
        let mut row = Vec::with_capacity(k);
        for j in 0..k {
            let mut v: Vec<Complex64> = (0..n).map(|_| complex_gaussian(&mut rng)).collect();
            if let Some(d) = scenario.distance(i, j) {
                let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                let scale = d.powf(-scenario.pathloss_exponent / 2.0) / norm;
                v.iter_mut().for_each(|z| *z *= scale);
            }
            row.push(v);
        }
        h.push(row);
    }
    ChannelSet::new(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn line_scenario(d: f64) -> Scenario {
        Scenario {
            links: 2,
            antennas: Antennas::Uniform(3),
            pathloss_exponent: 3.0,
            direct_distance: None,
            tx_positions: Some(vec![[0.0, 0.0], [0.0, 50.0]]),
            rx_positions: Some(vec![[d, 0.0], [d, 50.0]]),
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let s = Scenario::iid(3, 4);
        let a = sample_channels(&s, 7, 11).unwrap();
        let b = sample_channels(&s, 7, 11).unwrap();
        assert_eq!(a, b);
        let c = sample_channels(&s, 7, 12).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn path_loss_sets_the_norm() {
        let s = line_scenario(100.0);
        let ch = sample_channels(&s, 1, 0).unwrap();
        // 100^(-3/2) = 1e-3
        assert_relative_eq!(ch.direct(0).norm(), 1e-3, max_relative = 1e-14);
        for i in 0..2 {
            for j in 0..2 {
                let d = s.distance(i, j).unwrap();
                assert_relative_eq!(ch.get(i, j).norm(), d.powf(-1.5), max_relative = 1e-14);
            }
        }
    }

    #[test]
    fn coinciding_positions_are_rejected() {
        let mut s = line_scenario(100.0);
        s.rx_positions = Some(vec![[0.0, 0.0], [100.0, 50.0]]);
        assert!(matches!(sample_channels(&s, 0, 0), Err(Error::InvalidScenario(_))));
    }

    #[test]
    fn snr_conversion() {
        let s = Scenario::iid(2, 2);
        assert_eq!(snr_to_sigma2(&s, 1.0).unwrap().value(), 1.0);
        assert_relative_eq!(
            snr_to_sigma2(&s, db_to_linear(25.0)).unwrap().value(),
            10f64.powf(-2.5),
            max_relative = 1e-14
        );
        let far = line_scenario(100.0);
        assert_relative_eq!(snr_to_sigma2(&far, 1.0).unwrap().value(), 1e-6, max_relative = 1e-12);
        let mut fixed = Scenario::iid(2, 2);
        fixed.direct_distance = Some(100.0);
        assert_relative_eq!(snr_to_sigma2(&fixed, 1.0).unwrap().value(), 1e-6, max_relative = 1e-12);
    }

    #[test]
    fn unequal_direct_distances_make_snr_ambiguous() {
        let mut s = line_scenario(100.0);
        s.rx_positions = Some(vec![[100.0, 0.0], [60.0, 50.0]]);
        assert!(matches!(snr_to_sigma2(&s, 1.0), Err(Error::AmbiguousSnr { .. })));
    }

    #[test]
    fn validation_catches_bad_fields() {
        let mut s = Scenario::iid(2, 1);
        assert!(s.validate().is_err());
        s.antennas = Antennas::PerLink(vec![2, 2, 2]);
        assert!(s.validate().is_err());
        s.antennas = Antennas::Uniform(2);
        s.pathloss_exponent = 0.0;
        assert!(s.validate().is_err());
    }

    #[test]
    fn scenario_json_round_trip() {
        let s = line_scenario(80.0);
        let text = serde_json::to_string(&s).unwrap();
        assert_eq!(Scenario::from_json(&text).unwrap(), s);
        let err = Scenario::from_json("{\n \"links\": 2,\n \"antenas\": 2\n}").unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");
    }

    #[test]
    fn channel_file_round_trip() {
        let ch = sample_channels(&Scenario::iid(3, 2), 5, 0).unwrap();
        let text = serde_json::to_string(&ch.to_file()).unwrap();
        let back = ChannelSet::from_file(serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back, ch);
    }

    #[test]
    fn zero_direct_channel_is_degenerate() {
        let z = Complex64::new(0.0, 0.0);
        let o = Complex64::new(1.0, 0.0);
        let h = vec![vec![vec![z, z], vec![o, o]], vec![vec![o, z], vec![o, o]]];
        assert_eq!(ChannelSet::new(h), Err(Error::DegenerateChannel { link: 1 }));
    }
}
