//! MRT, zero-forcing and Wiener-filter beamformers, and the strategy profiles
//! they induce for a single coalition or a whole coalition structure.
//!
//! Every beamformer satisfies the unit power budget with equality, except a
//! zero-forcing transmitter that has no room left outside the span of its
//! partners' channels: it is switched off and returns the exact zero vector.

use std::fmt;
use std::str::FromStr;

use nalgebra::{Cholesky, DMatrix};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::coalition::{Coalition, CoalitionStructure};
use crate::error::{Error, Result};
use crate::scenario::{CVector, ChannelSet, NoisePower};

/// A projection this small relative to `|h_ii|` counts as "no null space left".
pub const ZF_ZERO_RTOL: f64 = 1e-12;

/// One transmitter's beamforming vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Beamformer(CVector);

impl Beamformer {
    pub fn zeros(n: usize) -> Self {
        Beamformer(CVector::zeros(n))
    }

    /// Wraps `v` scaled to unit norm. A zero vector stays zero.
    pub fn normalized(v: CVector) -> Self {
        let n = v.norm();
        if n == 0.0 {
            Beamformer(v)
        } else {
            Beamformer(v.unscale(n))
        }
    }

    pub fn vector(&self) -> &CVector {
        &self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|z| z.re == 0.0 && z.im == 0.0)
    }

    /// `|h^H w|^2`, the power this beamformer delivers through channel `h`.
    pub fn gain(&self, h: &CVector) -> f64 {
        h.dotc(&self.0).norm_sqr()
    }
}

/// One beamformer per link.
#[derive(Debug, Clone, PartialEq)]
pub struct StrategyProfile(Vec<Beamformer>);

impl StrategyProfile {
    pub fn new(beamformers: Vec<Beamformer>) -> Self {
        StrategyProfile(beamformers)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> &Beamformer {
        &self.0[i]
    }

    pub fn set(&mut self, i: usize, w: Beamformer) {
        self.0[i] = w;
    }

    pub fn iter(&self) -> impl Iterator<Item = &Beamformer> {
        self.0.iter()
    }
}

/// Cooperative beamforming used inside a coalition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BfScheme {
    #[serde(rename = "ZF", alias = "zf")]
    Zf,
    #[serde(rename = "WF", alias = "wf")]
    Wf,
}

impl BfScheme {
    pub fn as_str(self) -> &'static str {
        match self {
            BfScheme::Zf => "ZF",
            BfScheme::Wf => "WF",
        }
    }
}

impl fmt::Display for BfScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BfScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "zf" => Ok(BfScheme::Zf),
            "wf" => Ok(BfScheme::Wf),
            other => Err(Error::Config(format!("unknown beamforming scheme {other:?}"))),
        }
    }
}

/// Maximum ratio transmission `w = h / |h|`, the dominant strategy.
pub fn mrt(h_ii: &CVector) -> Result<Beamformer> {
    let n = h_ii.norm();
    if n == 0.0 || !n.is_finite() {
        return Err(Error::DegenerateChannel { link: 0 });
    }
    Ok(Beamformer(h_ii.unscale(n)))
}

fn mrt_link(i: usize, ch: &ChannelSet) -> Result<Beamformer> {
    mrt(ch.direct(i)).map_err(|_| Error::DegenerateChannel { link: i + 1 })
}

fn check_member(i: usize, s: Coalition) -> Result<()> {
    if s.contains(i) {
        Ok(())
    } else {
        Err(Error::InvalidDeviation(format!("link {} is not in coalition {s}", i + 1)))
    }
}

/// Orthonormal basis of the column span of `z`, from a thin SVD with the
/// usual `max(rows, cols) * eps * s_max` rank cut.
fn column_span_basis(z: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let svd = z.clone().svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let s = &svd.singular_values;
    let s_max = s.iter().copied().fold(0.0, f64::max);
    let cut = s_max * (z.nrows().max(z.ncols()) as f64) * f64::EPSILON;
    let keep: Vec<usize> = (0..s.len()).filter(|&k| s[k] > cut).collect();
    u.select_columns(keep.iter())
}

/// Transmitter `i`'s zero-forcing beamformer towards the other members of `s`.
pub fn zf(i: usize, s: Coalition, ch: &ChannelSet) -> Result<Beamformer> {
    check_member(i, s)?;
    if s.len() == 1 {
        return mrt_link(i, ch);
    }
    let n = ch.antennas(i);
    if n < s.len() {
        return Ok(Beamformer::zeros(n));
    }
    let h = ch.direct(i);
    let cross: Vec<&CVector> = s.members().filter(|&j| j != i).map(|j| ch.get(i, j)).collect();
    let z = DMatrix::from_columns(&cross.iter().map(|c| (*c).clone()).collect::<Vec<_>>());
    let basis = column_span_basis(&z);
    let mut p = h.clone();
    // Project twice; the second pass removes what roundoff left in the span.
    for _ in 0..2 {
        let coeffs = basis.ad_mul(&p);
        p -= &basis * coeffs;
    }
    let pn = p.norm();
    if pn <= ZF_ZERO_RTOL * h.norm() {
        return Ok(Beamformer::zeros(n));
    }
    Ok(Beamformer(p.unscale(pn)))
}

/// Transmitter `i`'s Wiener-filter precoder towards the other members of `s`:
/// `(sigma^2 I + sum_j h_ij h_ij^H)^-1 h_ii`, normalized.
pub fn wf(i: usize, s: Coalition, ch: &ChannelSet, noise: NoisePower) -> Result<Beamformer> {
    check_member(i, s)?;
    let sigma2 = noise.value();
    if sigma2 <= 0.0 {
        return Err(Error::SingularMatrix(sigma2));
    }
    if s.len() == 1 {
        return mrt_link(i, ch);
    }
    let n = ch.antennas(i);
    let mut m = DMatrix::<Complex64>::identity(n, n) * Complex64::new(sigma2, 0.0);
    for j in s.members().filter(|&j| j != i) {
        let hij = ch.get(i, j);
        m += hij * hij.adjoint();
    }
    let chol = Cholesky::new(m).ok_or(Error::SingularMatrix(sigma2))?;
    let x = chol.solve(ch.direct(i));
    Ok(Beamformer::normalized(x))
}

/// Beamformer of member `i` of coalition `s` under `scheme`.
pub fn coalition_beamformer(
    i: usize,
    s: Coalition,
    ch: &ChannelSet,
    noise: NoisePower,
    scheme: BfScheme,
) -> Result<Beamformer> {
    match scheme {
        BfScheme::Zf => zf(i, s, ch),
        BfScheme::Wf => wf(i, s, ch, noise),
    }
}

/// All links play MRT: the Nash equilibrium.
pub fn nash_profile(ch: &ChannelSet) -> Result<StrategyProfile> {
    (0..ch.num_links()).map(|i| mrt_link(i, ch)).collect::<Result<Vec<_>>>().map(StrategyProfile)
}

/// Members of `s` cooperate with `scheme`, everyone else plays MRT.
pub fn profile_for_coalition(
    s: Coalition,
    ch: &ChannelSet,
    noise: NoisePower,
    scheme: BfScheme,
) -> Result<StrategyProfile> {
    let mut profile = nash_profile(ch)?;
    if s.len() > 1 {
        for i in s.members() {
            profile.set(i, coalition_beamformer(i, s, ch, noise, scheme)?);
        }
    }
    Ok(profile)
}

/// Every coalition of `cs` cooperates internally with `scheme`.
pub fn profile_for_structure(
    cs: &CoalitionStructure,
    ch: &ChannelSet,
    noise: NoisePower,
    scheme: BfScheme,
) -> Result<StrategyProfile> {
    let mut profile = nash_profile(ch)?;
    for &s in cs.coalitions() {
        if s.len() > 1 {
            for i in s.members() {
                profile.set(i, coalition_beamformer(i, s, ch, noise, scheme)?);
            }
        }
    }
    Ok(profile)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{sample_channels, Scenario};
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn cv(v: &[Complex64]) -> CVector {
        CVector::from_column_slice(v)
    }

    fn two_link(h11: [Complex64; 2], h12: [Complex64; 2]) -> ChannelSet {
        let h21 = vec![c(1.0, 0.0), c(0.0, 1.0)];
        let h22 = vec![c(0.0, 1.0), c(1.0, 0.0)];
        ChannelSet::new(vec![vec![h11.to_vec(), h12.to_vec()], vec![h21, h22]]).unwrap()
    }

    #[test]
    fn mrt_normalizes() {
        let w = mrt(&cv(&[c(3.0, 0.0), c(0.0, 4.0)])).unwrap();
        assert_relative_eq!(w.vector()[0].re, 0.6, epsilon = 1e-15);
        assert_relative_eq!(w.vector()[1].im, 0.8, epsilon = 1e-15);
        let h = cv(&[c(1.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(mrt(&h).unwrap().vector(), &h);
        assert!(matches!(mrt(&cv(&[c(0.0, 0.0); 2])), Err(Error::DegenerateChannel { .. })));
    }

    #[test]
    fn mrt_attains_cauchy_schwarz() {
        let h = cv(&[c(0.3, -1.2), c(2.0, 0.5), c(-0.7, 0.1)]);
        let w = mrt(&h).unwrap();
        assert_relative_eq!(w.gain(&h).sqrt(), h.norm(), max_relative = 1e-14);
    }

    #[test]
    fn zf_with_orthogonal_channels_is_mrt() {
        let ch = two_link([c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]);
        let w = zf(0, Coalition::grand(2), &ch).unwrap();
        assert_relative_eq!(w.vector()[0].re, 1.0, epsilon = 1e-15);
        assert_relative_eq!(w.vector()[1].norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn zf_projects_out_partner_channel() {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let ch = two_link([c(r, 0.0), c(r, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]);
        let w = zf(0, Coalition::grand(2), &ch).unwrap();
        assert_relative_eq!(w.vector()[0].norm(), 0.0, epsilon = 1e-15);
        assert_relative_eq!(w.vector()[1].re, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn zf_switches_off_without_room() {
        // N = 2 with three coalition members.
        let ch = sample_channels(&Scenario::iid(3, 2), 3, 0).unwrap();
        let w = zf(0, Coalition::grand(3), &ch).unwrap();
        assert!(w.is_zero());
    }

    #[test]
    fn zf_switches_off_when_direct_channel_is_in_span() {
        let ch = two_link([c(1.0, 1.0), c(2.0, 0.0)], [c(2.0, 2.0), c(4.0, 0.0)]);
        assert!(zf(0, Coalition::grand(2), &ch).unwrap().is_zero());
    }

    #[test]
    fn zf_survives_collinear_cross_channels() {
        let ch = sample_channels(&Scenario::iid(3, 3), 9, 0).unwrap();
        let mut h: Vec<Vec<Vec<Complex64>>> =
            (0..3).map(|i| (0..3).map(|j| ch.get(i, j).iter().copied().collect()).collect()).collect();
        h[0][2] = h[0][1].iter().map(|z| z * c(0.5, -2.0)).collect();
        let ch = ChannelSet::new(h).unwrap();
        let w = zf(0, Coalition::grand(3), &ch).unwrap();
        assert_relative_eq!(w.norm(), 1.0, epsilon = 1e-12);
        assert!(w.gain(ch.get(0, 1)).sqrt() <= 1e-10 * ch.get(0, 1).norm());
        assert!(w.gain(ch.get(0, 2)).sqrt() <= 1e-10 * ch.get(0, 2).norm());
    }

    #[test]
    fn non_member_is_rejected() {
        let ch = sample_channels(&Scenario::iid(3, 3), 1, 0).unwrap();
        let s = Coalition::from_members([1, 2]).unwrap();
        assert!(zf(0, s, &ch).is_err());
        assert!(wf(0, s, &ch, NoisePower::new(1.0).unwrap()).is_err());
    }

    #[test]
    fn wf_singleton_is_mrt_and_zero_noise_errors() {
        let ch = sample_channels(&Scenario::iid(2, 3), 2, 0).unwrap();
        let one = Coalition::singleton(1);
        let w = wf(1, one, &ch, NoisePower::new(0.3).unwrap()).unwrap();
        assert_eq!(w, mrt(ch.direct(1)).unwrap());
        assert_eq!(wf(0, Coalition::grand(2), &ch, NoisePower::new(0.0).unwrap()), Err(Error::SingularMatrix(0.0)));
    }

    #[test]
    fn coalition_profile_uses_mrt_outside() {
        let ch = sample_channels(&Scenario::iid(3, 3), 4, 0).unwrap();
        let noise = NoisePower::new(0.1).unwrap();
        let s = Coalition::from_members([0, 1]).unwrap();
        let p = profile_for_coalition(s, &ch, noise, BfScheme::Zf).unwrap();
        assert_eq!(p.get(2), &mrt(ch.direct(2)).unwrap());
        assert!(p.get(0).gain(ch.get(0, 1)) < 1e-20);
        let ne = nash_profile(&ch).unwrap();
        assert_eq!(profile_for_coalition(Coalition::singleton(1), &ch, noise, BfScheme::Wf).unwrap(), ne);
    }

    #[test]
    fn structure_profile_matches_composition() {
        let ch = sample_channels(&Scenario::iid(3, 3), 5, 0).unwrap();
        let noise = NoisePower::new(0.1).unwrap();
        let cs = CoalitionStructure::singletons(3).merge_positions(&[0, 1]).unwrap();
        let p = profile_for_structure(&cs, &ch, noise, BfScheme::Zf).unwrap();
        assert!(p.get(0).gain(ch.get(0, 1)).sqrt() <= 1e-10 * ch.get(0, 1).norm());
        assert!(p.get(1).gain(ch.get(1, 0)).sqrt() <= 1e-10 * ch.get(1, 0).norm());
        assert_eq!(p.get(2), &mrt(ch.direct(2)).unwrap());
        let grand = profile_for_structure(&CoalitionStructure::grand(3), &ch, noise, BfScheme::Wf).unwrap();
        assert_eq!(grand, profile_for_coalition(Coalition::grand(3), &ch, noise, BfScheme::Wf).unwrap());
        let single = profile_for_structure(&CoalitionStructure::singletons(3), &ch, noise, BfScheme::Zf).unwrap();
        assert_eq!(single, nash_profile(&ch).unwrap());
    }

    #[test]
    fn scheme_parses_case_insensitively() {
        assert_eq!("wf".parse::<BfScheme>().unwrap(), BfScheme::Wf);
        assert_eq!("ZF".parse::<BfScheme>().unwrap(), BfScheme::Zf);
        assert!("mmse".parse::<BfScheme>().is_err());
        assert_eq!(serde_json::to_string(&BfScheme::Wf).unwrap(), "\"WF\"");
    }
}
