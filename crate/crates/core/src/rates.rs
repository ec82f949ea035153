//! Achievable rates with single-user decoding, interference treated as noise.

use crate::beamforming::StrategyProfile;
use crate::error::{Error, Result};
use crate::scenario::{ChannelSet, NoisePower};

/// Per-link rates in bits per channel use.
pub type RateVector = Vec<f64>;

fn check_noise(noise: NoisePower) -> Result<f64> {
    let s = noise.value();
    if s > 0.0 {
        Ok(s)
    } else {
        Err(Error::InvalidNoise(s))
    }
}

/// `log2(1 + |h_ii^H w_i|^2 / (sum_{j != i} |h_ji^H w_j|^2 + sigma^2))`.
pub fn rate(i: usize, p: &StrategyProfile, ch: &ChannelSet, noise: NoisePower) -> Result<f64> {
    let sigma2 = check_noise(noise)?;
    Ok(rate_unchecked(i, p, ch, sigma2))
}

pub(crate) fn rate_unchecked(i: usize, p: &StrategyProfile, ch: &ChannelSet, sigma2: f64) -> f64 {
    let signal = p.get(i).gain(ch.direct(i));
    let interference: f64 = (0..ch.num_links()).filter(|&j| j != i).map(|j| p.get(j).gain(ch.get(j, i))).sum();
    (signal / (interference + sigma2)).ln_1p() / std::f64::consts::LN_2
}

pub fn rates_all(p: &StrategyProfile, ch: &ChannelSet, noise: NoisePower) -> Result<RateVector> {
    let sigma2 = check_noise(noise)?;
    Ok((0..ch.num_links()).map(|i| rate_unchecked(i, p, ch, sigma2)).collect())
}
