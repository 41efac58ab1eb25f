//! Exact sampling of the stationary spacing law and the induced market
//! weights.
//!
//! Under the stationarity condition the spacings `Y_j` are independent
//! exponentials with rates `2α_j`, so no time discretization is involved.

use rand::Rng;

use crate::error::Result;
use crate::streams::Streams;
use crate::types::{DriftSpec, SpacingSample, WeightSequence};

/// `Exp(rate)` by inversion with `U ∈ (0, 1]`.
#[inline]
pub(crate) fn exponential<R: Rng + ?Sized>(rng: &mut R, rate: f64) -> f64 {
    let u = 1.0 - rng.random::<f64>();
    -u.ln() / rate
}

/// The product-exponential stationary law of a drift vector, with the
/// rates `2α_j` precomputed for repeated sampling.
#[derive(Debug, Clone)]
pub struct StationaryLaw {
    rates: Vec<f64>,
}

impl StationaryLaw {
    pub fn new(spec: &DriftSpec) -> Result<Self> {
        let alphas = spec.require_stationary()?;
        Ok(Self {
            rates: alphas.into_iter().map(|a| 2.0 * a).collect(),
        })
    }

    pub fn n(&self) -> usize {
        self.rates.len() + 1
    }

    pub fn rates(&self) -> &[f64] {
        &self.rates
    }

    pub fn sample_spacings<R: Rng + ?Sized>(&self, rng: &mut R) -> SpacingSample {
        let y = self.rates.iter().map(|&r| exponential(rng, r)).collect();
        SpacingSample::new(y).expect("exponential draws are nonnegative")
    }

    pub fn sample_weights<R: Rng + ?Sized>(&self, rng: &mut R) -> WeightSequence {
        weights_from_spacings(&self.sample_spacings(rng))
    }
}

/// One exact draw of the stationary spacings.
pub fn sample_stationary_spacings<R: Rng + ?Sized>(
    spec: &DriftSpec,
    rng: &mut R,
) -> Result<SpacingSample> {
    Ok(StationaryLaw::new(spec)?.sample_spacings(rng))
}

/// `μ_i = exp(−Σ_{j<i} Y_j) / (1 + Σ_{k≥2} exp(−Σ_{j<k} Y_j))`.
///
/// The top particle carries exponent 0, so every numerator is at most one and
/// the denominator is `1 + tail` with `tail` accumulated smallest-first and
/// folded in through `ln_1p`.
pub fn weights_from_spacings(s: &SpacingSample) -> WeightSequence {
    let y = s.values();
    let mut log_num = Vec::with_capacity(y.len() + 1);
    let mut acc = 0.0;
    log_num.push(0.0);
    for &v in y {
        acc -= v;
        log_num.push(acc);
    }
    let tail: f64 = log_num[1..].iter().rev().map(|l| l.exp()).sum();
    let log_z = tail.ln_1p();
    let weights = log_num.iter().map(|l| (l - log_z).exp()).collect();
    WeightSequence::new(weights).expect("normalized by construction")
}

/// `replicates` i.i.d. stationary weight draws, replicate `i` using substream `i`.
pub fn sample_stationary_weights(
    spec: &DriftSpec,
    replicates: usize,
    streams: &Streams,
) -> Result<Vec<WeightSequence>> {
    let law = StationaryLaw::new(spec)?;
    Ok(streams.map(replicates, |_, rng| law.sample_weights(rng)))
}
