//! Large-`n` limits of the largest weight, of `D_p` and of the market entropy
//! when the limiting law is `PD(2η)`, `0 < η < ½`.
//!
//! ```text
//! ψ(t)          = 1 + 2η ∫₀¹ (1 − e^{−tx}) x^{−2η−1} dx
//! lim E μ₁^p    = (1/Γ(p)) ∫₀^∞ t^{p−1} e^{−t} / ψ(t) dt
//! lim E D_p     = Γ(p − 2η) / (Γ(p) Γ(1 − 2η))            (p > 2η)
//! lim E S       = 2η Σ_{k≥1} 1/(k(k − 2η)) = ψ₀(1) − ψ₀(1 − 2η)
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::integrate;
use crate::special::{digamma, ln_gamma};

/// Phase parameter `η ∈ (0, ½)`; the limiting law is `PD(2η)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct EtaParam(f64);

impl EtaParam {
    pub fn new(eta: f64) -> Result<Self> {
        if eta > 0.0 && eta < 0.5 {
            Ok(Self(eta))
        } else {
            Err(Error::Domain(format!(
                "η must satisfy 0 < η < 1/2 for a Poisson–Dirichlet limit, got {eta}"
            )))
        }
    }

    pub fn eta(self) -> f64 {
        self.0
    }

    /// The PD parameter `2η`.
    pub fn alpha(self) -> f64 {
        2.0 * self.0
    }
}

impl TryFrom<f64> for EtaParam {
    type Error = Error;
    fn try_from(v: f64) -> Result<Self> {
        Self::new(v)
    }
}

impl From<EtaParam> for f64 {
    fn from(e: EtaParam) -> f64 {
        e.0
    }
}

/// `ψ_{2η}(t)` to absolute accuracy `tol`.
///
/// The substitution `x = u^{1/(1−2η)}` turns the integrand into
/// `(1 − e^{−tx}) u^{−1/(1−2η)} / (1 − 2η)`, which stays bounded at `u = 0`.
pub fn psi(eta: EtaParam, t: f64, tol: f64) -> f64 {
    assert!(t >= 0.0, "ψ is defined for t ≥ 0");
    if t == 0.0 {
        return 1.0;
    }
    let a = eta.alpha();
    let c = 1.0 - a;
    let integrand = |u: f64| {
        if u == 0.0 {
            return t / c;
        }
        let x = u.powf(1.0 / c);
        -(-t * x).exp_m1() * u.powf(-1.0 / c) / c
    };
    1.0 + a * integrate(integrand, 0.0, 1.0, tol / (2.0 * a)).value
}

/// Upper cutoff `T` for the outer integral, with the certified tail
/// `∫_T^∞ t^{p−1}e^{−t}dt ≤ 2T^{p−1}e^{−T}` below `Γ(p)·tol/10`.
fn outer_cutoff(p: f64, tol: f64) -> f64 {
    let mut t = (p + 10.0 * p.sqrt()).max(50.0).max(2.0 * (p - 1.0));
    let budget = (ln_gamma(p) + (tol / 10.0).ln()).min(0.0);
    while 2f64.ln() + (p - 1.0) * t.ln() - t > budget {
        t *= 1.25;
    }
    t
}

/// `lim E μ₁^p` to absolute accuracy `tol`.
///
/// With `t = s^{1/p}` the integrand `t^{p−1}dt` becomes `ds/p`, removing the
/// `t = 0` singularity for `p < 1`; the prefactor becomes `1/Γ(p + 1)`.
pub fn max_weight_moment(eta: EtaParam, p: f64, tol: f64) -> f64 {
    assert!(p > 0.0, "moment order must be positive");
    let cutoff = outer_cutoff(p, tol).powf(p);
    // |Δ(1/ψ)| ≤ |Δψ| since ψ ≥ 1, and the remaining weight integrates to ≤ 1
    let inner_tol = tol / 2.0;
    let scale = (-ln_gamma(p + 1.0)).exp();
    let integrand = |s: f64| {
        let t = s.powf(1.0 / p);
        (-t).exp() / psi(eta, t, inner_tol)
    };
    scale * integrate(integrand, 0.0, cutoff, 0.4 * tol / scale).value
}

/// `lim E D_p = Γ(p − 2η) / (Γ(p) Γ(1 − 2η))`.
pub fn limit_dp(eta: EtaParam, p: f64) -> Result<f64> {
    let a = eta.alpha();
    if !(p > a) {
        return Err(Error::Domain(format!(
            "E D_p diverges in the limit unless p > 2η = {a}, got p = {p}"
        )));
    }
    Ok((ln_gamma(p - a) - ln_gamma(p) - ln_gamma(1.0 - a)).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntropyRoute {
    /// `ψ₀(1) − ψ₀(1 − 2η)`.
    #[default]
    Digamma,
    /// Partial sum plus a midpoint-rule tail `ln((K+½)/(K+½−2η))`.
    DirectSum,
}

/// `lim E S = 2η Σ 1/(k(k − 2η))` by the digamma identity.
pub fn limit_entropy(eta: EtaParam, tol: f64) -> f64 {
    limit_entropy_with(eta, tol, EntropyRoute::Digamma)
}

pub fn limit_entropy_with(eta: EtaParam, tol: f64, route: EntropyRoute) -> f64 {
    let a = eta.alpha();
    match route {
        EntropyRoute::Digamma => digamma(1.0) - digamma(1.0 - a),
        EntropyRoute::DirectSum => {
            // midpoint tail error is about a / (12 K³)
            let k_max = ((a / (12.0 * tol)).cbrt().ceil() as usize).clamp(16, 10_000_000);
            let head: f64 = (1..=k_max)
                .rev()
                .map(|k| {
                    let k = k as f64;
                    a / (k * (k - a))
                })
                .sum();
            let m = k_max as f64 + 0.5;
            head + (m / (m - a)).ln()
        }
    }
}
