//! Closed-form error of an LMMSE filter designed on one profile and applied
//! to another, the applicability predicate, and a Monte Carlo verifier.
//!
//! All spectra are [`SampledPdp`] values, i.e. the diagonal of
//! `D^H R_HH D`. For a full-band LS input with noise variance `rho` and the
//! DFT-domain filter `W = D diag(z) D^H`, the per-subcarrier error is exactly
//! `(1/N_f) sum_k [p_A(k) (1 - z(k))^2 + rho z(k)^2]`.

mod envelope;
mod verify;

pub use envelope::{envelope, is_applicable, PdpEnvelope, Verdict};
pub use verify::{verify_mismatch, MonteCarlo};

use crate::channel::SampledPdp;
use crate::estimators::NoiseConfig;

/// `z(k) = p_D(k) / (p_D(k) + rho)`.
pub fn shrinkage_z(p_design: &SampledPdp, noise: &NoiseConfig) -> Vec<f64> {
    p_design
        .p
        .iter()
        .map(|&p| if p + noise.rho > 0.0 { p / (p + noise.rho) } else { 0.0 })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct MismatchReport {
    /// Mismatch MSE per subcarrier.
    pub epsilon_m: f64,
    /// Gain term over the leading `min(L_D, L_A)` taps.
    pub xi_m: f64,
    pub z_diag: Vec<f64>,
    pub monte_carlo_mse: Option<f64>,
    pub monte_carlo_stderr: Option<f64>,
    /// `|epsilon_m - mc| / mc`.
    pub relative_gap: Option<f64>,
}

impl MismatchReport {
    pub fn with_monte_carlo(mut self, mc: &MonteCarlo) -> Self {
        self.monte_carlo_mse = Some(mc.mse);
        self.monte_carlo_stderr = Some(mc.stderr);
        self.relative_gap = Some((self.epsilon_m - mc.mse).abs() / mc.mse);
        self
    }
}

fn xi_over(p_actual: &SampledPdp, z: &[f64], l: usize) -> f64 {
    let n = p_actual.len() as f64;
    p_actual.p[..l]
        .iter()
        .zip(z)
        .map(|(&pa, &zk)| pa * (2.0 * zk - zk * zk))
        .sum::<f64>()
        / n
}

/// Exact per-tap mismatch error plus the truncated gain term.
pub fn mismatch_error(p_design: &SampledPdp, p_actual: &SampledPdp, noise: &NoiseConfig) -> MismatchReport {
    assert_eq!(p_design.len(), p_actual.len(), "spectra of different length");
    let z = shrinkage_z(p_design, noise);
    let n = p_actual.len() as f64;
    let epsilon_m = p_actual
        .p
        .iter()
        .zip(&z)
        .map(|(&pa, &zk)| pa * (1.0 - zk).powi(2) + noise.rho * zk * zk)
        .sum::<f64>()
        / n;
    let l = p_design.length.min(p_actual.length);
    MismatchReport {
        epsilon_m,
        xi_m: xi_over(p_actual, &z, l),
        z_diag: z,
        monte_carlo_mse: None,
        monte_carlo_stderr: None,
        relative_gap: None,
    }
}

/// The printed trace form `(1/N_f) sum_k [1 + rho z^2 - p_A (2z - z^2)]`.
/// It agrees with [`mismatch_error`] only when `p_A(k) = 1` on average.
pub fn mismatch_error_literal(p_design: &SampledPdp, p_actual: &SampledPdp, noise: &NoiseConfig) -> f64 {
    let z = shrinkage_z(p_design, noise);
    let n = p_actual.len() as f64;
    p_actual
        .p
        .iter()
        .zip(&z)
        .map(|(&pa, &zk)| 1.0 + noise.rho * zk * zk - pa * (2.0 * zk - zk * zk))
        .sum::<f64>()
        / n
}

/// Gain term for a filter with the same shrinkage `z` on every tap.
pub fn flat_design_error(z: f64, p_actual: &SampledPdp, l_design: usize) -> f64 {
    let l = l_design.min(p_actual.length);
    (2.0 * z - z * z) / p_actual.len() as f64 * p_actual.p[..l].iter().sum::<f64>()
}

/// Diagnostic ratio `delta(k) = p_A(k) / (p_D(k) + rho)`.
pub fn mmse_shrinkage_spectrum(p_design: &SampledPdp, p_actual: &SampledPdp, noise: &NoiseConfig) -> Vec<f64> {
    p_design
        .p
        .iter()
        .zip(&p_actual.p)
        .map(|(&pd, &pa)| if pd + noise.rho > 0.0 { pa / (pd + noise.rho) } else { 0.0 })
        .collect()
}
