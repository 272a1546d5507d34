use std::f64::consts::PI;

use super::PowerDelayProfile;
use crate::ofdm::OfdmConfig;
use crate::C64;

/// Deterministic tap kernel of the sampled impulse response for a path at
/// normalized delay `tau`:
///
/// `g_n(tau) = exp(-j pi (n + (N-1) tau) / N) sin(pi tau) / sin(pi (tau - n) / N)`
///
/// which equals `sum_{k<N} exp(-j 2 pi k (tau - n) / N)`. Where the
/// denominator vanishes the kernel takes its limit `N`.
pub fn tap_kernel(n: usize, tau: f64, n_f: usize) -> C64 {
    let nf = n_f as f64;
    let x = tau - n as f64;
    let den = (PI * x / nf).sin();
    if den.abs() < 1e-12 {
        // tau - n = q N: every term of the geometric sum is 1.
        return C64::new(nf, 0.0);
    }
    let phase = -PI * (n as f64 + (nf - 1.0) * tau) / nf;
    C64::from_polar((PI * tau).sin() / den, phase)
}

/// Expected tap powers of a profile in the DFT domain.
///
/// `p(n) = E{|h(n)|^2} / N_f` with `h` the sampled impulse response; this is
/// also the diagonal of `D^H R_HH D` for the unitary DFT matrix `D`, so for
/// integer delays `p` holds the eigenvalues of `R_HH` and equals `N_f A_m` at
/// tap `tau_m`. `sum p = N_f sum A_m` for every profile.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledPdp {
    pub p: Vec<f64>,
    /// Leading taps holding the channel: `ceil(max delay) + 1`, capped at `N_f`.
    pub length: usize,
}

impl SampledPdp {
    /// Wrap raw tap powers; the length is set by the last nonzero tap.
    pub fn from_powers(p: Vec<f64>) -> Self {
        let length = p.iter().rposition(|&x| x > 0.0).map_or(0, |i| i + 1);
        Self { p, length }
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.p.iter().sum()
    }
}

pub fn sampled_pdp(pdp: &PowerDelayProfile, cfg: &OfdmConfig) -> SampledPdp {
    let n_f = cfg.n_subcarriers;
    let taus = pdp.delays_in_samples(cfg);
    let gains = pdp.linear_gains();
    let mut p: Vec<f64> = (0..n_f)
        .map(|n| {
            taus.iter()
                .zip(&gains)
                .map(|(&t, &a)| a * tap_kernel(n, t, n_f).norm_sqr())
                .sum::<f64>()
                / n_f as f64
        })
        .collect();
    // Integer delays leave rounding residue on the other taps.
    let floor = 1e-20 * p.iter().sum::<f64>();
    p.iter_mut().filter(|x| **x < floor).for_each(|x| *x = 0.0);
    let max_tau = taus.last().copied().unwrap_or(0.0);
    let length = ((max_tau - 1e-9).ceil().max(0.0) as usize + 1).min(n_f);
    SampledPdp { p, length }
}
