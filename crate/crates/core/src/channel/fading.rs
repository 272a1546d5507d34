use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::C64;

/// Time-variation settings shared by every path of a realization.
#[derive(Debug, Clone, PartialEq)]
pub struct FadingSpec {
    /// Upper end of the per-realization Doppler draw, Hz.
    pub max_doppler: f64,
    /// Carrier frequency, Hz. Informational; Doppler is given directly.
    pub carrier_freq: f64,
    /// Sinusoids per path process.
    pub n_sinusoids: usize,
    /// Hold every path gain at its `t = 0` value for the whole slot.
    pub quasi_static: bool,
}

impl Default for FadingSpec {
    fn default() -> Self {
        Self {
            max_doppler: 97.0,
            carrier_freq: 2.1e9,
            n_sinusoids: 32,
            quasi_static: false,
        }
    }
}

impl FadingSpec {
    pub fn quasi_static() -> Self {
        Self {
            max_doppler: 0.0,
            quasi_static: true,
            ..Self::default()
        }
    }
}

/// Gaussian-weighted sum of sinusoids with a Jakes (uniform angle of arrival)
/// frequency set:
///
/// `a(t) = sqrt(A / M) * sum_n g_n exp(j (2 pi f_D cos(alpha_n) t + phi_n))`
///
/// with `g_n ~ CN(0, 1)`. At any fixed `t` the gain is exactly `CN(0, A)`;
/// the autocorrelation across `t` approaches `A J0(2 pi f_D tau)`.
#[derive(Debug, Clone)]
pub struct SosProcess {
    amps: Vec<C64>,
    freqs: Vec<f64>,
    phases: Vec<f64>,
}

impl SosProcess {
    pub fn new<R: Rng + ?Sized>(power: f64, doppler: f64, n_sinusoids: usize, rng: &mut R) -> Self {
        let m = n_sinusoids.max(1);
        let scale = (power / m as f64).sqrt();
        let half = std::f64::consts::FRAC_1_SQRT_2;
        let mut amps = Vec::with_capacity(m);
        let mut freqs = Vec::with_capacity(m);
        let mut phases = Vec::with_capacity(m);
        for _ in 0..m {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            amps.push(C64::new(re, im) * (half * scale));
            let alpha = rng.random::<f64>() * 2.0 * PI;
            freqs.push(doppler * alpha.cos());
            phases.push(rng.random::<f64>() * 2.0 * PI);
        }
        Self {
            amps,
            freqs,
            phases,
        }
    }

    pub fn at(&self, t: f64) -> C64 {
        self.amps
            .iter()
            .zip(&self.freqs)
            .zip(&self.phases)
            .map(|((a, f), p)| a * C64::from_polar(1.0, 2.0 * PI * f * t + p))
            .sum()
    }
}
