use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::channel::{freq_response, realize_channel, FadingSpec, PowerDelayProfile, SampledPdp};
use crate::estimators::{mmse_weight_dft, NoiseConfig};
use crate::ofdm::OfdmConfig;
use crate::{rng, C64};

/// Monte Carlo mean and its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarlo {
    pub mse: f64,
    pub stderr: f64,
    pub n_trials: usize,
}

impl MonteCarlo {
    pub fn from_samples(samples: &[f64]) -> Self {
        let n = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / n;
        let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
        Self {
            mse: mean,
            stderr: (var / n).sqrt(),
            n_trials: samples.len(),
        }
    }
}

/// Apply the DFT-domain filter of `p_design` to genie full-band LS estimates
/// (true response plus noise of variance `rho`) of quasi-static realizations
/// of `actual`, and return the per-subcarrier MSE.
pub fn verify_mismatch(
    p_design: &SampledPdp,
    actual: &PowerDelayProfile,
    noise: &NoiseConfig,
    n_trials: usize,
    seed: u64,
    cfg: &OfdmConfig,
) -> MonteCarlo {
    let w = mmse_weight_dft(p_design, noise);
    let n = cfg.n_subcarriers;
    let fading = FadingSpec::quasi_static();
    let sd = (noise.rho / 2.0).sqrt();
    let errors: Vec<f64> = (0..n_trials as u64)
        .into_par_iter()
        .map(|i| {
            let s = rng::derive(seed, i);
            let real = realize_channel(actual, &fading, cfg, s);
            let h = freq_response(&real, cfg).column(0).into_owned();
            let mut r = rng::rng(rng::derive(s, rng::stream::NOISE));
            let ls = h.map(|x| {
                let re: f64 = StandardNormal.sample(&mut r);
                let im: f64 = StandardNormal.sample(&mut r);
                x + C64::new(re, im) * sd
            });
            let est = &w * ls;
            (est - h).iter().map(|e| e.norm_sqr()).sum::<f64>() / n as f64
        })
        .collect();
    MonteCarlo::from_samples(&errors)
}
