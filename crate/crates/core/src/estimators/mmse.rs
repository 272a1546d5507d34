use std::f64::consts::PI;

use nalgebra::{Cholesky, DMatrix, SymmetricEigen};

use super::{Interp1d, NoiseConfig, PilotLsEstimate};
use crate::channel::{PowerDelayProfile, SampledPdp};
use crate::ofdm::OfdmConfig;
use crate::{ChannelMatrix, Error, Result, C64};

/// Frequency correlations of a profile, full band and restricted to the
/// pilot subcarriers.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationSet {
    /// `R_HH`, `N_f x N_f`.
    pub r_hh: ChannelMatrix,
    /// `E{H_c H_p^H}`, `N_f x N_f/L_s`.
    pub r_hc_hp: ChannelMatrix,
    /// `E{H_p H_p^H}`, `N_f/L_s x N_f/L_s`.
    pub r_hp_hp: ChannelMatrix,
    pub pilot_subcarriers: Vec<usize>,
}

/// `R_HH(k1, k2) = sum_m A_m exp(-j 2 pi tau_m (k1 - k2) / N_f)`.
pub fn correlation_from_pdp(pdp: &PowerDelayProfile, cfg: &OfdmConfig) -> CorrelationSet {
    let n_f = cfg.n_subcarriers;
    let taus = pdp.delays_in_samples(cfg);
    let gains = pdp.linear_gains();
    // The matrix is Toeplitz: tabulate r(d) for d = k1 - k2.
    let lag = |d: i64| -> C64 {
        taus.iter()
            .zip(&gains)
            .map(|(&t, &a)| C64::from_polar(a, -2.0 * PI * t * d as f64 / n_f as f64))
            .sum()
    };
    let table: Vec<C64> = (-(n_f as i64) + 1..n_f as i64).map(lag).collect();
    let at = |k1: usize, k2: usize| table[(k1 as i64 - k2 as i64 + n_f as i64 - 1) as usize];
    let pilots = cfg.pattern.pilot_subcarriers(n_f);
    CorrelationSet {
        r_hh: DMatrix::from_fn(n_f, n_f, at),
        r_hc_hp: DMatrix::from_fn(n_f, pilots.len(), |k, j| at(k, pilots[j])),
        r_hp_hp: DMatrix::from_fn(pilots.len(), pilots.len(), |i, j| at(pilots[i], pilots[j])),
        pilot_subcarriers: pilots,
    }
}

fn check_hermitian_psd(m: &ChannelMatrix, what: &str) -> Result<()> {
    let scale = m.iter().map(|x| x.norm()).fold(1.0, f64::max);
    let asym = (m - m.adjoint()).iter().map(|x| x.norm()).fold(0.0, f64::max);
    if asym > 1e-10 * scale {
        return Err(Error::NotPsd(format!("{what} not Hermitian (max asymmetry {asym:e})")));
    }
    if m.iter().any(|x| !x.re.is_finite() || !x.im.is_finite()) {
        return Err(Error::NotPsd(format!("{what} has non-finite entries")));
    }
    let eig = SymmetricEigen::new(m.clone()).eigenvalues;
    let min = eig.iter().copied().fold(f64::INFINITY, f64::min);
    if min < -1e-10 * scale {
        return Err(Error::NotPsd(format!("{what} has eigenvalue {min:e}")));
    }
    Ok(())
}

/// Per-pilot-symbol LMMSE filter `W = R_HcHp (R_HpHp + rho I)^-1` followed
/// by bilinear interpolation across symbols.
#[derive(Debug, Clone)]
pub struct MmseFilter {
    pub w: ChannelMatrix,
}

impl MmseFilter {
    pub fn new(corr: &CorrelationSet, noise: &NoiseConfig) -> Result<Self> {
        check_hermitian_psd(&corr.r_hp_hp, "R_HpHp")?;
        let p = corr.r_hp_hp.nrows();
        if corr.r_hc_hp.ncols() != p {
            return Err(Error::Dimension(format!(
                "R_HcHp has {} columns, R_HpHp is {p}x{p}",
                corr.r_hc_hp.ncols()
            )));
        }
        let mut a = &corr.r_hp_hp + ChannelMatrix::identity(p, p) * C64::new(noise.rho, 0.0);
        let chol = match Cholesky::new(a.clone()) {
            Some(c) => c,
            None => {
                // Singular at rho = 0: regularize lightly and retry.
                let trace: f64 = (0..p).map(|i| a[(i, i)].re).sum();
                let jitter = 1e-12 * (trace / p as f64).max(1.0);
                for i in 0..p {
                    a[(i, i)] += jitter;
                }
                Cholesky::new(a).ok_or_else(|| Error::NotPsd("R_HpHp + rho I".into()))?
            }
        };
        // W^H = A^-1 R_HcHp^H because A is Hermitian.
        let w = chol.solve(&corr.r_hc_hp.adjoint()).adjoint();
        Ok(Self { w })
    }

    pub fn apply(&self, pilot_ls: &PilotLsEstimate, cfg: &OfdmConfig) -> Result<ChannelMatrix> {
        if pilot_ls.values.nrows() != self.w.ncols() {
            return Err(Error::Dimension(format!(
                "pilot estimate has {} subcarriers, filter expects {}",
                pilot_ls.values.nrows(),
                self.w.ncols()
            )));
        }
        let full = &self.w * &pilot_ls.values;
        let t = Interp1d::new(&pilot_ls.symbols, cfg.n_symbols);
        Ok(ChannelMatrix::from_fn(full.nrows(), cfg.n_symbols, |k, l| {
            full[(k, t.lo[l])] * (1.0 - t.w[l]) + full[(k, t.hi[l])] * t.w[l]
        }))
    }
}

/// LMMSE estimate of the full grid from pilot LS estimates.
pub fn mmse_estimate(
    pilot_ls: &PilotLsEstimate,
    corr: &CorrelationSet,
    noise: &NoiseConfig,
    cfg: &OfdmConfig,
) -> Result<ChannelMatrix> {
    MmseFilter::new(corr, noise)?.apply(pilot_ls, cfg)
}

/// Unitary DFT matrix, `D(k, n) = exp(-j 2 pi k n / N) / sqrt(N)`.
pub fn unitary_dft(n: usize) -> ChannelMatrix {
    let s = 1.0 / (n as f64).sqrt();
    DMatrix::from_fn(n, n, |k, m| {
        C64::from_polar(s, -2.0 * PI * ((k * m) % n) as f64 / n as f64)
    })
}

/// `W = D (Lambda + rho I)^-1 Lambda D^H` with `Lambda = diag(p)`.
pub fn mmse_weight_dft(p_design: &SampledPdp, noise: &NoiseConfig) -> ChannelMatrix {
    let n = p_design.len();
    let d = unitary_dft(n);
    let z: Vec<f64> = p_design
        .p
        .iter()
        .map(|&p| if p + noise.rho > 0.0 { p / (p + noise.rho) } else { 0.0 })
        .collect();
    let mut dz = d.clone();
    for (j, mut col) in dz.column_iter_mut().enumerate() {
        col *= C64::new(z[j], 0.0);
    }
    dz * d.adjoint()
}
