//! Classical estimators: LS at the pilots, bilinear interpolation and LMMSE
//! built from power-delay-profile correlations.

mod interp;
mod mmse;

pub use interp::{bilinear_interpolate, Bilinear, Interp1d};
pub use mmse::{correlation_from_pdp, mmse_estimate, mmse_weight_dft, unitary_dft, CorrelationSet, MmseFilter};

use crate::channel::noise_variance;
use crate::ofdm::{CellRole, OfdmConfig, PilotPattern, ResourceGrid};
use crate::{ChannelMatrix, Error, Result, C64};

/// Noise level seen by an estimator. `rho = sigma_n_sq / sigma_x_sq`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseConfig {
    pub sigma_n_sq: f64,
    pub sigma_x_sq: f64,
    pub rho: f64,
}

impl NoiseConfig {
    pub fn new(sigma_n_sq: f64, sigma_x_sq: f64) -> Result<Self> {
        if !(sigma_n_sq >= 0.0 && sigma_x_sq > 0.0) {
            return Err(Error::Config(format!(
                "noise {sigma_n_sq} / signal {sigma_x_sq} power invalid"
            )));
        }
        Ok(Self {
            sigma_n_sq,
            sigma_x_sq,
            rho: sigma_n_sq / sigma_x_sq,
        })
    }

    /// Unit symbol energy at the given SNR.
    pub fn from_snr_db(snr_db: f64) -> Self {
        let n = noise_variance(snr_db);
        Self {
            sigma_n_sq: n,
            sigma_x_sq: 1.0,
            rho: n,
        }
    }

    pub fn from_rho(rho: f64) -> Self {
        Self {
            sigma_n_sq: rho,
            sigma_x_sq: 1.0,
            rho,
        }
    }
}

/// LS channel estimates on the pilot lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct PilotLsEstimate {
    /// `values[(i, p)]` is the estimate at `subcarriers[i]`, `symbols[p]`.
    pub values: ChannelMatrix,
    pub subcarriers: Vec<usize>,
    pub symbols: Vec<usize>,
}

impl PilotLsEstimate {
    /// Wrap a pilot-lattice matrix laid out for `pattern`.
    pub fn from_values(values: ChannelMatrix, pattern: &PilotPattern, n_subcarriers: usize) -> Result<Self> {
        let subcarriers = pattern.pilot_subcarriers(n_subcarriers);
        if values.shape() != (subcarriers.len(), pattern.symbols.len()) {
            return Err(Error::Dimension(format!(
                "pilot estimate {:?}, pattern expects {}x{}",
                values.shape(),
                subcarriers.len(),
                pattern.symbols.len()
            )));
        }
        Ok(Self {
            values,
            subcarriers,
            symbols: pattern.symbols.clone(),
        })
    }

    /// Restrict a full grid to the pilot lattice.
    pub fn sample(full: &ChannelMatrix, pattern: &PilotPattern) -> Self {
        let subcarriers = pattern.pilot_subcarriers(full.nrows());
        let symbols = pattern.symbols.clone();
        let values = ChannelMatrix::from_fn(subcarriers.len(), symbols.len(), |i, p| {
            full[(subcarriers[i], symbols[p])]
        });
        Self {
            values,
            subcarriers,
            symbols,
        }
    }
}

/// `H_ls = Y / X` at every pilot cell.
pub fn ls_estimate(rx: &ResourceGrid, tx_pilots: &ResourceGrid, pattern: &PilotPattern) -> Result<PilotLsEstimate> {
    ls_from_cells(&rx.cells, &tx_pilots.cells, pattern).and_then(|est| {
        for (&k, &l) in est.subcarriers.iter().zip(&est.symbols) {
            if tx_pilots.role(k, l) != CellRole::Pilot {
                return Err(Error::Dimension(format!(
                    "cell ({k}, {l}) is not a pilot in the transmitted grid"
                )));
            }
        }
        Ok(est)
    })
}

/// [`ls_estimate`] on raw cell matrices.
pub fn ls_from_cells(rx: &ChannelMatrix, tx: &ChannelMatrix, pattern: &PilotPattern) -> Result<PilotLsEstimate> {
    if rx.shape() != tx.shape() {
        return Err(Error::Dimension(format!(
            "received {:?} vs transmitted {:?}",
            rx.shape(),
            tx.shape()
        )));
    }
    let subcarriers = pattern.pilot_subcarriers(rx.nrows());
    let symbols = pattern.symbols.clone();
    if symbols.iter().any(|&l| l >= rx.ncols()) {
        return Err(Error::Dimension("pilot symbol outside the grid".into()));
    }
    let mut values = ChannelMatrix::zeros(subcarriers.len(), symbols.len());
    for (p, &l) in symbols.iter().enumerate() {
        for (i, &k) in subcarriers.iter().enumerate() {
            let x = tx[(k, l)];
            if x == C64::new(0.0, 0.0) {
                return Err(Error::ZeroPilot {
                    subcarrier: k,
                    symbol: l,
                });
            }
            values[(i, p)] = rx[(k, l)] / x;
        }
    }
    Ok(PilotLsEstimate {
        values,
        subcarriers,
        symbols,
    })
}

/// Mean `|a - b|^2` over every cell.
pub fn mse(a: &ChannelMatrix, b: &ChannelMatrix) -> f64 {
    (a - b).iter().map(|e| e.norm_sqr()).sum::<f64>() / a.len() as f64
}

/// Mean `|a - b|^2` over the pilot cells of `cfg`.
pub fn pilot_mse(a: &ChannelMatrix, b: &ChannelMatrix, cfg: &OfdmConfig) -> f64 {
    let ks = cfg.pattern.pilot_subcarriers(cfg.n_subcarriers);
    let mut acc = 0.0;
    for &l in &cfg.pattern.symbols {
        for &k in &ks {
            acc += (a[(k, l)] - b[(k, l)]).norm_sqr();
        }
    }
    acc / (ks.len() * cfg.pattern.symbols.len()) as f64
}
