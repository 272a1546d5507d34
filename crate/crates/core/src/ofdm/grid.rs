use nalgebra::DMatrix;
use rand::Rng;

use super::{qpsk_modulate, qpsk_symbol, OfdmConfig};
use crate::{rng, ChannelMatrix, Error, Result, C64};

/// Binary source block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitBlock(Vec<u8>);

impl BitBlock {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if let Some(b) = bits.iter().find(|&&b| b > 1) {
            return Err(Error::Config(format!("bit value {b} is not 0 or 1")));
        }
        Ok(Self(bits))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.0
    }

    /// Number of positions where `self` and `other` differ.
    pub fn errors_against(&self, other: &BitBlock) -> usize {
        self.0.iter().zip(&other.0).filter(|(a, b)| a != b).count()
    }
}

/// Uniform random bits from `seed`.
pub fn random_bits(n: usize, seed: u64) -> BitBlock {
    let mut r = rng::rng(seed);
    BitBlock((0..n).map(|_| r.random::<bool>() as u8).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellRole {
    Data,
    Pilot,
    /// Non-pilot subcarrier of a pilot symbol; always zero.
    VacantPilot,
}

/// `N_f x N_s` frequency-domain slot with a role per cell.
#[derive(Debug, Clone, PartialEq)]
pub struct ResourceGrid {
    pub cells: ChannelMatrix,
    roles: DMatrix<CellRole>,
}

impl ResourceGrid {
    /// Empty (all-zero) grid laid out for `cfg`.
    pub fn empty(cfg: &OfdmConfig) -> Self {
        let (n_f, n_s) = (cfg.n_subcarriers, cfg.n_symbols);
        let pilots = cfg.pattern.pilot_subcarriers(n_f);
        let roles = DMatrix::from_fn(n_f, n_s, |k, l| {
            if cfg.pattern.is_pilot_symbol(l) {
                if pilots.binary_search(&k).is_ok() {
                    CellRole::Pilot
                } else {
                    CellRole::VacantPilot
                }
            } else {
                CellRole::Data
            }
        });
        Self {
            cells: DMatrix::zeros(n_f, n_s),
            roles,
        }
    }

    /// Wrap received cells with the role layout of `cfg`.
    pub fn from_cells(cells: ChannelMatrix, cfg: &OfdmConfig) -> Result<Self> {
        let mut g = Self::empty(cfg);
        if cells.shape() != g.cells.shape() {
            return Err(Error::Dimension(format!(
                "grid is {:?}, config expects {:?}",
                cells.shape(),
                g.cells.shape()
            )));
        }
        g.cells = cells;
        Ok(g)
    }

    pub fn n_subcarriers(&self) -> usize {
        self.cells.nrows()
    }

    pub fn n_symbols(&self) -> usize {
        self.cells.ncols()
    }

    pub fn role(&self, k: usize, l: usize) -> CellRole {
        self.roles[(k, l)]
    }

    /// Data cell coordinates in fill order (column-major, frequency first).
    pub fn data_cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n_f = self.n_subcarriers();
        (0..self.n_symbols())
            .flat_map(move |l| (0..n_f).map(move |k| (k, l)))
            .filter(|&(k, l)| self.roles[(k, l)] == CellRole::Data)
    }

    pub fn data_symbols(&self) -> Vec<C64> {
        self.data_cells().map(|c| self.cells[c]).collect()
    }

    /// `(N_f N_s)^-1 ||X||_F^2` over every cell, vacant ones included.
    pub fn mean_power(&self) -> f64 {
        self.cells.iter().map(|c| c.norm_sqr()).sum::<f64>() / self.cells.len() as f64
    }
}

/// Fill a slot: seeded QPSK pilots, zero vacant pilots, data column-major.
pub fn build_slot(bits: &BitBlock, cfg: &OfdmConfig, pilot_seed: u64) -> Result<ResourceGrid> {
    cfg.validate()?;
    let expected = 2 * cfg.n_data_cells();
    if bits.len() != expected {
        return Err(Error::BitCount {
            expected,
            actual: bits.len(),
        });
    }
    let mut grid = ResourceGrid::empty(cfg);
    let data = qpsk_modulate(bits)?;
    let cells: Vec<_> = grid.data_cells().collect();
    for (c, s) in cells.into_iter().zip(data) {
        grid.cells[c] = s;
    }
    let mut r = rng::rng(pilot_seed);
    for &l in &cfg.pattern.symbols {
        for k in cfg.pattern.pilot_subcarriers(cfg.n_subcarriers) {
            let b: u8 = r.random_range(0..4);
            grid.cells[(k, l)] = qpsk_symbol(b >> 1, b & 1);
        }
    }
    Ok(grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ofdm::PilotPattern;

    fn count(grid: &ResourceGrid, l: usize, role: CellRole) -> usize {
        (0..grid.n_subcarriers())
            .filter(|&k| grid.role(k, l) == role)
            .count()
    }

    #[test]
    fn default_layout_counts() {
        let cfg = OfdmConfig::default();
        let bits = random_bits(2 * cfg.n_data_cells(), 1);
        let g = build_slot(&bits, &cfg, 3).unwrap();
        for &l in &cfg.pattern.symbols {
            assert_eq!(count(&g, l, CellRole::Pilot), 36);
            assert_eq!(count(&g, l, CellRole::VacantPilot), 36);
        }
        let full_data_columns = (0..14)
            .filter(|&l| count(&g, l, CellRole::Data) == 72)
            .count();
        assert_eq!(full_data_columns, 10);
        for k in 0..72 {
            for l in 0..14 {
                match g.role(k, l) {
                    CellRole::VacantPilot => assert_eq!(g.cells[(k, l)], C64::new(0.0, 0.0)),
                    _ => assert!((g.cells[(k, l)].norm() - 1.0).abs() < 1e-12),
                }
            }
        }
    }

    #[test]
    fn alternative_layout_counts() {
        let cfg = OfdmConfig::default().with_pattern(PilotPattern::alternative());
        let bits = random_bits(2 * cfg.n_data_cells(), 1);
        let g = build_slot(&bits, &cfg, 3).unwrap();
        for &l in &cfg.pattern.symbols {
            assert_eq!(count(&g, l, CellRole::Pilot), 24);
        }
    }

    #[test]
    fn deterministic_in_seed() {
        let cfg = OfdmConfig::default();
        let bits = random_bits(2 * cfg.n_data_cells(), 9);
        let a = build_slot(&bits, &cfg, 5).unwrap();
        let b = build_slot(&bits, &cfg, 5).unwrap();
        assert_eq!(a, b);
        let c = build_slot(&bits, &cfg, 6).unwrap();
        assert_ne!(a.cells, c.cells);
    }

    #[test]
    fn data_filled_frequency_first() {
        let cfg = OfdmConfig::default();
        let mut raw = vec![0u8; 2 * cfg.n_data_cells()];
        raw[2] = 1; // second data symbol
        let g = build_slot(&BitBlock::new(raw).unwrap(), &cfg, 0).unwrap();
        assert!(g.cells[(1, 0)].re < 0.0);
        assert!(g.cells[(0, 0)].re > 0.0 && g.cells[(0, 1)].re > 0.0);
    }

    #[test]
    fn bit_count_mismatch() {
        let cfg = OfdmConfig::default();
        let err = build_slot(&random_bits(10, 0), &cfg, 0).unwrap_err();
        assert!(matches!(err, Error::BitCount { expected: 1440, actual: 10 }));
    }

    #[test]
    fn mean_power_counts_vacant_cells() {
        let cfg = OfdmConfig::default();
        let g = build_slot(&random_bits(1440, 2), &cfg, 2).unwrap();
        let expect = (720.0 + 4.0 * 36.0) / (72.0 * 14.0);
        assert!((g.mean_power() - expect).abs() < 1e-12);
    }
}
