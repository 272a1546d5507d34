use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use super::{OfdmConfig, ResourceGrid};
use crate::{ChannelMatrix, Error, Result, C64};

/// Unitary (1/sqrt(N_f)) FFT pair plus cyclic extension handling for one
/// configuration. Cheap to clone; plans are shared.
#[derive(Clone)]
pub struct Modem {
    cfg: OfdmConfig,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    scale: f64,
}

impl Modem {
    pub fn new(cfg: &OfdmConfig) -> Result<Self> {
        cfg.validate()?;
        let mut planner = FftPlanner::new();
        let n = cfg.n_subcarriers;
        Ok(Self {
            cfg: cfg.clone(),
            fwd: planner.plan_fft_forward(n),
            inv: planner.plan_fft_inverse(n),
            scale: 1.0 / (n as f64).sqrt(),
        })
    }

    pub fn config(&self) -> &OfdmConfig {
        &self.cfg
    }

    /// In-place unitary forward DFT of one symbol.
    pub fn fft(&self, buf: &mut [C64]) {
        self.fwd.process(buf);
        buf.iter_mut().for_each(|x| *x *= self.scale);
    }

    /// In-place unitary inverse DFT of one symbol.
    pub fn ifft(&self, buf: &mut [C64]) {
        self.inv.process(buf);
        buf.iter_mut().for_each(|x| *x *= self.scale);
    }

    pub fn transmit(&self, grid: &ResourceGrid) -> Result<Vec<C64>> {
        self.transmit_cells(&grid.cells)
    }

    pub fn transmit_cells(&self, cells: &ChannelMatrix) -> Result<Vec<C64>> {
        let (n, g) = (self.cfg.n_subcarriers, self.cfg.guard_len());
        if cells.shape() != (n, self.cfg.n_symbols) {
            return Err(Error::Dimension(format!(
                "grid {:?} does not match config {}x{}",
                cells.shape(),
                n,
                self.cfg.n_symbols
            )));
        }
        let mut out = Vec::with_capacity(self.cfg.slot_len());
        let mut buf = vec![C64::new(0.0, 0.0); n];
        for col in cells.column_iter() {
            buf.copy_from_slice(col.as_slice());
            self.ifft(&mut buf);
            out.extend_from_slice(&buf[n - g..]);
            out.extend_from_slice(&buf);
        }
        Ok(out)
    }

    pub fn receive(&self, samples: &[C64]) -> Result<ResourceGrid> {
        ResourceGrid::from_cells(self.receive_cells(samples)?, &self.cfg)
    }

    pub fn receive_cells(&self, samples: &[C64]) -> Result<ChannelMatrix> {
        let (n, g, len) = (
            self.cfg.n_subcarriers,
            self.cfg.guard_len(),
            self.cfg.symbol_len(),
        );
        if samples.len() != self.cfg.slot_len() {
            return Err(Error::Dimension(format!(
                "received {} samples, slot holds {}",
                samples.len(),
                self.cfg.slot_len()
            )));
        }
        let mut cells = ChannelMatrix::zeros(n, self.cfg.n_symbols);
        for (l, block) in samples.chunks_exact(len).enumerate() {
            let mut col = cells.column_mut(l);
            let buf = col.as_mut_slice();
            buf.copy_from_slice(&block[g..]);
            self.fft(buf);
        }
        Ok(cells)
    }
}

pub fn ofdm_transmit(grid: &ResourceGrid, cfg: &OfdmConfig) -> Result<Vec<C64>> {
    Modem::new(cfg)?.transmit(grid)
}

pub fn ofdm_receive(samples: &[C64], cfg: &OfdmConfig) -> Result<ResourceGrid> {
    Modem::new(cfg)?.receive(samples)
}
