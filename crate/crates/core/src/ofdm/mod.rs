//! One OFDM slot: configuration, DM-RS layout, resource grid, QPSK and the
//! IFFT/CP transmitter with its FFT receiver.

mod grid;
mod modem;
mod qpsk;

pub use grid::{build_slot, random_bits, BitBlock, CellRole, ResourceGrid};
pub use modem::{ofdm_receive, ofdm_transmit, Modem};
pub use qpsk::{qpsk_demodulate, qpsk_modulate, qpsk_symbol};

use crate::{Error, Result};

/// Which DM-RS layout a grid uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PatternId {
    /// Single-symbol DM-RS with three additional positions.
    Default,
    /// Double-symbol DM-RS.
    Alternative,
    /// Any other layout, built with [`PilotPattern::custom`].
    Custom,
}

impl PatternId {
    pub fn code(self) -> u8 {
        match self {
            PatternId::Default => 0,
            PatternId::Alternative => 1,
            PatternId::Custom => 255,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(PatternId::Default),
            1 => Some(PatternId::Alternative),
            255 => Some(PatternId::Custom),
            _ => None,
        }
    }
}

/// DM-RS pilot positions within a slot.
///
/// Symbol indices are stored 0-based (the 3rd OFDM symbol is index 2).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PilotPattern {
    pub id: PatternId,
    pub symbols: Vec<usize>,
    pub stride: usize,
    pub offset: usize,
}

impl PilotPattern {
    /// Symbols 3, 6, 9, 12; every second subcarrier starting at 1.
    pub fn default_pattern() -> Self {
        Self {
            id: PatternId::Default,
            symbols: vec![2, 5, 8, 11],
            stride: 2,
            offset: 1,
        }
    }

    /// Symbols 3, 4, 11, 12; every third subcarrier starting at 0.
    pub fn alternative() -> Self {
        Self {
            id: PatternId::Alternative,
            symbols: vec![2, 3, 10, 11],
            stride: 3,
            offset: 0,
        }
    }

    pub fn custom(symbols: Vec<usize>, stride: usize, offset: usize) -> Result<Self> {
        if stride == 0 || offset >= stride {
            return Err(Error::Config(format!(
                "pilot stride {stride} / offset {offset} invalid"
            )));
        }
        if symbols.is_empty() || symbols.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config(
                "pilot symbols must be non-empty and strictly ascending".into(),
            ));
        }
        Ok(Self {
            id: PatternId::Custom,
            symbols,
            stride,
            offset,
        })
    }

    pub fn from_id(id: PatternId) -> Option<Self> {
        match id {
            PatternId::Default => Some(Self::default_pattern()),
            PatternId::Alternative => Some(Self::alternative()),
            PatternId::Custom => None,
        }
    }

    /// Number of pilot symbols, `N_pilot`.
    pub fn n_pilot_symbols(&self) -> usize {
        self.symbols.len()
    }

    /// Number of pilot subcarriers per pilot symbol, `N_f / L_s`.
    pub fn n_pilot_subcarriers(&self, n_subcarriers: usize) -> usize {
        n_subcarriers / self.stride
    }

    pub fn pilot_subcarriers(&self, n_subcarriers: usize) -> Vec<usize> {
        (0..self.n_pilot_subcarriers(n_subcarriers))
            .map(|i| self.offset + i * self.stride)
            .collect()
    }

    pub fn is_pilot_symbol(&self, symbol: usize) -> bool {
        self.symbols.contains(&symbol)
    }
}

/// Slot numerology. Defaults follow the fixed-PDP system parameters:
/// 72 subcarriers, 14 symbols, a 10-sample CP plus 7 samples of
/// implementation delay, 15 kHz spacing and `T_s = 9.3897e-7 s`.
#[derive(Debug, Clone, PartialEq)]
pub struct OfdmConfig {
    pub n_subcarriers: usize,
    pub n_symbols: usize,
    pub cp_len: usize,
    pub impl_delay: usize,
    pub subcarrier_spacing: f64,
    pub sample_period: f64,
    pub pattern: PilotPattern,
}

impl Default for OfdmConfig {
    fn default() -> Self {
        Self {
            n_subcarriers: 72,
            n_symbols: 14,
            cp_len: 10,
            impl_delay: 7,
            subcarrier_spacing: 15e3,
            sample_period: 9.3897e-7,
            pattern: PilotPattern::default_pattern(),
        }
    }
}

impl OfdmConfig {
    pub fn with_pattern(mut self, pattern: PilotPattern) -> Self {
        self.pattern = pattern;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let n_f = self.n_subcarriers;
        if n_f < 4 || n_f % 2 != 0 {
            return Err(Error::Config(format!(
                "n_subcarriers must be even and >= 4, got {n_f}"
            )));
        }
        if self.cp_len < 1 {
            return Err(Error::Config("cp_len must be >= 1".into()));
        }
        let max_sym = self.pattern.symbols.iter().copied().max().unwrap_or(0);
        if self.n_symbols < max_sym + 1 {
            return Err(Error::Config(format!(
                "{} symbols cannot hold a pilot at symbol index {max_sym}",
                self.n_symbols
            )));
        }
        if n_f % self.pattern.stride != 0 {
            return Err(Error::Config(format!(
                "n_subcarriers {n_f} not divisible by pilot stride {}",
                self.pattern.stride
            )));
        }
        if !(self.sample_period > 0.0 && self.subcarrier_spacing > 0.0) {
            return Err(Error::Config("sample period and spacing must be positive".into()));
        }
        Ok(())
    }

    /// Samples prepended to every symbol: CP plus implementation delay.
    pub fn guard_len(&self) -> usize {
        self.cp_len + self.impl_delay
    }

    /// Samples per OFDM symbol including the cyclic extension.
    pub fn symbol_len(&self) -> usize {
        self.n_subcarriers + self.guard_len()
    }

    pub fn slot_len(&self) -> usize {
        self.symbol_len() * self.n_symbols
    }

    /// `T_o`, one symbol including its cyclic extension.
    pub fn symbol_period_with_cp(&self) -> f64 {
        self.symbol_len() as f64 * self.sample_period
    }

    /// `T_CP = L_CP * T_s`.
    pub fn cp_duration(&self) -> f64 {
        self.cp_len as f64 * self.sample_period
    }

    pub fn slot_duration(&self) -> f64 {
        self.slot_len() as f64 * self.sample_period
    }

    /// `1 / (N_f * f_space)`, the sample period implied by the numerology.
    /// The default [`sample_period`](Self::sample_period) differs slightly.
    pub fn nominal_sample_period(&self) -> f64 {
        1.0 / (self.n_subcarriers as f64 * self.subcarrier_spacing)
    }

    pub fn n_pilot_subcarriers(&self) -> usize {
        self.pattern.n_pilot_subcarriers(self.n_subcarriers)
    }

    pub fn n_pilot_symbols(&self) -> usize {
        self.pattern.n_pilot_symbols()
    }

    /// Cells carrying data: every cell of a non-pilot symbol.
    pub fn n_data_cells(&self) -> usize {
        (self.n_symbols - self.n_pilot_symbols()) * self.n_subcarriers
    }
}
