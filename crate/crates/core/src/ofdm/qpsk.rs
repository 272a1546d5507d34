use std::f64::consts::FRAC_1_SQRT_2;

use super::BitBlock;
use crate::{Error, Result, C64};

/// Gray-coded QPSK point for one bit pair: `(b0, b1) -> ((1-2 b0) + j(1-2 b1))/sqrt(2)`.
#[inline]
pub fn qpsk_symbol(b0: u8, b1: u8) -> C64 {
    C64::new(
        (1.0 - 2.0 * b0 as f64) * FRAC_1_SQRT_2,
        (1.0 - 2.0 * b1 as f64) * FRAC_1_SQRT_2,
    )
}

pub fn qpsk_modulate(bits: &BitBlock) -> Result<Vec<C64>> {
    let b = bits.as_slice();
    if b.len() % 2 != 0 {
        return Err(Error::OddBitCount(b.len()));
    }
    Ok(b.chunks_exact(2).map(|p| qpsk_symbol(p[0], p[1])).collect())
}

/// Sign-based hard decision. Zero maps to bit 0.
pub fn qpsk_demodulate(symbols: &[C64]) -> BitBlock {
    let mut out = Vec::with_capacity(2 * symbols.len());
    for s in symbols {
        out.push((s.re < 0.0) as u8);
        out.push((s.im < 0.0) as u8);
    }
    BitBlock::new(out).expect("decisions are binary")
}
