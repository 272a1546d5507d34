//! SimpleNet: bilinear resize plus three 3x3 convolutions (2 -> 8 -> 8 -> 2
//! channels, ReLU after the first two), trained from scratch with Adam.
//!
//! Every tensor is laid out `[channel][symbol][subcarrier]` so the innermost
//! loops run along frequency. Real and imaginary parts are the two input and
//! output channels.

mod adam;
mod conv;
mod io;
mod net;
mod train;

pub use adam::{adam_step, AdamConfig, AdamState};
pub use io::{load_model, save_model, ModelFile};
pub use net::{backward, forward, loss_mse, Net, Workspace};
pub use train::{dataset_mse, lr_at, train, EpochLog, TrainConfig, TrainLog};

use rand::Rng;

use crate::{rng, Error, Result};

/// `(in_channels, out_channels)` of the three convolutions.
pub const LAYERS: [(usize, usize); 3] = [(2, 8), (8, 8), (8, 2)];
/// Kernel side.
pub const K: usize = 3;

/// Where the pilot-to-grid resize happens.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Placement {
    /// Resize the pilot lattice to the full grid, then convolve.
    ResizeFirst,
    /// Convolve on the pilot lattice, then resize the output.
    ResizeLast,
}

impl Placement {
    pub fn code(self) -> u8 {
        match self {
            Placement::ResizeFirst => 0,
            Placement::ResizeLast => 1,
        }
    }

    pub fn from_code(c: u8) -> Option<Self> {
        match c {
            0 => Some(Placement::ResizeFirst),
            1 => Some(Placement::ResizeLast),
            _ => None,
        }
    }
}

/// Offsets of `(weights, biases)` for layer `i` in the flat parameter vector.
pub fn layer_offsets(i: usize) -> (usize, usize) {
    let mut off = 0;
    for (j, &(cin, cout)) in LAYERS.iter().enumerate() {
        let nw = cout * cin * K * K;
        if j == i {
            return (off, off + nw);
        }
        off += nw + cout;
    }
    panic!("layer {i} out of range")
}

/// Total number of weights and biases.
pub fn param_count() -> usize {
    LAYERS.iter().map(|&(cin, cout)| cout * cin * K * K + cout).sum()
}

/// Network weights. `theta` holds, per layer, the weights
/// `[out][in][kh][kw]` followed by the biases.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub placement: Placement,
    pub theta: Vec<f64>,
}

impl ModelParams {
    pub fn zeros(placement: Placement) -> Self {
        Self {
            placement,
            theta: vec![0.0; param_count()],
        }
    }

    /// Uniform in `+-sqrt(6 / (fan_in + fan_out))`, zero biases.
    pub fn glorot(placement: Placement, seed: u64) -> Self {
        let mut p = Self::zeros(placement);
        let mut r = rng::rng(seed);
        for (i, &(cin, cout)) in LAYERS.iter().enumerate() {
            let (w0, b0) = layer_offsets(i);
            let limit = (6.0 / ((cin + cout) * K * K) as f64).sqrt();
            for w in &mut p.theta[w0..b0] {
                *w = (r.random::<f64>() * 2.0 - 1.0) * limit;
            }
        }
        p
    }

    pub fn weights(&self, i: usize) -> &[f64] {
        let (w0, b0) = layer_offsets(i);
        &self.theta[w0..b0]
    }

    pub fn biases(&self, i: usize) -> &[f64] {
        let (_, b0) = layer_offsets(i);
        &self.theta[b0..b0 + LAYERS[i].1]
    }

    /// Index of weight `[o][c][ky][kx]` of layer `i` in `theta`.
    pub fn weight_index(i: usize, o: usize, c: usize, ky: usize, kx: usize) -> usize {
        let (w0, _) = layer_offsets(i);
        w0 + ((o * LAYERS[i].0 + c) * K + ky) * K + kx
    }

    pub fn bias_index(i: usize, o: usize) -> usize {
        layer_offsets(i).1 + o
    }

    pub fn check_finite(&self) -> Result<()> {
        match self.theta.iter().position(|x| !x.is_finite()) {
            Some(i) => Err(Error::NonFinite(format!("parameter {i}"))),
            None => Ok(()),
        }
    }
}
