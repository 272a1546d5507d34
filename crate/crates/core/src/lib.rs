//! Link-level OFDM channel estimation with designed training data.
//!
//! The crate covers the whole pipeline used to train channel-estimation
//! networks offline on a synthetic ("designed") channel and check that they
//! generalize to channels they have never seen:
//!
//! * [`ofdm`]: QPSK, DM-RS pilot layout, IFFT/CP transmit and FFT receive.
//! * [`channel`]: power delay profiles, the built-in registry, Rayleigh
//!   fading realizations and the time-domain channel with AWGN.
//! * [`estimators`]: LS at pilots, bilinear interpolation and LMMSE.
//! * [`robustness`]: closed-form mismatch error of a filter designed on one
//!   profile and used on another, the applicability predicate and a Monte
//!   Carlo verifier.
//! * [`dataset`]: feature/label generation and the `CEDS` file format.
//! * [`nn`]: the three-layer convolutional estimator, its gradients, Adam and
//!   the training loop.
//! * [`eval`]: MSE/BER sweeps, delay-spread sweeps and SNR gaps.

mod binio;
pub mod channel;
pub mod dataset;
pub mod error;
pub mod estimators;
pub mod eval;
pub mod link;
pub mod nn;
pub mod ofdm;
pub mod rng;
pub mod robustness;

pub use error::{Error, Result};

/// Complex sample type used throughout.
pub type C64 = num_complex::Complex64;

/// Frequency-domain matrix of `N_f` subcarriers (rows) by `N_s` symbols
/// (columns).
pub type ChannelMatrix = nalgebra::DMatrix<C64>;
