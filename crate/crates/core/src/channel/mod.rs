//! Multipath Rayleigh channels: power delay profiles, the built-in registry,
//! per-slot fading realizations and the time-domain channel with AWGN.

mod fading;
mod pdp;
pub mod registry;
mod realization;
mod sampled;

pub use fading::{FadingSpec, SosProcess};
pub use pdp::{ce_channel, default_ce_spacing, scale_tdl, PowerDelayProfile};
pub use realization::{apply_channel, freq_response, realize_channel, realize_with_doppler, sampled_taps, ChannelRealization};
pub use sampled::{sampled_pdp, tap_kernel, SampledPdp};

/// Noise variance for a per-resource-element SNR, relative to unit symbol
/// energy. Infinite SNR disables noise.
pub fn noise_variance(snr_db: f64) -> f64 {
    if snr_db.is_infinite() && snr_db > 0.0 {
        0.0
    } else {
        10f64.powf(-snr_db / 10.0)
    }
}
