//! One end-to-end slot: bits, pilots, OFDM transmit, channel, receive.

use crate::channel::{apply_channel, freq_response, realize_with_doppler, ChannelRealization, FadingSpec, PowerDelayProfile};
use crate::ofdm::{build_slot, random_bits, Modem, ResourceGrid};
use crate::rng::{self, stream};
use crate::{ChannelMatrix, Result};

/// Everything a receiver-side experiment needs from one simulated slot.
#[derive(Debug, Clone)]
pub struct SlotOutcome {
    pub tx: ResourceGrid,
    pub rx: ChannelMatrix,
    /// Exact frequency response of the slot.
    pub h: ChannelMatrix,
    pub realization: ChannelRealization,
}

/// Simulate a slot. Bits, pilots, fading and noise each draw from their own
/// stream derived from `seed`.
pub fn simulate_slot(
    modem: &Modem,
    pdp: &PowerDelayProfile,
    fading: &FadingSpec,
    doppler: f64,
    snr_db: f64,
    seed: u64,
) -> Result<SlotOutcome> {
    let cfg = modem.config();
    let bits = random_bits(2 * cfg.n_data_cells(), rng::derive(seed, stream::BITS));
    let tx = build_slot(&bits, cfg, rng::derive(seed, stream::PILOTS))?;
    let real = realize_with_doppler(pdp, doppler, fading, cfg, seed);
    let samples = modem.transmit(&tx)?;
    let rx_samples = apply_channel(&samples, &real, snr_db, cfg, rng::derive(seed, stream::NOISE))?;
    let rx = modem.receive_cells(&rx_samples)?;
    let h = freq_response(&real, cfg);
    Ok(SlotOutcome {
        tx,
        rx,
        h,
        realization: real,
    })
}
