use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::FftPlanner;

use super::{noise_variance, tap_kernel, FadingSpec, PowerDelayProfile, SosProcess};
use crate::ofdm::OfdmConfig;
use crate::{rng, ChannelMatrix, Error, Result, C64};

/// One slot's worth of faded path gains.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    /// Path delays in samples (`tau_m / T_s`).
    pub delays: Vec<f64>,
    /// `gains[m][l]` is `a_m(T_o l)`.
    pub gains: Vec<Vec<C64>>,
    /// Doppler frequency used for this slot, Hz.
    pub doppler: f64,
    /// Some path is later than the whole cyclic extension, so the slot has
    /// inter-symbol interference.
    pub isi: bool,
    /// Some path is later than the CP proper (`L_CP` samples).
    pub exceeds_cp: bool,
}

impl ChannelRealization {
    /// Build from explicit delays (samples) and per-symbol gains.
    pub fn from_parts(delays: Vec<f64>, gains: Vec<Vec<C64>>, cfg: &OfdmConfig) -> Result<Self> {
        if delays.len() != gains.len() || delays.is_empty() {
            return Err(Error::Dimension(format!(
                "{} delays vs {} gain trajectories",
                delays.len(),
                gains.len()
            )));
        }
        if let Some(g) = gains.iter().find(|g| g.len() != cfg.n_symbols) {
            return Err(Error::Dimension(format!(
                "gain trajectory has {} entries, slot has {} symbols",
                g.len(),
                cfg.n_symbols
            )));
        }
        if delays.iter().any(|d| !(*d >= 0.0) || !d.is_finite()) {
            return Err(Error::Config("path delays must be finite and >= 0".into()));
        }
        let max = delays.iter().copied().fold(0.0, f64::max);
        Ok(Self {
            isi: max > cfg.guard_len() as f64 + 1e-9,
            exceeds_cp: max > cfg.cp_len as f64 + 1e-9,
            delays,
            gains,
            doppler: 0.0,
        })
    }

    /// Time-invariant channel with the given delays and gains.
    pub fn static_paths(delays: Vec<f64>, gains: &[C64], cfg: &OfdmConfig) -> Result<Self> {
        let traj = gains.iter().map(|&a| vec![a; cfg.n_symbols]).collect();
        Self::from_parts(delays, traj, cfg)
    }

    pub fn n_paths(&self) -> usize {
        self.delays.len()
    }

    pub fn n_symbols(&self) -> usize {
        self.gains.first().map_or(0, Vec::len)
    }
}

/// Draw a realization with Doppler uniform in `[0, fading.max_doppler]`.
pub fn realize_channel(
    pdp: &PowerDelayProfile,
    fading: &FadingSpec,
    cfg: &OfdmConfig,
    seed: u64,
) -> ChannelRealization {
    let doppler = if fading.quasi_static || fading.max_doppler <= 0.0 {
        0.0
    } else {
        rng::rng(rng::derive(seed, rng::stream::DOPPLER)).random::<f64>() * fading.max_doppler
    };
    realize_with_doppler(pdp, doppler, fading, cfg, seed)
}

/// Draw a realization with a fixed Doppler frequency. Every path is an
/// independent sum-of-sinusoids process with `E|a_m|^2 = 10^(theta_m / 10)`.
pub fn realize_with_doppler(
    pdp: &PowerDelayProfile,
    doppler: f64,
    fading: &FadingSpec,
    cfg: &OfdmConfig,
    seed: u64,
) -> ChannelRealization {
    let mut r = rng::rng(rng::derive(seed, rng::stream::CHANNEL));
    let t_o = cfg.symbol_period_with_cp();
    let gains = pdp
        .linear_gains()
        .into_iter()
        .map(|a| {
            let proc = SosProcess::new(a, doppler, fading.n_sinusoids, &mut r);
            if fading.quasi_static {
                vec![proc.at(0.0); cfg.n_symbols]
            } else {
                (0..cfg.n_symbols).map(|l| proc.at(t_o * l as f64)).collect()
            }
        })
        .collect();
    let mut real = ChannelRealization::from_parts(pdp.delays_in_samples(cfg), gains, cfg)
        .expect("profile validated on construction");
    real.doppler = if fading.quasi_static { 0.0 } else { doppler };
    real
}

/// Sampled impulse response `h(n)` of symbol `l`, fractional-delay leakage
/// included. `DFT(h)(k) = N_f H(k, l)`.
pub fn sampled_taps(real: &ChannelRealization, cfg: &OfdmConfig, l: usize) -> Vec<C64> {
    let n_f = cfg.n_subcarriers;
    (0..n_f)
        .map(|n| {
            real.delays
                .iter()
                .zip(&real.gains)
                .map(|(&t, g)| g[l] * tap_kernel(n, t, n_f))
                .sum()
        })
        .collect()
}

/// `H(k, l) = sum_m a_m(T_o l) exp(-j 2 pi k tau_m / N_f)`.
pub fn freq_response(real: &ChannelRealization, cfg: &OfdmConfig) -> ChannelMatrix {
    let n_f = cfg.n_subcarriers;
    let n_s = real.n_symbols();
    let mut h = ChannelMatrix::zeros(n_f, n_s);
    for (&tau, g) in real.delays.iter().zip(&real.gains) {
        let step = C64::from_polar(1.0, -2.0 * PI * tau / n_f as f64);
        for l in 0..n_s {
            let mut rot = g[l];
            for k in 0..n_f {
                h[(k, l)] += rot;
                rot *= step;
            }
        }
    }
    h
}

/// Pass a transmitted slot through the multipath channel and add AWGN.
///
/// Integer delays shift the samples. A fractional delay shifts the
/// band-limited continuation of each transmitted symbol core. Either way a
/// path is scaled by the gain of the symbol the energy originated in. When every delay fits in the cyclic extension the
/// demodulated grid is exactly `H o X + N`; longer paths leak into the next
/// symbol. Energy delayed past the end of the slot is dropped.
pub fn apply_channel(
    tx: &[C64],
    real: &ChannelRealization,
    snr_db: f64,
    cfg: &OfdmConfig,
    noise_seed: u64,
) -> Result<Vec<C64>> {
    let (n, g, len, n_s) = (
        cfg.n_subcarriers,
        cfg.guard_len(),
        cfg.symbol_len(),
        cfg.n_symbols,
    );
    if tx.len() != cfg.slot_len() {
        return Err(Error::Dimension(format!(
            "transmit buffer has {} samples, slot holds {}",
            tx.len(),
            cfg.slot_len()
        )));
    }
    if real.n_symbols() != n_s {
        return Err(Error::Dimension(format!(
            "realization covers {} symbols, slot has {n_s}",
            real.n_symbols()
        )));
    }
    let total = tx.len();
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    let inv_n = 1.0 / n as f64;

    // Spectrum of every block's core, unnormalized.
    let spectra: Vec<Vec<C64>> = tx
        .chunks_exact(len)
        .map(|blk| {
            let mut s = blk[g..].to_vec();
            fwd.process(&mut s);
            s
        })
        .collect();

    let mut out = vec![C64::new(0.0, 0.0); total];
    let mut v = vec![C64::new(0.0, 0.0); n];
    for (&tau, gains) in real.delays.iter().zip(&real.gains) {
        let d = tau.floor();
        let f = tau - d;
        let d = d as usize;
        if f <= 1e-12 {
            // Integer delay: plain shift of the transmitted samples.
            for (t, o) in out.iter_mut().enumerate().skip(d) {
                let src = t - d;
                *o += gains[src / len] * tx[src];
            }
            continue;
        }
        let shift: Vec<C64> = (0..n)
            .map(|k| C64::from_polar(inv_n, -2.0 * PI * k as f64 * f / n as f64))
            .collect();
        for (b, spec) in spectra.iter().enumerate() {
            // v(n) = x(n - f), the band-limited fractional shift of the core.
            for ((vk, sk), wk) in v.iter_mut().zip(spec).zip(&shift) {
                *vk = sk * wk;
            }
            inv.process(&mut v);
            let a = gains[b];
            for i in 1..=len {
                let t = b * len + d + i;
                if t >= total {
                    break;
                }
                let idx = (i + n * 2 - g % n) % n;
                out[t] += a * v[idx];
            }
        }
    }

    let var = noise_variance(snr_db);
    if var > 0.0 {
        let sd = (var / 2.0).sqrt();
        let mut r = rng::rng(noise_seed);
        for s in &mut out {
            let re: f64 = StandardNormal.sample(&mut r);
            let im: f64 = StandardNormal.sample(&mut r);
            *s += C64::new(re, im) * sd;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::registry;
    use crate::ofdm::{build_slot, random_bits, Modem};

    fn cfg() -> OfdmConfig {
        OfdmConfig::default()
    }

    fn random_cells(seed: u64, cfg: &OfdmConfig) -> ChannelMatrix {
        let mut r = rng::rng(seed);
        ChannelMatrix::from_fn(cfg.n_subcarriers, cfg.n_symbols, |_, _| {
            C64::new(r.random::<f64>() - 0.5, r.random::<f64>() - 0.5)
        })
    }

    #[test]
    fn flat_single_path_response_is_constant() {
        let cfg = cfg();
        let c = C64::new(0.3, -1.2);
        let real = ChannelRealization::static_paths(vec![0.0], &[c], &cfg).unwrap();
        let h = freq_response(&real, &cfg);
        assert_eq!(h.shape(), (72, 14));
        assert!(h.iter().all(|x| (x - c).norm() < 1e-12));
    }

    #[test]
    fn unit_delay_gives_phase_ramp() {
        let cfg = cfg();
        let real = ChannelRealization::static_paths(vec![1.0], &[C64::new(1.0, 0.0)], &cfg).unwrap();
        let h = freq_response(&real, &cfg);
        for k in 0..72 {
            let expect = C64::from_polar(1.0, -2.0 * PI * k as f64 / 72.0);
            assert!((h[(k, 3)] - expect).norm() < 1e-10);
        }
    }

    #[test]
    fn tap_dft_matches_frequency_response() {
        let cfg = cfg();
        let pdp = registry::lookup("EVA", &cfg).unwrap();
        let real = realize_channel(&pdp, &FadingSpec::default(), &cfg, 5);
        let h = freq_response(&real, &cfg);
        for l in [0, 7, 13] {
            let taps = sampled_taps(&real, &cfg, l);
            for k in 0..72 {
                let dft: C64 = taps
                    .iter()
                    .enumerate()
                    .map(|(n, t)| t * C64::from_polar(1.0, -2.0 * PI * (k * n) as f64 / 72.0))
                    .sum();
                assert!((dft / 72.0 - h[(k, l)]).norm() < 1e-6, "k {k} l {l}");
            }
        }
    }

    #[test]
    fn integer_delay_taps_are_scaled_gains() {
        let cfg = cfg();
        let a = [C64::new(1.0, 0.5), C64::new(-0.2, 0.1)];
        let real = ChannelRealization::static_paths(vec![0.0, 3.0], &a, &cfg).unwrap();
        let taps = sampled_taps(&real, &cfg, 0);
        for (n, t) in taps.iter().enumerate() {
            let expect = match n {
                0 => a[0] * 72.0,
                3 => a[1] * 72.0,
                _ => C64::new(0.0, 0.0),
            };
            assert!((t - expect).norm() < 1e-9, "tap {n}");
        }
    }

    #[test]
    fn in_guard_channel_is_elementwise_product() {
        let cfg = cfg();
        let modem = Modem::new(&cfg).unwrap();
        let x = random_cells(1, &cfg);
        let tx = modem.transmit_cells(&x).unwrap();
        // Fractional delays, one beyond the CP but inside the full extension,
        // and a fading trajectory.
        let pdp = PowerDelayProfile::new(
            "t",
            [0.0, 2.5, 9.25, 16.75].iter().map(|d| d * cfg.sample_period).collect(),
            vec![0.0, -3.0, -6.0, -9.0],
        )
        .unwrap();
        let fading = FadingSpec {
            max_doppler: 300.0,
            ..FadingSpec::default()
        };
        let real = realize_channel(&pdp, &fading, &cfg, 9);
        assert!(!real.isi && real.exceeds_cp);
        let rx = apply_channel(&tx, &real, f64::INFINITY, &cfg, 0).unwrap();
        let y = modem.receive_cells(&rx).unwrap();
        let h = freq_response(&real, &cfg);
        let err = (y - h.component_mul(&x)).norm();
        assert!(err < 1e-8, "{err}");
    }

    #[test]
    fn late_path_causes_interference() {
        let cfg = cfg();
        let modem = Modem::new(&cfg).unwrap();
        let x = random_cells(2, &cfg);
        let tx = modem.transmit_cells(&x).unwrap();
        let real =
            ChannelRealization::static_paths(vec![0.0, 30.0], &[C64::new(1.0, 0.0); 2], &cfg).unwrap();
        assert!(real.isi);
        let y = modem.receive_cells(&apply_channel(&tx, &real, f64::INFINITY, &cfg, 0).unwrap()).unwrap();
        let h = freq_response(&real, &cfg);
        assert!((y - h.component_mul(&x)).norm() > 1.0);
    }

    #[test]
    fn noiseless_identity_channel_is_transparent() {
        let cfg = cfg();
        let tx: Vec<C64> = (0..cfg.slot_len()).map(|i| C64::new(i as f64, -(i as f64))).collect();
        let real = ChannelRealization::static_paths(vec![0.0], &[C64::new(1.0, 0.0)], &cfg).unwrap();
        let rx = apply_channel(&tx, &real, f64::INFINITY, &cfg, 0).unwrap();
        assert!(tx.iter().zip(&rx).all(|(a, b)| (a - b).norm() < 1e-9));
    }

    #[test]
    fn grid_noise_variance_matches_snr() {
        let cfg = cfg();
        let modem = Modem::new(&cfg).unwrap();
        let real = ChannelRealization::static_paths(vec![0.0], &[C64::new(1.0, 0.0)], &cfg).unwrap();
        let mut acc = 0.0;
        let mut count = 0usize;
        for s in 0..100u64 {
            let grid = build_slot(&random_bits(2 * cfg.n_data_cells(), s), &cfg, s).unwrap();
            let tx = modem.transmit(&grid).unwrap();
            let rx = apply_channel(&tx, &real, 20.0, &cfg, 1000 + s).unwrap();
            let y = modem.receive_cells(&rx).unwrap();
            acc += (y - &grid.cells).iter().map(|e| e.norm_sqr()).sum::<f64>();
            count += grid.cells.len();
        }
        let var = acc / count as f64;
        assert!((var / 0.01 - 1.0).abs() < 0.02, "{var}");
    }

    #[test]
    fn quasi_static_holds_gains() {
        let cfg = cfg();
        let pdp = registry::lookup("EPA", &cfg).unwrap();
        let real = realize_channel(&pdp, &FadingSpec::quasi_static(), &cfg, 4);
        assert_eq!(real.doppler, 0.0);
        for g in &real.gains {
            assert!(g.iter().all(|x| x == &g[0]));
        }
    }

    #[test]
    fn realization_is_deterministic_in_seed() {
        let cfg = cfg();
        let pdp = registry::lookup("ETU", &cfg).unwrap();
        let f = FadingSpec::default();
        assert_eq!(realize_channel(&pdp, &f, &cfg, 8), realize_channel(&pdp, &f, &cfg, 8));
        assert_ne!(realize_channel(&pdp, &f, &cfg, 8), realize_channel(&pdp, &f, &cfg, 9));
    }
}
