//! Monte Carlo link evaluation: MSE and BER curves over SNR or delay spread.
//!
//! Each slot's seed depends on the channel index and the slot index only, so
//! points of one curve and curves of different estimators share bits,
//! pilots, fading and noise shape (common random numbers).

mod plot;

pub use plot::{svg_plot, Series};

use std::fmt;
use std::io::Write;

use rand::Rng;
use rayon::prelude::*;

use crate::channel::{scale_tdl, FadingSpec, PowerDelayProfile};
use crate::estimators::{
    bilinear_interpolate, correlation_from_pdp, ls_from_cells, mse, pilot_mse, MmseFilter, NoiseConfig,
};
use crate::link::simulate_slot;
use crate::nn::{ModelFile, Net};
use crate::ofdm::{qpsk_demodulate, Modem, OfdmConfig};
use crate::rng::{self, stream};
use crate::{ChannelMatrix, Error, Result};

/// Channel estimator under test.
#[derive(Debug, Clone)]
pub enum Estimator {
    /// Pilot LS followed by bilinear interpolation.
    LsInterp,
    /// LMMSE designed for the given profile at the true noise level.
    Mmse(PowerDelayProfile),
    SimpleNet(Box<ModelFile>),
    /// The exact channel.
    PerfectCsi,
}

impl Estimator {
    pub fn label(&self) -> String {
        match self {
            Estimator::LsInterp => "LS".into(),
            Estimator::Mmse(p) => format!("MMSE({})", p.name),
            Estimator::SimpleNet(_) => "SimpleNet".into(),
            Estimator::PerfectCsi => "perfect".into(),
        }
    }
}

/// Which cells the MSE averages over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MseMode {
    AllCells,
    PilotsOnly,
}

#[derive(Debug, Clone)]
pub struct EvalSpec {
    pub estimator: Estimator,
    pub channels: Vec<PowerDelayProfile>,
    pub snr_db: Vec<f64>,
    pub doppler_range_hz: (f64, f64),
    pub n_slots: usize,
    pub seed: u64,
    pub cfg: OfdmConfig,
    pub fading: FadingSpec,
    pub mse_mode: MseMode,
    /// Scale channel and MMSE design profiles to unit total power.
    pub normalize_power: bool,
}

impl EvalSpec {
    pub fn new(estimator: Estimator, channels: Vec<PowerDelayProfile>, snr_db: Vec<f64>, n_slots: usize, seed: u64) -> Self {
        Self {
            estimator,
            channels,
            snr_db,
            doppler_range_hz: (0.0, 97.0),
            n_slots,
            seed,
            cfg: OfdmConfig::default(),
            fading: FadingSpec::default(),
            mse_mode: MseMode::AllCells,
            normalize_power: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.cfg.validate()?;
        if self.n_slots == 0 {
            return Err(Error::Config("n_slots must be at least 1".into()));
        }
        let (lo, hi) = self.doppler_range_hz;
        if !(lo >= 0.0 && hi >= lo && hi.is_finite()) {
            return Err(Error::Config(format!("bad Doppler range ({lo}, {hi})")));
        }
        if self.snr_db.iter().any(|s| s.is_nan()) {
            return Err(Error::Config("SNR grid contains NaN".into()));
        }
        if let Estimator::SimpleNet(m) = &self.estimator {
            let c = &self.cfg;
            if m.n_f != c.n_subcarriers || m.n_s != c.n_symbols || m.pattern != c.pattern {
                return Err(Error::Dimension(format!(
                    "model expects a {}x{} grid with pattern {:?}, evaluation uses {}x{} with {:?}",
                    m.n_f, m.n_s, m.pattern.id, c.n_subcarriers, c.n_symbols, c.pattern.id
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum XKind {
    SnrDb,
    DsNs,
}

impl fmt::Display for XKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            XKind::SnrDb => "snr_db",
            XKind::DsNs => "ds_ns",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurvePoint {
    pub channel: String,
    pub x_kind: XKind,
    pub x_value: f64,
    pub mse: f64,
    pub mse_stderr: f64,
    pub ber: f64,
    pub ber_stderr: f64,
    pub n_slots: usize,
}

/// Per-slot metrics, kept for paired comparisons.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlotMetrics {
    pub mse: f64,
    pub ber: f64,
}

/// Estimator with its SNR-dependent state built.
enum Prepared {
    Ls,
    Mmse(Box<MmseFilter>),
    Net(Box<Net>),
    Perfect,
}

/// `pdp` as simulated under `spec`.
fn effective(spec: &EvalSpec, pdp: &PowerDelayProfile) -> PowerDelayProfile {
    if spec.normalize_power {
        PowerDelayProfile {
            name: pdp.name.clone(),
            ..pdp.normalized()
        }
    } else {
        pdp.clone()
    }
}

fn prepare(spec: &EvalSpec, snr_db: f64) -> Result<Prepared> {
    let cfg = &spec.cfg;
    Ok(match &spec.estimator {
        Estimator::LsInterp => Prepared::Ls,
        Estimator::PerfectCsi => Prepared::Perfect,
        Estimator::Mmse(pdp) => {
            let corr = correlation_from_pdp(&effective(spec, pdp), cfg);
            Prepared::Mmse(Box::new(MmseFilter::new(&corr, &NoiseConfig::from_snr_db(snr_db))?))
        }
        Estimator::SimpleNet(m) => Prepared::Net(Box::new(m.net()?)),
    })
}

fn mean_stderr(x: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = x.clone().count() as f64;
    let mean = x.clone().sum::<f64>() / n;
    if n < 2.0 {
        return (mean, 0.0);
    }
    let var = x.map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Seed of slot `slot` on channel `channel`.
pub fn slot_seed(master: u64, channel: u64, slot: u64) -> u64 {
    rng::derive(rng::derive(master, channel), slot)
}

fn run_slot(
    spec: &EvalSpec,
    modem: &Modem,
    prepared: &Prepared,
    pdp: &PowerDelayProfile,
    snr_db: f64,
    seed: u64,
) -> Result<SlotMetrics> {
    let cfg = &spec.cfg;
    let (lo, hi) = spec.doppler_range_hz;
    let doppler = if hi > lo {
        lo + (hi - lo) * rng::rng(rng::derive(seed, stream::DOPPLER)).random::<f64>()
    } else {
        lo
    };
    let slot = simulate_slot(modem, pdp, &spec.fading, doppler, snr_db, seed)?;
    let h_hat: ChannelMatrix = match prepared {
        Prepared::Perfect => slot.h.clone(),
        other => {
            let ls = ls_from_cells(&slot.rx, &slot.tx.cells, &cfg.pattern)?;
            match other {
                Prepared::Ls => bilinear_interpolate(&ls, cfg),
                Prepared::Mmse(f) => f.apply(&ls, cfg)?,
                Prepared::Net(n) => n.forward(&ls.values)?,
                Prepared::Perfect => unreachable!(),
            }
        }
    };
    let err = match spec.mse_mode {
        MseMode::AllCells => mse(&h_hat, &slot.h),
        MseMode::PilotsOnly => pilot_mse(&h_hat, &slot.h, cfg),
    };
    let cells: Vec<_> = slot.tx.data_cells().collect();
    let sent = qpsk_demodulate(&cells.iter().map(|&c| slot.tx.cells[c]).collect::<Vec<_>>());
    let equalized: Vec<_> = cells.iter().map(|&c| slot.rx[c] / h_hat[c]).collect();
    let got = qpsk_demodulate(&equalized);
    let ber = sent.errors_against(&got) as f64 / sent.len() as f64;
    Ok(SlotMetrics { mse: err, ber })
}

/// Per-slot metrics for one (channel, SNR) point, in slot order.
pub fn run_point_slots(spec: &EvalSpec, channel_index: usize, pdp: &PowerDelayProfile, snr_db: f64) -> Result<Vec<SlotMetrics>> {
    spec.validate()?;
    let modem = Modem::new(&spec.cfg)?;
    let prepared = prepare(spec, snr_db)?;
    point_slots(spec, &modem, &prepared, channel_index, pdp, snr_db)
}

fn point_slots(
    spec: &EvalSpec,
    modem: &Modem,
    prepared: &Prepared,
    channel_index: usize,
    pdp: &PowerDelayProfile,
    snr_db: f64,
) -> Result<Vec<SlotMetrics>> {
    let pdp = effective(spec, pdp);
    (0..spec.n_slots as u64)
        .into_par_iter()
        .map(|s| run_slot(spec, modem, prepared, &pdp, snr_db, slot_seed(spec.seed, channel_index as u64, s)))
        .collect()
}

fn summarize(channel: &str, x_kind: XKind, x_value: f64, slots: &[SlotMetrics]) -> CurvePoint {
    let (mse, mse_stderr) = mean_stderr(slots.iter().map(|m| m.mse));
    let (ber, ber_stderr) = mean_stderr(slots.iter().map(|m| m.ber));
    CurvePoint {
        channel: channel.to_string(),
        x_kind,
        x_value,
        mse,
        mse_stderr,
        ber,
        ber_stderr,
        n_slots: slots.len(),
    }
}

/// One point per (channel, SNR), channels outermost.
pub fn run_sweep(spec: &EvalSpec) -> Result<Vec<CurvePoint>> {
    spec.validate()?;
    let modem = Modem::new(&spec.cfg)?;
    let mut out = Vec::with_capacity(spec.channels.len() * spec.snr_db.len());
    let prepared: Vec<Prepared> = spec
        .snr_db
        .iter()
        .map(|&s| prepare(spec, s))
        .collect::<Result<_>>()?;
    for (ci, pdp) in spec.channels.iter().enumerate() {
        for (&snr, prep) in spec.snr_db.iter().zip(&prepared) {
            let slots = point_slots(spec, &modem, prep, ci, pdp, snr)?;
            out.push(summarize(&pdp.name, XKind::SnrDb, snr, &slots));
        }
    }
    Ok(out)
}

/// Sweep the delay spread of a normalized TDL profile at a fixed SNR.
/// `spec.channels` and `spec.snr_db` are ignored. Every spread reuses the
/// same slot seeds.
pub fn ds_sweep(spec: &EvalSpec, normalized: &PowerDelayProfile, ds_ns: &[f64], snr_db: f64) -> Result<Vec<CurvePoint>> {
    spec.validate()?;
    let modem = Modem::new(&spec.cfg)?;
    let prepared = prepare(spec, snr_db)?;
    ds_ns
        .iter()
        .map(|&ds| {
            let pdp = scale_tdl(normalized, ds * 1e-9)?;
            let slots = point_slots(spec, &modem, &prepared, 0, &pdp, snr_db)?;
            Ok(summarize(&normalized.name, XKind::DsNs, ds, &slots))
        })
        .collect()
}

/// SNR offset between two BER curves at a target BER.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DeltaSnr {
    Db(f64),
    /// At least one curve never crosses the target within its range.
    NotAchieved,
}

impl fmt::Display for DeltaSnr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DeltaSnr::Db(d) => write!(f, "{d:.3}"),
            DeltaSnr::NotAchieved => f.write_str("not-achieved"),
        }
    }
}

/// Smallest SNR at which a `(snr_db, ber)` curve reaches `target`,
/// interpolating linearly in `(snr, log10 ber)` between grid points.
pub fn snr_at_ber(curve: &[(f64, f64)], target: f64) -> Option<f64> {
    let floor = 1e-15;
    let lg = |b: f64| b.max(floor).log10();
    let mut pts = curve.to_vec();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    if pts.first()?.1 <= target {
        return (pts[0].1 == target).then_some(pts[0].0);
    }
    for w in pts.windows(2) {
        let ((s0, b0), (s1, b1)) = (w[0], w[1]);
        if b0 > target && b1 <= target {
            let t = (lg(target) - lg(b0)) / (lg(b1) - lg(b0));
            return Some(s0 + t * (s1 - s0));
        }
    }
    None
}

/// `SNR_a(target) - SNR_b(target)`: positive when `a` needs more SNR.
pub fn delta_snr(a: &[(f64, f64)], b: &[(f64, f64)], target_ber: f64) -> DeltaSnr {
    match (snr_at_ber(a, target_ber), snr_at_ber(b, target_ber)) {
        (Some(x), Some(y)) => DeltaSnr::Db(x - y),
        _ => DeltaSnr::NotAchieved,
    }
}

/// `(x, ber)` pairs of one channel's curve.
pub fn ber_curve(points: &[CurvePoint], channel: &str) -> Vec<(f64, f64)> {
    points.iter().filter(|p| p.channel == channel).map(|p| (p.x_value, p.ber)).collect()
}

pub const CSV_HEADER: &str = "channel,x_kind,x_value,mse,mse_stderr,ber,ber_stderr,n_slots";

pub fn write_csv(points: &[CurvePoint], mut w: impl Write) -> Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for p in points {
        writeln!(
            w,
            "{},{},{},{:e},{:e},{:e},{:e},{}",
            p.channel, p.x_kind, p.x_value, p.mse, p.mse_stderr, p.ber, p.ber_stderr, p.n_slots
        )?;
    }
    Ok(())
}

/// Closed-form BER of Gray QPSK with perfect CSI on flat Rayleigh fading,
/// for per-symbol SNR `snr_db` (per-bit SNR is half of it).
pub fn rayleigh_qpsk_ber(snr_db: f64) -> f64 {
    let gb = 10f64.powf(snr_db / 10.0) / 2.0;
    0.5 * (1.0 - (gb / (1.0 + gb)).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::registry;

    fn spec(est: Estimator, ch: &str, snr: Vec<f64>, n: usize) -> EvalSpec {
        let cfg = OfdmConfig::default();
        EvalSpec::new(est, vec![registry::lookup(ch, &cfg).unwrap()], snr, n, 5)
    }

    #[test]
    fn perfect_csi_has_zero_mse_and_no_noiseless_errors() {
        let pts = run_sweep(&spec(Estimator::PerfectCsi, "ETU", vec![f64::INFINITY, 10.0], 20)).unwrap();
        assert!(pts.iter().all(|p| p.mse == 0.0));
        assert_eq!(pts[0].ber, 0.0);
        assert!(pts[1].ber > 0.0);
    }

    #[test]
    fn sweeps_are_reproducible() {
        let s = spec(Estimator::LsInterp, "EPA", vec![5.0, 15.0], 30);
        let (mut a, mut b) = (Vec::new(), Vec::new());
        write_csv(&run_sweep(&s).unwrap(), &mut a).unwrap();
        write_csv(&run_sweep(&s).unwrap(), &mut b).unwrap();
        assert_eq!(a, b);
        let text = String::from_utf8(a).unwrap();
        assert!(text.starts_with(CSV_HEADER));
        assert_eq!(text.lines().count(), 3);
    }

    #[test]
    fn delta_snr_cases() {
        let a: Vec<(f64, f64)> = (0..=30).step_by(5).map(|s| (s as f64, 0.3 * 10f64.powf(-(s as f64) / 10.0))).collect();
        assert_eq!(delta_snr(&a, &a, 0.01), DeltaSnr::Db(0.0));
        let shifted: Vec<(f64, f64)> = a.iter().map(|&(s, b)| (s + 2.0, b)).collect();
        match delta_snr(&shifted, &a, 0.01) {
            DeltaSnr::Db(d) => assert!((d - 2.0).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
        assert_eq!(delta_snr(&a, &a, 1e-9), DeltaSnr::NotAchieved);
        assert_eq!(delta_snr(&a, &a, 0.9), DeltaSnr::NotAchieved);
    }

    #[test]
    fn rayleigh_oracle_values() {
        // Per-bit SNR 10 is a per-symbol SNR of 10 log10(20) dB.
        assert!((rayleigh_qpsk_ber(10.0 * 20f64.log10()) - 0.0233).abs() < 5e-5);
        assert!((rayleigh_qpsk_ber(10.0) - 0.5 * (1.0 - (5.0f64 / 6.0).sqrt())).abs() < 1e-15);
    }

    #[test]
    fn model_grid_mismatch_is_rejected() {
        use crate::nn::{ModelParams, Placement};
        let alt = OfdmConfig::default().with_pattern(crate::ofdm::PilotPattern::alternative());
        let m = ModelFile::new(ModelParams::zeros(Placement::ResizeFirst), &alt);
        let s = spec(Estimator::SimpleNet(Box::new(m)), "flat", vec![10.0], 2);
        assert!(matches!(run_sweep(&s), Err(Error::Dimension(_))));
    }

    #[test]
    fn zero_slots_rejected() {
        assert!(run_sweep(&spec(Estimator::LsInterp, "flat", vec![10.0], 0)).is_err());
    }
}
