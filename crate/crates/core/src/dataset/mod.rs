//! Feature/label datasets generated from designed channels.
//!
//! A feature is the LS estimate on the pilot lattice, a label the exact
//! frequency response of the whole slot. Sample `i` is generated from
//! `rng::derive(master_seed, i)` alone, so datasets are built in parallel and
//! are identical regardless of thread count.

mod io;

pub use io::{header_len, load_dataset, record_len, save_dataset};

use num_complex::Complex32;
use rand::Rng;
use rayon::prelude::*;

use crate::channel::{FadingSpec, PowerDelayProfile};
use crate::estimators::ls_from_cells;
use crate::link::simulate_slot;
use crate::ofdm::{Modem, OfdmConfig, PatternId, PilotPattern};
use crate::rng::{self, stream};
use crate::{ChannelMatrix, Error, Result, C64};

pub type Grid32 = nalgebra::DMatrix<Complex32>;

/// One channel family in a dataset with its share and draw ranges.
#[derive(Debug, Clone, PartialEq)]
pub struct Component {
    pub pdp: PowerDelayProfile,
    pub weight: f64,
    pub snr_range_db: (f64, f64),
    pub doppler_range_hz: (f64, f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetSpec {
    pub components: Vec<Component>,
    pub n_samples: usize,
    pub cfg: OfdmConfig,
    /// Fraction of samples used for training; the rest validate.
    pub train_fraction: f64,
    pub master_seed: u64,
    pub n_sinusoids: usize,
    /// Scale every profile to unit total power before simulating.
    pub normalize_power: bool,
}

impl DatasetSpec {
    /// Single-profile spec with the given ranges.
    pub fn single(
        pdp: PowerDelayProfile,
        n_samples: usize,
        snr_range_db: (f64, f64),
        doppler_range_hz: (f64, f64),
        cfg: OfdmConfig,
        master_seed: u64,
    ) -> Self {
        Self {
            components: vec![Component {
                pdp,
                weight: 1.0,
                snr_range_db,
                doppler_range_hz,
            }],
            n_samples,
            cfg,
            train_fraction: 0.95,
            master_seed,
            n_sinusoids: FadingSpec::default().n_sinusoids,
            normalize_power: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.cfg.validate()?;
        if self.components.is_empty() {
            return Err(Error::Config("dataset needs at least one channel".into()));
        }
        let wsum: f64 = self.components.iter().map(|c| c.weight).sum();
        if (wsum - 1.0).abs() > 1e-9 || self.components.iter().any(|c| !(c.weight >= 0.0)) {
            return Err(Error::Config(format!("mixture weights sum to {wsum}, not 1")));
        }
        if !(self.train_fraction > 0.0 && self.train_fraction <= 1.0) {
            return Err(Error::Config(format!(
                "train fraction {} outside (0, 1]",
                self.train_fraction
            )));
        }
        for c in &self.components {
            let (s0, s1) = c.snr_range_db;
            let (d0, d1) = c.doppler_range_hz;
            if !(s0 <= s1) || !(0.0 <= d0 && d0 <= d1) {
                return Err(Error::Config(format!(
                    "{}: bad ranges snr {s0}..{s1} dB, doppler {d0}..{d1} Hz",
                    c.pdp.name
                )));
            }
            if c.pdp.max_delay() > self.cfg.cp_duration() * (1.0 + 1e-12) {
                return Err(Error::Config(format!(
                    "{}: maximum delay {:.3} us exceeds the CP ({:.3} us)",
                    c.pdp.name,
                    c.pdp.max_delay() * 1e6,
                    self.cfg.cp_duration() * 1e6
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetHeader {
    pub n_f: usize,
    pub n_s: usize,
    pub pattern: PilotPattern,
    pub snr_range_db: (f64, f64),
    pub doppler_range_hz: (f64, f64),
    pub master_seed: u64,
    pub train_fraction: f64,
    /// Profiles were scaled to unit total power.
    pub normalize_power: bool,
    pub components: Vec<String>,
}

impl DatasetHeader {
    pub fn n_pilot_subcarriers(&self) -> usize {
        self.pattern.n_pilot_subcarriers(self.n_f)
    }

    /// Slot layout implied by the header; timing fields take defaults.
    pub fn ofdm_config(&self) -> OfdmConfig {
        OfdmConfig {
            n_subcarriers: self.n_f,
            n_symbols: self.n_s,
            pattern: self.pattern.clone(),
            ..OfdmConfig::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetSample {
    /// LS at pilots, `N_f/L_s x N_pilot`.
    pub feature: Grid32,
    /// Exact channel, `N_f x N_s`.
    pub label: Grid32,
    pub snr_db: f32,
    pub doppler_hz: f32,
    /// Index into [`DatasetHeader::components`].
    pub pdp_id: u32,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub header: DatasetHeader,
    pub samples: Vec<DatasetSample>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Training samples: the first `round(n * train_fraction)`.
    pub fn n_train(&self) -> usize {
        let n = self.samples.len();
        ((n as f64 * self.header.train_fraction).round() as usize).clamp(0, n)
    }

    pub fn train(&self) -> &[DatasetSample] {
        &self.samples[..self.n_train()]
    }

    pub fn validation(&self) -> &[DatasetSample] {
        &self.samples[self.n_train()..]
    }
}

/// Sample counts per component by largest remainder, ties to the lower index.
pub fn allocate(weights: &[f64], n: usize) -> Vec<usize> {
    let exact: Vec<f64> = weights.iter().map(|w| w * n as f64).collect();
    let mut counts: Vec<usize> = exact.iter().map(|x| (x + 1e-9).floor() as usize).collect();
    let mut left = n.saturating_sub(counts.iter().sum());
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| {
        let fa = exact[a] - counts[a] as f64;
        let fb = exact[b] - counts[b] as f64;
        fb.total_cmp(&fa).then(a.cmp(&b))
    });
    for &i in order.iter().cycle() {
        if left == 0 {
            break;
        }
        counts[i] += 1;
        left -= 1;
    }
    counts
}

/// Component of every sample index: the `j`-th sample of component `c` sits
/// at position `(j + 1/2) / count_c` of the dataset, so components interleave.
pub fn interleave(counts: &[usize]) -> Vec<u32> {
    let mut keys: Vec<(f64, usize)> = counts
        .iter()
        .enumerate()
        .flat_map(|(c, &m)| (0..m).map(move |j| ((j as f64 + 0.5) / m as f64, c)))
        .collect();
    keys.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    keys.into_iter().map(|(_, c)| c as u32).collect()
}

fn to32(m: &ChannelMatrix) -> Grid32 {
    m.map(|x| Complex32::new(x.re as f32, x.im as f32))
}

fn generate_one(spec: &DatasetSpec, modem: &Modem, comp: u32, index: u64) -> Result<DatasetSample> {
    let c = &spec.components[comp as usize];
    let seed = rng::derive(spec.master_seed, index);
    let draw = |tag: u64, (lo, hi): (f64, f64)| -> f64 {
        let u: f64 = rng::rng(rng::derive(seed, tag)).random();
        lo + (hi - lo) * u
    };
    let snr = draw(stream::SNR, c.snr_range_db);
    let doppler = draw(stream::DOPPLER, c.doppler_range_hz);
    let fading = FadingSpec {
        max_doppler: c.doppler_range_hz.1,
        n_sinusoids: spec.n_sinusoids,
        ..FadingSpec::default()
    };
    let pdp = if spec.normalize_power { c.pdp.normalized() } else { c.pdp.clone() };
    let slot = simulate_slot(modem, &pdp, &fading, doppler, snr, seed)?;
    let ls = ls_from_cells(&slot.rx, &slot.tx.cells, &spec.cfg.pattern)?;
    Ok(DatasetSample {
        feature: to32(&ls.values),
        label: to32(&slot.h),
        snr_db: snr as f32,
        doppler_hz: doppler as f32,
        pdp_id: comp,
        seed,
    })
}

/// Generate every sample of `spec` (parallel, order-independent).
pub fn generate_dataset(spec: &DatasetSpec) -> Result<Dataset> {
    spec.validate()?;
    let weights: Vec<f64> = spec.components.iter().map(|c| c.weight).collect();
    let assignment = interleave(&allocate(&weights, spec.n_samples));
    let modem = Modem::new(&spec.cfg)?;
    let samples = assignment
        .par_iter()
        .enumerate()
        .map(|(i, &c)| generate_one(spec, &modem, c, i as u64))
        .collect::<Result<Vec<_>>>()?;
    let fold = |f: fn(&Component) -> f64, pick: fn(f64, f64) -> f64| {
        spec.components.iter().map(f).reduce(pick).unwrap_or(0.0)
    };
    Ok(Dataset {
        header: DatasetHeader {
            n_f: spec.cfg.n_subcarriers,
            n_s: spec.cfg.n_symbols,
            pattern: spec.cfg.pattern.clone(),
            snr_range_db: (fold(|c| c.snr_range_db.0, f64::min), fold(|c| c.snr_range_db.1, f64::max)),
            doppler_range_hz: (
                fold(|c| c.doppler_range_hz.0, f64::min),
                fold(|c| c.doppler_range_hz.1, f64::max),
            ),
            master_seed: spec.master_seed,
            train_fraction: spec.train_fraction,
            normalize_power: spec.normalize_power,
            components: spec.components.iter().map(|c| c.pdp.name.clone()).collect(),
        },
        samples,
    })
}

/// Mix several specs by weight into one dataset. Sample count, seed, split
/// and fading settings come from the first spec; every spec must share the
/// slot layout.
pub fn mix_datasets(specs: &[(DatasetSpec, f64)]) -> Result<Dataset> {
    let (first, _) = specs
        .first()
        .ok_or_else(|| Error::Config("nothing to mix".into()))?;
    let mut merged = first.clone();
    merged.components.clear();
    for (s, w) in specs {
        if s.cfg != first.cfg {
            return Err(Error::Dimension(format!(
                "cannot mix {}x{} grids (pattern {:?}) with {}x{} (pattern {:?})",
                s.cfg.n_subcarriers,
                s.cfg.n_symbols,
                s.cfg.pattern.id,
                first.cfg.n_subcarriers,
                first.cfg.n_symbols,
                first.cfg.pattern.id
            )));
        }
        merged.components.extend(s.components.iter().map(|c| Component {
            weight: c.weight * w,
            ..c.clone()
        }));
    }
    generate_dataset(&merged)
}

/// Feature of a sample as a 64-bit complex matrix.
pub fn feature64(s: &DatasetSample) -> ChannelMatrix {
    s.feature.map(|x| C64::new(x.re as f64, x.im as f64))
}

/// Label of a sample as a 64-bit complex matrix.
pub fn label64(s: &DatasetSample) -> ChannelMatrix {
    s.label.map(|x| C64::new(x.re as f64, x.im as f64))
}

/// Pilot pattern matching a stored id, or the stored custom layout.
pub(crate) fn pattern_from_parts(id: u8, symbols: Vec<usize>, stride: usize, offset: usize) -> Result<PilotPattern> {
    match PatternId::from_code(id) {
        Some(PatternId::Custom) => PilotPattern::custom(symbols, stride, offset),
        Some(pid) => {
            let p = PilotPattern::from_id(pid).expect("built-in id");
            if p.symbols != symbols || p.stride != stride || p.offset != offset {
                return Err(Error::Format(format!("pattern id {id} does not match stored layout")));
            }
            Ok(p)
        }
        None => Err(Error::Format(format!("unknown pilot pattern id {id}"))),
    }
}
