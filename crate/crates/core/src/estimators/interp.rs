use super::PilotLsEstimate;
use crate::ofdm::OfdmConfig;
use crate::ChannelMatrix;

/// Linear interpolation from samples at integer `coords` onto `0..n_out`,
/// holding the edge value outside the first and last coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct Interp1d {
    pub lo: Vec<usize>,
    pub hi: Vec<usize>,
    /// Weight of `hi`; `lo` gets `1 - w`.
    pub w: Vec<f64>,
    pub n_in: usize,
}

impl Interp1d {
    pub fn new(coords: &[usize], n_out: usize) -> Self {
        assert!(!coords.is_empty(), "interpolation needs at least one sample");
        let last = coords.len() - 1;
        let mut lo = Vec::with_capacity(n_out);
        let mut hi = Vec::with_capacity(n_out);
        let mut w = Vec::with_capacity(n_out);
        let mut j = 0;
        for x in 0..n_out {
            if x <= coords[0] {
                lo.push(0);
                hi.push(0);
                w.push(0.0);
            } else if x >= coords[last] {
                lo.push(last);
                hi.push(last);
                w.push(0.0);
            } else {
                while coords[j + 1] <= x {
                    j += 1;
                }
                lo.push(j);
                hi.push(j + 1);
                w.push((x - coords[j]) as f64 / (coords[j + 1] - coords[j]) as f64);
            }
        }
        Self {
            lo,
            hi,
            w,
            n_in: coords.len(),
        }
    }

    pub fn n_out(&self) -> usize {
        self.w.len()
    }
}

/// Separable bilinear map from the pilot lattice to the full grid:
/// frequency first, then time.
#[derive(Debug, Clone, PartialEq)]
pub struct Bilinear {
    pub freq: Interp1d,
    pub time: Interp1d,
}

impl Bilinear {
    pub fn new(cfg: &OfdmConfig) -> Self {
        Self::from_coords(
            &cfg.pattern.pilot_subcarriers(cfg.n_subcarriers),
            &cfg.pattern.symbols,
            cfg.n_subcarriers,
            cfg.n_symbols,
        )
    }

    pub fn from_coords(subcarriers: &[usize], symbols: &[usize], n_f: usize, n_s: usize) -> Self {
        Self {
            freq: Interp1d::new(subcarriers, n_f),
            time: Interp1d::new(symbols, n_s),
        }
    }

    pub fn apply(&self, pilots: &ChannelMatrix) -> ChannelMatrix {
        let (n_f, n_s) = (self.freq.n_out(), self.time.n_out());
        let f = &self.freq;
        let by_freq = ChannelMatrix::from_fn(n_f, pilots.ncols(), |k, p| {
            pilots[(f.lo[k], p)] * (1.0 - f.w[k]) + pilots[(f.hi[k], p)] * f.w[k]
        });
        let t = &self.time;
        ChannelMatrix::from_fn(n_f, n_s, |k, l| {
            by_freq[(k, t.lo[l])] * (1.0 - t.w[l]) + by_freq[(k, t.hi[l])] * t.w[l]
        })
    }

    /// Real-valued version on flat buffers. `input` is `[pilot symbol][pilot
    /// subcarrier]`, `out` is `[symbol][subcarrier]`; `scratch` holds
    /// `n_pilot_symbols * n_f` values.
    pub fn apply_real(&self, input: &[f64], out: &mut [f64], scratch: &mut [f64]) {
        let (n_f, n_in_f) = (self.freq.n_out(), self.freq.n_in);
        let f = &self.freq;
        for p in 0..self.time.n_in {
            let src = &input[p * n_in_f..(p + 1) * n_in_f];
            let dst = &mut scratch[p * n_f..(p + 1) * n_f];
            for k in 0..n_f {
                dst[k] = src[f.lo[k]] * (1.0 - f.w[k]) + src[f.hi[k]] * f.w[k];
            }
        }
        let t = &self.time;
        for l in 0..t.n_out() {
            let (a, b, w) = (t.lo[l], t.hi[l], t.w[l]);
            let dst = &mut out[l * n_f..(l + 1) * n_f];
            let ra = &scratch[a * n_f..(a + 1) * n_f];
            let rb = &scratch[b * n_f..(b + 1) * n_f];
            for k in 0..n_f {
                dst[k] = ra[k] * (1.0 - w) + rb[k] * w;
            }
        }
    }

    /// Adjoint of [`apply_real`](Self::apply_real): accumulates into `grad_in`.
    pub fn transpose_real(&self, grad_out: &[f64], grad_in: &mut [f64], scratch: &mut [f64]) {
        let (n_f, n_in_f) = (self.freq.n_out(), self.freq.n_in);
        scratch[..self.time.n_in * n_f].iter_mut().for_each(|x| *x = 0.0);
        let t = &self.time;
        for l in 0..t.n_out() {
            let (a, b, w) = (t.lo[l], t.hi[l], t.w[l]);
            let g = &grad_out[l * n_f..(l + 1) * n_f];
            for k in 0..n_f {
                scratch[a * n_f + k] += g[k] * (1.0 - w);
                scratch[b * n_f + k] += g[k] * w;
            }
        }
        let f = &self.freq;
        for p in 0..t.n_in {
            let row = &scratch[p * n_f..(p + 1) * n_f];
            let dst = &mut grad_in[p * n_in_f..(p + 1) * n_in_f];
            for k in 0..n_f {
                dst[f.lo[k]] += row[k] * (1.0 - f.w[k]);
                dst[f.hi[k]] += row[k] * f.w[k];
            }
        }
    }
}

/// Fill the whole grid from pilot estimates by separable linear
/// interpolation (frequency, then time) with edge hold.
pub fn bilinear_interpolate(est: &PilotLsEstimate, cfg: &OfdmConfig) -> ChannelMatrix {
    Bilinear::from_coords(&est.subcarriers, &est.symbols, cfg.n_subcarriers, cfg.n_symbols)
        .apply(&est.values)
}
