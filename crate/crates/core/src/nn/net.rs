//! Forward and backward passes.

use num_complex::Complex32;

use super::{conv, ModelParams, Placement, LAYERS};
use crate::estimators::Bilinear;
use crate::ofdm::OfdmConfig;
use crate::{ChannelMatrix, Error, Result, C64};

/// Parameters bound to a grid layout.
#[derive(Debug, Clone)]
pub struct Net {
    pub params: ModelParams,
    interp: Bilinear,
    n_f: usize,
    n_s: usize,
    n_pf: usize,
    n_ps: usize,
}

/// Per-thread buffers for one sample.
#[derive(Debug, Clone)]
pub struct Workspace {
    /// Input, `[2][pilot symbol][pilot subcarrier]`.
    x: Vec<f64>,
    a0: Vec<f64>,
    z1: Vec<f64>,
    a1: Vec<f64>,
    z2: Vec<f64>,
    a2: Vec<f64>,
    z3: Vec<f64>,
    /// Output, `[2][symbol][subcarrier]`.
    out: Vec<f64>,
    g_out: Vec<f64>,
    g3: Vec<f64>,
    g2: Vec<f64>,
    g1: Vec<f64>,
    scratch: Vec<f64>,
    label: Vec<f64>,
}

fn relu(z: &[f64], a: &mut [f64]) {
    for (a, &z) in a.iter_mut().zip(z) {
        *a = z.max(0.0);
    }
}

/// Gradient through ReLU, zero at the kink.
fn relu_back(z: &[f64], g: &mut [f64]) {
    for (g, &z) in g.iter_mut().zip(z) {
        if z <= 0.0 {
            *g = 0.0;
        }
    }
}

/// Weight and bias slices of layer `i` in a flat gradient.
fn layer_grads(grad: &mut [f64], i: usize) -> (&mut [f64], &mut [f64]) {
    let (w0, b0) = super::layer_offsets(i);
    let (head, tail) = grad.split_at_mut(b0);
    (&mut head[w0..], &mut tail[..LAYERS[i].1])
}

impl Net {
    pub fn new(params: ModelParams, cfg: &OfdmConfig) -> Result<Self> {
        cfg.validate()?;
        params.check_finite()?;
        Ok(Self {
            params,
            interp: Bilinear::new(cfg),
            n_f: cfg.n_subcarriers,
            n_s: cfg.n_symbols,
            n_pf: cfg.n_pilot_subcarriers(),
            n_ps: cfg.n_pilot_symbols(),
        })
    }

    /// `(rows, cols)` of the maps the convolutions run on.
    fn conv_dims(&self) -> (usize, usize) {
        match self.params.placement {
            Placement::ResizeFirst => (self.n_s, self.n_f),
            Placement::ResizeLast => (self.n_ps, self.n_pf),
        }
    }

    pub fn workspace(&self) -> Workspace {
        let (h, w) = self.conv_dims();
        let hw = h * w;
        let full = self.n_s * self.n_f;
        Workspace {
            x: vec![0.0; 2 * self.n_ps * self.n_pf],
            a0: vec![0.0; 2 * hw],
            z1: vec![0.0; 8 * hw],
            a1: vec![0.0; 8 * hw],
            z2: vec![0.0; 8 * hw],
            a2: vec![0.0; 8 * hw],
            z3: vec![0.0; 2 * hw],
            out: vec![0.0; 2 * full],
            g_out: vec![0.0; 2 * full],
            g3: vec![0.0; 2 * hw],
            g2: vec![0.0; 8 * hw],
            g1: vec![0.0; 8 * hw],
            scratch: vec![0.0; self.n_ps * self.n_f],
            label: vec![0.0; 2 * full],
        }
    }

    fn check_feature(&self, rows: usize, cols: usize) -> Result<()> {
        if (rows, cols) != (self.n_pf, self.n_ps) {
            return Err(Error::Dimension(format!(
                "feature is {rows}x{cols}, network expects {}x{}",
                self.n_pf, self.n_ps
            )));
        }
        Ok(())
    }

    fn check_label(&self, rows: usize, cols: usize) -> Result<()> {
        if (rows, cols) != (self.n_f, self.n_s) {
            return Err(Error::Dimension(format!(
                "label is {rows}x{cols}, network expects {}x{}",
                self.n_f, self.n_s
            )));
        }
        Ok(())
    }

    /// Copy a `K x P` pilot grid into the input buffer.
    pub fn load_feature(&self, ws: &mut Workspace, f: impl Fn(usize, usize) -> C64) {
        let plane = self.n_ps * self.n_pf;
        for p in 0..self.n_ps {
            for k in 0..self.n_pf {
                let v = f(k, p);
                ws.x[p * self.n_pf + k] = v.re;
                ws.x[plane + p * self.n_pf + k] = v.im;
            }
        }
    }

    /// Copy an `N_f x N_s` label into the workspace.
    pub fn load_label(&self, ws: &mut Workspace, f: impl Fn(usize, usize) -> C64) {
        let plane = self.n_s * self.n_f;
        for l in 0..self.n_s {
            for k in 0..self.n_f {
                let v = f(k, l);
                ws.label[l * self.n_f + k] = v.re;
                ws.label[plane + l * self.n_f + k] = v.im;
            }
        }
    }

    pub fn load_sample32(&self, ws: &mut Workspace, feature: &nalgebra::DMatrix<Complex32>, label: &nalgebra::DMatrix<Complex32>) -> Result<()> {
        self.check_feature(feature.nrows(), feature.ncols())?;
        self.check_label(label.nrows(), label.ncols())?;
        let c = |z: Complex32| C64::new(z.re as f64, z.im as f64);
        self.load_feature(ws, |k, p| c(feature[(k, p)]));
        self.load_label(ws, |k, l| c(label[(k, l)]));
        Ok(())
    }

    /// Run the network on the loaded input; the result stays in the workspace.
    pub fn run(&self, ws: &mut Workspace) {
        let (h, w) = self.conv_dims();
        let th = &self.params;
        let in_plane = self.n_ps * self.n_pf;
        let full = self.n_s * self.n_f;
        match th.placement {
            Placement::ResizeFirst => {
                for c in 0..2 {
                    self.interp.apply_real(
                        &ws.x[c * in_plane..(c + 1) * in_plane],
                        &mut ws.a0[c * full..(c + 1) * full],
                        &mut ws.scratch,
                    );
                }
            }
            Placement::ResizeLast => ws.a0.copy_from_slice(&ws.x),
        }
        let (c0, c1) = LAYERS[0];
        conv::forward(th.weights(0), th.biases(0), c0, c1, h, w, &ws.a0, &mut ws.z1);
        relu(&ws.z1, &mut ws.a1);
        let (c0, c1) = LAYERS[1];
        conv::forward(th.weights(1), th.biases(1), c0, c1, h, w, &ws.a1, &mut ws.z2);
        relu(&ws.z2, &mut ws.a2);
        let (c0, c1) = LAYERS[2];
        conv::forward(th.weights(2), th.biases(2), c0, c1, h, w, &ws.a2, &mut ws.z3);
        match th.placement {
            Placement::ResizeFirst => ws.out.copy_from_slice(&ws.z3),
            Placement::ResizeLast => {
                let plane = h * w;
                for c in 0..2 {
                    self.interp.apply_real(
                        &ws.z3[c * plane..(c + 1) * plane],
                        &mut ws.out[c * full..(c + 1) * full],
                        &mut ws.scratch,
                    );
                }
            }
        }
    }

    /// Loss of the last [`run`](Self::run) against the loaded label.
    pub fn loss(&self, ws: &Workspace) -> f64 {
        let full = self.n_s * self.n_f;
        ws.out.iter().zip(&ws.label).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / full as f64
    }

    /// Loss of the last [`run`](Self::run); adds the parameter gradient into `grad`.
    pub fn backprop(&self, ws: &mut Workspace, grad: &mut [f64]) -> f64 {
        let (h, w) = self.conv_dims();
        let full = self.n_s * self.n_f;
        let scale = 2.0 / full as f64;
        let mut loss = 0.0;
        for ((g, a), b) in ws.g_out.iter_mut().zip(&ws.out).zip(&ws.label) {
            let d = a - b;
            loss += d * d;
            *g = scale * d;
        }
        match self.params.placement {
            Placement::ResizeFirst => ws.g3.copy_from_slice(&ws.g_out),
            Placement::ResizeLast => {
                let plane = h * w;
                ws.g3.iter_mut().for_each(|x| *x = 0.0);
                for c in 0..2 {
                    self.interp.transpose_real(
                        &ws.g_out[c * full..(c + 1) * full],
                        &mut ws.g3[c * plane..(c + 1) * plane],
                        &mut ws.scratch,
                    );
                }
            }
        }
        let th = &self.params;
        let (c0, c1) = LAYERS[2];
        let (gw, gb) = layer_grads(grad, 2);
        conv::backward(th.weights(2), c0, c1, h, w, &ws.a2, &ws.g3, gw, gb, Some(&mut ws.g2));
        relu_back(&ws.z2, &mut ws.g2);
        let (c0, c1) = LAYERS[1];
        let (gw, gb) = layer_grads(grad, 1);
        conv::backward(th.weights(1), c0, c1, h, w, &ws.a1, &ws.g2, gw, gb, Some(&mut ws.g1));
        relu_back(&ws.z1, &mut ws.g1);
        let (c0, c1) = LAYERS[0];
        let (gw, gb) = layer_grads(grad, 0);
        conv::backward(th.weights(0), c0, c1, h, w, &ws.a0, &ws.g1, gw, gb, None);
        loss / full as f64
    }

    /// Which hidden units of the last [`run`](Self::run) are active. Two
    /// parameter vectors with the same pattern lie on the same smooth piece.
    pub fn active_units(&self, ws: &Workspace) -> Vec<bool> {
        ws.z1.iter().chain(&ws.z2).map(|&z| z > 0.0).collect()
    }

    /// Output of the last [`run`](Self::run) as an `N_f x N_s` matrix.
    pub fn output(&self, ws: &Workspace) -> ChannelMatrix {
        let plane = self.n_s * self.n_f;
        ChannelMatrix::from_fn(self.n_f, self.n_s, |k, l| {
            C64::new(ws.out[l * self.n_f + k], ws.out[plane + l * self.n_f + k])
        })
    }

    /// Estimate the full grid from an LS pilot grid (`K x P`).
    pub fn forward(&self, feature: &ChannelMatrix) -> Result<ChannelMatrix> {
        let mut ws = self.workspace();
        self.forward_with(feature, &mut ws)
    }

    pub fn forward_with(&self, feature: &ChannelMatrix, ws: &mut Workspace) -> Result<ChannelMatrix> {
        self.check_feature(feature.nrows(), feature.ncols())?;
        self.load_feature(ws, |k, p| feature[(k, p)]);
        self.run(ws);
        Ok(self.output(ws))
    }

    /// Loss and gradient for one (feature, label) pair.
    pub fn backward(&self, feature: &ChannelMatrix, label: &ChannelMatrix) -> Result<(f64, Vec<f64>)> {
        self.check_feature(feature.nrows(), feature.ncols())?;
        self.check_label(label.nrows(), label.ncols())?;
        let mut ws = self.workspace();
        self.load_feature(&mut ws, |k, p| feature[(k, p)]);
        self.load_label(&mut ws, |k, l| label[(k, l)]);
        self.run(&mut ws);
        let mut grad = vec![0.0; self.params.theta.len()];
        let loss = self.backprop(&mut ws, &mut grad);
        Ok((loss, grad))
    }
}

/// Network estimate of the full grid from a `K x P` LS pilot grid.
pub fn forward(params: &ModelParams, feature: &ChannelMatrix, cfg: &OfdmConfig) -> Result<ChannelMatrix> {
    Net::new(params.clone(), cfg)?.forward(feature)
}

/// `sum |est - label|^2 / (N_f N_s)`.
pub fn loss_mse(est: &ChannelMatrix, label: &ChannelMatrix) -> f64 {
    crate::estimators::mse(est, label)
}

/// Exact gradient of [`loss_mse`] composed with [`forward`].
pub fn backward(params: &ModelParams, feature: &ChannelMatrix, label: &ChannelMatrix, cfg: &OfdmConfig) -> Result<(f64, Vec<f64>)> {
    Net::new(params.clone(), cfg)?.backward(feature, label)
}
