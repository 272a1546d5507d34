//! Minibatch training loop.

use rand::seq::SliceRandom;
use rayon::prelude::*;

use super::{adam_step, AdamConfig, AdamState, ModelParams, Net, Placement};
use crate::dataset::{Dataset, DatasetSample};
use crate::rng::{self, stream};
use crate::{Error, Result};

/// Samples per gradient chunk. Chunks are summed in index order, so results
/// do not depend on the thread count.
const CHUNK: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub adam: AdamConfig,
    pub max_epochs: usize,
    pub initial_lr: f64,
    pub lr_drop_period: usize,
    pub lr_drop_factor: f64,
    pub minibatch: usize,
    pub l2: f64,
    pub seed: u64,
    pub placement: Placement,
    /// Parameters whose gradient is forced to zero.
    pub frozen: Option<Vec<bool>>,
    /// Starting point instead of a fresh initialization.
    pub init: Option<ModelParams>,
    /// Print one line per epoch to stderr.
    pub progress: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            adam: AdamConfig::default(),
            max_epochs: 100,
            initial_lr: 0.002,
            lr_drop_period: 20,
            lr_drop_factor: 0.5,
            minibatch: 128,
            l2: 0.0,
            seed: 0,
            placement: Placement::ResizeFirst,
            frozen: None,
            init: None,
            progress: false,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if self.minibatch == 0 {
            return bad("minibatch must be positive");
        }
        if self.lr_drop_period == 0 {
            return bad("lr drop period must be positive");
        }
        if !(self.initial_lr > 0.0 && self.initial_lr.is_finite()) {
            return bad("learning rate must be positive");
        }
        if !(self.lr_drop_factor > 0.0 && self.lr_drop_factor <= 1.0) {
            return bad("lr drop factor must be in (0, 1]");
        }
        if self.l2 < 0.0 {
            return bad("l2 must be non-negative");
        }
        if let Some(f) = &self.frozen {
            if f.len() != super::param_count() {
                return bad("frozen mask length differs from the parameter count");
            }
        }
        Ok(())
    }
}

/// `lr * factor^floor(epoch / period)`, epochs counted from 0.
pub fn lr_at(cfg: &TrainConfig, epoch: usize) -> f64 {
    cfg.initial_lr * cfg.lr_drop_factor.powi((epoch / cfg.lr_drop_period) as i32)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpochLog {
    pub epoch: usize,
    pub lr: f64,
    /// Mean minibatch loss over the epoch.
    pub train_mse: f64,
    pub val_mse: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrainLog {
    pub epochs: Vec<EpochLog>,
}

/// Summed loss and gradient over `samples`.
fn batch_gradient(net: &Net, samples: &[&DatasetSample]) -> Result<(f64, Vec<f64>)> {
    let n = net.params.theta.len();
    let parts: Vec<Result<(f64, Vec<f64>)>> = samples
        .par_chunks(CHUNK)
        .map_init(
            || net.workspace(),
            |ws, chunk| {
                let mut g = vec![0.0; n];
                let mut loss = 0.0;
                for s in chunk {
                    net.load_sample32(ws, &s.feature, &s.label)?;
                    net.run(ws);
                    loss += net.backprop(ws, &mut g);
                }
                Ok((loss, g))
            },
        )
        .collect();
    let mut total = vec![0.0; n];
    let mut loss = 0.0;
    for part in parts {
        let (l, g) = part?;
        loss += l;
        for (t, x) in total.iter_mut().zip(&g) {
            *t += x;
        }
    }
    Ok((loss, total))
}

/// Mean loss of `net` over `samples`.
pub fn dataset_mse(net: &Net, samples: &[DatasetSample]) -> Result<f64> {
    if samples.is_empty() {
        return Ok(0.0);
    }
    let parts: Vec<Result<f64>> = samples
        .par_chunks(CHUNK)
        .map_init(
            || net.workspace(),
            |ws, chunk| {
                let mut loss = 0.0;
                for s in chunk {
                    net.load_sample32(ws, &s.feature, &s.label)?;
                    net.run(ws);
                    loss += net.loss(ws);
                }
                Ok(loss)
            },
        )
        .collect();
    let mut total = 0.0;
    for p in parts {
        total += p?;
    }
    Ok(total / samples.len() as f64)
}

/// Train from scratch (or from `cfg.init`) and return the final-epoch weights.
pub fn train(dataset: &Dataset, cfg: &TrainConfig) -> Result<(ModelParams, TrainLog)> {
    cfg.validate()?;
    let train_set = dataset.train();
    if train_set.is_empty() {
        return Err(Error::Config("training set is empty".into()));
    }
    let ofdm = dataset.header.ofdm_config();
    let init = match &cfg.init {
        Some(p) => {
            if p.placement != cfg.placement {
                return Err(Error::Config("initial parameters use a different placement".into()));
            }
            p.clone()
        }
        None => ModelParams::glorot(cfg.placement, rng::derive(cfg.seed, stream::INIT)),
    };
    let mut net = Net::new(init, &ofdm)?;
    let mut state = AdamState::new(net.params.theta.len());
    let mut log = TrainLog::default();
    let mut order: Vec<usize> = (0..train_set.len()).collect();
    let shuffle_seed = rng::derive(cfg.seed, stream::SHUFFLE);

    for epoch in 0..cfg.max_epochs {
        let lr = lr_at(cfg, epoch);
        order.sort_unstable();
        order.shuffle(&mut rng::rng(rng::derive(shuffle_seed, epoch as u64)));
        let mut loss_sum = 0.0;
        for batch in order.chunks(cfg.minibatch) {
            let samples: Vec<&DatasetSample> = batch.iter().map(|&i| &train_set[i]).collect();
            let checkpoint = net.params.clone();
            let diverged = |epoch| Error::Diverged {
                epoch,
                last_finite: Box::new(checkpoint.clone()),
            };
            let (loss, mut grad) = batch_gradient(&net, &samples)?;
            if !loss.is_finite() {
                return Err(diverged(epoch));
            }
            let scale = 1.0 / samples.len() as f64;
            for (g, th) in grad.iter_mut().zip(&net.params.theta) {
                *g = *g * scale + cfg.l2 * th;
            }
            if let Some(mask) = &cfg.frozen {
                for (g, &f) in grad.iter_mut().zip(mask) {
                    if f {
                        *g = 0.0;
                    }
                }
            }
            if adam_step(&mut net.params, &grad, &mut state, lr, &cfg.adam).is_err() || net.params.check_finite().is_err() {
                return Err(diverged(epoch));
            }
            loss_sum += loss;
        }
        let train_mse = loss_sum / train_set.len() as f64;
        let val = dataset.validation();
        let val_mse = if val.is_empty() { None } else { Some(dataset_mse(&net, val)?) };
        if cfg.progress {
            match val_mse {
                Some(v) => eprintln!("epoch {epoch:>3}  lr {lr:.2e}  train {train_mse:.5}  val {v:.5}"),
                None => eprintln!("epoch {epoch:>3}  lr {lr:.2e}  train {train_mse:.5}"),
            }
        }
        log.epochs.push(EpochLog {
            epoch,
            lr,
            train_mse,
            val_mse,
        });
    }
    Ok((net.params, log))
}
