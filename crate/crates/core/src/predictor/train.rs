//! K-fold cross-validated mini-batch gradient descent with early stopping.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::network::{Gradients, Network};
use super::{FeatureScaler, PredictorModel, PrizeFeature, TrainingSample, DEFAULT_WIDTHS, FEATURE_COUNT};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub folds: usize,
    pub max_epochs: usize,
    pub patience: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub seed: u64,
    pub widths: Vec<usize>,
    pub prize_feature: PrizeFeature,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            folds: 10,
            max_epochs: 500,
            patience: 10,
            learning_rate: 0.01,
            batch_size: 32,
            seed: 0,
            widths: DEFAULT_WIDTHS.to_vec(),
            prize_feature: PrizeFeature::Monetary,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), TrainError> {
        let bad = |msg: String| Err(TrainError::Config(msg));
        if self.folds < 2 {
            return bad(format!("folds must be at least 2, got {}", self.folds));
        }
        if self.patience < 1 {
            return bad("patience must be at least 1".into());
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad(format!("learning rate must be positive, got {}", self.learning_rate));
        }
        if self.batch_size < 1 || self.max_epochs < 1 {
            return bad("batch size and epoch budget must be positive".into());
        }
        if self.widths.len() < 2 || self.widths[0] != FEATURE_COUNT || *self.widths.last().unwrap() != 1 {
            return bad(format!("layer widths must run from {FEATURE_COUNT} inputs to 1 output, got {:?}", self.widths));
        }
        Ok(())
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum TrainError {
    #[error("invalid training configuration: {0}")]
    Config(String),
    #[error("{samples} samples cannot be split into {folds} folds")]
    TooFewSamples { samples: usize, folds: usize },
    #[error("training diverged at epoch {epoch} (fold {fold:?}): loss is not finite")]
    Diverged { epoch: usize, fold: Option<usize> },
    #[error("sample {index} has a non-finite feature or a label outside [0, 1]")]
    BadSample { index: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainOutcome {
    pub model: PredictorModel,
    /// Best validation MSE of each fold.
    pub fold_losses: Vec<f64>,
    /// Early-stopped epoch count of each fold.
    pub fold_epochs: Vec<usize>,
    pub mean_loss: f64,
    pub std_loss: f64,
}

/// Shuffles sample indices with `seed` and deals them into `folds`
/// contiguous, near-equal validation folds.
pub fn kfold_partition(samples: usize, folds: usize, seed: u64) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = (0..samples).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let base = samples / folds;
    let extra = samples % folds;
    let mut out = Vec::with_capacity(folds);
    let mut pos = 0;
    for k in 0..folds {
        let len = base + usize::from(k < extra);
        out.push(order[pos..pos + len].to_vec());
        pos += len;
    }
    out
}

struct FitResult {
    network: Network,
    best_loss: f64,
    best_epoch: usize,
}

fn fold_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

const MAX_REDRAWS: usize = 100;

/// Draws initial weights, redrawing while some hidden layer would start out
/// inactive on every training input.
fn initial_network(config: &TrainConfig, train: &[([f64; FEATURE_COUNT], f64)], rng: &mut ChaCha8Rng) -> Network {
    let xs: Vec<&[f64]> = train.iter().map(|(x, _)| x.as_slice()).collect();
    let mut net = Network::new(&config.widths, rng);
    for _ in 0..MAX_REDRAWS {
        if !net.has_dead_layer(&xs) {
            break;
        }
        net = Network::new(&config.widths, rng);
    }
    net
}

const MAX_RESTARTS: usize = 5;

/// [`fit_once`], restarted from fresh weights while the result has collapsed:
/// a hidden layer that no training input activates, or a loss no better than
/// always predicting the mean training label. The best attempt is kept.
fn fit(
    config: &TrainConfig,
    train: &[([f64; FEATURE_COUNT], f64)],
    validation: Option<&[([f64; FEATURE_COUNT], f64)]>,
    epochs: usize,
    rng: &mut ChaCha8Rng,
    fold: Option<usize>,
) -> Result<FitResult, TrainError> {
    let xs: Vec<&[f64]> = train.iter().map(|(x, _)| x.as_slice()).collect();
    let mean = train.iter().map(|(_, y)| y).sum::<f64>() / train.len() as f64;
    let judged = validation.unwrap_or(train);
    let baseline = judged.iter().map(|(_, y)| (y - mean).powi(2)).sum::<f64>() / judged.len().max(1) as f64;
    let collapsed = |r: &FitResult| r.network.has_dead_layer(&xs) || r.best_loss >= 0.99 * baseline;

    let mut best = fit_once(config, train, validation, epochs, rng, fold)?;
    for _ in 0..MAX_RESTARTS {
        if !collapsed(&best) {
            break;
        }
        let next = fit_once(config, train, validation, epochs, rng, fold)?;
        if next.best_loss < best.best_loss {
            best = next;
        }
    }
    Ok(best)
}

/// Gradient descent on `train`; with `validation` present, keeps the
/// best-validating weights and stops after `patience` epochs without
/// improvement.
fn fit_once(
    config: &TrainConfig,
    train: &[([f64; FEATURE_COUNT], f64)],
    validation: Option<&[([f64; FEATURE_COUNT], f64)]>,
    epochs: usize,
    rng: &mut ChaCha8Rng,
    fold: Option<usize>,
) -> Result<FitResult, TrainError> {
    let mut net = initial_network(config, train, rng);
    let mut grads = Gradients::zeros_like(&net);
    let mut order: Vec<usize> = (0..train.len()).collect();
    let mut best = FitResult { network: net.clone(), best_loss: f64::INFINITY, best_epoch: 0 };
    let val_x: Vec<&[f64]> = validation.unwrap_or(&[]).iter().map(|(x, _)| x.as_slice()).collect();
    let val_y: Vec<f64> = validation.unwrap_or(&[]).iter().map(|(_, y)| *y).collect();

    let mut batch_x: Vec<&[f64]> = Vec::with_capacity(config.batch_size);
    let mut batch_y: Vec<f64> = Vec::with_capacity(config.batch_size);
    for epoch in 1..=epochs {
        order.shuffle(rng);
        for chunk in order.chunks(config.batch_size) {
            batch_x.clear();
            batch_y.clear();
            for &i in chunk {
                batch_x.push(&train[i].0);
                batch_y.push(train[i].1);
            }
            let loss = net.batch_gradients(&batch_x, &batch_y, &mut grads);
            if !loss.is_finite() {
                return Err(TrainError::Diverged { epoch, fold });
            }
            net.apply_gradients(&grads, config.learning_rate);
        }
        if validation.is_none() {
            continue;
        }
        let val_loss = net.mse(&val_x, &val_y);
        if !val_loss.is_finite() {
            return Err(TrainError::Diverged { epoch, fold });
        }
        if val_loss < best.best_loss {
            best = FitResult { network: net.clone(), best_loss: val_loss, best_epoch: epoch };
        } else if epoch - best.best_epoch >= config.patience {
            break;
        }
    }
    if validation.is_none() {
        let all_x: Vec<&[f64]> = train.iter().map(|(x, _)| x.as_slice()).collect();
        let all_y: Vec<f64> = train.iter().map(|(_, y)| *y).collect();
        let loss = net.mse(&all_x, &all_y);
        if !loss.is_finite() {
            return Err(TrainError::Diverged { epoch: epochs, fold });
        }
        return Ok(FitResult { network: net, best_loss: loss, best_epoch: epochs });
    }
    Ok(best)
}

fn scaled(samples: &[TrainingSample], idx: &[usize], scaler: &FeatureScaler) -> Vec<([f64; FEATURE_COUNT], f64)> {
    idx.iter().map(|&i| (scaler.normalize(&samples[i].features), samples[i].label)).collect()
}

/// Cross-validates, then retrains on every sample for the mean early-stopped
/// epoch count. Folds run in parallel; each has its own RNG stream, so the
/// result does not depend on the thread count.
pub fn train(samples: &[TrainingSample], config: &TrainConfig) -> Result<TrainOutcome, TrainError> {
    config.validate()?;
    if samples.len() < config.folds {
        return Err(TrainError::TooFewSamples { samples: samples.len(), folds: config.folds });
    }
    if let Some(index) = samples
        .iter()
        .position(|s| s.features.iter().any(|v| !v.is_finite()) || !(0.0..=1.0).contains(&s.label))
    {
        return Err(TrainError::BadSample { index });
    }

    let folds = kfold_partition(samples.len(), config.folds, config.seed);
    let results: Vec<Result<FitResult, TrainError>> = folds
        .par_iter()
        .enumerate()
        .map(|(k, val_idx)| {
            let mut in_val = vec![false; samples.len()];
            val_idx.iter().for_each(|&i| in_val[i] = true);
            let train_idx: Vec<usize> = (0..samples.len()).filter(|&i| !in_val[i]).collect();
            let scaler = FeatureScaler::fit(train_idx.iter().map(|&i| &samples[i].features));
            let train_set = scaled(samples, &train_idx, &scaler);
            let val_set = scaled(samples, val_idx, &scaler);
            let mut rng = fold_rng(config.seed, k as u64 + 1);
            fit(config, &train_set, Some(&val_set), config.max_epochs, &mut rng, Some(k))
        })
        .collect();
    let results = results.into_iter().collect::<Result<Vec<_>, _>>()?;

    let fold_losses: Vec<f64> = results.iter().map(|r| r.best_loss).collect();
    let fold_epochs: Vec<usize> = results.iter().map(|r| r.best_epoch.max(1)).collect();
    let mean_loss = fold_losses.iter().sum::<f64>() / fold_losses.len() as f64;
    let var = fold_losses.iter().map(|l| (l - mean_loss).powi(2)).sum::<f64>() / fold_losses.len() as f64;
    let budget = (fold_epochs.iter().sum::<usize>() as f64 / fold_epochs.len() as f64).round().max(1.0) as usize;

    let all: Vec<usize> = (0..samples.len()).collect();
    let scaler = FeatureScaler::fit(samples.iter().map(|s| &s.features));
    let full = scaled(samples, &all, &scaler);
    let mut rng = fold_rng(config.seed, 0);
    let final_fit = fit(config, &full, None, budget, &mut rng, None)?;

    let model = PredictorModel {
        network: final_fit.network,
        scaler,
        prize_feature: config.prize_feature,
        epochs: budget,
        validation_loss: mean_loss,
    };
    Ok(TrainOutcome { model, fold_losses, fold_epochs, mean_loss, std_loss: var.sqrt() })
}
