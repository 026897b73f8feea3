//! Task-failure prediction.
//!
//! A small feed-forward network maps (duration, prize, open tasks, average
//! similarity) to a failure probability. Features for the arrival day come
//! straight from the platform state; the next two days use the projected
//! open-task count and similarity.

mod network;
mod persist;
mod train;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Task, TaskCatalog, TaskStatus};
use crate::platform::{empirical_failure_ratio, ArrivalRateBasis, Background, DayOutOfRange, PlatformState};
use crate::similarity::{similarity, SimilarityKernel, SimilarityMatrix};

pub use network::{sigmoid, Gradients, Layer, Network};
pub use persist::{load_model, read_model, save_model, write_model, ModelFileError, MODEL_HEADER};
pub use train::{kfold_partition, train, TrainConfig, TrainError, TrainOutcome};

/// Layer widths: four inputs, five hidden layers, one output.
pub const DEFAULT_WIDTHS: [usize; 7] = [4, 32, 16, 8, 4, 2, 1];
pub const FEATURE_COUNT: usize = 4;
/// Candidate start offsets examined for each task: arrival day and the two after.
pub const LOOKAHEAD_DAYS: u32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TaskFeatures {
    pub duration: f64,
    pub prize: f64,
    pub open_tasks: f64,
    pub avg_similarity: f64,
}

impl TaskFeatures {
    pub fn to_array(self) -> [f64; FEATURE_COUNT] {
        [self.duration, self.prize, self.open_tasks, self.avg_similarity]
    }

    pub fn from_array(a: [f64; FEATURE_COUNT]) -> Self {
        TaskFeatures { duration: a[0], prize: a[1], open_tasks: a[2], avg_similarity: a[3] }
    }
}

/// Which prize figure feeds the network.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PrizeFeature {
    /// Monetary prize (MP).
    #[default]
    Monetary,
    /// Winner plus runner-up prize (TMP), falling back to MP when absent.
    Total,
}

impl PrizeFeature {
    pub fn of(self, task: &Task) -> f64 {
        match self {
            PrizeFeature::Monetary => task.prize,
            PrizeFeature::Total => task.total_prize.unwrap_or(task.prize),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            PrizeFeature::Monetary => "MP",
            PrizeFeature::Total => "TMP",
        }
    }
}

impl std::str::FromStr for PrizeFeature {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_uppercase().as_str() {
            "MP" | "MONETARY" => Ok(PrizeFeature::Monetary),
            "TMP" | "TOTAL" => Ok(PrizeFeature::Total),
            other => Err(format!("unknown prize feature {other:?}")),
        }
    }
}

/// Per-feature min-max scaling fitted on training data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureScaler {
    pub min: [f64; FEATURE_COUNT],
    pub max: [f64; FEATURE_COUNT],
}

impl FeatureScaler {
    pub fn identity() -> Self {
        FeatureScaler { min: [0.0; FEATURE_COUNT], max: [1.0; FEATURE_COUNT] }
    }

    pub fn fit<'a>(rows: impl IntoIterator<Item = &'a [f64; FEATURE_COUNT]>) -> Self {
        let mut min = [f64::INFINITY; FEATURE_COUNT];
        let mut max = [f64::NEG_INFINITY; FEATURE_COUNT];
        let mut any = false;
        for row in rows {
            any = true;
            for k in 0..FEATURE_COUNT {
                min[k] = min[k].min(row[k]);
                max[k] = max[k].max(row[k]);
            }
        }
        if !any {
            return FeatureScaler::identity();
        }
        FeatureScaler { min, max }
    }

    /// Scales into `[0, 1]`, clamping values outside the fitted range. A
    /// constant feature maps to 0.5.
    pub fn normalize(&self, x: &[f64; FEATURE_COUNT]) -> [f64; FEATURE_COUNT] {
        let mut out = [0.0; FEATURE_COUNT];
        for k in 0..FEATURE_COUNT {
            let span = self.max[k] - self.min[k];
            out[k] = if span <= 0.0 { 0.5 } else { ((x[k] - self.min[k]) / span).clamp(0.0, 1.0) };
        }
        out
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum PredictError {
    #[error("feature {index} is not finite ({value})")]
    NonFinite { index: usize, value: f64 },
    #[error(transparent)]
    OutOfRange(#[from] DayOutOfRange),
    #[error("model returned {0}, which is not a probability")]
    BadOutput(f64),
}

/// Anything that turns task features into a failure probability.
pub trait FailureModel: Sync {
    fn predict(&self, features: &TaskFeatures) -> Result<f64, PredictError>;

    fn prize_feature(&self) -> PrizeFeature {
        PrizeFeature::Monetary
    }
}

impl<F> FailureModel for F
where
    F: Fn(&TaskFeatures) -> f64 + Sync,
{
    fn predict(&self, features: &TaskFeatures) -> Result<f64, PredictError> {
        Ok(self(features))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictorModel {
    pub network: Network,
    pub scaler: FeatureScaler,
    pub prize_feature: PrizeFeature,
    /// Epochs of the final training run.
    pub epochs: usize,
    /// Mean cross-validation loss recorded at training time.
    pub validation_loss: f64,
}

impl PredictorModel {
    pub fn new(network: Network, scaler: FeatureScaler) -> Self {
        PredictorModel { network, scaler, prize_feature: PrizeFeature::Monetary, epochs: 0, validation_loss: f64::NAN }
    }

    /// All weights and biases zero: predicts 0.5 everywhere.
    pub fn zeros() -> Self {
        Self::new(Network::zeros(&DEFAULT_WIDTHS), FeatureScaler::identity())
    }

    pub fn forward(&self, features: &TaskFeatures) -> Result<f64, PredictError> {
        let raw = features.to_array();
        if let Some((index, &value)) = raw.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(PredictError::NonFinite { index, value });
        }
        Ok(self.network.forward(&self.scaler.normalize(&raw)))
    }
}

impl FailureModel for PredictorModel {
    fn predict(&self, features: &TaskFeatures) -> Result<f64, PredictError> {
        self.forward(features)
    }

    fn prize_feature(&self) -> PrizeFeature {
        self.prize_feature
    }
}

/// A project task seen by the platform: its similarity row and its record.
#[derive(Debug, Clone, Copy)]
pub struct Probe<'t> {
    pub row: usize,
    pub task: &'t Task,
}

/// Features for a task arriving on `arrival` and evaluated `delta` days
/// later. `delta == 0` uses the day's own counts; later days use projections
/// made from the arrival day.
pub fn features_for_day(
    probe: Probe<'_>,
    arrival: i64,
    delta: u32,
    state: &PlatformState<'_>,
    sim: &SimilarityMatrix,
    prize: PrizeFeature,
) -> Result<TaskFeatures, PredictError> {
    state.check_day(arrival + delta as i64)?;
    let (open_tasks, avg_similarity) = if delta == 0 {
        let snap = state.snapshot(arrival, probe.row, sim);
        (snap.open_tasks as f64, snap.avg_similarity)
    } else {
        state.projection(arrival, delta, probe.row, sim)
    };
    Ok(TaskFeatures {
        duration: probe.task.duration() as f64,
        prize: prize.of(probe.task),
        open_tasks,
        avg_similarity,
    })
}

pub fn predict_for_day<M: FailureModel + ?Sized>(
    model: &M,
    probe: Probe<'_>,
    arrival: i64,
    delta: u32,
    state: &PlatformState<'_>,
    sim: &SimilarityMatrix,
) -> Result<f64, PredictError> {
    let features = features_for_day(probe, arrival, delta, state, sim, model.prize_feature())?;
    model.predict(&features)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StartChoice {
    pub day: i64,
    pub probability: f64,
    /// Predicted probability for each candidate day, in day order.
    pub candidates: Vec<f64>,
}

/// Lowest-risk start among day `d` and the next two, earliest on ties. The
/// window is cut at the platform horizon.
pub fn best_start_day<M: FailureModel + ?Sized>(
    model: &M,
    probe: Probe<'_>,
    day: i64,
    state: &PlatformState<'_>,
    sim: &SimilarityMatrix,
) -> Result<StartChoice, PredictError> {
    state.check_day(day)?;
    let last = (day + LOOKAHEAD_DAYS as i64).min(state.horizon());
    let candidates = (0..=(last - day) as u32)
        .map(|delta| predict_for_day(model, probe, day, delta, state, sim))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(choose_earliest_minimum(day, candidates))
}

/// Argmin with ties going to the earliest day.
pub fn choose_earliest_minimum(day: i64, candidates: Vec<f64>) -> StartChoice {
    let mut best = 0;
    for (i, &p) in candidates.iter().enumerate().skip(1) {
        if p < candidates[best] {
            best = i;
        }
    }
    StartChoice { day: day + best as i64, probability: candidates[best], candidates }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainingSample {
    pub features: [f64; FEATURE_COUNT],
    pub label: f64,
}

/// How training labels are derived from historical outcomes.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LabelMode {
    /// Empirical failure ratio of the tasks open on the arrival day.
    #[default]
    DayRatio,
    /// 1 for a failed task, 0 for a completed one.
    TaskStatus,
}

impl std::str::FromStr for LabelMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "day-ratio" | "ratio" => Ok(LabelMode::DayRatio),
            "task-status" | "status" | "binary" => Ok(LabelMode::TaskStatus),
            other => Err(format!("unknown label mode {other:?}")),
        }
    }
}

/// One sample per historical task at its real arrival day, replaying the
/// whole catalog as the platform.
pub fn build_training_samples(
    catalog: &TaskCatalog,
    kernel: SimilarityKernel,
    labels: LabelMode,
    prize: PrizeFeature,
) -> Vec<TrainingSample> {
    let tasks = &catalog.tasks;
    let horizon = tasks.iter().map(|t| t.registration_end).max().unwrap_or(0);
    let replay = Background::from_tasks(tasks, 0, 0, horizon);
    let state = PlatformState::new(Vec::new(), Some(&replay), horizon, ArrivalRateBasis::TaskDuration);
    tasks
        .iter()
        .enumerate()
        .map(|(i, task)| {
            let day = task.registration_start;
            let open = state.open_set(day, Some(i));
            let avg = if open.is_empty() {
                0.0
            } else {
                open.iter().map(|p| similarity(task, &tasks[p.column], &catalog.norms, kernel)).sum::<f64>()
                    / open.len() as f64
            };
            let label = match labels {
                LabelMode::DayRatio => empirical_failure_ratio(&open),
                LabelMode::TaskStatus => match task.status {
                    TaskStatus::Failed => 1.0,
                    TaskStatus::Completed => 0.0,
                },
            };
            TrainingSample {
                features: [task.duration() as f64, prize.of(task), open.len() as f64, avg],
                label,
            }
        })
        .collect()
}
