//! Three-objective evaluation of a chromosome.

use serde::{Deserialize, Serialize};

use super::pareto::Objectives;
use super::repair::{latest_starts, repair_similarity_with_latest, repair_with_latest, similarity_conflicts, SimilarityBand};
use crate::model::{project_duration, Project};
use crate::platform::{ArrivalRateBasis, Background, PlatformState};
use crate::predictor::{best_start_day, FailureModel, PredictError, Probe, LOOKAHEAD_DAYS};
use crate::similarity::SimilarityMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Fitness {
    /// Project span in days.
    pub duration: u32,
    /// Relative duration added by similarity postponements.
    pub similarity_cost: f64,
    /// Mean predicted failure probability over the project's tasks.
    pub failure: f64,
}

impl Fitness {
    pub fn objectives(&self) -> Objectives {
        [self.duration as f64, self.similarity_cost, self.failure]
    }
}

/// Per-task view of an evaluated schedule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskDiagnostic {
    pub task_id: String,
    pub start: u32,
    /// Lowest-risk day among the start and the two days after it.
    pub chosen_day: u32,
    pub failure: f64,
    pub open_tasks: usize,
    pub avg_similarity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    /// Start days after similarity repair (equal to the genes when it is off).
    pub starts: Vec<u32>,
    pub fitness: Fitness,
    /// Out-of-band overlapping pairs the similarity repair could not separate.
    pub conflicts: usize,
}

/// Evaluates chromosomes of one project against one failure model.
///
/// The similarity table has one row per project task; its first columns are
/// the project tasks in order and any further columns are background tasks.
pub struct Evaluator<'a, M: ?Sized> {
    project: &'a Project,
    sim: &'a SimilarityMatrix,
    model: &'a M,
    background: Option<&'a Background>,
    basis: ArrivalRateBasis,
    band: SimilarityBand,
    similarity_enabled: bool,
    latest: Vec<u32>,
    valid_submissions: Vec<u32>,
}

impl<'a, M: FailureModel + ?Sized> Evaluator<'a, M> {
    pub fn new(project: &'a Project, sim: &'a SimilarityMatrix, model: &'a M) -> Self {
        assert!(
            sim.rows() >= project.len() && sim.cols() >= project.len(),
            "similarity table must cover every project task"
        );
        Evaluator {
            project,
            sim,
            model,
            background: None,
            basis: ArrivalRateBasis::default(),
            band: SimilarityBand::default(),
            similarity_enabled: true,
            latest: latest_starts(project),
            valid_submissions: project.tasks().iter().map(|t| t.valid_submissions).collect(),
        }
    }

    pub fn with_background(mut self, background: Option<&'a Background>) -> Self {
        self.background = background;
        self
    }

    pub fn with_basis(mut self, basis: ArrivalRateBasis) -> Self {
        self.basis = basis;
        self
    }

    pub fn with_band(mut self, band: SimilarityBand) -> Self {
        self.band = band;
        self
    }

    /// With similarity handling off, no postponement happens and the cost
    /// objective is always zero.
    pub fn with_similarity(mut self, enabled: bool) -> Self {
        self.similarity_enabled = enabled;
        self
    }

    pub fn project(&self) -> &'a Project {
        self.project
    }

    pub fn similarity_enabled(&self) -> bool {
        self.similarity_enabled
    }

    pub fn latest_starts(&self) -> &[u32] {
        &self.latest
    }

    /// Platform days run past the gene bound so the three-day lookahead is
    /// never cut short.
    pub fn platform_horizon(&self) -> i64 {
        (self.project.max_horizon() + LOOKAHEAD_DAYS) as i64
    }

    pub fn repair(&self, genes: &mut [u32]) {
        repair_with_latest(genes, self.project, &self.latest);
    }

    fn state(&self, starts: &[u32]) -> PlatformState<'a> {
        PlatformState::for_schedule(
            starts,
            self.project.windows(),
            self.project.durations(),
            &self.valid_submissions,
            self.background,
            self.platform_horizon(),
            self.basis,
        )
    }

    /// Start days after similarity repair, plus the number of conflicts left.
    pub fn phenotype(&self, genes: &[u32]) -> (Vec<u32>, usize) {
        let mut starts = genes.to_vec();
        repair_with_latest(&mut starts, self.project, &self.latest);
        if !self.similarity_enabled {
            return (starts, 0);
        }
        repair_similarity_with_latest(&mut starts, self.project, self.sim, self.band, &self.latest);
        let left = similarity_conflicts(&starts, self.project, self.sim, self.band).len();
        (starts, left)
    }

    /// `genes` must already satisfy the dependencies.
    pub fn evaluate(&self, genes: &[u32]) -> Result<Evaluation, PredictError> {
        debug_assert!(self.project.satisfies_dependencies(genes));
        let (starts, conflicts) = self.phenotype(genes);
        let base = project_duration(self.project, genes);
        let duration = project_duration(self.project, &starts);
        let similarity_cost = if self.similarity_enabled {
            (duration - base) as f64 / base.max(1) as f64
        } else {
            0.0
        };
        let state = self.state(&starts);
        let mut total = 0.0;
        for (i, task) in self.project.tasks().iter().enumerate() {
            let choice = best_start_day(self.model, Probe { row: i, task }, starts[i] as i64, &state, self.sim)?;
            total += checked_probability(choice.probability)?;
        }
        let failure = total / self.project.len() as f64;
        Ok(Evaluation { starts, fitness: Fitness { duration, similarity_cost, failure }, conflicts })
    }

    /// Per-task diagnostics for final start days.
    pub fn diagnostics(&self, starts: &[u32]) -> Result<Vec<TaskDiagnostic>, PredictError> {
        let state = self.state(starts);
        self.project
            .tasks()
            .iter()
            .enumerate()
            .map(|(i, task)| {
                let day = starts[i] as i64;
                let choice = best_start_day(self.model, Probe { row: i, task }, day, &state, self.sim)?;
                let snap = state.snapshot(day, i, self.sim);
                Ok(TaskDiagnostic {
                    task_id: task.id.clone(),
                    start: starts[i],
                    chosen_day: choice.day as u32,
                    failure: choice.probability,
                    open_tasks: snap.open_tasks,
                    avg_similarity: snap.avg_similarity,
                })
            })
            .collect()
    }
}

fn checked_probability(p: f64) -> Result<f64, PredictError> {
    if !p.is_finite() {
        return Err(PredictError::BadOutput(p));
    }
    Ok(p.clamp(0.0, 1.0))
}
