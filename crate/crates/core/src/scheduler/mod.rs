//! Multi-objective evolutionary scheduling (NSGA-II).
//!
//! A chromosome holds one start day per project task. Dependency repair keeps
//! every chromosome feasible; similarity repair then postpones clashing
//! parallel tasks to produce the schedule that is actually evaluated. The
//! three objectives are project duration, the relative duration added by
//! similarity repair, and the mean predicted failure probability.

mod fitness;
mod operators;
mod pareto;
mod repair;
mod report;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::predictor::{FailureModel, PredictError};

pub use fitness::{Evaluation, Evaluator, Fitness, TaskDiagnostic};
pub use operators::{crossover_at, crossover_two_point, init_population, mutate_shuffle, random_chromosome, shuffle_genes};
pub use pareto::{
    crowded_cmp, crowding_distance, dominates, fast_nondominated_sort, hypervolume, nondominated, ranks,
    reference_point, weakly_dominates, Objectives, Ranking, OBJECTIVES,
};
pub use repair::{
    latest_starts, repair_dependencies, repair_similarity, similarity_conflicts, SimilarityBand, SimilarityRepair,
};
pub use report::{
    schedule_acceleration, write_diagnostics_csv, write_front_csv, write_plot_data, AccelerationError, PlotAxis,
    ResultDocument, RESULT_FORMAT,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GAConfig {
    pub population: usize,
    pub generations: usize,
    pub crossover_rate: f64,
    /// Chance that an offspring chromosome is varied at all.
    pub mutation_rate: f64,
    pub tournament_size: usize,
    pub seed: u64,
    pub band: SimilarityBand,
    /// Similarity repair and the similarity-cost objective.
    pub similarity: bool,
    /// Independent runs with seeds `seed, seed + 1, ...`; fronts are merged.
    pub runs: usize,
}

impl Default for GAConfig {
    fn default() -> Self {
        GAConfig {
            population: 100,
            generations: 200,
            crossover_rate: 0.9,
            mutation_rate: 0.1,
            tournament_size: 2,
            seed: 0,
            band: SimilarityBand::default(),
            similarity: true,
            runs: 1,
        }
    }
}

impl GAConfig {
    pub fn validate(&self) -> Result<(), ScheduleError> {
        let bad = |m: String| Err(ScheduleError::Config(m));
        if self.population < 4 || self.population % 2 != 0 {
            return bad(format!("population must be even and at least 4, got {}", self.population));
        }
        for (name, p) in [("crossover rate", self.crossover_rate), ("mutation rate", self.mutation_rate)] {
            if !(0.0..=1.0).contains(&p) {
                return bad(format!("{name} must lie in [0, 1], got {p}"));
            }
        }
        if self.tournament_size < 1 {
            return bad("tournament size must be at least 1".into());
        }
        if self.runs < 1 {
            return bad("at least one run is required".into());
        }
        if !(self.band.tolerance >= 0.0 && self.band.target.is_finite()) {
            return bad(format!("bad similarity band {:?}", self.band));
        }
        Ok(())
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ScheduleError {
    #[error("invalid scheduler configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Predict(#[from] PredictError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Individual {
    /// Dependency-repaired chromosome.
    pub genes: Vec<u32>,
    pub evaluation: Evaluation,
}

impl Individual {
    pub fn objectives(&self) -> Objectives {
        self.evaluation.fitness.objectives()
    }

    pub fn violations(&self) -> usize {
        self.evaluation.conflicts
    }
}

/// One member of the returned front.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub genes: Vec<u32>,
    pub starts: Vec<u32>,
    pub fitness: Fitness,
    /// Similarity conflicts left in `starts`.
    pub conflicts: usize,
    pub diagnostics: Vec<TaskDiagnostic>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationStats {
    pub run: usize,
    pub generation: usize,
    pub front_size: usize,
    pub best_duration: u32,
    pub best_similarity_cost: f64,
    pub best_failure: f64,
    pub hypervolume: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParetoResult {
    /// Fingerprint of the scheduled project.
    pub project: String,
    pub task_ids: Vec<String>,
    pub front: Vec<Solution>,
    pub generations: Vec<GenerationStats>,
    /// Reference point of the per-generation hypervolumes.
    pub reference_point: Objectives,
    pub evaluations: usize,
}

impl ParetoResult {
    /// Shortest schedule; ties go to lower similarity cost, then lower risk.
    pub fn recommended(&self) -> Option<&Solution> {
        self.front.first()
    }
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

// Generation 0 is initialization; pair `k` of generation `g` owns stream
// `g << 32 | k`, so results do not depend on evaluation order.
fn stream(generation: usize, slot: usize) -> u64 {
    ((generation as u64) << 32) | slot as u64
}

struct RunTrace {
    population: Vec<Individual>,
    fronts: Vec<Vec<Objectives>>,
    worst: Objectives,
    evaluations: usize,
}

fn evaluate_all<M: FailureModel + ?Sized>(
    ev: &Evaluator<'_, M>,
    genes: Vec<Vec<u32>>,
) -> Result<Vec<Individual>, ScheduleError> {
    genes
        .into_par_iter()
        .map(|g| {
            let evaluation = ev.evaluate(&g)?;
            Ok(Individual { genes: g, evaluation })
        })
        .collect()
}

fn ranking(pop: &[Individual]) -> Ranking {
    let points: Vec<Objectives> = pop.iter().map(Individual::objectives).collect();
    let violations: Vec<usize> = pop.iter().map(Individual::violations).collect();
    Ranking::constrained(&points, &violations)
}

fn first_front(pop: &[Individual]) -> Vec<usize> {
    ranking(pop).fronts.into_iter().next().unwrap_or_default()
}

fn run_once<M: FailureModel + ?Sized>(ev: &Evaluator<'_, M>, config: &GAConfig, seed: u64) -> Result<RunTrace, ScheduleError> {
    let project = ev.project();
    let mu = config.population;
    let latest = ev.latest_starts();

    let mut genes = vec![project.earliest_starts()];
    genes.extend((1..mu).map(|k| random_chromosome(project, latest, &mut rng_for(seed, stream(0, k)))));
    let mut population = evaluate_all(ev, genes)?;
    let mut evaluations = population.len();
    let mut worst = [f64::NEG_INFINITY; OBJECTIVES];
    let mut track = |pop: &[Individual]| {
        for ind in pop {
            let o = ind.objectives();
            for k in 0..OBJECTIVES {
                worst[k] = worst[k].max(o[k]);
            }
        }
    };
    track(&population);
    let mut fronts = vec![first_front(&population).iter().map(|&i| population[i].objectives()).collect()];

    for generation in 1..=config.generations {
        let ranked = ranking(&population);
        let children: Vec<Vec<u32>> = (0..mu / 2)
            .into_par_iter()
            .flat_map_iter(|k| {
                let mut rng = rng_for(seed, stream(generation, k));
                let a = &population[ranked.tournament(config.tournament_size, &mut rng)].genes;
                let b = &population[ranked.tournament(config.tournament_size, &mut rng)].genes;
                let (mut ca, mut cb) = if rng.gen_bool(config.crossover_rate) {
                    crossover_two_point(a, b, &mut rng)
                } else {
                    (a.clone(), b.clone())
                };
                for child in [&mut ca, &mut cb] {
                    mutate_shuffle(child, config.mutation_rate, &mut rng);
                    ev.repair(child);
                }
                [ca, cb]
            })
            .collect();
        let offspring = evaluate_all(ev, children)?;
        evaluations += offspring.len();
        track(&offspring);

        let mut pool = std::mem::take(&mut population);
        pool.extend(offspring);
        let keep = ranking(&pool).survivors(mu);
        let mut slots: Vec<Option<Individual>> = pool.into_iter().map(Some).collect();
        population = keep.iter().map(|&i| slots[i].take().expect("survivor chosen once")).collect();
        fronts.push(first_front(&population).iter().map(|&i| population[i].objectives()).collect());
    }
    Ok(RunTrace { population, fronts, worst, evaluations })
}

/// Runs the evolutionary search and returns the non-dominated schedules
/// found, with diagnostics and per-generation statistics. Deterministic for
/// a given seed regardless of the thread count.
pub fn evolve<M: FailureModel + ?Sized>(ev: &Evaluator<'_, M>, config: &GAConfig) -> Result<ParetoResult, ScheduleError> {
    config.validate()?;
    let traces = (0..config.runs)
        .map(|r| run_once(ev, config, config.seed.wrapping_add(r as u64)))
        .collect::<Result<Vec<_>, _>>()?;

    let mut worst = [f64::NEG_INFINITY; OBJECTIVES];
    for t in &traces {
        for k in 0..OBJECTIVES {
            worst[k] = worst[k].max(t.worst[k]);
        }
    }
    let reference = reference_point([&worst]);

    let mut generations = Vec::new();
    for (run, t) in traces.iter().enumerate() {
        for (generation, front) in t.fronts.iter().enumerate() {
            let best = |k: usize| front.iter().map(|o| o[k]).fold(f64::INFINITY, f64::min);
            generations.push(GenerationStats {
                run,
                generation,
                front_size: front.len(),
                best_duration: best(0) as u32,
                best_similarity_cost: best(1),
                best_failure: best(2),
                hypervolume: hypervolume(front, &reference),
            });
        }
    }

    let candidates: Vec<&Individual> = traces
        .iter()
        .flat_map(|t| first_front(&t.population).into_iter().map(move |i| &t.population[i]))
        .collect();
    // Only the least-violating candidates compete for the merged front.
    let level = candidates.iter().map(|c| c.violations()).min().unwrap_or(0);
    let candidates: Vec<&Individual> = candidates.into_iter().filter(|c| c.violations() == level).collect();
    let points: Vec<Objectives> = candidates.iter().map(|c| c.objectives()).collect();
    let mut members: Vec<&Individual> = nondominated(&points).into_iter().map(|i| candidates[i]).collect();
    members.sort_by(|a, b| {
        let (x, y) = (a.objectives(), b.objectives());
        x[0].total_cmp(&y[0])
            .then(x[1].total_cmp(&y[1]))
            .then(x[2].total_cmp(&y[2]))
            .then_with(|| a.evaluation.starts.cmp(&b.evaluation.starts))
    });
    // Schedules with identical objectives collapse to the earliest one.
    members.dedup_by(|b, a| a.objectives() == b.objectives());
    let front = members
        .into_iter()
        .map(|m| {
            Ok(Solution {
                genes: m.genes.clone(),
                starts: m.evaluation.starts.clone(),
                fitness: m.evaluation.fitness,
                conflicts: m.evaluation.conflicts,
                diagnostics: ev.diagnostics(&m.evaluation.starts)?,
            })
        })
        .collect::<Result<Vec<_>, ScheduleError>>()?;

    let project = ev.project();
    Ok(ParetoResult {
        project: project.fingerprint(),
        task_ids: project.tasks().iter().map(|t| t.id.clone()).collect(),
        front,
        generations,
        reference_point: reference,
        evaluations: traces.iter().map(|t| t.evaluations).sum(),
    })
}
