//! Exhaustive ground truth for small projects.
//!
//! Every dependency-feasible chromosome in `[0, max_horizon]^n` is evaluated
//! with the scheduler's own evaluator and filtered to the non-dominated set,
//! which the evolved front can then be measured against.

use std::io::{self, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::Project;
use crate::predictor::{FailureModel, PredictError};
use crate::scheduler::{hypervolume, latest_starts, reference_point, Evaluator, Fitness, Objectives, ParetoResult, OBJECTIVES};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleLimits {
    pub max_tasks: usize,
    pub max_horizon: u32,
    /// Upper bound on the estimated number of schedules to enumerate.
    pub max_schedules: u64,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits { max_tasks: 8, max_horizon: 15, max_schedules: 10_000_000 }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("project has {tasks} tasks; exhaustive search allows at most {limit}")]
    TooManyTasks { tasks: usize, limit: usize },
    #[error("horizon {horizon} exceeds the exhaustive-search limit {limit}")]
    HorizonTooLong { horizon: u32, limit: u32 },
    #[error("about {estimate} schedules to enumerate; the limit is {limit}")]
    TooManySchedules { estimate: u64, limit: u64 },
    #[error("fronts belong to different projects ({found} vs {exact})")]
    ProjectMismatch { found: String, exact: String },
    #[error(transparent)]
    Predict(#[from] PredictError),
}

/// Upper bound on the feasible schedule count: product over tasks of the
/// width of their earliest..latest start range.
pub fn schedule_estimate(project: &Project) -> u64 {
    let earliest = project.earliest_starts();
    let latest = latest_starts(project);
    earliest
        .iter()
        .zip(&latest)
        .fold(1u64, |acc, (&e, &l)| acc.saturating_mul(u64::from(l.saturating_sub(e)) + 1))
}

pub fn check_limits(project: &Project, limits: &OracleLimits) -> Result<u64, OracleError> {
    if project.len() > limits.max_tasks {
        return Err(OracleError::TooManyTasks { tasks: project.len(), limit: limits.max_tasks });
    }
    if project.max_horizon() > limits.max_horizon {
        return Err(OracleError::HorizonTooLong { horizon: project.max_horizon(), limit: limits.max_horizon });
    }
    let estimate = schedule_estimate(project);
    if estimate > limits.max_schedules {
        return Err(OracleError::TooManySchedules { estimate, limit: limits.max_schedules });
    }
    Ok(estimate)
}

/// Calls `visit` once for every feasible chromosome whose first task in
/// topological order starts on one of `first_days`.
fn enumerate_from(project: &Project, first_days: std::ops::RangeInclusive<u32>, visit: &mut dyn FnMut(&[u32])) {
    let order = project.topo_order();
    let h = project.max_horizon();
    let d = project.durations();
    let mut genes = vec![0u32; project.len()];

    fn descend(
        pos: usize,
        order: &[usize],
        project: &Project,
        d: &[u32],
        h: u32,
        first: &std::ops::RangeInclusive<u32>,
        genes: &mut [u32],
        visit: &mut dyn FnMut(&[u32]),
    ) {
        if pos == order.len() {
            visit(genes);
            return;
        }
        let t = order[pos];
        let floor = project.predecessors(t).iter().map(|&p| genes[p] + d[p] + 1).max().unwrap_or(0);
        let (lo, hi) = if pos == 0 { (floor.max(*first.start()), h.min(*first.end())) } else { (floor, h) };
        for g in lo..=hi {
            genes[t] = g;
            descend(pos + 1, order, project, d, h, first, genes, visit);
        }
    }

    descend(0, order, project, d, h, &first_days, &mut genes, visit);
}

/// Every dependency-feasible chromosome within the horizon, exactly once.
pub fn enumerate_schedules(project: &Project, limits: &OracleLimits) -> Result<Vec<Vec<u32>>, OracleError> {
    check_limits(project, limits)?;
    let mut out = Vec::new();
    enumerate_from(project, 0..=project.max_horizon(), &mut |g| out.push(g.to_vec()));
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactPoint {
    pub genes: Vec<u32>,
    pub starts: Vec<u32>,
    pub fitness: Fitness,
    /// Similarity conflicts left after repair.
    pub conflicts: usize,
}

impl ExactPoint {
    pub fn objectives(&self) -> Objectives {
        self.fitness.objectives()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactFront {
    pub project: String,
    /// Schedules examined.
    pub enumerated: u64,
    /// Non-dominated points, one per distinct objective vector, sorted by
    /// chromosome.
    pub points: Vec<ExactPoint>,
}

/// Incremental non-dominated archive over the schedules with the fewest
/// conflicts seen so far. Among equal objective vectors the lexicographically
/// smallest chromosome is kept, so the final content does not depend on
/// insertion order.
#[derive(Default)]
struct Archive {
    points: Vec<ExactPoint>,
}

impl Archive {
    fn insert(&mut self, p: ExactPoint) {
        if let Some(first) = self.points.first() {
            if p.conflicts > first.conflicts {
                return;
            }
            if p.conflicts < first.conflicts {
                self.points.clear();
            }
        }
        let o = p.objectives();
        let mut i = 0;
        while i < self.points.len() {
            let q = self.points[i].objectives();
            if q == o {
                if p.genes < self.points[i].genes {
                    self.points[i] = p;
                }
                return;
            }
            if no_worse(&q, &o) {
                return;
            }
            if no_worse(&o, &q) {
                self.points.swap_remove(i);
            } else {
                i += 1;
            }
        }
        self.points.push(p);
    }
}

// Written out separately from the scheduler's dominance test so the oracle
// filter is an independent implementation.
fn no_worse(a: &Objectives, b: &Objectives) -> bool {
    let mut better = false;
    for k in 0..OBJECTIVES {
        if a[k] > b[k] {
            return false;
        }
        better |= a[k] < b[k];
    }
    better
}

/// Evaluates every feasible schedule and keeps the non-dominated ones among
/// those with the fewest similarity conflicts.
/// Work is split by the start day of the first task and merged in a fixed
/// order.
pub fn exact_front<M: FailureModel + ?Sized>(ev: &Evaluator<'_, M>, limits: &OracleLimits) -> Result<ExactFront, OracleError> {
    let project = ev.project();
    check_limits(project, limits)?;
    let h = project.max_horizon();
    let chunks: Vec<(Archive, u64)> = (0..=h)
        .into_par_iter()
        .map(|day| {
            let mut archive = Archive::default();
            let mut count = 0u64;
            let mut failure = None;
            enumerate_from(project, day..=day, &mut |g| {
                if failure.is_some() {
                    return;
                }
                count += 1;
                match ev.evaluate(g) {
                    Ok(e) => archive.insert(ExactPoint {
                        genes: g.to_vec(),
                        starts: e.starts,
                        fitness: e.fitness,
                        conflicts: e.conflicts,
                    }),
                    Err(err) => failure = Some(err),
                }
            });
            match failure {
                Some(err) => Err(OracleError::Predict(err)),
                None => Ok((archive, count)),
            }
        })
        .collect::<Result<_, _>>()?;
    let mut merged = Archive::default();
    let mut enumerated = 0;
    for (archive, count) in chunks {
        enumerated += count;
        for p in archive.points {
            merged.insert(p);
        }
    }
    let mut points = merged.points;
    points.sort_by(|a, b| a.genes.cmp(&b.genes));
    Ok(ExactFront { project: project.fingerprint(), enumerated, points })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontComparison {
    /// Share of found members that no exact point dominates.
    pub nondominated_fraction: f64,
    /// Hypervolume of the found front over that of the exact front.
    pub hypervolume_ratio: f64,
    /// Per objective, the largest improvement any exact point offers over a
    /// found member without being worse in another objective.
    pub regret: Objectives,
    pub reference_point: Objectives,
    pub found_size: usize,
    pub exact_size: usize,
}

impl FrontComparison {
    pub fn max_regret(&self) -> f64 {
        self.regret.iter().copied().fold(0.0, f64::max)
    }

    pub fn write_json<W: Write>(&self, mut w: W) -> io::Result<()> {
        serde_json::to_writer_pretty(&mut w, self)?;
        writeln!(w)
    }
}

pub fn compare_fronts(found: &ParetoResult, exact: &ExactFront) -> Result<FrontComparison, OracleError> {
    if found.project != exact.project {
        return Err(OracleError::ProjectMismatch { found: found.project.clone(), exact: exact.project.clone() });
    }
    // Members with more conflicts than the exact front are dominated under
    // constrained domination and contribute nothing.
    let level = exact.points.iter().map(|p| p.conflicts).min().unwrap_or(0);
    let f: Vec<Objectives> =
        found.front.iter().filter(|s| s.conflicts <= level).map(|s| s.fitness.objectives()).collect();
    let e: Vec<Objectives> = exact.points.iter().map(ExactPoint::objectives).collect();
    let mut cmp = compare_objectives(&f, &e);
    if !found.front.is_empty() {
        cmp.nondominated_fraction *= f.len() as f64 / found.front.len() as f64;
    }
    cmp.found_size = found.front.len();
    Ok(cmp)
}

/// Metrics of [`compare_fronts`] on bare objective vectors.
pub fn compare_objectives(found: &[Objectives], exact: &[Objectives]) -> FrontComparison {
    let clean = found.iter().filter(|f| !exact.iter().any(|e| no_worse(e, f))).count();
    let nondominated_fraction = if found.is_empty() { 1.0 } else { clean as f64 / found.len() as f64 };

    let reference = reference_point(found.iter().chain(exact));
    let hv_exact = hypervolume(exact, &reference);
    let hypervolume_ratio = if hv_exact > 0.0 { hypervolume(found, &reference) / hv_exact } else { 1.0 };

    let mut regret = [0.0; OBJECTIVES];
    for fp in found {
        for k in 0..OBJECTIVES {
            let gap = exact
                .iter()
                .filter(|e| (0..OBJECTIVES).all(|j| e[j] <= fp[j]))
                .map(|e| fp[k] - e[k])
                .fold(0.0, f64::max);
            regret[k] = f64::max(regret[k], gap);
        }
    }
    FrontComparison {
        nondominated_fraction,
        hypervolume_ratio,
        regret,
        reference_point: reference,
        found_size: found.len(),
        exact_size: exact.len(),
    }
}
