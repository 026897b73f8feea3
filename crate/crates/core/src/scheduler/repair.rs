//! Dependency and similarity repair of start-day chromosomes.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::model::Project;
use crate::similarity::SimilarityMatrix;

/// Latest start of every task that still leaves room for all of its
/// successors below the horizon.
pub fn latest_starts(project: &Project) -> Vec<u32> {
    let h = project.max_horizon();
    let d = project.durations();
    let mut latest = vec![h; project.len()];
    for &t in project.topo_order().iter().rev() {
        for &s in project.successors(t) {
            // Horizon validation guarantees the subtraction stays non-negative.
            latest[t] = latest[t].min(latest[s].saturating_sub(d[t] + 1));
        }
    }
    latest
}

/// Raises genes in topological order until every successor starts at least
/// one day after its predecessor's submission deadline.
///
/// Genes are first capped at each task's latest feasible start, so the result
/// always lies within `[0, max_horizon]` and honors every edge. Chromosomes
/// that are already feasible come back unchanged.
pub fn repair_dependencies(genes: &mut [u32], project: &Project) {
    let latest = latest_starts(project);
    repair_with_latest(genes, project, &latest);
}

pub(crate) fn repair_with_latest(genes: &mut [u32], project: &Project, latest: &[u32]) {
    let d = project.durations();
    for (g, &l) in genes.iter_mut().zip(latest) {
        *g = (*g).min(l);
    }
    for &t in project.topo_order() {
        let floor = project.predecessors(t).iter().map(|&p| genes[p] + d[p] + 1).max().unwrap_or(0);
        genes[t] = genes[t].max(floor);
    }
}

/// Acceptable similarity between two tasks whose registration windows
/// overlap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimilarityBand {
    pub target: f64,
    pub tolerance: f64,
}

impl Default for SimilarityBand {
    fn default() -> Self {
        SimilarityBand { target: 0.6, tolerance: 0.05 }
    }
}

// Absorbs rounding in target ± tolerance so the band edges count as inside.
const BAND_SLACK: f64 = 1e-12;

impl SimilarityBand {
    #[inline]
    pub fn contains(&self, s: f64) -> bool {
        (s - self.target).abs() <= self.tolerance + BAND_SLACK
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimilarityRepair {
    /// Sweeps that moved at least one task before a sweep changed nothing.
    pub passes: usize,
    /// Individual postponements applied.
    pub moves: usize,
    /// Some conflict could not be removed without breaking the horizon.
    pub unresolved: bool,
    /// The sweep budget ran out before a fixpoint.
    pub exhausted: bool,
}

/// Separates parallel tasks whose similarity falls outside `band`.
///
/// Tasks are placed in order of (start, registration window, index). When a
/// task's window overlaps an already placed task with out-of-band similarity,
/// it is postponed to the latest registration end among those tasks and its
/// successors are pushed to keep dependencies. Of two tasks arriving the same
/// day the one with the longer registration window therefore moves. A task
/// that would pass its latest feasible start stays there and the conflict is
/// reported as unresolved.
///
/// Sweeps repeat until one changes nothing, at most `len` times.
pub fn repair_similarity(
    genes: &mut [u32],
    project: &Project,
    sim: &SimilarityMatrix,
    band: SimilarityBand,
) -> SimilarityRepair {
    let latest = latest_starts(project);
    repair_similarity_with_latest(genes, project, sim, band, &latest)
}

pub(crate) fn repair_similarity_with_latest(
    genes: &mut [u32],
    project: &Project,
    sim: &SimilarityMatrix,
    band: SimilarityBand,
    latest: &[u32],
) -> SimilarityRepair {
    let mut report = SimilarityRepair { passes: 0, moves: 0, unresolved: false, exhausted: false };
    let n = genes.len();
    if n < 2 {
        return report;
    }
    repair_with_latest(genes, project, latest);
    loop {
        let (moves, unresolved) = sweep(genes, project, sim, band, latest);
        report.unresolved = unresolved;
        if moves == 0 {
            return report;
        }
        report.moves += moves;
        report.passes += 1;
        if report.passes >= n {
            report.exhausted = sweep_would_move(genes, project, sim, band, latest);
            return report;
        }
    }
}

fn sweep_would_move(genes: &[u32], project: &Project, sim: &SimilarityMatrix, band: SimilarityBand, latest: &[u32]) -> bool {
    let mut copy = genes.to_vec();
    sweep(&mut copy, project, sim, band, latest).0 > 0
}

fn sweep(genes: &mut [u32], project: &Project, sim: &SimilarityMatrix, band: SimilarityBand, latest: &[u32]) -> (usize, bool) {
    let n = genes.len();
    let windows = project.windows();
    let durations = project.durations();
    let mut heap: BinaryHeap<Reverse<(u32, u32, usize)>> =
        (0..n).map(|i| Reverse((genes[i], windows[i], i))).collect();
    let mut placed: Vec<usize> = Vec::with_capacity(n);
    let mut is_placed = vec![false; n];
    let mut moves = 0;
    let mut unresolved = false;

    while let Some(Reverse((start, _, t))) = heap.pop() {
        if is_placed[t] || start != genes[t] {
            continue;
        }
        let target = placed
            .iter()
            .filter(|&&u| genes[u] + windows[u] > start && !band.contains(sim.get(t, u)))
            .map(|&u| genes[u] + windows[u])
            .max();
        match target {
            Some(end) if latest[t] > start => {
                let new_start = end.min(latest[t]);
                if new_start < end {
                    unresolved = true;
                }
                genes[t] = new_start;
                moves += 1;
                heap.push(Reverse((new_start, windows[t], t)));
                push_successors(genes, project, durations, t, &mut heap);
            }
            Some(_) => {
                unresolved = true;
                placed.push(t);
                is_placed[t] = true;
            }
            None => {
                placed.push(t);
                is_placed[t] = true;
            }
        }
    }
    (moves, unresolved)
}

// Forward pass from a moved task; only tasks that start later can be
// affected and none of them has been placed yet.
fn push_successors(
    genes: &mut [u32],
    project: &Project,
    durations: &[u32],
    from: usize,
    heap: &mut BinaryHeap<Reverse<(u32, u32, usize)>>,
) {
    let mut stack = vec![from];
    while let Some(t) = stack.pop() {
        let floor = genes[t] + durations[t] + 1;
        for &s in project.successors(t) {
            if genes[s] < floor {
                genes[s] = floor;
                heap.push(Reverse((floor, project.windows()[s], s)));
                stack.push(s);
            }
        }
    }
}

/// Pairs of tasks with overlapping registration windows and out-of-band
/// similarity under `genes`.
pub fn similarity_conflicts(genes: &[u32], project: &Project, sim: &SimilarityMatrix, band: SimilarityBand) -> Vec<(usize, usize)> {
    let w = project.windows();
    let mut out = Vec::new();
    for a in 0..genes.len() {
        for b in a + 1..genes.len() {
            let overlap = genes[a] < genes[b] + w[b] && genes[b] < genes[a] + w[a];
            if overlap && !band.contains(sim.get(a, b)) {
                out.push((a, b));
            }
        }
    }
    out
}
