//! Day-indexed marketplace state for one hypothetical schedule.
//!
//! A task placed at `start` is open for registration on the half-open day
//! range `[start, start + window)`, where `window` is its registration window
//! length. Project tasks come from a chromosome; background tasks (the rest
//! of the marketplace) come from an optional replay file and are indexed once.

use serde::{Deserialize, Serialize};

use crate::model::Task;
use crate::similarity::SimilarityMatrix;

/// One task sitting on the platform timeline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Placement {
    /// Column of this task in the similarity table.
    pub column: usize,
    pub start: i64,
    pub window: u32,
    pub duration: u32,
    pub valid_submissions: u32,
}

impl Placement {
    /// First day the task is closed for registration.
    #[inline]
    pub fn registration_end(&self) -> i64 {
        self.start + self.window as i64
    }

    #[inline]
    pub fn is_open(&self, day: i64) -> bool {
        self.start <= day && day < self.registration_end()
    }
}

/// Denominator of the arrival rate: full task durations or registration
/// window lengths of the open tasks.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ArrivalRateBasis {
    #[default]
    TaskDuration,
    RegistrationWindow,
}

impl std::str::FromStr for ArrivalRateBasis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "duration" | "task-duration" => Ok(ArrivalRateBasis::TaskDuration),
            "window" | "registration-window" => Ok(ArrivalRateBasis::RegistrationWindow),
            other => Err(format!("unknown arrival-rate basis {other:?}")),
        }
    }
}

/// Count of placements open on `day`, not counting the probe's own column.
pub fn open_tasks<'a>(day: i64, placements: impl IntoIterator<Item = &'a Placement>, probe: Option<usize>) -> usize {
    placements
        .into_iter()
        .filter(|p| p.is_open(day) && Some(p.column) != probe)
        .count()
}

/// Mean similarity between the probe and the open tasks; 0 for an empty set.
pub fn avg_similarity(probe_row: usize, open: &[&Placement], sim: &SimilarityMatrix) -> f64 {
    if open.is_empty() {
        return 0.0;
    }
    let total: f64 = open.iter().map(|p| sim.get(probe_row, p.column)).sum();
    (total / open.len() as f64).clamp(0.0, 1.0)
}

/// One minus the fraction of open tasks that received a valid submission.
pub fn empirical_failure_ratio(open: &[&Placement]) -> f64 {
    if open.is_empty() {
        return 0.0;
    }
    let succeeded = open.iter().filter(|p| p.valid_submissions >= 1).count();
    1.0 - succeeded as f64 / open.len() as f64
}

/// Open-task count over the summed lengths of the open tasks, in tasks/day.
/// A zero duration falls back to the registration window (at least 1 day).
pub fn arrival_rate(open: &[&Placement], basis: ArrivalRateBasis) -> f64 {
    if open.is_empty() {
        return 0.0;
    }
    let total: u64 = open
        .iter()
        .map(|p| {
            let len = match basis {
                ArrivalRateBasis::TaskDuration if p.duration > 0 => p.duration,
                _ => p.window,
            };
            len.max(1) as u64
        })
        .sum();
    open.len() as f64 / total as f64
}

/// Tasks open on `day` whose windows still cover `day + delta`.
pub fn still_open<'a>(day: i64, delta: u32, open: &[&'a Placement]) -> Vec<&'a Placement> {
    let target = day + delta as i64;
    open.iter().copied().filter(|p| p.is_open(target)).collect()
}

/// Projected open-task count `delta` days ahead: still-open tasks plus
/// arrivals at the current rate.
pub fn future_open_tasks(day: i64, delta: u32, open: &[&Placement], basis: ArrivalRateBasis) -> f64 {
    let remaining = still_open(day, delta, open).len() as f64;
    remaining + arrival_rate(open, basis) * delta as f64
}

/// Projected mean similarity `delta` days ahead: still-open tasks keep their
/// similarity, projected arrivals are assumed as similar as today's average.
pub fn future_avg_similarity(
    day: i64,
    delta: u32,
    probe_row: usize,
    open: &[&Placement],
    sim: &SimilarityMatrix,
    basis: ArrivalRateBasis,
) -> f64 {
    if delta == 0 {
        return avg_similarity(probe_row, open, sim);
    }
    let remaining = still_open(day, delta, open);
    let remaining_count = remaining.len() as f64;
    let arrivals = arrival_rate(open, basis) * delta as f64;
    let today = avg_similarity(probe_row, open, sim);
    let kept = avg_similarity(probe_row, &remaining, sim);
    blend_similarity(remaining_count, kept, arrivals, today)
}

/// Weighted mean of the still-open tasks' similarity and the projected
/// arrivals' similarity; 0 when both weights vanish.
pub fn blend_similarity(still_open: f64, still_open_mean: f64, arrivals: f64, today_mean: f64) -> f64 {
    let denom = still_open + arrivals;
    if denom <= 0.0 {
        return 0.0;
    }
    ((still_open * still_open_mean + arrivals * today_mean) / denom).clamp(0.0, 1.0)
}

/// Marketplace quantities seen by one probe task on one day.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DaySnapshot {
    pub open_tasks: usize,
    pub avg_similarity: f64,
    pub arrival_rate: f64,
    pub failure_ratio: f64,
}

/// Background tasks bucketed by the days they are open.
#[derive(Debug, Clone, Default)]
pub struct Background {
    placements: Vec<Placement>,
    by_day: Vec<Vec<u32>>,
}

impl Background {
    /// Positions historical tasks on the schedule timeline, where schedule
    /// day 0 is catalog day `anchor`. Columns start at `first_column`.
    pub fn from_tasks(tasks: &[Task], anchor: i64, first_column: usize, horizon: i64) -> Self {
        let placements = tasks
            .iter()
            .enumerate()
            .map(|(i, t)| Placement {
                column: first_column + i,
                start: t.registration_start - anchor,
                window: t.registration_window() as u32,
                duration: t.duration().max(0) as u32,
                valid_submissions: t.valid_submissions,
            })
            .collect();
        Self::from_placements(placements, horizon)
    }

    pub fn from_placements(placements: Vec<Placement>, horizon: i64) -> Self {
        let days = (horizon.max(0) + 1) as usize;
        let mut by_day = vec![Vec::new(); days];
        for (i, p) in placements.iter().enumerate() {
            let lo = p.start.max(0);
            let hi = p.registration_end().min(days as i64);
            for d in lo..hi {
                by_day[d as usize].push(i as u32);
            }
        }
        Background { placements, by_day }
    }

    pub fn placements(&self) -> &[Placement] {
        &self.placements
    }

    pub fn len(&self) -> usize {
        self.placements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.placements.is_empty()
    }

    fn open_on(&self, day: i64) -> impl Iterator<Item = &Placement> {
        let bucket: &[u32] = if day >= 0 && (day as usize) < self.by_day.len() {
            &self.by_day[day as usize]
        } else {
            &[]
        };
        let outside = day < 0 || day as usize >= self.by_day.len();
        let scanned = self.placements.iter().filter(move |p| outside && p.is_open(day));
        bucket.iter().map(move |&i| &self.placements[i as usize]).chain(scanned)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("day {day} is outside the platform horizon [0, {horizon}]")]
pub struct DayOutOfRange {
    pub day: i64,
    pub horizon: i64,
}

/// Platform timeline for one schedule: the project's own placements plus an
/// optional shared background.
#[derive(Debug, Clone)]
pub struct PlatformState<'a> {
    own: Vec<Placement>,
    background: Option<&'a Background>,
    horizon: i64,
    basis: ArrivalRateBasis,
}

impl<'a> PlatformState<'a> {
    pub fn new(own: Vec<Placement>, background: Option<&'a Background>, horizon: i64, basis: ArrivalRateBasis) -> Self {
        PlatformState { own, background, horizon, basis }
    }

    /// Placements for project tasks at the given starts; column `i` is task `i`.
    pub fn for_schedule(
        starts: &[u32],
        windows: &[u32],
        durations: &[u32],
        valid_submissions: &[u32],
        background: Option<&'a Background>,
        horizon: i64,
        basis: ArrivalRateBasis,
    ) -> Self {
        let own = (0..starts.len())
            .map(|i| Placement {
                column: i,
                start: starts[i] as i64,
                window: windows[i],
                duration: durations[i],
                valid_submissions: valid_submissions[i],
            })
            .collect();
        Self::new(own, background, horizon, basis)
    }

    pub fn horizon(&self) -> i64 {
        self.horizon
    }

    pub fn basis(&self) -> ArrivalRateBasis {
        self.basis
    }

    pub fn check_day(&self, day: i64) -> Result<(), DayOutOfRange> {
        if day < 0 || day > self.horizon {
            return Err(DayOutOfRange { day, horizon: self.horizon });
        }
        Ok(())
    }

    /// Open placements on `day`, excluding the probe column.
    pub fn open_set(&self, day: i64, probe: Option<usize>) -> Vec<&Placement> {
        let own = self.own.iter().filter(|p| p.is_open(day));
        let bg = self.background.into_iter().flat_map(|b| b.open_on(day));
        own.chain(bg).filter(|p| Some(p.column) != probe).collect()
    }

    pub fn open_tasks(&self, day: i64, probe: Option<usize>) -> usize {
        self.open_set(day, probe).len()
    }

    pub fn snapshot(&self, day: i64, probe_row: usize, sim: &SimilarityMatrix) -> DaySnapshot {
        let open = self.open_set(day, Some(probe_row));
        DaySnapshot {
            open_tasks: open.len(),
            avg_similarity: avg_similarity(probe_row, &open, sim),
            arrival_rate: arrival_rate(&open, self.basis),
            failure_ratio: empirical_failure_ratio(&open),
        }
    }

    /// Projected (open-task count, mean similarity) `delta` days after `day`,
    /// seen from `day`. With `delta == 0` this is the current state.
    pub fn projection(&self, day: i64, delta: u32, probe_row: usize, sim: &SimilarityMatrix) -> (f64, f64) {
        let open = self.open_set(day, Some(probe_row));
        (
            future_open_tasks(day, delta, &open, self.basis),
            future_avg_similarity(day, delta, probe_row, &open, sim, self.basis),
        )
    }

    /// Day-indexed series over `[0, horizon]` of every marketplace quantity
    /// for one probe task.
    pub fn series(&self, probe_row: usize, sim: &SimilarityMatrix) -> Vec<DaySnapshot> {
        (0..=self.horizon).map(|d| self.snapshot(d, probe_row, sim)).collect()
    }
}
