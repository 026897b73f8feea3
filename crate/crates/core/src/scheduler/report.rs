//! Result exports and the schedule-acceleration figure.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{GenerationStats, Objectives, ParetoResult, Solution};

pub const RESULT_FORMAT: &str = "crowdsched-pareto v1";

#[derive(Debug, Error, PartialEq)]
#[error("historical duration must be positive, got {0}")]
pub struct AccelerationError(pub f64);

/// Relative shortening of a project, in percent: `(final − recommended) / final`.
pub fn schedule_acceleration(final_duration: f64, recommended_duration: f64) -> Result<f64, AccelerationError> {
    if !(final_duration > 0.0) {
        return Err(AccelerationError(final_duration));
    }
    Ok(100.0 * (final_duration - recommended_duration) / final_duration)
}

/// JSON form of a scheduling result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultDocument {
    pub format: String,
    pub project: String,
    pub objectives: Vec<String>,
    pub task_ids: Vec<String>,
    pub seed: u64,
    pub similarity: bool,
    pub reference_point: Objectives,
    pub evaluations: usize,
    pub front: Vec<Solution>,
    pub generations: Vec<GenerationStats>,
}

impl ResultDocument {
    pub fn new(result: &ParetoResult, seed: u64, similarity: bool) -> Self {
        ResultDocument {
            format: RESULT_FORMAT.to_string(),
            project: result.project.clone(),
            objectives: ["duration", "similarity_cost", "failure"].map(String::from).to_vec(),
            task_ids: result.task_ids.clone(),
            seed,
            similarity,
            reference_point: result.reference_point,
            evaluations: result.evaluations,
            front: result.front.clone(),
            generations: result.generations.clone(),
        }
    }

    pub fn write_json<W: Write>(&self, mut w: W) -> io::Result<()> {
        serde_json::to_writer_pretty(&mut w, self)?;
        writeln!(w)
    }
}

/// One row per front member: objectives, then one start-day column per task.
pub fn write_front_csv<W: Write>(result: &ParetoResult, mut w: W) -> io::Result<()> {
    write!(w, "member,duration,similarity_cost,failure,conflicts")?;
    for id in &result.task_ids {
        write!(w, ",{}", csv_field(id))?;
    }
    writeln!(w)?;
    for (m, s) in result.front.iter().enumerate() {
        write!(w, "{m},{},{},{},{}", s.fitness.duration, s.fitness.similarity_cost, s.fitness.failure, s.conflicts)?;
        for start in &s.starts {
            write!(w, ",{start}")?;
        }
        writeln!(w)?;
    }
    Ok(())
}

/// One row per (front member, task).
pub fn write_diagnostics_csv<W: Write>(result: &ParetoResult, mut w: W) -> io::Result<()> {
    writeln!(w, "member,task_id,start,chosen_day,failure,open_tasks,avg_similarity")?;
    for (m, s) in result.front.iter().enumerate() {
        for d in &s.diagnostics {
            writeln!(
                w,
                "{m},{},{},{},{},{},{}",
                csv_field(&d.task_id),
                d.start,
                d.chosen_day,
                d.failure,
                d.open_tasks,
                d.avg_similarity
            )?;
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotAxis {
    Failure,
    SimilarityCost,
}

impl PlotAxis {
    pub fn name(self) -> &'static str {
        match self {
            PlotAxis::Failure => "failure",
            PlotAxis::SimilarityCost => "similarity_cost",
        }
    }
}

/// Scatter data: project duration against one of the other objectives.
pub fn write_plot_data<W: Write>(result: &ParetoResult, axis: PlotAxis, mut w: W) -> io::Result<()> {
    writeln!(w, "duration,{}", axis.name())?;
    for s in &result.front {
        let y = match axis {
            PlotAxis::Failure => s.fitness.failure,
            PlotAxis::SimilarityCost => s.fitness.similarity_cost,
        };
        writeln!(w, "{},{y}", s.fitness.duration)?;
    }
    Ok(())
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
