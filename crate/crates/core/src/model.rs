//! Task and project types, dataset ingestion, and dependency validation.
//!
//! Calendar dates are converted to integer day offsets from the earliest
//! date found in a dataset (the catalog epoch). Everything downstream
//! works on those day indices.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::io::{Read, Write};

use chrono::{Duration, NaiveDate};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const COL_TASK_ID: &str = "Task ID";
pub const COL_PROJECT_ID: &str = "Project ID";
pub const COL_REGISTRATION_START: &str = "Task Registration Start Date";
pub const COL_REGISTRATION_END: &str = "Task Registration End Date";
pub const COL_SUBMISSION_END: &str = "Task Submission End Date";
pub const COL_PRIZE: &str = "Monetary Prize";
pub const COL_TOTAL_PRIZE: &str = "Total Monetary Prize";
pub const COL_TASK_TYPE: &str = "Task Type";
pub const COL_TECHNOLOGY: &str = "Technology";
pub const COL_PLATFORMS: &str = "Platforms";
pub const COL_REQUIREMENT: &str = "Task Requirement";
pub const COL_REGISTRATIONS: &str = "Registrations";
pub const COL_SUBMISSIONS: &str = "Submissions";
pub const COL_VALID_SUBMISSIONS: &str = "Valid Submissions";
pub const COL_STATUS: &str = "Task Status";

/// Columns every dataset must carry, in canonical output order.
pub const REQUIRED_COLUMNS: [&str; 13] = [
    COL_TASK_ID,
    COL_REGISTRATION_START,
    COL_REGISTRATION_END,
    COL_SUBMISSION_END,
    COL_PRIZE,
    COL_TASK_TYPE,
    COL_TECHNOLOGY,
    COL_PLATFORMS,
    COL_REQUIREMENT,
    COL_REGISTRATIONS,
    COL_SUBMISSIONS,
    COL_VALID_SUBMISSIONS,
    COL_STATUS,
];

const DATE_FORMAT: &str = "%Y-%m-%d";
const LIST_SEPARATOR: char = ';';

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TaskStatus {
    Completed,
    Failed,
}

impl TaskStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            TaskStatus::Completed => "completed",
            TaskStatus::Failed => "failed",
        }
    }
}

impl std::str::FromStr for TaskStatus {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        match s.trim().to_ascii_lowercase().as_str() {
            "completed" | "complete" | "success" => Ok(TaskStatus::Completed),
            "failed" | "failure" | "cancelled" | "canceled" => Ok(TaskStatus::Failed),
            _ => Err(()),
        }
    }
}

/// One crowdsourced task. Day fields are offsets from the catalog epoch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Task {
    pub id: String,
    pub project_id: Option<String>,
    pub registration_start: i64,
    pub registration_end: i64,
    pub submission_end: i64,
    pub prize: f64,
    pub total_prize: Option<f64>,
    pub task_type: String,
    pub technologies: BTreeSet<String>,
    pub platforms: BTreeSet<String>,
    pub requirement_text: String,
    pub registrations: u32,
    pub submissions: u32,
    pub valid_submissions: u32,
    pub status: TaskStatus,
}

impl Task {
    /// Minimal completed task, handy for fixtures. Registration closes on the
    /// submission deadline.
    pub fn new(id: impl Into<String>, registration_start: i64, submission_end: i64) -> Self {
        Task {
            id: id.into(),
            project_id: None,
            registration_start,
            registration_end: submission_end,
            submission_end,
            prize: 0.0,
            total_prize: None,
            task_type: String::new(),
            technologies: BTreeSet::new(),
            platforms: BTreeSet::new(),
            requirement_text: String::new(),
            registrations: 1,
            submissions: 1,
            valid_submissions: 1,
            status: TaskStatus::Completed,
        }
    }

    /// D = TS − TR.
    pub fn duration(&self) -> i64 {
        self.submission_end - self.registration_start
    }

    /// Historical registration window length TRE − TR, at least one day.
    pub fn registration_window(&self) -> i64 {
        (self.registration_end - self.registration_start).max(1)
    }

    pub fn check_invariants(&self) -> Result<(), String> {
        if self.registration_start > self.registration_end {
            return Err(format!(
                "registration start {} is after registration end {}",
                self.registration_start, self.registration_end
            ));
        }
        if self.registration_end > self.submission_end {
            return Err(format!(
                "registration end {} is after submission end {}",
                self.registration_end, self.submission_end
            ));
        }
        if !(self.prize >= 0.0 && self.prize.is_finite()) {
            return Err(format!("prize {} must be a finite nonnegative amount", self.prize));
        }
        if let Some(tp) = self.total_prize {
            if !(tp >= 0.0 && tp.is_finite()) {
                return Err(format!("total prize {tp} must be a finite nonnegative amount"));
            }
        }
        if self.submissions > self.registrations {
            return Err(format!(
                "submissions {} exceed registrations {}",
                self.submissions, self.registrations
            ));
        }
        if self.valid_submissions > self.submissions {
            return Err(format!(
                "valid submissions {} exceed submissions {}",
                self.valid_submissions, self.submissions
            ));
        }
        Ok(())
    }

    fn shifted(mut self, days: i64) -> Self {
        self.registration_start += days;
        self.registration_end += days;
        self.submission_end += days;
        self
    }
}

/// Corpus-level normalization denominators for pairwise task features.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct CorpusNorms {
    pub max_prize_diff: f64,
    pub max_registration_diff: i64,
    pub max_submission_diff: i64,
    pub max_tech_count: usize,
}

impl CorpusNorms {
    /// The largest pairwise difference of a scalar is max − min, so one
    /// linear scan suffices.
    pub fn from_tasks<'a>(tasks: impl IntoIterator<Item = &'a Task>) -> Self {
        let mut prize = (f64::INFINITY, f64::NEG_INFINITY);
        let mut reg = (i64::MAX, i64::MIN);
        let mut sub = (i64::MAX, i64::MIN);
        let mut max_tech_count = 0;
        let mut any = false;
        for t in tasks {
            any = true;
            prize = (prize.0.min(t.prize), prize.1.max(t.prize));
            reg = (reg.0.min(t.registration_start), reg.1.max(t.registration_start));
            sub = (sub.0.min(t.submission_end), sub.1.max(t.submission_end));
            max_tech_count = max_tech_count.max(t.technologies.len());
        }
        if !any {
            return CorpusNorms::default();
        }
        CorpusNorms {
            max_prize_diff: prize.1 - prize.0,
            max_registration_diff: reg.1 - reg.0,
            max_submission_diff: sub.1 - sub.0,
            max_tech_count,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TaskCatalog {
    pub tasks: Vec<Task>,
    /// Calendar date of day 0. `None` only for catalogs built without dates.
    pub epoch: Option<NaiveDate>,
    pub norms: CorpusNorms,
}

impl TaskCatalog {
    pub fn from_tasks(tasks: Vec<Task>, epoch: Option<NaiveDate>) -> Self {
        let norms = CorpusNorms::from_tasks(&tasks);
        TaskCatalog { tasks, epoch, norms }
    }

    pub fn len(&self) -> usize {
        self.tasks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tasks.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&Task> {
        self.tasks.iter().find(|t| t.id == id)
    }

    /// Combines two catalogs onto a common epoch (the earlier of the two).
    pub fn merge(&self, other: &TaskCatalog) -> TaskCatalog {
        let (epoch, shift_self, shift_other) = match (self.epoch, other.epoch) {
            (Some(a), Some(b)) => {
                let e = a.min(b);
                (Some(e), (a - e).num_days(), (b - e).num_days())
            }
            (a, b) => (a.or(b), 0, 0),
        };
        let tasks = self
            .tasks
            .iter()
            .cloned()
            .map(|t| t.shifted(shift_self))
            .chain(other.tasks.iter().cloned().map(|t| t.shifted(shift_other)))
            .collect();
        TaskCatalog::from_tasks(tasks, epoch)
    }

    pub fn date_of(&self, day: i64) -> Option<NaiveDate> {
        self.epoch.map(|e| e + Duration::days(day))
    }

    /// Distinct project ids in first-seen order.
    pub fn project_ids(&self) -> Vec<String> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for t in &self.tasks {
            if let Some(p) = &t.project_id {
                if seen.insert(p.clone()) {
                    out.push(p.clone());
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RowError {
    /// 1-based line number in the input, header being line 1.
    pub line: u64,
    pub field: Option<String>,
    pub message: String,
}

impl fmt::Display for RowError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.field {
            Some(field) => write!(f, "line {}: {}: {}", self.line, field, self.message),
            None => write!(f, "line {}: {}", self.line, self.message),
        }
    }
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("missing required column \"{0}\"")]
    MissingColumn(String),
    #[error("malformed input: {0}")]
    Csv(String),
    #[error("{} malformed row(s): {}", .0.len(), .0.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("; "))]
    Rows(Vec<RowError>),
}

#[derive(Debug, Clone, Copy)]
pub struct ParseOptions {
    pub delimiter: u8,
}

impl Default for ParseOptions {
    fn default() -> Self {
        ParseOptions { delimiter: b',' }
    }
}

/// Parses a header-prefixed delimited dataset with the default options.
pub fn parse_dataset<R: Read>(reader: R) -> Result<TaskCatalog, IngestError> {
    parse_dataset_with(reader, ParseOptions::default())
}

struct RawRow {
    line: u64,
    id: String,
    project_id: Option<String>,
    dates: [NaiveDate; 3],
    prize: f64,
    total_prize: Option<f64>,
    task_type: String,
    technologies: BTreeSet<String>,
    platforms: BTreeSet<String>,
    requirement_text: String,
    counts: [u32; 3],
    status: TaskStatus,
}

pub fn parse_dataset_with<R: Read>(reader: R, opts: ParseOptions) -> Result<TaskCatalog, IngestError> {
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(opts.delimiter)
        .has_headers(true)
        .flexible(false)
        .from_reader(reader);

    let headers = rdr.headers().map_err(csv_error)?.clone();
    let mut index: HashMap<String, usize> = HashMap::new();
    for (i, h) in headers.iter().enumerate() {
        index.insert(normalize_header(h), i);
    }
    let column = |name: &str| index.get(&normalize_header(name)).copied();
    let mut required = HashMap::new();
    for name in REQUIRED_COLUMNS {
        let i = column(name).ok_or_else(|| IngestError::MissingColumn(name.to_string()))?;
        required.insert(name, i);
    }
    let project_col = column(COL_PROJECT_ID);
    let total_prize_col = column(COL_TOTAL_PRIZE);

    let mut rows = Vec::new();
    let mut errors = Vec::new();
    for record in rdr.records() {
        let record = match record {
            Ok(r) => r,
            Err(e) => {
                let line = e.position().map(|p| p.line()).unwrap_or(0);
                errors.push(RowError { line, field: None, message: e.to_string() });
                continue;
            }
        };
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let cells = Cells { record: &record, required: &required };
        match parse_row(line, &cells, project_col.and_then(|c| record.get(c)), total_prize_col.and_then(|c| record.get(c))) {
            Ok(row) => rows.push(row),
            Err(e) => errors.push(e),
        }
    }

    let epoch = rows.iter().flat_map(|r| r.dates.iter().copied()).min();
    let mut tasks = Vec::with_capacity(rows.len());
    for row in rows {
        let e = epoch.expect("rows present implies an epoch");
        let task = Task {
            id: row.id,
            project_id: row.project_id,
            registration_start: (row.dates[0] - e).num_days(),
            registration_end: (row.dates[1] - e).num_days(),
            submission_end: (row.dates[2] - e).num_days(),
            prize: row.prize,
            total_prize: row.total_prize,
            task_type: row.task_type,
            technologies: row.technologies,
            platforms: row.platforms,
            requirement_text: row.requirement_text,
            registrations: row.counts[0],
            submissions: row.counts[1],
            valid_submissions: row.counts[2],
            status: row.status,
        };
        if let Err(msg) = task.check_invariants() {
            errors.push(RowError { line: row.line, field: None, message: format!("invariant violation: {msg}") });
            continue;
        }
        tasks.push(task);
    }

    let mut seen = BTreeSet::new();
    for t in &tasks {
        if !seen.insert(t.id.as_str()) {
            errors.push(RowError {
                line: 0,
                field: Some(COL_TASK_ID.to_string()),
                message: format!("duplicate task id {}", t.id),
            });
        }
    }

    if !errors.is_empty() {
        errors.sort_by_key(|e| e.line);
        return Err(IngestError::Rows(errors));
    }
    Ok(TaskCatalog::from_tasks(tasks, epoch))
}

struct Cells<'a> {
    record: &'a csv::StringRecord,
    required: &'a HashMap<&'static str, usize>,
}

impl<'a> Cells<'a> {
    fn get(&self, name: &str) -> &'a str {
        self.record.get(self.required[name]).unwrap_or("").trim()
    }
}

fn parse_row(
    line: u64,
    cells: &Cells<'_>,
    project: Option<&str>,
    total_prize: Option<&str>,
) -> Result<RawRow, RowError> {
    let cell = |name: &str| cells.get(name);
    let err = |field: &str, message: String| RowError { line, field: Some(field.to_string()), message };

    let id = cell(COL_TASK_ID).to_string();
    if id.is_empty() {
        return Err(err(COL_TASK_ID, "empty task id".into()));
    }
    let date = |name: &str| {
        NaiveDate::parse_from_str(cell(name), DATE_FORMAT)
            .map_err(|e| err(name, format!("cannot parse date {:?}: {e}", cell(name))))
    };
    let dates = [date(COL_REGISTRATION_START)?, date(COL_REGISTRATION_END)?, date(COL_SUBMISSION_END)?];
    let number = |name: &str, raw: &str| {
        raw.parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| err(name, format!("cannot parse number {raw:?}")))
    };
    let prize = number(COL_PRIZE, cell(COL_PRIZE))?;
    let total_prize = match total_prize.map(str::trim) {
        Some(raw) if !raw.is_empty() => Some(number(COL_TOTAL_PRIZE, raw)?),
        _ => None,
    };
    let count = |name: &str| {
        cell(name)
            .parse::<u32>()
            .map_err(|e| err(name, format!("cannot parse count {:?}: {e}", cell(name))))
    };
    let counts = [count(COL_REGISTRATIONS)?, count(COL_SUBMISSIONS)?, count(COL_VALID_SUBMISSIONS)?];
    let status = cell(COL_STATUS)
        .parse::<TaskStatus>()
        .map_err(|_| err(COL_STATUS, format!("unknown status {:?}", cell(COL_STATUS))))?;

    Ok(RawRow {
        line,
        id,
        project_id: project.map(str::trim).filter(|p| !p.is_empty()).map(String::from),
        dates,
        prize,
        total_prize,
        task_type: cell(COL_TASK_TYPE).to_string(),
        technologies: split_list(cell(COL_TECHNOLOGY)),
        platforms: split_list(cell(COL_PLATFORMS)),
        requirement_text: cell(COL_REQUIREMENT).to_string(),
        counts,
        status,
    })
}

fn normalize_header(h: &str) -> String {
    h.trim().trim_start_matches('\u{feff}').to_ascii_lowercase()
}

fn split_list(cell: &str) -> BTreeSet<String> {
    cell.split(LIST_SEPARATOR).map(str::trim).filter(|s| !s.is_empty()).map(String::from).collect()
}

fn csv_error(e: csv::Error) -> IngestError {
    IngestError::Csv(e.to_string())
}

/// Writes a catalog back out in the canonical column layout.
pub fn write_dataset<W: Write>(catalog: &TaskCatalog, writer: W, delimiter: u8) -> Result<(), IngestError> {
    let mut wtr = csv::WriterBuilder::new().delimiter(delimiter).from_writer(writer);
    let mut header: Vec<&str> = vec![COL_PROJECT_ID];
    header.extend(REQUIRED_COLUMNS);
    header.push(COL_TOTAL_PRIZE);
    wtr.write_record(&header).map_err(csv_error)?;

    let epoch = catalog.epoch.unwrap_or_else(|| NaiveDate::from_ymd_opt(1970, 1, 1).unwrap());
    let date = |d: i64| (epoch + Duration::days(d)).format(DATE_FORMAT).to_string();
    let join = |s: &BTreeSet<String>| s.iter().cloned().collect::<Vec<_>>().join(";");
    for t in &catalog.tasks {
        wtr.write_record([
            t.project_id.clone().unwrap_or_default(),
            t.id.clone(),
            date(t.registration_start),
            date(t.registration_end),
            date(t.submission_end),
            format_number(t.prize),
            t.task_type.clone(),
            join(&t.technologies),
            join(&t.platforms),
            t.requirement_text.clone(),
            t.registrations.to_string(),
            t.submissions.to_string(),
            t.valid_submissions.to_string(),
            t.status.as_str().to_string(),
            t.total_prize.map(format_number).unwrap_or_default(),
        ])
        .map_err(csv_error)?;
    }
    wtr.flush()?;
    Ok(())
}

// Rust's shortest round-trip float formatting.
fn format_number(v: f64) -> String {
    format!("{v}")
}

/// A dependency edge between two tasks of a project, by position.
pub type Edge = (usize, usize);

#[derive(Debug, Error, PartialEq)]
pub enum ProjectError {
    #[error("unknown task id {0:?}")]
    UnknownTask(String),
    #[error("task {0:?} listed twice in the project")]
    DuplicateTask(String),
    #[error("dependency cycle: {}", .0.join(" -> "))]
    Cycle(Vec<String>),
    #[error("self-dependency on task {0:?}")]
    SelfLoop(String),
    #[error("project has no tasks")]
    Empty,
    #[error("earliest feasible schedule needs start day {needed} but the horizon is {horizon}")]
    Infeasible { needed: u32, horizon: u32 },
    #[error("malformed dependency line {line}: {text:?}")]
    DependencyLine { line: usize, text: String },
}

/// Tasks plus finish-to-start dependencies, validated acyclic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Project {
    pub id: String,
    tasks: Vec<Task>,
    edges: Vec<Edge>,
    predecessors: Vec<Vec<usize>>,
    successors: Vec<Vec<usize>>,
    topo_order: Vec<usize>,
    durations: Vec<u32>,
    windows: Vec<u32>,
    max_horizon: u32,
}

impl Project {
    /// Validates `edges` (indices into `tasks`) and builds the project with
    /// the default horizon.
    pub fn new(id: impl Into<String>, tasks: Vec<Task>, edges: Vec<Edge>) -> Result<Self, ProjectError> {
        if tasks.is_empty() {
            return Err(ProjectError::Empty);
        }
        let n = tasks.len();
        let mut edges: Vec<Edge> = edges;
        edges.sort_unstable();
        edges.dedup();
        let mut predecessors = vec![Vec::new(); n];
        let mut successors = vec![Vec::new(); n];
        for &(a, b) in &edges {
            if a >= n || b >= n {
                let bad = if a >= n { a } else { b };
                return Err(ProjectError::UnknownTask(format!("#{bad}")));
            }
            if a == b {
                return Err(ProjectError::SelfLoop(tasks[a].id.clone()));
            }
            successors[a].push(b);
            predecessors[b].push(a);
        }
        if let Some(cycle) = find_cycle(&successors) {
            return Err(ProjectError::Cycle(cycle.into_iter().map(|i| tasks[i].id.clone()).collect()));
        }
        let topo_order = topological_order(&predecessors, &successors);
        let durations: Vec<u32> = tasks.iter().map(|t| t.duration().max(0) as u32).collect();
        let windows: Vec<u32> = tasks.iter().map(|t| t.registration_window() as u32).collect();
        let mut project = Project {
            id: id.into(),
            tasks,
            edges,
            predecessors,
            successors,
            topo_order,
            durations,
            windows,
            max_horizon: 0,
        };
        let total: u32 = project.durations.iter().sum();
        let needed = project.earliest_starts().into_iter().max().unwrap_or(0);
        project.max_horizon = total.max(needed);
        Ok(project)
    }

    /// Overrides the gene upper bound. Fails if even the earliest schedule
    /// does not fit.
    pub fn with_max_horizon(mut self, horizon: u32) -> Result<Self, ProjectError> {
        let needed = self.earliest_starts().into_iter().max().unwrap_or(0);
        if needed > horizon {
            return Err(ProjectError::Infeasible { needed, horizon });
        }
        self.max_horizon = horizon;
        Ok(self)
    }

    pub fn tasks(&self) -> &[Task] {
        &self.tasks
    }

    pub fn len(&self) -> usize {
        self.tasks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tasks.is_empty()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn predecessors(&self, task: usize) -> &[usize] {
        &self.predecessors[task]
    }

    pub fn successors(&self, task: usize) -> &[usize] {
        &self.successors[task]
    }

    pub fn topo_order(&self) -> &[usize] {
        &self.topo_order
    }

    pub fn durations(&self) -> &[u32] {
        &self.durations
    }

    /// Registration window lengths used when a task is placed at a new start.
    pub fn windows(&self) -> &[u32] {
        &self.windows
    }

    pub fn max_horizon(&self) -> u32 {
        self.max_horizon
    }

    /// True when no edge forces `a` and `b` into sequence.
    pub fn is_parallel(&self, a: usize, b: usize) -> bool {
        !self.successors[a].contains(&b) && !self.successors[b].contains(&a)
    }

    /// Every task as early as its predecessors allow (all slacks zero).
    pub fn earliest_starts(&self) -> Vec<u32> {
        let mut starts = vec![0u32; self.len()];
        for &t in &self.topo_order {
            starts[t] = self.predecessors[t]
                .iter()
                .map(|&p| starts[p] + self.durations[p] + 1)
                .max()
                .unwrap_or(0);
        }
        starts
    }

    /// Whether `starts` honors every finish-to-start edge.
    pub fn satisfies_dependencies(&self, starts: &[u32]) -> bool {
        self.edges.iter().all(|&(a, b)| starts[b] >= starts[a] + self.durations[a] + 1)
    }

    pub fn duration_of(&self, starts: &[u32]) -> u32 {
        project_duration(self, starts)
    }

    /// Short identity used to check that results belong to the same project.
    pub fn fingerprint(&self) -> String {
        format!("{}:{}:{}:{}", self.id, self.tasks.len(), self.edges.len(), self.max_horizon)
    }
}

/// Span from the earliest start to the latest finish.
pub fn project_duration(project: &Project, starts: &[u32]) -> u32 {
    debug_assert_eq!(starts.len(), project.len());
    let first = starts.iter().copied().min().unwrap_or(0);
    let last = starts.iter().zip(project.durations()).map(|(&s, &d)| s + d).max().unwrap_or(0);
    last - first
}

/// Looks up tasks by id and builds a project from id-based edges.
pub fn build_project(
    catalog: &TaskCatalog,
    project_id: &str,
    task_ids: &[String],
    edges: &[(String, String)],
) -> Result<Project, ProjectError> {
    let mut position = HashMap::new();
    let mut tasks = Vec::with_capacity(task_ids.len());
    for id in task_ids {
        let task = catalog.get(id).ok_or_else(|| ProjectError::UnknownTask(id.clone()))?;
        if position.insert(id.as_str(), tasks.len()).is_some() {
            return Err(ProjectError::DuplicateTask(id.clone()));
        }
        tasks.push(task.clone());
    }
    let mut idx_edges = Vec::with_capacity(edges.len());
    for (a, b) in edges {
        let ia = *position.get(a.as_str()).ok_or_else(|| ProjectError::UnknownTask(a.clone()))?;
        let ib = *position.get(b.as_str()).ok_or_else(|| ProjectError::UnknownTask(b.clone()))?;
        idx_edges.push((ia, ib));
    }
    Project::new(project_id, tasks, idx_edges)
}

/// Reads `predecessor_id,successor_id` lines. Blank lines and `#` comments
/// are skipped.
pub fn parse_dependencies<R: Read>(mut reader: R) -> Result<Vec<(String, String)>, ProjectError> {
    let mut text = String::new();
    reader
        .read_to_string(&mut text)
        .map_err(|e| ProjectError::DependencyLine { line: 0, text: e.to_string() })?;
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split(',').map(str::trim);
        match (parts.next(), parts.next(), parts.next()) {
            (Some(a), Some(b), None) if !a.is_empty() && !b.is_empty() => out.push((a.to_string(), b.to_string())),
            _ => return Err(ProjectError::DependencyLine { line: i + 1, text: raw.to_string() }),
        }
    }
    Ok(out)
}

fn find_cycle(successors: &[Vec<usize>]) -> Option<Vec<usize>> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        White,
        Grey,
        Black,
    }
    let n = successors.len();
    let mut mark = vec![Mark::White; n];
    let mut parent = vec![usize::MAX; n];
    for root in 0..n {
        if mark[root] != Mark::White {
            continue;
        }
        // Iterative DFS: (node, next child position).
        let mut stack = vec![(root, 0usize)];
        mark[root] = Mark::Grey;
        while let Some(&mut (node, ref mut next)) = stack.last_mut() {
            if *next < successors[node].len() {
                let child = successors[node][*next];
                *next += 1;
                match mark[child] {
                    Mark::White => {
                        mark[child] = Mark::Grey;
                        parent[child] = node;
                        stack.push((child, 0));
                    }
                    Mark::Grey => {
                        let mut cycle = vec![child];
                        let mut cur = node;
                        while cur != child {
                            cycle.push(cur);
                            cur = parent[cur];
                        }
                        cycle.reverse();
                        cycle.rotate_right(1);
                        cycle.push(child);
                        return Some(cycle);
                    }
                    Mark::Black => {}
                }
            } else {
                mark[node] = Mark::Black;
                stack.pop();
            }
        }
    }
    None
}

// Kahn's algorithm, smallest index first for a stable order.
fn topological_order(predecessors: &[Vec<usize>], successors: &[Vec<usize>]) -> Vec<usize> {
    let n = predecessors.len();
    let mut indegree: Vec<usize> = predecessors.iter().map(Vec::len).collect();
    let mut ready: BTreeSet<usize> = (0..n).filter(|&i| indegree[i] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(next) = ready.pop_first() {
        order.push(next);
        for &s in &successors[next] {
            indegree[s] -= 1;
            if indegree[s] == 0 {
                ready.insert(s);
            }
        }
    }
    order
}
