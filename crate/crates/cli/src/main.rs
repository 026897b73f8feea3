//! `crowdsched` command-line tool.
//!
//! Exit codes: 0 success, 1 other failure, 2 I/O error, 3 schema or
//! configuration error, 4 unusable model file, 5 infeasible project,
//! 6 instance too large for exhaustive search, 7 oracle thresholds violated.

mod config;

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, CommandFactory, Parser, Subcommand};
use serde::Serialize;

use crowdsched::model::{
    build_project, parse_dataset_with, parse_dependencies, IngestError, ParseOptions, Project, ProjectError, Task,
    TaskCatalog, TaskStatus,
};
use crowdsched::oracle::{compare_fronts, exact_front, OracleError, OracleLimits};
use crowdsched::platform::{ArrivalRateBasis, Background};
use crowdsched::predictor::{
    build_training_samples, load_model, save_model, train, LabelMode, ModelFileError, PrizeFeature, TrainConfig,
    TrainError, DEFAULT_WIDTHS,
};
use crowdsched::scheduler::{
    evolve, schedule_acceleration, write_diagnostics_csv, write_front_csv, write_plot_data, Evaluator, GAConfig,
    ParetoResult, PlotAxis, ResultDocument, ScheduleError, SimilarityBand, Solution,
};
use crowdsched::similarity::{SimilarityKernel, SimilarityMatrix};

const EXIT_OTHER: u8 = 1;
const EXIT_IO: u8 = 2;
const EXIT_SCHEMA: u8 = 3;
const EXIT_MODEL: u8 = 4;
const EXIT_INFEASIBLE: u8 = 5;
const EXIT_GUARD: u8 = 6;
const EXIT_THRESHOLD: u8 = 7;

#[derive(Parser)]
#[command(name = "crowdsched", version, about = "Evolutionary scheduling of crowdsourced software tasks")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Validate a task dataset and print a summary.
    #[command(args_override_self = true)]
    Ingest(IngestArgs),
    /// Train the failure predictor with k-fold cross-validation.
    #[command(args_override_self = true)]
    Train(TrainArgs),
    /// Search for Pareto-optimal schedules of one project.
    #[command(args_override_self = true)]
    Schedule(ScheduleArgs),
    /// Compare the evolved front with an exhaustive search on a small project.
    #[command(name = "oracle-check", args_override_self = true)]
    OracleCheck(OracleArgs),
}

#[derive(Args)]
struct Common {
    /// key=value file supplying defaults for any long flag.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Worker threads; results are identical for any count.
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Field delimiter of the input datasets.
    #[arg(long, default_value_t = ',')]
    delimiter: char,
}

#[derive(Args)]
struct IngestArgs {
    #[arg(long)]
    dataset: PathBuf,
    /// Print the summary as JSON.
    #[arg(long)]
    json: bool,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long)]
    dataset: PathBuf,
    /// Where to write the trained model.
    #[arg(long)]
    model_out: PathBuf,
    /// Optional JSON fold report.
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long, default_value_t = 10)]
    folds: usize,
    #[arg(long, default_value_t = 500)]
    epochs: usize,
    #[arg(long, default_value_t = 10)]
    patience: usize,
    #[arg(long, default_value_t = 0.01)]
    learning_rate: f64,
    #[arg(long, default_value_t = 32)]
    batch_size: usize,
    /// Comma-separated layer widths, input first.
    #[arg(long)]
    widths: Option<String>,
    /// day-ratio or task-status.
    #[arg(long, default_value = "day-ratio")]
    labels: LabelMode,
    /// MP or TMP.
    #[arg(long, default_value = "MP")]
    prize: PrizeFeature,
    /// mean or cosine.
    #[arg(long, default_value = "mean")]
    kernel: SimilarityKernel,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct ProjectArgs {
    /// Dataset holding the project's tasks.
    #[arg(long)]
    dataset: PathBuf,
    /// predecessor,successor lines.
    #[arg(long)]
    dependencies: Option<PathBuf>,
    /// Project ID to schedule; required when the dataset holds several.
    #[arg(long)]
    project: Option<String>,
    /// Comma-separated task IDs, overriding the project selection.
    #[arg(long)]
    tasks: Option<String>,
    /// Extra historical tasks replayed as competing platform load.
    #[arg(long)]
    background: Option<PathBuf>,
    /// Failure model written by `train`.
    #[arg(long)]
    model: PathBuf,
    /// Largest start day a chromosome may use.
    #[arg(long)]
    horizon: Option<u32>,
    #[arg(long, default_value = "mean")]
    kernel: SimilarityKernel,
    /// duration or window.
    #[arg(long, default_value = "duration")]
    basis: ArrivalRateBasis,
}

#[derive(Args)]
struct GaArgs {
    #[arg(long, default_value_t = 100)]
    population: usize,
    #[arg(long, default_value_t = 200)]
    generations: usize,
    #[arg(long, default_value_t = 0.9)]
    crossover_rate: f64,
    #[arg(long, default_value_t = 0.1)]
    mutation_rate: f64,
    #[arg(long, default_value_t = 2)]
    tournament_size: usize,
    #[arg(long, default_value_t = 1)]
    runs: usize,
    #[arg(long, default_value_t = 0.6)]
    band_target: f64,
    #[arg(long, default_value_t = 0.05)]
    band_tolerance: f64,
    /// Drop similarity repair and the similarity-cost objective.
    #[arg(long)]
    no_similarity: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl GaArgs {
    fn config(&self) -> GAConfig {
        GAConfig {
            population: self.population,
            generations: self.generations,
            crossover_rate: self.crossover_rate,
            mutation_rate: self.mutation_rate,
            tournament_size: self.tournament_size,
            seed: self.seed,
            band: SimilarityBand { target: self.band_target, tolerance: self.band_tolerance },
            similarity: !self.no_similarity,
            runs: self.runs,
        }
    }
}

#[derive(Args)]
struct ScheduleArgs {
    #[command(flatten)]
    project: ProjectArgs,
    #[command(flatten)]
    ga: GaArgs,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    project: ProjectArgs,
    #[command(flatten)]
    ga: GaArgs,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 8)]
    max_tasks: usize,
    #[arg(long, default_value_t = 15)]
    max_horizon: u32,
    #[arg(long, default_value_t = 10_000_000)]
    max_schedules: u64,
    /// Least acceptable share of non-dominated found members.
    #[arg(long, default_value_t = 0.95)]
    min_nondominated: f64,
    /// Least acceptable hypervolume ratio.
    #[arg(long, default_value_t = 0.95)]
    min_hv_ratio: f64,
    #[command(flatten)]
    common: Common,
}

struct Failure {
    code: u8,
    error: anyhow::Error,
}

type Outcome<T> = Result<T, Failure>;

trait WithCode<T> {
    fn code(self, code: u8) -> Outcome<T>;
}

impl<T, E: Into<anyhow::Error>> WithCode<T> for Result<T, E> {
    fn code(self, code: u8) -> Outcome<T> {
        self.map_err(|e| Failure { code, error: e.into() })
    }
}

fn fail<T>(code: u8, error: anyhow::Error) -> Outcome<T> {
    Err(Failure { code, error })
}

fn main() -> ExitCode {
    let cmd = Cli::command();
    let args = match config::expand(std::env::args_os().collect(), &cmd) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e:#}");
            let io = e.chain().any(|c| c.is::<std::io::Error>());
            return ExitCode::from(if io { EXIT_IO } else { EXIT_SCHEMA });
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_SCHEMA } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Cmd::Ingest(a) => with_threads(&a.common, || cmd_ingest(a)),
        Cmd::Train(a) => with_threads(&a.common, || cmd_train(a)),
        Cmd::Schedule(a) => with_threads(&a.common, || cmd_schedule(a)),
        Cmd::OracleCheck(a) => with_threads(&a.common, || cmd_oracle_check(a)),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}

fn with_threads(common: &Common, f: impl FnOnce() -> Outcome<()> + Send) -> Outcome<()> {
    if common.threads == 0 {
        return fail(EXIT_SCHEMA, anyhow!("--threads must be at least 1"));
    }
    let pool = rayon::ThreadPoolBuilder::new().num_threads(common.threads).build().code(EXIT_OTHER)?;
    pool.install(f)
}

fn delimiter(common: &Common) -> Outcome<u8> {
    u8::try_from(common.delimiter)
        .ok()
        .filter(u8::is_ascii)
        .ok_or_else(|| Failure { code: EXIT_SCHEMA, error: anyhow!("delimiter must be one ASCII character") })
}

fn load_catalog(path: &Path, delimiter: u8) -> Outcome<TaskCatalog> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display())).code(EXIT_IO)?;
    match parse_dataset_with(file, ParseOptions { delimiter }) {
        Ok(c) => Ok(c),
        Err(IngestError::Io(e)) => fail(EXIT_IO, anyhow!(e).context(format!("reading {}", path.display()))),
        Err(e) => fail(EXIT_SCHEMA, anyhow!(e).context(format!("in {}", path.display()))),
    }
}

fn create(path: &Path) -> Outcome<BufWriter<File>> {
    File::create(path).map(BufWriter::new).with_context(|| format!("creating {}", path.display())).code(EXIT_IO)
}

fn write_file(path: &Path, f: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>) -> Outcome<()> {
    let mut w = create(path)?;
    f(&mut w).and_then(|_| w.flush()).with_context(|| format!("writing {}", path.display())).code(EXIT_IO)
}

#[derive(Serialize)]
struct Range {
    min: f64,
    max: f64,
}

impl Range {
    fn of(values: impl Iterator<Item = f64>) -> Option<Range> {
        values.fold(None, |acc, v| match acc {
            None => Some(Range { min: v, max: v }),
            Some(r) => Some(Range { min: r.min.min(v), max: r.max.max(v) }),
        })
    }
}

#[derive(Serialize)]
struct IngestSummary {
    tasks: usize,
    projects: usize,
    failed: usize,
    first_date: Option<String>,
    last_date: Option<String>,
    duration_days: Option<Range>,
    registration_window_days: Option<Range>,
    prize: Option<Range>,
    registrations: Option<Range>,
    submissions: Option<Range>,
    valid_submissions: Option<Range>,
    max_prize_diff: f64,
    max_registration_diff: i64,
    max_submission_diff: i64,
    max_tech_count: usize,
}

fn summarize(c: &TaskCatalog) -> IngestSummary {
    let t = &c.tasks;
    let date = |d: Option<i64>| d.and_then(|d| c.date_of(d)).map(|d| d.to_string());
    IngestSummary {
        tasks: t.len(),
        projects: c.project_ids().len(),
        failed: t.iter().filter(|t| t.status == TaskStatus::Failed).count(),
        first_date: date(t.iter().map(|t| t.registration_start).min()),
        last_date: date(t.iter().map(|t| t.submission_end).max()),
        duration_days: Range::of(t.iter().map(|t| t.duration() as f64)),
        registration_window_days: Range::of(t.iter().map(|t| (t.registration_end - t.registration_start) as f64)),
        prize: Range::of(t.iter().map(|t| t.prize)),
        registrations: Range::of(t.iter().map(|t| t.registrations as f64)),
        submissions: Range::of(t.iter().map(|t| t.submissions as f64)),
        valid_submissions: Range::of(t.iter().map(|t| t.valid_submissions as f64)),
        max_prize_diff: c.norms.max_prize_diff,
        max_registration_diff: c.norms.max_registration_diff,
        max_submission_diff: c.norms.max_submission_diff,
        max_tech_count: c.norms.max_tech_count,
    }
}

fn cmd_ingest(a: &IngestArgs) -> Outcome<()> {
    let catalog = load_catalog(&a.dataset, delimiter(&a.common)?)?;
    let s = summarize(&catalog);
    if a.json {
        let text = serde_json::to_string_pretty(&s).code(EXIT_OTHER)?;
        println!("{text}");
        return Ok(());
    }
    println!("{} tasks in {} projects ({} failed)", s.tasks, s.projects, s.failed);
    if let (Some(first), Some(last)) = (&s.first_date, &s.last_date) {
        println!("dates: {first} to {last}");
    }
    let rows = [
        ("duration (days)", &s.duration_days),
        ("registration window (days)", &s.registration_window_days),
        ("prize", &s.prize),
        ("registrations", &s.registrations),
        ("submissions", &s.submissions),
        ("valid submissions", &s.valid_submissions),
    ];
    for (name, r) in rows {
        if let Some(r) = r {
            println!("{name}: {} to {}", r.min, r.max);
        }
    }
    println!(
        "corpus maxima: prize diff {}, registration diff {} days, submission diff {} days, {} technologies",
        s.max_prize_diff, s.max_registration_diff, s.max_submission_diff, s.max_tech_count
    );
    Ok(())
}

fn parse_widths(text: &str) -> Outcome<Vec<usize>> {
    text.split(',')
        .map(|w| w.trim().parse::<usize>())
        .collect::<Result<Vec<_>, _>>()
        .with_context(|| format!("bad layer widths {text:?}"))
        .code(EXIT_SCHEMA)
}

#[derive(Serialize)]
struct TrainReport {
    samples: usize,
    folds: usize,
    fold_losses: Vec<f64>,
    fold_epochs: Vec<usize>,
    mean_loss: f64,
    std_loss: f64,
    final_epochs: usize,
}

fn cmd_train(a: &TrainArgs) -> Outcome<()> {
    let catalog = load_catalog(&a.dataset, delimiter(&a.common)?)?;
    let config = TrainConfig {
        folds: a.folds,
        max_epochs: a.epochs,
        patience: a.patience,
        learning_rate: a.learning_rate,
        batch_size: a.batch_size,
        seed: a.seed,
        widths: match &a.widths {
            Some(w) => parse_widths(w)?,
            None => DEFAULT_WIDTHS.to_vec(),
        },
        prize_feature: a.prize,
    };
    let samples = build_training_samples(&catalog, a.kernel, a.labels, a.prize);
    let outcome = match train(&samples, &config) {
        Ok(o) => o,
        Err(e @ (TrainError::Config(_) | TrainError::TooFewSamples { .. } | TrainError::BadSample { .. })) => {
            return fail(EXIT_SCHEMA, e.into())
        }
        Err(e) => return fail(EXIT_OTHER, e.into()),
    };
    save_model(&outcome.model, &a.model_out).with_context(|| format!("writing {}", a.model_out.display())).code(EXIT_IO)?;
    println!(
        "{} samples, {} folds: validation MSE {:.6} ± {:.6}",
        samples.len(),
        config.folds,
        outcome.mean_loss,
        outcome.std_loss
    );
    if let Some(path) = &a.report {
        let report = TrainReport {
            samples: samples.len(),
            folds: config.folds,
            fold_losses: outcome.fold_losses.clone(),
            fold_epochs: outcome.fold_epochs.clone(),
            mean_loss: outcome.mean_loss,
            std_loss: outcome.std_loss,
            final_epochs: outcome.model.epochs,
        };
        write_file(path, |w| {
            serde_json::to_writer_pretty(&mut *w, &report)?;
            writeln!(w)
        })?;
    }
    Ok(())
}

/// Everything needed to evaluate schedules of one project.
struct Setup {
    project: Project,
    sim: SimilarityMatrix,
    background: Background,
    model: crowdsched::predictor::PredictorModel,
    /// Historical span of the project's tasks, when known.
    historical_duration: Option<i64>,
}

fn project_error(e: ProjectError) -> Failure {
    let code = match e {
        ProjectError::Infeasible { .. } => EXIT_INFEASIBLE,
        _ => EXIT_SCHEMA,
    };
    Failure { code, error: e.into() }
}

fn select_tasks(catalog: &TaskCatalog, a: &ProjectArgs) -> Outcome<(String, Vec<String>)> {
    if let Some(list) = &a.tasks {
        let ids: Vec<String> = list.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect();
        return Ok((a.project.clone().unwrap_or_else(|| "project".into()), ids));
    }
    let project = match &a.project {
        Some(p) => p.clone(),
        None => match catalog.project_ids().as_slice() {
            [only] => only.clone(),
            [] => "project".into(),
            many => {
                return fail(
                    EXIT_SCHEMA,
                    anyhow!("dataset holds {} projects; choose one with --project", many.len()),
                )
            }
        },
    };
    let ids: Vec<String> = catalog
        .tasks
        .iter()
        .filter(|t| a.project.is_none() && t.project_id.is_none() || t.project_id.as_deref() == Some(project.as_str()))
        .map(|t| t.id.clone())
        .collect();
    if ids.is_empty() {
        return fail(EXIT_SCHEMA, anyhow!("no tasks belong to project {project:?}"));
    }
    Ok((project, ids))
}

fn setup(a: &ProjectArgs, common: &Common) -> Outcome<Setup> {
    let delim = delimiter(common)?;
    let mut catalog = load_catalog(&a.dataset, delim)?;
    if let Some(bg) = &a.background {
        catalog = catalog.merge(&load_catalog(bg, delim)?);
    }
    let edges = match &a.dependencies {
        Some(path) => {
            let file = File::open(path).with_context(|| format!("opening {}", path.display())).code(EXIT_IO)?;
            parse_dependencies(file).map_err(project_error)?
        }
        None => Vec::new(),
    };
    let (project_id, ids) = select_tasks(&catalog, a)?;
    let mut project = build_project(&catalog, &project_id, &ids, &edges).map_err(project_error)?;
    if let Some(h) = a.horizon {
        project = project.with_max_horizon(h).map_err(project_error)?;
    }
    let model = match load_model(&a.model) {
        Ok(m) => m,
        Err(ModelFileError::Io(e)) => {
            return fail(EXIT_IO, anyhow!(e).context(format!("reading {}", a.model.display())))
        }
        Err(e) => return fail(EXIT_MODEL, anyhow!(e).context(format!("in {}", a.model.display()))),
    };

    let anchor = project.tasks().iter().map(|t| t.registration_start).min().unwrap_or(0);
    let finish = project.tasks().iter().map(|t| t.submission_end).max().unwrap_or(0);
    let others: Vec<Task> = catalog.tasks.iter().filter(|t| !ids.contains(&t.id)).cloned().collect();
    let horizon = (project.max_horizon() + crowdsched::predictor::LOOKAHEAD_DAYS) as i64;
    let background = Background::from_tasks(&others, anchor, project.len(), horizon);
    let columns: Vec<Task> = project.tasks().iter().chain(&others).cloned().collect();
    let sim = SimilarityMatrix::cross(project.tasks(), &columns, &catalog.norms, a.kernel);
    Ok(Setup { project, sim, background, model, historical_duration: Some(finish - anchor) })
}

fn evaluator<'a>(s: &'a Setup, a: &ProjectArgs, ga: &GAConfig) -> Evaluator<'a, crowdsched::predictor::PredictorModel> {
    Evaluator::new(&s.project, &s.sim, &s.model)
        .with_background((!s.background.is_empty()).then_some(&s.background))
        .with_basis(a.basis)
        .with_band(ga.band)
        .with_similarity(ga.similarity)
}

fn run_ga(ev: &Evaluator<'_, crowdsched::predictor::PredictorModel>, ga: &GAConfig) -> Outcome<ParetoResult> {
    match evolve(ev, ga) {
        Ok(r) => Ok(r),
        Err(e @ ScheduleError::Config(_)) => fail(EXIT_SCHEMA, e.into()),
        Err(e) => fail(EXIT_OTHER, e.into()),
    }
}

fn write_outputs(dir: &Path, result: &ParetoResult, ga: &GAConfig) -> Outcome<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display())).code(EXIT_IO)?;
    let doc = ResultDocument::new(result, ga.seed, ga.similarity);
    write_file(&dir.join("pareto.json"), |w| doc.write_json(w))?;
    write_file(&dir.join("front.csv"), |w| write_front_csv(result, w))?;
    write_file(&dir.join("diagnostics.csv"), |w| write_diagnostics_csv(result, w))?;
    write_file(&dir.join("plot_duration_failure.csv"), |w| write_plot_data(result, PlotAxis::Failure, w))?;
    write_file(&dir.join("plot_duration_similarity.csv"), |w| write_plot_data(result, PlotAxis::SimilarityCost, w))
}

fn cmd_schedule(a: &ScheduleArgs) -> Outcome<()> {
    let ga = a.ga.config();
    let s = setup(&a.project, &a.common)?;
    let ev = evaluator(&s, &a.project, &ga);
    let result = run_ga(&ev, &ga)?;
    write_outputs(&a.out, &result, &ga)?;
    println!("{} schedules on the front ({} evaluations)", result.front.len(), result.evaluations);
    if let Some(best) = result.recommended() {
        let f = &best.fitness;
        println!(
            "recommended: {} days, similarity cost {:.4}, mean failure {:.4}",
            f.duration, f.similarity_cost, f.failure
        );
        if let Some(hist) = s.historical_duration {
            if let Ok(pct) = schedule_acceleration(hist as f64, f.duration as f64) {
                println!("historical span {hist} days; acceleration {pct:.1}%");
            }
        }
    }
    Ok(())
}

fn cmd_oracle_check(a: &OracleArgs) -> Outcome<()> {
    let ga = a.ga.config();
    let s = setup(&a.project, &a.common)?;
    let ev = evaluator(&s, &a.project, &ga);
    let limits = OracleLimits { max_tasks: a.max_tasks, max_horizon: a.max_horizon, max_schedules: a.max_schedules };
    let exact = match exact_front(&ev, &limits) {
        Ok(x) => x,
        Err(e @ (OracleError::TooManyTasks { .. } | OracleError::HorizonTooLong { .. } | OracleError::TooManySchedules { .. })) => {
            return fail(EXIT_GUARD, e.into())
        }
        Err(e) => return fail(EXIT_OTHER, e.into()),
    };
    let found = run_ga(&ev, &ga)?;
    let cmp = compare_fronts(&found, &exact).code(EXIT_OTHER)?;

    write_outputs(&a.out, &found, &ga)?;
    let exact_result = ParetoResult {
        project: exact.project.clone(),
        task_ids: found.task_ids.clone(),
        front: exact
            .points
            .iter()
            .map(|p| Solution {
                genes: p.genes.clone(),
                starts: p.starts.clone(),
                fitness: p.fitness,
                conflicts: p.conflicts,
                diagnostics: Vec::new(),
            })
            .collect(),
        generations: Vec::new(),
        reference_point: cmp.reference_point,
        evaluations: exact.enumerated as usize,
    };
    write_file(&a.out.join("exact_front.csv"), |w| write_front_csv(&exact_result, w))?;
    write_file(&a.out.join("comparison.json"), |w| cmp.write_json(w))?;

    println!(
        "exact front {} points from {} schedules; found {} members",
        cmp.exact_size, exact.enumerated, cmp.found_size
    );
    println!(
        "non-dominated {:.4}, hypervolume ratio {:.4}, regret {:?}",
        cmp.nondominated_fraction, cmp.hypervolume_ratio, cmp.regret
    );
    if cmp.nondominated_fraction < a.min_nondominated || cmp.hypervolume_ratio < a.min_hv_ratio {
        return fail(
            EXIT_THRESHOLD,
            anyhow!(
                "thresholds violated: non-dominated {:.4} (min {}), hypervolume ratio {:.4} (min {})",
                cmp.nondominated_fraction,
                a.min_nondominated,
                cmp.hypervolume_ratio,
                a.min_hv_ratio
            ),
        );
    }
    Ok(())
}
