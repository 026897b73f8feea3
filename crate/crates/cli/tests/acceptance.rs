//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use crowdsched::model::{CorpusNorms, Project, Task};
use crowdsched::oracle::{compare_fronts, exact_front, OracleLimits};
use crowdsched::predictor::{train, Gradients, Network, TaskFeatures, TrainConfig, TrainingSample};
use crowdsched::scheduler::{
    crowding_distance, evolve, fast_nondominated_sort, repair_dependencies, repair_similarity, schedule_acceleration,
    Evaluator, GAConfig, Objectives, SimilarityBand,
};
use crowdsched::similarity::{feature_vector, similarity, FeatureVector, SimilarityKernel, SimilarityMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn mock_model(f: &TaskFeatures) -> f64 {
    let z = -1.5 + 0.6 * f.open_tasks + 1.2 * f.avg_similarity - 0.05 * f.duration;
    1.0 / (1.0 + (-z).exp())
}

fn random_project<R: Rng>(rng: &mut R, n: usize, max_duration: i64, edge_p: f64) -> Project {
    let tasks: Vec<Task> = (0..n)
        .map(|i| {
            let d = rng.gen_range(1..=max_duration);
            let mut t = Task::new(format!("t{i}"), 0, d);
            t.registration_end = rng.gen_range(1..=d);
            t
        })
        .collect();
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen_bool(edge_p) {
                edges.push((a, b));
            }
        }
    }
    Project::new("random", tasks, edges).unwrap()
}

fn random_similarity<R: Rng>(rng: &mut R, n: usize) -> SimilarityMatrix {
    let mut v = vec![vec![1.0; n]; n];
    for a in 0..n {
        for b in a + 1..n {
            let s = rng.gen_range(0.3..1.0);
            v[a][b] = s;
            v[b][a] = s;
        }
    }
    SimilarityMatrix::from_fn(n, |a, b| v[a][b])
}

// 1. Published accelerations: (final, recommended, rounded figure as printed).
fn acceleration_arithmetic() -> Verdict {
    let published = [("Project I", 393.0, 121.0, 70.0), ("Project III", 88.0, 40.0, 55.0), ("Motivating Example", 110.0, 73.0, 33.0)];
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, fin, rec, pct) in published {
        let got = schedule_acceleration(fin, rec).unwrap();
        ok &= (got - pct).abs() <= 1.0;
        parts.push(format!("{name} {got:.1}% vs {pct}%"));
    }
    // Project II is printed as 78% but its own durations give 68%.
    let p2 = schedule_acceleration(203.0, 65.0).unwrap();
    let flagged = (p2 - 78.0).abs() > 1.0 && (p2 - 68.0).abs() <= 1.0;
    ok &= flagged;
    parts.push(format!("Project II computes {p2:.1}% (printed 78%, flagged inconsistent)"));
    verdict(ok, parts.join("; "))
}

// 2. Evolved fronts against exhaustive fronts.
fn oracle_front_quality() -> Verdict {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst_nd: f64 = 1.0;
    let mut worst_hv: f64 = f64::INFINITY;
    let mut failures = 0;
    let projects = 25;
    for case in 0..projects {
        let n = rng.gen_range(4..=6);
        let project = loop {
            let p = random_project(&mut rng, n, 3, 0.3);
            let needed = p.earliest_starts().into_iter().max().unwrap();
            let h = p.max_horizon().min(12).max(needed);
            if h <= 12 {
                break p.with_max_horizon(h).unwrap();
            }
        };
        let sim = random_similarity(&mut rng, n);
        let ev = Evaluator::new(&project, &sim, &mock_model);
        let exact = exact_front(&ev, &OracleLimits::default()).unwrap();
        let found = evolve(&ev, &GAConfig { seed: case as u64, ..GAConfig::default() }).unwrap();
        let cmp = compare_fronts(&found, &exact).unwrap();
        worst_nd = worst_nd.min(cmp.nondominated_fraction);
        worst_hv = worst_hv.min(cmp.hypervolume_ratio);
        if cmp.nondominated_fraction < 0.95 || cmp.hypervolume_ratio < 0.95 {
            failures += 1;
        }
    }
    let elapsed = start.elapsed();
    let ok = failures == 0 && elapsed < Duration::from_secs(300);
    verdict(
        ok,
        format!(
            "{projects} projects, {failures} below threshold; worst non-dominated {worst_nd:.3} (min 0.95), worst HV ratio {worst_hv:.4} (min 0.95); {:.1}s (max 300s)",
            elapsed.as_secs_f64()
        ),
    )
}

fn param(net: &mut Network, layer: usize, bias: bool, i: usize) -> &mut f64 {
    let l = &mut net.layers[layer];
    if bias {
        &mut l.biases[i]
    } else {
        &mut l.weights[i]
    }
}

// 3. Backpropagation against central differences.
fn gradient_check() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    for _ in 0..20 {
        let depth = rng.gen_range(2..=4);
        let mut widths: Vec<usize> = (0..depth).map(|_| rng.gen_range(1..=8)).collect();
        widths.push(1);
        let mut net = Network::new(&widths, &mut rng);
        for layer in &mut net.layers {
            layer.biases.iter_mut().for_each(|b| *b = rng.gen_range(-0.5..0.5));
        }
        let xs: Vec<Vec<f64>> = (0..4).map(|_| (0..widths[0]).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
        let ys: Vec<f64> = (0..4).map(|_| rng.gen()).collect();
        let refs: Vec<&[f64]> = xs.iter().map(Vec::as_slice).collect();
        let mut grads = Gradients::zeros_like(&net);
        net.batch_gradients(&refs, &ys, &mut grads);
        let h = 1e-6;
        let mut probe = net.clone();
        for l in 0..net.layers.len() {
            for (bias, count) in [(false, net.layers[l].weights.len()), (true, net.layers[l].biases.len())] {
                for i in 0..count {
                    let orig = *param(&mut probe, l, bias, i);
                    *param(&mut probe, l, bias, i) = orig + h;
                    let up = probe.mse(&refs, &ys);
                    *param(&mut probe, l, bias, i) = orig - h;
                    let down = probe.mse(&refs, &ys);
                    *param(&mut probe, l, bias, i) = orig;
                    let numeric = (up - down) / (2.0 * h);
                    let analytic = if bias { grads.biases[l][i] } else { grads.weights[l][i] };
                    // Relative error with a floor so exactly-zero gradients compare absolutely.
                    let scale = analytic.abs().max(numeric.abs()).max(1e-7);
                    worst = worst.max((analytic - numeric).abs() / scale);
                    checked += 1;
                }
            }
        }
    }
    verdict(worst < 1e-4, format!("20 networks, {checked} parameters; worst relative error {worst:.2e} (max 1e-4)"))
}

// 4. Ten-fold training on a thresholded open-task rule.
fn training_property() -> Verdict {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let samples: Vec<TrainingSample> = (0..2000)
        .map(|_| {
            let open = rng.gen_range(0..15) as f64;
            let label = if open > 6.0 { 0.9 } else { 0.1 };
            TrainingSample {
                features: [rng.gen_range(3.0..30.0), rng.gen_range(100.0..2000.0), open, rng.gen()],
                label,
            }
        })
        .collect();
    let out = train(&samples, &TrainConfig { seed: 4, ..TrainConfig::default() }).unwrap();
    let elapsed = start.elapsed();
    verdict(
        out.mean_loss < 0.05 && elapsed < Duration::from_secs(120),
        format!(
            "2000 samples, 10 folds: MSE {:.5} ± {:.5} (max 0.05), worst fold {:.5}; {:.1}s (max 120s)",
            out.mean_loss,
            out.std_loss,
            out.fold_losses.iter().copied().fold(0.0, f64::max),
            elapsed.as_secs_f64()
        ),
    )
}

// 5. Repair soundness on random DAGs.
fn repair_soundness() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let band = SimilarityBand::default();
    let (mut feasible, mut fixpoint) = (0, 0);
    let trials = 10_000;
    for _ in 0..trials {
        let n = rng.gen_range(2..=10);
        let edge_p = rng.gen_range(0.0..0.6);
        let project = random_project(&mut rng, n, 8, edge_p);
        let h = project.max_horizon();
        let mut genes: Vec<u32> = (0..n).map(|_| rng.gen_range(0..=h)).collect();
        repair_dependencies(&mut genes, &project);
        let d = project.durations();
        if project.edges().iter().all(|&(a, b)| genes[b] >= genes[a] + d[a] + 1) && genes.iter().all(|&g| g <= h) {
            feasible += 1;
        }
        let sim = random_similarity(&mut rng, n);
        let report = repair_similarity(&mut genes, &project, &sim, band);
        let mut again = genes.clone();
        let second = repair_similarity(&mut again, &project, &sim, band);
        if report.passes <= n && !report.exhausted && second.moves == 0 && again == genes {
            fixpoint += 1;
        }
    }
    verdict(
        feasible == trials && fixpoint == trials,
        format!("{trials} chromosomes: {feasible} feasible after dependency repair, {fixpoint} similarity fixpoints within n passes"),
    )
}

fn random_task<R: Rng>(rng: &mut R) -> Task {
    const TECH: [&str; 5] = ["Java", "Spring", "Android", "HTML", "Python"];
    const WORDS: [&str; 6] = ["api", "portal", "login", "report", "mobile", "test"];
    let tr = rng.gen_range(0..100);
    let mut t = Task::new("x", tr, tr + rng.gen_range(1..30));
    t.prize = rng.gen_range(0..2000) as f64;
    t.task_type = ["Code", "Assembly", "Test"][rng.gen_range(0..3)].to_string();
    t.technologies = (0..rng.gen_range(0..4)).map(|_| TECH[rng.gen_range(0..5)].to_string()).collect::<BTreeSet<_>>();
    t.platforms = (0..rng.gen_range(0..3)).map(|_| ["Web", "Android"][rng.gen_range(0..2)].to_string()).collect();
    t.requirement_text = (0..rng.gen_range(0..5)).map(|_| WORDS[rng.gen_range(0..6)]).collect::<Vec<_>>().join(" ");
    t
}

// 6. Similarity metric properties.
fn similarity_properties() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let norms = CorpusNorms { max_prize_diff: 2000.0, max_registration_diff: 100, max_submission_diff: 130, max_tech_count: 5 };
    let kernel = SimilarityKernel::MeanAgreement;
    let (mut sym, mut range, mut refl, mut mono, mut perturbations) = (0, 0, 0, 0, 0);
    let pairs = 1000;
    for _ in 0..pairs {
        let (a, b) = (random_task(&mut rng), random_task(&mut rng));
        let s = similarity(&a, &b, &norms, kernel);
        sym += usize::from(s == similarity(&b, &a, &norms, kernel));
        range += usize::from((0.0..=1.0).contains(&s));
        refl += usize::from(similarity(&a, &a, &norms, kernel) == 1.0);
        let v = feature_vector(&a, &b, &norms).to_array();
        for k in 0..v.len() {
            let mut up = v;
            up[k] = (v[k] + rng.gen_range(0.0..1.0)).min(1.0);
            perturbations += 1;
            mono += usize::from(kernel.apply(&FeatureVector::from_array(up)) >= kernel.apply(&FeatureVector::from_array(v)));
        }
    }
    verdict(
        sym == pairs && range == pairs && refl == pairs && mono == perturbations,
        format!("{pairs} pairs: symmetric {sym}, in range {range}, self-similar {refl}; monotone {mono}/{perturbations} single-feature increases"),
    )
}

// 7. Non-dominated sorting and crowding boundaries.
fn nsga_internals() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let dom = |a: &Objectives, b: &Objectives| a.iter().zip(b).all(|(x, y)| x <= y) && a != b;
    let (mut equal, mut boundaries) = (0, 0);
    let populations = 100;
    for _ in 0..populations {
        let n = rng.gen_range(1..=60);
        let pts: Vec<Objectives> = (0..n).map(|_| [0, 0, 0].map(|_: i32| rng.gen_range(0..8) as f64)).collect();
        let mut left: BTreeSet<usize> = (0..n).collect();
        let mut brute = Vec::new();
        while !left.is_empty() {
            let front: BTreeSet<usize> =
                left.iter().copied().filter(|&i| !left.iter().any(|&j| dom(&pts[j], &pts[i]))).collect();
            left.retain(|i| !front.contains(i));
            brute.push(front);
        }
        let fronts = fast_nondominated_sort(&pts);
        let fast: Vec<BTreeSet<usize>> = fronts.iter().map(|f| f.iter().copied().collect()).collect();
        equal += usize::from(fast == brute);
        let mut ok = true;
        for front in &fronts {
            let dist = crowding_distance(&pts, front);
            for k in 0..3 {
                let lo = front.iter().map(|&i| pts[i][k]).fold(f64::INFINITY, f64::min);
                let hi = front.iter().map(|&i| pts[i][k]).fold(f64::NEG_INFINITY, f64::max);
                ok &= front.iter().zip(&dist).any(|(&i, d)| pts[i][k] == lo && d.is_infinite());
                ok &= front.iter().zip(&dist).any(|(&i, d)| pts[i][k] == hi && d.is_infinite());
            }
        }
        boundaries += usize::from(ok);
    }
    verdict(
        equal == populations && boundaries == populations,
        format!("{populations} populations: {equal} exact front matches, {boundaries} with infinite boundary distances"),
    )
}

fn schedule_run(out: &Path, name: &str, extra: &[&str]) -> Result<(), String> {
    let s = |p: &Path| p.to_str().unwrap().to_string();
    let mut args = vec![
        "schedule".to_string(),
        "--dataset".into(),
        s(&fixture(&format!("{name}.csv"))),
        "--dependencies".into(),
        s(&fixture(&format!("{name}.deps"))),
        "--model".into(),
        s(&fixture("mock_model.txt")),
        "--out".into(),
        s(out),
        "--seed".into(),
        "42".into(),
    ];
    args.extend(extra.iter().map(|a| a.to_string()));
    let o = Command::new(env!("CARGO_BIN_EXE_crowdsched")).args(&args).output().map_err(|e| e.to_string())?;
    if o.status.success() {
        Ok(())
    } else {
        Err(String::from_utf8_lossy(&o.stderr).into_owned())
    }
}

// 8. Byte-identical outputs from identical invocations.
fn determinism() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    if let Err(e) = schedule_run(&a, "motivating19", &["--project", "ME19", "--background", fixture("background.csv").to_str().unwrap()])
        .and_then(|_| schedule_run(&b, "motivating19", &["--project", "ME19", "--background", fixture("background.csv").to_str().unwrap(), "--threads", "4"]))
    {
        return verdict(false, format!("schedule failed: {e}"));
    }
    let files = ["pareto.json", "front.csv", "diagnostics.csv", "plot_duration_failure.csv", "plot_duration_similarity.csv"];
    let same = files.iter().filter(|f| fs::read(a.join(f)).ok() == fs::read(b.join(f)).ok()).count();
    verdict(same == files.len(), format!("{same}/{} output files byte-identical across two runs (1 and 4 threads)", files.len()))
}

fn recommended(out: &Path) -> (u64, f64) {
    let v: Value = serde_json::from_str(&fs::read_to_string(out.join("pareto.json")).unwrap()).unwrap();
    let best = &v["front"][0];
    let diags = best["diagnostics"].as_array().unwrap();
    let mean = diags.iter().map(|d| d["avg_similarity"].as_f64().unwrap()).sum::<f64>() / diags.len() as f64;
    (best["fitness"]["duration"].as_u64().unwrap(), mean)
}

// 9. Similarity ablation on the 11-task example.
fn ablation_shape() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let (full, ablated) = (dir.path().join("full"), dir.path().join("ablated"));
    if let Err(e) = schedule_run(&full, "example11", &[]).and_then(|_| schedule_run(&ablated, "example11", &["--no-similarity"])) {
        return verdict(false, format!("schedule failed: {e}"));
    }
    let (d_full, s_full) = recommended(&full);
    let (d_abl, s_abl) = recommended(&ablated);
    verdict(
        d_abl <= d_full && s_full <= s_abl,
        format!(
            "recommended schedules: full {d_full} days, mean arrival similarity {s_full:.3}; without similarity {d_abl} days, {s_abl:.3}"
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Verdict); 9] = [
        ("1 acceleration arithmetic", acceleration_arithmetic),
        ("2 oracle front quality", oracle_front_quality),
        ("3 gradient check", gradient_check),
        ("4 predictor training", training_property),
        ("5 repair soundness", repair_soundness),
        ("6 similarity properties", similarity_properties),
        ("7 NSGA-II internals", nsga_internals),
        ("8 determinism", determinism),
        ("9 ablation shape", ablation_shape),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let v = check();
        failed += usize::from(!v.pass);
        println!(
            "[{}] criterion {name}: {} ({:.1}s)",
            if v.pass { "PASS" } else { "FAIL" },
            v.detail,
            start.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {}/9 criteria passed", 9 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
