#![allow(dead_code)]

use crowdsched::model::{Project, Task};
use crowdsched::predictor::TaskFeatures;
use crowdsched::similarity::SimilarityMatrix;
use rand::Rng;

pub fn task(id: &str, duration: i64, window: i64) -> Task {
    let mut t = Task::new(id, 0, duration);
    t.registration_end = window.min(duration);
    t
}

/// Random acyclic project: edges only run from lower to higher index.
pub fn random_project<R: Rng>(rng: &mut R, n: usize, max_duration: i64, edge_p: f64) -> Project {
    let tasks: Vec<Task> = (0..n)
        .map(|i| {
            let d = rng.gen_range(1..=max_duration);
            task(&format!("t{i}"), d, rng.gen_range(1..=d))
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

/// Symmetric similarity table with unit diagonal.
pub fn random_similarity<R: Rng>(rng: &mut R, n: usize) -> SimilarityMatrix {
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

/// Deterministic stand-in for a trained predictor: risk rises with the
/// number of open tasks and their similarity, falls with duration.
pub fn mock_model(f: &TaskFeatures) -> f64 {
    let z = -1.5 + 0.6 * f.open_tasks + 1.2 * f.avg_similarity - 0.05 * f.duration;
    1.0 / (1.0 + (-z).exp())
}
