//! Pairwise task similarity over seven heterogeneous features.
//!
//! Each pair of tasks is first mapped to a [`FeatureVector`] whose components
//! are all agreement scores in `[0, 1]` (1 = identical on that feature). A
//! [`SimilarityKernel`] then collapses the vector to a single score.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::model::{CorpusNorms, Task};

pub const FEATURE_COUNT: usize = 7;

/// Per-feature agreement between two tasks, each component in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub prize_sim: f64,
    pub reg_date_sim: f64,
    pub sub_date_sim: f64,
    pub type_match: f64,
    pub tech_match: f64,
    pub platform_match: f64,
    pub text_sim: f64,
}

impl FeatureVector {
    pub fn from_array(v: [f64; FEATURE_COUNT]) -> Self {
        FeatureVector {
            prize_sim: v[0],
            reg_date_sim: v[1],
            sub_date_sim: v[2],
            type_match: v[3],
            tech_match: v[4],
            platform_match: v[5],
            text_sim: v[6],
        }
    }

    pub fn to_array(self) -> [f64; FEATURE_COUNT] {
        [
            self.prize_sim,
            self.reg_date_sim,
            self.sub_date_sim,
            self.type_match,
            self.tech_match,
            self.platform_match,
            self.text_sim,
        ]
    }
}

/// How a feature vector is reduced to one similarity score.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SimilarityKernel {
    /// Projection onto the all-ones direction normalized by its squared
    /// length: `v·1 / (‖1‖·‖1‖)`, i.e. the mean agreement. Monotone in every
    /// component.
    #[default]
    MeanAgreement,
    /// Cosine of the angle between `v` and the all-ones vector,
    /// `v·1 / (‖v‖·‖1‖)`. Not monotone: raising an already dominant component
    /// can lower the score.
    CosineToIdentity,
}

impl SimilarityKernel {
    pub fn apply(self, v: &FeatureVector) -> f64 {
        let a = v.to_array();
        let dot: f64 = a.iter().sum();
        let score = match self {
            SimilarityKernel::MeanAgreement => dot / FEATURE_COUNT as f64,
            SimilarityKernel::CosineToIdentity => {
                let norm_sq: f64 = a.iter().map(|x| x * x).sum();
                if norm_sq == 0.0 {
                    return 0.0;
                }
                // One square root of the product keeps v = 1 exactly at 1.0.
                dot / (norm_sq * FEATURE_COUNT as f64).sqrt()
            }
        };
        score.clamp(0.0, 1.0)
    }
}

impl std::str::FromStr for SimilarityKernel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "mean" | "mean-agreement" => Ok(SimilarityKernel::MeanAgreement),
            "cosine" | "cosine-to-identity" => Ok(SimilarityKernel::CosineToIdentity),
            other => Err(format!("unknown similarity kernel {other:?}")),
        }
    }
}

// 1 − |Δ| / max, with a zero denominator meaning "identical by vacuity".
fn closeness(diff: f64, max: f64) -> f64 {
    if max <= 0.0 {
        return 1.0;
    }
    (1.0 - diff.abs() / max).clamp(0.0, 1.0)
}

pub fn feature_vector(a: &Task, b: &Task, norms: &CorpusNorms) -> FeatureVector {
    let prize_sim = closeness(a.prize - b.prize, norms.max_prize_diff);
    let reg_date_sim = closeness(
        (a.registration_start - b.registration_start) as f64,
        norms.max_registration_diff as f64,
    );
    let sub_date_sim = closeness((a.submission_end - b.submission_end) as f64, norms.max_submission_diff as f64);
    let type_match = if a.task_type == b.task_type { 1.0 } else { 0.0 };
    let tech_match = {
        let denom = a.technologies.len().max(b.technologies.len());
        if denom == 0 {
            1.0
        } else {
            a.technologies.intersection(&b.technologies).count() as f64 / denom as f64
        }
    };
    let platform_match = if a.platforms == b.platforms { 1.0 } else { 0.0 };
    let text_sim = if a.requirement_text.trim().is_empty() && b.requirement_text.trim().is_empty() {
        1.0
    } else {
        text_similarity(&a.requirement_text, &b.requirement_text)
    };
    FeatureVector { prize_sim, reg_date_sim, sub_date_sim, type_match, tech_match, platform_match, text_sim }
}

/// Cosine between the pair's feature vector and the all-ones vector.
pub fn cosine_similarity(a: &Task, b: &Task, norms: &CorpusNorms) -> f64 {
    SimilarityKernel::CosineToIdentity.apply(&feature_vector(a, b, norms))
}

pub fn similarity(a: &Task, b: &Task, norms: &CorpusNorms, kernel: SimilarityKernel) -> f64 {
    kernel.apply(&feature_vector(a, b, norms))
}

fn term_frequencies(text: &str) -> BTreeMap<String, u32> {
    let mut tf = BTreeMap::new();
    for token in text.split(|c: char| !c.is_alphanumeric()).filter(|t| !t.is_empty()) {
        *tf.entry(token.to_lowercase()).or_insert(0) += 1;
    }
    tf
}

/// Cosine of term-frequency vectors; 0 when either text has no tokens.
pub fn text_similarity(a: &str, b: &str) -> f64 {
    let ta = term_frequencies(a);
    let tb = term_frequencies(b);
    if ta.is_empty() || tb.is_empty() {
        return 0.0;
    }
    let dot: f64 = ta
        .iter()
        .filter_map(|(term, &ca)| tb.get(term).map(|&cb| ca as f64 * cb as f64))
        .sum();
    let norm_sq = |tf: &BTreeMap<String, u32>| tf.values().map(|&c| (c as f64).powi(2)).sum::<f64>();
    (dot / (norm_sq(&ta) * norm_sq(&tb)).sqrt()).clamp(0.0, 1.0)
}

/// Dense similarity table. Square when built from one task list, rectangular
/// when project tasks are compared against project plus background tasks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarityMatrix {
    row_ids: Vec<String>,
    col_ids: Vec<String>,
    values: Vec<f64>,
}

impl SimilarityMatrix {
    pub fn rows(&self) -> usize {
        self.row_ids.len()
    }

    pub fn cols(&self) -> usize {
        self.col_ids.len()
    }

    pub fn row_ids(&self) -> &[String] {
        &self.row_ids
    }

    pub fn col_ids(&self) -> &[String] {
        &self.col_ids
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.col_ids.len() + col]
    }

    /// Builds a table from a precomputed score function, mostly for tests.
    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let ids: Vec<String> = (0..n).map(|i| i.to_string()).collect();
        let values = (0..n * n).map(|k| f(k / n, k % n)).collect();
        SimilarityMatrix { row_ids: ids.clone(), col_ids: ids, values }
    }

    /// `rows` × `cols` table of pairwise scores.
    pub fn cross(rows: &[Task], cols: &[Task], norms: &CorpusNorms, kernel: SimilarityKernel) -> Self {
        let values = rows
            .iter()
            .flat_map(|a| cols.iter().map(move |b| similarity(a, b, norms, kernel)))
            .collect();
        SimilarityMatrix {
            row_ids: rows.iter().map(|t| t.id.clone()).collect(),
            col_ids: cols.iter().map(|t| t.id.clone()).collect(),
            values,
        }
    }

    /// Delimited export: header of column ids, one row per task, 6 decimals.
    pub fn write_csv<W: Write>(&self, mut w: W, delimiter: char) -> std::io::Result<()> {
        write!(w, "task_id")?;
        for id in &self.col_ids {
            write!(w, "{delimiter}{id}")?;
        }
        writeln!(w)?;
        for (r, id) in self.row_ids.iter().enumerate() {
            write!(w, "{id}")?;
            for c in 0..self.cols() {
                write!(w, "{delimiter}{:.6}", self.get(r, c))?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

/// All-pairs similarity of one task list. Only the upper triangle is
/// computed; the lower one is mirrored, so the result is exactly symmetric.
pub fn similarity_matrix(tasks: &[Task], norms: &CorpusNorms, kernel: SimilarityKernel) -> SimilarityMatrix {
    let n = tasks.len();
    let mut values = vec![0.0; n * n];
    for i in 0..n {
        values[i * n + i] = similarity(&tasks[i], &tasks[i], norms, kernel);
        for j in i + 1..n {
            let s = similarity(&tasks[i], &tasks[j], norms, kernel);
            values[i * n + j] = s;
            values[j * n + i] = s;
        }
    }
    let ids: Vec<String> = tasks.iter().map(|t| t.id.clone()).collect();
    SimilarityMatrix { row_ids: ids.clone(), col_ids: ids, values }
}
