//! Population initialization, two-point crossover and shuffle mutation.

use rand::Rng;

use super::repair::repair_with_latest;
use crate::model::Project;

/// Earliest schedule first, then random genes in `[0, max_horizon]`, each
/// dependency-repaired.
pub fn init_population<R: Rng + ?Sized>(project: &Project, size: usize, latest: &[u32], rng: &mut R) -> Vec<Vec<u32>> {
    let mut pop = Vec::with_capacity(size);
    if size == 0 {
        return pop;
    }
    pop.push(project.earliest_starts());
    while pop.len() < size {
        pop.push(random_chromosome(project, latest, rng));
    }
    pop
}

pub fn random_chromosome<R: Rng + ?Sized>(project: &Project, latest: &[u32], rng: &mut R) -> Vec<u32> {
    let h = project.max_horizon();
    let mut genes: Vec<u32> = (0..project.len()).map(|_| rng.gen_range(0..=h)).collect();
    repair_with_latest(&mut genes, project, latest);
    genes
}

/// Exchanges the genes at positions `lo..hi` between the two parents.
pub fn crossover_at(a: &[u32], b: &[u32], lo: usize, hi: usize) -> (Vec<u32>, Vec<u32>) {
    let mut ca = a.to_vec();
    let mut cb = b.to_vec();
    ca[lo..hi].copy_from_slice(&b[lo..hi]);
    cb[lo..hi].copy_from_slice(&a[lo..hi]);
    (ca, cb)
}

/// Two distinct cut points drawn from `0..=len` and swapped segment between
/// them. Parents shorter than two genes are copied.
pub fn crossover_two_point<R: Rng + ?Sized>(a: &[u32], b: &[u32], rng: &mut R) -> (Vec<u32>, Vec<u32>) {
    let len = a.len();
    if len < 2 {
        return (a.to_vec(), b.to_vec());
    }
    let x = rng.gen_range(0..=len);
    let mut y = rng.gen_range(0..len);
    if y >= x {
        y += 1;
    }
    crossover_at(a, b, x.min(y), x.max(y))
}

/// Selects each gene with probability `1/len` and swaps it with a uniformly
/// chosen other position. Returns how many genes were selected.
pub fn shuffle_genes<R: Rng + ?Sized>(genes: &mut [u32], rng: &mut R) -> usize {
    let len = genes.len();
    if len < 2 {
        return 0;
    }
    let p = 1.0 / len as f64;
    let mut selected = 0;
    for i in 0..len {
        if rng.gen_bool(p) {
            selected += 1;
            let mut j = rng.gen_range(0..len - 1);
            if j >= i {
                j += 1;
            }
            genes.swap(i, j);
        }
    }
    selected
}

/// With probability `rate` applies [`shuffle_genes`]. Returns whether the
/// chromosome was varied.
pub fn mutate_shuffle<R: Rng + ?Sized>(genes: &mut [u32], rate: f64, rng: &mut R) -> bool {
    if !rng.gen_bool(rate) {
        return false;
    }
    shuffle_genes(genes, rng);
    true
}
