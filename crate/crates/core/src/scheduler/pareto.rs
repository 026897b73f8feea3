//! Pareto dominance, non-dominated sorting, crowding distance, crowded
//! tournaments and the 3-objective hypervolume. All objectives are minimized.

use std::cmp::Ordering;

use rand::Rng;

pub const OBJECTIVES: usize = 3;

pub type Objectives = [f64; OBJECTIVES];

/// `a` is no worse than `b` everywhere and strictly better somewhere.
#[inline]
pub fn dominates(a: &Objectives, b: &Objectives) -> bool {
    let mut strictly = false;
    for k in 0..OBJECTIVES {
        if a[k] > b[k] {
            return false;
        }
        if a[k] < b[k] {
            strictly = true;
        }
    }
    strictly
}

/// `a` is no worse than `b` in every objective.
#[inline]
pub fn weakly_dominates(a: &Objectives, b: &Objectives) -> bool {
    (0..OBJECTIVES).all(|k| a[k] <= b[k])
}

/// Splits `points` into successive non-dominated fronts (indices into
/// `points`, ascending within each front).
pub fn fast_nondominated_sort(points: &[Objectives]) -> Vec<Vec<usize>> {
    let n = points.len();
    let mut dominated_by_me: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut domination_count = vec![0usize; n];
    for i in 0..n {
        for j in i + 1..n {
            if dominates(&points[i], &points[j]) {
                dominated_by_me[i].push(j);
                domination_count[j] += 1;
            } else if dominates(&points[j], &points[i]) {
                dominated_by_me[j].push(i);
                domination_count[i] += 1;
            }
        }
    }
    let mut fronts = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&i| domination_count[i] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &i in &current {
            for &j in &dominated_by_me[i] {
                domination_count[j] -= 1;
                if domination_count[j] == 0 {
                    next.push(j);
                }
            }
        }
        next.sort_unstable();
        fronts.push(current);
        current = next;
    }
    fronts
}

/// Front rank (0 = first front) of every point.
pub fn ranks(fronts: &[Vec<usize>], n: usize) -> Vec<usize> {
    let mut rank = vec![usize::MAX; n];
    for (r, front) in fronts.iter().enumerate() {
        for &i in front {
            rank[i] = r;
        }
    }
    rank
}

/// Crowding distance of each member of `front`, in the order given.
/// Boundary members of every objective get infinity; objectives with zero
/// range add nothing.
pub fn crowding_distance(points: &[Objectives], front: &[usize]) -> Vec<f64> {
    let m = front.len();
    let mut dist = vec![0.0; m];
    if m <= 2 {
        return vec![f64::INFINITY; m];
    }
    let mut order: Vec<usize> = (0..m).collect();
    for k in 0..OBJECTIVES {
        order.sort_by(|&a, &b| points[front[a]][k].total_cmp(&points[front[b]][k]).then(a.cmp(&b)));
        let lo = points[front[order[0]]][k];
        let hi = points[front[order[m - 1]]][k];
        dist[order[0]] = f64::INFINITY;
        dist[order[m - 1]] = f64::INFINITY;
        let range = hi - lo;
        if range <= 0.0 {
            continue;
        }
        for w in 1..m - 1 {
            let gap = points[front[order[w + 1]]][k] - points[front[order[w - 1]]][k];
            dist[order[w]] += gap / range;
        }
    }
    dist
}

/// Crowded-comparison order: lower rank first, then larger distance.
pub fn crowded_cmp(rank_a: usize, dist_a: f64, rank_b: usize, dist_b: f64) -> Ordering {
    rank_a.cmp(&rank_b).then_with(|| dist_b.total_cmp(&dist_a))
}

/// Rank and crowding distance of every member of a population.
#[derive(Debug, Clone, PartialEq)]
pub struct Ranking {
    pub fronts: Vec<Vec<usize>>,
    pub rank: Vec<usize>,
    pub distance: Vec<f64>,
}

impl Ranking {
    pub fn of(points: &[Objectives]) -> Self {
        Self::from_fronts(points, fast_nondominated_sort(points))
    }

    /// Constrained domination: fewer violations always ranks first; equal
    /// violation counts compare by objectives.
    pub fn constrained(points: &[Objectives], violations: &[usize]) -> Self {
        assert_eq!(points.len(), violations.len());
        let mut levels: Vec<usize> = violations.to_vec();
        levels.sort_unstable();
        levels.dedup();
        let mut fronts = Vec::new();
        for level in levels {
            let members: Vec<usize> = (0..points.len()).filter(|&i| violations[i] == level).collect();
            let sub: Vec<Objectives> = members.iter().map(|&i| points[i]).collect();
            for front in fast_nondominated_sort(&sub) {
                fronts.push(front.into_iter().map(|j| members[j]).collect());
            }
        }
        Self::from_fronts(points, fronts)
    }

    fn from_fronts(points: &[Objectives], fronts: Vec<Vec<usize>>) -> Self {
        let rank = ranks(&fronts, points.len());
        let mut distance = vec![0.0; points.len()];
        for front in &fronts {
            for (&i, d) in front.iter().zip(crowding_distance(points, front)) {
                distance[i] = d;
            }
        }
        Ranking { fronts, rank, distance }
    }

    /// Tournament of `size` uniformly drawn contestants (with replacement).
    /// The crowded-comparison winner is returned; contestants tied for the
    /// win are picked uniformly.
    pub fn tournament<R: Rng + ?Sized>(&self, size: usize, rng: &mut R) -> usize {
        let n = self.rank.len();
        let mut best = rng.gen_range(0..n);
        let mut tied = 1u32;
        for _ in 1..size.max(1) {
            let c = rng.gen_range(0..n);
            match crowded_cmp(self.rank[c], self.distance[c], self.rank[best], self.distance[best]) {
                Ordering::Less => {
                    best = c;
                    tied = 1;
                }
                Ordering::Equal => {
                    tied += 1;
                    if rng.gen_range(0..tied) == 0 {
                        best = c;
                    }
                }
                Ordering::Greater => {}
            }
        }
        best
    }

    /// Keeps `keep` members: whole fronts while they fit, then the most
    /// spread-out members of the first front that does not. Ties on distance
    /// keep the lower index.
    pub fn survivors(&self, keep: usize) -> Vec<usize> {
        let mut chosen = Vec::with_capacity(keep);
        for front in &self.fronts {
            if chosen.len() + front.len() <= keep {
                chosen.extend_from_slice(front);
                continue;
            }
            let mut rest = front.clone();
            rest.sort_by(|&a, &b| self.distance[b].total_cmp(&self.distance[a]).then(a.cmp(&b)));
            rest.truncate(keep - chosen.len());
            chosen.extend(rest);
            break;
        }
        chosen
    }
}

/// Indices of the non-dominated members of `points`.
pub fn nondominated(points: &[Objectives]) -> Vec<usize> {
    (0..points.len())
        .filter(|&i| !points.iter().any(|q| dominates(q, &points[i])))
        .collect()
}

/// Reference point for hypervolume: component-wise worst value ×1.1. An
/// objective whose worst value is not positive uses 1.0 so it still spans a
/// nonzero slab.
pub fn reference_point<'a>(points: impl IntoIterator<Item = &'a Objectives>) -> Objectives {
    let mut worst = [f64::NEG_INFINITY; OBJECTIVES];
    for p in points {
        for k in 0..OBJECTIVES {
            worst[k] = worst[k].max(p[k]);
        }
    }
    worst.map(|w| if w > 0.0 { w * 1.1 } else { 1.0 })
}

/// Volume dominated by `points` and bounded by `reference`. Points that do
/// not strictly dominate the reference contribute nothing.
pub fn hypervolume(points: &[Objectives], reference: &Objectives) -> f64 {
    let mut pts: Vec<Objectives> =
        points.iter().copied().filter(|p| (0..OBJECTIVES).all(|k| p[k] < reference[k])).collect();
    if pts.is_empty() {
        return 0.0;
    }
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]));
    let mut volume = 0.0;
    for i in 0..pts.len() {
        let next_x = if i + 1 < pts.len() { pts[i + 1][0] } else { reference[0] };
        let width = next_x - pts[i][0];
        if width <= 0.0 {
            continue;
        }
        volume += width * area_2d(&pts[..=i], reference[1], reference[2]);
    }
    volume
}

/// Area dominated in the (objective 1, objective 2) plane.
fn area_2d(points: &[Objectives], ref_y: f64, ref_z: f64) -> f64 {
    let mut yz: Vec<(f64, f64)> = points.iter().map(|p| (p[1], p[2])).collect();
    yz.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut area = 0.0;
    let mut best_z = ref_z;
    for i in 0..yz.len() {
        best_z = best_z.min(yz[i].1);
        let next_y = if i + 1 < yz.len() { yz[i + 1].0 } else { ref_y };
        area += (next_y - yz[i].0) * (ref_z - best_z);
    }
    area
}
