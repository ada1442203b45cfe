use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::data::{dist2, Matrix};
use crate::error::{MqlError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KMeansHyper {
    pub n_init: usize,
    pub max_iter: usize,
}

impl Default for KMeansHyper {
    fn default() -> Self {
        KMeansHyper {
            n_init: 10,
            max_iter: 300,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansRun {
    pub centroids: Matrix,
    pub assignments: Vec<usize>,
    pub inertia: f64,
    /// Inertia after each assignment step.
    pub history: Vec<f64>,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansResult {
    /// Lowest-inertia run; ties keep the earliest.
    pub best: KMeansRun,
    pub histories: Vec<Vec<f64>>,
}

/// Index of the nearest centroid; ties go to the lower index.
pub fn nearest(centroids: &Matrix, x: &[f64]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for c in 0..centroids.rows {
        let d = dist2(centroids.row(c), x);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

/// Rows above which one-dimensional inputs skip the exact restart (it is quadratic in rows).
pub const EXACT_1D_MAX_ROWS: usize = 4096;

/// k-means++ seeding followed by Lloyd iterations, restarted `n_init` times.
/// Restart `r` draws from ChaCha8 seeded with `seed` on stream `r`. One-column
/// inputs of at most [`EXACT_1D_MAX_ROWS`] rows get one more restart seeded
/// from the exact optimum, so their result is globally optimal.
pub fn kmeans(x: &Matrix, k: usize, seed: u64, hyper: KMeansHyper) -> Result<KMeansResult> {
    if k == 0 {
        return Err(MqlError::DegenerateDesign("CLUSTER OF needs k >= 1".into()));
    }
    if k > x.rows {
        return Err(MqlError::KExceedsRows { k, rows: x.rows });
    }
    let mut best: Option<KMeansRun> = None;
    let mut histories = Vec::new();
    for r in 0..hyper.n_init.max(1) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(r as u64);
        let run = lloyd(x, plus_plus(x, k, &mut rng), hyper.max_iter);
        histories.push(run.history.clone());
        if best.as_ref().is_none_or(|b| run.inertia < b.inertia) {
            best = Some(run);
        }
    }
    if x.cols == 1 && x.rows <= EXACT_1D_MAX_ROWS {
        let run = lloyd(x, exact_1d(&x.data, k), hyper.max_iter);
        histories.push(run.history.clone());
        if best.as_ref().is_none_or(|b| run.inertia < b.inertia) {
            best = Some(run);
        }
    }
    Ok(KMeansResult {
        best: best.expect("at least one restart"),
        histories,
    })
}

/// Centroids of the minimum-inertia partition of `values` into `k` groups.
/// Optimal groups are contiguous in sorted order, so a dynamic program over
/// split points finds them exactly.
fn exact_1d(values: &[f64], k: usize) -> Matrix {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    let mut sum = vec![0.0; n + 1];
    let mut sq = vec![0.0; n + 1];
    for (i, x) in v.iter().enumerate() {
        sum[i + 1] = sum[i] + x;
        sq[i + 1] = sq[i] + x * x;
    }
    // Sum of squared deviations of v[i..j].
    let sse = |i: usize, j: usize| {
        let s = sum[j] - sum[i];
        ((sq[j] - sq[i]) - s * s / (j - i) as f64).max(0.0)
    };
    // cost[m][j]: best cost of v[..j] in m + 1 groups; from[m][j]: start of the last group.
    let mut cost = vec![vec![f64::INFINITY; n + 1]; k];
    let mut from = vec![vec![0usize; n + 1]; k];
    for j in 1..=n {
        cost[0][j] = sse(0, j);
    }
    for m in 1..k {
        for j in (m + 1)..=n {
            for i in m..j {
                let c = cost[m - 1][i] + sse(i, j);
                if c < cost[m][j] {
                    cost[m][j] = c;
                    from[m][j] = i;
                }
            }
        }
    }
    let mut centroids = vec![0.0; k];
    let mut j = n;
    for m in (0..k).rev() {
        let i = if m == 0 { 0 } else { from[m][j] };
        centroids[m] = (sum[j] - sum[i]) / (j - i) as f64;
        j = i;
    }
    Matrix::new(k, 1, centroids)
}

fn plus_plus(x: &Matrix, k: usize, rng: &mut ChaCha8Rng) -> Matrix {
    let mut chosen = vec![rng.random_range(0..x.rows)];
    let mut d2: Vec<f64> = (0..x.rows).map(|i| dist2(x.row(i), x.row(chosen[0]))).collect();
    while chosen.len() < k {
        let total: f64 = d2.iter().sum();
        let next = if total > 0.0 {
            let u = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut pick = None;
            for (i, &d) in d2.iter().enumerate() {
                acc += d;
                if d > 0.0 && acc > u {
                    pick = Some(i);
                    break;
                }
            }
            pick.unwrap_or_else(|| d2.iter().rposition(|&d| d > 0.0).unwrap_or(0))
        } else {
            (0..x.rows).find(|i| !chosen.contains(i)).unwrap_or(0)
        };
        chosen.push(next);
        for (i, d) in d2.iter_mut().enumerate() {
            *d = d.min(dist2(x.row(i), x.row(next)));
        }
    }
    let rows: Vec<Vec<f64>> = chosen.iter().map(|&i| x.row(i).to_vec()).collect();
    Matrix::from_rows(&rows)
}

fn lloyd(x: &Matrix, mut centroids: Matrix, max_iter: usize) -> KMeansRun {
    let k = centroids.rows;
    let mut assignments: Vec<usize> = Vec::new();
    let mut history = Vec::new();
    let mut converged = false;
    for _ in 0..max_iter.max(1) {
        let mut inertia = 0.0;
        let next: Vec<usize> = (0..x.rows)
            .map(|i| {
                let (c, d) = nearest(&centroids, x.row(i));
                inertia += d;
                c
            })
            .collect();
        history.push(inertia);
        if next == assignments {
            converged = true;
            break;
        }
        assignments = next;
        centroids = update(x, &assignments, k);
    }
    if !converged {
        history.push(
            (0..x.rows)
                .map(|i| dist2(x.row(i), centroids.row(assignments[i])))
                .sum(),
        );
    }
    KMeansRun {
        inertia: *history.last().expect("at least one step"),
        centroids,
        assignments,
        history,
        converged,
    }
}

/// Cluster means; an empty cluster moves to the point farthest from its own centroid.
fn update(x: &Matrix, assignments: &[usize], k: usize) -> Matrix {
    let mut sums = vec![0.0; k * x.cols];
    let mut counts = vec![0usize; k];
    for (i, &c) in assignments.iter().enumerate() {
        counts[c] += 1;
        for (j, v) in x.row(i).iter().enumerate() {
            sums[c * x.cols + j] += v;
        }
    }
    for c in 0..k {
        if counts[c] > 0 {
            for j in 0..x.cols {
                sums[c * x.cols + j] /= counts[c] as f64;
            }
        }
    }
    let mut centroids = Matrix::new(k, x.cols, sums);
    let mut taken: Vec<usize> = Vec::new();
    for c in 0..k {
        if counts[c] > 0 {
            continue;
        }
        let far = (0..x.rows)
            .filter(|i| !taken.contains(i) && counts[assignments[*i]] > 1)
            .map(|i| (i, dist2(x.row(i), centroids.row(assignments[i]))))
            .fold(None::<(usize, f64)>, |best, (i, d)| match best {
                Some((_, bd)) if bd >= d => best,
                _ => Some((i, d)),
            });
        if let Some((i, _)) = far {
            taken.push(i);
            let row = x.row(i).to_vec();
            centroids.data[c * x.cols..(c + 1) * x.cols].copy_from_slice(&row);
        }
    }
    centroids
}

/// Mean silhouette. Points in singleton clusters score 0; fewer than two clusters give 0.
pub fn silhouette(x: &Matrix, assignments: &[usize]) -> f64 {
    let n = x.rows;
    if n == 0 {
        return 0.0;
    }
    let k = assignments.iter().copied().max().map_or(0, |m| m + 1);
    let mut sizes = vec![0usize; k];
    for &c in assignments {
        sizes[c] += 1;
    }
    if sizes.iter().filter(|&&s| s > 0).count() < 2 {
        return 0.0;
    }
    let total: f64 = (0..n)
        .map(|i| {
            let own = assignments[i];
            if sizes[own] <= 1 {
                return 0.0;
            }
            let mut sums = vec![0.0; k];
            for j in 0..n {
                if j != i {
                    sums[assignments[j]] += dist2(x.row(i), x.row(j)).sqrt();
                }
            }
            let a = sums[own] / (sizes[own] - 1) as f64;
            let b = (0..k)
                .filter(|&c| c != own && sizes[c] > 0)
                .map(|c| sums[c] / sizes[c] as f64)
                .fold(f64::INFINITY, f64::min);
            let m = a.max(b);
            if m > 0.0 {
                (b - a) / m
            } else {
                0.0
            }
        })
        .sum();
    total / n as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_restart_escapes_lloyd_local_optimum() {
        let x = [0.022067, 0.87653, 1.863879, 1.001006, -0.175096, 0.768961, 1.614162, 1.756787, 0.759516, -0.028379];
        let m = Matrix::new(x.len(), 1, x.to_vec());
        let r = kmeans(&m, 2, 42, KMeansHyper::default()).unwrap();
        // Best of {first three} vs {rest}, worked out by hand from the sorted values.
        let (a, b) = (&[-0.175096, -0.028379, 0.022067][..], &[0.759516, 0.768961, 0.87653, 1.001006, 1.614162, 1.756787, 1.863879][..]);
        let sse = |g: &[f64]| {
            let mu = g.iter().sum::<f64>() / g.len() as f64;
            g.iter().map(|v| (v - mu).powi(2)).sum::<f64>()
        };
        assert!((r.best.inertia - (sse(a) + sse(b))).abs() < 1e-12);
        assert_eq!(r.histories.len(), 11);
    }

    #[test]
    fn exact_1d_handles_duplicates_and_k_equal_rows() {
        let c = exact_1d(&[5.0, 1.0, 1.0, 5.0], 2);
        assert_eq!(c.data, [1.0, 5.0]);
        let c = exact_1d(&[3.0, 1.0, 2.0], 3);
        assert_eq!(c.data, [1.0, 2.0, 3.0]);
    }
    use proptest::prelude::*;

    fn col(v: &[f64]) -> Matrix {
        Matrix::from_rows(&v.iter().map(|&x| vec![x]).collect::<Vec<_>>())
    }

    #[test]
    fn symmetric_pairs() {
        let r = kmeans(&col(&[0.0, 0.2, 10.0, 10.2]), 2, 42, KMeansHyper::default()).unwrap();
        let mut c = r.best.centroids.column(0);
        c.sort_by(f64::total_cmp);
        assert!((c[0] - 0.1).abs() < 1e-9 && (c[1] - 10.1).abs() < 1e-9);
        assert!(r.best.converged);
    }

    #[test]
    fn single_cluster_is_mean() {
        let x = Matrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 6.0], vec![5.0, 1.0]]);
        let r = kmeans(&x, 1, 1, KMeansHyper::default()).unwrap();
        assert!((r.best.centroids.get(0, 0) - 3.0).abs() < 1e-12);
        assert!((r.best.centroids.get(0, 1) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn k_equals_rows_has_zero_inertia() {
        let r = kmeans(&col(&[3.0, 1.0, 4.0, 1.5, 9.0]), 5, 9, KMeansHyper::default()).unwrap();
        assert_eq!(r.best.inertia, 0.0);
        let r = kmeans(&col(&[2.0, 2.0, 2.0]), 3, 9, KMeansHyper::default()).unwrap();
        assert_eq!(r.best.inertia, 0.0);
    }

    #[test]
    fn too_many_clusters() {
        assert!(matches!(
            kmeans(&col(&[1.0]), 2, 0, KMeansHyper::default()),
            Err(MqlError::KExceedsRows { k: 2, rows: 1 })
        ));
    }

    #[test]
    fn empty_cluster_is_reseeded() {
        let x = col(&[0.0, 1.0, 2.0, 50.0]);
        // Both starting centroids sit far right of every point but one.
        let start = col(&[100.0, 200.0]);
        let run = lloyd(&x, start, 300);
        assert!(run.converged);
        let mut sizes = [0; 2];
        for &a in &run.assignments {
            sizes[a] += 1;
        }
        assert!(sizes.iter().all(|&s| s > 0), "{sizes:?}");
        assert!(run.history.windows(2).all(|w| w[1] <= w[0]));
    }

    /// Direct evaluation of the silhouette definition, independent of the loop above.
    fn silhouette_oracle(points: &[(f64, f64)], labels: &[usize]) -> f64 {
        let d = |a: (f64, f64), b: (f64, f64)| ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt();
        let mut s = Vec::new();
        for (i, &p) in points.iter().enumerate() {
            let same: Vec<f64> = points.iter().enumerate()
                .filter(|&(j, _)| j != i && labels[j] == labels[i])
                .map(|(_, &q)| d(p, q)).collect();
            if same.is_empty() {
                s.push(0.0);
                continue;
            }
            let a = same.iter().sum::<f64>() / same.len() as f64;
            let mut b = f64::INFINITY;
            for c in labels.iter().copied().filter(|&c| c != labels[i]) {
                let other: Vec<f64> = points.iter().enumerate()
                    .filter(|&(j, _)| labels[j] == c).map(|(_, &q)| d(p, q)).collect();
                b = b.min(other.iter().sum::<f64>() / other.len() as f64);
            }
            s.push((b - a) / a.max(b));
        }
        s.iter().sum::<f64>() / s.len() as f64
    }

    #[test]
    fn silhouette_of_far_tight_clusters() {
        let pts = [(0.0, 0.0), (0.1, 0.0), (0.0, 0.1), (0.1, 0.1), (9.0, 9.0), (9.1, 9.0), (9.0, 9.1), (9.1, 9.1)];
        let labels = [0, 0, 0, 0, 1, 1, 1, 1];
        let x = Matrix::from_rows(&pts.iter().map(|p| vec![p.0, p.1]).collect::<Vec<_>>());
        let s = silhouette(&x, &labels);
        assert!(s >= 0.9);
        assert!((s - silhouette_oracle(&pts, &labels)).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn silhouette_matches_oracle(
            pts in prop::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 2..9),
            seed in 0u64..1000,
        ) {
            let labels: Vec<usize> = (0..pts.len()).map(|i| ((i as u64 * 7 + seed) % 3) as usize).collect();
            let x = Matrix::from_rows(&pts.iter().map(|p| vec![p.0, p.1]).collect::<Vec<_>>());
            let distinct = { let mut l = labels.clone(); l.sort(); l.dedup(); l.len() };
            let want = if distinct < 2 { 0.0 } else { silhouette_oracle(&pts, &labels) };
            prop_assert!((silhouette(&x, &labels) - want).abs() < 1e-9);
        }

        #[test]
        fn inertia_is_monotone_and_final_is_fixpoint(
            pts in prop::collection::vec((-10.0f64..10.0, -10.0f64..10.0), 3..40),
            k in 1usize..4,
            seed: u64,
        ) {
            let x = Matrix::from_rows(&pts.iter().map(|p| vec![p.0, p.1]).collect::<Vec<_>>());
            let r = kmeans(&x, k.min(pts.len()), seed, KMeansHyper::default()).unwrap();
            for h in &r.histories {
                for w in h.windows(2) {
                    prop_assert!(w[1] <= w[0] * (1.0 + 1e-12) + 1e-12, "{:?}", h);
                }
            }
            if r.best.converged {
                for i in 0..x.rows {
                    prop_assert_eq!(nearest(&r.best.centroids, x.row(i)).0, r.best.assignments[i]);
                }
            }
        }

        #[test]
        fn one_dimensional_k2_is_globally_optimal(
            v in prop::collection::vec(-50.0f64..50.0, 2..=12),
            seed: u64,
        ) {
            let n = v.len();
            let sse = |g: &[f64]| {
                let mu = g.iter().sum::<f64>() / g.len() as f64;
                g.iter().map(|x| (x - mu).powi(2)).sum::<f64>()
            };
            let mut oracle = f64::INFINITY;
            for mask in 1u32..(1 << (n - 1)) {
                let (mut a, mut b) = (Vec::new(), Vec::new());
                for (i, &x) in v.iter().enumerate() {
                    if i < n - 1 && mask & (1 << i) != 0 { a.push(x) } else { b.push(x) }
                }
                oracle = oracle.min(sse(&a) + sse(&b));
            }
            let r = kmeans(&Matrix::new(n, 1, v.clone()), 2, seed, KMeansHyper::default()).unwrap();
            prop_assert!((r.best.inertia - oracle).abs() <= 1e-9 * oracle.max(1.0), "{} vs {}", r.best.inertia, oracle);
        }
    }
}
