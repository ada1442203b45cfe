use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::data::Matrix;
use super::tree::{fit_tree, majority, FeatureSampler, Tree, TreeHyper, TreeTarget};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForestHyper {
    pub n_trees: usize,
    pub tree: TreeHyper,
    /// Features tried per split; `None` means `ceil(sqrt(d))`.
    pub max_features: Option<usize>,
    pub bootstrap: bool,
}

impl Default for ForestHyper {
    fn default() -> Self {
        ForestHyper {
            n_trees: 100,
            tree: TreeHyper::default(),
            max_features: None,
            bootstrap: true,
        }
    }
}

pub fn default_max_features(d: usize) -> usize {
    ((d as f64).sqrt().ceil() as usize).max(1)
}

/// The generator for tree `t`: ChaCha8 seeded with `seed`, stream `t + 1`.
fn tree_rng(seed: u64, t: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(t as u64 + 1);
    rng
}

/// Trains trees in parallel; each tree's randomness depends only on `(seed, index)`.
pub fn fit_forest(x: &Matrix, y: TreeTarget<'_>, hyper: ForestHyper, seed: u64) -> Vec<Tree> {
    let m = hyper.max_features.unwrap_or_else(|| default_max_features(x.cols));
    (0..hyper.n_trees)
        .into_par_iter()
        .map(|t| {
            let mut rng = tree_rng(seed, t);
            let samples: Vec<usize> = if hyper.bootstrap {
                (0..x.rows).map(|_| rng.random_range(0..x.rows)).collect()
            } else {
                (0..x.rows).collect()
            };
            let sampler = (m < x.cols).then_some(FeatureSampler { rng: &mut rng, m });
            fit_tree(x, y, &samples, hyper.tree, sampler)
        })
        .collect()
}

pub fn forest_predict_real(trees: &[Tree], x: &[f64]) -> f64 {
    trees.iter().map(|t| t.predict_row(x)).sum::<f64>() / trees.len() as f64
}

/// Majority vote; ties go to the lowest class index.
pub fn forest_predict_class(trees: &[Tree], x: &[f64], n_classes: usize) -> usize {
    let mut counts = vec![0usize; n_classes];
    for t in trees {
        counts[t.predict_row(x) as usize] += 1;
    }
    majority(&counts)
}
