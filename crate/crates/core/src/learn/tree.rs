use rand::seq::index::sample;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::data::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeHyper {
    pub max_depth: usize,
    pub min_leaf: usize,
}

impl Default for TreeHyper {
    fn default() -> Self {
        TreeHyper {
            max_depth: 10,
            min_leaf: 2,
        }
    }
}

/// Training target for CART. Class indices must be `< n_classes`.
#[derive(Debug, Clone, Copy)]
pub enum TreeTarget<'a> {
    Real(&'a [f64]),
    Class(&'a [usize], usize),
}

/// Leaves hold a mean (regression) or a class index stored as `f64`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Node {
    Leaf {
        #[serde(with = "crate::learn::decimal")]
        value: f64,
    },
    Split {
        feature: usize,
        #[serde(with = "crate::learn::decimal")]
        threshold: f64,
        left: usize,
        right: usize,
    },
}

/// Node 0 is the root. `x[feature] <= threshold` goes left.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub nodes: Vec<Node>,
}

impl Tree {
    pub fn predict_row(&self, x: &[f64]) -> f64 {
        let mut at = 0;
        loop {
            match self.nodes[at] {
                Node::Leaf { value } => return value,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => at = if x[feature] <= threshold { left } else { right },
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], at: usize) -> usize {
            match nodes[at] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, left).max(walk(nodes, right)),
            }
        }
        walk(&self.nodes, 0)
    }
}

/// Per-split feature subsampling: draw `m` of the features from `rng`.
pub struct FeatureSampler<'a> {
    pub rng: &'a mut ChaCha8Rng,
    pub m: usize,
}

/// Grows a CART tree on the rows listed in `samples` (repeats allowed).
pub fn fit_tree(
    x: &Matrix,
    y: TreeTarget<'_>,
    samples: &[usize],
    hyper: TreeHyper,
    sampler: Option<FeatureSampler<'_>>,
) -> Tree {
    let mut b = Builder {
        x,
        y,
        hyper,
        sampler,
        nodes: Vec::new(),
    };
    let mut idx = samples.to_vec();
    b.grow(&mut idx, 0);
    Tree { nodes: b.nodes }
}

struct Builder<'a, 'r> {
    x: &'a Matrix,
    y: TreeTarget<'a>,
    hyper: TreeHyper,
    sampler: Option<FeatureSampler<'r>>,
    nodes: Vec<Node>,
}

struct Candidate {
    gain: f64,
    feature: usize,
    threshold: f64,
}

impl Builder<'_, '_> {
    fn grow(&mut self, idx: &mut [usize], depth: usize) -> usize {
        let at = self.nodes.len();
        self.nodes.push(Node::Leaf {
            value: self.leaf_value(idx),
        });
        if depth >= self.hyper.max_depth
            || idx.len() < 2 * self.hyper.min_leaf.max(1)
            || self.is_pure(idx)
        {
            return at;
        }
        let features: Vec<usize> = match &mut self.sampler {
            Some(s) if s.m < self.x.cols => {
                let mut f = sample(&mut *s.rng, self.x.cols, s.m).into_vec();
                f.sort_unstable();
                f
            }
            _ => (0..self.x.cols).collect(),
        };
        let mut best: Option<Candidate> = None;
        for f in features {
            if let Some(c) = self.best_split(f, idx) {
                if best.as_ref().is_none_or(|b| c.gain > b.gain) {
                    best = Some(c);
                }
            }
        }
        let Some(best) = best else { return at };

        let mut split = 0;
        for i in 0..idx.len() {
            if self.x.get(idx[i], best.feature) <= best.threshold {
                idx.swap(i, split);
                split += 1;
            }
        }
        let (l, r) = idx.split_at_mut(split);
        let left = self.grow(l, depth + 1);
        let right = self.grow(r, depth + 1);
        self.nodes[at] = Node::Split {
            feature: best.feature,
            threshold: best.threshold,
            left,
            right,
        };
        at
    }

    fn leaf_value(&self, idx: &[usize]) -> f64 {
        match self.y {
            TreeTarget::Real(y) => {
                if idx.is_empty() {
                    return 0.0;
                }
                idx.iter().map(|&i| y[i]).sum::<f64>() / idx.len() as f64
            }
            TreeTarget::Class(y, k) => {
                let mut counts = vec![0usize; k];
                for &i in idx {
                    counts[y[i]] += 1;
                }
                majority(&counts) as f64
            }
        }
    }

    fn is_pure(&self, idx: &[usize]) -> bool {
        match self.y {
            TreeTarget::Real(y) => idx.iter().all(|&i| y[i] == y[idx[0]]),
            TreeTarget::Class(y, _) => idx.iter().all(|&i| y[i] == y[idx[0]]),
        }
    }

    /// Best threshold on one feature; `None` when no admissible split improves impurity.
    fn best_split(&self, feature: usize, idx: &[usize]) -> Option<Candidate> {
        let mut order: Vec<usize> = idx.to_vec();
        order.sort_by(|&a, &b| {
            self.x
                .get(a, feature)
                .total_cmp(&self.x.get(b, feature))
                .then(a.cmp(&b))
        });
        let n = order.len();
        let min_leaf = self.hyper.min_leaf.max(1);
        let value = |k: usize| self.x.get(order[k], feature);
        let mut best: Option<Candidate> = None;
        let consider = |k: usize, gain: f64, best: &mut Option<Candidate>| {
            let left = k + 1;
            if left < min_leaf || n - left < min_leaf || value(k) >= value(k + 1) {
                return;
            }
            if best.as_ref().is_none_or(|b| gain > b.gain) {
                *best = Some(Candidate {
                    gain,
                    feature,
                    threshold: midpoint(value(k), value(k + 1)),
                });
            }
        };

        match self.y {
            TreeTarget::Real(y) => {
                let mean = order.iter().map(|&i| y[i]).sum::<f64>() / n as f64;
                let c: Vec<f64> = order.iter().map(|&i| y[i] - mean).collect();
                let total: f64 = c.iter().sum();
                let total_sq: f64 = c.iter().map(|v| v * v).sum();
                let parent = total_sq - total * total / n as f64;
                let (mut s, mut sq) = (0.0, 0.0);
                for k in 0..n - 1 {
                    s += c[k];
                    sq += c[k] * c[k];
                    let (nl, nr) = ((k + 1) as f64, (n - k - 1) as f64);
                    let sse_l = sq - s * s / nl;
                    let sse_r = (total_sq - sq) - (total - s) * (total - s) / nr;
                    let gain = parent - sse_l - sse_r;
                    if gain > 1e-12 * parent {
                        consider(k, gain, &mut best);
                    }
                }
            }
            TreeTarget::Class(y, k_classes) => {
                let mut right = vec![0usize; k_classes];
                for &i in &order {
                    right[y[i]] += 1;
                }
                let mut left = vec![0usize; k_classes];
                let sum_sq = |c: &[usize]| c.iter().map(|&v| (v * v) as f64).sum::<f64>();
                let (mut sq_l, mut sq_r) = (0.0, sum_sq(&right));
                let parent = n as f64 - sq_r / n as f64;
                for k in 0..n - 1 {
                    let cls = y[order[k]];
                    sq_l += (2 * left[cls] + 1) as f64;
                    left[cls] += 1;
                    sq_r -= (2 * right[cls] - 1) as f64;
                    right[cls] -= 1;
                    let (nl, nr) = ((k + 1) as f64, (n - k - 1) as f64);
                    let gain = parent - (nl - sq_l / nl) - (nr - sq_r / nr);
                    if gain > 1e-12 {
                        consider(k, gain, &mut best);
                    }
                }
            }
        }
        best
    }
}

/// Midpoint that stays strictly below `b`.
fn midpoint(a: f64, b: f64) -> f64 {
    let m = a + (b - a) / 2.0;
    if m < b {
        m
    } else {
        a
    }
}

/// Index of the largest count; ties go to the lowest index.
pub fn majority(counts: &[usize]) -> usize {
    let mut best = 0;
    for (i, &c) in counts.iter().enumerate() {
        if c > counts[best] {
            best = i;
        }
    }
    best
}
