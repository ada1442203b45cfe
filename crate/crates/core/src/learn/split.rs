use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{MqlError, Result};
use crate::table::Table;

#[derive(Debug, Clone)]
pub struct Split {
    pub train: Table,
    pub test: Table,
    /// Rows in neither part.
    pub unused: usize,
    /// Set when `m` was reduced to fit; holds the requested value.
    pub clamped_from: Option<usize>,
}

/// Row permutation used by every split: ChaCha8 seeded from `seed`, Fisher-Yates shuffle.
pub fn shuffled_rows(rows: usize, seed: u64) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..rows).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    idx
}

/// First `n` shuffled rows train, the next `m` test. `m` is clamped to what is left.
pub fn train_test_split(t: &Table, n: usize, m: usize, seed: u64) -> Result<Split> {
    let rows = t.row_count();
    if n == 0 {
        return Err(MqlError::DegenerateDesign("TRAIN ON must be at least 1".into()));
    }
    if n > rows {
        return Err(MqlError::TrainTooLarge {
            requested: n,
            available: rows,
        });
    }
    let m_eff = m.min(rows - n);
    let idx = shuffled_rows(rows, seed);
    Ok(Split {
        train: t.take_rows(&idx[..n]),
        test: t.take_rows(&idx[n..n + m_eff]),
        unused: rows - n - m_eff,
        clamped_from: (m_eff < m).then_some(m),
    })
}

/// Split sizes used when GENERATE trains a transient model: 80% train, rest test.
pub fn default_split_sizes(rows: usize) -> (usize, usize) {
    let n = (rows * 4).div_ceil(5);
    (n, rows - n)
}
