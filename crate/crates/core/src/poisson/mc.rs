use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numeric::pairwise_sum;
use crate::regular::McConfig;

/// Sample means and covariance of a vector-valued estimator.
#[derive(Debug, Clone)]
pub struct Moments {
    pub samples: usize,
    pub mean: Vec<f64>,
    pub cov: Vec<Vec<f64>>,
}

impl Moments {
    pub fn stderr(&self, i: usize) -> f64 {
        (self.cov[i][i] / self.samples as f64).sqrt()
    }
}

/// Runs `draw` `cfg.samples` times over `cfg.batches` ChaCha8 streams of
/// `cfg.seed`, combining batches in index order.
pub fn moments<D>(cfg: &McConfig, dim: usize, draw: D) -> Result<Moments>
where
    D: Fn(&mut ChaCha8Rng) -> Vec<f64> + Sync,
{
    if cfg.samples < 2 || cfg.batches == 0 {
        return Err(Error::Config("Monte Carlo needs at least 2 samples and 1 batch".into()));
    }
    let per_batch = cfg.samples.div_ceil(cfg.batches);
    // Per batch: sums (dim) then upper-triangular product sums.
    let batches: Vec<Vec<f64>> = (0..cfg.batches)
        .into_par_iter()
        .map(|batch| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(batch as u64);
            let count = per_batch.min(cfg.samples.saturating_sub(batch * per_batch));
            let mut cols: Vec<Vec<f64>> = vec![Vec::with_capacity(count); dim + dim * dim];
            for _ in 0..count {
                let v = draw(&mut rng);
                for i in 0..dim {
                    cols[i].push(v[i]);
                    for j in 0..dim {
                        cols[dim + i * dim + j].push(v[i] * v[j]);
                    }
                }
            }
            cols.iter().map(|c| pairwise_sum(c)).collect()
        })
        .collect();
    let total = |k: usize| pairwise_sum(&batches.iter().map(|b| b[k]).collect::<Vec<_>>());
    let n = cfg.samples as f64;
    let mean: Vec<f64> = (0..dim).map(|i| total(i) / n).collect();
    let cov = (0..dim)
        .map(|i| {
            (0..dim)
                .map(|j| (total(dim + i * dim + j) - n * mean[i] * mean[j]) / (n - 1.0))
                .collect()
        })
        .collect();
    Ok(Moments {
        samples: cfg.samples,
        mean,
        cov,
    })
}
