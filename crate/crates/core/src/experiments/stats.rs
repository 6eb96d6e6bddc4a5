//! Resampling statistics: percentile bootstrap, two-sample permutation test
//! and Holm step-down adjustment.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};

pub const DEFAULT_RESAMPLES: usize = 10_000;
pub const DEFAULT_PERMUTATIONS: usize = 10_000;

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Percentile bootstrap interval for the mean at `level` (e.g. 0.95).
pub fn bootstrap_ci<R: Rng + ?Sized>(xs: &[f64], resamples: usize, level: f64, rng: &mut R) -> Result<(f64, f64)> {
    if xs.is_empty() {
        return Err(Error::EmptyGroup);
    }
    if resamples == 0 || !(0.0..1.0).contains(&level) {
        return Err(Error::InvalidParam(
            "bootstrap needs resamples ≥ 1 and level in [0, 1)".into(),
        ));
    }
    let n = xs.len();
    let mut means: Vec<f64> = (0..resamples)
        .map(|_| (0..n).map(|_| xs[rng.gen_range(0..n)]).sum::<f64>() / n as f64)
        .collect();
    means.sort_by(f64::total_cmp);
    let alpha = (1.0 - level) / 2.0;
    let lo = ((alpha * resamples as f64).floor() as usize).min(resamples - 1);
    let hi = (((1.0 - alpha) * resamples as f64).ceil() as usize).clamp(1, resamples) - 1;
    // keep the interval around the point estimate despite rounding
    let m = mean(xs);
    Ok((means[lo].min(m), means[hi].max(m)))
}

/// `C(n, k)`, saturating.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

fn extreme(stat: f64, observed: f64) -> bool {
    // tolerance absorbs summation-order noise in the relabelled means
    stat >= observed - 1e-9 * observed.abs().max(1.0)
}

/// Two-sided test on the difference of means. Enumerates every split when
/// there are at most `permutations` of them, otherwise samples and reports
/// `(1 + hits) / (1 + permutations)`.
pub fn permutation_test<R: Rng + ?Sized>(a: &[f64], b: &[f64], permutations: usize, rng: &mut R) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InsufficientData(
            "permutation test needs two non-empty groups".into(),
        ));
    }
    if permutations == 0 {
        return Err(Error::InvalidParam("permutations must be at least 1".into()));
    }
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let (na, n) = (a.len(), pooled.len());
    let total: f64 = pooled.iter().sum();
    let diff = |sum_a: f64| (sum_a / na as f64 - (total - sum_a) / (n - na) as f64).abs();
    let observed = diff(a.iter().sum());

    if binomial(n, na) <= permutations as u128 {
        let mut hits = 0u64;
        let mut count = 0u64;
        let mut idx: Vec<usize> = (0..na).collect();
        loop {
            count += 1;
            if extreme(diff(idx.iter().map(|&i| pooled[i]).sum()), observed) {
                hits += 1;
            }
            // next k-combination in lexicographic order
            let mut i = na;
            while i > 0 && idx[i - 1] == n - na + i - 1 {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            idx[i - 1] += 1;
            for j in i..na {
                idx[j] = idx[j - 1] + 1;
            }
        }
        return Ok(hits as f64 / count as f64);
    }

    let mut shuffled = pooled.clone();
    let mut hits = 0usize;
    for _ in 0..permutations {
        shuffled.shuffle(rng);
        if extreme(diff(shuffled[..na].iter().sum()), observed) {
            hits += 1;
        }
    }
    Ok((1 + hits) as f64 / (1 + permutations) as f64)
}

/// Holm step-down adjusted p-values, in input order.
pub fn holm(pvalues: &[f64]) -> Vec<f64> {
    let m = pvalues.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&i, &j| pvalues[i].total_cmp(&pvalues[j]));
    let mut adjusted = vec![0.0; m];
    let mut running = 0.0f64;
    for (rank, &i) in order.iter().enumerate() {
        running = running.max(((m - rank) as f64 * pvalues[i]).min(1.0));
        adjusted[i] = running;
    }
    adjusted
}
