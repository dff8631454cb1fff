//! Statistical helpers for the acceptance suite. Everything here is
//! independent test-side machinery: no code under test is reused.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

pub fn std_dev(values: &[f64]) -> f64 {
    let m = mean(values);
    (values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / values.len() as f64).sqrt()
}

pub fn pooled_std(a: &[f64], b: &[f64]) -> f64 {
    ((std_dev(a).powi(2) + std_dev(b).powi(2)) / 2.0).sqrt()
}

/// One-sided paired bootstrap: probability that the mean of `diffs` is <= 0
/// under resampling. Small values support "diffs are positive".
pub fn bootstrap_prob_mean_le_zero(diffs: &[f64], resamples: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = diffs.len();
    let mut hits = 0usize;
    for _ in 0..resamples {
        let mut total = 0.0;
        for _ in 0..n {
            total += diffs[rng.gen_range(0..n)];
        }
        if total / n as f64 <= 0.0 {
            hits += 1;
        }
    }
    hits as f64 / resamples as f64
}

/// Best non-increasing fit by pool-adjacent-violators (least squares).
pub fn isotonic_non_increasing(values: &[f64]) -> Vec<f64> {
    // PAV on negated values gives the non-decreasing fit; negate back.
    let negated: Vec<f64> = values.iter().map(|v| -v).collect();
    let fit = pav_non_decreasing(&negated);
    fit.into_iter().map(|v| -v).collect()
}

fn pav_non_decreasing(values: &[f64]) -> Vec<f64> {
    // Blocks of (sum, count), merged while decreasing.
    let mut blocks: Vec<(f64, usize)> = Vec::with_capacity(values.len());
    for &v in values {
        blocks.push((v, 1));
        while blocks.len() >= 2 {
            let (s2, n2) = blocks[blocks.len() - 1];
            let (s1, n1) = blocks[blocks.len() - 2];
            if s1 / n1 as f64 > s2 / n2 as f64 {
                blocks.pop();
                blocks.pop();
                blocks.push((s1 + s2, n1 + n2));
            } else {
                break;
            }
        }
    }
    let mut out = Vec::with_capacity(values.len());
    for (sum, count) in blocks {
        out.extend(std::iter::repeat_n(sum / count as f64, count));
    }
    out
}

/// Root-mean-square deviation between a curve and its isotonic fit.
pub fn isotonic_residual(values: &[f64]) -> f64 {
    let fit = isotonic_non_increasing(values);
    let sq: f64 =
        values.iter().zip(&fit).map(|(v, f)| (v - f) * (v - f)).sum::<f64>() / values.len() as f64;
    sq.sqrt()
}

/// Mann-Kendall S statistic: sum of pairwise trend signs.
pub fn mann_kendall_s(values: &[f64]) -> i64 {
    let mut s = 0i64;
    for i in 0..values.len() {
        for j in (i + 1)..values.len() {
            s += match values[j].partial_cmp(&values[i]).unwrap() {
                std::cmp::Ordering::Greater => 1,
                std::cmp::Ordering::Less => -1,
                std::cmp::Ordering::Equal => 0,
            };
        }
    }
    s
}

#[allow(dead_code)]
pub fn assert_close(actual: f64, expected: f64, tol: f64, what: &str) {
    assert!(
        (actual - expected).abs() <= tol,
        "{what}: got {actual}, expected {expected} within {tol}"
    );
}
