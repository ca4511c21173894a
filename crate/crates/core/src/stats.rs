//! Sample summaries and the Wilcoxon rank-sum test.

use statrs::function::erf::erfc;
use std::f64::consts::SQRT_2;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StatsError {
    #[error("sample `{0}` is empty")]
    Empty(&'static str),
    #[error("sample `{0}` contains a non-finite value")]
    NonFinite(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleSummary {
    pub n: usize,
    pub mean: f64,
    /// Sample standard deviation (n − 1 denominator); 0 for a single value.
    pub sd: f64,
    pub median: f64,
    pub min: f64,
    pub max: f64,
    /// Bias-corrected excess kurtosis; `None` when n < 4 or the sample is constant.
    pub excess_kurtosis: Option<f64>,
}

fn check(xs: &[f64], name: &'static str) -> Result<(), StatsError> {
    if xs.is_empty() {
        return Err(StatsError::Empty(name));
    }
    if xs.iter().any(|x| !x.is_finite()) {
        return Err(StatsError::NonFinite(name));
    }
    Ok(())
}

pub fn summarize(samples: &[f64]) -> Result<SampleSummary, StatsError> {
    check(samples, "samples")?;
    let n = samples.len();
    let nf = n as f64;
    let mean = samples.iter().sum::<f64>() / nf;
    let m2 = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / nf;
    let m4 = samples.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / nf;
    let sd = if n > 1 { (m2 * nf / (nf - 1.0)).sqrt() } else { 0.0 };

    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let median = if n % 2 == 1 { sorted[n / 2] } else { 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]) };

    let excess_kurtosis = (n >= 4 && m2 > 0.0).then(|| {
        let g2 = m4 / (m2 * m2) - 3.0;
        ((nf + 1.0) * g2 + 6.0) * (nf - 1.0) / ((nf - 2.0) * (nf - 3.0))
    });
    Ok(SampleSummary { n, mean, sd, median, min: sorted[0], max: sorted[n - 1], excess_kurtosis })
}

/// Direction of the alternative hypothesis, stated for sample `a` relative to `b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Alternative {
    TwoSided,
    /// `a` tends to be smaller than `b`.
    Less,
    /// `a` tends to be larger than `b`.
    Greater,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankSumResult {
    /// Rank sum of `a` in the pooled sample (midranks for ties).
    pub statistic: f64,
    pub p_value: f64,
    pub exact: bool,
}

/// Pooled sizes up to this use the exact permutation distribution.
pub const EXACT_MAX_POOLED: usize = 12;

/// Midranks of the pooled sample, doubled so they are integers.
fn doubled_midranks(pooled: &[f64]) -> Vec<u64> {
    let mut order: Vec<usize> = (0..pooled.len()).collect();
    order.sort_by(|&i, &j| pooled[i].total_cmp(&pooled[j]));
    let mut ranks = vec![0; pooled.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && pooled[order[end]] == pooled[order[start]] {
            end += 1;
        }
        // positions start..end hold ranks start+1..=end; doubled mean is start + end + 1
        for &idx in &order[start..end] {
            ranks[idx] = (start + end + 1) as u64;
        }
        start = end;
    }
    ranks
}

fn rank_sum_doubled(a: &[f64], b: &[f64]) -> (Vec<u64>, u64) {
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let ranks = doubled_midranks(&pooled);
    let w = ranks[..a.len()].iter().sum();
    (ranks, w)
}

/// Exact p-value from the permutation distribution of the rank sum, by dynamic programming over
/// subsets of size `n_a`.
pub fn wilcoxon_exact(a: &[f64], b: &[f64], alternative: Alternative) -> Result<RankSumResult, StatsError> {
    check(a, "a")?;
    check(b, "b")?;
    let (ranks, w) = rank_sum_doubled(a, b);
    let na = a.len();
    let total: u64 = ranks.iter().sum();
    // counts[k][s]: number of k-subsets of the ranks seen so far with doubled sum s
    let mut counts = vec![vec![0f64; total as usize + 1]; na + 1];
    counts[0][0] = 1.0;
    for &r in &ranks {
        let r = r as usize;
        for k in (1..=na).rev() {
            let (lower, upper) = counts.split_at_mut(k);
            let (prev, cur) = (&lower[k - 1], &mut upper[0]);
            for s in (r..=total as usize).rev() {
                cur[s] += prev[s - r];
            }
        }
    }
    let dist = &counts[na];
    let all: f64 = dist.iter().sum();
    let expected2 = na as u64 * (ranks.len() as u64 + 1);
    let mass = |keep: &dyn Fn(u64) -> bool| -> f64 {
        dist.iter().enumerate().filter(|(s, _)| keep(*s as u64)).map(|(_, c)| c).sum::<f64>() / all
    };
    let p = match alternative {
        Alternative::TwoSided => {
            let dev = w.abs_diff(expected2);
            mass(&|s| s.abs_diff(expected2) >= dev)
        }
        Alternative::Less => mass(&|s| s <= w),
        Alternative::Greater => mass(&|s| s >= w),
    };
    Ok(RankSumResult { statistic: w as f64 / 2.0, p_value: p.min(1.0), exact: true })
}

fn upper_tail(z: f64) -> f64 {
    0.5 * erfc(z / SQRT_2)
}

/// Normal approximation with continuity correction and tie-corrected variance.
pub fn wilcoxon_normal(a: &[f64], b: &[f64], alternative: Alternative) -> Result<RankSumResult, StatsError> {
    check(a, "a")?;
    check(b, "b")?;
    let (ranks, w2) = rank_sum_doubled(a, b);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let n = na + nb;
    let w = w2 as f64 / 2.0;
    let expected = na * (n + 1.0) / 2.0;

    let mut sorted = ranks.clone();
    sorted.sort_unstable();
    let mut ties = 0.0;
    for group in sorted.chunk_by(|x, y| x == y) {
        let t = group.len() as f64;
        ties += t * t * t - t;
    }
    let var = if n > 1.0 { na * nb / 12.0 * ((n + 1.0) - ties / (n * (n - 1.0))) } else { 0.0 };
    let p = if var <= 0.0 {
        1.0
    } else {
        let sd = var.sqrt();
        match alternative {
            Alternative::TwoSided => 2.0 * upper_tail((((w - expected).abs() - 0.5).max(0.0)) / sd),
            Alternative::Less => 1.0 - upper_tail((w - expected + 0.5) / sd),
            Alternative::Greater => upper_tail((w - expected - 0.5) / sd),
        }
    };
    Ok(RankSumResult { statistic: w, p_value: p.clamp(f64::MIN_POSITIVE, 1.0), exact: false })
}

/// Rank-sum test; exact when the pooled size is at most [`EXACT_MAX_POOLED`].
pub fn wilcoxon_rank_sum_with(a: &[f64], b: &[f64], alternative: Alternative) -> Result<RankSumResult, StatsError> {
    if a.len() + b.len() <= EXACT_MAX_POOLED {
        wilcoxon_exact(a, b, alternative)
    } else {
        wilcoxon_normal(a, b, alternative)
    }
}

/// Two-sided rank-sum test returning `(rank sum of a, p)`.
pub fn wilcoxon_rank_sum(a: &[f64], b: &[f64]) -> Result<(f64, f64), StatsError> {
    let r = wilcoxon_rank_sum_with(a, b, Alternative::TwoSided)?;
    Ok((r.statistic, r.p_value))
}
