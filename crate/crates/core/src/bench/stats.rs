//! Rank statistics: average ranks, Spearman correlation, Wilcoxon rank-sum.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal, StudentsT};

use crate::error::{Error, Result};

/// 1-based ascending ranks; tied values share the mean of their positions.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && values[order[j]] == values[order[i]] {
            j += 1;
        }
        // positions i+1 ..= j
        let avg = (i + 1 + j) as f64 / 2.0;
        for &idx in &order[i..j] {
            ranks[idx] = avg;
        }
        i = j;
    }
    ranks
}

fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Spearman's rho with average-rank ties. `None` when either input is constant
/// or the inputs are shorter than two.
pub fn spearman(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return None;
    }
    pearson(&average_ranks(x), &average_ranks(y))
}

/// Two-sided p-value of `rho` under zero correlation via the t approximation
/// with `n - 2` degrees of freedom.
pub fn spearman_p_value(rho: f64, n: usize) -> Option<f64> {
    if n < 3 {
        return None;
    }
    let df = (n - 2) as f64;
    let denom = 1.0 - rho * rho;
    if denom <= 0.0 {
        return Some(0.0);
    }
    let t = rho * (df / denom).sqrt();
    let dist = StudentsT::new(0.0, 1.0, df).ok()?;
    Some((2.0 * (1.0 - dist.cdf(t.abs()))).clamp(0.0, 1.0))
}

/// Outcome of comparing sample `a` against sample `b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    /// `a` significantly greater.
    #[serde(rename = "+")]
    Better,
    /// `a` significantly smaller.
    #[serde(rename = "-")]
    Worse,
    #[serde(rename = "≈")]
    Similar,
}

impl Verdict {
    pub fn symbol(self) -> &'static str {
        match self {
            Verdict::Better => "+",
            Verdict::Worse => "-",
            Verdict::Similar => "≈",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankSumTest {
    /// Mann-Whitney U of sample `a`.
    pub u: f64,
    pub z: f64,
    pub p_value: f64,
    pub verdict: Verdict,
}

/// Two-sided Wilcoxon rank-sum (Mann-Whitney U) test using the normal
/// approximation with tie-corrected variance and no continuity correction.
pub fn wilcoxon_rank_sum(a: &[f64], b: &[f64], alpha: f64) -> Result<RankSumTest> {
    let (n1, n2) = (a.len(), b.len());
    if n1 < 2 || n2 < 2 {
        return Err(Error::invalid("rank-sum test needs at least two observations per sample"));
    }
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let ranks = average_ranks(&pooled);
    let r1: f64 = ranks[..n1].iter().sum();
    let (n1f, n2f) = (n1 as f64, n2 as f64);
    let n = n1f + n2f;
    let u = r1 - n1f * (n1f + 1.0) / 2.0;
    let mean = n1f * n2f / 2.0;

    let mut sorted = pooled.clone();
    sorted.sort_by(f64::total_cmp);
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i + 1;
        while j < sorted.len() && sorted[j] == sorted[i] {
            j += 1;
        }
        let t = (j - i) as f64;
        tie_term += t * t * t - t;
        i = j;
    }
    let var = n1f * n2f / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
    let (z, p_value) = if var <= 0.0 {
        (0.0, 1.0)
    } else {
        let z = (u - mean) / var.sqrt();
        let normal = Normal::new(0.0, 1.0).expect("standard normal");
        (z, (2.0 * (1.0 - normal.cdf(z.abs()))).clamp(0.0, 1.0))
    };
    let verdict = if p_value < alpha {
        if z > 0.0 {
            Verdict::Better
        } else {
            Verdict::Worse
        }
    } else {
        Verdict::Similar
    };
    Ok(RankSumTest { u, z, p_value, verdict })
}
