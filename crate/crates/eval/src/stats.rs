//! Rank correlation, weighted kappa and Welch's t-test.
//!
//! Undefined results (constant inputs, empty marginals, zero variance) come
//! back as `None` rather than NaN, and serialize as `null`.

use serde::Serialize;
use statrs::distribution::{ContinuousCDF, StudentsT};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StatsError {
    #[error("samples differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("need at least {need} observations, got {got}")]
    TooFew { need: usize, got: usize },
    #[error("exact p-values are limited to {limit} observations, got {got}")]
    TooMany { limit: usize, got: usize },
    #[error("rating {value} is outside 1..={categories}")]
    OutOfRange { value: u8, categories: u8 },
}

fn same_len(x: usize, y: usize, need: usize) -> Result<(), StatsError> {
    if x != y {
        return Err(StatsError::LengthMismatch(x, y));
    }
    if x < need {
        return Err(StatsError::TooFew { need, got: x });
    }
    Ok(())
}

fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

/// Sample variance (n - 1 denominator).
fn variance(x: &[f64]) -> f64 {
    let m = mean(x);
    x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (x.len() - 1) as f64
}

/// 1-based ranks; tied values share the mean of the ranks they span.
pub fn ranks(x: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut out = vec![0.0; x.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && x[order[j + 1]] == x[order[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            out[k] = rank;
        }
        i = j + 1;
    }
    out
}

/// Pearson correlation, `None` when either input is constant.
pub fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let (mx, my) = (mean(x), mean(y));
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Correlation {
    pub rho: Option<f64>,
    pub p_value: Option<f64>,
    /// The p-value comes from the t approximation with fewer than 10 pairs.
    pub approximate: bool,
    pub n: usize,
}

/// Spearman's rho with a two-sided p-value from the t approximation.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<Correlation, StatsError> {
    same_len(x.len(), y.len(), 2)?;
    let n = x.len();
    let rho = pearson(&ranks(x), &ranks(y));
    let p_value = rho.and_then(|r| t_test_p(r, n));
    Ok(Correlation { rho, p_value, approximate: n < 10, n })
}

fn t_test_p(rho: f64, n: usize) -> Option<f64> {
    if n < 3 {
        return None;
    }
    if rho.abs() == 1.0 {
        return Some(0.0);
    }
    let df = (n - 2) as f64;
    let t = rho * (df / (1.0 - rho * rho)).sqrt();
    two_sided(t, df)
}

fn two_sided(t: f64, df: f64) -> Option<f64> {
    let dist = StudentsT::new(0.0, 1.0, df).ok()?;
    Some((2.0 * dist.sf(t.abs())).min(1.0))
}

/// Largest sample [`spearman_exact_p`] enumerates.
pub const EXACT_MAX_N: usize = 10;

/// Two-sided permutation p-value for Spearman's rho: the share of
/// orderings of `y` whose |rho| reaches the observed one.
pub fn spearman_exact_p(x: &[f64], y: &[f64]) -> Result<Option<f64>, StatsError> {
    same_len(x.len(), y.len(), 2)?;
    if x.len() > EXACT_MAX_N {
        return Err(StatsError::TooMany { limit: EXACT_MAX_N, got: x.len() });
    }
    let rx = ranks(x);
    let mut ry = ranks(y);
    let Some(observed) = pearson(&rx, &ry) else {
        return Ok(None);
    };
    let threshold = observed.abs() - 1e-12;
    let (mut hits, mut total) = (0u64, 0u64);
    // Heap's algorithm over the ranks of y.
    let n = ry.len();
    let mut c = vec![0usize; n];
    let mut visit = |ry: &[f64]| {
        total += 1;
        if pearson(&rx, ry).is_some_and(|r| r.abs() >= threshold) {
            hits += 1;
        }
    };
    visit(&ry);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                ry.swap(0, i);
            } else {
                ry.swap(c[i], i);
            }
            visit(&ry);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    Ok(Some(hits as f64 / total as f64))
}

/// Quadratic weighted kappa for ratings in `1..=categories`.
pub fn qwk(x: &[u8], y: &[u8], categories: u8) -> Result<Option<f64>, StatsError> {
    same_len(x.len(), y.len(), 2)?;
    if categories < 2 {
        return Err(StatsError::TooFew { need: 2, got: categories as usize });
    }
    for &v in x.iter().chain(y) {
        if v == 0 || v > categories {
            return Err(StatsError::OutOfRange { value: v, categories });
        }
    }
    let k = categories as usize;
    let n = x.len() as f64;
    let mut observed = vec![vec![0.0; k]; k];
    let mut hx = vec![0.0; k];
    let mut hy = vec![0.0; k];
    for (&a, &b) in x.iter().zip(y) {
        let (i, j) = (a as usize - 1, b as usize - 1);
        observed[i][j] += 1.0;
        hx[i] += 1.0;
        hy[j] += 1.0;
    }
    let scale = ((k - 1) * (k - 1)) as f64;
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..k {
        for j in 0..k {
            let w = ((i as f64) - (j as f64)).powi(2) / scale;
            num += w * observed[i][j];
            den += w * hx[i] * hy[j] / n;
        }
    }
    if den == 0.0 {
        return Ok(None);
    }
    Ok(Some(1.0 - num / den))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Welch {
    pub t: Option<f64>,
    pub df: Option<f64>,
    pub p_value: Option<f64>,
    pub mean_a: f64,
    pub mean_b: f64,
    pub n_a: usize,
    pub n_b: usize,
}

/// Welch's unequal-variance t-test of `mean(a) - mean(b)`, two-sided.
pub fn welch_t(a: &[f64], b: &[f64]) -> Result<Welch, StatsError> {
    for len in [a.len(), b.len()] {
        if len < 2 {
            return Err(StatsError::TooFew { need: 2, got: len });
        }
    }
    let (mean_a, mean_b) = (mean(a), mean(b));
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (va, vb) = (variance(a) / na, variance(b) / nb);
    let se2 = va + vb;
    let mut out = Welch { t: None, df: None, p_value: None, mean_a, mean_b, n_a: a.len(), n_b: b.len() };
    if se2 == 0.0 {
        return Ok(out);
    }
    let t = (mean_a - mean_b) / se2.sqrt();
    let df = se2 * se2 / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
    out.t = Some(t);
    out.df = Some(df);
    out.p_value = two_sided(t, df);
    Ok(out)
}

/// Per-test threshold for a family of `tests` comparisons.
pub fn bonferroni_threshold(alpha: f64, tests: usize) -> f64 {
    alpha / tests.max(1) as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-9
    }

    #[test]
    fn average_ranks() {
        assert_eq!(ranks(&[10.0, 20.0, 20.0, 5.0]), vec![2.0, 3.5, 3.5, 1.0]);
    }

    // Reference values below come from scipy.stats and sklearn.metrics.
    #[test]
    fn spearman_with_ties() {
        let c = spearman(&[1.0, 2.0, 2.0, 4.0], &[2.0, 1.0, 3.0, 4.0]).unwrap();
        assert!(close(c.rho.unwrap(), 0.632455532033676));
        assert!(close(c.p_value.unwrap(), 0.367544467966324));
        assert!(c.approximate);
    }

    #[test]
    fn spearman_twelve() {
        let x = [1., 3., 2., 4., 4., 1., 2., 3., 4., 2., 1., 3.];
        let y = [2., 3., 2., 4., 3., 1., 1., 3., 4., 2., 2., 4.];
        let c = spearman(&x, &y).unwrap();
        assert!(close(c.rho.unwrap(), 0.8380019039424886));
        assert!((c.p_value.unwrap() - 0.0006649525760215642).abs() < 1e-12);
        assert!(!c.approximate);
    }

    #[test]
    fn spearman_degenerate() {
        let c = spearman(&[3.0, 3.0, 3.0], &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!((c.rho, c.p_value), (None, None));
        assert_eq!(spearman(&[1.0], &[1.0]), Err(StatsError::TooFew { need: 2, got: 1 }));
        assert_eq!(spearman(&[1.0, 2.0], &[1.0]), Err(StatsError::LengthMismatch(2, 1)));
    }

    #[test]
    fn exact_p() {
        // rho = 1 on 4 pairs: 2 of 24 orderings reach |rho| = 1.
        let p = spearman_exact_p(&[1., 2., 3., 4.], &[1., 2., 3., 4.]).unwrap().unwrap();
        assert!(close(p, 2.0 / 24.0));
        assert!(spearman_exact_p(&[0.0; 11], &[0.0; 11]).is_err());
    }

    #[test]
    fn qwk_values() {
        assert!(close(qwk(&[1, 1, 2, 2], &[2, 2, 1, 1], 4).unwrap().unwrap(), -1.0));
        let x = [1, 3, 2, 4, 4, 1, 2, 3, 4, 2, 1, 3];
        let y = [2, 3, 2, 4, 3, 1, 1, 3, 4, 2, 2, 4];
        assert!(close(qwk(&x, &y, 4).unwrap().unwrap(), 0.8214285714285714));
        assert_eq!(qwk(&[3, 3], &[3, 3], 4).unwrap(), None);
        assert!(matches!(qwk(&[0, 1], &[1, 1], 4), Err(StatsError::OutOfRange { .. })));
    }

    #[test]
    fn welch_values() {
        let w = welch_t(&[1., 2., 3.], &[11., 12., 13.]).unwrap();
        assert!(close(w.t.unwrap(), -12.24744871391589));
        assert!(close(w.df.unwrap(), 4.0));
        assert!((w.p_value.unwrap() - 0.00025521674944192687).abs() < 1e-12);

        let w = welch_t(&[1., 2., 3., 9.], &[2., 2., 5., 7., 7.]).unwrap();
        assert!(close(w.t.unwrap(), -0.4011770319351451));
        assert!(close(w.df.unwrap(), 5.203711568153295));
        assert!(close(w.p_value.unwrap(), 0.7042357834858466));

        assert_eq!(welch_t(&[2., 2.], &[2., 2.]).unwrap().t, None);
        assert!(welch_t(&[1.], &[1., 2.]).is_err());
    }

    #[test]
    fn bonferroni() {
        assert_eq!(bonferroni_threshold(0.05, 4), 0.0125);
    }
}
