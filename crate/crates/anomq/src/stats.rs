//! Scan statistics over vertex subsets: empirical p-value calibration, the
//! four score functions, the priority ordering, and prefix maximization.
//!
//! The nonparametric statistics (BJ, HC) aggregate, for a significance level
//! `alpha`, the count `N_alpha` of subset p-values at or below `alpha` out of
//! `N`. Both are one-sided: they are zero unless low p-values are
//! over-represented. The expectation-based statistics (EBP, KULL) compare an
//! aggregate observed count `C` against an aggregate baseline `B` and need
//! the attribute matrix rather than p-values.
//!
//! All statistics here satisfy the linear-time subset scanning property: the
//! unconstrained maximizer over subsets is a prefix of the vertices sorted by
//! the statistic's priority key, so [`ltss_prefix_max`] recovers the global
//! optimum of [`npss_score`] by scanning `n` prefixes instead of `2^n - 1`
//! subsets.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::AttributedGraph;

pub const DEFAULT_ALPHA_MAX: f64 = 0.15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Statistic {
    /// Berk-Jones: `N * KL(N_alpha / N, alpha)`, one-sided.
    Bj,
    /// Higher Criticism: `(N_alpha - N * alpha) / sqrt(N * alpha * (1 - alpha))`.
    Hc,
    /// Kulldorff's spatial scan likelihood ratio over counts and baselines.
    Kull,
    /// Expectation-based Poisson: `C ln(C/B) + B - C` for `C > B`.
    Ebp,
}

impl Statistic {
    pub fn is_nonparametric(self) -> bool {
        matches!(self, Statistic::Bj | Statistic::Hc)
    }

    pub fn name(self) -> &'static str {
        match self {
            Statistic::Bj => "bj",
            Statistic::Hc => "hc",
            Statistic::Kull => "kull",
            Statistic::Ebp => "ebp",
        }
    }
}

impl std::str::FromStr for Statistic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bj" => Ok(Statistic::Bj),
            "hc" => Ok(Statistic::Hc),
            "kull" => Ok(Statistic::Kull),
            "ebp" => Ok(Statistic::Ebp),
            other => Err(Error::InvalidConfig(format!("unknown statistic {other:?}"))),
        }
    }
}

/// Which statistic to maximize and how to read the attribute matrix.
///
/// `baseline_window` selects the columns of `W` treated as history and
/// `eval_column` the column being scored; they matter for calibration and
/// for EBP/KULL, and are ignored when p-values are supplied directly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreSpec {
    pub statistic: Statistic,
    pub alpha_max: f64,
    pub baseline_window: Range<usize>,
    pub eval_column: usize,
}

impl ScoreSpec {
    pub fn new(statistic: Statistic) -> Self {
        ScoreSpec {
            statistic,
            alpha_max: DEFAULT_ALPHA_MAX,
            baseline_window: 0..0,
            eval_column: 0,
        }
    }

    pub fn with_alpha_max(mut self, alpha_max: f64) -> Self {
        self.alpha_max = alpha_max;
        self
    }

    pub fn with_window(mut self, baseline: Range<usize>, eval_column: usize) -> Self {
        self.baseline_window = baseline;
        self.eval_column = eval_column;
        self
    }

    pub fn validate_alpha(&self) -> Result<()> {
        if self.alpha_max > 0.0 && self.alpha_max <= 1.0 {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!(
                "alpha_max {} outside (0, 1]",
                self.alpha_max
            )))
        }
    }

    fn validate_window(&self, cols: usize) -> Result<()> {
        if self.baseline_window.is_empty() {
            return Err(Error::InvalidConfig("empty baseline window".into()));
        }
        if self.baseline_window.end > cols || self.eval_column >= cols {
            return Err(Error::InvalidConfig(format!(
                "window {:?} / eval column {} out of range for {} columns",
                self.baseline_window, self.eval_column, cols
            )));
        }
        if self.baseline_window.contains(&self.eval_column) {
            return Err(Error::InvalidConfig(
                "baseline window must not contain the eval column".into(),
            ));
        }
        Ok(())
    }
}

/// A maximized score with the witness that attained it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreValue {
    pub value: f64,
    /// Maximizing significance level; unset for EBP/KULL.
    pub alpha_star: Option<f64>,
    /// P-values at or below `alpha_star` (0 for EBP/KULL).
    pub n_alpha: usize,
    pub n_total: usize,
}

impl ScoreValue {
    fn zero(n_total: usize) -> Self {
        ScoreValue {
            value: 0.0,
            alpha_star: None,
            n_alpha: 0,
            n_total,
        }
    }
}

fn ln_ratio(num: f64, den: f64) -> f64 {
    // 0 * ln(0 / x) contributes nothing.
    if num == 0.0 {
        0.0
    } else {
        num * (num / den).ln()
    }
}

fn bernoulli_kl(q: f64, alpha: f64) -> f64 {
    ln_ratio(q, alpha) + ln_ratio(1.0 - q, 1.0 - alpha)
}

fn bj_raw(alpha: f64, n_alpha: usize, n: usize) -> f64 {
    let q = n_alpha as f64 / n as f64;
    if q <= alpha {
        0.0
    } else {
        n as f64 * bernoulli_kl(q, alpha)
    }
}

fn hc_raw(alpha: f64, n_alpha: usize, n: usize) -> f64 {
    let expected = n as f64 * alpha;
    let excess = n_alpha as f64 - expected;
    if excess <= 0.0 {
        0.0
    } else {
        excess / (expected * (1.0 - alpha)).sqrt()
    }
}

fn check_alpha_counts(alpha: f64, n_alpha: usize, n: usize) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidConfig(format!("alpha {alpha} outside (0, 1)")));
    }
    if n == 0 || n_alpha > n {
        return Err(Error::InvalidInput(format!(
            "invalid counts n_alpha={n_alpha}, n={n}"
        )));
    }
    Ok(())
}

/// Berk-Jones statistic `n * KL(n_alpha / n, alpha)`, zero when the observed
/// fraction does not exceed `alpha`.
pub fn bj_score(alpha: f64, n_alpha: usize, n: usize) -> Result<f64> {
    check_alpha_counts(alpha, n_alpha, n)?;
    Ok(bj_raw(alpha, n_alpha, n))
}

/// Higher-Criticism statistic, clamped at zero below its expectation.
pub fn hc_score(alpha: f64, n_alpha: usize, n: usize) -> Result<f64> {
    check_alpha_counts(alpha, n_alpha, n)?;
    Ok(hc_raw(alpha, n_alpha, n))
}

fn ebp_raw(c: f64, b: f64) -> f64 {
    if c > b {
        c * (c / b).ln() + b - c
    } else {
        0.0
    }
}

/// Expectation-based Poisson statistic for observed aggregate `c` against
/// baseline aggregate `b`.
pub fn ebp_score(c: f64, b: f64) -> Result<f64> {
    if b <= 0.0 {
        return Err(Error::InvalidInput(format!("EBP baseline {b} must be positive")));
    }
    if c < 0.0 {
        return Err(Error::InvalidInput(format!("EBP count {c} must be non-negative")));
    }
    Ok(ebp_raw(c, b))
}

fn kull_raw(c: f64, b: f64, c_tot: f64, b_tot: f64) -> f64 {
    let c_out = c_tot - c;
    let b_out = b_tot - b;
    if c * b_out <= c_out * b {
        // Inside rate no larger than outside: one-sided null branch.
        return 0.0;
    }
    ln_ratio(c, b) + ln_ratio(c_out, b_out) - ln_ratio(c_tot, b_tot)
}

/// Kulldorff's likelihood-ratio scan statistic, one-sided for elevated
/// inside rates, with `0 ln 0 := 0`.
pub fn kulldorff_score(c: f64, b: f64, c_tot: f64, b_tot: f64) -> Result<f64> {
    if !(b > 0.0 && b < b_tot) {
        return Err(Error::InvalidInput(format!(
            "Kulldorff baseline must satisfy 0 < B < B_tot, got B={b}, B_tot={b_tot}"
        )));
    }
    if c < 0.0 || c > c_tot {
        return Err(Error::InvalidInput(format!(
            "Kulldorff count must satisfy 0 <= C <= C_tot, got C={c}, C_tot={c_tot}"
        )));
    }
    Ok(kull_raw(c, b, c_tot, b_tot))
}

/// Rank-based empirical p-values: for each vertex, the fraction of baseline
/// observations at least as large as the eval observation, with the +1
/// correction that keeps every p-value strictly positive. Ties count as
/// exceedances.
pub fn calibrate_pvalues(g: &AttributedGraph, spec: &ScoreSpec) -> Result<Vec<f64>> {
    let attrs = g.attrs().ok_or(Error::MissingAttributes)?;
    spec.validate_window(attrs.cols())?;
    let window = spec.baseline_window.clone();
    let denom = (window.len() + 1) as f64;
    let mut pvals = Vec::with_capacity(g.vertex_count());
    for v in 0..g.vertex_count() {
        let row = attrs.row(v);
        let eval = row[spec.eval_column];
        let exceed = window.clone().filter(|&t| row[t] >= eval).count();
        pvals.push((1 + exceed) as f64 / denom);
    }
    Ok(pvals)
}

/// Vertices sorted most-anomalous first. `key` holds the per-vertex
/// priority (negated p-value for BJ/HC, observed-to-baseline ratio for
/// EBP/KULL); the order is non-increasing in key with ties broken by
/// ascending vertex id.
#[derive(Debug, Clone, PartialEq)]
pub struct PriorityOrder {
    order: Vec<u32>,
    key: Vec<f64>,
}

impl PriorityOrder {
    /// Builds the order from per-vertex priority keys (index = vertex id).
    pub fn from_keys(key: Vec<f64>) -> Self {
        let mut order: Vec<u32> = (0..key.len() as u32).collect();
        order.sort_by(|&a, &b| {
            key[b as usize]
                .total_cmp(&key[a as usize])
                .then(a.cmp(&b))
        });
        PriorityOrder { order, key }
    }

    /// Vertices in priority order, highest first.
    pub fn order(&self) -> &[u32] {
        &self.order
    }

    pub fn key(&self, v: u32) -> f64 {
        self.key[v as usize]
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }
}

/// Sorts vertices by the statistic's priority function.
pub fn priority_sort(g: &AttributedGraph, spec: &ScoreSpec) -> Result<PriorityOrder> {
    let scorer = SubsetScorer::new(g, spec)?;
    Ok(PriorityOrder::from_keys(scorer.into_priority_keys()))
}

/// Maximizes the statistic over a multiset of p-values (BJ/HC).
///
/// The candidate grid is the distinct observed p-values at or below
/// `alpha_max`, plus `alpha_max` itself; the statistic is piecewise constant
/// in `alpha` between observed values, so the grid scan is exact. Ties are
/// resolved to the smallest `alpha`. EBP/KULL aggregate counts instead of
/// p-values; score those through [`SubsetScorer`].
pub fn npss_score(pvals: &[f64], spec: &ScoreSpec) -> Result<ScoreValue> {
    if !spec.statistic.is_nonparametric() {
        return Err(Error::InvalidConfig(format!(
            "npss_score applies to bj/hc; {} is count-based",
            spec.statistic.name()
        )));
    }
    spec.validate_alpha()?;
    if pvals.is_empty() {
        return Err(Error::InvalidInput("empty p-value set".into()));
    }
    let mut sorted = pvals.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut grid: Vec<f64> = sorted
        .iter()
        .copied()
        .take_while(|&p| p <= spec.alpha_max)
        .collect();
    grid.push(spec.alpha_max);
    grid.dedup();

    let n = sorted.len();
    let mut best: Option<ScoreValue> = None;
    for &alpha in &grid {
        if alpha >= 1.0 {
            continue;
        }
        let n_alpha = sorted.partition_point(|&p| p <= alpha);
        let value = match spec.statistic {
            Statistic::Bj => bj_raw(alpha, n_alpha, n),
            Statistic::Hc => hc_raw(alpha, n_alpha, n),
            _ => unreachable!(),
        };
        if best.as_ref().is_none_or(|b| value > b.value) {
            best = Some(ScoreValue {
                value,
                alpha_star: Some(alpha),
                n_alpha,
                n_total: n,
            });
        }
    }
    // alpha_max == 1.0 with every p-value above it leaves no valid level.
    Ok(best.unwrap_or(ScoreValue {
        value: 0.0,
        alpha_star: Some(spec.alpha_max),
        n_alpha: 0,
        n_total: n,
    }))
}

/// Maximizes the statistic over prefixes of the priority order, scanning
/// prefix lengths `1..=k_max` jointly with the alpha grid. Returns the
/// smallest maximizing prefix length.
pub fn ltss_prefix_max(
    order: &PriorityOrder,
    pvals: &[f64],
    spec: &ScoreSpec,
    k_max: usize,
) -> Result<(usize, ScoreValue)> {
    if !spec.statistic.is_nonparametric() {
        return Err(Error::InvalidConfig(format!(
            "prefix maximization over p-values applies to bj/hc, not {}",
            spec.statistic.name()
        )));
    }
    spec.validate_alpha()?;
    if order.len() != pvals.len() {
        return Err(Error::InvalidInput(format!(
            "order covers {} vertices but {} p-values given",
            order.len(),
            pvals.len()
        )));
    }
    if k_max == 0 || k_max > pvals.len() {
        return Err(Error::InvalidInput(format!(
            "k_max {k_max} outside 1..={}",
            pvals.len()
        )));
    }

    let mut grid: Vec<f64> = pvals
        .iter()
        .copied()
        .filter(|&p| p <= spec.alpha_max)
        .collect();
    grid.push(spec.alpha_max);
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    grid.retain(|&a| a < 1.0);

    let mut counts = vec![0usize; grid.len()];
    let mut best_k = 1usize;
    let mut best: Option<ScoreValue> = None;
    for k in 1..=k_max {
        let v = order.order()[k - 1];
        let p = pvals[v as usize];
        let start = grid.partition_point(|&a| a < p);
        for c in &mut counts[start..] {
            *c += 1;
        }
        let mut prefix_best: Option<ScoreValue> = None;
        for (j, &alpha) in grid.iter().enumerate() {
            let value = match spec.statistic {
                Statistic::Bj => bj_raw(alpha, counts[j], k),
                Statistic::Hc => hc_raw(alpha, counts[j], k),
                _ => unreachable!(),
            };
            if prefix_best.as_ref().is_none_or(|b| value > b.value) {
                prefix_best = Some(ScoreValue {
                    value,
                    alpha_star: Some(alpha),
                    n_alpha: counts[j],
                    n_total: k,
                });
            }
        }
        let prefix_best = prefix_best.unwrap_or_else(|| ScoreValue::zero(k));
        if best.as_ref().is_none_or(|b| prefix_best.value > b.value) {
            best = Some(prefix_best);
            best_k = k;
        }
    }
    Ok((best_k, best.expect("k_max >= 1 guarantees one prefix")))
}

enum ScoringData {
    /// Per-vertex p-values (BJ/HC).
    PValues(Vec<f64>),
    /// Per-vertex observed counts and baselines with their totals (EBP/KULL).
    Counts {
        c: Vec<f64>,
        b: Vec<f64>,
        c_tot: f64,
        b_tot: f64,
    },
}

/// Scores arbitrary vertex subsets of one graph under one [`ScoreSpec`],
/// holding whatever per-vertex data the statistic needs.
pub struct SubsetScorer {
    spec: ScoreSpec,
    data: ScoringData,
}

impl SubsetScorer {
    pub fn new(g: &AttributedGraph, spec: &ScoreSpec) -> Result<Self> {
        spec.validate_alpha()?;
        let data = if spec.statistic.is_nonparametric() {
            let pvals = g.pvalues().ok_or(Error::MissingPValues)?;
            ScoringData::PValues(pvals.to_vec())
        } else {
            let attrs = g.attrs().ok_or(Error::MissingAttributes)?;
            spec.validate_window(attrs.cols())?;
            let window = spec.baseline_window.clone();
            let mut c = Vec::with_capacity(g.vertex_count());
            let mut b = Vec::with_capacity(g.vertex_count());
            for v in 0..g.vertex_count() {
                let row = attrs.row(v);
                let cv = row[spec.eval_column];
                let bv = window.clone().map(|t| row[t]).sum::<f64>() / window.len() as f64;
                if cv < 0.0 || bv <= 0.0 {
                    return Err(Error::InvalidInput(format!(
                        "vertex {v}: {} needs non-negative counts and a positive baseline \
                         (C={cv}, B={bv})",
                        spec.statistic.name()
                    )));
                }
                c.push(cv);
                b.push(bv);
            }
            let c_tot = c.iter().sum();
            let b_tot = b.iter().sum();
            ScoringData::Counts { c, b, c_tot, b_tot }
        };
        Ok(SubsetScorer {
            spec: spec.clone(),
            data,
        })
    }

    pub fn spec(&self) -> &ScoreSpec {
        &self.spec
    }

    /// Priority key per vertex: higher means more anomalous.
    pub fn priority(&self, v: u32) -> f64 {
        match &self.data {
            ScoringData::PValues(p) => -p[v as usize],
            ScoringData::Counts { c, b, .. } => c[v as usize] / b[v as usize],
        }
    }

    fn into_priority_keys(self) -> Vec<f64> {
        match self.data {
            ScoringData::PValues(p) => p.into_iter().map(|p| -p).collect(),
            ScoringData::Counts { c, b, .. } => {
                c.into_iter().zip(b).map(|(c, b)| c / b).collect()
            }
        }
    }

    /// Scores a vertex subset; the empty set scores zero. Degenerate
    /// aggregates (the whole graph under KULL) also score zero rather than
    /// erroring, so search loops never abort mid-run.
    pub fn score(&self, vertices: &[u32]) -> ScoreValue {
        if vertices.is_empty() {
            return ScoreValue::zero(0);
        }
        match &self.data {
            ScoringData::PValues(p) => {
                let subset: Vec<f64> = vertices.iter().map(|&v| p[v as usize]).collect();
                npss_score(&subset, &self.spec).expect("validated at construction")
            }
            ScoringData::Counts { c, b, c_tot, b_tot } => {
                let cs: f64 = vertices.iter().map(|&v| c[v as usize]).sum();
                let bs: f64 = vertices.iter().map(|&v| b[v as usize]).sum();
                let value = match self.spec.statistic {
                    Statistic::Ebp => ebp_raw(cs, bs),
                    Statistic::Kull if bs < *b_tot => kull_raw(cs, bs, *c_tot, *b_tot),
                    Statistic::Kull => 0.0,
                    _ => unreachable!(),
                };
                ScoreValue {
                    value,
                    alpha_star: None,
                    n_alpha: 0,
                    n_total: vertices.len(),
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::AttrMatrix;
    use proptest::prelude::*;

    fn spec(stat: Statistic) -> ScoreSpec {
        ScoreSpec::new(stat)
    }

    #[test]
    fn ebp_examples() {
        assert_eq!(ebp_score(5.0, 5.0).unwrap(), 0.0);
        let e = std::f64::consts::E;
        assert!((ebp_score(e, 1.0).unwrap() - 1.0).abs() < 1e-12);
        // 10 ln 2 - 5
        let expected = 10.0 * std::f64::consts::LN_2 - 5.0;
        assert!((ebp_score(10.0, 5.0).unwrap() - expected).abs() < 1e-12);
        assert!((expected - 1.931_471_805_599_453).abs() < 1e-12);
        assert!(ebp_score(1.0, 0.0).is_err());
    }

    #[test]
    fn kulldorff_examples() {
        assert_eq!(kulldorff_score(2.0, 2.0, 10.0, 10.0).unwrap(), 0.0);
        // All counts inside: 4 ln 4 - 4 ln(4/10) = 4 ln 10
        let expected = 4.0 * 10.0_f64.ln();
        assert!((kulldorff_score(4.0, 1.0, 4.0, 10.0).unwrap() - expected).abs() < 1e-12);
        assert_eq!(kulldorff_score(0.0, 1.0, 5.0, 10.0).unwrap(), 0.0);
        assert!(kulldorff_score(1.0, 0.0, 5.0, 10.0).is_err());
        assert!(kulldorff_score(1.0, 10.0, 5.0, 10.0).is_err());
    }

    #[test]
    fn bj_examples() {
        assert_eq!(bj_score(0.1, 1, 10).unwrap(), 0.0);
        assert!((bj_score(0.1, 10, 10).unwrap() - 10.0 * 10.0_f64.ln()).abs() < 1e-12);
        // 10 * KL(0.5, 0.1)
        let kl = 0.5 * (0.5_f64 / 0.1).ln() + 0.5 * (0.5_f64 / 0.9).ln();
        assert!((bj_score(0.1, 5, 10).unwrap() - 10.0 * kl).abs() < 1e-12);
        assert!((10.0 * kl - 5.108_256_237_659_907).abs() < 1e-12);
        assert!(bj_score(0.0, 1, 10).is_err());
        assert!(bj_score(1.0, 1, 10).is_err());
    }

    #[test]
    fn hc_examples() {
        assert_eq!(hc_score(0.1, 1, 10).unwrap(), 0.0);
        let expected = 5.0 / (100.0_f64 * 0.05 * 0.95).sqrt();
        assert!((hc_score(0.05, 10, 100).unwrap() - expected).abs() < 1e-12);
        assert!((expected - 2.294_157_338_705_618).abs() < 1e-12);
        assert_eq!(hc_score(0.5, 1, 10).unwrap(), 0.0);
    }

    #[test]
    fn calibration_rank_formula() {
        // Vertex 0: eval strictly above 9 baseline values -> 1/10.
        // Vertex 1: eval at or below all 9 -> 10/10.
        let mut rows = vec![Vec::new(), Vec::new()];
        for t in 0..9 {
            rows[0].push(t as f64);
            rows[1].push(t as f64 + 10.0);
        }
        rows[0].push(100.0);
        rows[1].push(5.0);
        let mut g = AttributedGraph::from_edges(2, &[(0, 1)]).unwrap();
        g.set_attrs(AttrMatrix::from_rows(rows).unwrap()).unwrap();
        let spec = spec(Statistic::Bj).with_window(0..9, 9);
        let p = calibrate_pvalues(&g, &spec).unwrap();
        assert!((p[0] - 0.1).abs() < 1e-15);
        assert!((p[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn calibration_constant_series_ties() {
        let mut g = AttributedGraph::from_edges(2, &[(0, 1)]).unwrap();
        g.set_attrs(AttrMatrix::from_rows(vec![vec![3.0; 5], vec![3.0; 5]]).unwrap())
            .unwrap();
        let spec = spec(Statistic::Bj).with_window(0..4, 4);
        let p = calibrate_pvalues(&g, &spec).unwrap();
        assert_eq!(p, vec![1.0, 1.0]);
    }

    #[test]
    fn calibration_rejects_bad_window() {
        let mut g = AttributedGraph::from_edges(2, &[(0, 1)]).unwrap();
        g.set_attrs(AttrMatrix::from_rows(vec![vec![1.0, 2.0], vec![1.0, 2.0]]).unwrap())
            .unwrap();
        assert!(calibrate_pvalues(&g, &spec(Statistic::Bj).with_window(0..0, 1)).is_err());
        assert!(calibrate_pvalues(&g, &spec(Statistic::Bj).with_window(0..2, 1)).is_err());
        let bare = AttributedGraph::from_edges(2, &[(0, 1)]).unwrap();
        assert!(calibrate_pvalues(&bare, &spec(Statistic::Bj).with_window(0..1, 1)).is_err());
    }

    #[test]
    fn npss_single_pvalue() {
        let sv = npss_score(&[0.01], &spec(Statistic::Bj)).unwrap();
        assert!((sv.value - 100.0_f64.ln()).abs() < 1e-12);
        assert_eq!(sv.alpha_star, Some(0.01));
        assert_eq!((sv.n_alpha, sv.n_total), (1, 1));
    }

    #[test]
    fn npss_no_small_pvalues_clamps_to_zero() {
        let sv = npss_score(&[0.5, 0.9], &spec(Statistic::Bj)).unwrap();
        assert_eq!(sv.value, 0.0);
        assert_eq!(sv.n_alpha, 0);
    }

    #[test]
    fn npss_rejects_count_based_statistics_and_empty_input() {
        assert!(npss_score(&[0.1], &spec(Statistic::Ebp)).is_err());
        assert!(npss_score(&[], &spec(Statistic::Bj)).is_err());
    }

    #[test]
    fn priority_sort_ascending_pvalue() {
        let mut g = AttributedGraph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        g.set_pvalues(vec![0.5, 0.01, 0.2]).unwrap();
        let order = priority_sort(&g, &spec(Statistic::Bj)).unwrap();
        assert_eq!(order.order(), &[1, 2, 0]);
        assert_eq!(order.key(0), -0.5);
    }

    #[test]
    fn priority_sort_tie_by_id_and_identity() {
        let mut g = AttributedGraph::from_edges(2, &[(0, 1)]).unwrap();
        g.set_pvalues(vec![0.1, 0.1]).unwrap();
        assert_eq!(priority_sort(&g, &spec(Statistic::Bj)).unwrap().order(), &[0, 1]);

        let mut g = AttributedGraph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        g.set_pvalues(vec![0.1, 0.2, 0.3]).unwrap();
        assert_eq!(priority_sort(&g, &spec(Statistic::Bj)).unwrap().order(), &[0, 1, 2]);
    }

    #[test]
    fn prefix_max_prefers_smallest_k() {
        let mut g = AttributedGraph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        g.set_pvalues(vec![0.01, 0.2, 0.5]).unwrap();
        let s = spec(Statistic::Bj);
        let order = priority_sort(&g, &s).unwrap();
        let (k, sv) = ltss_prefix_max(&order, g.pvalues().unwrap(), &s, 3).unwrap();
        assert_eq!(k, 1);
        assert!((sv.value - 100.0_f64.ln()).abs() < 1e-12);

        // All-equal p-values above alpha_max score zero everywhere; the tie
        // resolves to the smallest prefix.
        let mut g = AttributedGraph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        g.set_pvalues(vec![0.5, 0.5, 0.5]).unwrap();
        let order = priority_sort(&g, &s).unwrap();
        let (k, _) = ltss_prefix_max(&order, g.pvalues().unwrap(), &s, 3).unwrap();
        assert_eq!(k, 1);
    }

    #[test]
    fn prefix_max_forced_k() {
        let mut g = AttributedGraph::from_edges(2, &[(0, 1)]).unwrap();
        g.set_pvalues(vec![0.3, 0.01]).unwrap();
        let s = spec(Statistic::Hc);
        let order = priority_sort(&g, &s).unwrap();
        let (k, _) = ltss_prefix_max(&order, g.pvalues().unwrap(), &s, 1).unwrap();
        assert_eq!(k, 1);
        assert!(ltss_prefix_max(&order, g.pvalues().unwrap(), &s, 0).is_err());
        assert!(ltss_prefix_max(&order, g.pvalues().unwrap(), &s, 3).is_err());
    }

    #[test]
    fn subset_scorer_counts_path() {
        let mut g = AttributedGraph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let rows = vec![
            vec![1.0, 1.0, 4.0], // c=4, b=1
            vec![2.0, 2.0, 2.0], // c=2, b=2
            vec![1.0, 3.0, 2.0], // c=2, b=2
        ];
        g.set_attrs(AttrMatrix::from_rows(rows).unwrap()).unwrap();
        let s = spec(Statistic::Ebp).with_window(0..2, 2);
        let scorer = SubsetScorer::new(&g, &s).unwrap();
        let sv = scorer.score(&[0]);
        assert!((sv.value - ebp_score(4.0, 1.0).unwrap()).abs() < 1e-12);
        assert_eq!(sv.alpha_star, None);
        assert!(scorer.priority(0) > scorer.priority(1));

        let s = spec(Statistic::Kull).with_window(0..2, 2);
        let scorer = SubsetScorer::new(&g, &s).unwrap();
        let sv = scorer.score(&[0]);
        assert!((sv.value - kulldorff_score(4.0, 1.0, 8.0, 5.0).unwrap()).abs() < 1e-12);
        // Whole graph is degenerate for KULL and scores zero.
        assert_eq!(scorer.score(&[0, 1, 2]).value, 0.0);
    }

    #[test]
    fn calibration_super_uniform() {
        // Eval drawn from the same distribution as the baseline: the
        // empirical p-value must be (super-)uniform.
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        let trials = 10_000;
        let t = 19usize;
        let alphas = [0.05, 0.15, 0.5];
        let mut hits = [0usize; 3];
        for _ in 0..trials {
            let series: Vec<f64> = (0..=t).map(|_| rng.gen::<f64>()).collect();
            let eval = series[t];
            let exceed = series[..t].iter().filter(|&&x| x >= eval).count();
            let p = (1 + exceed) as f64 / (t + 1) as f64;
            for (h, &a) in hits.iter_mut().zip(&alphas) {
                if p <= a {
                    *h += 1;
                }
            }
        }
        for (h, &a) in hits.iter().zip(&alphas) {
            let frac = *h as f64 / trials as f64;
            let sigma = (a * (1.0 - a) / trials as f64).sqrt();
            assert!(
                frac <= a + 3.0 * sigma,
                "fraction {frac} exceeds {a} + 3 sigma"
            );
        }
    }

    proptest! {
        #[test]
        fn statistics_are_one_sided(
            alpha in 0.01f64..0.99,
            n in 1usize..40,
            frac in 0.0f64..=1.0,
        ) {
            let n_alpha = (frac * n as f64).round() as usize;
            let bj = bj_score(alpha, n_alpha, n).unwrap();
            let hc = hc_score(alpha, n_alpha, n).unwrap();
            prop_assert!(bj >= 0.0 && hc >= 0.0);
            if (n_alpha as f64) <= n as f64 * alpha {
                prop_assert_eq!(bj, 0.0);
                prop_assert_eq!(hc, 0.0);
            }
        }

        #[test]
        fn statistics_monotone_in_exceedances(alpha in 0.01f64..0.5, n in 2usize..30) {
            let mut prev_bj = 0.0;
            let mut prev_hc = 0.0;
            for n_alpha in 0..=n {
                if n_alpha as f64 >= n as f64 * alpha {
                    let bj = bj_score(alpha, n_alpha, n).unwrap();
                    let hc = hc_score(alpha, n_alpha, n).unwrap();
                    prop_assert!(bj + 1e-12 >= prev_bj);
                    prop_assert!(hc + 1e-12 >= prev_hc);
                    prev_bj = bj;
                    prev_hc = hc;
                }
            }
        }

        #[test]
        fn npss_matches_exhaustive_alpha_grid(
            pvals in proptest::collection::vec(0.001f64..=1.0, 1..12),
            bj in proptest::bool::ANY,
        ) {
            let stat = if bj { Statistic::Bj } else { Statistic::Hc };
            let s = ScoreSpec::new(stat);
            let sv = npss_score(&pvals, &s).unwrap();

            let mut grid: Vec<f64> = pvals.iter().copied().filter(|&p| p <= s.alpha_max).collect();
            grid.push(s.alpha_max);
            let mut expected = 0.0f64;
            for &alpha in &grid {
                let n_alpha = pvals.iter().filter(|&&p| p <= alpha).count();
                let v = match stat {
                    Statistic::Bj => bj_score(alpha, n_alpha, pvals.len()).unwrap(),
                    _ => hc_score(alpha, n_alpha, pvals.len()).unwrap(),
                };
                expected = expected.max(v);
            }
            prop_assert!((sv.value - expected).abs() < 1e-12);
        }

        #[test]
        fn calibrated_pvalues_in_unit_interval(
            rows in proptest::collection::vec(
                proptest::collection::vec(-100.0f64..100.0, 6),
                1..6,
            ),
        ) {
            let n = rows.len();
            let edges: Vec<(u32, u32)> =
                (1..n as u32).map(|v| (0, v)).collect();
            let mut g = AttributedGraph::from_edges(n.max(1), &edges).unwrap();
            g.set_attrs(AttrMatrix::from_rows(rows).unwrap()).unwrap();
            let s = ScoreSpec::new(Statistic::Bj).with_window(0..5, 5);
            let p = calibrate_pvalues(&g, &s).unwrap();
            prop_assert!(p.iter().all(|&p| p > 0.0 && p <= 1.0));
        }
    }
}
