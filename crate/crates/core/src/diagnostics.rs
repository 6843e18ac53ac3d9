//! Posterior summaries and evaluation metrics: effective sample size, highest
//! posterior density intervals, ROC/AUC and time-averaged network weights.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::Range;

use crate::error::{Error, Result};
use crate::gibbs::ChainOutput;
use crate::linalg::Matrix;
use crate::model::ProbabilitySeries;
use crate::net::{pair_index, pair_nodes};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EssEstimate {
    pub value: f64,
    /// The trace was constant; `value` is then the trace length by convention.
    pub constant: bool,
}

/// Effective sample size `N / (1 + 2 sum_k rho_k)`, truncating the autocorrelation
/// sum at the first pair `rho_{2m} + rho_{2m+1}` that turns negative. Capped at `N`.
pub fn effective_sample_size(trace: &[f64]) -> Result<EssEstimate> {
    let n = trace.len();
    if n < 10 {
        return Err(Error::invalid(format!("ESS needs at least 10 draws, got {n}")));
    }
    let m = trace.iter().sum::<f64>() / n as f64;
    let centered: Vec<f64> = trace.iter().map(|x| x - m).collect();
    let autocov = |lag: usize| -> f64 {
        centered[..n - lag].iter().zip(&centered[lag..]).map(|(a, b)| a * b).sum::<f64>() / n as f64
    };
    let c0 = autocov(0);
    if !(c0 > 0.0) {
        return Ok(EssEstimate { value: n as f64, constant: true });
    }
    // tau = -1 + 2 sum_m (rho_{2m} + rho_{2m+1}), rho_0 = 1
    let mut tau = -1.0;
    let mut lag = 0;
    while lag + 1 < n {
        let pair = (autocov(lag) + autocov(lag + 1)) / c0;
        if pair < 0.0 {
            break;
        }
        tau += 2.0 * pair;
        lag += 2;
    }
    let value = (n as f64 / tau).min(n as f64);
    Ok(EssEstimate { value, constant: false })
}

/// Shortest interval spanning `ceil(level * N)` sorted draws.
pub fn hpd_interval(trace: &[f64], level: f64) -> Result<(f64, f64)> {
    let n = trace.len();
    if n < 20 {
        return Err(Error::invalid(format!("HPD interval needs at least 20 draws, got {n}")));
    }
    if !(level > 0.0 && level <= 1.0) {
        return Err(Error::invalid(format!("interval level must be in (0, 1], got {level}")));
    }
    let mut sorted = trace.to_vec();
    sorted.sort_by(f64::total_cmp);
    let k = (libm::ceil(level * n as f64) as usize).clamp(1, n);
    let (mut best, mut width) = (0, f64::INFINITY);
    for i in 0..=n - k {
        let w = sorted[i + k - 1] - sorted[i];
        if w < width {
            width = w;
            best = i;
        }
    }
    Ok((sorted[best], sorted[best + k - 1]))
}

/// Interval cutting `(1 - level) / 2` of the sorted draws from each tail.
pub fn equal_tail_interval(trace: &[f64], level: f64) -> Result<(f64, f64)> {
    let n = trace.len();
    if n < 20 {
        return Err(Error::invalid(format!("interval needs at least 20 draws, got {n}")));
    }
    let mut sorted = trace.to_vec();
    sorted.sort_by(f64::total_cmp);
    let k = (libm::ceil(level * n as f64) as usize).clamp(1, n);
    let lo = (n - k) / 2;
    Ok((sorted[lo], sorted[lo + k - 1]))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RocPoint {
    pub threshold: f64,
    pub fpr: f64,
    pub tpr: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RocCurve {
    /// From `(0, 0)` at threshold `+inf` to `(1, 1)`, one point per distinct score.
    pub points: Vec<RocPoint>,
    pub auc: f64,
}

/// ROC curve and its area, the latter by the rank-sum statistic with ties
/// sharing their average rank.
pub fn roc_auc(scores: &[f64], labels: &[bool]) -> Result<RocCurve> {
    if scores.len() != labels.len() {
        return Err(Error::invalid("scores and labels differ in length"));
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::NonFinite("ROC score".into()));
    }
    let n_pos = labels.iter().filter(|&&l| l).count();
    let n_neg = labels.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::invalid("ROC analysis needs both positive and negative labels"));
    }

    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));

    // ascending ranks, averaged over ties
    let mut rank_sum_pos = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        let avg_rank = (i + j) as f64 / 2.0 + 1.0;
        rank_sum_pos += avg_rank * order[i..=j].iter().filter(|&&k| labels[k]).count() as f64;
        i = j + 1;
    }
    let (np, nn) = (n_pos as f64, n_neg as f64);
    let auc = (rank_sum_pos - np * (np + 1.0) / 2.0) / (np * nn);

    let mut points = vec![RocPoint { threshold: f64::INFINITY, fpr: 0.0, tpr: 0.0 }];
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut idx = order.len();
    while idx > 0 {
        let threshold = scores[order[idx - 1]];
        while idx > 0 && scores[order[idx - 1]] == threshold {
            if labels[order[idx - 1]] {
                tp += 1;
            } else {
                fp += 1;
            }
            idx -= 1;
        }
        points.push(RocPoint { threshold, fpr: fp as f64 / nn, tpr: tp as f64 / np });
    }
    Ok(RocCurve { points, auc })
}

fn check_window(window: &Range<usize>, times: usize) -> Result<()> {
    if window.start >= window.end {
        return Err(Error::invalid("empty averaging window"));
    }
    if window.end > times {
        return Err(Error::OutOfRange(format!("window {window:?} beyond {times} times")));
    }
    Ok(())
}

/// Symmetric `V x V` table of posterior-mean probabilities averaged over the time
/// indices in `window`. The diagonal is zero.
pub fn aggregate_network_weights(chain: &ChainOutput, window: Range<usize>) -> Result<Matrix> {
    check_window(&window, chain.times())?;
    let p = chain.pairs();
    let mut acc = vec![0.0; p];
    for d in 0..chain.draws() {
        let draw = chain.pi_draw(d);
        for k in window.clone() {
            for (a, x) in acc.iter_mut().zip(&draw[k * p..(k + 1) * p]) {
                *a += x;
            }
        }
    }
    let denom = (chain.draws() * window.len()) as f64;
    Ok(symmetric_table(chain.nodes(), acc.iter().map(|a| a / denom)))
}

/// Same as [`aggregate_network_weights`] starting from posterior means.
pub fn aggregate_mean_weights(pi_mean: &ProbabilitySeries, window: Range<usize>) -> Result<Matrix> {
    check_window(&window, pi_mean.times())?;
    let v = pi_mean.nodes();
    let len = window.len() as f64;
    let weights = (0..crate::net::pair_count(v)).map(|q| {
        let (i, j) = pair_nodes(q);
        window.clone().map(|k| pi_mean.get(i, j, k)).sum::<f64>() / len
    });
    Ok(symmetric_table(v, weights))
}

fn symmetric_table(v: usize, pair_values: impl Iterator<Item = f64>) -> Matrix {
    let mut m = Matrix::zeros(v, v);
    for (q, w) in pair_values.enumerate() {
        let (i, j) = pair_nodes(q);
        m[(i, j)] = w;
        m[(j, i)] = w;
    }
    m
}

/// A monitored scalar of the chain. Indices are 0-based; `Display` prints them
/// 1-based as in the output files.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    Mu { t: usize },
    InvTau { h: usize },
    Pi { t: usize, i: usize, j: usize },
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Quantity::Mu { t } => write!(f, "mu_{}", t + 1),
            Quantity::InvTau { h } => write!(f, "inv_tau_{}", h + 1),
            Quantity::Pi { t, i, j } => write!(f, "pi_{}_{}_{}", t + 1, i + 1, j + 1),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SummaryRow {
    pub quantity: Quantity,
    pub mean: f64,
    pub lower: f64,
    pub upper: f64,
    pub ess: f64,
}

fn summarize_trace(quantity: Quantity, trace: &[f64], level: f64) -> Result<SummaryRow> {
    let mean = trace.iter().sum::<f64>() / trace.len() as f64;
    let (lower, upper) = hpd_interval(trace, level)?;
    let ess = effective_sample_size(trace)?.value;
    Ok(SummaryRow { quantity, mean, lower, upper, ess })
}

/// Mean, HPD interval and ESS of every baseline value, shrinkage scale and edge
/// probability retained by the chain.
pub fn summarize(chain: &ChainOutput, level: f64) -> Result<Vec<SummaryRow>> {
    let mut rows = Vec::new();
    for t in 0..chain.times() {
        rows.push(summarize_trace(Quantity::Mu { t }, &chain.mu_trace(t), level)?);
    }
    for h in 0..chain.h_star() {
        rows.push(summarize_trace(Quantity::InvTau { h }, &chain.inv_tau_trace(h), level)?);
    }
    let p = chain.pairs();
    for t in 0..chain.times() {
        for q in 0..p {
            let (i, j) = pair_nodes(q);
            let slot = t * p + pair_index(i, j);
            rows.push(summarize_trace(Quantity::Pi { t, i, j }, &chain.pi_trace(slot), level)?);
        }
    }
    Ok(rows)
}
