//! Dynamic binary symmetric networks with missing entries.
//!
//! Only the strict lower triangle `i > j` is stored. Pairs are indexed
//! `p = i (i - 1) / 2 + j` (0-based), and a slot `(t, p)` lives at `t * P + p`
//! where `P = V (V - 1) / 2`.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Number of lower-triangular pairs among `v` nodes.
#[inline]
pub const fn pair_count(v: usize) -> usize {
    v * v.saturating_sub(1) / 2
}

/// Index of the unordered pair `{i, j}`, `i != j`.
#[inline]
pub fn pair_index(i: usize, j: usize) -> usize {
    let (hi, lo) = if i > j { (i, j) } else { (j, i) };
    debug_assert!(hi != lo, "diagonal pairs are not stored");
    hi * (hi - 1) / 2 + lo
}

/// Inverse of [`pair_index`]: returns `(i, j)` with `i > j`.
pub fn pair_nodes(p: usize) -> (usize, usize) {
    // i is the largest integer with i (i - 1) / 2 <= p
    let mut i = ((1.0 + libm::sqrt(1.0 + 8.0 * p as f64)) / 2.0) as usize;
    while i * (i - 1) / 2 > p {
        i -= 1;
    }
    while (i + 1) * i / 2 <= p {
        i += 1;
    }
    (i, p - i * (i - 1) / 2)
}

/// Strictly increasing time stamps, possibly unequally spaced.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    times: Vec<f64>,
}

impl TimeGrid {
    pub fn new(times: Vec<f64>) -> Result<Self> {
        if times.is_empty() {
            return Err(Error::invalid("time grid must contain at least one time"));
        }
        if times.iter().any(|t| !t.is_finite()) {
            return Err(Error::invalid("time stamps must be finite"));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("time stamps must be strictly increasing"));
        }
        Ok(Self { times })
    }

    /// The grid `1, 2, ..., len`.
    pub fn unit(len: usize) -> Result<Self> {
        Self::new((1..=len).map(|t| t as f64).collect())
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn last(&self) -> f64 {
        self.times[self.times.len() - 1]
    }

    /// Position of an exact time stamp on the grid.
    pub fn position(&self, t: f64) -> Option<usize> {
        self.times.iter().position(|&s| s == t)
    }

    /// Grid extended by one time stamp beyond the end.
    pub fn extended(&self, t_new: f64) -> Result<Self> {
        if !(t_new > self.last()) {
            return Err(Error::invalid(format!("new time {t_new} must lie beyond the last grid time {}", self.last())));
        }
        let mut times = self.times.clone();
        times.push(t_new);
        Self::new(times)
    }
}

/// How a zero log-return is turned into a co-movement label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TieRule {
    /// Any pair involving a zero return is missing.
    #[default]
    Missing,
    /// Zero is treated as a positive move.
    ZeroAsPositive,
}

impl core::str::FromStr for TieRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "missing" => Ok(TieRule::Missing),
            "zero_as_positive" => Ok(TieRule::ZeroAsPositive),
            other => {
                Err(Error::invalid(format!("unknown tie rule `{other}` (expected `missing` or `zero_as_positive`)")))
            }
        }
    }
}

impl core::fmt::Display for TieRule {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(match self {
            TieRule::Missing => "missing",
            TieRule::ZeroAsPositive => "zero_as_positive",
        })
    }
}

/// Log-return series for `V` assets over a time grid. `None` marks a missing value.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnsTable {
    grid: TimeGrid,
    labels: Vec<String>,
    /// `values[t][i]`
    values: Vec<Vec<Option<f64>>>,
}

impl ReturnsTable {
    pub fn new(grid: TimeGrid, labels: Vec<String>, values: Vec<Vec<Option<f64>>>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::invalid(format!(
                "returns table has {} rows but {} time stamps",
                values.len(),
                grid.len()
            )));
        }
        if let Some((t, row)) = values.iter().enumerate().find(|(_, r)| r.len() != labels.len()) {
            return Err(Error::invalid(format!("returns row {t} has {} values, expected {}", row.len(), labels.len())));
        }
        if labels.len() < 2 {
            return Err(Error::invalid("at least two return series are required"));
        }
        if values.iter().flatten().flatten().any(|z| !z.is_finite()) {
            return Err(Error::invalid("returns must be finite or missing"));
        }
        Ok(Self { grid, labels, values })
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn series_count(&self) -> usize {
        self.labels.len()
    }

    pub fn value(&self, t: usize, i: usize) -> Option<f64> {
        self.values[t][i]
    }
}

/// Symmetric binary relational data observed over a time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DynamicNetwork {
    nodes: usize,
    grid: TimeGrid,
    /// `None` is a missing slot.
    edges: Vec<Option<bool>>,
    labels: Option<Vec<String>>,
}

impl DynamicNetwork {
    /// A network with every slot missing.
    pub fn empty(nodes: usize, grid: TimeGrid) -> Result<Self> {
        if nodes < 2 {
            return Err(Error::invalid("a network needs at least two nodes"));
        }
        let slots = pair_count(nodes) * grid.len();
        Ok(Self { nodes, grid, edges: vec![None; slots], labels: None })
    }

    /// Builds a network from slot values laid out as `t * P + p`.
    pub fn from_slots(nodes: usize, grid: TimeGrid, edges: Vec<Option<bool>>) -> Result<Self> {
        let mut net = Self::empty(nodes, grid)?;
        if edges.len() != net.edges.len() {
            return Err(Error::invalid(format!("expected {} slots, got {}", net.edges.len(), edges.len())));
        }
        net.edges = edges;
        Ok(net)
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.nodes {
            return Err(Error::invalid(format!("{} labels given for {} nodes", labels.len(), self.nodes)));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    #[inline]
    pub fn nodes(&self) -> usize {
        self.nodes
    }

    #[inline]
    pub fn pairs(&self) -> usize {
        pair_count(self.nodes)
    }

    #[inline]
    pub fn times(&self) -> usize {
        self.grid.len()
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// All slots in `t * P + p` order.
    pub fn slots(&self) -> &[Option<bool>] {
        &self.edges
    }

    #[inline]
    pub fn slot_index(&self, i: usize, j: usize, t: usize) -> usize {
        t * self.pairs() + pair_index(i, j)
    }

    fn check(&self, i: usize, j: usize, t: usize) -> Result<()> {
        if i >= self.nodes || j >= self.nodes || i == j || t >= self.times() {
            return Err(Error::OutOfRange(format!(
                "slot ({i}, {j}, {t}) outside {} nodes x {} times (diagonal excluded)",
                self.nodes,
                self.times()
            )));
        }
        Ok(())
    }

    /// Value of `y_ij` at time index `t`; `(i, j)` and `(j, i)` name the same slot.
    pub fn get(&self, i: usize, j: usize, t: usize) -> Result<Option<bool>> {
        self.check(i, j, t)?;
        Ok(self.edges[self.slot_index(i, j, t)])
    }

    pub fn set(&mut self, i: usize, j: usize, t: usize, value: Option<bool>) -> Result<()> {
        self.check(i, j, t)?;
        let s = self.slot_index(i, j, t);
        self.edges[s] = value;
        Ok(())
    }

    pub fn observed_count(&self) -> usize {
        self.edges.iter().filter(|e| e.is_some()).count()
    }

    pub fn missing_count(&self) -> usize {
        self.edges.len() - self.observed_count()
    }

    /// Co-movement network: `y = 1` when two returns share a strict sign, `0` when the
    /// signs are opposite. Zero returns follow `tie_rule`; missing returns give
    /// missing slots.
    pub fn from_log_returns(returns: &ReturnsTable, tie_rule: TieRule) -> Result<Self> {
        let v = returns.series_count();
        let mut net = Self::empty(v, returns.grid().clone())?;
        let sign = |z: Option<f64>| -> Option<bool> {
            let z = z?;
            if z > 0.0 {
                Some(true)
            } else if z < 0.0 {
                Some(false)
            } else {
                match tie_rule {
                    TieRule::Missing => None,
                    TieRule::ZeroAsPositive => Some(true),
                }
            }
        };
        let p_count = net.pairs();
        for t in 0..net.times() {
            let signs: Vec<Option<bool>> = (0..v).map(|i| sign(returns.value(t, i))).collect();
            for i in 1..v {
                for j in 0..i {
                    net.edges[t * p_count + pair_index(i, j)] = match (signs[i], signs[j]) {
                        (Some(a), Some(b)) => Some(a == b),
                        _ => None,
                    };
                }
            }
        }
        net.labels = Some(returns.labels().to_vec());
        Ok(net)
    }

    /// Copy with the listed `(i, j, t)` slots set to missing, plus the values they held.
    pub fn mask_entries(&self, slots: &[(usize, usize, usize)]) -> Result<(Self, Vec<Option<bool>>)> {
        let mut out = self.clone();
        let mut held = Vec::with_capacity(slots.len());
        for &(i, j, t) in slots {
            held.push(self.get(i, j, t)?);
            out.set(i, j, t, None)?;
        }
        Ok((out, held))
    }

    /// Same network over a grid extended by one fully missing time stamp.
    pub fn with_missing_time(&self, t_new: f64) -> Result<Self> {
        let grid = self.grid.extended(t_new)?;
        let mut edges = self.edges.clone();
        edges.extend(core::iter::repeat_n(None, self.pairs()));
        Ok(Self { nodes: self.nodes, grid, edges, labels: self.labels.clone() })
    }
}
