//! Deterministic pieces of the latent space model: similarities, the logistic
//! link, the likelihood, the eigendecomposition factorization and the per-node
//! design matrix used by the coordinate update.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{symmetric_eigen, Matrix};
use crate::net::{pair_count, pair_index, DynamicNetwork};
use crate::shrinkage::ShrinkageState;

/// Full state of the sampler.
///
/// Coordinates are stored as `coords[(i * H + h) * T + k] = x_ih(t_k)`, so the
/// trajectories of one node form a contiguous block of `H * T` values ordered
/// dimension-major, matching the vectorized coefficient of the coordinate update.
#[derive(Debug, Clone, PartialEq)]
pub struct LatentState {
    nodes: usize,
    h_star: usize,
    times: usize,
    pub mu: Vec<f64>,
    pub coords: Vec<f64>,
    pub shrink: ShrinkageState,
    /// Augmentation variables per slot, `t * P + p`.
    pub omega: Vec<f64>,
}

impl LatentState {
    pub fn new(nodes: usize, times: usize, mu: Vec<f64>, coords: Vec<f64>, shrink: ShrinkageState) -> Result<Self> {
        let h_star = shrink.len();
        if mu.len() != times {
            return Err(Error::invalid(format!("baseline has {} points, expected {times}", mu.len())));
        }
        if coords.len() != nodes * h_star * times {
            return Err(Error::invalid(format!(
                "coordinates have {} values, expected {}",
                coords.len(),
                nodes * h_star * times
            )));
        }
        let omega = vec![0.25; pair_count(nodes) * times];
        let s = Self { nodes, h_star, times, mu, coords, shrink, omega };
        s.validate()?;
        Ok(s)
    }

    /// Checks finiteness and positivity of the augmentation variables.
    pub fn validate(&self) -> Result<()> {
        if self.mu.iter().chain(&self.coords).any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("latent trajectory".into()));
        }
        if self.omega.iter().any(|&w| !(w > 0.0) || !w.is_finite()) {
            return Err(Error::NonFinite("augmentation variable".into()));
        }
        Ok(())
    }

    #[inline]
    pub fn nodes(&self) -> usize {
        self.nodes
    }

    #[inline]
    pub fn h_star(&self) -> usize {
        self.h_star
    }

    #[inline]
    pub fn times(&self) -> usize {
        self.times
    }

    #[inline]
    pub fn pairs(&self) -> usize {
        pair_count(self.nodes)
    }

    #[inline]
    pub fn coord(&self, i: usize, h: usize, k: usize) -> f64 {
        self.coords[(i * self.h_star + h) * self.times + k]
    }

    /// `x_i(t_k)' x_j(t_k)`
    #[inline]
    pub fn inner(&self, i: usize, j: usize, k: usize) -> f64 {
        let t = self.times;
        let (bi, bj) = (i * self.h_star * t, j * self.h_star * t);
        (0..self.h_star).map(|h| self.coords[bi + h * t + k] * self.coords[bj + h * t + k]).sum()
    }

    /// `mu(t_k) + x_i(t_k)' x_j(t_k)`
    #[inline]
    pub fn linear_predictor(&self, i: usize, j: usize, k: usize) -> f64 {
        self.mu[k] + self.inner(i, j, k)
    }

    /// The `V x H` coordinate matrix `X(t_k)` in row-major order.
    pub fn coordinate_slab(&self, k: usize) -> Vec<f64> {
        let mut slab = Vec::with_capacity(self.nodes * self.h_star);
        for i in 0..self.nodes {
            for h in 0..self.h_star {
                slab.push(self.coord(i, h, k));
            }
        }
        slab
    }

    /// Contiguous `H * T` block of node `v`.
    pub fn node_block(&self, v: usize) -> &[f64] {
        let n = self.h_star * self.times;
        &self.coords[v * n..(v + 1) * n]
    }

    pub fn node_block_mut(&mut self, v: usize) -> &mut [f64] {
        let n = self.h_star * self.times;
        &mut self.coords[v * n..(v + 1) * n]
    }

    /// Edge probabilities at every slot.
    pub fn probabilities(&self) -> ProbabilitySeries {
        let mut values = Vec::with_capacity(self.pairs() * self.times);
        for k in 0..self.times {
            values.extend(similarity(self, k).into_iter().map(edge_probability));
        }
        ProbabilitySeries { nodes: self.nodes, times: self.times, values }
    }
}

/// Lower-triangular edge probabilities per time, stored like network slots.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilitySeries {
    nodes: usize,
    times: usize,
    values: Vec<f64>,
}

impl ProbabilitySeries {
    pub fn from_values(nodes: usize, times: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != pair_count(nodes) * times {
            return Err(Error::invalid("probability series has wrong length"));
        }
        if values.iter().any(|&p| !(p > 0.0 && p < 1.0)) {
            return Err(Error::invalid("probabilities must lie strictly inside (0, 1)"));
        }
        Ok(Self { nodes, times, values })
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn times(&self) -> usize {
        self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.values[k * pair_count(self.nodes) + pair_index(i, j)]
    }
}

/// Lower-triangular similarities `s_ij(t_k) = mu(t_k) + x_i' x_j`, pair-indexed.
pub fn similarity(state: &LatentState, k: usize) -> Vec<f64> {
    let v = state.nodes();
    let h = state.h_star();
    let slab = state.coordinate_slab(k);
    let mut out = Vec::with_capacity(pair_count(v));
    for i in 1..v {
        let xi = &slab[i * h..(i + 1) * h];
        for j in 0..i {
            let xj = &slab[j * h..(j + 1) * h];
            out.push(state.mu[k] + crate::linalg::dot(xi, xj));
        }
    }
    out
}

/// Logistic link, evaluated on the branch that cannot overflow.
#[inline]
pub fn edge_probability(s: f64) -> f64 {
    if s >= 0.0 {
        1.0 / (1.0 + libm::exp(-s))
    } else {
        let e = libm::exp(s);
        e / (1.0 + e)
    }
}

/// `log(logistic(s))`
#[inline]
pub fn log_edge_probability(s: f64) -> f64 {
    if s >= 0.0 {
        -libm::log1p(libm::exp(-s))
    } else {
        s - libm::log1p(libm::exp(s))
    }
}

/// Bernoulli log-likelihood over observed slots.
pub fn log_likelihood(state: &LatentState, net: &DynamicNetwork) -> f64 {
    let p = net.pairs();
    let mut total = 0.0;
    for k in 0..net.times() {
        let s = similarity(state, k);
        for (q, &sq) in s.iter().enumerate() {
            match net.slots()[k * p + q] {
                Some(true) => total += log_edge_probability(sq),
                Some(false) => total += log_edge_probability(-sq),
                None => {}
            }
        }
    }
    total
}

/// Coordinates `X = [P Lambda^{1/2} | 0]` with `X X' = S` for a symmetric positive
/// semidefinite `S`, padded with zero columns up to `h >= V`.
pub fn exact_factorization(s: &Matrix, h: usize) -> Result<Matrix> {
    if !s.is_square() {
        return Err(Error::invalid("similarity matrix must be square"));
    }
    let v = s.rows();
    if h < v {
        return Err(Error::invalid(format!("need at least {v} latent dimensions, got {h}")));
    }
    let norm = s.norm_fro();
    if !s.is_symmetric(1e-12 * norm.max(1.0)) {
        return Err(Error::invalid("similarity matrix must be symmetric"));
    }
    let (values, vectors) = symmetric_eigen(s)?;
    let tol = 1e-10 * norm;
    if let Some(&neg) = values.iter().find(|&&l| l < -tol) {
        return Err(Error::NegativeEigenvalue(neg));
    }
    let roots: Vec<f64> = values.iter().map(|&l| libm::sqrt(l.max(0.0))).collect();
    Ok(Matrix::from_fn(v, h, |i, c| if c < v { vectors[(i, c)] * roots[c] } else { 0.0 }))
}

/// One row of a node's design matrix: the partner node and the time index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DesignRow {
    pub partner: usize,
    pub time: usize,
}

/// The node-wise logistic regression behind the coordinate update.
///
/// With `beta` the node's `H * T` block, `mu(t) + (regressors * beta)[row]` is the
/// linear predictor of that row's slot.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeDesign {
    pub regressors: Matrix,
    pub rows: Vec<DesignRow>,
    /// `y - 1/2`
    pub response: Vec<f64>,
    /// `mu(t)` per row.
    pub offset: Vec<f64>,
    /// Augmentation variable per row.
    pub omega: Vec<f64>,
    /// Prior variance scale `tau_h^{-1}` per dimension; the prior on the block of
    /// dimension `h` is `N(0, tau_h^{-1} K_x)`.
    pub prior_variances: Vec<f64>,
}

/// Design matrix of node `v` over every slot with a value in `slots`.
pub fn node_design_from_slots(state: &LatentState, slots: &[Option<bool>], v: usize) -> NodeDesign {
    let (nodes, h, t) = (state.nodes(), state.h_star(), state.times());
    let p = state.pairs();
    let mut rows = Vec::new();
    let mut response = Vec::new();
    let mut offset = Vec::new();
    let mut omega = Vec::new();
    for partner in (0..nodes).filter(|&j| j != v) {
        for k in 0..t {
            let slot = k * p + pair_index(v, partner);
            if let Some(y) = slots[slot] {
                rows.push(DesignRow { partner, time: k });
                response.push(if y { 0.5 } else { -0.5 });
                offset.push(state.mu[k]);
                omega.push(state.omega[slot]);
            }
        }
    }
    let mut regressors = Matrix::zeros(rows.len(), h * t);
    for (r, row) in rows.iter().enumerate() {
        for d in 0..h {
            regressors[(r, d * t + row.time)] = state.coord(row.partner, d, row.time);
        }
    }
    let prior_variances = state.shrink.taus().iter().map(|tau| 1.0 / tau).collect();
    NodeDesign { regressors, rows, response, offset, omega, prior_variances }
}

/// Design matrix of node `v` over the observed slots of `net`.
pub fn node_design_matrix(state: &LatentState, net: &DynamicNetwork, v: usize) -> Result<NodeDesign> {
    if v >= state.nodes() {
        return Err(Error::OutOfRange(format!("node {v} of {}", state.nodes())));
    }
    if net.nodes() != state.nodes() || net.times() != state.times() {
        return Err(Error::invalid("network and state dimensions differ"));
    }
    Ok(node_design_from_slots(state, net.slots(), v))
}
