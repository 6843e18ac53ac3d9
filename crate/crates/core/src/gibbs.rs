//! Polya-Gamma augmented block Gibbs sampler.
//!
//! One sweep runs, in order: augmentation variables, baseline trajectory, node
//! coordinate blocks (ascending node index), shrinkage multipliers, then imputation
//! of missing slots. Imputed values act as data in the next sweep.
//!
//! The slot-wise steps (augmentation and imputation) draw from one ChaCha stream
//! per time index, keyed by a value taken from the chain's master generator, so
//! results do not depend on how those steps are scheduled across threads.

use alloc::boxed::Box;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::gp::{build_covariance, CovarianceFactor, KernelConfig, DEFAULT_JITTER};
use crate::linalg::{Cholesky, Matrix};
use crate::model::{edge_probability, LatentState, ProbabilitySeries};
use crate::net::{pair_count, pair_nodes, DynamicNetwork, TimeGrid};
use crate::polya_gamma::sample_pg1;
use crate::shrinkage::{RateRule, ShrinkageState};

/// Run-time configuration of a chain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GibbsConfig {
    /// Truncation level `H*`.
    pub h_star: usize,
    pub kappa_mu: f64,
    pub kappa_x: f64,
    pub a1: f64,
    pub a2: f64,
    pub n_iter: usize,
    pub burn_in: usize,
    pub thin: usize,
    pub seed: u64,
    pub jitter: f64,
    pub literal_step4_rate: bool,
}

impl Default for GibbsConfig {
    fn default() -> Self {
        Self {
            h_star: 10,
            kappa_mu: 0.05,
            kappa_x: 0.05,
            a1: 2.0,
            a2: 2.0,
            n_iter: 5000,
            burn_in: 1000,
            thin: 1,
            seed: 0,
            jitter: DEFAULT_JITTER,
            literal_step4_rate: false,
        }
    }
}

impl GibbsConfig {
    pub fn validate(&self) -> Result<()> {
        if self.h_star == 0 {
            return Err(Error::invalid("h_star must be at least 1"));
        }
        for (name, value) in [("kappa_mu", self.kappa_mu), ("kappa_x", self.kappa_x), ("a1", self.a1), ("a2", self.a2)]
        {
            if !(value > 0.0) || !value.is_finite() {
                return Err(Error::invalid(format!("{name} must be positive, got {value}")));
            }
        }
        if !(self.jitter >= 0.0) || !self.jitter.is_finite() {
            return Err(Error::invalid(format!("jitter must be nonnegative, got {}", self.jitter)));
        }
        if self.burn_in >= self.n_iter {
            return Err(Error::invalid(format!(
                "burn_in ({}) must be smaller than n_iter ({})",
                self.burn_in, self.n_iter
            )));
        }
        if self.thin == 0 {
            return Err(Error::invalid("thin must be at least 1"));
        }
        Ok(())
    }

    /// Number of draws kept after burn-in and thinning.
    pub fn retained_draws(&self) -> usize {
        (self.n_iter - self.burn_in) / self.thin
    }

    pub fn rate_rule(&self) -> RateRule {
        if self.literal_step4_rate {
            RateRule::Literal
        } else {
            RateRule::Conjugate
        }
    }
}

/// Network slots as seen by the sampler: observed values plus the current
/// imputations of the missing ones.
#[derive(Debug, Clone, PartialEq)]
pub struct AugmentedData {
    nodes: usize,
    times: usize,
    y: Vec<Option<bool>>,
    missing: Vec<usize>,
}

impl AugmentedData {
    /// Missing slots start without a value and are skipped until imputed.
    pub fn from_network(net: &DynamicNetwork) -> Self {
        let y = net.slots().to_vec();
        let missing = y.iter().enumerate().filter(|(_, v)| v.is_none()).map(|(s, _)| s).collect();
        Self { nodes: net.nodes(), times: net.times(), y, missing }
    }

    pub fn slots(&self) -> &[Option<bool>] {
        &self.y
    }

    /// Slots that were missing in the original network.
    pub fn missing(&self) -> &[usize] {
        &self.missing
    }

    /// Overwrites the value of a slot (used when re-simulating data).
    pub fn set(&mut self, slot: usize, value: bool) {
        self.y[slot] = Some(value);
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn times(&self) -> usize {
        self.times
    }
}

fn stream(key: u64, index: usize) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(key);
    r.set_stream(index as u64);
    r
}

/// Runs `f(k, row_k)` for every time index over `P`-sized rows of `buf`.
fn for_each_time<F>(buf: &mut [f64], p: usize, f: F) -> Result<()>
where
    F: Fn(usize, &mut [f64]) -> Result<()> + Sync + Send,
{
    if p == 0 {
        return Ok(());
    }
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        buf.par_chunks_mut(p).enumerate().try_for_each(|(k, row)| f(k, row))
    }
    #[cfg(not(feature = "parallel"))]
    {
        buf.chunks_mut(p).enumerate().try_for_each(|(k, row)| f(k, row))
    }
}

/// Draws every augmentation variable with a value from `PG(1, mu(t) + x_i' x_j)`.
pub fn update_omega<R: RngCore + ?Sized>(state: &mut LatentState, data: &AugmentedData, rng: &mut R) -> Result<()> {
    let key = rng.next_u64();
    let p = state.pairs();
    let mut omega = core::mem::take(&mut state.omega);
    let st: &LatentState = state;
    let result = for_each_time(&mut omega, p, |k, row| {
        let mut r = stream(key, k);
        for (q, w) in row.iter_mut().enumerate() {
            if data.y[k * p + q].is_some() {
                let (i, j) = pair_nodes(q);
                *w = sample_pg1(st.linear_predictor(i, j, k), &mut r)?.value();
            }
        }
        Ok(())
    });
    state.omega = omega;
    result
}

/// Draws `z ~ N(P^{-1} b, P^{-1})` given the Cholesky factor of the precision `P`.
fn draw_gaussian<R: Rng + ?Sized>(chol: &Cholesky, rhs: &[f64], rng: &mut R) -> Vec<f64> {
    let mut mean = rhs.to_vec();
    chol.solve_in_place(&mut mean);
    let mut z: Vec<f64> = (0..rhs.len()).map(|_| StandardNormal.sample(rng)).collect();
    chol.solve_upper_in_place(&mut z);
    mean.iter().zip(&z).map(|(m, e)| m + e).collect()
}

/// Precision and right-hand side of the Gaussian full conditional of the baseline.
pub fn baseline_system(state: &LatentState, data: &AugmentedData, cov_mu: &CovarianceFactor) -> (Matrix, Vec<f64>) {
    let t = state.times();
    let p = state.pairs();
    let mut precision = cov_mu.precision().clone();
    let mut rhs = vec![0.0; t];
    for k in 0..t {
        let mut wsum = 0.0;
        let mut r = 0.0;
        for q in 0..p {
            let s = k * p + q;
            if let Some(y) = data.y[s] {
                let (i, j) = pair_nodes(q);
                let w = state.omega[s];
                wsum += w;
                r += if y { 0.5 } else { -0.5 } - w * state.inner(i, j, k);
            }
        }
        precision[(k, k)] += wsum;
        rhs[k] = r;
    }
    (precision, rhs)
}

/// Draws the baseline trajectory from its Gaussian full conditional.
pub fn update_mu<R: Rng + ?Sized>(
    state: &mut LatentState,
    data: &AugmentedData,
    cov_mu: &CovarianceFactor,
    rng: &mut R,
) -> Result<()> {
    let (precision, rhs) = baseline_system(state, data, cov_mu);
    let chol = Cholesky::in_place(precision)?;
    state.mu = draw_gaussian(&chol, &rhs, rng);
    Ok(())
}

/// Precision `X~' Omega X~ + diag(tau) (x) K_x^{-1}` and right-hand side
/// `X~' (y - 1/2 - Omega mu)` of node `v`'s coordinate block.
///
/// The design matrix is never formed: its row for slot `(v, j, t_k)` has
/// `x_jh(t_k)` in column `h * T + k`, so the data term only couples entries that
/// share a time index.
pub fn coordinate_system(
    state: &LatentState,
    data: &AugmentedData,
    cov_x: &CovarianceFactor,
    v: usize,
) -> (Matrix, Vec<f64>) {
    let (nodes, hs, t) = (state.nodes(), state.h_star(), state.times());
    let p = state.pairs();
    let n = hs * t;
    let kinv = cov_x.precision();
    let mut precision = Matrix::zeros(n, n);
    for (h, tau) in state.shrink.taus().iter().enumerate() {
        for a in 0..t {
            let row = precision.row_mut(h * t + a);
            for b in 0..t {
                row[h * t + b] = tau * kinv[(a, b)];
            }
        }
    }
    let mut rhs = vec![0.0; n];
    let mut xj = vec![0.0; hs];
    for k in 0..t {
        for j in (0..nodes).filter(|&j| j != v) {
            let s = k * p + crate::net::pair_index(v, j);
            let Some(y) = data.y[s] else { continue };
            let w = state.omega[s];
            for (h, x) in xj.iter_mut().enumerate() {
                *x = state.coord(j, h, k);
            }
            let resid = if y { 0.5 } else { -0.5 } - w * state.mu[k];
            for h in 0..hs {
                rhs[h * t + k] += xj[h] * resid;
                let wx = w * xj[h];
                let row = precision.row_mut(h * t + k);
                for (g, xg) in xj.iter().enumerate() {
                    row[g * t + k] += wx * xg;
                }
            }
        }
    }
    (precision, rhs)
}

/// Updates every node's coordinate block in ascending order.
pub fn update_coordinates<R: Rng + ?Sized>(
    state: &mut LatentState,
    data: &AugmentedData,
    cov_x: &CovarianceFactor,
    rng: &mut R,
) -> Result<()> {
    if state.h_star() == 0 {
        return Ok(());
    }
    for v in 0..state.nodes() {
        let (precision, rhs) = coordinate_system(state, data, cov_x, v);
        let chol = Cholesky::in_place(precision)?;
        let beta = draw_gaussian(&chol, &rhs, rng);
        state.node_block_mut(v).copy_from_slice(&beta);
    }
    Ok(())
}

/// Updates the shrinkage multipliers given the current coordinates.
pub fn update_shrinkage<R: Rng + ?Sized>(
    state: &mut LatentState,
    cov_x: &CovarianceFactor,
    rule: RateRule,
    rng: &mut R,
) -> Result<()> {
    if state.h_star() == 0 {
        return Ok(());
    }
    let nodes = state.nodes();
    let coords = core::mem::take(&mut state.coords);
    let result = state.shrink.update_thetas(&coords, nodes, cov_x, rule, rng);
    state.coords = coords;
    result
}

/// Draws every originally missing slot from its Bernoulli conditional.
pub fn impute_missing<R: RngCore + ?Sized>(state: &LatentState, data: &mut AugmentedData, rng: &mut R) {
    if data.missing.is_empty() {
        return;
    }
    let key = rng.next_u64();
    let p = state.pairs();
    // missing slots are sorted, so each time index owns a contiguous run
    let mut start = 0;
    while start < data.missing.len() {
        let k = data.missing[start] / p;
        let end = start + data.missing[start..].iter().take_while(|&&s| s / p == k).count();
        let mut r = stream(key, k);
        for idx in start..end {
            let s = data.missing[idx];
            let (i, j) = pair_nodes(s % p);
            let pi = edge_probability(state.linear_predictor(i, j, k));
            data.y[s] = Some(r.random::<f64>() < pi);
        }
        start = end;
    }
}

/// A chain positioned at its current state.
#[derive(Debug, Clone)]
pub struct Sampler {
    cfg: GibbsConfig,
    cov_mu: CovarianceFactor,
    cov_x: CovarianceFactor,
    state: LatentState,
    data: AugmentedData,
    rng: ChaCha8Rng,
    sweeps: usize,
}

impl Sampler {
    /// Validates the configuration and initializes every block from its prior;
    /// missing slots start at fair coin flips.
    pub fn new(net: &DynamicNetwork, cfg: GibbsConfig) -> Result<Self> {
        cfg.validate()?;
        Self::build(net, cfg, cfg.h_star)
    }

    /// Like [`Sampler::new`] without the `h_star >= 1` check; `h_star = 0` gives the
    /// baseline-only logistic GP model.
    pub(crate) fn build(net: &DynamicNetwork, cfg: GibbsConfig, h_star: usize) -> Result<Self> {
        let grid = net.grid();
        let cov_mu = build_covariance(grid, KernelConfig::new(cfg.kappa_mu).with_jitter(cfg.jitter))?;
        let cov_x = build_covariance(grid, KernelConfig::new(cfg.kappa_x).with_jitter(cfg.jitter))?;
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let (state, data) = init_from_prior(net, &cov_mu, &cov_x, cfg.a1, cfg.a2, h_star, &mut rng)?;
        Ok(Self { cfg, cov_mu, cov_x, state, data, rng, sweeps: 0 })
    }

    pub fn config(&self) -> &GibbsConfig {
        &self.cfg
    }

    pub fn state(&self) -> &LatentState {
        &self.state
    }

    pub fn state_mut(&mut self) -> &mut LatentState {
        &mut self.state
    }

    pub fn data(&self) -> &AugmentedData {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut AugmentedData {
        &mut self.data
    }

    pub fn rng_mut(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn cov_mu(&self) -> &CovarianceFactor {
        &self.cov_mu
    }

    pub fn cov_x(&self) -> &CovarianceFactor {
        &self.cov_x
    }

    pub fn sweeps(&self) -> usize {
        self.sweeps
    }

    /// One full sweep of the five steps.
    pub fn sweep(&mut self) -> Result<()> {
        self.sweeps += 1;
        self.sweep_inner().map_err(|e| Error::Sweep { sweep: self.sweeps, source: Box::new(e) })
    }

    fn sweep_inner(&mut self) -> Result<()> {
        update_omega(&mut self.state, &self.data, &mut self.rng)?;
        update_mu(&mut self.state, &self.data, &self.cov_mu, &mut self.rng)?;
        update_coordinates(&mut self.state, &self.data, &self.cov_x, &mut self.rng)?;
        update_shrinkage(&mut self.state, &self.cov_x, self.cfg.rate_rule(), &mut self.rng)?;
        impute_missing(&self.state, &mut self.data, &mut self.rng);
        self.state.validate()
    }
}

/// Draws `(state, data)` from the prior: baseline and coordinates from their GPs,
/// shrinkage from the gamma process, missing slots uniformly.
pub(crate) fn init_from_prior<R: Rng + ?Sized>(
    net: &DynamicNetwork,
    cov_mu: &CovarianceFactor,
    cov_x: &CovarianceFactor,
    a1: f64,
    a2: f64,
    h_star: usize,
    rng: &mut R,
) -> Result<(LatentState, AugmentedData)> {
    let shrink = ShrinkageState::sample_prior(a1, a2, h_star, rng)?;
    let t = net.times();
    let mu = cov_mu.sample(1.0, rng);
    let mut coords = Vec::with_capacity(net.nodes() * h_star * t);
    for _ in 0..net.nodes() {
        for tau in shrink.taus() {
            coords.extend(cov_x.sample(1.0 / libm::sqrt(*tau), rng));
        }
    }
    let state = LatentState::new(net.nodes(), t, mu, coords, shrink)?;
    let mut data = AugmentedData::from_network(net);
    for idx in 0..data.missing.len() {
        let s = data.missing[idx];
        data.y[s] = Some(rng.random::<bool>());
    }
    Ok((state, data))
}

/// Retained draws of a chain.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainOutput {
    nodes: usize,
    grid: TimeGrid,
    h_star: usize,
    draws: usize,
    /// `[draw][slot]`
    pi: Vec<f64>,
    /// `[draw][t]`
    mu: Vec<f64>,
    /// `[draw][h]`, values of `1 / tau_h`
    inv_tau: Vec<f64>,
    missing: Vec<usize>,
    /// `[draw][missing slot]`
    imputations: Vec<u8>,
}

impl ChainOutput {
    fn new(net: &DynamicNetwork, h_star: usize, capacity: usize, missing: Vec<usize>) -> Self {
        let slots = net.pairs() * net.times();
        Self {
            nodes: net.nodes(),
            grid: net.grid().clone(),
            h_star,
            draws: 0,
            pi: Vec::with_capacity(capacity * slots),
            mu: Vec::with_capacity(capacity * net.times()),
            inv_tau: Vec::with_capacity(capacity * h_star),
            imputations: Vec::with_capacity(capacity * missing.len()),
            missing,
        }
    }

    fn record(&mut self, state: &LatentState, data: &AugmentedData) {
        self.pi.extend_from_slice(state.probabilities().values());
        self.mu.extend_from_slice(&state.mu);
        self.inv_tau.extend(state.shrink.taus().iter().map(|t| 1.0 / t));
        self.imputations.extend(self.missing.iter().map(|&s| data.y[s] == Some(true)).map(u8::from));
        self.draws += 1;
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn times(&self) -> usize {
        self.grid.len()
    }

    pub fn pairs(&self) -> usize {
        pair_count(self.nodes)
    }

    pub fn slots(&self) -> usize {
        self.pairs() * self.times()
    }

    pub fn h_star(&self) -> usize {
        self.h_star
    }

    pub fn draws(&self) -> usize {
        self.draws
    }

    /// Probabilities of one retained draw, slot-ordered.
    pub fn pi_draw(&self, d: usize) -> &[f64] {
        let n = self.slots();
        &self.pi[d * n..(d + 1) * n]
    }

    pub fn pi_trace(&self, slot: usize) -> Vec<f64> {
        let n = self.slots();
        (0..self.draws).map(|d| self.pi[d * n + slot]).collect()
    }

    pub fn mu_trace(&self, k: usize) -> Vec<f64> {
        let t = self.times();
        (0..self.draws).map(|d| self.mu[d * t + k]).collect()
    }

    pub fn mu_draw(&self, d: usize) -> &[f64] {
        let t = self.times();
        &self.mu[d * t..(d + 1) * t]
    }

    pub fn inv_tau_trace(&self, h: usize) -> Vec<f64> {
        (0..self.draws).map(|d| self.inv_tau[d * self.h_star + h]).collect()
    }

    /// Posterior mean of `1 / tau_h` per dimension.
    pub fn inv_tau_mean(&self) -> Vec<f64> {
        (0..self.h_star).map(|h| mean(&self.inv_tau_trace(h))).collect()
    }

    pub fn mu_mean(&self) -> Vec<f64> {
        (0..self.times()).map(|k| mean(&self.mu_trace(k))).collect()
    }

    /// Posterior mean of every edge probability.
    pub fn pi_mean(&self) -> ProbabilitySeries {
        let n = self.slots();
        let mut acc = vec![0.0; n];
        for d in 0..self.draws {
            for (a, p) in acc.iter_mut().zip(self.pi_draw(d)) {
                *a += p;
            }
        }
        acc.iter_mut().for_each(|a| *a /= self.draws as f64);
        ProbabilitySeries::from_values(self.nodes, self.times(), acc).expect("retained probabilities lie in (0, 1)")
    }

    /// Originally missing slots.
    pub fn missing_slots(&self) -> &[usize] {
        &self.missing
    }

    /// `(slot, fraction of draws imputing 1)` per missing slot.
    pub fn imputation_means(&self) -> Vec<(usize, f64)> {
        let m = self.missing.len();
        self.missing
            .iter()
            .enumerate()
            .map(|(idx, &s)| {
                let ones: usize = (0..self.draws).map(|d| self.imputations[d * m + idx] as usize).sum();
                (s, ones as f64 / self.draws as f64)
            })
            .collect()
    }
}

fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

pub(crate) fn run_sampler(mut sampler: Sampler, net: &DynamicNetwork) -> Result<ChainOutput> {
    let cfg = *sampler.config();
    let mut out =
        ChainOutput::new(net, sampler.state().h_star(), cfg.retained_draws(), sampler.data().missing().to_vec());
    for s in 1..=cfg.n_iter {
        sampler.sweep()?;
        if s > cfg.burn_in && (s - cfg.burn_in).is_multiple_of(cfg.thin) {
            out.record(sampler.state(), sampler.data());
        }
    }
    Ok(out)
}

/// Runs a full chain and keeps the post-burn-in, thinned draws.
pub fn run_chain(net: &DynamicNetwork, cfg: &GibbsConfig) -> Result<ChainOutput> {
    let sampler = Sampler::new(net, *cfg)?;
    run_sampler(sampler, net)
}

/// Appends a fully missing matrix at `t_new` and runs the chain on the extended
/// grid; the last time index of the output holds the predictive draws.
pub fn predict_next(net: &DynamicNetwork, cfg: &GibbsConfig, t_new: f64) -> Result<ChainOutput> {
    let extended = net.with_missing_time(t_new)?;
    run_chain(&extended, cfg)
}
