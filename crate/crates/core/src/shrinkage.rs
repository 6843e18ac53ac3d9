//! Multiplicative gamma process over latent-dimension precisions.
//!
//! `tau_h = prod_{k <= h} theta_k`, `theta_1 ~ Ga(a1, 1)`, `theta_k ~ Ga(a2, 1)` for
//! `k >= 2`. Coordinate trajectories of dimension `h` have covariance
//! `tau_h^{-1} K_x`, so later dimensions are shrunk towards zero when `a2 > 1`.

use alloc::format;
use alloc::vec::Vec;

use rand::Rng;
use rand_distr::{Distribution, Gamma};

use crate::error::{Error, Result};
use crate::gp::CovarianceFactor;

/// Which terms enter the gamma rate of `theta_h`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RateRule {
    /// Sum over dimensions `l >= h`, the only ones whose precision contains `theta_h`.
    #[default]
    Conjugate,
    /// Sum over every dimension `l = 1..H*`.
    Literal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShrinkageState {
    pub a1: f64,
    pub a2: f64,
    thetas: Vec<f64>,
    taus: Vec<f64>,
}

fn gamma<R: Rng + ?Sized>(shape: f64, rate: f64, rng: &mut R) -> Result<f64> {
    let dist =
        Gamma::new(shape, 1.0 / rate).map_err(|e| Error::invalid(format!("gamma(shape={shape}, rate={rate}): {e}")))?;
    Ok(dist.sample(rng))
}

impl ShrinkageState {
    /// State with the given `theta` values; taus are recomputed.
    pub fn from_thetas(a1: f64, a2: f64, thetas: Vec<f64>) -> Result<Self> {
        if !(a1 > 0.0 && a2 > 0.0) {
            return Err(Error::invalid(format!("shrinkage hyperparameters must be positive ({a1}, {a2})")));
        }
        if thetas.iter().any(|&t| !(t > 0.0) || !t.is_finite()) {
            return Err(Error::invalid("shrinkage multipliers must be positive and finite"));
        }
        let mut s = Self { a1, a2, thetas, taus: Vec::new() };
        s.recompute_taus();
        Ok(s)
    }

    /// Draws every `theta` from its prior.
    pub fn sample_prior<R: Rng + ?Sized>(a1: f64, a2: f64, h_star: usize, rng: &mut R) -> Result<Self> {
        if !(a1 > 0.0 && a2 > 0.0) {
            return Err(Error::invalid(format!("shrinkage hyperparameters must be positive ({a1}, {a2})")));
        }
        let mut thetas = Vec::with_capacity(h_star);
        for h in 0..h_star {
            let shape = if h == 0 { a1 } else { a2 };
            thetas.push(gamma(shape, 1.0, rng)?);
        }
        Self::from_thetas(a1, a2, thetas)
    }

    pub fn len(&self) -> usize {
        self.thetas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.thetas.is_empty()
    }

    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }

    pub fn taus(&self) -> &[f64] {
        &self.taus
    }

    fn recompute_taus(&mut self) {
        let mut acc = 1.0;
        self.taus.clear();
        for &t in &self.thetas {
            acc *= t;
            self.taus.push(acc);
        }
    }

    /// `tau_l` with `theta_h` left out of the product (0-based indices).
    fn tau_without(&self, l: usize, h: usize) -> f64 {
        self.thetas[..=l].iter().enumerate().filter(|&(k, _)| k != h).map(|(_, t)| t).product()
    }

    /// Shape and rate of the gamma full conditional of `theta_h` (0-based `h`).
    ///
    /// `quad_sums[l] = sum_i x_il' K_x^{-1} x_il` over the `nodes` units, each
    /// trajectory having `times` points.
    pub fn full_conditional(
        &self,
        h: usize,
        quad_sums: &[f64],
        nodes: usize,
        times: usize,
        rule: RateRule,
    ) -> (f64, f64) {
        let h_star = self.len();
        let prior_shape = if h == 0 { self.a1 } else { self.a2 };
        let shape = prior_shape + (nodes * times * (h_star - h)) as f64 / 2.0;
        let first = match rule {
            RateRule::Conjugate => h,
            RateRule::Literal => 0,
        };
        let sum: f64 = (first..h_star).map(|l| self.tau_without(l, h) * quad_sums[l]).sum();
        (shape, 1.0 + 0.5 * sum)
    }

    /// Sequential update of `theta_1..theta_H*` given per-dimension quadratic forms.
    pub fn update_from_quad_sums<R: Rng + ?Sized>(
        &mut self,
        quad_sums: &[f64],
        nodes: usize,
        times: usize,
        rule: RateRule,
        rng: &mut R,
    ) -> Result<()> {
        if quad_sums.len() != self.len() {
            return Err(Error::invalid("one quadratic form per latent dimension is required"));
        }
        if quad_sums.iter().any(|q| !q.is_finite()) {
            return Err(Error::NonFinite("coordinate quadratic form".into()));
        }
        for h in 0..self.len() {
            let (shape, rate) = self.full_conditional(h, quad_sums, nodes, times, rule);
            // a vanishing theta would make every later tau zero
            self.thetas[h] = gamma(shape, rate, rng)?.max(f64::MIN_POSITIVE);
            self.recompute_taus();
        }
        Ok(())
    }

    /// Gibbs update given the coordinate trajectories.
    ///
    /// `coords[(i * H + l) * T + k]` holds `x_il(t_k)` for `nodes` units.
    pub fn update_thetas<R: Rng + ?Sized>(
        &mut self,
        coords: &[f64],
        nodes: usize,
        cov: &CovarianceFactor,
        rule: RateRule,
        rng: &mut R,
    ) -> Result<()> {
        let t = cov.dim();
        let quad = quad_sums(coords, nodes, self.len(), cov);
        self.update_from_quad_sums(&quad, nodes, t, rule, rng)
    }
}

/// `q_l = sum_i x_il' K^{-1} x_il` for every dimension `l`.
pub fn quad_sums(coords: &[f64], nodes: usize, h_star: usize, cov: &CovarianceFactor) -> Vec<f64> {
    let t = cov.dim();
    assert_eq!(coords.len(), nodes * h_star * t, "coordinate array has wrong length");
    let mut q = alloc::vec![0.0; h_star];
    for i in 0..nodes {
        for (l, ql) in q.iter_mut().enumerate() {
            let start = (i * h_star + l) * t;
            *ql += cov.quadratic_form(&coords[start..start + t]);
        }
    }
    q
}
