//! Synthetic dynamic networks drawn from the generative model, and the
//! pair-by-pair baseline-only fit used as a comparison target.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::diagnostics::hpd_interval;
use crate::error::{Error, Result};
use crate::gibbs::{run_sampler, GibbsConfig, Sampler};
use crate::gp::{build_covariance, KernelConfig, DEFAULT_JITTER};
use crate::model::{LatentState, ProbabilitySeries};
use crate::net::{pair_count, pair_nodes, DynamicNetwork, TimeGrid};
use crate::shrinkage::ShrinkageState;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratorSpec {
    pub v: usize,
    pub t: usize,
    pub h_true: usize,
    pub kappa_mu: f64,
    pub kappa_x: f64,
    pub seed: u64,
}

impl GeneratorSpec {
    pub fn validate(&self) -> Result<()> {
        if self.v < 2 {
            return Err(Error::invalid(format!("at least two nodes are required, got {}", self.v)));
        }
        if self.t == 0 {
            return Err(Error::invalid("at least one time point is required"));
        }
        if self.h_true == 0 {
            return Err(Error::invalid("at least one latent dimension is required"));
        }
        for (name, k) in [("kappa_mu", self.kappa_mu), ("kappa_x", self.kappa_x)] {
            if !(k > 0.0 && k.is_finite()) {
                return Err(Error::invalid(format!("{name} must be positive, got {k}")));
            }
        }
        Ok(())
    }
}

/// Generated data with its ground truth.
#[derive(Debug, Clone)]
pub struct Synthetic {
    pub network: DynamicNetwork,
    pub pi: ProbabilitySeries,
    pub mu: Vec<f64>,
    /// Generating state; every shrinkage multiplier is 1.
    pub truth: LatentState,
}

/// Draws `mu` and every coordinate trajectory from unit-scale GPs on the grid
/// `1..=T`, then each edge from its Bernoulli.
pub fn generate(spec: &GeneratorSpec) -> Result<Synthetic> {
    spec.validate()?;
    let grid = TimeGrid::unit(spec.t)?;
    let cov_mu = build_covariance(&grid, KernelConfig::new(spec.kappa_mu).with_jitter(DEFAULT_JITTER))?;
    let cov_x = build_covariance(&grid, KernelConfig::new(spec.kappa_x).with_jitter(DEFAULT_JITTER))?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let mu = cov_mu.sample(1.0, &mut rng);
    let mut coords = Vec::with_capacity(spec.v * spec.h_true * spec.t);
    for _ in 0..spec.v * spec.h_true {
        coords.extend(cov_x.sample(1.0, &mut rng));
    }
    let shrink = ShrinkageState::from_thetas(2.0, 2.0, vec![1.0; spec.h_true])?;
    let truth = LatentState::new(spec.v, spec.t, mu.clone(), coords, shrink)?;
    let pi = truth.probabilities();
    let slots = pi.values().iter().map(|&p| Some(rng.random::<f64>() < p)).collect();
    let network = DynamicNetwork::from_slots(spec.v, grid, slots)?;
    Ok(Synthetic { network, pi, mu, truth })
}

/// Per-slot posterior summaries of the pair-by-pair baseline fit, slot-ordered.
#[derive(Debug, Clone)]
pub struct BaselineFit {
    pub mean: ProbabilitySeries,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

/// Fits a baseline-only logistic GP model to each pair's series on its own.
///
/// Pair `q` uses seed `cfg.seed + q`; `cfg.h_star` is ignored. Intervals are 95% HPD.
pub fn independent_baseline_fit(net: &DynamicNetwork, cfg: &GibbsConfig) -> Result<BaselineFit> {
    cfg.validate()?;
    let v = net.nodes();
    let t = net.times();
    let p = pair_count(v);

    let fit_pair = |q: usize| -> Result<Vec<(f64, f64, f64)>> {
        let (i, j) = pair_nodes(q);
        let mut series = Vec::with_capacity(t);
        for k in 0..t {
            series.push(net.get(i, j, k)?);
        }
        let pair_net = DynamicNetwork::from_slots(2, net.grid().clone(), series)?;
        let pair_cfg = GibbsConfig { seed: cfg.seed.wrapping_add(q as u64), ..*cfg };
        let out = run_sampler(Sampler::build(&pair_net, pair_cfg, 0)?, &pair_net)?;
        (0..t)
            .map(|k| {
                let trace = out.pi_trace(k);
                let mean = trace.iter().sum::<f64>() / trace.len() as f64;
                let (lo, hi) = hpd_interval(&trace, 0.95)?;
                Ok((mean, lo, hi))
            })
            .collect()
    };

    #[cfg(feature = "parallel")]
    let fits: Vec<Vec<(f64, f64, f64)>> = {
        use rayon::prelude::*;
        (0..p).into_par_iter().map(fit_pair).collect::<Result<_>>()?
    };
    #[cfg(not(feature = "parallel"))]
    let fits: Vec<Vec<(f64, f64, f64)>> = (0..p).map(fit_pair).collect::<Result<_>>()?;

    let n = p * t;
    let (mut mean, mut lower, mut upper) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    for (q, fit) in fits.iter().enumerate() {
        for (k, &(m, lo, hi)) in fit.iter().enumerate() {
            let s = k * p + q;
            mean[s] = m;
            lower[s] = lo;
            upper[s] = hi;
        }
    }
    Ok(BaselineFit { mean: ProbabilitySeries::from_values(v, t, mean)?, lower, upper })
}
