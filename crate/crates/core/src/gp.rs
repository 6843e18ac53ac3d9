//! Squared-exponential Gaussian-process covariances over a time grid.

use alloc::format;
use alloc::vec::Vec;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{Cholesky, Matrix};
use crate::net::TimeGrid;

pub const DEFAULT_JITTER: f64 = 1e-8;
const MAX_JITTER: f64 = 1e-4;

/// Kernel `c(t, t') = exp(-kappa (t - t')^2)` plus diagonal jitter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelConfig {
    /// Inverse squared length-scale.
    pub kappa: f64,
    pub jitter: f64,
}

impl KernelConfig {
    pub fn new(kappa: f64) -> Self {
        Self { kappa, jitter: DEFAULT_JITTER }
    }

    pub fn with_jitter(mut self, jitter: f64) -> Self {
        self.jitter = jitter;
        self
    }

    #[inline]
    pub fn correlation(&self, t: f64, s: f64) -> f64 {
        let d = t - s;
        libm::exp(-self.kappa * d * d)
    }
}

/// Covariance matrix of a GP on a grid together with its Cholesky factor and
/// explicit inverse.
#[derive(Debug, Clone)]
pub struct CovarianceFactor {
    grid: TimeGrid,
    jitter: f64,
    /// `K + jitter I`
    matrix: Matrix,
    chol: Cholesky,
    precision: Matrix,
}

/// Builds the kernel matrix and factorizes it, escalating the jitter tenfold up to
/// `1e-4` when the factorization fails.
pub fn build_covariance(grid: &TimeGrid, cfg: KernelConfig) -> Result<CovarianceFactor> {
    if !(cfg.kappa > 0.0) || !cfg.kappa.is_finite() {
        return Err(Error::invalid(format!("kernel kappa must be positive, got {}", cfg.kappa)));
    }
    if !(cfg.jitter >= 0.0) {
        return Err(Error::invalid(format!("jitter must be nonnegative, got {}", cfg.jitter)));
    }
    let times = grid.times();
    let n = times.len();
    let base = Matrix::from_fn(n, n, |i, j| cfg.correlation(times[i], times[j]));

    let mut jitter = cfg.jitter;
    loop {
        let mut k = base.clone();
        for i in 0..n {
            k[(i, i)] += jitter;
        }
        match Cholesky::new(&k) {
            Ok(chol) => {
                let precision = chol.inverse();
                return Ok(CovarianceFactor { grid: grid.clone(), jitter, matrix: k, chol, precision });
            }
            Err(_) => {
                let next = if jitter == 0.0 { DEFAULT_JITTER } else { jitter * 10.0 };
                if next > MAX_JITTER * (1.0 + 1e-9) {
                    return Err(Error::FactorizationFailed { jitter });
                }
                jitter = next;
            }
        }
    }
}

impl CovarianceFactor {
    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    /// Jitter actually added to the diagonal.
    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    /// `K + jitter I`.
    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn cholesky(&self) -> &Cholesky {
        &self.chol
    }

    /// `(K + jitter I)^{-1}`.
    pub fn precision(&self) -> &Matrix {
        &self.precision
    }

    /// `K^{-1} rhs` by two triangular solves.
    pub fn solve_with_precision(&self, rhs: &[f64]) -> Vec<f64> {
        assert_eq!(rhs.len(), self.dim(), "right-hand side has wrong length");
        self.chol.solve(rhs)
    }

    /// `x' K^{-1} x`.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        let mut z = x.to_vec();
        self.chol.solve_lower_in_place(&mut z);
        z.iter().map(|v| v * v).sum()
    }

    /// Draws `scale * L * eps` with standard normal `eps`.
    pub fn sample<R: Rng + ?Sized>(&self, scale: f64, rng: &mut R) -> Vec<f64> {
        let eps: Vec<f64> = (0..self.dim()).map(|_| StandardNormal.sample(rng)).collect();
        self.chol.mul_lower(&eps).into_iter().map(|x| scale * x).collect()
    }
}

/// Draws a zero-mean trajectory with covariance `scale^2 K`.
pub fn sample_gp<R: Rng + ?Sized>(factor: &CovarianceFactor, scale: f64, rng: &mut R) -> Result<Vec<f64>> {
    if !(scale > 0.0) || !scale.is_finite() {
        return Err(Error::invalid(format!("GP scale must be positive, got {scale}")));
    }
    Ok(factor.sample(scale, rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::symmetric_eigen;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn kernel_values() {
        let cfg = KernelConfig::new(0.01);
        assert_eq!(cfg.correlation(3.0, 3.0), 1.0);
        assert!((cfg.correlation(0.0, 10.0) - libm::exp(-1.0)).abs() < 1e-15);
        assert!((cfg.correlation(0.0, 10.0) - 0.36788).abs() < 1e-5);
    }

    #[test]
    fn covariance_invariants() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut times: Vec<f64> = (0..20).map(|_| rng.random::<f64>() * 30.0).collect();
        times.sort_by(f64::total_cmp);
        let grid = TimeGrid::new(times).unwrap();
        let f = build_covariance(&grid, KernelConfig::new(0.05)).unwrap();
        let k = f.matrix();
        assert!(k.is_symmetric(0.0));
        for i in 0..20 {
            assert!((k[(i, i)] - (1.0 + f.jitter())).abs() < 1e-15);
            assert!(f.cholesky().factor()[(i, i)] > 0.0);
            for j in 0..20 {
                assert!(k[(i, j)].abs() <= 1.0 + f.jitter());
            }
        }
        let (eig, _) = symmetric_eigen(k).unwrap();
        assert!(eig.iter().all(|&l| l > 0.0), "{eig:?}");
    }

    #[test]
    fn jitter_escalates_on_near_duplicate_times() {
        // Near-duplicate time stamps make K numerically singular.
        let grid = TimeGrid::new(vec![0.0, 1e-9, 2e-9, 1.0]).unwrap();
        let f = build_covariance(&grid, KernelConfig::new(1.0).with_jitter(0.0)).unwrap();
        assert!(f.jitter() > 0.0 && f.jitter() <= 1e-4);
    }

    #[test]
    fn identity_kernel_solve() {
        let grid = TimeGrid::new(vec![0.0, 100.0, 200.0]).unwrap();
        let f = build_covariance(&grid, KernelConfig::new(10.0).with_jitter(0.0)).unwrap();
        assert_eq!(f.jitter(), 0.0);
        let rhs = [1.5, -2.0, 0.25];
        assert_eq!(f.solve_with_precision(&rhs), rhs.to_vec());
        assert_eq!(f.solve_with_precision(&[0.0; 3]), vec![0.0; 3]);
    }

    #[test]
    fn solve_matches_dense_inverse() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for t in 2..=10 {
            let grid = TimeGrid::new((0..t).map(|k| k as f64 * 1.3 + rng.random::<f64>()).collect()).unwrap();
            let f = build_covariance(&grid, KernelConfig::new(0.4).with_jitter(1e-3)).unwrap();
            let rhs: Vec<f64> = (0..t).map(|_| rng.random::<f64>() - 0.5).collect();
            let out = f.solve_with_precision(&rhs);
            // independent dense inverse via Gauss-Jordan
            let inv = gauss_jordan_inverse(f.matrix());
            let expect = inv.matvec(&rhs);
            for (a, b) in out.iter().zip(&expect) {
                assert!((a - b).abs() < 1e-8, "{a} vs {b}");
            }
            let resid: f64 = f.matrix().matvec(&out).iter().zip(&rhs).map(|(a, b)| (a - b).powi(2)).sum();
            let rn: f64 = rhs.iter().map(|x| x * x).sum();
            assert!(resid.sqrt() <= 1e-6 * rn.sqrt());
        }
    }

    fn gauss_jordan_inverse(a: &Matrix) -> Matrix {
        let n = a.rows();
        let mut m = a.clone();
        let mut inv = Matrix::identity(n);
        for c in 0..n {
            let p = (c..n).max_by(|&x, &y| m[(x, c)].abs().total_cmp(&m[(y, c)].abs())).unwrap();
            for k in 0..n {
                let (a1, b1) = (m[(c, k)], m[(p, k)]);
                m[(c, k)] = b1;
                m[(p, k)] = a1;
                let (a2, b2) = (inv[(c, k)], inv[(p, k)]);
                inv[(c, k)] = b2;
                inv[(p, k)] = a2;
            }
            let d = m[(c, c)];
            for k in 0..n {
                m[(c, k)] /= d;
                inv[(c, k)] /= d;
            }
            for r in 0..n {
                if r != c {
                    let f = m[(r, c)];
                    for k in 0..n {
                        m[(r, k)] -= f * m[(c, k)];
                        inv[(r, k)] -= f * inv[(c, k)];
                    }
                }
            }
        }
        inv
    }

    #[test]
    fn permutation_equivariant_and_monotone() {
        let grid = TimeGrid::new(vec![0.0, 0.7, 2.0, 5.5]).unwrap();
        let cfg = KernelConfig::new(0.3);
        let f = build_covariance(&grid, cfg).unwrap();
        let perm = [2usize, 0, 3, 1];
        let times = grid.times();
        // K evaluated on permuted points equals the permuted K
        for a in 0..4 {
            for b in 0..4 {
                let direct = cfg.correlation(times[perm[a]], times[perm[b]]) + if a == b { f.jitter() } else { 0.0 };
                assert_eq!(direct, f.matrix()[(perm[a], perm[b])]);
            }
        }
        let mut prev = 2.0;
        for d in [0.0, 0.1, 0.5, 1.0, 3.0, 10.0] {
            let k = cfg.correlation(0.0, d);
            assert!(k < prev);
            prev = k;
        }
    }

    #[test]
    fn scalar_draw_and_determinism() {
        let grid = TimeGrid::unit(1).unwrap();
        let f = build_covariance(&grid, KernelConfig::new(1.0)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 20_000;
        let draws: Vec<f64> = (0..n).map(|_| sample_gp(&f, 1.0, &mut rng).unwrap()[0]).collect();
        let m = draws.iter().sum::<f64>() / n as f64;
        let v = draws.iter().map(|x| (x - m).powi(2)).sum::<f64>() / n as f64;
        assert!(m.abs() < 0.03 && (v - 1.0).abs() < 0.04);

        let g = build_covariance(&TimeGrid::unit(8).unwrap(), KernelConfig::new(0.1)).unwrap();
        let a = sample_gp(&g, 0.5, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        let b = sample_gp(&g, 0.5, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        assert_eq!(a, b);
        assert!(sample_gp(&g, 0.0, &mut rng).is_err());
    }

    #[test]
    fn empirical_covariance_matches() {
        let grid = TimeGrid::unit(5).unwrap();
        let f = build_covariance(&grid, KernelConfig::new(0.2)).unwrap();
        let scale = 1.7;
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let n = 10_000;
        let mut acc = Matrix::zeros(5, 5);
        for _ in 0..n {
            let x = sample_gp(&f, scale, &mut rng).unwrap();
            for i in 0..5 {
                for j in 0..5 {
                    acc[(i, j)] += x[i] * x[j] / n as f64;
                }
            }
        }
        let target = Matrix::from_fn(5, 5, |i, j| scale * scale * f.matrix()[(i, j)]);
        let rel = acc.sub(&target).norm_fro() / target.norm_fro();
        assert!(rel < 0.05, "relative error {rel}");
    }

    #[test]
    fn smooth_trajectories_for_small_kappa() {
        let grid = TimeGrid::unit(40).unwrap();
        let f = build_covariance(&grid, KernelConfig::new(0.01)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let scale = 2.0;
        let reps = 500;
        let mut mad = 0.0;
        for _ in 0..reps {
            let x = sample_gp(&f, scale, &mut rng).unwrap();
            mad += x.windows(2).map(|w| (w[1] - w[0]).abs()).sum::<f64>() / 39.0;
        }
        mad /= reps as f64;
        assert!(mad < 0.2 * scale, "mean abs difference {mad}");
    }
}
