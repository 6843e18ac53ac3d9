//! Exact sampling from the Polya-Gamma distribution `PG(1, c)`.
//!
//! Uses the alternating-series accept/reject sampler for the tilted Jacobi
//! distribution `J*(1, z)` with `PG(1, c) = J*(1, c / 2) / 4`. The proposal mixes a
//! truncated exponential tail (`x > 0.64`) and a truncated inverse-Gaussian body.

use core::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::error::{Error, Result};

/// Truncation point between the two proposal pieces.
const TRUNC: f64 = 0.64;

/// A single positive Polya-Gamma draw.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct PgDraw(f64);

impl PgDraw {
    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }
}

impl From<PgDraw> for f64 {
    fn from(d: PgDraw) -> f64 {
        d.0
    }
}

/// `E[PG(1, c)] = tanh(c / 2) / (2 c)`, with limit `1/4` at zero.
pub fn pg_mean(c: f64) -> f64 {
    let c = c.abs();
    if c < 1e-6 {
        // tanh(x)/x = 1 - x^2/3 + ...
        0.25 - c * c / 48.0
    } else {
        libm::tanh(0.5 * c) / (2.0 * c)
    }
}

/// Draws from `PG(1, c)`.
pub fn sample_pg1<R: Rng + ?Sized>(c: f64, rng: &mut R) -> Result<PgDraw> {
    if !c.is_finite() {
        return Err(Error::NonFinite(alloc::format!("Polya-Gamma tilt {c}")));
    }
    Ok(PgDraw(0.25 * sample_jacobi_star(0.5 * c.abs(), rng)))
}

/// Normal CDF.
fn std_normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / core::f64::consts::SQRT_2)
}

/// Coefficient `a_n(x)` of the alternating series for the `J*(1, 0)` density.
fn series_coef(n: u32, x: f64) -> f64 {
    let k = n as f64 + 0.5;
    if x > TRUNC {
        PI * k * libm::exp(-0.5 * k * k * PI * PI * x)
    } else {
        let r = 2.0 / (PI * x);
        PI * k * r * libm::sqrt(r) * libm::exp(-2.0 * k * k / x)
    }
}

/// Probability of proposing from the exponential tail piece.
fn tail_mass(z: f64) -> f64 {
    let t = TRUNC;
    let fz = 0.125 * PI * PI + 0.5 * z * z;
    let rt = libm::sqrt(1.0 / t);
    let b = rt * (t * z - 1.0);
    let a = -rt * (t * z + 1.0);
    let x0 = libm::log(fz) + fz * t;
    let xb = x0 - z + libm::log(std_normal_cdf(b));
    let xa = x0 + z + libm::log(std_normal_cdf(a));
    let q_over_p = 4.0 / PI * (libm::exp(xb) + libm::exp(xa));
    1.0 / (1.0 + q_over_p)
}

/// Inverse-Gaussian `IG(1/z, 1)` truncated to `(0, TRUNC)`.
fn truncated_inverse_gaussian<R: Rng + ?Sized>(z: f64, rng: &mut R) -> f64 {
    let t = TRUNC;
    let mu = if z > 0.0 { 1.0 / z } else { f64::INFINITY };
    if mu > t {
        // Scaled inverse chi-square proposal with exponential tilt acceptance.
        loop {
            let e1 = loop {
                let e1: f64 = Exp1.sample(rng);
                let e2: f64 = Exp1.sample(rng);
                if e1 * e1 <= 2.0 * e2 / t {
                    break e1;
                }
            };
            let d = 1.0 + e1 * t;
            let x = t / (d * d);
            let alpha = libm::exp(-0.5 * z * z * x);
            if rng.random::<f64>() <= alpha {
                return x;
            }
        }
    } else {
        loop {
            let n: f64 = StandardNormal.sample(rng);
            let y = n * n;
            let mut x = mu + 0.5 * mu * mu * y - 0.5 * mu * libm::sqrt(4.0 * mu * y + (mu * y) * (mu * y));
            if rng.random::<f64>() > mu / (mu + x) {
                x = mu * mu / x;
            }
            if x < t {
                return x;
            }
        }
    }
}

fn sample_jacobi_star<R: Rng + ?Sized>(z: f64, rng: &mut R) -> f64 {
    let fz = 0.125 * PI * PI + 0.5 * z * z;
    let p_tail = tail_mass(z);
    loop {
        let x = if rng.random::<f64>() < p_tail {
            let e: f64 = Exp1.sample(rng);
            TRUNC + e / fz
        } else {
            truncated_inverse_gaussian(z, rng)
        };
        if !(x > 0.0) {
            continue;
        }
        let mut s = series_coef(0, x);
        let y = rng.random::<f64>() * s;
        let mut n = 0u32;
        loop {
            n += 1;
            if n % 2 == 1 {
                s -= series_coef(n, x);
                if y <= s {
                    return x;
                }
            } else {
                s += series_coef(n, x);
                if y > s {
                    break;
                }
            }
        }
    }
}
