//! Special functions: log-gamma, Tricomi U with integer first argument,
//! generalized Gauss–Laguerre rules and the exponential integral E₁.

use alloc::vec;
use alloc::vec::Vec;

use crate::dd::Real;
use crate::error::{Error, Result};

/// `ln Γ(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if x <= 0.0 || !x.is_finite() {
        return Err(Error::InvalidArgument(
            "ln_gamma needs a finite positive argument",
        ));
    }
    Ok(libm::lgamma(x))
}

pub(crate) fn gamma_fn(x: f64) -> f64 {
    libm::exp(libm::lgamma(x))
}

/// `(n − 1)!` as a float; exact up to `n = 23`.
pub(crate) fn factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// Exponential integral `E₁(x)`, `x > 0`. Test oracle only.
#[allow(dead_code)]
pub(crate) fn expint_e1(x: f64) -> f64 {
    const EULER: f64 = 0.577_215_664_901_532_9;
    if x <= 1.0 {
        let mut sum = 0.0;
        let mut term = 1.0;
        let mut k = 1.0;
        loop {
            term *= -x / k;
            let add = term / k;
            sum += add;
            if libm::fabs(add) < 1e-17 * libm::fabs(sum) {
                break;
            }
            k += 1.0;
        }
        -EULER - libm::log(x) - sum
    } else {
        // Modified Lentz on the continued fraction of e^x E₁(x).
        let tiny = 1e-300;
        let mut b = x + 1.0;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..500 {
            let an = -((i * i) as f64);
            b += 2.0;
            d = 1.0 / (an * d + b);
            c = b + an / c;
            let del = c * d;
            h *= del;
            if libm::fabs(del - 1.0) < 1e-16 {
                break;
            }
        }
        h * libm::exp(-x)
    }
}

/// A generalized Gauss–Laguerre rule for the weight `s^α e^{−s}` on `[0, ∞)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub order: usize,
    pub alpha_exponent: f64,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    /// `Σ wᵢ f(xᵢ)`.
    pub fn apply<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// Nodes and weights by Golub–Welsch: eigenvalues of the symmetric Jacobi
/// matrix, weights from the first eigenvector components.
pub fn gauss_laguerre(order: usize, alpha: f64) -> Result<QuadratureRule> {
    if order == 0 || order > 512 {
        return Err(Error::InvalidArgument(
            "Gauss-Laguerre order must be in [1, 512]",
        ));
    }
    if alpha <= -1.0 || !alpha.is_finite() {
        return Err(Error::InvalidArgument(
            "Gauss-Laguerre alpha must exceed -1",
        ));
    }
    let n = order;
    let mut diag: Vec<f64> = (0..n).map(|k| 2.0 * k as f64 + alpha + 1.0).collect();
    let mut off: Vec<f64> = (0..n)
        .map(|k| {
            let k = (k + 1) as f64;
            if (k as usize) < n {
                libm::sqrt(k * (k + alpha))
            } else {
                0.0
            }
        })
        .collect();
    let mut first = vec![0.0; n];
    first[0] = 1.0;

    tridiagonal_ql(&mut diag, &mut off, &mut first)?;

    let mu0 = gamma_fn(alpha + 1.0);
    let mut pairs: Vec<(f64, f64)> = diag
        .into_iter()
        .zip(first)
        .map(|(x, v)| (x, mu0 * v * v))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (nodes, weights) = pairs.into_iter().unzip();
    Ok(QuadratureRule {
        order,
        alpha_exponent: alpha,
        nodes,
        weights,
    })
}

/// Implicit QL on a symmetric tridiagonal matrix. `off[i]` couples rows `i`
/// and `i+1`. Only the first row of the eigenvector matrix is accumulated.
fn tridiagonal_ql(d: &mut [f64], e: &mut [f64], z: &mut [f64]) -> Result<()> {
    let n = d.len();
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = libm::fabs(d[m]) + libm::fabs(d[m + 1]);
                if libm::fabs(e[m]) <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::NoConvergence {
                    what: "Gauss-Laguerre eigenvalues",
                    estimate: libm::fabs(e[l]),
                });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = libm::hypot(g, 1.0);
            g = d[m] - d[l] + e[l] / (g + libm::copysign(r, g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = libm::hypot(f, g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                let fz = z[i + 1];
                z[i + 1] = s * z[i] + c * fz;
                z[i] = c * z[i] - s * fz;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// Family of integrals `I_j = ∫₀^∞ t^{j−1} (1+t)^c e^{−zt} dt`, `j = 1..=jmax`.
///
/// With `t = eˣ` the integrand becomes `exp(jx + c·ln(1+eˣ) − z eˣ)`, which is
/// analytic in the strip `|Im x| < π/2` and decays on both sides, so the
/// plain trapezoidal rule converges exponentially in `1/h`. The step is halved
/// until every member changes by less than `rel_tol`.
pub(crate) fn laplace_power_family<T: Real>(
    jmax: u32,
    c: f64,
    z: T,
    rel_tol: f64,
) -> Result<(Vec<T>, f64)> {
    let zf = z.to_f64();
    if jmax == 0 || zf <= 0.0 || !zf.is_finite() || !c.is_finite() {
        return Err(Error::InvalidArgument("U needs j >= 1, finite b and z > 0"));
    }
    // Drop (in nats) from the peak at which the tails are cut.
    let drop = if rel_tol < 1e-17 { 82.0 } else { 45.0 };
    let (lo, hi) = integration_window(jmax, c, zf, drop);

    let term = |x: f64, out: &mut [T]| {
        let xt = T::from_f64(x);
        let ex = xt.exp();
        let softplus = if x > 0.0 {
            xt + (T::one() / ex).ln_1p()
        } else {
            ex.ln_1p()
        };
        let base = (xt + T::from_f64(c) * softplus - z * ex).exp();
        let mut v = base;
        for slot in out.iter_mut() {
            *slot += v;
            v *= ex;
        }
    };

    let n = jmax as usize;
    let mut h = 0.5;
    let mut sums = vec![T::zero(); n];
    let mut count = libm::ceil((hi - lo) / h) as usize;
    for k in 0..=count {
        term(lo + k as f64 * h, &mut sums);
    }
    let mut prev: Vec<T> = sums.iter().map(|&s| s * T::from_f64(h)).collect();
    let mut last_change = f64::INFINITY;
    for _level in 0..12 {
        // midpoints of the current grid
        for k in 0..count {
            term(lo + (k as f64 + 0.5) * h, &mut sums);
        }
        h *= 0.5;
        count *= 2;
        let cur: Vec<T> = sums.iter().map(|&s| s * T::from_f64(h)).collect();
        last_change = cur
            .iter()
            .zip(&prev)
            .map(|(&a, &b)| ((a - b) / a).abs().to_f64())
            .fold(0.0, f64::max);
        prev = cur;
        // the trapezoid error roughly squares with each halving
        if h <= 0.125 && (last_change <= rel_tol || last_change <= 1e-2 * libm::sqrt(rel_tol)) {
            return Ok((prev, last_change));
        }
    }
    Err(Error::NoConvergence {
        what: "Tricomi U quadrature",
        estimate: last_change,
    })
}

/// `[lo, hi]` outside of which every member's log-integrand lies more than
/// `drop` below its own maximum.
fn integration_window(jmax: u32, c: f64, z: f64, drop: f64) -> (f64, f64) {
    let phi = |j: f64, x: f64| j * x + c * Real::ln_1p_exp(x) - z * libm::exp(x);
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for j in [1.0, jmax as f64] {
        // φ' = j + c·σ(x) − z eˣ changes sign once on the bracket.
        let dphi = |x: f64| j + c / (1.0 + libm::exp(-x)) - z * libm::exp(x);
        let (mut a, mut b) = (-800.0, 720.0);
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            if dphi(mid) > 0.0 {
                a = mid;
            } else {
                b = mid;
            }
        }
        let peak_x = 0.5 * (a + b);
        let peak = phi(j, peak_x);
        let mut step = 0.5;
        let mut x = peak_x;
        while phi(j, x) > peak - drop && x > -1e4 {
            x -= step;
            step *= 1.1;
        }
        lo = lo.min(x);
        let mut step = 0.25;
        let mut x = peak_x;
        while phi(j, x) > peak - drop && x < 710.0 {
            x += step;
            step *= 1.1;
        }
        hi = hi.max(x);
    }
    (lo, hi)
}

/// Tricomi confluent hypergeometric function `U(j; b; z)` for integer
/// `j >= 1` and `z > 0`, from
/// `U(j; b; z) = Γ(j)⁻¹ ∫₀^∞ t^{j−1}(1+t)^{b−j−1} e^{−zt} dt`.
pub fn tricomi_u_int_a(j: u32, b: f64, z: f64) -> Result<f64> {
    let c = b - j as f64 - 1.0;
    let (family, _) = laplace_power_family::<f64>(j, c, z, 1e-12)?;
    Ok(family[j as usize - 1] / factorial(j - 1))
}
