//! Pole structure and partial-fraction expansion of the MGF for integer `m`
//! and even integer `μ`, and the SNR density that follows from it.
//!
//! In the normalized argument `x = γ̄s` the MGF is a product of factors
//! `(1 + x/ϑ)^e` with integer exponents. Negative exponents are poles at
//! `x = −ϑ`; the expansion is
//!
//! ```text
//! M = Σᵢ Σ_{j=1..wᵢ} A_ij (1 + x/ϑᵢ)^{−j}
//! ```
//!
//! and each `(1 + γ̄s/ϑ)^{−j}` is the transform of a Gamma(j, ϑ/γ̄) density,
//! which gives the PDF term by term. All coefficient arithmetic runs in
//! double-double because the terms cancel strongly at high SNR.

use alloc::vec;
use alloc::vec::Vec;

use crate::dd::{DoubleDouble, Real};
use crate::error::{Error, Result};
use crate::params::{ChannelParams, DerivedParams, COINCIDENT_ROOT_TOL};
use crate::special::factorial;

/// Tolerance for treating `m` and `μ/2` as integers.
pub const INTEGRALITY_TOL: f64 = 1e-9;

/// Largest `2m + μ` accepted by the closed form.
pub const MAX_TOTAL_ORDER: f64 = 500.0;

/// A factor `(1 + x/ϑ)^exponent` of the normalized MGF.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Factor {
    theta: DoubleDouble,
    pub exponent: i32,
}

impl Factor {
    pub fn new(theta: f64, exponent: i32) -> Self {
        Self {
            theta: DoubleDouble::new(theta),
            exponent,
        }
    }

    pub(crate) fn precise(theta: DoubleDouble, exponent: i32) -> Self {
        Self { theta, exponent }
    }

    pub fn theta(&self) -> f64 {
        self.theta.to_f64()
    }
}

/// A pole `ϑ` of multiplicity `w`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pole {
    theta: DoubleDouble,
    pub multiplicity: u32,
}

impl Pole {
    pub fn theta(&self) -> f64 {
        self.theta.to_f64()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PoleSet {
    /// Merged poles, in the order c₁, c₂, Ω/η, Ω with coincident entries
    /// folded into the first occurrence.
    pub poles: Vec<Pole>,
    /// Factors with positive net exponent (present when `μ/2 < m`).
    pub numerator: Vec<Factor>,
    /// `N(m, μ)`: 4 when `μ/2 > m`, otherwise 2.
    pub group_count: u32,
}

impl PoleSet {
    fn factors(&self) -> Vec<Factor> {
        self.poles
            .iter()
            .map(|p| Factor::precise(p.theta, -(p.multiplicity as i32)))
            .chain(self.numerator.iter().copied())
            .collect()
    }

    pub fn total_multiplicity(&self) -> u32 {
        self.poles.iter().map(|p| p.multiplicity).sum()
    }
}

fn as_integer(x: f64) -> Option<i64> {
    let r = libm::round(x);
    (libm::fabs(x - r) <= INTEGRALITY_TOL * r.max(1.0)).then_some(r as i64)
}

/// Whether `m` is a positive integer and `μ` a positive even integer.
pub fn closed_form_applies(params: &ChannelParams) -> bool {
    regime(params).is_ok()
}

pub(crate) fn regime(params: &ChannelParams) -> Result<(i64, i64)> {
    let m = as_integer(params.m)
        .filter(|&m| m >= 1)
        .ok_or(Error::ClosedFormUnavailable(
            "closed form requires integer m",
        ))?;
    let half_mu =
        as_integer(params.mu / 2.0)
            .filter(|&h| h >= 1)
            .ok_or(Error::ClosedFormUnavailable(
                "closed form requires even integer mu",
            ))?;
    if 2.0 * params.m + params.mu > MAX_TOTAL_ORDER {
        return Err(Error::ClosedFormUnavailable(
            "pole multiplicity too large (2m + mu > 500)",
        ));
    }
    Ok((m, half_mu))
}

/// Merges factors whose `ϑ` agree to [`COINCIDENT_ROOT_TOL`], summing
/// exponents and dropping those that cancel.
fn merge(factors: &[Factor]) -> Vec<Factor> {
    let mut out: Vec<Factor> = Vec::with_capacity(factors.len());
    for f in factors {
        let hit = out.iter_mut().find(|g| {
            let (a, b) = (g.theta.to_f64(), f.theta.to_f64());
            libm::fabs(a - b) <= COINCIDENT_ROOT_TOL * libm::fabs(a).max(libm::fabs(b))
        });
        match hit {
            Some(g) => g.exponent += f.exponent,
            None => out.push(*f),
        }
    }
    out.retain(|f| f.exponent != 0);
    out
}

/// Pole groups `{c₁: m, c₂: m}` plus `{Ω/η, Ω}` with multiplicity `μ/2 − m`
/// when positive; coincident factors merged.
pub fn build_pole_set(params: &ChannelParams, derived: &DerivedParams) -> Result<PoleSet> {
    let (m, half_mu) = regime(params)?;
    let m = m as i32;
    let e = m - half_mu as i32;
    let p = &derived.precise;
    let raw = [
        Factor::precise(p.c1, -m),
        Factor::precise(p.c2, -m),
        Factor::precise(p.omega_cap / DoubleDouble::new(params.eta), e),
        Factor::precise(p.omega_cap, e),
    ];
    let merged = merge(&raw);
    let poles = merged
        .iter()
        .filter(|f| f.exponent < 0)
        .map(|f| Pole {
            theta: f.theta,
            multiplicity: (-f.exponent) as u32,
        })
        .collect();
    let numerator = merged.into_iter().filter(|f| f.exponent > 0).collect();
    Ok(PoleSet {
        poles,
        numerator,
        group_count: if e < 0 { 4 } else { 2 },
    })
}

/// Coefficients of one pole, `A_i1 ..= A_iw`.
#[derive(Debug, Clone, PartialEq)]
pub struct PoleTerms {
    theta: DoubleDouble,
    coefficients: Vec<DoubleDouble>,
}

impl PoleTerms {
    pub fn theta(&self) -> f64 {
        self.theta.to_f64()
    }

    pub fn multiplicity(&self) -> u32 {
        self.coefficients.len() as u32
    }

    /// `A_ij` for `j = 1..=multiplicity`.
    pub fn coefficient(&self, j: u32) -> f64 {
        self.coefficients[j as usize - 1].to_f64()
    }

    pub(crate) fn theta_dd(&self) -> DoubleDouble {
        self.theta
    }

    pub(crate) fn coefficients_dd(&self) -> &[DoubleDouble] {
        &self.coefficients
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PartialFractionExpansion {
    pub terms: Vec<PoleTerms>,
}

impl PartialFractionExpansion {
    /// `Σ A_ij (1 + x/ϑᵢ)^{−j}` at normalized argument `x`.
    pub fn evaluate(&self, x: f64) -> f64 {
        let x = DoubleDouble::new(x);
        let mut sum = DoubleDouble::ZERO;
        for t in &self.terms {
            let inv = DoubleDouble::ONE / (DoubleDouble::ONE + x / t.theta);
            let mut pow = inv;
            for &a in &t.coefficients {
                sum += a * pow;
                pow *= inv;
            }
        }
        sum.to_f64()
    }
}

/// Expansion of `Π (1 + x/ϑ_k)^{e_k}`. The net degree must be negative.
pub fn decompose(factors: &[Factor]) -> Result<PartialFractionExpansion> {
    let factors = merge(factors);
    let degree: i32 = factors.iter().map(|f| f.exponent).sum();
    if degree >= 0 {
        return Err(Error::Residue("rational function has a polynomial part"));
    }
    let mut terms = Vec::new();
    for (i, pole) in factors.iter().enumerate() {
        if pole.exponent >= 0 {
            continue;
        }
        let w = (-pole.exponent) as usize;
        terms.push(PoleTerms {
            theta: pole.theta,
            coefficients: pole_coefficients(
                pole.theta,
                w,
                factors
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| *k != i)
                    .map(|(_, f)| f),
            )?,
        });
    }
    Ok(PartialFractionExpansion { terms })
}

/// With `y = 1 + x/ϑᵢ`, the rest of the product is `g(y) = Σ gₙ yⁿ` and
/// `A_ij = g_{w−j}`. Each other factor is `d^e (1 + q y)^e` with
/// `d = 1 − ϑᵢ/ϑ_k`, `q = (ϑᵢ/ϑ_k)/d`; `ln g` has the explicit series
/// `Σ e (−1)^{n+1} qⁿ/n`, and `g` follows from `n gₙ = Σ_{k=1..n} k Lₖ g_{n−k}`.
fn pole_coefficients<'a>(
    theta: DoubleDouble,
    w: usize,
    others: impl Iterator<Item = &'a Factor>,
) -> Result<Vec<DoubleDouble>> {
    let one = DoubleDouble::ONE;
    let mut log_series = vec![DoubleDouble::ZERO; w];
    let mut g0 = one;
    for f in others {
        let r = theta / f.theta;
        let d = one - r;
        if d.to_f64() == 0.0 {
            return Err(Error::Residue("coincident poles were not merged"));
        }
        g0 *= d.powi(f.exponent);
        let q = r / d;
        let e = DoubleDouble::new(f.exponent as f64);
        let mut qn = one;
        for (n, slot) in log_series.iter_mut().enumerate().skip(1) {
            qn *= q;
            let term = e * qn / DoubleDouble::new(n as f64);
            *slot += if n % 2 == 1 { term } else { -term };
        }
    }
    if !g0.is_finite() {
        return Err(Error::Residue("coefficient overflow"));
    }
    let mut g = vec![DoubleDouble::ZERO; w];
    g[0] = g0;
    for n in 1..w {
        let mut acc = DoubleDouble::ZERO;
        for k in 1..=n {
            acc += DoubleDouble::new(k as f64) * log_series[k] * g[n - k];
        }
        g[n] = acc / DoubleDouble::new(n as f64);
    }
    // A_ij = g_{w-j}
    g.reverse();
    Ok(g)
}

/// Partial-fraction coefficients of the MGF for the given pole set.
pub fn residues(
    params: &ChannelParams,
    derived: &DerivedParams,
    pole_set: &PoleSet,
) -> Result<PartialFractionExpansion> {
    let _ = derived;
    // net degree of the normalized MGF is −μ
    let net: i64 = pole_set.factors().iter().map(|f| f.exponent as i64).sum();
    if net != -(libm::round(params.mu) as i64) {
        return Err(Error::Residue("pole set does not match these parameters"));
    }
    decompose(&pole_set.factors())
}

/// Pole set and expansion in one step.
pub fn expansion_for(
    params: &ChannelParams,
    derived: &DerivedParams,
) -> Result<PartialFractionExpansion> {
    let set = build_pole_set(params, derived)?;
    residues(params, derived, &set)
}

/// SNR density `f(γ) = Σᵢ e^{−λᵢγ} Σⱼ A_ij λᵢ^j γ^{j−1}/(j−1)!`, `λᵢ = ϑᵢ/γ̄`.
pub fn pdf(
    params: &ChannelParams,
    expansion: &PartialFractionExpansion,
    gamma: f64,
) -> Result<f64> {
    if gamma.is_nan() || gamma < 0.0 {
        return Err(Error::InvalidArgument("pdf needs gamma >= 0"));
    }
    let g = DoubleDouble::new(gamma);
    let gbar = DoubleDouble::new(params.gamma_bar);
    let mut sum = DoubleDouble::ZERO;
    let mut magnitude = 0.0;
    for t in &expansion.terms {
        let lambda = t.theta / gbar;
        let decay = (-(lambda * g)).exp();
        let mut lam_pow = lambda;
        let mut g_pow = DoubleDouble::ONE;
        for (j, &a) in t.coefficients.iter().enumerate() {
            let term = a * lam_pow * g_pow * decay / DoubleDouble::new(factorial(j as u32));
            magnitude += libm::fabs(term.to_f64());
            sum += term;
            lam_pow *= lambda;
            g_pow *= g;
        }
    }
    let value = sum.to_f64();
    if value < 0.0 {
        if value < -1e-12 * magnitude.max(f64::MIN_POSITIVE) {
            return Err(Error::NegativeDensity { gamma, value });
        }
        return Ok(0.0);
    }
    Ok(value)
}
