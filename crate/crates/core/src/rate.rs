//! The expectation `𝒥 = E[(1+γ)^{−A}]` and the normalized effective rate
//! `R = −log₂(𝒥)/A`.
//!
//! Two deterministic engines:
//!
//! - quadrature of `𝒥 = Γ(A)⁻¹ ∫₀^∞ s^{A−1} e^{−s} M(s) ds`, first with
//!   Gauss–Laguerre rules whose weight absorbs `s^{A−1}e^{−s}`, then, when the
//!   order ladder does not settle, adaptive Gauss–Kronrod in `x = ln s`;
//! - the closed form `𝒥 = Σᵢ Σⱼ A_ij λᵢ^j U(j; j−A+1; λᵢ)`, `λᵢ = ϑᵢ/γ̄`,
//!   from the partial-fraction expansion (integer `m`, even `μ`).

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::dd::{DoubleDouble, Real};
use crate::error::{Error, Result};
use crate::mc::{self, McConfig};
use crate::mgf::ln_mgf;
use crate::params::{ChannelParams, DerivedParams, DEFAULT_LARGE_M};
use crate::poles::{self, PartialFractionExpansion};
use crate::quad;
use crate::special::{factorial, gauss_laguerre, laplace_power_family, ln_gamma, QuadratureRule};

/// Gauss–Laguerre orders tried in turn.
pub const LADDER_ORDERS: [usize; 4] = [32, 64, 128, 256];

/// Default relative tolerance of the quadrature engine.
pub const DEFAULT_REL_TOL: f64 = 1e-8;

/// Target of the double-double closed-form evaluation.
const CLOSED_FORM_U_TOL: f64 = 1e-27;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Auto,
    Quadrature,
    ClosedForm,
    MonteCarlo,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Auto => "auto",
            Method::Quadrature => "quadrature",
            Method::ClosedForm => "closed_form",
            Method::MonteCarlo => "monte_carlo",
        }
    }
}

impl core::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(Method::Auto),
            "quadrature" | "quad" => Ok(Method::Quadrature),
            "closed_form" | "closed" => Ok(Method::ClosedForm),
            "monte_carlo" | "mc" => Ok(Method::MonteCarlo),
            _ => Err(Error::InvalidArgument("unknown method")),
        }
    }
}

/// Delay exponent θ (1/bit), block length T (s) and bandwidth B (Hz).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QosTriple {
    pub theta: f64,
    pub block_time: f64,
    pub bandwidth: f64,
}

impl QosTriple {
    /// `A = θTB/ln 2`.
    pub fn a_exponent(&self) -> f64 {
        self.theta * self.block_time * self.bandwidth / core::f64::consts::LN_2
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErRequest {
    pub params: ChannelParams,
    pub a_exponent: f64,
    pub method: Method,
    pub rel_tol: f64,
    /// Finite stand-in for `m = ∞`.
    pub large_m: f64,
    pub mc: McConfig,
    pub qos: Option<QosTriple>,
}

impl ErRequest {
    pub fn new(params: ChannelParams, a_exponent: f64) -> Self {
        Self {
            params,
            a_exponent,
            method: Method::Auto,
            rel_tol: DEFAULT_REL_TOL,
            large_m: DEFAULT_LARGE_M,
            mc: McConfig::default(),
            qos: None,
        }
    }

    pub fn from_qos(params: ChannelParams, qos: QosTriple) -> Self {
        Self {
            qos: Some(qos),
            ..Self::new(params, qos.a_exponent())
        }
    }

    pub fn with_method(self, method: Method) -> Self {
        Self { method, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        mc::check_exponent(self.a_exponent)?;
        if !(1e-12..=1e-2).contains(&self.rel_tol) {
            return Err(Error::InvalidArgument("rel_tol must lie in [1e-12, 1e-2]"));
        }
        if !(self.large_m > 0.0 && self.large_m.is_finite()) {
            return Err(Error::InvalidArgument(
                "large_m must be finite and positive",
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErResult {
    pub expectation_j: f64,
    pub rate: f64,
    pub method_used: Method,
    pub error_estimate: f64,
    pub diagnostics: Vec<(String, String)>,
}

impl ErResult {
    pub fn diagnostic(&self, key: &str) -> Option<&str> {
        self.diagnostics
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }
}

/// `R = −log₂(𝒥)/A` for `𝒥 ∈ (0, 1]`, `A > 0`.
pub fn effective_rate(j: f64, a: f64) -> Result<f64> {
    mc::check_exponent(a)?;
    if !(j > 0.0 && j <= 1.0) {
        return Err(Error::InvalidArgument("expectation must lie in (0, 1]"));
    }
    Ok(-libm::log2(j) / a)
}

/// How the quadrature engine arrived at its value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadratureRoute {
    Laguerre { order: usize },
    Adaptive,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureEstimate {
    pub value: f64,
    pub error: f64,
    pub route: QuadratureRoute,
    pub converged: bool,
}

/// Gauss–Laguerre rules for the weight `s^{A−1} e^{−s}`, weights divided by
/// `Γ(A)` so that they sum to one.
#[derive(Debug, Clone)]
pub struct LaguerreLadder {
    a: f64,
    rules: Vec<QuadratureRule>,
}

impl LaguerreLadder {
    pub fn new(a: f64) -> Result<Self> {
        mc::check_exponent(a)?;
        let norm = libm::exp(-ln_gamma(a)?);
        let rules = LADDER_ORDERS
            .iter()
            .map(|&n| {
                gauss_laguerre(n, a - 1.0).map(|mut r| {
                    r.weights.iter_mut().for_each(|w| *w *= norm);
                    r
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { a, rules })
    }

    pub fn a_exponent(&self) -> f64 {
        self.a
    }

    pub fn expectation(
        &self,
        params: &ChannelParams,
        derived: &DerivedParams,
        rel_tol: f64,
    ) -> Result<QuadratureEstimate> {
        let mut prev: Option<f64> = None;
        let mut last_diff = f64::INFINITY;
        for rule in &self.rules {
            let value = rule.apply(|s| libm::exp(ln_mgf(params, derived, s)));
            if let Some(p) = prev {
                last_diff = libm::fabs(value - p);
                if last_diff <= rel_tol * value {
                    return Ok(QuadratureEstimate {
                        value,
                        error: last_diff,
                        route: QuadratureRoute::Laguerre { order: rule.order },
                        converged: true,
                    });
                }
            }
            prev = Some(value);
        }
        match adaptive_expectation(params, derived, self.a, rel_tol) {
            Ok(est) => Ok(est),
            Err(Error::NoConvergence { estimate, .. }) => Ok(QuadratureEstimate {
                value: prev.unwrap_or(f64::NAN),
                error: estimate.max(last_diff),
                route: QuadratureRoute::Laguerre {
                    order: *LADDER_ORDERS.last().unwrap_or(&0),
                },
                converged: false,
            }),
            Err(e) => Err(e),
        }
    }
}

/// `𝒥` by the MGF integral.
pub fn expectation_quadrature(
    params: &ChannelParams,
    derived: &DerivedParams,
    a: f64,
    rel_tol: f64,
) -> Result<QuadratureEstimate> {
    LaguerreLadder::new(a)?.expectation(params, derived, rel_tol)
}

/// Adaptive Gauss–Kronrod on `∫ exp(A x − eˣ + ln M(eˣ) − ln Γ(A)) dx`.
fn adaptive_expectation(
    params: &ChannelParams,
    derived: &DerivedParams,
    a: f64,
    rel_tol: f64,
) -> Result<QuadratureEstimate> {
    let lg = ln_gamma(a)?;
    let log_f = |x: f64| {
        let s = libm::exp(x);
        a * x - s + ln_mgf(params, derived, s) - lg
    };
    const DROP: f64 = 60.0;

    // Scan down from the far right; the integrand is unimodal in x.
    let x_top = libm::log(a + 80.0 + 10.0 * libm::sqrt(a));
    let knee = -libm::log(params.gamma_bar.max(1e-300)) - 5.0;
    let mut peak = f64::NEG_INFINITY;
    let mut x = x_top;
    loop {
        let v = log_f(x);
        peak = peak.max(v);
        if (v < peak - DROP && x < knee.min(0.0)) || x < -1e4 {
            break;
        }
        x -= 0.5;
    }
    // the left tail is bounded by ∫ e^{A x} = e^{A x}/A
    let lo = x.min((peak - DROP + libm::log(a) + lg) / a);
    let hi = x_top;

    let r = quad::integrate(|x| libm::exp(log_f(x)), lo, hi, rel_tol * 0.1, 0.0, 4000)?;
    Ok(QuadratureEstimate {
        value: r.value,
        error: r.error,
        route: QuadratureRoute::Adaptive,
        converged: true,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormEstimate {
    pub value: f64,
    /// Propagated bound from the U evaluations.
    pub error: f64,
    /// Largest single term, a measure of cancellation.
    pub max_term: f64,
}

/// `𝒥 = Σᵢ Σⱼ A_ij λᵢ^j U(j; j−A+1; λᵢ)` with `λᵢ = ϑᵢ/γ̄`, in double-double.
pub fn expectation_closed_form(
    params: &ChannelParams,
    expansion: &PartialFractionExpansion,
    a: f64,
) -> Result<ClosedFormEstimate> {
    mc::check_exponent(a)?;
    poles::regime(params)?;
    let gbar = DoubleDouble::new(params.gamma_bar);
    let mut total = DoubleDouble::ZERO;
    let mut error = 0.0;
    let mut max_term: f64 = 0.0;
    for pole in &expansion.terms {
        let lambda = pole.theta_dd() / gbar;
        let coeffs = pole.coefficients_dd();
        // ∫ t^{j−1}(1+t)^{−A} e^{−λt} dt = Γ(j) U(j; j−A+1; λ)
        let (family, fam_err) = laplace_power_family::<DoubleDouble>(
            coeffs.len() as u32,
            -a,
            lambda,
            CLOSED_FORM_U_TOL,
        )?;
        let mut lam_pow = lambda;
        for (j, (&coef, &integral)) in coeffs.iter().zip(&family).enumerate() {
            let term = coef * lam_pow * integral / DoubleDouble::new(factorial(j as u32));
            let t = libm::fabs(term.to_f64());
            max_term = max_term.max(t);
            error += t * fam_err;
            total += term;
            lam_pow *= lambda;
        }
    }
    let value = total.to_f64();
    Ok(ClosedFormEstimate {
        value,
        error: error + libm::fabs(value) * 1e-30,
        max_term,
    })
}

fn rel_diff(a: f64, b: f64) -> f64 {
    libm::fabs(a - b) / libm::fabs(b)
}

fn sci(x: f64) -> String {
    format!("{x:.3e}")
}

/// Dispatches a request to an engine and assembles the result.
///
/// `Auto` uses the closed form when `m` is an integer and `μ` an even
/// integer (within `1e-9`), evaluating the quadrature alongside it and
/// recording their relative difference as `cross_check_rel_diff`; otherwise
/// it uses quadrature.
pub fn er_auto(request: &ErRequest) -> Result<ErResult> {
    request.validate()?;
    let mut diagnostics = qos_diagnostics(request);
    let a = request.a_exponent;

    if request.method == Method::MonteCarlo {
        let est = mc::estimate_er(&request.params, a, &request.mc)?;
        return monte_carlo_result(request, &est);
    }

    let params = request.params.resolve_shadowing(request.large_m);
    if request.params.is_unshadowed() {
        diagnostics.push(("m_resolved".into(), request.large_m.to_string()));
    }
    let derived = DerivedParams::derive(&params)?;
    let closed_ok = poles::closed_form_applies(&params);

    let quadrature = |diagnostics: &mut Vec<(String, String)>| -> Result<QuadratureEstimate> {
        let q = expectation_quadrature(&params, &derived, a, request.rel_tol)?;
        diagnostics.push((
            "quadrature_route".into(),
            match q.route {
                QuadratureRoute::Laguerre { order } => format!("gauss_laguerre_{order}"),
                QuadratureRoute::Adaptive => "adaptive_gauss_kronrod".into(),
            },
        ));
        if !q.converged {
            return Err(Error::NoConvergence {
                what: "effective-rate quadrature",
                estimate: q.error,
            });
        }
        Ok(q)
    };
    let closed = || -> Result<ClosedFormEstimate> {
        let expansion = poles::expansion_for(&params, &derived)?;
        expectation_closed_form(&params, &expansion, a)
    };

    let (j, err, used) = match request.method {
        Method::Quadrature => {
            let q = quadrature(&mut diagnostics)?;
            (q.value, q.error, Method::Quadrature)
        }
        Method::ClosedForm => {
            let c = closed()?;
            (c.value, c.error, Method::ClosedForm)
        }
        Method::Auto if closed_ok => {
            let q = quadrature(&mut diagnostics)?;
            match closed() {
                Ok(c) => {
                    diagnostics.push((
                        "cross_check_rel_diff".into(),
                        sci(rel_diff(q.value, c.value)),
                    ));
                    (c.value, c.error, Method::ClosedForm)
                }
                Err(e) => {
                    diagnostics.push(("closed_form_fallback".into(), e.to_string()));
                    (q.value, q.error, Method::Quadrature)
                }
            }
        }
        Method::Auto => {
            let q = quadrature(&mut diagnostics)?;
            (q.value, q.error, Method::Quadrature)
        }
        Method::MonteCarlo => unreachable!("handled above"),
    };

    if request.params.is_unshadowed() && used == Method::Quadrature {
        // convergence of the m → ∞ stand-in
        let doubled = request.params.resolve_shadowing(2.0 * request.large_m);
        let d2 = DerivedParams::derive(&doubled)?;
        let q2 = expectation_quadrature(&doubled, &d2, a, request.rel_tol)?;
        diagnostics.push(("large_m_rel_diff".into(), sci(rel_diff(q2.value, j))));
    }

    finish(j, a, used, err, diagnostics)
}

fn qos_diagnostics(request: &ErRequest) -> Vec<(String, String)> {
    let mut diagnostics = Vec::new();
    if let Some(q) = request.qos {
        diagnostics.push(("theta".into(), q.theta.to_string()));
        diagnostics.push(("T".into(), q.block_time.to_string()));
        diagnostics.push(("B".into(), q.bandwidth.to_string()));
    }
    diagnostics
}

/// Wraps a Monte-Carlo estimate made for `request` (sequentially or not).
pub fn monte_carlo_result(request: &ErRequest, est: &mc::McEstimate) -> Result<ErResult> {
    let mut diagnostics = qos_diagnostics(request);
    diagnostics.push(("n_samples".into(), est.n_samples.to_string()));
    diagnostics.push(("seed".into(), est.seed.to_string()));
    if request.mc.is_small() {
        diagnostics.push(("warning".into(), "fewer than 1000 samples".into()));
    }
    finish(
        est.j_hat,
        request.a_exponent,
        Method::MonteCarlo,
        est.j_stderr,
        diagnostics,
    )
}

fn finish(
    j: f64,
    a: f64,
    method_used: Method,
    error_estimate: f64,
    mut diagnostics: Vec<(String, String)>,
) -> Result<ErResult> {
    let rate = effective_rate(j, a)?;
    diagnostics.push(("error_estimate".into(), sci(error_estimate)));
    Ok(ErResult {
        expectation_j: j,
        rate,
        method_used,
        error_estimate,
        diagnostics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::expint_e1;

    // 1 − e·E₁(1)
    const RAYLEIGH_J: f64 = 0.403_652_637_676_805_6;
    // μ = 2, m = κ = 1, η = ϱ² = 0.1 at 0 dB, A = 2: mpmath quad at 50 digits of the MGF
    // integral in x = ln s.
    const REFERENCE_J: f64 = 0.382_238_199_209_828_4;

    fn reference() -> ChannelParams {
        ChannelParams::new(2.0, 1.0, 1.0, 0.1, 0.1, 1.0)
    }

    fn rayleigh(gbar: f64) -> ChannelParams {
        ChannelParams::new(1.0, f64::INFINITY, 0.0, 1.0, 1.0, gbar)
    }

    #[test]
    fn rayleigh_oracle_constant() {
        assert!((1.0 - core::f64::consts::E * expint_e1(1.0) - RAYLEIGH_J).abs() < 1e-15);
    }

    #[test]
    fn quadrature_rayleigh() {
        let p = rayleigh(1.0).resolve_shadowing(DEFAULT_LARGE_M);
        let d = DerivedParams::derive(&p).unwrap();
        let q = expectation_quadrature(&p, &d, 2.0, 1e-10).unwrap();
        assert!(q.converged);
        assert!((q.value - RAYLEIGH_J).abs() < 1e-10);
        let r = effective_rate(q.value, 2.0).unwrap();
        assert!((r - 0.654).abs() < 1e-3);
    }

    #[test]
    fn quadrature_reference() {
        let p = reference();
        let d = DerivedParams::derive(&p).unwrap();
        let q = expectation_quadrature(&p, &d, 2.0, 1e-10).unwrap();
        assert!((q.value - REFERENCE_J).abs() < 1e-10, "{}", q.value);
        let r = effective_rate(q.value, 2.0).unwrap();
        assert!((r - 0.693_728_066).abs() < 1e-8, "{r}");
    }

    #[test]
    fn small_exponent_limit() {
        let p = reference();
        let d = DerivedParams::derive(&p).unwrap();
        let q = expectation_quadrature(&p, &d, 1e-6, 1e-8).unwrap();
        assert!((q.value - 1.0).abs() < 1e-4);
        assert!(effective_rate(q.value, 1e-6).unwrap().is_finite());
    }

    #[test]
    fn high_snr_uses_adaptive_fallback() {
        let p = ChannelParams::new(6.0, 1.0, 2.0, 0.5, 1.0, 1000.0);
        let d = DerivedParams::derive(&p).unwrap();
        let q = expectation_quadrature(&p, &d, 5.0, 1e-8).unwrap();
        assert!(q.converged);
        // mpmath reference
        assert!(
            (q.value - 1.403_600_280_215_320_6e-12).abs() < 1e-8 * q.value,
            "{}",
            q.value
        );
    }

    #[test]
    fn closed_form_reference() {
        let p = reference();
        let d = DerivedParams::derive(&p).unwrap();
        let e = poles::expansion_for(&p, &d).unwrap();
        let c = expectation_closed_form(&p, &e, 2.0).unwrap();
        assert!((c.value - REFERENCE_J).abs() < 1e-14, "{}", c.value);
    }

    #[test]
    fn closed_form_cancellation_corner() {
        let p = ChannelParams::new(6.0, 1.0, 2.0, 0.5, 1.0, 1000.0);
        let d = DerivedParams::derive(&p).unwrap();
        let e = poles::expansion_for(&p, &d).unwrap();
        let c = expectation_closed_form(&p, &e, 5.0).unwrap();
        assert!(c.max_term > 1e9 * c.value);
        assert!(
            (c.value - 1.403_600_280_215_320_6e-12).abs() < 1e-9 * c.value,
            "{}",
            c.value
        );
    }

    #[test]
    fn closed_form_rayleigh_class_unit_exponent() {
        // μ = 2, m = 1, κ = 0, η = 1 ⇒ M = (1 + γ̄s/2)^{-2}; use A = 1 on a
        // single simple pole instead: μ = 2, η → Ω/η ≠ Ω gives two simple poles.
        // Check the one-pole identity U(1;1;z) = e^z E₁(z) through 𝒥 for an
        // exponential SNR: 𝒥 = z e^z E₁(z), z = 1/γ̄.
        let p = ChannelParams::new(2.0, 1.0, 0.0, 1.0, 1.0, 2.0);
        let d = DerivedParams::derive(&p).unwrap();
        let e = poles::expansion_for(&p, &d).unwrap();
        assert_eq!(e.terms.len(), 1);
        assert_eq!(e.terms[0].multiplicity(), 2);
        let exp_only = poles::decompose(&[poles::Factor::new(2.0, -1)]).unwrap();
        let one_pole = ChannelParams::new(2.0, 1.0, 0.0, 1.0, 1.0, 1.0);
        let c = expectation_closed_form(&one_pole, &exp_only, 1.0).unwrap();
        let z = 2.0;
        let want = z * libm::exp(z) * expint_e1(z);
        assert!((c.value - want).abs() < 1e-14, "{} vs {want}", c.value);
    }

    #[test]
    fn closed_form_rejects_fractional_m() {
        let p = ChannelParams::new(2.0, 1.0, 1.0, 0.1, 0.1, 1.0);
        let d = DerivedParams::derive(&p).unwrap();
        let e = poles::expansion_for(&p, &d).unwrap();
        let frac = ChannelParams { m: 1.7, ..p };
        assert!(matches!(
            expectation_closed_form(&frac, &e, 2.0),
            Err(Error::ClosedFormUnavailable(_))
        ));
    }

    #[test]
    fn effective_rate_values() {
        assert_eq!(effective_rate(1.0, 2.0).unwrap(), 0.0);
        assert_eq!(effective_rate(0.25, 2.0).unwrap(), 1.0);
        assert!((effective_rate(0.403_652, 2.0).unwrap() - 0.654).abs() < 1e-3);
        assert!(effective_rate(0.0, 2.0).is_err());
        assert!(effective_rate(1.5, 2.0).is_err());
        assert!(effective_rate(0.5, 0.0).is_err());
    }

    #[test]
    fn dispatch() {
        let r = er_auto(&ErRequest::new(reference(), 2.0)).unwrap();
        assert_eq!(r.method_used, Method::ClosedForm);
        let diff: f64 = r
            .diagnostic("cross_check_rel_diff")
            .unwrap()
            .parse()
            .unwrap();
        assert!(diff < 1e-6);

        let r = er_auto(&ErRequest::new(
            ChannelParams {
                m: 1.7,
                ..reference()
            },
            2.0,
        ))
        .unwrap();
        assert_eq!(r.method_used, Method::Quadrature);

        let r = er_auto(&ErRequest::new(
            ChannelParams {
                mu: 1.5,
                ..reference()
            },
            2.0,
        ))
        .unwrap();
        assert_eq!(r.method_used, Method::Quadrature);

        let err = er_auto(
            &ErRequest::new(
                ChannelParams {
                    mu: 1.5,
                    ..reference()
                },
                2.0,
            )
            .with_method(Method::ClosedForm),
        )
        .unwrap_err();
        assert!(
            err.to_string()
                .contains("closed form requires even integer mu"),
            "{err}"
        );
    }

    #[test]
    fn rate_identity_and_range() {
        let r = er_auto(&ErRequest::new(reference(), 2.0).with_method(Method::Quadrature)).unwrap();
        assert_eq!(r.rate, -libm::log2(r.expectation_j) / 2.0);
        assert!(r.expectation_j > 0.0 && r.expectation_j < 1.0);
    }

    #[test]
    fn qos_triple_sets_exponent() {
        let q = QosTriple {
            theta: 0.01,
            block_time: 1e-3,
            bandwidth: 1e5,
        };
        let req = ErRequest::from_qos(reference(), q);
        assert!((req.a_exponent - 1.0 / core::f64::consts::LN_2).abs() < 1e-12);
        let r = er_auto(&req).unwrap();
        assert_eq!(r.diagnostic("B"), Some("100000"));
    }

    #[test]
    fn request_validation() {
        let mut req = ErRequest::new(reference(), 2.0);
        req.rel_tol = 1e-13;
        assert!(er_auto(&req).is_err());
        assert!(er_auto(&ErRequest::new(reference(), -1.0)).is_err());
    }

    #[test]
    fn beckmann_large_m_converges() {
        let p = ChannelParams::new(1.0, f64::INFINITY, 1.0, 1.0, 1.0, 1.0);
        let r = er_auto(&ErRequest::new(p, 2.0)).unwrap();
        assert_eq!(r.method_used, Method::Quadrature);
        let diff: f64 = r.diagnostic("large_m_rel_diff").unwrap().parse().unwrap();
        assert!(diff < 1e-3, "{diff}");
    }
}
