//! Laplace-convention MGF `M(s) = E[exp(−sγ)]` for real `s >= 0`.
//!
//! The two root factors are combined through
//! `(1 + x/c1)(1 + x/c2) = 1 − βx + α₁x²`, so the evaluation stays in real
//! arithmetic and never touches the roots.

use crate::params::{ChannelParams, DerivedParams};

/// One evaluation of the MGF.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MgfPoint {
    pub s: f64,
    pub value: f64,
    pub log_value: f64,
}

/// `ln M(s)`; `s` must be nonnegative.
#[inline]
pub fn ln_mgf(params: &ChannelParams, derived: &DerivedParams, s: f64) -> f64 {
    debug_assert!(s >= 0.0);
    let x = params.gamma_bar * s;
    let quad = libm::log1p(x * (-derived.beta + derived.alpha1 * x));
    let e = derived.exponent_e;
    let omega_part = if e == 0.0 {
        0.0
    } else {
        let w = derived.omega_cap;
        e * (libm::log1p(params.eta * x / w) + libm::log1p(x / w))
    };
    omega_part - params.m * quad
}

pub fn mgf(params: &ChannelParams, derived: &DerivedParams, s: f64) -> MgfPoint {
    let log_value = ln_mgf(params, derived, s);
    MgfPoint {
        s,
        value: libm::exp(log_value),
        log_value,
    }
}

/// `−M′(0)` from the log form; equals `γ̄` for every valid channel.
pub fn mgf_mean_check(params: &ChannelParams, derived: &DerivedParams) -> f64 {
    params.gamma_bar
        * ((params.mu / 2.0 - params.m) * (1.0 + params.eta) / derived.omega_cap
            - params.m * derived.beta)
}
