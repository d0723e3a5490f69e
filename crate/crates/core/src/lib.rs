//! Effective rate of Fluctuating Beckmann fading channels.
//!
//! The expectation `𝒥 = E[(1+γ)^{−A}]` behind the normalized effective rate
//! `R = −log₂(𝒥)/A` is computed three ways:
//!
//! - [`rate::expectation_quadrature`]: Gauss–Laguerre quadrature of the MGF
//!   integral, valid for every parameter set;
//! - [`rate::expectation_closed_form`]: partial fractions of the MGF and the
//!   Tricomi U function, for integer `m` and even integer `μ`;
//! - [`mc::estimate_er`]: Monte-Carlo simulation of the cluster model, for
//!   integer `μ`.
//!
//! The crate is `no_std` (it needs `alloc`). IO, the command line and the
//! parallel Monte-Carlo driver live in the `fbrate` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod dd;
pub mod error;
pub mod mc;
pub mod mgf;
pub mod params;
pub mod poles;
pub mod quad;
pub mod rate;
pub mod special;

pub use error::{Error, Field, Result};
pub use mgf::{mgf, mgf_mean_check, MgfPoint};
pub use params::{preset, ChannelParams, DerivedParams, Overrides, Preset};
pub use poles::{PartialFractionExpansion, PoleSet};
pub use rate::{effective_rate, er_auto, ErRequest, ErResult, Method, QosTriple};
