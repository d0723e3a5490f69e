//! Channel parameters of the Fluctuating Beckmann model and the constants
//! derived from them.
//!
//! The MGF of the instantaneous SNR is
//!
//! ```text
//! M(s) = (1 + η γ̄ s/Ω)^(m-μ/2) (1 + γ̄ s/Ω)^(m-μ/2) (1 + γ̄ s/c1)^(-m) (1 + γ̄ s/c2)^(-m)
//! ```
//!
//! with `Ω = μ(1+η)(1+κ)/2` and `c1`, `c2` the roots of `α₁ z² + β z + 1`.

use core::str::FromStr;

use alloc::string::ToString;

use crate::dd::{DoubleDouble, Real};
use crate::error::{Error, Field, Result};

/// Default finite stand-in for `m = +∞` (no LoS fluctuation).
pub const DEFAULT_LARGE_M: f64 = 1e4;

/// Relative distance below which two roots count as one double root.
pub const COINCIDENT_ROOT_TOL: f64 = 1e-9;

/// The five fading parameters plus the average SNR.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    /// Number of multipath clusters (real extension allowed).
    pub mu: f64,
    /// Shadowing severity of the LoS fluctuation; `f64::INFINITY` means no
    /// fluctuation (Beckmann limit).
    pub m: f64,
    /// Total LoS power over total scattered power.
    pub kappa: f64,
    /// In-phase over quadrature scatter variance.
    pub eta: f64,
    /// In-phase over quadrature LoS power.
    pub rho2: f64,
    /// Average SNR, linear scale.
    pub gamma_bar: f64,
}

impl ChannelParams {
    pub fn new(mu: f64, m: f64, kappa: f64, eta: f64, rho2: f64, gamma_bar: f64) -> Self {
        Self {
            mu,
            m,
            kappa,
            eta,
            rho2,
            gamma_bar,
        }
    }

    pub fn with_gamma_bar(self, gamma_bar: f64) -> Self {
        Self { gamma_bar, ..self }
    }

    /// Checks every field against its range. `m = +∞` is accepted.
    pub fn validate(&self) -> Result<()> {
        let finite = |field, value: f64| {
            if value.is_finite() {
                Ok(())
            } else {
                Err(Error::NonFinite { field, value })
            }
        };
        let range = |field, value: f64, ok: bool| {
            if ok {
                Ok(())
            } else {
                Err(Error::OutOfRange { field, value })
            }
        };

        finite(Field::Mu, self.mu)?;
        range(Field::Mu, self.mu, self.mu > 0.0)?;

        if self.m.is_nan() || self.m == f64::NEG_INFINITY {
            return Err(Error::NonFinite {
                field: Field::M,
                value: self.m,
            });
        }
        range(Field::M, self.m, self.m > 0.0)?;

        finite(Field::Kappa, self.kappa)?;
        range(Field::Kappa, self.kappa, self.kappa >= 0.0)?;
        finite(Field::Eta, self.eta)?;
        range(Field::Eta, self.eta, self.eta > 0.0)?;
        finite(Field::Rho2, self.rho2)?;
        range(Field::Rho2, self.rho2, self.rho2 >= 0.0)?;
        finite(Field::GammaBar, self.gamma_bar)?;
        range(Field::GammaBar, self.gamma_bar, self.gamma_bar > 0.0)?;
        Ok(())
    }

    /// Replaces the `m = +∞` sentinel with `large_m`; finite `m` is kept.
    pub fn resolve_shadowing(self, large_m: f64) -> Self {
        if self.m.is_infinite() {
            Self { m: large_m, ..self }
        } else {
            self
        }
    }

    pub fn is_unshadowed(&self) -> bool {
        self.m.is_infinite()
    }
}

/// Everything the MGF needs beyond [`ChannelParams`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedParams {
    /// `Ω = μ(1+η)(1+κ)/2`.
    pub omega_cap: f64,
    pub alpha1: f64,
    pub beta: f64,
    /// `β² − 4α₁`; never negative for valid parameters.
    pub discriminant: f64,
    /// Root of larger magnitude.
    pub c1: f64,
    pub c2: f64,
    /// `m − μ/2`, shared exponent of the two Ω factors.
    pub exponent_e: f64,
    pub(crate) precise: PreciseDerived,
}

/// Double-double copies of the derived constants, used by the closed form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct PreciseDerived {
    pub omega_cap: DoubleDouble,
    pub c1: DoubleDouble,
    pub c2: DoubleDouble,
}

impl DerivedParams {
    /// Computes `Ω`, `α₁`, `β` and the roots of `α₁ z² + β z + 1`.
    ///
    /// The arithmetic is carried in double-double and rounded, so exact
    /// degeneracies (κ = 0, η = 1) produce roots equal to `Ω` or `Ω/η` to
    /// far below [`COINCIDENT_ROOT_TOL`].
    pub fn derive(params: &ChannelParams) -> Result<Self> {
        params.validate()?;
        if params.m.is_infinite() {
            return Err(Error::UnresolvedShadowing);
        }
        let dd = DoubleDouble::new;
        let one = DoubleDouble::ONE;
        let two = dd(2.0);
        let (mu, m, kappa, eta, rho2) = (
            dd(params.mu),
            dd(params.m),
            dd(params.kappa),
            dd(params.eta),
            dd(params.rho2),
        );

        let omega = mu * (one + eta) * (one + kappa) / two;
        let alpha1 = eta / (omega * omega)
            + kappa * (rho2 + eta) / (m * omega * (one + rho2) * (one + kappa));
        let beta = -(two / mu + kappa / m) / (one + kappa);
        let mut disc = beta * beta - dd(4.0) * alpha1;
        if disc < DoubleDouble::ZERO {
            disc = DoubleDouble::ZERO;
        }
        // β < 0, so −β + √disc has no cancellation.
        let c1 = (-beta + disc.sqrt()) / (two * alpha1);
        let c2 = one / (alpha1 * c1);

        Ok(Self {
            omega_cap: omega.to_f64(),
            alpha1: alpha1.to_f64(),
            beta: beta.to_f64(),
            discriminant: disc.to_f64(),
            c1: c1.to_f64(),
            c2: c2.to_f64(),
            exponent_e: params.m - params.mu / 2.0,
            precise: PreciseDerived {
                omega_cap: omega,
                c1,
                c2,
            },
        })
    }

    /// True when the roots are within [`COINCIDENT_ROOT_TOL`] of each other.
    pub fn has_double_root(&self) -> bool {
        (self.c1 - self.c2).abs() <= COINCIDENT_ROOT_TOL * self.c1.abs()
    }
}

/// Special cases of the Fluctuating Beckmann model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Rayleigh,
    NakagamiM,
    Rician,
    KappaMu,
    EtaMu,
    KappaMuShadowed,
    Beckmann,
}

impl Preset {
    pub const ALL: [Preset; 7] = [
        Preset::Rayleigh,
        Preset::NakagamiM,
        Preset::Rician,
        Preset::KappaMu,
        Preset::EtaMu,
        Preset::KappaMuShadowed,
        Preset::Beckmann,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Rayleigh => "rayleigh",
            Preset::NakagamiM => "nakagami-m",
            Preset::Rician => "rician",
            Preset::KappaMu => "kappa-mu",
            Preset::EtaMu => "eta-mu",
            Preset::KappaMuShadowed => "kappa-mu-shadowed",
            Preset::Beckmann => "beckmann",
        }
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::UnknownPreset(s.to_string()))
    }
}

/// Optional user values layered over a preset.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Overrides {
    pub mu: Option<f64>,
    pub m: Option<f64>,
    pub kappa: Option<f64>,
    pub eta: Option<f64>,
    pub rho2: Option<f64>,
    pub gamma_bar: Option<f64>,
}

/// Builds the parameters of a named special case.
///
/// | preset            | μ          | m     | κ     | η     | ϱ²    |
/// |-------------------|------------|-------|-------|-------|-------|
/// | rayleigh          | 1          | ∞     | 0     | 1     | 1     |
/// | nakagami-m        | user (= Nakagami m) | ∞ | 0 | 1 | 1     |
/// | rician            | 1          | ∞     | user (= K) | 1 | 1 |
/// | kappa-mu          | user       | ∞     | user  | 1     | 1     |
/// | eta-mu            | user       | ∞     | 0     | user  | 1     |
/// | kappa-mu-shadowed | user       | user  | user  | 1     | 1     |
/// | beckmann          | 1          | ∞     | user  | user  | user  |
///
/// Fixed entries reject a conflicting override. With κ = 0 the values of m
/// and ϱ² do not enter the MGF.
pub fn preset(preset: Preset, overrides: Overrides) -> Result<ChannelParams> {
    let name = preset.name();
    let fixed = |field: Field, given: Option<f64>, required: f64| -> Result<f64> {
        match given {
            Some(v) if v != required => Err(Error::PresetConflict {
                preset: name,
                field,
                required,
                given: v,
            }),
            _ => Ok(required),
        }
    };
    let o = overrides;
    let gamma_bar = o.gamma_bar.unwrap_or(1.0);
    let inf = f64::INFINITY;

    let p = match preset {
        Preset::Rayleigh => ChannelParams::new(
            fixed(Field::Mu, o.mu, 1.0)?,
            fixed(Field::M, o.m, inf)?,
            fixed(Field::Kappa, o.kappa, 0.0)?,
            fixed(Field::Eta, o.eta, 1.0)?,
            o.rho2.unwrap_or(1.0),
            gamma_bar,
        ),
        Preset::NakagamiM => ChannelParams::new(
            o.mu.unwrap_or(1.0),
            fixed(Field::M, o.m, inf)?,
            fixed(Field::Kappa, o.kappa, 0.0)?,
            fixed(Field::Eta, o.eta, 1.0)?,
            o.rho2.unwrap_or(1.0),
            gamma_bar,
        ),
        Preset::Rician => ChannelParams::new(
            fixed(Field::Mu, o.mu, 1.0)?,
            fixed(Field::M, o.m, inf)?,
            o.kappa.unwrap_or(1.0),
            fixed(Field::Eta, o.eta, 1.0)?,
            o.rho2.unwrap_or(1.0),
            gamma_bar,
        ),
        Preset::KappaMu => ChannelParams::new(
            o.mu.unwrap_or(1.0),
            fixed(Field::M, o.m, inf)?,
            o.kappa.unwrap_or(1.0),
            fixed(Field::Eta, o.eta, 1.0)?,
            o.rho2.unwrap_or(1.0),
            gamma_bar,
        ),
        Preset::EtaMu => ChannelParams::new(
            o.mu.unwrap_or(1.0),
            fixed(Field::M, o.m, inf)?,
            fixed(Field::Kappa, o.kappa, 0.0)?,
            o.eta.unwrap_or(1.0),
            o.rho2.unwrap_or(1.0),
            gamma_bar,
        ),
        Preset::KappaMuShadowed => ChannelParams::new(
            o.mu.unwrap_or(1.0),
            o.m.unwrap_or(1.0),
            o.kappa.unwrap_or(1.0),
            fixed(Field::Eta, o.eta, 1.0)?,
            o.rho2.unwrap_or(1.0),
            gamma_bar,
        ),
        Preset::Beckmann => ChannelParams::new(
            fixed(Field::Mu, o.mu, 1.0)?,
            fixed(Field::M, o.m, inf)?,
            o.kappa.unwrap_or(1.0),
            o.eta.unwrap_or(1.0),
            o.rho2.unwrap_or(1.0),
            gamma_bar,
        ),
    };
    p.validate()?;
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference() -> ChannelParams {
        ChannelParams::new(2.0, 1.0, 1.0, 0.1, 0.1, 1.0)
    }

    #[test]
    fn validate_accepts_reference_and_sentinel() {
        assert!(reference().validate().is_ok());
        let beck = ChannelParams::new(2.0, f64::INFINITY, 1.0, 1.0, 1.0, 1.0);
        assert!(beck.validate().is_ok());
    }

    #[test]
    fn validate_names_the_offending_field() {
        let p = ChannelParams {
            mu: 0.0,
            ..reference()
        };
        assert_eq!(
            p.validate(),
            Err(Error::OutOfRange {
                field: Field::Mu,
                value: 0.0
            })
        );
        let p = ChannelParams {
            eta: f64::NAN,
            ..reference()
        };
        assert!(matches!(
            p.validate(),
            Err(Error::NonFinite {
                field: Field::Eta,
                ..
            })
        ));
        let p = ChannelParams {
            gamma_bar: -1.0,
            ..reference()
        };
        assert!(matches!(
            p.validate(),
            Err(Error::OutOfRange {
                field: Field::GammaBar,
                ..
            })
        ));
        let p = ChannelParams {
            m: f64::NEG_INFINITY,
            ..reference()
        };
        assert!(p.validate().is_err());
    }

    #[test]
    fn kappa_zero_accepts_any_rho2() {
        for rho2 in [0.0, 0.3, 1e6] {
            let p = ChannelParams::new(1.0, 2.0, 0.0, 0.5, rho2, 1.0);
            assert!(p.validate().is_ok());
            let d = DerivedParams::derive(&p).unwrap();
            let d0 = DerivedParams::derive(&ChannelParams { rho2: 0.0, ..p }).unwrap();
            assert_eq!(d.alpha1, d0.alpha1);
        }
    }

    #[test]
    fn derive_reference() {
        let d = DerivedParams::derive(&reference()).unwrap();
        assert!((d.omega_cap - 2.2).abs() < 1e-15);
        // α₁ = 0.1/4.84 + 1·0.2/(1·2.2·1.1·2)
        let alpha1 = 0.1 / 4.84 + 0.2 / (2.2 * 1.1 * 2.0);
        assert!((d.alpha1 - alpha1).abs() < 1e-16);
        assert!((d.alpha1 - 0.061983).abs() < 1e-6);
        assert_eq!(d.beta, -1.0);
        assert!((d.c1 - 15.0623).abs() < 1e-3, "c1 = {}", d.c1);
        assert!((d.c2 - 1.07112).abs() < 1e-4, "c2 = {}", d.c2);
        assert!((d.c1 * d.c2 - 1.0 / alpha1).abs() < 1e-12 * d.c1 * d.c2);
        assert!((1.0 / alpha1 - 16.1335).abs() < 1e-3);
        assert_eq!(d.exponent_e, 0.0);
    }

    #[test]
    fn derive_rayleigh_double_root() {
        let p = ChannelParams::new(1.0, 5.0, 0.0, 1.0, 1.0, 1.0);
        let d = DerivedParams::derive(&p).unwrap();
        assert_eq!(d.omega_cap, 1.0);
        assert_eq!(d.alpha1, 1.0);
        assert_eq!(d.beta, -2.0);
        assert_eq!(d.c1, 1.0);
        assert_eq!(d.c2, 1.0);
        assert!(d.has_double_root());
    }

    #[test]
    fn derive_nakagami_perfect_square() {
        let p = ChannelParams::new(2.0, 1.0, 0.0, 1.0, 1.0, 1.0);
        let d = DerivedParams::derive(&p).unwrap();
        assert_eq!(d.omega_cap, 2.0);
        assert_eq!(d.alpha1, 0.25);
        assert_eq!(d.beta, -1.0);
        assert_eq!(d.c1, 2.0);
        assert_eq!(d.c2, 2.0);
    }

    #[test]
    fn kappa_zero_roots_are_omega_factors() {
        let p = ChannelParams::new(3.0, 2.0, 0.0, 0.25, 0.5, 1.0);
        let d = DerivedParams::derive(&p).unwrap();
        assert!((d.c1 - d.omega_cap / p.eta).abs() <= 1e-15 * d.c1);
        assert!((d.c2 - d.omega_cap).abs() <= 1e-15 * d.c2);
    }

    #[test]
    fn derive_rejects_infinite_m() {
        let p = ChannelParams::new(1.0, f64::INFINITY, 1.0, 1.0, 1.0, 1.0);
        assert_eq!(DerivedParams::derive(&p), Err(Error::UnresolvedShadowing));
        let r = p.resolve_shadowing(DEFAULT_LARGE_M);
        assert_eq!(r.m, 1e4);
        assert!(DerivedParams::derive(&r).is_ok());
    }

    #[test]
    fn presets() {
        let r = preset(
            Preset::Rayleigh,
            Overrides {
                gamma_bar: Some(1.0),
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!((r.mu, r.eta, r.kappa, r.gamma_bar), (1.0, 1.0, 0.0, 1.0));
        assert!(r.is_unshadowed());

        let k = preset(
            Preset::KappaMuShadowed,
            Overrides {
                kappa: Some(2.0),
                mu: Some(3.0),
                m: Some(2.0),
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!((k.kappa, k.mu, k.m, k.eta), (2.0, 3.0, 2.0, 1.0));

        let b = preset(
            Preset::Beckmann,
            Overrides {
                eta: Some(1.0),
                rho2: Some(1.0),
                mu: Some(1.0),
                ..Default::default()
            },
        )
        .unwrap();
        assert!(b.m.is_infinite());
        assert_eq!((b.eta, b.rho2, b.mu), (1.0, 1.0, 1.0));
    }

    #[test]
    fn preset_conflicts_and_unknown_names() {
        let err = preset(
            Preset::KappaMuShadowed,
            Overrides {
                eta: Some(0.5),
                ..Default::default()
            },
        )
        .unwrap_err();
        assert!(matches!(
            err,
            Error::PresetConflict {
                field: Field::Eta,
                ..
            }
        ));
        assert!("weibull".parse::<Preset>().is_err());
        for p in Preset::ALL {
            assert_eq!(p.name().parse::<Preset>().unwrap(), p);
        }
    }
}
