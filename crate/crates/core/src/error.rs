use alloc::string::String;
use thiserror::Error;

/// Fields of [`crate::ChannelParams`], used to name the offender in errors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Field {
    Mu,
    M,
    Kappa,
    Eta,
    Rho2,
    GammaBar,
}

impl Field {
    pub fn name(self) -> &'static str {
        match self {
            Field::Mu => "mu",
            Field::M => "m",
            Field::Kappa => "kappa",
            Field::Eta => "eta",
            Field::Rho2 => "rho2",
            Field::GammaBar => "gamma_bar",
        }
    }
}

impl core::fmt::Display for Field {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{field} out of range: {value}")]
    OutOfRange { field: Field, value: f64 },

    #[error("{field} is not finite: {value}")]
    NonFinite { field: Field, value: f64 },

    #[error("shadowing parameter m is infinite; resolve it to a finite value first")]
    UnresolvedShadowing,

    #[error("unknown preset channel '{0}'")]
    UnknownPreset(String),

    #[error("preset {preset} requires {field} = {required}, got {given}")]
    PresetConflict {
        preset: &'static str,
        field: Field,
        required: f64,
        given: f64,
    },

    #[error("closed form unavailable: {0}")]
    ClosedFormUnavailable(&'static str),

    #[error("partial-fraction bookkeeping failed: {0}")]
    Residue(&'static str),

    #[error("density is negative ({value:e}) at gamma = {gamma}")]
    NegativeDensity { gamma: f64, value: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),

    #[error("{what} did not converge (error estimate {estimate:e})")]
    NoConvergence { what: &'static str, estimate: f64 },

    #[error("Monte-Carlo sampling requires an integer number of clusters, got mu = {0}")]
    NonIntegerClusters(f64),
}

pub type Result<T> = core::result::Result<T, Error>;
