//! Cross-method grids behind `fbrate validate` and the acceptance suite.

use std::collections::HashMap;

use fbrate_core::mc::McConfig;
use fbrate_core::poles::expansion_for;
use fbrate_core::rate::{expectation_closed_form, LaguerreLadder, DEFAULT_REL_TOL};
use fbrate_core::{ChannelParams, DerivedParams};
use rayon::prelude::*;

use crate::parallel;
use crate::sweep::db_to_linear;

pub const DEFAULT_SNR_DB: [f64; 5] = [-10.0, 0.0, 10.0, 20.0, 30.0];
pub const DEFAULT_A: [f64; 4] = [0.5, 1.0, 2.0, 5.0];

/// Largest admissible relative gap between the two deterministic engines.
pub const CROSS_ENGINE_TOL: f64 = 1e-6;
/// Largest admissible |z| of a Monte-Carlo estimate.
pub const Z_LIMIT: f64 = 4.0;
/// Share of Monte-Carlo points that must fall within [`Z_LIMIT`].
pub const Z_QUORUM: f64 = 0.95;

/// Every combination of integer `m`, even `μ`, the listed shape parameters,
/// SNRs and exponents.
pub fn cross_engine_grid(snr_db: &[f64], a_values: &[f64]) -> Vec<(ChannelParams, f64)> {
    let mut grid = Vec::new();
    for &m in &[1.0, 2.0, 3.0] {
        for &mu in &[2.0, 4.0, 6.0] {
            for &kappa in &[0.5, 1.0, 2.0] {
                for &eta in &[0.1, 0.5, 1.0] {
                    for &rho2 in &[0.1, 1.0] {
                        for &db in snr_db {
                            for &a in a_values {
                                let p =
                                    ChannelParams::new(mu, m, kappa, eta, rho2, db_to_linear(db));
                                grid.push((p, a));
                            }
                        }
                    }
                }
            }
        }
    }
    grid
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrossEngineReport {
    pub configs: usize,
    pub max_rel_diff: f64,
    pub worst: Option<(ChannelParams, f64)>,
    /// Configurations where an engine failed, with the reason.
    pub errors: Vec<String>,
}

impl CrossEngineReport {
    pub fn passed(&self) -> bool {
        self.configs > 0 && self.errors.is_empty() && self.max_rel_diff <= CROSS_ENGINE_TOL
    }
}

/// Quadrature against the closed form at every grid point.
pub fn cross_engine(grid: &[(ChannelParams, f64)]) -> CrossEngineReport {
    let mut ladders: HashMap<u64, LaguerreLadder> = HashMap::new();
    let mut errors = Vec::new();
    for &(_, a) in grid {
        if let std::collections::hash_map::Entry::Vacant(e) = ladders.entry(a.to_bits()) {
            match LaguerreLadder::new(a) {
                Ok(l) => {
                    e.insert(l);
                }
                Err(err) => errors.push(format!("A={a}: {err}")),
            }
        }
    }
    let outcomes: Vec<Result<f64, String>> = grid
        .par_iter()
        .map(|&(p, a)| {
            let ladder = ladders.get(&a.to_bits()).ok_or("no quadrature rule")?;
            let run = || -> fbrate_core::Result<f64> {
                let d = DerivedParams::derive(&p)?;
                let q = ladder.expectation(&p, &d, DEFAULT_REL_TOL)?;
                if !q.converged {
                    return Err(fbrate_core::Error::NoConvergence {
                        what: "effective-rate quadrature",
                        estimate: q.error,
                    });
                }
                let c = expectation_closed_form(&p, &expansion_for(&p, &d)?, a)?;
                Ok((q.value - c.value).abs() / c.value)
            };
            run().map_err(|e| format!("{p:?} A={a}: {e}"))
        })
        .collect();

    let mut max_rel_diff = 0.0;
    let mut worst = None;
    for (&(p, a), outcome) in grid.iter().zip(outcomes) {
        match outcome {
            Ok(d) if d > max_rel_diff || d.is_nan() => {
                max_rel_diff = if d.is_nan() { f64::INFINITY } else { d };
                worst = Some((p, a));
            }
            Ok(_) => {}
            Err(e) => errors.push(e),
        }
    }
    CrossEngineReport {
        configs: grid.len(),
        max_rel_diff,
        worst,
        errors,
    }
}

/// Forty integer-μ channels: the μ family at m = 1, two shadowing levels at
/// μ = 1, a mixed channel and the two unshadowed limits, each at five SNRs.
pub fn mc_grid() -> Vec<(ChannelParams, f64)> {
    let channels = [
        (2.0, 1.0, 1.0, 0.1, 0.1),
        (1.0, 1.0, 1.0, 0.1, 0.1),
        (4.0, 1.0, 1.0, 0.1, 0.1),
        (1.0, 0.5, 1.0, 0.1, 0.1),
        (1.0, 3.0, 1.0, 0.1, 0.1),
        (3.0, 2.0, 0.5, 0.5, 1.0),
        (1.0, 1e4, 0.0, 1.0, 1.0),
        (1.0, 1e4, 1.0, 1.0, 1.0),
    ];
    let mut grid = Vec::new();
    for &(mu, m, kappa, eta, rho2) in &channels {
        for &db in &DEFAULT_SNR_DB {
            grid.push((
                ChannelParams::new(mu, m, kappa, eta, rho2, db_to_linear(db)),
                2.0,
            ));
        }
    }
    grid
}

#[derive(Debug, Clone, PartialEq)]
pub struct McPoint {
    pub params: ChannelParams,
    pub a: f64,
    pub j_quad: f64,
    pub j_hat: f64,
    pub j_stderr: f64,
}

impl McPoint {
    pub fn z(&self) -> f64 {
        (self.j_hat - self.j_quad) / self.j_stderr
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct McReport {
    pub points: Vec<McPoint>,
    pub errors: Vec<String>,
}

impl McReport {
    pub fn within(&self) -> usize {
        self.points
            .iter()
            .filter(|p| p.z().abs() <= Z_LIMIT)
            .count()
    }

    pub fn max_abs_z(&self) -> f64 {
        self.points.iter().map(|p| p.z().abs()).fold(0.0, f64::max)
    }

    pub fn passed(&self) -> bool {
        !self.points.is_empty()
            && self.errors.is_empty()
            && self.within() as f64 >= Z_QUORUM * self.points.len() as f64
    }
}

/// Monte-Carlo estimates against quadrature.
pub fn mc_concordance(grid: &[(ChannelParams, f64)], config: &McConfig) -> McReport {
    let mut points = Vec::new();
    let mut errors = Vec::new();
    for &(p, a) in grid {
        let run = || -> fbrate_core::Result<McPoint> {
            let request =
                fbrate_core::ErRequest::new(p, a).with_method(fbrate_core::Method::Quadrature);
            let q = fbrate_core::er_auto(&request)?;
            let est = parallel::estimate_er(&p, a, config)?;
            Ok(McPoint {
                params: p,
                a,
                j_quad: q.expectation_j,
                j_hat: est.j_hat,
                j_stderr: est.j_stderr,
            })
        };
        match run() {
            Ok(pt) => points.push(pt),
            Err(e) => errors.push(format!("{p:?} A={a}: {e}")),
        }
    }
    McReport { points, errors }
}
