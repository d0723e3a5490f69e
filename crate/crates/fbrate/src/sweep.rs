use std::str::FromStr;

use fbrate_core::mc::McConfig;
use fbrate_core::{er_auto, ChannelParams, ErRequest, ErResult, Method};
use rayon::prelude::*;

use crate::error::{CliError, Result};
use crate::format::RateRow;
use crate::parallel;

/// Largest number of grid points a sweep may have.
pub const MAX_GRID: usize = 100_000;

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// `start:stop:step`, or a single value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Range {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Range {
    pub fn single(x: f64) -> Self {
        Self {
            start: x,
            stop: x,
            step: 1.0,
        }
    }

    pub fn len(&self) -> usize {
        ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.len())
            .map(|k| self.start + k as f64 * self.step)
            .collect()
    }
}

impl FromStr for Range {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        let num = |t: &str| {
            t.trim()
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| CliError::usage(format!("invalid number '{t}' in range '{s}'")))
        };
        let parts: Vec<&str> = s.split(':').collect();
        let range = match parts.as_slice() {
            [x] => Self::single(num(x)?),
            [a, b, c] => Self {
                start: num(a)?,
                stop: num(b)?,
                step: num(c)?,
            },
            _ => {
                return Err(CliError::usage(format!(
                    "range '{s}' is not start:stop:step"
                )))
            }
        };
        if range.step.is_nan() || range.step <= 0.0 {
            return Err(CliError::usage(format!(
                "range '{s}' needs a positive step"
            )));
        }
        if range.start > range.stop {
            return Err(CliError::usage(format!("range '{s}' has start > stop")));
        }
        if (range.stop - range.start) / range.step >= MAX_GRID as f64 {
            return Err(CliError::usage(format!(
                "range '{s}' has more than {MAX_GRID} points"
            )));
        }
        Ok(range)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Mu,
    M,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::Mu => "mu",
            Axis::M => "m",
        }
    }
}

/// Second sweep axis, e.g. `mu=1,2,4`.
#[derive(Debug, Clone, PartialEq)]
pub struct Vary {
    pub axis: Axis,
    pub values: Vec<f64>,
}

impl FromStr for Vary {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        let (name, list) = s
            .split_once('=')
            .ok_or_else(|| CliError::usage(format!("--vary expects mu=... or m=..., got '{s}'")))?;
        let axis = match name.trim() {
            "mu" => Axis::Mu,
            "m" => Axis::M,
            other => return Err(CliError::usage(format!("cannot vary '{other}' (mu or m)"))),
        };
        let mut values = list
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|_| CliError::usage(format!("invalid --vary value '{t}'")))
            })
            .collect::<Result<Vec<_>>>()?;
        values.sort_by(f64::total_cmp);
        values.dedup();
        Ok(Self { axis, values })
    }
}

/// The grid swept by `er`: SNR in dB, optionally crossed with `vary`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub snr_db: Range,
    pub vary: Option<Vary>,
}

impl SweepSpec {
    /// `(snr_db, vary value)` in output order.
    pub fn points(&self) -> Result<Vec<(f64, Option<f64>)>> {
        let snrs = self.snr_db.points();
        let out: Vec<_> = match &self.vary {
            None => snrs.into_iter().map(|s| (s, None)).collect(),
            Some(v) => snrs
                .iter()
                .flat_map(|&s| v.values.iter().map(move |&x| (s, Some(x))))
                .collect(),
        };
        if out.len() > MAX_GRID {
            return Err(CliError::usage(format!(
                "sweep has more than {MAX_GRID} points"
            )));
        }
        Ok(out)
    }
}

/// Everything but the channel needed to evaluate one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalSettings {
    pub a_exponent: f64,
    pub method: Method,
    pub rel_tol: f64,
    pub large_m: f64,
    pub mc: McConfig,
}

/// One point; Monte-Carlo runs its chunks on the rayon pool.
pub fn evaluate(params: ChannelParams, settings: &EvalSettings) -> fbrate_core::Result<ErResult> {
    let request = ErRequest {
        params,
        a_exponent: settings.a_exponent,
        method: settings.method,
        rel_tol: settings.rel_tol,
        large_m: settings.large_m,
        mc: settings.mc,
        qos: None,
    };
    request.validate()?;
    if settings.method == Method::MonteCarlo {
        let est = parallel::estimate_er(&params, settings.a_exponent, &settings.mc)?;
        fbrate_core::rate::monte_carlo_result(&request, &est)
    } else {
        er_auto(&request)
    }
}

/// Evaluates every sweep point in parallel; rows come back in grid order.
///
/// `channel(snr_db, vary)` builds the parameters of one point.
pub fn run_sweep<F>(spec: &SweepSpec, settings: &EvalSettings, channel: F) -> Result<Vec<RateRow>>
where
    F: Fn(f64, Option<f64>) -> Result<ChannelParams> + Sync,
{
    spec.points()?
        .into_par_iter()
        .map(|(snr_db, vary)| {
            let params = channel(snr_db, vary)?;
            let r = evaluate(params, settings).map_err(|e| {
                let mut at = format!("snr_db={snr_db}");
                if let (Some(v), Some(axis)) = (vary, spec.vary.as_ref()) {
                    at.push_str(&format!(" {}={v}", axis.axis.name()));
                }
                CliError::model(format!("{at} ({params:?})"), e)
            })?;
            Ok(RateRow {
                snr_db,
                vary,
                rate: r.rate,
                j: r.expectation_j,
                method: r.method_used.name(),
                err: r.error_estimate,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn range_parsing() {
        let r: Range = "-10:30:10".parse().unwrap();
        assert_eq!(r.points(), vec![-10.0, 0.0, 10.0, 20.0, 30.0]);
        assert_eq!("0:0:1".parse::<Range>().unwrap().points(), vec![0.0]);
        assert_eq!("5".parse::<Range>().unwrap().points(), vec![5.0]);
        assert_eq!("0:1:0.1".parse::<Range>().unwrap().len(), 11);
        for bad in [
            "1:0:1",
            "0:1:0",
            "0:1:-1",
            "a:1:1",
            "0:1",
            "0:1e9:1e-3",
            "0:inf:1",
        ] {
            assert!(bad.parse::<Range>().is_err(), "{bad}");
        }
    }

    #[test]
    fn vary_parsing() {
        let v: Vary = "mu=4,1, 2".parse().unwrap();
        assert_eq!(v.axis, Axis::Mu);
        assert_eq!(v.values, vec![1.0, 2.0, 4.0]);
        assert!("kappa=1".parse::<Vary>().is_err());
        assert!("m=1,x".parse::<Vary>().is_err());
        assert!("m".parse::<Vary>().is_err());
    }

    #[test]
    fn db_round_trip() {
        for k in -400..=400 {
            let db = k as f64 * 0.1;
            assert!((linear_to_db(db_to_linear(db)) - db).abs() <= 1e-12 * db.abs().max(1.0));
        }
    }

    #[test]
    fn sweep_order() {
        let spec = SweepSpec {
            snr_db: "0:10:10".parse().unwrap(),
            vary: Some("m=3,1".parse().unwrap()),
        };
        assert_eq!(
            spec.points().unwrap(),
            vec![
                (0.0, Some(1.0)),
                (0.0, Some(3.0)),
                (10.0, Some(1.0)),
                (10.0, Some(3.0))
            ]
        );
    }
}
