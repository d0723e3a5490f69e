use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fbrate_core::mc::McConfig;
use fbrate_core::poles::{expansion_for, pdf};
use fbrate_core::rate::{QosTriple, DEFAULT_REL_TOL};
use fbrate_core::{mgf, preset, ChannelParams, DerivedParams, Method, Overrides, Preset};
use serde_json::json;

use crate::error::{CliError, Result};
use crate::format::{csv_num, sig, write_point_rows, write_rate_rows, Format, PointRow};
use crate::sweep::{db_to_linear, run_sweep, Axis, EvalSettings, Range, SweepSpec, Vary};
use crate::validate;

/// Environment variable holding the default Monte-Carlo seed.
pub const SEED_ENV: &str = "FBRATE_SEED";

#[derive(Debug, Parser)]
#[command(
    name = "fbrate",
    version,
    about = "Effective rate over Fluctuating Beckmann fading channels"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Effective rate over an SNR sweep.
    #[command(allow_negative_numbers = true)]
    Er(ErArgs),
    /// MGF of the SNR on a grid of s.
    #[command(allow_negative_numbers = true)]
    Mgf(MgfArgs),
    /// SNR density on a grid of γ (integer m, even μ).
    #[command(allow_negative_numbers = true)]
    Pdf(PdfArgs),
    /// Monte-Carlo against quadrature for one channel.
    #[command(allow_negative_numbers = true)]
    McValidate(McValidateArgs),
    /// Cross-method checks over the reference grids.
    #[command(allow_negative_numbers = true)]
    Validate(ValidateArgs),
}

/// Channel parameters, given directly or through a preset.
#[derive(Debug, Clone, Args)]
pub struct ChannelArgs {
    /// rayleigh, nakagami-m, rician, kappa-mu, eta-mu, kappa-mu-shadowed or beckmann
    #[arg(long)]
    pub preset: Option<String>,
    /// Number of multipath clusters μ
    #[arg(long)]
    pub mu: Option<f64>,
    /// Shadowing severity m ("inf" for none)
    #[arg(long)]
    pub m: Option<f64>,
    /// Ratio κ of line-of-sight to scattered power
    #[arg(long)]
    pub kappa: Option<f64>,
    /// In-phase to quadrature scattered power ratio η
    #[arg(long)]
    pub eta: Option<f64>,
    /// In-phase to quadrature line-of-sight power ratio ϱ²
    #[arg(long)]
    pub rho2: Option<f64>,
}

impl ChannelArgs {
    pub fn build(&self, gamma_bar: f64, vary: Option<(Axis, f64)>) -> Result<ChannelParams> {
        let mut mu = self.mu;
        let mut m = self.m;
        match vary {
            Some((Axis::Mu, v)) => mu = Some(v),
            Some((Axis::M, v)) => m = Some(v),
            None => {}
        }
        let params = match &self.preset {
            Some(name) => {
                let which: Preset = name.parse().map_err(|e| CliError::model("--preset", e))?;
                let overrides = Overrides {
                    mu,
                    m,
                    kappa: self.kappa,
                    eta: self.eta,
                    rho2: self.rho2,
                    gamma_bar: Some(gamma_bar),
                };
                preset(which, overrides).map_err(|e| CliError::model("--preset", e))?
            }
            None => {
                let need = |v: Option<f64>, flag: &str| {
                    v.ok_or_else(|| {
                        CliError::usage(format!("--{flag} is required without --preset"))
                    })
                };
                ChannelParams::new(
                    need(mu, "mu")?,
                    need(m, "m")?,
                    need(self.kappa, "kappa")?,
                    need(self.eta, "eta")?,
                    need(self.rho2, "rho2")?,
                    gamma_bar,
                )
            }
        };
        params
            .validate()
            .map_err(|e| CliError::model("channel", e))?;
        Ok(params)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Auto,
    Quadrature,
    Closed,
    Mc,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Auto => Method::Auto,
            MethodArg::Quadrature => Method::Quadrature,
            MethodArg::Closed => Method::ClosedForm,
            MethodArg::Mc => Method::MonteCarlo,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct ErArgs {
    #[command(flatten)]
    pub channel: ChannelArgs,
    /// Delay exponent A
    #[arg(long = "A", conflicts_with_all = ["theta", "block_time", "bandwidth"])]
    pub a: Option<f64>,
    /// QoS exponent θ (1/bit); with --T and --B sets A = θTB/ln 2
    #[arg(long, requires_all = ["block_time", "bandwidth"])]
    pub theta: Option<f64>,
    /// Block duration T (s)
    #[arg(long = "T", requires = "theta")]
    pub block_time: Option<f64>,
    /// Bandwidth B (Hz)
    #[arg(long = "B", requires = "theta")]
    pub bandwidth: Option<f64>,
    /// Average SNR in dB, start:stop:step or a single value
    #[arg(long = "snr-db", default_value = "0", allow_hyphen_values = true)]
    pub snr_db: String,
    /// Second axis, e.g. mu=1,2,4 or m=0.5,1,3
    #[arg(long)]
    pub vary: Option<String>,
    #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
    pub method: MethodArg,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[command(flatten)]
    pub mc: McArgs,
    /// Relative tolerance of the quadrature
    #[arg(long, default_value_t = DEFAULT_REL_TOL)]
    pub rel_tol: f64,
    /// Finite m standing in for m = ∞
    #[arg(long, default_value_t = fbrate_core::params::DEFAULT_LARGE_M)]
    pub large_m: f64,
    /// Write to this file instead of standard output
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct McArgs {
    /// Monte-Carlo seed
    #[arg(long, env = SEED_ENV, default_value_t = 42)]
    pub seed: u64,
    /// Monte-Carlo sample count
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: u64,
    /// Samples per independent random stream
    #[arg(long, default_value_t = fbrate_core::mc::DEFAULT_CHUNK_SIZE)]
    pub chunk_size: u64,
}

impl McArgs {
    fn config(&self) -> McConfig {
        McConfig {
            n_samples: self.samples,
            seed: self.seed,
            chunk_size: self.chunk_size,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct MgfArgs {
    #[command(flatten)]
    pub channel: ChannelArgs,
    /// Average SNR in dB
    #[arg(long = "snr-db", default_value_t = 0.0, allow_hyphen_values = true)]
    pub snr_db: f64,
    /// Grid of s, start:stop:step
    #[arg(long, default_value = "0:10:0.1", allow_hyphen_values = true)]
    pub s: String,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct PdfArgs {
    #[command(flatten)]
    pub channel: ChannelArgs,
    /// Average SNR in dB
    #[arg(long = "snr-db", default_value_t = 0.0, allow_hyphen_values = true)]
    pub snr_db: f64,
    /// Grid of γ, start:stop:step
    #[arg(long, default_value = "0:20:0.01", allow_hyphen_values = true)]
    pub gamma: String,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct McValidateArgs {
    #[command(flatten)]
    pub channel: ChannelArgs,
    #[arg(long = "A", default_value_t = 2.0)]
    pub a: f64,
    #[arg(
        long = "snr-db",
        default_value = "-10:30:10",
        allow_hyphen_values = true
    )]
    pub snr_db: String,
    #[command(flatten)]
    pub mc: McArgs,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct ValidateArgs {
    /// Comma-separated SNRs (dB) of the cross-method grid
    #[arg(
        long = "snr-db",
        default_value = "-10,0,10,20,30",
        allow_hyphen_values = true
    )]
    pub snr_db: String,
    /// Comma-separated delay exponents of the cross-method grid
    #[arg(long = "A", default_value = "0.5,1,2,5")]
    pub a: String,
    /// Skip the Monte-Carlo part
    #[arg(long)]
    pub skip_mc: bool,
    #[command(flatten)]
    pub mc: McArgs,
}

fn sink(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn parse_list(s: &str, flag: &str) -> Result<Vec<f64>> {
    let values = s
        .split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| CliError::usage(format!("invalid {flag} value '{t}'")))
        })
        .collect::<Result<Vec<_>>>()?;
    if values.is_empty() {
        return Err(CliError::usage(format!("{flag} is empty")));
    }
    Ok(values)
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Er(args) => cmd_er(&args),
        Command::Mgf(args) => cmd_mgf(&args),
        Command::Pdf(args) => cmd_pdf(&args),
        Command::McValidate(args) => cmd_mc_validate(&args),
        Command::Validate(args) => cmd_validate(&args),
    }
}

pub fn cmd_er(args: &ErArgs) -> Result<()> {
    let mut comments = Vec::new();
    let a = match (args.a, args.theta) {
        (Some(a), _) => a,
        (None, Some(theta)) => {
            let qos = QosTriple {
                theta,
                block_time: args.block_time.unwrap_or_default(),
                bandwidth: args.bandwidth.unwrap_or_default(),
            };
            let a = qos.a_exponent();
            comments.push(format!(
                "theta={} T={} B={} A={}",
                sig(qos.theta, 9),
                sig(qos.block_time, 9),
                sig(qos.bandwidth, 9),
                sig(a, 9)
            ));
            a
        }
        (None, None) => return Err(CliError::usage("give --A or --theta/--T/--B")),
    };
    let spec = SweepSpec {
        snr_db: args.snr_db.parse()?,
        vary: args.vary.as_deref().map(str::parse::<Vary>).transpose()?,
    };
    let settings = EvalSettings {
        a_exponent: a,
        method: args.method.into(),
        rel_tol: args.rel_tol,
        large_m: args.large_m,
        mc: args.mc.config(),
    };
    let axis = spec.vary.as_ref().map(|v| v.axis);
    let rows = run_sweep(&spec, &settings, |snr_db, v| {
        args.channel.build(db_to_linear(snr_db), axis.zip(v))
    })?;
    let mut out = sink(&args.output)?;
    write_rate_rows(&mut out, &rows, args.format, &comments)?;
    out.flush()?;
    Ok(())
}

pub fn cmd_mgf(args: &MgfArgs) -> Result<()> {
    let params = args.channel.build(db_to_linear(args.snr_db), None)?;
    let grid: Range = args.s.parse()?;
    let resolved = params.resolve_shadowing(fbrate_core::params::DEFAULT_LARGE_M);
    let derived = DerivedParams::derive(&resolved).map_err(|e| CliError::model("mgf", e))?;
    let rows: Vec<PointRow> = grid
        .points()
        .into_iter()
        .map(|s| PointRow {
            x: s,
            value: mgf(&resolved, &derived, s).value,
        })
        .collect();
    let mut out = sink(&args.output)?;
    write_point_rows(&mut out, &rows, args.format, "s", "mgf")?;
    out.flush()?;
    Ok(())
}

pub fn cmd_pdf(args: &PdfArgs) -> Result<()> {
    let params = args.channel.build(db_to_linear(args.snr_db), None)?;
    let grid: Range = args.gamma.parse()?;
    let context = format!("pdf ({params:?})");
    let derived = DerivedParams::derive(&params).map_err(|e| CliError::model(&context, e))?;
    let expansion = expansion_for(&params, &derived).map_err(|e| CliError::model(&context, e))?;
    let rows = grid
        .points()
        .into_iter()
        .map(|g| {
            pdf(&params, &expansion, g)
                .map(|value| PointRow { x: g, value })
                .map_err(|e| CliError::model(&context, e))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out = sink(&args.output)?;
    write_point_rows(&mut out, &rows, args.format, "gamma", "pdf")?;
    out.flush()?;
    Ok(())
}

pub fn cmd_mc_validate(args: &McValidateArgs) -> Result<()> {
    let range: Range = args.snr_db.parse()?;
    let grid = range
        .points()
        .into_iter()
        .map(|db| Ok((args.channel.build(db_to_linear(db), None)?, args.a)))
        .collect::<Result<Vec<_>>>()?;
    let report = validate::mc_concordance(&grid, &args.mc.config());
    if let Some(e) = report.errors.first() {
        return Err(CliError::usage(format!("Monte-Carlo validation: {e}")));
    }
    let mut out = io::stdout().lock();
    if args.format == Format::Csv {
        writeln!(out, "snr_db,j_quad,j_mc,stderr,z")?;
    }
    for (db, p) in range.points().into_iter().zip(&report.points) {
        match args.format {
            Format::Csv => writeln!(
                out,
                "{},{},{},{},{}",
                csv_num(db),
                csv_num(p.j_quad),
                csv_num(p.j_hat),
                csv_num(p.j_stderr),
                csv_num(p.z())
            )?,
            Format::Jsonl => writeln!(
                out,
                "{}",
                json!({"snr_db": db, "j_quad": p.j_quad, "j_mc": p.j_hat, "stderr": p.j_stderr, "z": p.z()})
            )?,
        }
    }
    out.flush()?;
    let outside = report.points.len() - report.within();
    if outside > 0 {
        return Err(CliError::CheckFailed(format!(
            "{outside} of {} points have |z| > {}",
            report.points.len(),
            validate::Z_LIMIT
        )));
    }
    Ok(())
}

pub fn cmd_validate(args: &ValidateArgs) -> Result<()> {
    let snrs = parse_list(&args.snr_db, "--snr-db")?;
    let a_values = parse_list(&args.a, "--A")?;
    let grid = validate::cross_engine_grid(&snrs, &a_values);
    let cross = validate::cross_engine(&grid);
    let mut out = io::stdout().lock();
    let mut failed = Vec::new();

    writeln!(out, "cross-method grid: {} configurations", cross.configs)?;
    for e in &cross.errors {
        writeln!(out, "  error: {e}")?;
    }
    let verdict = if cross.passed() { "PASS" } else { "FAIL" };
    writeln!(
        out,
        "{verdict} max quad/closed rel diff {} ≤ {}",
        sig(cross.max_rel_diff, 3),
        validate::CROSS_ENGINE_TOL
    )?;
    if let (false, Some((p, a))) = (cross.passed(), cross.worst) {
        writeln!(out, "  worst: {p:?} A={a}")?;
    }
    if !cross.passed() {
        failed.push("cross-method");
    }

    if !args.skip_mc {
        let config = args.mc.config();
        let mc = validate::mc_concordance(&validate::mc_grid(), &config);
        writeln!(
            out,
            "monte-carlo grid: {} points, seed {}, {} samples",
            mc.points.len(),
            config.seed,
            config.n_samples
        )?;
        for e in &mc.errors {
            writeln!(out, "  error: {e}")?;
        }
        let outside = mc.points.len() - mc.within();
        let verdict = if mc.passed() { "PASS" } else { "FAIL" };
        if outside == 0 {
            writeln!(
                out,
                "{verdict} all |z| ≤ {} (max {})",
                validate::Z_LIMIT,
                sig(mc.max_abs_z(), 3)
            )?;
        } else {
            writeln!(
                out,
                "{verdict} {outside} of {} points with |z| > {}",
                mc.points.len(),
                validate::Z_LIMIT
            )?;
        }
        if !mc.passed() {
            failed.push("monte-carlo");
        }
    }
    out.flush()?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::CheckFailed(failed.join(", ")))
    }
}
