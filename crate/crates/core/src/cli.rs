//! Command-line front end: `curve`, `roof` and `verify`.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::acceptance::{run_all, AcceptanceConfig};
use crate::channels::{evolve_analytic, evolve_numeric, ChannelKind, ChannelSpec};
use crate::convexroof::{roof_minimize, RoofSettings};
use crate::error::{Error, Result};
use crate::linalg::numerical_rank;
use crate::measures::tau3;
use crate::qsys::{DensityMatrix, InitialState};
use crate::separability::ppt_report;

pub const CSV_HEADER: &str = "kt,tau3_raw,tau3_normalized,rank,ppt_min";

/// How states along a curve are produced.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CurveMode {
    Analytic,
    /// RK4 with `k = 1`, so time and `kt` coincide.
    Numeric {
        dt: f64,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub state: InitialState,
    pub channel: ChannelKind,
    pub kt_max: f64,
    pub points: usize,
    pub mode: CurveMode,
    pub seed: u64,
    /// `None` writes to standard output.
    pub output_path: Option<PathBuf>,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.kt_max.is_finite() && self.kt_max > 0.0) {
            return Err(bad(
                "kt-max",
                format!("must be positive and finite, got {}", self.kt_max),
            ));
        }
        if self.points < 2 {
            return Err(bad(
                "points",
                format!("need at least 2, got {}", self.points),
            ));
        }
        if let CurveMode::Numeric { dt } = self.mode {
            if !(dt.is_finite() && dt > 0.0) {
                return Err(bad("dt", format!("must be positive and finite, got {dt}")));
            }
        }
        Ok(())
    }

    /// Inclusive uniform grid on `[0, kt_max]`.
    pub fn grid(&self) -> Vec<f64> {
        let last = (self.points - 1) as f64;
        (0..self.points)
            .map(|i| self.kt_max * i as f64 / last)
            .collect()
    }
}

fn bad(field: &'static str, message: String) -> Error {
    Error::BadConfig { field, message }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurveRow {
    pub kt: f64,
    pub tau3_raw: f64,
    pub tau3_normalized: f64,
    pub rank: usize,
    pub ppt_min: f64,
}

impl CurveRow {
    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{}",
            sig12(self.kt),
            sig12(self.tau3_raw),
            sig12(self.tau3_normalized),
            self.rank,
            sig12(self.ppt_min)
        )
    }
}

/// Twelve significant digits, `%g` style.
pub fn sig12(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs())
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// The evolved state at `kt` under `mode`.
pub fn evolve(
    state: InitialState,
    channel: ChannelKind,
    kt: f64,
    mode: CurveMode,
) -> Result<DensityMatrix> {
    match mode {
        CurveMode::Analytic => evolve_analytic(state, channel, kt),
        CurveMode::Numeric { dt } => {
            let spec = ChannelSpec::new(channel, 1.0)?;
            // points closer to the origin than one step get a single short step
            let step = if kt > 0.0 { dt.min(kt) } else { dt };
            evolve_numeric(&state.pure().density(), &spec, kt, step)
        }
    }
}

fn curve_row(config: &RunConfig, kt: f64) -> Result<CurveRow> {
    let rho = evolve(config.state, config.channel, kt, config.mode)?;
    let bound = tau3(&rho, config.state.into())?;
    Ok(CurveRow {
        kt,
        tau3_raw: bound.raw,
        tau3_normalized: bound.normalized,
        rank: numerical_rank(rho.matrix(), None)?,
        ppt_min: ppt_report(&rho)?.min_eigenvalue(),
    })
}

/// Rows for every grid point, in `kt` order.
pub fn compute_curve(config: &RunConfig) -> Result<Vec<CurveRow>> {
    config.validate()?;
    config
        .grid()
        .into_par_iter()
        .map(|kt| curve_row(config, kt))
        .collect()
}

pub fn render_curve(config: &RunConfig) -> Result<String> {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for row in compute_curve(config)? {
        out.push_str(&row.to_csv());
        out.push('\n');
    }
    Ok(out)
}

pub fn write_curve(config: &RunConfig, path: &Path) -> Result<()> {
    let text = render_curve(config)?;
    fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn cmd_curve(config: &RunConfig) -> Result<()> {
    match &config.output_path {
        Some(path) => write_curve(config, path),
        None => {
            let text = render_curve(config)?;
            std::io::stdout()
                .write_all(text.as_bytes())
                .map_err(|source| Error::Io {
                    path: PathBuf::from("<stdout>"),
                    source,
                })
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RoofRequest {
    pub state: InitialState,
    pub channel: ChannelKind,
    pub kt: f64,
    pub mode: CurveMode,
    pub restarts: usize,
    pub seed: u64,
    pub allow_rank8: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RoofReport {
    pub rank: usize,
    pub tau3_normalized: f64,
    pub roof_normalized: f64,
    pub restarts_used: usize,
    pub converged: bool,
}

impl RoofReport {
    pub fn difference(&self) -> f64 {
        self.roof_normalized - self.tau3_normalized
    }
}

pub fn cmd_roof(request: &RoofRequest) -> Result<RoofReport> {
    if !(request.kt.is_finite() && request.kt >= 0.0) {
        return Err(bad(
            "kt",
            format!("must be non-negative and finite, got {}", request.kt),
        ));
    }
    let rho = evolve(request.state, request.channel, request.kt, request.mode)?;
    let rank = numerical_rank(rho.matrix(), None)?;
    if rank > 4 && !request.allow_rank8 {
        return Err(Error::RankTooHigh { rank });
    }
    let family = request.state.into();
    let bound = tau3(&rho, family)?;
    let settings = RoofSettings {
        restarts: request.restarts,
        seed: request.seed,
        ..RoofSettings::default()
    };
    let roof = roof_minimize(&rho, family, &settings)?;
    Ok(RoofReport {
        rank,
        tau3_normalized: bound.normalized,
        roof_normalized: roof.value_normalized,
        restarts_used: roof.restarts_used,
        converged: roof.converged,
    })
}

#[derive(Parser, Debug)]
#[command(
    name = "decolab",
    version,
    about = "Three-qubit entanglement decay under Pauli and depolarizing noise"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Tabulate the bound, rank and PPT minimum along a kt grid as CSV.
    Curve(CurveArgs),
    /// Compare the bound with a numerical convex roof at one point.
    Roof(RoofArgs),
    /// Run every acceptance check and report pass/fail.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum StateArg {
    Ghz,
    W,
}

impl From<StateArg> for InitialState {
    fn from(s: StateArg) -> Self {
        match s {
            StateArg::Ghz => InitialState::Ghz,
            StateArg::W => InitialState::W,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ChannelArg {
    PauliZ,
    PauliX,
    PauliY,
    Depolarizing,
}

impl From<ChannelArg> for ChannelKind {
    fn from(c: ChannelArg) -> Self {
        match c {
            ChannelArg::PauliZ => ChannelKind::PauliZ,
            ChannelArg::PauliX => ChannelKind::PauliX,
            ChannelArg::PauliY => ChannelKind::PauliY,
            ChannelArg::Depolarizing => ChannelKind::Depolarizing,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ModeArg {
    Analytic,
    Numeric,
}

#[derive(Args, Debug)]
pub struct EvolutionArgs {
    #[arg(long, value_enum)]
    pub state: StateArg,
    #[arg(long, value_enum)]
    pub channel: ChannelArg,
    #[arg(long, value_enum, default_value = "analytic")]
    pub mode: ModeArg,
    /// RK4 step in units of 1/k (numeric mode only).
    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,
}

impl EvolutionArgs {
    fn mode(&self) -> CurveMode {
        match self.mode {
            ModeArg::Analytic => CurveMode::Analytic,
            ModeArg::Numeric => CurveMode::Numeric { dt: self.dt },
        }
    }
}

#[derive(Args, Debug)]
pub struct CurveArgs {
    #[command(flatten)]
    pub evolution: EvolutionArgs,
    #[arg(long, default_value_t = 1.5)]
    pub kt_max: f64,
    #[arg(long, default_value_t = 151)]
    pub points: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output CSV path; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl CurveArgs {
    pub fn to_config(&self) -> RunConfig {
        RunConfig {
            state: self.evolution.state.into(),
            channel: self.evolution.channel.into(),
            kt_max: self.kt_max,
            points: self.points,
            mode: self.evolution.mode(),
            seed: self.seed,
            output_path: self.out.clone(),
        }
    }
}

#[derive(Args, Debug)]
pub struct RoofArgs {
    #[command(flatten)]
    pub evolution: EvolutionArgs,
    #[arg(long)]
    pub kt: f64,
    #[arg(long, default_value_t = 32)]
    pub restarts: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Permit full-rank states (slow, exploratory).
    #[arg(long)]
    pub allow_rank8: bool,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// RK4 step used by the integrator check.
    #[arg(long, default_value_t = AcceptanceConfig::default().dt)]
    pub dt: f64,
    #[arg(long, default_value_t = AcceptanceConfig::default().seed)]
    pub seed: u64,
    #[arg(long, default_value_t = AcceptanceConfig::default().restarts)]
    pub restarts: usize,
}

/// Applies `DECOLAB_THREADS` to the global rayon pool; 0 or unset means automatic.
pub fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var("DECOLAB_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw.trim().parse().map_err(|_| {
        bad(
            "DECOLAB_THREADS",
            format!("expected a non-negative integer, got `{raw}`"),
        )
    })?;
    if threads > 0 {
        // a second initialization in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode> {
    configure_threads()?;
    match cli.command {
        Command::Curve(args) => {
            cmd_curve(&args.to_config())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Roof(args) => {
            let request = RoofRequest {
                state: args.evolution.state.into(),
                channel: args.evolution.channel.into(),
                kt: args.kt,
                mode: args.evolution.mode(),
                restarts: args.restarts,
                seed: args.seed,
                allow_rank8: args.allow_rank8,
            };
            let report = cmd_roof(&request)?;
            println!("rank        {}", report.rank);
            println!("tau3        {}", sig12(report.tau3_normalized));
            println!("roof        {}", sig12(report.roof_normalized));
            println!("difference  {}", sig12(report.difference()));
            println!("restarts    {}", report.restarts_used);
            println!("converged   {}", report.converged);
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify(args) => {
            let config = AcceptanceConfig {
                dt: args.dt,
                seed: args.seed,
                restarts: args.restarts,
            };
            let outcomes = run_all(&config);
            for o in &outcomes {
                println!("{o}");
            }
            let failed = outcomes.iter().filter(|o| !o.passed).count();
            println!(
                "{} of {} checks passed",
                outcomes.len() - failed,
                outcomes.len()
            );
            Ok(if failed == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
    }
}

/// Entry point used by the binary.
pub fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
