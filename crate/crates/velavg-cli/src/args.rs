//! Command-line flags and their application on top of a config file.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use velavg::harness::{StudyCheck, TheoremParams};

use crate::config::{parse_norm, Command, RunConfig, SymbolSpec};
use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "velavg", version, about = "Numerical checks of velocity averaging and dispersion estimates")]
pub struct Cli {
    #[command(subcommand)]
    pub sub: Sub,
}

#[derive(Debug, Subcommand)]
pub enum Sub {
    /// Energy identity for the Hilbert pair, or the sign-tensor chain for n ≥ 2.
    VerifyEnergy(Flags),
    /// Commutator identity for a smooth symbol.
    VerifyCommutator(Flags),
    /// Theorem ratios over a test family at several resolutions.
    Sweep(Flags),
    /// Log-log fits of free-streaming decay exponents.
    DispersionDecay(Flags),
    /// Finite-window Strichartz ratios.
    Strichartz(Flags),
    /// Parametrix reconstruction under quadrature refinement.
    ParametrixCheck(Flags),
    /// Renormalization limits and the mollifier commutator defect.
    RenormConvergence(Flags),
    /// Marcinkiewicz and Hörmander sums under scan-domain doubling.
    CriteriaScan(Flags),
    /// Bessel kernel mass, closed forms and exponential envelope.
    KernelCheck(Flags),
    /// Error of an identity across resolutions.
    ConvergenceStudy(Flags),
    /// Runs the command named in the config file.
    Run(Flags),
}

impl Sub {
    pub fn split(self) -> (Option<Command>, Flags) {
        match self {
            Sub::VerifyEnergy(f) => (Some(Command::VerifyEnergy), f),
            Sub::VerifyCommutator(f) => (Some(Command::VerifyCommutator), f),
            Sub::Sweep(f) => (Some(Command::Sweep), f),
            Sub::DispersionDecay(f) => (Some(Command::DispersionDecay), f),
            Sub::Strichartz(f) => (Some(Command::Strichartz), f),
            Sub::ParametrixCheck(f) => (Some(Command::ParametrixCheck), f),
            Sub::RenormConvergence(f) => (Some(Command::RenormConvergence), f),
            Sub::CriteriaScan(f) => (Some(Command::CriteriaScan), f),
            Sub::KernelCheck(f) => (Some(Command::KernelCheck), f),
            Sub::ConvergenceStudy(f) => (Some(Command::ConvergenceStudy), f),
            Sub::Run(f) => (None, f),
        }
    }
}

/// Accepts decimals, `inf` and fractions such as `4/3`.
fn exponent(s: &str) -> Result<f64, String> {
    let v = match s.split_once('/') {
        Some((a, b)) => {
            let a: f64 = a.trim().parse().map_err(|_| format!("'{s}' is not a number"))?;
            let b: f64 = b.trim().parse().map_err(|_| format!("'{s}' is not a number"))?;
            a / b
        }
        None => s.trim().parse().map_err(|_| format!("'{s}' is not a number"))?,
    };
    if v.is_nan() {
        return Err(format!("'{s}' is not a number"));
    }
    Ok(v)
}

#[derive(Debug, Args, Default)]
pub struct Flags {
    /// TOML config file; flags override its values.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Physical dimension.
    #[arg(long = "n")]
    pub n: Option<usize>,
    /// Points per axis in x and v.
    #[arg(long = "N")]
    pub points: Option<usize>,
    #[arg(long = "Nx")]
    pub points_x: Option<usize>,
    #[arg(long = "Nv")]
    pub points_v: Option<usize>,
    /// Half-width of the box in x and v.
    #[arg(long = "L", value_parser = exponent)]
    pub half_width: Option<f64>,
    #[arg(long = "Lx", value_parser = exponent)]
    pub half_width_x: Option<f64>,
    #[arg(long = "Lv", value_parser = exponent)]
    pub half_width_v: Option<f64>,
    /// Allow any even transform size.
    #[arg(long)]
    pub mixed_radix: bool,
    /// Test family, e.g. `gaussian:20`, `bump:4`, `oscillatory:8:2`.
    #[arg(long)]
    pub family: Option<String>,
    /// Family seed, at most 2^63 - 1 so it fits a TOML integer.
    #[arg(long, value_parser = clap::value_parser!(u64).range(..=i64::MAX as u64))]
    pub seed: Option<u64>,
    /// Theorem id, e.g. `result1`.
    #[arg(long)]
    pub theorem: Option<String>,
    /// Integrability exponent; repeat to sweep several.
    #[arg(long = "p", value_parser = exponent)]
    pub p: Vec<f64>,
    #[arg(long = "q", value_parser = exponent)]
    pub q: Option<f64>,
    /// Replace the left side by the H^σ norm.
    #[arg(long, value_parser = exponent)]
    pub sigma: Option<f64>,
    /// Symbol as `family[:key=value,...]`.
    #[arg(long)]
    pub symbol: Option<String>,
    /// Norm as `mixed-lebesgue:p=..,q=..`; repeatable (dispersion-decay).
    #[arg(long)]
    pub norm: Vec<String>,
    /// Comma-separated refinement levels (sweep, convergence-study).
    #[arg(long, value_delimiter = ',')]
    pub levels: Vec<usize>,
    /// Study check: energy-identity, round-trip, parametrix or commutator.
    #[arg(long)]
    pub check: Option<String>,
    /// Velocity padding of the energy check.
    #[arg(long)]
    pub padding: Option<usize>,
    /// Tolerance override `name=value`; repeatable.
    #[arg(long = "tol", value_name = "NAME=VALUE")]
    pub tol: Vec<String>,
    /// Write SVG plots.
    #[arg(long)]
    pub plots: bool,
    #[arg(long)]
    pub no_json: bool,
    #[arg(long)]
    pub no_csv: bool,
    /// Print the effective config as TOML and exit without computing.
    #[arg(long)]
    pub print_config: bool,
}

impl Flags {
    /// Loads the config file, if any, and applies the flags on top.
    pub fn resolve(&self, cmd: Option<Command>) -> Result<RunConfig, CliError> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
                RunConfig::from_toml(&text)?
            }
            None => RunConfig::default(),
        };
        if let Some(c) = cmd {
            cfg.command = Some(c);
        }
        let cmd = cfg.command()?;
        self.apply(&mut cfg, cmd)?;
        Ok(cfg)
    }

    fn apply(&self, cfg: &mut RunConfig, cmd: Command) -> Result<(), CliError> {
        if let Some(d) = &self.out {
            cfg.output.dir = d.clone();
        }
        cfg.output.plots |= self.plots;
        cfg.output.json &= !self.no_json;
        cfg.output.csv &= !self.no_csv;

        let g = &mut cfg.grid;
        if self.n.is_some() {
            g.n = self.n;
        }
        if let Some(m) = self.points {
            g.points_x = Some(m);
            g.points_v = Some(m);
        }
        g.points_x = self.points_x.or(g.points_x);
        g.points_v = self.points_v.or(g.points_v);
        if let Some(l) = self.half_width {
            g.half_width_x = Some(l);
            g.half_width_v = Some(l);
        }
        g.half_width_x = self.half_width_x.or(g.half_width_x);
        g.half_width_v = self.half_width_v.or(g.half_width_v);
        if self.mixed_radix {
            g.mixed_radix = Some(true);
        }
        let n = g.dims();

        if self.family.is_some() {
            cfg.family.spec = self.family.clone();
        }
        if self.seed.is_some() {
            cfg.family.seed = self.seed;
        }

        if self.theorem.is_some() {
            cfg.theorem.id = self.theorem.clone();
        }
        if !self.p.is_empty() {
            cfg.theorem.p_values = Some(self.p.clone());
        }
        if let Some(q) = self.q {
            let params = cfg.theorem.params.get_or_insert(TheoremParams { n, ..Default::default() });
            params.q = q;
        }
        if self.sigma.is_some() {
            cfg.theorem.lhs_sigma = self.sigma;
        }

        if let Some(s) = &self.symbol {
            cfg.symbol = Some(SymbolSpec::parse(s)?);
        }
        if !self.norm.is_empty() {
            if cmd != Command::DispersionDecay {
                return Err(CliError::config("--norm is read by dispersion-decay only"));
            }
            cfg.decay.norms = self.norm.iter().map(|s| parse_norm(s)).collect::<Result<_, _>>()?;
        }
        if !self.levels.is_empty() {
            match cmd {
                Command::Sweep => cfg.sweep.levels = Some(self.levels.clone()),
                Command::ConvergenceStudy => cfg.study.levels = self.levels.clone(),
                other => return Err(CliError::config(format!("--levels is not read by {}", other.name()))),
            }
        }
        if let Some(c) = &self.check {
            if cmd != Command::ConvergenceStudy {
                return Err(CliError::config("--check is read by convergence-study only"));
            }
            cfg.study.check = StudyCheck::parse(c)?;
        }
        if self.padding.is_some() {
            cfg.energy.padding = self.padding;
        }
        for t in &self.tol {
            cfg.tolerances.set(t)?;
        }
        Ok(())
    }
}
