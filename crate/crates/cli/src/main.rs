use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use qfed::fixtures::{self, Emitter};
use qfed::verify::{canonical_battery, BatterySpec};
use qfed::PhysicalConstants;
use qfed_cli::config::{cavity_config, parse_config, NumericOptions, Quantity, RunConfig};
use qfed_cli::sweep::{report_table, run_sweep, SweepOutput};
use qfed_cli::table::{emit, Format, Meta};

/// Thermal photon densities, fluxes and identity checks for planar stacks.
#[derive(Debug, Parser)]
#[command(name = "qfed", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    global: Global,
}

#[derive(Debug, Args)]
struct Global {
    /// Output encoding.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "QFED_WORKERS")]
    workers: Option<usize>,
    /// Loss floor added to lossless leads; overrides the config.
    #[arg(long, global = true)]
    delta: Option<f64>,
    /// Relative quadrature tolerance; overrides the config.
    #[arg(long, global = true)]
    quad_tol: Option<f64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate the quantity named in a config file over its grid.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run the identity checks on a config's stack, or on the built-in
    /// fixtures when no config is given. Exits 1 if any check fails.
    Verify {
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Print the cavity fixture as a config file.
    Fixtures {
        #[arg(long, value_enum, default_value_t = EmitterArg::Magnetic)]
        emitter: EmitterArg,
        #[arg(long, value_enum, default_value_t = Quantity::Ldos)]
        quantity: Quantity,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum EmitterArg {
    Empty,
    Electric,
    Magnetic,
}

impl From<EmitterArg> for Emitter {
    fn from(e: EmitterArg) -> Self {
        match e {
            EmitterArg::Empty => Emitter::Empty,
            EmitterArg::Electric => Emitter::Electric,
            EmitterArg::Magnetic => Emitter::Magnetic,
        }
    }
}

impl Global {
    fn apply(&self, opts: &mut NumericOptions) {
        if let Some(d) = self.delta {
            opts.delta = d;
        }
        if let Some(t) = self.quad_tol {
            opts.quad_tol = t;
        }
    }
}

fn load(path: &Path, global: &Global) -> Result<RunConfig> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut cfg = parse_config(&text).with_context(|| format!("in {}", path.display()))?;
    global.apply(&mut cfg.options);
    cfg.validate()?;
    Ok(cfg)
}

fn write_out(bytes: &[u8], out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => fs::write(p, bytes).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(bytes)?;
            Ok(stdout.flush()?)
        }
    }
}

fn verify(config: Option<&Path>, global: &Global) -> Result<SweepOutput> {
    match config {
        Some(p) => {
            let mut cfg = load(p, global)?;
            cfg.quantity = Quantity::Verify;
            run_sweep(&cfg)
        }
        None => {
            let mut opts = NumericOptions::default();
            global.apply(&mut opts);
            let consts = PhysicalConstants::default();
            let spec = BatterySpec::default();
            let reports = canonical_battery(&consts, opts.integration(), &spec)?;
            let desc = format!("canonical fixtures, delta = {}, quad_tol = {}", opts.delta, opts.quad_tol);
            let meta = Meta::new("verify", &desc, consts);
            report_table(meta, &[(fixtures::CAVITY_PHOTON_ENERGY_EV, reports)])
        }
    }
}

fn execute(cli: &Cli) -> Result<usize> {
    let g = &cli.global;
    let output = match &cli.command {
        Command::Run { config } => run_sweep(&load(config, g)?)?,
        Command::Verify { config } => verify(config.as_deref(), g)?,
        Command::Fixtures { emitter, quantity } => {
            let mut cfg = cavity_config((*emitter).into(), *quantity);
            g.apply(&mut cfg.options);
            write_out(cfg.to_toml()?.as_bytes(), g.out.as_deref())?;
            return Ok(0);
        }
    };
    write_out(&emit(&output.table, g.format)?, g.out.as_deref())?;
    Ok(output.failed_checks)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.global.workers {
        pool = pool.num_threads(n);
    }
    let result = pool
        .build()
        .context("building worker pool")
        .and_then(|pool| pool.install(|| execute(&cli)));
    match result {
        Ok(0) => ExitCode::SUCCESS,
        Ok(n) => {
            eprintln!("{n} identity check(s) failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
