mod commands;
mod config;
mod table;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use borromean_core::Error;
use clap::{Args, Parser, Subcommand};

use config::{
    CurveConfig, Format, Grid, MassSweepConfig, Range, RunConfig, Solver, SpectrumConfig, TwoBodyConfig,
    WavefunctionConfig, WindowConfig,
};

#[derive(Debug)]
pub struct UsageError(pub String);

const EXIT_USAGE: u8 = 2;
const EXIT_CONVERGENCE: u8 = 3;
const EXIT_DOMAIN: u8 = 4;

#[derive(Parser, Debug)]
#[command(name = "borromean", version, about = "Three-body bound states with a separable double-delta pair interaction")]
struct Cli {
    /// JSON run config; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Print the resolved config and exit.
    #[arg(long, global = true)]
    print_config: bool,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write the table here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Two-body roots, region and threshold-line asymptotics.
    Twobody(TwoBodyArgs),
    /// Three-body bound states at one parameter point.
    Spectrum(SpectrumArgs),
    /// Spectrum as a function of alpha.
    Curve(CurveArgs),
    /// Position-space wave function and its geometry.
    Wavefunction(WavefunctionArgs),
    /// Borromean window edges alpha_c and alpha_w over v0.
    Window(WindowArgs),
    /// Borromean states just above alpha_c across mass ratios.
    MassSweep(MassSweepArgs),
}

#[derive(Args, Debug, Default)]
struct GridArgs {
    #[arg(long)]
    n_points: Option<usize>,
    #[arg(long)]
    map_scale: Option<f64>,
}

impl GridArgs {
    fn apply(&self, g: &mut Grid) {
        set(&mut g.n_points, self.n_points);
        set(&mut g.map_scale, self.map_scale);
    }
}

#[derive(Args, Debug, Default)]
struct SolverArgs {
    /// Relative tolerance of the energy roots.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    search_floor: Option<f64>,
    #[arg(long)]
    samples_per_decade: Option<usize>,
}

impl SolverArgs {
    fn apply(&self, s: &mut Solver) {
        set(&mut s.energy_rtol, self.tol);
        if self.search_floor.is_some() {
            s.search_floor = self.search_floor;
        }
        set(&mut s.samples_per_decade, self.samples_per_decade);
    }
}

#[derive(Args, Debug)]
struct TwoBodyArgs {
    #[arg(long)]
    v0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<f64>,
    /// Residual tolerance of the roots.
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Args, Debug)]
struct SpectrumArgs {
    #[arg(long)]
    v0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<f64>,
    #[arg(long)]
    mass_ratio: Option<f64>,
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Args, Debug)]
struct CurveArgs {
    #[arg(long)]
    v0: Option<f64>,
    #[arg(long)]
    mass_ratio: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    alpha_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    alpha_max: Option<f64>,
    #[arg(long)]
    alpha_steps: Option<usize>,
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Args, Debug)]
struct WavefunctionArgs {
    #[arg(long)]
    v0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<f64>,
    #[arg(long)]
    mass_ratio: Option<f64>,
    /// Bound-state index, 0 for the ground state.
    #[arg(long)]
    state: Option<usize>,
    /// Momentum half-width of the sampled window.
    #[arg(long)]
    window: Option<f64>,
    /// Multiplier on the automatic position spans.
    #[arg(long)]
    span_scale: Option<f64>,
    /// Zero-padding factor of the Fourier transform.
    #[arg(long)]
    resolution: Option<usize>,
    /// Write the position-space grid here (plus a `.json` sidecar).
    #[arg(long)]
    dump: Option<PathBuf>,
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Args, Debug)]
struct WindowArgs {
    /// Single coupling; shorthand for equal min and max.
    #[arg(long, conflicts_with_all = ["v0_min", "v0_max", "v0_steps"])]
    v0: Option<f64>,
    #[arg(long)]
    v0_min: Option<f64>,
    #[arg(long)]
    v0_max: Option<f64>,
    #[arg(long)]
    v0_steps: Option<usize>,
    #[arg(long)]
    mass_ratio: Option<f64>,
    /// Relative offset above alpha_c where the search starts.
    #[arg(long)]
    alpha_offset: Option<f64>,
    #[arg(long)]
    alpha_tol: Option<f64>,
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Args, Debug)]
struct MassSweepArgs {
    #[arg(long)]
    v0: Option<f64>,
    /// Comma-separated list.
    #[arg(long = "mass-ratio", value_delimiter = ',')]
    mass_ratios: Vec<f64>,
    /// alpha = alpha_c (1 + offset).
    #[arg(long)]
    alpha_offset: Option<f64>,
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    solver: SolverArgs,
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

fn base<T: Default>(file: Option<RunConfig>, pick: impl Fn(RunConfig) -> Option<T>, name: &str) -> Result<T, UsageError> {
    match file {
        None => Ok(T::default()),
        Some(cfg) => {
            let found = cfg.name();
            pick(cfg).ok_or_else(|| UsageError(format!("config file is for `{found}`, not `{name}`")))
        }
    }
}

fn resolve(cli: &Cli) -> Result<RunConfig, UsageError> {
    let file = cli.config.as_deref().map(RunConfig::load).transpose()?;
    let mut cfg = match &cli.command {
        Command::Twobody(a) => {
            let mut c: TwoBodyConfig = base(file, |c| match c { RunConfig::Twobody(c) => Some(c), _ => None }, "twobody")?;
            set(&mut c.v0, a.v0);
            set(&mut c.alpha, a.alpha);
            set(&mut c.tol, a.tol);
            RunConfig::Twobody(c)
        }
        Command::Spectrum(a) => {
            let mut c: SpectrumConfig = base(file, |c| match c { RunConfig::Spectrum(c) => Some(c), _ => None }, "spectrum")?;
            set(&mut c.v0, a.v0);
            set(&mut c.alpha, a.alpha);
            set(&mut c.mass_ratio, a.mass_ratio);
            a.grid.apply(&mut c.grid);
            a.solver.apply(&mut c.solver);
            RunConfig::Spectrum(c)
        }
        Command::Curve(a) => {
            let mut c: CurveConfig = base(file, |c| match c { RunConfig::Curve(c) => Some(c), _ => None }, "curve")?;
            set(&mut c.v0, a.v0);
            set(&mut c.mass_ratio, a.mass_ratio);
            set(&mut c.alpha.min, a.alpha_min);
            set(&mut c.alpha.max, a.alpha_max);
            set(&mut c.alpha.steps, a.alpha_steps);
            a.grid.apply(&mut c.grid);
            a.solver.apply(&mut c.solver);
            RunConfig::Curve(c)
        }
        Command::Wavefunction(a) => {
            let mut c: WavefunctionConfig =
                base(file, |c| match c { RunConfig::Wavefunction(c) => Some(c), _ => None }, "wavefunction")?;
            set(&mut c.v0, a.v0);
            set(&mut c.alpha, a.alpha);
            set(&mut c.mass_ratio, a.mass_ratio);
            set(&mut c.state, a.state);
            if a.window.is_some() {
                c.window = a.window;
            }
            set(&mut c.span_scale, a.span_scale);
            set(&mut c.resolution, a.resolution);
            if a.dump.is_some() {
                c.dump = a.dump.clone();
            }
            a.grid.apply(&mut c.grid);
            a.solver.apply(&mut c.solver);
            RunConfig::Wavefunction(c)
        }
        Command::Window(a) => {
            let mut c: WindowConfig = base(file, |c| match c { RunConfig::Window(c) => Some(c), _ => None }, "window")?;
            if let Some(v0) = a.v0 {
                c.v0 = Range { min: v0, max: v0, steps: 1 };
            }
            set(&mut c.v0.min, a.v0_min);
            set(&mut c.v0.max, a.v0_max);
            set(&mut c.v0.steps, a.v0_steps);
            set(&mut c.mass_ratio, a.mass_ratio);
            set(&mut c.alpha_offset, a.alpha_offset);
            set(&mut c.alpha_tol, a.alpha_tol);
            a.grid.apply(&mut c.grid);
            a.solver.apply(&mut c.solver);
            RunConfig::Window(c)
        }
        Command::MassSweep(a) => {
            let mut c: MassSweepConfig =
                base(file, |c| match c { RunConfig::MassSweep(c) => Some(c), _ => None }, "mass-sweep")?;
            set(&mut c.v0, a.v0);
            if !a.mass_ratios.is_empty() {
                c.mass_ratios = a.mass_ratios.clone();
            }
            set(&mut c.alpha_offset, a.alpha_offset);
            a.grid.apply(&mut c.grid);
            a.solver.apply(&mut c.solver);
            RunConfig::MassSweep(c)
        }
    };
    let output = match &mut cfg {
        RunConfig::Twobody(c) => &mut c.output,
        RunConfig::Spectrum(c) => &mut c.output,
        RunConfig::Curve(c) => &mut c.output,
        RunConfig::Wavefunction(c) => &mut c.output,
        RunConfig::Window(c) => &mut c.output,
        RunConfig::MassSweep(c) => &mut c.output,
    };
    set(&mut output.format, cli.format);
    if cli.out.is_some() {
        output.out = cli.out.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Domain(_)
        | Error::PoleAtHalf
        | Error::ThresholdBoundary { .. }
        | Error::InternalDomain(_)
        | Error::WrongSpace
        | Error::NoBorromeanState { .. } => EXIT_DOMAIN,
        Error::Convergence { .. }
        | Error::PoleProximity { .. }
        | Error::SingularFactorization { .. }
        | Error::Aliasing { .. }
        | Error::InsufficientPoints { .. } => EXIT_CONVERGENCE,
        Error::Io(_) | Error::Format(_) => EXIT_USAGE,
    }
}

fn run(cli: &Cli) -> Result<(), ExitCode> {
    let cfg = resolve(cli).map_err(|UsageError(msg)| {
        eprintln!("error: {msg}");
        ExitCode::from(EXIT_USAGE)
    })?;
    let config = serde_json::to_value(&cfg).expect("config serializes");
    if cli.print_config {
        let text = serde_json::to_string_pretty(&config).expect("config serializes");
        println!("{text}");
        return Ok(());
    }
    if let Some(j) = cli.jobs {
        if j == 0 {
            eprintln!("error: --jobs must be at least 1");
            return Err(ExitCode::from(EXIT_USAGE));
        }
        rayon::ThreadPoolBuilder::new().num_threads(j).build_global().ok();
    }
    let hash = cfg.hash();
    let report = match &cfg {
        RunConfig::Twobody(c) => commands::twobody(c),
        RunConfig::Spectrum(c) => commands::spectrum(c),
        RunConfig::Curve(c) => commands::curve(c),
        RunConfig::Wavefunction(c) => commands::wavefunction(c, &hash, &config),
        RunConfig::Window(c) => commands::window(c),
        RunConfig::MassSweep(c) => commands::mass_sweep(c),
    }
    .map_err(|e| {
        eprintln!("error: {e}");
        ExitCode::from(exit_code(&e))
    })?;

    let output = cfg.output();
    let written = match &output.out {
        Some(path) => File::create(path).and_then(|f| {
            let mut w = BufWriter::new(f);
            report.render(output.format, &hash, &config, &mut w)?;
            w.flush()
        }),
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            report.render(output.format, &hash, &config, &mut w)
        }
    };
    written.map_err(|e| {
        eprintln!("error: cannot write output: {e}");
        ExitCode::from(EXIT_USAGE)
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(code) => code,
    }
}
