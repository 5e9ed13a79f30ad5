use anyhow::{anyhow, bail, Context, Result};
use asymptotic_means::identities::{load_corpus_dir, run_suite, SuiteParams, SuiteSummary};
use asymptotic_means::means::{cesaro_mean, cesaro_mean_seq, exp_mean, LimitEstimate};
use asymptotic_means::par;
use asymptotic_means::sublinear::{functional_range, lower, upper, Functional, SweepReport};
use asymptotic_means::{DomainTag, SpecInput};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

/// Asymptotic means and Pólya-type upper/lower functionals of bounded
/// functions and sequences.
#[derive(Parser)]
#[command(name = "asymptotic-means", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate a single-limit mean (M, R or Md) and its convergence band.
    Mean {
        spec: PathBuf,
        #[arg(long, value_enum)]
        kind: MeanArg,
        #[command(flatten)]
        grid: GridFlags,
    },
    /// Upper functional of a function or sequence.
    Upper {
        spec: PathBuf,
        #[arg(long, value_enum)]
        kind: FunctionalArg,
        #[command(flatten)]
        sweep: SweepFlags,
    },
    /// Lower and upper functional together.
    Range {
        spec: PathBuf,
        #[arg(long, value_enum)]
        kind: FunctionalArg,
        #[command(flatten)]
        sweep: SweepFlags,
    },
    /// Per-θ table of an upper (or lower) sweep.
    Sweep {
        spec: PathBuf,
        #[arg(long, value_enum)]
        kind: FunctionalArg,
        /// Sweep the lower functional instead of the upper one.
        #[arg(long)]
        lower: bool,
        /// Write `theta,limsup_estimate,argmax_anchor` rows here (`-` for stdout).
        #[arg(long, value_name = "PATH")]
        csv: Option<String>,
        #[command(flatten)]
        sweep: SweepFlags,
    },
    /// Natural density and Pólya density band of an indicator sequence.
    Density {
        spec: PathBuf,
        /// Largest index of the mean grid and of the sweep tail.
        #[arg(long)]
        n_max: Option<f64>,
        #[arg(long)]
        band_tol: Option<f64>,
        #[arg(long)]
        theta_steps: Option<usize>,
        #[arg(long)]
        anchors: Option<usize>,
        #[arg(long)]
        stride_fraction: Option<f64>,
        /// Write a header and one row of results here (`-` for stdout).
        #[arg(long, value_name = "PATH")]
        csv: Option<String>,
        #[arg(long, value_name = "PATH")]
        params_file: Option<PathBuf>,
    },
    /// Run the identity suite on every `*.json` file of a directory.
    Verify {
        corpus_dir: PathBuf,
        #[arg(long, value_name = "PATH")]
        params_file: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MeanArg {
    #[value(name = "M")]
    M,
    #[value(name = "R")]
    R,
    #[value(name = "Md")]
    Md,
}

#[derive(Clone, Copy, ValueEnum)]
enum FunctionalArg {
    #[value(name = "K")]
    K,
    #[value(name = "P")]
    P,
    #[value(name = "Q")]
    Q,
    #[value(name = "Pd")]
    Pd,
    #[value(name = "Qd")]
    Qd,
}

impl From<FunctionalArg> for Functional {
    fn from(k: FunctionalArg) -> Self {
        match k {
            FunctionalArg::K => Functional::K,
            FunctionalArg::P => Functional::P,
            FunctionalArg::Q => Functional::Q,
            FunctionalArg::Pd => Functional::Pd,
            FunctionalArg::Qd => Functional::Qd,
        }
    }
}

#[derive(Args)]
struct GridFlags {
    /// Right end of the sampling grid (on the additive axis for R).
    #[arg(long)]
    x_max: Option<f64>,
    /// Right end of the sampling grid for Md.
    #[arg(long)]
    n_max: Option<f64>,
    /// Band width under which the mean counts as converged.
    #[arg(long)]
    band_tol: Option<f64>,
    /// JSON file of suite parameters used as the base configuration.
    #[arg(long, value_name = "PATH")]
    params_file: Option<PathBuf>,
}

#[derive(Args)]
struct SweepFlags {
    /// Right end of the tail range (on the additive axis for K).
    #[arg(long)]
    x_max: Option<f64>,
    /// Right end of the tail range for Pd and Qd.
    #[arg(long)]
    n_max: Option<f64>,
    /// Finest schedule index.
    #[arg(long)]
    theta_steps: Option<usize>,
    /// Uniform anchors per schedule entry.
    #[arg(long)]
    anchors: Option<usize>,
    /// Largest anchor spacing as a fraction of the window length.
    #[arg(long)]
    stride_fraction: Option<f64>,
    /// JSON file of suite parameters used as the base configuration.
    #[arg(long, value_name = "PATH")]
    params_file: Option<PathBuf>,
}

#[derive(Serialize)]
struct DensityReport {
    /// `null` when the partial averages have not settled within `band_tol`.
    natural_density: Option<f64>,
    natural_band: [f64; 2],
    band_tol: f64,
    polya_lower: f64,
    polya_upper: f64,
    polya_tolerance: f64,
    log_polya_lower: f64,
    log_polya_upper: f64,
    log_polya_tolerance: f64,
}

impl DensityReport {
    fn to_csv(&self) -> String {
        let nd = self.natural_density.map(|v| v.to_string()).unwrap_or_default();
        format!(
            "natural_density,natural_lo,natural_hi,polya_lower,polya_upper,log_polya_lower,log_polya_upper\n{nd},{},{},{},{},{},{}\n",
            self.natural_band[0],
            self.natural_band[1],
            self.polya_lower,
            self.polya_upper,
            self.log_polya_lower,
            self.log_polya_upper
        )
    }
}

fn read_spec(path: &Path) -> Result<SpecInput> {
    let text = std::fs::read_to_string(path).with_context(|| format!("{}: cannot read spec", path.display()))?;
    SpecInput::from_json(&text).with_context(|| path.display().to_string())
}

fn read_params(path: Option<&Path>) -> Result<SuiteParams> {
    let Some(path) = path else {
        return Ok(SuiteParams::default());
    };
    let text = std::fs::read_to_string(path).with_context(|| format!("{}: cannot read parameters", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("{}: invalid parameters", path.display()))
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn write_csv(target: &str, table: &str) -> Result<()> {
    if target == "-" {
        print!("{table}");
        Ok(())
    } else {
        std::fs::write(target, table).with_context(|| format!("{target}: cannot write CSV"))
    }
}

/// Picks the tail end for a kind: `--n-max` for discrete kinds, `--x-max`
/// otherwise; the other flag is rejected.
fn tail_end(discrete: bool, x_max: Option<f64>, n_max: Option<f64>, kind: &str) -> Result<Option<f64>> {
    match (discrete, x_max, n_max) {
        (true, Some(_), _) => bail!("--x-max does not apply to {kind}; use --n-max"),
        (false, _, Some(_)) => bail!("--n-max does not apply to {kind}; use --x-max"),
        (true, _, n) => Ok(n),
        (false, x, _) => Ok(x),
    }
}

fn sweep_params(kind: Functional, flags: &SweepFlags) -> Result<asymptotic_means::SweepParams> {
    let mut cfg = read_params(flags.params_file.as_deref())?.sweep;
    if let Some(end) = tail_end(kind.is_discrete(), flags.x_max, flags.n_max, kind.name())? {
        cfg.x_max = if kind == Functional::K {
            let x = end.exp();
            if !x.is_finite() {
                bail!("--x-max {end} is too large for K");
            }
            x
        } else {
            end
        };
    }
    if let Some(j) = flags.theta_steps {
        cfg.theta_steps = j;
    }
    if let Some(g) = flags.anchors {
        cfg.anchors_per_theta = g;
    }
    if let Some(s) = flags.stride_fraction {
        cfg.stride_fraction = s;
    }
    Ok(cfg.params(kind))
}

fn mean(spec: &Path, kind: MeanArg, grid: &GridFlags) -> Result<LimitEstimate> {
    let input = read_spec(spec)?;
    let params = read_params(grid.params_file.as_deref())?;
    let (mut criterion, name) = match kind {
        MeanArg::R => (params.exp_mean, "R"),
        MeanArg::M => (params.mean, "M"),
        MeanArg::Md => (params.mean, "Md"),
    };
    if let Some(end) = tail_end(matches!(kind, MeanArg::Md), grid.x_max, grid.n_max, name)? {
        criterion.x_max = end;
    }
    if let Some(t) = grid.band_tol {
        criterion.band_tol = t;
    }
    let estimate = match (kind, &input) {
        (MeanArg::M, SpecInput::Function(f)) if f.domain() == DomainTag::Multiplicative => cesaro_mean(f, &criterion),
        (MeanArg::R, SpecInput::Function(f)) if f.domain() == DomainTag::Additive => exp_mean(f, &criterion),
        (MeanArg::Md, SpecInput::Sequence(s)) => cesaro_mean_seq(s, &criterion),
        (MeanArg::M, _) => bail!("{}: M needs a multiplicative function", spec.display()),
        (MeanArg::R, _) => bail!("{}: R needs an additive function", spec.display()),
        (MeanArg::Md, _) => bail!("{}: Md needs a sequence", spec.display()),
    };
    estimate.with_context(|| spec.display().to_string())
}

fn sweep_report(spec: &Path, kind: Functional, lower_side: bool, flags: &SweepFlags) -> Result<SweepReport> {
    let input = read_spec(spec)?;
    let params = sweep_params(kind, flags)?;
    let report = if lower_side { lower(&input, &params) } else { upper(&input, &params) };
    report.with_context(|| spec.display().to_string())
}

#[allow(clippy::too_many_arguments)]
fn density(
    spec: &Path,
    n_max: Option<f64>,
    band_tol: Option<f64>,
    theta_steps: Option<usize>,
    anchors: Option<usize>,
    stride_fraction: Option<f64>,
    params_file: Option<&Path>,
) -> Result<DensityReport> {
    let input = read_spec(spec)?;
    let SpecInput::Sequence(seq) = &input else {
        bail!("{}: density needs a sequence", spec.display());
    };
    if !seq.is_indicator() {
        bail!("{}: density needs a 0/1-valued sequence", spec.display());
    }
    let params = read_params(params_file)?;
    let mut criterion = params.mean;
    let mut cfg = params.sweep;
    if let Some(n) = n_max {
        criterion.x_max = n;
        cfg.x_max = n;
    }
    if let Some(t) = band_tol {
        criterion.band_tol = t;
    }
    if let Some(j) = theta_steps {
        cfg.theta_steps = j;
    }
    if let Some(g) = anchors {
        cfg.anchors_per_theta = g;
    }
    if let Some(s) = stride_fraction {
        cfg.stride_fraction = s;
    }
    let located = |e| anyhow!("{}: {e}", spec.display());
    let md = cesaro_mean_seq(seq, &criterion).map_err(located)?;
    let pd = functional_range(&input, &cfg.params(Functional::Pd)).map_err(located)?;
    let qd = functional_range(&input, &cfg.params(Functional::Qd)).map_err(located)?;
    Ok(DensityReport {
        natural_density: md.converged.then(|| md.value()),
        natural_band: [md.lo, md.hi],
        band_tol: criterion.band_tol,
        polya_lower: pd.lo,
        polya_upper: pd.hi,
        polya_tolerance: pd.tolerance,
        log_polya_lower: qd.lo,
        log_polya_upper: qd.hi,
        log_polya_tolerance: qd.tolerance,
    })
}

fn verify(corpus_dir: &Path, params_file: Option<&Path>) -> Result<u8> {
    let params = read_params(params_file)?;
    let corpus = load_corpus_dir(corpus_dir).with_context(|| corpus_dir.display().to_string())?;
    if corpus.is_empty() {
        bail!("{}: no *.json files found", corpus_dir.display());
    }
    let reports = run_suite(&corpus, &params);
    for r in reports.iter().filter(|r| r.diagnostics.get("error").is_some()) {
        eprintln!(
            "error: {}: {}: {}",
            corpus_dir.join(&r.input_label).display(),
            r.name,
            r.diagnostics["message"].as_str().unwrap_or_default()
        );
    }
    print_json(&reports)?;
    let s = SuiteSummary::of(&reports);
    eprintln!(
        "verify: {} checks, {} passed, {} failed, {} skipped, {} errors",
        s.total, s.passed, s.failed, s.skipped, s.errors
    );
    Ok(s.exit_code() as u8)
}

fn configure_threads() -> Result<()> {
    if let Ok(value) = std::env::var(par::THREADS_ENV) {
        let n: usize = value
            .trim()
            .parse()
            .with_context(|| format!("{}={value:?} is not a thread count", par::THREADS_ENV))?;
        par::configure_threads(n).map_err(|e| anyhow!(e))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<u8> {
    configure_threads()?;
    match cli.command {
        Command::Mean { spec, kind, grid } => print_json(&mean(&spec, kind, &grid)?)?,
        Command::Upper { spec, kind, sweep } => print_json(&sweep_report(&spec, kind.into(), false, &sweep)?)?,
        Command::Range { spec, kind, sweep } => {
            let input = read_spec(&spec)?;
            let params = sweep_params(kind.into(), &sweep)?;
            let range = functional_range(&input, &params).with_context(|| spec.display().to_string())?;
            print_json(&range)?;
        }
        Command::Sweep {
            spec,
            kind,
            lower,
            csv,
            sweep,
        } => {
            let report = sweep_report(&spec, kind.into(), lower, &sweep)?;
            match csv {
                Some(target) => write_csv(&target, &report.to_csv())?,
                None => print_json(&report)?,
            }
        }
        Command::Density {
            spec,
            n_max,
            band_tol,
            theta_steps,
            anchors,
            stride_fraction,
            csv,
            params_file,
        } => {
            let report = density(
                &spec,
                n_max,
                band_tol,
                theta_steps,
                anchors,
                stride_fraction,
                params_file.as_deref(),
            )?;
            match csv {
                Some(target) => write_csv(&target, &report.to_csv())?,
                None => print_json(&report)?,
            }
        }
        Command::Verify {
            corpus_dir,
            params_file,
        } => return verify(&corpus_dir, params_file.as_deref()),
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
