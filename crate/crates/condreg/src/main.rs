//! Command-line surface: generate benchmark data, fit conditional sparse
//! regressions, sweep reference classes, and tabulate risk-coverage
//! trade-offs.
//!
//! Subcommands: `gen` writes a synthetic dataset CSV plus a ground-truth
//! sidecar, `fit` runs the conditional fit and stores the result as JSON,
//! `refclass` sweeps a reference class around one query point, `eval`
//! scores a stored fit on holdout data, and `rc` turns a μ grid into a
//! risk-coverage CSV. Datasets are read as the native CSV dialect when the
//! path ends in `.csv` and as LIBSVM lines otherwise (real features are
//! then binarized into Boolean attributes, thresholds from training rows
//! only).
//!
//! Every command is a pure function of its files, flags, and `--seed`;
//! rerunning gives byte-identical output, independent of `--threads`.
//! Exit codes: 0 success, 2 infeasible (no condition meets the coverage
//! target), 1 any other failure. Set `CONDREG_LOG=debug` for progress
//! logging on standard error.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use condreg::condition_search::SearchVariant;
use condreg::dataio::{
    self, generate_synthetic, natural_bound, parse_libsvm, split_indices, BinarizationScheme,
    Binarizer, Dataset, SyntheticSpec,
};
use condreg::driver::{
    self, default_alpha_greedy, default_alpha_threshold, FitMode, FitParams,
};
use condreg::sketch::{compute_m0, exponent_grid, required_sketch_size, SketchConfig};
use condreg::{presets, Dataset64, Error, FitResult64, RealMat, Result};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests also land here; they are not errors.
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("CONDREG_LOG", "warn"))
        .format_timestamp(None)
        .init();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            log::debug!("thread pool already initialized: {e}");
        }
    }
    match run(&cli.command) {
        Ok(Outcome::Success) => ExitCode::SUCCESS,
        Ok(Outcome::Infeasible) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

enum Outcome {
    Success,
    Infeasible,
}

fn run(cmd: &Cmd) -> Result<Outcome> {
    match cmd {
        Cmd::Gen(args) => run_gen(args),
        Cmd::Fit(args) => run_fit(args),
        Cmd::Refclass(args) => run_refclass(args),
        Cmd::Eval(args) => run_eval(args),
        Cmd::Rc(args) => run_rc(args),
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "condreg",
    version,
    about = "Conditional sparse regression with k-DNF conditions"
)]
struct Cli {
    /// Cap the worker-thread count (default: all cores; results do not
    /// depend on it).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Generate a planted-model dataset: CSV plus ground-truth sidecar.
    Gen(GenArgs),
    /// Fit a sparse predictor and its condition; write the result as JSON.
    Fit(FitArgs),
    /// Find the reference class of one query point and fit inside it.
    Refclass(RefclassArgs),
    /// Score a stored fit on a holdout file.
    Eval(EvalArgs),
    /// Sweep a descending μ grid into a risk-coverage CSV.
    Rc(RcArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum PresetName {
    /// Small planted benchmark: 1000 rows, 4 terms, σ² = 0.01.
    #[value(name = "table2-row1")]
    Table2Row1,
    /// Large planted benchmark: 5000 rows, 16 terms, σ² = 0.1.
    #[value(name = "table2-row2")]
    Table2Row2,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum WtcondArg {
    Threshold,
    Greedy,
}

impl From<WtcondArg> for SearchVariant {
    fn from(v: WtcondArg) -> Self {
        match v {
            WtcondArg::Threshold => SearchVariant::Threshold,
            WtcondArg::Greedy => SearchVariant::Greedy,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum ModeArg {
    /// Stop at the first candidate that passes every check.
    First,
    /// Scan everything and keep the smallest conditional loss.
    Best,
}

impl From<ModeArg> for FitMode {
    fn from(v: ModeArg) -> Self {
        match v {
            ModeArg::First => FitMode::FirstFound,
            ModeArg::Best => FitMode::ExhaustiveBest,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, Default)]
enum BinarizeArg {
    /// One indicator per feature: y ≥ median.
    #[default]
    Median,
    /// Three indicators per feature: y ≥ Q1, Q2, Q3.
    Quartile,
}

impl From<BinarizeArg> for BinarizationScheme {
    fn from(v: BinarizeArg) -> Self {
        match v {
            BinarizeArg::Median => BinarizationScheme::Median,
            BinarizeArg::Quartile => BinarizationScheme::Quartile,
        }
    }
}

#[derive(Args, Debug)]
struct GenArgs {
    /// Start from a benchmark preset, then apply any explicit flags.
    #[arg(long, value_enum)]
    preset: Option<PresetName>,
    /// Row count.
    #[arg(long)]
    m: Option<usize>,
    /// Real feature count.
    #[arg(long)]
    d: Option<usize>,
    /// Boolean attribute count.
    #[arg(long)]
    n: Option<usize>,
    /// Planted term count.
    #[arg(long)]
    g: Option<usize>,
    /// Maximum literals per planted term.
    #[arg(long)]
    k: Option<usize>,
    /// Planted predictor sparsity.
    #[arg(long)]
    s: Option<usize>,
    /// Noise variance on the planted sub-population.
    #[arg(long)]
    sigma2: Option<f64>,
    /// Fraction of rows satisfying the planted condition.
    #[arg(long = "p-sat")]
    p_sat: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Dataset CSV path.
    #[arg(long)]
    out: PathBuf,
    /// Ground-truth sidecar path (default: the CSV path with a
    /// `.truth.json` extension).
    #[arg(long = "truth-out")]
    truth_out: Option<PathBuf>,
}

/// Fit-parameter flags shared by `fit`, `refclass`, and `rc`. Missing
/// values fall back to the preset when one is named, otherwise to the
/// documented defaults; `--eps` and `--mu` have no default and must come
/// from one of the two.
#[derive(Args, Debug)]
struct FitFlags {
    /// Start from a benchmark preset, then apply any explicit flags.
    #[arg(long, value_enum)]
    preset: Option<PresetName>,
    /// Loss exponent p ≥ 1 (default 2).
    #[arg(long)]
    p: Option<f64>,
    /// Number of regression coordinates (default 1).
    #[arg(long)]
    s: Option<usize>,
    /// Maximum literals per condition term (default 1).
    #[arg(long)]
    k: Option<usize>,
    /// Approximation slack γ ∈ (0,1] (default 1).
    #[arg(long)]
    gamma: Option<f64>,
    /// Target covered fraction μ.
    #[arg(long)]
    mu: Option<f64>,
    /// Target conditional loss ε.
    #[arg(long)]
    eps: Option<f64>,
    /// Coverage and loss slack η (default 0.1).
    #[arg(long)]
    eta: Option<f64>,
    /// Failure probability δ (default 0.1).
    #[arg(long)]
    delta: Option<f64>,
    /// Acceptance multiplier: fits pass at conditional loss ≤ αε
    /// (default: the variant's theory default).
    #[arg(long)]
    alpha: Option<f64>,
    /// Example-pool size: candidates draw rows from the first m₀
    /// (default: the derived sample bound, capped at m).
    #[arg(long)]
    m0: Option<usize>,
    /// Sketch rows per candidate (default: derived from p, s, γ).
    #[arg(long)]
    r: Option<usize>,
    /// Norm bound handed to the solver (default: the dataset's own bound).
    #[arg(long)]
    b: Option<f64>,
    /// Collapse the weight-exponent grid to unit weights.
    #[arg(long = "fixed-weights")]
    fixed_weights: bool,
    /// Condition-search variant (default greedy).
    #[arg(long, value_enum)]
    wtcond: Option<WtcondArg>,
    /// Candidate selection mode (default best).
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    /// Candidate budget; 0 scans the whole space (default 20000).
    #[arg(long)]
    budget: Option<u64>,
    /// Run the per-row residual screen before each condition search
    /// (default: true without a preset, the preset's pinned choice with).
    #[arg(long)]
    screen: Option<bool>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Binarization scheme for LIBSVM input.
    #[arg(long, value_enum, default_value_t)]
    binarize: BinarizeArg,
}

#[derive(Args, Debug)]
struct FitArgs {
    /// Dataset path (.csv native, anything else LIBSVM).
    #[arg(long)]
    data: PathBuf,
    #[command(flatten)]
    flags: FitFlags,
    /// Where to write the result JSON (omit to skip).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct RefclassArgs {
    /// Dataset path (.csv native, anything else LIBSVM).
    #[arg(long)]
    data: PathBuf,
    /// Query-point attributes, e.g. `1,0,1` or `101`.
    #[arg(long = "x-star")]
    x_star: String,
    /// Largest coverage level the sweep starts from.
    #[arg(long, default_value_t = 1.0)]
    mu0: f64,
    /// Smallest weight level the sweep refines down to.
    #[arg(long)]
    eps0: f64,
    #[command(flatten)]
    flags: FitFlags,
    /// Where to write the result JSON (omit to skip).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct EvalArgs {
    /// Fit-result JSON produced by `fit`.
    #[arg(long)]
    result: PathBuf,
    /// Holdout dataset path.
    #[arg(long)]
    data: PathBuf,
    /// Re-solve the coefficients on this training file's condition rows
    /// before scoring, instead of reusing the stored coefficients.
    #[arg(long)]
    refit: Option<PathBuf>,
    /// Binarization scheme for LIBSVM input.
    #[arg(long, value_enum, default_value_t)]
    binarize: BinarizeArg,
}

#[derive(Args, Debug)]
struct RcArgs {
    /// One dataset to split into train/test parts.
    #[arg(long, conflicts_with_all = ["train", "test"])]
    data: Option<PathBuf>,
    /// Pre-split training file (binarization thresholds come from here).
    #[arg(long, requires = "test")]
    train: Option<PathBuf>,
    /// Pre-split holdout file.
    #[arg(long, requires = "train")]
    test: Option<PathBuf>,
    /// Training fraction for `--data` mode.
    #[arg(long = "train-frac", default_value_t = 1.0 / 3.0)]
    train_frac: f64,
    /// Split seed for `--data` mode.
    #[arg(long = "split-seed", default_value_t = 0)]
    split_seed: u64,
    /// Descending μ grid, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    grid: Vec<f64>,
    #[command(flatten)]
    flags: FitFlags,
    /// RC table path (omit to print the CSV on standard output).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn run_gen(args: &GenArgs) -> Result<Outcome> {
    let mut spec = match args.preset {
        Some(PresetName::Table2Row2) => presets::table2_row2(args.seed),
        Some(PresetName::Table2Row1) | None => presets::table2_row1(args.seed),
    };
    override_spec(&mut spec, args);
    let (data, truth) = generate_synthetic::<f64>(&spec)?;

    dataio::write_csv(&data, &mut buffered(&args.out)?)?;
    let truth_path = args
        .truth_out
        .clone()
        .unwrap_or_else(|| args.out.with_extension("truth.json"));
    write_json(&truth_path, &truth)?;

    println!(
        "wrote {} rows ({} attributes, {} features) to {}",
        data.m(),
        data.n(),
        data.d(),
        args.out.display()
    );
    println!(
        "planted condition: {} terms; predictor coords {:?}; truth sidecar {}",
        truth.dnf.len(),
        truth.coords,
        truth_path.display()
    );
    Ok(Outcome::Success)
}

fn override_spec(spec: &mut SyntheticSpec, args: &GenArgs) {
    if let Some(v) = args.m {
        spec.m = v;
    }
    if let Some(v) = args.d {
        spec.d = v;
    }
    if let Some(v) = args.n {
        spec.n = v;
    }
    if let Some(v) = args.g {
        spec.g = v;
    }
    if let Some(v) = args.k {
        spec.k = v;
    }
    if let Some(v) = args.s {
        spec.s = v;
    }
    if let Some(v) = args.sigma2 {
        spec.sigma2 = v;
    }
    if let Some(v) = args.p_sat {
        spec.p_sat = v;
    }
}

fn run_fit(args: &FitArgs) -> Result<Outcome> {
    let data = load_dataset(&args.data, args.flags.binarize.into())?;
    let params = build_fit_params(&args.flags, &data)?;
    match driver::fit_conditional(&data, &params)? {
        Some(fit) => {
            let (covered, frac) = fit.dnf.coverage(data.x())?;
            println!(
                "fit: loss {}, coverage {} ({} of {} rows), {} terms, coords {:?}",
                fit.loss,
                frac,
                covered,
                data.m(),
                fit.dnf.len(),
                fit.coords
            );
            if let Some(out) = &args.out {
                write_json(out, &fit)?;
                println!("result written to {}", out.display());
            }
            Ok(Outcome::Success)
        }
        None => {
            println!("infeasible: no candidate reached the coverage target within loss αε");
            Ok(Outcome::Infeasible)
        }
    }
}

fn run_refclass(args: &RefclassArgs) -> Result<Outcome> {
    let data = load_dataset(&args.data, args.flags.binarize.into())?;
    let x_star = parse_assignment(&args.x_star, data.n())?;
    let mut flags_mu_eps = FitFlagsView::from(&args.flags);
    // The sweep supplies its own (μ, ε) schedule from (mu0, eps0); the
    // fit parameters only need consistent placeholders.
    flags_mu_eps.mu.get_or_insert(args.mu0.min(1.0));
    flags_mu_eps.eps.get_or_insert(args.eps0);
    let params = build_fit_params_view(&flags_mu_eps, &data)?;
    match driver::fit_reference_class(&data, &x_star, args.mu0, args.eps0, &params)? {
        Some(rf) => {
            println!(
                "reference class: {} terms, {} rows covered (mu target {}), eps_hat {}",
                rf.class.dnf.len(),
                rf.class.covered,
                rf.class.mu,
                rf.class.eps_hat
            );
            println!(
                "fit inside the class: loss {}, coords {:?}",
                rf.result.loss, rf.result.coords
            );
            if let Some(out) = &args.out {
                write_json(out, &rf)?;
                println!("result written to {}", out.display());
            }
            Ok(Outcome::Success)
        }
        None => {
            println!("infeasible: every term satisfied by the query point was pruned");
            Ok(Outcome::Infeasible)
        }
    }
}

fn run_eval(args: &EvalArgs) -> Result<Outcome> {
    let fit: FitResult64 = serde_json::from_reader(open(&args.result)?)?;
    let holdout = load_dataset(&args.data, args.binarize.into())?;
    let refit = match &args.refit {
        Some(path) => Some(load_dataset(path, args.binarize.into())?),
        None => None,
    };
    let (coverage, loss) = driver::evaluate(&fit, &holdout, refit.as_ref())?;
    match loss {
        Some(l) => println!("holdout coverage {coverage}, loss {l}"),
        None => println!("holdout coverage 0, loss undefined (condition covers no rows)"),
    }
    Ok(Outcome::Success)
}

fn run_rc(args: &RcArgs) -> Result<Outcome> {
    let (train, test) = load_split(args)?;
    let mut flags = FitFlagsView::from(&args.flags);
    // Grids are descending, so the first entry is the largest target.
    if let Some(&first) = args.grid.first() {
        flags.mu.get_or_insert(first);
    }
    let params = build_fit_params_view(&flags, &train)?;
    let rows = driver::rc_curve(&train, &test, &args.grid, &params)?;
    match &args.out {
        Some(path) => {
            driver::write_rc_csv(&rows, &mut buffered(path)?)?;
            for row in &rows {
                match (row.coverage, row.loss) {
                    (Some(c), Some(l)) => println!("mu {}: coverage {c}, loss {l}", row.mu),
                    (Some(c), None) => {
                        println!("mu {}: coverage {c}, loss undefined", row.mu)
                    }
                    _ => println!("mu {}: infeasible", row.mu),
                }
            }
            println!("rc table written to {}", path.display());
        }
        None => {
            let stdout = io::stdout();
            driver::write_rc_csv(&rows, &mut stdout.lock())?;
        }
    }
    Ok(Outcome::Success)
}

/// The resolved view of [`FitFlags`] that parameter building works from;
/// commands that derive μ or ε from their own arguments fill those in
/// before resolution.
struct FitFlagsView {
    preset: Option<PresetName>,
    p: Option<f64>,
    s: Option<usize>,
    k: Option<usize>,
    gamma: Option<f64>,
    mu: Option<f64>,
    eps: Option<f64>,
    eta: Option<f64>,
    delta: Option<f64>,
    alpha: Option<f64>,
    m0: Option<usize>,
    r: Option<usize>,
    b: Option<f64>,
    fixed_weights: bool,
    wtcond: Option<WtcondArg>,
    mode: Option<ModeArg>,
    budget: Option<u64>,
    screen: Option<bool>,
    seed: u64,
}

impl From<&FitFlags> for FitFlagsView {
    fn from(f: &FitFlags) -> Self {
        FitFlagsView {
            preset: f.preset,
            p: f.p,
            s: f.s,
            k: f.k,
            gamma: f.gamma,
            mu: f.mu,
            eps: f.eps,
            eta: f.eta,
            delta: f.delta,
            alpha: f.alpha,
            m0: f.m0,
            r: f.r,
            b: f.b,
            fixed_weights: f.fixed_weights,
            wtcond: f.wtcond,
            mode: f.mode,
            budget: f.budget,
            screen: f.screen,
            seed: f.seed,
        }
    }
}

fn build_fit_params(flags: &FitFlags, data: &Dataset64) -> Result<FitParams> {
    build_fit_params_view(&FitFlagsView::from(flags), data)
}

fn build_fit_params_view(flags: &FitFlagsView, data: &Dataset64) -> Result<FitParams> {
    let mut params = match flags.preset {
        Some(PresetName::Table2Row1) => presets::table2_row1_fit(flags.seed),
        Some(PresetName::Table2Row2) => presets::table2_row2_fit(flags.seed),
        None => base_fit_params(flags, data)?,
    };
    params.seed = flags.seed;
    let sk = &mut params.sketch;
    if let Some(v) = flags.p {
        sk.p = v;
    }
    if let Some(v) = flags.s {
        sk.s = v;
    }
    if let Some(v) = flags.gamma {
        sk.gamma = v;
    }
    if let Some(v) = flags.mu {
        sk.mu = v;
    }
    if let Some(v) = flags.eps {
        sk.eps = v;
    }
    if let Some(v) = flags.eta {
        sk.eta = v;
    }
    if let Some(v) = flags.delta {
        sk.delta = v;
    }
    if let Some(v) = flags.m0 {
        sk.m0 = v;
    }
    if let Some(v) = flags.r {
        sk.r = v;
    }
    if let Some(v) = flags.b {
        sk.b = v;
    }
    if flags.fixed_weights {
        sk.fixed_weights = true;
    }
    if let Some(v) = flags.k {
        params.k = v;
    }
    if let Some(v) = flags.alpha {
        params.alpha = v;
    }
    if let Some(v) = flags.wtcond {
        params.variant = v.into();
    }
    if let Some(v) = flags.mode {
        params.mode = v.into();
    }
    if let Some(v) = flags.budget {
        params.budget = if v == 0 { None } else { Some(v) };
    }
    if let Some(v) = flags.screen {
        params.screen = v;
    }
    params.validate()?;
    Ok(params)
}

/// Defaults when no preset is named. ε and μ are genuinely task-specific
/// and must be given; everything else has a derivable fallback, with the
/// greedy α default using the attribute count as its stand-in for the
/// unknown true term count.
fn base_fit_params(flags: &FitFlagsView, data: &Dataset64) -> Result<FitParams> {
    let eps = flags
        .eps
        .ok_or_else(|| Error::parameter("--eps is required unless a preset supplies it"))?;
    let mu = flags
        .mu
        .ok_or_else(|| Error::parameter("--mu is required unless a preset supplies it"))?;
    let p = flags.p.unwrap_or(2.0);
    let s = flags.s.unwrap_or(1);
    let k = flags.k.unwrap_or(1);
    let gamma = flags.gamma.unwrap_or(1.0);
    let eta = flags.eta.unwrap_or(0.1);
    let delta = flags.delta.unwrap_or(0.1);
    let b = flags.b.unwrap_or_else(|| data.b());
    let r = match flags.r {
        Some(v) => v,
        None => required_sketch_size(p, s + 1, gamma)?,
    };
    let (q_lo, q_hi) = if flags.fixed_weights {
        (0, 0)
    } else {
        exponent_grid(p, r, gamma, s)
    };
    let m0 = flags.m0.unwrap_or_else(|| {
        match compute_m0(mu, gamma, eps, delta, b, p) {
            Ok(v) => v.min(data.m()),
            Err(e) => {
                log::warn!("sample-bound formula failed ({e}); using every row as the pool");
                data.m()
            }
        }
    });
    let variant: SearchVariant = flags.wtcond.unwrap_or(WtcondArg::Greedy).into();
    let alpha = flags.alpha.unwrap_or_else(|| match variant {
        SearchVariant::Threshold => default_alpha_threshold(data.n(), k),
        SearchVariant::Greedy => default_alpha_greedy(data.n(), data.m()),
    });
    Ok(FitParams {
        sketch: SketchConfig {
            s,
            p,
            gamma,
            r,
            q_lo,
            q_hi,
            fixed_weights: flags.fixed_weights,
            m0,
            eps,
            mu,
            eta,
            delta,
            b,
        },
        k,
        alpha,
        mode: flags.mode.unwrap_or(ModeArg::Best).into(),
        variant,
        budget: match flags.budget {
            Some(0) => None,
            Some(v) => Some(v),
            None => Some(20_000),
        },
        seed: flags.seed,
        screen: flags.screen.unwrap_or(true),
    })
}

/// `1,0,1` or `101`, with `0`/`1` per attribute.
fn parse_assignment(s: &str, n: usize) -> Result<Vec<bool>> {
    let compact: String = s.chars().filter(|c| !c.is_whitespace() && *c != ',').collect();
    let mut x = Vec::with_capacity(compact.len());
    for c in compact.chars() {
        match c {
            '0' => x.push(false),
            '1' => x.push(true),
            other => {
                return Err(Error::parameter(format!(
                    "x-star must be 0/1 digits, found {other:?}"
                )))
            }
        }
    }
    if x.len() != n {
        return Err(Error::parameter(format!(
            "x-star has {} attributes but the dataset has {n}",
            x.len()
        )));
    }
    Ok(x)
}

fn is_csv(path: &Path) -> bool {
    path.extension()
        .map(|e| e.eq_ignore_ascii_case("csv"))
        .unwrap_or(false)
}

fn open(path: &Path) -> Result<BufReader<File>> {
    let file = File::open(path)
        .map_err(|e| Error::Io(io::Error::new(e.kind(), format!("{}: {e}", path.display()))))?;
    Ok(BufReader::new(file))
}

fn buffered(path: &Path) -> Result<BufWriter<File>> {
    let file = File::create(path)
        .map_err(|e| Error::Io(io::Error::new(e.kind(), format!("{}: {e}", path.display()))))?;
    Ok(BufWriter::new(file))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = buffered(path)?;
    serde_json::to_writer(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

/// Reads one dataset. CSV files carry their own Boolean attributes; LIBSVM
/// files get real features binarized with thresholds from this same file.
fn load_dataset(path: &Path, scheme: BinarizationScheme) -> Result<Dataset64> {
    if is_csv(path) {
        dataio::read_csv(open(path)?)
    } else {
        let (z, y) = parse_libsvm::<f64>(open(path)?)?;
        let binarizer = Binarizer::fit(&y, scheme)?;
        dataset_from_real(z, y, &binarizer)
    }
}

fn dataset_from_real(z: Vec<f64>, y: RealMat<f64>, binarizer: &Binarizer<f64>) -> Result<Dataset64> {
    let x = binarizer.transform(&y)?;
    let b = natural_bound(&y, &z);
    Dataset::new(x, y, z, b)
}

fn load_split(args: &RcArgs) -> Result<(Dataset64, Dataset64)> {
    let scheme: BinarizationScheme = args.flags.binarize.into();
    match (&args.data, &args.train, &args.test) {
        (Some(path), None, None) => {
            if is_csv(path) {
                let all = dataio::read_csv(open(path)?)?;
                dataio::split_train_test(&all, args.train_frac, args.split_seed)
            } else {
                let (z, y) = parse_libsvm::<f64>(open(path)?)?;
                let (train_idx, test_idx) = split_indices(z.len(), args.train_frac, args.split_seed)?;
                let (z_tr, y_tr) = select_real(&z, &y, &train_idx)?;
                let (z_te, y_te) = select_real(&z, &y, &test_idx)?;
                let binarizer = Binarizer::fit(&y_tr, scheme)?;
                Ok((
                    dataset_from_real(z_tr, y_tr, &binarizer)?,
                    dataset_from_real(z_te, y_te, &binarizer)?,
                ))
            }
        }
        (None, Some(train), Some(test)) => {
            if is_csv(train) && is_csv(test) {
                Ok((
                    dataio::read_csv(open(train)?)?,
                    dataio::read_csv(open(test)?)?,
                ))
            } else {
                let (z_tr, y_tr) = parse_libsvm::<f64>(open(train)?)?;
                let (z_te, y_te) = parse_libsvm::<f64>(open(test)?)?;
                let binarizer = Binarizer::fit(&y_tr, scheme)?;
                Ok((
                    dataset_from_real(z_tr, y_tr, &binarizer)?,
                    dataset_from_real(z_te, y_te, &binarizer)?,
                ))
            }
        }
        _ => Err(Error::parameter(
            "give either --data or both --train and --test",
        )),
    }
}

fn select_real(
    z: &[f64],
    y: &RealMat<f64>,
    idx: &[usize],
) -> Result<(Vec<f64>, RealMat<f64>)> {
    let rows: Vec<Vec<f64>> = idx.iter().map(|&j| y.row(j).to_vec()).collect();
    let z_sel: Vec<f64> = idx.iter().map(|&j| z[j]).collect();
    Ok((z_sel, RealMat::from_rows(&rows)?))
}
