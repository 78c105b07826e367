//! The `ptlab` command line: threshold curves, subspace counts, face
//! censuses and phase diagrams.

pub mod output;
pub mod svg;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::Error;
use crate::face_census::{compare_loss_fractions, run_census, CensusSpec, FaceRestriction};
use crate::models::{
    binomial_count, block_subspace_count, complete_tree_nodes, enumerate_block_supports, enumerate_tree_supports,
    tree_subspace_bound, ProblemSize, SparsityModel, TreeRegime, BLOCK_ENUMERATION_LIMIT,
};
use crate::phasegrid::{compare_to_theory, fit_empirical_transition, run_phase_diagram, GridSpec, LARGE_SWEEP};
use crate::thresholds::{sample_curve_with, ThresholdParams, Spacing};

pub const EXIT_OK: i32 = 0;
pub const EXIT_STATISTICAL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NONCONVERGENCE: i32 = 3;

/// Seed used when `--seed` is absent.
pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Parser)]
#[command(name = "ptlab", version, about = "Phase transitions of structured sparse signals")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Strong-threshold curves rho(delta) as CSV, optionally plotted.
    Threshold(ThresholdArgs),
    /// Closed-form subspace counts, optionally checked by enumeration.
    Subspaces(SubspaceArgs),
    /// Face-survival census of the projected cross-polytope.
    FaceCensus(CensusArgs),
    /// Monte Carlo phase diagram compared with the theoretical curve.
    PhaseDiagram(DiagramArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelKind {
    Simple,
    Block,
    Tree,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RegimeArg {
    Small,
    Large,
    Auto,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RestrictionArg {
    All,
    Block,
    Tree,
}

/// Model selection shared by `threshold` and `phase-diagram`.
#[derive(Debug, Args)]
pub struct ModelArgs {
    #[arg(long, value_enum)]
    pub model: ModelKind,
    /// Cluster fractions for block models, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub zeta: Vec<f64>,
    /// Fixed cluster count for block models.
    #[arg(long = "c")]
    pub clusters: Option<usize>,
    #[arg(long, value_enum, default_value = "auto")]
    pub regime: RegimeArg,
}

#[derive(Debug, Args)]
pub struct ThresholdArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Range `min:max`.
    #[arg(long, default_value = "1e-3:0.5")]
    pub delta: String,
    #[arg(long, default_value_t = 200)]
    pub points: usize,
    /// Linear instead of geometric delta spacing.
    #[arg(long)]
    pub linear: bool,
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SubspaceArgs {
    #[arg(long, value_enum)]
    pub model: ModelKind,
    /// Signal length.
    #[arg(long = "n")]
    pub ambient: Option<usize>,
    #[arg(long)]
    pub k: usize,
    #[arg(long = "c")]
    pub clusters: Option<usize>,
    /// Tree depth; the bound uses `N = 2^depth`, enumeration the complete
    /// tree with `2^depth - 1` nodes.
    #[arg(long)]
    pub depth: Option<u32>,
    #[arg(long)]
    pub enumerate: bool,
}

#[derive(Debug, Args)]
pub struct CensusArgs {
    #[arg(long = "N")]
    pub ambient: usize,
    #[arg(long = "n")]
    pub measurements: usize,
    /// Face dimension.
    #[arg(long)]
    pub k: usize,
    #[arg(long, value_enum, default_value = "all")]
    pub restriction: RestrictionArg,
    #[arg(long = "c")]
    pub clusters: Option<usize>,
    /// Paired comparison of all faces against `--c`-run block faces.
    #[arg(long)]
    pub compare_block: bool,
    #[arg(long, default_value_t = 100)]
    pub instances: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Faces sampled per instance instead of a full enumeration.
    #[arg(long)]
    pub subsample: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DiagramArgs {
    #[arg(long = "N", default_value_t = 64)]
    pub ambient: usize,
    /// `DxR`: deltas `j/D` for `j = 1..D`, rhos `i/(R-1)` for `i = 0..R-1`.
    #[arg(long, default_value = "12x12")]
    pub grid: String,
    #[arg(long, default_value_t = 25)]
    pub trials: usize,
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Relative l2 error counted as success.
    #[arg(long, default_value_t = 1e-4)]
    pub tolerance: f64,
    /// Diagram CSV.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Empirical-curve CSV.
    #[arg(long)]
    pub empirical: Option<PathBuf>,
    /// Theory comparison CSV.
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[arg(long)]
    pub svg: Option<PathBuf>,
    /// Proceed with sweeps above 10^5 solver calls.
    #[arg(long)]
    pub yes: bool,
}

/// Failure of a command, carrying its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn usage(msg: impl Into<String>) -> Self {
        CliError { code: EXIT_USAGE, message: msg.into() }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match innermost(&e) {
            Error::NonConvergence { .. } => EXIT_NONCONVERGENCE,
            _ => EXIT_USAGE,
        };
        CliError { code, message: e.to_string() }
    }
}

fn innermost(e: &Error) -> &Error {
    match e {
        Error::AtDelta { source, .. } => innermost(source),
        other => other,
    }
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError { code: EXIT_USAGE, message: format!("cannot write {}: {e}", path.display()) }
}

type CmdResult = std::result::Result<i32, CliError>;

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code. Regular output goes to `stdout`, diagnostics to
/// `stderr`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args: Vec<std::ffi::OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let sink: &mut dyn Write = if code == EXIT_OK { stdout } else { stderr };
            let _ = write!(sink, "{e}");
            return code;
        }
    };
    let command_line = args.iter().map(|a| a.to_string_lossy().into_owned()).collect::<Vec<_>>().join(" ");
    // commands write into buffers so they can run inside a sized thread pool
    let (result, out, err) = with_pool(|| {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let r = dispatch(&cli.command, &command_line, &mut out, &mut err);
        (r, out, err)
    });
    let _ = stdout.write_all(&out);
    let _ = stderr.write_all(&err);
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.message);
            e.code
        }
    }
}

/// Runs `f` on a pool sized by `PTLAB_JOBS` when set.
fn with_pool<R: Send>(f: impl FnOnce() -> R + Send) -> R {
    let jobs = std::env::var("PTLAB_JOBS").ok().and_then(|v| v.trim().parse::<usize>().ok()).filter(|&j| j > 0);
    match jobs.and_then(|j| rayon::ThreadPoolBuilder::new().num_threads(j).build().ok()) {
        Some(pool) => pool.install(f),
        None => f(),
    }
}

fn dispatch(cmd: &Command, command_line: &str, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CmdResult {
    match cmd {
        Command::Threshold(a) => cmd_threshold(a, command_line, stdout),
        Command::Subspaces(a) => cmd_subspaces(a, stdout),
        Command::FaceCensus(a) => cmd_face_census(a, stdout),
        Command::PhaseDiagram(a) => cmd_phase_diagram(a, command_line, stdout, stderr),
    }
}

fn emit(path: Option<&Path>, text: &str, stdout: &mut dyn Write) -> std::result::Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| io_err(p, e)),
        None => stdout.write_all(text.as_bytes()).map_err(|e| io_err(Path::new("<stdout>"), e)),
    }
}

/// Every model named by the flags (several for lists of `--zeta` or
/// `--regime both`).
pub fn models_from(args: &ModelArgs) -> std::result::Result<Vec<SparsityModel>, CliError> {
    match args.model {
        ModelKind::Simple => Ok(vec![SparsityModel::Simple]),
        ModelKind::Block => {
            if let Some(c) = args.clusters {
                if !args.zeta.is_empty() {
                    return Err(CliError::usage("--zeta and --c are mutually exclusive"));
                }
                return Ok(vec![SparsityModel::block_count(c)?]);
            }
            if args.zeta.is_empty() {
                return Err(CliError::usage("block model needs --zeta or --c"));
            }
            args.zeta.iter().map(|&z| Ok(SparsityModel::block_fraction(z)?)).collect()
        }
        ModelKind::Tree => Ok(match args.regime {
            RegimeArg::Small => vec![SparsityModel::Tree(TreeRegime::SmallK)],
            RegimeArg::Large => vec![SparsityModel::Tree(TreeRegime::LargeK)],
            RegimeArg::Auto => vec![SparsityModel::Tree(TreeRegime::Auto)],
            RegimeArg::Both => {
                vec![SparsityModel::Tree(TreeRegime::SmallK), SparsityModel::Tree(TreeRegime::LargeK)]
            }
        }),
    }
}

fn parse_range(s: &str) -> std::result::Result<(f64, f64), CliError> {
    let bad = || CliError::usage(format!("range must look like min:max, got {s:?}"));
    let (lo, hi) = s.split_once(':').ok_or_else(bad)?;
    let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
    if !(lo > 0.0 && lo < hi) {
        return Err(CliError::usage(format!("range needs 0 < min < max, got {s:?}")));
    }
    Ok((lo, hi))
}

fn parse_grid(s: &str) -> std::result::Result<(usize, usize), CliError> {
    let bad = || CliError::usage(format!("grid must look like DxR, got {s:?}"));
    let (d, r) = s.split_once(['x', 'X']).ok_or_else(bad)?;
    let d: usize = d.trim().parse().map_err(|_| bad())?;
    let r: usize = r.trim().parse().map_err(|_| bad())?;
    if d == 0 || r == 0 {
        return Err(bad());
    }
    Ok((d, r))
}

fn cmd_threshold(a: &ThresholdArgs, command_line: &str, stdout: &mut dyn Write) -> CmdResult {
    let models = models_from(&a.model)?;
    let (lo, hi) = parse_range(&a.delta)?;
    let mut params = ThresholdParams::default();
    if let Some(tau) = a.tau {
        params = ThresholdParams::new(tau, params.delta_max)?;
    }
    let spacing = if a.linear { Spacing::Linear } else { Spacing::Geometric };
    let curves = models
        .iter()
        .map(|m| sample_curve_with(m, lo, hi, a.points, spacing, &params))
        .collect::<crate::Result<Vec<_>>>()?;
    emit(a.out.as_deref(), &output::curves_csv(&curves), stdout)?;
    if let Some(path) = &a.svg {
        let series: Vec<_> = curves.iter().map(|c| (c.model.to_string(), c.points.clone())).collect();
        let text = svg::curve_plot(&series, command_line);
        fs::write(path, text).map_err(|e| io_err(path, e))?;
    }
    Ok(EXIT_OK)
}

fn cmd_subspaces(a: &SubspaceArgs, stdout: &mut dyn Write) -> CmdResult {
    let line = match a.model {
        ModelKind::Simple => {
            let n = a.ambient.ok_or_else(|| CliError::usage("--n is required"))?;
            if a.k > n {
                return Err(CliError::usage(format!("k = {} exceeds N = {n}", a.k)));
            }
            format!("formula={}", count_text(binomial_count(n as u64, a.k as u64)))
        }
        ModelKind::Block => {
            let n = a.ambient.ok_or_else(|| CliError::usage("--n is required"))?;
            let c = a.clusters.ok_or_else(|| CliError::usage("--c is required for block models"))?;
            let formula = block_subspace_count(n, a.k, c)?;
            let mut line = format!("formula={}", count_text(formula));
            if a.enumerate {
                if n > BLOCK_ENUMERATION_LIMIT {
                    return Err(CliError::from(Error::Guard {
                        what: format!("block enumeration at N = {n} (brute force lists every pattern)"),
                        limit: BLOCK_ENUMERATION_LIMIT as u128,
                    }));
                }
                let listed = enumerate_block_supports(n, a.k, c)?.len() as u128;
                let agree = formula.exact() == Some(listed);
                line.push_str(&format!(" enumerated={listed} match={agree}"));
            }
            line
        }
        ModelKind::Tree => {
            let depth = a.depth.ok_or_else(|| CliError::usage("--depth is required for tree models"))?;
            if !(1..=63).contains(&depth) {
                return Err(CliError::usage("--depth must lie in 1..=63"));
            }
            let (ln_bound, regime) = tree_subspace_bound(1u64 << depth, a.k as u64)?;
            let bound = ln_bound.exp();
            let mut line = format!("bound={} regime={}", output::fmt_num(bound), regime.name());
            if a.enumerate {
                let nodes = complete_tree_nodes(depth)?;
                if a.k > nodes {
                    return Err(CliError::usage(format!("k = {} exceeds the {nodes} tree nodes", a.k)));
                }
                let listed = enumerate_tree_supports(depth, a.k)?.len();
                let within = (listed as f64) <= bound;
                line.push_str(&format!(" enumerated={listed} within_bound={within}"));
            }
            line
        }
    };
    writeln!(stdout, "{line}").map_err(|e| io_err(Path::new("<stdout>"), e))?;
    Ok(EXIT_OK)
}

fn count_text(c: crate::models::Count) -> String {
    match c.exact() {
        Some(v) => v.to_string(),
        None => format!("exp({})", output::fmt_num(c.ln())),
    }
}

fn cmd_face_census(a: &CensusArgs, stdout: &mut dyn Write) -> CmdResult {
    let size = ProblemSize::new(a.ambient, a.measurements, 0)?;
    if a.compare_block {
        let c = a.clusters.ok_or_else(|| CliError::usage("--compare-block needs --c"))?;
        if a.subsample.is_some() {
            return Err(CliError::usage("--compare-block runs exhaustive censuses; drop --subsample"));
        }
        let cmp = compare_loss_fractions(size, a.k, c, a.instances, a.seed)?;
        let csv = output::census_csv(&[&cmp.all, &cmp.block]);
        emit(a.out.as_deref(), &csv, stdout)?;
        writeln!(
            stdout,
            "fraction_all={} fraction_block={} mean_difference={} z={} pass={}",
            output::fmt_num(cmp.all.loss_fraction),
            output::fmt_num(cmp.block.loss_fraction),
            output::fmt_num(cmp.mean_difference),
            output::fmt_num(cmp.z),
            cmp.pass
        )
        .map_err(|e| io_err(Path::new("<stdout>"), e))?;
        return Ok(if cmp.pass { EXIT_OK } else { EXIT_STATISTICAL });
    }
    let restriction = match a.restriction {
        RestrictionArg::All => FaceRestriction::All,
        RestrictionArg::Block => {
            FaceRestriction::BlockSupports(a.clusters.ok_or_else(|| CliError::usage("block restriction needs --c"))?)
        }
        RestrictionArg::Tree => FaceRestriction::TreeSupports,
    };
    let mut spec = CensusSpec::new(a.ambient, a.measurements, a.k, restriction).instances(a.instances).seed(a.seed);
    spec.subsample = a.subsample;
    let result = run_census(&spec)?;
    emit(a.out.as_deref(), &output::census_csv(&[&result]), stdout)?;
    if result.errors > 0 {
        writeln!(stdout, "solver_errors={}", result.errors).map_err(|e| io_err(Path::new("<stdout>"), e))?;
    }
    Ok(EXIT_OK)
}

fn cmd_phase_diagram(a: &DiagramArgs, command_line: &str, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CmdResult {
    let models = models_from(&a.model)?;
    let [model] = models[..] else {
        return Err(CliError::usage("phase-diagram takes exactly one model"));
    };
    let (d, r) = parse_grid(&a.grid)?;
    let mut spec = GridSpec::uniform(a.ambient, d, r, a.trials, model, a.seed)?;
    spec.tolerance = a.tolerance;
    spec.validate()?;
    let calls = spec.solver_calls();
    let _ = writeln!(stderr, "{} cells x {} trials = {calls} solver calls", spec.cells(), spec.trials);
    if calls > LARGE_SWEEP && !a.yes {
        return Err(CliError::usage(format!("{calls} solver calls exceed {LARGE_SWEEP}; pass --yes to proceed")));
    }
    let diagram = run_phase_diagram(&spec)?;
    let _ = writeln!(stderr, "elapsed {:.1} s", diagram.elapsed_secs);
    emit(a.out.as_deref(), &output::diagram_csv(&diagram), stdout)?;

    let empirical = fit_empirical_transition(&diagram);
    if let Some(p) = &a.empirical {
        fs::write(p, output::empirical_csv(&empirical)).map_err(|e| io_err(p, e))?;
    }
    let params = ThresholdParams::default();
    let curve = sample_curve_with(&model, 1e-3, params.delta_max, 200, Spacing::Geometric, &params)?;
    let report = compare_to_theory(&empirical, &curve)?;
    for w in &report.warnings {
        let _ = writeln!(stderr, "warning: {w}");
    }
    if let Some(p) = &a.report {
        fs::write(p, output::report_csv(&report)).map_err(|e| io_err(p, e))?;
    }
    if let Some(p) = &a.svg {
        fs::write(p, svg::heat_map(&diagram, &curve.points, command_line)).map_err(|e| io_err(p, e))?;
    }
    let failing = report.rows.iter().filter(|r| !r.pass).count();
    let _ = writeln!(stderr, "theory comparison: {} columns, {failing} below the strong curve", report.rows.len());
    Ok(if failing == 0 { EXIT_OK } else { EXIT_STATISTICAL })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(args.iter().copied(), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn block_subspace_report() {
        let (code, out, _) = run_capture(&["ptlab", "subspaces", "--model", "block", "--n", "10", "--k", "4", "--c", "2", "--enumerate"]);
        assert_eq!(code, 0);
        assert_eq!(out.trim(), "formula=63 enumerated=63 match=true");
    }

    #[test]
    fn tree_subspace_report() {
        let (code, out, _) = run_capture(&["ptlab", "subspaces", "--model", "tree", "--depth", "4", "--k", "3", "--enumerate"]);
        assert_eq!(code, 0);
        assert!(out.starts_with("bound=40.1710738464"), "{out}");
        assert!(out.trim_end().ends_with("enumerated=5 within_bound=true"), "{out}");
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(run_capture(&["ptlab", "threshold", "--model", "block"]).0, 2);
        assert_eq!(run_capture(&["ptlab", "threshold", "--model", "simple", "--delta", "0.5:0.1"]).0, 2);
        assert_eq!(run_capture(&["ptlab", "frobnicate"]).0, 2);
        assert_eq!(run_capture(&["ptlab", "--help"]).0, 0);
    }

    #[test]
    fn two_point_curve() {
        let (code, out, _) = run_capture(&["ptlab", "threshold", "--model", "simple", "--delta", "0.01:0.2", "--points", "2"]);
        assert_eq!(code, 0);
        assert_eq!(out.lines().count(), 3);
        assert_eq!(out.lines().next(), Some(output::CURVE_HEADER));
    }

    #[test]
    fn grid_parsing() {
        assert_eq!(parse_grid("12x12").unwrap(), (12, 12));
        assert!(parse_grid("12").is_err());
        assert!(parse_grid("0x3").is_err());
    }
}
