//! The `perimin` command line.

use std::ffi::OsString;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::checks::run_suite;
use crate::error::{Error, Result};
use crate::exact::{Dyadic, ExactValue};
use crate::extension::{check_step3, sample_probes, ExtensionReport};
use crate::minimize::{estimate_lambda, is_concave_nondecreasing, is_nested, minimize, MinimizerResult, Problem, Variant};
use crate::scenarios::Scenario;

pub mod file;

use file::{dyadic_ceil, dyadic_floor, env_scale, mask_pgm, parse_quantity, read_masks, ScenarioFile};

pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_MALFORMED: i32 = 2;
pub const EXIT_RESOLUTION: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "perimin", version, about = "Exact perimeter minimization on weighted grids")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Inside,
    Symdiff,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Inside => Variant::InsideOnly,
            VariantArg::Symdiff => Variant::SymmetricDifference,
        }
    }
}

#[derive(Args, Debug)]
pub struct Common {
    /// Scenario file (JSON).
    #[arg(long)]
    pub scenario: PathBuf,
    /// Functional variant; defaults to the scenario's.
    #[arg(long, value_enum)]
    pub variant: Option<VariantArg>,
    /// Output directory.
    #[arg(long, default_value = "perimin-out")]
    pub out: PathBuf,
    /// Leave timing out of reports so they are reproducible byte for byte.
    #[arg(long)]
    pub no_timing: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Minimize for one λ, or for the λ chosen from a mass budget ε.
    Minimize {
        #[command(flatten)]
        common: Common,
        #[arg(long, conflicts_with = "epsilon", required_unless_present = "epsilon")]
        lambda: Option<String>,
        #[arg(long)]
        epsilon: Option<String>,
        /// Step-3 probes of the minimal set to include in the report.
        #[arg(long, default_value_t = 0)]
        probes: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Minimize for an increasing list of λ and check nesting.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long = "lambda", required = true, num_args = 1.., value_delimiter = ',')]
        lambdas: Vec<String>,
    },
    /// Probe the Step-3 inequality on subsets of the minimizer or of a mask.
    Probe {
        #[command(flatten)]
        common: Common,
        /// λ of the inequality (and of the minimizer); defaults to the scenario's.
        #[arg(long)]
        lambda: Option<String>,
        /// PGM mask per chart, in chart order, instead of the minimizer.
        #[arg(long)]
        mask: Vec<PathBuf>,
        #[arg(long, default_value_t = 1000)]
        probes: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run an invariant suite: identities, oracle or scenarios.
    Check {
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Serialize, Debug)]
pub struct ScenarioEcho {
    pub name: String,
    pub params: std::collections::BTreeMap<String, f64>,
    pub vertices: usize,
    pub edges: usize,
    pub omega_size: usize,
    pub omega_measure: ExactValue,
}

impl ScenarioEcho {
    fn new(s: &Scenario) -> Self {
        ScenarioEcho {
            name: s.name.clone(),
            params: s.params.clone(),
            vertices: s.space.vertex_count(),
            edges: s.space.edges().len(),
            omega_size: s.omega.len(),
            omega_measure: s.space.measure_of(&s.omega).into(),
        }
    }
}

#[derive(Serialize, Debug)]
pub struct LambdaReport {
    pub epsilon: ExactValue,
    pub r: Option<ExactValue>,
    pub layer_mass: ExactValue,
    pub min_layer_perimeter: ExactValue,
    pub layer_variation: ExactValue,
    pub mass_bound_holds: bool,
    pub trivial: bool,
    pub budget_met: bool,
}

#[derive(Serialize, Debug)]
pub struct ExtensionSummary {
    pub probes: usize,
    pub seed: u64,
    pub step3_violations: usize,
    pub norm_violations: usize,
    pub norm_bound: ExactValue,
    pub worst_ratio: Option<f64>,
}

impl ExtensionSummary {
    fn new(r: &ExtensionReport, seed: u64) -> Self {
        ExtensionSummary {
            probes: r.probes.len(),
            seed,
            step3_violations: r.step3_violations,
            norm_violations: r.norm_violations,
            norm_bound: r.norm_bound().into(),
            worst_ratio: r.worst_ratio.map(|w| w.to_f64()),
        }
    }
}

#[derive(Serialize, Debug)]
pub struct RunReport {
    pub scenario: ScenarioEcho,
    pub lambda: ExactValue,
    pub variant: Variant,
    pub value: ExactValue,
    /// `m(Ω \ G)` for the minimal set `G`.
    pub omitted_measure: ExactValue,
    pub minimal_size: usize,
    pub maximal_size: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_estimate: Option<LambdaReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extension: Option<ExtensionSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<u64>,
}

#[derive(Serialize, Debug)]
pub struct SweepEntry {
    pub lambda: ExactValue,
    pub value: ExactValue,
    pub omitted_measure: ExactValue,
    pub minimal_size: usize,
    pub maximal_size: usize,
}

#[derive(Serialize, Debug)]
pub struct SweepReport {
    pub scenario: ScenarioEcho,
    pub variant: Variant,
    pub runs: Vec<SweepEntry>,
    pub nested: bool,
    /// Nesting is only guaranteed for the inside-only functional.
    pub nesting_expected: bool,
    pub concave_nondecreasing: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<u64>,
}

#[derive(Serialize, Debug)]
pub struct ProbeEntry {
    pub size: usize,
    pub measure: ExactValue,
    pub perimeter: ExactValue,
    pub relative_perimeter: ExactValue,
    pub best_extension: Option<ExactValue>,
    pub ratio: Option<f64>,
    pub violates_step3: bool,
}

#[derive(Serialize, Debug)]
pub struct ProbeReport {
    pub scenario: ScenarioEcho,
    pub source: String,
    pub set_size: usize,
    pub summary: ExtensionSummary,
    pub probes: Vec<ProbeEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<u64>,
}

/// Exit status for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::ResolutionExhausted(_) => EXIT_RESOLUTION,
        Error::InvalidVertex(..)
        | Error::CapacityScale(_)
        | Error::InvalidSpace(_)
        | Error::ConflictingIdentification { .. }
        | Error::Precondition(_) => EXIT_MALFORMED,
        Error::Infeasible | Error::UndefinedRatio | Error::NoEscape(_) | Error::Invariant(_) => EXIT_FAILURE,
    }
}

fn io_error(path: &Path, e: std::io::Error) -> Error {
    Error::Invariant(format!("cannot write {}: {e}", path.display()))
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
    let path = dir.join(name);
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::Invariant(e.to_string()))?;
    text.push('\n');
    std::fs::write(&path, text).map_err(|e| io_error(&path, e))?;
    Ok(path)
}

fn write_masks(dir: &Path, scenario: &Scenario, result: &MinimizerResult) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
    for (i, chart) in scenario.space.charts().iter().enumerate() {
        for (kind, set) in [("minimal", &result.minimal_set), ("maximal", &result.maximal_set)] {
            let path = dir.join(format!("{kind}-chart{i}.pgm"));
            std::fs::write(&path, mask_pgm(chart, set)).map_err(|e| io_error(&path, e))?;
        }
    }
    Ok(())
}

fn load(common: &Common) -> Result<Scenario> {
    ScenarioFile::read(&common.scenario)?.build(env_scale()?)
}

fn timing(start: Instant, no_timing: bool) -> Option<u64> {
    (!no_timing).then(|| start.elapsed().as_millis() as u64)
}

fn cmd_minimize(
    common: &Common,
    lambda: Option<&str>,
    epsilon: Option<&str>,
    probes: usize,
    seed: u64,
) -> Result<i32> {
    let start = Instant::now();
    let scenario = load(common)?;
    let space = &scenario.space;
    let variant = common.variant.map_or(scenario.variant, Variant::from);
    let (lam, estimate) = match (lambda, epsilon) {
        (Some(l), None) => (dyadic_ceil(parse_quantity(l)?, space.scale())?, None),
        (None, Some(e)) => {
            let eps = dyadic_floor(parse_quantity(e)?, space.scale())?;
            if eps.is_zero() {
                return Err(Error::ResolutionExhausted(format!("ε = {e} is below the capacity scale")));
            }
            let est = estimate_lambda(space, &scenario.omega, eps)?;
            (est.lambda, Some((eps, est)))
        }
        _ => return Err(Error::Precondition("give exactly one of --lambda and --epsilon".into())),
    };
    let result = minimize(&Problem::new(space, scenario.omega.clone(), lam, variant)?)?;
    let omitted = space.measure_of(&scenario.omega.difference(&result.minimal_set));
    let mut status = 0;
    let lambda_estimate = estimate.map(|(eps, est)| {
        let budget_met = if est.trivial { omitted <= eps } else { omitted < eps };
        if !budget_met {
            status = EXIT_FAILURE;
        }
        LambdaReport {
            epsilon: eps.into(),
            r: est.r.map(Into::into),
            layer_mass: est.layer_mass.into(),
            min_layer_perimeter: est.min_layer_perimeter.into(),
            layer_variation: est.layer_variation.into(),
            mass_bound_holds: est.mass_bound_holds,
            trivial: est.trivial,
            budget_met,
        }
    });
    let extension = if probes > 0 {
        let sets = sample_probes(space, &result.minimal_set, probes, seed)?;
        let report = check_step3(space, &result.minimal_set, lam, &sets, false)?;
        if variant == Variant::InsideOnly && report.step3_violations > 0 {
            status = EXIT_FAILURE;
        }
        Some(ExtensionSummary::new(&report, seed))
    } else {
        None
    };
    write_masks(&common.out, &scenario, &result)?;
    let report = RunReport {
        scenario: ScenarioEcho::new(&scenario),
        lambda: lam.into(),
        variant,
        value: result.value.into(),
        omitted_measure: omitted.into(),
        minimal_size: result.minimal_set.len(),
        maximal_size: result.maximal_set.len(),
        lambda_estimate,
        extension,
        timing_ms: timing(start, common.no_timing),
    };
    let path = write_json(&common.out, "report.json", &report)?;
    println!("value {} ({}), report {}", report.value.decimal, variant_name(variant), path.display());
    Ok(status)
}

fn variant_name(v: Variant) -> &'static str {
    match v {
        Variant::InsideOnly => "inside",
        Variant::SymmetricDifference => "symdiff",
    }
}

fn cmd_sweep(common: &Common, lambdas: &[String]) -> Result<i32> {
    let start = Instant::now();
    let scenario = load(common)?;
    let space = &scenario.space;
    let variant = common.variant.map_or(scenario.variant, Variant::from);
    let lams = lambdas
        .iter()
        .map(|l| dyadic_ceil(parse_quantity(l)?, space.scale()))
        .collect::<Result<Vec<Dyadic>>>()?;
    if lams.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Precondition("λ list must be strictly increasing".into()));
    }
    let results = lams
        .iter()
        .map(|&l| minimize(&Problem::new(space, scenario.omega.clone(), l, variant)?))
        .collect::<Result<Vec<_>>>()?;
    let nested = is_nested(&results);
    let report = SweepReport {
        scenario: ScenarioEcho::new(&scenario),
        variant,
        runs: results
            .iter()
            .map(|r| SweepEntry {
                lambda: r.lambda.into(),
                value: r.value.into(),
                omitted_measure: space.measure_of(&scenario.omega.difference(&r.minimal_set)).into(),
                minimal_size: r.minimal_set.len(),
                maximal_size: r.maximal_set.len(),
            })
            .collect(),
        nested,
        nesting_expected: variant == Variant::InsideOnly,
        concave_nondecreasing: is_concave_nondecreasing(&results),
        timing_ms: timing(start, common.no_timing),
    };
    let path = write_json(&common.out, "sweep.json", &report)?;
    println!("nested {nested}, report {}", path.display());
    let failed = (variant == Variant::InsideOnly && !nested) || !report.concave_nondecreasing;
    Ok(if failed { EXIT_FAILURE } else { 0 })
}

fn cmd_probe(common: &Common, lambda: Option<&str>, masks: &[PathBuf], probes: usize, seed: u64) -> Result<i32> {
    let start = Instant::now();
    let scenario = load(common)?;
    let space = &scenario.space;
    let variant = common.variant.map_or(scenario.variant, Variant::from);
    let lam = match lambda {
        Some(l) => dyadic_ceil(parse_quantity(l)?, space.scale())?,
        None => scenario.lambda,
    };
    let (set, source) = if masks.is_empty() {
        let r = minimize(&Problem::new(space, scenario.omega.clone(), lam, variant)?)?;
        (r.minimal_set, "minimizer")
    } else {
        (read_masks(space, masks)?, "mask")
    };
    let sets = sample_probes(space, &set, probes, seed)?;
    let report = check_step3(space, &set, lam, &sets, true)?;
    let out = ProbeReport {
        scenario: ScenarioEcho::new(&scenario),
        source: source.into(),
        set_size: set.len(),
        summary: ExtensionSummary::new(&report, seed),
        probes: report
            .probes
            .iter()
            .map(|p| ProbeEntry {
                size: p.set.len(),
                measure: p.measure.into(),
                perimeter: p.perimeter.into(),
                relative_perimeter: p.relative_perimeter.into(),
                best_extension: p.best_extension.map(Into::into),
                ratio: p.ratio.map(|r| r.to_f64()),
                violates_step3: p.violates_step3,
            })
            .collect(),
        timing_ms: timing(start, common.no_timing),
    };
    let path = write_json(&common.out, "extension.json", &out)?;
    println!(
        "{} probes, {} violations, report {}",
        out.summary.probes,
        out.summary.step3_violations,
        path.display()
    );
    let failed = source == "minimizer" && report.step3_violations > 0;
    Ok(if failed { EXIT_FAILURE } else { 0 })
}

fn cmd_check(suite: &str, seed: u64) -> Result<i32> {
    let outcomes = run_suite(suite, seed)?;
    let mut stdout = std::io::stdout().lock();
    for o in &outcomes {
        let _ = writeln!(stdout, "{} {}: {}", if o.passed { "PASS" } else { "FAIL" }, o.name, o.detail);
    }
    Ok(if outcomes.iter().all(|o| o.passed) { 0 } else { EXIT_FAILURE })
}

/// Parses arguments, runs the command and returns the process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_MALFORMED } else { 0 };
        }
    };
    let outcome = match &cli.command {
        Command::Minimize {
            common,
            lambda,
            epsilon,
            probes,
            seed,
        } => cmd_minimize(common, lambda.as_deref(), epsilon.as_deref(), *probes, *seed),
        Command::Sweep { common, lambdas } => cmd_sweep(common, lambdas),
        Command::Probe {
            common,
            lambda,
            mask,
            probes,
            seed,
        } => cmd_probe(common, lambda.as_deref(), mask, *probes, *seed),
        Command::Check { suite, seed } => cmd_check(suite, *seed),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("perimin: {e}");
            exit_code(&e)
        }
    }
}
