#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use csmetric::audit::{
    check_classic_triangle, check_composed_triangle, check_identity_axiom, check_symmetry, Verdict,
};
use csmetric::fixed_point::{
    check_banach, estimate_contraction_factor, picard, ContractionEstimate, DEFAULT_MAX_ITER,
};
use csmetric::poly::{
    bisection_oracle, residual, solve_poly, verify_theorem_4_1, Thm41Options, Thm41Report,
    DEFAULT_X0,
};
use csmetric::sampling::{SampleConfig, DEFAULT_COUNT, DEFAULT_SEED};
use csmetric::spec::{AlphaSpec, MapSpec, SpaceSpec};
use csmetric::{CsError, SolveResult};

mod render;

const SCHEMA: &str = "csmetric/1";
const SEED_ENV: &str = "CSMETRIC_SEED";

#[derive(Parser, Debug)]
#[command(
    name = "csmetric",
    version,
    about = "Audit composed S-metric spaces and solve fixed-point problems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Sampling seed (the CSMETRIC_SEED environment variable takes precedence)
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,

    /// Number of sampled tuples per check
    #[arg(long, global = true, default_value_t = DEFAULT_COUNT)]
    samples: usize,

    /// Convergence tolerance
    #[arg(long, global = true, default_value_t = 1e-12)]
    tol: f64,

    #[arg(long, global = true, value_enum, default_value_t = Output::Text)]
    output: Output,

    /// Write the report here instead of standard output
    #[arg(long = "out", global = true)]
    out_path: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Output {
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve the degree-m polynomial equation by Picard iteration
    SolvePoly {
        #[arg(long)]
        m: u32,
        #[arg(long, default_value_t = DEFAULT_X0)]
        x0: f64,
    },
    /// Audit the axioms of a space
    VerifySpace(SpaceArgs),
    /// Estimate and check the contraction factor of a map
    CheckContraction {
        #[command(flatten)]
        space: SpaceArgs,
        #[command(flatten)]
        map: MapArgs,
        /// Factor to check C(Fq,Fh,Fw) <= r C(q,h,w) against
        #[arg(long)]
        r: Option<f64>,
    },
    /// Run Picard iteration of a map
    Iterate {
        #[command(flatten)]
        space: SpaceArgs,
        #[command(flatten)]
        map: MapArgs,
        #[arg(long)]
        x0: f64,
        #[arg(long, default_value_t = DEFAULT_MAX_ITER)]
        max_iter: usize,
    },
    /// Audit every hypothesis of the fixed-point theorem for the polynomial problem
    #[command(name = "verify-thm41")]
    VerifyThm41 {
        #[arg(long)]
        m: u32,
    },
}

#[derive(Args, Debug)]
struct SpaceArgs {
    /// Built-in space: squared_diff, discrete_nat, abs_sum, app_metric
    #[arg(long, conflicts_with_all = ["space", "space_file"])]
    builtin: Option<String>,
    /// Space document as inline JSON
    #[arg(long, conflicts_with = "space_file")]
    space: Option<String>,
    /// Space document file
    #[arg(long)]
    space_file: Option<PathBuf>,
    /// Parameters for a built-in space, comma separated
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    params: Vec<f64>,
    /// Override the composing function: a built-in id or `expr:<expression>`
    #[arg(long)]
    alpha: Option<String>,
}

#[derive(Args, Debug)]
struct MapArgs {
    /// Built-in map: identity, constant, scale, poly (overrides the document's map)
    #[arg(long)]
    map: Option<String>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    map_params: Vec<f64>,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<CsError> for Failure {
    fn from(e: CsError) -> Self {
        let code = match e {
            CsError::Escaped { .. } | CsError::Numeric(_) | CsError::Internal(_) => 1,
            _ => 2,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

#[derive(Serialize)]
struct Envelope<T: Serialize> {
    schema: &'static str,
    command: &'static str,
    passed: bool,
    #[serde(flatten)]
    body: T,
}

#[derive(Serialize)]
struct SolvePolyReport {
    m: u32,
    x0: f64,
    tol: f64,
    root: f64,
    oracle_root: f64,
    agreement: f64,
    poly_residual: f64,
    solve: SolveResult,
}

#[derive(Serialize)]
struct SpaceReport {
    space: SpaceSpec,
    seed: u64,
    samples: usize,
    checks: Vec<Verdict>,
    /// Plain S-metric triangle inequality; informational only.
    s_metric: Verdict,
}

#[derive(Serialize)]
struct ContractionReport {
    space: SpaceSpec,
    seed: u64,
    samples: usize,
    estimate: ContractionEstimate,
    banach: Option<Verdict>,
}

#[derive(Serialize)]
struct IterateReport {
    space: SpaceSpec,
    x0: f64,
    tol: f64,
    result: SolveResult,
}

impl SpaceArgs {
    fn spec(&self) -> Result<SpaceSpec, Failure> {
        let mut spec = match (&self.builtin, &self.space, &self.space_file) {
            (Some(name), None, None) => SpaceSpec {
                metric: name.clone(),
                params: self.params.clone(),
                domain: None,
                alpha: None,
                symmetric: None,
                map: None,
            },
            (None, Some(text), None) => SpaceSpec::from_json(text)?,
            (None, None, Some(path)) => {
                let text = std::fs::read_to_string(path).map_err(|e| {
                    usage(format!("cannot read space file {}: {e}", path.display()))
                })?;
                SpaceSpec::from_json(&text)?
            }
            _ => {
                return Err(usage(
                    "give exactly one of --builtin, --space, --space-file",
                ))
            }
        };
        if self.builtin.is_none() && !self.params.is_empty() {
            return Err(usage(
                "--params only applies with --builtin; put params in the space document",
            ));
        }
        if let Some(a) = &self.alpha {
            spec.alpha = Some(match a.strip_prefix("expr:") {
                Some(src) => AlphaSpec {
                    id: "expr".into(),
                    params: Vec::new(),
                    expr: Some(src.to_string()),
                },
                None => AlphaSpec {
                    id: a.clone(),
                    params: Vec::new(),
                    expr: None,
                },
            });
        }
        Ok(spec)
    }
}

fn sample_config(cli: &Cli) -> SampleConfig {
    SampleConfig {
        seed: cli.seed,
        count: cli.samples,
        ..SampleConfig::default()
    }
}

fn emit<T: Serialize>(
    cli: &Cli,
    command: &'static str,
    passed: bool,
    body: T,
) -> Result<bool, Failure> {
    let env = Envelope {
        schema: SCHEMA,
        command,
        passed,
        body,
    };
    let value = serde_json::to_value(&env).map_err(|e| Failure {
        code: 1,
        message: format!("serialize: {e}"),
    })?;
    let mut text = match cli.output {
        Output::Json => serde_json::to_string_pretty(&value).expect("values serialize"),
        Output::Text => render::text(&value),
    };
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match &cli.out_path {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| Failure {
                    code: 1,
                    message: e.to_string(),
                })?;
        }
    }
    Ok(passed)
}

fn run(cli: &Cli) -> Result<bool, Failure> {
    if !(cli.tol > 0.0) {
        return Err(usage(format!("--tol must be positive, got {}", cli.tol)));
    }
    if cli.samples == 0 {
        return Err(usage("--samples must be at least 1"));
    }
    let cfg = sample_config(cli);
    match &cli.command {
        Command::SolvePoly { m, x0 } => {
            let solve = solve_poly(*m, *x0, cli.tol)?;
            let oracle_root = bisection_oracle(*m, cli.tol * 1e-2)?;
            let root = solve.fixed_point;
            let report = SolvePolyReport {
                m: *m,
                x0: *x0,
                tol: cli.tol,
                root,
                oracle_root,
                agreement: (root - oracle_root).abs(),
                poly_residual: residual(*m, root)?,
                solve,
            };
            let passed = report.solve.converged && report.agreement <= 10.0 * cli.tol;
            emit(cli, "solve-poly", passed, report)
        }
        Command::VerifySpace(args) => {
            let spec = args.spec()?;
            let space = spec.build()?;
            let mut checks = vec![
                check_identity_axiom(&space, &cfg)?,
                check_composed_triangle(&space, &cfg)?,
            ];
            if space.symmetric_claim {
                checks.push(check_symmetry(&space, &cfg)?);
            }
            let s_metric = check_classic_triangle(&space, &cfg)?;
            let passed = checks.iter().all(|v| v.passed);
            let report = SpaceReport {
                space: SpaceSpec::describe(&space, None)?,
                seed: cfg.seed,
                samples: cfg.count,
                checks,
                s_metric,
            };
            emit(cli, "verify-space", passed, report)
        }
        Command::CheckContraction { space, map, r } => {
            let spec = space.spec()?;
            let built = spec.build()?;
            let f = resolve_map(&spec, map, &built.domain)?;
            let estimate = estimate_contraction_factor(&built, &f, &cfg)?;
            let banach = r.map(|r| check_banach(&built, &f, r, &cfg)).transpose()?;
            let passed = banach
                .as_ref()
                .map_or(estimate.sup_ratio < 1.0, |v| v.passed);
            let report = ContractionReport {
                space: SpaceSpec::describe(&built, Some(&f))?,
                seed: cfg.seed,
                samples: cfg.count,
                estimate,
                banach,
            };
            emit(cli, "check-contraction", passed, report)
        }
        Command::Iterate {
            space,
            map,
            x0,
            max_iter,
        } => {
            let spec = space.spec()?;
            let built = spec.build()?;
            let f = resolve_map(&spec, map, &built.domain)?;
            let result = picard(&built, &f, *x0, cli.tol, *max_iter)?;
            let passed = result.converged;
            let report = IterateReport {
                space: SpaceSpec::describe(&built, Some(&f))?,
                x0: *x0,
                tol: cli.tol,
                result,
            };
            emit(cli, "iterate", passed, report)
        }
        Command::VerifyThm41 { m } => {
            let opts = Thm41Options {
                samples: cfg,
                solve_tol: cli.tol,
                ..Thm41Options::default()
            };
            let report: Thm41Report = verify_theorem_4_1(*m, &opts)?;
            emit(cli, "verify-thm41", report.all_passed(), report)
        }
    }
}

fn resolve_map(
    spec: &SpaceSpec,
    args: &MapArgs,
    domain: &csmetric::PointDomain,
) -> Result<csmetric::SelfMap, Failure> {
    let map_spec = match (&args.map, &spec.map) {
        (Some(id), _) => MapSpec {
            id: id.clone(),
            params: args.map_params.clone(),
        },
        (None, Some(m)) => m.clone(),
        (None, None) => {
            return Err(usage(
                "no map given: use --map or a \"map\" entry in the space document",
            ))
        }
    };
    map_spec
        .build(domain)
        .map_err(|e| usage(format!("map: {e}")))
}

fn main() -> ExitCode {
    let mut cli = Cli::parse();
    if let Ok(raw) = std::env::var(SEED_ENV) {
        match raw.trim().parse::<u64>() {
            Ok(seed) => cli.seed = seed,
            Err(_) => {
                eprintln!("error: {SEED_ENV}={raw:?} is not an unsigned 64-bit integer");
                return ExitCode::from(2);
            }
        }
    }
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
