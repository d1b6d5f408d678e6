//! Command-line front end. [`run`] parses arguments, executes one
//! subcommand and returns the process exit code: 0 on success, 1 on a
//! numeric or verification failure, 2 on a usage error.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::cubature::{
    build_rule, verify_exactness, CubatureRule, Gamma, WeightFamily, WeightSpec,
};
use crate::error::Error;
use crate::geometry::DomainTag;
use crate::interp::{
    default_grid_2d, error_report, interpolate_fn, lebesgue_omega, lebesgue_square, loglog_slope,
};
use crate::io::{export_csv, export_json, export_plotdata};
use crate::jacobi::JacobiParams;
use crate::oracle::{montecarlo_check, ReferenceIntegrator};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "mincub",
    version,
    about = "Gaussian and minimal cubature rules, interpolation and Lebesgue constants"
)]
struct Cli {
    /// Size of the worker pool; outputs do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a cubature rule and write it as JSON, CSV or plot data.
    Rule(RuleArgs),
    /// Check a rule's polynomial exactness against the reference integrator.
    Verify(VerifyArgs),
    /// Interpolate a built-in test function and report errors.
    Interp(InterpArgs),
    /// Estimate Lebesgue constants for a list of n.
    Lebesgue(LebesgueArgs),
    /// Write the node files of the degree-19 and degree-35 rules.
    Figures(FiguresArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Plot,
}

#[derive(Debug, Args)]
struct WeightArgs {
    #[arg(long, default_value_t = -0.5, allow_hyphen_values = true)]
    alpha: f64,
    #[arg(long, default_value_t = -0.5, allow_hyphen_values = true)]
    beta: f64,
    /// -0.5 or +0.5.
    #[arg(long, default_value = "-0.5", allow_hyphen_values = true)]
    gamma: String,
    #[arg(long, default_value = "square")]
    domain: String,
}

#[derive(Debug, Args)]
struct RuleArgs {
    #[command(flatten)]
    weight: WeightArgs,
    #[arg(long)]
    n: usize,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[command(flatten)]
    weight: WeightArgs,
    #[arg(long)]
    n: usize,
    /// Also run a seeded Monte Carlo check of the weight's total mass.
    #[arg(long)]
    seed: Option<u64>,
    /// Write the full report as JSON.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct InterpArgs {
    #[command(flatten)]
    weight: WeightArgs,
    #[arg(long, value_delimiter = ',', required = true)]
    n: Vec<usize>,
    /// Test function; see `--function list`.
    #[arg(long, default_value = "exp")]
    function: String,
    /// Points per axis of the error grid.
    #[arg(long, default_value_t = 41)]
    grid: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct LebesgueArgs {
    #[command(flatten)]
    weight: WeightArgs,
    #[arg(long, value_delimiter = ',', required = true)]
    n: Vec<usize>,
    /// Points per axis of the scan grid; defaults to max(8n, 128).
    #[arg(long)]
    grid: Option<usize>,
    /// Also write the table as CSV.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct FiguresArgs {
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

enum Failure {
    Usage(String),
    Numeric(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Numeric(e.to_string())
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

struct Outcome {
    stdout: String,
    code: i32,
}

/// Runs the command line `args` (including the program name) and returns the
/// exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.threads {
        Some(0) => Err(usage("--threads must be at least 1")),
        Some(t) => match rayon::ThreadPoolBuilder::new().num_threads(t).build() {
            Ok(pool) => pool.install(|| dispatch(cli.command)),
            Err(e) => Err(Failure::Numeric(format!("cannot start thread pool: {e}"))),
        },
        None => dispatch(cli.command),
    };
    match result {
        Ok(o) => {
            print!("{}", o.stdout);
            o.code
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            eprintln!("run `mincub --help` for usage");
            EXIT_USAGE
        }
        Err(Failure::Numeric(m)) => {
            eprintln!("error: {m}");
            EXIT_FAILURE
        }
    }
}

fn dispatch(cmd: Command) -> Result<Outcome, Failure> {
    match cmd {
        Command::Rule(a) => cmd_rule(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Interp(a) => cmd_interp(a),
        Command::Lebesgue(a) => cmd_lebesgue(a),
        Command::Figures(a) => cmd_figures(a),
    }
}

struct Validated {
    params: JacobiParams,
    gamma: Gamma,
    domain: DomainTag,
}

fn parse_gamma(s: &str) -> Result<Gamma, Failure> {
    let g: f64 = s
        .trim()
        .parse()
        .map_err(|_| usage(format!("--gamma expects -0.5 or +0.5, got '{s}'")))?;
    Gamma::from_value(g).map_err(|e| usage(e.to_string()))
}

fn validate(w: &WeightArgs) -> Result<Validated, Failure> {
    let params = JacobiParams::new(w.alpha, w.beta).map_err(|e| usage(e.to_string()))?;
    let gamma = parse_gamma(&w.gamma)?;
    let domain: DomainTag = w.domain.parse().map_err(|e: Error| usage(e.to_string()))?;
    WeightSpec::new(WeightFamily::from_domain(domain), params, gamma)
        .map_err(|e| usage(e.to_string()))?;
    Ok(Validated {
        params,
        gamma,
        domain,
    })
}

fn check_n(n: usize, gamma: Gamma) -> Result<(), Failure> {
    let min = match gamma {
        Gamma::MinusHalf => 1,
        Gamma::PlusHalf => 2,
    };
    if n < min {
        return Err(usage(format!(
            "--n must be at least {min} for gamma={}",
            gamma.value()
        )));
    }
    Ok(())
}

fn check_n_list(ns: &[usize], gamma: Gamma) -> Result<(), Failure> {
    for &n in ns {
        check_n(n, gamma)?;
    }
    if ns.windows(2).any(|w| w[0] >= w[1]) {
        return Err(usage("--n list must be strictly ascending"));
    }
    Ok(())
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text)
        .map_err(|e| Failure::Numeric(format!("cannot write {}: {e}", path.display())))
}

fn weight_sum_residual(rule: &CubatureRule) -> f64 {
    let s: f64 = rule.weights.iter().sum();
    (s - 1.0).abs()
}

fn cmd_rule(a: RuleArgs) -> Result<Outcome, Failure> {
    let v = validate(&a.weight)?;
    check_n(a.n, v.gamma)?;
    let rule = build_rule(v.domain, v.params, v.gamma, a.n)?;
    let text = match a.format {
        Format::Json => export_json(&rule),
        Format::Csv => export_csv(&rule),
        Format::Plot => export_plotdata(&rule),
    };
    let summary = format!(
        "nodes={} degree={} weight_sum_residual={:.3e}\n",
        rule.len(),
        rule.degree,
        weight_sum_residual(&rule)
    );
    let stdout = match &a.out {
        Some(p) => {
            write_file(p, &text)?;
            summary
        }
        None => {
            eprint!("{summary}");
            text
        }
    };
    Ok(Outcome {
        stdout,
        code: EXIT_OK,
    })
}

fn cmd_verify(a: VerifyArgs) -> Result<Outcome, Failure> {
    let v = validate(&a.weight)?;
    check_n(a.n, v.gamma)?;
    let rule = build_rule(v.domain, v.params, v.gamma, a.n)?;
    let oracle = ReferenceIntegrator::for_degree(rule.weight, rule.degree + 1)?;
    let report = verify_exactness(&rule, &oracle)?;
    let mut s = String::new();
    let _ = writeln!(
        s,
        "rule: domain={} n={} nodes={} degree={}",
        rule.domain,
        rule.n,
        rule.len(),
        rule.degree
    );
    for (d, pass, err) in report.strata() {
        let _ = writeln!(
            s,
            "degree {d:>3}: {} max_abs_err={err:.3e}",
            if pass { "pass" } else { "FAIL" }
        );
    }
    match &report.probe {
        Some(p) => {
            let status = if p.fails_as_expected {
                "expected-fail"
            } else {
                "unexpected-pass"
            };
            let _ = writeln!(
                s,
                "degree {:>3}: {status} max_abs_err={:.3e} (probe T_{}*T_{})",
                p.degree, p.max_abs_err, p.a, p.b
            );
        }
        None => {
            let _ = writeln!(s, "degree {:>3}: probe skipped", rule.degree + 1);
        }
    }
    if report.max_residual < 1e-9 {
        let _ = writeln!(s, "max residual < 1e-9 ({:.3e})", report.max_residual);
    } else {
        let _ = writeln!(s, "max residual = {:.3e}", report.max_residual);
    }
    if let Some(seed) = a.seed {
        match montecarlo_check(|_, _| 1.0, &rule.weight, 200_000, seed) {
            Ok(mc) => {
                let _ = writeln!(
                    s,
                    "monte carlo mass: {:.6} +- {:.2e} agrees={}",
                    mc.mean,
                    mc.stderr,
                    mc.agrees(1.0, 5.0)
                );
            }
            Err(e) => eprintln!("monte carlo check unavailable: {e}"),
        }
    }
    if let Some(p) = &a.out {
        let json =
            serde_json::to_string_pretty(&report).map_err(|e| Failure::Numeric(e.to_string()))?;
        write_file(p, &(json + "\n"))?;
    }
    let code = if report.passed { EXIT_OK } else { EXIT_FAILURE };
    Ok(Outcome { stdout: s, code })
}

/// Names of the built-in test functions.
pub const TEST_FUNCTIONS: &[&str] = &["one", "x^a*y^b (a+b <= 6)", "exp", "runge", "abs32"];

/// Resolves a registry name to a function of the domain's coordinates.
pub fn test_function(name: &str) -> Option<Box<dyn Fn(f64, f64) -> f64 + Sync>> {
    match name {
        "one" | "constant" => Some(Box::new(|_, _| 1.0)),
        "exp" => Some(Box::new(|x: f64, y: f64| (x + y).exp())),
        "runge" => Some(Box::new(|x: f64, y: f64| 1.0 / (1.0 + x * x + y * y))),
        "abs32" => Some(Box::new(|x: f64, _| x.abs().powf(1.5))),
        _ => {
            let (a, b) = parse_monomial(name)?;
            Some(Box::new(move |x: f64, y: f64| x.powi(a) * y.powi(b)))
        }
    }
}

/// `x^a*y^b`, `x^a` or `y^b` with total degree at most 6.
fn parse_monomial(name: &str) -> Option<(i32, i32)> {
    let mut a = 0;
    let mut b = 0;
    for part in name.split('*') {
        let (var, exp) = match part.split_once('^') {
            Some((v, e)) => (v, e.parse::<i32>().ok()?),
            None => (part, 1),
        };
        match var {
            "x" => a += exp,
            "y" => b += exp,
            _ => return None,
        }
    }
    (a >= 0 && b >= 0 && a + b <= 6).then_some((a, b))
}

fn cmd_interp(a: InterpArgs) -> Result<Outcome, Failure> {
    let v = validate(&a.weight)?;
    check_n_list(&a.n, v.gamma)?;
    if a.function == "list" {
        return Ok(Outcome {
            stdout: TEST_FUNCTIONS.join("\n") + "\n",
            code: EXIT_OK,
        });
    }
    let f = test_function(&a.function).ok_or_else(|| {
        usage(format!(
            "unknown function '{}'; choose one of: {}",
            a.function,
            TEST_FUNCTIONS.join(", ")
        ))
    })?;
    match (v.domain, v.gamma) {
        (DomainTag::Omega, _) | (DomainTag::Square, Gamma::MinusHalf) => {}
        (DomainTag::Square, Gamma::PlusHalf) => {
            return Err(usage(
                "square interpolation is available for gamma=-0.5 only",
            ));
        }
        (d, _) => {
            return Err(usage(format!(
                "interpolation is available on omega and square, not {d}"
            )))
        }
    }
    if a.grid < 2 {
        return Err(usage("--grid must be at least 2"));
    }
    let mut s = String::from("n,nodes,max_abs_err,mean_abs_err\n");
    for &n in &a.n {
        let rule = build_rule(v.domain, v.params, v.gamma, n)?;
        let interp = interpolate_fn(&rule, &f)?;
        let r = error_report(&interp, &f, a.grid)?;
        let _ = writeln!(s, "{n},{},{:.6e},{:.6e}", rule.len(), r.max_abs, r.mean_abs);
    }
    if let Some(p) = &a.out {
        write_file(p, &s)?;
    }
    Ok(Outcome {
        stdout: s,
        code: EXIT_OK,
    })
}

fn cmd_lebesgue(a: LebesgueArgs) -> Result<Outcome, Failure> {
    let v = validate(&a.weight)?;
    check_n_list(&a.n, v.gamma)?;
    match (v.domain, v.gamma) {
        (DomainTag::Omega, _) | (DomainTag::Square, Gamma::MinusHalf) => {}
        (DomainTag::Square, Gamma::PlusHalf) => {
            return Err(usage(
                "square Lebesgue constants are available for gamma=-0.5 only",
            ));
        }
        (d, _) => {
            return Err(usage(format!(
                "Lebesgue constants are available on omega and square, not {d}"
            )))
        }
    }
    if let Some(g) = a.grid {
        let need = 8 * a.n.iter().max().copied().unwrap_or(1);
        if g < need {
            return Err(usage(format!("--grid {g} is below 8n = {need}")));
        }
    }
    let omega = v.domain == DomainTag::Omega;
    let mut rows = Vec::new();
    for &n in &a.n {
        let grid = a.grid.unwrap_or_else(|| default_grid_2d(n));
        let (value, bound) = if omega {
            let e = lebesgue_omega(v.params, v.gamma, n, grid)?;
            (e.estimate.value, Some(e.one_d_bound))
        } else {
            (lebesgue_square(v.params, n, grid)?.value, None)
        };
        rows.push((n, value, bound));
    }
    let mut table = String::new();
    let mut csv = String::new();
    if omega {
        let _ = writeln!(
            table,
            "{:>5} {:>14} {:>14} {:>8} {:>14}",
            "n", "lambda", "lambda/log2n^2", "slope", "1d_bound"
        );
        csv.push_str("n,lambda,ratio,slope,one_d_bound\n");
    } else {
        let _ = writeln!(
            table,
            "{:>5} {:>14} {:>14} {:>8}",
            "n", "lambda", "lambda/log2n^2", "slope"
        );
        csv.push_str("n,lambda,ratio,slope\n");
    }
    for (i, &(n, value, bound)) in rows.iter().enumerate() {
        let l = (2.0 * n as f64).ln();
        let ratio = value / (l * l);
        let slope = if i == 0 {
            "n/a".to_string()
        } else {
            let (n0, v0, _) = rows[i - 1];
            match loglog_slope(&[n0 as f64, n as f64], &[v0, value]) {
                Some(sl) => format!("{sl:.4}"),
                None => "n/a".to_string(),
            }
        };
        match bound {
            Some(b) => {
                let _ = writeln!(
                    table,
                    "{n:>5} {value:>14.6} {ratio:>14.6} {slope:>8} {b:>14.6}"
                );
                let _ = writeln!(csv, "{n},{value:.10e},{ratio:.10e},{slope},{b:.10e}");
            }
            None => {
                let _ = writeln!(table, "{n:>5} {value:>14.6} {ratio:>14.6} {slope:>8}");
                let _ = writeln!(csv, "{n},{value:.10e},{ratio:.10e},{slope}");
            }
        }
    }
    if let Some(p) = &a.out {
        write_file(p, &csv)?;
    }
    let code = if rows.iter().any(|r| !r.1.is_finite()) {
        EXIT_FAILURE
    } else {
        EXIT_OK
    };
    Ok(Outcome {
        stdout: table,
        code,
    })
}

/// File name, domain, `(α, β)` and `n` of each figure data set; all use
/// `γ = -1/2`.
pub const FIGURES: &[(&str, DomainTag, (f64, f64), usize)] = &[
    ("figure2_omega.dat", DomainTag::Omega, (-0.5, -0.5), 10),
    ("figure2_star.dat", DomainTag::OmegaStar, (-0.5, -0.5), 10),
    ("figure3_rhombus.dat", DomainTag::Rhombus, (-0.5, -0.5), 5),
    (
        "figure4_square_cheb.dat",
        DomainTag::Square,
        (-0.5, -0.5),
        9,
    ),
    ("figure4_square_00.dat", DomainTag::Square, (0.0, 0.0), 9),
];

fn cmd_figures(a: FiguresArgs) -> Result<Outcome, Failure> {
    std::fs::create_dir_all(&a.out)
        .map_err(|e| Failure::Numeric(format!("cannot create {}: {e}", a.out.display())))?;
    let mut s = String::new();
    for &(name, domain, (al, be), n) in FIGURES {
        let params = JacobiParams::new(al, be)?;
        let rule = build_rule(domain, params, Gamma::MinusHalf, n)?;
        let header = format!(
            "# {} nodes of the degree-{} rule on {domain}, alpha={al} beta={be} gamma=-0.5\n",
            rule.len(),
            rule.degree
        );
        let path = a.out.join(name);
        write_file(&path, &(header + &export_plotdata(&rule)))?;
        let _ = writeln!(s, "{name}: {} points, degree {}", rule.len(), rule.degree);
    }
    Ok(Outcome {
        stdout: s,
        code: EXIT_OK,
    })
}
