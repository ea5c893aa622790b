use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use ruijsenaars_cli::config::{env_precision, ConfigFile, IdentitySelection, Overrides, SuiteConfig};
use ruijsenaars_cli::eval;
use ruijsenaars_cli::suite::run_suite;
use ruijsenaars_cli::{CliError, EXIT_INFRASTRUCTURE, EXIT_USAGE};
use ruijsenaars_core::operator_core::OperatorKind;
use ruijsenaars_core::quadrature_verify::{DEFAULT_VERIFY_PRECISION, IDENTITIES};
use ruijsenaars_core::scalar_ring::DEFAULT_PRECISION;

#[derive(Parser, Debug)]
#[command(name = "ruijsenaars", version, about = "Elliptic Macdonald theory and Q-operator identity checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run identity verifications and write a JSON suite report
    Verify {
        /// TOML suite configuration; flags override its values
        #[arg(long)]
        config: Option<PathBuf>,
        /// run only this identity (replaces the config's identity list)
        #[arg(long)]
        identity: Option<String>,
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// operator order k, or m for the Rains transform
        #[arg(long, default_value_t = 1)]
        k: usize,
        /// comma-separated parts, negatives allowed
        #[arg(long, allow_hyphen_values = true)]
        lambda: Option<String>,
        /// number of seeds, 0..k
        #[arg(long)]
        seeds: Option<u64>,
        #[arg(long)]
        prec: Option<u32>,
        /// quadrature cap, points per dimension
        #[arg(long)]
        quad: Option<usize>,
        /// quadrature convergence tolerance
        #[arg(long)]
        tol: Option<f64>,
        /// pass threshold override
        #[arg(long)]
        threshold: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate a function or expansion
    Eval {
        #[command(subcommand)]
        kind: EvalKind,
    },
    /// List the registered identities
    ListIdentities,
}

#[derive(Subcommand, Debug)]
enum EvalKind {
    /// θ(x; p)
    Theta {
        #[arg(long, allow_hyphen_values = true)]
        p: String,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long)]
        prec: Option<u32>,
    },
    /// Γ(x; p, q)
    Gamma {
        #[arg(long, allow_hyphen_values = true)]
        p: String,
        #[arg(long, allow_hyphen_values = true)]
        q: String,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long)]
        prec: Option<u32>,
    },
    /// P_λ in the monomial basis
    Macdonald {
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
        #[arg(long)]
        n: Option<usize>,
    },
    /// 𝐏_λ(x; p) to order p^K
    Emacdonald {
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 1)]
        order: usize,
    },
    /// c^m coefficient of the kernel function and its diagonal form
    KernelExpand {
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        m: i32,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        order: usize,
    },
    /// Apply a difference operator to m_λ (or P_λ)
    Apply {
        /// ruijsenaars, noumi-sano or noumi-sano-gauged
        #[arg(long, default_value = "ruijsenaars")]
        op: String,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 0)]
        order: usize,
        /// act on P_λ instead of m_λ
        #[arg(long)]
        macdonald: bool,
    },
}

fn numeric_prec(flag: Option<u32>) -> Result<u32, CliError> {
    Ok(match flag {
        Some(p) => p,
        None => env_precision()?.unwrap_or(DEFAULT_PRECISION),
    })
}

fn run_eval(kind: EvalKind) -> Result<String, CliError> {
    match kind {
        EvalKind::Theta { p, x, prec } => eval::eval_theta(&p, &x, numeric_prec(prec)?),
        EvalKind::Gamma { p, q, x, prec } => eval::eval_gamma(&p, &q, &x, numeric_prec(prec)?),
        EvalKind::Macdonald { lambda, n } => eval::eval_macdonald(&eval::parse_partition(&lambda, n)?),
        EvalKind::Emacdonald { lambda, n, order } => eval::eval_emacdonald(&eval::parse_partition(&lambda, n)?, order),
        EvalKind::KernelExpand { m, n, order } => eval::eval_kernel(m, n, order),
        EvalKind::Apply { op, k, lambda, n, order, macdonald } => {
            let kind = OperatorKind::from_name(&op).ok_or_else(|| CliError::Usage(format!("unknown operator '{op}'")))?;
            eval::eval_apply(kind, k, &eval::parse_partition(&lambda, n)?, order, macdonald)
        }
    }
}

fn fail(e: CliError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(e.exit_code() as u8)
}

#[allow(clippy::too_many_arguments)]
fn run_verify(
    config: Option<PathBuf>,
    identity: Option<String>,
    n: usize,
    k: usize,
    lambda: Option<String>,
    seeds: Option<u64>,
    prec: Option<u32>,
    quad: Option<usize>,
    tol: Option<f64>,
    threshold: Option<f64>,
    out: Option<PathBuf>,
) -> Result<i32, CliError> {
    let file = match &config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    let identity = match identity {
        Some(id) => {
            let mut sel = IdentitySelection::new(&id, n, k);
            sel.lambda = lambda.as_deref().map(|l| eval::parse_partition(l, Some(n))).transpose()?;
            Some(sel)
        }
        None if lambda.is_some() => return Err(CliError::Usage("--lambda needs --identity".into())),
        None => None,
    };
    let flags = Overrides { precision_bits: prec, tolerance: tol, quad_cap: quad, seeds, identity, threshold, output: out };
    let cfg = SuiteConfig::resolve(file, flags)?;
    let report = run_suite(&cfg);
    for run in &report.runs {
        for r in &run.reports {
            eprintln!(
                "{} n={} seed={}: {} (residual {:.3e}, threshold {:.1e})",
                r.identity,
                r.n,
                r.seed.map(|s| s.to_string()).unwrap_or_default(),
                if r.pass { "pass" } else { "FAIL" },
                r.worst_residual(),
                r.threshold
            );
        }
        for e in &run.errors {
            eprintln!("{} n={} seed={}: error: {}", run.selection.id, run.selection.n, e.seed, e.message);
        }
    }
    let s = &report.summary;
    eprintln!("{} runs: {} passed, {} failed, {} errors", s.total, s.passed, s.failed, s.errors);
    let json = serde_json::to_string_pretty(&report).map_err(|e| CliError::Io(e.to_string()))?;
    match &cfg.output {
        Some(path) => std::fs::write(path, json + "\n").map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?,
        None => println!("{json}"),
    }
    Ok(report.exit_code())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE as u8 } else { 0 });
        }
    };
    match cli.command {
        Command::ListIdentities => {
            for (id, what) in IDENTITIES {
                println!("{id:<16} {what}");
            }
            println!("default verification precision: {DEFAULT_VERIFY_PRECISION} bits");
            ExitCode::SUCCESS
        }
        Command::Eval { kind } => match run_eval(kind) {
            Ok(s) => {
                println!("{s}");
                ExitCode::SUCCESS
            }
            Err(e) => fail(e),
        },
        Command::Verify { config, identity, n, k, lambda, seeds, prec, quad, tol, threshold, out } => {
            match run_verify(config, identity, n, k, lambda, seeds, prec, quad, tol, threshold, out) {
                Ok(code) => ExitCode::from(code as u8),
                Err(e @ CliError::Io(_)) => {
                    eprintln!("error: {e}");
                    ExitCode::from(EXIT_INFRASTRUCTURE as u8)
                }
                Err(e) => fail(e),
            }
        }
    }
}
