//! Command-line front end. Exit codes: 0 clean, 1 discrepancy,
//! 2 indeterminate, 3 usage or input error.

use std::ffi::OsString;
use std::io::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::factorisation::{is_base_label, Factorisation};
use crate::group::{classify_label, ClosurePolicy, LabelClass};
use crate::hypergraph::{overlap_algebraic, pair_overlap, OverlapResult, SearchBudget};
use crate::projective::{Label, ProjectiveLine};
use crate::verifier::{
    self, check_c1f, check_hb1f, check_u1f, render_text, run_suite, trace_condition_scan, HbOptions, PairMode,
    PropertyReport, SuiteConfig, TripleMode,
};

pub const EXIT_USAGE: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "hyperfactor",
    version,
    about = "Build and verify the PSL(2,q) 1-factorisations of K^3_{q+1}"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write the factorisation in the dump format.
    Construct {
        #[arg(long)]
        q: u32,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print infinity as `inf` instead of its index.
        #[arg(long)]
        human: bool,
    },
    /// Decide one property of the factorisation.
    Check(CheckArgs),
    /// Overlap of F_(1,0) with F_(alpha,beta), combinatorially and algebraically.
    Overlap {
        #[arg(long)]
        q: u32,
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        #[arg(long, allow_hyphen_values = true)]
        beta: String,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Order and class of the group generated by f and m_(alpha,beta).
    Subgroup {
        #[arg(long)]
        q: u32,
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        #[arg(long, allow_hyphen_values = true)]
        beta: String,
        /// Compute the full closure instead of stopping past order 60.
        #[arg(long)]
        exact: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Trace-condition scan over GF(2^l).
    ScanTrace {
        #[arg(long)]
        ell: u32,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run the verification suite.
    Suite {
        /// TOML config; the built-in profile is used when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Profile::Default)]
        profile: Profile,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PropertyArg {
    C1f,
    U1f,
    Uc1f,
    Hb1f,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Reduced,
    Full,
    Sampled,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Profile {
    Default,
    Slow,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[arg(value_enum)]
    pub property: PropertyArg,
    #[arg(long)]
    pub q: u32,
    #[arg(long, value_enum, default_value_t = ModeArg::Reduced)]
    pub mode: ModeArg,
    /// Number of sampled triples.
    #[arg(long, required_if_eq("mode", "sampled"))]
    pub n: Option<usize>,
    #[arg(long, required_if_eq("mode", "sampled"))]
    pub seed: Option<u64>,
    /// Time limit per Hamilton cycle search, in milliseconds.
    #[arg(long, default_value_t = 10_000)]
    pub budget_ms: u64,
    /// Resume file for triple sweeps.
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
    /// Include elapsed times in the report.
    #[arg(long)]
    pub timings: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Verify(#[from] verifier::VerifyError),
    #[error(transparent)]
    Factor(#[from] crate::factorisation::FactorError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Parses `args` and runs the command, returning the exit code.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

pub fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Construct { q, out, human } => {
            let fam = Factorisation::with_order(q)?;
            emit(&out, &fam.dump(human))?;
            Ok(0)
        }
        Command::Check(args) => cmd_check(args),
        Command::Overlap { q, alpha, beta, output } => {
            let fam = Factorisation::with_order(q)?;
            let label = parse_label(&fam, &alpha, &beta)?;
            if is_base_label(fam.field(), label) {
                return Err(CliError::Usage(format!("{label} labels F_(1,0) itself")));
            }
            let j = fam.index_of(label).expect("alpha is nonzero");
            #[derive(Serialize)]
            struct Out {
                q: u32,
                alpha: u32,
                beta: u32,
                combinatorial: OverlapResult,
                algebraic: OverlapResult,
            }
            let o = Out {
                q,
                alpha: label.alpha.index(),
                beta: label.beta.index(),
                combinatorial: pair_overlap(fam.factor(0), fam.factor(j)).expect("distinct factors"),
                algebraic: overlap_algebraic(fam.field(), label).expect("not the base factor"),
            };
            let text = format!(
                "q={} label={} overlap={} algebraic={} f=m:{:?} f^-1=m:{:?}\n",
                q,
                label,
                o.combinatorial.count,
                o.algebraic.count,
                o.algebraic.f_eq_m.as_deref().unwrap_or_default(),
                o.algebraic.finv_eq_m.as_deref().unwrap_or_default()
            );
            write_output(&output, &o, text)?;
            Ok(if o.combinatorial.count == o.algebraic.count {
                0
            } else {
                1
            })
        }
        Command::Subgroup {
            q,
            alpha,
            beta,
            exact,
            output,
        } => {
            let fam = Factorisation::with_order(q)?;
            let label = parse_label(&fam, &alpha, &beta)?;
            if is_base_label(fam.field(), label) {
                return Err(CliError::Usage(format!("{label} labels F_(1,0) itself")));
            }
            let line = ProjectiveLine::new(fam.field());
            let policy = if exact {
                ClosurePolicy::Exact
            } else {
                ClosurePolicy::EarlyExit
            };
            let c: LabelClass = classify_label(&line, label, policy);
            let order = c.order.map_or_else(|| ">60".to_string(), |n| n.to_string());
            let text = format!(
                "q={q} label={label} order={order} class={} transitive={}\n",
                c.class, c.transitive
            );
            write_output(&output, &c, text)?;
            Ok(0)
        }
        Command::ScanTrace { ell, output } => {
            let s = trace_condition_scan(ell)?;
            let text = format!(
                "l={} trace_zero_witnesses={} all_trace1={} roots={} bound={} degree={}\n",
                s.ell,
                s.trace_zero_witnesses.len(),
                s.all_trace1,
                s.poly_root_count,
                s.root_bound,
                s.poly_degree
            );
            write_output(&output, &s, text)?;
            Ok(0)
        }
        Command::Suite {
            config,
            profile,
            output,
        } => {
            let config = match config {
                Some(path) => SuiteConfig::from_toml(&std::fs::read_to_string(path)?)?,
                None => match profile {
                    Profile::Default => SuiteConfig::default_suite(),
                    Profile::Slow => SuiteConfig::slow_suite(),
                },
            };
            let report = run_suite(&config)?;
            write_output(&output, &report, render_text(&report))?;
            Ok(report.exit_code())
        }
    }
}

fn cmd_check(args: CheckArgs) -> Result<i32, CliError> {
    let fam = Factorisation::with_order(args.q)?;
    let report: PropertyReport = match args.property {
        PropertyArg::C1f => {
            let mode = match args.mode {
                ModeArg::Reduced => PairMode::Reduced,
                ModeArg::Full => PairMode::Full,
                ModeArg::Sampled => return Err(CliError::Usage("c1f has no sampled mode".into())),
            };
            check_c1f(&fam, mode, args.timings)?
        }
        PropertyArg::U1f | PropertyArg::Uc1f => {
            if args.mode != ModeArg::Reduced {
                return Err(CliError::Usage("u1f and uc1f only run in reduced mode".into()));
            }
            let r = check_u1f(&fam, args.timings)?;
            if args.property == PropertyArg::U1f {
                r.u1f
            } else {
                r.uc1f
            }
        }
        PropertyArg::Hb1f => {
            let mode = match args.mode {
                ModeArg::Reduced => TripleMode::Reduced,
                ModeArg::Full => TripleMode::Full,
                ModeArg::Sampled => TripleMode::Sampled {
                    n: args.n.expect("required by clap"),
                    seed: args.seed.expect("required by clap"),
                },
            };
            let opts = HbOptions {
                mode,
                budget: SearchBudget::millis(args.budget_ms),
                checkpoint: args.checkpoint.clone(),
                timings: args.timings,
            };
            check_hb1f(&fam, &opts)?
        }
    };
    let mut text = format!(
        "q={} {} [{}] computed={} predicted={} tasks={}\n",
        args.q, report.name, report.mode, report.computed, report.predicted, report.stats.tasks
    );
    if let Some(w) = &report.witness {
        text.push_str(&format!("witness {}\n", serde_json::to_string(w).unwrap_or_default()));
    }
    write_output(&args.output, &report, text)?;
    Ok(verifier::exit_code([&report]))
}

fn parse_label(fam: &Factorisation, alpha: &str, beta: &str) -> Result<Label, CliError> {
    let f = fam.field();
    let parse = |s: &str| f.parse(s).map_err(|e| CliError::Usage(e.to_string()));
    let label = Label::new(parse(alpha)?, parse(beta)?);
    if label.alpha.is_zero() {
        return Err(CliError::Usage("alpha must be nonzero".into()));
    }
    Ok(label)
}

fn write_output<T: Serialize>(output: &OutputArgs, value: &T, text: String) -> Result<(), CliError> {
    let body = match output.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(value).expect("reports serialise");
            s.push('\n');
            s
        }
        Format::Text => text,
    };
    emit(&output.out, &body)
}

fn emit(out: &Option<PathBuf>, body: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, body)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(body.as_bytes())?;
            stdout.flush()?;
        }
    }
    Ok(())
}
