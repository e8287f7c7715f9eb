use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use modinv::commutant::{EnumerationOptions, DEFAULT_NODE_BUDGET};
use modinv::cyclo::{parse_rational, Rational};
use modinv::fusion::{builtin_cyclic, builtin_so_level1, builtin_su2, FusionRing};
use modinv::modular::{compute_modular_data, exact_axiom_checks, exact_data, AxiomReport};
use modinv::pipeline::{self, PipelineError, Target};
use modinv::report::{check_text, Report};
use modinv::ringfile::{RingFile, RingFileError};

const SUCCESS: u8 = 0;
const FAILURE: u8 = 1;
const USAGE: u8 = 2;
const BUDGET: u8 = 3;

#[derive(Parser)]
#[command(name = "modinv", version, about = "Modular data, modular invariants and their classification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print a built-in ring file
    Builtin {
        #[command(subcommand)]
        family: Family,
    },
    /// Validate a ring and check the statistics axioms
    Check { ring: PathBuf },
    /// Compute Y, Ω, S, T, z and c
    Modular {
        ring: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Enumerate all modular invariants
    Invariants(SearchArgs),
    /// Enumerate and classify modular invariants
    Classify {
        #[command(flatten)]
        search: SearchArgs,
        /// Index into the invariant list or path to a JSON matrix
        #[arg(long)]
        invariant: Option<String>,
    },
}

#[derive(Subcommand)]
enum Family {
    Su2 {
        #[arg(long)]
        level: u32,
    },
    #[command(name = "so-level1")]
    SoLevel1 {
        #[arg(long)]
        n: u32,
    },
    Cyclic {
        #[arg(long)]
        n: u32,
        /// Comma-separated twists "p/q"; all zero when omitted
        #[arg(long, value_delimiter = ',')]
        twists: Option<Vec<String>>,
    },
}

#[derive(Args)]
struct SearchArgs {
    /// Ring file, or "-" for standard input
    ring: PathBuf,
    /// Multiplies the pivot bounds d_a d_b
    #[arg(long, default_value = "1", value_parser = positive_rational)]
    bound_scale: Rational,
    #[arg(long, env = "MODINV_NODE_BUDGET", default_value_t = DEFAULT_NODE_BUDGET)]
    node_budget: u64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Worker threads for the search (default: all cores)
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    workers: Option<u64>,
    /// Allow rings whose dimensions are computed numerically
    #[arg(long)]
    numeric: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Markdown,
}

fn positive_rational(s: &str) -> Result<Rational, String> {
    let r = parse_rational(s).map_err(|e| e.to_string())?;
    if r > Rational::from_integer(0.into()) {
        Ok(r)
    } else {
        Err("must be positive".into())
    }
}

struct Fail(u8, String);

impl From<RingFileError> for Fail {
    fn from(e: RingFileError) -> Self {
        let code = if matches!(e, RingFileError::Invalid(_)) { FAILURE } else { USAGE };
        Fail(code, e.to_string())
    }
}

fn read_input(path: &Path) -> Result<String, Fail> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| Fail(USAGE, format!("stdin: {e}")))?;
        Ok(s)
    } else {
        std::fs::read_to_string(path).map_err(|e| Fail(USAGE, format!("{}: {e}", path.display())))
    }
}

fn load(path: &Path) -> Result<FusionRing, Fail> {
    Ok(RingFile::parse(&read_input(path)?)?.to_ring()?)
}

fn emit(report: &Report, format: Format) {
    match format {
        Format::Json => print!("{}", report.to_json()),
        Format::Markdown => print!("{}", report.to_markdown()),
    }
}

fn builtin(family: Family) -> Result<u8, Fail> {
    let ring = match family {
        Family::Su2 { level } => builtin_su2(level),
        Family::SoLevel1 { n } => builtin_so_level1(n).map_err(|e| Fail(USAGE, e.to_string()))?,
        Family::Cyclic { n, twists } => {
            let twists = match twists {
                Some(t) => t.iter().map(|s| parse_rational(s).map_err(|e| Fail(USAGE, format!("--twists: {e}")))).collect::<Result<Vec<_>, _>>()?,
                None => vec![Rational::from_integer(0.into()); n as usize],
            };
            builtin_cyclic(n, &twists).map_err(|e| Fail(USAGE, e.to_string()))?
        }
    };
    print!("{}", RingFile::from_ring(&ring).to_json());
    Ok(SUCCESS)
}

fn check(path: &Path) -> Result<u8, Fail> {
    let ring = RingFile::parse(&read_input(path)?)?.to_ring_unchecked()?;
    let validation = ring.validate();
    let violations: Vec<String> = validation.violations.iter().map(ToString::to_string).collect();
    if !violations.is_empty() {
        print!("{}", check_text(&Default::default(), &violations));
        return Ok(FAILURE);
    }
    match compute_modular_data(&ring) {
        Ok(md) => {
            let axioms = md.verify_statistics_axioms();
            print!("{}", check_text(&axioms, &[]));
            for w in md.warnings() {
                println!("warning: {w}");
            }
            Ok(if axioms.all_passed() { SUCCESS } else { FAILURE })
        }
        Err(e) => {
            // still show which exact axioms break
            let checks = exact_data(&ring).map(|ex| AxiomReport { checks: exact_axiom_checks(&ring, &ex) }).unwrap_or_default();
            print!("{}", check_text(&checks, &[]));
            println!("[FAIL] modular data: {e}");
            Ok(FAILURE)
        }
    }
}

fn modular(path: &Path, format: Format) -> Result<u8, Fail> {
    let md = compute_modular_data(&load(path)?).map_err(|e| Fail(FAILURE, e.to_string()))?;
    emit(&Report::new(&md), format);
    Ok(SUCCESS)
}

fn search(args: &SearchArgs, classify: bool, invariant: Option<&str>) -> Result<u8, Fail> {
    let ring = load(&args.ring)?;
    if ring.dims().is_none() && !args.numeric {
        return Err(Fail(USAGE, "ring has no exact dimensions; pass --numeric to use the unverified numeric path".into()));
    }
    let target = match invariant {
        None => None,
        Some(s) => Some(match s.parse::<usize>() {
            Ok(i) => Target::Index(i),
            Err(_) => {
                let text = read_input(Path::new(s))?;
                Target::Matrix(pipeline::parse_matrix(&text).map_err(|e| Fail(USAGE, format!("{s}: {e}")))?)
            }
        }),
    };
    let md = compute_modular_data(&ring).map_err(|e| Fail(FAILURE, e.to_string()))?;
    let opts = EnumerationOptions {
        bound_scale: args.bound_scale.clone(),
        node_budget: args.node_budget,
        workers: args.workers.map(|w| w as usize),
    };
    match pipeline::run(&md, &opts, classify, target.as_ref()) {
        Ok(out) => {
            emit(&out.report, args.format);
            if out.complete {
                Ok(SUCCESS)
            } else {
                eprintln!("node budget of {} exhausted; results are partial", args.node_budget);
                Ok(BUDGET)
            }
        }
        Err(e @ PipelineError::IndexOutOfRange { .. }) => Err(Fail(USAGE, e.to_string())),
        Err(e) => Err(Fail(FAILURE, e.to_string())),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Builtin { family } => builtin(family),
        Command::Check { ring } => check(&ring),
        Command::Modular { ring, format } => modular(&ring, format),
        Command::Invariants(args) => search(&args, false, None),
        Command::Classify { search: args, invariant } => search(&args, true, invariant.as_deref()),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Fail(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
