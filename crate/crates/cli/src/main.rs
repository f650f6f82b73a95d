use std::io::Read;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use csrkit::applications::{
    decide_finiteness, euler_report, fractal_regularity, lss_positive_uniform, lss_uniform, Finiteness, Uniformity,
};
use csrkit::decision::{decide_with, Answer, Options};
use csrkit::generators::FamilySpec;
use csrkit::io::{family_to_json, parse_family, parse_operators};
use csrkit::radii::{radii_report, DEFAULT_CAP, DEFAULT_DEPTH};
use csrkit::subspace::{block_factorize, positive_block_factorize};
use csrkit::{CsrError, MatrixFamily};

mod output;

const EXIT_YES: u8 = 0;
const EXIT_NO: u8 = 1;
const EXIT_UNKNOWN: u8 = 2;
const EXIT_USAGE: u8 = 64;
const EXIT_DATA: u8 = 65;
const EXIT_SOFTWARE: u8 = 70;

#[derive(Parser, Debug)]
#[command(name = "csrkit", version, about = "Decide constant spectral radius for matrix families")]
struct Cli {
    /// Longest product length explored by bounded searches.
    #[arg(long, global = true, default_value_t = DEFAULT_DEPTH, value_parser = clap::value_parser!(usize))]
    depth: usize,
    /// Numerical tolerance for comparisons with one.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    /// Seed for `generate`.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    output: Format,
    /// Cap on the number of enumerated products.
    #[arg(long, global = true, default_value_t = DEFAULT_CAP)]
    cap: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Args, Debug)]
struct Input {
    /// Family file, or `-` for stdin.
    input: String,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide whether every product has spectral radius one.
    Check(Input),
    /// Block triangular factorization into irreducible blocks.
    Factor {
        #[command(flatten)]
        input: Input,
        /// Use coordinate blocks of the nonnegative family.
        #[arg(long)]
        positive: bool,
    },
    /// Lifted radii and joint/lower spectral radius bounds.
    Radii(Input),
    /// Whether an integer family generates a finite semigroup.
    Finiteness(Input),
    /// Binary partitions with digits below r.
    Euler {
        #[arg(long)]
        r: usize,
        #[arg(long, default_value_t = 1 << 16)]
        kmax: usize,
        /// Number of leading b(k) values to include in the report.
        #[arg(long, default_value_t = 32)]
        values: usize,
    },
    /// Uniformity of the switching system x' = A(t) x.
    Lss {
        #[command(flatten)]
        input: Input,
        /// Treat generators as Metzler matrices of a positive system.
        #[arg(long)]
        positive: bool,
    },
    /// Regularity of the curve of two affine contractions.
    Fractal(Input),
    /// Emit a generated family.
    Generate(GenerateArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Kind {
    Orthogonal,
    OneN,
    Kn,
    Torsion,
    Euler,
    Jordan,
}

#[derive(Args, Debug)]
struct GenerateArgs {
    #[arg(long, value_enum, conflicts_with = "spec")]
    kind: Option<Kind>,
    /// A full family description as JSON, e.g. `{"kind":"euler","r":5}`.
    #[arg(long)]
    spec: Option<String>,
    #[arg(long, default_value_t = 2)]
    dim: usize,
    #[arg(long, default_value_t = 2)]
    n: usize,
    /// Comma-separated for torsion families.
    #[arg(long, default_value = "1", value_delimiter = ',')]
    k: Vec<usize>,
    /// Block counts for torsion families.
    #[arg(long = "nvec", default_value = "2,1", value_delimiter = ',')]
    nvec: Vec<usize>,
    #[arg(long, default_value_t = 2)]
    count: usize,
    #[arg(long, default_value_t = 3)]
    r: usize,
    /// Also transpose the generated family.
    #[arg(long)]
    transpose: bool,
}

/// An error with the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl From<CsrError> for Failure {
    fn from(e: CsrError) -> Self {
        let code = match e {
            CsrError::MalformedRational(_)
            | CsrError::DimensionMismatch(_)
            | CsrError::NotSquare { .. }
            | CsrError::EmptyFamily
            | CsrError::Input(_)
            | CsrError::Json(_)
            | CsrError::Precondition(_)
            | CsrError::NotIntegral
            | CsrError::NotMetzler { .. }
            | CsrError::NotContractive { .. }
            | CsrError::CrossCondition => EXIT_DATA,
            _ => EXIT_SOFTWARE,
        };
        Failure { code, message: e.to_string() }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_USAGE, message: message.into() }
}

fn read_input(path: &str) -> Result<String, Failure> {
    let mut text = String::new();
    let res = if path == "-" {
        std::io::stdin().read_to_string(&mut text).map(|_| ())
    } else {
        std::fs::read_to_string(path).map(|t| text = t)
    };
    res.map_err(|e| Failure { code: EXIT_DATA, message: format!("cannot read {path}: {e}") })?;
    Ok(text)
}

fn load_family(input: &Input) -> Result<MatrixFamily, Failure> {
    Ok(parse_family(&read_input(&input.input)?)?)
}

/// A finished job: the report and the exit code it implies.
struct Outcome {
    report: Value,
    code: u8,
}

fn to_value<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("reports serialize")
}

fn answer_code(a: Answer) -> u8 {
    match a {
        Answer::Yes => EXIT_YES,
        Answer::No => EXIT_NO,
        Answer::Unknown => EXIT_UNKNOWN,
    }
}

fn run(cli: &Cli) -> Result<Outcome, Failure> {
    if cli.depth == 0 {
        return Err(usage("--depth must be at least 1"));
    }
    if cli.tol.is_nan() || cli.tol <= 0.0 {
        return Err(usage("--tol must be positive"));
    }
    let opts = Options { depth: cli.depth, tol: cli.tol, cap: cli.cap };
    match &cli.command {
        Command::Check(input) => {
            let family = load_family(input)?;
            let verdict = decide_with(&family, &opts)?;
            let code = answer_code(verdict.answer);
            Ok(Outcome { report: json!({ "command": "check", "dim": family.dim(), "verdict": to_value(&verdict) }), code })
        }
        Command::Factor { input, positive } => {
            let family = load_family(input)?;
            let bf = if *positive { positive_block_factorize(&family)? } else { block_factorize(&family) };
            Ok(Outcome { report: json!({ "command": "factor", "factorization": to_value(&bf) }), code: EXIT_YES })
        }
        Command::Radii(input) => {
            let family = load_family(input)?;
            let report = radii_report(&family, opts.depth, opts.tol, opts.cap)?;
            Ok(Outcome { report: json!({ "command": "radii", "radii": to_value(&report) }), code: EXIT_YES })
        }
        Command::Finiteness(input) => {
            let family = load_family(input)?;
            let report = decide_finiteness(&family, opts.depth, opts.tol)?;
            let code = match report.verdict {
                Finiteness::Finite => EXIT_YES,
                Finiteness::Infinite => EXIT_NO,
                Finiteness::Unknown => EXIT_UNKNOWN,
            };
            Ok(Outcome { report: json!({ "command": "finiteness", "finiteness": to_value(&report) }), code })
        }
        Command::Euler { r, kmax, values } => {
            let mut report = euler_report(*r, *kmax, opts.depth, opts.tol)?;
            report.b_values.truncate(*values);
            let code = answer_code(report.csr_verdict.answer);
            Ok(Outcome { report: json!({ "command": "euler", "partition": to_value(&report) }), code })
        }
        Command::Lss { input, positive } => {
            let family = load_family(input)?;
            let (report, verdict) = if *positive {
                let r = lss_positive_uniform(&family, opts.tol)?;
                (to_value(&r), r.verdict)
            } else {
                let r = lss_uniform(&family, opts.tol)?;
                (to_value(&r), r.verdict)
            };
            let code = match verdict {
                Uniformity::Uniform => EXIT_YES,
                Uniformity::NotUniform => EXIT_NO,
                Uniformity::Unknown => EXIT_UNKNOWN,
            };
            Ok(Outcome { report: json!({ "command": "lss", "positive": positive, "lss": report }), code })
        }
        Command::Fractal(input) => {
            let (b0, b1) = parse_operators(&read_input(&input.input)?)?;
            let report = fractal_regularity(&b0, &b1, opts.depth, opts.tol)?;
            let code = if report.constant_regularity { EXIT_YES } else { EXIT_NO };
            Ok(Outcome { report: json!({ "command": "fractal", "fractal": to_value(&report) }), code })
        }
        Command::Generate(args) => {
            let spec = generate_spec(args, cli.seed)?;
            let family = spec.build()?;
            let mut doc = family_to_json(&family);
            doc["spec"] = to_value(&spec);
            Ok(Outcome { report: doc, code: EXIT_YES })
        }
    }
}

fn generate_spec(args: &GenerateArgs, seed: u64) -> Result<FamilySpec, Failure> {
    let spec = match (&args.spec, args.kind) {
        (Some(text), _) => serde_json::from_str(text).map_err(|e| usage(format!("invalid --spec: {e}")))?,
        (None, Some(kind)) => match kind {
            Kind::Orthogonal => FamilySpec::OrthogonalSubgroup { dim: args.dim, count: args.count, seed },
            Kind::OneN => FamilySpec::OneN { n: args.n, count: args.count, seed },
            Kind::Kn => FamilySpec::Kn { k: args.k[0], n: args.n, count: args.count, seed },
            Kind::Torsion => FamilySpec::Torsion { k: args.k.clone(), n: args.nvec.clone(), count: args.count, seed },
            Kind::Euler => FamilySpec::Euler { r: args.r },
            Kind::Jordan => FamilySpec::JordanCounterexample,
        },
        (None, None) => return Err(usage("generate needs --kind or --spec")),
    };
    Ok(if args.transpose { FamilySpec::TransposeOf { inner: Box::new(spec) } } else { spec })
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("CSRKIT_THREADS") else { return Ok(()) };
    let n: usize = raw.trim().parse().map_err(|_| usage(format!("CSRKIT_THREADS must be a positive integer, got {raw:?}")))?;
    if n == 0 {
        return Err(usage("CSRKIT_THREADS must be positive"));
    }
    // Only fails if a pool already exists, which cannot happen this early.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_YES };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = configure_threads().and_then(|_| run(&cli));
    match result {
        Ok(outcome) => {
            let text = match cli.output {
                Format::Json => output::json(&outcome.report),
                Format::Text => output::text(&outcome.report),
            };
            println!("{text}");
            ExitCode::from(outcome.code)
        }
        Err(f) => {
            eprintln!("csrkit: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
