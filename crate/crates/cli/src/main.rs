use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use brlab::binaryforms::{restricted_tensor, restriction_projector};
use brlab::bounds::{
    bound_classical_with, bound_koszul_with, bound_matmul_restricted_with, compare_table,
    corollary_2nl_certificate, format_table, lickteig_certificate, theorem1_certificate, BoundCertificate,
    LRule, DEFAULT_TABLE_BUDGET,
};
use brlab::exterior::koszul_flattening;
use brlab::rank::{compute_rank, RankResult, RankStrategy};
use brlab::repcomb::{kernel_dim_formula, kernel_dim_pieri};
use brlab::scalars::{default_primes, FieldTag, PrimeField};
use brlab::tensor::{matmul_tensor, rank_one_tensor, Tensor3};
use brlab::{Error, SparseMatrix};

const PRIMES_ENV: &str = "BRLAB_PRIMES";

#[derive(Parser)]
#[command(name = "brlab", version, about = "Border-rank lower bounds from exact Koszul flattenings")]
struct Cli {
    /// Increase log verbosity (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a tensor and write it as JSON.
    #[command(subcommand)]
    Tensor(TensorCmd),
    /// Print a border-rank lower-bound certificate.
    Bound(BoundArgs),
    /// Kernel dimension of the Koszul flattening of M<m,n,l>.
    KernelDim(KernelArgs),
    /// Compare classical and Koszul-type bounds for square matrix sizes.
    Table(TableArgs),
    /// Write the Koszul flattening of a tensor file as a sparse matrix.
    Koszul(KoszulArgs),
    /// Rank of a sparse matrix file.
    Rank(RankArgs),
}

#[derive(Subcommand)]
enum TensorCmd {
    /// Matrix multiplication tensor M<m,n,l>.
    Matmul {
        #[command(flatten)]
        shape: Shape,
        /// q or fp:PRIME.
        #[arg(long, default_value = "q")]
        field: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// u ⊗ v ⊗ w from comma-separated coordinates.
    RankOne {
        #[arg(long)]
        u: String,
        #[arg(long)]
        v: String,
        #[arg(long)]
        w: String,
        #[arg(long, default_value = "q")]
        field: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// M<m,n,l> with A projected onto S^{m+n-2}W*.
    Restrict {
        #[command(flatten)]
        shape: Shape,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Shape {
    #[arg(long)]
    m: usize,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    l: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Classical,
    Strassen,
    Koszul,
    KoszulRestricted,
    Theorem1Formula,
    LickteigSquare,
    Corollary2nl,
}

#[derive(Args)]
struct BoundArgs {
    #[arg(long, value_enum)]
    method: MethodArg,
    #[arg(long)]
    p: Option<usize>,
    #[arg(long, conflicts_with_all = ["m", "l"])]
    tensor: Option<PathBuf>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    l: Option<usize>,
    /// q, fp, fp:PRIME or multiprime. Default: exact over Q for small
    /// matrices, multiprime above the dense threshold.
    #[arg(long)]
    field: Option<String>,
    #[arg(long)]
    pretty: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Check {
    Pieri,
    Formula,
    Both,
    Rank,
}

#[derive(Args)]
struct KernelArgs {
    #[arg(long)]
    m: usize,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    p: usize,
    #[arg(long, default_value_t = 1)]
    l: usize,
    #[arg(long, value_enum)]
    check: Option<Check>,
}

#[derive(Args)]
struct TableArgs {
    #[arg(long)]
    n_min: usize,
    #[arg(long)]
    n_max: usize,
    /// Fixed l for every row; default l = n.
    #[arg(long)]
    l: Option<usize>,
    #[arg(long)]
    json: bool,
    /// Largest rows*cols of a restricted flattening that is actually ranked.
    #[arg(long, default_value_t = DEFAULT_TABLE_BUDGET)]
    budget: usize,
}

#[derive(Args)]
struct KoszulArgs {
    #[arg(long)]
    tensor: PathBuf,
    #[arg(long)]
    p: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write row and column labels.
    #[arg(long)]
    labels: Option<PathBuf>,
}

#[derive(Args)]
struct RankArgs {
    #[arg(long)]
    matrix: PathBuf,
    #[arg(long)]
    field: Option<String>,
}

enum Failure {
    Usage(String),
    Core(Error),
    Disagreement(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

type Outcome = std::result::Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    let outcome = match cli.command {
        Command::Tensor(cmd) => cmd_tensor(cmd),
        Command::Bound(args) => cmd_bound(args),
        Command::KernelDim(args) => cmd_kernel_dim(args),
        Command::Table(args) => cmd_table(args),
        Command::Koszul(args) => cmd_koszul(args),
        Command::Rank(args) => cmd_rank(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_arithmetic() { 3 } else { 2 })
        }
        Err(Failure::Disagreement(msg)) => {
            eprintln!("disagreement: {msg}");
            ExitCode::from(4)
        }
    }
}

fn certification_primes() -> Result<Vec<PrimeField>, Error> {
    match std::env::var(PRIMES_ENV) {
        Ok(list) if !list.trim().is_empty() => list
            .split(',')
            .map(|s| {
                let p = s
                    .trim()
                    .parse::<u64>()
                    .map_err(|_| Error::Parse(format!("bad prime {s:?} in {PRIMES_ENV}")))?;
                PrimeField::new(p)
            })
            .collect(),
        _ => Ok(default_primes(3)),
    }
}

/// Field flag for building tensors: `q` or `fp:PRIME`.
fn parse_tensor_field(s: &str) -> Result<FieldTag, Failure> {
    match s.to_ascii_lowercase().as_str() {
        "q" => Ok(FieldTag::Rationals),
        other => match other.strip_prefix("fp:") {
            Some(p) => {
                let p = p.parse::<u64>().map_err(|_| Failure::Usage(format!("bad prime in --field {s}")))?;
                Ok(FieldTag::prime(p)?)
            }
            None => Err(Failure::Usage(format!("unknown field {s:?}, expected q or fp:PRIME"))),
        },
    }
}

/// Field flag for ranks: `q`, `fp`, `fp:PRIME`, `multiprime` or unset.
fn parse_rank_strategy(s: Option<&str>) -> Result<RankStrategy, Failure> {
    let Some(s) = s else {
        return Ok(RankStrategy::AutoWithPrimes(certification_primes()?));
    };
    match s.to_ascii_lowercase().as_str() {
        "q" => Ok(RankStrategy::ExactQ),
        "multiprime" => Ok(RankStrategy::MultiPrime(certification_primes()?)),
        "fp" => Ok(RankStrategy::Prime(certification_primes()?[0])),
        other => match other.strip_prefix("fp:") {
            Some(p) => {
                let p = p.parse::<u64>().map_err(|_| Failure::Usage(format!("bad prime in --field {s}")))?;
                Ok(RankStrategy::Prime(PrimeField::new(p)?))
            }
            None => Err(Failure::Usage(format!("unknown field {s:?}, expected q, fp[:PRIME] or multiprime"))),
        },
    }
}

fn parse_vector(s: &str, field: FieldTag) -> Result<Vec<brlab::Scalar>, Error> {
    s.split(',').map(|x| field.parse_scalar(x.trim())).collect()
}

fn emit(text: &str, out: Option<&Path>) -> Outcome {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Core(e.into())),
        None => {
            println!("{}", text.trim_end());
            Ok(())
        }
    }
}

fn read_tensor(path: &Path) -> Result<Tensor3, Error> {
    Tensor3::from_json(&fs::read_to_string(path)?)
}

fn cmd_tensor(cmd: TensorCmd) -> Outcome {
    let (t, out) = match cmd {
        TensorCmd::Matmul { shape, field, out } => {
            (matmul_tensor(shape.m, shape.n, shape.l, parse_tensor_field(&field)?)?, out)
        }
        TensorCmd::RankOne { u, v, w, field, out } => {
            let field = parse_tensor_field(&field)?;
            let t = rank_one_tensor(
                &parse_vector(&u, field)?,
                &parse_vector(&v, field)?,
                &parse_vector(&w, field)?,
            )?;
            (t, out)
        }
        TensorCmd::Restrict { shape, out } => (restricted_tensor(shape.m, shape.n, shape.l)?, out),
    };
    emit(&t.to_json(), out.as_deref())
}

fn require(v: Option<usize>, flag: &str, method: &str) -> Result<usize, Failure> {
    v.ok_or_else(|| Failure::Usage(format!("--method {method} needs --{flag}")))
}

fn cmd_bound(args: BoundArgs) -> Outcome {
    let strategy = parse_rank_strategy(args.field.as_deref())?;
    let needs_tensor = matches!(args.method, MethodArg::Classical | MethodArg::Strassen | MethodArg::Koszul);
    if args.tensor.is_some() && !needs_tensor {
        return Err(Failure::Usage("this method is defined by --m/--n/--l, not a tensor file".into()));
    }
    let cert: BoundCertificate = match args.method {
        MethodArg::Classical | MethodArg::Strassen | MethodArg::Koszul => {
            let (tensor, shape) = match &args.tensor {
                Some(path) => (read_tensor(path)?, None),
                None => {
                    let name = "classical|strassen|koszul";
                    let (m, n, l) =
                        (require(args.m, "m", name)?, require(args.n, "n", name)?, args.l.unwrap_or(1));
                    (matmul_tensor(m, n, l, FieldTag::Rationals)?, Some((m, n, l)))
                }
            };
            let cert = match args.method {
                MethodArg::Classical => bound_classical_with(&tensor, &strategy)?,
                MethodArg::Strassen => bound_koszul_with(&tensor, 1, &strategy)?,
                _ => bound_koszul_with(&tensor, require(args.p, "p", "koszul")?, &strategy)?,
            };
            match shape {
                Some((m, n, l)) => cert.with_matmul(m, n, l),
                None => cert,
            }
        }
        MethodArg::KoszulRestricted => {
            let name = "koszul-restricted";
            let (m, n) = (require(args.m, "m", name)?, require(args.n, "n", name)?);
            if let Some(p) = args.p {
                if p + 1 != n {
                    return Err(Failure::Usage(format!(
                        "koszul-restricted uses p = n - 1 = {}",
                        n.saturating_sub(1)
                    )));
                }
            }
            bound_matmul_restricted_with(m, n, args.l.unwrap_or(1), &strategy)?
        }
        MethodArg::Theorem1Formula => {
            let name = "theorem1-formula";
            theorem1_certificate(
                require(args.m, "m", name)?,
                require(args.n, "n", name)?,
                args.l.unwrap_or(1),
            )?
        }
        MethodArg::Corollary2nl => {
            corollary_2nl_certificate(require(args.n, "n", "corollary-2nl")?, args.l.unwrap_or(1))?
        }
        MethodArg::LickteigSquare => lickteig_certificate(require(args.n, "n", "lickteig-square")?)?,
    };
    println!("{}", if args.pretty { cert.to_json_pretty() } else { cert.to_json() });
    Ok(())
}

fn cmd_kernel_dim(args: KernelArgs) -> Outcome {
    let KernelArgs { m, n, p, l, check } = args;
    if l == 0 {
        return Err(Failure::Usage("--l must be positive".into()));
    }
    restriction_projector(m, n)?;
    let pieri = kernel_dim_pieri(m, n, p, l)?;
    let formula = kernel_dim_formula(m, n, p, l);
    let mut report = json!({
        "m": m, "n": n, "p": p, "l": l,
        "pieri": pieri.to_string(),
    });
    match &formula {
        Ok(k) => {
            report["formula"] = json!(k.value.to_string());
            report["formula_validated"] = json!(k.validated);
        }
        Err(e) => report["formula_error"] = json!(e.to_string()),
    }

    let mut problems = Vec::new();
    let formula_value = formula.as_ref().ok().map(|k| k.value);
    if matches!(check, Some(Check::Formula | Check::Both)) && formula_value != Some(pieri) {
        problems.push(format!("formula {formula_value:?} vs pieri {pieri}"));
    }
    if check == Some(Check::Rank) {
        let k = koszul_flattening(&matmul_tensor(m, n, l, FieldTag::Rationals)?, p)?;
        let r: RankResult = compute_rank(&k.matrix, &RankStrategy::AutoWithPrimes(certification_primes()?))?;
        let kernel = (k.source_dim() - r.rank) as u128;
        report["rank"] = json!({
            "source_dim": k.source_dim(),
            "rank": r.rank,
            "kernel": kernel.to_string(),
            "field": r.field.to_string(),
        });
        if kernel != pieri {
            problems.push(format!("rank kernel {kernel} vs pieri {pieri}"));
        }
        if let Some(f) = formula.as_ref().ok().filter(|f| f.validated) {
            if f.value != kernel {
                problems.push(format!("rank kernel {kernel} vs formula {}", f.value));
            }
        }
    }
    if let Some(c) = check {
        report["check"] = json!(match c {
            Check::Pieri => "pieri",
            Check::Formula => "formula",
            Check::Both => "both",
            Check::Rank => "rank",
        });
        report["agree"] = json!(problems.is_empty());
    }
    println!("{report}");
    if problems.is_empty() {
        Ok(())
    } else {
        Err(Failure::Disagreement(problems.join("; ")))
    }
}

fn cmd_table(args: TableArgs) -> Outcome {
    if args.n_min > args.n_max {
        return Err(Failure::Usage(format!("--n-min {} exceeds --n-max {}", args.n_min, args.n_max)));
    }
    let rule = args.l.map_or(LRule::EqualN, LRule::Fixed);
    let rows = compare_table(args.n_min, args.n_max, rule, args.budget)?;
    if args.json {
        println!("{}", serde_json::to_string(&rows).map_err(|e| Failure::Core(e.into()))?);
    } else {
        print!("{}", format_table(&rows));
    }
    Ok(())
}

fn cmd_koszul(args: KoszulArgs) -> Outcome {
    let k = koszul_flattening(&read_tensor(&args.tensor)?, args.p)?;
    if let Some(path) = &args.labels {
        fs::write(path, k.labels_text()).map_err(|e| Failure::Core(e.into()))?;
    }
    emit(&k.matrix.to_text(), args.out.as_deref())
}

fn cmd_rank(args: RankArgs) -> Outcome {
    let file = fs::File::open(&args.matrix).map_err(|e| Failure::Core(e.into()))?;
    let matrix = SparseMatrix::read_from(std::io::BufReader::new(file))?;
    let r = compute_rank(&matrix, &parse_rank_strategy(args.field.as_deref())?)?;
    let report = json!({
        "rows": matrix.rows(),
        "cols": matrix.cols(),
        "rank": r.rank,
        "field": r.field.to_string(),
        "method": r.method,
        "certified_lower_bound_over_q": r.certified_lower_bound_over_q,
        "prime_ranks": r.prime_ranks,
    });
    println!("{report}");
    Ok(())
}
