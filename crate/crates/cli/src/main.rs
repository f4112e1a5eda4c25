use std::collections::hash_map::RandomState;
use std::fs;
use std::hash::{BuildHasher, Hasher};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;
use tropid_core::acceptance::{run_all, Scale};
use tropid_core::csr::{
    minimize_certificate, nested_csr_expansion, singular_power_decomposition, singular_threshold, weak_csr_threshold,
    weak_csr_verify,
};
use tropid_core::identities::{
    construct_identity, construction_length, falsify, try_separate, verify_exact, ConstructOptions, ExactVerdict,
    FalsifyConfig, LengthParams, LibraryEntry, Variant, DEFAULT_EXACT_BUDGET,
};
use tropid_core::ranks::{factor_rank_exact, tropical_rank};
use tropid_core::{Identity, Monoid, TropMatrix, Word};

type Failure = Box<dyn std::error::Error>;

#[derive(Parser)]
#[command(name = "tropid", version, about = "Max-plus matrix ranks, CSR expansions and semigroup identities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tropical or factor rank of a matrix, with a certificate.
    Rank {
        #[arg(long, value_enum, default_value_t = RankArg::Tropical)]
        kind: RankArg,
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        out: Output,
    },
    /// CSR expansions of matrix powers.
    Csr {
        #[command(subcommand)]
        action: CsrAction,
    },
    /// Build, check and measure semigroup identities.
    Identity {
        #[command(subcommand)]
        action: IdentityAction,
    },
    /// Look for a small max-plus automaton telling two words apart.
    Separate {
        #[arg(long)]
        u: PathBuf,
        #[arg(long)]
        v: PathBuf,
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        sampling: Sampling,
        #[command(flatten)]
        out: Output,
    },
    /// Run the bundled acceptance criteria.
    Selftest {
        /// Reduced trial counts.
        #[arg(long)]
        quick: bool,
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum RankArg {
    Tropical,
    Factor,
}

#[derive(Subcommand)]
enum CsrAction {
    /// Compare A^t with its weak CSR expansion.
    Verify(CsrArgs),
    /// Minimized nested CSR certificate for the factor rank of A^t.
    Certify(CsrArgs),
    /// Rank-one decomposition of B^t for a singular B = A^n̄.
    Singular(CsrArgs),
}

#[derive(Args)]
struct CsrArgs {
    #[arg(long)]
    input: PathBuf,
    /// Power to expand, or `auto` for the least power the expansion is proved for.
    #[arg(long, default_value = "auto")]
    t: String,
    #[command(flatten)]
    out: Output,
}

#[derive(Subcommand)]
enum IdentityAction {
    /// Inductive step: an identity of n×n matrices from one of (n-1)×(n-1)
    /// matrices and one of n×n upper-triangular matrices.
    Build {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "ii")]
        variant: Variant,
        #[arg(long = "base-prev", visible_alias = "base-m2")]
        base_prev: PathBuf,
        #[arg(long = "base-tri", visible_alias = "base-u3")]
        base_tri: PathBuf,
        #[arg(long)]
        t: Option<u64>,
        #[arg(long)]
        nbar: Option<u64>,
        #[arg(long)]
        allow_below_threshold: bool,
        /// Falsification trials each base must survive first; 0 skips admission.
        #[arg(long, default_value_t = 1000)]
        admit_trials: u64,
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        out: Output,
    },
    /// Random falsification, optionally followed by an exact proof attempt.
    Check {
        #[arg(long)]
        file: PathBuf,
        /// Matrix size; defaults to the monoid recorded in the file.
        #[arg(long)]
        n: Option<usize>,
        /// Sample upper-triangular matrices.
        #[arg(long)]
        triangular: bool,
        #[command(flatten)]
        sampling: Sampling,
        #[arg(long)]
        exact: bool,
        #[arg(long, default_value_t = DEFAULT_EXACT_BUDGET)]
        budget: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Closed-form length of a constructed identity.
    Length {
        #[arg(long)]
        params: PathBuf,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Args)]
struct Sampling {
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = -10, allow_hyphen_values = true)]
    low: i64,
    #[arg(long, default_value_t = 10, allow_hyphen_values = true)]
    high: i64,
    /// Bottom-entry probabilities, cycled over trials.
    #[arg(long, value_delimiter = ',', default_values_t = [0.0, 0.3])]
    bottom_mass: Vec<f64>,
}

impl Sampling {
    fn config(&self) -> Result<FalsifyConfig, Failure> {
        if self.low > self.high {
            return Err(format!("empty entry range [{}, {}]", self.low, self.high).into());
        }
        if let Some(m) = self.bottom_mass.iter().find(|m| !(0.0..=1.0).contains(*m)) {
            return Err(format!("bottom mass {m} is not a probability").into());
        }
        Ok(FalsifyConfig {
            trials: self.trials,
            seed: resolve_seed(self.seed)?,
            low: self.low,
            high: self.high,
            bottom_masses: self.bottom_mass.clone(),
        })
    }
}

#[derive(Args)]
struct Output {
    /// Write the JSON artifact here; `-` writes it to standard output.
    #[arg(long)]
    output: Option<PathBuf>,
}

impl Output {
    /// Prints `line` (or the artifact when there is no line) and writes the
    /// artifact where requested.
    fn emit(&self, line: Option<String>, artifact: &impl Serialize) -> Result<(), Failure> {
        let text = serde_json::to_string_pretty(artifact)? + "\n";
        match &self.output {
            Some(p) if p.as_os_str() == "-" => print!("{text}"),
            Some(p) => {
                fs::write(p, text).map_err(|e| format!("{}: {e}", p.display()))?;
                println!("{}", line.unwrap_or_else(|| format!("wrote {}", p.display())));
            }
            None => match line {
                Some(l) => println!("{l}"),
                None => print!("{text}"),
            },
        }
        Ok(())
    }
}

enum Status {
    Done,
    Refuted,
}

fn resolve_seed(flag: Option<u64>) -> Result<u64, Failure> {
    let seed = match (flag, std::env::var("TROPID_SEED")) {
        (Some(s), _) => s,
        (None, Ok(s)) => s.trim().parse().map_err(|_| format!("TROPID_SEED={s:?} is not an unsigned integer"))?,
        (None, Err(_)) => RandomState::new().build_hasher().finish(),
    };
    eprintln!("seed: {seed}");
    Ok(seed)
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()).into())
}

fn read_matrix(path: &Path) -> Result<TropMatrix, Failure> {
    TropMatrix::from_json(&read(path)?).map_err(|e| format!("{}: {e}", path.display()).into())
}

fn read_word(path: &Path) -> Result<Word, Failure> {
    read(path)?.parse::<Word>().map_err(|e| format!("{}: {e}", path.display()).into())
}

/// A library entry (`name`, `monoid`, words) or a bare identity file.
fn read_entry(path: &Path) -> Result<LibraryEntry, Failure> {
    let text = read(path)?;
    if let Ok(entry) = LibraryEntry::from_json(&text) {
        return Ok(entry);
    }
    let id = Identity::from_json(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    let monoid = id.monoid.ok_or_else(|| format!("{}: no monoid recorded", path.display()))?;
    Ok(LibraryEntry::new_pair(&path.display().to_string(), monoid, id.u, id.v, ""))
}

fn power(arg: &str, auto: u64) -> Result<u64, Failure> {
    if arg == "auto" {
        return Ok(auto);
    }
    arg.parse().map_err(|_| format!("--t expects a nonnegative integer or auto, got {arg:?}").into())
}

fn rank(kind: RankArg, input: &Path, out: &Output) -> Result<Status, Failure> {
    let a = read_matrix(input)?;
    let report = match kind {
        RankArg::Tropical => tropical_rank(&a)?,
        RankArg::Factor => factor_rank_exact(&a, a.rows().min(a.cols()))?,
    };
    report.validate(&a)?;
    out.emit(Some(report.value.to_string()), &report)?;
    Ok(Status::Done)
}

fn csr(action: &CsrAction) -> Result<Status, Failure> {
    match action {
        CsrAction::Verify(args) => {
            let a = read_matrix(&args.input)?;
            let t = power(&args.t, weak_csr_threshold(a.order("csr verify")?))?;
            let diff = weak_csr_verify(&a, t)?;
            let line = match diff {
                None => "equal".to_string(),
                Some((i, j)) => format!("differs at ({i}, {j})"),
            };
            args.out.emit(Some(line), &json!({ "t": t, "equal": diff.is_none(), "first_difference": diff }))?;
            Ok(if diff.is_none() { Status::Done } else { Status::Refuted })
        }
        CsrAction::Certify(args) => {
            let a = read_matrix(&args.input)?;
            let t = power(&args.t, weak_csr_threshold(a.order("csr certify")?))?;
            let cert = minimize_certificate(&nested_csr_expansion(&a, t)?, &a)?;
            let rank = tropical_rank(&a)?.value;
            args.out.emit(None, &json!({ "tropical_rank": rank, "certificate": cert }))?;
            Ok(Status::Done)
        }
        CsrAction::Singular(args) => {
            let a = read_matrix(&args.input)?;
            let t = power(&args.t, singular_threshold(a.order("csr singular")?))?;
            args.out.emit(None, &singular_power_decomposition(&a, t)?)?;
            Ok(Status::Done)
        }
    }
}

fn identity(action: &IdentityAction) -> Result<Status, Failure> {
    match action {
        IdentityAction::Build {
            n,
            variant,
            base_prev,
            base_tri,
            t,
            nbar,
            allow_below_threshold,
            admit_trials,
            seed,
            out,
        } => {
            if *n < 2 {
                return Err("--n must be at least 2".into());
            }
            let prev = read_entry(base_prev)?;
            let tri = read_entry(base_tri)?;
            if prev.monoid != Monoid::Full(n - 1) || tri.monoid != Monoid::UpperTriangular(*n) {
                return Err(format!(
                    "bases must be claimed for M{} and U{n}, got {} and {}",
                    n - 1,
                    prev.monoid,
                    tri.monoid
                )
                .into());
            }
            if *admit_trials > 0 {
                let config = FalsifyConfig { trials: *admit_trials, seed: resolve_seed(*seed)?, ..Default::default() };
                for entry in [&prev, &tri] {
                    if let Err(e) = entry.admit(&config) {
                        eprintln!("{e}");
                        return Ok(Status::Refuted);
                    }
                }
            }
            let opts = ConstructOptions { variant: *variant, t: *t, nbar: *nbar, allow_below_threshold: *allow_below_threshold };
            let id = construct_identity(*n, &prev.identity()?, &tri.triangular_base(), &opts)?;
            let line = format!("length {} ({} and {} letters)", id.length(), id.u.len(), id.v.len());
            eprintln!("{line}");
            out.emit(None, &id)?;
            Ok(Status::Done)
        }
        IdentityAction::Check { file, n, triangular, sampling, exact, budget, out } => {
            let id = Identity::from_json(&read(file)?).map_err(|e| format!("{}: {e}", file.display()))?;
            let monoid = match (n, id.monoid) {
                (Some(0), _) => return Err("--n must be positive".into()),
                (Some(n), _) if *triangular => Monoid::UpperTriangular(*n),
                (Some(n), _) => Monoid::Full(*n),
                (None, Some(m)) => m,
                (None, None) => return Err("no --n given and no monoid recorded in the file".into()),
            };
            let config = sampling.config()?;
            let counterexample = falsify(&id, monoid, &config);
            let verdict = match (exact, &counterexample) {
                (true, None) => Some(verify_exact(&id, monoid, *budget)?),
                _ => None,
            };
            let refuted = counterexample.is_some() || matches!(verdict, Some(ExactVerdict::Refuted(_)));
            let artifact = json!({
                "identity": id,
                "monoid": monoid,
                "seed": config.seed,
                "trials": config.trials,
                "counterexample": counterexample,
                "exact": verdict,
            });
            out.emit(None, &artifact)?;
            match verdict {
                _ if refuted => Ok(Status::Refuted),
                Some(ExactVerdict::BudgetExceeded { monomials, .. }) => {
                    Err(format!("exact check undecided: {monomials} monomials exceed the budget").into())
                }
                _ => Ok(Status::Done),
            }
        }
        IdentityAction::Length { params, out } => {
            let params: LengthParams =
                serde_json::from_str(&read(params)?).map_err(|e| format!("{}: {e}", params.display()))?;
            let report = construction_length(&params)?;
            out.emit(Some(report.length.to_string()), &report)?;
            Ok(Status::Done)
        }
    }
}

fn run(cli: Cli) -> Result<Status, Failure> {
    match cli.command {
        Command::Rank { kind, input, out } => rank(kind, &input, &out),
        Command::Csr { action } => csr(&action),
        Command::Identity { action } => identity(&action),
        Command::Separate { u, v, n, sampling, out } => {
            let (u, v) = (read_word(&u)?, read_word(&v)?);
            let config = sampling.config()?;
            let found = try_separate(&u, &v, n, &config)?;
            let status = if found.is_some() { Status::Refuted } else { Status::Done };
            out.emit(None, &json!({ "seed": config.seed, "trials": config.trials, "separator": found }))?;
            Ok(status)
        }
        Command::Selftest { quick, seed } => {
            let seed = resolve_seed(seed)?;
            let outcomes = run_all(if quick { Scale::Quick } else { Scale::Full }, seed);
            for o in &outcomes {
                println!("{o}");
            }
            let passed = outcomes.iter().filter(|o| o.passed).count();
            println!("{passed}/{} criteria passed", outcomes.len());
            Ok(if passed == outcomes.len() { Status::Done } else { Status::Refuted })
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(Status::Done) => ExitCode::SUCCESS,
        Ok(Status::Refuted) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
