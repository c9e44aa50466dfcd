//! `qtopo`: quantum invariants of framed-link surgery presentations.
//!
//! Exit codes: 0 success, 2 invalid configuration, 3 invalid input data,
//! 4 brute-force guard exceeded, 5 property check failed.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use qtopo::invariants::compare_abelian_methods;
use qtopo::linkalg::random_script;
use qtopo::qsim::MAX_K;
use qtopo::{
    check_kirby_invariance, gauss_sum_brute, linking_matrix, tau_abelian, tau_dw, tau_su2_k3, DwRange,
    Error, FramedLinkMatrix, Guard, InvariantKind, KirbyReport, Method, ModK, PhaseEstimate, PolyLink,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::Value;

const GUARD_VAR: &str = "QTOPO_GUARD";

#[derive(Parser)]
#[command(name = "qtopo", version, about = "Quantum topological invariants via Gauss sums")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Brute,
    Factorized,
}

#[derive(Clone, Copy, ValueEnum)]
enum RangeArg {
    Paper,
    Full,
}

#[derive(Clone, Copy, ValueEnum)]
enum InvariantArg {
    Su2k3,
    Abelian,
    Dw,
}

#[derive(clap::Args)]
struct Io {
    /// Linking matrix `{"m","J"}` or polygonal link `{"components","delta"}`
    #[arg(short, long)]
    input: PathBuf,
    /// Write the JSON result here instead of stdout
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Abelian Chern-Simons invariant modulo an odd prime power
    TauAbelian {
        #[arg(long)]
        k: u64,
        #[arg(long, value_enum, default_value = "factorized")]
        method: MethodArg,
        #[command(flatten)]
        io: Io,
    },
    /// SU(2) invariant at level 3
    TauSu2k3 {
        #[command(flatten)]
        io: Io,
    },
    /// Z_k Dijkgraaf-Witten invariant
    TauDw {
        #[arg(long)]
        k: u64,
        #[arg(long, value_enum, default_value = "paper")]
        range: RangeArg,
        #[command(flatten)]
        io: Io,
    },
    /// Quadratic Gauss sum G(k, a)
    GaussSum {
        #[arg(long)]
        k: u64,
        #[arg(long, allow_hyphen_values = true)]
        a: i64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Framed linking matrix of a polygonal link
    LinkingMatrix {
        #[command(flatten)]
        io: Io,
    },
    /// Kirby-move invariance and oracle checks
    Check {
        #[arg(long, value_enum)]
        invariant: InvariantArg,
        #[arg(long)]
        k: Option<u64>,
        #[arg(long, value_enum, default_value = "factorized")]
        method: MethodArg,
        #[arg(long, value_enum, default_value = "full")]
        range: RangeArg,
        /// Length of the random Kirby-move script
        #[arg(long, default_value_t = 0)]
        moves: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        io: Io,
    },
    /// Simulated phase estimation of arg G(k, a)
    Simulate {
        #[arg(long)]
        k: u64,
        #[arg(long, allow_hyphen_values = true)]
        a: i64,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn config(field: &str, msg: impl std::fmt::Display) -> Self {
        Self { code: 2, message: format!("invalid {field}: {msg}") }
    }

    fn data(msg: impl std::fmt::Display) -> Self {
        Self { code: 3, message: msg.to_string() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::GuardExceeded { .. } => Self { code: 4, message: format!("{e} (raise with {GUARD_VAR})") },
            e => Self::data(e),
        }
    }
}

type CliResult<T> = Result<T, Failure>;

fn guard() -> CliResult<Guard> {
    match std::env::var(GUARD_VAR) {
        Ok(s) => s
            .trim()
            .parse::<u64>()
            .ok()
            .filter(|&g| g > 0)
            .map(Guard)
            .ok_or_else(|| Failure::config(GUARD_VAR, format!("{s:?} is not a positive integer"))),
        Err(_) => Ok(Guard::default()),
    }
}

fn method(m: MethodArg) -> Method {
    match m {
        MethodArg::Brute => Method::Brute,
        MethodArg::Factorized => Method::Factorized,
    }
}

fn dw_range(r: RangeArg) -> DwRange {
    match r {
        RangeArg::Paper => DwRange::Paper,
        RangeArg::Full => DwRange::Full,
    }
}

fn abelian_ring(k: u64) -> CliResult<ModK> {
    ModK::new(k).map_err(|e| Failure::config("--k", e))
}

fn dw_modulus(k: u64) -> CliResult<u64> {
    if k < 2 {
        return Err(Failure::config("--k", "modulus must be at least 2"));
    }
    Ok(k)
}

fn check_input(io: &Io) -> CliResult<()> {
    if !io.input.is_file() {
        return Err(Failure::config("--input", format!("{} is not a readable file", io.input.display())));
    }
    Ok(())
}

/// Loads a linking matrix, converting a polygonal link when given one.
fn load_matrix(path: &Path) -> CliResult<FramedLinkMatrix> {
    let text = fs::read_to_string(path).map_err(|e| Failure::config("--input", e))?;
    let v: Value = serde_json::from_str(&text).map_err(|e| Failure::data(format!("/: malformed JSON: {e}")))?;
    if v.get("J").is_some() {
        FramedLinkMatrix::from_json_value(&v).map_err(Failure::data)
    } else if v.get("components").is_some() {
        let link = PolyLink::<f64>::from_json_value(&v).map_err(Failure::data)?;
        Ok(linking_matrix(&link, link.delta)?)
    } else {
        Err(Failure::data("/: expected a linking matrix {\"m\", \"J\"} or a link {\"components\", \"delta\"}"))
    }
}

fn emit<S: Serialize>(value: &S, output: Option<&Path>) -> CliResult<()> {
    let mut text = serde_json::to_string(value).expect("serializable");
    text.push('\n');
    match output {
        Some(p) => fs::write(p, text).map_err(|e| Failure::config("--output", e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn warn(warnings: &[String]) {
    for w in warnings {
        eprintln!("warning: {w}");
    }
}

#[derive(Serialize)]
struct GaussSumReport {
    k: u64,
    a: i64,
    re: f64,
    im: f64,
}

#[derive(Serialize)]
struct PropertyReport {
    property: &'static str,
    passed: bool,
    max_deviation: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    kirby: Option<KirbyReport>,
}

#[derive(Serialize)]
struct CheckReport {
    invariant: &'static str,
    seed: u64,
    moves: usize,
    passed: bool,
    properties: Vec<PropertyReport>,
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::TauAbelian { k, method: m, io } => {
            let ring = abelian_ring(k)?;
            check_input(&io)?;
            let guard = guard()?;
            let j = load_matrix(&io.input)?;
            let r = tau_abelian::<f64>(&j, &ring, method(m), guard)?;
            warn(&r.warnings);
            emit(&r, io.output.as_deref())
        }
        Command::TauSu2k3 { io } => {
            check_input(&io)?;
            let guard = guard()?;
            let j = load_matrix(&io.input)?;
            let r = tau_su2_k3::<f64>(&j, guard)?;
            warn(&r.warnings);
            emit(&r, io.output.as_deref())
        }
        Command::TauDw { k, range, io } => {
            let k = dw_modulus(k)?;
            check_input(&io)?;
            let guard = guard()?;
            let j = load_matrix(&io.input)?;
            let r = tau_dw::<f64>(&j, k, dw_range(range), guard)?;
            warn(&r.warnings);
            emit(&r, io.output.as_deref())
        }
        Command::GaussSum { k, a, output } => {
            if k < 2 {
                return Err(Failure::config("--k", "modulus must be at least 2"));
            }
            let g = gauss_sum_brute::<f64>(k, a)?;
            emit(&GaussSumReport { k, a, re: g.re, im: g.im }, output.as_deref())
        }
        Command::LinkingMatrix { io } => {
            check_input(&io)?;
            let j = load_matrix(&io.input)?;
            emit(&j, io.output.as_deref())
        }
        Command::Check { invariant, k, method: m, range, moves, seed, io } => {
            let kind = match invariant {
                InvariantArg::Su2k3 => InvariantKind::Su2K3,
                InvariantArg::Abelian => {
                    let k = k.ok_or_else(|| Failure::config("--k", "required for the abelian invariant"))?;
                    InvariantKind::Abelian { ring: abelian_ring(k)?, method: method(m) }
                }
                InvariantArg::Dw => {
                    let k = k.ok_or_else(|| Failure::config("--k", "required for the Dijkgraaf-Witten invariant"))?;
                    InvariantKind::Dw { k: dw_modulus(k)?, range: dw_range(range) }
                }
            };
            check_input(&io)?;
            let guard = guard()?;
            let j = load_matrix(&io.input)?;
            let report = run_check(&j, kind, moves, seed, guard)?;
            let passed = report.passed;
            emit(&report, io.output.as_deref())?;
            if passed {
                Ok(())
            } else {
                let failing: Vec<String> = report
                    .properties
                    .iter()
                    .filter(|p| !p.passed)
                    .map(|p| format!("{} (max deviation {:e})", p.property, p.max_deviation))
                    .collect();
                Err(Failure { code: 5, message: format!("property check failed: {}", failing.join(", ")) })
            }
        }
        Command::Simulate { k, a, eps, seed, output } => {
            if k > MAX_K as u64 || k < 3 || k % 2 == 0 || !qtopo::numtheory::is_prime(k) {
                return Err(Failure::config("--k", format!("{k} is not an odd prime <= {MAX_K}")));
            }
            if !(eps > 0.0 && eps < 1.0) {
                return Err(Failure::config("--eps", format!("{eps} is outside (0, 1)")));
            }
            if a.rem_euclid(k as i64) == 0 {
                return Err(Failure::config("--a", format!("{a} is not coprime to {k}")));
            }
            let est: PhaseEstimate<f64> = qtopo::phase_estimate(k as usize, a, eps, seed)?;
            emit(&est, output.as_deref())
        }
    }
}

fn run_check(j: &FramedLinkMatrix, kind: InvariantKind, moves: usize, seed: u64, guard: Guard) -> CliResult<CheckReport> {
    let mut properties = Vec::new();
    if let InvariantKind::Abelian { ring, .. } = kind {
        let cmp = compare_abelian_methods::<f64>(j, &ring, guard)?;
        properties.push(PropertyReport {
            property: "factorized_vs_brute",
            passed: cmp.passed,
            max_deviation: cmp.deviation,
            kirby: None,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let script = random_script(&mut rng, j, moves, j.m().max(1) + 2);
    let kirby = check_kirby_invariance::<f64>(j, kind, &script, guard)?;
    properties.push(PropertyReport {
        property: "kirby_invariance",
        passed: kirby.passed,
        max_deviation: kirby.max_deviation,
        kirby: Some(kirby),
    });
    Ok(CheckReport {
        invariant: kind.name(),
        seed,
        moves,
        passed: properties.iter().all(|p| p.passed),
        properties,
    })
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
