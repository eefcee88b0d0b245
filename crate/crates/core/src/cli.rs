//! Command-line frontend.
//!
//! Exit codes: 0 ok, 1 bound or invariant violated, 2 bad input, 3 I/O,
//! 4 corrupt file, 5 recovery failure.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use crate::analysis::{coherence, cross_pair_count, shift_coherence, Mode, DEFAULT_SAMPLES, DEFAULT_SEED};
use crate::dictionary::{build, DictionaryKind};
use crate::error::Error;
use crate::ff::FpField;
use crate::io::{load_dictionary, read_signal, save_dictionary, write_atomic, write_signal};
use crate::linalg::C64;
use crate::selftest;
use crate::sparse::{omp, recovery_experiment, synthesize, Algorithm, DEFAULT_RELATIVE_TOL};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_BAD_INPUT: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_CORRUPT: i32 = 4;
pub const EXIT_RECOVERY: i32 = 5;

#[derive(Parser, Debug)]
#[command(name = "oscdict", version, about = "Deterministic incoherent dictionaries over F_p")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum KindArg {
    Heisenberg,
    OscillatorSplit,
    OscillatorNonsplit,
    Oscillator,
    Extended,
}

impl From<KindArg> for DictionaryKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Heisenberg => DictionaryKind::Heisenberg,
            KindArg::OscillatorSplit => DictionaryKind::OscillatorSplit,
            KindArg::OscillatorNonsplit => DictionaryKind::OscillatorNonsplit,
            KindArg::Oscillator => DictionaryKind::Oscillator,
            KindArg::Extended => DictionaryKind::Extended,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Auto,
    Exhaustive,
    Sampled,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Statistic {
    /// Pairs of atoms from different groups.
    Cross,
    /// `|<phi, pi(v) varphi>|` for nonzero shifts v.
    Shifted,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum AlgorithmArg {
    Omp,
    Thresholding,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a dictionary and write manifest, atoms and provenance into --out.
    Build {
        #[arg(long)]
        prime: u64,
        #[arg(long, value_enum, default_value = "oscillator")]
        kind: KindArg,
        #[arg(long)]
        out: PathBuf,
    },
    /// Coherence audit of a saved dictionary.
    Coherence {
        #[arg(long)]
        dict: PathBuf,
        #[arg(long, value_enum, default_value = "auto")]
        mode: ModeArg,
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        samples: u64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, value_enum, default_value = "cross")]
        statistic: Statistic,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a sparse combination of dictionary atoms as a signal file.
    Synth {
        #[arg(long)]
        dict: PathBuf,
        /// Comma-separated atom indices.
        #[arg(long, value_delimiter = ',', required = true)]
        support: Vec<usize>,
        /// Comma-separated `re:im` coefficients, one per index (default 1:0).
        #[arg(long, value_delimiter = ',')]
        coef: Vec<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Sparse recovery of one signal, or a seeded recovery experiment.
    Recover {
        #[arg(long)]
        dict: PathBuf,
        #[arg(long, conflicts_with = "experiment")]
        signal: Option<PathBuf>,
        #[arg(long)]
        experiment: bool,
        #[arg(long, default_value_t = 1)]
        sparsity: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, value_enum, default_value = "omp")]
        algorithm: AlgorithmArg,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the invariant suite at one prime.
    Selftest {
        #[arg(long)]
        prime: u64,
    },
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io(_) => EXIT_IO,
        Error::Corrupt(_) | Error::Json(_) | Error::Csv(_) => EXIT_CORRUPT,
        Error::IllConditioned => EXIT_RECOVERY,
        Error::NotUnitary(_) | Error::SpectralGap(_) | Error::DegenerateSpectrum(_) => EXIT_VIOLATION,
        _ => EXIT_BAD_INPUT,
    }
}

fn fail(e: Error) -> i32 {
    eprintln!("error: {e}");
    exit_code(&e)
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Error> {
    match out {
        Some(path) => write_atomic(path, text.as_bytes()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn field_or_exit(prime: u64) -> Result<FpField, i32> {
    FpField::new(prime).map_err(|e| {
        eprintln!("error: {e}");
        EXIT_BAD_INPUT
    })
}

/// Parses arguments and runs a command, returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_BAD_INPUT } else { EXIT_OK };
        }
    };
    match cli.command {
        Command::Build { prime, kind, out } => cmd_build(prime, kind.into(), &out),
        Command::Coherence {
            dict,
            mode,
            samples,
            seed,
            statistic,
            format,
            out,
        } => cmd_coherence(&dict, mode, samples, seed, statistic, format, out.as_deref()),
        Command::Synth {
            dict,
            support,
            coef,
            out,
        } => cmd_synth(&dict, &support, &coef, &out),
        Command::Recover {
            dict,
            signal,
            experiment,
            sparsity,
            trials,
            seed,
            algorithm,
            format,
            out,
        } => {
            let algorithm = match algorithm {
                AlgorithmArg::Omp => Algorithm::Omp,
                AlgorithmArg::Thresholding => Algorithm::Thresholding,
            };
            if experiment {
                cmd_experiment(&dict, sparsity, trials, seed, algorithm, format, out.as_deref())
            } else if let Some(signal) = signal {
                cmd_recover(&dict, &signal, sparsity, format, out.as_deref())
            } else {
                eprintln!("error: recover needs --signal or --experiment");
                EXIT_BAD_INPUT
            }
        }
        Command::Selftest { prime } => cmd_selftest(prime),
    }
}

fn cmd_build(prime: u64, kind: DictionaryKind, out: &Path) -> i32 {
    let field = match field_or_exit(prime) {
        Ok(f) => f,
        Err(code) => return code,
    };
    let start = Instant::now();
    let (dict, stats) = match build(field, kind) {
        Ok(x) => x,
        Err(e) => return fail(e),
    };
    let build_time = start.elapsed();
    match save_dictionary(out, &dict, stats) {
        Ok(m) => {
            println!(
                "built {kind} p={prime}: {} atoms in {} groups, {:.3}s (weil applications {}, eigendecompositions {})",
                m.atoms,
                m.groups,
                build_time.as_secs_f64(),
                stats.weil_applications,
                stats.eigendecompositions
            );
            EXIT_OK
        }
        Err(e) => fail(e),
    }
}

fn cmd_coherence(
    dict: &Path,
    mode: ModeArg,
    samples: u64,
    seed: u64,
    statistic: Statistic,
    format: Format,
    out: Option<&Path>,
) -> i32 {
    let (d, _) = match load_dictionary(dict) {
        Ok(x) => x,
        Err(e) => return fail(e),
    };
    let pairs = match statistic {
        Statistic::Cross => cross_pair_count(&d),
        Statistic::Shifted => (d.len() as u64).pow(2) * (d.p() * d.p() - 1),
    };
    let mode = match mode {
        ModeArg::Auto => match Mode::auto(pairs, seed) {
            Mode::Sampled { seed, .. } => Mode::Sampled { seed, count: samples },
            m => m,
        },
        ModeArg::Exhaustive => Mode::Exhaustive,
        ModeArg::Sampled => Mode::Sampled { seed, count: samples },
    };
    let report = match statistic {
        Statistic::Cross => coherence(&d, mode),
        Statistic::Shifted => shift_coherence(&d, mode),
    };
    let report = match report {
        Ok(r) => r,
        Err(e) => return fail(e),
    };
    let text = match format {
        Format::Json => serde_json::to_string_pretty(&report).expect("report serializes") + "\n",
        Format::Csv => report.histogram_csv(),
        Format::Text => report.to_text(),
    };
    if let Err(e) = emit(out, &text) {
        return fail(e);
    }
    if report.bound_holds || report.bound_vacuous {
        EXIT_OK
    } else {
        EXIT_VIOLATION
    }
}

fn parse_coef(s: &str) -> Result<C64, Error> {
    let bad = || Error::InvalidArgument(format!("coefficient {s:?} is not re:im"));
    let (re, im) = s.split_once(':').unwrap_or((s, "0"));
    Ok(C64::new(
        re.trim().parse().map_err(|_| bad())?,
        im.trim().parse().map_err(|_| bad())?,
    ))
}

fn cmd_synth(dict: &Path, support: &[usize], coef: &[String], out: &Path) -> i32 {
    let (d, _) = match load_dictionary(dict) {
        Ok(x) => x,
        Err(e) => return fail(e),
    };
    let coefficients: Result<Vec<C64>, Error> = if coef.is_empty() {
        Ok(vec![C64::new(1.0, 0.0); support.len()])
    } else {
        coef.iter().map(|s| parse_coef(s)).collect()
    };
    let f = match coefficients.and_then(|c| synthesize(&d, support, &c)) {
        Ok(f) => f,
        Err(e) => return fail(e),
    };
    match write_signal(out, &f) {
        Ok(()) => EXIT_OK,
        Err(e) => fail(e),
    }
}

fn cmd_recover(dict: &Path, signal: &Path, sparsity: usize, format: Format, out: Option<&Path>) -> i32 {
    let (d, _) = match load_dictionary(dict) {
        Ok(x) => x,
        Err(e) => return fail(e),
    };
    let f = match read_signal(signal) {
        Ok(f) => f,
        Err(e) => return fail(e),
    };
    let tol = DEFAULT_RELATIVE_TOL * f.norm();
    let rep = match omp(&d, &f, sparsity, tol) {
        Ok(r) => r,
        Err(Error::DimensionMismatch { expected, got }) => {
            eprintln!("error: signal length {got} does not match dictionary prime {expected}");
            return EXIT_BAD_INPUT;
        }
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_RECOVERY;
        }
    };
    let text = match format {
        Format::Json => serde_json::to_string_pretty(&rep).expect("serializes") + "\n",
        Format::Csv | Format::Text => {
            let mut s = String::from(if format == Format::Csv { "index,re,im\n" } else { "" });
            for (i, c) in rep.support.iter().zip(&rep.coefficients) {
                if format == Format::Csv {
                    s += &format!("{i},{:.17e},{:.17e}\n", c.re, c.im);
                } else {
                    s += &format!("{i}\t{:+.12} {:+.12}i\n", c.re, c.im);
                }
            }
            if format == Format::Text {
                s += &format!("residual\t{:.3e}\n", rep.residual_norm);
            }
            s
        }
    };
    if let Err(e) = emit(out, &text) {
        return fail(e);
    }
    if rep.residual_norm <= tol {
        EXIT_OK
    } else {
        eprintln!(
            "error: residual {:.3e} above tolerance {tol:.3e} after {} atoms",
            rep.residual_norm,
            rep.support.len()
        );
        EXIT_RECOVERY
    }
}

fn cmd_experiment(
    dict: &Path,
    sparsity: usize,
    trials: usize,
    seed: u64,
    algorithm: Algorithm,
    format: Format,
    out: Option<&Path>,
) -> i32 {
    let (d, _) = match load_dictionary(dict) {
        Ok(x) => x,
        Err(e) => return fail(e),
    };
    let report = match recovery_experiment(&d, sparsity, trials, seed, algorithm) {
        Ok(r) => r,
        Err(e) => return fail(e),
    };
    let q = report.coefficient_error_quantiles;
    let text = match format {
        Format::Json => serde_json::to_string_pretty(&report).expect("serializes") + "\n",
        Format::Csv => format!(
            "prime,atoms,sparsity,trials,seed,successes,success_rate,err_min,err_median,err_p90,err_max\n{},{},{},{},{},{},{},{:e},{:e},{:e},{:e}\n",
            report.prime, report.atoms, report.sparsity, report.trials, report.seed,
            report.successes, report.success_rate, q[0], q[1], q[2], q[3]
        ),
        Format::Text => format!(
            "sparsity {} over {} atoms (p={}), {} trials, seed {}\nsuccess {}/{} ({:.4})\ncoefficient error over successes: min {:.2e} median {:.2e} p90 {:.2e} max {:.2e}\n",
            report.sparsity, report.atoms, report.prime, report.trials, report.seed,
            report.successes, report.trials, report.success_rate, q[0], q[1], q[2], q[3]
        ),
    };
    match emit(out, &text) {
        Ok(()) => EXIT_OK,
        Err(e) => fail(e),
    }
}

fn cmd_selftest(prime: u64) -> i32 {
    let field = match field_or_exit(prime) {
        Ok(f) => f,
        Err(code) => return code,
    };
    match selftest::run(field) {
        Ok(checks) => {
            print!("{}", selftest::format_table(&checks));
            if checks.iter().all(|c| c.passed) {
                EXIT_OK
            } else {
                EXIT_VIOLATION
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_VIOLATION
        }
    }
}
