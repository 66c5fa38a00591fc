use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use diagpair_core::certificate::check_certificate;
use diagpair_core::congruence::oracle_subset_solution;
use diagpair_core::generate::{random_system, Profile};
use diagpair_core::hensel::{check_solution, lift};
use diagpair_core::io::{emit_certificate, parse_certificate, SystemDocument};
use diagpair_core::lemmas::{self, Sampling, SuiteReport};
use diagpair_core::normalize::normalize;
use diagpair_core::pipeline::{solve, Mode, SolveOptions, SolveReport};
use diagpair_core::{Error, System};
use rayon::prelude::*;
use serde_json::json;

const EXIT_FAILED: u8 = 1;
const EXIT_INVALID: u8 = 2;
const EXIT_PIPELINE: u8 = 3;

#[derive(Parser)]
#[command(name = "diagpair", version, about = "Solve pairs of additive forms of degree p^tau (p-1) over the p-adics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Find a certificate for a system file, or every file in a directory.
    Solve(SolveArgs),
    /// Check a certificate against a system.
    Verify {
        file: PathBuf,
        #[arg(long)]
        certificate: PathBuf,
    },
    /// Print the normalized system.
    Normalize { file: PathBuf },
    /// Print a seeded random system.
    Gen(GenArgs),
    /// Run a lemma check suite.
    Lemma(LemmaArgs),
    /// Search every subset for a certificate.
    Oracle { file: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Guaranteed,
    Opportunistic,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(required_unless_present = "batch", conflicts_with = "batch")]
    file: Option<PathBuf>,
    #[arg(long)]
    batch: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "guaranteed")]
    mode: ModeArg,
    /// Lift the certificate to a solution modulo p^K.
    #[arg(long, value_name = "K")]
    lift_to: Option<u32>,
    /// Write one JSON record per contraction and stage census.
    #[arg(long, value_name = "PATH", conflicts_with = "batch")]
    log: Option<PathBuf>,
    /// Use C p contraction thresholds with C = 9996.
    #[arg(long = "strict-paper-constants")]
    strict: bool,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    p: u64,
    #[arg(long)]
    tau: u32,
    #[arg(long)]
    s: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "normalized")]
    profile: String,
    /// Precision K; defaults to tau + 10.
    #[arg(long = "precision", short = 'K')]
    precision: Option<u32>,
}

#[derive(Clone, Copy, ValueEnum)]
enum LemmaName {
    Olson,
    Cd,
    Prop71,
    Alon,
    Davenport,
}

#[derive(Args)]
struct LemmaArgs {
    lemma: LemmaName,
    #[arg(long, default_value_t = 3)]
    p: u64,
    #[arg(long, conflicts_with_all = ["samples", "seed"])]
    exhaustive: bool,
    #[arg(long, default_value_t = 10_000)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long = "strict-paper-constants")]
    strict: bool,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::PipelineFailure { .. } | Error::Counterexample(_) => EXIT_PIPELINE,
        Error::Unsolvable(_) => EXIT_FAILED,
        _ => EXIT_INVALID,
    }
}

/// An error with the exit code it maps to.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl From<anyhow::Error> for Failure {
    fn from(error: anyhow::Error) -> Self {
        let code = error.downcast_ref::<Error>().map_or(EXIT_INVALID, exit_code);
        Failure { code, error }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure { code: exit_code(&e), error: e.into() }
    }
}

fn read_system(path: &Path) -> Result<System, Failure> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let doc = SystemDocument::parse(&text).with_context(|| format!("parsing {}", path.display()))?;
    Ok(doc.to_system().with_context(|| format!("loading {}", path.display()))?)
}

fn options(mode: ModeArg, strict: bool) -> SolveOptions {
    let mode = match mode {
        ModeArg::Guaranteed => Mode::Guaranteed,
        ModeArg::Opportunistic => Mode::Opportunistic,
    };
    SolveOptions { mode, strict_constants: strict }
}

fn write_log(path: &Path, report: &SolveReport) -> anyhow::Result<()> {
    let mut out = std::io::BufWriter::new(fs::File::create(path).with_context(|| format!("creating {}", path.display()))?);
    for record in &report.log {
        serde_json::to_writer(&mut out, &json!({ "record": "contraction", "contraction": record }))?;
        writeln!(out)?;
    }
    for census in &report.censuses {
        serde_json::to_writer(&mut out, &json!({ "record": "census", "census": census }))?;
        writeln!(out)?;
    }
    serde_json::to_writer(
        &mut out,
        &json!({ "record": "result", "route": report.route, "case": report.case, "support": report.certificate.support }),
    )?;
    writeln!(out)?;
    Ok(())
}

/// The certificate file, preceded by comment lines describing the run.
fn render_solution(sys: &System, report: &SolveReport, lift_to: Option<u32>) -> Result<String, Failure> {
    let mut out = format!("# route: {}\n", serde_json::to_string(&report.route).expect("serializable"));
    if let Some(n) = &report.normalized {
        out.push_str(&format!(
            "# indices refer to the normalized system ({} moves, theta {} -> {})\n",
            n.steps.len(),
            n.theta_before,
            n.theta_after
        ));
    }
    if let Some(k) = lift_to {
        let solved = report.solved_system(sys);
        let sol = lift(solved, &report.certificate, k)?;
        let (values, valid, target) = match &report.normalized {
            Some(n) => {
                let (x, valid) = n.pull_back(sys, &sol.values, k);
                (x, valid, sys)
            }
            None => (sol.values, k, sys),
        };
        if valid == 0 || !check_solution(target, &values, valid) {
            return Err(Failure {
                code: EXIT_PIPELINE,
                error: anyhow::anyhow!("lifted solution does not check modulo p^{valid}"),
            });
        }
        out.push_str(&format!("# solution of the input system modulo p^{valid} (nonzero entries):\n"));
        for (i, v) in values.iter().enumerate().filter(|(_, v)| !v.is_zero()) {
            out.push_str(&format!("# x[{i}] = {}\n", v.value()));
        }
    }
    out.push_str(&emit_certificate(&report.certificate));
    Ok(out)
}

fn run_solve(args: &SolveArgs) -> Result<(), Failure> {
    let opts = options(args.mode, args.strict);
    if let Some(dir) = &args.batch {
        return run_batch(dir, &opts, args.lift_to);
    }
    let path = args.file.as_ref().expect("clap requires a file without --batch");
    let sys = read_system(path)?;
    let report = solve(&sys, &opts)?;
    if let Some(log) = &args.log {
        write_log(log, &report)?;
    }
    print!("{}", render_solution(&sys, &report, args.lift_to)?);
    Ok(())
}

fn run_batch(dir: &Path, opts: &SolveOptions, lift_to: Option<u32>) -> Result<(), Failure> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("reading {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file())
        .collect();
    files.sort();
    let results: Vec<(serde_json::Value, u8)> = files
        .par_iter()
        .map(|path| {
            let name = path.display().to_string();
            let outcome = read_system(path).and_then(|sys| {
                let report = solve(&sys, opts)?;
                render_solution(&sys, &report, lift_to)?;
                Ok(report)
            });
            match outcome {
                Ok(report) => (
                    json!({ "file": name, "status": "certified", "route": report.route, "support": report.certificate.support }),
                    0,
                ),
                Err(f) => (json!({ "file": name, "status": "error", "code": f.code, "error": format!("{:#}", f.error) }), f.code),
            }
        })
        .collect();
    let mut worst = 0;
    for (line, code) in &results {
        println!("{line}");
        worst = worst.max(*code);
    }
    if worst != 0 {
        return Err(Failure { code: worst, error: anyhow::anyhow!("{} of {} files failed", results.iter().filter(|r| r.1 != 0).count(), results.len()) });
    }
    Ok(())
}

fn run_lemma(args: &LemmaArgs) -> Result<(), Failure> {
    let sampling = if args.exhaustive {
        Sampling::Exhaustive
    } else {
        Sampling::Random { samples: args.samples, seed: args.seed }
    };
    let report: SuiteReport = match args.lemma {
        LemmaName::Olson => lemmas::olson_suite(args.p, sampling),
        LemmaName::Cd => lemmas::cauchy_davenport_suite(args.p, sampling),
        LemmaName::Prop71 => lemmas::constrained_pair_suite(args.p, sampling),
        LemmaName::Alon => lemmas::alon_suite(args.p, sampling, args.strict),
        LemmaName::Davenport => lemmas::davenport_suite(args.p, sampling),
    }?;
    println!("{report}");
    if !report.passed() {
        return Err(Failure { code: EXIT_FAILED, error: anyhow::anyhow!("{} failures", report.failures) });
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Solve(args) => run_solve(&args),
        Command::Verify { file, certificate } => {
            let sys = read_system(&file)?;
            let text = fs::read_to_string(&certificate).with_context(|| format!("reading {}", certificate.display()))?;
            let cert = parse_certificate(&text)?;
            match check_certificate(&sys, &cert) {
                Ok(()) => {
                    println!("verified: {} columns, sums vanish mod p^{}", cert.support.len(), sys.tau() + 1);
                    Ok(())
                }
                Err(why) => Err(Failure { code: EXIT_FAILED, error: anyhow::anyhow!("not a certificate: {why}") }),
            }
        }
        Command::Normalize { file } => {
            let sys = read_system(&file)?;
            let n = normalize(&sys)?;
            let doc = SystemDocument::from_system(&n.system)
                .with_meta("moves", n.steps.len())
                .with_meta("theta_before", n.theta_before)
                .with_meta("theta_after", n.theta_after)
                .with_meta("vanished", n.vanished);
            print!("{}", doc.emit());
            Ok(())
        }
        Command::Gen(g) => {
            let profile: Profile = g.profile.parse()?;
            let precision = g.precision.unwrap_or(g.tau + 10);
            let sys = random_system(g.p, g.tau, precision, g.s, g.seed, profile)?;
            let doc = SystemDocument::from_system(&sys).with_meta("seed", g.seed).with_meta("profile", profile);
            print!("{}", doc.emit());
            Ok(())
        }
        Command::Lemma(args) => run_lemma(&args),
        Command::Oracle { file } => {
            let sys = read_system(&file)?;
            match oracle_subset_solution(&sys) {
                Some(cert) => {
                    print!("{}", emit_certificate(&cert));
                    Ok(())
                }
                None => Err(Failure {
                    code: EXIT_FAILED,
                    error: anyhow::anyhow!("no subset of columns is a certificate mod p^{}", sys.tau() + 1),
                }),
            }
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("diagpair: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
