use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde_json::{json, Value};

use onecomp::classifier::{classify, level_set_components, render_pgm, ScanConfig};
use onecomp::companion::{construct_companion, CompanionConfig};
use onecomp::inner::InnerFunction;
use onecomp::io;
use onecomp::measures::SingularMeasure;
use onecomp::{families, Error};

const PGM_WIDTH: usize = 512;

#[derive(Parser, Debug)]
#[command(name = "onecomp", version, about = "Inner functions on the unit disc")]
struct Cli {
    /// Write the reference families as input files into `--out` and exit.
    #[arg(long)]
    seed_examples: bool,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Worker threads (results do not depend on it).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate Θ and certified |Θ| bounds at points.
    Eval(EvalArgs),
    /// Classify Θ as one-component or not.
    Classify(ClassifyArgs),
    /// Count components of {|Θ| < ε}.
    Levelset(LevelsetArgs),
    /// Build a companion interpolating Blaschke product.
    Construct(ConstructArgs),
    /// Summarize a singular measure and its Poisson integral at points.
    Measure(MeasureArgs),
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[arg(long)]
    inner: PathBuf,
    /// Point `re,im`; repeatable.
    #[arg(long = "z", value_parser = parse_point, allow_hyphen_values = true)]
    points: Vec<Complex64>,
    /// CSV file of points with header `re,im`.
    #[arg(long)]
    points_csv: Option<PathBuf>,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
}

#[derive(Args, Debug)]
struct ClassifyArgs {
    #[arg(long)]
    inner: PathBuf,
    #[arg(long, default_value_t = 14)]
    depth: u32,
    /// Stabilization tolerance.
    #[arg(long, default_value_t = 1e-3)]
    tol: f64,
}

#[derive(Args, Debug)]
struct LevelsetArgs {
    #[arg(long)]
    inner: PathBuf,
    #[arg(long)]
    epsilon: f64,
    #[arg(long, default_value_t = 10)]
    depth: u32,
}

#[derive(Args, Debug)]
struct ConstructArgs {
    #[arg(long)]
    inner: PathBuf,
    #[arg(long, default_value_t = 2000)]
    horizon: usize,
    #[arg(long, default_value_t = 14)]
    depth: u32,
}

#[derive(Args, Debug)]
struct MeasureArgs {
    #[arg(long)]
    measure: PathBuf,
    #[arg(long = "z", value_parser = parse_point, allow_hyphen_values = true)]
    points: Vec<Complex64>,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
}

fn parse_point(s: &str) -> Result<Complex64, String> {
    let (a, b) = s.split_once(',').ok_or("expected re,im")?;
    let re = a.trim().parse::<f64>().map_err(|e| e.to_string())?;
    let im = b.trim().parse::<f64>().map_err(|e| e.to_string())?;
    Ok(Complex64::new(re, im))
}

/// Exit status for a failed run.
fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::PrecisionExhausted { .. }) | Some(Error::TailInsufficient { .. }) => 3,
        _ => 2,
    }
}

fn metadata(command: &str) -> Value {
    let ts = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    json!({
        "tool": "onecomp",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "timestamp": ts,
    })
}

fn write(out: &Path, name: &str, contents: impl AsRef<[u8]>) -> anyhow::Result<PathBuf> {
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let p = out.join(name);
    fs::write(&p, contents).with_context(|| format!("writing {}", p.display()))?;
    Ok(p)
}

fn write_json(out: &Path, name: &str, command: &str, mut v: Value) -> anyhow::Result<PathBuf> {
    v["metadata"] = metadata(command);
    write(out, name, io::to_pretty(&v))
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))
        .map_err(anyhow::Error::from)
}

fn load_inner(path: &Path) -> anyhow::Result<InnerFunction> {
    let base = path.parent().unwrap_or(Path::new("."));
    io::inner_from_str(&read(path)?, base)
        .map_err(|e| anyhow::Error::from(e).context(format!("reading {}", path.display())))
}

fn load_measure(path: &Path) -> anyhow::Result<SingularMeasure> {
    let v = io::parse_json(&read(path)?)
        .map_err(|e| anyhow::Error::from(e).context(format!("reading {}", path.display())))?;
    Ok(io::measure_from_json(&v)?)
}

fn check_open_disc(points: &[Complex64]) -> anyhow::Result<()> {
    if let Some(z) = points.iter().find(|z| !(z.norm() < 1.0)) {
        return Err(Error::Domain(format!("point {z} is not in the open disc")).into());
    }
    Ok(())
}

fn seed_examples(out: &Path) -> anyhow::Result<()> {
    for (name, theta, expected) in families::seeded() {
        let v = io::inner_to_json(&theta)?;
        let p = write(out, &format!("{name}.json"), io::to_pretty(&v))?;
        if let Some(sigma) = theta.sigma() {
            write(out, &format!("{name}_measure.json"), io::to_pretty(&io::measure_to_json(sigma)))?;
        }
        println!("{name}: {} (expected {})", p.display(), expected.as_str());
    }
    let mobius = io::inner_to_json(&families::mobius())?;
    write(out, "mobius.json", io::to_pretty(&mobius))?;
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<()> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Error::InvalidInput("--threads must be positive".into()).into());
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring worker threads")?;
    }
    if cli.seed_examples {
        return seed_examples(&cli.out);
    }
    let Some(command) = cli.command else {
        return Err(Error::InvalidInput("no subcommand given (try --help)".into()).into());
    };
    let out = &cli.out;
    match command {
        Command::Eval(a) => {
            let theta = load_inner(&a.inner)?;
            let mut points = a.points;
            if let Some(p) = &a.points_csv {
                points.extend(io::zeros_from_csv(&read(p)?)?);
            }
            check_open_disc(&points)?;
            let values = points
                .iter()
                .map(|&z| {
                    let w = theta.evaluate(z, a.tol)?;
                    let m = theta.modulus_bounds(z, a.tol)?;
                    Ok(json!({
                        "z": {"re": io::real_string(z.re), "im": io::real_string(z.im)},
                        "value": {"re": io::real_string(w.re), "im": io::real_string(w.im)},
                        "modulus": {"lo": io::real_string(m.lo), "estimate": io::real_string(m.estimate), "hi": io::real_string(m.hi)},
                    }))
                })
                .collect::<onecomp::Result<Vec<_>>>()?;
            let p = write_json(out, "eval.json", "eval", json!({ "tol": io::real_string(a.tol), "values": values }))?;
            println!("{} points -> {}", points.len(), p.display());
        }
        Command::Classify(a) => {
            let theta = load_inner(&a.inner)?;
            let cfg = ScanConfig {
                depth: a.depth,
                tol: a.tol,
                ..ScanConfig::default()
            };
            let report = classify(&theta, &cfg)?;
            let p = write_json(out, "report.json", "classify", io::report_to_json(&report))?;
            println!("{} C*={:.6} -> {}", report.verdict.as_str(), report.c_star, p.display());
        }
        Command::Levelset(a) => {
            let theta = load_inner(&a.inner)?;
            let analysis = level_set_components(&theta, a.epsilon, a.depth)?;
            write(out, "levelset.csv", io::levelset_to_csv(&analysis))?;
            write(out, "levelset.pgm", render_pgm(&analysis, PGM_WIDTH))?;
            let p = write_json(out, "levelset.json", "levelset", io::levelset_to_json(&analysis))?;
            println!("component_count {} -> {}", analysis.component_count, p.display());
        }
        Command::Construct(a) => {
            let theta = load_inner(&a.inner)?;
            let cfg = CompanionConfig {
                horizon: a.horizon,
                depth: a.depth,
                ..CompanionConfig::default()
            };
            let c = construct_companion(&theta, &cfg)?;
            write(out, "zeros.csv", io::zeros_to_csv(&c.zeros))?;
            write(out, "gamma.csv", c.gamma.to_csv(64))?;
            let p = write_json(out, "companion.json", "construct", io::companion_to_json(&c))?;
            println!(
                "{} zeros, verification {} -> {}",
                c.zeros.len(),
                if c.verification.passed() { "passed" } else { "FAILED" },
                p.display()
            );
        }
        Command::Measure(a) => {
            let sigma = load_measure(&a.measure)?;
            check_open_disc(&a.points)?;
            let poisson = a
                .points
                .iter()
                .map(|&z| {
                    let e = sigma.poisson_integral(z, a.tol)?;
                    Ok(json!({
                        "z": {"re": io::real_string(z.re), "im": io::real_string(z.im)},
                        "poisson": {"lo": io::real_string(e.lo), "estimate": io::real_string(e.estimate), "hi": io::real_string(e.hi)},
                    }))
                })
                .collect::<onecomp::Result<Vec<_>>>()?;
            let v = json!({
                "measure": io::measure_to_json(&sigma),
                "total_mass": io::real_string(sigma.total_mass()),
                "poisson": poisson,
            });
            let p = write_json(out, "measure.json", "measure", v)?;
            println!("total mass {:.6} -> {}", sigma.total_mass(), p.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
