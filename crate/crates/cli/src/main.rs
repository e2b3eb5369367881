//! `cube-harmonics`: verification suites, tables, sweeps and the
//! point-mass counterexample from the command line.
//!
//! Exit codes: 0 on success, 1 when a check or threshold fails (or the
//! computation errors), 2 on usage errors.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use num_traits::ToPrimitive;
use serde_json::{json, Value};

use cube_harmonics::cube::{check_dimension_cap, dimension_cap, CubeFunction, LpExponent, DIMENSION_CAP_ENV};
use cube_harmonics::harness::{
    nevo_stein_ratios, prop_main_sweep, random_set, ratio_sweep, verify_suite, weak_type_growth, RatioNorm,
    SweepReport, TestFamily, VerifyConfig, CHECKS, GENERATOR_ID, THRESHOLDS,
};
use cube_harmonics::krawtchouk::{partial_m, DifferenceMethod, KrawtchoukTable};
use cube_harmonics::maximal::{find_center, MaximalVariant};
use cube_harmonics::spherical::{profile_to_multiplier_exact, sphere_kernel_exact};

#[derive(Parser, Debug)]
#[command(name = "cube-harmonics", version, about = "Harmonic analysis on the Boolean hypercube")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Worker threads for the sweeps (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run every named identity check and print one line per check.
    Verify {
        #[arg(long, default_value_t = 12)]
        n: usize,
        /// Check the rational tables in every dimension up to `n`.
        #[arg(long)]
        exact: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
    /// Print a Krawtchouk, difference or sphere-multiplier table.
    Table {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = TableKind::Krawtchouk)]
        kind: TableKind,
        /// Difference order for `--kind partial`.
        #[arg(long, default_value_t = 1)]
        m: usize,
        /// Compute differences by iterating on the table instead of the
        /// closed form.
        #[arg(long)]
        exact: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Run a harness campaign over a grid of dimensions.
    Sweep {
        #[arg(long, value_enum)]
        campaign: Campaign,
        #[command(flatten)]
        grid: Grid,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long, default_value_t = 0.0)]
        beta: f64,
        /// `L^p` exponent for the ratio campaign, or `weak` for the weak
        /// (1,1) quotient.
        #[arg(long, default_value = "2")]
        p: String,
        #[arg(long, default_value_t = 2)]
        q: usize,
        #[arg(long, default_value = "half")]
        variant: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Comma-separated members; defaults to the standard family.
        #[arg(long)]
        family: Option<String>,
        #[command(flatten)]
        output: Output,
    },
    /// Point-mass weak-type lower bounds and their growth rate.
    Counterexample {
        #[arg(long, default_value_t = 2)]
        q: usize,
        #[command(flatten)]
        grid: Grid,
        #[command(flatten)]
        output: Output,
    },
    /// Find the center least covered by spheres through a set.
    Center {
        /// Set indicator as JSON or CUBF binary; otherwise a random set.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 10)]
        n: usize,
        #[arg(long, default_value_t = 0.125)]
        density: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Print conventions, thresholds and defaults.
    Info {
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
}

#[derive(clap::Args, Debug)]
struct Output {
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write the machine-readable report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args, Debug)]
struct Grid {
    #[arg(long)]
    n_min: Option<usize>,
    #[arg(long)]
    n_max: Option<usize>,
    #[arg(long)]
    n_step: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum TableKind {
    Krawtchouk,
    Partial,
    Multiplier,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
enum Campaign {
    PropMain,
    Ratio,
    NevoStein,
    WeakType,
}

/// A usage error: bad flag values caught before any computation.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    Usage(msg.into()).into()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) if e.is::<Usage>() => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    if let Some(threads) = cli.threads {
        if threads == 0 {
            return Err(usage("--threads must be positive"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .context("configuring the thread pool")?;
    }
    match cli.command {
        Command::Verify { n, exact, seed, output } => verify(n, exact, seed, &output),
        Command::Table { n, kind, m, exact, output } => table(n, kind, m, exact, &output),
        Command::Sweep {
            campaign,
            grid,
            m,
            beta,
            p,
            q,
            variant,
            seed,
            family,
            output,
        } => sweep(campaign, &grid, m, beta, &p, q, &variant, seed, family.as_deref(), &output),
        Command::Counterexample { q, grid, output } => counterexample(q, &grid, &output),
        Command::Center {
            input,
            n,
            density,
            seed,
            p,
            output,
        } => center(input.as_deref(), n, density, seed, p, &output),
        Command::Info { format } => {
            info(format);
            Ok(true)
        }
    }
}

fn cap(n: usize) -> anyhow::Result<()> {
    check_dimension_cap(n).map_err(|e| usage(format!("{e} (set {DIMENSION_CAP_ENV} to raise the cap)")))
}

/// Writes `text` to `--out` atomically, or to stdout.
fn emit(output: &Output, text: &str) -> anyhow::Result<()> {
    match &output.out {
        Some(path) => write_atomic(path, text),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            if !text.ends_with('\n') {
                stdout.write_all(b"\n")?;
            }
            Ok(())
        }
    }
}

fn write_atomic(path: &Path, text: &str) -> anyhow::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).with_context(|| format!("creating a temp file in {}", dir.display()))?;
    tmp.write_all(text.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn verify(n: usize, exact: bool, seed: u64, output: &Output) -> anyhow::Result<bool> {
    cap(n)?;
    let config = VerifyConfig { n, exact, seed };
    let outcomes = verify_suite(&config);
    let mut summary = String::new();
    for o in &outcomes {
        let status = if o.passed { "PASS" } else { "FAIL" };
        writeln!(summary, "{status} {}.{}: {}", o.module, o.name, o.detail)?;
    }
    let passed = outcomes.iter().all(|o| o.passed);
    writeln!(
        summary,
        "{} of {} checks passed",
        outcomes.iter().filter(|o| o.passed).count(),
        outcomes.len()
    )?;
    match output.format {
        None if output.out.is_none() => print!("{summary}"),
        format => {
            eprint!("{summary}");
            let text = match format.unwrap_or(Format::Json) {
                Format::Json => serde_json::to_string_pretty(&outcomes)?,
                Format::Csv => {
                    let mut csv = String::from("module,name,passed,detail\n");
                    for o in &outcomes {
                        writeln!(csv, "{},{},{},\"{}\"", o.module, o.name, o.passed, o.detail.replace('"', "\"\""))?;
                    }
                    csv
                }
            };
            emit(output, &text)?;
        }
    }
    Ok(passed)
}

fn table(n: usize, kind: TableKind, m: usize, exact: bool, output: &Output) -> anyhow::Result<bool> {
    cap(n)?;
    if kind == TableKind::Partial && 2 * m > n {
        return Err(usage(format!("--m {m} needs 2m <= n = {n}")));
    }
    let format = output.format.unwrap_or(Format::Csv);
    let table = KrawtchoukTable::shared(n)?;
    let text = match kind {
        TableKind::Krawtchouk => match format {
            Format::Csv => table.to_csv(),
            Format::Json => table.to_json()?,
        },
        TableKind::Partial => {
            let method = if exact {
                DifferenceMethod::Iterated
            } else {
                DifferenceMethod::ClosedForm
            };
            let mut rows = Vec::new();
            for r in 0..=n {
                for l in 0..=n {
                    let v = partial_m(n, m, r, l, method)?;
                    rows.push((r, l, v));
                }
            }
            rational_rows(format, json!({"n": n, "m": m}), "r,l", rows)?
        }
        TableKind::Multiplier => {
            let mut rows = Vec::new();
            for k in 0..=n {
                let multiplier = profile_to_multiplier_exact(&sphere_kernel_exact(n, k)?, &table)?;
                rows.extend(multiplier.into_iter().enumerate().map(|(r, v)| (k, r, v)));
            }
            rational_rows(format, json!({"n": n}), "k,r", rows)?
        }
    };
    emit(output, &text)?;
    Ok(true)
}

/// Rows `(a, b, value)` as CSV with header `<keys>,numerator,denominator,float`
/// or as JSON entries under `header`.
fn rational_rows(
    format: Format,
    mut header: Value,
    keys: &str,
    rows: Vec<(usize, usize, cube_harmonics::krawtchouk::Rational)>,
) -> anyhow::Result<String> {
    let (ka, kb) = keys.split_once(',').expect("two keys");
    let float = |v: &cube_harmonics::krawtchouk::Rational| {
        (v.numer().to_string(), v.denom().to_string(), v.to_f64().unwrap_or(f64::NAN))
    };
    match format {
        Format::Csv => {
            let mut out = format!("{keys},numerator,denominator,float\n");
            for (a, b, v) in &rows {
                let (num, den, f) = float(v);
                writeln!(out, "{a},{b},{num},{den},{f:e}")?;
            }
            Ok(out)
        }
        Format::Json => {
            let entries: Vec<Value> = rows
                .iter()
                .map(|(a, b, v)| {
                    let (num, den, f) = float(v);
                    json!({ka: a, kb: b, "numerator": num, "denominator": den, "float": f})
                })
                .collect();
            header["entries"] = Value::Array(entries);
            Ok(serde_json::to_string_pretty(&header)?)
        }
    }
}

fn grid(grid: &Grid, defaults: (usize, usize, usize)) -> anyhow::Result<Vec<usize>> {
    let lo = grid.n_min.unwrap_or(defaults.0);
    let hi = grid.n_max.unwrap_or(defaults.1);
    let step = grid.n_step.unwrap_or(defaults.2);
    if step == 0 {
        return Err(usage("--n-step must be positive"));
    }
    if lo == 0 || lo > hi {
        return Err(usage(format!("empty grid --n-min {lo} --n-max {hi}")));
    }
    Ok((lo..=hi).step_by(step).collect())
}

#[allow(clippy::too_many_arguments)]
fn sweep(
    campaign: Campaign,
    g: &Grid,
    m: Option<usize>,
    beta: f64,
    p: &str,
    q: usize,
    variant: &str,
    seed: u64,
    family: Option<&str>,
    output: &Output,
) -> anyhow::Result<bool> {
    let family = match family {
        Some(list) => TestFamily::parse_members(seed, list).map_err(|e| usage(e.to_string()))?,
        None => TestFamily::standard(seed),
    };
    if !beta.is_finite() {
        return Err(usage("--beta must be finite"));
    }
    let report = match campaign {
        Campaign::PropMain => {
            let n_values = grid(g, (8, 24, 4))?;
            let m = m.unwrap_or(1);
            if n_values.iter().any(|&n| 2 * m > n) {
                return Err(usage(format!("--m {m} needs 2m <= n on the whole grid")));
            }
            prop_main_sweep(&n_values, m)?
        }
        Campaign::Ratio => {
            let n_values = grid(g, (8, 20, 4))?;
            n_values.iter().try_for_each(|&n| cap(n))?;
            let variant: MaximalVariant = variant.parse().map_err(|e: cube_harmonics::error::Error| usage(e.to_string()))?;
            let norm = if p == "weak" {
                RatioNorm::Weak
            } else {
                let p: f64 = p.parse().map_err(|_| usage(format!("--p expects a number or `weak`, got {p:?}")))?;
                RatioNorm::Strong(LpExponent::new(p).map_err(|e| usage(e.to_string()))?)
            };
            ratio_sweep(variant, norm, &family, &n_values)?
        }
        Campaign::NevoStein => {
            let n_values = grid(g, (8, 20, 4))?;
            n_values.iter().try_for_each(|&n| cap(n))?;
            let m = m.unwrap_or(1);
            if !(1..=3).contains(&m) {
                return Err(usage(format!("--m must lie in 1..=3, got {m}")));
            }
            nevo_stein_ratios(&family, m, beta, &n_values)?
        }
        Campaign::WeakType => weak_type(q, g)?,
    };
    report_out(&report, output)
}

fn weak_type(q: usize, g: &Grid) -> anyhow::Result<SweepReport> {
    if q < 2 {
        return Err(usage("--q must be at least 2"));
    }
    let defaults = if q == 2 { (8, 24, 2) } else { (2 * q, 4 * q, q) };
    let n_values = grid(g, defaults)?;
    if n_values.len() < 2 {
        return Err(usage("the grid needs at least two points for a slope"));
    }
    if q == 2 && n_values.iter().any(|n| n % 2 != 0) {
        return Err(usage("binary grids must consist of even n"));
    }
    Ok(weak_type_growth(&n_values, q)?)
}

fn report_out(report: &SweepReport, output: &Output) -> anyhow::Result<bool> {
    for row in &report.per_n {
        println!("n={:<3} {} = {:.6}", row.n, report.statistic_label, row.statistic);
    }
    for (k, v) in &report.diagnostics {
        println!("{k} = {v:.6}");
    }
    for f in &report.failures {
        println!("FAIL {f}");
    }
    println!("{}: {}", report.campaign, if report.passed() { "passed" } else { "failed" });
    if output.out.is_some() || output.format.is_some() {
        let text = match output.format.unwrap_or(Format::Json) {
            Format::Json => report.to_json()?,
            Format::Csv => report.to_csv(),
        };
        emit(output, &text)?;
    }
    Ok(report.passed())
}

fn counterexample(q: usize, g: &Grid, output: &Output) -> anyhow::Result<bool> {
    let report = weak_type(q, g)?;
    println!("{:>4}  {:>14}  {:>10}  {:>12}", "n", "bound", "bound/sqrt(n)", "bound/sqrt(pi n/2)");
    for row in &report.per_n {
        let stirling = row.argmax.get("ratio_stirling").and_then(Value::as_f64);
        println!(
            "{:>4}  {:>14.6}  {:>13.6}  {:>18}",
            row.n,
            row.statistic,
            row.argmax["ratio_sqrt_n"].as_f64().unwrap_or(f64::NAN),
            stirling.map_or("-".to_string(), |s| format!("{s:.6}"))
        );
    }
    for f in &report.failures {
        println!("FAIL {f}");
    }
    println!("slope = {:.6}", report.diagnostics["slope"]);
    if output.out.is_some() || output.format.is_some() {
        let text = match output.format.unwrap_or(Format::Json) {
            Format::Json => report.to_json()?,
            Format::Csv => report.to_csv(),
        };
        emit(output, &text)?;
    }
    Ok(report.passed())
}

fn center(input: Option<&Path>, n: usize, density: f64, seed: u64, p: f64, output: &Output) -> anyhow::Result<bool> {
    let p = LpExponent::new(p).map_err(|e| usage(e.to_string()))?;
    let set = match input {
        Some(path) => {
            let f = CubeFunction::load(path).with_context(|| format!("reading {}", path.display()))?;
            cap(f.dim())?;
            f
        }
        None => {
            cap(n)?;
            if !(0.0..1.0).contains(&density) {
                return Err(usage(format!("--density must lie in [0, 1), got {density}")));
            }
            random_set(n, density, seed, 0)?
        }
    };
    let report = find_center(&set, p)?;
    println!("center = {} (weight {})", report.center, report.center.count_ones());
    println!("max_k |L on S_k(center)| / |S_k| = {:.6}", report.value);
    println!("averaging bound = {:.6}", report.averaging_bound);
    println!("density = {:.6}", report.density);
    if output.out.is_some() || output.format.is_some() {
        if output.format == Some(Format::Csv) {
            bail!("center reports are JSON only");
        }
        emit(output, &serde_json::to_string_pretty(&report)?)?;
    }
    Ok(report.value <= report.averaging_bound)
}

fn info(format: Format) {
    let value = json!({
        "tool_version": env!("CARGO_PKG_VERSION"),
        "indexing": "x = sum_i x(i+1) 2^i; bit i of the index is coordinate i+1",
        "transforms": {
            "wht_normalized": "2^{-n/2} sum_y (-1)^{x.y} f(y), self-inverse",
            "character_sum": "sum_y (-1)^{x.y} g(y); inverse divides by 2^n",
        },
        "krawtchouk": "kappa_k^n(r) = C(n,k)^{-1} sum_j (-1)^j C(r,j) C(n-r,k-j), the multiplier of sigma_k at level r",
        "sphere_means": "sigma_k * f(x) = C(n,k)^{-1} sum_{|y|=k} f(x+y)",
        "generator": GENERATOR_ID,
        "dimension_cap": dimension_cap(),
        "dimension_cap_env": DIMENSION_CAP_ENV,
        "thresholds": THRESHOLDS.profile(),
        "verify_checks": CHECKS.iter().map(|c| format!("{}.{}", c.module, c.name)).collect::<Vec<_>>(),
        "defaults": {
            "verify": {"n": 12, "exact": false, "seed": 0},
            "table": {"kind": "krawtchouk", "m": 1, "format": "csv"},
            "sweep": {
                "prop_main": {"n": "8..=24 step 4", "m": 1},
                "ratio": {"n": "8..=20 step 4", "variant": "half", "p": 2, "family": "standard"},
                "nevo_stein": {"n": "8..=20 step 4", "m": 1, "beta": 0, "family": "standard"},
                "weak_type": {"q": 2, "n": "8..=24 step 2; q > 2: 2q..=4q step q"},
                "seed": 0,
                "format": "json",
            },
            "counterexample": {"q": 2},
            "center": {"n": 10, "density": 0.125, "seed": 0, "p": 2},
            "threads": "all cores",
        },
    });
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&value).expect("static JSON")),
        Format::Csv => {
            println!("key,value");
            for (k, v) in value.as_object().expect("object") {
                println!("{k},\"{}\"", v.to_string().replace('"', "\"\""));
            }
        }
    }
}
