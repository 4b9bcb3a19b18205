use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use xratio_core::dual_geometry::{verify_planes_lemma, PlanesLemmaReport, DEFAULT_PLANES_CAP};
use xratio_core::energy::{energy_direct, energy_dual, CauchySchwarzReport, EnergyCaps};
use xratio_core::experiments::{
    fit_exponent, read_set_file, scan, write_csv, write_json, Family, FitModel,
    DEFAULT_RANDOM_BOUND,
};
use xratio_core::{image, image_count, Error, Expander, ImageCaps, InputSet};

#[derive(Parser)]
#[command(
    name = "xratio",
    version,
    about = "Exact cross-ratio expander computations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Function {
    F,
    G,
    H,
}

impl From<Function> for Expander {
    fn from(f: Function) -> Self {
        match f {
            Function::F => Expander::F,
            Function::G => Expander::G,
            Function::H => Expander::H,
        }
    }
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Method {
    Direct,
    Dual,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyKind {
    Ap,
    Gp,
    Random,
    Squares,
    Custom,
}

#[derive(Clone, Copy, ValueEnum)]
enum Fit {
    Pure,
    Powerlog,
}

impl From<Fit> for FitModel {
    fn from(f: Fit) -> Self {
        match f {
            Fit::Pure => FitModel::PurePower,
            Fit::Powerlog => FitModel::PowerOverLog,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Print the image of f, g or h on a set.
    Expand {
        #[arg(long)]
        set_file: PathBuf,
        #[arg(long, value_enum)]
        function: Function,
        #[arg(long)]
        json: bool,
        /// Lift the size caps.
        #[arg(long)]
        unsafe_cap: bool,
    },
    /// Energy of order 1, 2 or 3, counted directly or through transformations.
    Energy {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
        order: u8,
        #[arg(long, value_enum)]
        method: Method,
        #[arg(long)]
        set_file: PathBuf,
        #[arg(long)]
        unsafe_cap: bool,
    },
    /// Exhaustive check of the dual plane family of a set.
    DualCheck {
        #[arg(long)]
        set_file: PathBuf,
        #[arg(long)]
        unsafe_cap: bool,
    },
    /// Image sizes over a set family, with an optional exponent fit.
    Scan {
        #[arg(long, value_enum)]
        family: FamilyKind,
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        #[arg(long, value_enum)]
        function: Function,
        #[arg(long, value_enum)]
        fit: Option<Fit>,
        /// Write the records here instead of stdout.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Print records as JSON instead of CSV.
        #[arg(long)]
        json: bool,
        /// First term (ap, gp) or first root (squares).
        #[arg(long, default_value = "1")]
        start: String,
        #[arg(long, default_value = "1")]
        step: String,
        #[arg(long, default_value = "2")]
        ratio: String,
        #[arg(long, default_value_t = DEFAULT_RANDOM_BOUND)]
        bound: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Source file for the custom family.
        #[arg(long)]
        set_file: Option<PathBuf>,
        #[arg(long)]
        unsafe_cap: bool,
    },
    /// Cross-method energy checks and plane family checks on built-in sets.
    Selftest,
}

/// Raised when a check ran to completion and reported a failure.
#[derive(Debug)]
struct ValidationFailed(String);

impl std::fmt::Display for ValidationFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ValidationFailed {}

fn image_caps(unsafe_cap: bool) -> ImageCaps {
    if unsafe_cap {
        ImageCaps::UNLIMITED
    } else {
        ImageCaps::default()
    }
}

fn load(path: &Path) -> Result<InputSet> {
    Ok(read_set_file(path)?)
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn expand(set: &InputSet, function: Expander, json: bool, caps: ImageCaps) -> Result<()> {
    caps.check(function, set.len())?;
    let values = image(function, set);
    if json {
        return print_json(&json!({
            "function": function,
            "n": set.len(),
            "image_count": values.count(),
            "tuple_count": values.tuple_count,
            "skipped": values.skipped,
            "values": values.values.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
        }));
    }
    let mut out = BufWriter::new(io::stdout().lock());
    writeln!(out, "|{function}(A)| = {}", values.count())?;
    for v in &values.values {
        writeln!(out, "{v}")?;
    }
    out.flush()?;
    Ok(())
}

fn energy(set: &InputSet, order: u8, method: Method, unsafe_cap: bool) -> Result<()> {
    let caps = if unsafe_cap {
        EnergyCaps::UNLIMITED
    } else {
        EnergyCaps::default()
    };
    let start = Instant::now();
    let value = match method {
        Method::Direct => energy_direct(order, set, &caps)?,
        Method::Dual => energy_dual(order, set, &caps)?,
    };
    let function = Expander::from_energy_order(order)?;
    let mut count = image_count(function, set, &ImageCaps::UNLIMITED)?;
    count.energy = value;
    let cs = CauchySchwarzReport::from_count(&count);
    print_json(&json!({
        "order": order,
        "method": method,
        "n": set.len(),
        "energy": value,
        "tuple_count": cs.tuple_count,
        "image_count": cs.image_count,
        "lower_bound": cs.lower_bound,
        "elapsed_ms": start.elapsed().as_millis() as u64,
    }))?;
    if !cs.holds {
        return Err(ValidationFailed("image count below the Cauchy-Schwarz bound".into()).into());
    }
    Ok(())
}

fn dual_check(set: &InputSet, unsafe_cap: bool) -> Result<()> {
    let cap = if unsafe_cap {
        usize::MAX
    } else {
        DEFAULT_PLANES_CAP
    };
    let report = verify_planes_lemma(set, cap)?;
    print_json(&report)?;
    if !report.holds() {
        return Err(ValidationFailed(failed_properties(&report)).into());
    }
    Ok(())
}

fn failed_properties(r: &PlanesLemmaReport) -> String {
    let failed: Vec<&str> = [
        (r.property1(), "triples of planes meet in a point"),
        (r.property2(), "labels give distinct planes"),
        (r.property3(), "pairs of planes give distinct lines"),
        (r.property4(), "points lie on at most |A| planes"),
    ]
    .into_iter()
    .filter(|p| !p.0)
    .map(|p| p.1)
    .collect();
    format!("failed: {}", failed.join("; "))
}

#[allow(clippy::too_many_arguments)]
fn family_of(
    kind: FamilyKind,
    start: &str,
    step: &str,
    ratio: &str,
    bound: u64,
    seed: u64,
    set_file: Option<PathBuf>,
) -> Result<Family> {
    let rational = |name: &str, s: &str| -> Result<_> {
        let v: xratio_core::ExtRational = s.parse().with_context(|| format!("--{name} {s}"))?;
        Ok(v.finite().with_context(|| format!("--{name} {s}"))?.clone())
    };
    Ok(match kind {
        FamilyKind::Ap => Family::Ap {
            start: rational("start", start)?,
            step: rational("step", step)?,
        },
        FamilyKind::Gp => Family::Gp {
            start: rational("start", start)?,
            ratio: rational("ratio", ratio)?,
        },
        FamilyKind::Random => Family::RandomInt { bound, seed },
        FamilyKind::Squares => Family::Squares {
            start: start.parse().with_context(|| format!("--start {start}"))?,
        },
        FamilyKind::Custom => Family::CustomFile {
            path: set_file.context("--family custom needs --set-file")?,
        },
    })
}

fn selftest() -> Result<()> {
    let mut failures = Vec::new();
    let base = [0i64, 1, 2, 4, 7, 11];
    let caps = EnergyCaps::default();
    let mut checked = 0;
    for mask in 0u32..1 << base.len() {
        let xs: Vec<i64> = (0..base.len())
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| base[i])
            .collect();
        if xs.len() < 4 {
            continue;
        }
        let set = InputSet::from_integers(&xs)?;
        let orders: &[u8] = if xs.len() <= 5 { &[1, 2, 3] } else { &[1, 2] };
        for &order in orders {
            let (d, p) = (
                energy_direct(order, &set, &caps)?,
                energy_dual(order, &set, &caps)?,
            );
            checked += 1;
            if d != p {
                failures.push(format!("E{order}({set}): direct {d}, dual {p}"));
            }
        }
    }
    println!(
        "energy direct = dual: {checked} cases, {} mismatches",
        failures.len()
    );

    for xs in [[0i64, 1, 2, 3, 4], [-2, -1, 0, 1, 3]] {
        let set = InputSet::from_integers(&xs)?;
        let r = verify_planes_lemma(&set, DEFAULT_PLANES_CAP)?;
        println!(
            "planes {set}: point {}, line {}, plane {}; labels injective {}; pair lines {}/{}; max incidence {}/{}",
            r.triples.point,
            r.triples.line,
            r.triples.plane,
            r.labels_injective,
            r.pair_lines.distinct_lines,
            r.pair_lines.pairs,
            r.rich_points.max_incidence,
            r.rich_points.bound,
        );
        println!(
            "  lines only from shared source or target: {}; general position triples {} match the solved transformation: {}",
            r.triples.lines_share_source_or_target,
            r.triples.general_position_triples,
            r.triples.general_position_witness_matches,
        );
        if !r.holds() {
            failures.push(format!("planes {set}: {}", failed_properties(&r)));
        }
    }

    for (function, xs, expected) in [
        (Expander::F, &[1i64, 2, 3][..], 6),
        (Expander::G, &[0, 1, 2, 3][..], 6),
    ] {
        let set = InputSet::from_integers(xs)?;
        let got = image(function, &set).count();
        println!("|{function}({set})| = {got}");
        if got != expected {
            failures.push(format!("|{function}({set})| = {got}, expected {expected}"));
        }
    }

    if failures.is_empty() {
        println!("selftest: ok");
        Ok(())
    } else {
        for f in &failures {
            println!("FAIL {f}");
        }
        Err(ValidationFailed(format!("{} check(s) failed", failures.len())).into())
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Expand {
            set_file,
            function,
            json,
            unsafe_cap,
        } => expand(
            &load(&set_file)?,
            function.into(),
            json,
            image_caps(unsafe_cap),
        ),
        Command::Energy {
            order,
            method,
            set_file,
            unsafe_cap,
        } => energy(&load(&set_file)?, order, method, unsafe_cap),
        Command::DualCheck {
            set_file,
            unsafe_cap,
        } => dual_check(&load(&set_file)?, unsafe_cap),
        Command::Scan {
            family,
            sizes,
            function,
            fit,
            csv,
            json,
            start,
            step,
            ratio,
            bound,
            seed,
            set_file,
            unsafe_cap,
        } => {
            let family = family_of(family, &start, &step, &ratio, bound, seed, set_file)?;
            let outcome = scan(function.into(), &family, &sizes, &image_caps(unsafe_cap))?;
            for r in &outcome.rejected {
                eprintln!("skipped n = {}: {}", r.n, r.reason);
            }
            let to_stdout = csv.is_none();
            match csv {
                Some(path) => {
                    let file = File::create(&path)
                        .with_context(|| format!("creating {}", path.display()))?;
                    write_csv(&outcome.records, BufWriter::new(file))?;
                }
                None if json => {
                    write_json(&outcome.records, io::stdout().lock())?;
                    println!();
                }
                None => write_csv(&outcome.records, io::stdout().lock())?,
            }
            if let Some(model) = fit {
                let fitted = fit_exponent(&outcome.records, model.into())?;
                let doc = serde_json::to_string_pretty(&json!({
                    "family": family.to_string(),
                    "function": Expander::from(function),
                    "sizes": outcome.records.iter().map(|r| r.n).collect::<Vec<_>>(),
                    "fit": fitted,
                }))?;
                if to_stdout {
                    eprintln!("{doc}");
                } else {
                    println!("{doc}");
                }
            }
            if let Some(r) = outcome.rejected.first() {
                return Err(Error::CapExceeded {
                    what: "scan",
                    size: r.n,
                    cap: image_caps(unsafe_cap).get(function.into()),
                }
                .into());
            }
            Ok(())
        }
        Command::Selftest => selftest(),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            match e.downcast_ref::<Error>() {
                Some(Error::CapExceeded { .. }) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
