use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::Rational64;
use qseries_core::dsl;
use qseries_core::series::{mul_karatsuba, mul_naive};
use qseries_core::verify::{self, Expected, GridPoint, IdentityRecord, SuiteConfig, VerificationReport};
use qseries_core::{Kernel, K5};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(name = "qseries", version, about = "Exact q-series expansion and identity verification over Q(sqrt 5)")]
struct Cli {
    #[command(flatten)]
    config: Config,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Config {
    /// Truncation order: compare or print coefficients below q^N
    #[arg(short = 'N', long = "order", env = "QSERIES_ORDER", default_value_t = 100,
          value_parser = clap::value_parser!(i64).range(1..), global = true)]
    order: i64,

    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,

    /// Series multiplication kernel
    #[arg(long, default_value = "karatsuba", global = true)]
    kernel: Kernel,

    /// Tolerance for numeric checks
    #[arg(long, default_value_t = 1e-9, value_parser = positive_float, global = true)]
    tol: f64,

    /// Numeric sample grid: `default`, `none`, or `R1,R2,...xP` for radii times P phases
    #[arg(long, default_value = "default", value_parser = parse_samples, global = true)]
    samples: Samples,

    /// Terms per theta sum in numeric checks
    #[arg(long, default_value_t = 50, value_parser = clap::value_parser!(u64).range(1..), global = true)]
    terms: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Debug)]
struct Samples(Vec<GridPoint>);

#[derive(Subcommand, Debug)]
enum Command {
    /// Expand a DSL expression to order N
    Expand { expr: String },
    /// Check one identity from the registry
    Verify { id: String },
    /// Check every identity and compare with the expected verdicts
    VerifyAll,
    /// Time naive against Karatsuba multiplication
    Bench {
        /// Comma-separated orders, e.g. 64,256,1024
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        orders: Vec<usize>,
    },
    /// List the identity registry
    List,
}

fn positive_float(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
        Ok(x) => Err(format!("must be positive and finite, got {x}")),
        Err(e) => Err(e.to_string()),
    }
}

fn parse_samples(s: &str) -> Result<Samples, String> {
    match s {
        "default" => return Ok(Samples(verify::default_grid())),
        "none" => return Ok(Samples(Vec::new())),
        _ => {}
    }
    let (radii, phases) = s.split_once('x').ok_or("expected `default`, `none` or `R1,R2,...xP`")?;
    let phases: i64 = phases.trim().parse().map_err(|e| format!("phase count: {e}"))?;
    if phases < 1 {
        return Err("phase count must be at least 1".into());
    }
    let mut grid = Vec::new();
    for r in radii.split(',') {
        let radius: f64 = r.trim().parse().map_err(|e| format!("radius `{r}`: {e}"))?;
        if !(radius > 0.0 && radius <= 0.5) {
            return Err(format!("radius {radius} lies outside 0 < |q| <= 0.5"));
        }
        for k in 0..phases {
            for m in [1, 3] {
                grid.push(GridPoint { radius, turn: Rational64::new(k, phases), m });
            }
        }
    }
    Ok(Samples(grid))
}

// A closed stdout (e.g. piping into `head`) ends the program quietly.
macro_rules! out {
    ($($arg:tt)*) => {
        if writeln!(std::io::stdout().lock(), $($arg)*).is_err() {
            std::process::exit(0);
        }
    };
}

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = &cli.config;
    match &cli.command {
        Command::Expand { expr } => expand(expr, config),
        Command::Verify { id } => verify_one(id, config),
        Command::VerifyAll => verify_all(config),
        Command::Bench { orders } => bench(orders, config),
        Command::List => list(config),
    }
}

fn print_json(v: &Value) {
    out!("{}", serde_json::to_string_pretty(v).expect("json values serialize"));
}

fn expand(text: &str, config: &Config) -> ExitCode {
    let series = dsl::parse(text).and_then(|e| dsl::eval_with(&e, config.order, config.kernel));
    match series {
        Ok(s) => {
            match config.format {
                Format::Text => out!("{s}"),
                Format::Json => print_json(&s.to_json()),
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {}", e.render(text));
            ExitCode::from(EXIT_USAGE)
        }
    }
}

fn suite_config(config: &Config) -> SuiteConfig {
    SuiteConfig {
        order: config.order,
        kernel: config.kernel,
        grid: config.samples.0.clone(),
        tol: config.tol,
        terms: config.terms as usize,
    }
}

fn expected_text(e: Expected) -> String {
    match e {
        Expected::Pass => "pass".into(),
        Expected::FailAtExponent(k) => format!("fail at q^{k}"),
    }
}

fn report_json(report: &VerificationReport, record: &IdentityRecord) -> Value {
    let mut v = report.to_json();
    v["params"]["expected"] = json!(expected_text(record.expected));
    v
}

fn status(report: &VerificationReport) -> &'static str {
    match (report.error.is_some(), report.skipped, report.pass) {
        (true, _, _) => "ERROR",
        (_, true, _) => "SKIP",
        (_, _, true) => "PASS",
        _ => "FAIL",
    }
}

fn report_line(report: &VerificationReport, record: &IdentityRecord) -> String {
    let mut line = format!("{:<5} {:<7} {:<5}", report.id, report.backend.name(), status(report));
    if let Some(m) = &report.first_mismatch {
        line += &format!(" first mismatch at q^{}: lhs {}, rhs {}", m.exp, m.lhs, m.rhs);
        if !m.equation.is_empty() {
            line += &format!(" [{}]", m.equation);
        }
    }
    if let Some(err) = report.max_err {
        line += &format!(" max err {err:.3e}");
        if let verify::Params::Numeric { worst: Some(w), tol, .. } = &report.params {
            if !report.pass {
                line += &format!(
                    " worst at |q| = {}, arg = {} turn, z = {}pi/10, lhs/rhs = {:.12} {:+.12}i{}",
                    w.point.radius,
                    w.point.turn,
                    w.point.m,
                    w.ratio_re,
                    w.ratio_im,
                    if w.is_unimodular(*tol) { " (unimodular)" } else { "" }
                );
            }
        }
    }
    if let Some(e) = &report.error {
        line += &format!(" {e}");
    }
    line += &format!(" (expected {}; {} ms)", expected_text(record.expected), report.elapsed.as_millis());
    line
}

fn verify_one(id: &str, config: &Config) -> ExitCode {
    let record = match verify::lookup(id) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let report = verify::run_record(&record, &suite_config(config));
    match config.format {
        Format::Text => out!("{}", report_line(&report, &record)),
        Format::Json => print_json(&report_json(&report, &record)),
    }
    if report.error.is_some() {
        eprintln!("error: {}", report.error.as_deref().unwrap_or_default());
    }
    if report.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAIL)
    }
}

fn verify_all(config: &Config) -> ExitCode {
    let records = verify::registry();
    let reports = verify::run_all(&suite_config(config));
    let mut passed = 0;
    let mut expected_fail = 0;
    let mut unexpected = Vec::new();
    for (report, record) in reports.iter().zip(&records) {
        if !report.matches_expected(record.expected) {
            unexpected.push(report.id.as_str());
        } else if report.pass {
            passed += 1;
        } else {
            expected_fail += 1;
        }
    }
    match config.format {
        Format::Text => {
            for (report, record) in reports.iter().zip(&records) {
                out!("{}", report_line(report, record));
            }
            let mut summary = format!("{passed} pass, {expected_fail} expected-fail");
            if !unexpected.is_empty() {
                summary += &format!(", {} unexpected: {}", unexpected.len(), unexpected.join(" "));
            }
            out!("{summary}");
        }
        Format::Json => {
            let all: Vec<Value> = reports.iter().zip(&records).map(|(r, rec)| report_json(r, rec)).collect();
            print_json(&Value::Array(all));
        }
    }
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAIL)
    }
}

fn random_dense(rng: &mut impl Rng, len: usize) -> Vec<K5> {
    (0..len)
        .map(|_| K5::from_ratios((rng.gen_range(-9..=9), 1), (rng.gen_range(-9..=9), 1)))
        .collect()
}

fn bench(orders: &[usize], config: &Config) -> ExitCode {
    if orders.is_empty() || orders.contains(&0) {
        eprintln!("error: --orders needs a nonempty list of positive orders, e.g. --orders 64,256,1024");
        return ExitCode::from(EXIT_USAGE);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut rows = Vec::new();
    for &n in orders {
        let (a, b) = (random_dense(&mut rng, n), random_dense(&mut rng, n));
        let t = Instant::now();
        let naive = mul_naive(&a, &b, n);
        let naive_ms = t.elapsed().as_secs_f64() * 1e3;
        let t = Instant::now();
        let fast = mul_karatsuba(&a, &b, n);
        let fast_ms = t.elapsed().as_secs_f64() * 1e3;
        assert_eq!(naive, fast, "kernels disagree at order {n}");
        rows.push((n, Kernel::Naive, naive_ms));
        rows.push((n, Kernel::Karatsuba, fast_ms));
    }
    match config.format {
        Format::Text => {
            out!("{:>8}  {:<10} {:>12}", "order", "kernel", "ms");
            for (n, k, ms) in &rows {
                out!("{n:>8}  {:<10} {ms:>12.3}", k.name());
            }
        }
        Format::Json => print_json(&Value::Array(
            rows.iter().map(|(n, k, ms)| json!({ "order": n, "kernel": k.name(), "ms": ms })).collect(),
        )),
    }
    ExitCode::SUCCESS
}

fn list(config: &Config) -> ExitCode {
    let records = verify::registry();
    match config.format {
        Format::Text => {
            for r in &records {
                out!("{:<5} {:<7} {}  [{}]", r.id, r.backend().name(), r.description, r.citation);
            }
        }
        Format::Json => print_json(&Value::Array(
            records
                .iter()
                .map(|r| {
                    json!({
                        "id": r.id,
                        "backend": r.backend().name(),
                        "description": r.description,
                        "citation": r.citation,
                        "expected": expected_text(r.expected),
                    })
                })
                .collect(),
        )),
    }
    ExitCode::SUCCESS
}
