//! `qha`: run verification suites, compute Orlicz and Schatten-Orlicz norms of
//! grid files, and evaluate Toeplitz bounds.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use qha::lab::{self, DilationLaw, SuiteConfig, SuiteReport, Tolerances};
use qha::orlicz::luxemburg_abs;
use qha::phasegrid::{parse_grid_file, GridFile};
use qha::schatten::symbol_schatten_norm;
use qha::toeplitz::{toeplitz_orlicz_bound, WindowPair};
use qha::{QuantizationIndex, YoungFunction};

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser, Debug)]
#[command(name = "qha", version, about = "Quantum harmonic analysis inequalities on a phase-space grid")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a verification suite and write its report.
    Verify(VerifyArgs),
    /// Print the Luxemburg norm of a sequence, wave or symbol file.
    Norm(NormArgs),
    /// Print the Orlicz-Schatten bound record of a Toeplitz operator.
    Toeplitz(ToeplitzArgs),
    /// List Young-function specs and suites.
    Catalog(CatalogArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long)]
    suite: Option<String>,
    #[arg(long = "N")]
    n: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    cases: Option<usize>,
    /// Report path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// TOML file with any of the above plus young_catalog, tolerances and law.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct NormArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    phi: String,
    /// Symbol files only: Orlicz-Schatten norm of the quantized symbol.
    #[arg(long)]
    schatten: bool,
    #[arg(long = "A", default_value_t = 0.5)]
    a: f64,
}

#[derive(Args, Debug)]
struct ToeplitzArgs {
    #[arg(long)]
    symbol: PathBuf,
    #[arg(long)]
    window: PathBuf,
    /// Second window; the first one is reused when absent.
    #[arg(long)]
    window2: Option<PathBuf>,
    #[arg(long)]
    phi: String,
}

#[derive(Args, Debug)]
struct CatalogArgs {
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

/// Values accepted in a `--config` file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    suite: Option<String>,
    #[serde(rename = "N")]
    n: Option<usize>,
    seed: Option<u64>,
    cases: Option<usize>,
    out: Option<PathBuf>,
    format: Option<Format>,
    young_catalog: Option<Vec<String>>,
    tolerances: Option<Tolerances>,
    law: Option<DilationLaw>,
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<qha::Error> for Failure {
    fn from(e: qha::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

fn parse_phi(spec: &str) -> Result<YoungFunction, Failure> {
    spec.parse().map_err(|e: qha::Error| Failure::Usage(format!("bad Young spec '{spec}': {e}")))
}

/// Rounds to 12 significant digits so exact answers print exactly.
fn tidy(x: f64) -> String {
    if !x.is_finite() || x == 0.0 {
        return format!("{x}");
    }
    let r: f64 = format!("{x:.11e}").parse().unwrap_or(x);
    format!("{r}")
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Runtime(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(|e| Failure::Runtime(e.to_string()))
        }
    }
}

fn render(report: &SuiteReport, format: Format) -> Result<String, Failure> {
    match format {
        Format::Json => Ok(report.to_json()? + "\n"),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let csv_err = |e: csv::Error| Failure::Runtime(e.to_string());
            w.write_record(lab::CSV_HEADER).map_err(csv_err)?;
            for row in lab::report_rows(report) {
                w.write_record(&row).map_err(csv_err)?;
            }
            let bytes = w.into_inner().map_err(|e| Failure::Runtime(e.to_string()))?;
            String::from_utf8(bytes).map_err(|e| Failure::Runtime(e.to_string()))
        }
    }
}

fn verify(args: VerifyArgs) -> Result<bool, Failure> {
    let file: FileConfig = match &args.config {
        Some(p) => toml::from_str(&read(p)?).map_err(|e| Failure::Usage(format!("bad config {}: {e}", p.display())))?,
        None => FileConfig::default(),
    };
    let suite = args.suite.or(file.suite).ok_or_else(|| Failure::Usage("verify needs --suite".into()))?;
    if !lab::is_known_suite(&suite) {
        let known: Vec<&str> = lab::SUITES.iter().map(|s| s.0).collect();
        return Err(Failure::Usage(format!("unknown suite '{suite}'; known suites: {}", known.join(", "))));
    }
    let mut cfg = SuiteConfig { suite_id: suite, ..SuiteConfig::default() };
    cfg.n = args.n.or(file.n).unwrap_or(cfg.n);
    cfg.seed = args.seed.or(file.seed).unwrap_or(cfg.seed);
    cfg.cases = args.cases.or(file.cases).unwrap_or(cfg.cases);
    if let Some(c) = file.young_catalog {
        cfg.young_catalog = c;
    }
    if let Some(t) = file.tolerances {
        t.validate()?;
        cfg.tolerances = t;
    }
    if let Some(law) = file.law {
        cfg.law = Some(DilationLaw::new(law.t, law.m, law.mode)?);
    }
    cfg.catalog()?;
    let format = args.format.or(file.format).unwrap_or(Format::Json);
    let out = args.out.or(file.out);
    let report = lab::run_suite(&cfg)?;
    emit(out.as_deref(), &render(&report, format)?)?;
    let s = &report.summary;
    eprintln!(
        "{}: {}/{} passed ({} skipped), max ratio {:.6e}",
        report.suite, s.passed, s.total, s.skipped, s.max_ratio
    );
    for c in report.failures() {
        eprintln!("  FAIL {} ratio {:.6e}", c.id, c.ratio);
    }
    Ok(report.all_pass())
}

fn norm(args: NormArgs) -> Result<bool, Failure> {
    let phi = parse_phi(&args.phi)?;
    let value = match parse_grid_file(&read(&args.input)?)? {
        GridFile::Sequence(seq) => {
            let abs: Vec<f64> = seq.iter().map(|v| v.norm()).collect();
            luxemburg_abs(&abs, None, &phi)
        }
        GridFile::Wave(f) if !args.schatten => {
            let abs: Vec<f64> = f.values.iter().map(|v| v.norm()).collect();
            luxemburg_abs(&abs, Some(&vec![f.grid.h; abs.len()]), &phi)
        }
        GridFile::Symbol(a) if args.schatten => symbol_schatten_norm(&a, QuantizationIndex::from_f64(args.a)?, &phi)?,
        GridFile::Symbol(a) => luxemburg_abs(&a.abs_values(), Some(&vec![a.quadrature_weight(); a.values.len()]), &phi),
        GridFile::Wave(_) => return Err(Failure::Usage("--schatten needs a symbol file".into())),
    };
    emit(None, &format!("{}\n", tidy(value)))?;
    Ok(true)
}

fn toeplitz(args: ToeplitzArgs) -> Result<bool, Failure> {
    let phi = parse_phi(&args.phi)?;
    let wave = |p: &Path| -> Result<_, Failure> {
        match parse_grid_file(&read(p)?)? {
            GridFile::Wave(f) => Ok(f),
            _ => Err(Failure::Usage(format!("{} is not a wave file", p.display()))),
        }
    };
    let a = match parse_grid_file(&read(&args.symbol)?)? {
        GridFile::Symbol(a) => a,
        _ => return Err(Failure::Usage(format!("{} is not a symbol file", args.symbol.display()))),
    };
    let phi1 = wave(&args.window)?;
    let phi2 = match &args.window2 {
        Some(p) => wave(p)?,
        None => phi1.clone(),
    };
    let rec = toeplitz_orlicz_bound(&a, &WindowPair::new(phi1, phi2)?, &phi)?;
    let text = serde_json::to_string_pretty(&rec).map_err(|e| Failure::Runtime(e.to_string()))?;
    emit(None, &(text + "\n"))?;
    Ok(rec.pass)
}

fn catalog(args: CatalogArgs) -> Result<bool, Failure> {
    let specs = [
        ("p:<p>", "t^p for 1 <= p < inf"),
        ("pinf", "0 on [0, 1], inf beyond"),
        ("exp", "e^t - 1"),
        ("exp1", "e^t - 1 - t"),
    ];
    let text = match args.format {
        Format::Json => {
            let v = serde_json::json!({
                "young_functions": specs.iter().map(|(s, d)| serde_json::json!({"spec": s, "description": d})).collect::<Vec<_>>(),
                "default_catalog": lab::DEFAULT_CATALOG,
                "suites": lab::SUITES.iter().map(|(s, d)| serde_json::json!({"id": s, "description": d})).collect::<Vec<_>>(),
            });
            serde_json::to_string_pretty(&v).map_err(|e| Failure::Runtime(e.to_string()))? + "\n"
        }
        Format::Csv => {
            let mut s = String::from("kind,id,description\n");
            for (id, d) in specs {
                s += &format!("young,{id},\"{d}\"\n");
            }
            for (id, d) in lab::SUITES {
                s += &format!("suite,{id},\"{d}\"\n");
            }
            s
        }
    };
    emit(None, &text)?;
    Ok(true)
}

fn configure_threads() -> Result<(), Failure> {
    if let Ok(v) = std::env::var("QHA_THREADS") {
        let n: usize = v.trim().parse().map_err(|_| Failure::Usage(format!("QHA_THREADS must be a positive integer, got '{v}'")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Runtime(e.to_string()))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = configure_threads().and_then(|_| match cli.command {
        Command::Verify(a) => verify(a),
        Command::Norm(a) => norm(a),
        Command::Toeplitz(a) => toeplitz(a),
        Command::Catalog(a) => catalog(a),
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_FAIL),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            eprintln!("usage: qha <verify|norm|toeplitz|catalog> [options]; see qha --help");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tidy_rounds_bisection_noise() {
        assert_eq!(tidy(5.000000000001), "5");
        assert_eq!(tidy(0.125), "0.125");
        assert_eq!(tidy(f64::INFINITY), "inf");
    }

    #[test]
    fn file_config_rejects_unknown_keys() {
        assert!(toml::from_str::<FileConfig>("suite = \"s2\"\nN = 64").is_ok());
        assert!(toml::from_str::<FileConfig>("bogus = 1").is_err());
    }
}
