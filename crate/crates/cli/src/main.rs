//! `apoints`: evaluate Dirichlet L-functions, scan for a-points, and check
//! the sums over a-points against their asymptotic formulas.
//!
//! Exit codes: 0 ok, 2 usage, 3 math domain, 4 nonconvergence, 5 bound violation.

mod complex_arg;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use apoint_core::apoints::{count_apoints, safe_height};
use apoint_core::cache::{ApointStore, CacheOutcome};
use apoint_core::calibration::{self, Calibration};
use apoint_core::characters::character;
use apoint_core::lfunc::evaluate;
use apoint_core::theorem::{
    residual_label, residual_table, stieltjes_unchecked, Mode, PhaseSign, RhsVariant,
    TableOptions, VerificationRow, STIELTJES_GAP_TOL, STIELTJES_MAX_N,
};
use apoint_core::{DirichletCharacter, Error, EvalMethod, FactorSieve};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;

use complex_arg::parse_complex;

const CACHE_ENV: &str = "APOINT_CACHE_DIR";

#[derive(Parser)]
#[command(name = "apoints", version, about = "a-points of Dirichlet L-functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate L(s, chi) or L'(s, chi).
    Eval(EvalArgs),
    /// Locate a-points up to a height, extending the cache, and report the count.
    Scan(ScanArgs),
    /// Residual table of the sum over a-points against a right-hand side.
    Verify(VerifyArgs),
    /// Generalized Stieltjes coefficients C_0..C_n.
    Stieltjes(StieltjesArgs),
    /// Measure and print the envelope constants.
    Calibrate(CalibrateArgs),
}

#[derive(Args)]
struct CharArgs {
    /// Modulus.
    #[arg(long)]
    q: u64,
    /// Character index in the enumeration of characters mod q.
    #[arg(long, default_value_t = 1)]
    chi: usize,
}

#[derive(Args)]
struct CacheArgs {
    /// a-point cache directory; APOINT_CACHE_DIR takes precedence.
    #[arg(long, default_value = ".apoint-cache")]
    cache_dir: PathBuf,
}

impl CacheArgs {
    fn dir(&self) -> PathBuf {
        match std::env::var_os(CACHE_ENV) {
            Some(v) if !v.is_empty() => PathBuf::from(v),
            _ => self.cache_dir.clone(),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Reference,
    Rane,
    LprimeAfe,
}

#[derive(Args)]
struct EvalArgs {
    #[command(flatten)]
    ch: CharArgs,
    /// Point, e.g. "0.5+14.1i".
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    s: Complex64,
    #[arg(long, default_value_t = 0, value_parser = clap::value_parser!(u8).range(0..=1))]
    deriv: u8,
    #[arg(long, value_enum, default_value = "reference")]
    method: MethodArg,
}

#[derive(Args)]
struct ScanArgs {
    #[command(flatten)]
    ch: CharArgs,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, default_value = "0")]
    a: Complex64,
    #[arg(long)]
    t_max: f64,
    #[command(flatten)]
    cache: CacheArgs,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Theorem1,
    LemmaZero,
    Corollary,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Theorem1 => Mode::Theorem1,
            ModeArg::LemmaZero => Mode::LemmaZero,
            ModeArg::Corollary => Mode::Corollary,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PhaseArg {
    Plus,
    Minus,
    Both,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    ch: CharArgs,
    #[arg(long, value_enum)]
    mode: ModeArg,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, default_value = "0")]
    a: Complex64,
    #[arg(long = "X", alias = "x")]
    x: f64,
    /// Comma-separated heights, e.g. "50,100,200".
    #[arg(long)]
    t_grid: String,
    #[arg(long, value_enum, default_value = "minus")]
    phase_sign: PhaseArg,
    /// Apply the root-number factor to the k-sums and keep the a-terms only at X = 1.
    #[arg(long)]
    corrected: bool,
    /// Include a-points with beta <= 0.
    #[arg(long)]
    include_trivial: bool,
    #[arg(long, default_value_t = 100_000)]
    sieve_limit: usize,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Write the table here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Two-column (T, normalized residual) file; defaults to a name under the cache directory.
    #[arg(long)]
    plot: Option<PathBuf>,
    #[arg(long)]
    no_timestamp: bool,
    #[command(flatten)]
    cache: CacheArgs,
}

#[derive(Args)]
struct StieltjesArgs {
    #[command(flatten)]
    ch: CharArgs,
    #[arg(long, default_value_t = 2)]
    n_max: usize,
    #[arg(long, default_value_t = 100_000)]
    sieve_limit: usize,
}

#[derive(Args)]
struct CalibrateArgs {
    /// Write the calibration file here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, default_value_t = 100_000)]
    sieve_limit: usize,
    #[command(flatten)]
    cache: CacheArgs,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Domain(_) | Error::Pole(_) | Error::NearAPoint { .. } | Error::Resource(_) => 3,
            Error::NonConvergence { .. }
            | Error::ContourTooClose { .. }
            | Error::Consistency(_)
            | Error::Mismatch { .. } => 4,
            Error::Io(_) | Error::Json(_) => 1,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure { code: 1, message: e.to_string() }
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure { code: 1, message: e.to_string() }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Eval(a) => cmd_eval(a),
        Command::Scan(a) => cmd_scan(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Stieltjes(a) => cmd_stieltjes(a),
        Command::Calibrate(a) => cmd_calibrate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn pick_character(ch: &CharArgs) -> CliResult<DirichletCharacter> {
    if ch.q == 0 {
        return Err(Failure::usage("--q must be positive"));
    }
    character(ch.q, ch.chi).map_err(|e| Failure::usage(e.to_string()))
}

fn primitive_character(ch: &CharArgs) -> CliResult<DirichletCharacter> {
    let chi = pick_character(ch)?;
    if !chi.is_primitive() {
        return Err(Failure::usage(format!(
            "character {} mod {} is not primitive (conductor {})",
            ch.chi,
            ch.q,
            chi.conductor()
        )));
    }
    Ok(chi)
}

/// Writes to stdout; a closed pipe ends output quietly.
fn emit(text: &str) -> CliResult<()> {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn print_json<T: Serialize>(value: &T) -> CliResult<()> {
    emit(&(serde_json::to_string_pretty(value)? + "\n"))
}

/// Shortest round-trip form, in exponent notation away from moderate magnitudes.
fn num(x: f64) -> String {
    let a = x.abs();
    if a != 0.0 && a.is_finite() && !(1e-4..1e15).contains(&a) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

fn cmd_eval(args: EvalArgs) -> CliResult<()> {
    let chi = pick_character(&args.ch)?;
    let method = match args.method {
        MethodArg::Reference => EvalMethod::HurwitzDirect,
        MethodArg::Rane => EvalMethod::RaneAfe,
        MethodArg::LprimeAfe => EvalMethod::LprimeAfe,
    };
    let out = evaluate(args.s, &chi, args.deriv, method)?;
    print_json(&out)
}

#[derive(Serialize)]
struct ScanSummary {
    q: u64,
    char_index: usize,
    a: Complex64,
    #[serde(rename = "T_used")]
    t_used: f64,
    exact_count: u64,
    main_term: f64,
    discrepancy: f64,
    n_points: usize,
}

fn cmd_scan(args: ScanArgs) -> CliResult<()> {
    let chi = primitive_character(&args.ch)?;
    if !(args.t_max >= 10.0) {
        return Err(Failure::usage("--t-max must be at least 10"));
    }
    let store = ApointStore::new(args.cache.dir())?;
    let t_used = safe_height(&chi, args.a, args.t_max)?;
    let points = store.points_upto(&chi, args.a, t_used)?;
    let report = count_apoints(&chi, args.a, t_used)?;
    let n_points: usize = points.iter().map(|p| p.multiplicity as usize).sum();
    let summary = ScanSummary {
        q: chi.modulus(),
        char_index: chi.index(),
        a: args.a,
        t_used,
        exact_count: report.exact_count,
        main_term: report.main_term,
        discrepancy: report.discrepancy(),
        n_points,
    };
    eprintln!(
        "cache {}: {}",
        match store.last_outcome() {
            Some(CacheOutcome::Hit) => "hit",
            Some(CacheOutcome::Extended) => "extended",
            _ => "rebuilt",
        },
        store.path_for(&chi, args.a).display()
    );
    print_json(&summary)?;
    if n_points as u64 != report.exact_count {
        return Err(Failure {
            code: 4,
            message: format!(
                "located {n_points} a-points but the winding number is {}",
                report.exact_count
            ),
        });
    }
    Ok(())
}

fn parse_grid(text: &str) -> CliResult<Vec<f64>> {
    let grid: Vec<f64> = text
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>().map_err(|_| Failure::usage(format!("bad height {s:?}"))))
        .collect::<CliResult<_>>()?;
    if grid.is_empty() {
        return Err(Failure::usage("--t-grid is empty"));
    }
    if let Some(t) = grid.iter().find(|t| !(**t >= 10.0)) {
        return Err(Failure::usage(format!("heights must be at least 10, got {t}")));
    }
    Ok(grid)
}

/// `(measured, limit)` for a row under the frozen calibration. Corollary rows
/// compare the raw residual with `K T exp(-c sqrt(log T))`; an envelope with
/// `c <= 0` does not decay and is reported as a zero limit.
fn row_check(cal: &Calibration, row: &VerificationRow) -> Option<(f64, f64)> {
    match row.mode {
        Mode::Corollary => {
            let (_, c) = cal.corollary_envelope?;
            let limit = if c > 0.0 { cal.corollary_bound(row.t_used)? } else { 0.0 };
            Some((row.residual, limit))
        }
        _ => cal
            .residual_bound(&residual_label(row.mode, row.variant))
            .map(|b| (row.normalized_residual, b)),
    }
}

const CSV_HEADER: &str = "T_used,X,a_re,a_im,mode,phase_sign,emp_re,emp_im,rhs_re,rhs_im,residual,normalized_residual,n_points";

fn csv_rows(rows: &[VerificationRow], out: &mut String) {
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            num(r.t_used),
            num(r.x),
            num(r.a.re),
            num(r.a.im),
            r.mode,
            r.variant.label(),
            num(r.empirical.re),
            num(r.empirical.im),
            num(r.rhs.re),
            num(r.rhs.im),
            num(r.residual),
            num(r.normalized_residual),
            r.n_points
        );
    }
}

#[derive(Serialize)]
struct Table<'a> {
    phase_sign: String,
    rows: &'a [VerificationRow],
}

fn cmd_verify(args: VerifyArgs) -> CliResult<()> {
    let grid = parse_grid(&args.t_grid)?;
    let chi = primitive_character(&args.ch)?;
    if !(args.x > 0.0) {
        return Err(Failure::usage("--X must be positive"));
    }
    let mode: Mode = args.mode.into();
    if mode == Mode::LemmaZero && args.a != Complex64::new(0.0, 0.0) {
        return Err(Failure::usage("--mode lemma-zero needs --a 0"));
    }
    let phases: Vec<PhaseSign> = match args.phase_sign {
        PhaseArg::Plus => vec![PhaseSign::Plus],
        PhaseArg::Minus => vec![PhaseSign::Minus],
        PhaseArg::Both => vec![PhaseSign::Minus, PhaseSign::Plus],
    };
    let cache_dir = args.cache.dir();
    let store = ApointStore::new(&cache_dir)?;
    let sieve = FactorSieve::new(args.sieve_limit);
    let cal = calibration::frozen();

    let mut tables = Vec::new();
    for phase in phases {
        let variant = RhsVariant {
            phase,
            root_number: args.corrected,
            a_terms_unit_x: args.corrected,
        };
        let opts = TableOptions { variant, include_trivial: args.include_trivial };
        let rows = residual_table(&chi, args.a, args.x, &grid, mode, opts, &store, &sieve)?;
        tables.push((variant, rows));
    }

    let mut text = String::new();
    match args.format {
        Format::Csv => {
            if !args.no_timestamp {
                let secs = std::time::SystemTime::now()
                    .duration_since(std::time::UNIX_EPOCH)
                    .map(|d| d.as_secs())
                    .unwrap_or(0);
                let _ = writeln!(text, "# generated at unix time {secs}");
            }
            let _ = writeln!(text, "{CSV_HEADER}");
            for (_, rows) in &tables {
                csv_rows(rows, &mut text);
            }
        }
        Format::Json => {
            let view: Vec<Table> = tables
                .iter()
                .map(|(v, rows)| Table { phase_sign: v.label(), rows })
                .collect();
            text = serde_json::to_string_pretty(&view)? + "\n";
        }
    }
    match &args.output {
        Some(p) => fs::write(p, &text)?,
        None => emit(&text)?,
    }

    for (variant, rows) in &tables {
        let plot = match &args.plot {
            Some(p) if tables.len() == 1 => p.clone(),
            Some(p) => suffixed(p, &variant.label()),
            None => cache_dir.join("plots").join(format!(
                "q{}_chi{}_{}_{}.txt",
                chi.modulus(),
                chi.index(),
                mode,
                variant.label()
            )),
        };
        write_plot(&plot, rows)?;
    }

    let mut failures = Vec::new();
    let mut nonconverged = Vec::new();
    for (_, rows) in &tables {
        for r in rows {
            if let Some(e) = &r.error {
                nonconverged.push(format!("T={}: {e}", r.t_requested));
                continue;
            }
            match row_check(cal, r) {
                Some((v, b)) if !(v <= b) => failures.push(format!(
                    "T={} ({}): residual measure {v:.4e} exceeds the frozen limit {b:.4e}",
                    r.t_used,
                    r.variant.label(),
                )),
                Some(_) => {}
                None => eprintln!(
                    "note: no frozen bound for {}; row not gated",
                    residual_label(r.mode, r.variant)
                ),
            }
        }
    }
    if !nonconverged.is_empty() {
        return Err(Failure { code: 4, message: nonconverged.join("; ") });
    }
    if !failures.is_empty() {
        return Err(Failure { code: 5, message: failures.join("; ") });
    }
    Ok(())
}

fn suffixed(p: &Path, tag: &str) -> PathBuf {
    let stem = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let ext = p.extension().map(|e| format!(".{}", e.to_string_lossy())).unwrap_or_default();
    p.with_file_name(format!("{stem}_{tag}{ext}"))
}

fn write_plot(path: &Path, rows: &[VerificationRow]) -> CliResult<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    let mut text = String::from("# T normalized_residual\n");
    for r in rows.iter().filter(|r| r.error.is_none()) {
        let _ = writeln!(text, "{} {}", r.t_used, r.normalized_residual);
    }
    fs::write(path, text)?;
    Ok(())
}

fn cmd_stieltjes(args: StieltjesArgs) -> CliResult<()> {
    let chi = pick_character(&args.ch)?;
    if chi.is_principal() {
        return Err(Failure::usage("Stieltjes coefficients need a nonprincipal character"));
    }
    if args.n_max > STIELTJES_MAX_N {
        return Err(Failure::usage(format!("--n-max must be at most {STIELTJES_MAX_N}")));
    }
    let sieve = FactorSieve::new(args.sieve_limit);
    let coeffs = stieltjes_unchecked(&chi, args.n_max, &sieve)?;
    print_json(&coeffs)?;
    if !(coeffs.method_gap <= STIELTJES_GAP_TOL) {
        return Err(Failure {
            code: 5,
            message: format!("method gap {:e} exceeds {STIELTJES_GAP_TOL:e}", coeffs.method_gap),
        });
    }
    Ok(())
}

fn cmd_calibrate(args: CalibrateArgs) -> CliResult<()> {
    let store = ApointStore::new(args.cache.dir())?;
    let sieve = FactorSieve::new(args.sieve_limit);
    let cal = calibration::calibrate(&store, &sieve)?;
    let text = serde_json::to_string_pretty(&cal)? + "\n";
    match &args.output {
        Some(p) => fs::write(p, text)?,
        None => emit(&text)?,
    }
    if let Some((_, c)) = cal.corollary_envelope {
        if !(c > 0.0) {
            eprintln!("note: fitted corollary exponent c = {c:.4} is not positive");
        }
    }
    Ok(())
}
