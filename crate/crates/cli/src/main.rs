//! `su11`: evaluate discrete-series states, compute scalograms, reconstruct
//! signals and run the verification suites.
//!
//! Exit codes: 0 success, 2 usage or configuration, 3 numerical failure,
//! 4 malformed input data.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod coeffs;
mod error;
mod grid;
mod signal;

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use su11_core::algebra::{coherent_coeffs_with, DEFAULT_N_MAX, DEFAULT_TAIL_TOL};
use su11_core::group::{affine_to_zeta, AffineElement};
use su11_core::quadrature::{QuadratureScheme, DEFAULT_QUAD_TOL};
use su11_core::realizations::{
    affine_cs_halfline, basis_halfline, coherent_disk, coherent_halfline, coherent_halfplane,
    HalfLineFunction,
};
use su11_core::verify::{self, SuiteReport, VerifyOptions};
use su11_core::wavelet::{
    analyze, fitted_constant, relative_l2_distance, synthesize, Admissibility,
};
use su11_core::{morse, Complex64, RepLabel};

use coeffs::CoeffFile;
use error::{CliError, CliResult};
use grid::{analysis_grid, AxisGrid, Pair, WaveletName};
use signal::{Cell, Format, SampledSignal, Table};

const DEFAULT_Y_GRID: &str = "0.01:10:1000";
const RECONSTRUCT_POINTS: usize = 1000;

#[derive(Debug, Parser)]
#[command(
    name = "su11",
    version,
    about = "Discrete-series SU(1,1) states, wavelets and checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample a basis state ⟨y|km⟩.
    Basis(BasisArgs),
    /// Sample a Perelomov or affine coherent state in one realization.
    Coherent(CoherentArgs),
    /// Wavelet coefficients of a sampled signal.
    Scalogram(ScalogramArgs),
    /// Signal synthesized from a coefficient file.
    Reconstruct(ReconstructArgs),
    /// Run verification suites and report residuals.
    Verify(VerifyArgs),
    /// Sample a Morse coherent state.
    Morse(MorseArgs),
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// Output file; standard output when absent.
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Debug, Args)]
struct BasisArgs {
    /// Twice the representation label k.
    #[arg(long)]
    two_k: u32,
    #[arg(long, allow_negative_numbers = true)]
    m: i64,
    #[arg(long, default_value = DEFAULT_Y_GRID)]
    y_grid: AxisGrid,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Realization {
    Halfline,
    Disk,
    Halfplane,
    Coeffs,
}

#[derive(Debug, Args)]
struct CoherentArgs {
    #[arg(long)]
    two_k: u32,
    /// Disk label `re,im`.
    #[arg(long, allow_hyphen_values = true)]
    zeta: Option<Pair>,
    /// Affine label `a,b`.
    #[arg(long, allow_hyphen_values = true)]
    affine: Option<Pair>,
    #[arg(long, value_enum, default_value = "halfline")]
    realization: Realization,
    #[arg(long, default_value = DEFAULT_Y_GRID)]
    y_grid: AxisGrid,
    /// Real parts of the disk or half-plane sample points.
    #[arg(long, allow_hyphen_values = true)]
    z_grid: Option<AxisGrid>,
    /// Imaginary parts of the sample points; only zero when absent.
    #[arg(long, allow_hyphen_values = true)]
    z_im_grid: Option<AxisGrid>,
    /// Truncation tolerance for `--realization coeffs`.
    #[arg(long, default_value_t = DEFAULT_TAIL_TOL)]
    tail_tol: f64,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Args)]
struct ScalogramArgs {
    #[arg(long)]
    two_k: u32,
    /// Signal CSV with header `y,re,im`.
    #[arg(long)]
    input: PathBuf,
    /// `fundamental`, `basis:M` or `morse:S`.
    #[arg(long, default_value = "fundamental")]
    wavelet: WaveletName,
    /// Scale axis, log spaced; the default grid when absent.
    #[arg(long)]
    a_grid: Option<AxisGrid>,
    /// Translation axis; the default grid when absent.
    #[arg(long, allow_hyphen_values = true)]
    b_grid: Option<AxisGrid>,
    #[arg(long, default_value_t = DEFAULT_QUAD_TOL)]
    quad_tol: f64,
    /// Coefficient JSON; standard output when absent.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ConstantKind {
    Exact,
    Fitted,
}

#[derive(Debug, Args)]
struct ReconstructArgs {
    /// Coefficient JSON written by `scalogram`.
    #[arg(long)]
    input: PathBuf,
    /// Must match the label stored in the coefficient file.
    #[arg(long)]
    two_k: Option<u32>,
    /// Sample points; log spaced over the analyzed range when absent.
    #[arg(long)]
    y_grid: Option<AxisGrid>,
    /// Signal CSV to measure the reconstruction against.
    #[arg(long)]
    reference: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "exact")]
    constant: ConstantKind,
    #[arg(long, default_value_t = DEFAULT_QUAD_TOL)]
    quad_tol: f64,
    /// Error report JSON; standard error when absent.
    #[arg(long)]
    report: Option<PathBuf>,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Suite name, or `all`.
    #[arg(long, default_value = "all")]
    suite: String,
    #[arg(long, default_value_t = DEFAULT_QUAD_TOL)]
    quad_tol: f64,
    #[arg(long, default_value_t = DEFAULT_TAIL_TOL)]
    tail_tol: f64,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct MorseArgs {
    #[arg(long)]
    s: f64,
    /// Affine element `a,b` applied to the fundamental state.
    #[arg(long, allow_hyphen_values = true, default_value = "1,0")]
    affine: Pair,
    #[arg(long, default_value = DEFAULT_Y_GRID)]
    y_grid: AxisGrid,
    /// Also write norm, admissibility and J₀ residual as JSON.
    #[arg(long)]
    report: Option<PathBuf>,
    #[command(flatten)]
    out: OutputArgs,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match configure_threads().and_then(|()| run(cli.command)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("su11: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn configure_threads() -> CliResult<()> {
    let Ok(v) = std::env::var("SU11_THREADS") else {
        return Ok(());
    };
    let n: usize = v.parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        CliError::Usage(format!(
            "SU11_THREADS must be a positive integer, got {v:?}"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(format!("thread pool: {e}")))
}

fn run(cmd: Command) -> CliResult<()> {
    match cmd {
        Command::Basis(a) => cmd_basis(a),
        Command::Coherent(a) => cmd_coherent(a),
        Command::Scalogram(a) => cmd_scalogram(a),
        Command::Reconstruct(a) => cmd_reconstruct(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Morse(a) => cmd_morse(a),
    }
}

fn label(two_k: u32) -> CliResult<RepLabel> {
    Ok(RepLabel::new(two_k)?)
}

fn check_tol(name: &str, tol: f64) -> CliResult<f64> {
    if tol > 0.0 && tol < 1.0 {
        Ok(tol)
    } else {
        Err(CliError::Usage(format!(
            "--{name} must lie in (0, 1), got {tol}"
        )))
    }
}

fn open_output(path: Option<&Path>) -> CliResult<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn open_input(path: &Path) -> CliResult<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn write_json(value: &impl Serialize, path: Option<&Path>) -> CliResult<()> {
    let mut out: Box<dyn Write> = match path {
        Some(_) => open_output(path)?,
        None => Box::new(io::stderr().lock()),
    };
    serde_json::to_writer_pretty(&mut out, value).map_err(|e| CliError::Io(e.into()))?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

fn sample_halfline(f: &HalfLineFunction, ys: &[f64]) -> CliResult<Table> {
    Table::samples(ys, |y| finite(f.eval(y)))
}

fn finite(v: Complex64) -> CliResult<Complex64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::Numerical(format!("non-finite value {v}")))
    }
}

fn emit(table: &Table, out: &OutputArgs) -> CliResult<()> {
    let mut w = open_output(out.output.as_deref())?;
    table.write(out.format, &mut w)?;
    w.flush()?;
    Ok(())
}

fn cmd_basis(args: BasisArgs) -> CliResult<()> {
    let k = label(args.two_k)?;
    let f = basis_halfline(k, args.m)?;
    emit(&sample_halfline(&f, &args.y_grid.points())?, &args.out)
}

fn cmd_coherent(args: CoherentArgs) -> CliResult<()> {
    let k = label(args.two_k)?;
    let (zeta, affine) = match (args.zeta, args.affine) {
        (Some(Pair(re, im)), None) => (Complex64::new(re, im), None),
        (None, Some(Pair(a, b))) => {
            let m = AffineElement::new(a, b)?;
            (affine_to_zeta(&m), Some(m))
        }
        (Some(_), Some(_)) => {
            return Err(CliError::Usage(
                "give either --zeta or --affine, not both".into(),
            ))
        }
        (None, None) => {
            return Err(CliError::Usage(
                "one of --zeta or --affine is required".into(),
            ))
        }
    };
    // ⟨y|ab⟩ = ((1+ζ)/(1+ζ̄))^k ⟨y|ζ⟩; the other realizations carry the same phase.
    let phase = match affine {
        Some(_) => Complex64::from_polar(1.0, 2.0 * k.k() * (1.0 + zeta).arg()),
        None => Complex64::new(1.0, 0.0),
    };
    let table = match args.realization {
        Realization::Halfline => {
            let f = match &affine {
                Some(m) => affine_cs_halfline(k, m),
                None => coherent_halfline(k, zeta)?,
            };
            sample_halfline(&f, &args.y_grid.points())?
        }
        Realization::Disk => {
            let f = coherent_disk(k, zeta)?;
            let grid = args.z_grid.unwrap_or(AxisGrid {
                start: -0.95,
                stop: 0.95,
                count: 39,
                log: false,
            });
            point_table(
                grid,
                args.z_im_grid,
                |z| z.norm_sqr() < 1.0,
                |z| phase * f.eval(z),
            )?
        }
        Realization::Halfplane => {
            let f = coherent_halfplane(k, zeta)?;
            let grid = args.z_grid.unwrap_or(AxisGrid {
                start: 0.05,
                stop: 5.0,
                count: 100,
                log: false,
            });
            point_table(grid, args.z_im_grid, |w| w.re > 0.0, |w| phase * f.eval(w))?
        }
        Realization::Coeffs => {
            let tol = check_tol("tail-tol", args.tail_tol)?;
            let s = coherent_coeffs_with(k, zeta, None, tol, DEFAULT_N_MAX)?;
            let mut t = Table::new(vec!["m", "re", "im"]);
            for (m, c) in s.coeffs().iter().enumerate() {
                let v = phase * c;
                t.push(vec![
                    Cell::Int(m as i64),
                    Cell::Float(v.re),
                    Cell::Float(v.im),
                ]);
            }
            t
        }
    };
    emit(&table, &args.out)
}

/// Samples on `re × im`, skipping points outside the domain.
fn point_table(
    re: AxisGrid,
    im: Option<AxisGrid>,
    inside: impl Fn(Complex64) -> bool,
    f: impl Fn(Complex64) -> Complex64,
) -> CliResult<Table> {
    let ims = im.map_or_else(|| vec![0.0], |g| g.points());
    let mut t = Table::new(vec!["z_re", "z_im", "re", "im"]);
    for x in re.points() {
        for &y in &ims {
            let z = Complex64::new(x, y);
            if !inside(z) {
                continue;
            }
            let v = finite(f(z))?;
            t.push(vec![
                Cell::Float(x),
                Cell::Float(y),
                Cell::Float(v.re),
                Cell::Float(v.im),
            ]);
        }
    }
    if t.rows.is_empty() {
        log::warn!("no sample point lies inside the domain");
    }
    Ok(t)
}

fn cmd_scalogram(args: ScalogramArgs) -> CliResult<()> {
    let k = label(args.two_k)?;
    let tol = check_tol("quad-tol", args.quad_tol)?;
    let w = args.wavelet.build(k)?;
    let spec = analysis_grid(args.a_grid, args.b_grid)?;
    let signal = SampledSignal::read_csv(open_input(&args.input)?)?;
    let psi = signal.to_halfline(k);
    let grid = analyze(&psi, &w, &spec, &QuadratureScheme::with_tol(tol))?;
    let file = CoeffFile::from_grid(&grid, args.wavelet.to_string(), tol, Some(signal.range()));
    let mut out = open_output(args.output.as_deref())?;
    file.write(&mut out)?;
    out.flush()?;
    Ok(())
}

#[derive(Debug, Serialize)]
struct ReconstructReport {
    relative_l2_error: Option<f64>,
    window: Option<f64>,
    error_estimate: Option<f64>,
    alias_limit: f64,
    coverage: f64,
    coverage_warning: bool,
    constant_kind: &'static str,
    constant: f64,
    failed_cells: usize,
}

fn cmd_reconstruct(args: ReconstructArgs) -> CliResult<()> {
    let tol = check_tol("quad-tol", args.quad_tol)?;
    let scheme = QuadratureScheme::with_tol(tol);
    let file = CoeffFile::read(open_input(&args.input)?)?;
    let k = RepLabel::new(file.meta.two_k)
        .map_err(|e| CliError::Input(format!("coefficient file: {e}")))?;
    if let Some(tk) = args.two_k {
        if tk != file.meta.two_k {
            return Err(CliError::Usage(format!(
                "--two-k {tk} does not match the file's {}",
                file.meta.two_k
            )));
        }
    }
    let wavelet: WaveletName = file
        .meta
        .wavelet
        .parse()
        .map_err(|e| CliError::Input(format!("coefficient file: wavelet: {e}")))?;
    let w = wavelet.build(k)?;
    let grid = file.to_grid(k);
    if grid.failed_cells() > 0 {
        log::warn!("{} cells were flagged during analysis", grid.failed_cells());
    }
    let synth = synthesize(&grid, &w, true)?;
    let (function, constant) = match args.constant {
        ConstantKind::Exact => (synth.function, synth.constant),
        ConstantKind::Fitted => {
            let c = fitted_constant(&w, &grid.spec, &scheme)?;
            (
                synth
                    .function
                    .scaled(Complex64::new(c / synth.constant, 0.0)),
                c,
            )
        }
    };

    let alias = synth.alias_limit;
    let ys = match args.y_grid {
        Some(g) => g.points(),
        None => {
            let (lo, hi) = file.meta.input_range.unwrap_or((1e-3, alias));
            let hi = hi.min(alias);
            if !(hi > lo) {
                return Err(CliError::Usage(format!(
                    "analyzed range starts beyond the alias limit {alias}"
                )));
            }
            AxisGrid {
                start: lo,
                stop: hi,
                count: RECONSTRUCT_POINTS,
                log: true,
            }
            .points()
        }
    };
    if ys.iter().any(|&y| y > alias) {
        log::warn!("samples beyond y = {alias} are aliased copies of the window");
    }
    emit(&sample_halfline(&function, &ys)?, &args.out)?;

    let (relative_l2_error, window) = match &args.reference {
        Some(path) => {
            let reference = SampledSignal::read_csv(open_input(path)?)?;
            let window = reference.range().1.min(alias);
            let e = relative_l2_distance(&function, &reference.to_halfline(k), window, &scheme)?;
            (Some(e), Some(window))
        }
        None => (None, None),
    };
    let report = ReconstructReport {
        relative_l2_error,
        window,
        error_estimate: synth.error_estimate,
        alias_limit: alias,
        coverage: synth.coverage,
        coverage_warning: synth.coverage_warning,
        constant_kind: match args.constant {
            ConstantKind::Exact => "exact",
            ConstantKind::Fitted => "fitted",
        },
        constant,
        failed_cells: grid.failed_cells(),
    };
    write_json(&report, args.report.as_deref())
}

#[derive(Debug, Serialize)]
struct CheckRecord<'a> {
    name: &'a str,
    residual: f64,
    tol: f64,
    pass: bool,
}

#[derive(Debug, Serialize)]
struct SuiteRecord<'a> {
    suite: &'a str,
    checks: Vec<CheckRecord<'a>>,
}

impl<'a> From<&'a SuiteReport> for SuiteRecord<'a> {
    fn from(r: &'a SuiteReport) -> Self {
        let checks = r
            .checks
            .iter()
            .map(|c| CheckRecord {
                name: &c.name,
                residual: c.residual,
                tol: c.tol,
                pass: c.pass,
            })
            .collect();
        Self {
            suite: &r.suite,
            checks,
        }
    }
}

fn cmd_verify(args: VerifyArgs) -> CliResult<()> {
    let opts = VerifyOptions {
        quad_tol: check_tol("quad-tol", args.quad_tol)?,
        tail_tol: check_tol("tail-tol", args.tail_tol)?,
    };
    let reports = if args.suite == "all" {
        verify::run_all(&opts)
    } else {
        vec![verify::run_suite(&args.suite, &opts)?]
    };
    let records: Vec<SuiteRecord> = reports.iter().map(SuiteRecord::from).collect();
    let mut out = open_output(args.output.as_deref())?;
    let written = if args.suite == "all" {
        serde_json::to_writer_pretty(&mut out, &records)
    } else {
        serde_json::to_writer_pretty(&mut out, &records[0])
    };
    written.map_err(|e| CliError::Io(e.into()))?;
    writeln!(out)?;
    out.flush()?;
    let failed: Vec<String> = reports
        .iter()
        .flat_map(|r| {
            r.checks
                .iter()
                .filter(|c| !c.pass)
                .map(move |c| format!("{}/{}", r.suite, c.name))
        })
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Numerical(format!(
            "{} checks failed: {}",
            failed.len(),
            failed.join(", ")
        )))
    }
}

#[derive(Debug, Serialize)]
struct MorseReport {
    s: f64,
    a: f64,
    b: f64,
    norm: f64,
    admissibility: Option<f64>,
    /// Absent when `J₀φ₀` leaves the space.
    j0_residual: Option<f64>,
}

fn cmd_morse(args: MorseArgs) -> CliResult<()> {
    let m = AffineElement::new(args.affine.0, args.affine.1)?;
    let f = morse::morse_family(args.s, &m)?;
    emit(&sample_halfline(&f, &args.y_grid.points())?, &args.out)?;
    if let Some(path) = &args.report {
        let scheme = QuadratureScheme::default();
        let w = su11_core::wavelet::MotherWavelet::morse(args.s)?;
        let report = MorseReport {
            s: args.s,
            a: m.a(),
            b: m.b(),
            norm: f.norm(&scheme)?,
            admissibility: match w.admissibility() {
                Admissibility::Finite(c) => Some(c),
                Admissibility::Divergent => None,
            },
            j0_residual: morse::j0_eigen_residual(args.s, &scheme).ok(),
        };
        write_json(&report, Some(path))?;
    }
    Ok(())
}
