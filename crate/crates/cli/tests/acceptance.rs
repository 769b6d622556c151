//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any failure.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use su11_core::quadrature::QuadratureScheme;
use su11_core::realizations::basis_halfline;
use su11_core::verify::{run_suite, VerifyOptions};
use su11_core::wavelet::{fitted_constant, identity_resolution_check, GridSpec, MotherWavelet};
use su11_core::RepLabel;

struct Outcome {
    pass: bool,
    detail: String,
}

fn suite(name: &str) -> Outcome {
    match run_suite(name, &VerifyOptions::default()) {
        Ok(r) => {
            let failed: Vec<&str> = r
                .checks
                .iter()
                .filter(|c| !c.pass)
                .map(|c| c.name.as_str())
                .collect();
            let worst = r
                .checks
                .iter()
                .filter(|c| c.tol > 0.0 && c.residual <= c.tol)
                .map(|c| c.residual / c.tol)
                .fold(0.0, f64::max);
            Outcome {
                pass: failed.is_empty(),
                detail: if failed.is_empty() {
                    format!("{} checks, max residual/tol {worst:.2e}", r.checks.len())
                } else {
                    format!("failed: {}", failed.join("; "))
                },
            }
        }
        Err(e) => Outcome {
            pass: false,
            detail: e.to_string(),
        },
    }
}

fn orthonormality() -> Outcome {
    let t = Instant::now();
    let mut o = suite("orthonormality");
    let dt = t.elapsed();
    o.pass &= dt < Duration::from_secs(30);
    o.detail = format!("{}, {:.2} s (limit 30 s)", o.detail, dt.as_secs_f64());
    o
}

fn completeness() -> Result<Outcome, su11_core::Error> {
    let k = RepLabel::new(2)?;
    let w = MotherWavelet::fundamental(k)?;
    let scheme = QuadratureScheme::default();
    let states = (0..3)
        .map(|m| basis_halfline(k, m))
        .collect::<Result<Vec<_>, _>>()?;
    let grid = GridSpec::default_grid();
    let coarse = identity_resolution_check(&w, &states, &grid, &scheme)?;
    let fine = identity_resolution_check(&w, &states, &grid.refine(2), &scheme)?;
    let exact = 1.0 / (4.0 * std::f64::consts::PI);
    let fitted = fitted_constant(&w, &grid, &scheme)?;
    let rel = ((fitted - exact) / exact).abs();
    Ok(Outcome {
        pass: coarse.max_deviation < 2e-2
            && fine.max_deviation < coarse.max_deviation
            && rel < 1e-2,
        detail: format!(
            "deviation {:.3e} (< 2e-2), refined {:.3e}, fitted constant off by {:.3e} (< 1e-2)",
            coarse.max_deviation, fine.max_deviation, rel
        ),
    })
}

fn su11(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_su11"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn round_trip(dir: &Path, tag: &str, signal: &str) -> Result<(f64, Vec<Vec<u8>>), String> {
    let coeffs = dir.join(format!("coeffs-{tag}.json"));
    let recon = dir.join(format!("recon-{tag}.csv"));
    let report = dir.join(format!("report-{tag}.json"));
    let out = su11(&[
        "scalogram",
        "--two-k",
        "2",
        "--input",
        signal,
        "--output",
        coeffs.to_str().unwrap(),
    ]);
    if !out.status.success() {
        return Err(format!(
            "scalogram: {}",
            String::from_utf8_lossy(&out.stderr)
        ));
    }
    let out = su11(&[
        "reconstruct",
        "--input",
        coeffs.to_str().unwrap(),
        "--reference",
        signal,
        "--output",
        recon.to_str().unwrap(),
        "--report",
        report.to_str().unwrap(),
    ]);
    if !out.status.success() {
        return Err(format!(
            "reconstruct: {}",
            String::from_utf8_lossy(&out.stderr)
        ));
    }
    let bytes: Vec<Vec<u8>> = [&coeffs, &recon, &report]
        .iter()
        .map(|p| std::fs::read(p).unwrap())
        .collect();
    let rep: serde_json::Value = serde_json::from_slice(&bytes[2]).map_err(|e| e.to_string())?;
    let err = rep["relative_l2_error"]
        .as_f64()
        .ok_or("report lacks relative_l2_error")?;
    Ok((err, bytes))
}

fn cli_end_to_end() -> Outcome {
    let dir = tempfile::tempdir().expect("temp dir");
    let signal: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "data", "signal.csv"]
        .iter()
        .collect();
    let signal = signal.to_str().unwrap();
    match (
        round_trip(dir.path(), "a", signal),
        round_trip(dir.path(), "b", signal),
    ) {
        (Ok((e, a)), Ok((_, b))) => {
            let same = a == b;
            Outcome {
                pass: e < 2e-2 && same,
                detail: format!(
                    "relative L2 error {e:.3e} (< 2e-2), reruns byte-identical: {same}"
                ),
            }
        }
        (Err(e), _) | (_, Err(e)) => Outcome {
            pass: false,
            detail: e,
        },
    }
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("algebra", || suite("algebra")),
        ("orthonormality", orthonormality),
        ("cross-realization", || suite("realizations")),
        ("coherent-state consistency", || suite("coherent")),
        ("phase relation", || suite("phase")),
        ("mean values", || suite("means")),
        ("annihilation and saturation", || suite("saturation")),
        ("completeness", || {
            completeness().unwrap_or_else(|e| Outcome {
                pass: false,
                detail: e.to_string(),
            })
        }),
        ("admissibility", || suite("admissibility")),
        ("Morse correspondence", || suite("morse")),
        ("CLI end-to-end", cli_end_to_end),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let o = run();
        println!(
            "criterion {:>2} {:<28} {}  ({:.1} s) {}",
            i + 1,
            name,
            if o.pass { "PASS" } else { "FAIL" },
            t.elapsed().as_secs_f64(),
            o.detail
        );
        failures += usize::from(!o.pass);
    }
    if failures > 0 {
        println!("{failures} criteria failed");
        std::process::exit(1);
    }
}
