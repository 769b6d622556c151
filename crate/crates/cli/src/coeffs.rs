//! The coefficient JSON file written by `scalogram` and read by `reconstruct`.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use su11_core::wavelet::{CellFlag, CoefficientGrid, GridSpec};
use su11_core::{Complex64, RepLabel};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridMeta {
    pub ln_a0: f64,
    pub d_ln_a: f64,
    pub n_a: usize,
    pub b0: f64,
    pub d_b: f64,
    pub n_b: usize,
}

impl From<GridSpec> for GridMeta {
    fn from(g: GridSpec) -> Self {
        Self {
            ln_a0: g.ln_a0,
            d_ln_a: g.d_ln_a,
            n_a: g.n_a,
            b0: g.b0,
            d_b: g.d_b,
            n_b: g.n_b,
        }
    }
}

impl From<GridMeta> for GridSpec {
    fn from(g: GridMeta) -> Self {
        Self {
            ln_a0: g.ln_a0,
            d_ln_a: g.d_ln_a,
            n_a: g.n_a,
            b0: g.b0,
            d_b: g.d_b,
            n_b: g.n_b,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub two_k: u32,
    pub grid: GridMeta,
    pub wavelet: String,
    pub quad_tol: f64,
    pub failed_cells: usize,
    /// Sampled range of the analyzed signal.
    #[serde(default)]
    pub input_range: Option<(f64, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Flag {
    Ok,
    QuadratureFailure,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellRecord {
    pub a: f64,
    pub b: f64,
    pub re: f64,
    pub im: f64,
    pub flag: Flag,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoeffFile {
    pub meta: Meta,
    pub cells: Vec<CellRecord>,
}

impl CoeffFile {
    pub fn from_grid(
        grid: &CoefficientGrid,
        wavelet: String,
        quad_tol: f64,
        input_range: Option<(f64, f64)>,
    ) -> Self {
        let spec = grid.spec;
        let mut cells = Vec::with_capacity(spec.cells());
        for i in 0..spec.n_a {
            for j in 0..spec.n_b {
                let v = grid.get(i, j);
                let flag = match grid.flag(i, j) {
                    CellFlag::Ok => Flag::Ok,
                    CellFlag::QuadratureFailure { .. } => Flag::QuadratureFailure,
                };
                cells.push(CellRecord {
                    a: spec.a(i),
                    b: spec.b(j),
                    re: v.re,
                    im: v.im,
                    flag,
                });
            }
        }
        let meta = Meta {
            two_k: grid.k.two_k(),
            grid: spec.into(),
            wavelet,
            quad_tol,
            failed_cells: grid.failed_cells(),
            input_range,
        };
        Self { meta, cells }
    }

    pub fn write(&self, mut out: impl Write) -> CliResult<()> {
        serde_json::to_writer_pretty(&mut out, self)
            .map_err(|e| CliError::Numerical(format!("serializing coefficients: {e}")))?;
        writeln!(out)?;
        Ok(())
    }

    pub fn read(reader: impl Read) -> CliResult<Self> {
        let file: Self = serde_json::from_reader(reader)
            .map_err(|e| CliError::Input(format!("coefficient file: {e}")))?;
        file.validate()?;
        Ok(file)
    }

    fn validate(&self) -> CliResult<()> {
        let g = &self.meta.grid;
        let bad = |msg: String| Err(CliError::Input(format!("coefficient file: {msg}")));
        if g.n_a == 0
            || g.n_b == 0
            || !(g.d_ln_a > 0.0)
            || !(g.d_b > 0.0)
            || !g.ln_a0.is_finite()
            || !g.b0.is_finite()
        {
            return bad(format!("invalid grid {g:?}"));
        }
        if self.cells.len() != g.n_a * g.n_b {
            return bad(format!(
                "{} cells for a {}×{} grid",
                self.cells.len(),
                g.n_a,
                g.n_b
            ));
        }
        let spec = GridSpec::from(*g);
        let close = |x: f64, y: f64| (x - y).abs() <= 1e-12 * y.abs().max(1.0);
        for (n, c) in self.cells.iter().enumerate() {
            let (i, j) = (n / g.n_b, n % g.n_b);
            if !close(c.a, spec.a(i)) || !close(c.b, spec.b(j)) {
                return bad(format!(
                    "cell {n} at ({}, {}) is off the grid node ({}, {})",
                    c.a,
                    c.b,
                    spec.a(i),
                    spec.b(j)
                ));
            }
        }
        Ok(())
    }

    pub fn to_grid(&self, k: RepLabel) -> CoefficientGrid {
        let values = self
            .cells
            .iter()
            .map(|c| Complex64::new(c.re, c.im))
            .collect();
        let flags = self
            .cells
            .iter()
            .map(|c| match c.flag {
                Flag::Ok => CellFlag::Ok,
                Flag::QuadratureFailure => CellFlag::QuadratureFailure { achieved: f64::NAN },
            })
            .collect();
        CoefficientGrid {
            k,
            spec: self.meta.grid.into(),
            values,
            flags,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> CoeffFile {
        let k = RepLabel::new(2).unwrap();
        let spec = GridSpec::new(0.5, 2.0, 3, -1.0, 1.0, 5).unwrap();
        let mut grid = CoefficientGrid::zeros(k, spec);
        grid.values[7] = Complex64::new(0.25, -1.5);
        grid.flags[3] = CellFlag::QuadratureFailure { achieved: 1e-3 };
        CoeffFile::from_grid(&grid, "fundamental".into(), 1e-10, Some((0.01, 3.0)))
    }

    #[test]
    fn json_round_trip() {
        let f = sample();
        let mut buf = Vec::new();
        f.write(&mut buf).unwrap();
        let back = CoeffFile::read(buf.as_slice()).unwrap();
        assert_eq!(back, f);
        assert_eq!(back.meta.failed_cells, 1);
        let g = back.to_grid(RepLabel::new(2).unwrap());
        assert_eq!(g.get(1, 2), Complex64::new(0.25, -1.5));
        assert!(matches!(g.flag(0, 3), CellFlag::QuadratureFailure { .. }));
    }

    #[test]
    fn rejects_inconsistent_files() {
        let mut f = sample();
        f.cells.pop();
        let mut buf = Vec::new();
        f.write(&mut buf).unwrap();
        assert!(CoeffFile::read(buf.as_slice()).is_err());

        let mut f = sample();
        f.cells[4].b += 0.1;
        let mut buf = Vec::new();
        f.write(&mut buf).unwrap();
        assert!(CoeffFile::read(buf.as_slice()).is_err());

        assert!(CoeffFile::read("{}".as_bytes()).is_err());
    }
}
