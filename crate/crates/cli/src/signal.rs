//! Sampled signals: the `y,re,im` CSV format, cubic interpolation in `ln y`,
//! and the table writer shared by every subcommand that emits samples.

use std::io::{Read, Write};
use std::sync::Arc;

use serde_json::{Map, Value};
use su11_core::realizations::{HalfLineFunction, ShapeHints};
use su11_core::{Complex64, RepLabel};

use crate::error::{CliError, CliResult};

const MIN_POINTS: usize = 4;

/// Natural cubic spline through `(x_i, v_i)`.
#[derive(Debug, Clone)]
struct Spline {
    x: Vec<f64>,
    v: Vec<f64>,
    /// Second derivatives at the knots.
    m: Vec<f64>,
}

impl Spline {
    fn new(x: Vec<f64>, v: Vec<f64>) -> Self {
        let n = x.len();
        let mut m = vec![0.0; n];
        // Thomas algorithm on the interior equations.
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        for i in 1..n - 1 {
            let (h0, h1) = (x[i] - x[i - 1], x[i + 1] - x[i]);
            let rhs = 6.0 * ((v[i + 1] - v[i]) / h1 - (v[i] - v[i - 1]) / h0);
            let diag = 2.0 * (h0 + h1) - h0 * c[i - 1];
            c[i] = h1 / diag;
            d[i] = (rhs - h0 * d[i - 1]) / diag;
        }
        for i in (1..n - 1).rev() {
            m[i] = d[i] - c[i] * m[i + 1];
        }
        Self { x, v, m }
    }

    fn eval(&self, t: f64) -> f64 {
        let n = self.x.len();
        let i = self.x.partition_point(|&xi| xi <= t).clamp(1, n - 1) - 1;
        let h = self.x[i + 1] - self.x[i];
        let (a, b) = ((self.x[i + 1] - t) / h, (t - self.x[i]) / h);
        a * self.v[i]
            + b * self.v[i + 1]
            + ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[i + 1]) * h * h / 6.0
    }
}

/// A complex signal sampled at increasing positive `y`.
#[derive(Debug, Clone)]
pub struct SampledSignal {
    pub y: Vec<f64>,
    pub values: Vec<Complex64>,
}

impl SampledSignal {
    pub fn read_csv(reader: impl Read) -> CliResult<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(reader);
        let headers = rdr
            .headers()
            .map_err(|e| CliError::Input(format!("signal header: {e}")))?
            .clone();
        if headers.iter().collect::<Vec<_>>() != ["y", "re", "im"] {
            return Err(CliError::Input(format!(
                "signal header must be y,re,im, got {:?}",
                headers.iter().collect::<Vec<_>>()
            )));
        }
        let (mut y, mut values) = (Vec::new(), Vec::new());
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| CliError::Input(format!("signal row {}: {e}", line + 1)))?;
            let num = |i: usize| -> CliResult<f64> {
                let v: f64 = rec[i].parse().map_err(|e| {
                    CliError::Input(format!("signal row {}: {:?}: {e}", line + 1, &rec[i]))
                })?;
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(CliError::Input(format!(
                        "signal row {}: non-finite value",
                        line + 1
                    )))
                }
            };
            y.push(num(0)?);
            values.push(Complex64::new(num(1)?, num(2)?));
        }
        Self::new(y, values)
    }

    pub fn new(y: Vec<f64>, values: Vec<Complex64>) -> CliResult<Self> {
        if y.len() < MIN_POINTS {
            return Err(CliError::Input(format!(
                "signal needs at least {MIN_POINTS} samples, got {}",
                y.len()
            )));
        }
        if !(y[0] > 0.0) {
            return Err(CliError::Input(format!(
                "signal positions must be positive, got {}",
                y[0]
            )));
        }
        if let Some(w) = y.windows(2).find(|w| !(w[1] > w[0])) {
            return Err(CliError::Input(format!(
                "signal positions must increase strictly: {} then {}",
                w[0], w[1]
            )));
        }
        Ok(Self { y, values })
    }

    pub fn range(&self) -> (f64, f64) {
        (self.y[0], self.y[self.y.len() - 1])
    }

    /// Cubic interpolation in `ln y`, zero outside the sampled range.
    pub fn to_halfline(&self, k: RepLabel) -> HalfLineFunction {
        let (lo, hi) = self.range();
        log::warn!("signal is taken as zero outside the sampled range [{lo:e}, {hi:e}]");
        let x: Vec<f64> = self.y.iter().map(|y| y.ln()).collect();
        let re = Spline::new(x.clone(), self.values.iter().map(|v| v.re).collect());
        let im = Spline::new(x, self.values.iter().map(|v| v.im).collect());
        let splines = Arc::new((re, im));
        HalfLineFunction::from_fn(k, ShapeHints::compact(lo, hi), move |y| {
            if y < lo || y > hi {
                return Complex64::new(0.0, 0.0);
            }
            let t = y.ln();
            Complex64::new(splines.0.eval(t), splines.1.eval(t))
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(i64),
}

/// Rows of numbers under a fixed header.
#[derive(Debug, Clone)]
pub struct Table {
    pub headers: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(headers: Vec<&'static str>) -> Self {
        Self {
            headers,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    /// Rows `y,re,im` of `f` on the sample points.
    pub fn samples(ys: &[f64], f: impl Fn(f64) -> CliResult<Complex64>) -> CliResult<Self> {
        let mut t = Self::new(vec!["y", "re", "im"]);
        for &y in ys {
            let v = f(y)?;
            t.push(vec![Cell::Float(y), Cell::Float(v.re), Cell::Float(v.im)]);
        }
        Ok(t)
    }

    pub fn write(&self, format: Format, out: impl Write) -> CliResult<()> {
        match format {
            Format::Csv => self.write_csv(out),
            Format::Json => self.write_json(out),
        }
    }

    fn write_csv(&self, out: impl Write) -> CliResult<()> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        let csv_err = |e: csv::Error| CliError::Io(e.into());
        w.write_record(&self.headers).map_err(csv_err)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|c| match c {
                Cell::Float(x) => format!("{x:.16e}"),
                Cell::Int(i) => i.to_string(),
            }))
            .map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }

    fn write_json(&self, mut out: impl Write) -> CliResult<()> {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self
                    .headers
                    .iter()
                    .zip(row)
                    .map(|(h, c)| {
                        let v = match *c {
                            Cell::Float(x) => Value::from(x),
                            Cell::Int(i) => Value::from(i),
                        };
                        (h.to_string(), v)
                    })
                    .collect();
                Value::Object(obj)
            })
            .collect();
        serde_json::to_writer_pretty(&mut out, &rows).map_err(|e| CliError::Io(e.into()))?;
        writeln!(out)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spline_reproduces_cubics_in_the_interior() {
        let x: Vec<f64> = (0..40).map(|i| i as f64 * 0.1).collect();
        let f = |t: f64| 1.0 + t - 0.5 * t * t;
        let s = Spline::new(x.clone(), x.iter().map(|&t| f(t)).collect());
        for &t in &[0.05, 1.234, 2.0, 3.85] {
            assert!((s.eval(t) - f(t)).abs() < 1e-3, "{t}");
        }
        for (&t, &v) in s.x.iter().zip(&s.v) {
            assert_eq!(s.eval(t), v);
        }
    }

    #[test]
    fn spline_converges_on_smooth_data() {
        let ys: Vec<f64> = (0..400)
            .map(|i| (-5.0 + 7.0 * i as f64 / 399.0f64).exp())
            .collect();
        let f = |y: f64| {
            Complex64::new(
                y * (-2.0 * std::f64::consts::PI * y).exp(),
                y.sin() * (-y).exp(),
            )
        };
        let sig = SampledSignal::new(ys.clone(), ys.iter().map(|&y| f(y)).collect()).unwrap();
        let h = sig.to_halfline(RepLabel::new(2).unwrap());
        for &y in &[0.01, 0.1, 0.33, 1.0] {
            assert!((h.eval(y) - f(y)).norm() < 1e-6, "{y}");
        }
        assert_eq!(h.eval(10.0), Complex64::new(0.0, 0.0));
        assert_eq!(h.eval(1e-4), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn rejects_bad_samples() {
        let v = vec![Complex64::new(0.0, 0.0); 4];
        assert!(SampledSignal::new(vec![1.0, 2.0, 3.0], v[..3].to_vec()).is_err());
        assert!(SampledSignal::new(vec![0.0, 1.0, 2.0, 3.0], v.clone()).is_err());
        assert!(SampledSignal::new(vec![1.0, 2.0, 2.0, 3.0], v.clone()).is_err());
        assert!(SampledSignal::new(vec![1.0, 2.0, 3.0, 4.0], v).is_ok());
        assert!(SampledSignal::read_csv("".as_bytes()).is_err());
        assert!(SampledSignal::read_csv("y,re,im\n".as_bytes()).is_err());
        assert!(
            SampledSignal::read_csv("y,re,im\n1,0,x\n2,0,0\n3,0,0\n4,0,0\n".as_bytes()).is_err()
        );
        assert!(
            SampledSignal::read_csv("y,re,im\n1,0,0\n2,0,0\n3,0,0\n4,0,0\n".as_bytes()).is_ok()
        );
    }

    #[test]
    fn csv_round_trips_doubles() {
        let mut t = Table::new(vec!["m", "re"]);
        let x = 0.1f64 + 0.2;
        t.push(vec![Cell::Int(3), Cell::Float(x)]);
        let mut buf = Vec::new();
        t.write(Format::Csv, &mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert_eq!(s.lines().next(), Some("m,re"));
        let back: f64 = s
            .lines()
            .nth(1)
            .unwrap()
            .split(',')
            .nth(1)
            .unwrap()
            .parse()
            .unwrap();
        assert_eq!(back, x);
        assert!(s.starts_with("m,re\n3,"));
    }
}
