//! Command-line value types: sample grids `start:stop:count[:log]`, complex
//! pairs `re,im` and wavelet names.

use std::fmt;
use std::str::FromStr;

use su11_core::wavelet::{GridSpec, MotherWavelet};
use su11_core::RepLabel;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisGrid {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    pub log: bool,
}

impl AxisGrid {
    pub fn points(&self) -> Vec<f64> {
        let n = self.count;
        (0..n)
            .map(|i| {
                let t = i as f64 / (n - 1) as f64;
                if self.log {
                    (self.start.ln() + t * (self.stop.ln() - self.start.ln())).exp()
                } else {
                    self.start + t * (self.stop - self.start)
                }
            })
            .collect()
    }
}

impl FromStr for AxisGrid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let log = match parts.as_slice() {
            [_, _, _] => false,
            [_, _, _, "log"] => true,
            _ => return Err(format!("expected start:stop:count[:log], got {s:?}")),
        };
        let num = |p: &str| p.trim().parse::<f64>().map_err(|e| format!("{p:?}: {e}"));
        let (start, stop) = (num(parts[0])?, num(parts[1])?);
        let count: usize = parts[2]
            .trim()
            .parse()
            .map_err(|e| format!("{:?}: {e}", parts[2]))?;
        if count < 2 {
            return Err(format!("grid count must be at least 2, got {count}"));
        }
        if !start.is_finite() || !stop.is_finite() || !(stop > start) {
            return Err(format!(
                "grid needs finite start < stop, got {start}:{stop}"
            ));
        }
        if log && !(start > 0.0) {
            return Err(format!("log grid needs a positive start, got {start}"));
        }
        Ok(Self {
            start,
            stop,
            count,
            log,
        })
    }
}

impl fmt::Display for AxisGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.stop, self.count)?;
        if self.log {
            f.write_str(":log")?;
        }
        Ok(())
    }
}

/// A pair `x,y` of reals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pair(pub f64, pub f64);

impl FromStr for Pair {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (x, y) = s
            .split_once(',')
            .ok_or_else(|| format!("expected x,y, got {s:?}"))?;
        let num = |p: &str| p.trim().parse::<f64>().map_err(|e| format!("{p:?}: {e}"));
        let (x, y) = (num(x)?, num(y)?);
        if !x.is_finite() || !y.is_finite() {
            return Err(format!("non-finite value in {s:?}"));
        }
        Ok(Self(x, y))
    }
}

/// `fundamental`, `basis:M` or `morse:S`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WaveletName {
    Fundamental,
    Basis(usize),
    Morse(f64),
}

impl WaveletName {
    pub fn build(&self, k: RepLabel) -> CliResult<MotherWavelet> {
        Ok(match *self {
            Self::Fundamental => MotherWavelet::fundamental(k)?,
            Self::Basis(m) => MotherWavelet::basis(k, m)?,
            Self::Morse(s) => {
                if k.two_k() != 2 {
                    return Err(CliError::Usage(format!(
                        "the Morse wavelet needs --two-k 2, got {}",
                        k.two_k()
                    )));
                }
                MotherWavelet::morse(s)?
            }
        })
    }
}

impl FromStr for WaveletName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.split_once(':') {
            None if s == "fundamental" => Ok(Self::Fundamental),
            Some(("basis", m)) => m
                .parse()
                .map(Self::Basis)
                .map_err(|e| format!("{m:?}: {e}")),
            Some(("morse", v)) => v
                .parse()
                .map(Self::Morse)
                .map_err(|e| format!("{v:?}: {e}")),
            _ => Err(format!(
                "expected fundamental, basis:M or morse:S, got {s:?}"
            )),
        }
    }
}

impl fmt::Display for WaveletName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Fundamental => f.write_str("fundamental"),
            Self::Basis(m) => write!(f, "basis:{m}"),
            Self::Morse(s) => write!(f, "morse:{s}"),
        }
    }
}

/// The analysis grid from optional `a` and `b` axes, falling back to the
/// default grid for a missing axis. The `a` axis is always log spaced.
pub fn analysis_grid(a: Option<AxisGrid>, b: Option<AxisGrid>) -> CliResult<GridSpec> {
    let d = GridSpec::default_grid();
    let (a_min, a_max, n_a) = match a {
        Some(g) if !(g.start > 0.0) => {
            return Err(CliError::Usage(format!("scales must be positive, got {g}")))
        }
        Some(g) => (g.start, g.stop, g.count),
        None => (d.a(0), d.a_max(), d.n_a),
    };
    let (b_min, b_max, n_b) = match b {
        Some(g) if g.log => return Err(CliError::Usage(format!("the b axis is linear, got {g}"))),
        Some(g) => (g.start, g.stop, g.count),
        None => (d.b0, d.b_max(), d.n_b),
    };
    Ok(GridSpec::new(a_min, a_max, n_a, b_min, b_max, n_b)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_grids() {
        let g: AxisGrid = "0.01:10:1000".parse().unwrap();
        assert_eq!(
            g,
            AxisGrid {
                start: 0.01,
                stop: 10.0,
                count: 1000,
                log: false
            }
        );
        let p = g.points();
        assert_eq!(p.len(), 1000);
        assert_eq!((p[0], p[999]), (0.01, 10.0));
        let l: AxisGrid = "1e-3:10:5:log".parse().unwrap();
        let p = l.points();
        assert!((p[2] - 0.1).abs() < 1e-15);
        assert!("1:2:1".parse::<AxisGrid>().is_err());
        assert!("2:1:5".parse::<AxisGrid>().is_err());
        assert!("0:1:5:log".parse::<AxisGrid>().is_err());
        assert!("1:2".parse::<AxisGrid>().is_err());
        assert!("1:2:3:lin".parse::<AxisGrid>().is_err());
    }

    #[test]
    fn parses_pairs_and_wavelets() {
        assert_eq!("-0.5,0".parse::<Pair>().unwrap(), Pair(-0.5, 0.0));
        assert!("1".parse::<Pair>().is_err());
        assert_eq!(
            "fundamental".parse::<WaveletName>().unwrap(),
            WaveletName::Fundamental
        );
        assert_eq!(
            "basis:2".parse::<WaveletName>().unwrap(),
            WaveletName::Basis(2)
        );
        assert_eq!(
            "morse:1.5".parse::<WaveletName>().unwrap(),
            WaveletName::Morse(1.5)
        );
        assert!("haar".parse::<WaveletName>().is_err());
        for w in [
            WaveletName::Fundamental,
            WaveletName::Basis(3),
            WaveletName::Morse(2.5),
        ] {
            assert_eq!(w.to_string().parse::<WaveletName>().unwrap(), w);
        }
    }

    #[test]
    fn default_axes() {
        assert_eq!(analysis_grid(None, None).unwrap(), GridSpec::default_grid());
        let b: AxisGrid = "-2:2:9".parse().unwrap();
        let g = analysis_grid(None, Some(b)).unwrap();
        assert_eq!((g.n_b, g.d_b), (9, 0.5));
    }
}
