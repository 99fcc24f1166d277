use std::fmt::Write as _;
use std::str::FromStr;

use crate::contour::{filter_eval, QuadratureRule};
use crate::dense::C64;
use crate::error::{Error, Result};

/// Sample line for filter plots: `real:a:b:n` or `imag:a:b:n`, `n` equally
/// spaced points including both ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub imaginary: bool,
    pub start: f64,
    pub end: f64,
    pub count: usize,
}

impl Axis {
    pub fn real(start: f64, end: f64, count: usize) -> Self {
        Self {
            imaginary: false,
            start,
            end,
            count,
        }
    }

    pub fn samples(&self) -> Vec<C64> {
        (0..self.count)
            .map(|i| {
                let t = if self.count > 1 {
                    self.start + (self.end - self.start) * i as f64 / (self.count - 1) as f64
                } else {
                    self.start
                };
                if self.imaginary {
                    C64::new(0.0, t)
                } else {
                    C64::new(t, 0.0)
                }
            })
            .collect()
    }
}

impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::BadSpec(format!("axis `{s}` is not `real:a:b:n` or `imag:a:b:n`"));
        let parts: Vec<&str> = s.trim().split(':').collect();
        let [kind, a, b, n] = parts.as_slice() else {
            return Err(bad());
        };
        let imaginary = match kind.to_ascii_lowercase().as_str() {
            "real" | "re" => false,
            "imag" | "im" => true,
            _ => return Err(bad()),
        };
        let start: f64 = a.parse().map_err(|_| bad())?;
        let end: f64 = b.parse().map_err(|_| bad())?;
        let count: usize = n.parse().map_err(|_| bad())?;
        if count == 0 || !start.is_finite() || !end.is_finite() {
            return Err(bad());
        }
        Ok(Self {
            imaginary,
            start,
            end,
            count,
        })
    }
}

/// `re,im,abs_f,f_re,f_im`, one row per sample.
pub fn filter_csv(rule: &QuadratureRule, axis: &Axis) -> Result<String> {
    let mut out = String::from("re,im,abs_f,f_re,f_im\n");
    for lambda in axis.samples() {
        let f = filter_eval(rule, lambda)?;
        let _ = writeln!(out, "{:e},{:e},{:e},{:e},{:e}", lambda.re, lambda.im, f.norm(), f.re, f.im);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contour::{build_rule, ContourRegion, RuleKind};

    #[test]
    fn axis_parsing() {
        let a: Axis = "real:-2:2:401".parse().unwrap();
        assert_eq!(a, Axis::real(-2.0, 2.0, 401));
        let s = a.samples();
        assert_eq!(s[200], C64::new(0.0, 0.0));
        assert_eq!(s[400], C64::new(2.0, 0.0));
        assert!("imag:0:1:3".parse::<Axis>().unwrap().imaginary);
        assert!("real:0:1".parse::<Axis>().is_err());
        assert!("real:0:1:0".parse::<Axis>().is_err());
    }

    #[test]
    fn csv_shape_and_values() {
        let rule = build_rule(ContourRegion::unit_circle(), RuleKind::Trapezoidal, 32).unwrap();
        let csv = filter_csv(&rule, &"real:-2:2:401".parse().unwrap()).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 402);
        let mid: Vec<f64> = lines[201].split(',').map(|t| t.parse().unwrap()).collect();
        assert!((mid[2] - 1.0).abs() < 1e-12);
        let end: Vec<f64> = lines[401].split(',').map(|t| t.parse().unwrap()).collect();
        assert!(end[2] < 1e-9);
    }
}
