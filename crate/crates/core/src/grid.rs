//! Sampled functions of one variable and their CSV form.

use std::fmt::Write as _;

use crate::error::{Error, Result};

/// Relative spacing deviation accepted by [`GridFunction::uniform_step`].
const UNIFORM_RTOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    xs: Vec<f64>,
    ys: Vec<f64>,
    pub meta: String,
}

impl GridFunction {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>, meta: impl Into<String>) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::InvalidGrid(format!(
                "{} sample points but {} values",
                xs.len(),
                ys.len()
            )));
        }
        if xs.len() < 2 {
            return Err(Error::InvalidGrid("at least two samples required".into()));
        }
        if xs.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidGrid("sample points must be strictly increasing".into()));
        }
        Ok(Self { xs, ys, meta: meta.into() })
    }

    /// `f` sampled at `n + 1` equally spaced points on `[a, b]`.
    pub fn sample<F: FnMut(f64) -> f64>(a: f64, b: f64, n: usize, mut f: F, meta: impl Into<String>) -> Result<Self> {
        if n == 0 || !(b > a) {
            return Err(Error::InvalidGrid(format!("need n >= 1 and a < b, got n={n}, [{a}, {b}]")));
        }
        let xs = uniform_points(a, b, n);
        let ys = xs.iter().map(|&x| f(x)).collect();
        Self::new(xs, ys, meta)
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn ys(&self) -> &[f64] {
        &self.ys
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    /// Same abscissae, new values.
    pub fn with_values(&self, ys: Vec<f64>, meta: impl Into<String>) -> Result<Self> {
        Self::new(self.xs.clone(), ys, meta)
    }

    /// Common spacing if the grid is uniform, otherwise `NonUniformGrid`.
    pub fn uniform_step(&self) -> Result<f64> {
        let n = self.xs.len() - 1;
        let h = (self.xs[n] - self.xs[0]) / n as f64;
        for (i, w) in self.xs.windows(2).enumerate() {
            if ((w[1] - w[0]) - h).abs() > UNIFORM_RTOL * h {
                return Err(Error::NonUniformGrid(format!(
                    "spacing {} at index {i} differs from {h}",
                    w[1] - w[0]
                )));
            }
        }
        Ok(h)
    }

    /// Trapezoidal integral over the whole grid.
    pub fn trapezoid(&self) -> f64 {
        self.weighted_trapezoid(|_| 1.0)
    }

    /// Trapezoidal integral of `w(x) y(x)`.
    pub fn weighted_trapezoid<W: Fn(f64) -> f64>(&self, w: W) -> f64 {
        self.xs
            .windows(2)
            .zip(self.ys.windows(2))
            .map(|(x, y)| 0.5 * (x[1] - x[0]) * (w(x[0]) * y[0] + w(x[1]) * y[1]))
            .sum()
    }

    /// Two-column CSV: '#' comment lines carrying `meta`, a header row, then
    /// values in shortest round-trip decimal form.
    pub fn to_csv(&self, columns: (&str, &str)) -> String {
        let mut out = String::new();
        for line in self.meta.lines() {
            let _ = writeln!(out, "# {line}");
        }
        let _ = writeln!(out, "{},{}", columns.0, columns.1);
        for (x, y) in self.xs.iter().zip(&self.ys) {
            let _ = writeln!(out, "{x:?},{y:?}");
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut meta = Vec::new();
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        let mut header_seen = false;
        for (lineno, line) in text.lines().enumerate() {
            if let Some(m) = line.strip_prefix('#') {
                meta.push(m.strip_prefix(' ').unwrap_or(m).to_string());
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            if !header_seen {
                header_seen = true;
                continue;
            }
            let mut cols = line.split(',');
            let mut next = || -> Result<f64> {
                let field = cols
                    .next()
                    .ok_or_else(|| Error::Parse(format!("line {}: missing column", lineno + 1)))?;
                field
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("line {}: bad number {field:?}", lineno + 1)))
            };
            xs.push(next()?);
            ys.push(next()?);
        }
        Self::new(xs, ys, meta.join("\n"))
    }
}

/// `n + 1` equally spaced points from `a` to `b`, endpoints exact.
pub fn uniform_points(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..=n)
        .map(|i| if i == n { b } else { a + (b - a) * i as f64 / n as f64 })
        .collect()
}
