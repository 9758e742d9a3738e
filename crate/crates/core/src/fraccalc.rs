//! Riemann-Liouville and Caputo operators: exact rules on power laws and
//! grid schemes for sampled functions.
//!
//! Conventions: J^μ f(t) = (1/Γ(μ)) ∫₀^t (t−τ)^{μ−1} f(τ) dτ, the
//! Riemann-Liouville derivative D^μ = D^m J^{m−μ} and the Caputo derivative
//! *D^μ = J^{m−μ} D^m with m − 1 < μ ≤ m.
//!
//! The initial-value terms that appear when Laplace-transforming the
//! Riemann-Liouville derivative have no meaning for generic grid data and
//! are not computed here.

use crate::error::{Error, Result};
use crate::gamma::{gamma, ln_gamma, rgamma};
use crate::grid::GridFunction;

/// Order μ > 0 together with the integer m = ⌈μ⌉.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FracOrder {
    mu: f64,
    m: u32,
}

impl FracOrder {
    pub fn new(mu: f64) -> Result<Self> {
        if !(mu > 0.0) || !mu.is_finite() {
            return Err(Error::InvalidOrder(format!("fractional order must be positive, got {mu}")));
        }
        Ok(Self { mu, m: mu.ceil() as u32 })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn m(&self) -> u32 {
        self.m
    }
}

fn check_power_args(mu: f64, g: f64, t: f64) -> Result<()> {
    if !(mu >= 0.0) || !mu.is_finite() {
        return Err(Error::InvalidOrder(format!("order must be non-negative, got {mu}")));
    }
    if !(g > -1.0) || !g.is_finite() {
        return Err(Error::InvalidExponent(format!("exponent must exceed -1, got {g}")));
    }
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::InvalidTime(t));
    }
    Ok(())
}

/// Γ(a)/Γ(b) with 1/Γ(b) = 0 at the poles of Γ(b).
fn gamma_quotient(a: f64, b: f64) -> f64 {
    let rb = rgamma(b);
    if rb == 0.0 {
        return 0.0;
    }
    let q = gamma(a) * rb;
    if q.is_finite() && q != 0.0 {
        q
    } else {
        crate::gamma::gamma_sign(a) * crate::gamma::gamma_sign(b) * (ln_gamma(a) - ln_gamma(b)).exp()
    }
}

/// J^μ t^γ = Γ(γ+1)/Γ(γ+1+μ) t^{γ+μ}; μ = 0 is the identity.
pub fn rl_integral_power(mu: f64, g: f64, t: f64) -> Result<f64> {
    check_power_args(mu, g, t)?;
    if mu == 0.0 {
        return Ok(t.powf(g));
    }
    Ok(gamma_quotient(g + 1.0, g + 1.0 + mu) * t.powf(g + mu))
}

/// D^μ t^γ = Γ(γ+1)/Γ(γ+1−μ) t^{γ−μ}; zero when γ + 1 − μ is a
/// non-positive integer.
pub fn rl_derivative_power(mu: f64, g: f64, t: f64) -> Result<f64> {
    check_power_args(mu, g, t)?;
    if mu == 0.0 {
        return Ok(t.powf(g));
    }
    let c = gamma_quotient(g + 1.0, g + 1.0 - mu);
    if c == 0.0 {
        return Ok(0.0);
    }
    Ok(c * t.powf(g - mu))
}

/// Caputo derivative of t^γ: zero for integer γ < m, otherwise the
/// Riemann-Liouville value (γ > m − 1 required).
pub fn caputo_power(mu: f64, g: f64, t: f64) -> Result<f64> {
    let order = FracOrder::new(mu)?;
    if !(g >= 0.0) || !g.is_finite() {
        return Err(Error::InvalidExponent(format!("exponent must be non-negative, got {g}")));
    }
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::InvalidTime(t));
    }
    let m = order.m() as f64;
    if g.fract() == 0.0 && g < m {
        return Ok(0.0);
    }
    if !(g > m - 1.0) {
        return Err(Error::InvalidExponent(format!(
            "t^{g} has no Caputo derivative of order {mu} (needs integer exponent or exponent > {})",
            m - 1.0
        )));
    }
    rl_derivative_power(mu, g, t)
}

/// Weights of the product trapezoidal rule for ∫₀^{t_n} (t_n − τ)^{μ−1} f(τ) dτ
/// on a unit-spaced grid, scaled so that
/// J^μ f(t_n) ≈ h^μ/Γ(μ+2) [ end(n) f_0 + Σ_{k=1}^{n−1} inner[k] f_{n−k} + f_n ].
pub(crate) struct ProductTrapezoid {
    mu: f64,
    inner: Vec<f64>,
}

impl ProductTrapezoid {
    pub(crate) fn new(mu: f64, n: usize) -> Self {
        let p = mu + 1.0;
        let pw = |k: f64| k.powf(p);
        let inner = (0..=n)
            .map(|k| {
                if k == 0 {
                    1.0
                } else {
                    let k = k as f64;
                    pw(k + 1.0) - 2.0 * pw(k) + pw(k - 1.0)
                }
            })
            .collect();
        Self { mu, inner }
    }

    /// Weight of f_{n−k} for 0 ≤ k < n.
    pub(crate) fn inner(&self, k: usize) -> f64 {
        self.inner[k]
    }

    /// Weight of f_0 in the sum for t_n, n ≥ 1.
    pub(crate) fn end(&self, n: usize) -> f64 {
        let nf = n as f64;
        (nf - 1.0).powf(self.mu + 1.0) - (nf - self.mu - 1.0) * nf.powf(self.mu)
    }
}

fn uniform_from_zero(f: &GridFunction) -> Result<f64> {
    let h = f.uniform_step()?;
    if f.xs()[0].abs() > 1e-12 * h {
        return Err(Error::InvalidGrid(format!("grid must start at 0, starts at {}", f.xs()[0])));
    }
    Ok(h)
}

fn rl_integral_values(ys: &[f64], h: f64, mu: f64) -> Vec<f64> {
    let n = ys.len() - 1;
    let w = ProductTrapezoid::new(mu, n);
    let scale = h.powf(mu) / gamma(mu + 2.0);
    let mut out = vec![0.0; n + 1];
    for (i, o) in out.iter_mut().enumerate().skip(1) {
        let mut acc = w.end(i) * ys[0];
        for k in 0..i {
            acc += w.inner(k) * ys[i - k];
        }
        *o = scale * acc;
    }
    out
}

/// J^μ f on the grid of `f` (uniform, starting at 0) by the product
/// trapezoidal rule: f is interpolated linearly and the kernel integrated
/// exactly on each panel. Second order for smooth f.
pub fn rl_integral_grid(f: &GridFunction, mu: f64) -> Result<GridFunction> {
    if !(mu > 0.0) || !mu.is_finite() {
        return Err(Error::UnsupportedOrder(mu));
    }
    let h = uniform_from_zero(f)?;
    f.with_values(rl_integral_values(f.ys(), h, mu), format!("J^{mu} of {}", f.meta))
}

/// Second-order finite-difference first derivative; `f0` replaces the
/// sample at t = 0.
fn fd_derivative(ys: &[f64], f0: f64, h: f64) -> Vec<f64> {
    let n = ys.len() - 1;
    let y = |i: usize| if i == 0 { f0 } else { ys[i] };
    (0..=n)
        .map(|i| {
            if n == 1 {
                (y(1) - y(0)) / h
            } else if i == 0 {
                (-3.0 * y(0) + 4.0 * y(1) - y(2)) / (2.0 * h)
            } else if i == n {
                (3.0 * y(n) - 4.0 * y(n - 1) + y(n - 2)) / (2.0 * h)
            } else {
                (y(i + 1) - y(i - 1)) / (2.0 * h)
            }
        })
        .collect()
}

/// Caputo derivative of order 0 < μ < 1 as J^{1−μ} applied to the
/// finite-difference derivative of f, with f(0⁺) = `f0`.
pub fn caputo_derivative_grid(f: &GridFunction, f0: f64, mu: f64) -> Result<GridFunction> {
    if !(mu > 0.0 && mu < 1.0) {
        return Err(Error::UnsupportedOrder(mu));
    }
    let h = uniform_from_zero(f)?;
    let d = fd_derivative(f.ys(), f0, h);
    f.with_values(rl_integral_values(&d, h, 1.0 - mu), format!("Caputo D^{mu} of {}", f.meta))
}
