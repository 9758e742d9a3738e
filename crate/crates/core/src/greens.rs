//! Green functions of the time-fractional diffusion family
//!
//! u(x, t) = u₀(x) + K/Γ(β) ∫₀^{t^{α/β}} (t^{α/β} − σ)^{β−1} ∂²u/∂x²(x, σ) dσ
//!
//! (written in stretched time σ = τ^{α/β}), of the time-fractional drift
//! equation, and a time-stepping solver for the integral form.
//!
//! The fundamental solution is
//! G(x, t) = 1/(2√K t^{α/2}) M_{β/2}(|x| / (√K t^{α/2})), which covers
//! standard (α = β = 1), stretched (β = 1) and time-fractional (α = β)
//! diffusion.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fraccalc::ProductTrapezoid;
use crate::gamma::gamma;
use crate::grid::{uniform_points, GridFunction};
use crate::quad::{integrate_with_breaks, QuadOptions};
use crate::specfun::{m_wright, m_wright_asymptotic, mittag_leffler_neg, AuxIndex, MAX_EVAL_ORDER};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Slow,
    Normal,
    Fast,
}

/// (α, β, K) selecting one member of the diffusion family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGreenSpec", into = "RawGreenSpec")]
pub struct GreenSpec {
    alpha: f64,
    beta: f64,
    k: f64,
}

#[derive(Serialize, Deserialize)]
struct RawGreenSpec {
    alpha: f64,
    beta: f64,
    #[serde(rename = "K")]
    k: f64,
}

impl TryFrom<RawGreenSpec> for GreenSpec {
    type Error = Error;
    fn try_from(r: RawGreenSpec) -> Result<Self> {
        GreenSpec::new(r.alpha, r.beta, r.k)
    }
}

impl From<GreenSpec> for RawGreenSpec {
    fn from(s: GreenSpec) -> Self {
        RawGreenSpec { alpha: s.alpha, beta: s.beta, k: s.k }
    }
}

impl GreenSpec {
    pub fn new(alpha: f64, beta: f64, k: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 2.0) {
            return Err(Error::InvalidOrder(format!("alpha must lie in (0, 2], got {alpha}")));
        }
        if !(beta > 0.0 && beta <= 1.0) {
            return Err(Error::InvalidOrder(format!("beta must lie in (0, 1], got {beta}")));
        }
        if !(k > 0.0) || !k.is_finite() {
            return Err(Error::InvalidArgument(format!("diffusion coefficient must be positive, got {k}")));
        }
        Ok(Self { alpha, beta, k })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn hurst(&self) -> f64 {
        self.alpha / 2.0
    }

    pub fn regime(&self) -> Regime {
        if self.alpha < 1.0 {
            Regime::Slow
        } else if self.alpha > 1.0 {
            Regime::Fast
        } else {
            Regime::Normal
        }
    }

    /// Spatial scale √K t^{α/2}.
    fn scale(&self, t: f64) -> f64 {
        self.k.sqrt() * t.powf(0.5 * self.alpha)
    }
}

/// One-sided drift equation of order β.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct DriftSpec {
    beta: f64,
}

impl DriftSpec {
    pub fn new(beta: f64) -> Result<Self> {
        if !(beta > 0.0 && beta <= 1.0) {
            return Err(Error::InvalidOrder(format!("beta must lie in (0, 1], got {beta}")));
        }
        Ok(Self { beta })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}

impl TryFrom<f64> for DriftSpec {
    type Error = Error;
    fn try_from(b: f64) -> Result<Self> {
        Self::new(b)
    }
}

impl From<DriftSpec> for f64 {
    fn from(d: DriftSpec) -> f64 {
        d.beta
    }
}

fn check_time(t: f64) -> Result<()> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::InvalidTime(t));
    }
    Ok(())
}

/// G_{α,β}(x, t); symmetric in x and normalized over the real line.
pub fn green_density(spec: GreenSpec, x: f64, t: f64) -> Result<f64> {
    check_time(t)?;
    if !x.is_finite() {
        return Err(Error::InvalidArgument(format!("x must be finite, got {x}")));
    }
    let s = spec.scale(t);
    let nu = AuxIndex::new(0.5 * spec.beta)?;
    Ok(0.5 / s * m_wright(nu, x.abs() / s, 1e-15)?.value)
}

/// σ²(t) = 2K t^α / Γ(β + 1).
pub fn variance_law(spec: GreenSpec, t: f64) -> Result<f64> {
    check_time(t)?;
    Ok(2.0 * spec.k * t.powf(spec.alpha) / gamma(spec.beta + 1.0))
}

fn check_nondimensional(spec: GreenSpec) -> Result<()> {
    if spec.alpha != spec.beta || spec.k != 1.0 {
        return Err(Error::SpecMismatch(format!(
            "transform-domain forms need alpha = beta and K = 1, got alpha={}, beta={}, K={}",
            spec.alpha, spec.beta, spec.k
        )));
    }
    Ok(())
}

/// Fourier transform in x of G_{β,β}: E_β(−κ² t^β) (K = 1).
pub fn green_fourier(spec: GreenSpec, kappa: f64, t: f64) -> Result<f64> {
    check_nondimensional(spec)?;
    check_time(t)?;
    Ok(mittag_leffler_neg(spec.beta, kappa * kappa * t.powf(spec.beta), 1e-15)?.value)
}

/// Laplace transform in t of G_{β,β}(x, ·): ½ s^{β/2−1} e^{−|x| s^{β/2}} (K = 1).
pub fn green_laplace(spec: GreenSpec, x: f64, s: f64) -> Result<f64> {
    check_nondimensional(spec)?;
    if !(s > 0.0) {
        return Err(Error::InvalidArgument(format!("Laplace variable must be positive, got {s}")));
    }
    let h = 0.5 * spec.beta;
    Ok(0.5 * s.powf(h - 1.0) * (-x.abs() * s.powf(h)).exp())
}

fn drift_order(spec: DriftSpec) -> Result<AuxIndex> {
    if spec.beta > MAX_EVAL_ORDER {
        return Err(Error::NearSingularOrder(spec.beta));
    }
    AuxIndex::new(spec.beta)
}

/// t^{−β} M_β(x t^{−β}) for x ≥ 0 and 0 for x < 0. The β = 1 limit is the
/// travelling pulse δ(x − t) and is rejected.
pub fn drift_green(spec: DriftSpec, x: f64, t: f64) -> Result<f64> {
    check_time(t)?;
    let nu = drift_order(spec)?;
    if x < 0.0 {
        return Ok(0.0);
    }
    let scale = t.powf(-spec.beta);
    Ok(scale * m_wright(nu, x * scale, 1e-15)?.value)
}

/// The drift Green function from the one-sided extremal stable density
/// L_β (Laplace transform e^{−s^β}): (t/β) x^{−1−1/β} L_β(t x^{−1/β}).
/// L_β is computed from its own integral in the angular variable, so this
/// is an independent route to [`drift_green`].
pub fn drift_green_stable_form(spec: DriftSpec, x: f64, t: f64) -> Result<f64> {
    check_time(t)?;
    drift_order(spec)?;
    if !(x > 0.0) {
        return Err(Error::InvalidArgument(format!("stable form needs x > 0, got {x}")));
    }
    let b = spec.beta;
    let r = t * x.powf(-1.0 / b);
    Ok(t / b * x.powf(-1.0 - 1.0 / b) * extremal_stable_density(b, r)?)
}

/// Density of the one-sided stable law with Laplace transform e^{−s^β},
/// 0 < β < 1, from
/// g(r) = β/((1−β)π) r^{−1/(1−β)} ∫₀^π Z(φ) exp(−Z(φ) r^{−β/(1−β)}) dφ,
/// Z(φ) = [sin βφ / sin φ]^{1/(1−β)} sin((1−β)φ) / sin βφ.
fn extremal_stable_density(beta: f64, r: f64) -> Result<f64> {
    let q = 1.0 / (1.0 - beta);
    let z = |phi: f64| {
        let sb = (beta * phi).sin();
        (sb / phi.sin()).powf(q) * ((1.0 - beta) * phi).sin() / sb
    };
    let z0 = beta.powf(beta * q) * (1.0 - beta);
    let w = r.powf(-beta * q);
    if z0 * w > 740.0 {
        return Ok(0.0);
    }
    // Z grows from z0 to ∞ on (0, π); cut where the exponent has dropped by 60
    let zmax = z0.max(1.0 / w) + 60.0 / w;
    let (mut lo, mut hi) = (0.0f64, PI);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if mid > 0.0 && z(mid) < zmax {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let integrand = |phi: f64| {
        let zv = if phi <= 0.0 { z0 } else { z(phi) };
        zv * (-(zv - z0) * w).exp()
    };
    let res = integrate_with_breaks(
        integrand,
        &[0.0, 0.5 * hi, hi],
        QuadOptions { abs_tol: 0.0, rel_tol: 1e-13, max_intervals: 1000 },
    )?;
    Ok(beta * q / PI * r.powf(-q) * (-z0 * w).exp() * res.value)
}

/// Half-width X with G(X, t) below `eps` (from the saddle-point envelope
/// of M_{β/2}), widened by `support` for initial data of that extent.
pub fn recommended_halfwidth(spec: GreenSpec, t: f64, eps: f64, support: f64) -> Result<f64> {
    check_time(t)?;
    let nu = 0.5 * spec.beta;
    let s = spec.scale(t);
    let mut r = 1.0;
    // the envelope is exact for β = 1; a factor 10 covers the other orders
    while 10.0 * 0.5 / s * m_wright_asymptotic(nu, r) > eps {
        r *= 1.02;
    }
    Ok(r * s + support)
}

/// Gaussian mollifier of the delta with standard deviation of five grid
/// spacings on [−halfwidth, halfwidth] (`nx` points), normalized to unit
/// trapezoidal mass.
pub fn delta_surrogate(halfwidth: f64, nx: usize) -> Result<GridFunction> {
    if nx < 3 || !(halfwidth > 0.0) {
        return Err(Error::InvalidGrid(format!("need nx >= 3 and positive halfwidth, got {nx}, {halfwidth}")));
    }
    let xs = uniform_points(-halfwidth, halfwidth, nx - 1);
    let sd = 5.0 * 2.0 * halfwidth / (nx - 1) as f64;
    let ys: Vec<f64> = xs.iter().map(|x| (-0.5 * (x / sd).powi(2)).exp()).collect();
    let g = GridFunction::new(xs, ys, format!("gaussian sd={sd}"))?;
    let mass = g.trapezoid();
    let ys = g.ys().iter().map(|y| y / mass).collect();
    g.with_values(ys, format!("gaussian sd={sd}"))
}

/// G(·, t) sampled on `nx` points of [−halfwidth, halfwidth].
pub fn green_profile(spec: GreenSpec, t: f64, halfwidth: f64, nx: usize) -> Result<GridFunction> {
    if nx < 2 || !(halfwidth > 0.0) {
        return Err(Error::InvalidGrid(format!("need nx >= 2 and positive halfwidth, got {nx}, {halfwidth}")));
    }
    let xs = uniform_points(-halfwidth, halfwidth, nx - 1);
    let ys = xs.iter().map(|&x| green_density(spec, x, t)).collect::<Result<Vec<_>>>()?;
    GridFunction::new(xs, ys, green_meta(spec, t))
}

pub(crate) fn green_meta(spec: GreenSpec, t: f64) -> String {
    format!("alpha={}\nbeta={}\nK={}\nt={}", spec.alpha, spec.beta, spec.k, t)
}

/// Thomas algorithm for (1 + 2c) u_i − c u_{i−1} − c u_{i+1} = rhs_i with
/// u = 0 outside the interior.
fn solve_tridiagonal(c: f64, rhs: &mut [f64], scratch: &mut [f64]) {
    let n = rhs.len();
    if n == 0 {
        return;
    }
    let diag = 1.0 + 2.0 * c;
    // scratch[i] holds the eliminated super-diagonal c'_i
    scratch[0] = -c / diag;
    rhs[0] /= diag;
    for i in 1..n {
        let denom = diag + c * scratch[i - 1];
        scratch[i] = -c / denom;
        rhs[i] = (rhs[i] + c * rhs[i - 1]) / denom;
    }
    for i in (0..n - 1).rev() {
        rhs[i] -= scratch[i] * rhs[i + 1];
    }
}

/// Marches the integral equation to `t_end` on the x-grid of `u0`, which
/// must be uniform on [−bc_halfwidth, bc_halfwidth] and vanish at both ends
/// (zero Dirichlet values are imposed there).
///
/// Time is uniform in σ = t^{α/β}; the kernel (T − σ)^{β−1} is integrated
/// exactly against piecewise-linear ∂²u/∂x² (product trapezoid), giving
/// one tridiagonal solve per step. The discrete mass and second moment
/// change exactly as in the continuous problem, up to boundary flux.
pub fn solve_volterra(u0: &GridFunction, spec: GreenSpec, t_end: f64, nt: usize, bc_halfwidth: f64) -> Result<GridFunction> {
    check_time(t_end)?;
    if nt < 16 {
        return Err(Error::InvalidArgument(format!("need at least 16 time steps, got {nt}")));
    }
    let dx = u0.uniform_step()?;
    let xs = u0.xs();
    let nx = xs.len();
    let edge_tol = 1e-9 * bc_halfwidth.abs().max(dx);
    if !(bc_halfwidth > 0.0)
        || (xs[0] + bc_halfwidth).abs() > edge_tol
        || (xs[nx - 1] - bc_halfwidth).abs() > edge_tol
    {
        return Err(Error::InvalidGrid(format!(
            "grid [{}, {}] does not span [-{bc_halfwidth}, {bc_halfwidth}]",
            xs[0],
            xs[nx - 1]
        )));
    }
    if nx < 5 {
        return Err(Error::InvalidGrid("need at least 5 grid points".into()));
    }
    let ys = u0.ys();
    let peak = ys.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if ys[0].abs() > 1e-12 * peak || ys[nx - 1].abs() > 1e-12 * peak {
        return Err(Error::InvalidGrid("initial data must vanish at the domain edges".into()));
    }

    let beta = spec.beta;
    let big_t = t_end.powf(spec.alpha / beta);
    let k = big_t / nt as f64;
    let c = spec.k * k.powf(beta) / gamma(beta + 2.0) / (dx * dx);
    let w = ProductTrapezoid::new(beta, nt);
    let m = nx - 2; // interior unknowns

    let lap = |u: &[f64], out: &mut [f64]| {
        for i in 0..m {
            let left = if i == 0 { 0.0 } else { u[i - 1] };
            let right = if i + 1 == m { 0.0 } else { u[i + 1] };
            out[i] = left - 2.0 * u[i] + right;
        }
    };

    let u_init: Vec<f64> = ys[1..nx - 1].to_vec();
    // history of dx² ∂²u/∂x² at σ_0 .. σ_{n−1}
    let mut hist: Vec<Vec<f64>> = Vec::with_capacity(nt + 1);
    let mut l0 = vec![0.0; m];
    lap(&u_init, &mut l0);
    hist.push(l0);
    let mut u = u_init.clone();
    let mut rhs = vec![0.0; m];
    let mut scratch = vec![0.0; m];
    let limit = 10.0 * peak.max(f64::MIN_POSITIVE);
    for n in 1..=nt {
        let e = w.end(n);
        for i in 0..m {
            rhs[i] = e * hist[0][i];
        }
        for j in 1..n {
            let wj = w.inner(n - j);
            let h = &hist[j];
            for i in 0..m {
                rhs[i] += wj * h[i];
            }
        }
        for i in 0..m {
            rhs[i] = u_init[i] + c * rhs[i];
        }
        solve_tridiagonal(c, &mut rhs, &mut scratch);
        u.copy_from_slice(&rhs);
        let norm = u.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        if !norm.is_finite() || norm > limit {
            return Err(Error::CflViolation { step: n, norm });
        }
        let mut ln = vec![0.0; m];
        lap(&u, &mut ln);
        hist.push(ln);
    }
    let mut out = Vec::with_capacity(nx);
    out.push(0.0);
    out.extend_from_slice(&u);
    out.push(0.0);
    u0.with_values(out, green_meta(spec, t_end))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(a: f64, b: f64, k: f64) -> GreenSpec {
        GreenSpec::new(a, b, k).unwrap()
    }

    #[test]
    fn spec_validation_and_regime() {
        assert!(GreenSpec::new(0.0, 0.5, 1.0).is_err());
        assert!(GreenSpec::new(2.5, 0.5, 1.0).is_err());
        assert!(GreenSpec::new(1.0, 1.5, 1.0).is_err());
        assert!(GreenSpec::new(1.0, 0.5, 0.0).is_err());
        assert_eq!(spec(0.5, 0.5, 1.0).regime(), Regime::Slow);
        assert_eq!(spec(1.0, 0.5, 1.0).regime(), Regime::Normal);
        assert_eq!(spec(1.5, 1.0, 1.0).regime(), Regime::Fast);
        assert_eq!(spec(1.5, 1.0, 1.0).hurst(), 0.75);
    }

    #[test]
    fn spec_json_round_trip() {
        let s = spec(1.5, 0.7, 2.0);
        let j = serde_json::to_string(&s).unwrap();
        assert_eq!(j, r#"{"alpha":1.5,"beta":0.7,"K":2.0}"#);
        assert_eq!(serde_json::from_str::<GreenSpec>(&j).unwrap(), s);
        assert!(serde_json::from_str::<GreenSpec>(r#"{"alpha":3.0,"beta":0.7,"K":2.0}"#).is_err());
    }

    #[test]
    fn density_examples() {
        let g = green_density(spec(1.0, 1.0, 1.0), 0.0, 1.0).unwrap();
        assert!((g - 0.5 / PI.sqrt()).abs() < 1e-15);
        let g = green_density(spec(1.0, 1.0, 1.0), 2.0, 1.0).unwrap();
        assert!((g - 0.5 / PI.sqrt() * (-1.0f64).exp()).abs() < 1e-15);
        let g = green_density(spec(0.5, 1.0, 1.0), 0.0, 4.0).unwrap();
        assert!((g - 0.199_471_140_200_716_34).abs() < 1e-15);
        let g = green_density(spec(0.5, 0.5, 1.0), 1.0, 1.0).unwrap();
        let m = m_wright(AuxIndex::new(0.25).unwrap(), 1.0, 1e-15).unwrap().value;
        assert!((g - 0.5 * m).abs() < 1e-15);
        assert!(matches!(green_density(spec(1.0, 1.0, 1.0), 0.0, 0.0), Err(Error::InvalidTime(_))));
    }

    #[test]
    fn variance_examples() {
        assert!((variance_law(spec(1.0, 1.0, 1.0), 3.0).unwrap() - 6.0).abs() < 1e-14);
        assert!((variance_law(spec(0.5, 0.5, 1.0), 1.0).unwrap() - 4.0 / PI.sqrt()).abs() < 1e-14);
        let v = variance_law(spec(1.5, 0.7, 2.0), 2.0).unwrap();
        assert!((v - 12.451_272_535_408_725).abs() < 1e-12);
    }

    #[test]
    fn fourier_and_laplace_forms() {
        assert!((green_fourier(spec(1.0, 1.0, 1.0), 1.0, 1.0).unwrap() - (-1.0f64).exp()).abs() < 1e-15);
        assert_eq!(green_fourier(spec(0.3, 0.3, 1.0), 0.0, 2.0).unwrap(), 1.0);
        let v = green_fourier(spec(0.5, 0.5, 1.0), 1.0, 1.0).unwrap();
        assert!((v - 0.427_583_576_155_807).abs() < 1e-12);
        assert!(matches!(green_fourier(spec(1.0, 0.5, 1.0), 1.0, 1.0), Err(Error::SpecMismatch(_))));
        assert!(matches!(green_fourier(spec(0.5, 0.5, 2.0), 1.0, 1.0), Err(Error::SpecMismatch(_))));
        // β = 1: Laplace transform of the heat kernel, e^{−|x|√s}/(2√s)
        let v = green_laplace(spec(1.0, 1.0, 1.0), 1.0, 4.0).unwrap();
        assert!((v - (-2.0f64).exp() / 4.0).abs() < 1e-16);
    }

    #[test]
    fn drift_examples() {
        let d = DriftSpec::new(0.5).unwrap();
        assert!((drift_green(d, 0.0, 1.0).unwrap() - 1.0 / PI.sqrt()).abs() < 1e-15);
        assert_eq!(drift_green(d, -1.0, 1.0).unwrap(), 0.0);
        assert!(matches!(drift_green(DriftSpec::new(1.0).unwrap(), 0.5, 1.0), Err(Error::NearSingularOrder(_))));
        for &(b, x, t) in &[(0.5, 1.0, 1.0), (0.5, 4.0, 1.0), (0.75, 0.5, 2.0), (0.25, 3.0, 0.5)] {
            let d = DriftSpec::new(b).unwrap();
            let a = drift_green(d, x, t).unwrap();
            let s = drift_green_stable_form(d, x, t).unwrap();
            assert!((a - s).abs() < 1e-10, "b={b} x={x} t={t}: {a} vs {s}");
        }
    }

    #[test]
    fn stable_density_half_is_levy() {
        // β = 1/2: g(r) = r^{−3/2} e^{−1/(4r)} / (2√π)
        for &r in &[0.05f64, 0.3, 1.0, 7.0] {
            let want = r.powf(-1.5) * (-0.25 / r).exp() / (2.0 * PI.sqrt());
            let got = extremal_stable_density(0.5, r).unwrap();
            assert!((got - want).abs() < 1e-13 * want.max(1.0), "r={r}");
        }
    }

    #[test]
    fn tridiagonal_solver() {
        let c = 0.7;
        let x = [1.0, -2.0, 0.5, 3.0];
        let mut rhs: Vec<f64> = (0..4)
            .map(|i| {
                let l = if i == 0 { 0.0 } else { x[i - 1] };
                let r = if i == 3 { 0.0 } else { x[i + 1] };
                (1.0 + 2.0 * c) * x[i] - c * (l + r)
            })
            .collect();
        let mut s = vec![0.0; 4];
        solve_tridiagonal(c, &mut rhs, &mut s);
        for i in 0..4 {
            assert!((rhs[i] - x[i]).abs() < 1e-14);
        }
    }

    #[test]
    fn solver_short_time_is_identity() {
        let u0 = delta_surrogate(4.0, 201).unwrap();
        let u = solve_volterra(&u0, spec(1.0, 1.0, 1.0), 1e-30, 16, 4.0).unwrap();
        for (a, b) in u.ys().iter().zip(u0.ys()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn solver_input_checks() {
        let u0 = delta_surrogate(4.0, 201).unwrap();
        let s = spec(1.0, 1.0, 1.0);
        assert!(solve_volterra(&u0, s, 0.1, 8, 4.0).is_err());
        assert!(matches!(solve_volterra(&u0, s, 0.1, 32, 5.0), Err(Error::InvalidGrid(_))));
        assert!(matches!(solve_volterra(&u0, s, 0.0, 32, 4.0), Err(Error::InvalidTime(_))));
        let flat = GridFunction::sample(-4.0, 4.0, 100, |_| 1.0, "").unwrap();
        assert!(matches!(solve_volterra(&flat, s, 0.1, 32, 4.0), Err(Error::InvalidGrid(_))));
    }
}
