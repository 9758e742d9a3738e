//! Quadrature oracles for Laplace, Fourier-cosine and Mellin transforms on
//! the half line, the two-variable density 𝕄_ν(x, t) = t^{−ν} M_ν(x t^{−ν}),
//! and checks of the known transform pairs of the M-Wright function.
//!
//! Every oracle integrates the time-domain side directly; the transform
//! side is evaluated in closed form (exponentials, Gamma ratios or the
//! Mittag-Leffler function).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gamma::{gamma, rgamma};
use crate::quad::{integrate_with_breaks, uniform_breaks, QuadOptions};
use crate::specfun::{m_wright, m_wright_tail, mittag_leffler_neg, AuxIndex};

/// Largest truncation point tried when searching for a cutoff.
const MAX_CUTOFF: f64 = 1e7;

enum Tail {
    Pointwise(Box<dyn Fn(f64) -> f64 + Send + Sync>),
    Integrated(Box<dyn Fn(f64, f64) -> f64 + Send + Sync>),
}

/// What the caller knows about an integrand's behaviour at both ends of
/// the half line.
///
/// The tail is either a pointwise envelope `|f(r)| ≤ env(r)` (enough for
/// Laplace transforms) or an integrated bound `(p, R) ↦ ∫_R^∞ r^p |f(r)| dr`.
/// `origin_power` is the exponent p in f(r) = O(r^p) as r → 0⁺.
pub struct Decay {
    tail: Tail,
    origin_power: f64,
}

impl Decay {
    pub fn pointwise<E: Fn(f64) -> f64 + Send + Sync + 'static>(env: E) -> Self {
        Self { tail: Tail::Pointwise(Box::new(env)), origin_power: 0.0 }
    }

    pub fn integrated<B: Fn(f64, f64) -> f64 + Send + Sync + 'static>(bound: B) -> Self {
        Self { tail: Tail::Integrated(Box::new(bound)), origin_power: 0.0 }
    }

    /// |f(r)| ≤ c e^{−a r}.
    pub fn exponential(c: f64, a: f64) -> Self {
        Self::integrated(move |p, r| {
            let rate = (a - p.max(0.0) / r).max(0.5 * a);
            c * r.powf(p) * (-a * r).exp() / rate
        })
    }

    /// Tail of M_ν from its saddle-point envelope.
    pub fn m_wright(nu: AuxIndex) -> Self {
        let nu = nu.value();
        Self::integrated(move |p, r| m_wright_tail(nu, p, r))
    }

    pub fn with_origin_power(mut self, p: f64) -> Self {
        self.origin_power = p;
        self
    }

    fn integrated_tail(&self, p: f64, r: f64) -> Result<f64> {
        match &self.tail {
            Tail::Integrated(b) => Ok(b(p, r)),
            Tail::Pointwise(_) => Err(Error::InvalidArgument(
                "this transform needs an integrated tail bound".into(),
            )),
        }
    }
}

/// Smallest R ≥ 1 (on a 5% geometric ladder) with `bound(R) < eps`.
fn find_cutoff<B: Fn(f64) -> f64>(bound: B, eps: f64) -> Result<f64> {
    let mut r = 1.0;
    while !(bound(r) < eps) {
        r *= 1.05;
        if r > MAX_CUTOFF {
            return Err(Error::QuadratureFailure(format!(
                "tail bound stays above {eps:e} up to r = {MAX_CUTOFF:e}"
            )));
        }
    }
    Ok(r)
}

/// ∫₀^R g(r) dr where g(r) = O(r^q) at the origin.
///
/// On [0, 1] a non-integer q is smoothed by r = w^{1/(1+q)}; [1, R] is
/// split into panels no wider than `panel`.
fn half_line<G: Fn(f64) -> f64>(g: G, q: f64, cutoff: f64, panel: f64, tol: f64) -> Result<f64> {
    if !(q > -1.0) {
        return Err(Error::InvalidArgument(format!("integrand not integrable at 0 (power {q})")));
    }
    let head_end = cutoff.min(1.0);
    let head_tol = QuadOptions::abs(0.45 * tol).with_budget(2000);
    let head = if q.fract() != 0.0 || q < 0.0 {
        let e = 1.0 / (1.0 + q);
        let w_end = head_end.powf(1.0 + q);
        let sub = |w: f64| {
            let r = w.powf(e);
            e * g(r) * r / w
        };
        integrate_with_breaks(sub, &[0.0, w_end], head_tol)?.value
    } else {
        integrate_with_breaks(&g, &[0.0, head_end], head_tol)?.value
    };
    if cutoff <= 1.0 {
        return Ok(head);
    }
    let breaks = uniform_breaks(1.0, cutoff, panel.min(cutoff - 1.0).max(1e-3));
    let budget = (4 * breaks.len()).max(4000);
    let body = integrate_with_breaks(&g, &breaks, QuadOptions::abs(0.45 * tol).with_budget(budget))?;
    Ok(head + body.value)
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    Ok(())
}

/// ∫₀^∞ e^{−sr} f(r) dr, s > 0, to absolute accuracy `tol`.
pub fn laplace_numeric<F: Fn(f64) -> f64>(f: F, decay: &Decay, s: f64, tol: f64) -> Result<f64> {
    check_tol(tol)?;
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::InvalidArgument(format!("Laplace variable must be positive, got {s}")));
    }
    let eps = 0.1 * tol;
    let cutoff = match &decay.tail {
        Tail::Pointwise(env) => find_cutoff(|r| env(r) * (-s * r).exp() / s, eps)?,
        Tail::Integrated(b) => find_cutoff(|r| b(0.0, r) * (-s * r).exp(), eps)?,
    };
    half_line(|r| (-s * r).exp() * f(r), decay.origin_power, cutoff, (cutoff / 16.0).max(1.0), tol)
}

/// ∫₀^∞ cos(κr) f(r) dr with panels no wider than π/(4|κ|).
pub fn fourier_cosine_numeric<F: Fn(f64) -> f64>(f: F, decay: &Decay, kappa: f64, tol: f64) -> Result<f64> {
    check_tol(tol)?;
    if !kappa.is_finite() {
        return Err(Error::InvalidArgument(format!("frequency must be finite, got {kappa}")));
    }
    decay.integrated_tail(0.0, 1.0)?;
    let cutoff = find_cutoff(|r| decay.integrated_tail(0.0, r).unwrap_or(f64::INFINITY), 0.1 * tol)?;
    let mut panel = (cutoff / 16.0).max(1.0);
    if kappa != 0.0 {
        panel = panel.min(std::f64::consts::PI / (4.0 * kappa.abs()));
    }
    half_line(|r| (kappa * r).cos() * f(r), decay.origin_power, cutoff, panel, tol)
}

/// ∫₀^∞ r^{s−1} f(r) dr for s with r^{s−1+origin_power} integrable at 0.
pub fn mellin_numeric<F: Fn(f64) -> f64>(f: F, decay: &Decay, s: f64, tol: f64) -> Result<f64> {
    check_tol(tol)?;
    if !s.is_finite() {
        return Err(Error::InvalidArgument(format!("Mellin variable must be finite, got {s}")));
    }
    decay.integrated_tail(s - 1.0, 1.0)?;
    let cutoff = find_cutoff(|r| decay.integrated_tail(s - 1.0, r).unwrap_or(f64::INFINITY), 0.1 * tol)?;
    let q = s - 1.0 + decay.origin_power;
    half_line(|r| r.powf(s - 1.0) * f(r), q, cutoff, (cutoff / 16.0).max(1.0), tol)
}

fn m_value(nu: AuxIndex, r: f64) -> f64 {
    m_wright(nu, r, 1e-15).map(|e| e.value).unwrap_or(f64::NAN)
}

/// Upper bound on sup_r M_ν(r) from a dense scan of [0, 4] plus a 5%
/// margin; the maximum sits below r = 1 for every admissible ν.
pub(crate) fn m_wright_sup(nu: AuxIndex) -> f64 {
    let peak = (0..=400).map(|i| m_value(nu, i as f64 * 0.01)).fold(0.0, f64::max);
    1.05 * peak
}

/// 𝕄_ν(x, t) = t^{−ν} M_ν(x t^{−ν}) for x ≥ 0, t > 0.
pub fn m2(nu: AuxIndex, x: f64, t: f64) -> Result<f64> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::InvalidTime(t));
    }
    if !(x >= 0.0) {
        return Err(Error::NegativeArgument(x));
    }
    let scale = t.powf(-nu.value());
    Ok(scale * m_wright(nu, x * scale, 1e-15)?.value)
}

/// Transform identities that [`verify_pair`] can check. The serialized
/// names are the stable identifiers used in reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PairId {
    /// (ν/r^{ν+1}) M_ν(r^{−ν}) ↔ e^{−s^ν}
    #[serde(rename = "L_4_1")]
    StableLaplace,
    /// r^{−ν} M_ν(r^{−ν}) ↔ e^{−s^ν}/s^{1−ν}
    #[serde(rename = "L_4_2")]
    StableLaplaceM,
    /// M_ν(r) ↔ E_ν(−s)
    #[serde(rename = "L_4_7")]
    LaplaceM,
    /// ∫₀^∞ cos(κr) M_ν(r) dr = E_{2ν}(−κ²)
    #[serde(rename = "F_4_11")]
    FourierM,
    /// ∫₀^∞ r^{s−1} M_ν(r) dr = Γ(s)/Γ(ν(s−1)+1)
    #[serde(rename = "M_4_13")]
    MellinM,
    /// 𝕄_ν(x, ·) ↔ s^{ν−1} e^{−x s^ν} (transform in t)
    #[serde(rename = "L_4_15")]
    LaplaceTime,
    /// 𝕄_ν(·, t) ↔ E_ν(−s t^ν) (transform in x)
    #[serde(rename = "L_4_16")]
    LaplaceSpace,
    /// ∫_ℝ cos(κx) 𝕄_ν(|x|, t) dx = 2 E_{2ν}(−κ² t^{2ν})
    #[serde(rename = "F_4_17")]
    FourierSpace,
    /// 𝕄_{λμ}(x, t) = ∫₀^∞ 𝕄_λ(x, τ) 𝕄_μ(τ, t) dτ
    #[serde(rename = "SUB_4_18")]
    Subordination,
}

impl PairId {
    pub const ALL: [PairId; 9] = [
        PairId::StableLaplace,
        PairId::StableLaplaceM,
        PairId::LaplaceM,
        PairId::FourierM,
        PairId::MellinM,
        PairId::LaplaceTime,
        PairId::LaplaceSpace,
        PairId::FourierSpace,
        PairId::Subordination,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PairId::StableLaplace => "L_4_1",
            PairId::StableLaplaceM => "L_4_2",
            PairId::LaplaceM => "L_4_7",
            PairId::FourierM => "F_4_11",
            PairId::MellinM => "M_4_13",
            PairId::LaplaceTime => "L_4_15",
            PairId::LaplaceSpace => "L_4_16",
            PairId::FourierSpace => "F_4_17",
            PairId::Subordination => "SUB_4_18",
        }
    }
}

/// Fixed parameters of one pair check; which fields are needed depends on
/// the pair (ν for all but subordination, x for the t-transform, t for the
/// x-transforms, λ, μ and t for subordination).
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PairParams {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub nu: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub mu: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub x: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub t: Option<f64>,
}

impl PairParams {
    pub fn nu(nu: f64) -> Self {
        Self { nu: Some(nu), ..Self::default() }
    }

    pub fn with_x(mut self, x: f64) -> Self {
        self.x = Some(x);
        self
    }

    pub fn with_t(mut self, t: f64) -> Self {
        self.t = Some(t);
        self
    }

    pub fn subordination(lambda: f64, mu: f64, t: f64) -> Self {
        Self { lambda: Some(lambda), mu: Some(mu), t: Some(t), ..Self::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairReport {
    pub pair_id: PairId,
    pub params: PairParams,
    pub max_abs_residual: f64,
    pub samples: usize,
}

fn open_order(name: &str, v: Option<f64>) -> Result<AuxIndex> {
    match v {
        Some(v) if v > 0.0 && v < 1.0 => AuxIndex::new(v),
        Some(v) => Err(Error::InvalidPair(format!("{name} must lie in (0, 1), got {v}"))),
        None => Err(Error::InvalidPair(format!("parameter {name} is required"))),
    }
}

fn required(name: &str, v: Option<f64>, positive: bool) -> Result<f64> {
    match v {
        Some(v) if v.is_finite() && (v > 0.0 || (!positive && v >= 0.0)) => Ok(v),
        Some(v) => Err(Error::InvalidPair(format!("parameter {name} out of range: {v}"))),
        None => Err(Error::InvalidPair(format!("parameter {name} is required"))),
    }
}

fn ml(nu: f64, s: f64) -> Result<f64> {
    Ok(mittag_leffler_neg(nu, s, 1e-15)?.value)
}

/// Both sides of 𝕄_{λμ}(x, t) = ∫₀^∞ 𝕄_λ(x, τ) 𝕄_μ(τ, t) dτ, as
/// (integral, direct value). Uses τ = t^μ y so the outer weight is M_μ(y).
fn subordination_sides(lambda: AuxIndex, mu: AuxIndex, x: f64, t: f64, tol: f64) -> Result<(f64, f64)> {
    let (l, m) = (lambda.value(), mu.value());
    let tm = t.powf(m);
    let sup = m_wright_sup(lambda) * tm.powf(-l);
    // for y ≥ 1: 𝕄_λ(x, t^μ y) ≤ (t^μ y)^{−λ} sup M_λ ≤ t^{−λμ} sup M_λ
    let cutoff = find_cutoff(|r| sup * m_wright_tail(m, 0.0, r), 0.1 * tol)?;
    let origin = if x == 0.0 { -l } else { 0.0 };
    let integrand = |y: f64| m2(lambda, x, tm * y).unwrap_or(f64::NAN) * m_value(mu, y);
    let lhs = half_line(integrand, origin, cutoff, (cutoff / 16.0).max(1.0), tol)?;
    let rhs = m2(AuxIndex::new(l * m)?, x, t)?;
    Ok((lhs, rhs))
}

/// Checks the subordination identity at one (x, t).
pub fn subordination_check(lambda: AuxIndex, mu: AuxIndex, x: f64, t: f64, tol: f64) -> Result<PairReport> {
    check_tol(tol)?;
    let l = open_order("lambda", Some(lambda.value()))?;
    let m = open_order("mu", Some(mu.value()))?;
    if !(x >= 0.0) {
        return Err(Error::NegativeArgument(x));
    }
    if !(t > 0.0) {
        return Err(Error::InvalidTime(t));
    }
    let (lhs, rhs) = subordination_sides(l, m, x, t, tol)?;
    Ok(PairReport {
        pair_id: PairId::Subordination,
        params: PairParams { x: Some(x), ..PairParams::subordination(l.value(), m.value(), t) },
        max_abs_residual: (lhs - rhs).abs(),
        samples: 1,
    })
}

/// Evaluates both sides of a transform pair at every point of `grid` (the
/// transform variable s or κ; the x values for subordination) and reports
/// the largest absolute difference.
pub fn verify_pair(pair: PairId, params: &PairParams, grid: &[f64], tol: f64) -> Result<PairReport> {
    check_tol(tol)?;
    if grid.is_empty() {
        return Err(Error::InvalidPair("empty sample grid".into()));
    }
    let mut worst: f64 = 0.0;
    for &v in grid {
        let (lhs, rhs) = pair_sides(pair, params, v, tol)?;
        let r = (lhs - rhs).abs();
        if !r.is_finite() {
            return Err(Error::QuadratureFailure(format!("{} produced a non-finite residual at {v}", pair.as_str())));
        }
        worst = worst.max(r);
    }
    Ok(PairReport { pair_id: pair, params: *params, max_abs_residual: worst, samples: grid.len() })
}

/// (quadrature side, closed-form side) of `pair` at transform variable `v`.
pub fn pair_sides(pair: PairId, params: &PairParams, v: f64, tol: f64) -> Result<(f64, f64)> {
    if pair == PairId::Subordination {
        let l = open_order("lambda", params.lambda)?;
        let m = open_order("mu", params.mu)?;
        let t = required("t", params.t, true)?;
        if !(v >= 0.0) {
            return Err(Error::InvalidPair(format!("x must be non-negative, got {v}")));
        }
        return subordination_sides(l, m, v, t, tol);
    }
    let nu = open_order("nu", params.nu)?;
    let n = nu.value();
    let positive_var = |name: &str| -> Result<f64> {
        if v > 0.0 && v.is_finite() {
            Ok(v)
        } else {
            Err(Error::InvalidPair(format!("{name} must be positive, got {v}")))
        }
    };
    match pair {
        PairId::StableLaplace => {
            let s = positive_var("s")?;
            let sup = m_wright_sup(nu);
            let decay = Decay::pointwise(move |r| n * sup * r.powf(-n - 1.0));
            let lhs = laplace_numeric(|r| n * r.powf(-n - 1.0) * m_value(nu, r.powf(-n)), &decay, s, tol)?;
            Ok((lhs, (-s.powf(n)).exp()))
        }
        PairId::StableLaplaceM => {
            let s = positive_var("s")?;
            let sup = m_wright_sup(nu);
            let decay = Decay::pointwise(move |r| sup * r.powf(-n));
            let lhs = laplace_numeric(|r| r.powf(-n) * m_value(nu, r.powf(-n)), &decay, s, tol)?;
            Ok((lhs, (-s.powf(n)).exp() / s.powf(1.0 - n)))
        }
        PairId::LaplaceM => {
            let s = positive_var("s")?;
            let lhs = laplace_numeric(|r| m_value(nu, r), &Decay::m_wright(nu), s, tol)?;
            Ok((lhs, ml(n, s)?))
        }
        PairId::FourierM => {
            if !v.is_finite() {
                return Err(Error::InvalidPair(format!("kappa must be finite, got {v}")));
            }
            let lhs = fourier_cosine_numeric(|r| m_value(nu, r), &Decay::m_wright(nu), v, tol)?;
            Ok((lhs, ml(2.0 * n, v * v)?))
        }
        PairId::MellinM => {
            let s = positive_var("s")?;
            let lhs = mellin_numeric(|r| m_value(nu, r), &Decay::m_wright(nu), s, tol)?;
            Ok((lhs, gamma(s) * rgamma(n * (s - 1.0) + 1.0)))
        }
        PairId::LaplaceTime => {
            let s = positive_var("s")?;
            let x = required("x", params.x, false)?;
            let sup = m_wright_sup(nu);
            let decay = Decay::pointwise(move |t| sup * t.powf(-n)).with_origin_power(if x == 0.0 { -n } else { 0.0 });
            let lhs = laplace_numeric(|t| m2(nu, x, t).unwrap_or(f64::NAN), &decay, s, tol)?;
            Ok((lhs, s.powf(n - 1.0) * (-x * s.powf(n)).exp()))
        }
        PairId::LaplaceSpace => {
            let s = positive_var("s")?;
            let t = required("t", params.t, true)?;
            let lhs = laplace_numeric(|x| m2(nu, x, t).unwrap_or(f64::NAN), &m2_decay(n, t), s, tol)?;
            Ok((lhs, ml(n, s * t.powf(n))?))
        }
        PairId::FourierSpace => {
            if !v.is_finite() {
                return Err(Error::InvalidPair(format!("kappa must be finite, got {v}")));
            }
            let t = required("t", params.t, true)?;
            let half = fourier_cosine_numeric(|x| m2(nu, x, t).unwrap_or(f64::NAN), &m2_decay(n, t), v, 0.5 * tol)?;
            Ok((2.0 * half, 2.0 * ml(2.0 * n, v * v * t.powf(2.0 * n))?))
        }
        PairId::Subordination => unreachable!(),
    }
}

/// ∫_R^∞ x^p 𝕄_ν(x, t) dx = t^{νp} ∫_{R t^{−ν}}^∞ y^p M_ν(y) dy.
fn m2_decay(nu: f64, t: f64) -> Decay {
    Decay::integrated(move |p, r| t.powf(nu * p) * m_wright_tail(nu, p, r * t.powf(-nu)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn aux(nu: f64) -> AuxIndex {
        AuxIndex::new(nu).unwrap()
    }

    #[test]
    fn laplace_of_exponential() {
        let v = laplace_numeric(|r: f64| (-r).exp(), &Decay::exponential(1.0, 1.0), 1.0, 1e-12).unwrap();
        assert!((v - 0.5).abs() < 1e-12);
        let env = Decay::pointwise(|r: f64| (-r).exp());
        let v = laplace_numeric(|r: f64| (-r).exp(), &env, 3.0, 1e-12).unwrap();
        assert!((v - 0.25).abs() < 1e-12);
    }

    #[test]
    fn laplace_of_m_wright_half() {
        let nu = aux(0.5);
        let v = laplace_numeric(|r| m_value(nu, r), &Decay::m_wright(nu), 1.0, 1e-12).unwrap();
        assert!((v - 0.427_583_576_155_807_004).abs() < 1e-11);
    }

    #[test]
    fn laplace_moment_limit() {
        let nu = aux(0.5);
        let decay = Decay::integrated(move |p, r| m_wright_tail(0.5, p + 1.0, r));
        let v = laplace_numeric(|r| r * m_value(nu, r), &decay, 1e-8, 1e-10).unwrap();
        assert!((v - 2.0 / PI.sqrt()).abs() < 1e-7);
    }

    #[test]
    fn fourier_cosine_cases() {
        for &nu in &[0.25, 0.5, 0.75] {
            let v = fourier_cosine_numeric(|r| m_value(aux(nu), r), &Decay::m_wright(aux(nu)), 0.0, 1e-12).unwrap();
            assert!((v - 1.0).abs() < 1e-11, "nu={nu}");
        }
        let v = fourier_cosine_numeric(|r| m_value(aux(0.5), r), &Decay::m_wright(aux(0.5)), 1.0, 1e-12).unwrap();
        assert!((v - (-1.0f64).exp()).abs() < 1e-11);
        let v = fourier_cosine_numeric(|r| m_value(aux(0.25), r), &Decay::m_wright(aux(0.25)), 2.0, 1e-10).unwrap();
        let want = mittag_leffler_neg(0.5, 4.0, 1e-15).unwrap().value;
        assert!((v - want).abs() < 1e-6);
    }

    #[test]
    fn fourier_needs_integrated_tail() {
        let env = Decay::pointwise(|r: f64| (-r).exp());
        assert!(fourier_cosine_numeric(|r: f64| (-r).exp(), &env, 1.0, 1e-8).is_err());
    }

    #[test]
    fn mellin_cases() {
        let v = mellin_numeric(|r: f64| (-r).exp(), &Decay::exponential(1.0, 1.0), 2.0, 1e-12).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
        // Γ(1/2) through the origin substitution
        let v = mellin_numeric(|r: f64| (-r).exp(), &Decay::exponential(1.0, 1.0), 0.5, 1e-12).unwrap();
        assert!((v - PI.sqrt()).abs() < 1e-11);
        let v = mellin_numeric(|r| m_value(aux(0.5), r), &Decay::m_wright(aux(0.5)), 3.0, 1e-12).unwrap();
        assert!((v - 2.0).abs() < 1e-11);
        let v = mellin_numeric(|r| m_value(aux(0.75), r), &Decay::m_wright(aux(0.75)), 1.5, 1e-12).unwrap();
        assert!((v - 0.996_977_609_751_173).abs() < 1e-10);
    }

    #[test]
    fn m2_values() {
        assert!((m2(aux(0.5), 0.0, 4.0).unwrap() - 0.5 / PI.sqrt()).abs() < 1e-15);
        assert!((m2(aux(0.5), 1.0, 1.0).unwrap() - 0.439_391_289_467_722_4).abs() < 1e-15);
        let a = m2(aux(0.3), 0.7, 1.0).unwrap();
        let b = m_wright(aux(0.3), 0.7, 1e-15).unwrap().value;
        assert_eq!(a, b);
        assert!(matches!(m2(aux(0.3), 0.7, 0.0), Err(Error::InvalidTime(_))));
    }

    #[test]
    fn subordination_examples() {
        let r = subordination_check(aux(0.5), aux(0.5), 1.0, 1.0, 1e-9).unwrap();
        assert!(r.max_abs_residual < 1e-6, "{r:?}");
        let r = subordination_check(aux(0.5), aux(0.99), 1.0, 1.0, 1e-9).unwrap();
        assert!(r.max_abs_residual < 1e-4, "{r:?}");
        let (lhs, _) = subordination_sides(aux(0.5), aux(0.5), 0.0, 2.0, 1e-10).unwrap();
        let want = 1.0 / (2f64.powf(0.25) * gamma(0.75));
        assert!((lhs - want).abs() < 1e-7);
    }

    #[test]
    fn pair_examples() {
        let r = verify_pair(PairId::StableLaplace, &PairParams::nu(0.5), &[0.5, 1.0, 2.0], 1e-10).unwrap();
        assert!(r.max_abs_residual < 1e-6, "{r:?}");
        let (lhs, rhs) = pair_sides(PairId::LaplaceSpace, &PairParams::nu(0.5).with_t(1.0), 1.0, 1e-10).unwrap();
        assert!((rhs - 0.427_583_576_155_807).abs() < 1e-12);
        assert!((lhs - rhs).abs() < 1e-8);
        for &t in &[0.5, 3.0] {
            let (lhs, rhs) = pair_sides(PairId::FourierSpace, &PairParams::nu(0.3).with_t(t), 0.0, 1e-10).unwrap();
            assert_eq!(rhs, 2.0);
            assert!((lhs - 2.0).abs() < 1e-8);
        }
    }

    #[test]
    fn pair_parameter_errors() {
        assert!(matches!(verify_pair(PairId::LaplaceM, &PairParams::default(), &[1.0], 1e-8), Err(Error::InvalidPair(_))));
        assert!(matches!(verify_pair(PairId::LaplaceM, &PairParams::nu(1.0), &[1.0], 1e-8), Err(Error::InvalidPair(_))));
        assert!(matches!(verify_pair(PairId::LaplaceTime, &PairParams::nu(0.5), &[1.0], 1e-8), Err(Error::InvalidPair(_))));
        assert!(matches!(verify_pair(PairId::LaplaceM, &PairParams::nu(0.5), &[-1.0], 1e-8), Err(Error::InvalidPair(_))));
    }

    #[test]
    fn report_json_shape() {
        let r = PairReport { pair_id: PairId::FourierM, params: PairParams::nu(0.5), max_abs_residual: 1e-9, samples: 3 };
        let s = serde_json::to_string(&r).unwrap();
        assert_eq!(s, r#"{"pair_id":"F_4_11","params":{"nu":0.5},"max_abs_residual":1e-9,"samples":3}"#);
        let back: PairReport = serde_json::from_str(&s).unwrap();
        assert_eq!(back, r);
    }
}
