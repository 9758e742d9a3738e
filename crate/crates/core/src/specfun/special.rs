use std::f64::consts::PI;

use super::{m_wright_series, AuxIndex, EvalMethod, EvalResult};
use crate::error::{Error, Result};
use crate::gamma::{gamma, ln_gamma, rgamma};

/// Γ(a)/Γ(b) without intermediate overflow.
fn gamma_ratio(a: f64, b: f64) -> f64 {
    if a < 170.0 && b < 170.0 {
        gamma(a) * rgamma(b)
    } else {
        (ln_gamma(a) - ln_gamma(b)).exp()
    }
}

/// ∫₀^∞ r^δ M_ν(r) dr = Γ(δ + 1)/Γ(νδ + 1) for δ > −1, 0 ≤ ν < 1.
pub fn m_wright_moment(nu: AuxIndex, delta: f64) -> Result<f64> {
    if nu.value() >= 1.0 {
        return Err(Error::InvalidOrder(format!("moments require nu < 1, got {}", nu.value())));
    }
    if !(delta > -1.0) || !delta.is_finite() {
        return Err(Error::InvalidMomentOrder(delta));
    }
    Ok(gamma_ratio(delta + 1.0, nu.value() * delta + 1.0))
}

/// Mellin transform ∫₀^∞ r^{s−1} M_ν(r) dr = Γ(s)/Γ(ν(s − 1) + 1), s > 0.
pub fn mellin_m_wright(nu: AuxIndex, s: f64) -> Result<f64> {
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::InvalidArgument(format!("Mellin variable must be positive, got {s}")));
    }
    m_wright_moment(nu, s - 1.0)
}

/// Airy function Ai(x) from its Maclaurin series,
/// Ai(x) = c₁ f(x) − c₂ g(x) with f = Σ 3^k (1/3)_k x^{3k}/(3k)! and
/// g = Σ 3^k (2/3)_k x^{3k+1}/(3k+1)!. Accurate for |x| ≲ 6.
pub fn airy_ai(x: f64) -> f64 {
    let c1 = 1.0 / (3f64.powf(2.0 / 3.0) * gamma(2.0 / 3.0));
    let c2 = 1.0 / (3f64.cbrt() * gamma(1.0 / 3.0));
    let x3 = x * x * x;
    let (mut f, mut g) = (0.0, 0.0);
    let (mut tf, mut tg) = (1.0f64, x);
    for k in 0..200 {
        f += tf;
        g += tg;
        let kf = k as f64;
        tf *= 3.0 * (kf + 1.0 / 3.0) * x3 / ((3.0 * kf + 1.0) * (3.0 * kf + 2.0) * (3.0 * kf + 3.0));
        tg *= 3.0 * (kf + 2.0 / 3.0) * x3 / ((3.0 * kf + 2.0) * (3.0 * kf + 3.0) * (3.0 * kf + 4.0));
        if tf.abs() <= 1e-18 * f.abs() && tg.abs() <= 1e-18 * g.abs().max(f64::MIN_POSITIVE) {
            break;
        }
    }
    c1 * f - c2 * g
}

/// Closed forms of M_{1/q}(z): q = 2 gives e^{−z²/4}/√π, q = 3 the two
/// Pochhammer series (equivalently 3^{2/3} Ai(z/3^{1/3})).
pub fn m_wright_special(q: u32, z: f64) -> Result<EvalResult> {
    if !z.is_finite() {
        return Err(Error::InvalidArgument(format!("argument must be finite, got {z}")));
    }
    match q {
        2 => Ok(EvalResult::exact((-0.25 * z * z).exp() / PI.sqrt(), EvalMethod::ClosedForm)),
        3 => {
            let z3 = z * z * z;
            let (mut s1, mut s2) = (0.0, 0.0);
            let (mut a, mut b) = (1.0f64, z);
            let mut abs_sum = 0.0;
            for m in 0..200 {
                s1 += a;
                s2 += b;
                abs_sum += a.abs() + b.abs();
                let mf = m as f64;
                a *= (1.0 / 3.0 + mf) * z3 / ((3.0 * mf + 1.0) * (3.0 * mf + 2.0) * (3.0 * mf + 3.0));
                b *= (2.0 / 3.0 + mf) * z3 / ((3.0 * mf + 2.0) * (3.0 * mf + 3.0) * (3.0 * mf + 4.0));
                if a.abs() <= 1e-18 * s1.abs() && b.abs() <= 1e-18 * s2.abs().max(f64::MIN_POSITIVE) {
                    break;
                }
            }
            let value = s1 * rgamma(2.0 / 3.0) - s2 * rgamma(1.0 / 3.0);
            Ok(EvalResult::new(value, 4.0 * f64::EPSILON * abs_sum, EvalMethod::ClosedForm))
        }
        _ => Err(Error::UnsupportedQ(q)),
    }
}

/// Residual of d^{q−1}M_{1/q}/dz^{q−1} + ((−1)^q/q) z M_{1/q}(z) with the
/// derivative taken by central differences (step h) of the series
/// evaluator. Should be O(h²).
pub fn m_wright_ode_residual(q: u32, z: f64, h: f64) -> Result<f64> {
    if !(2..=4).contains(&q) {
        return Err(Error::UnsupportedQ(q));
    }
    if !(h > 0.0) {
        return Err(Error::InvalidArgument(format!("step must be positive, got {h}")));
    }
    let nu = AuxIndex::new(1.0 / q as f64)?;
    let m = |x: f64| -> Result<f64> { Ok(m_wright_series(nu, x, 1e-16)?.value) };
    let deriv = match q {
        2 => (m(z + h)? - m(z - h)?) / (2.0 * h),
        3 => (m(z + h)? - 2.0 * m(z)? + m(z - h)?) / (h * h),
        _ => (m(z + 2.0 * h)? - 2.0 * m(z + h)? + 2.0 * m(z - h)? - m(z - 2.0 * h)?) / (2.0 * h * h * h),
    };
    let sign = if q % 2 == 0 { 1.0 } else { -1.0 };
    Ok(deriv + sign / q as f64 * z * m(z)?)
}
