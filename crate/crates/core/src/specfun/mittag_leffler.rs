use super::{EvalMethod, EvalResult};
use crate::error::{Error, Result};
use crate::gamma::{cos_pi, ln_gamma, rgamma, sin_pi, CompensatedSum};

/// The Taylor branch needs many more terms than the Wright series when ν is
/// small and s > 1 (terms grow like s^n before Γ(νn + 1) takes over).
const TAYLOR_TERM_BUDGET: usize = 6000;

struct Branch {
    value: f64,
    err: f64,
}

/// Σ (−s)ⁿ / Γ(νn + 1) with the three-small-terms stopping rule.
fn taylor(nu: f64, s: f64, tol: f64) -> Option<Branch> {
    let ln_s = s.ln();
    let tol = tol.max(1e-17);
    let mut acc = CompensatedSum::new();
    let mut abs_sum = 0.0;
    let mut small_run = 0;
    let mut tail = 0.0;
    for n in 0..TAYLOR_TERM_BUDGET {
        let ln_mag = n as f64 * ln_s - ln_gamma(nu * n as f64 + 1.0);
        if ln_mag > 700.0 {
            return None;
        }
        let mag = ln_mag.exp();
        let t = if n % 2 == 0 { mag } else { -mag };
        acc.add(t);
        abs_sum += mag;
        let sum = acc.value();
        if mag <= tol * sum.abs() {
            small_run += 1;
            tail += mag;
        } else {
            small_run = 0;
            tail = 0.0;
        }
        if small_run >= 3 {
            return Some(Branch {
                value: sum,
                err: tail + 2.0 * f64::EPSILON * abs_sum * (n as f64).sqrt().max(1.0),
            });
        }
    }
    None
}

/// Optimally truncated asymptotic series
/// E_ν(−s) ∼ Σ_{m≥1} (−1)^{m−1} / (Γ(1 − νm) s^m), plus, for 1 < ν < 2, the
/// two conjugate exponential contributions.
fn asymptotic(nu: f64, s: f64) -> Option<Branch> {
    if !(nu > 0.0 && nu < 2.0) {
        return None;
    }
    let mut acc = CompensatedSum::new();
    let mut prev = f64::INFINITY;
    let mut err = f64::INFINITY;
    let mut pow = 1.0;
    for m in 1..2000 {
        pow /= s;
        let c = rgamma(1.0 - nu * m as f64);
        if c == 0.0 {
            continue;
        }
        let t = if m % 2 == 1 { c * pow } else { -c * pow };
        if !t.is_finite() || t.abs() >= prev {
            err = t.abs().min(prev);
            break;
        }
        if t == 0.0 {
            err = 0.0;
            break;
        }
        acc.add(t);
        prev = t.abs();
        err = prev;
    }
    let mut value = acc.value();
    if nu > 1.0 {
        let root = s.powf(1.0 / nu);
        value += 2.0 / nu * (root * cos_pi(1.0 / nu)).exp() * (root * sin_pi(1.0 / nu)).cos();
    }
    Some(Branch { value, err })
}

/// E_ν(−s) for ν ≥ 0 and s ≥ 0.
///
/// Small s uses the Taylor series; large s the optimally truncated
/// asymptotic series. In the band where both are inaccurate the branch with
/// the smaller error estimate is returned and the estimate is reported as
/// is, so callers must check `abs_err_estimate` against their tolerance.
pub fn mittag_leffler_neg(nu: f64, s: f64, tol: f64) -> Result<EvalResult> {
    if !(nu >= 0.0) || !nu.is_finite() {
        return Err(Error::InvalidOrder(format!("nu must be non-negative, got {nu}")));
    }
    if !(s >= 0.0) || !s.is_finite() {
        return Err(Error::NegativeArgument(s));
    }
    if s == 0.0 {
        return Ok(EvalResult::exact(1.0, EvalMethod::ClosedForm));
    }
    if nu == 0.0 {
        if s >= 1.0 {
            return Err(Error::InvalidArgument(format!(
                "E_0(-s) = 1/(1+s) is defined by its series only for s < 1, got {s}"
            )));
        }
        return Ok(EvalResult::exact(1.0 / (1.0 + s), EvalMethod::ClosedForm));
    }
    if nu == 1.0 {
        return Ok(EvalResult::exact((-s).exp(), EvalMethod::ClosedForm));
    }
    if nu == 2.0 {
        return Ok(EvalResult::exact(s.sqrt().cos(), EvalMethod::ClosedForm));
    }
    let asym = if s >= 1.0 { asymptotic(nu, s) } else { None };
    if let Some(a) = &asym {
        if a.err <= tol * a.value.abs().max(f64::MIN_POSITIVE) {
            return Ok(EvalResult::new(a.value, a.err, EvalMethod::Asymptotic));
        }
    }
    let tay = taylor(nu, s, tol);
    let pick = match (tay, asym) {
        (Some(t), Some(a)) => {
            if t.err <= a.err {
                (t, EvalMethod::Series)
            } else {
                (a, EvalMethod::Asymptotic)
            }
        }
        (Some(t), None) => (t, EvalMethod::Series),
        (None, Some(a)) => (a, EvalMethod::Asymptotic),
        (None, None) => {
            return Err(Error::NonConvergence {
                terms: TAYLOR_TERM_BUDGET,
                estimate: f64::NAN,
            })
        }
    };
    Ok(EvalResult::new(pick.0.value, pick.0.err, pick.1))
}
