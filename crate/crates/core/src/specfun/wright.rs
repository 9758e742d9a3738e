use std::f64::consts::PI;
use std::sync::OnceLock;

use super::{AuxIndex, EvalMethod, EvalResult, WrightIndex, MAX_EVAL_ORDER};
use crate::error::{Error, Result};
use crate::gamma::{gamma, gamma_sign, ln_gamma, rgamma, sin_pi, CompensatedSum};
use crate::quad::{integrate_with_breaks, QuadOptions};

/// Hard cap on the number of series terms.
pub const SERIES_TERM_BUDGET: usize = 400;

/// Absolute rounding error (from cancellation between terms) tolerated in
/// the M-Wright series branch before handing over to the integral branch.
const CANCELLATION_LIMIT: f64 = 1e-13;

/// Smallest series tolerance honoured by the stopping rule.
const MIN_SERIES_TOL: f64 = 1e-16;

#[derive(Debug, Clone, Copy)]
struct SeriesOutcome {
    sum: f64,
    /// magnitude of the last three terms, a proxy for the truncation error
    tail: f64,
    /// Σ|term|, which bounds the rounding error from cancellation
    abs_sum: f64,
    terms: usize,
    converged: bool,
}

impl SeriesOutcome {
    fn cancellation(&self) -> f64 {
        2.0 * f64::EPSILON * self.abs_sum
    }

    fn error(&self) -> f64 {
        self.tail + self.cancellation()
    }
}

/// Sums `term(n)` for n = start, start + 1, ... until three consecutive
/// terms are each below `tol * |partial sum|`.
fn sum_series<F: FnMut(usize) -> f64>(mut term: F, start: usize, tol: f64, budget: usize) -> SeriesOutcome {
    let tol = tol.max(MIN_SERIES_TOL);
    let mut acc = CompensatedSum::new();
    let mut abs_sum = 0.0;
    let mut last = [0.0f64; 3];
    let mut small_run = 0;
    let mut n = start;
    let mut count = 0;
    while count < budget {
        let t = term(n);
        if !t.is_finite() {
            break;
        }
        acc.add(t);
        abs_sum += t.abs();
        last[count % 3] = t.abs();
        count += 1;
        n += 1;
        let s = acc.value();
        if t.abs() <= tol * s.abs() || t == 0.0 && s == 0.0 && count > 3 {
            small_run += 1;
        } else {
            small_run = 0;
        }
        if small_run >= 3 {
            return SeriesOutcome {
                sum: acc.value(),
                tail: last.iter().sum(),
                abs_sum,
                terms: count,
                converged: true,
            };
        }
    }
    SeriesOutcome {
        sum: acc.value(),
        tail: last.iter().sum(),
        abs_sum,
        terms: count,
        converged: false,
    }
}

/// The Wright function W_{λ,μ}(z) = Σ zⁿ / (n! Γ(λn + μ)) by direct
/// summation.
///
/// Functions of the second kind (λ < 0) grow slowly in the term index and
/// run out of budget for large |z|; that is reported as `NonConvergence`.
pub fn wright_series(idx: WrightIndex, z: f64, tol: f64) -> Result<EvalResult> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    if !z.is_finite() {
        return Err(Error::InvalidArgument(format!("argument must be finite, got {z}")));
    }
    let (lambda, mu) = (idx.lambda(), idx.mu());
    if z == 0.0 {
        return Ok(EvalResult::exact(rgamma(mu), EvalMethod::Series));
    }
    let ln_z = z.abs().ln();
    let mut power = 1.0; // z^n / n!
    let out = sum_series(
        |n| {
            if n > 0 {
                power *= z / n as f64;
            }
            let arg = lambda * n as f64 + mu;
            let rg = rgamma(arg);
            if power.is_normal() && rg.is_finite() && rg.abs() < 1e300 {
                return power * rg;
            }
            if arg <= 0.0 && arg == arg.floor() {
                return 0.0;
            }
            let sign = if z < 0.0 && n % 2 == 1 { -1.0 } else { 1.0 } * gamma_sign(arg);
            sign * (n as f64 * ln_z - ln_gamma(n as f64 + 1.0) - ln_gamma(arg)).exp()
        },
        0,
        tol,
        SERIES_TERM_BUDGET,
    );
    if !out.converged {
        return Err(Error::NonConvergence {
            terms: out.terms,
            estimate: out.sum,
        });
    }
    Ok(EvalResult::new(out.sum, out.error(), EvalMethod::Series))
}

/// Reflected series M_ν(z) = (1/π) Σ_{n≥1} (−z)^{n−1}/(n−1)! Γ(νn) sin(πνn),
/// valid for any real z and 0 < ν < 1.
fn reflected_series(nu: f64, z: f64, tol: f64, budget: usize) -> SeriesOutcome {
    let ln_z = z.abs().ln();
    let mut power = 1.0; // (-z)^{n-1} / (n-1)!
    sum_series(
        |n| {
            if n > 1 {
                power *= -z / (n - 1) as f64;
            }
            let s = sin_pi(nu * n as f64);
            if s == 0.0 {
                return 0.0;
            }
            let arg = nu * n as f64;
            if arg < 160.0 && power.is_normal() || n == 1 {
                return power * gamma(arg) * s / PI;
            }
            if z == 0.0 {
                return 0.0;
            }
            let sign = if z > 0.0 && n % 2 == 0 { -1.0 } else { 1.0 };
            let ln_mag = (n - 1) as f64 * ln_z - ln_gamma(n as f64) + ln_gamma(arg);
            sign * s * ln_mag.exp() / PI
        },
        1,
        tol,
        budget,
    )
}

/// M_ν(z) from the reflected power series alone, for any real z.
///
/// No branch switching happens here: for large positive z the result is
/// dominated by cancellation, which shows up in `abs_err_estimate`.
pub fn m_wright_series(nu: AuxIndex, z: f64, tol: f64) -> Result<EvalResult> {
    let nu = nu.value();
    if nu >= 1.0 {
        return Err(Error::InvalidOrder(format!("series requires nu < 1, got {nu}")));
    }
    if nu == 0.0 {
        return Ok(EvalResult::exact((-z).exp(), EvalMethod::LimitCase));
    }
    let out = reflected_series(nu, z, tol, SERIES_TERM_BUDGET);
    if !out.converged {
        return Err(Error::NonConvergence {
            terms: out.terms,
            estimate: out.sum,
        });
    }
    Ok(EvalResult::new(out.sum, out.error(), EvalMethod::Series))
}

/// The function A_ν(u) = [sin(νπu)/sin(πu)]^{1/(1−ν)} sin((1−ν)πu)/sin(νπu)
/// on 0 ≤ u < 1. Increasing from ν^{ν/(1−ν)}(1−ν) at u = 0 to +∞ at u = 1.
pub(crate) fn kanter_a(nu: f64, u: f64) -> f64 {
    if u <= 0.0 {
        return kanter_a0(nu);
    }
    let s1 = sin_pi(u);
    let sn = sin_pi(nu * u);
    let sc = sin_pi((1.0 - nu) * u);
    (sn / s1).powf(1.0 / (1.0 - nu)) * (sc / sn)
}

pub(crate) fn kanter_a0(nu: f64) -> f64 {
    if nu == 0.0 {
        1.0
    } else {
        nu.powf(nu / (1.0 - nu)) * (1.0 - nu)
    }
}

/// M_ν(x) for x > 0 from the positive integral representation
///
/// M_ν(x) = x^{ν/(1−ν)} / (1−ν) ∫₀¹ A_ν(u) exp(−A_ν(u) x^{1/(1−ν)}) du,
///
/// obtained from the one-sided stable density with Laplace transform
/// exp(−s^ν) by the change of variables λ = r^{−ν}. No cancellation
/// occurs, so the relative accuracy holds far into the tail.
pub fn m_wright_integral(nu: AuxIndex, x: f64) -> Result<EvalResult> {
    let nu = nu.value();
    if !(nu > 0.0 && nu < 1.0) {
        return Err(Error::InvalidOrder(format!("integral branch requires 0 < nu < 1, got {nu}")));
    }
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::InvalidArgument(format!("integral branch requires x > 0, got {x}")));
    }
    let p = 1.0 / (1.0 - nu);
    let ln_x = x.ln();
    let w = (p * ln_x).exp();
    let a0 = kanter_a0(nu);
    if a0 * w > 740.0 {
        let v = m_wright_asymptotic(nu, x);
        return Ok(EvalResult::new(v, v, EvalMethod::Asymptotic));
    }
    // integrand ∝ A e^{-(A - a0) w}; beyond A = a_peak + 60/w it is below
    // e^{-55} of its maximum
    let a_peak = a0.max(1.0 / w);
    let target = a_peak + 60.0 / w;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if kanter_a(nu, mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let u_max = hi;
    let shift = (a_peak - a0) * w;
    let integrand = |u: f64| {
        let a = kanter_a(nu, u);
        (a / a_peak) * (shift - (a - a0) * w).exp()
    };
    let breaks = [0.0, 0.25 * u_max, 0.5 * u_max, 0.75 * u_max, u_max];
    let q = integrate_with_breaks(
        integrand,
        &breaks,
        QuadOptions {
            abs_tol: 0.0,
            rel_tol: 2e-14,
            max_intervals: 400,
        },
    )?;
    let ln_pref = nu * p * ln_x - (1.0 - nu).ln() + a_peak.ln() - a0 * w - shift;
    let value = ln_pref.exp() * q.value;
    let rel_err = q.abs_err / q.value.abs().max(f64::MIN_POSITIVE) + 1e-15 * (1.0 + a0 * w);
    Ok(EvalResult::new(value, value * rel_err, EvalMethod::Integral))
}

/// Leading saddle-point term of M_ν for large x,
/// a(ν)(νx)^{(ν−1/2)/(1−ν)} exp[−b(ν)(νx)^{1/(1−ν)}] with
/// a = 1/√(2π(1−ν)), b = (1−ν)/ν. Exact at ν = 1/2.
pub fn m_wright_asymptotic(nu: f64, x: f64) -> f64 {
    if nu == 0.0 {
        return (-x).exp();
    }
    let a = 1.0 / (2.0 * PI * (1.0 - nu)).sqrt();
    let b = (1.0 - nu) / nu;
    let y = nu * x;
    a * y.powf((nu - 0.5) / (1.0 - nu)) * (-b * y.powf(1.0 / (1.0 - nu))).exp()
}

/// Estimate of ∫_r^∞ t^power M_ν(t) dt from the saddle-point envelope.
/// Only meaningful beyond the peak of M_ν (r ≳ 1).
pub fn m_wright_tail(nu: f64, power: f64, r: f64) -> f64 {
    const SAFETY: f64 = 4.0;
    if nu == 0.0 {
        let rate = (1.0 - power / r).max(0.5);
        return SAFETY * r.powf(power) * (-r).exp() / rate;
    }
    let q = 1.0 / (1.0 - nu);
    let a0 = kanter_a0(nu);
    let rate = a0 * q * r.powf(q - 1.0);
    let k = (nu - 0.5) / (1.0 - nu) + power;
    let eff = (rate - k / r).max(0.5 * rate);
    SAFETY * r.powf(power) * m_wright_asymptotic(nu, r) / eff
}

/// Radius beyond which the weighted tail ∫ t^power M_ν(t) dt is below `eps`.
pub fn m_wright_cutoff(nu: f64, power: f64, eps: f64) -> f64 {
    let mut r = 1.0;
    while m_wright_tail(nu, power, r) > eps && r < 1e6 {
        r *= 1.05;
    }
    r
}

fn series_usable(nu: f64, r: f64) -> bool {
    let out = reflected_series(nu, r, 1e-15, SERIES_TERM_BUDGET);
    out.converged && out.cancellation() <= CANCELLATION_LIMIT
}

fn crossover_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        (0..100)
            .map(|i| {
                if i == 0 {
                    // terms reduce to r^{n-1}/(n-1)!, so Σ|t| = e^r
                    return (CANCELLATION_LIMIT / (2.0 * f64::EPSILON)).ln();
                }
                let nu = i as f64 / 100.0;
                let (mut lo, mut hi) = (0.0f64, 64.0f64);
                for _ in 0..28 {
                    let mid = 0.5 * (lo + hi);
                    if series_usable(nu, mid) {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                lo
            })
            .collect()
    })
}

/// Radius r*(ν) up to which the reflected series meets the cancellation
/// budget, interpolated from a table on a 0.01 grid in ν.
pub fn crossover_radius(nu: f64) -> f64 {
    let table = crossover_table();
    let pos = (nu.clamp(0.0, 0.99) * 100.0).min(99.0);
    let i = (pos.floor() as usize).min(98);
    let frac = pos - i as f64;
    table[i] * (1.0 - frac) + table[i + 1] * frac
}

fn check_order(nu: f64) -> Result<()> {
    if !(0.0..1.0).contains(&nu) {
        return Err(Error::InvalidOrder(format!("nu must lie in [0, 1), got {nu}")));
    }
    if nu > MAX_EVAL_ORDER {
        return Err(Error::NearSingularOrder(nu));
    }
    Ok(())
}

/// M_ν(r) through the series/integral switch only (no closed-form
/// shortcuts). Used to check the generic path against the closed forms.
pub fn m_wright_generic(nu: AuxIndex, r: f64, tol: f64) -> Result<EvalResult> {
    let v = nu.value();
    check_order(v)?;
    if !(r >= 0.0) || !r.is_finite() {
        return Err(Error::NegativeArgument(r));
    }
    if v == 0.0 {
        return Ok(EvalResult::exact((-r).exp(), EvalMethod::LimitCase));
    }
    if r <= crossover_radius(v) {
        let out = reflected_series(v, r, tol, SERIES_TERM_BUDGET);
        if out.converged && out.cancellation() <= CANCELLATION_LIMIT {
            return Ok(EvalResult::new(out.sum.max(0.0), out.error(), EvalMethod::Series));
        }
        if r == 0.0 {
            return Ok(EvalResult::new(out.sum, out.error(), EvalMethod::Series));
        }
    }
    m_wright_integral(nu, r)
}

/// The M-Wright function M_ν(r) on r ≥ 0.
///
/// ν = 0 and ν = 1/2 use the exact forms e^{−r} and e^{−r²/4}/√π; other
/// orders use the reflected series below [`crossover_radius`] and the
/// integral representation above it. Orders above 0.99 are rejected.
pub fn m_wright(nu: AuxIndex, r: f64, tol: f64) -> Result<EvalResult> {
    let v = nu.value();
    check_order(v)?;
    if !(r >= 0.0) || !r.is_finite() {
        return Err(Error::NegativeArgument(r));
    }
    if v == 0.0 {
        return Ok(EvalResult::exact((-r).exp(), EvalMethod::LimitCase));
    }
    if v == 0.5 {
        return Ok(EvalResult::exact(
            (-0.25 * r * r).exp() / PI.sqrt(),
            EvalMethod::ClosedForm,
        ));
    }
    m_wright_generic(nu, r, tol)
}

/// F_ν(r) = ν r M_ν(r), for 0 < ν < 1.
pub fn f_wright(nu: AuxIndex, r: f64, tol: f64) -> Result<EvalResult> {
    let v = nu.value();
    if v == 0.0 {
        return Err(Error::InvalidOrder("F-Wright function requires nu > 0".into()));
    }
    let m = m_wright(nu, r, tol)?;
    let scale = v * r;
    Ok(EvalResult::new(scale * m.value, scale * m.abs_err_estimate, m.method))
}

/// M_ν(|x|): the even extension to the whole real line.
pub fn m_wright_symmetric(nu: AuxIndex, x: f64, tol: f64) -> Result<EvalResult> {
    if x.is_nan() {
        return Err(Error::InvalidArgument("argument is NaN".into()));
    }
    m_wright(nu, x.abs(), tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn aux(nu: f64) -> AuxIndex {
        AuxIndex::new(nu).unwrap()
    }

    #[test]
    fn wright_first_kind_exponential() {
        let r = wright_series(WrightIndex::new(0.0, 1.0).unwrap(), 1.0, 1e-15).unwrap();
        assert!((r.value - std::f64::consts::E).abs() < 1e-14);
        let r = wright_series(WrightIndex::new(1.0, 1.0).unwrap(), 0.0, 1e-15).unwrap();
        assert_eq!(r.value, 1.0);
    }

    #[test]
    fn wright_second_kind_gaussian() {
        let r = wright_series(WrightIndex::new(-0.5, 0.5).unwrap(), -1.0, 1e-15).unwrap();
        let want = (-0.25f64).exp() / PI.sqrt();
        assert!((r.value - want).abs() < 1e-14, "{} vs {}", r.value, want);
        assert!((want - 0.439_391_29).abs() < 1e-8);
    }

    #[test]
    fn wright_second_kind_large_argument_fails() {
        let e = wright_series(WrightIndex::new(-0.9, 0.1).unwrap(), -50.0, 1e-12);
        assert!(matches!(e, Err(Error::NonConvergence { .. })));
    }

    #[test]
    fn limit_and_closed_cases() {
        assert_eq!(m_wright(aux(0.0), 2.0, 1e-12).unwrap().value, (-2.0f64).exp());
        assert_eq!(m_wright(aux(0.0), 2.0, 1e-12).unwrap().method, EvalMethod::LimitCase);
        let r = m_wright(aux(0.5), 0.0, 1e-12).unwrap();
        assert!((r.value - 0.564_189_583_547_756_3).abs() < 1e-15);
        assert_eq!(r.method, EvalMethod::ClosedForm);
    }

    #[test]
    fn value_at_origin() {
        for &nu in &[0.1, 0.25, 0.6, 0.9] {
            let r = m_wright(aux(nu), 0.0, 1e-14).unwrap();
            assert!((r.value - rgamma(1.0 - nu)).abs() < 1e-15);
        }
    }

    #[test]
    fn series_and_integral_agree_near_crossover() {
        for &nu in &[0.05, 0.2, 1.0 / 3.0, 0.45, 0.6, 0.75, 0.9, 0.97] {
            let rc = crossover_radius(nu);
            for &f in &[0.7, 0.9, 1.0] {
                let r = rc * f;
                let s = reflected_series(nu, r, 1e-15, SERIES_TERM_BUDGET);
                let i = m_wright_integral(aux(nu), r).unwrap();
                if !s.converged {
                    continue;
                }
                let gap = (s.sum - i.value).abs();
                assert!(
                    gap < 1e-12 || gap < 1e-9 * i.value,
                    "nu={nu} r={r}: series {} integral {}",
                    s.sum,
                    i.value
                );
            }
        }
    }

    #[test]
    fn integral_branch_matches_gaussian() {
        for &x in &[0.5f64, 1.0, 3.0, 7.0, 15.0] {
            let i = m_wright_integral(aux(0.5), x).unwrap();
            let want = (-0.25 * x * x).exp() / PI.sqrt();
            assert!(((i.value - want) / want).abs() < 1e-12, "x={x}: {} vs {want}", i.value);
        }
    }

    #[test]
    fn asymptotic_exact_at_one_half() {
        for &x in &[0.3f64, 2.0, 6.0] {
            let want = (-0.25 * x * x).exp() / PI.sqrt();
            assert!(((m_wright_asymptotic(0.5, x) - want) / want).abs() < 1e-14);
        }
    }

    #[test]
    fn asymptotic_ratio_tends_to_one() {
        for &nu in &[0.25, 0.75] {
            let mut prev = f64::INFINITY;
            for &x in &[4.0, 8.0, 16.0, 32.0] {
                let exact = m_wright_integral(aux(nu), x).unwrap().value;
                if exact < 1e-280 {
                    break;
                }
                let gap = (m_wright_asymptotic(nu, x) / exact - 1.0).abs();
                assert!(gap < prev, "nu={nu} x={x} gap={gap}");
                prev = gap;
            }
            assert!(prev < 0.05);
        }
    }

    #[test]
    fn crossover_table_is_sane() {
        assert!((crossover_radius(0.0) - 225.2f64.ln()).abs() < 0.01);
        for i in 1..100 {
            let r = crossover_radius(i as f64 / 100.0);
            assert!(r > 0.5 && r < 64.0, "nu={} r*={r}", i as f64 / 100.0);
        }
    }

    #[test]
    fn f_wright_relation() {
        let f = f_wright(aux(0.5), 1.0, 1e-14).unwrap();
        assert!((f.value - 0.5 * (-0.25f64).exp() / PI.sqrt()).abs() < 1e-15);
        assert_eq!(f_wright(aux(0.5), 0.0, 1e-14).unwrap().value, 0.0);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(m_wright(aux(0.3), -1.0, 1e-10), Err(Error::NegativeArgument(_))));
        assert!(matches!(m_wright(aux(1.0), 1.0, 1e-10), Err(Error::InvalidOrder(_))));
        assert!(matches!(m_wright(aux(0.995), 1.0, 1e-10), Err(Error::NearSingularOrder(_))));
        assert!(matches!(f_wright(aux(0.0), 1.0, 1e-10), Err(Error::InvalidOrder(_))));
    }

    #[test]
    fn symmetric_is_even() {
        for &x in &[0.3, 1.7, 4.2] {
            let a = m_wright_symmetric(aux(0.375), x, 1e-14).unwrap().value;
            let b = m_wright_symmetric(aux(0.375), -x, 1e-14).unwrap().value;
            assert_eq!(a, b);
        }
    }
}
