//! Ensemble statistics and goodness-of-fit tests for sampled paths.

use nalgebra::DMatrix;
use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::PathEnsemble;
use crate::error::{Error, Result};
use crate::quad::gauss10_composite;
use crate::specfun::{m_wright, m_wright_cutoff, AuxIndex};

/// Fewest paths accepted by [`ensemble_stats`].
pub const MIN_STATS_PATHS: usize = 100;

/// Node spacing (in the scaled variable) of the tabulated marginal CDF.
const CDF_STEP: f64 = 0.01;

/// Distribution function of B(t) for fixed (α, β, t), tabulated once and
/// evaluated by cubic Hermite interpolation between nodes.
///
/// With s = t^{α/2}, B(t)/s has density ½ M_{β/2}(|y|).
#[derive(Debug, Clone)]
pub struct MarginalCdf {
    scale: f64,
    step: f64,
    /// ∫₀^{y_k} M_{β/2}
    cum: Vec<f64>,
    dens: Vec<f64>,
}

impl MarginalCdf {
    pub fn new(alpha: f64, beta: f64, t: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 2.0) || !(beta > 0.0 && beta <= 1.0) {
            return Err(Error::InvalidOrder(format!("need 0 < alpha < 2 and 0 < beta <= 1, got {alpha}, {beta}")));
        }
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::InvalidTime(t));
        }
        let nu = 0.5 * beta;
        let idx = AuxIndex::new(nu)?;
        let r_max = m_wright_cutoff(nu, 0.0, 1e-16);
        let n = (r_max / CDF_STEP).ceil() as usize;
        let m = |r: f64| m_wright(idx, r, 1e-15).map(|e| e.value).unwrap_or(f64::NAN);
        let mut cum = Vec::with_capacity(n + 1);
        let mut dens = Vec::with_capacity(n + 1);
        let mut acc = 0.0;
        cum.push(0.0);
        dens.push(m(0.0));
        for k in 1..=n {
            let a = (k - 1) as f64 * CDF_STEP;
            let b = k as f64 * CDF_STEP;
            acc += gauss10_composite(m, a, b, 1);
            cum.push(acc);
            dens.push(m(b));
        }
        if cum.iter().chain(&dens).any(|v| !v.is_finite()) {
            return Err(Error::QuadratureFailure("marginal CDF table is not finite".into()));
        }
        Ok(Self { scale: t.powf(0.5 * alpha), step: CDF_STEP, cum, dens })
    }

    /// P(|B(t)|/s ≤ y) for y ≥ 0.
    fn abs_cdf(&self, y: f64) -> f64 {
        let last = self.cum.len() - 1;
        let pos = y / self.step;
        if pos >= last as f64 {
            return self.cum[last].min(1.0);
        }
        let k = pos.floor() as usize;
        let u = pos - k as f64;
        let (p0, p1) = (self.cum[k], self.cum[k + 1]);
        let (m0, m1) = (self.dens[k] * self.step, self.dens[k + 1] * self.step);
        let u2 = u * u;
        let u3 = u2 * u;
        let v = (2.0 * u3 - 3.0 * u2 + 1.0) * p0
            + (u3 - 2.0 * u2 + u) * m0
            + (-2.0 * u3 + 3.0 * u2) * p1
            + (u3 - u2) * m1;
        v.clamp(0.0, 1.0)
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let half = 0.5 * self.abs_cdf(x.abs() / self.scale);
        if x >= 0.0 {
            0.5 + half
        } else {
            0.5 - half
        }
    }

    /// Inverse of [`cdf`](Self::cdf) for 0 < p < 1, by bisection.
    pub fn quantile(&self, p: f64) -> f64 {
        if p == 0.5 {
            return 0.0;
        }
        let target = (2.0 * p - 1.0).abs();
        let mut lo = 0.0;
        let mut hi = self.step * (self.cum.len() - 1) as f64;
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if self.abs_cdf(mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let y = 0.5 * (lo + hi) * self.scale;
        if p > 0.5 {
            y
        } else {
            -y
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChiSquareReport {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
    pub counts: Vec<usize>,
}

/// Pearson test of `sample` against the marginal law of B(t) using
/// `cells` equal-probability cells.
pub fn chi_square_marginal(sample: &[f64], cdf: &MarginalCdf, cells: usize) -> Result<ChiSquareReport> {
    if cells < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 cells, got {cells}")));
    }
    if sample.is_empty() {
        return Err(Error::InsufficientPaths { required: 1, got: 0 });
    }
    let edges: Vec<f64> = (1..cells).map(|k| cdf.quantile(k as f64 / cells as f64)).collect();
    let mut counts = vec![0usize; cells];
    for &x in sample {
        let k = edges.partition_point(|&e| e < x);
        counts[k] += 1;
    }
    let expected = sample.len() as f64 / cells as f64;
    let statistic = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    let dof = cells - 1;
    let dist = ChiSquared::new(dof as f64).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    Ok(ChiSquareReport { statistic, dof, p_value: dist.sf(statistic), counts })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
}

/// Kolmogorov survival function Q(λ) = 2 Σ (−1)^{k−1} e^{−2k²λ²}.
fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * lambda * lambda).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-17 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

fn ks_p_value(d: f64, n_eff: f64) -> f64 {
    let s = n_eff.sqrt();
    kolmogorov_sf((s + 0.12 + 0.11 / s) * d)
}

fn sorted(v: &[f64]) -> Vec<f64> {
    let mut out = v.to_vec();
    out.sort_by(f64::total_cmp);
    out
}

/// One-sample Kolmogorov-Smirnov test against a continuous CDF.
pub fn ks_one_sample<F: Fn(f64) -> f64>(sample: &[f64], cdf: F) -> Result<KsResult> {
    if sample.is_empty() {
        return Err(Error::InsufficientPaths { required: 1, got: 0 });
    }
    let xs = sorted(sample);
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        d = d.max((i + 1) as f64 / n - f).max(f - i as f64 / n);
    }
    Ok(KsResult { statistic: d, p_value: ks_p_value(d, n) })
}

/// Two-sample Kolmogorov-Smirnov test.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<KsResult> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InsufficientPaths { required: 1, got: 0 });
    }
    let (xa, xb) = (sorted(a), sorted(b));
    let (na, nb) = (xa.len() as f64, xb.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < xa.len() && j < xb.len() {
        let x = xa[i].min(xb[j]);
        while i < xa.len() && xa[i] <= x {
            i += 1;
        }
        while j < xb.len() && xb[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(KsResult { statistic: d, p_value: ks_p_value(d, na * nb / (na + nb)) })
}

/// Moment estimates for an ensemble; standard errors are one standard
/// deviation of the estimator.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleStats {
    pub alpha: f64,
    pub beta: f64,
    pub seed: u64,
    pub n_paths: usize,
    pub times: Vec<f64>,
    pub mean: Vec<f64>,
    pub mean_se: Vec<f64>,
    pub variance: Vec<f64>,
    pub variance_se: Vec<f64>,
    pub variance_theory: Vec<f64>,
    /// least-squares slope of ln variance against ln t (theory: α)
    pub variance_loglog_slope: Option<f64>,
    /// pooled correlation of consecutive increments
    pub increment_corr_lag1: Option<f64>,
    pub increment_corr_se: Option<f64>,
    /// 2^{α−1} − 1, reported when the times are equally spaced from 0
    pub increment_corr_theory: Option<f64>,
    /// final-time marginal against the exact law, 20 cells
    pub chi_square: ChiSquareReport,
}

fn equally_spaced_from_zero(times: &[f64]) -> bool {
    let h = times[0];
    times.iter().enumerate().all(|(i, &t)| (t - h * (i + 1) as f64).abs() <= 1e-9 * t)
}

/// Means, variances, variance scaling, lag-1 increment correlation and a
/// chi-square test of the final-time marginal.
pub fn ensemble_stats(e: &PathEnsemble) -> Result<EnsembleStats> {
    let n_paths = e.n_paths();
    if n_paths < MIN_STATS_PATHS {
        return Err(Error::InsufficientPaths { required: MIN_STATS_PATHS, got: n_paths });
    }
    let times = e.spec.times().to_vec();
    let nt = times.len();
    let nf = n_paths as f64;
    let mut mean = Vec::with_capacity(nt);
    let mut mean_se = Vec::with_capacity(nt);
    let mut variance = Vec::with_capacity(nt);
    let mut variance_se = Vec::with_capacity(nt);
    for k in 0..nt {
        let col = e.column(k);
        let m = col.iter().sum::<f64>() / nf;
        let (mut c2, mut c4) = (0.0, 0.0);
        for &x in &col {
            let d = (x - m) * (x - m);
            c2 += d;
            c4 += d * d;
        }
        let var = c2 / (nf - 1.0);
        let m4 = c4 / nf;
        mean.push(m);
        mean_se.push((var / nf).sqrt());
        variance.push(var);
        variance_se.push(((m4 - (c2 / nf).powi(2)).max(0.0) / nf).sqrt());
    }
    let variance_theory = times.iter().map(|&t| e.spec.variance_at(t)).collect();

    let variance_loglog_slope = (nt >= 2).then(|| {
        let lx: Vec<f64> = times.iter().map(|t| t.ln()).collect();
        let ly: Vec<f64> = variance.iter().map(|v| v.ln()).collect();
        let mx = lx.iter().sum::<f64>() / nt as f64;
        let my = ly.iter().sum::<f64>() / nt as f64;
        let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
        let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
        sxy / sxx
    });

    let (mut increment_corr_lag1, mut increment_corr_se) = (None, None);
    if nt >= 2 {
        // per-path sums r_i = Σ d_k d_{k+1}, q_i = Σ (d_k² + d_{k+1}²)/2 over
        // increments d_k = B(t_k) − B(t_{k−1}), B(t_0) = 0
        let mut r = Vec::with_capacity(n_paths);
        let mut q = Vec::with_capacity(n_paths);
        for i in 0..n_paths {
            let p = e.path(i);
            let mut prev = p[0];
            let (mut ri, mut qi) = (0.0, 0.0);
            for k in 1..nt {
                let d = p[k] - p[k - 1];
                ri += prev * d;
                qi += 0.5 * (prev * prev + d * d);
                prev = d;
            }
            r.push(ri);
            q.push(qi);
        }
        let rbar = r.iter().sum::<f64>() / nf;
        let qbar = q.iter().sum::<f64>() / nf;
        let rho = rbar / qbar;
        let resid_var = r.iter().zip(&q).map(|(ri, qi)| (ri - rho * qi).powi(2)).sum::<f64>() / (nf - 1.0);
        increment_corr_lag1 = Some(rho);
        increment_corr_se = Some(resid_var.sqrt() / (qbar * nf.sqrt()));
    }
    let increment_corr_theory =
        (nt >= 2 && equally_spaced_from_zero(&times)).then(|| 2f64.powf(e.spec.alpha() - 1.0) - 1.0);

    let cdf = MarginalCdf::new(e.spec.alpha(), e.spec.beta(), times[nt - 1])?;
    let chi_square = chi_square_marginal(&e.column(nt - 1), &cdf, 20)?;

    Ok(EnsembleStats {
        alpha: e.spec.alpha(),
        beta: e.spec.beta(),
        seed: e.seed,
        n_paths,
        times,
        mean,
        mean_se,
        variance,
        variance_se,
        variance_theory,
        variance_loglog_slope,
        increment_corr_lag1,
        increment_corr_se,
        increment_corr_theory,
        chi_square,
    })
}

/// Empirical covariance E[B(t_i) B(t_j)] (mean known to be zero) and the
/// standard error of each entry.
pub fn ensemble_covariance(e: &PathEnsemble) -> (DMatrix<f64>, DMatrix<f64>) {
    let nt = e.n_times();
    let nf = e.n_paths() as f64;
    let mut s1 = DMatrix::<f64>::zeros(nt, nt);
    let mut s2 = DMatrix::<f64>::zeros(nt, nt);
    for i in 0..e.n_paths() {
        let p = e.path(i);
        for a in 0..nt {
            for b in a..nt {
                let v = p[a] * p[b];
                s1[(a, b)] += v;
                s2[(a, b)] += v * v;
            }
        }
    }
    let mut cov = DMatrix::zeros(nt, nt);
    let mut se = DMatrix::zeros(nt, nt);
    for a in 0..nt {
        for b in a..nt {
            let m = s1[(a, b)] / nf;
            let var = (s2[(a, b)] / nf - m * m).max(0.0);
            cov[(a, b)] = m;
            cov[(b, a)] = m;
            se[(a, b)] = (var / nf).sqrt();
            se[(b, a)] = se[(a, b)];
        }
    }
    (cov, se)
}
