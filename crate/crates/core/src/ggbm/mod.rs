//! Generalized grey Brownian motion B_{α,β}(t): a Gaussian process with
//! covariance t_i^α + t_j^α − |t_i − t_j|^α, randomly rescaled by √Λ with
//! Λ distributed according to M_β.
//!
//! Paths are drawn as √Λ · L z with L the Cholesky factor of the covariance
//! and Λ = S^{−β} for S one-sided stable (Laplace transform e^{−s^β}).
//! Every path uses its own ChaCha stream, so path i depends only on the
//! seed and i.

mod stats;

use nalgebra::{Cholesky, DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gamma::gamma;
use crate::greens::{green_density, GreenSpec};
use crate::quad::{integrate_with_breaks, QuadOptions};
use crate::specfun::{kanter_a, m_wright, m_wright_cutoff, AuxIndex, MAX_EVAL_ORDER};

pub use stats::{
    chi_square_marginal, ensemble_covariance, ensemble_stats, ks_one_sample, ks_two_sample, ChiSquareReport,
    EnsembleStats, KsResult, MarginalCdf, MIN_STATS_PATHS,
};

/// Parameters (α, β) and the sampling times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCovSpec", into = "RawCovSpec")]
pub struct CovSpec {
    alpha: f64,
    beta: f64,
    times: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawCovSpec {
    alpha: f64,
    beta: f64,
    times: Vec<f64>,
}

impl TryFrom<RawCovSpec> for CovSpec {
    type Error = Error;
    fn try_from(r: RawCovSpec) -> Result<Self> {
        CovSpec::new(r.alpha, r.beta, r.times)
    }
}

impl From<CovSpec> for RawCovSpec {
    fn from(s: CovSpec) -> Self {
        RawCovSpec { alpha: s.alpha, beta: s.beta, times: s.times }
    }
}

impl CovSpec {
    pub fn new(alpha: f64, beta: f64, times: Vec<f64>) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 2.0) {
            return Err(Error::InvalidOrder(format!("alpha must lie in (0, 2), got {alpha}")));
        }
        if !(beta > 0.0 && beta <= 1.0) {
            return Err(Error::InvalidOrder(format!("beta must lie in (0, 1], got {beta}")));
        }
        if times.is_empty() {
            return Err(Error::InvalidArgument("at least one time is required".into()));
        }
        if !(times[0] > 0.0) || times.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidTime(times[0]));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidArgument("times must be strictly increasing".into()));
        }
        Ok(Self { alpha, beta, times })
    }

    /// `n` equally spaced times t_end/n, 2 t_end/n, ..., t_end.
    pub fn uniform(alpha: f64, beta: f64, t_end: f64, n: usize) -> Result<Self> {
        if n == 0 || !(t_end > 0.0) {
            return Err(Error::InvalidArgument(format!("need n >= 1 and t_end > 0, got {n}, {t_end}")));
        }
        let times = (1..=n).map(|i| if i == n { t_end } else { t_end * i as f64 / n as f64 }).collect();
        Self::new(alpha, beta, times)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// Variance 2 t^α / Γ(1 + β) of B(t).
    pub fn variance_at(&self, t: f64) -> f64 {
        2.0 * t.powf(self.alpha) / gamma(1.0 + self.beta)
    }
}

/// Unscaled covariance t_i^α + t_j^α − |t_i − t_j|^α.
fn base_covariance(spec: &CovSpec) -> DMatrix<f64> {
    let t = &spec.times;
    let a = spec.alpha;
    DMatrix::from_fn(t.len(), t.len(), |i, j| t[i].powf(a) + t[j].powf(a) - (t[i] - t[j]).abs().powf(a))
}

/// γ_{α,β}(t_i, t_j) = (t_i^α + t_j^α − |t_i − t_j|^α) / Γ(1 + β).
pub fn covariance_matrix(spec: &CovSpec) -> Result<DMatrix<f64>> {
    let c = base_covariance(spec) / gamma(1.0 + spec.beta);
    if Cholesky::new(c.clone()).is_none() {
        return Err(Error::NotPositiveDefinite);
    }
    Ok(c)
}

/// One-time density of B(t): ½ t^{−α/2} M_{β/2}(|x| t^{−α/2}).
pub fn pdf_marginal(alpha: f64, beta: f64, x: f64, t: f64) -> Result<f64> {
    green_density(GreenSpec::new(alpha, beta, 1.0)?, x, t)
}

/// Joint density of (B(t_1), ..., B(t_n)) at the given displacements.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NPointQuery {
    pub spec: CovSpec,
    pub xs: Vec<f64>,
}

impl NPointQuery {
    pub fn new(spec: CovSpec, xs: Vec<f64>) -> Result<Self> {
        if xs.len() != spec.times.len() {
            return Err(Error::InvalidArgument(format!(
                "{} displacements for {} times",
                xs.len(),
                spec.times.len()
            )));
        }
        Ok(Self { spec, xs })
    }
}

/// Joint density as a Gaussian scale mixture,
///
/// (2π)^{−(n−1)/2} / √(2 Γ(1+β)^n det γ) ∫₀^∞ τ^{−n/2} M_{1/2}(ξ/√τ) M_β(τ) dτ,
///
/// with ξ² = 2 xᵀγ⁻¹x / Γ(1+β). Integrated in u = √τ. At x = 0 the
/// density is infinite for n ≥ 2 and β < 1.
pub fn pdf_npoint(q: &NPointQuery) -> Result<f64> {
    let spec = &q.spec;
    let n = spec.times.len();
    if q.xs.len() != n {
        return Err(Error::InvalidArgument("displacement count does not match times".into()));
    }
    let g1b = gamma(1.0 + spec.beta);
    let gam = base_covariance(spec) / g1b;
    let chol = Cholesky::new(gam).ok_or(Error::NotPositiveDefinite)?;
    let l = chol.l();
    let det: f64 = l.diagonal().iter().map(|d| d * d).product();
    let x = DVector::from_column_slice(&q.xs);
    let y = l.solve_lower_triangular(&x).ok_or(Error::NotPositiveDefinite)?;
    let quad_form = y.norm_squared();
    let xi2 = 2.0 * quad_form / g1b;
    let nf = n as f64;
    let pref = (2.0 * std::f64::consts::PI).powf(-(nf - 1.0) / 2.0) / (2.0 * g1b.powf(nf) * det).sqrt();
    let m_half = |z2: f64| (-0.25 * z2).exp() / std::f64::consts::PI.sqrt();
    if spec.beta == 1.0 {
        return Ok(pref * m_half(xi2));
    }
    if xi2 == 0.0 && n >= 2 {
        return Ok(f64::INFINITY);
    }
    if spec.beta > MAX_EVAL_ORDER {
        return Err(Error::NearSingularOrder(spec.beta));
    }
    let nu = AuxIndex::new(spec.beta)?;
    // beyond τ = T the remaining mass of M_β is negligible and the other
    // factors are at most 1/√π for τ ≥ 1
    let t_cut = m_wright_cutoff(spec.beta, 0.0, 1e-17).max(1.0);
    let u_cut = t_cut.sqrt();
    let integrand = |u: f64| {
        let tau = u * u;
        let mb = m_wright(nu, tau, 1e-15).map(|e| e.value).unwrap_or(f64::NAN);
        2.0 * u.powf(1.0 - nf) * m_half(xi2 / tau) * mb
    };
    let mut breaks = vec![0.0];
    let peak = 0.5 * xi2.sqrt();
    if peak > 0.0 && peak < u_cut {
        breaks.push(peak);
    }
    if u_cut > 1.0 && peak < 1.0 {
        breaks.push(1.0);
    }
    breaks.push(u_cut);
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let r = integrate_with_breaks(integrand, &breaks, QuadOptions { abs_tol: 1e-15, rel_tol: 1e-12, max_intervals: 2000 })?;
    if !r.value.is_finite() {
        return Err(Error::QuadratureFailure("mixing integral is not finite".into()));
    }
    Ok(pref * r.value)
}

fn check_open_order(nu: f64) -> Result<()> {
    if !(nu > 0.0 && nu < 1.0) {
        return Err(Error::InvalidOrder(format!("stable index must lie in (0, 1), got {nu}")));
    }
    Ok(())
}

fn stable_draw<R: Rng + ?Sized>(nu: f64, rng: &mut R) -> f64 {
    let u: f64 = rng.random();
    let e: f64 = rng.sample(Exp1);
    (kanter_a(nu, u) / e).powf((1.0 - nu) / nu)
}

fn lambda_draw<R: Rng + ?Sized>(beta: f64, rng: &mut R) -> f64 {
    if beta == 1.0 {
        return 1.0;
    }
    // Λ = S^{−β} = (E / A(U))^{1−β}, computed without forming S
    let u: f64 = rng.random();
    let e: f64 = rng.sample(Exp1);
    (e / kanter_a(beta, u)).powf(1.0 - beta)
}

/// One draw of the one-sided stable law with Laplace transform e^{−s^ν}
/// (Kanter's representation: S = (A(U)/E)^{(1−ν)/ν}).
pub fn sample_oneside_stable<R: Rng + ?Sized>(nu: f64, rng: &mut R) -> Result<f64> {
    check_open_order(nu)?;
    Ok(stable_draw(nu, rng))
}

/// One draw of Λ with density M_β on ℝ⁺; exactly 1 for β = 1.
pub fn sample_mixing_lambda<R: Rng + ?Sized>(beta: f64, rng: &mut R) -> Result<f64> {
    if beta != 1.0 {
        check_open_order(beta)?;
    }
    Ok(lambda_draw(beta, rng))
}

/// The random stream used for path `index` under `seed`.
pub fn path_rng(seed: u64, index: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Sampled trajectories, row-major (one row per path), with the mixing
/// value of each path. B(0) = 0 is implicit.
#[derive(Debug, Clone, PartialEq)]
pub struct PathEnsemble {
    pub spec: CovSpec,
    pub seed: u64,
    paths: Vec<f64>,
    lambdas: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct Sidecar {
    alpha: f64,
    beta: f64,
    times: Vec<f64>,
    seed: u64,
    n_paths: usize,
}

impl PathEnsemble {
    pub fn n_paths(&self) -> usize {
        self.lambdas.len()
    }

    pub fn n_times(&self) -> usize {
        self.spec.times.len()
    }

    pub fn path(&self, i: usize) -> &[f64] {
        let n = self.n_times();
        &self.paths[i * n..(i + 1) * n]
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    /// Values of every path at time index `k`.
    pub fn column(&self, k: usize) -> Vec<f64> {
        (0..self.n_paths()).map(|i| self.path(i)[k]).collect()
    }

    /// CSV with one row per path: the mixing value Λ, then B(t_1..t_n).
    pub fn to_csv(&self) -> String {
        use std::fmt::Write as _;
        let mut out = String::with_capacity(self.paths.len() * 24);
        let _ = writeln!(out, "# alpha={}", self.spec.alpha);
        let _ = writeln!(out, "# beta={}", self.spec.beta);
        let _ = writeln!(out, "# seed={}", self.seed);
        out.push_str("lambda");
        for t in &self.spec.times {
            let _ = write!(out, ",t={t:?}");
        }
        out.push('\n');
        for i in 0..self.n_paths() {
            let _ = write!(out, "{:?}", self.lambdas[i]);
            for v in self.path(i) {
                let _ = write!(out, ",{v:?}");
            }
            out.push('\n');
        }
        out
    }

    /// JSON sidecar {alpha, beta, times, seed, n_paths}.
    pub fn sidecar_json(&self) -> String {
        let s = Sidecar {
            alpha: self.spec.alpha,
            beta: self.spec.beta,
            times: self.spec.times.clone(),
            seed: self.seed,
            n_paths: self.n_paths(),
        };
        serde_json::to_string_pretty(&s).expect("sidecar serializes")
    }

    /// Rebuilds an ensemble from [`to_csv`](Self::to_csv) output and its sidecar.
    pub fn from_files(csv: &str, sidecar: &str) -> Result<Self> {
        let side: Sidecar = serde_json::from_str(sidecar)?;
        let spec = CovSpec::new(side.alpha, side.beta, side.times)?;
        let n = spec.times.len();
        let mut paths = Vec::with_capacity(side.n_paths * n);
        let mut lambdas = Vec::with_capacity(side.n_paths);
        let mut header_seen = false;
        for (lineno, line) in csv.lines().enumerate() {
            if line.starts_with('#') || line.trim().is_empty() {
                continue;
            }
            if !header_seen {
                header_seen = true;
                continue;
            }
            let vals = line
                .split(',')
                .map(|f| f.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))?;
            if vals.len() != n + 1 {
                return Err(Error::Parse(format!("line {}: expected {} columns, got {}", lineno + 1, n + 1, vals.len())));
            }
            lambdas.push(vals[0]);
            paths.extend_from_slice(&vals[1..]);
        }
        if lambdas.len() != side.n_paths {
            return Err(Error::Parse(format!("sidecar says {} paths, file has {}", side.n_paths, lambdas.len())));
        }
        Ok(Self { spec, seed: side.seed, paths, lambdas })
    }
}

/// Draws `n_paths` trajectories. Path i uses stream i of the seeded
/// generator: first Λ (skipped for β = 1), then n standard normals.
pub fn sample_paths(spec: &CovSpec, n_paths: usize, seed: u64) -> Result<PathEnsemble> {
    if n_paths == 0 {
        return Err(Error::InvalidArgument("n_paths must be at least 1".into()));
    }
    let chol = Cholesky::new(base_covariance(spec)).ok_or(Error::NotPositiveDefinite)?;
    let l = chol.l();
    let n = spec.times.len();
    let mut paths = vec![0.0; n_paths * n];
    let mut lambdas = Vec::with_capacity(n_paths);
    let mut z = vec![0.0; n];
    for (i, row) in paths.chunks_mut(n).enumerate() {
        let mut rng = path_rng(seed, i as u64);
        let lambda = lambda_draw(spec.beta, &mut rng);
        for v in z.iter_mut() {
            *v = rng.sample(StandardNormal);
        }
        let s = lambda.sqrt();
        for (r, out) in row.iter_mut().enumerate() {
            let mut acc = 0.0;
            for c in 0..=r {
                acc += l[(r, c)] * z[c];
            }
            *out = s * acc;
        }
        lambdas.push(lambda);
    }
    Ok(PathEnsemble { spec: spec.clone(), seed, paths, lambdas })
}
