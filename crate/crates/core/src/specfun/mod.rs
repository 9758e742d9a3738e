//! Scalar evaluation of the Wright function family on the real line.
//!
//! * [`wright_series`]: the general Wright function W_{λ,μ}(z) by its
//!   defining power series.
//! * [`m_wright`], [`f_wright`], [`m_wright_symmetric`]: the auxiliary
//!   functions M_ν and F_ν = ν z M_ν.
//! * [`mittag_leffler_neg`]: E_ν(−s) for s ≥ 0.
//! * Closed forms for ν = 1/2 and ν = 1/3, moments and Mellin transform.
//!
//! Every evaluator returns an [`EvalResult`] carrying the value, an error
//! estimate and the branch that produced it.

mod mittag_leffler;
mod special;
mod wright;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use mittag_leffler::mittag_leffler_neg;
pub use special::{
    airy_ai, m_wright_moment, m_wright_ode_residual, m_wright_special, mellin_m_wright,
};
pub use wright::{
    crossover_radius, f_wright, m_wright, m_wright_asymptotic, m_wright_cutoff, m_wright_generic,
    m_wright_integral, m_wright_series, m_wright_symmetric, m_wright_tail, wright_series,
    SERIES_TERM_BUDGET,
};
pub(crate) use wright::kanter_a;

/// Largest order accepted by the M-Wright evaluators; closer to 1 the
/// function develops a peak near r = 1 that double precision cannot track.
pub const MAX_EVAL_ORDER: f64 = 0.99;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WrightKind {
    First,
    Second,
}

/// Parameters (λ, μ) of the Wright function W_{λ,μ}; λ > −1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WrightIndex {
    lambda: f64,
    mu: f64,
}

impl WrightIndex {
    pub fn new(lambda: f64, mu: f64) -> Result<Self> {
        if !(lambda > -1.0) || !lambda.is_finite() {
            return Err(Error::InvalidOrder(format!("lambda must exceed -1, got {lambda}")));
        }
        if !mu.is_finite() {
            return Err(Error::InvalidOrder(format!("mu must be finite, got {mu}")));
        }
        Ok(Self { lambda, mu })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn kind(&self) -> WrightKind {
        if self.lambda >= 0.0 {
            WrightKind::First
        } else {
            WrightKind::Second
        }
    }
}

/// Order ν ∈ [0, 1] of the auxiliary Wright functions.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct AuxIndex(f64);

impl AuxIndex {
    pub fn new(nu: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&nu) {
            return Err(Error::InvalidOrder(format!("nu must lie in [0, 1], got {nu}")));
        }
        Ok(Self(nu))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for AuxIndex {
    type Error = Error;

    fn try_from(nu: f64) -> Result<Self> {
        Self::new(nu)
    }
}

impl From<AuxIndex> for f64 {
    fn from(nu: AuxIndex) -> f64 {
        nu.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvalMethod {
    Series,
    /// Large-argument branch based on a leading asymptotic form.
    Asymptotic,
    /// Positive real-integral representation used above the series range.
    Integral,
    ClosedForm,
    LimitCase,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    pub value: f64,
    pub abs_err_estimate: f64,
    pub method: EvalMethod,
}

impl EvalResult {
    pub(crate) fn new(value: f64, abs_err_estimate: f64, method: EvalMethod) -> Self {
        Self {
            value,
            abs_err_estimate: abs_err_estimate.abs(),
            method,
        }
    }

    pub(crate) fn exact(value: f64, method: EvalMethod) -> Self {
        Self::new(value, f64::EPSILON * value.abs(), method)
    }

    /// Whether the error estimate is within `tol` (absolute).
    pub fn meets(&self, tol: f64) -> bool {
        self.abs_err_estimate <= tol
    }
}
