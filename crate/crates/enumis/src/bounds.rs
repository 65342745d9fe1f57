//! Stopping-rule constants and sampling deadlines.
//!
//! The enumeration loops stop once the accepted-sample count reaches
//! `ceil(m * ln(m * kappa / epsilon))` while fewer than `m` distinct
//! solutions have been collected. `kappa1` corrects the plain
//! coupon-collector deadline for the unknown number of solutions;
//! `kappa2` additionally pays for the unknown minimum cost. Reference
//! points: `kappa1(0.01) ~ 1.142` and `kappa2(0.01) ~ 2.443`.

use std::f64::consts::E;

use thiserror::Error;

/// Validity ceiling for `kappa1` and the CSP loop: epsilon < 1/e.
pub const EPSILON_LIMIT_CSP: f64 = 0.367_879_441_171_442_33;
/// Validity ceiling for `kappa2` and the optimization loop: epsilon < e^(-3/2).
pub const EPSILON_LIMIT_OPT: f64 = 0.223_130_160_148_429_83;

/// Absolute slack around integers below which a deadline is bumped to the
/// next integer, so floating-point noise can never under-shoot the true
/// ceiling. Overshooting by one only adds samples.
const CEIL_GUARD: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoundsError {
    #[error("epsilon {value} must lie strictly inside (0, {limit})")]
    EpsilonOutOfRange { value: f64, limit: f64 },
    #[error("deadlines are defined for m >= 2, got {0}")]
    TargetTooSmall(u64),
    #[error("kappa must be >= 1, got {0}")]
    KappaTooSmall(f64),
    #[error("sample budget is defined for n >= 1")]
    BudgetTargetZero,
    #[error("zeta tail diverges for s <= 1, got {0}")]
    ZetaTailDiverges(f64),
    #[error("zeta tail start index must be >= 1")]
    ZetaTailStartZero,
}

/// The tolerance-derived exponents behind both kappa constants:
/// `alpha = ln(1/epsilon) - 1` and `beta` a fixed positive multiple of alpha.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToleranceParams {
    pub epsilon: f64,
    pub alpha: f64,
    pub beta: f64,
}

/// Both correction factors evaluated at one epsilon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KappaValues {
    pub kappa1: f64,
    pub kappa2: f64,
}

impl KappaValues {
    /// Requires epsilon inside the stricter `kappa2` window.
    pub fn for_epsilon(epsilon: f64) -> Result<Self, BoundsError> {
        Ok(KappaValues {
            kappa1: kappa1(epsilon)?,
            kappa2: kappa2(epsilon)?,
        })
    }
}

fn check_epsilon(epsilon: f64, limit: f64) -> Result<(), BoundsError> {
    // NaN fails both comparisons and is rejected.
    if epsilon > 0.0 && epsilon < limit {
        Ok(())
    } else {
        Err(BoundsError::EpsilonOutOfRange {
            value: epsilon,
            limit,
        })
    }
}

/// alpha and beta for a failure tolerance epsilon in (0, 1/e).
pub fn derive_params(epsilon: f64) -> Result<ToleranceParams, BoundsError> {
    check_epsilon(epsilon, EPSILON_LIMIT_CSP)?;
    let alpha = -epsilon.ln() - 1.0;
    let ratio = (1.0 / E + (1.0f64 / 3.0).ln() / 3.0) / (1.0 / E - 1.0 / 3.0);
    Ok(ToleranceParams {
        epsilon,
        alpha,
        beta: ratio * alpha,
    })
}

/// Correction factor for enumerating over a fair sampler. Always > 1 on its
/// domain (0, 1/e), approaching 1 as epsilon -> 0.
pub fn kappa1(epsilon: f64) -> Result<f64, BoundsError> {
    let p = derive_params(epsilon)?;
    Ok(kappa1_from(&p))
}

fn kappa1_from(p: &ToleranceParams) -> f64 {
    let first = (-2.0 * p.alpha * 3.0f64.ln()).exp() / (1.0 - (-p.beta).exp());
    let second = 1.0 / (1.0 - (-p.alpha / (E - 1.0)).exp());
    first + second
}

/// Correction factor for enumerating optima over a cost-ordered fair
/// sampler. Defined for epsilon in (0, e^(-3/2)) so that the zeta argument
/// 2*alpha stays above 1.
pub fn kappa2(epsilon: f64) -> Result<f64, BoundsError> {
    check_epsilon(epsilon, EPSILON_LIMIT_OPT)?;
    let p = derive_params(epsilon)?;
    let tail = zeta_tail(2.0 * p.alpha, 6)?;
    let first = (p.alpha * 4.0f64.ln()).exp() / (1.0 - (-p.beta).exp()) * tail;
    let g = (-p.alpha / (E - 1.0)).exp();
    let second = (2.0 - g) / ((1.0 - g) * (1.0 - g));
    Ok(first + second)
}

/// Tail of the Riemann zeta function: sum of k^(-s) for k >= k_start.
///
/// Sums a fixed block directly, then closes with an Euler-Maclaurin
/// remainder whose leading term is the integral bound K^(1-s)/(s-1).
/// Absolute accuracy is better than 1e-12 for every s > 1.
pub fn zeta_tail(s: f64, k_start: u64) -> Result<f64, BoundsError> {
    if !(s > 1.0) {
        return Err(BoundsError::ZetaTailDiverges(s));
    }
    if k_start == 0 {
        return Err(BoundsError::ZetaTailStartZero);
    }
    const BLOCK: u64 = 64;
    let cutoff = k_start + BLOCK;
    let mut sum = 0.0;
    for k in k_start..cutoff {
        sum += (k as f64).powf(-s);
    }
    let k = cutoff as f64;
    let integral = k.powf(1.0 - s) / (s - 1.0);
    let correction = 0.5 * k.powf(-s) + s / 12.0 * k.powf(-s - 1.0)
        - s * (s + 1.0) * (s + 2.0) / 720.0 * k.powf(-s - 3.0);
    Ok(sum + integral + correction)
}

/// Ceiling that never under-shoots: values within `CEIL_GUARD` of an
/// integer are rounded to the next integer above.
fn ceil_guarded(value: f64) -> u64 {
    let nearest = value.round();
    if (value - nearest).abs() <= CEIL_GUARD {
        nearest as u64 + 1
    } else {
        value.ceil() as u64
    }
}

/// Accepted-sample deadline for collecting `m` distinct solutions:
/// `ceil(m * ln(m * kappa / epsilon))`. Strictly increasing in `m`.
pub fn deadline(m: u64, kappa: f64, epsilon: f64) -> Result<u64, BoundsError> {
    if m < 2 {
        return Err(BoundsError::TargetTooSmall(m));
    }
    if !(kappa >= 1.0) {
        return Err(BoundsError::KappaTooSmall(kappa));
    }
    check_epsilon(epsilon, 1.0)?;
    let mf = m as f64;
    Ok(ceil_guarded(mf * (mf * kappa / epsilon).ln()))
}

/// Accepted samples at which a successful enumeration of `n` solutions
/// halts: the deadline for collecting `n + 1` distinct solutions.
pub fn sample_budget(n: u64, epsilon: f64, kappa: f64) -> Result<u64, BoundsError> {
    if n < 1 {
        return Err(BoundsError::BudgetTargetZero);
    }
    deadline(n + 1, kappa, epsilon)
}
