//! Entropic quantities in bits: thermal-state entropy, binary Shannon entropy,
//! the classical correlations and Gaussian discord encoded in the correlated
//! state, and mutual-information bounds derived from error-probability bounds.

use serde::Serialize;

use crate::error::{check_mu, domain, Error, Result};

/// Von Neumann entropy (bits) of a single-mode Gaussian state with symplectic
/// eigenvalue `x`.
pub fn entropy_h(x: f64) -> Result<f64> {
    if !(x >= 1.0) || !x.is_finite() {
        return domain(format!("entropy argument must be >= 1, got {x}"));
    }
    if x == 1.0 {
        return Ok(0.0);
    }
    // ((x+1)/2) log2((x+1)/2) - ((x-1)/2) log2((x-1)/2)
    //   = log2((x+1)/2) + ((x-1)/2) log2(1 + 2/(x-1)),
    // which avoids cancelling two large terms when x is large.
    let b = 0.5 * (x - 1.0);
    Ok((0.5 * (x + 1.0)).log2() + b * b.recip().ln_1p() / std::f64::consts::LN_2)
}

/// Binary Shannon entropy in bits.
pub fn binary_entropy(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return domain(format!("probability must lie in [0, 1], got {p}"));
    }
    if p == 0.0 || p == 1.0 {
        return Ok(0.0);
    }
    Ok(-p * p.log2() - (1.0 - p) * (1.0 - p).log2())
}

fn conditional_argument(mu: f64) -> f64 {
    (3.0 * mu - 1.0) / (mu + 1.0)
}

/// Classical correlations of the maximally correlated separable state,
/// `h(mu) - h((3mu - 1)/(mu + 1))`.
pub fn delta_c(mu: f64) -> Result<f64> {
    check_mu(mu)?;
    Ok(entropy_h(mu)? - entropy_h(conditional_argument(mu))?)
}

/// Gaussian discord of the maximally correlated separable state,
/// `h(mu) - h(2mu - 1) + h((3mu - 1)/(mu + 1))`.
pub fn delta_d(mu: f64) -> Result<f64> {
    check_mu(mu)?;
    Ok(entropy_h(mu)? - entropy_h(2.0 * mu - 1.0)? + entropy_h(conditional_argument(mu))?)
}

/// Upper end of the bracket used to invert [`delta_d`]. At this `mu` the
/// discord differs from one by less than double-precision resolution.
pub const MU_BRACKET_MAX: f64 = 1e12;

/// Inverts [`delta_d`] by bisection on `log(mu)` over `[1, 1e12]`.
pub fn mu_from_delta_d(target: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&target) {
        return domain(format!("discord target must lie in [0, 1), got {target}"));
    }
    if target == 0.0 {
        return Ok(1.0);
    }
    const FTOL: f64 = 1e-10;
    let (mut lo, mut hi) = (0.0f64, MU_BRACKET_MAX.ln());
    if delta_d(MU_BRACKET_MAX)? < target - FTOL {
        return Err(Error::Numerical(format!(
            "discord {target} is not reached for mu <= {MU_BRACKET_MAX:e}"
        )));
    }
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        let mu = mid.exp();
        let value = delta_d(mu)?;
        if (value - target).abs() <= FTOL * 1e-2 || hi - lo < 1e-15 {
            return Ok(mu);
        }
        if value < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mu = (0.5 * (lo + hi)).exp();
    if (delta_d(mu)? - target).abs() <= FTOL {
        Ok(mu)
    } else {
        Err(Error::Numerical(format!("bisection for discord {target} did not converge")))
    }
}

/// Classical correlations and discord carried by the correlated state at `mu`
/// (the uncorrelated state carries none of either).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorrelationBudget {
    pub mu: f64,
    pub delta_c: f64,
    pub delta_d: f64,
}

impl CorrelationBudget {
    pub fn new(mu: f64) -> Result<Self> {
        Ok(Self { mu, delta_c: delta_c(mu)?, delta_d: delta_d(mu)? })
    }
}

/// Mutual-information bounds `(1 - H(p_upper), 1 - H(p_lower))` from a pair of
/// error-probability bounds with `0 <= p_lower <= p_upper <= 1/2`.
pub fn info_bounds(p_upper: f64, p_lower: f64) -> Result<(f64, f64)> {
    if !(0.0 <= p_lower && p_lower <= p_upper && p_upper <= 0.5) {
        return domain(format!(
            "need 0 <= p_lower <= p_upper <= 1/2, got p_lower={p_lower}, p_upper={p_upper}"
        ));
    }
    Ok((1.0 - binary_entropy(p_upper)?, 1.0 - binary_entropy(p_lower)?))
}
