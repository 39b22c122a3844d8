//! Bounds for the local detector: a Gaussian measurement on mode B steers mode A
//! into a randomly displaced Gaussian state, which is then discriminated from
//! the thermal reduced state of the uncorrelated hypothesis.
//!
//! Displacements are quadrature means in vacuum-variance-one units. The
//! heterodyne outcome `x` is the coherent amplitude scaled by `sqrt 2`, so the
//! steered displacement is `a = (eps / sqrt 2) x` with `eps = 2(mu-1)/(mu+1)`.

use nalgebra::Vector2;
use serde::Serialize;

use crate::chernoff::{g_weight, lambda_weight, minimize_overlap, SOverlapResult};
use crate::error::{check_mu, check_open_unit, domain, Error, Result};
use crate::gaussian::{williamson_single_mode, Mat2, SymmetricTwoModeCM};
use crate::numeric::integrate_adaptive;

/// Single-mode Gaussian POVM `G(x) = π^{-1} W(x) σ W(-x)` whose seed state σ has
/// covariance `eta R(theta) diag(lambda, 1/lambda) R(-theta)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaussianPovm {
    pub eta: f64,
    pub theta: f64,
    pub lambda: f64,
}

impl GaussianPovm {
    pub fn new(eta: f64, theta: f64, lambda: f64) -> Result<Self> {
        if !(eta >= 1.0) || !eta.is_finite() {
            return domain(format!("POVM noise factor must be >= 1, got {eta}"));
        }
        if !(lambda > 0.0) || !lambda.is_finite() {
            return domain(format!("POVM squeezing must be positive, got {lambda}"));
        }
        if !theta.is_finite() {
            return domain("POVM angle must be finite");
        }
        Ok(Self { eta, theta: theta.rem_euclid(std::f64::consts::TAU), lambda })
    }

    /// Projection onto coherent states.
    pub fn heterodyne() -> Self {
        Self { eta: 1.0, theta: 0.0, lambda: 1.0 }
    }

    /// Seed covariance matrix. Written in terms of `cos 2θ`, `sin 2θ` so that
    /// `lambda = 1` gives exactly `eta I` for every angle.
    pub fn seed_cm(&self) -> Mat2 {
        let mean = 0.5 * (self.lambda + self.lambda.recip());
        let aniso = 0.5 * (self.lambda - self.lambda.recip());
        let (s2, c2) = (2.0 * self.theta).sin_cos();
        Mat2::new(mean + aniso * c2, aniso * s2, aniso * s2, mean - aniso * c2) * self.eta
    }
}

/// What a measurement of mode B prepares on mode A.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionalPreparation {
    /// Covariance of the steered state of mode A.
    pub v_cond: Mat2,
    /// Classical covariance of the random displacement.
    pub v_mod: Mat2,
    /// Linear map from the (scaled) measurement outcome to the displacement;
    /// `(eps / sqrt 2) I` for heterodyne on the maximally correlated state.
    pub outcome_gain: Mat2,
}

/// Conditions `V(mu, g, g)` on the outcome of `povm` applied to mode B:
/// `Ṽ = g² (mu I + V_σ)^{-1}`, `V_{A|B} = mu I - Ṽ`.
pub fn condition_on_povm(mu: f64, g: f64, povm: &GaussianPovm) -> Result<ConditionalPreparation> {
    SymmetricTwoModeCM::separable(mu, g)?;
    let povm = GaussianPovm::new(povm.eta, povm.theta, povm.lambda)?;
    let inv = (Mat2::identity() * mu + povm.seed_cm())
        .try_inverse()
        .ok_or_else(|| Error::Numerical("singular measurement covariance".into()))?;
    let v_mod = inv * (g * g);
    let v_cond = Mat2::identity() * mu - v_mod;
    Ok(ConditionalPreparation { v_cond, v_mod, outcome_gain: inv * (std::f64::consts::SQRT_2 * g) })
}

/// `eps = 2(mu - 1)/(mu + 1)`: heterodyne leaves mode A in `(1 + eps) I`
/// displaced with classical covariance `(mu - 1 - eps) I`.
pub fn heterodyne_epsilon(mu: f64) -> Result<f64> {
    check_mu(mu)?;
    Ok(2.0 * (mu - 1.0) / (mu + 1.0))
}

/// Averaged s-overlap `Q_s(G) = Π_s / sqrt(det(Σ_s + Ṽ))` for the state
/// `V(mu, g, g)` when mode B is measured with `povm`.
pub fn s_overlap_conditional(mu: f64, g: f64, s: f64, povm: &GaussianPovm) -> Result<f64> {
    check_open_unit(s, "s")?;
    let prep = condition_on_povm(mu, g, povm)?;
    let (nu, sym) = williamson_single_mode(&prep.v_cond)?;
    // Guard against nu dipping below one by rounding when the steered state is pure.
    let nu = nu.max(1.0);
    let t = 1.0 - s;
    let pi = 2.0 * g_weight(s, mu)? * g_weight(t, nu)?;
    let sigma = Mat2::identity() * lambda_weight(s, mu)? + sym * sym.transpose() * lambda_weight(t, nu)?;
    Ok(pi / (sigma + prep.v_mod).determinant().sqrt())
}

/// [`s_overlap_conditional`] on the maximally correlated state (`g = mu - 1`).
pub fn s_overlap_local(mu: f64, s: f64, povm: &GaussianPovm) -> Result<f64> {
    check_mu(mu)?;
    s_overlap_conditional(mu, mu - 1.0, s, povm)
}

/// Closed form of the heterodyne overlap,
/// `2 G_s(mu) G_{1-s}(1+eps) / [Λ_s(mu) + Λ_{1-s}(1+eps) + (mu-1) eps / 2]`.
pub fn s_overlap_heterodyne(mu: f64, s: f64) -> Result<f64> {
    check_mu(mu)?;
    check_open_unit(s, "s")?;
    let eps = heterodyne_epsilon(mu)?;
    let t = 1.0 - s;
    let num = 2.0 * g_weight(s, mu)? * g_weight(t, 1.0 + eps)?;
    let den = lambda_weight(s, mu)? + lambda_weight(t, 1.0 + eps)? + 0.5 * (mu - 1.0) * eps;
    Ok(num / den)
}

/// Upper bound `P_loc+ = inf_s Q_s(Het) / 2`.
pub fn p_upper_local(mu: f64) -> Result<SOverlapResult> {
    check_mu(mu)?;
    if mu == 1.0 {
        return Ok(SOverlapResult { s_star: 0.5, q_value: 1.0, p_upper: 0.5 });
    }
    minimize_overlap(|s| s_overlap_heterodyne(mu, s))
}

/// Uhlmann fidelity of two single-mode Gaussian states with covariance
/// matrices `va`, `vb` and mean difference `d`:
/// `2 / (sqrt(Δ + δ) - sqrt(δ)) · exp(-dᵀ(va + vb)^{-1} d / 2)` with
/// `Δ = det(va + vb)` and `δ = (det va - 1)(det vb - 1)`.
pub fn fidelity_single_mode(va: &Mat2, vb: &Mat2, d: &Vector2<f64>) -> Result<f64> {
    let sum = va + vb;
    let inv = sum.try_inverse().ok_or_else(|| Error::Numerical("singular covariance sum".into()))?;
    let big = sum.determinant();
    let small = ((va.determinant() - 1.0) * (vb.determinant() - 1.0)).max(0.0);
    let quad = (d.transpose() * inv * d)[(0, 0)];
    Ok((2.0 / ((big + small).sqrt() - small.sqrt()) * (-0.5 * quad).exp()).min(1.0))
}

/// Fidelity between the thermal state `mu I` and the state steered by
/// heterodyne outcome `x`:
/// `2 exp[-eps² |x|² / (4(mu + 1 + eps))] / [1 + mu(1 + eps) - 2(mu - 1) sqrt(2mu/(mu + 1))]`.
pub fn fidelity_heterodyne(mu: f64, x: [f64; 2]) -> Result<f64> {
    let eps = heterodyne_epsilon(mu)?;
    let norm2 = x[0] * x[0] + x[1] * x[1];
    let den = 1.0 + mu * (1.0 + eps) - 2.0 * (mu - 1.0) * (2.0 * mu / (mu + 1.0)).sqrt();
    Ok((2.0 * (-eps * eps * norm2 / (4.0 * (mu + 1.0 + eps))).exp() / den).min(1.0))
}

/// `(1 - sqrt(1 - F)) / 2`, written to stay accurate for small `F`.
fn fidelity_lower_bound(f: f64) -> f64 {
    let f = f.clamp(0.0, 1.0);
    0.5 * f / (1.0 + (1.0 - f).sqrt())
}

/// Radial cut-off in units of the modulation standard deviation.
const RADIAL_CUTOFF: f64 = 12.0;
pub const LOWER_BOUND_REL_TOL: f64 = 1e-8;

/// Fidelity lower bound on the local error probability, averaged over the
/// heterodyne-steered displacement `a ~ N(0, (mu - 1 - eps) I)`.
///
/// The isotropic 2-D average reduces to a radial integral; the Gaussian tail
/// beyond 12 standard deviations (weight `exp(-72)`) is neglected.
pub fn p_lower_local(mu: f64) -> Result<f64> {
    check_mu(mu)?;
    if mu == 1.0 {
        return Ok(0.5);
    }
    let eps = heterodyne_epsilon(mu)?;
    let sigma = (mu - 1.0 - eps).max(0.0).sqrt();
    if sigma == 0.0 {
        return Ok(fidelity_lower_bound(fidelity_heterodyne(mu, [0.0, 0.0])?));
    }
    let gain = eps / std::f64::consts::SQRT_2;
    let mut failure = None;
    let integral = integrate_adaptive(
        |u| {
            let outcome = sigma * u / gain;
            match fidelity_heterodyne(mu, [outcome, 0.0]) {
                Ok(f) => u * (-0.5 * u * u).exp() * fidelity_lower_bound(f),
                Err(e) => {
                    failure.get_or_insert(e);
                    f64::NAN
                }
            }
        },
        0.0,
        RADIAL_CUTOFF,
        0.0,
        LOWER_BOUND_REL_TOL,
        1000,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(integral?.value)
}

/// Fidelity lower bound averaged over the displacement distribution for an
/// arbitrary Gaussian POVM on mode B of `V(mu, g, g)`.
///
/// Uses a fixed composite rule (24 Gauss–Kronrod panels in the radius, 64-point
/// trapezoid in the angle) so the result is a smooth function of the POVM
/// parameters and can be finite-differenced.
pub fn averaged_fidelity_bound(mu: f64, g: f64, povm: &GaussianPovm) -> Result<f64> {
    let prep = condition_on_povm(mu, g, povm)?;
    let thermal = Mat2::identity() * mu;
    let eig = prep.v_mod.symmetric_eigen();
    let root = eig.eigenvectors
        * Mat2::from_diagonal(&eig.eigenvalues.map(|l| l.max(0.0).sqrt()))
        * eig.eigenvectors.transpose();
    const ANGLES: usize = 64;
    const PANELS: usize = 24;
    let mut err = None;
    let mut radial = |rho: f64| -> f64 {
        let mut acc = 0.0;
        for k in 0..ANGLES {
            let phi = std::f64::consts::TAU * k as f64 / ANGLES as f64;
            let d = root * Vector2::new(rho * phi.cos(), rho * phi.sin());
            match fidelity_single_mode(&thermal, &prep.v_cond, &d) {
                Ok(f) => acc += fidelity_lower_bound(f),
                Err(e) => {
                    err.get_or_insert(e);
                }
            }
        }
        rho * (-0.5 * rho * rho).exp() * acc / ANGLES as f64
    };
    let width = RADIAL_CUTOFF / PANELS as f64;
    let mut total = 0.0;
    for p in 0..PANELS {
        let lo = p as f64 * width;
        total += crate::numeric::integrate_fixed_gk15(&mut radial, lo, lo + width);
    }
    if let Some(e) = err {
        return Err(e);
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LocalBounds {
    pub p_upper: f64,
    pub p_lower: f64,
    pub s_star: f64,
}

pub fn local_bounds(mu: f64) -> Result<LocalBounds> {
    let upper = p_upper_local(mu)?;
    Ok(LocalBounds { p_upper: upper.p_upper, p_lower: p_lower_local(mu)?, s_star: upper.s_star })
}

/// Number of points in the squeezing scan.
pub const LAMBDA_GRID_POINTS: usize = 81;
pub const DERIVATIVE_STEP: f64 = 1e-5;
pub const DERIVATIVE_TOL: f64 = 1e-6;

/// `lambda_k = 10^{-1 + k/40}`, `k = 0..81`; the centre point is exactly one.
pub fn lambda_grid() -> Vec<f64> {
    let half = (LAMBDA_GRID_POINTS - 1) / 2;
    (0..LAMBDA_GRID_POINTS)
        .map(|k| if k == half { 1.0 } else { 10f64.powf(-1.0 + k as f64 / half as f64) })
        .collect()
}

/// Result of scanning a POVM figure of merit over the squeezing parameter.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HetOptimalityReport {
    pub mu: f64,
    pub g: f64,
    pub s: f64,
    pub argmin_lambda: f64,
    pub min_value: f64,
    pub value_at_one: f64,
    pub derivative_at_one: f64,
    pub passed: bool,
}

impl HetOptimalityReport {
    pub fn into_result(self) -> Result<Self> {
        if self.passed {
            Ok(self)
        } else {
            Err(Error::ReportFailure(format!(
                "heterodyne not optimal at mu={}, g={}, s={}: grid minimum at lambda={} \
                 (value {:e} vs {:e} at lambda=1), derivative {:e}",
                self.mu,
                self.g,
                self.s,
                self.argmin_lambda,
                self.min_value,
                self.value_at_one,
                self.derivative_at_one
            )))
        }
    }
}

/// Scans `f(lambda)` over [`lambda_grid`] and checks that the minimum is at
/// `lambda = 1` with vanishing central-difference derivative.
pub fn scan_lambda<F>(mu: f64, g: f64, s: f64, f: F) -> Result<HetOptimalityReport>
where
    F: Fn(f64) -> Result<f64>,
{
    let grid = lambda_grid();
    let values = grid.iter().map(|&l| f(l)).collect::<Result<Vec<_>>>()?;
    let (imin, &min_value) =
        values.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).expect("non-empty grid");
    let centre = (LAMBDA_GRID_POINTS - 1) / 2;
    let value_at_one = values[centre];
    let h = DERIVATIVE_STEP;
    let derivative = (f(1.0 + h)? - f(1.0 - h)?) / (2.0 * h);
    let passed = imin == centre && derivative.abs() <= DERIVATIVE_TOL;
    Ok(HetOptimalityReport {
        mu,
        g,
        s,
        argmin_lambda: grid[imin],
        min_value,
        value_at_one,
        derivative_at_one: derivative,
        passed,
    })
}

fn check_scan_domain(mu: f64, g: f64, s: f64) -> Result<()> {
    check_mu(mu)?;
    check_open_unit(s, "s")?;
    if !(g > 0.0 && g <= mu - 1.0) {
        return domain(format!("need 0 < g <= mu - 1, got mu={mu}, g={g}"));
    }
    Ok(())
}

/// Scans `Q_s(mu, g, lambda)` for rank-one POVMs `G(1, 0, lambda)`.
pub fn scan_heterodyne_optimality(mu: f64, g: f64, s: f64) -> Result<HetOptimalityReport> {
    check_scan_domain(mu, g, s)?;
    scan_lambda(mu, g, s, |lambda| s_overlap_conditional(mu, g, s, &GaussianPovm::new(1.0, 0.0, lambda)?))
}

/// Fails with [`Error::ReportFailure`] unless heterodyne minimizes `Q_s` over
/// the squeezing grid.
pub fn verify_heterodyne_optimality(mu: f64, g: f64, s: f64) -> Result<HetOptimalityReport> {
    scan_heterodyne_optimality(mu, g, s)?.into_result()
}

/// Same scan for the averaged fidelity lower bound (`s` is reported as NaN).
pub fn scan_fidelity_optimality(mu: f64, g: f64) -> Result<HetOptimalityReport> {
    check_scan_domain(mu, g, 0.5)?;
    let mut r = scan_lambda(mu, g, f64::NAN, |lambda| {
        averaged_fidelity_bound(mu, g, &GaussianPovm::new(1.0, 0.0, lambda)?)
    })?;
    r.s = f64::NAN;
    Ok(r)
}
