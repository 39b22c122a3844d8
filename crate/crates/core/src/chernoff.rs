//! Single-copy bounds for the global (coherent) detector: the Gaussian
//! s-overlap `Q_s = Tr(rho0^s rho1^(1-s))`, the quantum Chernoff upper bound
//! and the Bhattacharyya lower bound.

use nalgebra::Vector4;
use serde::Serialize;

use crate::error::{check_mu, check_open_unit, domain, Result};
use crate::gaussian::{make_state_one, williamson_symmetric, Mat4, WilliamsonDecomposition};
use crate::numeric::brent_minimize;

/// Interval searched for the optimal Chernoff exponent. The weight functions
/// degenerate at the endpoints when a symplectic eigenvalue equals one.
pub const S_MIN: f64 = 1e-6;
pub const S_MAX: f64 = 1.0 - 1e-6;
pub const S_TOL: f64 = 1e-10;
pub const MAX_ITER: usize = 200;

/// `((x+1)^s - (x-1)^s, (x+1)^s + (x-1)^s)`, computed without cancellation.
fn power_pair(s: f64, x: f64) -> Result<(f64, f64)> {
    if !(x >= 1.0) || !x.is_finite() {
        return domain(format!("weight argument must be >= 1, got {x}"));
    }
    check_open_unit(s, "s")?;
    let b = x - 1.0;
    if b == 0.0 {
        let two_s = 2f64.powf(s);
        return Ok((two_s, two_s));
    }
    let bs = b.powf(s);
    let diff = bs * (s * (2.0 / b).ln_1p()).exp_m1();
    Ok((diff, 2.0 * bs + diff))
}

/// `G_s(x) = 2^s / ((x+1)^s - (x-1)^s)`.
pub fn g_weight(s: f64, x: f64) -> Result<f64> {
    let (diff, _) = power_pair(s, x)?;
    Ok(2f64.powf(s) / diff)
}

/// `Λ_s(x) = ((x+1)^s + (x-1)^s) / ((x+1)^s - (x-1)^s)`.
pub fn lambda_weight(s: f64, x: f64) -> Result<f64> {
    let (diff, sum) = power_pair(s, x)?;
    Ok(sum / diff)
}

/// Two-mode s-overlap of zero-mean Gaussian states from their Williamson
/// decompositions, evaluated with the full 4x4 sigma matrix.
pub fn s_overlap_two_mode(
    rho0: &WilliamsonDecomposition,
    rho1: &WilliamsonDecomposition,
    s: f64,
) -> Result<f64> {
    check_open_unit(s, "s")?;
    let t = 1.0 - s;
    let pi = 4.0
        * g_weight(s, rho0.nu_minus)?
        * g_weight(s, rho0.nu_plus)?
        * g_weight(t, rho1.nu_minus)?
        * g_weight(t, rho1.nu_plus)?;
    let weights = |w: &WilliamsonDecomposition, p: f64| -> Result<Mat4> {
        let lm = lambda_weight(p, w.nu_minus)?;
        let lp = lambda_weight(p, w.nu_plus)?;
        Ok(w.s_matrix * Mat4::from_diagonal(&Vector4::new(lm, lm, lp, lp)) * w.s_matrix.transpose())
    };
    let sigma = weights(rho0, s)? + weights(rho1, t)?;
    Ok(pi / sigma.determinant().sqrt())
}

/// `Q_s` between the thermal product state and the maximally correlated
/// separable state at thermal variance `mu`.
///
/// The correlated state has symplectic spectrum `{1, 2mu - 1}`; its
/// diagonalizing matrix is an orthogonal rotation composed with reflections
/// that commute with the scalar blocks, so `det Σ_s` reduces to a product of
/// diagonal entries.
pub fn s_overlap_global(mu: f64, s: f64) -> Result<f64> {
    check_mu(mu)?;
    check_open_unit(s, "s")?;
    if mu == 1.0 {
        return Ok(1.0);
    }
    let t = 1.0 - s;
    let nu_plus = 2.0 * mu - 1.0;
    let g_mu = g_weight(s, mu)?;
    let l_mu = lambda_weight(s, mu)?;
    // G_{1-s}(1) = Λ_{1-s}(1) = 1
    let pi = 4.0 * g_mu * g_mu * g_weight(t, nu_plus)?;
    let det_root = (l_mu + 1.0) * (l_mu + lambda_weight(t, nu_plus)?);
    let q = pi / det_root;

    #[cfg(debug_assertions)]
    {
        let w0 = williamson_symmetric(&crate::gaussian::make_state_zero(mu)?)?;
        let w1 = williamson_symmetric(&make_state_one(mu)?)?;
        let full = s_overlap_two_mode(&w0, &w1, s)?;
        debug_assert!(
            (full - q).abs() <= 1e-9 * q.max(1e-300),
            "reduced and 4x4 s-overlaps disagree: {q} vs {full} at mu={mu}, s={s}"
        );
    }
    Ok(q)
}

/// Decomposition of the correlated state used by the global overlap.
pub fn correlated_decomposition(mu: f64) -> Result<WilliamsonDecomposition> {
    williamson_symmetric(&make_state_one(mu)?)
}

/// Minimum of `Q_s` over `s` and the resulting Chernoff bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SOverlapResult {
    pub s_star: f64,
    pub q_value: f64,
    pub p_upper: f64,
}

/// Minimizes a log-convex overlap `s -> Q_s` over `[S_MIN, S_MAX]`.
pub(crate) fn minimize_overlap<F>(overlap: F) -> Result<SOverlapResult>
where
    F: Fn(f64) -> Result<f64>,
{
    let mut failure = None;
    let min = brent_minimize(
        |s| match overlap(s) {
            Ok(q) => q.ln(),
            Err(e) => {
                failure.get_or_insert(e);
                f64::INFINITY
            }
        },
        S_MIN,
        S_MAX,
        S_TOL,
        MAX_ITER,
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    let q = min.value.exp().min(1.0);
    Ok(SOverlapResult { s_star: min.x, q_value: q, p_upper: 0.5 * q })
}

/// Quantum Chernoff bound `P+ = inf_s Q_s / 2` for the global detector.
pub fn qcb_global(mu: f64) -> Result<SOverlapResult> {
    check_mu(mu)?;
    if mu == 1.0 {
        return Ok(SOverlapResult { s_star: 0.5, q_value: 1.0, p_upper: 0.5 });
    }
    minimize_overlap(|s| s_overlap_global(mu, s))
}

/// Upper and lower bounds on the global detector's error probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GlobalBounds {
    pub p_upper: f64,
    pub p_lower: f64,
    pub bhattacharyya: f64,
    pub s_star: f64,
}

/// Lower bound `(1 - sqrt(1 - B^2)) / 2` from an overlap `B <= 1`.
pub(crate) fn lower_from_overlap(b: f64) -> f64 {
    let b = b.clamp(0.0, 1.0);
    0.5 * (1.0 - ((1.0 - b) * (1.0 + b)).sqrt())
}

/// Chernoff upper bound together with the Bhattacharyya lower bound
/// `P- = (1 - sqrt(1 - B^2)) / 2`, `B = Q_{1/2}`.
pub fn bhattacharyya_global(mu: f64) -> Result<GlobalBounds> {
    let upper = qcb_global(mu)?;
    let b = s_overlap_global(mu, 0.5)?.min(1.0);
    Ok(GlobalBounds {
        p_upper: upper.p_upper,
        p_lower: lower_from_overlap(b),
        bhattacharyya: b,
        s_star: upper.s_star,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::{make_state_zero, williamson_numeric};

    #[test]
    fn weight_examples() {
        let r2 = 2f64.sqrt();
        let r3 = 3f64.sqrt();
        assert_eq!(g_weight(0.5, 1.0).unwrap(), 1.0);
        assert!((g_weight(0.5, 3.0).unwrap() - (r2 + 1.0)).abs() < 1e-14);
        assert!((g_weight(0.5, 2.0).unwrap() - r2 / (r3 - 1.0)).abs() < 1e-14);
        assert_eq!(lambda_weight(0.5, 1.0).unwrap(), 1.0);
        assert!((lambda_weight(0.5, 2.0).unwrap() - (2.0 + r3)).abs() < 1e-14);
        assert!((lambda_weight(0.5, 3.0).unwrap() - (3.0 + 2.0 * r2)).abs() < 1e-14);
        assert!(g_weight(0.5, 0.9).is_err());
        assert!(lambda_weight(0.0, 2.0).is_err());
        for s in [0.1, 0.5, 0.9] {
            assert_eq!(g_weight(s, 1.0).unwrap(), 1.0);
        }
    }

    #[test]
    fn weights_match_direct_formula() {
        for &s in &[1e-6, 0.2, 0.5, 0.8, 1.0 - 1e-6] {
            for &x in &[1.001, 1.5, 4.0, 33.0] {
                let a: f64 = x + 1.0;
                let b: f64 = x - 1.0;
                let d = a.powf(s) - b.powf(s);
                let tol = if s < 1e-3 { 1e-6 } else { 1e-12 };
                let g = g_weight(s, x).unwrap();
                assert!(((2f64.powf(s) / d) - g).abs() <= tol * g);
                let l = lambda_weight(s, x).unwrap();
                assert!(((a.powf(s) + b.powf(s)) / d - l).abs() <= tol * l);
                assert!(l >= 1.0);
            }
        }
    }

    #[test]
    fn overlap_examples() {
        for s in [0.1, 0.5, 0.9] {
            assert_eq!(s_overlap_global(1.0, s).unwrap(), 1.0);
        }
        // 4 G(2)^2 G(3) / ((Λ(2) + 1)(Λ(2) + Λ(3))) at s = 1/2
        let r2 = 2f64.sqrt();
        let r3 = 3f64.sqrt();
        let g2 = r2 / (r3 - 1.0);
        let expected = 4.0 * g2 * g2 * (r2 + 1.0) / ((3.0 + r3) * (2.0 + r3 + 3.0 + 2.0 * r2));
        let q = s_overlap_global(2.0, 0.5).unwrap();
        assert!((q - expected).abs() < 1e-14);
        assert!((q - 0.7966).abs() < 5e-5);
        assert!(s_overlap_global(0.9, 0.5).is_err());
        assert!(s_overlap_global(2.0, 1.0).is_err());
    }

    #[test]
    fn overlap_swap_symmetry() {
        for &mu in &[1.5, 2.0, 7.0] {
            let w0 = williamson_symmetric(&make_state_zero(mu).unwrap()).unwrap();
            let w1 = correlated_decomposition(mu).unwrap();
            for &s in &[0.2, 0.5, 0.7] {
                let a = s_overlap_two_mode(&w0, &w1, s).unwrap();
                let b = s_overlap_two_mode(&w1, &w0, 1.0 - s).unwrap();
                assert!((a - b).abs() < 1e-13);
                assert!((a - s_overlap_global(mu, s).unwrap()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn overlap_independent_of_decomposition_route() {
        let mu = 2.7;
        let w0 = williamson_numeric(&make_state_zero(mu).unwrap().matrix()).unwrap();
        let w1 = williamson_numeric(&make_state_one(mu).unwrap().matrix()).unwrap();
        for &s in &[0.3, 0.6] {
            let q = s_overlap_two_mode(&w0, &w1, s).unwrap();
            assert!((q - s_overlap_global(mu, s).unwrap()).abs() < 1e-10);
        }
    }

    #[test]
    fn identical_states_have_unit_overlap() {
        let w = correlated_decomposition(3.0).unwrap();
        for &s in &[0.25, 0.5] {
            assert!((s_overlap_two_mode(&w, &w, s).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn log_overlap_is_convex_in_s() {
        for &mu in &[1.2, 2.0, 10.0, 300.0] {
            let h = 1e-3;
            for i in 1..999 {
                let s = i as f64 * h;
                if s - h <= 0.0 || s + h >= 1.0 {
                    continue;
                }
                let f = |s: f64| s_overlap_global(mu, s).unwrap().ln();
                let second = f(s - h) - 2.0 * f(s) + f(s + h);
                assert!(second >= -1e-8, "mu={mu} s={s} second={second}");
            }
        }
    }

    #[test]
    fn chernoff_examples() {
        let r = qcb_global(1.0).unwrap();
        assert_eq!((r.q_value, r.p_upper), (1.0, 0.5));
        let r = qcb_global(2.0).unwrap();
        assert!(r.q_value <= s_overlap_global(2.0, 0.5).unwrap());
        assert!(r.s_star > S_MIN && r.s_star <= S_MAX);
        assert!(qcb_global(4.0).unwrap().p_upper < r.p_upper);
        assert!(qcb_global(50.0).unwrap().p_upper < 0.02);
        assert!(qcb_global(0.5).is_err());
    }

    #[test]
    fn chernoff_minimum_beats_probed_points() {
        for &mu in &[1.01, 2.0, 20.0] {
            let r = qcb_global(mu).unwrap();
            for i in 1..100 {
                let s = i as f64 / 100.0;
                assert!(r.q_value <= s_overlap_global(mu, s).unwrap() + 1e-15);
            }
        }
    }

    #[test]
    fn bhattacharyya_examples() {
        let b = bhattacharyya_global(1.0).unwrap();
        assert_eq!((b.bhattacharyya, b.p_lower, b.p_upper), (1.0, 0.5, 0.5));
        let b = bhattacharyya_global(2.0).unwrap();
        assert!((b.bhattacharyya - 0.7966).abs() < 5e-5);
        assert!((b.p_lower - 0.1978).abs() < 5e-5);
        for i in 0..60 {
            let mu = 1.0 + 0.5 * i as f64;
            let b = bhattacharyya_global(mu).unwrap();
            assert!(b.p_lower <= b.p_upper && b.p_upper <= 0.5);
            assert!(b.bhattacharyya > 0.0 && b.bhattacharyya <= 1.0);
            if mu > 1.0 {
                assert!(b.p_upper < 0.5 && b.p_lower < 0.5);
            }
        }
    }
}
