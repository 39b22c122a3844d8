//! Scalar numerical routines: bounded Brent minimization, adaptive
//! Gauss–Kronrod quadrature and Gauss–Hermite rules.

use std::num::NonZeroUsize;

use gauss_quad::GaussHermite;

use crate::error::{Error, Result};

/// Result of a bounded scalar minimization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum {
    pub x: f64,
    pub value: f64,
    pub iterations: usize,
}

const GOLDEN: f64 = 0.381_966_011_250_105_1;

/// Minimizes `f` on `[lo, hi]` with Brent's method (golden-section search with
/// parabolic interpolation).
///
/// Terminates once the bracket around the current best point is narrower than
/// `2 * (xtol + 2 eps |x|)`. The objective is assumed unimodal on the interval;
/// a minimum on the boundary is approached to within the tolerance.
pub fn brent_minimize<F>(mut f: F, lo: f64, hi: f64, xtol: f64, max_iter: usize) -> Result<Minimum>
where
    F: FnMut(f64) -> f64,
{
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::Domain(format!("invalid bracket [{lo}, {hi}]")));
    }
    let (mut a, mut b) = (lo, hi);
    let mut x = a + GOLDEN * (b - a);
    let (mut w, mut v) = (x, x);
    let mut fx = f(x);
    let (mut fw, mut fv) = (fx, fx);
    let mut d: f64 = 0.0;
    let mut e: f64 = 0.0;

    for iter in 0..max_iter {
        let m = 0.5 * (a + b);
        let tol1 = xtol + 2.0 * f64::EPSILON * x.abs();
        let tol2 = 2.0 * tol1;
        if (x - m).abs() <= tol2 - 0.5 * (b - a) {
            return Ok(Minimum { x, value: fx, iterations: iter });
        }

        let mut golden = true;
        if e.abs() > tol1 {
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            } else {
                q = -q;
            }
            if p.abs() < (0.5 * q * e).abs() && p > q * (a - x) && p < q * (b - x) {
                e = d;
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = if x < m { tol1 } else { -tol1 };
                }
                golden = false;
            }
        }
        if golden {
            e = if x < m { b - x } else { a - x };
            d = GOLDEN * e;
        }

        let u = if d.abs() >= tol1 {
            x + d
        } else if d > 0.0 {
            x + tol1
        } else {
            x - tol1
        };
        let fu = f(u);

        if fu <= fx {
            if u < x {
                b = x;
            } else {
                a = x;
            }
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu;
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                v = w;
                fv = fw;
                w = u;
                fw = fu;
            } else if fu <= fv || v == x || v == w {
                v = u;
                fv = fu;
            }
        }
    }
    Err(Error::Numerical(format!(
        "Brent minimization did not reach tolerance {xtol:e} in {max_iter} iterations"
    )))
}

// Kronrod 15-point abscissae on [-1, 1] (non-negative half) with the matching
// Kronrod weights and the embedded 7-point Gauss weights.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

fn gauss_kronrod_15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Single 15-point Kronrod rule over `[a, b]`.
pub fn integrate_fixed_gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> f64 {
    gauss_kronrod_15(f, a, b).0
}

/// Outcome of an adaptive quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error_estimate: f64,
    pub intervals: usize,
}

/// Globally adaptive 7/15-point Gauss–Kronrod quadrature of `f` over `[a, b]`.
///
/// The interval with the largest error estimate is bisected until the summed
/// estimate drops below `max(abs_tol, rel_tol * |I|)`.
pub fn integrate_adaptive<F>(
    mut f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_intervals: usize,
) -> Result<Integral>
where
    F: FnMut(f64) -> f64,
{
    if a == b {
        return Ok(Integral { value: 0.0, error_estimate: 0.0, intervals: 0 });
    }
    let (value, err) = gauss_kronrod_15(&mut f, a, b);
    // (lo, hi, value, error)
    let mut parts = vec![(a, b, value, err)];
    loop {
        let total: f64 = parts.iter().map(|p| p.2).sum();
        let total_err: f64 = parts.iter().map(|p| p.3).sum();
        if !total.is_finite() || !total_err.is_finite() {
            return Err(Error::Numerical("integrand produced a non-finite value".into()));
        }
        if total_err <= abs_tol.max(rel_tol * total.abs()) {
            return Ok(Integral { value: total, error_estimate: total_err, intervals: parts.len() });
        }
        if parts.len() >= max_intervals {
            return Err(Error::Numerical(format!(
                "quadrature error {total_err:e} above tolerance after {max_intervals} intervals"
            )));
        }
        let worst = parts
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .map(|(i, _)| i)
            .expect("non-empty partition");
        let (lo, hi, _, _) = parts.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = gauss_kronrod_15(&mut f, lo, mid);
        let (v2, e2) = gauss_kronrod_15(&mut f, mid, hi);
        parts.push((lo, mid, v1, e1));
        parts.push((mid, hi, v2, e2));
    }
}

/// Orthonormal Hermite polynomials `h_0..h_n` at `x` (weight `exp(-x²)`).
fn hermite_orthonormal(n: usize, x: f64) -> Vec<f64> {
    let mut h = Vec::with_capacity(n + 1);
    h.push(std::f64::consts::PI.powf(-0.25));
    if n > 0 {
        h.push(std::f64::consts::SQRT_2 * x * h[0]);
    }
    for k in 1..n {
        let kf = k as f64;
        h.push((2.0 / (kf + 1.0)).sqrt() * x * h[k] - (kf / (kf + 1.0)).sqrt() * h[k - 1]);
    }
    h
}

/// `n`-point Gauss–Hermite rule for `∫ exp(-x²) f(x) dx`, as `(node, weight)`.
///
/// Starts from the nodes of [`gauss_quad::GaussHermite`], polishes them with
/// Newton steps on the orthonormal recurrence and recomputes the weights as
/// Christoffel numbers `1 / Σ_k h_k(x)²`, which keeps full relative accuracy
/// for the small outer weights.
pub fn gauss_hermite(n: usize) -> Result<Vec<(f64, f64)>> {
    let count = NonZeroUsize::new(n).ok_or_else(|| Error::Domain("need at least one node".into()))?;
    let rule = GaussHermite::new(count);
    let mut out = Vec::with_capacity(n);
    for &(start, _) in rule.iter() {
        let mut x = start;
        for _ in 0..50 {
            let h = hermite_orthonormal(n, x);
            let step = h[n] / ((2.0 * n as f64).sqrt() * h[n - 1]);
            x -= step;
            if step.abs() <= 4.0 * f64::EPSILON * x.abs().max(1.0) {
                break;
            }
        }
        let h = hermite_orthonormal(n - 1, x);
        let w = h.iter().map(|v| v * v).sum::<f64>().recip();
        if !(w.is_finite() && x.is_finite()) {
            return Err(Error::Numerical(format!("Gauss-Hermite refinement failed for {n} nodes")));
        }
        out.push((x, w));
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(out)
}
