//! Covariance-matrix types, the symplectic form, and Williamson decompositions
//! of two-mode covariance matrices.
//!
//! Quadratures are ordered `(x_A, p_A, x_B, p_B)` and the vacuum covariance
//! matrix is the identity, so a thermal mode with variance `mu` carries
//! `(mu - 1) / 2` photons on average.

use nalgebra::{Matrix2, Matrix4, Vector4};

use crate::error::{check_mu, domain, Error, Result};

pub type Mat2 = Matrix2<f64>;
pub type Mat4 = Matrix4<f64>;

/// Slack used when testing the bona-fide inequalities, relative to `mu^2`.
/// The maximally correlated separable state sits exactly on the boundary.
const BOUNDARY_SLACK: f64 = 1e-12;

/// Single-mode symplectic form `[[0, 1], [-1, 0]]`.
pub fn omega_single() -> Mat2 {
    Mat2::new(0.0, 1.0, -1.0, 0.0)
}

/// Two-mode symplectic form `omega ⊕ omega`.
pub fn omega() -> Mat4 {
    direct_sum(&omega_single(), &omega_single())
}

pub fn direct_sum(a: &Mat2, b: &Mat2) -> Mat4 {
    let mut m = Mat4::zeros();
    m.fixed_view_mut::<2, 2>(0, 0).copy_from(a);
    m.fixed_view_mut::<2, 2>(2, 2).copy_from(b);
    m
}

/// Rotation by `theta` in the single-mode phase space.
pub fn rotation(theta: f64) -> Mat2 {
    let (s, c) = theta.sin_cos();
    Mat2::new(c, -s, s, c)
}

/// Reflection `diag(1, -1)`.
pub fn reflection() -> Mat2 {
    Mat2::new(1.0, 0.0, 0.0, -1.0)
}

/// Exchange matrix `[[0, 1], [1, 0]]`.
pub fn exchange() -> Mat2 {
    Mat2::new(0.0, 1.0, 1.0, 0.0)
}

/// Orthogonal matrix diagonalizing the symmetric normal form with `g = g'`:
/// `(1/sqrt 2) [[-X, X], [X, X]]`. It is special orthogonal but not symplectic.
pub fn normal_form_rotation() -> Mat4 {
    let x = exchange();
    let mut o = Mat4::zeros();
    o.fixed_view_mut::<2, 2>(0, 0).copy_from(&(-x));
    o.fixed_view_mut::<2, 2>(0, 2).copy_from(&x);
    o.fixed_view_mut::<2, 2>(2, 0).copy_from(&x);
    o.fixed_view_mut::<2, 2>(2, 2).copy_from(&x);
    o * std::f64::consts::FRAC_1_SQRT_2
}

/// Squeezing matrix `diag(beta^{-1/2}, beta^{1/2})` with `beta = sqrt(2 mu - 1)`.
///
/// Kept for reference only: `O (L ⊕ L)` is not symplectic for `mu > 1` and the
/// correlated state's spectrum is `{1, 2 mu - 1}`, not `{beta, beta}`.
pub fn squeezing_beta(mu: f64) -> (f64, Mat2) {
    let beta = (2.0 * mu - 1.0).sqrt();
    (beta, Mat2::new(beta.sqrt().recip(), 0.0, 0.0, beta.sqrt()))
}

/// Block swap of modes A and B (symplectic and orthogonal).
fn mode_swap() -> Mat4 {
    let mut p = Mat4::zeros();
    p.fixed_view_mut::<2, 2>(0, 2).fill_with_identity();
    p.fixed_view_mut::<2, 2>(2, 0).fill_with_identity();
    p
}

/// Symmetric two-mode covariance matrix in normal form
///
/// ```text
/// [ mu  0   g   0  ]
/// [ 0   mu  0   gp ]
/// [ g   0   mu  0  ]
/// [ 0   gp  0   mu ]
/// ```
///
/// Fields are public so unphysical parameter sets can be represented and
/// passed to [`check_bona_fide`]; [`SymmetricTwoModeCM::new`] validates.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct SymmetricTwoModeCM {
    pub mu: f64,
    pub g: f64,
    pub gp: f64,
}

impl SymmetricTwoModeCM {
    /// Validated constructor.
    pub fn new(mu: f64, g: f64, gp: f64) -> Result<Self> {
        let cm = Self { mu, g, gp };
        let report = check_bona_fide(&cm);
        if !report.valid {
            return domain(format!("V({mu}, {g}, {gp}) is not bona fide: {:?}", report.violations));
        }
        Ok(cm)
    }

    /// Member of the separable family `g = g'` with `|g| <= mu - 1`.
    pub fn separable(mu: f64, g: f64) -> Result<Self> {
        check_mu(mu)?;
        if g.abs() > (mu - 1.0) * (1.0 + BOUNDARY_SLACK) + BOUNDARY_SLACK {
            return domain(format!("separable family requires |g| <= mu - 1, got mu={mu}, g={g}"));
        }
        Self::new(mu, g, g)
    }

    pub fn matrix(&self) -> Mat4 {
        let (m, g, gp) = (self.mu, self.g, self.gp);
        Mat4::new(
            m, 0.0, g, 0.0, //
            0.0, m, 0.0, gp, //
            g, 0.0, m, 0.0, //
            0.0, gp, 0.0, m,
        )
    }

    /// Mean photon number of either reduced (thermal) mode.
    pub fn mean_photons(&self) -> f64 {
        (self.mu - 1.0) / 2.0
    }
}

/// Thermal product state `V(mu, 0, 0)`.
pub fn make_state_zero(mu: f64) -> Result<SymmetricTwoModeCM> {
    check_mu(mu)?;
    SymmetricTwoModeCM::new(mu, 0.0, 0.0)
}

/// Maximally correlated separable state `V(mu, mu - 1, mu - 1)` at the same
/// local energy as [`make_state_zero`].
pub fn make_state_one(mu: f64) -> Result<SymmetricTwoModeCM> {
    check_mu(mu)?;
    SymmetricTwoModeCM::separable(mu, mu - 1.0)
}

/// One inequality of the bona-fide conditions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum BonaFideClause {
    /// `mu >= 1`
    ThermalVariance,
    /// `|g| < mu`
    XCorrelation,
    /// `|g'| < mu`
    PCorrelation,
    /// `mu^2 + g g' - 1 >= mu |g + g'|`
    Uncertainty,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct BonaFideReport {
    pub valid: bool,
    pub violations: Vec<BonaFideClause>,
}

pub fn check_bona_fide(cm: &SymmetricTwoModeCM) -> BonaFideReport {
    let SymmetricTwoModeCM { mu, g, gp } = *cm;
    let mut violations = Vec::new();
    if !(mu >= 1.0) {
        violations.push(BonaFideClause::ThermalVariance);
    }
    if !(g.abs() < mu) {
        violations.push(BonaFideClause::XCorrelation);
    }
    if !(gp.abs() < mu) {
        violations.push(BonaFideClause::PCorrelation);
    }
    let lhs = mu * mu + g * gp - 1.0;
    let rhs = mu * (g + gp).abs();
    if !(lhs >= rhs - BOUNDARY_SLACK * mu.abs().max(1.0).powi(2)) {
        violations.push(BonaFideClause::Uncertainty);
    }
    BonaFideReport { valid: violations.is_empty(), violations }
}

/// Symplectic eigenvalues and a diagonalizing symplectic matrix:
/// `V = S diag(nu_minus, nu_minus, nu_plus, nu_plus) S^T` and `S Ω S^T = Ω`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WilliamsonDecomposition {
    pub nu_minus: f64,
    pub nu_plus: f64,
    pub s_matrix: Mat4,
}

impl WilliamsonDecomposition {
    pub fn normal_form(&self) -> Mat4 {
        Mat4::from_diagonal(&Vector4::new(self.nu_minus, self.nu_minus, self.nu_plus, self.nu_plus))
    }

    pub fn reconstruct(&self) -> Mat4 {
        self.s_matrix * self.normal_form() * self.s_matrix.transpose()
    }

    /// Largest entry of `|S Ω S^T - Ω|`.
    pub fn symplectic_residual(&self) -> f64 {
        let om = omega();
        (self.s_matrix * om * self.s_matrix.transpose() - om).amax()
    }

    /// Largest entry of `|S D S^T - V|`.
    pub fn reconstruction_residual(&self, v: &Mat4) -> f64 {
        (self.reconstruct() - v).amax()
    }
}

/// Closed-form decomposition of `V(mu, g, g)`: spectrum `mu ∓ |g|` and
/// `S = O (Z ⊕ Z)` (composed with a mode swap when `g < 0` so that
/// `nu_minus <= nu_plus`).
pub fn williamson_symmetric(cm: &SymmetricTwoModeCM) -> Result<WilliamsonDecomposition> {
    if cm.g != cm.gp {
        return domain(format!("closed-form decomposition needs g = g', got {} and {}", cm.g, cm.gp));
    }
    let cm = SymmetricTwoModeCM::separable(cm.mu, cm.g)?;
    let z = reflection();
    let mut s = normal_form_rotation() * direct_sum(&z, &z);
    if cm.g < 0.0 {
        s *= mode_swap();
    }
    Ok(WilliamsonDecomposition { nu_minus: cm.mu - cm.g.abs(), nu_plus: cm.mu + cm.g.abs(), s_matrix: s })
}

const EIGEN_EPS: f64 = 1e-15;
const EIGEN_MAX_ITER: usize = 500;

fn symmetric_power(v: &Mat4, power: f64) -> Result<Mat4> {
    let eig = v
        .try_symmetric_eigen(EIGEN_EPS, EIGEN_MAX_ITER)
        .ok_or_else(|| Error::Numerical("symmetric eigen-solve did not converge".into()))?;
    if eig.eigenvalues.iter().any(|&l| !(l > 0.0)) {
        return domain("covariance matrix is not positive definite");
    }
    let d = eig.eigenvalues.map(|l| l.powf(power));
    Ok(eig.eigenvectors * Mat4::from_diagonal(&d) * eig.eigenvectors.transpose())
}

/// Numerical Williamson decomposition of an arbitrary two-mode covariance
/// matrix.
///
/// With `M = V^{-1/2} Ω V^{-1/2}` (real antisymmetric, eigenvalues `±i/nu`),
/// an orthogonal `O` bringing `M` to the block form `⊕ [[0, 1/nu], [-1/nu, 0]]`
/// gives `S = V^{1/2} O D^{-1/2}`. The returned `nu` are the moduli of the
/// eigenvalues of `Ω V`.
pub fn williamson_numeric(v: &Mat4) -> Result<WilliamsonDecomposition> {
    let scale = v.amax().max(1.0);
    if (v - v.transpose()).amax() > 1e-12 * scale {
        return domain("covariance matrix is not symmetric");
    }
    if v.iter().any(|x| !x.is_finite()) {
        return domain("covariance matrix has non-finite entries");
    }
    let sym = (v + v.transpose()) * 0.5;
    let root = symmetric_power(&sym, 0.5)?;
    let inv_root = symmetric_power(&sym, -0.5)?;
    let m = inv_root * omega() * inv_root;
    let m2 = m * m;
    let m2 = (m2 + m2.transpose()) * 0.5;
    let eig = m2
        .try_symmetric_eigen(EIGEN_EPS, EIGEN_MAX_ITER)
        .ok_or_else(|| Error::Numerical("eigen-solve of M^2 did not converge".into()))?;

    // Most negative eigenvalue of M^2 corresponds to the smallest nu.
    let mut order: Vec<usize> = (0..4).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let mut basis: Vec<Vector4<f64>> = Vec::with_capacity(4);
    let mut nus = Vec::with_capacity(2);
    for round in 0..2 {
        let candidate = if round == 0 {
            eig.eigenvectors.column(order[0]).into_owned()
        } else {
            order
                .iter()
                .map(|&i| orthogonalize(eig.eigenvectors.column(i).into_owned(), &basis))
                .max_by(|a, b| a.norm().total_cmp(&b.norm()))
                .expect("four eigenvectors")
        };
        let u = orthogonalize(candidate, &basis);
        let norm = u.norm();
        if norm < 0.5 {
            return Err(Error::Numerical("degenerate eigenbasis in Williamson reduction".into()));
        }
        let u = u / norm;
        let lambda = (u.transpose() * m2 * u)[(0, 0)];
        if !(lambda < 0.0) {
            return Err(Error::Numerical("M^2 has a non-negative eigenvalue".into()));
        }
        let nu = (-lambda).sqrt().recip();
        let w = orthogonalize(m * u * nu, &basis);
        let w = w.normalize();
        basis.push(w);
        basis.push(u);
        nus.push(nu);
    }
    if nus[0] > nus[1] {
        basis.swap(0, 2);
        basis.swap(1, 3);
        nus.swap(0, 1);
    }
    if nus[0] < 1.0 - 1e-9 {
        return domain(format!("covariance matrix is unphysical: symplectic eigenvalue {}", nus[0]));
    }
    // Rounding can leave a pure mode just below one.
    nus[0] = nus[0].max(1.0);
    let o = Mat4::from_columns(&basis);
    let d_inv_root = Vector4::new(nus[0], nus[0], nus[1], nus[1]).map(|x| x.sqrt().recip());
    let s = root * o * Mat4::from_diagonal(&d_inv_root);
    Ok(WilliamsonDecomposition { nu_minus: nus[0], nu_plus: nus[1], s_matrix: s })
}

fn orthogonalize(mut v: Vector4<f64>, basis: &[Vector4<f64>]) -> Vector4<f64> {
    // Two Gram-Schmidt passes.
    for _ in 0..2 {
        for b in basis {
            v -= b * b.dot(&v);
        }
    }
    v
}

/// Symplectic eigenvalue `sqrt(det V)` and symplectic `S = (V / nu)^{1/2}` of a
/// single-mode covariance matrix, so that `V = nu S S^T`.
pub fn williamson_single_mode(v: &Mat2) -> Result<(f64, Mat2)> {
    let eig = v
        .try_symmetric_eigen(EIGEN_EPS, EIGEN_MAX_ITER)
        .ok_or_else(|| Error::Numerical("2x2 eigen-solve did not converge".into()))?;
    if eig.eigenvalues.iter().any(|&l| !(l > 0.0)) {
        return domain("single-mode covariance matrix is not positive definite");
    }
    let nu = v.determinant().sqrt();
    let d = eig.eigenvalues.map(|l| (l / nu).sqrt());
    let s = eig.eigenvectors * Mat2::from_diagonal(&d) * eig.eigenvectors.transpose();
    Ok((nu, s))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn state_zero_is_thermal_product() {
        let cm = make_state_zero(2.0).unwrap();
        assert_eq!(cm.matrix(), Mat4::identity() * 2.0);
        assert_eq!(cm.mean_photons(), 0.5);
        assert_eq!(make_state_zero(1.0).unwrap().matrix(), Mat4::identity());
        assert!(matches!(make_state_zero(0.5), Err(Error::Domain(_))));
        assert!(make_state_zero(f64::NAN).is_err());
    }

    #[test]
    fn state_one_examples() {
        assert_eq!(make_state_one(1.0).unwrap().matrix(), Mat4::identity());
        let cm = make_state_one(2.0).unwrap();
        assert_eq!((cm.g, cm.gp), (1.0, 1.0));
        assert!(check_bona_fide(&cm).valid);
        let w = williamson_symmetric(&make_state_one(3.0).unwrap()).unwrap();
        assert_eq!((w.nu_minus, w.nu_plus), (1.0, 5.0));
        assert!(make_state_one(0.99).is_err());
    }

    #[test]
    fn bona_fide_examples() {
        let ok = check_bona_fide(&SymmetricTwoModeCM { mu: 2.0, g: 1.0, gp: 1.0 });
        assert!(ok.valid && ok.violations.is_empty());
        let bad = check_bona_fide(&SymmetricTwoModeCM { mu: 2.0, g: 2.0, gp: 2.0 });
        assert!(!bad.valid);
        assert!(bad.violations.contains(&BonaFideClause::XCorrelation));
        assert!(bad.violations.contains(&BonaFideClause::PCorrelation));
        assert!(check_bona_fide(&SymmetricTwoModeCM { mu: 2.0, g: 1.0, gp: -1.0 }).valid);
        let sub = check_bona_fide(&SymmetricTwoModeCM { mu: 0.5, g: 0.0, gp: 0.0 });
        assert!(sub.violations.contains(&BonaFideClause::ThermalVariance));
        let unc = check_bona_fide(&SymmetricTwoModeCM { mu: 2.0, g: 1.5, gp: 1.5 });
        assert_eq!(unc.violations, vec![BonaFideClause::Uncertainty]);
    }

    #[test]
    fn separable_constructor_enforces_bound() {
        assert!(SymmetricTwoModeCM::separable(3.0, 2.0).is_ok());
        assert!(SymmetricTwoModeCM::separable(3.0, -2.0).is_ok());
        assert!(SymmetricTwoModeCM::separable(3.0, 2.1).is_err());
    }

    #[test]
    fn symmetric_decomposition_requires_equal_correlations() {
        let cm = SymmetricTwoModeCM { mu: 3.0, g: 1.0, gp: 0.5 };
        assert!(matches!(williamson_symmetric(&cm), Err(Error::Domain(_))));
    }

    #[test]
    fn symmetric_decomposition_examples() {
        let thermal = williamson_symmetric(&make_state_zero(4.0).unwrap()).unwrap();
        assert_eq!((thermal.nu_minus, thermal.nu_plus), (4.0, 4.0));
        assert!(thermal.symplectic_residual() < 1e-12);
        assert!(thermal.reconstruction_residual(&(Mat4::identity() * 4.0)) < 1e-12);

        let cm = make_state_one(2.0).unwrap();
        let w = williamson_symmetric(&cm).unwrap();
        assert_eq!((w.nu_minus, w.nu_plus), (1.0, 3.0));
        assert!(w.symplectic_residual() < 1e-12);
        assert!(w.reconstruction_residual(&cm.matrix()) < 1e-12);

        let neg = SymmetricTwoModeCM::separable(3.0, -1.5).unwrap();
        let w = williamson_symmetric(&neg).unwrap();
        assert_eq!((w.nu_minus, w.nu_plus), (1.5, 4.5));
        assert!(w.symplectic_residual() < 1e-12);
        assert!(w.reconstruction_residual(&neg.matrix()) < 1e-12);
    }

    #[test]
    fn rotation_is_orthogonal_but_not_symplectic() {
        let o = normal_form_rotation();
        assert!((o * o.transpose() - Mat4::identity()).amax() < 1e-15);
        assert!((o.determinant() - 1.0).abs() < 1e-14);
        assert!((o * omega() * o.transpose() - omega()).amax() > 0.5);
        let z = reflection();
        let s = o * direct_sum(&z, &z);
        assert!((s * omega() * s.transpose() - omega()).amax() < 1e-15);
    }

    #[test]
    fn squeezed_construction_is_not_symplectic() {
        let (beta, l) = squeezing_beta(3.0);
        assert!(close(beta, 5f64.sqrt(), 1e-15));
        let s = normal_form_rotation() * direct_sum(&l, &l);
        assert!((s * omega() * s.transpose() - omega()).amax() > 0.1);
    }

    #[test]
    fn numeric_matches_closed_form() {
        for &(mu, g) in &[(3.0, 2.0), (2.0, 1.0), (1.0, 0.0), (7.5, 3.1), (5.0, 0.0)] {
            let cm = SymmetricTwoModeCM::separable(mu, g).unwrap();
            let a = williamson_symmetric(&cm).unwrap();
            let b = williamson_numeric(&cm.matrix()).unwrap();
            assert!(close(a.nu_minus, b.nu_minus, 1e-10), "{mu} {g}");
            assert!(close(a.nu_plus, b.nu_plus, 1e-10), "{mu} {g}");
            assert!(b.symplectic_residual() < 1e-10);
            assert!(b.reconstruction_residual(&cm.matrix()) < 1e-10);
        }
    }

    #[test]
    fn numeric_spectrum_equals_moduli_of_omega_v_eigenvalues() {
        let cm = SymmetricTwoModeCM::new(4.0, 1.3, -2.2).unwrap();
        let w = williamson_numeric(&cm.matrix()).unwrap();
        let mut moduli: Vec<f64> =
            (omega() * cm.matrix()).complex_eigenvalues().iter().map(|z| z.norm()).collect();
        moduli.sort_by(f64::total_cmp);
        assert!(close(moduli[0], w.nu_minus, 1e-10) && close(moduli[1], w.nu_minus, 1e-10));
        assert!(close(moduli[2], w.nu_plus, 1e-10) && close(moduli[3], w.nu_plus, 1e-10));
    }

    #[test]
    fn numeric_identity_and_failures() {
        let w = williamson_numeric(&Mat4::identity()).unwrap();
        assert!(close(w.nu_minus, 1.0, 1e-12) && close(w.nu_plus, 1.0, 1e-12));
        let mut not_pd = Mat4::identity();
        not_pd[(3, 3)] = -1.0;
        assert!(williamson_numeric(&not_pd).is_err());
        let mut asym = Mat4::identity() * 2.0;
        asym[(0, 1)] = 0.3;
        assert!(williamson_numeric(&asym).is_err());
        assert!(williamson_numeric(&(Mat4::identity() * 0.5)).is_err());
    }

    #[test]
    fn single_mode_decomposition() {
        let v = Mat2::new(2.2, 0.0, 0.0, 1.4);
        let (nu, s) = williamson_single_mode(&v).unwrap();
        assert!(close(nu, (2.2f64 * 1.4).sqrt(), 1e-14));
        assert!(close(s[(0, 0)], (2.2f64 / 1.4).powf(0.25), 1e-14));
        assert!(close(s[(1, 1)], (1.4f64 / 2.2).powf(0.25), 1e-14));
        assert!(close(s.determinant(), 1.0, 1e-14));
        assert!((s * s.transpose() * nu - v).amax() < 1e-13);
    }
}
