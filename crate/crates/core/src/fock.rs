//! Truncated Fock-space representations of the states, used to check the
//! Gaussian closed forms by direct matrix algebra.
//!
//! Two-mode operators use the basis `|m⟩_A ⊗ |n⟩_B` with flat index
//! `m * cutoff + n`. Quadratures are `x = a + a†`, `p = i(a† - a)`, so the vacuum
//! has unit variance.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{check_mu, check_open_unit, domain, Error, Result};
use crate::numeric::gauss_hermite;

/// Entries below this fraction of the largest entry are ignored when looking
/// for invariant subspaces.
const BLOCK_DROP_TOL: f64 = 1e-14;
/// Eigenvalues below this are treated as exact zeros.
pub const EIGEN_CLAMP: f64 = 1e-12;
/// Eigenvalues below this indicate a non-physical operator.
pub const EIGEN_FLOOR: f64 = -1e-10;
/// Largest per-mode cutoff reached by the doubling protocol.
pub const MAX_CUTOFF: usize = 48;
/// Change in the s-overlap under cutoff doubling accepted as converged.
pub const DOUBLING_TOL: f64 = 1e-6;
pub const DEFAULT_TRACE_TOL: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FockConfig {
    pub cutoff: usize,
    pub modulation_nodes: usize,
    pub convergence_tol: f64,
}

impl FockConfig {
    pub fn new(cutoff: usize, modulation_nodes: usize, convergence_tol: f64) -> Result<Self> {
        if cutoff < 4 {
            return domain(format!("cutoff must be at least 4, got {cutoff}"));
        }
        if modulation_nodes < 8 {
            return domain(format!("need at least 8 modulation nodes, got {modulation_nodes}"));
        }
        if !(convergence_tol > 0.0 && convergence_tol < 1.0) {
            return domain(format!("convergence tolerance must lie in (0, 1), got {convergence_tol}"));
        }
        Ok(Self { cutoff, modulation_nodes, convergence_tol })
    }

    /// Cutoff `c` with `2c` nodes, enough for the modulation quadrature to be
    /// exact on every retained matrix element, and a trace tolerance loose
    /// enough to start the doubling protocol from a small cutoff.
    pub fn with_cutoff(cutoff: usize) -> Result<Self> {
        Self::new(cutoff, 2 * cutoff, DEFAULT_TRACE_TOL)
    }

    fn doubled(&self) -> Self {
        Self {
            cutoff: 2 * self.cutoff,
            modulation_nodes: self.modulation_nodes.max(4 * self.cutoff),
            convergence_tol: self.convergence_tol,
        }
    }
}

impl Default for FockConfig {
    fn default() -> Self {
        Self { cutoff: 12, modulation_nodes: 24, convergence_tol: DEFAULT_TRACE_TOL }
    }
}

/// Density matrix over `modes` truncated modes.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    pub matrix: DMatrix<Complex64>,
    pub modes: usize,
    pub cutoff: usize,
}

impl DensityOperator {
    fn new(matrix: DMatrix<Complex64>, modes: usize, cutoff: usize, tol: f64) -> Result<Self> {
        let op = Self { matrix, modes, cutoff };
        let tr = op.trace();
        if tr < 1.0 - tol {
            return Err(Error::Convergence(format!(
                "truncated trace {tr:.12} below 1 - {tol:e} at cutoff {cutoff}"
            )));
        }
        Ok(op)
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.matrix.diagonal().iter().map(|z| z.re).sum()
    }

    /// Reduced state of mode A (`keep_a`) or mode B.
    pub fn partial_trace(&self, keep_a: bool) -> Result<DensityOperator> {
        if self.modes != 2 {
            return domain("partial trace needs a two-mode operator");
        }
        let c = self.cutoff;
        let out = DMatrix::from_fn(c, c, |i, j| {
            (0..c)
                .map(|k| {
                    if keep_a {
                        self.matrix[(i * c + k, j * c + k)]
                    } else {
                        self.matrix[(k * c + i, k * c + j)]
                    }
                })
                .sum()
        });
        Ok(DensityOperator { matrix: out, modes: 1, cutoff: c })
    }

    /// Quadrature means and covariance matrix `V_ij = ⟨{ΔR_i, ΔR_j}⟩`.
    pub fn moments(&self) -> (DVector<f64>, DMatrix<f64>) {
        let quads: Vec<SparseOp> = (0..self.modes)
            .flat_map(|k| {
                let a = annihilator(self.cutoff, self.modes, k);
                let ad = a.adjoint();
                let x = a.add(&ad, Complex64::new(1.0, 0.0));
                let p = ad.add(&a, Complex64::new(-1.0, 0.0)).scale(Complex64::i());
                [x, p]
            })
            .collect();
        let n = quads.len();
        let mean = DVector::from_fn(n, |i, _| self.expect(&quads[i]).re);
        let cm = DMatrix::from_fn(n, n, |i, j| {
            let ij = self.expect(&quads[i].mul(&quads[j])).re;
            let ji = self.expect(&quads[j].mul(&quads[i])).re;
            0.5 * (ij + ji) - mean[i] * mean[j]
        });
        (mean, cm)
    }

    fn expect(&self, op: &SparseOp) -> Complex64 {
        op.rows
            .iter()
            .enumerate()
            .flat_map(|(i, row)| row.iter().map(move |&(j, v)| (i, j, v)))
            .map(|(i, j, v)| self.matrix[(j, i)] * v)
            .sum()
    }
}

/// Row-sparse matrix used for ladder-operator products.
#[derive(Debug, Clone)]
struct SparseOp {
    rows: Vec<Vec<(usize, Complex64)>>,
}

impl SparseOp {
    fn adjoint(&self) -> Self {
        let mut rows = vec![Vec::new(); self.rows.len()];
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, v) in row {
                rows[j].push((i, v.conj()));
            }
        }
        Self { rows }
    }

    fn add(&self, other: &Self, weight: Complex64) -> Self {
        let rows = self
            .rows
            .iter()
            .zip(&other.rows)
            .map(|(r, o)| {
                let mut out = r.clone();
                for &(j, v) in o {
                    match out.iter_mut().find(|e| e.0 == j) {
                        Some(e) => e.1 += weight * v,
                        None => out.push((j, weight * v)),
                    }
                }
                out
            })
            .collect();
        Self { rows }
    }

    fn scale(mut self, z: Complex64) -> Self {
        self.rows.iter_mut().flatten().for_each(|e| e.1 *= z);
        self
    }

    fn mul(&self, other: &Self) -> Self {
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let mut out: Vec<(usize, Complex64)> = Vec::new();
                for &(k, a) in r {
                    for &(j, b) in &other.rows[k] {
                        match out.iter_mut().find(|e| e.0 == j) {
                            Some(e) => e.1 += a * b,
                            None => out.push((j, a * b)),
                        }
                    }
                }
                out
            })
            .collect();
        Self { rows }
    }
}

/// Truncated annihilation operator of mode `which` among `modes` modes.
fn annihilator(cutoff: usize, modes: usize, which: usize) -> SparseOp {
    let dim = cutoff.pow(modes as u32);
    let stride = cutoff.pow((modes - 1 - which) as u32);
    let rows = (0..dim)
        .map(|i| {
            let n = (i / stride) % cutoff;
            if n + 1 < cutoff {
                vec![(i + stride, Complex64::new(((n + 1) as f64).sqrt(), 0.0))]
            } else {
                Vec::new()
            }
        })
        .collect();
    SparseOp { rows }
}

fn ln_factorials(n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n + 1];
    for k in 1..=n {
        out[k] = out[k - 1] + (k as f64).ln();
    }
    out
}

/// Thermal state with mean photon number `n_bar`; not renormalized.
pub fn build_thermal(n_bar: f64, config: &FockConfig) -> Result<DensityOperator> {
    if !(n_bar >= 0.0) || !n_bar.is_finite() {
        return domain(format!("mean photon number must be >= 0, got {n_bar}"));
    }
    let c = config.cutoff;
    let ratio = n_bar / (n_bar + 1.0);
    let diag = DVector::from_fn(c, |n, _| Complex64::new(ratio.powi(n as i32) / (n_bar + 1.0), 0.0));
    DensityOperator::new(DMatrix::from_diagonal(&diag), 1, c, config.convergence_tol)
}

/// Pure coherent state `|beta⟩⟨beta|`.
pub fn build_coherent(beta: Complex64, config: &FockConfig) -> Result<DensityOperator> {
    let c = config.cutoff;
    let lf = ln_factorials(c);
    let amp = DVector::from_fn(c, |n, _| {
        (-0.5 * beta.norm_sqr()).exp() * beta.powu(n as u32) / (0.5 * lf[n]).exp()
    });
    DensityOperator::new(&amp * amp.adjoint(), 1, c, config.convergence_tol)
}

/// Thermal product state `rho0` with `n_bar = (mu - 1)/2` per mode.
pub fn build_product_thermal(mu: f64, config: &FockConfig) -> Result<DensityOperator> {
    check_mu(mu)?;
    let single = build_thermal(0.5 * (mu - 1.0), config)?;
    let m = single.matrix.kronecker(&single.matrix);
    DensityOperator::new(m, 2, config.cutoff, config.convergence_tol)
}

/// `rho1 = ∫ p(α) |α⟩⟨α| ⊗ |α⟩⟨α| d²α` with `Re α`, `Im α` independent
/// normal of variance `(mu - 1)/4`, whose covariance matrix is
/// `V(mu, mu - 1, mu - 1)`.
///
/// The coherent-state weight `exp(-2|α|²)` is absorbed into the Gaussian, so
/// each matrix element is a moment `E[α^N ᾱ^N']` under variance `τ²` with
/// `1/τ² = 1/σ² + 4`, evaluated by a Gauss–Hermite product rule.
pub fn build_correlated(mu: f64, config: &FockConfig) -> Result<DensityOperator> {
    check_mu(mu)?;
    let c = config.cutoff;
    let dim = c * c;
    if mu == 1.0 {
        let mut m = DMatrix::zeros(dim, dim);
        m[(0, 0)] = Complex64::new(1.0, 0.0);
        return DensityOperator::new(m, 2, c, config.convergence_tol);
    }
    let var = 0.25 * (mu - 1.0);
    let tau2 = 1.0 / (1.0 / var + 4.0);
    let scale = (2.0 * tau2).sqrt();
    let nodes: Vec<(f64, f64)> = gauss_hermite(config.modulation_nodes)?
        .into_iter()
        .map(|(x, w)| (scale * x, w / std::f64::consts::PI.sqrt()))
        .collect();

    let top = 2 * c - 1;
    let mut moments = DMatrix::<Complex64>::zeros(top, top);
    let mut powers = vec![Complex64::new(0.0, 0.0); top];
    for &(re, wr) in &nodes {
        for &(im, wi) in &nodes {
            let alpha = Complex64::new(re, im);
            let w = wr * wi;
            powers[0] = Complex64::new(1.0, 0.0);
            for k in 1..top {
                powers[k] = powers[k - 1] * alpha;
            }
            for i in 0..top {
                let wi_pow = powers[i] * w;
                for j in 0..top {
                    moments[(i, j)] += wi_pow * powers[j].conj();
                }
            }
        }
    }
    let norm = tau2 / var;
    let lf = ln_factorials(c);
    let m = DMatrix::from_fn(dim, dim, |r, s| {
        let (m1, n1) = (r / c, r % c);
        let (m2, n2) = (s / c, s % c);
        let denom = (0.5 * (lf[m1] + lf[n1] + lf[m2] + lf[n2])).exp();
        moments[(m1 + n1, m2 + n2)] * (norm / denom)
    });
    DensityOperator::new(m, 2, c, config.convergence_tol)
}

/// State of mode A after heterodyne on mode B of `rho` returns the scaled
/// outcome `x = sqrt(2) (Re β, Im β)`; renormalized.
pub fn build_heterodyne_conditional(rho: &DensityOperator, x: [f64; 2]) -> Result<DensityOperator> {
    if rho.modes != 2 {
        return domain("conditioning needs a two-mode operator");
    }
    let c = rho.cutoff;
    let beta = Complex64::new(x[0], x[1]) / std::f64::consts::SQRT_2;
    let lf = ln_factorials(c);
    // ⟨β|n⟩
    let bra = DVector::from_fn(c, |n, _| {
        (-0.5 * beta.norm_sqr()).exp() * beta.conj().powu(n as u32) / (0.5 * lf[n]).exp()
    });
    let out = DMatrix::from_fn(c, c, |i, j| {
        let mut acc = Complex64::new(0.0, 0.0);
        for n in 0..c {
            for k in 0..c {
                acc += bra[n] * rho.matrix[(i * c + n, j * c + k)] * bra[k].conj();
            }
        }
        acc
    });
    let tr: f64 = out.diagonal().iter().map(|z| z.re).sum();
    if !(tr > 0.0) {
        return Err(Error::Numerical("conditional state has zero weight".into()));
    }
    Ok(DensityOperator { matrix: out / Complex64::new(tr, 0.0), modes: 1, cutoff: c })
}

/// Eigendecomposition restricted to the invariant subspaces of an operator.
#[derive(Debug, Clone)]
pub struct Spectrum {
    blocks: Vec<Block>,
    /// (block, position within block) of every basis index.
    position: Vec<(usize, usize)>,
}

#[derive(Debug, Clone)]
struct Block {
    indices: Vec<usize>,
    values: DVector<f64>,
    vectors: DMatrix<Complex64>,
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

impl Spectrum {
    pub fn new(rho: &DensityOperator) -> Result<Self> {
        let m = &rho.matrix;
        let n = m.nrows();
        let cut = BLOCK_DROP_TOL * m.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let mut parent: Vec<usize> = (0..n).collect();
        for j in 0..n {
            for i in 0..j {
                if m[(i, j)].norm() > cut || m[(j, i)].norm() > cut {
                    let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                    if ri != rj {
                        parent[ri] = rj;
                    }
                }
            }
        }
        let mut groups: Vec<Vec<usize>> = Vec::new();
        let mut label = vec![usize::MAX; n];
        for i in 0..n {
            let r = find(&mut parent, i);
            if label[r] == usize::MAX {
                label[r] = groups.len();
                groups.push(Vec::new());
            }
            groups[label[r]].push(i);
        }
        let mut position = vec![(0, 0); n];
        let mut blocks = Vec::with_capacity(groups.len());
        for (b, idx) in groups.into_iter().enumerate() {
            let k = idx.len();
            let sub = DMatrix::from_fn(k, k, |r, s| 0.5 * (m[(idx[r], idx[s])] + m[(idx[s], idx[r])].conj()));
            let eig = sub
                .try_symmetric_eigen(1e-15, 10_000)
                .ok_or_else(|| Error::Numerical("eigendecomposition did not converge".into()))?;
            if let Some(&bad) = eig.eigenvalues.iter().find(|&&l| l < EIGEN_FLOOR) {
                return Err(Error::Numerical(format!("operator has eigenvalue {bad:e}")));
            }
            for (p, &i) in idx.iter().enumerate() {
                position[i] = (b, p);
            }
            blocks.push(Block { indices: idx, values: eig.eigenvalues, vectors: eig.eigenvectors });
        }
        Ok(Self { blocks, position })
    }

    fn block_power(block: &Block, p: f64) -> DMatrix<Complex64> {
        let d = block.values.map(|l| Complex64::new(if l < EIGEN_CLAMP { 0.0 } else { l.powf(p) }, 0.0));
        &block.vectors * DMatrix::from_diagonal(&d) * block.vectors.adjoint()
    }

    /// Dense `rho^p` with clamped eigenvalues.
    pub fn power(&self, p: f64) -> DMatrix<Complex64> {
        let n = self.position.len();
        let mut out = DMatrix::zeros(n, n);
        for b in &self.blocks {
            let pw = Self::block_power(b, p);
            for (r, &i) in b.indices.iter().enumerate() {
                for (s, &j) in b.indices.iter().enumerate() {
                    out[(i, j)] = pw[(r, s)];
                }
            }
        }
        out
    }

    /// `Tr(self^p other^q)`.
    pub fn trace_product(&self, p: f64, other: &Spectrum, q: f64) -> Result<f64> {
        if self.position.len() != other.position.len() {
            return domain("operators act on spaces of different dimension");
        }
        let other_pow: Vec<DMatrix<Complex64>> =
            other.blocks.iter().map(|b| Self::block_power(b, q)).collect();
        let mut acc = Complex64::new(0.0, 0.0);
        for b in &self.blocks {
            let pw = Self::block_power(b, p);
            for (r, &i) in b.indices.iter().enumerate() {
                let (bi, pi) = other.position[i];
                for (s, &j) in b.indices.iter().enumerate() {
                    let (bj, pj) = other.position[j];
                    if bi == bj {
                        acc += pw[(r, s)] * other_pow[bi][(pj, pi)];
                    }
                }
            }
        }
        Ok(acc.re)
    }
}

/// `Tr(rho0^s rho1^{1-s})` by direct diagonalization.
pub fn oracle_s_overlap(rho0: &DensityOperator, rho1: &DensityOperator, s: f64) -> Result<f64> {
    check_open_unit(s, "s")?;
    Spectrum::new(rho0)?.trace_product(s, &Spectrum::new(rho1)?, 1.0 - s)
}

/// Uhlmann fidelity `(Tr sqrt(sqrt(rho_a) rho_b sqrt(rho_a)))²`.
pub fn oracle_fidelity(rho_a: &DensityOperator, rho_b: &DensityOperator) -> Result<f64> {
    if rho_a.dim() != rho_b.dim() {
        return domain("operators act on spaces of different dimension");
    }
    let root = Spectrum::new(rho_a)?.power(0.5);
    let inner = &root * &rho_b.matrix * &root;
    let inner = (&inner + inner.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = inner
        .try_symmetric_eigen(1e-15, 10_000)
        .ok_or_else(|| Error::Numerical("eigendecomposition did not converge".into()))?;
    let tr: f64 = eig.eigenvalues.iter().map(|&l| l.max(0.0).sqrt()).sum();
    Ok(tr * tr)
}

/// Oracle value of the global s-overlaps accepted by the doubling protocol.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergedOverlap {
    pub s: Vec<f64>,
    pub values: Vec<f64>,
    pub cutoff: usize,
    pub max_change: f64,
}

fn overlaps_at(mu: f64, s: &[f64], config: &FockConfig) -> Result<Vec<f64>> {
    let r0 = Spectrum::new(&build_product_thermal(mu, config)?)?;
    let r1 = Spectrum::new(&build_correlated(mu, config)?)?;
    s.iter().map(|&v| r0.trace_product(v, &r1, 1.0 - v)).collect()
}

/// Evaluates the oracle s-overlaps at cutoff `c` and `2c`, doubling until the
/// largest change is below [`DOUBLING_TOL`]; fails once the cutoff would
/// exceed [`MAX_CUTOFF`].
pub fn converged_s_overlaps(mu: f64, s: &[f64], config: &FockConfig) -> Result<ConvergedOverlap> {
    check_mu(mu)?;
    for &v in s {
        check_open_unit(v, "s")?;
    }
    let mut cfg = *config;
    let mut prev = overlaps_at(mu, s, &cfg)?;
    loop {
        let next_cfg = cfg.doubled();
        if next_cfg.cutoff > MAX_CUTOFF {
            return Err(Error::Convergence(format!(
                "s-overlap not converged to {DOUBLING_TOL:e} below cutoff {MAX_CUTOFF}"
            )));
        }
        let next = overlaps_at(mu, s, &next_cfg)?;
        let change = prev.iter().zip(&next).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        if change < DOUBLING_TOL {
            return Ok(ConvergedOverlap {
                s: s.to_vec(),
                values: next,
                cutoff: next_cfg.cutoff,
                max_change: change,
            });
        }
        cfg = next_cfg;
        prev = next;
    }
}
