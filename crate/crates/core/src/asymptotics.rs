//! Multi-copy error exponents of the global and local detectors.

use rayon::prelude::*;
use serde::Serialize;

use crate::chernoff::qcb_global;
use crate::correlations::{delta_c, delta_d};
use crate::error::{check_mu, domain, Result};
use crate::local::p_upper_local;

/// Global exponent `kappa = -ln Q` in nats; zero at `mu = 1`.
pub fn kappa(mu: f64) -> Result<f64> {
    Ok(-qcb_global(mu)?.q_value.ln())
}

/// Local exponent `kappa_loc = -ln inf_s Q_s(Het)` in nats; zero at `mu = 1`.
pub fn kappa_loc(mu: f64) -> Result<f64> {
    Ok(-(2.0 * p_upper_local(mu)?.p_upper).ln())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExponentReport {
    pub kappa: f64,
    pub kappa_loc: f64,
    pub delta: f64,
    pub ratio: f64,
    pub ratio_db: f64,
}

/// `10 log10(r)`.
pub fn to_db(r: f64) -> f64 {
    10.0 * r.log10()
}

/// Exponents, their gap and ratio. Requires `mu > 1`.
pub fn exponents(mu: f64) -> Result<ExponentReport> {
    check_mu(mu)?;
    if mu <= 1.0 {
        return domain("exponent ratio is undefined at mu = 1");
    }
    let k = kappa(mu)?;
    let kl = kappa_loc(mu)?;
    let ratio = k / kl;
    Ok(ExponentReport { kappa: k, kappa_loc: kl, delta: k - kl, ratio, ratio_db: to_db(ratio) })
}

/// Chernoff estimate `Q^M / 2` of the global error after `copies` copies.
pub fn multicopy_p_upper(mu: f64, copies: u32) -> Result<f64> {
    check_mu(mu)?;
    if copies == 0 {
        return domain("copies must be at least 1");
    }
    Ok(0.5 * qcb_global(mu)?.q_value.powf(f64::from(copies)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GainRow {
    pub mu: f64,
    pub delta_c: f64,
    pub delta_d: f64,
    pub kappa: f64,
    pub kappa_loc: f64,
    pub delta: f64,
    pub ratio: f64,
    pub ratio_db: f64,
}

/// One row per grid point, computed in parallel. The grid must be sorted with
/// all values above one.
pub fn gain_curves(mu_grid: &[f64]) -> Result<Vec<GainRow>> {
    if mu_grid.windows(2).any(|w| !(w[0] < w[1])) {
        return domain("grid must be strictly increasing");
    }
    mu_grid
        .par_iter()
        .map(|&mu| {
            let e = exponents(mu)?;
            Ok(GainRow {
                mu,
                delta_c: delta_c(mu)?,
                delta_d: delta_d(mu)?,
                kappa: e.kappa,
                kappa_loc: e.kappa_loc,
                delta: e.delta,
                ratio: e.ratio,
                ratio_db: e.ratio_db,
            })
        })
        .collect()
}
