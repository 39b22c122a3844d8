//! Per-`mu` summary rows, the ordering checks they must satisfy, and the CSV
//! format used by the sweep command.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::asymptotics::{kappa, kappa_loc, to_db};
use crate::chernoff::bhattacharyya_global;
use crate::correlations::{info_bounds, CorrelationBudget};
use crate::error::{check_mu, domain, Error, Result};
use crate::local::local_bounds;

/// Everything reported for one value of `mu`. `ratio_db` is absent at `mu = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiscriminationReport {
    pub mu: f64,
    pub delta_c: f64,
    pub delta_d: f64,
    pub p_plus_global: f64,
    pub p_minus_global: f64,
    pub p_plus_local: f64,
    pub p_minus_local: f64,
    pub i_plus_global: f64,
    pub i_minus_global: f64,
    pub i_plus_local: f64,
    pub i_minus_local: f64,
    pub kappa: f64,
    pub kappa_loc: f64,
    pub delta: f64,
    pub ratio_db: Option<f64>,
}

/// Column names in output order.
pub const CSV_HEADER: [&str; 15] = [
    "mu",
    "delta_c",
    "delta_d",
    "p_plus_global",
    "p_minus_global",
    "p_plus_local",
    "p_minus_local",
    "i_plus_global",
    "i_minus_global",
    "i_plus_local",
    "i_minus_local",
    "kappa",
    "kappa_loc",
    "delta",
    "ratio_db",
];

/// Slack allowed in the ordering checks.
pub const ORDER_SLACK: f64 = 1e-12;

impl DiscriminationReport {
    pub fn compute(mu: f64) -> Result<Self> {
        check_mu(mu)?;
        let budget = CorrelationBudget::new(mu)?;
        let global = bhattacharyya_global(mu)?;
        let local = local_bounds(mu)?;
        let (i_minus_global, i_plus_global) = info_bounds(global.p_upper, global.p_lower)?;
        let (i_minus_local, i_plus_local) = info_bounds(local.p_upper, local.p_lower)?;
        let (k, kl) = (kappa(mu)?, kappa_loc(mu)?);
        let ratio_db = (mu > 1.0).then(|| to_db(k / kl));
        Ok(Self {
            mu,
            delta_c: budget.delta_c,
            delta_d: budget.delta_d,
            p_plus_global: global.p_upper,
            p_minus_global: global.p_lower,
            p_plus_local: local.p_upper,
            p_minus_local: local.p_lower,
            i_plus_global,
            i_minus_global,
            i_plus_local,
            i_minus_local,
            kappa: k,
            kappa_loc: kl,
            delta: k - kl,
            ratio_db,
        })
    }

    /// Orderings that hold for any correct computation; each failure is
    /// described by the violated inequality.
    pub fn violations(&self) -> Vec<String> {
        let checks = [
            ("p_minus_global <= p_plus_global", self.p_minus_global, self.p_plus_global),
            ("p_plus_global <= 1/2", self.p_plus_global, 0.5),
            ("p_minus_local <= p_plus_local", self.p_minus_local, self.p_plus_local),
            ("p_plus_local <= 1/2", self.p_plus_local, 0.5),
            ("p_plus_global <= p_plus_local", self.p_plus_global, self.p_plus_local),
            ("p_minus_global <= p_minus_local", self.p_minus_global, self.p_minus_local),
            ("i_minus_global <= i_plus_global", self.i_minus_global, self.i_plus_global),
            ("i_minus_local <= i_plus_local", self.i_minus_local, self.i_plus_local),
            ("i_minus_local <= i_minus_global", self.i_minus_local, self.i_minus_global),
            ("i_plus_local <= i_plus_global", self.i_plus_local, self.i_plus_global),
            ("0 <= kappa_loc", 0.0, self.kappa_loc),
            ("kappa_loc <= kappa", self.kappa_loc, self.kappa),
        ];
        checks
            .iter()
            .filter(|(_, lo, hi)| !(*lo <= *hi + ORDER_SLACK))
            .map(|(name, lo, hi)| format!("{name} fails at mu={}: {lo} > {hi}", self.mu))
            .collect()
    }

    pub fn check(self) -> Result<Self> {
        let v = self.violations();
        if v.is_empty() {
            Ok(self)
        } else {
            Err(Error::Invariant(v.join("; ")))
        }
    }

    fn values(&self) -> [Option<f64>; 15] {
        [
            Some(self.mu),
            Some(self.delta_c),
            Some(self.delta_d),
            Some(self.p_plus_global),
            Some(self.p_minus_global),
            Some(self.p_plus_local),
            Some(self.p_minus_local),
            Some(self.i_plus_global),
            Some(self.i_minus_global),
            Some(self.i_plus_local),
            Some(self.i_minus_local),
            Some(self.kappa),
            Some(self.kappa_loc),
            Some(self.delta),
            self.ratio_db,
        ]
    }
}

/// Rounds to 12 significant digits and prints the shortest decimal that
/// reads back to the rounded value.
pub fn format_number(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    // Avoid "-0".
    let rounded = if rounded == 0.0 { 0.0 } else { rounded };
    rounded.to_string()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Spacing {
    Linear,
    Log,
}

/// Grid of `mu` values for a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepSpec {
    pub mu_min: f64,
    pub mu_max: f64,
    pub points: usize,
    pub spacing: Spacing,
}

impl SweepSpec {
    pub fn new(mu_min: f64, mu_max: f64, points: usize, spacing: Spacing) -> Result<Self> {
        check_mu(mu_min)?;
        if !(mu_max > mu_min) || !mu_max.is_finite() {
            return domain(format!("need mu_max > mu_min, got [{mu_min}, {mu_max}]"));
        }
        if points < 2 {
            return domain(format!("need at least 2 points, got {points}"));
        }
        Ok(Self { mu_min, mu_max, points, spacing })
    }

    /// 200 log-spaced points on `[1.001, 1000]`.
    pub fn figure_default() -> Self {
        Self { mu_min: 1.001, mu_max: 1e3, points: 200, spacing: Spacing::Log }
    }

    /// Grid with both endpoints reproduced exactly.
    pub fn grid(&self) -> Vec<f64> {
        let n = self.points;
        let last = (n - 1) as f64;
        (0..n)
            .map(|i| {
                if i == 0 {
                    return self.mu_min;
                }
                if i == n - 1 {
                    return self.mu_max;
                }
                let t = i as f64 / last;
                match self.spacing {
                    Spacing::Linear => self.mu_min + t * (self.mu_max - self.mu_min),
                    Spacing::Log => (self.mu_min.ln() + t * (self.mu_max / self.mu_min).ln()).exp(),
                }
            })
            .collect()
    }
}

/// Computes and checks every row of the sweep in parallel, keeping grid order.
pub fn sweep(spec: &SweepSpec) -> Result<Vec<DiscriminationReport>> {
    spec.grid().par_iter().map(|&mu| DiscriminationReport::compute(mu)?.check()).collect()
}

/// Writes the header and one line per report, LF-terminated.
pub fn write_csv<W: Write>(out: &mut W, rows: &[DiscriminationReport]) -> std::io::Result<()> {
    writeln!(out, "{}", CSV_HEADER.join(","))?;
    for row in rows {
        let fields: Vec<String> =
            row.values().iter().map(|v| v.map(format_number).unwrap_or_default()).collect();
        writeln!(out, "{}", fields.join(","))?;
    }
    Ok(())
}
