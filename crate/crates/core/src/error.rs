use thiserror::Error;

/// Errors produced by the bound computations and the Fock-space oracle.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input lies outside the domain of the requested quantity.
    #[error("domain error: {0}")]
    Domain(String),
    /// An iterative numerical routine failed to converge.
    #[error("numerical error: {0}")]
    Numerical(String),
    /// A truncated Fock-space construction lost too much trace.
    #[error("convergence error: {0}")]
    Convergence(String),
    /// A verification report found a violated claim.
    #[error("verification failed: {0}")]
    ReportFailure(String),
    /// Computed bounds violate an ordering that holds by construction.
    #[error("invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

/// Rejects NaN and values below one for the thermal-variance parameter.
pub(crate) fn check_mu(mu: f64) -> Result<()> {
    if !(mu >= 1.0) || !mu.is_finite() {
        return domain(format!("mu must be a finite value >= 1, got {mu}"));
    }
    Ok(())
}

pub(crate) fn check_open_unit(s: f64, name: &str) -> Result<()> {
    if !(s > 0.0 && s < 1.0) {
        return domain(format!("{name} must lie in (0, 1), got {s}"));
    }
    Ok(())
}
