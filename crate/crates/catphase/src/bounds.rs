//! Precision bounds and reference scales: weak and strong Heisenberg scales,
//! classical and quantum Cramer-Rao, the exact and closed-form Ziv-Zakai
//! bounds, and the Bayesian Cramer-Rao bound.
//!
//! All bounds are reported as standard deviations in radians; square them to
//! recover variance bounds.

use crate::error::{Error, Result};
use crate::model::{
    classical_fisher_information, condition_diagnostics, one_minus_overlap_squared,
    quantum_fisher_information, ConditionDiagnostics, Phase, PriorWindow, ProbeSpec,
};
use crate::quad::adaptive_simpson;

/// Default relative tolerance for the prior-averaged Fisher quadrature.
const FBAR_REL_TOL: f64 = 1e-8;

/// Which Fisher information enters a Cramer-Rao bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FisherKind {
    Classical,
    Quantum,
}

/// Every bound and reference scale for one parameter set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundsReport {
    pub weak_scale: f64,
    pub strong_scale: f64,
    pub cr: f64,
    pub qcr: f64,
    pub zz_exact: f64,
    pub zz_closed: f64,
    pub bcr: f64,
    pub diagnostics: ConditionDiagnostics,
    /// Absolute error estimate of the Ziv-Zakai variance integral.
    pub quadrature_abs_error: f64,
}

/// Weak and strong Heisenberg reference scales, `1/(sqrt(m) nbar)` and
/// `1/(m nbar)`.
pub fn reference_scales(probe: &ProbeSpec, m: u64) -> Result<(f64, f64)> {
    if m < 1 {
        return Err(Error::InvalidInput("reference scales need m >= 1".into()));
    }
    let n = m as f64 * probe.nbar();
    Ok((1.0 / ((m as f64).sqrt() * probe.nbar()), 1.0 / n))
}

/// Cramer-Rao standard deviation `sqrt(1 / (m F))` with the classical or
/// quantum Fisher information.
pub fn cramer_rao(probe: &ProbeSpec, m: u64, phi: Phase, which: FisherKind) -> Result<f64> {
    if m < 1 {
        return Err(Error::InvalidInput("Cramer-Rao bound needs m >= 1".into()));
    }
    let fisher = match which {
        FisherKind::Classical => classical_fisher_information(probe, phi),
        FisherKind::Quantum => quantum_fisher_information(probe),
    };
    Ok((1.0 / (m as f64 * fisher)).sqrt())
}

/// Ziv-Zakai bound from the exact overlap integral
/// `1/2 int_0^W phi (1 - phi/W) [1 - sqrt(1 - V^m)] dphi`.
///
/// Returns the standard deviation and the quadrature's absolute error
/// estimate on the variance integral. `V^m` is evaluated as
/// `exp(m ln(1 - (1 - V)))` with `1 - V` from the cancellation-free
/// half-angle form.
pub fn ziv_zakai_exact(
    probe: &ProbeSpec,
    prior: &PriorWindow,
    m: u64,
    rel_tol: f64,
) -> Result<(f64, f64)> {
    if m < 1 {
        return Err(Error::InvalidInput("Ziv-Zakai bound needs m >= 1".into()));
    }
    let w = prior.width();
    let mf = m as f64;
    let integrand = |phi: f64| {
        let omv = one_minus_overlap_squared(probe, Phase::new(phi).expect("finite grid phase"));
        // omv can round to slightly above 1 has no meaning here; it stays in
        // [0, 1] because 4 nu^2 (1-nu^2) <= 1
        let v_pow_m = (mf * (-omv).ln_1p()).exp();
        0.5 * phi * (1.0 - phi / w) * (1.0 - (1.0 - v_pow_m).sqrt())
    };
    let q = adaptive_simpson(integrand, 0.0, w, rel_tol)?;
    Ok((q.value.max(0.0).sqrt(), q.abs_error))
}

/// Closed-form Ziv-Zakai bound `sqrt(nu^2 / (8 m nbar^2))`.
pub fn ziv_zakai_closed(probe: &ProbeSpec, m: u64) -> Result<f64> {
    if m < 1 {
        return Err(Error::InvalidInput("Ziv-Zakai bound needs m >= 1".into()));
    }
    Ok((probe.nu() * probe.nu() / (8.0 * m as f64 * probe.nbar() * probe.nbar())).sqrt())
}

/// Bayesian Cramer-Rao standard deviation `sqrt(1 / (m Fbar + 1/W^2))`,
/// with the Fisher information averaged over the uniform prior by adaptive
/// quadrature and the prior information fixed at `1/W^2`.
pub fn bayesian_cramer_rao(probe: &ProbeSpec, prior: &PriorWindow, m: u64) -> Result<f64> {
    if m < 1 {
        return Err(Error::InvalidInput(
            "Bayesian Cramer-Rao bound needs m >= 1".into(),
        ));
    }
    let w = prior.width();
    let q = adaptive_simpson(
        |phi| classical_fisher_information(probe, Phase::new(phi).expect("finite grid phase")),
        0.0,
        w,
        FBAR_REL_TOL,
    )?;
    let fbar = q.value / w;
    Ok((1.0 / (m as f64 * fbar + 1.0 / (w * w))).sqrt())
}

/// Assembles all bounds, scales, and condition diagnostics for one scenario.
pub fn full_report(
    probe: &ProbeSpec,
    prior: &PriorWindow,
    m: u64,
    phi: Phase,
    rel_tol: f64,
) -> Result<BoundsReport> {
    let (weak_scale, strong_scale) = reference_scales(probe, m)?;
    let cr = cramer_rao(probe, m, phi, FisherKind::Classical)?;
    let qcr = cramer_rao(probe, m, phi, FisherKind::Quantum)?;
    let (zz_exact, quadrature_abs_error) = ziv_zakai_exact(probe, prior, m, rel_tol)?;
    let zz_closed = ziv_zakai_closed(probe, m)?;
    let bcr = bayesian_cramer_rao(probe, prior, m)?;
    let diagnostics = condition_diagnostics(probe, prior, m)?;
    Ok(BoundsReport {
        weak_scale,
        strong_scale,
        cr,
        qcr,
        zz_exact,
        zz_closed,
        bcr,
        diagnostics,
        quadrature_abs_error,
    })
}
