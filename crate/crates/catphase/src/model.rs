//! Probe-state physics: the unbalanced-cat probe, its response to a phase
//! shift, the two-outcome measurement statistics, and both Fisher
//! informations.
//!
//! The probe is the superposition `sqrt(1-nu^2)|0> + nu|nbar/nu^2>` of the
//! vacuum and a single Fock state. All operations here are pure functions of
//! immutable values and safe to call concurrently.

use crate::error::{Error, Result};

/// Tolerance used to decide whether the derived Fock index is an integer.
const FOCK_INTEGER_TOL: f64 = 1e-9;

/// Threshold standing in for "much smaller than one" in the first condition.
pub const C1_THRESHOLD: f64 = 0.3;
/// Threshold standing in for "much larger than one" in the second condition.
pub const C2_THRESHOLD: f64 = 5.0;

/// Parameters of the unbalanced-cat probe state.
///
/// `nu` is the (small) amplitude on the Fock component and `nbar` the mean
/// photon number. The occupied Fock level `nbar/nu^2` is always derived from
/// these two, never stored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeSpec {
    nu: f64,
    nbar: f64,
}

impl ProbeSpec {
    pub fn new(nu: f64, nbar: f64) -> Result<Self> {
        if !nu.is_finite() || nu <= 0.0 || nu >= 1.0 {
            return Err(Error::InvalidInput(format!(
                "probe amplitude nu must lie in (0, 1), got {nu}"
            )));
        }
        if !nbar.is_finite() || nbar <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "mean photon number nbar must be positive, got {nbar}"
            )));
        }
        Ok(Self { nu, nbar })
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn nbar(&self) -> f64 {
        self.nbar
    }

    /// The occupied Fock level `nbar / nu^2`, recomputed on demand.
    pub fn fock_index(&self) -> f64 {
        self.nbar / (self.nu * self.nu)
    }

    /// Whether the Fock index is an integer to within 1e-9. Physically the
    /// probe only exists for integer levels; all formulas remain well defined
    /// for real values, so this is a warning flag rather than an error.
    pub fn integer_fock(&self) -> bool {
        let f = self.fock_index();
        (f - f.round()).abs() < FOCK_INTEGER_TOL
    }
}

/// A phase value in radians. Finite by construction; no range restriction is
/// imposed at the type level.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Phase(f64);

impl Phase {
    pub fn new(radians: f64) -> Result<Self> {
        if !radians.is_finite() {
            return Err(Error::InvalidInput(format!(
                "phase must be finite, got {radians}"
            )));
        }
        Ok(Self(radians))
    }

    pub fn radians(&self) -> f64 {
        self.0
    }
}

/// Uniform prior on `[0, W]` with density `1/W` inside the window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PriorWindow {
    width: f64,
}

impl PriorWindow {
    pub fn new(width: f64) -> Result<Self> {
        if !width.is_finite() || width <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "prior width must be positive, got {width}"
            )));
        }
        Ok(Self { width })
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    /// Density of the uniform prior at `phi`.
    pub fn density(&self, phi: f64) -> f64 {
        if (0.0..=self.width).contains(&phi) {
            1.0 / self.width
        } else {
            0.0
        }
    }
}

/// The two outcomes of the projective measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Plus,
    Minus,
}

/// The dimensionless ratios controlling the validity of the closed-form
/// bound chain, with their threshold flags.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionDiagnostics {
    /// `W * nbar / nu^2`; the closed forms need this small.
    pub c1: f64,
    /// `sqrt(m) * nbar * W / nu`; the closed forms need this large.
    pub c2: f64,
    /// `m * nu^2`, implied large when both conditions hold.
    pub mnu2: f64,
    /// `c1 <= 0.3`.
    pub c1_ok: bool,
    /// `c2 >= 5`.
    pub c2_ok: bool,
}

/// Squared overlap between the probe and its phase-shifted image,
/// `(1-nu^2)^2 + nu^4 + 2 nu^2 (1-nu^2) cos(nbar phi / nu^2)`.
pub fn overlap_squared(probe: &ProbeSpec, phi: Phase) -> f64 {
    let nu2 = probe.nu() * probe.nu();
    let theta = probe.fock_index() * phi.radians();
    (1.0 - nu2).powi(2) + nu2 * nu2 + 2.0 * nu2 * (1.0 - nu2) * theta.cos()
}

/// One minus the squared overlap, computed through the half-angle identity
/// `4 nu^2 (1-nu^2) sin^2(theta/2)` so small-phase values do not cancel.
pub fn one_minus_overlap_squared(probe: &ProbeSpec, phi: Phase) -> f64 {
    let nu2 = probe.nu() * probe.nu();
    let half = 0.5 * probe.fock_index() * phi.radians();
    4.0 * nu2 * (1.0 - nu2) * half.sin().powi(2)
}

/// Probability of a single measurement outcome,
/// `P(+-|phi) = 1/2 +- nu sqrt(1-nu^2) sin(phi nbar / nu^2)`.
pub fn outcome_probability(probe: &ProbeSpec, phi: Phase, outcome: Outcome) -> f64 {
    let nu = probe.nu();
    let amp = nu * (1.0 - nu * nu).sqrt();
    let s = amp * (probe.fock_index() * phi.radians()).sin();
    match outcome {
        Outcome::Plus => 0.5 + s,
        Outcome::Minus => 0.5 - s,
    }
}

/// Quantum Fisher information of the probe: four times the photon-number
/// variance, `4 nbar^2 (1 - nu^2) / nu^2`.
pub fn quantum_fisher_information(probe: &ProbeSpec) -> f64 {
    let nu2 = probe.nu() * probe.nu();
    4.0 * probe.nbar() * probe.nbar() * (1.0 - nu2) / nu2
}

/// Classical Fisher information of the two-outcome measurement at phase
/// `phi`. Equals the quantum Fisher information at `phi = 0`.
pub fn classical_fisher_information(probe: &ProbeSpec, phi: Phase) -> f64 {
    let nu = probe.nu();
    let amp = nu * (1.0 - nu * nu).sqrt();
    let theta = probe.fock_index() * phi.radians();
    let dp = amp * probe.fock_index() * theta.cos();
    let p_plus = 0.5 + amp * theta.sin();
    let p_minus = 1.0 - p_plus;
    dp * dp * (1.0 / p_plus + 1.0 / p_minus)
}

/// Evaluates the dimensionless condition ratios for a prior window and
/// repetition count.
pub fn condition_diagnostics(
    probe: &ProbeSpec,
    prior: &PriorWindow,
    m: u64,
) -> Result<ConditionDiagnostics> {
    if m < 1 {
        return Err(Error::InvalidInput("repetition count m must be >= 1".into()));
    }
    let w = prior.width();
    let c1 = w * probe.fock_index();
    let c2 = (m as f64).sqrt() * probe.nbar() * w / probe.nu();
    let mnu2 = m as f64 * probe.nu() * probe.nu();
    Ok(ConditionDiagnostics {
        c1,
        c2,
        mnu2,
        c1_ok: c1 <= C1_THRESHOLD,
        c2_ok: c2 >= C2_THRESHOLD,
    })
}
