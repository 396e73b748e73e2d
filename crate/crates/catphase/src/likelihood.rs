//! The m-shot likelihood in exact binomial and Gaussian form, the
//! maximum-likelihood inversion of a tally into a phase estimate, and the
//! sampling distribution of that estimator evaluated on a grid.

use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::model::{outcome_probability, Outcome, Phase, ProbeSpec};

/// Minimum repetition count for the Gaussian likelihood approximation.
const GAUSSIAN_MIN_M: u64 = 100;
/// Minimum `m p (1-p)` for the Gaussian likelihood approximation.
const GAUSSIAN_MIN_VARIANCE: f64 = 25.0;
/// Maximum tolerated probability mass outside a posterior grid.
const MAX_OUTSIDE_MASS: f64 = 1e-6;

/// A count of `+` outcomes out of `m` repetitions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OutcomeTally {
    k: u64,
    m: u64,
}

impl OutcomeTally {
    pub fn new(k: u64, m: u64) -> Result<Self> {
        if m < 1 {
            return Err(Error::InvalidInput("tally needs m >= 1".into()));
        }
        if k > m {
            return Err(Error::InvalidInput(format!(
                "tally k={k} exceeds repetitions m={m}"
            )));
        }
        Ok(Self { k, m })
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn fraction(&self) -> f64 {
        self.k as f64 / self.m as f64
    }
}

/// How a tally is inverted into a phase estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimatorMethod {
    /// Principal-branch arcsin inversion of the outcome probability.
    ExactArcsin,
    /// Small-phase linearization `phi = (k - m/2) / (m nbar / nu)`.
    Linearized,
}

/// A phase estimate together with how it was produced.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateResult {
    pub phi_hat: f64,
    pub method: EstimatorMethod,
    /// True when the tally fell outside the invertible range and the estimate
    /// was pinned to the branch endpoint. Only the arcsin method can clamp.
    pub clamped: bool,
}

/// Which form of the sampling distribution to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PosteriorMode {
    ExactBinomial,
    GaussianApprox,
}

/// Grid layout for posterior evaluation: `points` uniform samples spanning
/// `+- half_width_sigmas` standard deviations around the true phase, with the
/// tally inversion used to map grid phases back to continuous counts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub points: usize,
    pub half_width_sigmas: f64,
    pub inversion: EstimatorMethod,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            points: 4001,
            half_width_sigmas: 8.0,
            inversion: EstimatorMethod::Linearized,
        }
    }
}

impl GridSpec {
    fn validate(&self) -> Result<()> {
        if self.points < 3 {
            return Err(Error::InvalidInput("grid needs at least 3 points".into()));
        }
        if !self.half_width_sigmas.is_finite() || self.half_width_sigmas < 6.0 {
            return Err(Error::InvalidInput(
                "grid must span at least 6 standard deviations".into(),
            ));
        }
        Ok(())
    }
}

/// The sampling distribution `P(phi_hat | phi)` sampled on a phase grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorCurve {
    grid: Vec<f64>,
    density: Vec<f64>,
    mode: PosteriorMode,
    normalization: f64,
}

impl PosteriorCurve {
    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn density(&self) -> &[f64] {
        &self.density
    }

    pub fn mode(&self) -> PosteriorMode {
        self.mode
    }

    /// Trapezoidal integral of the curve before rescaling to unit mass.
    pub fn normalization(&self) -> f64 {
        self.normalization
    }

    pub fn peak(&self) -> f64 {
        self.density.iter().cloned().fold(0.0, f64::max)
    }
}

/// Log of the binomial pmf extended to real-valued counts through the
/// log-gamma function. Returns negative infinity outside `[0, m]`.
pub fn log_binomial_pmf_continuous(k: f64, m: f64, p_plus: f64) -> f64 {
    if k < 0.0 || k > m {
        return f64::NEG_INFINITY;
    }
    ln_gamma(m + 1.0) - ln_gamma(k + 1.0) - ln_gamma(m - k + 1.0)
        + k * p_plus.ln()
        + (m - k) * (1.0 - p_plus).ln()
}

/// Exact log-likelihood of a tally at phase `phi`.
pub fn log_likelihood_exact(tally: &OutcomeTally, probe: &ProbeSpec, phi: Phase) -> f64 {
    let p_plus = outcome_probability(probe, phi, Outcome::Plus);
    log_binomial_pmf_continuous(tally.k() as f64, tally.m() as f64, p_plus)
}

/// Gaussian (de Moivre-Laplace) approximation of the tally likelihood.
/// Rejects repetition counts outside the approximation regime.
pub fn likelihood_gaussian(tally: &OutcomeTally, probe: &ProbeSpec, phi: Phase) -> Result<f64> {
    let m = tally.m();
    if m < GAUSSIAN_MIN_M {
        return Err(Error::Regime(format!(
            "Gaussian likelihood needs m >= {GAUSSIAN_MIN_M}, got {m}"
        )));
    }
    let p_plus = outcome_probability(probe, phi, Outcome::Plus);
    let var = m as f64 * p_plus * (1.0 - p_plus);
    if var < GAUSSIAN_MIN_VARIANCE {
        return Err(Error::Regime(format!(
            "Gaussian likelihood needs m p (1-p) >= {GAUSSIAN_MIN_VARIANCE}, got {var:.3}"
        )));
    }
    let d = tally.k() as f64 - m as f64 * p_plus;
    Ok((-d * d / (2.0 * var)).exp() / (2.0 * std::f64::consts::PI * var).sqrt())
}

/// Continuous count assigned to a phase by the chosen inversion.
pub fn tally_for_phase(probe: &ProbeSpec, phi_hat: f64, m: f64, method: EstimatorMethod) -> f64 {
    let nu = probe.nu();
    match method {
        EstimatorMethod::Linearized => m / 2.0 + m * probe.nbar() * phi_hat / nu,
        EstimatorMethod::ExactArcsin => {
            let amp = nu * (1.0 - nu * nu).sqrt();
            m * (0.5 + amp * (phi_hat * probe.fock_index()).sin())
        }
    }
}

/// Maximum-likelihood phase estimate from a tally.
pub fn ml_estimate(tally: &OutcomeTally, probe: &ProbeSpec, method: EstimatorMethod) -> EstimateResult {
    let nu = probe.nu();
    let s = tally.fraction() - 0.5;
    match method {
        EstimatorMethod::Linearized => EstimateResult {
            phi_hat: s * nu / probe.nbar(),
            method,
            clamped: false,
        },
        EstimatorMethod::ExactArcsin => {
            let amp = nu * (1.0 - nu * nu).sqrt();
            let u = s / amp;
            let scale = 1.0 / probe.fock_index();
            if u.abs() > 1.0 {
                EstimateResult {
                    phi_hat: u.signum() * scale * std::f64::consts::FRAC_PI_2,
                    method,
                    clamped: true,
                }
            } else {
                EstimateResult {
                    phi_hat: scale * u.asin(),
                    method,
                    clamped: false,
                }
            }
        }
    }
}

/// Standard deviation of the linearized estimator in the Gaussian regime,
/// `nu / (2 sqrt(m) nbar)`. Used for grid sizing.
pub fn estimator_sigma(probe: &ProbeSpec, m: u64) -> f64 {
    probe.nu() / (2.0 * (m as f64).sqrt() * probe.nbar())
}

/// Evaluates the sampling distribution of the estimator on a uniform grid
/// centered at the true phase and normalizes it trapezoidally.
pub fn posterior_curve(
    probe: &ProbeSpec,
    phi_true: Phase,
    m: u64,
    mode: PosteriorMode,
    grid_spec: &GridSpec,
) -> Result<PosteriorCurve> {
    if m < 1 {
        return Err(Error::InvalidInput("posterior needs m >= 1".into()));
    }
    grid_spec.validate()?;
    let sigma = estimator_sigma(probe, m);
    let center = phi_true.radians();
    let half = grid_spec.half_width_sigmas * sigma;
    let n = grid_spec.points;
    let grid: Vec<f64> = (0..n)
        .map(|i| center - half + 2.0 * half * i as f64 / (n - 1) as f64)
        .collect();

    let density: Vec<f64> = match mode {
        PosteriorMode::GaussianApprox => {
            let scale = m as f64 * probe.nbar() * probe.nbar() / (probe.nu() * probe.nu());
            let prefactor = (2.0 * scale / std::f64::consts::PI).sqrt();
            grid.iter()
                .map(|&x| prefactor * (-2.0 * scale * (x - center) * (x - center)).exp())
                .collect()
        }
        PosteriorMode::ExactBinomial => {
            let p_plus = outcome_probability(probe, phi_true, Outcome::Plus);
            let logs: Vec<f64> = grid
                .iter()
                .map(|&x| {
                    let k = tally_for_phase(probe, x, m as f64, grid_spec.inversion);
                    log_binomial_pmf_continuous(k, m as f64, p_plus)
                })
                .collect();
            let log_max = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            logs.iter().map(|&l| (l - log_max).exp()).collect()
        }
    };

    let normalization = trapezoid(&grid, &density);
    if !(normalization.is_finite() && normalization > 0.0) {
        return Err(Error::InvalidInput(
            "posterior curve has no integrable mass on the grid".into(),
        ));
    }
    let density: Vec<f64> = density.iter().map(|d| d / normalization).collect();

    // Tail-mass estimate from the endpoint densities; a Gaussian-like tail
    // beyond the grid carries roughly one sigma worth of the edge density.
    let outside_mass = (density[0] + density[n - 1]) * sigma;
    if outside_mass > MAX_OUTSIDE_MASS {
        return Err(Error::GridCoverage { outside_mass });
    }

    Ok(PosteriorCurve {
        grid,
        density,
        mode,
        normalization,
    })
}

/// Trapezoidal mean and central variance of a normalized curve.
pub fn posterior_moments(curve: &PosteriorCurve) -> (f64, f64) {
    let xs = curve.grid();
    let ds = curve.density();
    let weighted: Vec<f64> = xs.iter().zip(ds).map(|(&x, &d)| x * d).collect();
    let mean = trapezoid(xs, &weighted);
    let centered: Vec<f64> = xs
        .iter()
        .zip(ds)
        .map(|(&x, &d)| (x - mean) * (x - mean) * d)
        .collect();
    let variance = trapezoid(xs, &centered);
    (mean, variance)
}

/// Trapezoidal rule over a strictly increasing grid.
pub fn trapezoid(xs: &[f64], ys: &[f64]) -> f64 {
    xs.windows(2)
        .zip(ys.windows(2))
        .map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1]))
        .sum()
}
