//! Acceptance gate for the library: eight numbered criteria, each printing a
//! single PASS/FAIL line (visible with `--nocapture`) before asserting.
//!
//! Criterion 9 (CLI determinism) lives in the CLI crate's acceptance test.

use std::time::Instant;

use catphase::bounds::full_report;
use catphase::likelihood::{
    estimator_sigma, log_binomial_pmf_continuous, posterior_curve, posterior_moments,
    EstimatorMethod, GridSpec, PosteriorCurve, PosteriorMode,
};
use catphase::model::{
    classical_fisher_information, outcome_probability, quantum_fisher_information, Outcome,
};
use catphase::montecarlo::{mse_oracle_exact, run_campaign, CampaignConfig, PhiPolicy};
use catphase::{Phase, PriorWindow, ProbeSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const W: f64 = 1e-3;
const NBAR: f64 = 1.0;
const PHI: f64 = 1e-4;

fn fig1_probe() -> ProbeSpec {
    ProbeSpec::new(0.1, NBAR).unwrap()
}

fn fig2_probe() -> ProbeSpec {
    ProbeSpec::new(0.03, NBAR).unwrap()
}

fn prior() -> PriorWindow {
    PriorWindow::new(W).unwrap()
}

fn phase(phi: f64) -> Phase {
    Phase::new(phi).unwrap()
}

fn campaign(probe: ProbeSpec, m: u64, trials: u64, seed: u64) -> catphase::montecarlo::CampaignSummary {
    let config = CampaignConfig {
        probe,
        prior: prior(),
        m,
        trials,
        phi_policy: PhiPolicy::Fixed(PHI),
        estimator_method: EstimatorMethod::Linearized,
        master_seed: seed,
    };
    let (_, summary) = run_campaign(&config).unwrap();
    summary
}

fn report(criterion: u32, name: &str, ok: bool, detail: &str) {
    let verdict = if ok { "PASS" } else { "FAIL" };
    println!("criterion {criterion} ({name}): {verdict} — {detail}");
    assert!(ok, "criterion {criterion} ({name}) failed: {detail}");
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// Largest pointwise gap between the two curves, normalized by the exact
/// peak, over the region where the exact density exceeds 1% of its peak.
fn curve_gap(exact: &PosteriorCurve, gauss: &PosteriorCurve) -> f64 {
    let peak = exact.peak();
    exact
        .density()
        .iter()
        .zip(gauss.density())
        .filter(|(e, _)| **e > 0.01 * peak)
        .map(|(e, g)| (e - g).abs() / peak)
        .fold(0.0, f64::max)
}

fn curves(probe: &ProbeSpec, m: u64) -> (PosteriorCurve, PosteriorCurve) {
    let spec = GridSpec::default();
    let exact =
        posterior_curve(probe, phase(PHI), m, PosteriorMode::ExactBinomial, &spec).unwrap();
    let gauss =
        posterior_curve(probe, phase(PHI), m, PosteriorMode::GaussianApprox, &spec).unwrap();
    (exact, gauss)
}

#[test]
fn criterion_1_headline_precision() {
    let start = Instant::now();
    let probe = fig1_probe();
    let m = 1_000_000;
    let (_, gauss) = curves(&probe, m);
    let (_, var) = posterior_moments(&gauss);
    let sigma = var.sqrt();
    let sigma_ok = rel(sigma, 5e-5) < 0.005;

    let summary = campaign(probe, m, 10_000, 7);
    // standard error of the rmse follows from the mse standard error
    let rmse_se = summary.mse_stderr / (2.0 * summary.rmse);
    let mc_ok = (summary.rmse - sigma).abs() <= 3.0 * rmse_se;
    let elapsed = start.elapsed().as_secs_f64();
    let time_ok = elapsed < 60.0;
    report(
        1,
        "headline precision",
        sigma_ok && mc_ok && time_ok,
        &format!(
            "sigma={sigma:.6e} (target 5e-5), rmse={:.6e} ({:+.2} se), {elapsed:.1}s",
            summary.rmse,
            (summary.rmse - sigma) / rmse_se
        ),
    );
}

#[test]
fn criterion_2_ratio_chain() {
    let summary = campaign(fig1_probe(), 1_000_000, 10_000, 7);
    let c = summary.comparisons;
    let ok = rel(c.vs_weak, 0.05) < 0.05
        && rel(c.vs_prior_width, 0.05) < 0.05
        && rel(c.vs_strong, 50.0) < 0.05;
    report(
        2,
        "ratio chain",
        ok,
        &format!(
            "rmse/weak={:.4}, rmse/W={:.4}, rmse/strong={:.2}",
            c.vs_weak, c.vs_prior_width, c.vs_strong
        ),
    );
}

#[test]
fn criterion_3_second_regime() {
    let probe = fig2_probe();
    let m = 16_000;
    let sigma = estimator_sigma(&probe, m);
    let sigma_ok = rel(sigma, 1.186e-4) < 1e-3;
    let summary = campaign(probe, m, 10_000, 11);
    let ratio = summary.comparisons.vs_strong;
    let ratio_ok = (1.7..=2.1).contains(&ratio);
    report(
        3,
        "second regime",
        sigma_ok && ratio_ok,
        &format!("sigma={sigma:.6e} (target 1.186e-4), rmse/strong={ratio:.3}"),
    );
}

#[test]
fn criterion_4_curve_agreement() {
    let (e1, g1) = curves(&fig1_probe(), 1_000_000);
    let (e2, g2) = curves(&fig2_probe(), 16_000);
    let gap1 = curve_gap(&e1, &g1);
    let gap2 = curve_gap(&e2, &g2);
    report(
        4,
        "curve agreement",
        gap1 < 0.02 && gap2 < 0.05,
        &format!("gap={:.3}% (<2%), gap={:.3}% (<5%)", 100.0 * gap1, 100.0 * gap2),
    );
}

#[test]
fn criterion_5_ziv_zakai_consistency() {
    let probe = fig1_probe();
    let m = 1_000_000;
    let r = full_report(&probe, &prior(), m, phase(PHI), 1e-8).unwrap();
    let closed = probe.nu() / (8f64.sqrt() * (m as f64).sqrt() * probe.nbar());
    let zz_ok = rel(r.zz_exact, closed) < 0.10;
    let (_, gauss) = curves(&probe, m);
    let (_, var) = posterior_moments(&gauss);
    let var_ok = rel(var, 2.0 * closed * closed) < 0.02;
    report(
        5,
        "ziv-zakai consistency",
        zz_ok && var_ok,
        &format!(
            "zz_exact/closed={:.4}, var/(2 zz^2)={:.4}",
            r.zz_exact / closed,
            var / (2.0 * closed * closed)
        ),
    );
}

#[test]
fn criterion_6_bound_saturation() {
    let probe = fig1_probe();
    let m = 1_000_000;
    let (_, gauss) = curves(&probe, m);
    let (_, var) = posterior_moments(&gauss);
    let sigma = var.sqrt();
    let r = full_report(&probe, &prior(), m, phase(PHI), 1e-8).unwrap();
    let ok = rel(r.cr, sigma) < 0.02 && rel(r.qcr, sigma) < 0.02 && rel(r.bcr, sigma) < 0.02;
    report(
        6,
        "bound saturation",
        ok,
        &format!(
            "sigma={sigma:.6e}, cr={:.6e}, qcr={:.6e}, bcr={:.6e}",
            r.cr, r.qcr, r.bcr
        ),
    );
}

#[test]
fn criterion_7_fisher_optimality() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let nu: f64 = rng.gen_range(0.01..0.99);
        let nbar: f64 = rng.gen_range(0.1..100.0);
        let probe = ProbeSpec::new(nu, nbar).unwrap();
        let fq = quantum_fisher_information(&probe);
        let f0 = classical_fisher_information(&probe, phase(0.0));
        worst = worst.max(rel(f0, fq));
    }
    report(
        7,
        "fisher optimality",
        worst < 1e-12,
        &format!("max relative gap {worst:.2e} over 100 random probes"),
    );
}

#[test]
fn criterion_8_oracle_equivalence() {
    let probe = fig1_probe();
    let mut detail = String::new();
    let mut ok = true;
    for m in [1u64, 10, 100, 1000] {
        let oracle = mse_oracle_exact(&probe, phase(PHI), m, EstimatorMethod::Linearized).unwrap();
        let summary = campaign(probe, m, 1_000_000, 13 + m);
        let pull = (summary.mse - oracle) / summary.mse_stderr;
        ok &= pull.abs() <= 4.0;
        detail.push_str(&format!("m={m}: {pull:+.2} se; "));

        let p_plus = outcome_probability(&probe, phase(PHI), Outcome::Plus);
        let total: f64 = (0..=m)
            .map(|k| log_binomial_pmf_continuous(k as f64, m as f64, p_plus).exp())
            .sum();
        ok &= (total - 1.0).abs() < 1e-10;
    }
    report(8, "oracle equivalence", ok, detail.trim_end_matches("; "));
}
