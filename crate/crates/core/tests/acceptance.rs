//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Seeds are fixed up front; a failing line is reported as is. The run exits
//! non-zero on any failure not listed in `EXPECTED_FAILURES`.

use std::process::ExitCode;
use std::time::Instant;

use qecnoise::code3::LogicalState;
use qecnoise::histories::{flawless_probability, local_error_probability, marginal_pole_cycles, QecSchedule};
use qecnoise::noise::{four_point_normal_ordered, multiqubit_offdiagonal, spin_boson_offdiagonal, BathTopology, EnvironmentSpec, KernelFamily};
use qecnoise::oracle::{
    dyson_norm_bound, exact_cycle_statistics, flawless_excess_quadrature, four_point_mc, multi_cycle_offdiagonal,
    multiqubit_decay_mc, spin_boson_decay_mc, trapezoid_local_error, variance_for_epsilon, DephasingProcess, PhaseKernel,
};
use qecnoise::phase::{
    boundary_by_bisection, phi4_self_consistent, scan_grid, GridAxis, PhaseLabel, UPPER_CRITICAL_DIMENSION,
};
use qecnoise::rg::{closed_form_lambda_star, frustrated_exact_solution, integrate_flow, BetaFunction, StepControl};

struct Outcome {
    pass: bool,
    detail: String,
}

struct Check {
    pass: bool,
    notes: Vec<String>,
}

impl Check {
    fn new() -> Self {
        Self { pass: true, notes: Vec::new() }
    }

    fn record(&mut self, ok: bool, note: String) {
        self.pass &= ok;
        self.notes.push(if ok { note } else { format!("[x] {note}") });
    }

    fn finish(self) -> Outcome {
        Outcome {
            pass: self.pass,
            detail: self.notes.join("; "),
        }
    }
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn c1_three_qubit_code() -> Outcome {
    const TRIALS: usize = 1_000_000;
    let mut c = Check::new();
    for (eps, seed) in [(0.0025, 101), (0.01, 102)] {
        let p = DephasingProcess::white_with_variance(variance_for_epsilon(eps).unwrap(), 1.0, seed).unwrap();
        let e = exact_cycle_statistics(&p, &LogicalState::plus(), TRIALS).unwrap();
        let eps_exact = e.epsilon.mean;
        let rate = e.p1_sampled;
        c.record(
            rate.within(3.0 * eps_exact, 3.0),
            format!("eps={eps}: syndrome rate {:.5e} vs 3eps {:.5e} ({:.2} sigma)", rate.mean, 3.0 * eps_exact, rate.z_score(3.0 * eps_exact)),
        );
        let f = e.dephasing_error;
        c.record(
            f.within(1.0 - 2.0 * eps_exact, 3.0),
            format!("error-cycle factor {:.6} vs {:.6} ({:.2} sigma)", f.mean, 1.0 - 2.0 * eps_exact, f.z_score(1.0 - 2.0 * eps_exact)),
        );
    }
    c.finish()
}

fn c2_uncorrectable_scaling() -> Outcome {
    let mut c = Check::new();
    let mut pts = Vec::new();
    for (eps, seed) in [(0.02, 201), (0.04, 202), (0.08, 203)] {
        let p = DephasingProcess::white_with_variance(variance_for_epsilon(eps).unwrap(), 1.0, seed).unwrap();
        let e = exact_cycle_statistics(&p, &LogicalState::plus(), 1_000_000).unwrap();
        let dev = e.no_error_deviation;
        c.record(dev.mean > 0.0, format!("eps={eps}: 1-factor {:.4e} +- {:.1e}", dev.mean, dev.std_err));
        pts.push((eps.ln(), dev.mean.ln()));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    c.record((slope - 3.0).abs() <= 0.3, format!("log-log slope {slope:.4}"));
    c.finish()
}

fn c3_rg_exactness() -> Outcome {
    let mut c = Check::new();
    let control = StepControl::default();
    let ells: Vec<f64> = (1..=20).map(|i| 0.5 * i as f64).collect();

    let mut worst_printed: f64 = 0.0;
    let mut worst_exact: f64 = 0.0;
    for lambda0 in [0.1, 0.5, 2.0] {
        for &ell in &ells {
            let ode = integrate_flow(&BetaFunction::QuantumFrustrated, lambda0, ell, control).unwrap().lambda_star;
            let printed = closed_form_lambda_star(&BetaFunction::QuantumFrustrated, lambda0, ell).unwrap().lambda_star;
            worst_printed = worst_printed.max(rel(ode, printed));
            worst_exact = worst_exact.max(rel(ode, frustrated_exact_solution(lambda0, ell)));
        }
    }
    c.record(worst_printed <= 1e-8, format!("frustrated ODE vs l0/sqrt(1+2 l0^2 ell): max rel {worst_printed:.3e}"));
    c.notes.push(format!("frustrated ODE vs l0/sqrt(1+l0^2 ell): max rel {worst_exact:.3e}"));

    let mut worst_kondo: f64 = 0.0;
    for lambda0 in [0.05, 0.1, 0.25, 0.5, 1.0, 2.0] {
        for frac in [0.05, 0.1, 0.2, 0.3, 0.4, 0.5] {
            let ell = frac / lambda0;
            let ode = integrate_flow(&BetaFunction::KondoLeadingOrder, lambda0, ell, control).unwrap().lambda_star;
            let exact = closed_form_lambda_star(&BetaFunction::KondoLeadingOrder, lambda0, ell).unwrap().lambda_star;
            worst_kondo = worst_kondo.max(rel(ode, exact));
        }
    }
    c.record(worst_kondo <= 1e-8, format!("pure l^2 flow vs l0/(1-l0 ell): max rel {worst_kondo:.3e}"));
    c.finish()
}

fn c4_local_error() -> Outcome {
    let mut c = Check::new();
    for delta in [0.25, 0.5, 0.75] {
        let env = EnvironmentSpec::temporal(10.0, 1.0, delta, 0.1);
        let q = local_error_probability(&env, 0.2, 1.0).unwrap().epsilon;
        let t = trapezoid_local_error(&env, 0.2, 1.0, 1000).unwrap();
        let r = rel(q, t.richardson);
        c.record(
            r <= 1e-4,
            format!("2d/z={}: quad {q:.10e} trapezoid {:.10e} rel {r:.2e} (plain {:.2e})", 2.0 * delta, t.richardson, rel(q, t.fine)),
        );
    }
    c.finish()
}

fn c5_flawless_branches() -> Outcome {
    let mut c = Check::new();
    let mut worst: f64 = 0.0;
    for a in [0.2, 0.5, 0.8] {
        let env = EnvironmentSpec::temporal(1.0, 1.0, a / 4.0, 1.0);
        for n in [2, 10, 50, 100] {
            let s = QecSchedule::new(1.0, n, 1).unwrap();
            let closed = flawless_probability(&env, &s, 0.1, 0.01).unwrap().excess;
            let quad = flawless_excess_quadrature(&env, &s, 0.1, 0.01).unwrap();
            worst = worst.max(rel(closed, quad));
        }
    }
    c.record(worst <= 1e-2, format!("generic excess vs 2-D quadrature (a in 0.2,0.5,0.8; N<=100): max rel {worst:.2e}"));

    // Marginal branch: 1/correction is linear in ln N; its root is the pole.
    let env = EnvironmentSpec::temporal(1.0, 1.0, 0.5, 1.0);
    let (lambda, eps) = (0.6, 0.02);
    let pole = marginal_pole_cycles(lambda, 1.0, eps).unwrap().ln();
    let inv = |n: u64| {
        let s = QecSchedule::new(1.0, n, 1).unwrap();
        1.0 / flawless_probability(&env, &s, lambda, eps).unwrap().correction
    };
    let (n1, n2) = (2u64, 64u64);
    let (l1, l2) = ((n1 as f64).ln(), (n2 as f64).ln());
    let (d1, d2) = (inv(n1), inv(n2));
    let root = l1 + d1 * (l2 - l1) / (d1 - d2);
    let predicted = (1.0 - eps).powi(2) / lambda.powi(4);
    c.record(
        rel(root, predicted) <= 1e-9 && rel(pole, predicted) <= 1e-9,
        format!("marginal pole ln N: branch root {root:.12} pole {pole:.12} predicted {predicted:.12}"),
    );
    c.finish()
}

fn c6_phase_classifier() -> Outcome {
    let mut c = Check::new();
    let axis = GridAxis::new(0.0, 4.0, 101).unwrap();
    let rows = scan_grid(&axis, &axis, &axis).unwrap();
    let mismatches = rows
        .iter()
        .filter(|r| {
            let s = r.spatial_dim + r.dyn_exponent - 2.0 * r.scaling_dim;
            let expected = if s.abs() <= 1e-12 {
                PhaseLabel::Marginal
            } else if s > 0.0 {
                PhaseLabel::CorrelationDominated
            } else {
                PhaseLabel::StochasticThresholdHolds
            };
            r.label != expected
        })
        .count();
    c.record(mismatches == 0 && rows.len() == 101usize.pow(3), format!("{} grid points, {mismatches} mismatches", rows.len()));

    let cell = axis.spacing();
    let mut worst: f64 = 0.0;
    for (d, z) in [(0.0, 1.0), (1.0, 2.0), (2.0, 1.5), (3.0, 0.5)] {
        let b = boundary_by_bisection(d, z, 0.0, 4.0, 1e-10).unwrap();
        worst = worst.max((b - 0.5 * (d + z)).abs());
    }
    c.record(worst < cell, format!("bisection boundary max |delta - (D+z)/2| = {worst:.2e} (cell {cell})"));

    let phi4_ok = (0..=4).all(|d| phi4_self_consistent(d as f64).exponent == 3.0 - d as f64);
    c.record(phi4_ok, "phi^4 self-consistent exponent = 3 - D".into());
    c.record(UPPER_CRITICAL_DIMENSION == 4.0, format!("upper critical dimension {UPPER_CRITICAL_DIMENSION}"));
    c.finish()
}

fn c7_dyson() -> Outcome {
    let mut c = Check::new();
    let grid: Vec<f64> = (0..10_000).map(|i| 20.0 * i as f64 / 9999.0).collect();
    let rows = dyson_norm_bound(1.0, &grid).unwrap();
    let violations = rows.iter().filter(|r| r.exact_norm > r.bound).count();
    c.record(violations == 0, format!("{} points on [0, 20], {violations} violations", rows.len()));
    let r = dyson_norm_bound(1.0, &[1e-3]).unwrap()[0];
    let ratio = r.exact_norm / r.bound;
    c.record((ratio - 1.0).abs() <= 1e-6, format!("ratio at 1e-3: {ratio:.12}"));
    c.finish()
}

fn c8_spin_boson() -> Outcome {
    let mut c = Check::new();
    let (lambda, cutoff) = (0.5, 10.0);
    let times = [1.0 / cutoff, 10.0 / cutoff, 100.0 / cutoff];
    let est = spin_boson_decay_mc(lambda, cutoff, &times, 200_000, 801).unwrap();
    for (t, e) in times.iter().zip(&est) {
        let exact = spin_boson_offdiagonal(lambda, cutoff, *t).unwrap();
        c.record(e.within(exact, 3.0), format!("t={t}: {:.5} vs {exact:.5} ({:.2} sigma)", e.mean, e.z_score(exact)));
    }

    let (lambda, cutoff, t) = (0.4, 4.0, 2.0);
    let ind = multiqubit_offdiagonal(lambda, cutoff, t, 2, 0, BathTopology::Independent).unwrap();
    let com = multiqubit_offdiagonal(lambda, cutoff, t, 2, 0, BathTopology::Common).unwrap();
    let ratio = com.ln() / ind.ln();
    c.record((ratio - 2.0).abs() < 1e-12, format!("closed-form exponent ratio common/independent {ratio:.15}"));
    for (bath, exact, seed) in [(BathTopology::Independent, ind, 802), (BathTopology::Common, com, 803)] {
        let e = multiqubit_decay_mc(lambda, cutoff, &[t], 2, bath, 200_000, seed).unwrap()[0];
        c.record(e.within(exact, 3.0), format!("{bath:?} p-q=2: {:.5} vs {exact:.5} ({:.2} sigma)", e.mean, e.z_score(exact)));
    }
    c.finish()
}

fn c9_correlation_regime() -> Outcome {
    const TRIALS: usize = 200_000;
    const THRESHOLD: f64 = 0.3;
    let mut c = Check::new();
    let (cutoff, z, tau0) = (2.0, 1.0, 1.0);
    for (delta, seed) in [(0.1, 901), (0.2, 902), (0.3, 903), (0.75, 904), (1.0, 905), (1.25, 906)] {
        let env = EnvironmentSpec::temporal(cutoff, z, delta, tau0);
        let unit = DephasingProcess::new(PhaseKernel::Correlator { env, lambda: 1.0 }, 1.0, seed).unwrap();
        let lambda = (0.04 / unit.cycle_lag_covariance(0)).sqrt();
        let p = DephasingProcess::new(PhaseKernel::Correlator { env, lambda }, 1.0, seed).unwrap();
        let decay = multi_cycle_offdiagonal(&p, &LogicalState::plus(), 64, TRIALS).unwrap();
        let g = decay.growth_exponent(8).unwrap();
        let predicted_growth = z - 2.0 * delta > 0.0;
        let observed = if g.mean - 3.0 * g.std_err > THRESHOLD {
            Some(true)
        } else if g.mean + 3.0 * g.std_err < THRESHOLD {
            Some(false)
        } else {
            None
        };
        c.record(
            observed == Some(predicted_growth),
            format!(
                "delta={delta}: g={:.3}+-{:.3} predicted {}",
                g.mean,
                g.std_err,
                if predicted_growth { "growth" } else { "saturation" }
            ),
        );
    }

    let lambda = 0.1;
    for (delta, seed) in [(0.1, 911), (0.2, 912), (0.3, 913)] {
        let env = EnvironmentSpec::temporal(cutoff, z, delta, tau0);
        let p = DephasingProcess::new(PhaseKernel::Correlator { env, lambda }, 1.0, seed).unwrap();
        let decay = multi_cycle_offdiagonal(&p, &LogicalState::plus(), 32, TRIALS).unwrap();
        let eps = local_error_probability(&env, lambda, 1.0).unwrap().epsilon;
        let log_corr = |n: u64| {
            let s = QecSchedule::new(1.0, n, 1).unwrap();
            flawless_probability(&env, &s, lambda, eps).unwrap().excess.ln_1p()
        };
        // Three qubits, each with the single-qubit correction.
        let closed = 3.0 * (log_corr(32) - 2.0 * log_corr(16));
        let oracle = decay.log_excess(16).unwrap().mean;
        let ratio = oracle / closed;
        c.record(
            (1.0 / 3.0..=3.0).contains(&ratio),
            format!("lambda*Delta=0.1 delta={delta}: log-excess oracle {oracle:.3e} closed form {closed:.3e} ratio {ratio:.3}"),
        );
    }
    c.finish()
}

fn c10_wick() -> Outcome {
    let mut c = Check::new();
    let temporal = EnvironmentSpec::temporal(10.0, 2.0, 1.0, 1.0);
    let spacetime = EnvironmentSpec {
        cutoff_lambda: 10.0,
        velocity: 1.0,
        dyn_exponent: 1.0,
        scaling_dim: 0.5,
        spatial_dim: 1,
        tau0: 1.0,
        kernel: KernelFamily::PowerLawSpaceTime,
    };
    let cases: [(&str, EnvironmentSpec, Vec<(f64, f64)>, u64); 2] = [
        ("temporal", temporal, vec![(0.0, 0.0), (0.0, 0.2), (0.0, 0.7)], 1001),
        ("space-time", spacetime, vec![(0.0, 0.0), (0.15, 0.12), (0.4, 0.5)], 1002),
    ];
    for (name, env, events, seed) in cases {
        let (dx, dt) = (events[1].0 - events[0].0, events[1].1 - events[0].1);
        let exact = four_point_normal_ordered(&env, dx, dt).unwrap();
        let e = four_point_mc(&env, &events, 0, 1, 400_000, seed).unwrap();
        c.record(
            e.within(exact, 3.0),
            format!("{name}: {:.5} +- {:.5} vs 2C^2 = {exact:.5} ({:.2} sigma)", e.mean, e.std_err, e.z_score(exact)),
        );
    }
    c.finish()
}

/// Criteria that cannot pass as stated, with the reason. Strict: an expected
/// failure that passes also fails the run, so the list cannot go stale.
const EXPECTED_FAILURES: &[(usize, &str)] = &[(
    3,
    "l0/sqrt(1+2 l0^2 ell) solves dl/dell = -l^3, not the frustrated beta function -l^3/2",
)];

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("3-qubit code vs oracle", c1_three_qubit_code),
        ("uncorrectable-channel scaling", c2_uncorrectable_scaling),
        ("RG exactness", c3_rg_exactness),
        ("local error probability", c4_local_error),
        ("flawless-probability branches", c5_flawless_branches),
        ("phase classifier", c6_phase_classifier),
        ("Dyson bound", c7_dyson),
        ("spin-boson cross-check", c8_spin_boson),
        ("correlation-regime sign test", c9_correlation_regime),
        ("Wick four-point identity", c10_wick),
    ];
    let mut failed = Vec::new();
    let mut unexpected = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let id = i + 1;
        let start = Instant::now();
        let out = run();
        let status = if out.pass { "PASS" } else { "FAIL" };
        println!("criterion {id:>2} {status} {name} ({:.1}s): {}", start.elapsed().as_secs_f64(), out.detail);
        let expected = EXPECTED_FAILURES.iter().find(|(c, _)| *c == id);
        match (out.pass, expected) {
            (false, Some((_, why))) => {
                println!("             expected failure: {why}");
                failed.push(id);
            }
            (false, None) => {
                failed.push(id);
                unexpected.push(id);
            }
            (true, Some(_)) => {
                println!("             expected failure now passes; remove it from EXPECTED_FAILURES");
                unexpected.push(id);
            }
            (true, None) => {}
        }
    }
    println!(
        "acceptance: {} of 10 criteria pass; failing: {failed:?}; unexpected outcomes: {unexpected:?}",
        10 - failed.len()
    );
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
