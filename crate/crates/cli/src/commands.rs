use std::fmt::Write as _;

use clap::{Subcommand, ValueEnum};
use qecnoise::code3::{cycle_stats, entropy_asymptotics, history_probability, mean_history_offdiagonal, residual_offdiagonal, LogicalState};
use qecnoise::histories::{
    breakdown_cycles, flawless_probability, flawless_residual_decoherence, local_error_probability, marginal_pole_cycles,
    FlawlessBranch, QecSchedule,
};
use qecnoise::noise::{effective_coupling, CouplingSet, EnvironmentSpec, KernelFamily};
use qecnoise::oracle::{dyson_norm_bound, multi_cycle_offdiagonal, DephasingProcess, PhaseKernel};
use qecnoise::phase::{classify_qec, rows_to_csv, scan_dz, scan_grid, GridAxis, PhaseLabel, PhasePoint};
use qecnoise::rg::{closed_form_lambda_star, integrate_flow, log_scale, BetaFunction, StepControl};
use qecnoise::{fmt_f64, Error};
use serde::Serialize;
use serde_json::{json, Value};

use crate::params::{Family, Kernel, Params};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand, ValueEnum)]
pub enum Command {
    /// Classify a (D+z, δ) or (D, z, δ) grid by the sign of D + z − 2δ.
    PhaseScan,
    /// Integrate an RG flow and compare with its closed form.
    RgFlow,
    /// Leading-order statistics of the 3-qubit phase-flip code.
    Qec3Stats,
    /// Flawless-history probability and residual decoherence versus N.
    Flawless,
    /// Brute-force Gaussian-dephasing oracle against the flawless closed form.
    OracleCompare,
    /// Norm of the error operator against its linear bound.
    DysonBound,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Self::PhaseScan => "phase-scan",
            Self::RgFlow => "rg-flow",
            Self::Qec3Stats => "qec3-stats",
            Self::Flawless => "flawless",
            Self::OracleCompare => "oracle-compare",
            Self::DysonBound => "dyson-bound",
        }
    }
}

/// Output of a command: a one-line summary plus the artifact in both formats.
pub struct Artifact {
    pub summary: String,
    pub csv: String,
    pub json: Value,
}

const MAX_ORACLE_CYCLES: u64 = 1024;
const MAX_FLAWLESS_ROWS: u64 = 1000;

fn environment(p: &Params) -> EnvironmentSpec {
    EnvironmentSpec {
        cutoff_lambda: p.cutoff.unwrap_or(10.0),
        velocity: p.velocity.unwrap_or(1.0),
        dyn_exponent: p.z.unwrap_or(1.0),
        scaling_dim: p.scaling_dim.unwrap_or(0.2),
        spatial_dim: p.spatial_dim.unwrap_or(0),
        tau0: p.tau0.unwrap_or(0.1),
        kernel: match p.kernel.unwrap_or(Kernel::Temporal) {
            Kernel::Temporal => KernelFamily::PowerLawTemporal,
            Kernel::SpaceTime => KernelFamily::PowerLawSpaceTime,
            Kernel::Ohmic => KernelFamily::OhmicSpinBoson,
        },
    }
}

fn schedule(p: &Params) -> QecSchedule {
    QecSchedule {
        delta: p.period.unwrap_or(1.0),
        n_cycles: p.cycles.unwrap_or(100),
        n_logical: p.logical.unwrap_or(1),
    }
}

fn couplings(p: &Params) -> CouplingSet {
    CouplingSet {
        lambda_x: p.lambda_x.unwrap_or(0.0),
        lambda_y: p.lambda_y.unwrap_or(0.0),
        lambda_z: p.lambda_z.unwrap_or(0.0),
    }
}

fn lambda_star(p: &Params) -> f64 {
    match p.lambda_star {
        Some(l) => l,
        None if p.lambda_x.is_some() || p.lambda_y.is_some() || p.lambda_z.is_some() => effective_coupling(&couplings(p)),
        None => 0.1,
    }
}

fn epsilon(p: &Params, env: &EnvironmentSpec, s: &QecSchedule) -> Result<f64, Error> {
    match p.epsilon {
        Some(e) => Ok(e),
        None => Ok(local_error_probability(env, lambda_star(p), s.delta)?.epsilon),
    }
}

fn beta_function(p: &Params) -> Result<BetaFunction, Error> {
    match p.family {
        Some(Family::Kondo) => BetaFunction::kondo(p.channels.unwrap_or(1)),
        Some(Family::LeadingOrder) => Ok(BetaFunction::KondoLeadingOrder),
        Some(Family::Frustrated) => Ok(BetaFunction::QuantumFrustrated),
        None => Err(Error::Validation("--family is required".into())),
    }
}

/// `(D, z, δ)` axes; `D` is `None` for a scan over the combination `D + z`.
fn phase_axes(p: &Params) -> Result<(Option<GridAxis>, GridAxis, GridAxis), Error> {
    let res = p.res.unwrap_or(101);
    let delta = GridAxis::new(p.delta_min.unwrap_or(0.0), p.delta_max.unwrap_or(2.0), res)?;
    let full = [p.d_min, p.d_max, p.z_min, p.z_max];
    if full.iter().any(Option::is_some) {
        let [Some(d0), Some(d1), Some(z0), Some(z1)] = full else {
            return Err(Error::Validation("a full D/z scan needs --d-min, --d-max, --z-min and --z-max".into()));
        };
        Ok((Some(GridAxis::new(d0, d1, res)?), GridAxis::new(z0, z1, res)?, delta))
    } else {
        let dz = GridAxis::new(p.dz_min.unwrap_or(0.0), p.dz_max.unwrap_or(4.0), res)?;
        Ok((None, dz, delta))
    }
}

/// Every violated invariant of `p` for `command`, without running anything.
pub fn validate(command: Command, p: &Params) -> Vec<String> {
    let mut diags = Vec::new();
    let mut check = |r: Result<(), Error>| {
        if let Err(e) = r {
            diags.push(e.to_string());
        }
    };
    let env = environment(p);
    let s = schedule(p);
    if p.threads == Some(0) {
        check(Err(Error::Validation("--threads must be >= 1".into())));
    }
    if let Some(l) = p.lambda_star {
        if !(l.is_finite() && l >= 0.0) {
            check(Err(Error::Validation(format!("lambda_star must be finite and >= 0, got {l}"))));
        }
    }
    check(couplings(p).validate());

    match command {
        Command::PhaseScan => check(phase_axes(p).and_then(|(d, z, delta)| {
            PhasePoint::new(d.map_or(0.0, |d| d.min), z.min, delta.min)?;
            Ok(())
        })),
        Command::RgFlow => {
            check(beta_function(p).and_then(|b| b.validate()));
            match p.lambda0 {
                None => check(Err(Error::Validation("--lambda0 is required".into()))),
                Some(l) if !(l.is_finite() && l >= 0.0) => {
                    check(Err(Error::Validation(format!("lambda0 must be finite and >= 0, got {l}"))))
                }
                Some(_) => {}
            }
            match p.ell {
                Some(ell) if !(ell.is_finite() && ell >= 0.0) => {
                    check(Err(Error::Validation(format!("ell must be finite and >= 0, got {ell}"))))
                }
                Some(_) => {}
                None => check(log_scale(env.cutoff_lambda, s.delta).map(|_| ())),
            }
        }
        Command::Qec3Stats => {
            match p.epsilon {
                None => check(Err(Error::Validation("--epsilon is required".into()))),
                Some(e) => check(cycle_stats(e).map(|_| ())),
            }
            check(s.validate());
        }
        Command::Flawless | Command::OracleCompare => {
            check(env.validate());
            check(s.validate());
            check(s.check_cutoff(&env));
            if let Some(e) = p.epsilon {
                if !(0.0..1.0).contains(&e) {
                    check(Err(Error::Validation(format!("epsilon must lie in [0, 1), got {e}"))));
                }
            }
            if command == Command::OracleCompare {
                if p.trials.unwrap_or(100_000) < 2 {
                    check(Err(Error::Validation("--trials must be >= 2".into())));
                }
                if s.n_cycles > MAX_ORACLE_CYCLES {
                    check(Err(Error::Validation(format!(
                        "oracle-compare supports at most {MAX_ORACLE_CYCLES} cycles, got {}",
                        s.n_cycles
                    ))));
                }
                if env.kernel == KernelFamily::OhmicSpinBoson {
                    check(Err(Error::Validation("oracle-compare needs a power-law kernel".into())));
                }
            }
        }
        Command::DysonBound => {
            let lv = p.lambda_v.unwrap_or(1.0);
            if !(lv.is_finite() && lv > 0.0) {
                check(Err(Error::Validation(format!("lambda_v must be finite and > 0, got {lv}"))));
            }
            if let Some(t) = p.t_max {
                if !(t.is_finite() && t >= 0.0) {
                    check(Err(Error::Validation(format!("t_max must be finite and >= 0, got {t}"))));
                }
            }
            if p.points == Some(0) {
                check(Err(Error::Validation("--points must be >= 1".into())));
            }
        }
    }
    diags
}

pub fn run(command: Command, p: &Params) -> Result<Artifact, Error> {
    match command {
        Command::PhaseScan => phase_scan(p),
        Command::RgFlow => rg_flow(p),
        Command::Qec3Stats => qec3_stats(p),
        Command::Flawless => flawless(p),
        Command::OracleCompare => oracle_compare(p),
        Command::DysonBound => dyson_bound(p),
    }
}

fn csv_table(header: &str, rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut out = String::from(header);
    out.push('\n');
    for r in rows {
        out.push_str(&r.join(","));
        out.push('\n');
    }
    out
}

fn to_json<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("artifact serialises")
}

fn phase_scan(p: &Params) -> Result<Artifact, Error> {
    let rows = match phase_axes(p)? {
        (None, dz, delta) => scan_dz(&dz, &delta)?,
        (Some(d), z, delta) => scan_grid(&d, &z, &delta)?,
    };
    let count = |l: PhaseLabel| rows.iter().filter(|r| r.label == l).count();
    let summary = format!(
        "phase-scan: rows={} correlation_dominated={} marginal={} stochastic_threshold_holds={} boundary: delta=(D+z)/2",
        rows.len(),
        count(PhaseLabel::CorrelationDominated),
        count(PhaseLabel::Marginal),
        count(PhaseLabel::StochasticThresholdHolds),
    );
    Ok(Artifact {
        summary,
        csv: rows_to_csv(&rows),
        json: json!({ "rows": to_json(&rows) }),
    })
}

fn rg_flow(p: &Params) -> Result<Artifact, Error> {
    let spec = beta_function(p)?;
    let lambda0 = p.lambda0.ok_or_else(|| Error::Validation("--lambda0 is required".into()))?;
    let ell = match p.ell {
        Some(ell) => ell,
        None => log_scale(p.cutoff.unwrap_or(10.0), p.period.unwrap_or(1.0))?,
    };
    let traj = integrate_flow(&spec, lambda0, ell, StepControl::default())?;
    let closed = match closed_form_lambda_star(&spec, lambda0, ell) {
        Ok(c) => Some(c),
        Err(Error::StrongCoupling(_)) => None,
        Err(e) => return Err(e),
    };
    let closed_text = closed.map_or("pole".to_string(), |c| format!("{:.8}", c.lambda_star));
    let summary = format!(
        "rg-flow: family={} lambda0={lambda0} ell={ell} lambda_star={:.8} closed_form={closed_text} diverged={} samples={}",
        p.family.map_or("", Family::name),
        traj.lambda_star,
        traj.diverged,
        traj.samples.len(),
    );
    let json = json!({
        "lambda0": lambda0,
        "ell": ell,
        "lambda_star": traj.lambda_star,
        "diverged": traj.diverged,
        "closed_form": closed.map(|c| c.lambda_star),
        "closed_form_valid": closed.map(|c| c.valid),
        "samples": to_json(&traj.samples),
    });
    Ok(Artifact {
        summary,
        csv: traj.to_csv(),
        json,
    })
}

fn qec3_stats(p: &Params) -> Result<Artifact, Error> {
    let eps = p.epsilon.ok_or_else(|| Error::Validation("--epsilon is required".into()))?;
    let n = p.cycles.unwrap_or(100);
    let state = LogicalState::plus();
    let stats = cycle_stats(eps)?;
    let mean = mean_history_offdiagonal(n, &state, eps)?;
    let entropy = entropy_asymptotics(n, eps, &state)?;
    let bare = state.coherence();
    let mut rows = Vec::with_capacity(n as usize + 1);
    let mut table = Vec::with_capacity(n as usize + 1);
    for m in 0..=n {
        let prob = history_probability(n, m, eps)?;
        let factor = (residual_offdiagonal(n, m, &state, eps)? / bare).re;
        table.push(vec![m.to_string(), fmt_f64(prob), fmt_f64(factor)]);
        rows.push(json!({ "m": m, "probability": prob, "coherence_factor": factor }));
    }
    let exp_factor = (mean.exponential / bare).re;
    let summary = format!(
        "qec3-stats: epsilon={eps} cycles={n} p1={} p0={} coherence_factor_exp(-6N eps^2)={exp_factor:.8} product_form={:.8}",
        stats.p1,
        stats.p0,
        (mean.product / bare).re,
    );
    let json = json!({
        "epsilon": eps,
        "cycles": n,
        "p0": stats.p0,
        "p1": stats.p1,
        "dephasing_no_error": stats.dephasing_no_error,
        "dephasing_error": stats.dephasing_error,
        "mean_errors": mean.mean_errors,
        "coherence_factor": exp_factor,
        "coherence_factor_product": (mean.product / bare).re,
        "relative_gap": mean.relative_gap,
        "entropy_small_n": entropy.small_n,
        "entropy_large_n": entropy.large_n,
        "histories": rows,
    });
    Ok(Artifact {
        summary,
        csv: csv_table("m,probability,coherence_factor", table),
        json,
    })
}

/// Every `n` up to `n_max` when short, otherwise log-spaced integers ending at `n_max`.
fn cycle_grid(n_max: u64) -> Vec<u64> {
    if n_max <= MAX_FLAWLESS_ROWS {
        return (1..=n_max).collect();
    }
    let mut out: Vec<u64> = (0..MAX_FLAWLESS_ROWS)
        .map(|i| (n_max as f64).powf(i as f64 / (MAX_FLAWLESS_ROWS - 1) as f64).round() as u64)
        .collect();
    out.dedup();
    *out.last_mut().expect("non-empty grid") = n_max;
    out
}

fn flawless(p: &Params) -> Result<Artifact, Error> {
    let env = environment(p);
    let s = schedule(p);
    s.check_cutoff(&env)?;
    let lambda = lambda_star(p);
    let eps = epsilon(p, &env, &s)?;
    let mut table = Vec::new();
    let mut rows = Vec::new();
    for n in cycle_grid(s.n_cycles) {
        let f = flawless_probability(&env, &QecSchedule { n_cycles: n, ..s }, lambda, eps)?;
        table.push(vec![
            n.to_string(),
            fmt_f64(f.value),
            fmt_f64(f.correction),
            fmt_f64(f.excess),
            fmt_f64((-(n as f64) * eps).exp()),
            f.beyond_pole.to_string(),
        ]);
        rows.push(json!({ "n": n, "result": to_json(&f) }));
    }
    let last = flawless_probability(&env, &s, lambda, eps)?;
    let residual = flawless_residual_decoherence(&env, &s, lambda, eps, &LogicalState::plus())?;
    let breakdown = breakdown_cycles(lambda, s.delta, eps)?;
    let pole = match last.branch {
        FlawlessBranch::Marginal => Some(marginal_pole_cycles(lambda, s.delta, eps)?),
        FlawlessBranch::Generic => None,
    };
    let branch = match last.branch {
        FlawlessBranch::Generic => "generic",
        FlawlessBranch::Marginal => "marginal",
    };
    let summary = format!(
        "flawless: N={} epsilon={eps:.6e} lambda_star={lambda} branch={branch} probability={:.8e} correction={:.8} residual_bracket={:.8} breakdown_cycles={breakdown:.4e}{}{}",
        s.n_cycles,
        last.value,
        last.correction,
        residual.bracket,
        pole.map_or(String::new(), |p| format!(" pole_cycles={p:.4e}")),
        if last.beyond_pole { " beyond_pole" } else { "" },
    );
    let json = json!({
        "epsilon": eps,
        "lambda_star": lambda,
        "final": to_json(&last),
        "residual_decoherence": {
            "offdiagonal_re": residual.offdiagonal.re,
            "offdiagonal_im": residual.offdiagonal.im,
            "bracket": residual.bracket,
            "stochastic_term": residual.stochastic_term,
            "correlation_term": residual.correlation_term,
            "correlation_integral": residual.correlation_integral,
            "warnings": residual.warnings,
        },
        "breakdown_cycles": breakdown,
        "pole_cycles": pole,
        "rows": rows,
    });
    Ok(Artifact {
        summary,
        csv: csv_table("n,probability,correction,excess,stochastic,beyond_pole", table),
        json,
    })
}

fn oracle_compare(p: &Params) -> Result<Artifact, Error> {
    let env = environment(p);
    let s = schedule(p);
    s.check_cutoff(&env)?;
    let lambda = lambda_star(p);
    let trials = p.trials.unwrap_or(100_000);
    let n = s.n_cycles as usize;
    let process = DephasingProcess::new(PhaseKernel::Correlator { env, lambda }, s.delta, p.seed.unwrap_or(0))?;
    let decay = multi_cycle_offdiagonal(&process, &LogicalState::plus(), n, trials)?;
    let eps_quad = local_error_probability(&env, lambda, s.delta)?.epsilon;
    let eps = p.epsilon.unwrap_or(eps_quad);

    // Three physical qubits, each with the single-qubit correction.
    let closed = |k: u64| -> Option<f64> {
        let f = flawless_probability(&env, &QecSchedule { n_cycles: k, ..s }, lambda, eps).ok()?;
        Some((-3.0 * k as f64 * eps).exp() * f.correction.powi(3))
    };
    let per_cycle = (1.0 - decay.epsilon).powi(3) + decay.epsilon.powi(3);
    let mut table = Vec::with_capacity(n);
    let mut rows = Vec::with_capacity(n);
    for k in 1..=n {
        let o = decay.probability[k - 1];
        let c = decay.coherence[k - 1];
        let cf = closed(k as u64);
        let stochastic = per_cycle.powi(k as i32);
        table.push(vec![
            k.to_string(),
            fmt_f64(o.mean),
            fmt_f64(o.std_err),
            cf.map_or("nan".into(), fmt_f64),
            fmt_f64(stochastic),
            fmt_f64(c.mean),
            fmt_f64(c.std_err),
        ]);
        rows.push(json!({
            "n": k, "oracle": o.mean, "oracle_std_err": o.std_err, "closed_form": cf,
            "stochastic": stochastic, "coherence": c.mean, "coherence_std_err": c.std_err,
        }));
    }
    let class = classify_qec(&PhasePoint::new(env.spatial_dim as f64, env.dyn_exponent, env.scaling_dim)?);
    let growth = if n >= 4 { decay.growth_exponent(n / 4).ok() } else { None };
    let mut summary = String::new();
    let _ = write!(
        summary,
        "oracle-compare: N={n} trials={trials} epsilon_oracle={:.6e} epsilon_quadrature={eps_quad:.6e} class={}",
        decay.epsilon,
        class.label.as_str(),
    );
    match growth {
        Some(g) => {
            let _ = write!(summary, " growth_exponent={:.4}+-{:.4} (N={})", g.mean, g.std_err, n / 4);
        }
        None => summary.push_str(" growth_exponent=n/a"),
    }
    let json = json!({
        "trials": trials,
        "epsilon_oracle": decay.epsilon,
        "epsilon_quadrature": eps_quad,
        "classification": to_json(&class),
        "growth_exponent": growth.map(|g| to_json(&g)),
        "rows": rows,
    });
    Ok(Artifact {
        summary,
        csv: csv_table("n,oracle,oracle_std_err,closed_form,stochastic,coherence,coherence_std_err", table),
        json,
    })
}

fn dyson_bound(p: &Params) -> Result<Artifact, Error> {
    let lv = p.lambda_v.unwrap_or(1.0);
    let t_max = p.t_max.unwrap_or(20.0 / lv);
    let points = p.points.unwrap_or(1001);
    let grid: Vec<f64> = if points == 1 {
        vec![t_max]
    } else {
        (0..points).map(|i| t_max * i as f64 / (points - 1) as f64).collect()
    };
    let rows = dyson_norm_bound(lv, &grid)?;
    let violations = rows.iter().filter(|r| r.exact_norm > r.bound).count();
    let ratio = |r: &qecnoise::oracle::DysonRow| if r.bound > 0.0 { r.exact_norm / r.bound } else { 1.0 };
    let max_ratio = rows.iter().map(ratio).fold(0.0, f64::max);
    let summary = format!("dyson-bound: points={} lambda_v={lv} t_max={t_max} violations={violations} max_ratio={max_ratio:.12}", rows.len());
    let table = rows
        .iter()
        .map(|r| vec![fmt_f64(r.t), fmt_f64(r.exact_norm), fmt_f64(r.bound), fmt_f64(ratio(r))]);
    Ok(Artifact {
        summary,
        csv: csv_table("t,exact_norm,bound,ratio", table),
        json: json!({ "violations": violations, "max_ratio": max_ratio, "rows": to_json(&rows) }),
    })
}
