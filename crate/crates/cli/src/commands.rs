use serde::Serialize;
use serde_json::json;

use sixstate_core::collective::{bb84_curves, ie_curve, pe_curve, verify_bruss, CollectiveParams};
use sixstate_core::e91::{
    collective_e91_mc, collective_e91_report, hv_full_simulation, hv_sbar, singlet_correlation_mc,
    singlet_correlation_quantum, CorrelationReport, DirectionDistribution, HvMode, SphereDensity, UnitVector3,
};
use sixstate_core::intercept_resend::{ir_scan, solve_symmetric, ScanCell, ScanCluster};
use sixstate_core::protocol::{attack_registry, run_session, AttackParams, Scheme, SchemeConfig, SessionStats};
use sixstate_core::quantum::Axis;

use crate::args::*;
use crate::output::{emit, fmt_sig12, json_with_manifest, CliError, CliResult, RunManifest};

pub fn curves(args: &CurvesArgs, stamp: bool) -> CliResult {
    let (lo, hi) = (args.d_min, args.d_max);
    if !(lo.is_finite() && hi.is_finite() && 0.0 <= lo && lo < hi && hi <= 0.5) {
        return Err(CliError::Usage(format!("need 0 <= d-min < d-max <= 0.5, got [{lo}, {hi}]")));
    }
    if args.steps < 2 {
        return Err(CliError::Usage("steps must be at least 2".into()));
    }
    let manifest = RunManifest::new("curves", args.seed.seed, stamp)
        .param("d_min", lo)
        .param("d_max", hi)
        .param("steps", args.steps);
    let mut text = manifest.csv_header();
    text.push_str("d,pe_six,pe_bb84,ie_six,ie_bb84,qab\n");
    let last = args.steps - 1;
    for k in 0..args.steps {
        let d = if k == last { hi } else { lo + (hi - lo) * k as f64 / last as f64 };
        let bb84 = bb84_curves(d)?;
        let row = [d, pe_curve(d)?, bb84.p_e, ie_curve(d)?, bb84.i_e, bb84.q_ab];
        text.push_str(&row.map(fmt_sig12).join(","));
        text.push('\n');
    }
    emit(&text, args.out.as_deref())
}

#[derive(Serialize)]
struct SolutionRow {
    alpha: f64,
    beta: f64,
    p: f64,
    q: f64,
    optimal: bool,
}

pub fn ir_solve() -> CliResult {
    let rows: Vec<SolutionRow> = solve_symmetric()
        .into_iter()
        .map(|s| SolutionRow { alpha: s.alpha, beta: s.beta, p: s.p_common, q: s.q_common, optimal: s.optimal })
        .collect();
    emit(&(serde_json::to_string_pretty(&rows)? + "\n"), None)
}

#[derive(Serialize)]
struct ScanSummary {
    alpha_steps: usize,
    beta_steps: usize,
    tolerance: f64,
    candidates: usize,
    max_min_p: f64,
    clusters: Vec<ScanCluster>,
    #[serde(skip_serializing_if = "Option::is_none")]
    cells: Option<Vec<ScanCell>>,
}

pub fn ir_scan_cmd(args: &ScanArgs, stamp: bool) -> CliResult {
    let scan = ir_scan(args.alpha_steps, args.beta_steps)?;
    let manifest = RunManifest::new("ir scan", args.seed.seed, stamp)
        .param("alpha_steps", args.alpha_steps)
        .param("beta_steps", args.beta_steps);
    let summary = ScanSummary {
        alpha_steps: scan.alpha_steps,
        beta_steps: scan.beta_steps,
        tolerance: scan.tolerance,
        candidates: scan.cells.iter().filter(|c| c.candidate).count(),
        max_min_p: scan.max_min_p(),
        clusters: scan.clusters(),
        cells: args.cells.then(|| scan.cells.clone()),
    };
    emit(&json_with_manifest(&manifest, summary)?, None)
}

pub fn simulate(args: &SimulateArgs, stamp: bool) -> CliResult {
    let scheme = match args.scheme {
        SchemeArg::SixState => Scheme::SixState,
        SchemeArg::Bb84 => Scheme::Bb84,
    };
    let p = &args.params;
    let params =
        AttackParams { alpha: p.alpha, beta: p.beta, theta: p.theta, disturbance: p.disturbance, fidelity: p.fidelity };
    let name = args.attack.registry_name();
    let attack = attack_registry(name, &params)?;
    let stats = run_session(&SchemeConfig::new(scheme), Some(attack.as_ref()), args.rounds.rounds, args.seed.seed)?;
    let manifest = RunManifest::new("simulate", args.seed.seed, stamp)
        .param("scheme", scheme)
        .param("attack", name)
        .param("attack_params", params)
        .param("rounds", args.rounds.rounds);
    let text = if args.json {
        json_with_manifest(&manifest, json!({ "stats": stats }))?
    } else {
        session_text(&manifest, &stats)
    };
    emit(&text, None)
}

fn session_text(manifest: &RunManifest, stats: &SessionStats) -> String {
    let mut out = manifest.csv_header();
    let rate = |label: &str, r: &sixstate_core::stats::Rate| {
        format!("{label:<14}{:.6} ± {:.6}  ({}/{})\n", r.value, r.standard_error, r.successes, r.trials)
    };
    out += &format!("scheme        {}\nattack        {}\n", stats.scheme, stats.attack);
    out += &rate("sift rate", &stats.sift_rate);
    out += &rate("qber", &stats.qber);
    out += &rate("q_ab", &stats.q_ab);
    match &stats.eve_accuracy {
        Some(r) => out += &rate("eve accuracy", r),
        None => out += "eve accuracy  n/a\n",
    }
    out
}

pub fn verify(args: &VerifyArgs) -> CliResult {
    let params = match (args.theta, args.disturbance, args.fidelity) {
        (Some(t), None, None) => CollectiveParams::from_theta(t)?,
        (None, Some(d), None) => CollectiveParams::from_disturbance(d)?,
        (None, None, Some(f)) => CollectiveParams::from_fidelity(f)?,
        _ => return Err(CliError::Usage("give exactly one of --theta, --disturbance, --fidelity".into())),
    };
    let tol = args.tolerance;
    if !(tol.is_finite() && tol >= 0.0) {
        return Err(CliError::Usage(format!("tolerance must be a non-negative number, got {tol}")));
    }
    let report = verify_bruss(&params);
    let pass = report.passes(tol);
    let text = if args.json {
        serde_json::to_string_pretty(&json!({ "report": report, "tolerance": tol, "pass": pass }))? + "\n"
    } else {
        let mut out = format!("theta = {}  F = {}  D = {}\n", params.theta, params.fidelity, params.disturbance);
        for fam in &report.families {
            out += &format!("{:<52} {:>3} checks  max residual {:.3e}\n", fam.name, fam.checks, fam.max_residual);
        }
        out += &format!(
            "{} (max residual {:.3e}, tolerance {tol:e})\n",
            if pass { "PASS" } else { "FAIL" },
            report.max_residual()
        );
        out
    };
    emit(&text, None)?;
    if pass {
        Ok(())
    } else {
        Err(CliError::Invariant(format!("max residual {:e} >= {tol:e}", report.max_residual())))
    }
}

#[derive(Serialize)]
struct E91Output {
    attack: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    distribution: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    disturbance: Option<f64>,
    exact: CorrelationReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    closed_form_s: Option<f64>,
    monte_carlo: CorrelationReport,
}

fn pair_distribution(d: PairDist) -> (&'static str, DirectionDistribution) {
    match d {
        PairDist::DiracZ => ("dirac-z", DirectionDistribution::DiracPair(UnitVector3::e_z(), UnitVector3::e_z())),
        PairDist::ProductUniform => ("product-uniform", DirectionDistribution::product_uniform()),
        PairDist::ProductAxes => {
            ("product-axes", DirectionDistribution::Product(SphereDensity::Axes, SphereDensity::Axes))
        }
        PairDist::AlignedUniform => ("aligned-uniform", DirectionDistribution::Aligned(SphereDensity::Uniform)),
    }
}

pub fn e91(args: &E91Args, stamp: bool) -> CliResult {
    let (rounds, seed) = (args.rounds.rounds, args.seed.seed);
    let unexpected = |flag: &str| CliError::Usage(format!("--{flag} does not apply to this attack"));
    if args.dist.is_some() && args.attack != E91Attack::IrBoth {
        return Err(unexpected("dist"));
    }
    if args.bob_density.is_some() && args.attack != E91Attack::IrBob {
        return Err(unexpected("bob-density"));
    }
    if args.disturbance.is_some() && args.attack != E91Attack::Collective {
        return Err(unexpected("disturbance"));
    }
    let mut manifest = RunManifest::new("e91", seed, stamp).param("rounds", rounds);
    let output = match args.attack {
        E91Attack::None => E91Output {
            attack: "none",
            distribution: None,
            disturbance: None,
            exact: singlet_correlation_quantum(),
            closed_form_s: None,
            monte_carlo: singlet_correlation_mc(rounds, seed)?,
        },
        E91Attack::IrBoth | E91Attack::IrBob => {
            let (label, dist) = if args.attack == E91Attack::IrBoth {
                pair_distribution(args.dist.unwrap_or(PairDist::ProductUniform))
            } else {
                let density = match args.bob_density.unwrap_or(BobDensity::Uniform) {
                    BobDensity::Uniform => ("uniform", SphereDensity::Uniform),
                    BobDensity::Axes => ("axes", SphereDensity::Axes),
                    BobDensity::Z => ("z", SphereDensity::Fixed(UnitVector3::axis(Axis::Z))),
                };
                (density.0, DirectionDistribution::BobOnly(density.1))
            };
            E91Output {
                attack: if args.attack == E91Attack::IrBoth { "ir-both" } else { "ir-bob" },
                distribution: Some(label.to_string()),
                disturbance: None,
                exact: hv_sbar(&dist, HvMode::Exact)?,
                closed_form_s: None,
                monte_carlo: hv_full_simulation(&dist, rounds, seed)?,
            }
        }
        E91Attack::Collective => {
            let d = args
                .disturbance
                .ok_or_else(|| CliError::Usage("--disturbance is required for the collective attack".into()))?;
            E91Output {
                attack: "collective",
                distribution: None,
                disturbance: Some(d),
                exact: collective_e91_report(d)?,
                closed_form_s: Some(3.0 * (1.0 - 2.0 * d)),
                monte_carlo: collective_e91_mc(d, rounds, seed)?,
            }
        }
    };
    manifest = manifest.param("attack", output.attack);
    if let Some(dist) = &output.distribution {
        manifest = manifest.param("distribution", dist);
    }
    if let Some(d) = output.disturbance {
        manifest = manifest.param("disturbance", d);
    }
    emit(&json_with_manifest(&manifest, &output)?, None)
}
