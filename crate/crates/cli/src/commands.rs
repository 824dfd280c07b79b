use std::fmt::Write as _;
use std::path::Path;
use std::process::ExitCode;

use anyhow::{Context, Result};
use serde::Serialize;

use okg_core::lattice::format::{self, atomic_write, LatticeData};
use okg_core::lattice::{inverse, GridSpec, Spectrum};
use okg_core::propagator::{
    critical_index, decay_scan, strichartz_exponents, strichartz_sample, theorem_exponent, FineGridPolicy,
    PropagatorSpec, TheoremCase,
};
use okg_core::solver::{
    gen_concentrating, gen_gaussian_octant, gen_sokhotski_plemelj, picard_solve, scale_data, scale_solution,
    select_lambda, Direction, NonlinearScaling, NonlinearityKind, NonlinearitySpec, SolverConfig,
};
use okg_core::spaces::{besov_norm, bessel_norm, e_norm, triebel_norm, Exponent, IndexSet, NormSpec};
use okg_core::verify::{measured_constants_dump, run_suite, suite_ids, Tier};

use crate::config::ConfigError;
use crate::{
    DataArgs, DecayArgs, ExponentArgs, GenDataArgs, NonlinearityArg, NormArgs, NormKind, ScalingArg, SolveArgs,
    StrichartzArgs, Verb, VerifyArgs,
};

pub const REPORT_VERSION: u32 = 1;

#[derive(Serialize)]
struct Report<'a, C: Serialize, R: Serialize> {
    format_version: u32,
    verb: &'a str,
    config: &'a C,
    result: R,
}

fn write_report<C: Serialize, R: Serialize>(path: &Path, verb: &str, config: &C, result: R) -> Result<()> {
    let report = Report {
        format_version: REPORT_VERSION,
        verb,
        config,
        result,
    };
    let mut bytes = serde_json::to_vec_pretty(&report)?;
    bytes.push(b'\n');
    atomic_write(path, &bytes).with_context(|| format!("writing {}", path.display()))
}

/// Usage-type failures exit with 2, everything else with 1.
pub fn exit_code(e: &anyhow::Error) -> u8 {
    if e.downcast_ref::<ConfigError>().is_some() {
        return 2;
    }
    match e.downcast_ref::<okg_core::Error>() {
        Some(
            okg_core::Error::InvalidGrid(_)
            | okg_core::Error::InvalidParameter(_)
            | okg_core::Error::Inadmissible(_)
            | okg_core::Error::UnknownSuite(_),
        ) => 2,
        _ => 1,
    }
}

fn usage(msg: String) -> anyhow::Error {
    anyhow::Error::new(okg_core::Error::InvalidParameter(msg))
}

pub fn run(verb: Verb) -> Result<ExitCode> {
    match verb {
        Verb::Solve(a) => solve(&a),
        Verb::Norm(a) => norm(&a),
        Verb::DecayScan(a) => decay(&a),
        Verb::StrichartzSample(a) => strichartz(&a),
        Verb::Exponents(a) => exponents(&a),
        Verb::Verify(a) => verify(&a),
        Verb::GenData(a) => gen_data(&a, a.s),
    }
}

fn parse_list(s: &str, what: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| usage(format!("bad {what} component {t:?}"))))
        .collect()
}

fn build_data(a: &DataArgs, s: f64) -> Result<Spectrum> {
    if let Some(path) = a.data.strip_prefix("file:") {
        return Ok(format::read_spectrum(Path::new(path))?);
    }
    let grid = GridSpec::new(a.dim, a.n, a.length)?;
    let spectrum = match a.data.as_str() {
        "gaussian" => {
            let mut center = parse_list(&a.center, "center")?;
            if center.len() == 1 {
                center = vec![center[0]; a.dim];
            }
            gen_gaussian_octant(&grid, &center, a.width, a.amplitude, None)?
        }
        "sp" => gen_sokhotski_plemelj(&grid, a.k, a.eps, None, s)?.spectrum,
        "sp-series" => gen_sokhotski_plemelj(&grid, a.k, a.eps, Some(a.series_rate), s)?.spectrum,
        "concentrating" => gen_concentrating(&grid, a.k)?,
        other => return Err(usage(format!("unknown data family {other:?}"))),
    };
    Ok(spectrum)
}

fn nonlinearity(a: &SolveArgs) -> Result<NonlinearitySpec> {
    let kind = match a.nonlinearity {
        NonlinearityArg::Power => NonlinearityKind::Power { alpha: a.alpha },
        NonlinearityArg::Sinh => NonlinearityKind::SinhMinusU,
        NonlinearityArg::Sin => NonlinearityKind::SinMinusU,
        NonlinearityArg::ExpSquare => NonlinearityKind::ExpSquareMinusU,
    };
    Ok(NonlinearitySpec::new(kind, a.sign, a.taylor_terms)?)
}

#[derive(Serialize)]
struct SolveResult {
    lambda: f64,
    lambda_choice: Option<okg_core::solver::LambdaChoice>,
    scaled_length: f64,
    coefficient: f64,
    critical_index: Option<f64>,
    /// `(p or r, θ)` of the existence theorem, when defined.
    theorem_exponent: Option<(f64, f64)>,
    output_variables: &'static str,
    iterations: okg_core::solver::IterationReport,
}

fn solve(a: &SolveArgs) -> Result<ExitCode> {
    let nl = nonlinearity(a)?;
    let alpha = match a.nonlinearity {
        NonlinearityArg::Power => Some(a.alpha),
        _ => None,
    };
    let u0 = build_data(&a.data, a.s)?;
    let u1 = Spectrum::zeros(*u0.grid());
    let (lambda, choice) = if a.auto_lambda {
        let grid: Vec<f64> = (0..=12).map(|k| 2f64.powi(k)).collect();
        let c = select_lambda(&u0, &u1, a.sigma, a.s, alpha, None, a.delta, &grid)?;
        (c.lambda, Some(c))
    } else {
        (a.lambda, None)
    };
    let (v0, v1) = scale_data(&u0, &u1, lambda, alpha, Direction::Forward)?;
    let mut cfg = SolverConfig::new(lambda, a.horizon, a.nt);
    cfg.picard_tol = a.tol;
    cfg.max_iter = a.max_iter;
    cfg.band = a.band;
    cfg.monitor = (a.sigma, a.s);
    cfg.scaling = match (a.scaling, alpha) {
        (ScalingArg::Unit, _) | (ScalingArg::Auto, Some(_)) => NonlinearScaling::Unit,
        (ScalingArg::MassSquared, _) | (ScalingArg::Auto, None) => NonlinearScaling::MassSquared,
    };
    let (v, rep) = picard_solve(&v0, &v1, &nl, &cfg)?;
    let series = if a.map_back {
        scale_solution(&v, lambda, alpha, Direction::Back)?
    } else {
        v
    };
    format::write(&a.out, &LatticeData::Series(series)).with_context(|| format!("writing {}", a.out.display()))?;
    let d = u0.grid().dim();
    let converged = rep.converged;
    println!(
        "solve: λ = {lambda}, {} iterations, converged = {converged}, residual {:.3e}, contraction {}",
        rep.iterations_used,
        rep.final_residual,
        rep.contraction_ratio.map_or("n/a".to_string(), |c| format!("{c:.3e}"))
    );
    let result = SolveResult {
        lambda,
        lambda_choice: choice,
        scaled_length: v0.grid().length(),
        coefficient: cfg.coefficient(),
        critical_index: alpha.and_then(|al| critical_index(d, f64::from(al)).ok()),
        theorem_exponent: match alpha {
            Some(al) => theorem_exponent(d, TheoremCase::Power { alpha: f64::from(al) }).ok(),
            None => theorem_exponent(d, TheoremCase::Exponential).ok(),
        },
        output_variables: if a.map_back { "unscaled" } else { "scaled" },
        iterations: rep,
    };
    write_report(&a.report, "solve", a, result)?;
    Ok(if converged { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn parse_set(s: &str, lambda: Option<f64>) -> Result<IndexSet> {
    let (name, value) = match s.split_once(':') {
        Some((n, v)) => (n, Some(v.parse::<f64>().map_err(|_| usage(format!("bad λ in set {s:?}")))?)),
        None => (s, lambda),
    };
    let need = || value.ok_or_else(|| usage(format!("set {name:?} needs a λ")));
    Ok(match name {
        "all" => IndexSet::All,
        "zlambda" => IndexSet::zlambda(need()?)?,
        "zlambda-c" => IndexSet::zlambda_c(need()?)?,
        _ => return Err(usage(format!("unknown index set {s:?}"))),
    })
}

fn norm(a: &NormArgs) -> Result<ExitCode> {
    let f = format::read_spectrum(&a.input)?;
    let parts: Vec<&str> = a.spec.split(',').map(str::trim).collect();
    let [sigma, s, p, q] = parts[..] else {
        return Err(usage(format!("--spec needs σ,s,p,q, got {:?}", a.spec)));
    };
    let real = |t: &str| t.parse::<f64>().map_err(|_| usage(format!("bad number {t:?} in --spec")));
    let spec = NormSpec::new(real(sigma)?, real(s)?, p.parse::<Exponent>()?, q.parse::<Exponent>()?)?;
    let set = parse_set(&a.set, None)?;
    let value = match a.kind {
        NormKind::Besov => besov_norm(&f, &spec, set),
        NormKind::Triebel => triebel_norm(&f, &spec),
        NormKind::Bessel => bessel_norm(&f, spec.sigma, spec.s, spec.p),
        NormKind::E => e_norm(&f, spec.sigma, spec.s),
    };
    let kind = serde_json::to_value(a.kind)?;
    let kind = kind.as_str().unwrap_or("?");
    println!("{kind} norm ({}) over {}: {value:e}", a.spec, a.set);
    if let Some(out) = &a.out {
        let text = format!(
            "input,kind,sigma,s,p,q,set,value\n{},{kind},{},{},{},{},{},{value:e}\n",
            a.input.display(),
            spec.sigma,
            spec.s,
            spec.p,
            spec.q,
            a.set
        );
        atomic_write(out, text.as_bytes())?;
    }
    Ok(ExitCode::SUCCESS)
}

fn decay(a: &DecayArgs) -> Result<ExitCode> {
    if !(a.t_min > 0.0 && a.t_max > a.t_min && a.times >= 2) {
        return Err(usage("need 0 < t_min < t_max and at least two times".into()));
    }
    let times: Vec<f64> = (0..a.times)
        .map(|i| a.t_min * (a.t_max / a.t_min).powf(i as f64 / (a.times - 1) as f64))
        .collect();
    let auto = FineGridPolicy::auto(a.d, a.j, a.t_max);
    let policy = FineGridPolicy {
        length: a.length.unwrap_or(auto.length),
        n: a.n.unwrap_or(auto.n),
    };
    let r = decay_scan(a.d, a.lambda, a.j, &times, policy)?;
    let regime = format!("{:?}", r.regime).to_lowercase();
    let mut text = String::from("d,lambda,j,regime,t,sup_norm\n");
    for (t, s) in r.times.iter().zip(&r.sup_norms) {
        writeln!(text, "{},{},{},{regime},{t},{s:e}", a.d, a.lambda, a.j)?;
    }
    atomic_write(&a.out, text.as_bytes())?;
    println!(
        "decay-scan: slope {:.4} ({regime} regime, reference [{}, {}]), torus L = {} n = {}, wrap fraction {:.2e}",
        r.slope, r.reference.0, r.reference.1, r.length, r.n, r.wrap_fraction
    );
    if let Some(path) = &a.report {
        write_report(path, "decay-scan", a, &r)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn strichartz(a: &StrichartzArgs) -> Result<ExitCode> {
    let u0 = match &a.input {
        Some(p) => format::read_spectrum(p)?,
        None => gen_gaussian_octant(&GridSpec::new(1, a.n, a.length)?, &[a.center], a.width, 1.0, None)?,
    };
    let d = u0.grid().dim();
    let table = strichartz_exponents(d, a.p.parse::<Exponent>()?, a.theta)?;
    let spec = PropagatorSpec::new(a.lambda)?;
    let set = parse_set(&a.set, Some(a.lambda))?;
    let r = strichartz_sample(&[u0], &spec, &table, set, a.sigma, a.s, a.horizon, a.nt)?;
    let text = format!(
        "d,lambda,p,theta,delta,gamma,sigma,set,constant,wrap_fraction\n{d},{},{},{},{},{},{},{},{:e},{:e}\n",
        a.lambda, table.p, a.theta, table.delta, table.gamma, table.sigma, a.set, r.constant, r.wrap_fraction
    );
    atomic_write(&a.out, text.as_bytes())?;
    println!(
        "strichartz-sample: constant {:.4e} (γ = {}, δ = {}, σ = {}), wrap fraction {:.2e}",
        r.constant, table.gamma, table.delta, table.sigma, r.wrap_fraction
    );
    Ok(ExitCode::SUCCESS)
}

fn exponents(a: &ExponentArgs) -> Result<ExitCode> {
    let t = strichartz_exponents(a.d, a.p.parse::<Exponent>()?, a.theta)?;
    println!(
        "δ={} γ={} σ={} γ1={} σ1={} γ0={} σ0={} admissible={}",
        t.delta, t.gamma, t.sigma, t.gamma1, t.sigma1, t.gamma0, t.sigma0, t.admissible
    );
    let theorem = match a.alpha {
        Some(alpha) => {
            let (p, theta) = theorem_exponent(a.d, TheoremCase::Power { alpha })?;
            println!(
                "u^(1+α) with α={alpha}: critical index {}, theorem exponent {p} at θ={theta}",
                critical_index(a.d, alpha)?
            );
            Some((p, theta))
        }
        None => None,
    };
    if let Some(out) = &a.out {
        let mut text = String::from("d,p,theta,delta,gamma,sigma,gamma1,sigma1,gamma0,sigma0,admissible\n");
        writeln!(
            text,
            "{},{},{},{},{},{},{},{},{},{},{}",
            t.d, t.p, t.theta, t.delta, t.gamma, t.sigma, t.gamma1, t.sigma1, t.gamma0, t.sigma0, t.admissible
        )?;
        if let Some((p, theta)) = theorem {
            writeln!(text, "# theorem exponent {p} at theta {theta}")?;
        }
        atomic_write(out, text.as_bytes())?;
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct VerifyResult<'a> {
    pass: bool,
    reports: &'a [okg_core::verify::VerificationReport],
}

fn verify(a: &VerifyArgs) -> Result<ExitCode> {
    let tier: Tier = a.tier.parse()?;
    let ids: Vec<&str> = if a.suite.is_empty() {
        suite_ids()
    } else {
        a.suite.iter().map(String::as_str).collect()
    };
    let reports = run_suite(&ids, tier, a.seed)?;
    let pass = reports.iter().all(|r| r.pass);
    for r in &reports {
        let verdict = if r.pass { "pass" } else { "FAIL" };
        match r.first_failure() {
            Some(c) => println!(
                "{:<16} {verdict}  {} [{}]: measured {:.4e}, reference {:.4e}",
                r.lemma_id, c.quantity, c.parameters, c.measured, c.reference
            ),
            None => println!("{:<16} {verdict}  {} checks", r.lemma_id, r.checks.len()),
        }
    }
    write_report(&a.report, "verify", a, VerifyResult { pass, reports: &reports })?;
    if let Some(path) = &a.constants {
        measured_constants_dump(&reports, path)?;
    }
    Ok(if pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn gen_data(a: &GenDataArgs, s: f64) -> Result<ExitCode> {
    let spectrum = build_data(&a.data, s)?;
    let data = if a.physical {
        LatticeData::Physical(inverse(&spectrum))
    } else {
        LatticeData::Frequency(spectrum)
    };
    format::write(&a.out, &data).with_context(|| format!("writing {}", a.out.display()))?;
    println!("gen-data: wrote {}", a.out.display());
    Ok(ExitCode::SUCCESS)
}
