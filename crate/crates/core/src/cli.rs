//! Named check suites with versioned JSON reports and CSV curves; the
//! library side of the `psl` binary.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::apcpc::{
    check_cone_components, check_cone_parallel, check_para_sasaki_like, validate_structure, verify_nabf,
    ApcpcStructure, DEFAULT_TOL,
};
use crate::constructions::{example1, example2, example3, example4, generic_fixture, hyperbolic_extension, parallel_fixture};
use crate::curvature::{
    check_curf, check_xi_curvature, decomposition_values, einstein_fit, eta_einstein_fit, horizontal_decomposition,
};
use crate::error::{GeometryError, Result};
use crate::report::{CheckReport, Sampler, SubCheck, DEFAULT_POINTS, DEFAULT_SEED};
use crate::transform::{
    apply_conformal, check_eta_einstein_form, check_homothetic_laws, check_sssl, verify_lemma_ff, ConformalData,
    TRANSFORM_TOL,
};

pub const SCHEMA: &str = "1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Verify,
    Transform,
    Cone,
}

impl Command {
    pub fn suites(self) -> &'static [&'static str] {
        match self {
            Command::Verify => &["example1", "example2", "extension-einstein", "example4", "generic", "parallel"],
            Command::Transform => &["example1", "example2", "extension-einstein", "example4"],
            Command::Cone => &["example1", "generic", "parallel"],
        }
    }
}

/// Everything that determines a run. Two equal configs give byte-identical
/// reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    pub suite: String,
    pub n: usize,
    pub lambda: f64,
    pub mu: f64,
    pub a: f64,
    pub b: f64,
    pub u: String,
    pub v: String,
    pub w: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    pub radii: Vec<f64>,
    pub points: usize,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
}

impl RunConfig {
    pub fn new(command: Command, suite: impl Into<String>) -> Self {
        RunConfig {
            command,
            suite: suite.into(),
            n: 2,
            lambda: 0.0,
            mu: 0.0,
            a: 2.0,
            b: 1.0,
            u: "0".into(),
            v: "0".into(),
            w: "0".into(),
            p: None,
            q: None,
            radii: vec![0.7, 1.0, 1.5],
            points: DEFAULT_POINTS,
            seed: DEFAULT_SEED,
            tol: None,
        }
    }

    fn sampler(&self) -> Sampler {
        Sampler::new(self.seed, self.points)
    }

    fn tol(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    pub package: String,
    pub version: String,
    pub os: String,
    pub arch: String,
}

impl Environment {
    pub fn current() -> Self {
        Environment {
            package: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            os: std::env::consts::OS.into(),
            arch: std::env::consts::ARCH.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub schema: String,
    pub fixture: String,
    pub config: RunConfig,
    pub environment: Environment,
    pub pass: bool,
    /// Scalar quantities of interest (fitted coefficients, curvatures).
    pub values: BTreeMap<String, f64>,
    pub checks: Vec<CheckReport>,
}

impl SuiteReport {
    /// First failing sub-check, with its check.
    pub fn first_failure(&self) -> Option<(&CheckReport, &SubCheck)> {
        self.checks.iter().find_map(|c| c.first_failure().map(|s| (c, s)))
    }

    pub fn exit_code(&self) -> i32 {
        if self.pass {
            0
        } else {
            1
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Exit code for an error: usage problems are 2, everything else 1.
pub fn error_exit_code(e: &GeometryError) -> i32 {
    match e {
        GeometryError::Parameter(_) | GeometryError::Parse { .. } => 2,
        _ => 1,
    }
}

type Job<'a> = Box<dyn Fn() -> Result<CheckReport> + Send + Sync + 'a>;

fn labeled(label: &str, r: Result<CheckReport>) -> Result<CheckReport> {
    r.map(|mut c| {
        c.check = format!("{label}:{}", c.check);
        c
    })
}

/// Runs jobs in parallel; the output order is the job order.
fn run_jobs(jobs: Vec<Job<'_>>) -> Result<Vec<CheckReport>> {
    jobs.par_iter().map(|j| j()).collect()
}

fn finish(cfg: &RunConfig, fixture: &str, checks: Vec<CheckReport>, values: BTreeMap<String, f64>) -> SuiteReport {
    SuiteReport {
        schema: SCHEMA.into(),
        fixture: fixture.into(),
        config: cfg.clone(),
        environment: Environment::current(),
        pass: checks.iter().all(|c| c.pass),
        values,
        checks,
    }
}

fn unknown_suite(cfg: &RunConfig) -> GeometryError {
    GeometryError::Parameter(format!(
        "unknown suite '{}' for {:?}; available: {}",
        cfg.suite,
        cfg.command,
        cfg.command.suites().join(", ")
    ))
}

/// A point of the fixture on the slice `t` (first coordinate), using the
/// first sample of the run.
fn point_on_slice(s: &ApcpcStructure, cfg: &RunConfig, t: f64) -> Vec<f64> {
    let mut p = s.model().sample_point(&mut cfg.sampler().rng(0));
    p[0] = t;
    p
}

pub fn run_suite(cfg: &RunConfig) -> Result<SuiteReport> {
    match cfg.command {
        Command::Verify => run_verify(cfg),
        Command::Transform => run_transform(cfg),
        Command::Cone => run_cone(cfg),
    }
}

/// Extension fixtures: (structure, is Einstein at t = 0).
fn extension_fixture(cfg: &RunConfig) -> Result<ApcpcStructure> {
    match cfg.suite.as_str() {
        "extension-einstein" => hyperbolic_extension(&example3(cfg.n)?),
        "example4" => hyperbolic_extension(&example4(cfg.n, cfg.a, cfg.b)?),
        _ => Err(unknown_suite(cfg)),
    }
}

fn run_verify(cfg: &RunConfig) -> Result<SuiteReport> {
    let sm = cfg.sampler();
    let tol = cfg.tol(DEFAULT_TOL);
    let mut values = BTreeMap::new();
    match cfg.suite.as_str() {
        "example1" => {
            let e = example1(cfg.n)?;
            let (lie, chart) = (&e.lie, &e.chart);
            let checks = run_jobs(vec![
                Box::new(|| labeled("lie", validate_structure(lie, &sm, tol))),
                Box::new(|| labeled("lie", check_para_sasaki_like(lie, &sm, tol))),
                Box::new(|| labeled("chart", check_para_sasaki_like(chart, &sm, tol))),
                Box::new(|| labeled("chart", verify_nabf(chart, &sm, tol))),
                Box::new(|| labeled("lie", check_curf(lie, &sm, tol))),
                Box::new(|| labeled("lie", check_xi_curvature(lie, &sm, tol))),
                Box::new(|| labeled("chart", check_xi_curvature(chart, &sm, tol))),
            ])?;
            let sp = lie.at(&vec![0.0; lie.dim()])?;
            values.insert("ric_xi_xi".into(), sp.geo.ricci(sp.xi(), sp.xi()));
            values.insert("scal".into(), sp.geo.scalar());
            Ok(finish(cfg, lie.name(), checks, values))
        }
        "example2" => {
            let s = example2(cfg.lambda, cfg.mu)?.lie;
            let checks = run_jobs(vec![
                Box::new(|| labeled("lie", check_para_sasaki_like(&s, &sm, tol))),
                Box::new(|| labeled("lie", check_curf(&s, &sm, tol))),
                Box::new(|| labeled("lie", check_xi_curvature(&s, &sm, tol))),
            ])?;
            let sp = s.at(&[0.0; 5])?;
            values.insert("ric_xi_xi".into(), sp.geo.ricci(sp.xi(), sp.xi()));
            values.insert("scal".into(), sp.geo.scalar());
            Ok(finish(cfg, s.name(), checks, values))
        }
        "extension-einstein" | "example4" => {
            let s = extension_fixture(cfg)?;
            let einstein = cfg.suite == "extension-einstein";
            let two_n = 2.0 * cfg.n as f64;
            let mut jobs: Vec<Job<'_>> = vec![
                Box::new(|| check_para_sasaki_like(&s, &sm, tol)),
                Box::new(|| check_curf(&s, &sm, tol)),
                Box::new(|| horizontal_decomposition(&s, &sm, tol)),
            ];
            if einstein {
                jobs.push(Box::new(|| einstein_on_unit_slice(&s, &sm, tol)));
            }
            let checks = run_jobs(jobs)?;
            let p0 = point_on_slice(&s, cfg, 0.0);
            let dv = decomposition_values(&s, &p0)?;
            values.insert("scal".into(), dv.scal);
            values.insert("scal_h".into(), dv.scal_h);
            values.insert("scal_star".into(), dv.scal_star);
            values.insert("scal_h_star".into(), dv.scal_h_star);
            if einstein {
                let (lambda, res) = einstein_fit(&s, &p0)?;
                values.insert("lambda".into(), lambda);
                values.insert("einstein_residual".into(), res);
                values.insert("expected_scal".into(), -two_n * (two_n + 1.0));
            } else {
                let fit = eta_einstein_fit(&s, &p0)?;
                let (_, _, gh) = fit.horizontal_form();
                values.insert("alpha".into(), fit.alpha);
                values.insert("beta".into(), fit.beta);
                values.insert("gamma".into(), fit.gamma);
                values.insert("gamma_horizontal".into(), gh);
            }
            Ok(finish(cfg, s.name(), checks, values))
        }
        "generic" => {
            let s = generic_fixture(cfg.n, 0.1, cfg.seed)?;
            let checks = run_jobs(vec![
                Box::new(|| validate_structure(&s, &sm, tol)),
                Box::new(|| verify_nabf(&s, &sm, tol)),
            ])?;
            Ok(finish(cfg, s.name(), checks, values))
        }
        "parallel" => {
            let s = parallel_fixture(cfg.n)?;
            let checks = run_jobs(vec![
                Box::new(|| validate_structure(&s, &sm, tol)),
                Box::new(|| check_para_sasaki_like(&s, &sm, tol)),
            ])?;
            Ok(finish(cfg, s.name(), checks, values))
        }
        _ => Err(unknown_suite(cfg)),
    }
}

/// `Ric = −2n g` and `Scal = −2n(2n+1)` on the slice `t = 0`.
fn einstein_on_unit_slice(s: &ApcpcStructure, sm: &Sampler, tol: f64) -> Result<CheckReport> {
    let two_n = 2.0 * s.n() as f64;
    sm.report("einstein_t0", &["lambda", "ricci", "scal"], tol, |_, rng| {
        let mut p = s.model().sample_point(rng);
        p[0] = 0.0;
        let (lambda, res) = einstein_fit(s, &p)?;
        let scal = s.at(&p)?.geo.scalar();
        Ok(vec![(lambda + two_n).abs(), res, (scal + two_n * (two_n + 1.0)).abs() / (two_n * (two_n + 1.0))])
    })
}

fn run_transform(cfg: &RunConfig) -> Result<SuiteReport> {
    let sm = cfg.sampler();
    let tol = cfg.tol(DEFAULT_TOL);
    let ttol = cfg.tol(TRANSFORM_TOL);
    let s = match cfg.suite.as_str() {
        "example1" => example1(cfg.n)?.chart,
        "example2" => example2(if cfg.lambda == 0.0 { 1.0 } else { cfg.lambda }, 0.0)?
            .chart
            .expect("chart form exists for mu = 0"),
        "extension-einstein" | "example4" => extension_fixture(cfg)?,
        _ => return Err(unknown_suite(cfg)),
    };
    let d = ConformalData::parse(&cfg.u, &cfg.v, &cfg.w)?;
    let t = apply_conformal(&s, &d)?;
    let mut jobs: Vec<Job<'_>> = vec![
        Box::new(|| labeled("transformed", validate_structure(&t, &sm, tol))),
        Box::new(|| verify_lemma_ff(&s, &d, &sm, ttol)),
        Box::new(|| check_sssl(&s, &d, &sm, tol).map(|(_, r)| r)),
    ];
    if d.is_constant() {
        jobs.push(Box::new(|| check_homothetic_laws(&s, &d, &sm, tol)));
    }
    if let (Some(p), Some(q)) = (cfg.p, cfg.q) {
        let (s, sm) = (&s, &sm);
        jobs.push(Box::new(move || check_eta_einstein_form(s, p, q, sm, ttol)));
    }
    let checks = run_jobs(jobs)?;
    let mut values = BTreeMap::new();
    let p0 = s.model().sample_point(&mut sm.rng(0));
    let (a, b) = (s.at(&p0)?, t.at(&p0)?);
    values.insert("scal".into(), a.geo.scalar());
    values.insert("scal_star".into(), a.geo.scalar_star()?);
    values.insert("scal_bar".into(), b.geo.scalar());
    values.insert("scal_star_bar".into(), b.geo.scalar_star()?);
    Ok(finish(cfg, t.name(), checks, values))
}

fn run_cone(cfg: &RunConfig) -> Result<SuiteReport> {
    let sm = cfg.sampler();
    let tol = cfg.tol(DEFAULT_TOL);
    let s = match cfg.suite.as_str() {
        "example1" => example1(cfg.n)?.chart,
        "generic" => generic_fixture(cfg.n, 0.1, cfg.seed)?,
        "parallel" => parallel_fixture(cfg.n)?,
        _ => return Err(unknown_suite(cfg)),
    };
    let checks = run_jobs(vec![
        Box::new(|| check_cone_parallel(&s, &sm, &cfg.radii, tol)),
        Box::new(|| check_cone_components(&s, &sm, tol)),
    ])?;
    Ok(finish(cfg, s.name(), checks, BTreeMap::new()))
}

/// Parses `start:stop:step` (inclusive of `stop` up to rounding).
pub fn parse_range(src: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = src.split(':').collect();
    let bad = || GeometryError::Parameter(format!("expected start:stop:step, got '{src}'"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let v: Vec<f64> = parts.iter().map(|p| p.trim().parse::<f64>()).collect::<std::result::Result<_, _>>().map_err(|_| bad())?;
    let (start, stop, step) = (v[0], v[1], v[2]);
    if !(step > 0.0) || stop < start {
        return Err(bad());
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| start + i as f64 * step).collect())
}

/// CSV of the η-Einstein coefficients (basis `{g, g̃, η⊗η}`) of an
/// extension fixture along `t`, at the base point of the run's first sample.
pub fn eta_einstein_curve(cfg: &RunConfig, ts: &[f64]) -> Result<String> {
    if !matches!(cfg.suite.as_str(), "extension-einstein" | "example4") {
        return Err(GeometryError::Parameter(format!(
            "curves need a hyperbolic extension (extension-einstein, example4), not '{}'",
            cfg.suite
        )));
    }
    let s = extension_fixture(cfg)?;
    let mut out = String::from("t,alpha,beta,gamma\n");
    for &t in ts {
        let f = eta_einstein_fit(&s, &point_on_slice(&s, cfg, t))?;
        out.push_str(&format!("{t},{:.12},{:.12},{:.12}\n", f.alpha, f.beta, f.gamma));
    }
    Ok(out)
}

/// Plain-text summary of a report: one line per sub-check.
pub fn summarize(report: &SuiteReport) -> String {
    let mut out = format!("{} ({:?} {})\n", report.fixture, report.config.command, report.config.suite);
    for c in &report.checks {
        for s in &c.detail {
            let mark = if s.pass { "ok  " } else { "FAIL" };
            out.push_str(&format!("{mark} {}/{} {:.3e} (tol {:.0e})\n", c.check, s.name, s.max_residual, c.tol));
        }
    }
    for (k, v) in &report.values {
        out.push_str(&format!("     {k} = {v:.10}\n"));
    }
    out.push_str(if report.pass { "PASS\n" } else { "FAIL\n" });
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_range("-1:1:0.25").unwrap().len(), 9);
        assert_eq!(parse_range("0:0:1").unwrap(), vec![0.0]);
        for bad in ["1:0:1", "0:1", "0:1:0", "a:b:c"] {
            assert!(parse_range(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn unknown_suite_is_a_usage_error() {
        let e = run_suite(&RunConfig::new(Command::Cone, "example4")).unwrap_err();
        assert_eq!(error_exit_code(&e), 2);
    }

    #[test]
    fn extension_einstein_values() {
        let mut cfg = RunConfig::new(Command::Verify, "extension-einstein");
        cfg.points = 8;
        let r = run_suite(&cfg).unwrap();
        assert!(r.pass, "{}", summarize(&r));
        assert!((r.values["lambda"] + 4.0).abs() < 1e-8 && (r.values["scal"] + 20.0).abs() < 1e-7);
    }
}
