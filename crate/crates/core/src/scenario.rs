//! JSON scenarios, the stage pipeline behind the `zerocert` binary and the
//! report files it writes.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::construct::{verify_sufficiency, CertificationStatus, DomainKind, SufficiencyGrid, SufficiencyOptions};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::jensen::{log_potential, poisson_jensen_check, potential_to_measure, uniform_circle, JensenMeasure};
use crate::majorants::{make_harmonic, make_log_abs_poly_from_roots, make_radial_power, MajorantSpec, ModelSpec, SubharmonicModel};
use crate::means::{check_mean_chain, ChainLink, RadiusProfile};
use crate::measures::{Extended, ZeroDistribution};
use crate::necessary::{check_m0, lemma1_constants, margin_sweep, Lemma1Setup, M0Grid, SweepOptions, Verdict};
use crate::testfam::FamilySpec;

/// One analysis scenario. Every section except `zeros` and `majorant` has a
/// default.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub zeros: ZeroDistribution,
    #[serde(default = "default_majorant")]
    pub majorant: MajorantSpec,
    #[serde(default = "default_profile")]
    pub radius_profile: RadiusProfile,
    #[serde(default = "default_domain")]
    pub domain: DomainKind,
    #[serde(default = "default_family")]
    pub family: FamilySpec,
    #[serde(default = "default_m0")]
    pub m0: M0Grid,
    #[serde(default = "default_sufficiency")]
    pub sufficiency: SufficiencyGrid,
    /// Retained zeros per symmetry class in the canonical product.
    #[serde(default)]
    pub per_class: Option<usize>,
    /// Genus override, needed when it cannot be detected.
    #[serde(default)]
    pub genus: Option<u32>,
    #[serde(default = "default_lemma1")]
    pub lemma1: Lemma1Setup,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default)]
    pub seed: u64,
    /// Random samples for the self-tests.
    #[serde(default = "default_samples")]
    pub samples: usize,
}

fn default_majorant() -> MajorantSpec {
    MajorantSpec {
        up: ModelSpec::Zero,
        low: ModelSpec::Zero,
    }
}

fn default_profile() -> RadiusProfile {
    RadiusProfile::PlanePower { p: 1.0 }
}

fn default_domain() -> DomainKind {
    DomainKind::Plane
}

fn default_family() -> FamilySpec {
    FamilySpec::truncated_log(0.5, 100.0)
}

fn default_m0() -> M0Grid {
    M0Grid::new(100.0)
}

fn default_sufficiency() -> SufficiencyGrid {
    SufficiencyGrid::new(20.0)
}

fn default_lemma1() -> Lemma1Setup {
    Lemma1Setup {
        outer_center: Complex64::new(0.0, 0.0),
        outer_radius: 1.0,
        inner_center: Complex64::new(0.0, 0.0),
        inner_radius: 0.5,
        z0: Complex64::new(0.0, 0.0),
        b: 1.0,
    }
}

fn default_tolerance() -> f64 {
    1e-8
}

fn default_samples() -> usize {
    100
}

/// Schema problem: the serde location when available plus a message.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemaError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for SchemaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line > 0 {
            write!(f, "line {} column {}: {}", self.line, self.column, self.message)
        } else {
            write!(f, "{}", self.message)
        }
    }
}

impl Scenario {
    pub fn from_json(text: &str) -> std::result::Result<Self, SchemaError> {
        let s: Scenario = serde_json::from_str(text).map_err(|e| SchemaError {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        s.validate().map_err(|e| SchemaError {
            line: 0,
            column: 0,
            message: e.to_string(),
        })?;
        Ok(s)
    }

    pub fn load(path: &Path) -> std::result::Result<Self, SchemaError> {
        let text = fs::read_to_string(path).map_err(|e| SchemaError {
            line: 0,
            column: 0,
            message: format!("{}: {e}", path.display()),
        })?;
        Self::from_json(&text)
    }

    /// Semantic checks that serde cannot express.
    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(Error::InvalidParameter(format!("tolerance: must be positive, got {}", self.tolerance)));
        }
        self.zeros
            .validate()
            .map_err(|e| Error::InvalidParameter(format!("zeros: {e}")))?;
        self.majorant
            .build()
            .map_err(|e| Error::InvalidParameter(format!("majorant: {e}")))?;
        self.radius_profile
            .validate()
            .map_err(|e| Error::InvalidParameter(format!("radius_profile: {e}")))?;
        self.family
            .validate()
            .map_err(|e| Error::InvalidParameter(format!("family: {e}")))?;
        if !(self.m0.r_max >= 1.0) || self.m0.radii_per_shell == 0 || self.m0.angles == 0 {
            return Err(Error::InvalidParameter("m0: need r_max >= 1 and non-empty shells".into()));
        }
        let g = &self.sufficiency;
        if !(g.r_max > 0.0 && g.r_max.is_finite()) || g.rings == 0 || g.spokes == 0 {
            return Err(Error::InvalidParameter("sufficiency: need r_max > 0 and a non-empty grid".into()));
        }
        if let DomainKind::General { a } = self.domain {
            if !(a > 0.0) {
                return Err(Error::InvalidParameter(format!("domain: a must be positive, got {a}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stage {
    MeansSelftest,
    JensenSelftest,
    CheckM0,
    CheckNecessary,
    ConstructVerify,
    Lemma1,
}

impl Stage {
    pub const ALL: [Stage; 6] = [
        Stage::MeansSelftest,
        Stage::JensenSelftest,
        Stage::CheckM0,
        Stage::CheckNecessary,
        Stage::ConstructVerify,
        Stage::Lemma1,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::MeansSelftest => "means-selftest",
            Stage::JensenSelftest => "jensen-selftest",
            Stage::CheckM0 => "check-m0",
            Stage::CheckNecessary => "check-necessary",
            Stage::ConstructVerify => "construct-verify",
            Stage::Lemma1 => "lemma1",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageReport {
    pub stage: Stage,
    pub ok: bool,
    pub error: Option<String>,
    pub seconds: f64,
    pub files: Vec<String>,
    pub summary: serde_json::Value,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub scenario: Option<String>,
    pub seed: u64,
    pub tolerance: f64,
    pub stages: Vec<StageReport>,
    /// Cross-check of the necessary and sufficient engines when both ran.
    pub consistency: Option<String>,
}

impl RunReport {
    pub fn failed_stages(&self) -> Vec<&'static str> {
        self.stages.iter().filter(|s| !s.ok).map(|s| s.stage.name()).collect()
    }

    /// Certified while the necessary sweep reports a violation.
    pub fn contradiction(&self) -> bool {
        self.consistency.as_deref().is_some_and(|c| c.starts_with("contradiction"))
    }

    pub fn stage(&self, stage: Stage) -> Option<&StageReport> {
        self.stages.iter().find(|s| s.stage == stage)
    }
}

/// Runs the stages in order, writing their files into `out`. Stage errors are
/// recorded, not propagated; only I/O on the output directory fails the run.
pub fn run(scenario: &Scenario, stages: &[Stage], out: &Path, exec: Execution) -> std::io::Result<RunReport> {
    fs::create_dir_all(out)?;
    let mut reports = Vec::new();
    let mut necessary = None;
    let mut certified = None;
    for &stage in stages {
        let start = Instant::now();
        let mut files = Vec::new();
        let result = match stage {
            Stage::MeansSelftest => stage_means(scenario, out, &mut files, exec),
            Stage::JensenSelftest => stage_jensen(scenario, out, &mut files),
            Stage::CheckM0 => stage_m0(scenario, out, &mut files, exec),
            Stage::CheckNecessary => stage_necessary(scenario, out, &mut files, exec).map(|(v, s)| {
                necessary = Some(v);
                s
            }),
            Stage::ConstructVerify => stage_construct(scenario, out, &mut files, exec).map(|(c, s)| {
                certified = Some(c);
                s
            }),
            Stage::Lemma1 => stage_lemma1(scenario, out, &mut files),
        };
        let (ok, error, summary) = match result {
            Ok(s) => (true, None, s),
            Err(StageError::Io(e)) => return Err(e),
            Err(StageError::Numeric(e)) => (false, Some(e.to_string()), serde_json::Value::Null),
        };
        reports.push(StageReport {
            stage,
            ok,
            error,
            seconds: start.elapsed().as_secs_f64(),
            files,
            summary,
        });
    }
    let consistency = match (certified, necessary) {
        (Some(true), Some(Verdict::Violated)) => Some("contradiction: certified while the necessary condition is violated".into()),
        (Some(false), Some(Verdict::Consistent)) => Some("open: necessary sweep consistent, certification not achieved".into()),
        (Some(true), Some(_)) => Some("consistent: certified and no violation".into()),
        (Some(false), Some(_)) => Some("consistent: not certified and necessary condition not satisfied".into()),
        _ => None,
    };
    let report = RunReport {
        scenario: scenario.name.clone(),
        seed: scenario.seed,
        tolerance: scenario.tolerance,
        stages: reports,
        consistency,
    };
    write_json(&out.join("run_report.json"), &report)?;
    Ok(report)
}

enum StageError {
    Io(std::io::Error),
    Numeric(Error),
}

impl From<Error> for StageError {
    fn from(e: Error) -> Self {
        StageError::Numeric(e)
    }
}

impl From<std::io::Error> for StageError {
    fn from(e: std::io::Error) -> Self {
        StageError::Io(e)
    }
}

impl From<csv::Error> for StageError {
    fn from(e: csv::Error) -> Self {
        StageError::Io(e.into())
    }
}

type StageResult<T> = std::result::Result<T, StageError>;

fn write_json<T: Serialize>(path: &Path, value: &T) -> std::io::Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(std::io::Error::from)?;
    text.push('\n');
    fs::write(path, text)
}

fn csv_writer(out: &Path, name: &str, files: &mut Vec<String>) -> StageResult<csv::Writer<fs::File>> {
    let path: PathBuf = out.join(name);
    files.push(name.to_string());
    Ok(csv::Writer::from_path(path)?)
}

fn num(x: f64) -> String {
    format!("{x:e}")
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(String::new, num)
}

fn stage_necessary(s: &Scenario, out: &Path, files: &mut Vec<String>, exec: Execution) -> StageResult<(Verdict, serde_json::Value)> {
    let m = s.majorant.build()?;
    let opts = SweepOptions {
        tol: s.tolerance,
        exec,
        ..Default::default()
    };
    let curve = margin_sweep(&s.zeros, &m, &s.family, &opts)?;
    let mut w = csv_writer(out, "margin_curve.csv", files)?;
    w.write_record(["tau", "lhs", "rhs", "margin", "budget", "points", "dropped"])?;
    for r in &curve.samples {
        w.write_record([
            num(r.tau),
            num(r.lhs),
            num(r.rhs),
            num(r.margin),
            num(r.budget),
            r.points.to_string(),
            r.dropped.clone().unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    let summary = serde_json::json!({
        "verdict": curve.verdict,
        "fit": curve.fit,
        "samples": curve.samples.len(),
        "dropped": curve.dropped(),
        "curve": "margin_curve.csv",
    });
    write_json(&out.join("necessary.json"), &summary)?;
    files.push("necessary.json".into());
    Ok((curve.verdict, summary))
}

fn stage_m0(s: &Scenario, out: &Path, files: &mut Vec<String>, exec: Execution) -> StageResult<serde_json::Value> {
    let p = match s.radius_profile {
        RadiusProfile::PlanePower { p } => p,
        RadiusProfile::DiskFraction { .. } => {
            return Err(Error::InvalidSetup("check-m0 needs a plane-power radius profile".into()).into())
        }
    };
    let m = s.majorant.build()?;
    let report = check_m0(&m.up, p, &s.m0, s.tolerance, exec)?;
    let mut w = csv_writer(out, "m0_cells.csv", files)?;
    w.write_record(["shell", "re", "im", "deviation", "budget", "flag"])?;
    for c in &report.cells {
        w.write_record([
            c.shell.to_string(),
            num(c.re),
            num(c.im),
            num(c.deviation),
            num(c.error),
            c.flag.clone().unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    let summary = serde_json::json!({
        "p": report.p,
        "shell_sup": report.shell_sup,
        "c_estimate": report.c_estimate,
        "bounded": report.bounded,
        "flagged": report.flagged,
        "cells": "m0_cells.csv",
    });
    write_json(&out.join("m0.json"), &summary)?;
    files.push("m0.json".into());
    Ok(summary)
}

fn stage_construct(s: &Scenario, out: &Path, files: &mut Vec<String>, exec: Execution) -> StageResult<(bool, serde_json::Value)> {
    let m = s.majorant.build()?;
    let opts = SufficiencyOptions {
        domain: s.domain,
        tol: s.tolerance,
        per_class: s.per_class,
        genus: s.genus,
        necessary: None,
        exec,
    };
    let report = verify_sufficiency(&s.zeros, &m, &s.radius_profile, &s.sufficiency, &opts)?;
    let mut w = csv_writer(out, "sufficiency.csv", files)?;
    w.write_record(["re", "im", "log_abs_f", "rhs", "excess", "budget"])?;
    for r in &report.rows {
        w.write_record([num(r.re), num(r.im), num(r.log_abs_f), num(r.bound_rhs), num(r.excess), num(r.budget)])?;
    }
    w.flush()?;
    let summary = serde_json::json!({
        "status": report.status,
        "genus": report.genus,
        "retained_zeros": report.retained_zeros,
        "grid_points": report.rows.len(),
        "violations": report.violations.len(),
        "max_excess": report.max_excess,
        "skipped_guard": report.skipped_guard,
        "balancing": report.balancing,
        "note": report.note,
        "rows": "sufficiency.csv",
    });
    write_json(&out.join("sufficiency.json"), &summary)?;
    files.push("sufficiency.json".into());
    Ok((report.status == CertificationStatus::Certified, summary))
}

fn stage_lemma1(s: &Scenario, out: &Path, files: &mut Vec<String>) -> StageResult<serde_json::Value> {
    let m = s.majorant.build()?;
    let k = lemma1_constants(s.lemma1, &m, s.tolerance)?;
    let summary = serde_json::to_value(&k).map_err(|e| StageError::Io(e.into()))?;
    write_json(&out.join("lemma1.json"), &summary)?;
    files.push("lemma1.json".into());
    Ok(summary)
}

fn stage_means(s: &Scenario, out: &Path, files: &mut Vec<String>, exec: Execution) -> StageResult<serde_json::Value> {
    let result = means_selftest(&s.radius_profile, s.samples, s.seed, s.tolerance, exec)?;
    let mut w = csv_writer(out, "mean_chain.csv", files)?;
    w.write_record([
        "function", "re", "im", "r", "r_hat", "point", "disk", "circle", "wide_disk", "smoothed_disk", "hat_circle", "budget",
        "flags",
    ])?;
    for (name, report) in &result.functions {
        for r in &report.samples {
            w.write_record([
                name.clone(),
                num(r.re),
                num(r.im),
                num(r.r),
                opt(r.r_hat),
                num(r.point),
                opt(r.disk),
                opt(r.circle),
                opt(r.wide_disk),
                opt(r.smoothed_disk),
                opt(r.hat_circle),
                num(report.tolerance),
                r.flags.join(";"),
            ])?;
        }
    }
    w.flush()?;
    let summary = serde_json::json!({
        "holds": result.holds(),
        "functions": result.functions.iter().map(|(name, r)| serde_json::json!({
            "function": name,
            "links": r.links,
            "flagged": r.flagged,
        })).collect::<Vec<_>>(),
        "samples": "mean_chain.csv",
    });
    write_json(&out.join("means_selftest.json"), &summary)?;
    files.push("means_selftest.json".into());
    Ok(summary)
}

fn stage_jensen(s: &Scenario, out: &Path, files: &mut Vec<String>) -> StageResult<serde_json::Value> {
    let result = jensen_selftest(s.samples.min(25).max(1), s.seed, s.tolerance)?;
    let mut w = csv_writer(out, "jensen_selftest.csv", files)?;
    w.write_record(["case", "degree", "value_at_pole", "measure_integral", "potential_integral", "residual", "budget"])?;
    for (i, c) in result.poisson_jensen.iter().enumerate() {
        w.write_record([
            i.to_string(),
            c.degree.to_string(),
            num(c.value_at_pole),
            num(c.measure_integral),
            num(c.potential_integral),
            num(c.residual),
            num(s.tolerance),
        ])?;
    }
    w.flush()?;
    let summary = serde_json::json!({
        "max_pj_residual": result.max_pj_residual(),
        "roundtrip_max_error": result.roundtrip_max_error,
        "affinity_max_error": result.affinity_max_error,
        "roundtrip_points": result.roundtrip_points,
        "cases": "jensen_selftest.csv",
    });
    write_json(&out.join("jensen_selftest.json"), &summary)?;
    files.push("jensen_selftest.json".into());
    Ok(summary)
}

/// Test functions for the mean chain: `ln|z - a|`, `|z|^2`, `|z|` and
/// `Re z^2 + |z|`.
pub fn mean_chain_battery() -> Vec<(String, SubharmonicModel)> {
    let a = Complex64::new(0.7, -0.4);
    let unit = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    vec![
        ("ln|z-a|".into(), make_log_abs_poly_from_roots(unit, &[(a, 1)]).expect("valid root")),
        ("|z|^2".into(), make_radial_power(1.0, 2.0).expect("valid power")),
        ("|z|".into(), make_radial_power(1.0, 1.0).expect("valid power")),
        (
            "Re z^2 + |z|".into(),
            SubharmonicModel::Sum(vec![
                make_harmonic(vec![zero, zero, unit]),
                make_radial_power(1.0, 1.0).expect("valid power"),
            ]),
        ),
    ]
}

#[derive(Debug, Clone)]
pub struct MeansSelftest {
    pub functions: Vec<(String, crate::means::MeanChainReport)>,
}

impl MeansSelftest {
    pub fn holds(&self) -> bool {
        self.functions.iter().all(|(_, r)| r.holds())
    }

    pub fn worst_slack(&self, link: ChainLink) -> f64 {
        self.functions
            .iter()
            .map(|(_, r)| r.link(link).worst_slack)
            .fold(f64::INFINITY, f64::min)
    }
}

/// Uniform points in `|z| <= radius`.
pub fn random_points(n: usize, radius: f64, seed: u64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let r = radius * rng.gen::<f64>().sqrt();
            Complex64::from_polar(r, rng.gen_range(0.0..std::f64::consts::TAU))
        })
        .collect()
}

/// Mean chain on the standard battery at `n` seeded points with `|z| <= 5`.
pub fn means_selftest(rp: &RadiusProfile, n: usize, seed: u64, tol: f64, exec: Execution) -> Result<MeansSelftest> {
    let points: Vec<Complex64> = random_points(n, 5.0, seed)
        .into_iter()
        .filter(|z| rp.in_domain(*z))
        .collect();
    let functions = mean_chain_battery()
        .into_iter()
        .map(|(name, u)| Ok((name, check_mean_chain(&u, rp, &points, tol, exec)?)))
        .collect::<Result<_>>()?;
    Ok(MeansSelftest { functions })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PjCase {
    pub degree: usize,
    pub value_at_pole: f64,
    pub measure_integral: f64,
    pub potential_integral: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JensenSelftest {
    pub poisson_jensen: Vec<PjCase>,
    pub roundtrip_max_error: f64,
    pub affinity_max_error: f64,
    pub roundtrip_points: usize,
}

impl JensenSelftest {
    pub fn max_pj_residual(&self) -> f64 {
        self.poisson_jensen.iter().map(|c| c.residual).fold(0.0, f64::max)
    }
}

/// Random polynomial of degree `1..=5` with roots in `disk(0, 2)`.
pub fn random_polynomial(rng: &mut ChaCha8Rng) -> (Complex64, Vec<(Complex64, u32)>) {
    let degree = rng.gen_range(1..=5);
    let roots = (0..degree)
        .map(|_| {
            let r = 2.0 * rng.gen::<f64>().sqrt();
            (Complex64::from_polar(r, rng.gen_range(0.0..std::f64::consts::TAU)), 1)
        })
        .collect();
    let lead = Complex64::from_polar(rng.gen_range(0.5..2.0), rng.gen_range(0.0..std::f64::consts::TAU));
    (lead, roots)
}

/// 200-point polar grid `0.15 <= |z| <= 4` used by the round-trip checks.
pub fn roundtrip_grid() -> Vec<Complex64> {
    (0..10)
        .flat_map(|i| {
            let r = 0.15 + 0.385 * i as f64 + 0.01;
            (0..20).map(move |k| Complex64::from_polar(r, std::f64::consts::TAU * (k as f64 + 0.3) / 20.0))
        })
        .collect()
}

fn max_potential_gap(a: &crate::jensen::JensenPotential, b: &crate::jensen::JensenPotential, grid: &[Complex64]) -> f64 {
    grid.iter()
        .map(|&z| match (a.eval(z), b.eval(z)) {
            (Extended::Finite(x), Extended::Finite(y)) => (x - y).abs(),
            (x, y) if x == y => 0.0,
            _ => f64::INFINITY,
        })
        .fold(0.0, f64::max)
}

/// Poisson–Jensen on `cases` random polynomials against the uniform measure
/// on `|z| = 3`, plus the measure/potential round trip and its affinity.
pub fn jensen_selftest(cases: usize, seed: u64, tol: f64) -> Result<JensenSelftest> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let origin = Complex64::new(0.0, 0.0);
    let mu = uniform_circle(origin, 3.0, None)?;
    let mut poisson_jensen = Vec::with_capacity(cases);
    for _ in 0..cases {
        let (lead, roots) = random_polynomial(&mut rng);
        let u = make_log_abs_poly_from_roots(lead, &roots)?;
        let pj = poisson_jensen_check(&u, &mu, tol)?;
        poisson_jensen.push(PjCase {
            degree: roots.len(),
            value_at_pole: pj.value_at_pole,
            measure_integral: pj.measure_integral,
            potential_integral: pj.potential_integral,
            residual: pj.residual,
        });
    }

    let grid = roundtrip_grid();
    let circles: Vec<JensenMeasure> = [0.5, 1.0, 2.5]
        .iter()
        .map(|&t| uniform_circle(origin, t, None))
        .collect::<Result<_>>()?;
    let mut measures = circles.clone();
    measures.push(circles[0].mix(&circles[2], 0.3)?);
    measures.push(circles[1].mix(&circles[2], 0.6)?.mix(&JensenMeasure::dirac(origin), 0.8)?);
    let mut roundtrip_max_error: f64 = 0.0;
    for m in &measures {
        let v = log_potential(m);
        let back = log_potential(&potential_to_measure(&v)?);
        roundtrip_max_error = roundtrip_max_error.max(max_potential_gap(&v, &back, &grid));
    }
    let mut affinity_max_error: f64 = 0.0;
    for alpha in [0.25, 0.5, 0.9] {
        let mixed = log_potential(&circles[0].mix(&circles[1], alpha)?);
        let (v0, v1) = (log_potential(&circles[0]), log_potential(&circles[1]));
        for &z in &grid {
            let lhs = mixed.eval(z).to_f64();
            let rhs = alpha * v0.eval(z).to_f64() + (1.0 - alpha) * v1.eval(z).to_f64();
            affinity_max_error = affinity_max_error.max((lhs - rhs).abs());
        }
    }
    Ok(JensenSelftest {
        poisson_jensen,
        roundtrip_max_error,
        affinity_max_error,
        roundtrip_points: grid.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schema_errors_carry_location() {
        let err = Scenario::from_json("{\n  \"zeros\": {\"points\": [}\n}").unwrap_err();
        assert_eq!(err.line, 2);
        let err = Scenario::from_json("{\"bogus\": 1}").unwrap_err();
        assert!(err.message.contains("bogus"));
        let err = Scenario::from_json("{\"tolerance\": -1}").unwrap_err();
        assert!(err.message.contains("tolerance"));
    }

    #[test]
    fn full_scenario_parses() {
        let text = r#"{
            "name": "sine",
            "zeros": {"generator": {"kind": "line", "step": {"re": 3.141592653589793}, "max_index": 100}},
            "majorant": {"up": {"kind": "radial-power", "sigma": 2, "rho": 1}},
            "radius_profile": {"kind": "plane-power", "p": 1},
            "family": {"family": "truncated-log", "t_min": 1, "t_max": 50},
            "m0": {"r_max": 64},
            "sufficiency": {"r_max": 10, "rings": 8, "spokes": 16},
            "tolerance": 1e-7,
            "seed": 3
        }"#;
        let s = Scenario::from_json(text).unwrap();
        assert_eq!(s.family.t_max(), 50.0);
        assert_eq!(s.sufficiency.rings, 8);
        assert_eq!(s.seed, 3);
    }

    #[test]
    fn empty_scenario_runs_clean() {
        let s = Scenario::from_json("{\"samples\": 5, \"m0\": {\"r_max\": 4}, \"family\": {\"family\": \"truncated-log\", \"t_max\": 4}, \"sufficiency\": {\"r_max\": 3, \"rings\": 3, \"spokes\": 4}}").unwrap();
        let dir = tempfile::tempdir().unwrap();
        let report = run(&s, &Stage::ALL, dir.path(), Execution::Sequential).unwrap();
        assert!(report.failed_stages().is_empty(), "{:?}", report.stages);
        assert!(dir.path().join("run_report.json").exists());
        assert!(dir.path().join("margin_curve.csv").exists());
    }
}
