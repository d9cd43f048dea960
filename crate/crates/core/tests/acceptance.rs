//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use zerocert::construct::{
    verify_sufficiency, weierstrass_log_abs, CertificationStatus, SufficiencyGrid, SufficiencyOptions,
};
use zerocert::majorants::{make_harmonic, make_log_abs_poly_from_roots, make_radial_power, DSubharmonicMajorant};
use zerocert::means::{RadiusProfile, CHAIN_LINKS};
use zerocert::necessary::{check_m0, lemma1_constants, margin_sweep, Lemma1Setup, M0Grid, SweepOptions, Verdict};
use zerocert::scenario::{jensen_selftest, means_selftest};
use zerocert::testfam::FamilySpec;
use zerocert::{Execution, Extended, Generator, ZeroDistribution};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn sine_zeros(max_index: Option<u64>) -> ZeroDistribution {
    ZeroDistribution::from_generator(Generator::Line {
        step: c(PI, 0.0),
        max_index,
    })
    .unwrap()
}

fn gaussian_zeros(max_radius: f64) -> ZeroDistribution {
    ZeroDistribution::from_generator(Generator::GaussianLattice {
        spacing: 1.0,
        max_radius: Some(max_radius),
    })
    .unwrap()
}

fn abs_z(sigma: f64) -> DSubharmonicMajorant {
    DSubharmonicMajorant::subharmonic(make_radial_power(sigma, 1.0).unwrap())
}

fn poisson_jensen() -> Outcome {
    let start = Instant::now();
    let r = jensen_selftest(25, 2024, 1e-10).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let worst = r.max_pj_residual();
    outcome(
        r.poisson_jensen.len() == 25 && worst <= 1e-6 && secs < 5.0,
        format!("25 polynomials, max residual {worst:.2e} (<= 1e-6), {secs:.2}s (< 5s)"),
    )
}

fn mean_chain() -> Outcome {
    let rp = RadiusProfile::plane_power(1.0).unwrap();
    let r = means_selftest(&rp, 100, 11, 1e-8, Execution::default()).unwrap();
    let complete = r
        .functions
        .iter()
        .all(|(_, rep)| rep.samples.len() == 100 && CHAIN_LINKS.iter().all(|&l| rep.link(l).checked == 100));
    let worst: Vec<String> = CHAIN_LINKS
        .iter()
        .map(|&l| format!("{:?} {:.1e}", l, r.worst_slack(l)))
        .collect();
    outcome(
        complete && r.holds() && CHAIN_LINKS.iter().all(|&l| r.worst_slack(l) >= -1e-8),
        format!("4 functions x 100 points, worst slack: {}", worst.join(", ")),
    )
}

fn roundtrip() -> Outcome {
    let r = jensen_selftest(1, 5, 1e-10).unwrap();
    outcome(
        r.roundtrip_points == 200 && r.roundtrip_max_error <= 1e-6 && r.affinity_max_error <= 1e-6,
        format!(
            "{} grid points, round trip {:.1e}, affinity {:.1e} (<= 1e-6)",
            r.roundtrip_points, r.roundtrip_max_error, r.affinity_max_error
        ),
    )
}

/// `Σ_{0<|k|<=N} ln⁺(t/(π|k|))` summed directly.
fn sine_lhs_oracle(t: f64, n: u64) -> f64 {
    (1..=n).map(|k| 2.0 * (t / (PI * k as f64)).ln().max(0.0)).sum()
}

fn criterion_positive() -> Outcome {
    let curve = margin_sweep(
        &sine_zeros(Some(10_000)),
        &abs_z(1.0),
        &FamilySpec::truncated_log(1.0, 200.0),
        &SweepOptions::default(),
    )
    .unwrap();
    // Oracle slope: least squares of the direct sum minus t on the same grid and model.
    let late: Vec<_> = curve.samples.iter().filter(|s| s.tau >= 10.0).collect();
    let oracle_ok = late.iter().all(|s| (s.lhs - sine_lhs_oracle(s.tau, 10_000)).abs() < 1e-9 * s.lhs.max(1.0));
    let target = 2.0 / PI - 1.0;
    let slope = curve.fit.linear_rate.unwrap_or(f64::NAN);
    let decreasing = late.windows(2).all(|w| w[1].margin < w[0].margin);
    let negative = late.iter().all(|s| s.margin < 0.0);
    outcome(
        curve.verdict == Verdict::Consistent
            && oracle_ok
            && decreasing
            && negative
            && ((slope - target) / target).abs() <= 0.05,
        format!(
            "verdict {}, slope {slope:.5} vs {target:.5} ({:.2}%), decreasing {decreasing}, negative {negative}",
            curve.verdict,
            100.0 * ((slope - target) / target).abs()
        ),
    )
}

fn criterion_negative() -> Outcome {
    let curve = margin_sweep(
        &gaussian_zeros(300.0),
        &abs_z(1.0),
        &FamilySpec::truncated_log(1.0, 200.0),
        &SweepOptions::default(),
    )
    .unwrap();
    // Lattice enumeration oracle for the counting sum at the top of the sweep.
    let top = curve.samples.last().unwrap();
    let t = top.tau;
    let r = t.ceil() as i64;
    let mut oracle = 0.0;
    for m in -r..=r {
        for n in -r..=r {
            let d = ((m * m + n * n) as f64).sqrt();
            if d > 0.0 && d <= 300.0 {
                oracle += (t / d).ln().max(0.0);
            }
        }
    }
    let exponent = curve.fit.growth_exponent.unwrap_or(f64::NAN);
    outcome(
        curve.verdict == Verdict::Violated && (1.8..=2.2).contains(&exponent) && (top.lhs - oracle).abs() < 1e-8 * oracle,
        format!(
            "verdict {}, growth exponent {exponent:.3} in [1.8, 2.2], lhs(t={t}) {:.6e} vs lattice oracle {:.6e}, (pi/2)t^2 = {:.3e}",
            curve.verdict,
            top.lhs,
            oracle,
            PI / 2.0 * t * t
        ),
    )
}

fn weierstrass_fidelity() -> Outcome {
    let z = sine_zeros(None);
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut worst: f64 = 0.0;
    let mut count = 0;
    while count < 50 {
        let w = Complex64::from_polar(5.0 * rng.gen::<f64>().sqrt(), rng.gen_range(0.0..2.0 * PI));
        let nearest = (w.re / PI).round();
        if nearest != 0.0 && (w - c(nearest * PI, 0.0)).norm() < 0.1 {
            continue;
        }
        let v = weierstrass_log_abs(&z, 1, w, Some(10_000)).unwrap().value.to_f64();
        let exact = if w.norm() < 1e-8 { 0.0 } else { (w.sin() / w).norm().ln() };
        worst = worst.max((v - exact).abs());
        count += 1;
    }
    outcome(worst <= 1e-3, format!("50 points, max |error| {worst:.2e} (<= 1e-3)"))
}

fn m0_regularity() -> Outcome {
    let grid = M0Grid::new(100.0);
    let mut parts = Vec::new();
    let mut ok = true;
    for rho in [0.5, 1.0, 2.0] {
        let r = check_m0(&make_radial_power(1.0, rho).unwrap(), 1.0, &grid, 1e-10, Execution::default()).unwrap();
        let n = r.shell_sup.len();
        let (a, b) = (r.shell_sup[n - 2], r.shell_sup[n - 1]);
        let stable = (b - a).abs() <= 0.01 * b.abs().max(1e-300);
        ok &= r.bounded && stable;
        parts.push(format!("rho={rho}: C {:.4} (outer shells {a:.4}/{b:.4})", r.c_estimate));
    }
    let h = make_harmonic(vec![c(0.3, 0.0), c(1.0, -2.0), c(0.5, 0.25), c(0.0, 0.01)]);
    let r = check_m0(&h, 1.0, &grid, 1e-10, Execution::default()).unwrap();
    let harmonic_dev = r.cells.iter().map(|x| x.deviation.abs()).fold(0.0, f64::max);
    ok &= harmonic_dev <= 1e-10;
    parts.push(format!("harmonic max deviation {harmonic_dev:.1e}"));
    outcome(ok, parts.join("; "))
}

fn end_to_end() -> Outcome {
    let rp = RadiusProfile::plane_power(1.0).unwrap();
    let grid = SufficiencyGrid::new(20.0);
    let opts = SufficiencyOptions::default();
    let family = FamilySpec::truncated_log(1.0, 200.0);

    let sine = sine_zeros(Some(10_000));
    let m = abs_z(2.0);
    let cert = verify_sufficiency(&sine, &m, &rp, &grid, &opts).unwrap();
    let nec = margin_sweep(&sine, &m, &family, &SweepOptions::default()).unwrap();

    let lattice = gaussian_zeros(300.0);
    let m = abs_z(1.0);
    let cert_g = verify_sufficiency(&lattice, &m, &rp, &grid, &opts).unwrap();
    let nec_g = margin_sweep(&lattice, &m, &family, &SweepOptions::default()).unwrap();

    let contradiction = |s: CertificationStatus, v: Verdict| s == CertificationStatus::Certified && v == Verdict::Violated;
    let ok = cert.status == CertificationStatus::Certified
        && cert.violations.is_empty()
        && nec.verdict == Verdict::Consistent
        && cert_g.status != CertificationStatus::Certified
        && nec_g.verdict == Verdict::Violated
        && !contradiction(cert.status, nec.verdict)
        && !contradiction(cert_g.status, nec_g.verdict);
    outcome(
        ok,
        format!(
            "sine/2|z|: {:?} ({} violations) + {}; gaussian/|z|: {:?} + {}",
            cert.status,
            cert.violations.len(),
            nec.verdict,
            cert_g.status,
            nec_g.verdict
        ),
    )
}

fn lemma1() -> Outcome {
    let setup = Lemma1Setup {
        outer_center: c(0.0, 0.0),
        outer_radius: 1.0,
        inner_center: c(0.0, 0.0),
        inner_radius: 0.5,
        z0: c(0.0, 0.0),
        b: 1.0,
    };
    let lead = c(1.5, -0.5);
    let roots = [(c(0.3, 0.2), 1), (c(-0.6, 0.1), 2), (c(0.1, -0.8), 1)];
    let m = DSubharmonicMajorant::subharmonic(make_log_abs_poly_from_roots(lead, &roots).unwrap());
    let k = lemma1_constants(setup, &m, 1e-12).unwrap();
    // Atom-sum oracle: Σ m_j ln(1/|a_j|) + max(ln|q(0)|, 0).
    let atoms: f64 = roots.iter().map(|(a, mult)| *mult as f64 * -a.norm().ln()).sum();
    let q0 = roots
        .iter()
        .fold(lead, |acc, (a, mult)| acc * (-a).powu(*mult))
        .norm()
        .ln();
    let oracle = atoms + q0.max(0.0);
    let c_err = (k.c - 1.0 / 2f64.ln()).abs();
    let (finite, bar_err) = match k.c_bar {
        Extended::Finite(v) => (true, (v - oracle).abs()),
        _ => (false, f64::INFINITY),
    };
    outcome(
        c_err <= 1e-10 && finite && bar_err <= 1e-8,
        format!("C error {c_err:.1e} (<= 1e-10), C-bar {} vs oracle {oracle:.10} error {bar_err:.1e} (<= 1e-8)", k.c_bar),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("poisson-jensen identity", poisson_jensen),
        ("mean chain and enlargement", mean_chain),
        ("measure/potential round trip", roundtrip),
        ("criterion positive case (sine lattice)", criterion_positive),
        ("criterion negative case (gaussian lattice)", criterion_negative),
        ("weierstrass fidelity", weierstrass_fidelity),
        ("growth regularity check", m0_regularity),
        ("end-to-end consistency loop", end_to_end),
        ("disk constants", lemma1),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        let tag = if o.passed { "PASS" } else { "FAIL" };
        println!(
            "[{tag}] {}. {name}: {} [{:.2}s]",
            i + 1,
            o.detail,
            start.elapsed().as_secs_f64()
        );
        failed += usize::from(!o.passed);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
