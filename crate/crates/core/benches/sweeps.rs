use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use num_complex::Complex64;
use zerocert::construct::{verify_sufficiency, SufficiencyGrid, SufficiencyOptions};
use zerocert::majorants::{make_radial_power, DSubharmonicMajorant};
use zerocert::means::{check_mean_chain, RadiusProfile};
use zerocert::necessary::{margin_sweep, SweepOptions};
use zerocert::scenario::random_points;
use zerocert::testfam::FamilySpec;
use zerocert::{Execution, Generator, ZeroDistribution};

fn strategies() -> Vec<(&'static str, Execution)> {
    #[allow(unused_mut)]
    let mut out = vec![("sequential", Execution::Sequential)];
    #[cfg(feature = "parallel")]
    out.push(("parallel", Execution::Parallel));
    out
}

fn lattice() -> ZeroDistribution {
    ZeroDistribution::from_generator(Generator::GaussianLattice {
        spacing: 1.0,
        max_radius: Some(300.0),
    })
    .unwrap()
}

fn bench_margin_sweep(c: &mut Criterion) {
    let z = lattice();
    let m = DSubharmonicMajorant::subharmonic(make_radial_power(1.0, 1.0).unwrap());
    let family = FamilySpec::truncated_log(1.0, 200.0);
    let mut group = c.benchmark_group("margin_sweep");
    for (name, exec) in strategies() {
        let opts = SweepOptions {
            exec,
            ..Default::default()
        };
        group.bench_with_input(BenchmarkId::from_parameter(name), &opts, |b, opts| {
            b.iter(|| margin_sweep(&z, &m, &family, opts).unwrap())
        });
    }
    group.finish();
}

fn bench_sufficiency(c: &mut Criterion) {
    let z = ZeroDistribution::from_generator(Generator::Line {
        step: Complex64::new(std::f64::consts::PI, 0.0),
        max_index: Some(10_000),
    })
    .unwrap();
    let m = DSubharmonicMajorant::subharmonic(make_radial_power(2.0, 1.0).unwrap());
    let rp = RadiusProfile::plane_power(1.0).unwrap();
    let grid = SufficiencyGrid {
        r_max: 20.0,
        rings: 8,
        spokes: 16,
    };
    let mut group = c.benchmark_group("verify_sufficiency");
    group.sample_size(10);
    for (name, exec) in strategies() {
        let opts = SufficiencyOptions {
            exec,
            ..Default::default()
        };
        group.bench_with_input(BenchmarkId::from_parameter(name), &opts, |b, opts| {
            b.iter(|| verify_sufficiency(&z, &m, &rp, &grid, opts).unwrap())
        });
    }
    group.finish();
}

fn bench_mean_chain(c: &mut Criterion) {
    let u = make_radial_power(1.0, 1.0).unwrap();
    let rp = RadiusProfile::plane_power(1.0).unwrap();
    let points = random_points(32, 5.0, 1);
    let mut group = c.benchmark_group("mean_chain");
    group.sample_size(10);
    for (name, exec) in strategies() {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| check_mean_chain(&u, &rp, &points, 1e-8, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_margin_sweep, bench_sufficiency, bench_mean_chain);
criterion_main!(benches);
