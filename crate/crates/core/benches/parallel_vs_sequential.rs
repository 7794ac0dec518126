use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use etdkit::integrator::{precompute, SemilinearSystem, SimState};
use etdkit::phifun::ContourSpec;
use etdkit::problems::lookup_problem;
use etdkit::tableau::{etdrk4, lookup};
use etdkit::Execution;

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

/// Ten ETDRK4 steps of 2D Ginzburg-Landau (8 FFTs of 128² per step).
fn gl2_steps(c: &mut Criterion) {
    let p = lookup_problem("gl2").unwrap();
    let g = p.grid(128).unwrap();
    let mut group = c.benchmark_group("gl2_128_etdrk4_10_steps");
    group.sample_size(10);
    for (name, exec) in MODES {
        let sys = p.system(&g, exec).unwrap();
        let u0 = sys.coeffs_from_values(&p.initial_values(&g).unwrap()).unwrap();
        let scheme = precompute(&etdrk4(), 0.01, sys.linear(), &ContourSpec::new(32).unwrap(), None, exec).unwrap();
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| {
                let mut state = SimState::new(u0.clone());
                for _ in 0..10 {
                    scheme.step(&mut state, &sys, exec).unwrap();
                }
                state
            })
        });
    }
    group.finish();
}

/// Coefficient evaluation for PECEC736 on a 3D symbol.
fn sh3_precompute(c: &mut Criterion) {
    let p = lookup_problem("sh3").unwrap();
    let g = p.grid(32).unwrap();
    let tableau = lookup("PECEC736").unwrap().tableau;
    let mut group = c.benchmark_group("sh3_32_pecec736_precompute");
    group.sample_size(10);
    for (name, exec) in MODES {
        let sys = p.system(&g, exec).unwrap();
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| precompute(&tableau, 0.01, sys.linear(), &ContourSpec::new(32).unwrap(), None, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, gl2_steps, sh3_precompute);
criterion_main!(benches);
