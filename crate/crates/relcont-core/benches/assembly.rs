//! Grid assembly throughput: SEM balance residuals and curvature on a 3D
//! spacetime grid. With the `parallel` feature each workload runs on a
//! one-thread pool (the sequential baseline) and on the full pool; without it
//! only the sequential build is measured.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use relcont_core::calculus::{curvature, MetricField, TensorField};
use relcont_core::constitutive::{Model, ModelSpec};
use relcont_core::grid::{Field, Grid};
use relcont_core::sem::{balance_residuals, FieldState};
use relcont_core::tensor::{Orientation, Slot};
use std::hint::black_box;

fn state(n: usize) -> FieldState {
    let grid = Grid::cube(3, -0.5, 0.5, n).unwrap();
    let c = 1.0;
    let metric = MetricField::from_fn(&grid, |x, o| {
        o.fill(0.0);
        o[0] = -(1.0 + 0.05 * (x[1] * x[2]).sin());
        o[4] = 1.0 + 0.05 * x[0].cos();
        o[8] = 1.0 + 0.03 * x[1].sin();
    })
    .unwrap();
    let f = TensorField::from_fn(&grid, &[Slot::Down, Slot::Down], |x, o| {
        o.fill(0.0);
        o[1] = 0.3 * x[1].cos();
        o[3] = -o[1];
        o[5] = 0.2 * x[0].sin();
        o[7] = -o[5];
    });
    let u = TensorField::from_fn(&grid, &[Slot::Up], |x, o| {
        let g00 = 1.0 + 0.05 * (x[1] * x[2]).sin();
        o.copy_from_slice(&[1.0 / g00.sqrt(), 0.0, 0.0]);
    });
    FieldState {
        rho: Field::from_fn(&grid, 1, |x, o| o[0] = 1.0 + 0.1 * x[0]),
        s: Field::from_fn(&grid, 1, |_, o| o[0] = 0.2),
        u,
        f,
        cauchy: None,
        metric,
        q: 0.0,
        c,
    }
}

fn workloads(c: &mut Criterion) {
    let model = Model::new(&ModelSpec::linear("rho*(c^2 + 0.2*rho)", "0.3 + 0.1*rho", "0.1"), 1.0).unwrap();
    let fs = state(25);
    let mut run = |name: &str, label: &str, f: &dyn Fn()| {
        c.bench_with_input(BenchmarkId::new(name, label), &(), |b, _| b.iter(f));
    };
    let balance = || {
        black_box(balance_residuals(&model, &fs, Orientation::POSITIVE).unwrap());
    };
    let curv = || {
        black_box(curvature(&fs.metric));
    };
    #[cfg(feature = "parallel")]
    {
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let all = rayon::ThreadPoolBuilder::new().build().unwrap();
        let label = format!("threads={}", all.current_num_threads());
        run("balance", "sequential", &|| one.install(balance));
        run("balance", &label, &|| all.install(balance));
        run("curvature", "sequential", &|| one.install(curv));
        run("curvature", &label, &|| all.install(curv));
    }
    #[cfg(not(feature = "parallel"))]
    {
        run("balance", "sequential", &balance);
        run("curvature", "sequential", &curv);
    }
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = workloads
}
criterion_main!(benches);
