use super::*;
use crate::convergence::judge;
use crate::grid::{Axis, Grid};
use crate::sampling::{rng, TrigField};

const C: f64 = 1.0;

fn perturbed_minkowski(seed: u64, dim: usize, amp: f64) -> impl Fn(&[f64], &mut [f64]) + Sync + Send {
    let mut r = rng(seed);
    let h: Vec<TrigField> = (0..dim * dim).map(|_| TrigField::random(&mut r, dim, 2, (0.5, 1.5), amp)).collect();
    move |x: &[f64], g: &mut [f64]| {
        for a in 0..dim {
            for b in 0..dim {
                let eta = if a != b {
                    0.0
                } else if a == 0 {
                    -C * C
                } else {
                    1.0
                };
                g[a * dim + b] = eta + 0.5 * (h[a * dim + b].eval(x) + h[b * dim + a].eval(x));
            }
        }
    }
}

fn trig_tensor(seed: u64, grid: &Grid, slots: &[Slot], amp: f64) -> TensorField {
    let d = grid.dim();
    let mut r = rng(seed);
    let comps: Vec<TrigField> =
        (0..pow_usize(d, slots.len())).map(|_| TrigField::random(&mut r, d, 2, (0.5, 1.5), amp)).collect();
    TensorField::from_fn(grid, slots, move |x, out| {
        for (o, f) in out.iter_mut().zip(&comps) {
            *o = f.eval(x);
        }
    })
}

fn trig_form(seed: u64, grid: &Grid, deg: usize, amp: f64) -> TensorField {
    let d = grid.dim();
    let mut r = rng(seed);
    let n = combinations(d, deg).len();
    let comps: Vec<TrigField> = (0..n).map(|_| TrigField::random(&mut r, d, 2, (0.5, 1.5), amp)).collect();
    TensorField::from_forms(grid, deg, move |p| {
        let x = grid.point(p);
        Form::from_increasing(d, deg, &comps.iter().map(|f| f.eval(&x)).collect::<Vec<_>>())
    })
}

/// Errors on levels 0,1,2 of `coarse`, measured on the coarse interior region.
fn errors(coarse: &Grid, margin: usize, f: impl Fn(&Grid) -> TensorField) -> Vec<f64> {
    let region = coarse.interior_region(margin);
    (0..3).map(|k| f(&coarse.refined(k)).norms(&region).linf).collect()
}

fn assert_second_order(errs: &[f64], floor: f64) {
    let r = judge(errs, 4.0, 0.25, floor);
    assert!(r.pass, "{r:?}");
}

#[test]
fn minkowski_connection_vanishes() {
    let grid = Grid::cube(4, -1.0, 1.0, 5).unwrap();
    let m = MetricField::minkowski(&grid, 2.0);
    assert_eq!(m.christoffel_field().max_abs(), 0.0);
    let v = trig_tensor(1, &grid, &[Slot::Up], 1.0);
    let nv = covariant_derivative(&v, &m);
    assert!(nv.field().sub(v.partial_gradient().field()).max_abs() == 0.0);
}

#[test]
fn christoffel_matches_closed_form_for_polar_like_metric() {
    // g = diag(−1, (x¹)², 1, 1): only Γ^1_{11} = 1/x¹ survives; quadratic data
    // is differentiated exactly by the stencils.
    let grid = Grid::new(vec![
        Axis::new(-1.0, 1.0, 5),
        Axis::new(1.0, 2.0, 9),
        Axis::new(-1.0, 1.0, 5),
        Axis::new(-1.0, 1.0, 5),
    ])
    .unwrap();
    let m = MetricField::from_fn(&grid, |x, g| {
        g.fill(0.0);
        g[0] = -1.0;
        g[5] = x[1] * x[1];
        g[10] = 1.0;
        g[15] = 1.0;
    })
    .unwrap();
    for p in 0..grid.len() {
        let x = grid.point(p);
        let gam = m.christoffel(p);
        for (i, v) in gam.iter().enumerate() {
            let exact = if i == (4 + 1) * 4 + 1 { 1.0 / x[1] } else { 0.0 };
            assert!((v - exact).abs() < 1e-12, "Γ[{i}] at {x:?}: {v} vs {exact}");
        }
    }
}

#[test]
fn degenerate_metric_reports_the_point() {
    let grid = Grid::cube(2, -1.0, 1.0, 5).unwrap();
    let err = MetricField::from_fn(&grid, |x, g| {
        g.copy_from_slice(&[-1.0, 0.0, 0.0, x[0]]);
    })
    .unwrap_err();
    match err {
        CalculusError::Metric { point, .. } => assert!(point[0] <= 0.0, "{point:?}"),
        e => panic!("unexpected {e}"),
    }
}

#[test]
fn metric_and_volume_are_parallel() {
    let coarse = Grid::cube(3, -1.0, 1.0, 9).unwrap();
    let errs = errors(&coarse, 1, |g| {
        let m = MetricField::from_fn(g, perturbed_minkowski(7, 3, 0.1)).unwrap();
        covariant_derivative(m.components(), &m)
    });
    assert_second_order(&errs, 1e-11);
    let errs = errors(&coarse, 1, |g| {
        let m = MetricField::from_fn(g, perturbed_minkowski(7, 3, 0.1)).unwrap();
        covariant_derivative(&m.volume_form(Orientation::POSITIVE), &m)
    });
    assert_second_order(&errs, 1e-11);
}

#[test]
fn d_squared_vanishes_to_roundoff() {
    let grid = Grid::cube(4, -1.0, 1.0, 7).unwrap();
    for k in 0..3 {
        let a = trig_form(10 + k as u64, &grid, k, 1.0);
        let dd = exterior_derivative(&exterior_derivative(&a).unwrap()).unwrap();
        assert!(dd.field().max_abs() < 1e-11, "k = {k}: {}", dd.field().max_abs());
    }
    assert!(exterior_derivative(&trig_form(3, &grid, 4, 1.0)).is_err());
}

#[test]
fn exterior_derivative_of_scalar_is_gradient() {
    let grid = Grid::cube(3, -1.0, 1.0, 7).unwrap();
    let f = trig_form(5, &grid, 0, 1.0);
    let df = exterior_derivative(&f).unwrap();
    assert_eq!(df.field(), &f.field().gradient());
}

#[test]
fn codifferential_squares_to_zero_in_flat_space() {
    let grid = Grid::cube(4, -1.0, 1.0, 7).unwrap();
    let m = MetricField::minkowski(&grid, 1.5);
    let a = trig_form(21, &grid, 2, 1.0);
    let dd =
        codifferential(&codifferential(&a, &m, Orientation::POSITIVE).unwrap(), &m, Orientation::POSITIVE).unwrap();
    assert!(dd.field().max_abs() < 1e-10, "{}", dd.field().max_abs());
}

#[test]
fn codifferential_of_one_form_is_minus_divergence() {
    // δα = −div α♯ for 1-forms with this sign convention
    let coarse = Grid::cube(3, -1.0, 1.0, 9).unwrap();
    let errs = errors(&coarse, 2, |g| {
        let m = MetricField::from_fn(g, perturbed_minkowski(3, 3, 0.1)).unwrap();
        let a = trig_form(4, g, 1, 1.0);
        let delta = codifferential(&a, &m, Orientation::POSITIVE).unwrap();
        let sharp = TensorField::from_points(g, &[Slot::Up], |p, out| {
            out.copy_from_slice(&m.metric(p).raise(a.at(p)));
        });
        delta.add(&divergence(&sharp, &m).unwrap())
    });
    assert_second_order(&errs, 1e-11);
}

#[test]
fn lie_derivative_forms_agree() {
    let grid = Grid::cube(3, -1.0, 1.0, 9).unwrap();
    let m = MetricField::from_fn(&grid, perturbed_minkowski(11, 3, 0.15)).unwrap();
    let zeta = trig_tensor(12, &grid, &[Slot::Up], 1.0);
    for slots in [vec![], vec![Slot::Down], vec![Slot::Up, Slot::Down], vec![Slot::Down, Slot::Down, Slot::Up]] {
        let k = trig_tensor(13, &grid, &slots, 1.0);
        let a = lie_derivative(&zeta, &k).unwrap();
        let b = lie_derivative_covariant(&zeta, &k, &m).unwrap();
        let scale = 1.0 + a.field().max_abs();
        assert!(a.field().sub(b.field()).max_abs() < 1e-10 * scale, "{slots:?}");
    }
}

#[test]
fn lie_derivative_of_one_form_matches_cartan() {
    // £_ζα = i_ζ dα + d(i_ζ α), exact up to the FD product rule error
    let coarse = Grid::cube(3, -1.0, 1.0, 9).unwrap();
    let errs = errors(&coarse, 2, |g| {
        let zeta = trig_tensor(31, g, &[Slot::Up], 1.0);
        let a = trig_form(32, g, 1, 1.0);
        let da = exterior_derivative(&a).unwrap();
        let i_da = TensorField::from_forms(g, 1, |p| da.form_at(p).interior(zeta.at(p)).unwrap());
        let ia = TensorField::from_forms(g, 0, |p| a.form_at(p).interior(zeta.at(p)).unwrap());
        let cartan = i_da.add(&exterior_derivative(&ia).unwrap());
        lie_derivative(&zeta, &a).unwrap().sub(&cartan)
    });
    assert_second_order(&errs, 1e-11);
}

#[test]
fn boost_is_killing() {
    // ζ = x ∂_t + t ∂_x (c = 1) preserves η; linear data is differentiated exactly.
    let grid = Grid::cube(4, -1.0, 1.0, 5).unwrap();
    let m = MetricField::minkowski(&grid, 1.0);
    let zeta = TensorField::from_fn(&grid, &[Slot::Up], |x, z| {
        z.fill(0.0);
        z[0] = x[1];
        z[1] = x[0];
    });
    let l = lie_derivative(&zeta, m.components()).unwrap();
    assert!(l.field().max_abs() < 1e-12);
    let l = lie_derivative_covariant(&zeta, m.components(), &m).unwrap();
    assert!(l.field().max_abs() < 1e-12);
}

#[test]
fn hat_pairing_rejects_non_dual_slots() {
    let grid = Grid::cube(2, -1.0, 1.0, 5).unwrap();
    let k = trig_tensor(1, &grid, &[Slot::Down], 1.0);
    assert!(hat_pairing(&k, &k).is_err());
}

#[test]
fn lie_integration_by_parts_converges() {
    let coarse = Grid::cube(3, -1.0, 1.0, 17).unwrap();
    for slots in [vec![Slot::Down, Slot::Down], vec![Slot::Up, Slot::Down]] {
        let dual: Vec<Slot> = slots.iter().map(|s| s.flipped()).collect();
        let errs = errors(&coarse, 2, |g| {
            let zeta = trig_tensor(41, g, &[Slot::Up], 1.0);
            let k = trig_tensor(42, g, &slots, 1.0);
            let pi = trig_tensor(43, g, &dual, 1.0);
            TensorField::scalar(lie_lemma_residual(&zeta, &k, &pi).unwrap())
        });
        assert_second_order(&errs, 1e-11);
        let errs = errors(&coarse, 2, |g| {
            let m = MetricField::from_fn(g, perturbed_minkowski(44, 3, 0.1)).unwrap();
            let zeta = trig_tensor(41, g, &[Slot::Up], 1.0);
            let k = trig_tensor(42, g, &slots, 1.0);
            let pi = trig_tensor(43, g, &dual, 1.0);
            TensorField::scalar(lie_lemma_residual_covariant(&zeta, &k, &pi, &m).unwrap())
        });
        assert_second_order(&errs, 1e-11);
    }
}

#[test]
fn potential_field_integration_by_parts_converges() {
    let coarse = Grid::cube(3, -1.0, 1.0, 9).unwrap();
    let errs = errors(&coarse, 2, |g| {
        let m = MetricField::from_fn(g, perturbed_minkowski(51, 3, 0.1)).unwrap();
        let phi = trig_form(52, g, 0, 1.0).field().clone();
        let j = trig_tensor(53, g, &[Slot::Up], 1.0);
        let a = trig_form(54, g, 1, 1.0);
        crucial_lemma_residual(&phi, &j, &a, &m, Orientation::POSITIVE).unwrap()
    });
    assert_second_order(&errs, 1e-11);
}

#[test]
fn round_sphere_scalar_curvature() {
    // ultrastatic −dt² + r₀²dΩ²: R is that of the sphere, 2/r₀²
    let r0 = 1.7;
    let coarse = Grid::new(vec![Axis::frozen(0.0, 1.0, 5), Axis::new(0.6, 2.4, 9), Axis::frozen(0.0, 1.0, 5)]).unwrap();
    let errs = errors(&coarse, 2, |g| {
        let m = MetricField::from_fn(g, |x, out| {
            out.fill(0.0);
            out[0] = -1.0;
            out[4] = r0 * r0;
            out[8] = r0 * r0 * x[1].sin().powi(2);
        })
        .unwrap();
        let s = curvature(&m).scalar;
        TensorField::scalar(s.map(1, |v, o| o[0] = v[0] - 2.0 / (r0 * r0)))
    });
    assert_second_order(&errs, 1e-11);
}

#[test]
fn schwarzschild_is_vacuum() {
    let mass = 0.5;
    let coarse = Grid::new(vec![
        Axis::frozen(0.0, 1.0, 7),
        Axis::new(3.0, 6.0, 9),
        Axis::new(0.8, 2.2, 9),
        Axis::frozen(0.0, 1.0, 7),
    ])
    .unwrap();
    let errs = errors(&coarse, 2, |g| {
        let m = MetricField::from_fn(g, |x, out| {
            let (r, th) = (x[1], x[2]);
            let f = 1.0 - 2.0 * mass / r;
            out.fill(0.0);
            out[0] = -f;
            out[5] = 1.0 / f;
            out[10] = r * r;
            out[15] = (r * th.sin()).powi(2);
        })
        .unwrap();
        curvature(&m).einstein
    });
    assert_second_order(&errs, 1e-11);
}

#[test]
fn contracted_bianchi_converges() {
    let coarse = Grid::new(vec![
        Axis::new(-1.0, 1.0, 13),
        Axis::new(-1.0, 1.0, 13),
        Axis::frozen(0.0, 1.0, 5),
        Axis::frozen(0.0, 1.0, 5),
    ])
    .unwrap();
    let base = perturbed_minkowski(61, 2, 0.15);
    let errs = errors(&coarse, 3, |g| {
        let m = MetricField::from_fn(g, |x, out| {
            let mut h = [0.0; 4];
            base(&x[..2], &mut h);
            out.fill(0.0);
            out[0] = h[0];
            out[1] = h[1];
            out[4] = h[2];
            out[5] = h[3];
            out[10] = 1.0 + 0.2 * x[0].sin() * x[1].cos();
            out[15] = 1.0 + 0.1 * (x[0] + x[1]).cos();
        })
        .unwrap();
        bianchi_residual(&m)
    });
    assert_second_order(&errs, 1e-10);
}
