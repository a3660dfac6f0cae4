use super::*;
use crate::sampling::{random_metric, random_observer, random_transverse_form, rng, uniform};
use proptest::prelude::*;

const O: Orientation = Orientation::POSITIVE;

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol * (1.0 + x.abs().max(y.abs())))
}

fn levi_civita(idx: &[usize]) -> f64 {
    let mut s = 1.0;
    for i in 0..idx.len() {
        for j in i + 1..idx.len() {
            if idx[i] == idx[j] {
                return 0.0;
            }
            if idx[i] > idx[j] {
                s = -s;
            }
        }
    }
    s
}

struct Setup {
    g: Metric,
    obs: Observer,
    split: EbSplit,
}

fn setup(seed: u64, dim: usize) -> Setup {
    let mut r = rng(seed);
    let c = uniform(&mut r, 0.5, 2.0);
    let g = random_metric(&mut r, dim, c, 0.3);
    let u = random_observer(&mut r, &g, c, 0.8);
    let obs = Observer::new(&g, &u, c).unwrap();
    let e = random_transverse_form(&mut r, &g, &u, 1, 1.0);
    let b = random_transverse_form(&mut r, &g, &u, dim - 3, 1.0);
    Setup { g, obs, split: EbSplit { e, b } }
}

#[test]
fn normalization_examples() {
    let g = Metric::minkowski(4, 1.0);
    let o = Observer::normalize(&g, &[2.0, 0.0, 0.0, 0.0], 1.0).unwrap();
    assert!(close(o.u(), &[1.0, 0.0, 0.0, 0.0], 1e-15));
    let o = Observer::normalize(&g, &[1.0, 0.5, 0.0, 0.0], 1.0).unwrap();
    assert!((g.dot(o.u(), o.u()) + 1.0).abs() < 1e-12);
    let gamma = 1.0 / (1.0f64 - 0.25).sqrt();
    assert!(close(o.u(), &[gamma, 0.5 * gamma, 0.0, 0.0], 1e-14));
    assert!(matches!(Observer::normalize(&g, &[0.5, 1.0, 0.0, 0.0], 1.0), Err(EmError::NotTimelike { .. })));
    assert!(Observer::new(&g, &[2.0, 0.0, 0.0, 0.0], 1.0).is_err());
    assert!(Observer::normalize(&g, &[1.0, 0.0, 0.0, 0.0], 0.0).is_err());
}

#[test]
fn velocity_field_error_names_the_point() {
    use crate::grid::Grid;
    let grid = Grid::cube(2, -1.0, 1.0, 5).unwrap();
    let m = MetricField::minkowski(&grid, 1.0);
    let w = TensorField::from_fn(&grid, &[Slot::Up], |x, out| {
        out[0] = 1.0;
        out[1] = 2.0 * x[0];
    });
    match normalize_velocity(&w, &m, 1.0) {
        Err(EmError::NotTimelike { point: Some(p), .. }) => assert!(p[0].abs() >= 0.5, "{p:?}"),
        other => panic!("{other:?}"),
    }
    let w = TensorField::from_fn(&grid, &[Slot::Up], |x, out| {
        out[0] = 2.0;
        out[1] = 0.5 * x[1];
    });
    let u = normalize_velocity(&w, &m, 1.0).unwrap();
    for p in 0..grid.len() {
        assert!((m.metric(p).dot(u.at(p), u.at(p)) + 1.0).abs() < 1e-12);
    }
}

#[test]
fn projection_examples() {
    let g = Metric::minkowski(4, 1.0);
    let obs = Observer::static_frame(&g, 1.0).unwrap();
    let p = obs.projection();
    let expect = Tensor::from_fn(4, &[Slot::Up, Slot::Down], |i| if i[0] == i[1] && i[0] > 0 { 1.0 } else { 0.0 });
    assert!(p.dist(&expect) < 1e-15);
    for seed in 0..20 {
        let s = setup(seed, 4);
        let p = s.obs.projection();
        let pu: Vec<f64> = (0..4).map(|a| (0..4).map(|b| p.get(&[a, b]) * s.obs.u()[b]).sum()).collect();
        assert!(pu.iter().all(|v| v.abs() < 1e-12), "{pu:?}");
        let p2 = Tensor::from_fn(4, &[Slot::Up, Slot::Down], |i| {
            (0..4).map(|k| p.get(&[i[0], k]) * p.get(&[k, i[1]])).sum()
        });
        assert!(p2.dist(&p) < 1e-12 * (1.0 + p.max_abs()).powi(2), "{} {}", p2.dist(&p), p.max_abs());
        // p is P lowered
        let lowered = p.lower_index(0, &s.g).unwrap();
        assert!(lowered.dist(&s.obs.radar_metric(&s.g)) < 1e-12);
    }
}

#[test]
fn purely_electric_field() {
    for seed in 0..10 {
        let s = setup(seed, 4);
        let ub = s.obs.u_flat_form();
        let f = ub.wedge(&s.split.e).unwrap().scale(1.0 / s.obs.c());
        let out = eb_decompose(&f, &s.obs, &s.g, O);
        assert!(out.e.dist(&s.split.e) < 1e-12);
        assert!(out.b.max_abs() < 1e-12);
        assert!((maxwell_lagrangian(&f, &s.g) - 0.5 * s.split.e.norm2(&s.g)).abs() < 1e-12);
    }
    let g = Metric::minkowski(4, 1.0);
    let obs = Observer::static_frame(&g, 1.0).unwrap();
    let zero = eb_decompose(&Form::zero(4, 2), &obs, &g, O);
    assert_eq!(zero.e.max_abs() + zero.b.max_abs(), 0.0);
}

#[test]
fn reconstruct_unit_electric_field() {
    // u = ∂₀, u♭ = −c² dx⁰, so F = (1/c) u♭∧dx¹ = −c dx⁰∧dx¹.
    let c = 2.0;
    let g = Metric::minkowski(4, c);
    let obs = Observer::static_frame(&g, c).unwrap();
    let split = EbSplit { e: Form::covector(&[0.0, 1.0, 0.0, 0.0]), b: Form::zero(4, 1) };
    let f = eb_reconstruct(&split, &obs, &g, O).unwrap();
    for i in 0..4 {
        for j in 0..4 {
            let expect = match (i, j) {
                (0, 1) => -c,
                (1, 0) => c,
                _ => 0.0,
            };
            assert_eq!(f.get(&[i, j]), expect);
        }
    }
    let zero = EbSplit { e: Form::zero(4, 1), b: Form::zero(4, 1) };
    assert_eq!(eb_reconstruct(&zero, &obs, &g, O).unwrap().max_abs(), 0.0);
    let bad = EbSplit { e: Form::covector(&[1.0, 0.0, 0.0, 0.0]), b: Form::zero(4, 1) };
    assert!(matches!(eb_reconstruct(&bad, &obs, &g, O), Err(EmError::NotTransverse { .. })));
}

#[test]
fn maxwell_field_derivative_gives_vacuum_relations() {
    for dim in 3..=6 {
        for seed in 0..5 {
            let s = setup(seed + 100 * dim as u64, dim);
            let f = eb_reconstruct(&s.split, &s.obs, &s.g, O).unwrap();
            let theta = f.hodge(&s.g, O).scale(-1.0);
            let dh = dh_extract(&theta, &s.obs, &s.g, O);
            assert!(dh.d.dist(&s.split.e) < 1e-11, "dim {dim}");
            assert!(dh.h.dist(&s.split.b) < 1e-11, "dim {dim}");
            // the bivector incarnation is −F♯
            let biv = field_derivative_bivector(&dh, &s.obs, &s.g, O);
            assert!(biv.dist(&f.sharp(&s.g).scale(-1.0)) < 1e-10, "dim {dim}");
        }
    }
    let g = Metric::minkowski(4, 1.0);
    let obs = Observer::static_frame(&g, 1.0).unwrap();
    let z = dh_extract(&Form::zero(4, 3), &obs, &g, O);
    assert_eq!(z.d.max_abs() + z.h.max_abs(), 0.0);
}

#[test]
fn null_plane_wave_has_zero_lagrangian() {
    let g = Metric::minkowski(4, 1.0);
    let obs = Observer::static_frame(&g, 1.0).unwrap();
    let split = EbSplit { e: Form::covector(&[0.0, 1.0, 0.0, 0.0]), b: Form::covector(&[0.0, 0.0, 1.0, 0.0]) };
    let f = eb_reconstruct(&split, &obs, &g, O).unwrap();
    assert!(maxwell_lagrangian(&f, &g).abs() < 1e-15);
    assert_eq!(maxwell_lagrangian(&Form::zero(4, 2), &g), 0.0);
}

#[test]
fn poynting_componentwise_oracle() {
    // S_c = (−1)^n (1/c) E^b u^a (B♯)^d μ_{d a b c}, expanded with the
    // Levi-Civita symbol in Minkowski (√|g| = c).
    let c = 1.0;
    let g = Metric::minkowski(4, c);
    let obs = Observer::static_frame(&g, c).unwrap();
    let e = Form::covector(&[0.0, 1.0, 0.0, 0.0]);
    let b = Form::covector(&[0.0, 0.0, 1.0, 0.0]);
    let s = poynting(&e, &b.sharp(&g), &obs, &g, O);
    let (es, us, bs) = (g.raise(e.data()), obs.u().to_vec(), g.raise(b.data()));
    for cc in 0..4 {
        let mut oracle = 0.0;
        for a in 0..4 {
            for bb in 0..4 {
                for d in 0..4 {
                    oracle += es[bb] * us[a] * bs[d] * levi_civita(&[d, a, bb, cc]) * c;
                }
            }
        }
        oracle *= -1.0 / c;
        assert!((s.data()[cc] - oracle).abs() < 1e-14, "component {cc}");
    }
    // E×B direction: only the x³ component survives
    assert!(s.data()[3].abs() == 1.0 && s.data()[..3].iter().all(|v| *v == 0.0));
    let zero = poynting(&Form::zero(4, 1), &b.sharp(&g), &obs, &g, O);
    assert_eq!(zero.max_abs(), 0.0);
}

#[test]
fn maxwell_sem_forms_agree() {
    for dim in 3..=6 {
        for seed in 0..10 {
            let s = setup(seed + 1000 * dim as u64, dim);
            let f = eb_reconstruct(&s.split, &s.obs, &s.g, O).unwrap();
            let t = maxwell_sem(&f, &s.g);
            let t_eb = maxwell_sem_eb(&s.split, &s.obs, &s.g, O);
            assert!(t.dist(&t_eb) < 1e-12 * (1.0 + t.max_abs()), "dim {dim}: {}", t.dist(&t_eb));
            assert!(t.lower_index(0, &s.g).unwrap().asymmetry() < 1e-12 * (1.0 + t.max_abs()));
            assert!(s.obs.transverse_residual(&maxwell_poynting(&s.split, &s.obs, &s.g, O)) < 1e-12);
            if dim == 4 {
                assert!(t.trace().abs() < 1e-12 * (1.0 + t.max_abs()));
            }
        }
    }
}

#[test]
fn electric_energy_density() {
    let g = Metric::minkowski(4, 1.0);
    let obs = Observer::static_frame(&g, 1.0).unwrap();
    let split = EbSplit { e: Form::covector(&[0.0, 1.0, 0.0, 0.0]), b: Form::zero(4, 1) };
    let f = eb_reconstruct(&split, &obs, &g, O).unwrap();
    let t = maxwell_sem(&f, &g);
    assert!((observed_energy(&t, &obs) - 0.5).abs() < 1e-15);
    assert!((t.get(&[0, 0]) + 0.5).abs() < 1e-15);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eb_round_trip(seed in any::<u64>(), dim in 3usize..=6) {
        let s = setup(seed, dim);
        let f = eb_reconstruct(&s.split, &s.obs, &s.g, O).unwrap();
        let back = eb_decompose(&f, &s.obs, &s.g, O);
        // strongly boosted observers give large transverse components; compare relatively
        let scale = 1.0 + s.split.e.max_abs().max(s.split.b.max_abs());
        prop_assert!(back.e.dist(&s.split.e) < 1e-11 * scale);
        prop_assert!(back.b.dist(&s.split.b) < 1e-11 * scale);
        let f2 = eb_reconstruct(&back, &s.obs, &s.g, O).unwrap();
        prop_assert!(f2.dist(&f) < 1e-11 * (1.0 + f.max_abs()));
        let (e2, b2) = (s.split.e.norm2(&s.g), s.split.b.norm2(&s.g));
        prop_assert!((maxwell_lagrangian(&f, &s.g) - 0.5 * (e2 - b2)).abs() < 1e-11 * (1.0 + e2.abs() + b2.abs()));
    }

    #[test]
    fn dh_round_trip_and_bivector(seed in any::<u64>(), dim in 3usize..=6) {
        let mut r = rng(seed);
        let s = setup(seed ^ 0x5eed, dim);
        let theta = crate::sampling::random_form(&mut r, dim, dim - 2, 1.0);
        let dh = dh_extract(&theta, &s.obs, &s.g, O);
        let scale = (1.0 + s.obs.u().iter().fold(0.0f64, |a, x| a.max(x.abs()))) * (1.0 + dh.d.max_abs().max(dh.h.max_abs()));
        prop_assert!(s.obs.transverse_residual(&dh.d) < 1e-11 * scale);
        prop_assert!(s.obs.transverse_residual(&dh.h) < 1e-11 * scale);
        let back = dh_assemble(&dh, &s.obs, &s.g, O).unwrap();
        prop_assert!(back.dist(&theta) < 1e-11 * (1.0 + theta.max_abs()));
        let biv = field_derivative_bivector(&dh, &s.obs, &s.g, O);
        prop_assert!(biv.into_volume(&s.g, O).dist(&back) < 1e-11 * (1.0 + theta.max_abs()));
    }
}
