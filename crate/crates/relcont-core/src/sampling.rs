//! Seeded random inputs for property checks: Lorentzian metrics, observers,
//! forms, smooth trigonometric fields and whole smooth grid states.

use crate::calculus::{MetricField, TensorField};
use crate::em::normalize_velocity;
use crate::grid::{Field, Grid};
use crate::sem::FieldState;
use crate::tensor::index::{combinations, pow_usize};
use crate::tensor::{Form, Metric, Slot, Tensor};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type CheckRng = ChaCha8Rng;

pub fn rng(seed: u64) -> CheckRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform(rng: &mut CheckRng, lo: f64, hi: f64) -> f64 {
    rng.gen_range(lo..hi)
}

pub fn random_vec(rng: &mut CheckRng, n: usize, scale: f64) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-scale..scale)).collect()
}

/// g = Λᵀ diag(−c², 1, …) Λ with Λ = I + perturbation of size `spread`.
pub fn random_metric(rng: &mut CheckRng, dim: usize, c: f64, spread: f64) -> Metric {
    loop {
        let lam: Vec<f64> = (0..dim * dim)
            .map(|i| if i / dim == i % dim { 1.0 } else { 0.0 } + rng.gen_range(-spread..spread))
            .collect();
        let eta = |a: usize| if a == 0 { -c * c } else { 1.0 };
        let mut g = vec![0.0; dim * dim];
        for a in 0..dim {
            for b in 0..dim {
                g[a * dim + b] = (0..dim).map(|m| lam[m * dim + a] * eta(m) * lam[m * dim + b]).sum();
            }
        }
        if let Ok(m) = Metric::new(dim, &g) {
            // reject near-degenerate draws: identities then lose ~κ² digits
            let max = |f: &dyn Fn(usize, usize) -> f64| {
                (0..dim * dim).map(|i| f(i / dim, i % dim).abs()).fold(0.0f64, f64::max)
            };
            let kappa = max(&|a, b| m.g(a, b)) * max(&|a, b| m.ginv(a, b));
            if kappa <= 50.0 * (c * c).max(1.0 / (c * c)) {
                return m;
            }
        }
    }
}

/// Future-directed-ish unit timelike vector, g(u,u) = −c².
pub fn random_observer(rng: &mut CheckRng, g: &Metric, c: f64, boost: f64) -> Vec<f64> {
    let d = g.dim();
    loop {
        let mut w = random_vec(rng, d, boost);
        w[0] = 1.0 / c.max(1e-300) * (1.0 + w[0].abs());
        let n2 = g.dot(&w, &w);
        // bounded away from null (γ ≲ 5): near-null draws only measure round-off
        if n2 < -0.04 * c * c * w[0] * w[0] {
            let s = c / (-n2).sqrt();
            return w.iter().map(|v| v * s).collect();
        }
    }
}

pub fn random_form(rng: &mut CheckRng, dim: usize, deg: usize, scale: f64) -> Form {
    Form::from_fn(dim, deg, |_| rng.gen_range(-scale..scale))
}

/// Random form annihilated by i_u: α − u♭∧(i_uα)/g(u,u).
pub fn random_transverse_form(rng: &mut CheckRng, g: &Metric, u: &[f64], deg: usize, scale: f64) -> Form {
    let alpha = random_form(rng, g.dim(), deg, scale);
    project_transverse(&alpha, g, u)
}

pub fn project_transverse(alpha: &Form, g: &Metric, u: &[f64]) -> Form {
    if alpha.deg() == 0 {
        return alpha.clone();
    }
    let ub = Form::covector(&g.lower(u));
    let iu = alpha.interior(u).expect("degree ≥ 1");
    let corr = ub.wedge(&iu).expect("degree fits");
    alpha.axpy(-1.0 / g.dot(u, u), &corr)
}

/// Sum of a few products of sines, with random amplitudes, frequencies and
/// phases; smooth and cheap to evaluate with exact derivatives.
#[derive(Clone, Debug)]
pub struct TrigField {
    terms: Vec<(f64, Vec<f64>, f64)>,
    offset: f64,
}

impl TrigField {
    pub fn random(rng: &mut CheckRng, dim: usize, nterms: usize, freq: (f64, f64), amp: f64) -> TrigField {
        let terms = (0..nterms)
            .map(|_| {
                let a = rng.gen_range(-amp..amp);
                let k = (0..dim)
                    .map(|_| {
                        let m = rng.gen_range(freq.0..freq.1);
                        if rng.gen_bool(0.5) {
                            m
                        } else {
                            -m
                        }
                    })
                    .collect();
                let phase = rng.gen_range(0.0..std::f64::consts::TAU);
                (a, k, phase)
            })
            .collect();
        TrigField { terms, offset: rng.gen_range(-amp..amp) }
    }

    pub fn with_offset(mut self, offset: f64) -> TrigField {
        self.offset = offset;
        self
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.offset
            + self
                .terms
                .iter()
                .map(|(a, k, ph)| a * (k.iter().zip(x).map(|(k, x)| k * x).sum::<f64>() + ph).sin())
                .sum::<f64>()
    }

    pub fn grad(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; x.len()];
        for (a, k, ph) in &self.terms {
            let c = a * (k.iter().zip(x).map(|(k, x)| k * x).sum::<f64>() + ph).cos();
            for (o, ki) in out.iter_mut().zip(k) {
                *o += c * ki;
            }
        }
        out
    }
}

/// Symmetric, positive, u-transverse (0,2) tensor: the radar metric plus a sum
/// of squares of random transverse covectors.
pub fn random_cauchy(rng: &mut CheckRng, g: &Metric, u: &[f64], c: f64, scale: f64) -> Tensor {
    let d = g.dim();
    let uf = g.lower(u);
    let mut t = Tensor::from_fn(d, &[Slot::Down, Slot::Down], |i| g.g(i[0], i[1]) + uf[i[0]] * uf[i[1]] / (c * c));
    for _ in 0..2 {
        let a = random_transverse_form(rng, g, u, 1, scale);
        let a = a.data();
        t = t.add(&Tensor::from_fn(d, &[Slot::Down, Slot::Down], |i| a[i[0]] * a[i[1]]));
    }
    t
}

/// Componentwise metric η + h with Minkowski η = diag(−c², 1, …) and a
/// symmetric smooth perturbation h of amplitude `amp`.
pub fn smooth_metric(seed: u64, dim: usize, c: f64, amp: f64) -> impl Fn(&[f64], &mut [f64]) + Sync + Send {
    let mut r = rng(seed);
    let h: Vec<TrigField> = (0..dim * dim).map(|_| TrigField::random(&mut r, dim, 2, (0.5, 1.5), amp)).collect();
    move |x: &[f64], g: &mut [f64]| {
        for a in 0..dim {
            for b in 0..dim {
                let eta = match (a, b) {
                    (0, 0) => -c * c,
                    _ if a == b => 1.0,
                    _ => 0.0,
                };
                g[a * dim + b] = eta + 0.5 * (h[a * dim + b].eval(x) + h[b * dim + a].eval(x));
            }
        }
    }
}

/// Maps a point to the one its fields are evaluated at: frozen (symmetry)
/// coordinates are pinned to the axis origin, so smooth fields built on the
/// grid are constant along them.
pub fn pinned(grid: &Grid) -> impl Fn(&[f64]) -> Vec<f64> + Sync + Send {
    let pins: Vec<Option<f64>> = grid.axes().iter().map(|a| a.frozen.then_some(a.lo)).collect();
    move |x: &[f64]| x.iter().zip(&pins).map(|(x, p)| p.unwrap_or(*x)).collect()
}

/// Smooth tensor field with independent trigonometric components.
pub fn smooth_tensor(seed: u64, grid: &Grid, slots: &[Slot], amp: f64) -> TensorField {
    let d = grid.dim();
    let mut r = rng(seed);
    let comps: Vec<TrigField> =
        (0..pow_usize(d, slots.len())).map(|_| TrigField::random(&mut r, d, 2, (0.5, 1.5), amp)).collect();
    let pin = pinned(grid);
    TensorField::from_fn(grid, slots, move |x, out| {
        let x = pin(x);
        for (o, f) in out.iter_mut().zip(&comps) {
            *o = f.eval(&x);
        }
    })
}

/// Smooth k-form field with independent trigonometric components.
pub fn smooth_form(seed: u64, grid: &Grid, deg: usize, amp: f64) -> TensorField {
    let d = grid.dim();
    let mut r = rng(seed);
    let comps: Vec<TrigField> =
        (0..combinations(d, deg).len()).map(|_| TrigField::random(&mut r, d, 2, (0.5, 1.5), amp)).collect();
    let pin = pinned(grid);
    TensorField::from_forms(grid, deg, move |p| {
        let x = pin(&grid.point(p));
        Form::from_increasing(d, deg, &comps.iter().map(|f| f.eval(&x)).collect::<Vec<_>>())
    })
}

/// u = normalize(∂₀ + small smooth spatial part).
pub fn smooth_velocity(seed: u64, grid: &Grid, m: &MetricField, c: f64, amp: f64) -> TensorField {
    let d = grid.dim();
    let mut r = rng(seed);
    let comps: Vec<TrigField> = (1..d).map(|_| TrigField::random(&mut r, d, 2, (0.5, 1.5), amp)).collect();
    let pin = pinned(grid);
    let w = TensorField::from_fn(grid, &[Slot::Up], move |x, out| {
        let x = pin(x);
        out[0] = 1.0;
        for (o, f) in out[1..].iter_mut().zip(&comps) {
            *o = f.eval(&x);
        }
    });
    normalize_velocity(&w, m, c).expect("small perturbations of the rest frame stay timelike")
}

/// F = dA for a smooth trigonometric potential, with exact derivatives.
pub fn closed_faraday(seed: u64, grid: &Grid, amp: f64) -> TensorField {
    let d = grid.dim();
    let mut r = rng(seed);
    let a: Vec<TrigField> = (0..d).map(|_| TrigField::random(&mut r, d, 2, (0.5, 1.5), amp)).collect();
    let pin = pinned(grid);
    let frozen: Vec<bool> = grid.axes().iter().map(|a| a.frozen).collect();
    TensorField::from_fn(grid, &[Slot::Down, Slot::Down], move |x, out| {
        let x = pin(x);
        let grads: Vec<Vec<f64>> = a
            .iter()
            .map(|f| f.grad(&x).into_iter().zip(&frozen).map(|(g, &fr)| if fr { 0.0 } else { g }).collect())
            .collect();
        for i in 0..d {
            for j in 0..d {
                out[i * d + j] = grads[j][i] - grads[i][j];
            }
        }
    })
}

/// Smooth grid state off any solution, constant along frozen axes: perturbed metric, ρ ≈ 1, s ≈ ½,
/// nearly static u and closed F. Used for identities that hold for arbitrary
/// fields (balance projections, ponderomotive writing, gauge invariance).
pub fn smooth_state(seed: u64, grid: &Grid, c: f64, q: f64) -> FieldState {
    let d = grid.dim();
    let (g, pin) = (smooth_metric(seed, d, c, 0.05), pinned(grid));
    let metric = MetricField::from_fn(grid, move |x, out| g(&pin(x), out)).expect("small perturbation of Minkowski");
    let mut r = rng(seed + 1);
    let scalar = |base: f64, f: TrigField| {
        let pin = pinned(grid);
        Field::from_fn(grid, 1, move |x, out| out[0] = base + f.eval(&pin(x)))
    };
    let rho = scalar(1.0, TrigField::random(&mut r, d, 2, (0.5, 1.5), 0.2));
    let s = scalar(0.5, TrigField::random(&mut r, d, 2, (0.5, 1.5), 0.1));
    let u = smooth_velocity(seed + 2, grid, &metric, c, 0.2);
    let f = closed_faraday(seed + 3, grid, 0.4);
    FieldState { metric, rho, s, u, f, cauchy: None, q, c }
}
