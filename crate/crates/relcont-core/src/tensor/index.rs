//! Index bookkeeping shared by the dense tensor and form types.

use std::sync::OnceLock;

/// Largest supported spacetime dimension n+1.
pub const MAX_DIM: usize = 6;

struct Tables {
    /// combos[d][k]: increasing k-subsets of 0..d in lexicographic order
    combos: Vec<Vec<Vec<Vec<usize>>>>,
    /// perms[k]: (permutation of 0..k, sign)
    perms: Vec<Vec<(Vec<usize>, f64)>>,
}

fn tables() -> &'static Tables {
    static T: OnceLock<Tables> = OnceLock::new();
    T.get_or_init(|| {
        let mut combos = Vec::new();
        for d in 0..=MAX_DIM {
            let mut by_k = vec![Vec::new(); d + 1];
            for mask in 0u32..(1 << d) {
                let set: Vec<usize> = (0..d).filter(|i| mask & (1 << i) != 0).collect();
                by_k[set.len()].push(set);
            }
            for v in by_k.iter_mut() {
                v.sort();
            }
            combos.push(by_k);
        }
        let mut perms = Vec::new();
        for k in 0..=MAX_DIM {
            let mut out = Vec::new();
            let mut p: Vec<usize> = (0..k).collect();
            permute(&mut p, 0, &mut out);
            out.sort_by(|a, b| a.0.cmp(&b.0));
            perms.push(out);
        }
        Tables { combos, perms }
    })
}

fn permute(p: &mut Vec<usize>, start: usize, out: &mut Vec<(Vec<usize>, f64)>) {
    if start == p.len() {
        out.push((p.clone(), perm_sign(p)));
        return;
    }
    for i in start..p.len() {
        p.swap(start, i);
        permute(p, start + 1, out);
        p.swap(start, i);
    }
}

/// Increasing k-element subsets of `0..d`.
pub fn combinations(d: usize, k: usize) -> &'static [Vec<usize>] {
    assert!(d <= MAX_DIM, "dimension {d} exceeds MAX_DIM = {MAX_DIM}");
    if k > d {
        return &[];
    }
    &tables().combos[d][k]
}

/// All permutations of `0..k` with their signs.
pub fn permutations(k: usize) -> &'static [(Vec<usize>, f64)] {
    &tables().perms[k]
}

/// Sign of the permutation sorting `idx`; 0 if an index repeats.
pub fn perm_sign(idx: &[usize]) -> f64 {
    let mut sign = 1.0;
    for i in 0..idx.len() {
        for j in i + 1..idx.len() {
            if idx[i] == idx[j] {
                return 0.0;
            }
            if idx[i] > idx[j] {
                sign = -sign;
            }
        }
    }
    sign
}

/// Row-major linear offset of a multi-index in a `d^rank` array.
#[inline]
pub fn linear(idx: &[usize], d: usize) -> usize {
    idx.iter().fold(0, |acc, &i| acc * d + i)
}

/// Inverse of [`linear`].
pub fn unlinear(mut lin: usize, d: usize, rank: usize, out: &mut [usize]) {
    for slot in (0..rank).rev() {
        out[slot] = lin % d;
        lin /= d;
    }
}

/// Increasing complement of an increasing index set in `0..d`.
pub fn complement(set: &[usize], d: usize) -> Vec<usize> {
    (0..d).filter(|i| !set.contains(i)).collect()
}

pub fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

pub fn pow_usize(d: usize, k: usize) -> usize {
    d.pow(k as u32)
}
