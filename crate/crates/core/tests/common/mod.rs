//! Independent oracles shared by the integration tests. None of these call
//! the routine they are used to check.
#![allow(dead_code)]

use dominion_core::linalg::{operator_norm, CMatrix};
use dominion_core::sampling::{complex_gaussian_matrix, gaussian, SampleRng};
use dominion_core::space::{FiberedSpace, WeightedSpace};
use num_complex::Complex64;
use rand::Rng;

/// Weighted projection onto `{x₁ ≥ x₂ ≥ … ≥ xₙ ≥ 0}` by enumerating every
/// active set of the `n` constraints. Exponential; meant for `n ≤ 8`.
pub fn monotone_projection_oracle(weights: &[f64], g: &[f64]) -> Vec<f64> {
    let n = g.len();
    let mut best: Option<(f64, Vec<f64>)> = None;
    for mask in 0u32..(1 << n) {
        // Constraint i < n-1 is x_i = x_{i+1}; constraint n-1 is x_{n-1} = 0.
        let mut x = vec![0.0; n];
        let mut start = 0;
        while start < n {
            let mut end = start;
            while end < n - 1 && mask & (1 << end) != 0 {
                end += 1;
            }
            let zeroed = end == n - 1 && mask & (1 << (n - 1)) != 0;
            let value = if zeroed {
                0.0
            } else {
                let w: f64 = weights[start..=end].iter().sum();
                (start..=end).map(|i| weights[i] * g[i]).sum::<f64>() / w
            };
            x[start..=end].fill(value);
            start = end + 1;
        }
        let feasible = x.windows(2).all(|p| p[0] >= p[1] - 1e-13) && x[n - 1] >= -1e-13;
        if !feasible {
            continue;
        }
        let obj: f64 = (0..n).map(|i| weights[i] * (x[i] - g[i]).powi(2)).sum();
        if best.as_ref().is_none_or(|(b, _)| obj < *b) {
            best = Some((obj, x));
        }
    }
    best.expect("the origin is always feasible").1
}

/// Projection onto `{(u, s) : |u| ≤ s}` by minimising
/// `φ(s) = (|u| - s)₊² + (s - w)²` over `s ≥ 0` piece by piece.
pub fn soc_oracle(u: &[Complex64], w: f64) -> (Vec<Complex64>, f64) {
    let n = u.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let phi = |s: f64| (n - s).max(0.0).powi(2) + (s - w).powi(2);
    let outer = w.max(n);
    let inner = (0.5 * (n + w)).clamp(0.0, n);
    let s = if phi(outer) <= phi(inner) { outer } else { inner };
    let scale = if n > 0.0 { (s / n).min(1.0) } else { 0.0 };
    (u.iter().map(|z| z * scale).collect(), s)
}

/// Projection onto `{(u, v) : v(x) ≥ |u(x)|}` over a fibered space, one
/// second-order cone per point.
pub fn bundle_c_oracle(space: &FiberedSpace, f1: &[Complex64], g: &[f64]) -> (Vec<Complex64>, Vec<f64>) {
    let mut u = Vec::with_capacity(f1.len());
    let mut v = Vec::with_capacity(g.len());
    for (x, gx) in g.iter().enumerate() {
        let (ux, vx) = soc_oracle(&f1[space.fiber_range(x)], *gx);
        u.extend(ux);
        v.push(vx);
    }
    (u, v)
}

/// Projection onto `{(u, s) : ‖u‖_m ≤ s}` in the weighted norm.
pub fn norm_c_oracle(space: &FiberedSpace, f1: &[Complex64], g: f64) -> (Vec<Complex64>, f64) {
    let root: Vec<f64> = space.component_weights().iter().map(|m| m.sqrt()).collect();
    let scaled: Vec<Complex64> = f1.iter().zip(&root).map(|(z, r)| z * r).collect();
    let (us, s) = soc_oracle(&scaled, g);
    (us.iter().zip(&root).map(|(z, r)| z / r).collect(), s)
}

/// `min_x (Σ_y Q_xy |f(y)| - |Σ_y P_xy f(y)|)` evaluated by direct loops.
pub fn domination_inequality(space: &FiberedSpace, p: &CMatrix, q: &CMatrix, f: &[Complex64]) -> f64 {
    let n = space.num_points();
    let fiber_norm = |v: &[Complex64]| v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let mut worst = f64::INFINITY;
    for x in 0..n {
        let rx = space.fiber_range(x);
        let mut acc = vec![Complex64::new(0.0, 0.0); rx.len()];
        let mut rhs = 0.0;
        for y in 0..n {
            let ry = space.fiber_range(y);
            rhs += q[(x, y)].re * fiber_norm(&f[ry.clone()]);
            for (i, r) in rx.clone().enumerate() {
                for c in ry.clone() {
                    acc[i] += p[(r, c)] * f[c];
                }
            }
        }
        worst = worst.min(rhs - fiber_norm(&acc));
    }
    worst
}

/// Nonincreasing rearrangement of `|f|` when source and target are the same
/// uniform grid: sort the moduli.
pub fn sorted_moduli(f: &[Complex64]) -> Vec<f64> {
    let mut m: Vec<f64> = f.iter().map(|z| z.norm()).collect();
    m.sort_by(|a, b| b.total_cmp(a));
    m
}

pub fn max_abs_diff_c(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Random fibered space with up to `max_points` points of random weight and
/// fibers of dimension up to `max_fiber`.
pub fn random_fibered(rng: &mut SampleRng, max_points: usize, max_fiber: usize) -> FiberedSpace {
    let n = rng.random_range(1..=max_points);
    let weights = (0..n).map(|_| rng.random_range(0.25..4.0)).collect();
    let dims = (0..n).map(|_| rng.random_range(1..=max_fiber)).collect();
    FiberedSpace::new(WeightedSpace::from_weights(weights).unwrap(), dims).unwrap()
}

/// `(P, Q)` with `Q ≥ 0` entrywise (about a fifth of the entries zero) and
/// every block of `P` rescaled to operator norm `Q_xy · U(lo, hi)`.
pub fn random_block_pair(rng: &mut SampleRng, space: &FiberedSpace, lo: f64, hi: f64) -> (CMatrix, CMatrix) {
    let n = space.num_points();
    let q = CMatrix::from_fn(n, n, |_, _| {
        if rng.random_bool(0.2) {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(gaussian(rng).abs(), 0.0)
        }
    });
    let d = space.dim();
    let mut p = CMatrix::zeros(d, d);
    for x in 0..n {
        for y in 0..n {
            let (rx, ry) = (space.fiber_range(x), space.fiber_range(y));
            let block = complex_gaussian_matrix(rng, rx.len(), ry.len());
            let sigma = operator_norm(&block);
            let target = q[(x, y)].re * rng.random_range(lo..hi);
            p.set_block(rx.start, ry.start, &block.scale_real(target / sigma));
        }
    }
    (p, q)
}
