//! Exact test of `S(P f) ≤ Q S(f)` for all `f` when `S` is a pointwise modulus.
//!
//! For the bundle modulus over a finite base the condition holds iff every
//! block satisfies `‖P_xy‖ ≤ Q_xy`: the triangle inequality gives one
//! direction, and `f = e_y ⊗ v` with `v` a top singular vector of `P_xy`
//! gives the other. The same argument with the weighted operator norm covers
//! the norm pairing.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{top_singular, CMatrix};
use crate::pairing::{abs_map, PairingSpec};
use crate::space::{complexify, realify, FiberedSpace};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlockWitness {
    pub x: usize,
    pub y: usize,
    /// `e_y ⊗ v`, violating the inequality at `x`.
    pub f: Vec<Complex64>,
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExactVerdict {
    pub holds: bool,
    /// `min_{x,y} (Q_xy - ‖P_xy‖)`; zero means tight.
    pub margin: f64,
    pub witness: Option<BlockWitness>,
}

fn real_scalar_matrix(q: &CMatrix, n: usize) -> Result<Vec<f64>> {
    if q.nrows() != n || q.ncols() != n {
        return Err(Error::ShapeMismatch(format!(
            "dominating matrix is {}x{}, expected {n}x{n}",
            q.nrows(),
            q.ncols()
        )));
    }
    realify(q.as_slice(), 1e-12 * (1.0 + q.max_abs()))
}

/// Blockwise criterion `Q_xy ≥ -tol` and `‖P_xy‖ ≤ Q_xy + tol`.
pub fn exact_bundle_domination(space: &FiberedSpace, p: &CMatrix, q: &CMatrix, tol: f64) -> Result<ExactVerdict> {
    let n = space.num_points();
    let d = space.dim();
    if p.nrows() != d || p.ncols() != d {
        return Err(Error::ShapeMismatch(format!(
            "dominated matrix is {}x{}, expected {d}x{d}",
            p.nrows(),
            p.ncols()
        )));
    }
    let q = real_scalar_matrix(q, n)?;
    let mut margin = f64::INFINITY;
    let mut worst = (0, 0, Vec::new());
    for x in 0..n {
        let rx = space.fiber_range(x);
        for y in 0..n {
            let ry = space.fiber_range(y);
            let block = p.block(rx.start, ry.start, rx.len(), ry.len());
            let (sigma, v) = top_singular(&block);
            let m = q[x * n + y] - sigma;
            if m < margin {
                margin = m;
                worst = (x, y, v);
            }
        }
    }
    let holds = margin >= -tol;
    let witness = (!holds).then(|| {
        let (x, y, v) = worst;
        let mut f = vec![Complex64::new(0.0, 0.0); d];
        f[space.fiber_range(y)].copy_from_slice(&v);
        BlockWitness { x, y, f, margin }
    });
    Ok(ExactVerdict { holds, margin, witness })
}

/// Exact domination test for the pairings that admit one.
pub fn exact_domination(s: &PairingSpec, p: &CMatrix, q: &CMatrix, tol: f64) -> Result<ExactVerdict> {
    match s {
        PairingSpec::BundleModulus { domain, .. } => exact_bundle_domination(domain, p, q, tol),
        PairingSpec::LatticeAbs { domain } => {
            // Real vectors only; a complex P would leave the real space.
            realify(p.as_slice(), 1e-12 * (1.0 + p.max_abs()))?;
            exact_bundle_domination(domain, p, q, tol)
        }
        PairingSpec::NormPairing { domain, .. } => {
            let d = domain.dim();
            if p.nrows() != d || p.ncols() != d {
                return Err(Error::ShapeMismatch(format!("dominated matrix must be {d}x{d}")));
            }
            let q = real_scalar_matrix(q, 1)?[0];
            let root: Vec<f64> = domain.component_weights().iter().map(|m| m.sqrt()).collect();
            let inv: Vec<f64> = root.iter().map(|r| 1.0 / r).collect();
            let (sigma, v) = top_singular(&p.diag_sandwich(&root, &inv));
            let margin = q - sigma;
            let holds = margin >= -tol;
            let witness = (!holds).then(|| BlockWitness {
                x: 0,
                y: 0,
                f: v.iter().zip(&inv).map(|(z, r)| z * r).collect(),
                margin,
            });
            Ok(ExactVerdict { holds, margin, witness })
        }
        PairingSpec::Rearrangement { .. } => Err(Error::PairingUnavailable(s.name())),
    }
}

/// `min_x (Q S(f) - S(P f))(x)`: the sampled form of the domination inequality.
pub fn domination_margin_at(s: &PairingSpec, p: &CMatrix, q: &CMatrix, f: &[Complex64]) -> Result<f64> {
    let lhs = abs_map(s, &p.mul_vec(f))?;
    let sf = abs_map(s, f)?;
    let qsf = realify(&q.mul_vec(&complexify(&sf)), 1e-9 * (1.0 + q.max_abs()))?;
    Ok(qsf.iter().zip(&lhs).map(|(a, b)| a - b).fold(f64::INFINITY, f64::min))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::WeightedSpace;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn self_domination_of_positive_matrix() {
        let space = FiberedSpace::scalar(WeightedSpace::uniform(2).unwrap());
        let p = CMatrix::from_real(2, 2, &[0.6, 0.4, 0.4, 0.6]).unwrap();
        let v = exact_bundle_domination(&space, &p, &p, 1e-12).unwrap();
        assert!(v.holds);
        assert_eq!(v.margin, 0.0);
    }

    #[test]
    fn single_block_violation() {
        let base = WeightedSpace::uniform(2).unwrap();
        let space = FiberedSpace::new(base, vec![2, 2]).unwrap();
        let mut p = CMatrix::zeros(4, 4);
        p[(0, 2)] = c(2.0);
        let q = CMatrix::from_real(2, 2, &[1.0, 1.0, 1.0, 1.0]).unwrap();
        let v = exact_bundle_domination(&space, &p, &q, 1e-12).unwrap();
        assert!(!v.holds);
        let w = v.witness.unwrap();
        assert_eq!((w.x, w.y), (0, 1));
        assert!((w.margin + 1.0).abs() < 1e-12);
        assert!(w.f[..2].iter().all(|z| z.norm() == 0.0));
        let s = PairingSpec::bundle(space);
        assert!(domination_margin_at(&s, &p, &q, &w.f).unwrap() < -0.99);
    }

    #[test]
    fn zero_is_dominated_by_nonnegative() {
        let space = FiberedSpace::scalar(WeightedSpace::uniform(3).unwrap());
        let q = CMatrix::from_real(3, 3, &[0.0, 1.0, 2.0, 0.5, 0.0, 0.0, 1.0, 1.0, 1.0]).unwrap();
        assert!(exact_bundle_domination(&space, &CMatrix::zeros(3, 3), &q, 0.0).unwrap().holds);
    }

    #[test]
    fn norm_pairing_uses_weighted_norm() {
        let base = WeightedSpace::from_weights(vec![4.0, 1.0]).unwrap();
        let s = PairingSpec::norm_pairing(FiberedSpace::scalar(base));
        // Maps e_1 to e_0; in the weighted norm this has norm 2.
        let mut p = CMatrix::zeros(2, 2);
        p[(0, 1)] = c(1.0);
        let q = CMatrix::from_real(1, 1, &[1.5]).unwrap();
        let v = exact_domination(&s, &p, &q, 1e-12).unwrap();
        assert!(!v.holds);
        assert!((v.margin + 0.5).abs() < 1e-12);
        let f = v.witness.unwrap().f;
        assert!(domination_margin_at(&s, &p, &q, &f).unwrap() < 0.0);
    }
}
