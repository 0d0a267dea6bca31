//! The closed convex set `C = {(u, v) : v - S(u) ∈ K₊°}` in `H ⊕ K`.

use num_complex::Complex64;
use serde::Serialize;

use super::OperatorForm;
use crate::error::{Error, Result};
use crate::linalg::top_singular;
use crate::ordered::{
    cone_contains, cone_leq, dual_margin, dual_project, join, meet, pos, DEFAULT_TOL,
};
use crate::pairing::{abs_map, pair, project_c_soc, random_domain, PairingSpec};
use crate::sampling::{derive_seed, gaussian_vec, substream};
use crate::space::{complexify, realify};
use crate::vector::{add, cscale_real, scale, sub};

#[derive(Debug, Clone, PartialEq)]
pub struct ConvexSetC {
    pairing: PairingSpec,
}

impl ConvexSetC {
    pub fn new(pairing: PairingSpec) -> Self {
        Self { pairing }
    }

    pub fn pairing(&self) -> &PairingSpec {
        &self.pairing
    }

    /// `dual_margin(v - S(u))`, nonnegative iff `(u, v) ∈ C`.
    pub fn margin(&self, u: &[Complex64], v: &[f64]) -> Result<f64> {
        let s = abs_map(&self.pairing, u)?;
        dual_margin(&self.pairing.target_cone(), &sub(v, &s))
    }

    pub fn contains(&self, u: &[Complex64], v: &[f64], tol: f64) -> Result<bool> {
        let scale = 1.0 + self.pairing.domain().norm(u) + self.pairing.target_cone().norm(v);
        Ok(self.margin(u, v)? >= -tol * scale)
    }

    /// Projection of `(f1, g)` for `0 ≤ g ≤ S(f1)`: `½(f1 + f2, S f1 + g)` with `f2 = pair(f1, g)`.
    pub fn project_c(&self, f1: &[Complex64], g: &[f64]) -> Result<(Vec<Complex64>, Vec<f64>)> {
        let s = &self.pairing;
        let cone = s.target_cone();
        let s1 = abs_map(s, f1)?;
        cone.check(g)?;
        if !s.has_pairing() {
            return Err(Error::PairingUnavailable(s.name()));
        }
        if !cone_contains(&cone, g, DEFAULT_TOL)? || !cone_leq(&cone, g, &s1, DEFAULT_TOL)? {
            return Err(Error::PreconditionViolated("requires 0 ≤ g ≤ S(f1)".into()));
        }
        let f2 = pair(s, f1, g)?;
        let u = f1.iter().zip(&f2).map(|(a, b)| 0.5 * (a + b)).collect();
        let v = scale(&add(&s1, g), 0.5);
        Ok((u, v))
    }

    /// Projection of an arbitrary `(f1, g)` for orthant targets:
    /// `½(f2, (S f1 ∨ g + g)₊)` with `f2 = pair(f1, (S f1 ∧ g + S f1)₊)`.
    pub fn project_d(&self, f1: &[Complex64], g: &[f64]) -> Result<(Vec<Complex64>, Vec<f64>)> {
        let s = &self.pairing;
        let cone = s.target_cone();
        if !s.has_pairing() {
            return Err(Error::PairingUnavailable(s.name()));
        }
        if !cone.is_self_dual_isotone() {
            return Err(Error::ConeNotIsotone(cone.name()));
        }
        let s1 = abs_map(s, f1)?;
        cone.check(g)?;
        let f2 = pair(s, f1, &pos(&add(&meet(&s1, g), &s1)))?;
        let u = cscale_real(&f2, 0.5);
        let v = scale(&pos(&add(&join(&s1, g), g)), 0.5);
        Ok((u, v))
    }

    /// Fiberwise second-order cone projection; orthant targets only.
    pub fn project_soc(&self, f1: &[Complex64], g: &[f64]) -> Result<(Vec<Complex64>, Vec<f64>)> {
        project_c_soc(&self.pairing, f1, g)
    }

    /// Projection by the general formula where it applies, else by the
    /// formula for dominated targets.
    pub fn project(&self, f1: &[Complex64], g: &[f64]) -> Result<(Vec<Complex64>, Vec<f64>)> {
        if self.pairing.target_cone().is_self_dual_isotone() {
            self.project_d(f1, g)
        } else {
            self.project_c(f1, g)
        }
    }

    /// A point of `C`: `(u, S(u) + k)` for `k ∈ K₊°`.
    pub(crate) fn point(&self, u: Vec<Complex64>, k: &[f64]) -> Result<(Vec<Complex64>, Vec<f64>)> {
        let cone = self.pairing.target_cone();
        let v = add(&abs_map(&self.pairing, &u)?, &dual_project(&cone, k)?);
        Ok((u, v))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvarianceWitness {
    pub u: Vec<Complex64>,
    pub v: Vec<f64>,
    pub t: f64,
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvarianceReport {
    pub holds: bool,
    /// Smallest `C` margin of `(e^{-tA} u, e^{-tB} v)`.
    pub worst_margin: f64,
    pub witness: Option<InvarianceWitness>,
    pub trials: usize,
}

/// Whether `(e^{-tA}, e^{-tB})` maps sampled points of `C` back into `C`.
///
/// Besides random points, each grid time tries the tight points
/// `(e_y ⊗ v, S(e_y ⊗ v))` with `v` the top right singular vector of the
/// block `(e^{-tA})_{xy}`, which is where invariance fails first.
pub fn check_c_invariance(
    set: &ConvexSetC,
    a: &OperatorForm,
    b: &OperatorForm,
    t_grid: &[f64],
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<InvarianceReport> {
    let s = set.pairing();
    let domain = s.domain();
    let cone = s.target_cone();
    check_dims(a, domain.dim(), b, cone.dim())?;

    let mut points = Vec::new();
    for i in 0..domain.dim() {
        let mut u = vec![Complex64::new(0.0, 0.0); domain.dim()];
        u[i] = Complex64::new(1.0, 0.0);
        points.push(set.point(u, &vec![0.0; cone.dim()])?);
    }
    let seed = derive_seed(seed, "c_invariance");
    for i in 0..samples {
        let mut rng = substream(seed, i as u64);
        let u = random_domain(s, &mut rng);
        let k = if i % 2 == 0 {
            vec![0.0; cone.dim()]
        } else {
            gaussian_vec(&mut rng, cone.dim())
        };
        points.push(set.point(u, &k)?);
    }

    let mut report = InvarianceReport {
        holds: true,
        worst_margin: f64::INFINITY,
        witness: None,
        trials: 0,
    };
    for &t in t_grid {
        let p = a.semigroup(t)?;
        let q = b.semigroup(t)?;
        let mut local = points.clone();
        if s.is_pointwise() {
            for x in 0..domain.num_points() {
                for y in 0..domain.num_points() {
                    let (rx, ry) = (domain.fiber_range(x), domain.fiber_range(y));
                    let block = p.block(rx.start, ry.start, rx.len(), ry.len());
                    let (_, top) = top_singular(&block);
                    let mut u = vec![Complex64::new(0.0, 0.0); domain.dim()];
                    u[ry].copy_from_slice(&top);
                    local.push(set.point(u, &vec![0.0; cone.dim()])?);
                }
            }
        }
        for (u, v) in &local {
            report.trials += 1;
            let ut = p.mul_vec(u);
            let vt = realify(&q.mul_vec(&complexify(v)), 1e-9 * (1.0 + cone.norm(v)))?;
            let margin = set.margin(&ut, &vt)?;
            report.worst_margin = report.worst_margin.min(margin);
            let allowed = tol * (1.0 + domain.norm(u) + cone.norm(v));
            if margin < -allowed && report.witness.as_ref().is_none_or(|w| margin < w.margin) {
                report.holds = false;
                report.witness = Some(InvarianceWitness {
                    u: u.clone(),
                    v: v.clone(),
                    t,
                    margin,
                });
            }
        }
    }
    if !report.worst_margin.is_finite() {
        report.worst_margin = 0.0;
    }
    Ok(report)
}

pub(crate) fn check_dims(a: &OperatorForm, da: usize, b: &OperatorForm, db: usize) -> Result<()> {
    if a.dim() != da {
        return Err(Error::DimensionMismatch { expected: da, actual: a.dim() });
    }
    if b.dim() != db {
        return Err(Error::DimensionMismatch { expected: db, actual: b.dim() });
    }
    if !b.is_real() {
        return Err(Error::NonRealInput { imag: b.matrix().max_imag() });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::CMatrix;
    use crate::space::{FiberedSpace, WeightedSpace};
    use crate::vector::{cmax_abs_diff, max_abs_diff};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn scalar_set(n: usize) -> ConvexSetC {
        ConvexSetC::new(PairingSpec::bundle(FiberedSpace::scalar(WeightedSpace::uniform(n).unwrap())))
    }

    #[test]
    fn fixed_point_and_negative_target() {
        let set = scalar_set(2);
        let f1 = [c(1.0, 1.0), c(-2.0, 0.0)];
        let s1 = abs_map(set.pairing(), &f1).unwrap();
        let (u, v) = set.project_c(&f1, &s1).unwrap();
        assert!(cmax_abs_diff(&u, &f1) < 1e-15);
        assert_eq!(v, s1);
        let zero = [c(0.0, 0.0); 2];
        let (u, v) = set.project_d(&zero, &[-1.0, -1.0]).unwrap();
        assert_eq!(u, zero.to_vec());
        assert_eq!(v, vec![0.0, 0.0]);
    }

    #[test]
    fn branches_match_soc_route() {
        let base = WeightedSpace::from_weights(vec![0.5, 2.0, 1.0]).unwrap();
        let set = ConvexSetC::new(PairingSpec::bundle(FiberedSpace::new(base, vec![2, 2, 2]).unwrap()));
        for i in 0..200 {
            let mut rng = substream(4, i);
            let f1 = random_domain(set.pairing(), &mut rng);
            let g = gaussian_vec(&mut rng, 3);
            let (u, v) = set.project_d(&f1, &g).unwrap();
            let (uo, vo) = set.project_soc(&f1, &g).unwrap();
            assert!(cmax_abs_diff(&u, &uo) < 1e-12);
            assert!(max_abs_diff(&v, &vo) < 1e-12);
            assert!(set.contains(&u, &v, 1e-12).unwrap());

            let s1 = abs_map(set.pairing(), &f1).unwrap();
            let g = meet(&pos(&g), &s1);
            let (uc, vc) = set.project_c(&f1, &g).unwrap();
            let (ud, vd) = set.project_d(&f1, &g).unwrap();
            assert!(cmax_abs_diff(&uc, &ud) < 1e-12);
            assert!(max_abs_diff(&vc, &vd) < 1e-12);
        }
    }

    #[test]
    fn invariance_examples() {
        let space = FiberedSpace::scalar(WeightedSpace::uniform(2).unwrap());
        let set = scalar_set(2);
        let grid = super::super::DEFAULT_T_GRID;
        let zero = OperatorForm::zero(space.clone());
        assert!(check_c_invariance(&set, &zero, &zero, &grid, 50, 1, 1e-9).unwrap().holds);

        let theta = 0.7f64;
        let phase = Complex64::from_polar(1.0, theta);
        let magnetic = CMatrix::from_vec(2, 2, vec![c(1.0, 0.0), -phase, -phase.conj(), c(1.0, 0.0)]).unwrap();
        let a = OperatorForm::new(space.clone(), magnetic).unwrap();
        let lap = OperatorForm::from_real(WeightedSpace::uniform(2).unwrap(), &[1.0, -1.0, -1.0, 1.0]).unwrap();
        let r = check_c_invariance(&set, &a, &lap, &grid, 100, 1, 1e-9).unwrap();
        assert!(r.holds, "{r:?}");

        let half = lap.scaled(0.5).unwrap();
        let r = check_c_invariance(&set, &lap, &half, &grid, 100, 1, 1e-9).unwrap();
        assert!(!r.holds);
        let w = r.witness.unwrap();
        let ut = lap.semigroup(w.t).unwrap().mul_vec(&w.u);
        let vt = realify(&half.semigroup(w.t).unwrap().mul_vec(&complexify(&w.v)), 1e-12).unwrap();
        assert!(set.margin(&ut, &vt).unwrap() < 0.0);
    }
}
