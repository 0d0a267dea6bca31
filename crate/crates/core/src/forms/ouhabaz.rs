//! Invariance of a closed convex set under a symmetric semigroup, tested
//! three ways: along the semigroup, along `α(T + α)⁻¹`, and through the
//! form inequality `Re q(Pu, u - Pu) ≥ 0`.

use num_complex::Complex64;
use serde::Serialize;

use super::convex_c::check_dims;
use super::{basis_differences, check_real_on_cone, ConvexSetC, OperatorForm};
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::ordered::{cone_margin, corner_suite, project_cone, random_ambient, ConeSpec};
use crate::pairing::{abs_map, random_domain};
use crate::sampling::{derive_seed, gaussian_vec, substream, SampleRng};
use crate::space::{complexify, realify};
use crate::vector::csub;

pub enum OuhabazProblem<'a> {
    /// The cone `K₊` under `e^{-tF}`.
    Cone {
        cone: &'a ConeSpec,
        form: &'a OperatorForm,
    },
    /// The set `C` under `e^{-tA} ⊕ e^{-tB}`.
    Pairing {
        set: &'a ConvexSetC,
        a: &'a OperatorForm,
        b: &'a OperatorForm,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionResult {
    pub holds: bool,
    pub margin: f64,
    /// Offending point, concatenated `(u, v)` for `C`.
    pub witness: Option<Vec<Complex64>>,
    /// Grid time or resolvent parameter of the witness.
    pub parameter: Option<f64>,
}

impl ConditionResult {
    fn new() -> Self {
        Self { holds: true, margin: f64::INFINITY, witness: None, parameter: None }
    }

    fn record(&mut self, margin: f64, allowed: f64, x: &[Complex64], parameter: Option<f64>) {
        if margin < self.margin {
            self.margin = margin;
            if margin < -allowed {
                self.holds = false;
                self.witness = Some(x.to_vec());
                self.parameter = parameter;
            }
        }
    }

    fn finish(mut self) -> Self {
        if !self.margin.is_finite() {
            self.margin = 0.0;
        }
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OuhabazReport {
    pub semigroup: ConditionResult,
    pub resolvent: ConditionResult,
    pub form: ConditionResult,
    pub consistent: bool,
}

impl OuhabazProblem<'_> {
    fn dim(&self) -> usize {
        match self {
            OuhabazProblem::Cone { cone, .. } => cone.dim(),
            OuhabazProblem::Pairing { a, b, .. } => a.dim() + b.dim(),
        }
    }

    fn split(&self) -> usize {
        match self {
            OuhabazProblem::Cone { .. } => 0,
            OuhabazProblem::Pairing { a, .. } => a.dim(),
        }
    }

    fn lambda(&self) -> f64 {
        match self {
            OuhabazProblem::Cone { form, .. } => form.lambda(),
            OuhabazProblem::Pairing { a, b, .. } => a.lambda().max(b.lambda()),
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            OuhabazProblem::Cone { cone, form } => check_real_on_cone(form, cone),
            OuhabazProblem::Pairing { set, a, b } => {
                let s = set.pairing();
                check_dims(a, s.domain().dim(), b, s.target_cone().dim())
            }
        }
    }

    fn real_tail(&self, x: &[Complex64]) -> Result<Vec<f64>> {
        let tail = &x[self.split()..];
        realify(tail, 1e-9 * (1.0 + crate::linalg::norm(tail)))
    }

    fn margin(&self, x: &[Complex64]) -> Result<f64> {
        match self {
            OuhabazProblem::Cone { cone, .. } => cone_margin(cone, &self.real_tail(x)?),
            OuhabazProblem::Pairing { set, .. } => set.margin(&x[..self.split()], &self.real_tail(x)?),
        }
    }

    fn project(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        match self {
            OuhabazProblem::Cone { cone, .. } => Ok(complexify(&project_cone(cone, &self.real_tail(x)?)?)),
            OuhabazProblem::Pairing { set, .. } => {
                let (u, v) = set.project(&x[..self.split()], &self.real_tail(x)?)?;
                Ok(join_parts(u, &v))
            }
        }
    }

    /// Applies `ops.0` to the first block and `ops.1` to the second.
    fn apply(&self, ops: &(CMatrix, Option<CMatrix>), x: &[Complex64]) -> Vec<Complex64> {
        match &ops.1 {
            None => ops.0.mul_vec(x),
            Some(second) => {
                let k = self.split();
                let mut out = ops.0.mul_vec(&x[..k]);
                out.extend(second.mul_vec(&x[k..]));
                out
            }
        }
    }

    fn semigroup(&self, t: f64) -> Result<(CMatrix, Option<CMatrix>)> {
        match self {
            OuhabazProblem::Cone { form, .. } => Ok((form.semigroup(t)?, None)),
            OuhabazProblem::Pairing { a, b, .. } => Ok((a.semigroup(t)?, Some(b.semigroup(t)?))),
        }
    }

    fn scaled_resolvent(&self, alpha: f64) -> Result<(CMatrix, Option<CMatrix>)> {
        let lambda = self.lambda();
        if !(alpha > lambda) {
            return Err(Error::AlphaOutOfRange { alpha, lambda });
        }
        match self {
            OuhabazProblem::Cone { form, .. } => Ok((form.resolvent(alpha)?.scale_real(alpha), None)),
            OuhabazProblem::Pairing { a, b, .. } => Ok((
                a.resolvent(alpha)?.scale_real(alpha),
                Some(b.resolvent(alpha)?.scale_real(alpha)),
            )),
        }
    }

    /// `Re q(u, v)` of the direct sum form.
    fn form(&self, u: &[Complex64], v: &[Complex64]) -> Result<f64> {
        match self {
            OuhabazProblem::Cone { form, .. } => Ok(form.form_eval(u, v)?.re),
            OuhabazProblem::Pairing { a, b, .. } => {
                let k = self.split();
                Ok(a.form_eval(&u[..k], &v[..k])?.re + b.form_eval(&u[k..], &v[k..])?.re)
            }
        }
    }

    fn norm(&self, x: &[Complex64]) -> f64 {
        match self {
            OuhabazProblem::Cone { form, .. } => form.space().norm(x),
            OuhabazProblem::Pairing { a, b, .. } => {
                let k = self.split();
                (a.space().norm(&x[..k]).powi(2) + b.space().norm(&x[k..]).powi(2)).sqrt()
            }
        }
    }

    fn form_scale(&self) -> f64 {
        match self {
            OuhabazProblem::Cone { form, .. } => form.gram().max_abs(),
            OuhabazProblem::Pairing { a, b, .. } => a.gram().max_abs().max(b.gram().max_abs()),
        }
    }

    fn random_point(&self, rng: &mut SampleRng) -> Vec<Complex64> {
        match self {
            OuhabazProblem::Cone { cone, .. } => complexify(&random_ambient(cone, rng)),
            OuhabazProblem::Pairing { set, b, .. } => {
                let u = random_domain(set.pairing(), rng);
                join_parts(u, &gaussian_vec(rng, b.dim()))
            }
        }
    }

    fn corners(&self) -> Result<Vec<Vec<Complex64>>> {
        match self {
            OuhabazProblem::Cone { cone, .. } => {
                let mut out = basis_differences(cone.dim());
                out.extend(corner_suite(cone));
                Ok(out.iter().map(|g| complexify(g)).collect())
            }
            OuhabazProblem::Pairing { set, a, b, .. } => {
                let s = set.pairing();
                let mut out = Vec::new();
                for i in 0..a.dim() {
                    let mut u = vec![Complex64::new(0.0, 0.0); a.dim()];
                    u[i] = Complex64::new(1.0, 0.0);
                    let su = abs_map(s, &u)?;
                    out.push(join_parts(u.clone(), &su));
                    out.push(join_parts(u.clone(), &vec![0.0; b.dim()]));
                    let neg: Vec<f64> = su.iter().map(|x| -x).collect();
                    out.push(join_parts(u, &neg));
                }
                Ok(out)
            }
        }
    }
}

fn join_parts(mut u: Vec<Complex64>, v: &[f64]) -> Vec<Complex64> {
    u.extend(complexify(v));
    u
}

/// Evaluates the three invariance conditions and whether their verdicts coincide.
///
/// The resolvent condition keeps the factor `α`: `α(T + α)⁻¹` must map the
/// set into itself, which matters for sets that are not cones.
pub fn ouhabaz_consistency(
    problem: &OuhabazProblem,
    t_grid: &[f64],
    alpha_grid: &[f64],
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<OuhabazReport> {
    problem.validate()?;
    let n = problem.dim();
    let mut ambient = problem.corners()?;
    let seed = derive_seed(seed, "ouhabaz");
    for i in 0..samples {
        let mut rng = substream(seed, i as u64);
        ambient.push(problem.random_point(&mut rng));
    }
    debug_assert!(ambient.iter().all(|x| x.len() == n));
    let members: Vec<Vec<Complex64>> = ambient
        .iter()
        .map(|x| problem.project(x))
        .collect::<Result<_>>()?;

    let mut semigroup = ConditionResult::new();
    for &t in t_grid {
        let ops = problem.semigroup(t)?;
        for x in &members {
            let y = problem.apply(&ops, x);
            semigroup.record(problem.margin(&y)?, tol * (1.0 + problem.norm(x)), x, Some(t));
        }
    }

    let mut resolvent = ConditionResult::new();
    for &alpha in alpha_grid {
        let ops = problem.scaled_resolvent(alpha)?;
        for x in &members {
            let y = problem.apply(&ops, x);
            resolvent.record(problem.margin(&y)?, tol * (1.0 + problem.norm(x)), x, Some(alpha));
        }
    }

    let mut form = ConditionResult::new();
    let scale = 1.0 + problem.form_scale();
    for (x, px) in ambient.iter().zip(&members) {
        let rest = csub(x, px);
        let value = problem.form(px, &rest)?;
        form.record(value, tol * scale * (1.0 + problem.norm(x).powi(2)), x, None);
    }

    let (semigroup, resolvent, form) = (semigroup.finish(), resolvent.finish(), form.finish());
    let consistent = semigroup.holds == resolvent.holds && resolvent.holds == form.holds;
    Ok(OuhabazReport { semigroup, resolvent, form, consistent })
}
