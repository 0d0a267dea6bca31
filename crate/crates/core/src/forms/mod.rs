//! Self-adjoint operators on weighted spaces and their quadratic forms.
//!
//! An operator is stored in weighted coordinates: `(Au)_i = Σ_j A_ij u_j`,
//! self-adjoint for `⟨u, v⟩ = Σ_i m_i u_i conj(v_i)`. Its form is
//! `a(u, v) = ⟨Au, v⟩`, with Gram matrix `G = M A`.

mod convex_c;
mod ouhabaz;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, resolvent_from_eig, CMatrix, EigenDecomposition, HermitianMatrix};
use crate::ordered::{
    cone_margin, corner_suite, join, meet, moreau_decompose, pos, project_cone, random_ambient,
    ConeSpec,
};
use crate::sampling::{derive_seed, gaussian_vec, substream};
use crate::space::{complexify, realify, FiberedSpace, WeightedSpace};
use crate::vector::{add, euclid_norm, neg, sub};

pub use convex_c::{check_c_invariance, ConvexSetC, InvarianceReport, InvarianceWitness};
pub use ouhabaz::{ouhabaz_consistency, ConditionResult, OuhabazProblem, OuhabazReport};

/// Default semigroup times.
pub const DEFAULT_T_GRID: [f64; 6] = [0.01, 0.1, 0.5, 1.0, 2.0, 5.0];
/// Default resolvent parameters, as offsets above `λ`.
pub const DEFAULT_ALPHA_OFFSETS: [f64; 3] = [0.1, 1.0, 10.0];
/// Default number of random samples per check.
pub const DEFAULT_SAMPLES: usize = 500;

#[derive(Debug, Clone, PartialEq)]
pub struct OperatorForm {
    space: FiberedSpace,
    matrix: CMatrix,
    root: Vec<f64>,
    eig: EigenDecomposition,
}

impl OperatorForm {
    /// Fails unless the matrix is self-adjoint for the weighted inner product.
    pub fn new(space: FiberedSpace, matrix: CMatrix) -> Result<Self> {
        let n = space.dim();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::ShapeMismatch(format!(
                "operator is {}x{} but the space has dimension {n}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let root: Vec<f64> = space.component_weights().iter().map(|m| m.sqrt()).collect();
        let inv: Vec<f64> = root.iter().map(|r| 1.0 / r).collect();
        let sym = HermitianMatrix::new(matrix.diag_sandwich(&root, &inv))?;
        let eig = hermitian_eig(&sym)?;
        Ok(Self { space, matrix, root, eig })
    }

    pub fn scalar(space: WeightedSpace, matrix: CMatrix) -> Result<Self> {
        Self::new(FiberedSpace::scalar(space), matrix)
    }

    /// Real row-major operator on a scalar space.
    pub fn from_real(space: WeightedSpace, data: &[f64]) -> Result<Self> {
        let n = space.len();
        Self::scalar(space, CMatrix::from_real(n, n, data)?)
    }

    /// Operator whose form has Gram matrix `gram`, i.e. `A = M⁻¹ G`.
    pub fn from_gram(space: FiberedSpace, gram: &CMatrix) -> Result<Self> {
        let inv: Vec<f64> = space.component_weights().iter().map(|m| 1.0 / m).collect();
        let ones = vec![1.0; inv.len()];
        Self::new(space, gram.diag_sandwich(&inv, &ones))
    }

    pub fn zero(space: FiberedSpace) -> Self {
        let n = space.dim();
        Self::new(space, CMatrix::zeros(n, n)).expect("zero operator is self-adjoint")
    }

    pub fn identity(space: FiberedSpace) -> Self {
        let n = space.dim();
        Self::new(space, CMatrix::identity(n)).expect("identity is self-adjoint")
    }

    pub fn space(&self) -> &FiberedSpace {
        &self.space
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    /// Spectrum of the symmetrised matrix `M^{1/2} A M^{-1/2}`.
    pub fn eigen(&self) -> &EigenDecomposition {
        &self.eig
    }

    /// `λ` such that `-λ` is the bottom of the spectrum.
    pub fn lambda(&self) -> f64 {
        -self.eig.min_eigenvalue()
    }

    /// Default resolvent grid `λ + {0.1, 1, 10}`.
    pub fn default_alpha_grid(&self) -> Vec<f64> {
        DEFAULT_ALPHA_OFFSETS.iter().map(|o| self.lambda() + o).collect()
    }

    pub fn gram(&self) -> CMatrix {
        let m = self.space.component_weights();
        let ones = vec![1.0; m.len()];
        self.matrix.diag_sandwich(&m, &ones)
    }

    pub fn is_real(&self) -> bool {
        self.matrix.max_imag() == 0.0
    }

    pub fn apply(&self, u: &[Complex64]) -> Result<Vec<Complex64>> {
        self.space.check_len(u.len())?;
        Ok(self.matrix.mul_vec(u))
    }

    /// `a(u, v) = ⟨Au, v⟩`, linear in `u`.
    pub fn form_eval(&self, u: &[Complex64], v: &[Complex64]) -> Result<Complex64> {
        self.space.check_len(v.len())?;
        let au = self.apply(u)?;
        Ok(self.space.inner(&au, v))
    }

    /// `a(u) = a(u, u)`.
    pub fn form_value(&self, u: &[Complex64]) -> Result<f64> {
        Ok(self.form_eval(u, u)?.re)
    }

    /// Real part of the form on real vectors.
    pub fn form_real(&self, u: &[f64], v: &[f64]) -> Result<f64> {
        Ok(self.form_eval(&complexify(u), &complexify(v))?.re)
    }

    fn unsymmetrise(&self, m: CMatrix) -> CMatrix {
        let inv: Vec<f64> = self.root.iter().map(|r| 1.0 / r).collect();
        m.diag_sandwich(&inv, &self.root)
    }

    /// `e^{-tA}` in weighted coordinates.
    pub fn semigroup(&self, t: f64) -> Result<CMatrix> {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Error::NegativeTime(t));
        }
        Ok(self.unsymmetrise(self.eig.apply_fn(|l| (-t * l).exp())))
    }

    /// `(A + α)⁻¹` in weighted coordinates.
    pub fn resolvent(&self, alpha: f64) -> Result<CMatrix> {
        Ok(self.unsymmetrise(resolvent_from_eig(&self.eig, alpha)?))
    }

    /// `A + diag(d)` with `d` given per coordinate.
    pub fn plus_diagonal(&self, d: &[f64]) -> Result<Self> {
        self.space.check_len(d.len())?;
        let mut m = self.matrix.clone();
        for (i, v) in d.iter().enumerate() {
            m[(i, i)] += v;
        }
        Self::new(self.space.clone(), m)
    }

    pub fn scaled(&self, s: f64) -> Result<Self> {
        Self::new(self.space.clone(), self.matrix.scale_real(s))
    }

    /// Row-major real entries; fails on a complex operator.
    pub fn real_entries(&self) -> Result<Vec<f64>> {
        realify(self.matrix.as_slice(), 0.0)
    }
}

/// Free-function form of [`OperatorForm::form_eval`].
pub fn form_eval(f: &OperatorForm, u: &[Complex64], v: &[Complex64]) -> Result<Complex64> {
    f.form_eval(u, v)
}

/// Scalar space carrying the inner product of the cone's ambient space.
pub fn cone_space(cone: &ConeSpec) -> WeightedSpace {
    WeightedSpace::from_weights(cone.coordinate_weights()).expect("cone weights are positive")
}

fn check_real_on_cone(f: &OperatorForm, cone: &ConeSpec) -> Result<()> {
    if f.dim() != cone.dim() {
        return Err(Error::DimensionMismatch {
            expected: cone.dim(),
            actual: f.dim(),
        });
    }
    if !f.space().is_line_bundle() {
        return Err(Error::InvalidParameters("cone checks need a scalar space".into()));
    }
    if !f.is_real() {
        return Err(Error::NonRealInput {
            imag: f.matrix().max_imag(),
        });
    }
    Ok(())
}

/// Differences of basis vectors; on the orthant they realise every cross term.
fn basis_differences(d: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    for i in 0..d {
        for j in 0..d {
            if i != j {
                let mut g = vec![0.0; d];
                g[i] = 1.0;
                g[j] = -1.0;
                out.push(g);
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BeurlingDenyReport {
    pub holds: bool,
    /// Largest `b(P g, P°(-g))` seen.
    pub max_cross: f64,
    pub witness: Option<Vec<f64>>,
    pub trials: usize,
}

/// First Beurling-Deny criterion `b(P_{K₊} g, P_{K₊°}(-g)) ≤ 0`.
///
/// On the orthant the corners `e_i - e_j` make the test exact.
pub fn check_first_bd(
    f: &OperatorForm,
    cone: &ConeSpec,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<BeurlingDenyReport> {
    check_real_on_cone(f, cone)?;
    let gmax = f.gram().max_abs();
    let mut report = BeurlingDenyReport {
        holds: true,
        max_cross: f64::NEG_INFINITY,
        witness: None,
        trials: 0,
    };
    let visit = |g: Vec<f64>, report: &mut BeurlingDenyReport| -> Result<()> {
        report.trials += 1;
        let pair = moreau_decompose(cone, &g)?;
        let value = f.form_real(&pair.h1, &pair.h2)?;
        report.max_cross = report.max_cross.max(value);
        let allowed = tol * (1.0 + gmax * euclid_norm(&pair.h1) * euclid_norm(&pair.h2));
        if value > allowed && report.holds {
            report.holds = false;
            report.witness = Some(g);
        }
        Ok(())
    };
    let mut corners = basis_differences(cone.dim());
    corners.extend(corner_suite(cone));
    for g in corners {
        visit(g, &mut report)?;
    }
    let seed = derive_seed(seed, "first_bd");
    for i in 0..samples {
        let mut rng = substream(seed, i as u64);
        visit(random_ambient(cone, &mut rng), &mut report)?;
    }
    if !report.max_cross.is_finite() {
        report.max_cross = 0.0;
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PositivityWitness {
    pub g: Vec<f64>,
    pub t: f64,
    /// Cone margin of `e^{-tB} g`.
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PositivityReport {
    pub holds: bool,
    pub sampled: bool,
    /// Exact off-diagonal sign test; orthant only.
    pub structural: Option<bool>,
    pub agree: bool,
    /// Smallest cone margin of `e^{-tB} g` over samples and grid.
    pub worst_margin: f64,
    pub witness: Option<PositivityWitness>,
}

/// Whether `e^{-tB}` leaves the cone invariant on the grid (sampled) and,
/// for the orthant, for all `t ≥ 0` (exact: off-diagonal entries `≤ 0`).
/// The exact verdict decides when available.
pub fn check_positivity_preserving(
    f: &OperatorForm,
    cone: &ConeSpec,
    t_grid: &[f64],
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<PositivityReport> {
    check_real_on_cone(f, cone)?;
    let mut inputs: Vec<Vec<f64>> = corner_suite(cone)
        .iter()
        .map(|c| project_cone(cone, c))
        .collect::<Result<_>>()?;
    let seed = derive_seed(seed, "positivity");
    for i in 0..samples {
        let mut rng = substream(seed, i as u64);
        inputs.push(project_cone(cone, &random_ambient(cone, &mut rng))?);
    }

    let mut worst_margin = f64::INFINITY;
    let mut sampled = true;
    let mut witness: Option<PositivityWitness> = None;
    for &t in t_grid {
        let p = f.semigroup(t)?;
        for g in &inputs {
            let h = realify(&p.mul_vec(&complexify(g)), 1e-9 * (1.0 + euclid_norm(g)))?;
            let margin = cone_margin(cone, &h)?;
            worst_margin = worst_margin.min(margin);
            if margin < -tol * (1.0 + cone.norm(&h)) {
                sampled = false;
                if witness.as_ref().is_none_or(|w| margin < w.margin) {
                    witness = Some(PositivityWitness { g: g.clone(), t, margin });
                }
            }
        }
    }
    if !worst_margin.is_finite() {
        worst_margin = 0.0;
    }

    let structural = match cone {
        ConeSpec::Orthant(_) => {
            let b = f.real_entries()?;
            let n = cone.dim();
            let bmax = b.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            let mut worst = None::<(usize, usize, f64)>;
            for i in 0..n {
                for j in 0..n {
                    let v = b[i * n + j];
                    if i != j && v > tol * (1.0 + bmax) && worst.is_none_or(|w| v > w.2) {
                        worst = Some((i, j, v));
                    }
                }
            }
            if let Some((i, j, _)) = worst {
                if witness.is_none() {
                    witness = Some(small_time_witness(f, n, i, j)?);
                }
            }
            Some(worst.is_none())
        }
        _ => None,
    };
    let holds = structural.unwrap_or(sampled);
    Ok(PositivityReport {
        holds,
        sampled,
        structural,
        agree: structural.is_none_or(|s| s == sampled),
        worst_margin,
        witness,
    })
}

/// `e^{-tB} e_j` picks up the sign of `-t B_ij` for small `t`.
fn small_time_witness(f: &OperatorForm, n: usize, i: usize, j: usize) -> Result<PositivityWitness> {
    let mut g = vec![0.0; n];
    g[j] = 1.0;
    let mut best = PositivityWitness { g: g.clone(), t: 0.0, margin: 0.0 };
    for k in 1..=8 {
        let t = 10f64.powi(-k);
        let entry = f.semigroup(t)?[(i, j)].re;
        if entry < best.margin {
            best = PositivityWitness { g: g.clone(), t, margin: entry };
        }
    }
    Ok(best)
}

fn require_orthant_bd(f: &OperatorForm, cone: &ConeSpec, tol: f64) -> Result<()> {
    if !cone.is_self_dual_isotone() {
        return Err(Error::ConeNotIsotone(cone.name()));
    }
    if !check_first_bd(f, cone, 0, 0, tol)?.holds {
        return Err(Error::PreconditionViolated(
            "the form fails the first Beurling-Deny criterion".into(),
        ));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LatticeInequalityReport {
    pub holds: bool,
    /// Smallest `b_α(g) + b_α(h) - b_α(g ∧ h)`.
    pub meet_margin: f64,
    /// Smallest `b_α(g) + b_α(h) - b_α(g ∨ h)`.
    pub join_margin: f64,
    pub witness: Option<(Vec<f64>, Vec<f64>)>,
}

/// `b_α(g ∧ h), b_α(g ∨ h) ≤ b_α(g) + b_α(h)` with `b_α = b + α‖·‖²`, `α = λ`.
pub fn sublattice_inequality_check(
    f: &OperatorForm,
    cone: &ConeSpec,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<LatticeInequalityReport> {
    check_real_on_cone(f, cone)?;
    require_orthant_bd(f, cone, tol)?;
    let alpha = f.lambda();
    let b_alpha = |u: &[f64]| -> Result<f64> { Ok(f.form_real(u, u)? + alpha * cone.inner(u, u)) };
    let scale = 1.0 + f.gram().max_abs() + alpha.abs();

    let mut report = LatticeInequalityReport {
        holds: true,
        meet_margin: f64::INFINITY,
        join_margin: f64::INFINITY,
        witness: None,
    };
    let mut pairs: Vec<(Vec<f64>, Vec<f64>)> = Vec::new();
    for g in corner_suite(cone) {
        pairs.push((g.clone(), g.clone()));
        pairs.push((g.clone(), neg(&g)));
        pairs.push((pos(&g), pos(&neg(&g))));
    }
    let seed = derive_seed(seed, "sublattice");
    for i in 0..samples {
        let mut rng = substream(seed, i as u64);
        let g = gaussian_vec(&mut rng, cone.dim());
        let h = gaussian_vec(&mut rng, cone.dim());
        pairs.push((g, h));
    }
    for (g, h) in pairs {
        let rhs = b_alpha(&g)? + b_alpha(&h)?;
        let m1 = rhs - b_alpha(&meet(&g, &h))?;
        let m2 = rhs - b_alpha(&join(&g, &h))?;
        report.meet_margin = report.meet_margin.min(m1);
        report.join_margin = report.join_margin.min(m2);
        let allowed = tol * scale * (1.0 + cone.inner(&g, &g) + cone.inner(&h, &h));
        if (m1 < -allowed || m2 < -allowed) && report.holds {
            report.holds = false;
            report.witness = Some((g, h));
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PiMapReport {
    pub holds: bool,
    /// Smallest `(b ⊕ b)(π(h, g), (1 - π)(h, g))`.
    pub margin: f64,
    pub witness: Option<(Vec<f64>, Vec<f64>)>,
}

/// `π(h, g) = ½((h ∧ g + h)₊, (h ∨ g + g)₊)`.
pub fn pi_map(h: &[f64], g: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let first = pos(&add(&meet(h, g), h)).iter().map(|x| 0.5 * x).collect();
    let second = pos(&add(&join(h, g), g)).iter().map(|x| 0.5 * x).collect();
    (first, second)
}

/// `(b ⊕ b)(π(h, g), (1 - π)(h, g)) ≥ 0` for `h ∈ K₊` and arbitrary `g`.
pub fn pi_map_check(
    f: &OperatorForm,
    cone: &ConeSpec,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<PiMapReport> {
    check_real_on_cone(f, cone)?;
    require_orthant_bd(f, cone, tol)?;
    let scale = 1.0 + f.gram().max_abs();
    let mut inputs: Vec<(Vec<f64>, Vec<f64>)> = Vec::new();
    for c in corner_suite(cone) {
        let h = pos(&c);
        inputs.push((h.clone(), h.clone()));
        inputs.push((h.clone(), neg(&h)));
        inputs.push((h, c));
    }
    let seed = derive_seed(seed, "pi_map");
    for i in 0..samples {
        let mut rng = substream(seed, i as u64);
        let h = pos(&gaussian_vec(&mut rng, cone.dim()));
        let g = gaussian_vec(&mut rng, cone.dim());
        inputs.push((h, g));
    }
    let mut report = PiMapReport {
        holds: true,
        margin: f64::INFINITY,
        witness: None,
    };
    for (h, g) in inputs {
        let (p1, p2) = pi_map(&h, &g);
        let (q1, q2) = (sub(&h, &p1), sub(&g, &p2));
        let value = f.form_real(&p1, &q1)? + f.form_real(&p2, &q2)?;
        report.margin = report.margin.min(value);
        let allowed = tol * scale * (1.0 + cone.inner(&h, &h) + cone.inner(&g, &g));
        if value < -allowed && report.holds {
            report.holds = false;
            report.witness = Some((h, g));
        }
    }
    Ok(report)
}
