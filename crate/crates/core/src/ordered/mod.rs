//! Positive cones in finite-dimensional real Hilbert spaces.
//!
//! Three cones are realised:
//!
//! * [`ConeSpec::Orthant`]: nonnegative functions in `ℓ²(X, m)`; self-dual
//!   and isotone, hence the order is a lattice.
//! * [`ConeSpec::PsdMatrices`]: positive semidefinite matrices among the real
//!   symmetric `n × n` matrices with the Hilbert-Schmidt inner product;
//!   self-dual but not isotone for `n ≥ 2`.
//! * [`ConeSpec::MonotoneNonneg`]: nonnegative nonincreasing functions on a
//!   weighted grid; not self-dual.
//!
//! Vectors are plain `&[f64]`. PSD matrices are stored row-major with `n²`
//! entries and must be symmetric.

mod pava;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, CMatrix, HermitianMatrix};
use crate::sampling::{derive_seed, gaussian_vec, substream, SampleRng};
use crate::space::WeightedSpace;
use crate::vector::{add, neg, scale, sub};

pub use pava::nonincreasing_fit;

/// Default relative tolerance for membership and order comparisons.
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum ConeSpec {
    Orthant(WeightedSpace),
    PsdMatrices(usize),
    /// Points are taken in grid order.
    MonotoneNonneg(WeightedSpace),
}

impl ConeSpec {
    pub fn name(&self) -> &'static str {
        match self {
            ConeSpec::Orthant(_) => "orthant",
            ConeSpec::PsdMatrices(_) => "psd",
            ConeSpec::MonotoneNonneg(_) => "monotone",
        }
    }

    /// Dimension of the ambient real space.
    pub fn dim(&self) -> usize {
        match self {
            ConeSpec::Orthant(s) | ConeSpec::MonotoneNonneg(s) => s.len(),
            ConeSpec::PsdMatrices(n) => n * n,
        }
    }

    /// Per-coordinate weights of the ambient inner product.
    pub fn coordinate_weights(&self) -> Vec<f64> {
        match self {
            ConeSpec::Orthant(s) | ConeSpec::MonotoneNonneg(s) => s.weights().to_vec(),
            ConeSpec::PsdMatrices(n) => vec![1.0; n * n],
        }
    }

    pub fn inner(&self, g: &[f64], h: &[f64]) -> f64 {
        match self {
            ConeSpec::Orthant(s) | ConeSpec::MonotoneNonneg(s) => s.inner(g, h),
            ConeSpec::PsdMatrices(_) => g.iter().zip(h).map(|(a, b)| a * b).sum(),
        }
    }

    pub fn norm(&self, g: &[f64]) -> f64 {
        self.inner(g, g).max(0.0).sqrt()
    }

    /// True for the cones that are both self-dual and isotone projection cones.
    pub fn is_self_dual_isotone(&self) -> bool {
        matches!(self, ConeSpec::Orthant(_))
    }

    /// Validates that `g` lives in the ambient space.
    pub fn check(&self, g: &[f64]) -> Result<()> {
        if g.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: g.len(),
            });
        }
        if let ConeSpec::PsdMatrices(n) = self {
            psd_matrix(*n, g)?;
        }
        Ok(())
    }

    fn tolerance(&self, g: &[f64], tol: f64) -> f64 {
        tol * (1.0 + self.norm(g))
    }
}

fn psd_matrix(n: usize, g: &[f64]) -> Result<HermitianMatrix> {
    let max = g.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let mut defect: f64 = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            defect = defect.max((g[i * n + j] - g[j * n + i]).abs());
        }
    }
    if defect > crate::linalg::HERMITIAN_TOL * (1.0 + max) {
        return Err(Error::NonSymmetric { defect });
    }
    HermitianMatrix::from_real_symmetric(n, g)
}

fn psd_apply(n: usize, g: &[f64], f: impl Fn(f64) -> f64) -> Result<Vec<f64>> {
    let eig = hermitian_eig(&psd_matrix(n, g)?)?;
    let m: CMatrix = eig.apply_fn(f);
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            out[i * n + j] = 0.5 * (m[(i, j)].re + m[(j, i)].re);
        }
    }
    Ok(out)
}

/// Signed distance-like membership margin: nonnegative iff `g ∈ K₊`.
///
/// Orthant: smallest entry. PSD: smallest eigenvalue. Monotone: the smaller
/// of the smallest entry and the smallest descent `g_i - g_{i+1}`.
pub fn cone_margin(cone: &ConeSpec, g: &[f64]) -> Result<f64> {
    cone.check(g)?;
    Ok(match cone {
        ConeSpec::Orthant(_) => g.iter().copied().fold(f64::INFINITY, f64::min),
        ConeSpec::PsdMatrices(n) => hermitian_eig(&psd_matrix(*n, g)?)?.min_eigenvalue(),
        ConeSpec::MonotoneNonneg(_) => {
            let min_entry = g.iter().copied().fold(f64::INFINITY, f64::min);
            let min_descent = g.windows(2).map(|w| w[0] - w[1]).fold(f64::INFINITY, f64::min);
            min_entry.min(min_descent)
        }
    })
}

/// Membership in `K₊` up to `tol · (1 + ‖g‖)`.
pub fn cone_contains(cone: &ConeSpec, g: &[f64], tol: f64) -> Result<bool> {
    Ok(cone_margin(cone, g)? >= -cone.tolerance(g, tol))
}

/// Margin for membership in the dual cone `K₊°`: nonnegative iff `g ∈ K₊°`.
///
/// For the monotone cone, `K₊°` is cut out by the generators `1_{[0, j]}`,
/// so the margin is the smallest weighted prefix sum.
pub fn dual_margin(cone: &ConeSpec, g: &[f64]) -> Result<f64> {
    match cone {
        ConeSpec::Orthant(_) | ConeSpec::PsdMatrices(_) => cone_margin(cone, g),
        ConeSpec::MonotoneNonneg(s) => {
            cone.check(g)?;
            let mut acc = 0.0;
            let mut min = f64::INFINITY;
            for (x, w) in g.iter().zip(s.weights()) {
                acc += x * w;
                min = min.min(acc);
            }
            Ok(min)
        }
    }
}

pub fn dual_contains(cone: &ConeSpec, g: &[f64], tol: f64) -> Result<bool> {
    Ok(dual_margin(cone, g)? >= -cone.tolerance(g, tol))
}

/// Cone order `g ≤ h`, i.e. `h - g ∈ K₊`.
pub fn cone_leq(cone: &ConeSpec, g: &[f64], h: &[f64], tol: f64) -> Result<bool> {
    cone.check(g)?;
    cone.check(h)?;
    cone_contains(cone, &sub(h, g), tol)
}

/// Metric projection onto `K₊`.
pub fn project_cone(cone: &ConeSpec, g: &[f64]) -> Result<Vec<f64>> {
    cone.check(g)?;
    match cone {
        // The weighted objective is separable, so weights do not move the minimiser.
        ConeSpec::Orthant(_) => Ok(g.iter().map(|x| x.max(0.0)).collect()),
        ConeSpec::PsdMatrices(n) => psd_apply(*n, g, |l| l.max(0.0)),
        ConeSpec::MonotoneNonneg(s) => Ok(nonincreasing_fit(g, s.weights())
            .into_iter()
            .map(|x| x.max(0.0))
            .collect()),
    }
}

/// Projection onto the dual cone through `P_{K₊°}(u) = u + P_{K₊}(-u)`.
pub fn dual_project(cone: &ConeSpec, g: &[f64]) -> Result<Vec<f64>> {
    let p = project_cone(cone, &neg(g))?;
    Ok(add(g, &p))
}

/// Moreau decomposition `g = h1 - h2` with `h1 ∈ K₊`, `h2 ∈ K₊°`, `h1 ⊥ h2`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MoreauPair {
    pub h1: Vec<f64>,
    pub h2: Vec<f64>,
}

impl MoreauPair {
    /// `|⟨h1, h2⟩|`.
    pub fn orthogonality_defect(&self, cone: &ConeSpec) -> f64 {
        cone.inner(&self.h1, &self.h2).abs()
    }
}

pub fn moreau_decompose(cone: &ConeSpec, g: &[f64]) -> Result<MoreauPair> {
    let h1 = project_cone(cone, g)?;
    let h2 = dual_project(cone, &neg(g))?;
    Ok(MoreauPair { h1, h2 })
}

fn require_lattice(cone: &ConeSpec) -> Result<()> {
    if cone.is_self_dual_isotone() {
        Ok(())
    } else {
        Err(Error::ConeNotIsotone(cone.name()))
    }
}

/// `g₊ = g ∨ 0`, which coincides with `P_{K₊}(g)` on self-dual isotone cones.
pub fn positive_part(cone: &ConeSpec, g: &[f64]) -> Result<Vec<f64>> {
    require_lattice(cone)?;
    project_cone(cone, g)
}

/// Lattice absolute value `|g| = P(g) + P(-g)`.
pub fn lattice_abs(cone: &ConeSpec, g: &[f64]) -> Result<Vec<f64>> {
    require_lattice(cone)?;
    Ok(add(&project_cone(cone, g)?, &project_cone(cone, &neg(g))?))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LatticeOps {
    pub join: Vec<f64>,
    pub meet: Vec<f64>,
    pub abs_g: Vec<f64>,
}

/// Join, meet and absolute value in the Riesz space induced by the cone.
///
/// On the orthant `½(g + h ± |g - h|)` is the pointwise max/min; computing
/// the latter directly keeps `join + meet = g + h` free of rounding.
pub fn lattice_ops(cone: &ConeSpec, g: &[f64], h: &[f64]) -> Result<LatticeOps> {
    require_lattice(cone)?;
    cone.check(g)?;
    cone.check(h)?;
    let join = g.iter().zip(h).map(|(a, b)| a.max(*b)).collect();
    let meet = g.iter().zip(h).map(|(a, b)| a.min(*b)).collect();
    let abs_g = lattice_abs(cone, g)?;
    Ok(LatticeOps { join, meet, abs_g })
}

/// Pointwise join on the orthant.
pub fn join(g: &[f64], h: &[f64]) -> Vec<f64> {
    g.iter().zip(h).map(|(a, b)| a.max(*b)).collect()
}

/// Pointwise meet on the orthant.
pub fn meet(g: &[f64], h: &[f64]) -> Vec<f64> {
    g.iter().zip(h).map(|(a, b)| a.min(*b)).collect()
}

/// Pointwise positive part on the orthant.
pub fn pos(g: &[f64]) -> Vec<f64> {
    g.iter().map(|x| x.max(0.0)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", content = "witness", rename_all = "snake_case")]
pub enum Verdict<W> {
    Holds,
    Witness(W),
}

impl<W> Verdict<W> {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeReport<W> {
    #[serde(flatten)]
    pub verdict: Verdict<W>,
    /// Most extreme violation measure observed; `≤ tol` scale when the property holds.
    pub margin: f64,
    pub trials: usize,
}

/// Structured candidates tried before random sampling.
pub fn corner_suite(cone: &ConeSpec) -> Vec<Vec<f64>> {
    let d = cone.dim();
    let mut out = Vec::new();
    let mut geometric = Vec::with_capacity(d);
    let mut x = 1.0;
    for _ in 0..d {
        geometric.push(x);
        x *= -0.5;
    }
    let alternating: Vec<f64> = (0..d).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
    match cone {
        ConeSpec::PsdMatrices(n) => {
            let n = *n;
            let seeds: Vec<Vec<f64>> = vec![
                geometric[..n].to_vec(),
                alternating[..n].to_vec(),
                vec![1.0; n],
            ];
            for v in seeds.iter().chain(
                (0..n)
                    .map(|i| {
                        let mut e = vec![0.0; n];
                        e[i] = 1.0;
                        e
                    })
                    .collect::<Vec<_>>()
                    .iter(),
            ) {
                // diag(v) and the rank-one matrix v vᵀ.
                let mut diag = vec![0.0; n * n];
                let mut rank_one = vec![0.0; n * n];
                for i in 0..n {
                    diag[i * n + i] = v[i];
                    for j in 0..n {
                        rank_one[i * n + j] = v[i] * v[j];
                    }
                }
                out.push(diag.clone());
                out.push(neg(&diag));
                out.push(rank_one.clone());
                out.push(neg(&rank_one));
            }
        }
        _ => {
            out.push(geometric);
            out.push(alternating.clone());
            out.push(neg(&alternating));
            out.push(vec![1.0; d]);
            out.push(vec![-1.0; d]);
            for i in 0..d {
                let mut e = vec![0.0; d];
                e[i] = 1.0;
                out.push(e.clone());
                out.push(neg(&e));
            }
        }
    }
    out
}

/// Random vector of the ambient space (symmetric for the PSD cone).
pub fn random_ambient(cone: &ConeSpec, rng: &mut SampleRng) -> Vec<f64> {
    match cone {
        ConeSpec::PsdMatrices(n) => {
            let n = *n;
            let raw = gaussian_vec(rng, n * n);
            let mut out = vec![0.0; n * n];
            for i in 0..n {
                for j in 0..n {
                    out[i * n + j] = 0.5 * (raw[i * n + j] + raw[j * n + i]);
                }
            }
            out
        }
        _ => gaussian_vec(rng, cone.dim()),
    }
}

/// Searches for a vector lying in exactly one of `K₊` and `K₊°`.
///
/// Membership in `K₊°` is certified by `dual_project` having the candidate as
/// a fixed point. The margin is the largest asymmetry found, measured as the
/// distance of a member of one cone from the other cone.
pub fn probe_self_dual(cone: &ConeSpec, samples: usize, seed: u64) -> Result<ProbeReport<Vec<f64>>> {
    let tol = DEFAULT_TOL;
    let mut worst: f64 = 0.0;
    let mut trials = 0;

    let mut test = |v: &[f64], trials: &mut usize| -> Result<Option<Vec<f64>>> {
        *trials += 1;
        let scale_tol = cone.tolerance(v, tol);
        let dual_fixed = crate::vector::max_abs_diff(&dual_project(cone, v)?, v) <= scale_tol;
        let in_cone = cone_contains(cone, v, tol)?;
        if dual_fixed && !in_cone {
            let gap = cone.norm(&sub(v, &project_cone(cone, v)?));
            worst = worst.max(gap);
            return Ok(Some(v.to_vec()));
        }
        if in_cone && !dual_fixed {
            let gap = cone.norm(&sub(v, &dual_project(cone, v)?));
            worst = worst.max(gap);
            return Ok(Some(v.to_vec()));
        }
        if dual_fixed {
            worst = worst.max(cone.norm(&sub(v, &project_cone(cone, v)?)));
        }
        Ok(None)
    };

    for v in corner_suite(cone) {
        if let Some(w) = test(&v, &mut trials)? {
            return Ok(ProbeReport { verdict: Verdict::Witness(w), margin: worst, trials });
        }
    }
    let seed = derive_seed(seed, "probe_self_dual");
    for i in 0..samples {
        let mut rng = substream(seed, i as u64);
        let x = random_ambient(cone, &mut rng);
        for candidate in [dual_project(cone, &x)?, project_cone(cone, &x)?] {
            if let Some(w) = test(&candidate, &mut trials)? {
                return Ok(ProbeReport { verdict: Verdict::Witness(w), margin: worst, trials });
            }
        }
    }
    Ok(ProbeReport { verdict: Verdict::Holds, margin: worst, trials })
}

/// Searches for `g ≤ h` with `P(g) ≰ P(h)`.
///
/// The margin is the smallest `cone_margin(P(h) - P(g))` seen; a witness is
/// reported once it falls below the membership tolerance.
pub fn probe_isotone(
    cone: &ConeSpec,
    samples: usize,
    seed: u64,
) -> Result<ProbeReport<(Vec<f64>, Vec<f64>)>> {
    let tol = DEFAULT_TOL;
    let mut worst = f64::INFINITY;
    let mut trials = 0;

    let mut test = |g: &[f64], h: &[f64], trials: &mut usize| -> Result<bool> {
        *trials += 1;
        if !cone_leq(cone, g, h, tol)? {
            return Ok(false);
        }
        let diff = sub(&project_cone(cone, h)?, &project_cone(cone, g)?);
        let margin = cone_margin(cone, &diff)?;
        worst = worst.min(margin);
        Ok(margin < -cone.tolerance(&diff, tol))
    };

    let corners = corner_suite(cone);
    let positive: Vec<Vec<f64>> = corners
        .iter()
        .map(|c| project_cone(cone, c))
        .collect::<Result<_>>()?;
    for g in &corners {
        if test(g, g, &mut trials)? {
            return Ok(ProbeReport {
                verdict: Verdict::Witness((g.clone(), g.clone())),
                margin: worst,
                trials,
            });
        }
        for k in &positive {
            let h = add(g, k);
            if test(g, &h, &mut trials)? {
                return Ok(ProbeReport {
                    verdict: Verdict::Witness((g.clone(), h)),
                    margin: worst,
                    trials,
                });
            }
        }
    }
    let seed = derive_seed(seed, "probe_isotone");
    for i in 0..samples {
        let mut rng = substream(seed, i as u64);
        let g = random_ambient(cone, &mut rng);
        let k = project_cone(cone, &random_ambient(cone, &mut rng))?;
        let s: f64 = rand::Rng::random_range(&mut rng, 0.0..2.0);
        let h = add(&g, &scale(&k, s));
        if test(&g, &h, &mut trials)? {
            return Ok(ProbeReport { verdict: Verdict::Witness((g, h)), margin: worst, trials });
        }
    }
    Ok(ProbeReport {
        verdict: Verdict::Holds,
        margin: if worst.is_finite() { worst } else { 0.0 },
        trials,
    })
}
