//! Absolute mappings `S: H → K₊` and the paired-element construction.
//!
//! Domain vectors are complex sections of a [`FiberedSpace`]; target vectors
//! are real functions in the cone returned by [`PairingSpec::target_cone`].

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg;
use crate::ordered::{cone_contains, cone_leq, meet, ConeSpec, DEFAULT_TOL};
use crate::sampling::{complex_gaussian_vec, gaussian_vec, SampleRng};
use crate::space::{complexify, realify, FiberedSpace, WeightedSpace};
use crate::vector::{cmax_abs_diff, csub, max_abs_diff, sub};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, PartialEq)]
pub enum PairingSpec {
    /// Pointwise fiber norm `S f(x) = |f(x)|ₓ` into the orthant over the base.
    BundleModulus {
        domain: FiberedSpace,
        /// Unit section used where `f1` vanishes.
        zeta: Vec<Complex64>,
    },
    /// `S f = ‖f‖` into the half-line (one-point base of unit weight).
    NormPairing {
        domain: FiberedSpace,
        /// Unit vector used for `f1 = 0`.
        zeta: Vec<Complex64>,
    },
    /// `S g = |g|` on a real weighted space with its orthant.
    LatticeAbs { domain: FiberedSpace },
    /// Nonincreasing rearrangement of the modulus onto a weighted grid.
    Rearrangement {
        domain: FiberedSpace,
        target: WeightedSpace,
    },
}

impl PairingSpec {
    /// Bundle modulus with the first standard basis vector as reference section.
    pub fn bundle(domain: FiberedSpace) -> Self {
        let zeta = domain.first_basis_section();
        PairingSpec::BundleModulus { domain, zeta }
    }

    pub fn bundle_with_zeta(domain: FiberedSpace, zeta: Vec<Complex64>) -> Result<Self> {
        domain.check_len(zeta.len())?;
        for x in 0..domain.num_points() {
            let n = linalg::norm(domain.fiber(&zeta, x));
            if (n - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidParameters(format!(
                    "reference section must have unit norm in every fiber, got {n} at point {x}"
                )));
            }
        }
        Ok(PairingSpec::BundleModulus { domain, zeta })
    }

    pub fn norm_pairing(domain: FiberedSpace) -> Self {
        let mut zeta = vec![ZERO; domain.dim()];
        zeta[0] = Complex64::new(1.0 / domain.component_weights()[0].sqrt(), 0.0);
        PairingSpec::NormPairing { domain, zeta }
    }

    pub fn lattice_abs(space: WeightedSpace) -> Self {
        PairingSpec::LatticeAbs {
            domain: FiberedSpace::scalar(space),
        }
    }

    /// Fails unless the target grid carries at least the mass of the domain.
    pub fn rearrangement(domain: WeightedSpace, target: WeightedSpace) -> Result<Self> {
        let (dm, tm) = (domain.total_mass(), target.total_mass());
        if tm < dm * (1.0 - 1e-12) {
            return Err(Error::InvalidSpace(format!(
                "rearrangement target mass {tm} is smaller than the domain mass {dm}"
            )));
        }
        Ok(PairingSpec::Rearrangement {
            domain: FiberedSpace::scalar(domain),
            target,
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            PairingSpec::BundleModulus { .. } => "bundle modulus",
            PairingSpec::NormPairing { .. } => "norm pairing",
            PairingSpec::LatticeAbs { .. } => "lattice absolute value",
            PairingSpec::Rearrangement { .. } => "rearrangement",
        }
    }

    pub fn domain(&self) -> &FiberedSpace {
        match self {
            PairingSpec::BundleModulus { domain, .. }
            | PairingSpec::NormPairing { domain, .. }
            | PairingSpec::LatticeAbs { domain }
            | PairingSpec::Rearrangement { domain, .. } => domain,
        }
    }

    pub fn target_space(&self) -> WeightedSpace {
        match self {
            PairingSpec::BundleModulus { domain, .. } | PairingSpec::LatticeAbs { domain } => {
                domain.base().clone()
            }
            PairingSpec::NormPairing { .. } => WeightedSpace::uniform(1).expect("one point"),
            PairingSpec::Rearrangement { target, .. } => target.clone(),
        }
    }

    pub fn target_cone(&self) -> ConeSpec {
        match self {
            PairingSpec::Rearrangement { target, .. } => ConeSpec::MonotoneNonneg(target.clone()),
            _ => ConeSpec::Orthant(self.target_space()),
        }
    }

    /// Whether `pair` is available.
    pub fn has_pairing(&self) -> bool {
        !matches!(self, PairingSpec::Rearrangement { .. })
    }

    /// Whether the paired condition can be read off fiber by fiber.
    pub fn is_pointwise(&self) -> bool {
        matches!(
            self,
            PairingSpec::BundleModulus { .. } | PairingSpec::LatticeAbs { .. }
        )
    }

    fn check_domain(&self, f: &[Complex64]) -> Result<()> {
        self.domain().check_len(f.len())?;
        if matches!(self, PairingSpec::LatticeAbs { .. }) {
            realify(f, 0.0)?;
        }
        Ok(())
    }

    pub fn domain_inner(&self, u: &[Complex64], v: &[Complex64]) -> Complex64 {
        self.domain().inner(u, v)
    }

    pub fn target_inner(&self, g: &[f64], h: &[f64]) -> f64 {
        match self {
            PairingSpec::NormPairing { .. } => g.iter().zip(h).map(|(a, b)| a * b).sum(),
            PairingSpec::Rearrangement { target, .. } => target.inner(g, h),
            _ => self.domain().base().inner(g, h),
        }
    }
}

/// `S(f)`.
pub fn abs_map(s: &PairingSpec, f: &[Complex64]) -> Result<Vec<f64>> {
    s.check_domain(f)?;
    Ok(match s {
        PairingSpec::BundleModulus { domain, .. } => domain.fiber_norms(f),
        PairingSpec::NormPairing { domain, .. } => vec![domain.norm(f)],
        PairingSpec::LatticeAbs { .. } => f.iter().map(|z| z.re.abs()).collect(),
        PairingSpec::Rearrangement { domain, target } => {
            rearrange(&domain.fiber_norms(f), domain.base().weights(), target.weights())
        }
    })
}

/// Nonincreasing rearrangement of `values ≥ 0` on the mass line.
///
/// Each target cell receives the root mean square of the sorted profile over
/// its mass interval, which keeps the norm and reduces to a sort when the two
/// grids coincide.
fn rearrange(values: &[f64], weights: &[f64], target: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[j].total_cmp(&values[i]).then(i.cmp(&j)));

    let mut out = vec![0.0; target.len()];
    let mut src = order.iter().map(|&i| (values[i], weights[i])).peekable();
    // Mass still unassigned in the current source cell.
    let mut remaining = src.peek().map_or(0.0, |&(_, w)| w);
    for (cell, &capacity) in out.iter_mut().zip(target) {
        let mut left = capacity;
        let mut acc = 0.0;
        while left > 0.0 {
            let Some(&(v, _)) = src.peek() else { break };
            let take = remaining.min(left);
            acc += v * v * take;
            left -= take;
            remaining -= take;
            if remaining <= 0.0 {
                src.next();
                remaining = src.peek().map_or(0.0, |&(_, w)| w);
            }
        }
        *cell = (acc / capacity).sqrt();
    }
    out
}

/// The element `f2` paired with `f1` and satisfying `S(f2) = g`.
pub fn pair(s: &PairingSpec, f1: &[Complex64], g: &[f64]) -> Result<Vec<Complex64>> {
    s.check_domain(f1)?;
    let cone = s.target_cone();
    cone.check(g)?;
    if let PairingSpec::Rearrangement { .. } = s {
        return Err(Error::PairingUnavailable(s.name()));
    }
    if !cone_contains(&cone, g, DEFAULT_TOL)? {
        let margin = crate::ordered::cone_margin(&cone, g)?;
        return Err(Error::ConeViolation { margin });
    }
    let g: Vec<f64> = g.iter().map(|x| x.max(0.0)).collect();
    Ok(match s {
        PairingSpec::BundleModulus { domain, zeta } => {
            let mut f2 = vec![ZERO; f1.len()];
            for x in 0..domain.num_points() {
                let r = domain.fiber_range(x);
                let n = linalg::norm(&f1[r.clone()]);
                let (src, scale) = if n > 0.0 { (f1, g[x] / n) } else { (zeta.as_slice(), g[x]) };
                for i in r {
                    f2[i] = src[i] * scale;
                }
            }
            f2
        }
        PairingSpec::NormPairing { domain, zeta } => {
            let n = domain.norm(f1);
            let (src, scale) = if n > 0.0 { (f1, g[0] / n) } else { (zeta.as_slice(), g[0]) };
            src.iter().map(|z| z * scale).collect()
        }
        PairingSpec::LatticeAbs { .. } => f1
            .iter()
            .zip(&g)
            .map(|(z, gx)| Complex64::new(if z.re < 0.0 { -gx } else { *gx }, 0.0))
            .collect(),
        PairingSpec::Rearrangement { .. } => unreachable!(),
    })
}

/// `⟨f1, f2⟩` is real and equals `⟨S f1, S f2⟩`, within `tol · (1 + ‖f1‖‖f2‖)`.
pub fn is_paired(s: &PairingSpec, f1: &[Complex64], f2: &[Complex64], tol: f64) -> Result<bool> {
    let (s1, s2) = (abs_map(s, f1)?, abs_map(s, f2)?);
    let ip = s.domain_inner(f1, f2);
    let scale = 1.0 + s.domain().norm(f1) * s.domain().norm(f2);
    let target = s.target_inner(&s1, &s2);
    Ok(ip.im.abs() <= tol * scale && (ip.re - target).abs() <= tol * scale)
}

/// Fiberwise form of [`is_paired`]: `⟨f1(x), f2(x)⟩ₓ = |f1(x)|ₓ |f2(x)|ₓ` at every point.
pub fn is_paired_pointwise(
    s: &PairingSpec,
    f1: &[Complex64],
    f2: &[Complex64],
    tol: f64,
) -> Result<bool> {
    if !s.is_pointwise() {
        return Err(Error::InvalidParameters(format!(
            "pointwise pairing test is not defined for the {}",
            s.name()
        )));
    }
    s.check_domain(f1)?;
    s.check_domain(f2)?;
    let domain = s.domain();
    let scale = 1.0 + domain.norm(f1) * domain.norm(f2);
    for x in 0..domain.num_points() {
        let (a, b) = (domain.fiber(f1, x), domain.fiber(f2, x));
        let local = linalg::dot(a, b);
        let defect = (local - linalg::norm(a) * linalg::norm(b)).norm();
        if defect * domain.base().weights()[x] > tol * scale {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DifferenceReport {
    pub holds: bool,
    /// `max |S(f1 - f2) - (S f1 - S f2)|`.
    pub defect: f64,
    /// Whether `f1 - f2` and `f2` are paired.
    pub remainder_paired: bool,
}

/// For paired `f1, f2` with `S f2 ≤ S f1`: `S(f1 - f2) = S f1 - S f2` and
/// `f1 - f2` is paired with `f2`.
pub fn check_difference_lemma(
    s: &PairingSpec,
    f1: &[Complex64],
    f2: &[Complex64],
) -> Result<DifferenceReport> {
    let tol = DEFAULT_TOL;
    if !is_paired(s, f1, f2, tol)? {
        return Err(Error::PreconditionViolated("f1 and f2 are not paired".into()));
    }
    let (s1, s2) = (abs_map(s, f1)?, abs_map(s, f2)?);
    if !cone_leq(&s.target_cone(), &s2, &s1, tol)? {
        return Err(Error::PreconditionViolated("S(f2) ≤ S(f1) fails".into()));
    }
    let diff = csub(f1, f2);
    let defect = max_abs_diff(&abs_map(s, &diff)?, &sub(&s1, &s2));
    let remainder_paired = is_paired(s, &diff, f2, tol)?;
    let scale = 1.0 + s1.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    Ok(DifferenceReport {
        holds: defect <= tol * scale && remainder_paired,
        defect,
        remainder_paired,
    })
}

/// Projection of `(u, w) ∈ ℂᵏ ⊕ ℝ` onto the second-order cone `{|u| ≤ w}`.
pub fn soc_project(u: &[Complex64], w: f64) -> (Vec<Complex64>, f64) {
    let n = linalg::norm(u);
    if n <= w {
        (u.to_vec(), w)
    } else if n <= -w {
        (vec![ZERO; u.len()], 0.0)
    } else {
        let r = 0.5 * (n + w);
        (u.iter().map(|z| z * (r / n)).collect(), r)
    }
}

/// Projection of `(f1, g)` onto `C = {(u, v) : v - S(u) ∈ K₊°}` computed
/// one second-order cone at a time. Needs an orthant target.
pub fn project_c_soc(s: &PairingSpec, f1: &[Complex64], g: &[f64]) -> Result<(Vec<Complex64>, Vec<f64>)> {
    s.check_domain(f1)?;
    s.target_cone().check(g)?;
    match s {
        PairingSpec::BundleModulus { domain, .. } | PairingSpec::LatticeAbs { domain } => {
            // Both components at a point carry the same weight m(x), so the
            // weighted projection splits into unweighted fiberwise ones.
            let mut u = vec![ZERO; f1.len()];
            let mut v = vec![0.0; g.len()];
            for x in 0..domain.num_points() {
                let r = domain.fiber_range(x);
                let (ux, vx) = soc_project(&f1[r.clone()], g[x]);
                u[r].copy_from_slice(&ux);
                v[x] = vx;
            }
            Ok((u, v))
        }
        PairingSpec::NormPairing { domain, .. } => {
            let root: Vec<f64> = domain.component_weights().iter().map(|m| m.sqrt()).collect();
            let scaled: Vec<Complex64> = f1.iter().zip(&root).map(|(z, r)| z * r).collect();
            let (us, v) = soc_project(&scaled, g[0]);
            let u = us.iter().zip(&root).map(|(z, r)| z / r).collect();
            Ok((u, vec![v]))
        }
        PairingSpec::Rearrangement { .. } => Err(Error::PairingUnavailable(s.name())),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UniquenessReport {
    pub holds: bool,
    /// Largest deviation between the two constructions of `f2`.
    pub deviation: f64,
}

/// Builds `f2` with `S(f2) = g` twice, by the closed form and from the
/// projection of `(f1, g)` onto `C`, and compares them.
pub fn pairing_uniqueness_check(s: &PairingSpec, f1: &[Complex64], g: &[f64]) -> Result<UniquenessReport> {
    let cone = s.target_cone();
    let s1 = abs_map(s, f1)?;
    if !cone_contains(&cone, g, DEFAULT_TOL)? || !cone_leq(&cone, g, &s1, DEFAULT_TOL)? {
        return Err(Error::PreconditionViolated("requires 0 ≤ g ≤ S(f1)".into()));
    }
    let direct = pair(s, f1, g)?;
    // The projection of (f1, g) is ½(f1 + f2, S f1 + g), so f2 = 2u - f1.
    let (u, _) = project_c_soc(s, f1, g)?;
    let via_c: Vec<Complex64> = u.iter().zip(f1).map(|(a, b)| 2.0 * a - b).collect();
    let deviation = cmax_abs_diff(&direct, &via_c);
    let scale = 1.0 + f1.iter().fold(0.0f64, |m, z| m.max(z.norm()));
    Ok(UniquenessReport {
        holds: deviation <= 1e-8 * scale,
        deviation,
    })
}

/// Random vector of the domain space (real for the lattice absolute value).
pub fn random_domain(s: &PairingSpec, rng: &mut SampleRng) -> Vec<Complex64> {
    let n = s.domain().dim();
    match s {
        PairingSpec::LatticeAbs { .. } => complexify(&gaussian_vec(rng, n)),
        _ => complex_gaussian_vec(rng, n),
    }
}

/// Random element of the target cone with independent |Gaussian| entries.
pub fn random_positive(s: &PairingSpec, rng: &mut SampleRng) -> Result<Vec<f64>> {
    let cone = s.target_cone();
    let raw = gaussian_vec(rng, cone.dim());
    match cone {
        ConeSpec::Orthant(_) => Ok(raw.iter().map(|x| x.abs()).collect()),
        _ => crate::ordered::project_cone(&cone, &raw),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairedSample {
    pub f1: Vec<Complex64>,
    pub g: Vec<f64>,
    pub f2: Vec<Complex64>,
}

/// Draws `f1`, a target `g ∈ K₊` and `f2 = pair(f1, g)`.
///
/// With `dominated`, `g = u ∧ S(f1)` for a random `u ∈ K₊`, otherwise `g` is
/// unconstrained in `K₊`.
pub fn paired_sample(s: &PairingSpec, rng: &mut SampleRng, dominated: bool) -> Result<PairedSample> {
    let mut f1 = random_domain(s, rng);
    // Occasionally knock out a fiber so the zero branch of the construction is exercised.
    if s.is_pointwise() && rng.random_bool(0.25) {
        let x = rng.random_range(0..s.domain().num_points());
        for i in s.domain().fiber_range(x) {
            f1[i] = ZERO;
        }
    }
    let mut g = random_positive(s, rng)?;
    if dominated {
        g = meet(&g, &abs_map(s, &f1)?);
    }
    let f2 = pair(s, &f1, &g)?;
    Ok(PairedSample { f1, g, f2 })
}
