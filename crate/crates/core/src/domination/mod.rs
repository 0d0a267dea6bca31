//! Domination of `e^{-tA}` by `e^{-tB}` through a pairing `S`, tested along
//! the semigroup, the resolvent and the forms.
//!
//! Semigroup and resolvent checks use the exact blockwise criterion. The form
//! check combines an exact corner suite (for pointwise pairings the paired
//! pairs with the smallest margin are supported on one or two fibers) with
//! paired random samples.

mod exact;

pub use exact::{domination_margin_at, exact_bundle_domination, exact_domination, BlockWitness, ExactVerdict};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::forms::{check_positivity_preserving, OperatorForm, DEFAULT_ALPHA_OFFSETS, DEFAULT_SAMPLES, DEFAULT_T_GRID};
use crate::linalg::{hermitian_eig, norm, top_singular, CMatrix, HermitianMatrix};
use crate::pairing::{abs_map, is_paired, pair, paired_sample, random_domain, random_positive, PairingSpec};
use crate::sampling::{derive_seed, substream};
use crate::vector::max_abs_diff;

/// Time added to every grid by the equivalence harness; form inequalities are
/// derivatives of the semigroup ones at `t = 0`.
pub const SMALL_TIME: f64 = 1e-3;
/// Offset added above `λ` so that the resolvent grid also sees large `α`.
pub const LARGE_ALPHA_OFFSET: f64 = 1e3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckKind {
    Semigroup,
    Resolvent,
    Form,
    Kato,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DominationWitness {
    pub check: CheckKind,
    pub f1: Vec<Complex64>,
    /// Paired partner for the form check.
    pub f2: Option<Vec<Complex64>>,
    /// Time or resolvent parameter.
    pub parameter: Option<f64>,
    pub margin: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridMargin {
    pub parameter: f64,
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub holds: bool,
    /// Smallest signed margin; `0` is tight.
    pub worst_margin: f64,
    pub margins: Vec<GridMargin>,
    pub witness: Option<DominationWitness>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdealRecord {
    /// Every vector is admissible in finite dimension.
    pub i1_vacuous: bool,
    pub i2_trials: usize,
    /// `pair(f1, g)` returned a vector with modulus `g`, paired with `f1`.
    pub i2_holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FormOutcome {
    pub holds: bool,
    pub worst_margin: f64,
    pub trials: usize,
    pub ideal: IdealRecord,
    pub witness: Option<DominationWitness>,
}

fn check_operands(a: &OperatorForm, b: &OperatorForm, s: &PairingSpec) -> Result<()> {
    if !s.has_pairing() {
        return Err(Error::PairingUnavailable(s.name()));
    }
    if a.space() != s.domain() {
        return Err(Error::DimensionMismatch { expected: s.domain().dim(), actual: a.dim() });
    }
    let target = s.target_cone().dim();
    if b.dim() != target {
        return Err(Error::DimensionMismatch { expected: target, actual: b.dim() });
    }
    if !b.is_real() {
        return Err(Error::NonRealInput { imag: b.matrix().max_imag() });
    }
    if matches!(s, PairingSpec::LatticeAbs { .. }) && !a.is_real() {
        return Err(Error::NonRealInput { imag: a.matrix().max_imag() });
    }
    Ok(())
}

fn require_positive_target(b: &OperatorForm, s: &PairingSpec, t_grid: &[f64], tol: f64) -> Result<()> {
    let report = check_positivity_preserving(b, &s.target_cone(), t_grid, 0, 0, tol)?;
    if !report.holds {
        return Err(Error::PositivityPreconditionFailed(format!(
            "cone margin {:e} under the target semigroup",
            report.worst_margin
        )));
    }
    Ok(())
}

fn grid_check<F>(s: &PairingSpec, grid: &[f64], kind: CheckKind, tol: f64, mut ops: F) -> Result<CheckOutcome>
where
    F: FnMut(f64) -> Result<(CMatrix, CMatrix)>,
{
    let mut out = CheckOutcome { holds: true, worst_margin: f64::INFINITY, margins: Vec::new(), witness: None };
    for &param in grid {
        let (p, q) = ops(param)?;
        let v = exact_domination(s, &p, &q, tol)?;
        out.margins.push(GridMargin { parameter: param, margin: v.margin });
        out.worst_margin = out.worst_margin.min(v.margin);
        if let Some(w) = v.witness {
            out.holds = false;
            if out.witness.as_ref().is_none_or(|old| w.margin < old.margin) {
                out.witness = Some(DominationWitness {
                    check: kind,
                    f1: w.f,
                    f2: None,
                    parameter: Some(param),
                    margin: w.margin,
                });
            }
        }
    }
    if !out.worst_margin.is_finite() {
        out.worst_margin = 0.0;
    }
    Ok(out)
}

/// `e^{-tA}` dominated by `e^{-tB}` at every grid time, by the exact criterion.
pub fn check_semigroup_domination(
    a: &OperatorForm,
    b: &OperatorForm,
    s: &PairingSpec,
    t_grid: &[f64],
    tol: f64,
) -> Result<CheckOutcome> {
    check_operands(a, b, s)?;
    require_positive_target(b, s, t_grid, tol)?;
    grid_check(s, t_grid, CheckKind::Semigroup, tol, |t| Ok((a.semigroup(t)?, b.semigroup(t)?)))
}

/// `α(A + α)⁻¹ = α R_A(α)` for `α > 0`; the scaling keeps margins comparable
/// across the grid and does not change the verdict.
fn scaled_resolvent(f: &OperatorForm, alpha: f64) -> Result<CMatrix> {
    let r = f.resolvent(alpha)?;
    Ok(if alpha > 0.0 { r.scale_real(alpha) } else { r })
}

/// `(A + α)⁻¹` dominated by `(B + α)⁻¹` for every `α` on the grid.
pub fn check_resolvent_domination(
    a: &OperatorForm,
    b: &OperatorForm,
    s: &PairingSpec,
    alpha_grid: &[f64],
    tol: f64,
) -> Result<CheckOutcome> {
    check_operands(a, b, s)?;
    let lambda = a.lambda().max(b.lambda());
    if let Some(&alpha) = alpha_grid.iter().find(|&&al| !(al > lambda)) {
        return Err(Error::AlphaOutOfRange { alpha, lambda });
    }
    grid_check(s, alpha_grid, CheckKind::Resolvent, tol, |al| {
        Ok((scaled_resolvent(a, al)?, scaled_resolvent(b, al)?))
    })
}

fn unit(d: usize, i: usize) -> Vec<Complex64> {
    let mut v = vec![Complex64::new(0.0, 0.0); d];
    v[i] = Complex64::new(1.0, 0.0);
    v
}

/// Paired pairs on which the form inequality is tightest.
///
/// Pointwise pairings: `(e_y ⊗ v, e_x ⊗ w)` with `v` the top right singular
/// vector of the Gram block `G_xy` and `w = -G_xy v / σ`, and `(e_x ⊗ v, e_x ⊗ v)`
/// with `v` a bottom eigenvector of `G_xx`. Norm pairing: the bottom
/// eigenvector paired with itself.
fn form_corners(a: &OperatorForm, s: &PairingSpec) -> Result<Vec<(Vec<Complex64>, Vec<Complex64>)>> {
    let space = s.domain();
    let d = space.dim();
    let mut out = Vec::new();
    if s.is_pointwise() {
        let g = a.gram();
        for x in 0..space.num_points() {
            let rx = space.fiber_range(x);
            for y in 0..space.num_points() {
                let ry = space.fiber_range(y);
                let block = g.block(rx.start, ry.start, rx.len(), ry.len());
                if x == y {
                    let eig = hermitian_eig(&HermitianMatrix::new(block)?)?;
                    let mut f = vec![Complex64::new(0.0, 0.0); d];
                    f[rx.clone()].copy_from_slice(&eig.eigenvector(0));
                    out.push((f.clone(), f));
                    continue;
                }
                let (sigma, mut v) = top_singular(&block);
                if ry.len() == 1 {
                    v = vec![Complex64::new(1.0, 0.0)];
                }
                let w: Vec<Complex64> = if sigma > 0.0 {
                    block.mul_vec(&v).iter().map(|z| -z / sigma).collect()
                } else {
                    unit(rx.len(), 0)
                };
                let mut f1 = vec![Complex64::new(0.0, 0.0); d];
                f1[ry].copy_from_slice(&v);
                let mut f2 = vec![Complex64::new(0.0, 0.0); d];
                f2[rx.clone()].copy_from_slice(&w);
                out.push((f1, f2));
            }
        }
    } else {
        let inv: Vec<f64> = space.component_weights().iter().map(|m| 1.0 / m.sqrt()).collect();
        let f: Vec<Complex64> = a.eigen().eigenvector(0).iter().zip(&inv).map(|(z, r)| z * r).collect();
        out.push((f.clone(), f));
    }
    Ok(out)
}

/// `Re a(f1, f2) - b(S f1, S f2)`.
pub fn form_margin(a: &OperatorForm, b: &OperatorForm, s: &PairingSpec, f1: &[Complex64], f2: &[Complex64]) -> Result<f64> {
    let lhs = a.form_eval(f1, f2)?.re;
    let rhs = b.form_real(&abs_map(s, f1)?, &abs_map(s, f2)?)?;
    Ok(lhs - rhs)
}

/// `Re a(f1, f2) ≥ b(S f1, S f2)` over paired `(f1, f2)`: exact corners,
/// then `samples` paired draws alternating `g ≤ S f1` and unconstrained `g`,
/// each also tried against itself.
pub fn check_form_domination(
    a: &OperatorForm,
    b: &OperatorForm,
    s: &PairingSpec,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<FormOutcome> {
    check_operands(a, b, s)?;
    let scale = 1.0 + a.gram().max_abs() + b.gram().max_abs();
    let space = s.domain();
    let mut out = FormOutcome {
        holds: true,
        worst_margin: f64::INFINITY,
        trials: 0,
        ideal: IdealRecord { i1_vacuous: true, i2_trials: 0, i2_holds: true },
        witness: None,
    };
    let test = |f1: &[Complex64], f2: &[Complex64], out: &mut FormOutcome| -> Result<()> {
        out.trials += 1;
        let margin = form_margin(a, b, s, f1, f2)?;
        out.worst_margin = out.worst_margin.min(margin);
        let allowed = tol * scale * (1.0 + space.norm(f1) * space.norm(f2));
        if margin < -allowed && out.witness.as_ref().is_none_or(|w| margin < w.margin) {
            out.holds = false;
            out.witness = Some(DominationWitness {
                check: CheckKind::Form,
                f1: f1.to_vec(),
                f2: Some(f2.to_vec()),
                parameter: None,
                margin,
            });
        }
        Ok(())
    };

    for (f1, f2) in form_corners(a, s)? {
        test(&f1, &f2, &mut out)?;
    }
    let seed = derive_seed(seed, "form_domination");
    for i in 0..samples {
        let mut rng = substream(seed, i as u64);
        let dominated = i % 2 == 0;
        let sample = paired_sample(s, &mut rng, dominated)?;
        if dominated {
            out.ideal.i2_trials += 1;
            let back = abs_map(s, &sample.f2)?;
            let round_trip = max_abs_diff(&back, &sample.g) <= 1e-10 * (1.0 + sample.g.iter().fold(0.0f64, |m, x| m.max(x.abs())));
            if !round_trip || !is_paired(s, &sample.f1, &sample.f2, 1e-10)? {
                out.ideal.i2_holds = false;
            }
        }
        test(&sample.f1, &sample.f2, &mut out)?;
        test(&sample.f1, &sample.f1, &mut out)?;
    }
    if !out.worst_margin.is_finite() {
        out.worst_margin = 0.0;
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KatoWitness {
    pub f: Vec<Complex64>,
    pub g: Vec<f64>,
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KatoReport {
    pub holds: bool,
    /// Smallest `Re⟨pair(f, g), A f⟩ - b(S f, g)`.
    pub worst_margin: f64,
    pub trials: usize,
    pub witness: Option<KatoWitness>,
}

/// `Re⟨pair(f, g), A f⟩ - b(S f, g)`.
pub fn kato_margin(a: &OperatorForm, b: &OperatorForm, s: &PairingSpec, f: &[Complex64], g: &[f64]) -> Result<f64> {
    let f2 = pair(s, f, g)?;
    let lhs = a.form_eval(f, &f2)?.re;
    Ok(lhs - b.form_real(&abs_map(s, f)?, g)?)
}

/// Kato's inequality on sampled `f` and `g ∈ K₊`, including `g = S f` and
/// `f = 0`. Requires exact semigroup domination on the default grid.
pub fn kato_check(
    a: &OperatorForm,
    b: &OperatorForm,
    s: &PairingSpec,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<KatoReport> {
    if !check_semigroup_domination(a, b, s, &DEFAULT_T_GRID, tol)?.holds {
        return Err(Error::PreconditionViolated("the semigroups are not dominated".into()));
    }
    let d = s.domain().dim();
    let mut inputs = vec![(vec![Complex64::new(0.0, 0.0); d], random_positive(s, &mut substream(seed, u64::MAX))?)];
    for i in 0..d {
        let f = unit(d, i);
        let g = abs_map(s, &f)?;
        inputs.push((f, g));
    }
    let seed = derive_seed(seed, "kato");
    for i in 0..samples {
        let mut rng = substream(seed, i as u64);
        let f = random_domain(s, &mut rng);
        let g = if i % 4 == 0 { abs_map(s, &f)? } else { random_positive(s, &mut rng)? };
        inputs.push((f, g));
    }
    let scale = 1.0 + a.gram().max_abs() + b.gram().max_abs();
    let mut report = KatoReport { holds: true, worst_margin: f64::INFINITY, trials: 0, witness: None };
    for (f, g) in inputs {
        report.trials += 1;
        let margin = kato_margin(a, b, s, &f, &g)?;
        report.worst_margin = report.worst_margin.min(margin);
        let allowed = tol * scale * (1.0 + norm(&f) * g.iter().fold(0.0f64, |m, x| m.max(x.abs())));
        if margin < -allowed && report.witness.as_ref().is_none_or(|w| margin < w.margin) {
            report.holds = false;
            report.witness = Some(KatoWitness { f, g, margin });
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlgebraOutcome {
    pub holds: bool,
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlgebraReport {
    pub pairs: usize,
    /// `α₁P_i + α₂P_j` against `|α₁|Q_i + |α₂|Q_j`.
    pub combination: AlgebraOutcome,
    /// Smallest entry of any `Q_i`.
    pub cone_preservation: AlgebraOutcome,
    /// `P_i P_j` against `Q_i Q_j`.
    pub product: AlgebraOutcome,
    pub holds: bool,
}

/// Closure of domination under linear combinations and products, and
/// positivity of the dominating operators. Combinations and products use
/// cyclically adjacent pairs `(i, i + 1)`, including `(i, i)` for a single pair.
pub fn algebra_checks(
    space: &crate::space::FiberedSpace,
    pairs: &[(CMatrix, CMatrix)],
    alpha1: Complex64,
    alpha2: Complex64,
    tol: f64,
) -> Result<AlgebraReport> {
    for (i, (p, q)) in pairs.iter().enumerate() {
        if !exact_bundle_domination(space, p, q, tol)?.holds {
            return Err(Error::PreconditionViolated(format!("input pair {i} is not dominated")));
        }
    }
    let mut combination = AlgebraOutcome { holds: true, margin: f64::INFINITY };
    let mut cone_preservation = AlgebraOutcome { holds: true, margin: f64::INFINITY };
    let mut product = AlgebraOutcome { holds: true, margin: f64::INFINITY };
    let n = pairs.len();
    for i in 0..n {
        let (p1, q1) = &pairs[i];
        let (p2, q2) = &pairs[(i + 1) % n];

        let p = &p1.scale(alpha1) + &p2.scale(alpha2);
        let q = &q1.scale_real(alpha1.norm()) + &q2.scale_real(alpha2.norm());
        let v = exact_bundle_domination(space, &p, &q, tol)?;
        combination.holds &= v.holds;
        combination.margin = combination.margin.min(v.margin);

        let min_entry = q1.as_slice().iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
        cone_preservation.holds &= min_entry >= -tol;
        cone_preservation.margin = cone_preservation.margin.min(min_entry);

        let v = exact_bundle_domination(space, &(p1 * p2), &(q1 * q2), tol)?;
        product.holds &= v.holds;
        product.margin = product.margin.min(v.margin);
    }
    for o in [&mut combination, &mut cone_preservation, &mut product] {
        if !o.margin.is_finite() {
            o.margin = 0.0;
        }
    }
    let holds = combination.holds && cone_preservation.holds && product.holds;
    Ok(AlgebraReport { pairs: n, combination, cone_preservation, product, holds })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyConfig {
    pub t_grid: Vec<f64>,
    /// `None` means `λ + {0.1, 1, 10}`.
    pub alpha_grid: Option<Vec<f64>>,
    pub samples: usize,
    pub seed: u64,
    pub tol: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            t_grid: DEFAULT_T_GRID.to_vec(),
            alpha_grid: None,
            samples: DEFAULT_SAMPLES,
            seed: 0,
            tol: 1e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportConfig {
    pub t_grid: Vec<f64>,
    pub alpha_grid: Vec<f64>,
    pub samples: usize,
    pub seed: u64,
    pub tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Verdicts {
    pub semigroup: bool,
    pub resolvent: bool,
    pub form: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WorstMargins {
    pub semigroup: f64,
    pub resolvent: f64,
    pub form: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DominationReport {
    pub pairing: &'static str,
    pub verdicts: Verdicts,
    pub unanimous: bool,
    pub worst_margins: WorstMargins,
    pub semigroup_margins: Vec<GridMargin>,
    pub resolvent_margins: Vec<GridMargin>,
    pub form_trials: usize,
    pub ideal: IdealRecord,
    /// First failing check in the order semigroup, resolvent, form.
    pub witness: Option<DominationWitness>,
    pub config: ReportConfig,
    pub diagnostics: Vec<String>,
}

impl DominationReport {
    /// All three checks agree on domination.
    pub fn dominated(&self) -> bool {
        self.unanimous && self.verdicts.semigroup
    }
}

fn merged_grid(base: &[f64], extra: f64) -> Vec<f64> {
    let mut g = base.to_vec();
    g.push(extra);
    g.sort_by(f64::total_cmp);
    g.dedup();
    g
}

/// Runs the three checks on one instance and records whether they agree.
/// The time grid always includes `t = 1e-3` and the resolvent grid `λ + 1e3`.
pub fn verify_theorem_equivalence(
    a: &OperatorForm,
    b: &OperatorForm,
    s: &PairingSpec,
    config: &VerifyConfig,
) -> Result<DominationReport> {
    let t_grid = merged_grid(&config.t_grid, SMALL_TIME);
    let lambda = a.lambda().max(b.lambda());
    let base_alpha = match &config.alpha_grid {
        Some(g) => g.clone(),
        None => DEFAULT_ALPHA_OFFSETS.iter().map(|o| lambda + o).collect(),
    };
    let alpha_grid = merged_grid(&base_alpha, lambda + LARGE_ALPHA_OFFSET);

    let semi = check_semigroup_domination(a, b, s, &t_grid, config.tol)?;
    let res = check_resolvent_domination(a, b, s, &alpha_grid, config.tol)?;
    let form = check_form_domination(a, b, s, config.samples, config.seed, config.tol)?;

    let verdicts = Verdicts { semigroup: semi.holds, resolvent: res.holds, form: form.holds };
    let unanimous = semi.holds == res.holds && res.holds == form.holds;
    let worst_margins = WorstMargins {
        semigroup: semi.worst_margin,
        resolvent: res.worst_margin,
        form: form.worst_margin,
    };
    let mut diagnostics = Vec::new();
    if !unanimous {
        diagnostics.push(format!(
            "verdicts disagree: semigroup={} resolvent={} form={}",
            semi.holds, res.holds, form.holds
        ));
        diagnostics.push(format!(
            "worst margins: semigroup={:e} resolvent={:e} form={:e}",
            semi.worst_margin, res.worst_margin, form.worst_margin
        ));
        if form.holds && !semi.holds {
            diagnostics.push("form check passed against a failing exact semigroup check".into());
        }
    }
    if !form.ideal.i2_holds {
        diagnostics.push("pair construction failed to round-trip on a dominated target".into());
    }
    let witness = semi.witness.clone().or_else(|| res.witness.clone()).or_else(|| form.witness.clone());
    Ok(DominationReport {
        pairing: s.name(),
        verdicts,
        unanimous,
        worst_margins,
        semigroup_margins: semi.margins,
        resolvent_margins: res.margins,
        form_trials: form.trials,
        ideal: form.ideal,
        witness,
        config: ReportConfig {
            t_grid,
            alpha_grid,
            samples: config.samples,
            seed: config.seed,
            tol: config.tol,
        },
        diagnostics,
    })
}

/// Recomputes the violated inequality on a witness.
pub fn reevaluate_witness(a: &OperatorForm, b: &OperatorForm, s: &PairingSpec, w: &DominationWitness) -> Result<f64> {
    let param = || w.parameter.ok_or_else(|| Error::InvalidParameters("witness has no grid point".into()));
    match w.check {
        CheckKind::Semigroup => {
            let t = param()?;
            domination_margin_at(s, &a.semigroup(t)?, &b.semigroup(t)?, &w.f1)
        }
        CheckKind::Resolvent => {
            let al = param()?;
            domination_margin_at(s, &scaled_resolvent(a, al)?, &scaled_resolvent(b, al)?, &w.f1)
        }
        CheckKind::Form => {
            let f2 = w.f2.as_ref().ok_or_else(|| Error::InvalidParameters("form witness needs f2".into()))?;
            if !is_paired(s, &w.f1, f2, 1e-9)? {
                return Err(Error::PreconditionViolated("witness vectors are not paired".into()));
            }
            form_margin(a, b, s, &w.f1, f2)
        }
        CheckKind::Kato => Err(Error::InvalidParameters("kato witnesses carry g, use kato_margin".into())),
    }
}

/// Seed handed to instance `id` of a sweep.
pub fn instance_seed(seed: u64, id: usize) -> u64 {
    derive_seed(seed, &format!("instance/{id}"))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepEntry {
    pub id: usize,
    pub report: DominationReport,
}

/// Verifies instances `0..count` in parallel. `build(id)` returns `(A, B, S)`;
/// each instance runs with [`instance_seed`]. Entries come back sorted by id.
pub fn verify_sweep<F>(count: usize, config: &VerifyConfig, build: F) -> Result<Vec<SweepEntry>>
where
    F: Fn(usize) -> Result<(OperatorForm, OperatorForm, PairingSpec)> + Sync,
{
    let mut entries: Vec<SweepEntry> = (0..count)
        .into_par_iter()
        .map(|id| {
            let (a, b, s) = build(id)?;
            let cfg = VerifyConfig { seed: instance_seed(config.seed, id), ..config.clone() };
            Ok(SweepEntry { id, report: verify_theorem_equivalence(&a, &b, &s, &cfg)? })
        })
        .collect::<Result<_>>()?;
    entries.sort_by_key(|e| e.id);
    Ok(entries)
}
