//! Acceptance suite. Prints one line per criterion and exits nonzero if any
//! criterion fails. Run with `cargo test -p dominion-core --test acceptance`.

mod common;

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use common::*;
use dominion_core::domination::{
    algebra_checks, check_semigroup_domination, kato_check, reevaluate_witness, verify_sweep, SweepEntry,
    VerifyConfig,
};
use dominion_core::forms::{check_first_bd, check_positivity_preserving, ConvexSetC, OperatorForm, DEFAULT_T_GRID};
use dominion_core::graph::{
    add_potential, formal_laplacian, magnetic_operator, random_graph, random_instance, MagneticInstance, WeightedGraph,
};
use dominion_core::json;
use dominion_core::linalg::CMatrix;
use dominion_core::ordered::{moreau_decompose, probe_isotone, probe_self_dual, project_cone, random_ambient, ConeSpec};
use dominion_core::pairing::{abs_map, random_domain, PairingSpec};
use dominion_core::sampling::{derive_seed, gaussian, substream, SampleRng};
use dominion_core::space::{FiberedSpace, WeightedSpace};
use dominion_core::vector::{add, scale, sub};
use num_complex::Complex64;
use rand::Rng;

const SEED: u64 = 20_240_611;

const MOREAU_TOL: f64 = 1e-8;
const MOREAU_BUDGET: Duration = Duration::from_secs(5);
const ISOTONE_SAMPLES: usize = 10_000;
const QP_TOL: f64 = 1e-8;
const C_PROJECTION_TOL: f64 = 1e-8;
const SWEEP_BUDGET: Duration = Duration::from_secs(120);
const TIGHTNESS_TOL: f64 = 1e-10;
const EXACT_TOL: f64 = 1e-10;
const KATO_FLOOR: f64 = -1e-8;
const KATO_SAMPLES: usize = 200;
const ALGEBRA_TOL: f64 = 1e-10;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn fmt_err(e: dominion_core::Error) -> String {
    e.to_string()
}

fn random_weights(rng: &mut SampleRng, n: usize) -> WeightedSpace {
    WeightedSpace::from_weights((0..n).map(|_| rng.random_range(0.2..5.0)).collect()).unwrap()
}

fn random_cone(rng: &mut SampleRng, kind: usize) -> ConeSpec {
    match kind {
        0 => {
            let n = rng.random_range(1..=10);
            ConeSpec::Orthant(random_weights(rng, n))
        }
        1 => ConeSpec::PsdMatrices(rng.random_range(1..=4)),
        _ => {
            let n = rng.random_range(1..=10);
            ConeSpec::MonotoneNonneg(random_weights(rng, n))
        }
    }
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for kind in 0..3 {
        for i in 0..1000u64 {
            let mut rng = substream(derive_seed(SEED, "moreau"), kind as u64 * 1000 + i);
            let cone = random_cone(&mut rng, kind);
            let amp = 10f64.powf(rng.random_range(-2.0..2.0));
            let g = scale(&random_ambient(&cone, &mut rng), amp);
            let m = moreau_decompose(&cone, &g).map_err(fmt_err)?;
            let norm_g = cone.norm(&g);
            let recon = cone.norm(&sub(&sub(&m.h1, &m.h2), &g));
            let ortho = m.orthogonality_defect(&cone) / (1.0 + norm_g * norm_g);
            let norm_gap = (cone.norm(&add(&m.h1, &m.h2)) - norm_g).abs();
            worst = worst.max(recon).max(ortho).max(norm_gap);
            ensure(recon <= MOREAU_TOL, || format!("{}: reconstruction error {recon:e}", cone.name()))?;
            ensure(ortho <= MOREAU_TOL, || format!("{}: orthogonality {ortho:e}", cone.name()))?;
            ensure(norm_gap <= MOREAU_TOL, || format!("{}: norm identity {norm_gap:e}", cone.name()))?;
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < MOREAU_BUDGET, || format!("took {elapsed:?}"))?;
    Ok(format!("3000 vectors, worst defect {worst:.1e}, {elapsed:.2?}"))
}

fn criterion_2() -> Outcome {
    let orthant = ConeSpec::Orthant(WeightedSpace::from_weights(vec![1.0, 2.0, 0.5, 3.0]).unwrap());
    ensure(probe_self_dual(&orthant, 1000, SEED).map_err(fmt_err)?.verdict.holds(), || "orthant not self-dual".into())?;
    ensure(probe_isotone(&orthant, 1000, SEED).map_err(fmt_err)?.verdict.holds(), || "orthant not isotone".into())?;
    let mut found = Vec::new();
    for n in [2, 3] {
        let cone = ConeSpec::PsdMatrices(n);
        ensure(probe_self_dual(&cone, 1000, SEED).map_err(fmt_err)?.verdict.holds(), || format!("PSD({n}) not self-dual"))?;
        let iso = probe_isotone(&cone, ISOTONE_SAMPLES, SEED).map_err(fmt_err)?;
        ensure(!iso.verdict.holds(), || format!("no isotonicity witness for PSD({n})"))?;
        found.push(format!("PSD({n}) witness after {} trials", iso.trials));
    }
    let mono = ConeSpec::MonotoneNonneg(WeightedSpace::uniform(4).unwrap());
    let sd = probe_self_dual(&mono, 0, SEED).map_err(fmt_err)?;
    ensure(!sd.verdict.holds(), || "corner suite found no self-duality witness for the monotone cone".into())?;
    Ok(format!("{}, monotone witness in {} corner trials", found.join(", "), sd.trials))
}

fn criterion_3() -> Outcome {
    let mut worst = 0.0f64;
    for i in 0..500u64 {
        let mut rng = substream(derive_seed(SEED, "qp"), i);
        let n = rng.random_range(1..=6);
        let w = random_weights(&mut rng, n);
        let mut g: Vec<f64> = (0..n).map(|_| 3.0 * gaussian(&mut rng)).collect();
        if i % 5 == 0 {
            // Ties exercise pooling boundaries.
            g[n / 2] = g[0];
        }
        let oracle = monotone_projection_oracle(w.weights(), &g);
        let got = project_cone(&ConeSpec::MonotoneNonneg(w), &g).map_err(fmt_err)?;
        let d = max_abs_diff(&got, &oracle);
        worst = worst.max(d);
        ensure(d <= QP_TOL, || format!("instance {i}: deviation {d:e}"))?;
    }
    Ok(format!("500 instances, max deviation {worst:.1e}"))
}

fn random_scalar_operator(rng: &mut SampleRng, positive: bool) -> OperatorForm {
    let n = rng.random_range(1..=10);
    let space = random_weights(rng, n);
    let mut gram = vec![0.0; n * n];
    for i in 0..n {
        gram[i * n + i] = 2.0 * gaussian(rng);
        for j in 0..i {
            let v = if positive {
                if rng.random_bool(0.3) {
                    0.0
                } else {
                    -rng.random_range(0.1..2.0)
                }
            } else {
                let mag = rng.random_range(0.1..2.0);
                if rng.random_bool(0.5) {
                    mag
                } else {
                    -mag
                }
            };
            gram[i * n + j] = v;
            gram[j * n + i] = v;
        }
    }
    let gram = CMatrix::from_real(n, n, &gram).unwrap();
    OperatorForm::from_gram(FiberedSpace::scalar(space), &gram).unwrap()
}

fn criterion_4() -> Outcome {
    let mut disagreements = 0;
    let mut preserving = 0;
    for i in 0..200u64 {
        let mut rng = substream(derive_seed(SEED, "beurling-deny"), i);
        let f = random_scalar_operator(&mut rng, i % 2 == 0);
        let cone = ConeSpec::Orthant(f.space().base().clone());
        let bd = check_first_bd(&f, &cone, 50, i, 1e-10).map_err(fmt_err)?;
        let pos = check_positivity_preserving(&f, &cone, &DEFAULT_T_GRID, 0, i, 1e-10).map_err(fmt_err)?;
        let structural = pos.structural.ok_or("orthant positivity has no structural verdict")?;
        preserving += usize::from(structural);
        if bd.holds != structural {
            disagreements += 1;
        }
    }
    ensure(disagreements == 0, || format!("{disagreements} disagreements"))?;
    Ok(format!("200 operators ({preserving} positivity preserving), 0 disagreements"))
}

fn criterion_5() -> Outcome {
    let mut worst = 0.0f64;
    let mut overlap = 0.0f64;
    for i in 0..500u64 {
        let mut rng = substream(derive_seed(SEED, "project-c"), i);
        let space = random_fibered(&mut rng, 5, 3);
        let bundle = ConvexSetC::new(PairingSpec::bundle(space.clone()));
        let norm = ConvexSetC::new(PairingSpec::norm_pairing(space.clone()));
        let f1 = random_domain(bundle.pairing(), &mut rng);

        // Branch (c): 0 ≤ g ≤ S(f1).
        let s1 = abs_map(bundle.pairing(), &f1).map_err(fmt_err)?;
        let g: Vec<f64> = s1.iter().map(|x| x * rng.random_range(0.0..1.0)).collect();
        let (u, v) = bundle.project_c(&f1, &g).map_err(fmt_err)?;
        let (ou, ov) = bundle_c_oracle(&space, &f1, &g);
        let d = max_abs_diff_c(&u, &ou).max(max_abs_diff(&v, &ov));
        let (du, dv) = bundle.project_d(&f1, &g).map_err(fmt_err)?;
        overlap = overlap.max(max_abs_diff_c(&u, &du).max(max_abs_diff(&v, &dv)));

        let n1 = abs_map(norm.pairing(), &f1).map_err(fmt_err)?[0];
        let gn = n1 * rng.random_range(0.0..1.0);
        let (nu, nv) = norm.project_c(&f1, &[gn]).map_err(fmt_err)?;
        let (onu, onv) = norm_c_oracle(&space, &f1, gn);
        let dn = max_abs_diff_c(&nu, &onu).max((nv[0] - onv).abs());
        let (ndu, ndv) = norm.project_d(&f1, &[gn]).map_err(fmt_err)?;
        overlap = overlap.max(max_abs_diff_c(&nu, &ndu).max((nv[0] - ndv[0]).abs()));

        // Branch (d): arbitrary g.
        let g: Vec<f64> = (0..space.num_points()).map(|_| 2.0 * gaussian(&mut rng)).collect();
        let (u, v) = bundle.project_d(&f1, &g).map_err(fmt_err)?;
        let (ou, ov) = bundle_c_oracle(&space, &f1, &g);
        let dd = max_abs_diff_c(&u, &ou).max(max_abs_diff(&v, &ov));
        let gn = 2.0 * gaussian(&mut rng);
        let (nu, nv) = norm.project_d(&f1, &[gn]).map_err(fmt_err)?;
        let (onu, onv) = norm_c_oracle(&space, &f1, gn);
        let ddn = max_abs_diff_c(&nu, &onu).max((nv[0] - onv).abs());

        worst = worst.max(d).max(dn).max(dd).max(ddn);
        ensure(worst <= C_PROJECTION_TOL, || format!("input {i}: deviation {worst:e}"))?;
        ensure(overlap <= C_PROJECTION_TOL, || format!("input {i}: branches differ by {overlap:e}"))?;
    }
    Ok(format!("500 inputs per branch and pairing, max deviation {worst:.1e}, overlap {overlap:.1e}"))
}

const SWEEP_SIZE: usize = 400;
const ENSURED: usize = 200;

fn sweep_instance(id: usize) -> dominion_core::Result<MagneticInstance> {
    let n = 3 + id % 5;
    let max_fiber = 1 + (id / 5) % 3;
    random_instance(n, max_fiber, 0.6, id < ENSURED, derive_seed(SEED, &format!("sweep/{id}")))
}

type Triple = (OperatorForm, OperatorForm, PairingSpec);

fn sweep_triple(id: usize) -> dominion_core::Result<Triple> {
    let inst = sweep_instance(id)?;
    Ok((magnetic_operator(&inst)?, formal_laplacian(inst.graph())?, inst.pairing()))
}

fn sweep_config() -> VerifyConfig {
    VerifyConfig { seed: SEED, ..VerifyConfig::default() }
}

struct Sweep {
    entries: Vec<SweepEntry>,
    elapsed: Duration,
}

fn run_sweep() -> Result<Sweep, String> {
    let start = Instant::now();
    let entries = verify_sweep(SWEEP_SIZE, &sweep_config(), sweep_triple).map_err(fmt_err)?;
    Ok(Sweep { entries, elapsed: start.elapsed() })
}

fn criterion_6(sweep: &Result<Sweep, String>) -> Outcome {
    let sweep = sweep.as_ref().map_err(|e| format!("sweep failed: {e}"))?;
    let split = sweep.entries.iter().filter(|e| !e.report.unanimous).count();
    ensure(split == 0, || format!("{split} non-unanimous reports"))?;
    let ensured_fail = sweep.entries[..ENSURED].iter().filter(|e| !e.report.dominated()).count();
    ensure(ensured_fail == 0, || format!("{ensured_fail} instances with W ⪰ c not dominated"))?;
    let adversarial_dominated = sweep.entries[ENSURED..].iter().filter(|e| e.report.dominated()).count();
    for e in sweep.entries.iter().filter(|e| !e.report.verdicts.form) {
        let (a, b, s) = sweep_triple(e.id).map_err(fmt_err)?;
        let w = e.report.witness.as_ref().ok_or_else(|| format!("instance {}: failing report lacks a witness", e.id))?;
        let m = reevaluate_witness(&a, &b, &s, w).map_err(fmt_err)?;
        ensure(m < 0.0, || format!("instance {}: witness re-evaluates to {m:e}", e.id))?;
    }
    ensure(sweep.elapsed < SWEEP_BUDGET, || format!("took {:?}", sweep.elapsed))?;
    Ok(format!(
        "{SWEEP_SIZE} instances unanimous, adversarial {adversarial_dominated}/{} dominated, {:.2?}",
        SWEEP_SIZE - ENSURED,
        sweep.elapsed
    ))
}

fn theta_triple(theta: f64) -> Triple {
    let g = WeightedGraph::new(WeightedSpace::uniform(2).unwrap(), &[(0, 1, 1.0)], vec![0.0; 2]).unwrap();
    let phase = CMatrix::from_vec(1, 1, vec![Complex64::from_polar(1.0, theta)]).unwrap();
    let inst = MagneticInstance::new(g.clone(), vec![1, 1], vec![phase], vec![CMatrix::zeros(1, 1); 2]).unwrap();
    (magnetic_operator(&inst).unwrap(), formal_laplacian(&g).unwrap(), inst.pairing())
}

fn criterion_7() -> Outcome {
    let mut worst = 0.0f64;
    for theta in [0.0, PI / 4.0, PI / 2.0, PI] {
        let (a, b, s) = theta_triple(theta);
        let r = check_semigroup_domination(&a, &b, &s, &DEFAULT_T_GRID, TIGHTNESS_TOL).map_err(fmt_err)?;
        for m in &r.margins {
            worst = worst.max(m.margin.abs());
            ensure(m.margin.abs() <= TIGHTNESS_TOL, || format!("θ={theta}, t={}: margin {:e}", m.parameter, m.margin))?;
        }
    }
    Ok(format!("4 phases, max |margin| {worst:.1e}"))
}

fn criterion_8(sweep: &Result<Sweep, String>) -> Outcome {
    for i in 0..100u64 {
        let mut rng = substream(derive_seed(SEED, "potential"), i);
        let n = rng.random_range(2..=8);
        let g = random_graph(n, 0.5, derive_seed(SEED, &format!("potential/{i}"))).map_err(fmt_err)?;
        let b = formal_laplacian(&g).map_err(fmt_err)?;
        let v: Vec<f64> = (0..n).map(|_| if rng.random_bool(0.3) { 0.0 } else { rng.random_range(0.0..3.0) }).collect();
        let a = add_potential(&b, &v).map_err(fmt_err)?;
        let s = PairingSpec::lattice_abs(g.space().clone());
        let r = check_semigroup_domination(&a, &b, &s, &DEFAULT_T_GRID, EXACT_TOL).map_err(fmt_err)?;
        ensure(r.holds, || format!("potential instance {i}: margin {:e}", r.worst_margin))?;
    }
    let sweep = sweep.as_ref().map_err(|e| format!("sweep failed: {e}"))?;
    let failing = sweep.entries[..ENSURED].iter().filter(|e| !e.report.verdicts.semigroup).count();
    ensure(failing == 0, || format!("{failing} magnetic instances with W ⪰ c fail the semigroup check"))?;
    for i in 0..100u64 {
        let n = 2 + (i as usize) % 7;
        let g = random_graph(n, 0.5, derive_seed(SEED, &format!("killing/{i}"))).map_err(fmt_err)?;
        let a = formal_laplacian(&g).map_err(fmt_err)?;
        let b = formal_laplacian(&g.with_killing(vec![0.0; n]).map_err(fmt_err)?).map_err(fmt_err)?;
        let s = PairingSpec::bundle(FiberedSpace::scalar(g.space().clone()));
        let r = check_semigroup_domination(&a, &b, &s, &DEFAULT_T_GRID, EXACT_TOL).map_err(fmt_err)?;
        ensure(r.holds, || format!("killing instance {i}: margin {:e}", r.worst_margin))?;
    }
    Ok(format!("100 potential perturbations, {ENSURED} magnetic instances, 100 killing terms"))
}

fn kato_reports(sweep: &Sweep) -> Result<Vec<(usize, dominion_core::domination::KatoReport)>, String> {
    sweep
        .entries
        .iter()
        .filter(|e| e.report.dominated())
        .map(|e| {
            let (a, b, s) = sweep_triple(e.id).map_err(fmt_err)?;
            let r = kato_check(&a, &b, &s, KATO_SAMPLES, derive_seed(SEED, &format!("kato/{}", e.id)), 1e-9)
                .map_err(fmt_err)?;
            Ok((e.id, r))
        })
        .collect()
}

fn criterion_9(sweep: &Result<Sweep, String>) -> Outcome {
    let sweep = sweep.as_ref().map_err(|e| format!("sweep failed: {e}"))?;
    let reports = kato_reports(sweep)?;
    let mut worst = f64::INFINITY;
    for (id, r) in &reports {
        worst = worst.min(r.worst_margin);
        ensure(r.worst_margin >= KATO_FLOOR, || format!("instance {id}: margin {:e}", r.worst_margin))?;
    }
    Ok(format!("{} dominated instances, worst margin {worst:.1e}", reports.len()))
}

fn algebra_reports() -> Result<Vec<dominion_core::domination::AlgebraReport>, String> {
    (0..10u64)
        .map(|group| {
            let mut rng = substream(derive_seed(SEED, "algebra"), group);
            let space = random_fibered(&mut rng, 4, 3);
            let pairs: Vec<(CMatrix, CMatrix)> = (0..10).map(|_| random_block_pair(&mut rng, &space, 0.0, 1.0)).collect();
            let a1 = Complex64::new(gaussian(&mut rng), gaussian(&mut rng));
            let a2 = Complex64::new(gaussian(&mut rng), gaussian(&mut rng));
            algebra_checks(&space, &pairs, a1, a2, ALGEBRA_TOL).map_err(fmt_err)
        })
        .collect()
}

fn criterion_10() -> Outcome {
    let reports = algebra_reports()?;
    for (k, r) in reports.iter().enumerate() {
        ensure(r.combination.holds, || format!("group {k}: combination margin {:e}", r.combination.margin))?;
        ensure(r.product.holds, || format!("group {k}: product margin {:e}", r.product.margin))?;
        ensure(r.cone_preservation.holds, || format!("group {k}: negative entry {:e}", r.cone_preservation.margin))?;
    }
    let pairs: usize = reports.iter().map(|r| r.pairs).sum();
    Ok(format!("{pairs} pairs, combination, product and positivity hold"))
}

fn ser<T: serde::Serialize + ?Sized>(value: &T) -> String {
    json::to_string(value).expect("reports serialize")
}

/// Serialized outputs of a cross-section of the suites.
fn artifacts() -> Result<Vec<String>, String> {
    let mut out = Vec::new();
    let sweep = verify_sweep(24, &sweep_config(), |id| sweep_triple(id * 17 % SWEEP_SIZE)).map_err(fmt_err)?;
    out.push(ser(&sweep));
    let sweep = Sweep { entries: sweep, elapsed: Duration::ZERO };
    let kato: Vec<_> = kato_reports(&sweep)?.into_iter().map(|(_, r)| r).collect();
    out.push(ser(&kato));
    out.push(ser(&algebra_reports()?));
    let cone = ConeSpec::PsdMatrices(3);
    out.push(ser(&probe_isotone(&cone, ISOTONE_SAMPLES, SEED).map_err(fmt_err)?));
    let mut rng = substream(SEED, 0);
    let pairs: Vec<_> = (0..50)
        .map(|_| moreau_decompose(&cone, &random_ambient(&cone, &mut rng)))
        .collect::<Result<_, _>>()
        .map_err(fmt_err)?;
    out.push(ser(&pairs));
    Ok(out)
}

fn criterion_11(sweep: &Result<Sweep, String>) -> Outcome {
    let first = artifacts()?;
    let second = artifacts()?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().map_err(|e| e.to_string())?;
    let serial = pool.install(artifacts)?;
    for (k, ((a, b), c)) in first.iter().zip(&second).zip(&serial).enumerate() {
        ensure(a == b, || format!("artifact {k} differs between runs"))?;
        ensure(a == c, || format!("artifact {k} differs on one thread"))?;
    }
    // The rerun sweep must reproduce the full sweep's reports for the same ids.
    let sweep = sweep.as_ref().map_err(|e| format!("sweep failed: {e}"))?;
    let rerun = verify_sweep(40, &sweep_config(), sweep_triple).map_err(fmt_err)?;
    ensure(ser(&rerun) == ser(&sweep.entries[..40]), || "sweep prefix differs from the full sweep".into())?;
    let bytes: usize = first.iter().map(String::len).sum();
    Ok(format!("{} artifacts ({bytes} bytes) identical across reruns and thread counts", first.len()))
}

fn report(n: usize, name: &str, f: impl FnOnce() -> Outcome) -> bool {
    let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        let msg = p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        Err(format!("panicked: {msg}"))
    });
    match &outcome {
        Ok(detail) => println!("criterion {n:>2} ({name}): PASS {detail}"),
        Err(detail) => println!("criterion {n:>2} ({name}): FAIL {detail}"),
    }
    outcome.is_ok()
}

fn main() {
    let sweep = catch_unwind(run_sweep).unwrap_or_else(|_| Err("sweep panicked".into()));
    let results = [
        report(1, "moreau decomposition", criterion_1),
        report(2, "cone classification", criterion_2),
        report(3, "monotone projection vs QP oracle", criterion_3),
        report(4, "beurling-deny vs positivity", criterion_4),
        report(5, "projection onto C", criterion_5),
        report(6, "three-way agreement", || criterion_6(&sweep)),
        report(7, "tightness of the phase example", criterion_7),
        report(8, "potential, magnetic and killing domination", || criterion_8(&sweep)),
        report(9, "kato inequality", || criterion_9(&sweep)),
        report(10, "algebra of domination", criterion_10),
        report(11, "determinism", || criterion_11(&sweep)),
    ];
    let failed = results.iter().filter(|ok| !**ok).count();
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
