mod common;

use common::*;
use dominion_core::graph::{magnetic_operator, random_instance};
use dominion_core::ordered::{cone_margin, dual_margin, dual_project, moreau_decompose, project_cone, random_ambient, ConeSpec};
use dominion_core::pairing::{abs_map, pair, random_domain, random_positive, PairingSpec};
use dominion_core::sampling::{complex_gaussian_vec, random_unitary, substream};
use dominion_core::space::{FiberedSpace, WeightedSpace};
use dominion_core::vector::{add, scale as scale_vec, sub};
use proptest::prelude::*;

fn cone_strategy() -> impl Strategy<Value = ConeSpec> {
    let weights = prop::collection::vec(0.2f64..5.0, 1..8);
    prop_oneof![
        weights.clone().prop_map(|w| ConeSpec::Orthant(WeightedSpace::from_weights(w).unwrap())),
        weights.prop_map(|w| ConeSpec::MonotoneNonneg(WeightedSpace::from_weights(w).unwrap())),
        (1usize..4).prop_map(ConeSpec::PsdMatrices),
    ]
}

fn cone_and_vectors() -> impl Strategy<Value = (ConeSpec, Vec<f64>, Vec<f64>)> {
    (cone_strategy(), any::<u64>(), 0.01f64..20.0).prop_map(|(cone, seed, scale)| {
        let mut rng = substream(seed, 0);
        let g = scale_vec(&random_ambient(&cone, &mut rng), scale);
        let h = random_ambient(&cone, &mut rng);
        (cone, g, h)
    })
}

fn pairing_strategy() -> impl Strategy<Value = PairingSpec> {
    (prop::collection::vec((0.2f64..5.0, 1usize..4), 1..6), 0u8..3).prop_map(|(pts, kind)| {
        let base = WeightedSpace::from_weights(pts.iter().map(|p| p.0).collect()).unwrap();
        match kind {
            0 => PairingSpec::bundle(FiberedSpace::new(base, pts.iter().map(|p| p.1).collect()).unwrap()),
            1 => PairingSpec::norm_pairing(FiberedSpace::new(base, pts.iter().map(|p| p.1).collect()).unwrap()),
            _ => PairingSpec::lattice_abs(base),
        }
    })
}

proptest! {
    #[test]
    fn moreau_identities((cone, g, _) in cone_and_vectors()) {
        let m = moreau_decompose(&cone, &g).unwrap();
        let scale = 1.0 + cone.norm(&g);
        prop_assert!(max_abs_diff(&sub(&m.h1, &m.h2), &g) <= 1e-9 * scale);
        prop_assert!(m.orthogonality_defect(&cone) <= 1e-9 * scale * scale);
        prop_assert!((cone.norm(&add(&m.h1, &m.h2)) - cone.norm(&g)).abs() <= 1e-9 * scale);
        prop_assert!(cone_margin(&cone, &m.h1).unwrap() >= -1e-9 * scale);
        prop_assert!(dual_margin(&cone, &m.h2).unwrap() >= -1e-9 * scale);
    }

    #[test]
    fn projections_are_idempotent_and_nonexpansive((cone, g, h) in cone_and_vectors()) {
        let (pg, ph) = (project_cone(&cone, &g).unwrap(), project_cone(&cone, &h).unwrap());
        let scale = 1.0 + cone.norm(&g);
        prop_assert!(max_abs_diff(&project_cone(&cone, &pg).unwrap(), &pg) <= 1e-9 * scale);
        prop_assert!(cone.norm(&sub(&pg, &ph)) <= cone.norm(&sub(&g, &h)) * (1.0 + 1e-9) + 1e-12);
        let (dg, dh) = (dual_project(&cone, &g).unwrap(), dual_project(&cone, &h).unwrap());
        prop_assert!(cone.norm(&sub(&dg, &dh)) <= cone.norm(&sub(&g, &h)) * (1.0 + 1e-9) + 1e-12);
    }

    #[test]
    fn pairing_has_the_prescribed_modulus(s in pairing_strategy(), seed in any::<u64>()) {
        let mut rng = substream(seed, 0);
        let f1 = random_domain(&s, &mut rng);
        let g = random_positive(&s, &mut rng).unwrap();
        let f2 = pair(&s, &f1, &g).unwrap();
        let back = abs_map(&s, &f2).unwrap();
        prop_assert!(max_abs_diff(&back, &g) <= 1e-12 * (1.0 + g.iter().fold(0.0f64, |m, x| m.max(*x))));
        // Zero input falls back on the reference section.
        let zero = vec![num_complex::Complex64::new(0.0, 0.0); f1.len()];
        let back = abs_map(&s, &pair(&s, &zero, &g).unwrap()).unwrap();
        prop_assert!(max_abs_diff(&back, &g) <= 1e-12 * (1.0 + g.iter().fold(0.0f64, |m, x| m.max(*x))));
    }

    #[test]
    fn rearrangement_on_identical_uniform_grids_sorts(n in 1usize..10, seed in any::<u64>()) {
        let grid = WeightedSpace::uniform(n).unwrap();
        let s = PairingSpec::rearrangement(grid.clone(), grid).unwrap();
        let f = complex_gaussian_vec(&mut substream(seed, 0), n);
        prop_assert!(max_abs_diff(&abs_map(&s, &f).unwrap(), &sorted_moduli(&f)) <= 1e-12);
    }

    #[test]
    fn gauge_transform_preserves_spectrum(n in 2usize..6, seed in any::<u64>()) {
        let inst = random_instance(n, 3, 0.6, seed % 2 == 0, seed).unwrap();
        let mut rng = substream(seed, 1);
        let u: Vec<_> = inst.fibers().fiber_dims().iter().map(|&d| random_unitary(&mut rng, d)).collect();
        let gauged = inst.gauge(&u).unwrap();
        let a = magnetic_operator(&inst).unwrap().eigen().eigenvalues.clone();
        let b = magnetic_operator(&gauged).unwrap().eigen().eigenvalues.clone();
        let scale = 1.0 + a.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        prop_assert!(max_abs_diff(&a, &b) <= 1e-9 * scale);
    }
}
