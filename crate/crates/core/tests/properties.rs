//! Randomized invariants across the public API.

use proptest::prelude::*;
use qheis::braid::{self, build_relations};
use qheis::deform;
use qheis::linalg::{self, c, re};
use qheis::qspecial::{self, DeformParams, Sign};
use qheis::verify;
use qheis::{Family, FockSpace, Statistics};

fn q_strategy() -> impl Strategy<Value = f64> {
    prop_oneof![0.4f64..0.98, 1.02f64..2.2]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn braid_matrices_satisfy_yang_baxter(q in q_strategy(), pick in 0usize..4) {
        let (family, n) = [(Family::SlN, 2), (Family::SlN, 3), (Family::SoN, 3), (Family::SoN, 4)][pick];
        let r = braid::rhat(family, n, q).unwrap();
        prop_assert!(braid::yang_baxter_residual(&r, n) < 1e-11);
        prop_assert!(braid::characteristic_residual(family, n, q).unwrap() < 1e-11);
    }

    #[test]
    fn projectors_resolve_identity(q in q_strategy(), n in 2usize..4) {
        let rel = build_relations(Family::SlN, n, q, Statistics::Bose).unwrap();
        let (complete, orth) = rel.projector_residuals();
        prop_assert!(complete < 1e-11 && orth < 1e-11);
        prop_assert_eq!(rel.projector_ranks().iter().sum::<usize>(), n * n);
    }

    #[test]
    fn qnumbers_are_geometric_sums(n in 0u32..25, q in 0.3f64..3.0) {
        let sum: f64 = (0..n).map(|k| q.powi(k as i32)).sum();
        prop_assert!((qspecial::qnum(n as f64, q) - sum).abs() <= 1e-12 * sum.max(1.0));
        let sym = qspecial::qbracket(n as f64, q);
        prop_assert!((sym - qspecial::qbracket(n as f64, 1.0 / q)).abs() <= 1e-12 * sym.abs().max(1.0));
    }

    #[test]
    fn qgamma_recurrence(a in 0.1f64..12.0, q in 0.3f64..0.95) {
        let g0 = qspecial::qgamma(re(a), q).unwrap();
        let g1 = qspecial::qgamma(re(a + 1.0), q).unwrap();
        let want = qspecial::qnum_c(re(a), re(q)) * g0;
        prop_assert!((g1 - want).norm() <= 1e-11 * want.norm());
    }

    #[test]
    fn gamma_reflection(x in 0.05f64..3.5, y in -2.0f64..2.0) {
        prop_assume!((x - x.round()).abs() > 1e-3 || y.abs() > 1e-3);
        prop_assert!(qspecial::reflection_residual(c(x, y)).unwrap() < 1e-11);
    }

    #[test]
    fn hypergeometric_ode_holds(a in -0.3f64..0.3, b in -0.3f64..0.3, cc in 1.05f64..2.0, z in -0.7f64..0.7) {
        let r = qspecial::hyper_ode_residual(re(a), re(b), re(cc), re(z)).unwrap();
        prop_assert!(r < 1e-9, "residual {r}");
    }

    #[test]
    fn canonical_commutators_on_safe_subspace(modes in 1usize..4, cutoff in 3usize..6, i in 0usize..3, j in 0usize..3) {
        prop_assume!(i < modes && j < modes);
        let space = FockSpace::new(modes, Statistics::Bose, cutoff).unwrap();
        let a = space.annihilator(i).unwrap();
        let ap = space.creator(j).unwrap();
        let p = space.safe_projector(1).unwrap();
        let comm = a.commutator(&ap).project(&p);
        let want = if i == j { p.matrix().clone() } else { linalg::zeros(space.dim(), space.dim()) };
        prop_assert!(linalg::max_abs(&(comm.matrix() - want)) < 1e-14);
    }

    #[test]
    fn fermionic_anticommutators(modes in 1usize..5, i in 0usize..4, j in 0usize..4) {
        prop_assume!(i < modes && j < modes);
        let space = FockSpace::new(modes, Statistics::Fermi, modes).unwrap();
        let a = space.annihilator(i).unwrap();
        let ap = space.creator(j).unwrap();
        let want = if i == j { linalg::identity(space.dim()) } else { linalg::zeros(space.dim(), space.dim()) };
        prop_assert!(linalg::max_abs(&(a.anticommutator(&ap).matrix() - want)) < 1e-15);
    }

    #[test]
    fn bosonic_sl2_map_passes_oracle(q in q_strategy()) {
        let space = FockSpace::new(2, Statistics::Bose, 6).unwrap();
        let gens = deform::sl2_bose_map(&space, DeformParams::from_q(q, Sign::Plus).unwrap()).unwrap();
        let rel = build_relations(Family::SlN, 2, q, Statistics::Bose).unwrap();
        let res = verify::dcr_residuals(&gens, &rel).unwrap();
        prop_assert!(res.worst_accepted() < 1e-9, "worst {}", res.worst_accepted());
    }
}
