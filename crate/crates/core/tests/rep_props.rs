use lca_core::linalg::Tolerance;
use lca_core::random::Generator;
use lca_core::rep::{
    average_intertwiner, commutant_dim, direct_sum, intertwiners, intertwining_residual, unitarily_equivalent,
    WitnessRequest,
};
use proptest::prelude::*;

fn tol() -> Tolerance<f64> {
    Tolerance::default()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn conjugates_are_equivalent_with_witness(seed in any::<u64>()) {
        let t = tol();
        let mut g = Generator::new(seed);
        let a = g.algebra();
        let phi = g.rep::<f64>(&a, &t).unwrap();
        let u = g.unitary::<f64>(phi.hdim(), &t).unwrap();
        let v = unitarily_equivalent(&phi, &phi.conjugate(&u).unwrap(), &t, WitnessRequest::with_witness(seed)).unwrap();
        prop_assert!(v.equivalent);
        prop_assert!(v.intertwining_residual.unwrap() < 1e-8);
        prop_assert!(v.unitarity_residual.unwrap() < 1e-8);
    }

    #[test]
    fn averaging_lands_in_the_intertwiner_space(seed in any::<u64>()) {
        let t = tol();
        let mut g = Generator::new(seed);
        let a = g.algebra();
        let (p1, p2) = (g.rep::<f64>(&a, &t).unwrap(), g.rep::<f64>(&a, &t).unwrap());
        let m = g.matrix::<f64>(p2.hdim(), p1.hdim());
        let x = average_intertwiner(&p1, &p2, &m);
        prop_assert!(intertwining_residual(&p1, &p2, &x) < 1e-9 * (1.0 + x.norm_max()));
    }

    #[test]
    fn commutant_dimension_matches_null_space(seed in any::<u64>()) {
        let t = tol();
        let mut g = Generator::new(seed);
        let a = g.algebra();
        let phi = g.rep::<f64>(&a, &t).unwrap();
        prop_assert_eq!(commutant_dim(&phi, &t).unwrap(), intertwiners(&phi, &phi, &t).unwrap().len());
    }

    #[test]
    fn sums_are_not_equivalent_to_summands(seed in any::<u64>()) {
        let t = tol();
        let mut g = Generator::new(seed);
        let a = g.algebra();
        let phi = g.rep::<f64>(&a, &t).unwrap();
        let two = direct_sum(&[phi.clone(), phi.clone()]).unwrap();
        prop_assert!(!unitarily_equivalent(&phi, &two, &t, WitnessRequest::default()).unwrap().equivalent);
        prop_assert_eq!(commutant_dim(&two, &t).unwrap(), 4 * commutant_dim(&phi, &t).unwrap());
    }
}
