use lca_core::bundled;
use lca_core::linalg::Tolerance;
use lca_core::random::Generator;
use proptest::prelude::*;

fn tol() -> Tolerance<f64> {
    Tolerance::default()
}

#[test]
fn bundled_towers_validate() {
    let t = bundled::c2_tower::<f64>(&tol()).unwrap();
    assert!(t.base().validate(&tol()).unwrap().is_valid());
    assert!(t.validate(&tol()).unwrap().is_valid());
    for extra in [false, true] {
        let m = bundled::lemma41_model::<f64>(extra, &tol()).unwrap();
        assert!(m.atower.validate(&tol()).unwrap().is_valid());
        assert!(m.btower.validate(&tol()).unwrap().is_valid());
        assert!(m.etower.validate(&tol()).unwrap().is_valid());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn seminorms_are_dominated_by_the_top(seed in any::<u64>()) {
        let t = bundled::c2_tower::<f64>(&tol()).unwrap();
        let base = t.base();
        let mut g = Generator::new(seed);
        let top = base.algebra(base.top().unwrap());
        let a = top.element(&g.element(top)).unwrap();
        let x = base.limit_from_top(&a).unwrap();
        let q = x.seminorm(base, "q").unwrap();
        let p = x.seminorm(base, "p").unwrap();
        prop_assert!(q <= p * (1.0 + 1e-12));
        let sq = x.star().mul(&x).unwrap().seminorm(base, "p").unwrap();
        prop_assert!((sq - p * p).abs() <= 1e-9 * p * p.max(1.0));
    }

    #[test]
    fn localization_respects_inner_products(seed in any::<u64>()) {
        let t = bundled::c2_tower::<f64>(&tol()).unwrap();
        let mut g = Generator::new(seed);
        let top = t.module(t.base().top().unwrap()).clone();
        let (x, y) = (g.vector(top.dim()), g.vector(top.dim()));
        let loc = t.localize("q").unwrap();
        let pi = t.base().projection(t.base().poset().index("q").unwrap()).unwrap();
        let lhs = pi.apply(&top.inner(&x, &y).unwrap()).unwrap();
        let rhs = loc.module.inner(&loc.sigma.mul_vec(&x), &loc.sigma.mul_vec(&y)).unwrap();
        prop_assert!(lhs.dist(&rhs).unwrap() < 1e-9 * (1.0 + lhs.norm()));
    }
}
