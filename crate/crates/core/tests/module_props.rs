use lca_core::algebra::MatrixStarAlgebra;
use lca_core::bundled;
use lca_core::linalg::Tolerance;
use lca_core::module::{dual_module, theta_residuals, validate_module, HilbertModule};
use lca_core::random::Generator;
use proptest::prelude::*;

fn tol() -> Tolerance<f64> {
    Tolerance::default()
}

#[test]
fn bundled_modules_pass_and_negatives_fail() {
    for (name, e) in bundled::valid_modules::<f64>() {
        let r = validate_module(&e, &tol()).unwrap();
        assert!(r.is_valid() && r.full, "{name}: {r:?}");
        assert!(r.max_residual() < 1e-9, "{name}");
    }
    let neg = validate_module(&bundled::negative_form::<f64>(), &tol()).unwrap();
    assert!(!neg.psd_ok);
    let nf = validate_module(&bundled::non_full::<f64>(), &tol()).unwrap();
    assert!(nf.psd_ok && !nf.full);
}

#[test]
fn theta_relations_on_random_triples() {
    let mut g = Generator::new(11);
    for (name, e) in bundled::valid_modules::<f64>() {
        for _ in 0..100 {
            let d = e.dim();
            let (eta, xi, zeta, mu) = (g.vector(d), g.vector(d), g.vector(d), g.vector(d));
            let (star, comp) = theta_residuals(&e, &eta, &xi, &zeta, &mu, &tol()).unwrap();
            assert!(star < 1e-8 && comp < 1e-8, "{name}: {star:e} {comp:e}");
        }
    }
}

#[test]
fn alpha_identity_on_random_triples() {
    let mut g = Generator::new(12);
    for (name, e) in bundled::valid_modules::<f64>() {
        let dual = dual_module(&e, &tol()).unwrap();
        let a = e.over();
        for _ in 0..100 {
            let x = a.element(&g.element(a)).unwrap();
            let y = a.element(&g.element(a)).unwrap();
            let xi = g.vector(e.dim());
            let r = dual.alpha_identity_at(&x, &y, &xi, &tol()).unwrap();
            assert!(r < 1e-8, "{name}: {r:e}");
        }
    }
}

#[test]
fn cauchy_schwarz_on_bundled_modules() {
    let mut g = Generator::new(13);
    for (_, e) in bundled::valid_modules::<f64>() {
        for _ in 0..20 {
            let (x, y) = (g.vector(e.dim()), g.vector(e.dim()));
            let lhs = e.inner(&x, &y).unwrap().norm();
            let rhs = e.norm(&x).unwrap() * e.norm(&y).unwrap();
            assert!(lhs <= rhs * (1.0 + 1e-9) + 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generated_modules_validate(seed in any::<u64>()) {
        let mut g = Generator::new(seed);
        let b = g.algebra();
        let e = g.module::<f64>(&b).unwrap();
        prop_assert!(validate_module(&e, &tol()).unwrap().is_valid());
    }

    #[test]
    fn basis_change_preserves_validity(seed in any::<u64>()) {
        let mut g = Generator::new(seed);
        let b = g.algebra();
        let e = g.module::<f64>(&b).unwrap();
        let mut s = g.matrix::<f64>(e.dim(), e.dim());
        s.axpy(lca_core::scalar::cr(3.0), &lca_core::linalg::CMat::identity(e.dim()));
        if let Ok(f) = e.change_basis(&s, &tol()) {
            prop_assert!(validate_module(&f, &tol()).unwrap().is_valid());
        }
    }

    #[test]
    fn direct_sum_of_full_modules_is_full(n in 1usize..=3) {
        let e = HilbertModule::<f64>::row_module(n);
        let f = HilbertModule::over_itself(&MatrixStarAlgebra::full(n));
        let r = validate_module(&e.direct_sum(&f).unwrap(), &tol()).unwrap();
        prop_assert!(r.is_valid() && r.full);
    }
}
