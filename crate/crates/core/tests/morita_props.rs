use lca_core::algebra::MatrixStarAlgebra;
use lca_core::bundled;
use lca_core::linalg::Tolerance;
use lca_core::morita::{check_imprimitivity, correspondence_report, make_context};
use lca_core::random::Generator;
use lca_core::rep::{direct_sum, Representation, WitnessRequest};
use proptest::prelude::*;

fn tol() -> Tolerance<f64> {
    Tolerance::default()
}

#[test]
fn imprimitivity_for_rows() {
    for n in 1..=3 {
        let ctx = bundled::rows_context::<f64>(n, &tol()).unwrap();
        assert!(ctx.validate(&tol()).unwrap().is_valid());
        let id = Representation::identity(&MatrixStarAlgebra::full(n));
        for phi in [id.clone(), direct_sum(&[id.clone(), id]).unwrap()] {
            let r = check_imprimitivity(&ctx, &phi, &tol(), WitnessRequest::with_witness(n as u64)).unwrap();
            assert!(r.verdict.equivalent);
            assert!(r.verdict.trace_residual < 1e-8);
            assert!(r.verdict.unitarity_residual.unwrap() < 1e-8);
            assert!(r.verdict.intertwining_residual.unwrap() < 1e-8);
        }
    }
}

#[test]
fn correspondence_over_m2() {
    let ctx = bundled::rows_context::<f64>(2, &tol()).unwrap();
    let id = Representation::identity(&MatrixStarAlgebra::full(2));
    let u = Generator::new(4).unitary::<f64>(2, &tol()).unwrap();
    let reps = vec![id.clone(), direct_sum(&[id.clone(), id.clone()]).unwrap(), id.conjugate(&u).unwrap()];
    let r = correspondence_report(&ctx, &reps, &tol()).unwrap();
    assert!(r.is_consistent());
    assert!(r.pairs.iter().any(|p| p.equivalent_before));
    assert!(r.pairs.iter().any(|p| !p.equivalent_before));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn imprimitivity_on_generated_modules(seed in any::<u64>()) {
        let mut g = Generator::new(seed);
        let a = g.algebra();
        let e = g.module::<f64>(&a).unwrap();
        let t = tol();
        match make_context(&e, &t) {
            Ok(ctx) => {
                let phi = g.rep::<f64>(&a, &t).unwrap();
                let r = check_imprimitivity(&ctx, &phi, &t, WitnessRequest::default()).unwrap();
                prop_assert!(r.verdict.equivalent);
            }
            Err(lca_core::Error::NotFull) => {}
            Err(e) => prop_assert!(false, "{e}"),
        }
    }
}
