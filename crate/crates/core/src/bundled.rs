//! Small hand-built instances used by the tests, the CLI and the acceptance suite.

use std::collections::BTreeMap;

use crate::algebra::{MatrixStarAlgebra, StarMorphism};
use crate::linalg::{CMat, Tolerance};
use crate::module::{compact_iso, HilbertModule, ModuleAction, ModuleTower};
use crate::morita::{make_context, MoritaContext, MoritaTower};
use crate::rep::Representation;
use crate::scalar::{cone, Real};
use crate::tower::{AlgebraTower, SeminormPoset};
use crate::Result;

/// The modules expected to pass every axiom check, with display names.
pub fn valid_modules<T: Real>() -> Vec<(&'static str, HilbertModule<T>)> {
    vec![
        ("C over C", HilbertModule::hilbert_space(1)),
        ("C^(1x2) over M2", HilbertModule::row_module(2)),
        ("C2 over itself", HilbertModule::over_itself(&MatrixStarAlgebra::diagonal(2))),
        ("M2 over itself", HilbertModule::over_itself(&MatrixStarAlgebra::full(2))),
        ("C+M2 over itself", HilbertModule::over_itself(&c_plus_m2())),
    ]
}

pub fn c_plus_m2() -> MatrixStarAlgebra {
    MatrixStarAlgebra::new(vec![1, 2]).expect("valid blocks")
}

/// `⟨x, y⟩ = −x̄y` over `ℂ`.
pub fn negative_form<T: Real>() -> HilbertModule<T> {
    HilbertModule::from_parts(MatrixStarAlgebra::full(1), 1, vec![CMat::identity(1)], |_, _| vec![-cone::<T>()])
        .expect("shapes agree")
}

/// `ℂ ⊕ 0` over `ℂ²`: a valid module whose inner products miss the second block.
pub fn non_full<T: Real>() -> HilbertModule<T> {
    HilbertModule::standard(&MatrixStarAlgebra::diagonal(2), &[1, 0], None).expect("valid multiplicities")
}

/// `ℂ²` over itself localized along the first-coordinate projection `{p ≥ q}`.
pub fn c2_tower<T: Real>(tol: &Tolerance<T>) -> Result<ModuleTower<T>> {
    let (c2, c1) = (MatrixStarAlgebra::diagonal(2), MatrixStarAlgebra::diagonal(1));
    let base = AlgebraTower::two_node("p", "q", StarMorphism::block_projection(&c2, &c1, &[0])?)?;
    ModuleTower::from_top(base, HilbertModule::over_itself(&c2), tol)
}

/// Morita context of `M_n` with `ℂ^{1×n}`.
pub fn rows_context<T: Real>(n: usize, tol: &Tolerance<T>) -> Result<MoritaContext<T>> {
    make_context(&HilbertModule::row_module(n), tol)
}

/// Data for comparing limit-level and node-level induction.
#[derive(Clone, Debug)]
pub struct Prop34Model<T> {
    pub atower: AlgebraTower<T>,
    pub etower: ModuleTower<T>,
    pub action: ModuleAction<T>,
    pub q: String,
    pub rep_q: Representation<T>,
    /// The lowest `A`-node the action factors through.
    pub expected_p: String,
}

/// `A = ℂ² ≥ ℂ` acting on `ℂ²` over `ℂ² ≥ ℂ`, with `φ` at the bottom `B`-node.
/// With `swap` the action exchanges coordinates and only factors through the top.
pub fn prop34_model<T: Real>(swap: bool, tol: &Tolerance<T>) -> Result<Prop34Model<T>> {
    let (c2, c1) = (MatrixStarAlgebra::diagonal(2), MatrixStarAlgebra::diagonal(1));
    let atower = AlgebraTower::two_node("p", "p'", StarMorphism::block_projection(&c2, &c1, &[0])?)?;
    let btower = AlgebraTower::two_node("q", "q'", StarMorphism::block_projection(&c2, &c1, &[0])?)?;
    let e = HilbertModule::over_itself(&c2);
    let etower = ModuleTower::from_top(btower, e.clone(), tol)?;
    let images = if swap {
        vec![CMat::diag_real(&[T::zero(), T::one()]), CMat::diag_real(&[T::one(), T::zero()])]
    } else {
        vec![CMat::diag_real(&[T::one(), T::zero()]), CMat::diag_real(&[T::zero(), T::one()])]
    };
    Ok(Prop34Model {
        atower,
        etower,
        action: ModuleAction::new(c2, e, images)?,
        q: "q'".into(),
        rep_q: Representation::identity(&c1),
        expected_p: if swap { "p" } else { "p'" }.into(),
    })
}

/// `A = M₂ ≥ 0` with `E = ℂ^{1×2} ≥ 0`, and `B = ℂ ≥ 0`. With `extra`, the
/// `B`-tower gains a node `ℂ²` above every other node, which no `q_p` reaches.
pub fn lemma41_model<T: Real>(extra: bool, tol: &Tolerance<T>) -> Result<MoritaTower<T>> {
    let (m2, c1, c2, zero) = (
        MatrixStarAlgebra::full(2),
        MatrixStarAlgebra::diagonal(1),
        MatrixStarAlgebra::diagonal(2),
        MatrixStarAlgebra::zero(),
    );
    let e = HilbertModule::row_module(2);
    let atower = AlgebraTower::two_node("p", "p'", StarMorphism::block_projection(&m2, &zero, &[])?)?;
    let etower = ModuleTower::from_top(atower.clone(), e.clone(), tol)?;
    let iso = compact_iso(&e, tol)?;
    if !extra {
        let btower = AlgebraTower::two_node("q", "q'", StarMorphism::block_projection(&c1, &zero, &[])?)?;
        return Ok(MoritaTower { atower, etower, btower, iso });
    }
    let poset = SeminormPoset::new(&["r", "q", "q'"], &[("r", "q"), ("r", "q'"), ("q", "q'")], &[])?;
    let algebras = BTreeMap::from([("r".into(), c2.clone()), ("q".into(), c1.clone()), ("q'".into(), zero.clone())]);
    let connecting = BTreeMap::from([
        (("r".into(), "q".into()), StarMorphism::block_projection(&c2, &c1, &[0])?),
        (("r".into(), "q'".into()), StarMorphism::block_projection(&c2, &zero, &[])?),
        (("q".into(), "q'".into()), StarMorphism::block_projection(&c1, &zero, &[])?),
    ]);
    let btower = AlgebraTower::new(poset, algebras, connecting)?;
    let first = CMat::from_real(1, 2, &[1.0, 0.0]);
    let iso = iso.pullback(&c2, &first)?;
    Ok(MoritaTower { atower, etower, btower, iso })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::induction::check_prop34;
    use crate::module::validate_module;
    use crate::morita::check_lemma41;
    use crate::rep::WitnessRequest;

    fn tol() -> Tolerance<f64> {
        Tolerance::default()
    }

    #[test]
    fn bundled_modules() {
        for (name, e) in valid_modules::<f64>() {
            assert!(validate_module(&e, &tol()).unwrap().is_valid(), "{name}");
        }
        assert!(!validate_module(&negative_form::<f64>(), &tol()).unwrap().psd_ok);
        let r = validate_module(&non_full::<f64>(), &tol()).unwrap();
        assert!(r.is_valid() && !r.full);
    }

    #[test]
    fn c2_tower_is_coherent() {
        let t = c2_tower::<f64>(&tol()).unwrap();
        assert!(t.base().validate(&tol()).unwrap().is_valid());
        assert!(t.validate(&tol()).unwrap().is_valid());
    }

    #[test]
    fn prop34_models_find_their_nodes() {
        for swap in [false, true] {
            let m = prop34_model::<f64>(swap, &tol()).unwrap();
            let r = check_prop34(&m.atower, &m.etower, &m.action, &m.q, &m.rep_q, &tol(), WitnessRequest::default())
                .unwrap();
            assert_eq!(r.found_p, m.expected_p);
            assert!(r.verdict.equivalent);
        }
    }

    #[test]
    fn lemma41_models() {
        let r = check_lemma41(&lemma41_model::<f64>(false, &tol()).unwrap(), &tol(), 5).unwrap();
        assert!(r.holds(), "{r:?}");
        assert_eq!(r.assignments[0], ("p".into(), "q".into()));
        assert_eq!(r.assignments[1], ("p'".into(), "q'".into()));

        let r = check_lemma41(&lemma41_model::<f64>(true, &tol()).unwrap(), &tol(), 5).unwrap();
        assert!(!r.cofinal);
        assert_eq!(r.uncovered, vec!["r".to_string()]);
        assert!(r.node_equivalences.iter().all(|n| n.holds()));
    }
}
