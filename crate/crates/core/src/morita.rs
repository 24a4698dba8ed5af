//! Strong Morita equivalence contexts: `A ∼ B` through a full Hilbert
//! `A`-module `E` with `B ≅ K_A(E)`, and the round trip through the dual module.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::induction::induce_rep;
use crate::linalg::{lstsq, rank, CMat, Tolerance};
use crate::module::dual::compact_iso;
use crate::module::ops::unit_vec;
use crate::module::{
    compact_space, is_full, operator_norm, require_valid, DualModule, DualReport, HilbertModule, ModuleAction,
    ModuleTower,
};
use crate::rep::{direct_sum, is_irreducible, unitarily_equivalent, EquivalenceVerdict, Representation, WitnessRequest};
use crate::scalar::{c, Real, C};
use crate::tower::AlgebraTower;
use crate::{Error, Result};

/// Where the isomorphism `B → K_A(E)` came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IsoOrigin {
    /// Block structure recovered from the operator basis of `K_A(E)`.
    Recovered,
    Supplied,
}

#[derive(Clone, Debug)]
pub struct MoritaContext<T> {
    pub module: HilbertModule<T>,
    /// `B → L_A(E)`, an isomorphism onto `K_A(E)`.
    pub iso: ModuleAction<T>,
    pub dual: DualModule<T>,
    pub origin: IsoOrigin,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ContextReport<T> {
    pub full: bool,
    pub iso_ok: bool,
    /// Injective, and `dim B = dim K_A(E)`.
    pub iso_bijective: bool,
    pub iso_residual: T,
    pub dual: DualReport<T>,
}

impl<T: Real> ContextReport<T> {
    pub fn is_valid(&self) -> bool {
        self.full && self.iso_ok && self.iso_bijective && self.dual.is_valid()
    }
}

/// Builds the context with `B := K_A(E)`, its blocks recovered numerically.
pub fn make_context<T: Real>(e: &HilbertModule<T>, tol: &Tolerance<T>) -> Result<MoritaContext<T>> {
    require_valid(e, tol)?;
    if !is_full(e, tol) {
        return Err(Error::NotFull);
    }
    let iso = compact_iso(e, tol)?;
    let dual = DualModule::with_iso(e, iso.clone(), tol)?;
    Ok(MoritaContext { module: e.clone(), iso, dual, origin: IsoOrigin::Recovered })
}

/// Builds the context from a supplied `B` and isomorphism onto `K_A(E)`.
pub fn make_context_with<T: Real>(iso: ModuleAction<T>, tol: &Tolerance<T>) -> Result<MoritaContext<T>> {
    let e = iso.module().clone();
    require_valid(&e, tol)?;
    if !is_full(&e, tol) {
        return Err(Error::NotFull);
    }
    let dual = DualModule::with_iso(&e, iso.clone(), tol)?;
    Ok(MoritaContext { module: e, iso, dual, origin: IsoOrigin::Supplied })
}

impl<T: Real> MoritaContext<T> {
    pub fn a(&self) -> &crate::algebra::MatrixStarAlgebra {
        self.module.over()
    }

    pub fn b(&self) -> &crate::algebra::MatrixStarAlgebra {
        self.iso.source()
    }

    pub fn validate(&self, tol: &Tolerance<T>) -> Result<ContextReport<T>> {
        let r = self.iso.validate(tol)?;
        Ok(ContextReport {
            full: is_full(&self.module, tol),
            iso_ok: r.is_valid() && r.nondegenerate,
            iso_bijective: action_is_bijective(&self.iso, tol)?,
            iso_residual: r.max_residual(),
            dual: self.dual.validate(tol)?,
        })
    }

    /// `φ ↦ ψ`: induce a representation of `A` over `E` to one of `B`.
    pub fn to_b(&self, phi: &Representation<T>, tol: &Tolerance<T>) -> Result<Representation<T>> {
        induce_rep(&self.iso, phi, tol)
    }

    /// `ψ ↦` representation of `A`, induced over `Ẽ`.
    pub fn to_a(&self, psi: &Representation<T>, tol: &Tolerance<T>) -> Result<Representation<T>> {
        induce_rep(&self.dual.alpha, psi, tol)
    }
}

/// Injective onto `K(E)`: the images are independent and span as many
/// dimensions as the compacts.
fn action_is_bijective<T: Real>(action: &ModuleAction<T>, tol: &Tolerance<T>) -> Result<bool> {
    let e = action.module();
    let n = action.source().dim();
    let k = compact_space(e, e, tol)?.len();
    if n == 0 {
        return Ok(k == 0);
    }
    let cols: Vec<Vec<C<T>>> = action.images().iter().map(CMat::to_vec).collect();
    let r = if e.dim() == 0 { 0 } else { rank(&CMat::from_columns(e.dim() * e.dim(), &cols), tol)? };
    Ok(r == n && k == n)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ImprimitivityReport<T> {
    /// The representation of `B` induced over `E`.
    pub psi: Representation<T>,
    /// Induced back over `Ẽ`.
    pub round_trip: Representation<T>,
    pub verdict: EquivalenceVerdict<T>,
}

/// Checks that inducing `φ` to `B` and back over `Ẽ` returns `φ` up to equivalence.
pub fn check_imprimitivity<T: Real>(
    ctx: &MoritaContext<T>,
    phi: &Representation<T>,
    tol: &Tolerance<T>,
    req: WitnessRequest,
) -> Result<ImprimitivityReport<T>> {
    let psi = ctx.to_b(phi, tol)?;
    let round_trip = ctx.to_a(&psi, tol)?;
    let verdict = unitarily_equivalent(&round_trip, phi, tol, req)?;
    Ok(ImprimitivityReport { psi, round_trip, verdict })
}

#[derive(Clone, Debug, PartialEq)]
pub struct CorrespondenceRow<T> {
    pub input: Representation<T>,
    pub induced: Representation<T>,
    pub round_trip: Representation<T>,
    pub equivalent: bool,
    pub trace_residual: T,
    pub irreducible_in: bool,
    pub irreducible_out: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PairRow {
    pub i: usize,
    pub j: usize,
    pub equivalent_before: bool,
    pub equivalent_after: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CorrespondenceReport<T> {
    pub rows: Vec<CorrespondenceRow<T>>,
    pub pairs: Vec<PairRow>,
    /// Induced `φ_0 ⊕ φ_1` against `ψ_0 ⊕ ψ_1` (`φ_1 = φ_0` for a one-element list).
    pub direct_sum_preserved: bool,
    pub direct_sum_residual: T,
}

impl<T: Real> CorrespondenceReport<T> {
    pub fn is_consistent(&self) -> bool {
        self.rows.iter().all(|r| r.equivalent && r.irreducible_in == r.irreducible_out)
            && self.pairs.iter().all(|p| p.equivalent_before == p.equivalent_after)
            && self.direct_sum_preserved
    }
}

pub fn correspondence_report<T: Real>(
    ctx: &MoritaContext<T>,
    reps: &[Representation<T>],
    tol: &Tolerance<T>,
) -> Result<CorrespondenceReport<T>> {
    if reps.is_empty() {
        return Err(Error::Empty("no representations".into()));
    }
    let req = WitnessRequest::default();
    let mut rows = Vec::with_capacity(reps.len());
    for phi in reps {
        let r = check_imprimitivity(ctx, phi, tol, req)?;
        rows.push(CorrespondenceRow {
            input: phi.clone(),
            irreducible_in: is_irreducible(phi, tol)?,
            irreducible_out: is_irreducible(&r.psi, tol)?,
            induced: r.psi,
            round_trip: r.round_trip,
            equivalent: r.verdict.equivalent,
            trace_residual: r.verdict.trace_residual,
        });
    }
    let mut pairs = Vec::new();
    for i in 0..reps.len() {
        for j in i + 1..reps.len() {
            pairs.push(PairRow {
                i,
                j,
                equivalent_before: unitarily_equivalent(&reps[i], &reps[j], tol, req)?.equivalent,
                equivalent_after: unitarily_equivalent(&rows[i].induced, &rows[j].induced, tol, req)?.equivalent,
            });
        }
    }
    let second = reps.get(1).unwrap_or(&reps[0]);
    let whole = ctx.to_b(&direct_sum(&[reps[0].clone(), second.clone()])?, tol)?;
    let parts = direct_sum(&[rows[0].induced.clone(), rows.get(1).unwrap_or(&rows[0]).induced.clone()])?;
    let ds = unitarily_equivalent(&whole, &parts, tol, req)?;
    Ok(CorrespondenceReport {
        rows,
        pairs,
        direct_sum_preserved: ds.equivalent,
        direct_sum_residual: ds.trace_residual,
    })
}

/// Tower-level context: `E` localized over the `A`-tower and `Φ: B_top → L(E_top)`.
#[derive(Clone, Debug)]
pub struct MoritaTower<T> {
    pub atower: AlgebraTower<T>,
    pub etower: ModuleTower<T>,
    pub btower: AlgebraTower<T>,
    pub iso: ModuleAction<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NodeEquivalence<T> {
    pub p: String,
    pub q: String,
    pub full: bool,
    pub iso_ok: bool,
    pub bijective: bool,
    pub residual: T,
}

impl<T: Real> NodeEquivalence<T> {
    pub fn holds(&self) -> bool {
        self.full && self.iso_ok && self.bijective
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Lemma41Report<T> {
    /// `p ↦ q_p`.
    pub assignments: Vec<(String, String)>,
    pub node_equivalences: Vec<NodeEquivalence<T>>,
    pub cofinal: bool,
    /// `B`-nodes not dominated by any `q_p`.
    pub uncovered: Vec<String>,
    /// Largest seminorm mismatch among accepted matches.
    pub seminorm_residual: T,
}

impl<T: Real> Lemma41Report<T> {
    pub fn holds(&self) -> bool {
        self.cofinal && self.node_equivalences.iter().all(NodeEquivalence::holds)
    }
}

const SAMPLES: usize = 8;

/// Matches each `p̃ ∘ Φ` to a declared `B`-node, checks the node-level
/// equivalences and the cofinality of the matched nodes.
pub fn check_lemma41<T: Real>(mt: &MoritaTower<T>, tol: &Tolerance<T>, seed: u64) -> Result<Lemma41Report<T>> {
    let (atower, btower, etower) = (&mt.atower, &mt.btower, &mt.etower);
    if etower.base().poset() != atower.poset() {
        return Err(Error::Structure("module tower is not over the A-tower".into()));
    }
    let (atop, btop) = (atower.top()?, btower.top()?);
    let b = btower.algebra(btop);
    if mt.iso.source() != b || mt.iso.module() != etower.module(atop) {
        return Err(Error::AlgebraMismatch);
    }

    // sample elements: matrix units and seeded random combinations
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples: Vec<Vec<C<T>>> = (0..b.dim()).map(|k| unit_vec(b.dim(), k)).collect();
    for _ in 0..SAMPLES {
        samples.push(
            (0..b.dim())
                .map(|_| {
                    let (x, y): (f64, f64) = (StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng));
                    c(T::lit(x), T::lit(y))
                })
                .collect(),
        );
    }
    let bnorms: Vec<Vec<T>> = (0..btower.poset().len())
        .map(|q| {
            let pi = btower.projection(q)?;
            samples.iter().map(|s| Ok(btower.algebra(q).element(&pi.action().mul_vec(s))?.norm())).collect()
        })
        .collect::<Result<_>>()?;

    let mut assignments = Vec::new();
    let mut node_equivalences = Vec::new();
    let mut matched = Vec::new();
    let mut seminorm_residual = T::zero();
    for p in 0..atower.poset().len() {
        let ep = etower.module(p);
        let pushed: Vec<CMat<T>> =
            mt.iso.images().iter().map(|m| etower.push_operator(m, p, tol)).collect::<Result<_>>()?;
        let seminorm: Vec<T> = samples
            .iter()
            .map(|s| {
                let mut m = CMat::zeros(ep.dim(), ep.dim());
                for (img, &z) in pushed.iter().zip(s) {
                    m.axpy(z, img);
                }
                operator_norm(ep, &m, tol)
            })
            .collect::<Result<_>>()?;
        let found = (0..btower.poset().len()).find_map(|q| {
            let diff = seminorm.iter().zip(&bnorms[q]).map(|(x, y)| (*x - *y).abs()).fold(T::zero(), T::max);
            let scale = seminorm.iter().chain(&bnorms[q]).copied().fold(T::zero(), T::max);
            tol.accepts(diff, scale).then_some((q, diff))
        });
        let (q, diff) = found.ok_or_else(|| Error::NoMatchingNode(atower.poset().name(p).to_string()))?;
        seminorm_residual = seminorm_residual.max(diff);
        matched.push(q);
        let (pname, qname) = (atower.poset().name(p).to_string(), btower.poset().name(q).to_string());
        assignments.push((pname.clone(), qname.clone()));

        // Φ_q on E_p through π_q
        let pi = btower.projection(q)?;
        let dp = ep.dim();
        let target = CMat::from_columns(dp * dp, &pushed.iter().map(CMat::to_vec).collect::<Vec<_>>());
        let (xt, res) = lstsq(&pi.action().transpose(), &target.transpose(), tol)?;
        let x = xt.transpose();
        let bq = btower.algebra(q);
        let images = (0..bq.dim()).map(|k| CMat::col_vec(&x.column(k)).reshape(dp, dp)).collect();
        let action = ModuleAction::new(bq.clone(), ep.clone(), images)?;
        let r = action.validate(tol)?;
        node_equivalences.push(NodeEquivalence {
            p: pname,
            q: qname,
            full: is_full(ep, tol),
            iso_ok: tol.accepts(res, target.norm_max()) && r.is_valid() && r.nondegenerate,
            bijective: action_is_bijective(&action, tol)?,
            residual: res.max(r.max_residual()),
        });
    }

    let bposet = btower.poset();
    let uncovered: Vec<String> = (0..bposet.len())
        .filter(|&q| !matched.iter().any(|&qp| bposet.geq(qp, q)))
        .map(|q| bposet.name(q).to_string())
        .collect();
    Ok(Lemma41Report {
        assignments,
        node_equivalences,
        cofinal: uncovered.is_empty(),
        uncovered,
        seminorm_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::MatrixStarAlgebra;

    fn tol() -> Tolerance<f64> {
        Tolerance::default()
    }

    #[test]
    fn context_shapes() {
        let ctx = make_context(&HilbertModule::<f64>::hilbert_space(1), &tol()).unwrap();
        assert_eq!(ctx.b().blocks(), &[1]);
        let ctx = make_context(&HilbertModule::<f64>::row_module(2), &tol()).unwrap();
        assert_eq!(ctx.b().blocks(), &[1]);
        assert!(ctx.validate(&tol()).unwrap().is_valid());
        let ctx = make_context(&HilbertModule::<f64>::hilbert_space(2), &tol()).unwrap();
        assert_eq!(ctx.b().blocks(), &[2]);
        assert!(ctx.validate(&tol()).unwrap().is_valid());
    }

    #[test]
    fn imprimitivity_for_m2() {
        let ctx = make_context(&HilbertModule::<f64>::row_module(2), &tol()).unwrap();
        let id = Representation::identity(&MatrixStarAlgebra::full(2));
        let r = check_imprimitivity(&ctx, &id, &tol(), WitnessRequest::with_witness(3)).unwrap();
        assert_eq!(r.psi.hdim(), 1);
        assert_eq!(r.round_trip.hdim(), 2);
        assert!(r.verdict.equivalent);
        assert!(r.verdict.unitarity_residual.unwrap() < 1e-8);

        let two = direct_sum(&[id.clone(), id]).unwrap();
        let r = check_imprimitivity(&ctx, &two, &tol(), WitnessRequest::default()).unwrap();
        assert_eq!(r.psi.hdim(), 2);
        assert!(r.verdict.equivalent);
    }

    #[test]
    fn correspondence_for_m2() {
        let ctx = make_context(&HilbertModule::<f64>::row_module(2), &tol()).unwrap();
        let id = Representation::identity(&MatrixStarAlgebra::full(2));
        let two = direct_sum(&[id.clone(), id.clone()]).unwrap();
        let rep = correspondence_report(&ctx, &[id, two], &tol()).unwrap();
        assert!(rep.is_consistent(), "{rep:?}");
        assert!(rep.rows[0].irreducible_in && rep.rows[0].irreducible_out);
        assert!(!rep.rows[1].irreducible_in && !rep.rows[1].irreducible_out);
        assert!(!rep.pairs[0].equivalent_before && !rep.pairs[0].equivalent_after);
    }

    #[test]
    fn single_node_lemma41() {
        let e = HilbertModule::<f64>::row_module(2);
        let atower = AlgebraTower::single("p", e.over().clone());
        let etower = ModuleTower::from_top(atower.clone(), e.clone(), &tol()).unwrap();
        let ctx = make_context(&e, &tol()).unwrap();
        let btower = AlgebraTower::single("q", ctx.b().clone());
        let mt = MoritaTower { atower, etower, btower, iso: ctx.iso };
        let r = check_lemma41(&mt, &tol(), 1).unwrap();
        assert_eq!(r.assignments, vec![("p".to_string(), "q".to_string())]);
        assert!(r.holds(), "{r:?}");
    }
}
