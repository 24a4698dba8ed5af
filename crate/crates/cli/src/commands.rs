//! The subcommands, each producing report records.

use clap::ValueEnum;
use lca_core::algebra::check_morphism;
use lca_core::induction::{
    check_direct_sum, check_prop34, check_remark33_reps, check_remark33_unitary, check_stages, induce,
    InductionContext,
};
use lca_core::linalg::Tolerance;
use lca_core::module::{validate_module, HilbertModule};
use lca_core::morita::{
    check_imprimitivity, check_lemma41, correspondence_report, make_context, make_context_with, MoritaContext,
    MoritaTower,
};
use lca_core::random::Generator;
use lca_core::rep::{direct_sum, EquivalenceVerdict, Representation, WitnessRequest};
use lca_core::{Error, Mat};
use serde_json::{json, Value};

use crate::error::CliError;
use crate::instance::{from_mat, rep_spec, to_mat, AlgebraSpec, ContextSpec, Instance, InstanceFile, MorphismSpec};
use crate::report::{Record, Verdict};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Property {
    Stages,
    Imprimitivity,
    DirectSum,
    Prop34,
    Lemma41,
    Remark33,
    Correspondence,
}

impl Property {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Stages => "stages",
            Self::Imprimitivity => "imprimitivity",
            Self::DirectSum => "direct-sum",
            Self::Prop34 => "prop34",
            Self::Lemma41 => "lemma41",
            Self::Remark33 => "remark33",
            Self::Correspondence => "correspondence",
        }
    }

    fn matches(self, ctx: &ContextSpec) -> bool {
        match (self, ctx) {
            (Self::Correspondence, ContextSpec::Morita { reps, .. }) => !reps.is_empty(),
            _ => ctx.property() == self.as_str(),
        }
    }
}

/// Turns a failed check into a record; data-insufficiency outcomes are kept apart.
fn error_record(name: &str, e: Error) -> Record {
    let verdict = match e {
        Error::NoFactorizationNode | Error::NoMatchingNode(_) | Error::WitnessNotFound(_) => Verdict::Insufficient,
        _ => Verdict::Fail,
    };
    Record::failed(name, verdict, e.to_string())
}

fn mat_value(m: &Mat) -> Value {
    serde_json::to_value(from_mat(m)).expect("matrix serializes")
}

fn opt(x: Option<f64>) -> f64 {
    x.unwrap_or(0.0)
}

/// Record for an equivalence verdict, with the witness under `details.witness`.
fn verdict_record(name: &str, v: &EquivalenceVerdict<f64>) -> Record {
    let mut r = Record::new(name, v.equivalent).residual("trace", v.trace_residual);
    if let Some(u) = &v.witness {
        r = r
            .residual("intertwining", opt(v.intertwining_residual))
            .residual("unitarity", opt(v.unitarity_residual))
            .detail("witness", mat_value(u));
        r.witness = Some("details.witness".into());
    }
    r
}

pub fn validate(inst: &Instance, tol: &Tolerance<f64>) -> Result<Vec<Record>, CliError> {
    let mut out = Vec::new();
    for (name, p) in &inst.posets {
        let order_ok = p.check_order().is_ok();
        out.push(
            Record::new(format!("poset:{name}"), order_ok && p.is_directed())
                .detail("order_ok", order_ok)
                .detail("directed", p.is_directed()),
        );
    }
    for (name, m) in &inst.morphisms {
        let r = check_morphism(m, tol)?;
        out.push(
            Record::new(format!("morphism:{name}"), r.is_star_morphism())
                .residual("mult", r.mult_residual)
                .residual("star", r.star_residual)
                .residual("unit", r.unit_residual)
                .detail("linear_ok", r.linear_ok)
                .detail("surjective", r.surjective)
                .detail("injective", r.injective)
                .detail("unital", r.unital),
        );
    }
    for (name, a) in &inst.actions {
        let r = a.validate(tol)?;
        out.push(
            Record::new(format!("action:{name}"), r.is_valid())
                .residual("linearity", r.linear_residual)
                .residual("adjoint", r.adjoint_residual)
                .residual("mult", r.mult_residual)
                .residual("star", r.star_residual)
                .residual("unit", r.unit_residual)
                .detail("nondegenerate", r.nondegenerate),
        );
    }
    for (name, t) in &inst.towers {
        let r = t.validate(tol)?;
        out.push(
            Record::new(format!("tower:{name}"), r.is_valid())
                .residual("coherence", r.coherence_residual)
                .residual("morphism", r.max_morphism_residual)
                .detail("order_ok", r.order_ok)
                .detail("directed_ok", r.directed_ok)
                .detail("morphisms_ok", r.morphisms_ok)
                .detail("surjections_ok", r.surjections_ok),
        );
    }
    for (name, e) in &inst.modules {
        out.push(module_record(&format!("module:{name}"), e, tol)?);
    }
    for (name, t) in &inst.module_towers {
        let r = t.validate(tol)?;
        out.push(
            Record::new(format!("module_tower:{name}"), r.is_valid())
                .residual("action", r.action_residual)
                .residual("inner", r.inner_residual)
                .residual("composition", r.composition_residual)
                .detail("modules_ok", r.modules_ok),
        );
    }
    for (name, p) in &inst.reps {
        let r = p.validate(tol);
        out.push(
            Record::new(format!("rep:{name}"), r.is_valid())
                .residual("mult", r.mult_residual)
                .residual("star", r.star_residual)
                .residual("unit", r.unit_residual)
                .detail("hdim", p.hdim())
                .detail("nondegenerate", r.nondegenerate),
        );
    }
    Ok(out)
}

pub fn module_record(name: &str, e: &HilbertModule<f64>, tol: &Tolerance<f64>) -> Result<Record, CliError> {
    let r = validate_module(e, tol)?;
    Ok(Record::new(name, r.is_valid())
        .residual("assoc", r.assoc_residual)
        .residual("linearity", r.linearity_residual)
        .residual("symmetry", r.symmetry_residual)
        .residual("min_choi_eigenvalue", r.min_choi_eigenvalue)
        .residual("min_trace_gram_eigenvalue", r.min_trace_gram_eigenvalue)
        .detail("assoc_ok", r.assoc_ok)
        .detail("linearity_ok", r.linearity_ok)
        .detail("symmetry_ok", r.symmetry_ok)
        .detail("psd_ok", r.psd_ok)
        .detail("definite_ok", r.definite_ok)
        .detail("full", r.full))
}

/// Induces `rep` over the module action `phi`; returns the record and the output fragment.
pub fn induce_cmd(
    inst: &Instance,
    phi: &str,
    rep: &str,
    tol: &Tolerance<f64>,
) -> Result<(Record, Option<InstanceFile>), CliError> {
    let action = inst.action(phi)?;
    let r = inst.rep(rep)?;
    let name = format!("induce:{phi}:{rep}");
    let ind = match InductionContext::new(action.clone(), r.clone(), tol).and_then(|ctx| {
        let ind = induce(&ctx, tol)?;
        let bal = ind.balance_residual(&ctx)?;
        Ok((ind, bal))
    }) {
        Ok(x) => x,
        Err(e) => return Ok((error_record(&name, e), None)),
    };
    let (ind, balance) = ind;
    let report = ind.rep.validate(tol);
    let record = Record::new(&name, report.is_valid() && report.nondegenerate)
        .residual("mult", report.mult_residual)
        .residual("star", report.star_residual)
        .residual("unit", report.unit_residual)
        .residual("balance", balance)
        .residual("min_gram_eigenvalue", ind.space.min_eigenvalue)
        .detail("gram_rank", ind.space.dim())
        .detail("hdim", ind.rep.hdim());

    let source = match inst.file.morphisms.get(phi) {
        Some(MorphismSpec::ModuleAction { source, .. }) => source.clone(),
        _ => return Err(CliError::NameNotFound(format!("module action '{phi}'"))),
    };
    let mut fragment = InstanceFile::default();
    fragment.algebras.insert(source.clone(), AlgebraSpec { blocks: action.source().blocks().to_vec() });
    fragment
        .representations
        .insert(format!("{rep}_induced"), rep_spec(&source, &ind.rep, Some(ind.space.weights.clone())));
    Ok((record, Some(fragment)))
}

fn morita_of(inst: &Instance, module: &str, iso: &Option<String>, tol: &Tolerance<f64>) -> lca_core::Result<MoritaContext<f64>> {
    let e = inst.module(module).map_err(|e| Error::InvalidModule(e.to_string()))?;
    match iso {
        Some(name) => make_context_with(inst.action(name).map_err(|e| Error::InvalidMorphism(e.to_string()))?.clone(), tol),
        None => make_context(e, tol),
    }
}

fn imprimitivity_records(name: &str, ctx: &MoritaContext<f64>, reps: &[(String, Representation<f64>)], seed: u64, tol: &Tolerance<f64>) -> Vec<Record> {
    reps.iter()
        .map(|(rname, phi)| {
            let label = format!("{name}:{rname}");
            match check_imprimitivity(ctx, phi, tol, WitnessRequest::with_witness(seed)) {
                Ok(r) => {
                    let mut rec = verdict_record(&label, &r.verdict);
                    if let Some(t) = rec.residuals.remove("trace") {
                        rec.residuals.insert("round_trip_trace".into(), t);
                    }
                    rec.detail("b_blocks", ctx.b().blocks().to_vec())
                        .detail("iso", format!("{:?}", ctx.origin).to_lowercase())
                        .detail("psi_hdim", r.psi.hdim())
                        .detail("round_trip_hdim", r.round_trip.hdim())
                }
                Err(e) => error_record(&label, e),
            }
        })
        .collect()
}

fn correspondence_record(name: &str, ctx: &MoritaContext<f64>, reps: &[(String, Representation<f64>)], tol: &Tolerance<f64>) -> Record {
    let list: Vec<Representation<f64>> = reps.iter().map(|(_, r)| r.clone()).collect();
    match correspondence_report(ctx, &list, tol) {
        Ok(r) => {
            let rows: Vec<Value> = r
                .rows
                .iter()
                .zip(reps)
                .map(|(row, (n, _))| {
                    json!({
                        "rep": n,
                        "equivalent": row.equivalent,
                        "trace_residual": row.trace_residual,
                        "irreducible_in": row.irreducible_in,
                        "irreducible_out": row.irreducible_out,
                        "induced_hdim": row.induced.hdim(),
                    })
                })
                .collect();
            let pairs: Vec<Value> = r
                .pairs
                .iter()
                .map(|p| {
                    json!({
                        "left": reps[p.i].0, "right": reps[p.j].0,
                        "equivalent_before": p.equivalent_before, "equivalent_after": p.equivalent_after,
                    })
                })
                .collect();
            let worst = r.rows.iter().map(|x| x.trace_residual).fold(0.0, f64::max);
            Record::new(name, r.is_consistent())
                .residual("trace", worst)
                .residual("direct_sum_trace", r.direct_sum_residual)
                .detail("rows", rows)
                .detail("pairs", pairs)
                .detail("direct_sum_preserved", r.direct_sum_preserved)
        }
        Err(e) => error_record(name, e),
    }
}

fn lemma41_record(name: &str, mt: &MoritaTower<f64>, seed: u64, tol: &Tolerance<f64>) -> Record {
    match check_lemma41(mt, tol, seed) {
        Ok(r) => {
            let nodes: Vec<Value> = r
                .node_equivalences
                .iter()
                .map(|n| json!({"p": n.p, "q": n.q, "full": n.full, "iso_ok": n.iso_ok, "bijective": n.bijective, "residual": n.residual}))
                .collect();
            let assignments: Vec<Value> = r.assignments.iter().map(|(p, q)| json!([p, q])).collect();
            Record::new(name, r.holds())
                .residual("seminorm", r.seminorm_residual)
                .detail("assignments", assignments)
                .detail("node_equivalences", nodes)
                .detail("cofinal", r.cofinal)
                .detail("uncovered", r.uncovered)
        }
        Err(e) => error_record(name, e),
    }
}

/// Runs `property` on every matching context of the file (or just `only`).
pub fn check_file(
    inst: &Instance,
    property: Property,
    only: Option<&str>,
    seed: u64,
    tol: &Tolerance<f64>,
) -> Result<Vec<Record>, CliError> {
    let names: Vec<&String> = match only {
        Some(n) => {
            inst.context(n)?;
            inst.file.contexts.keys().filter(|k| k.as_str() == n).collect()
        }
        None => inst.file.contexts.iter().filter(|(_, c)| property.matches(c)).map(|(k, _)| k).collect(),
    };
    if names.is_empty() {
        return Err(CliError::NameNotFound(format!("no context for property {}", property.as_str())));
    }
    let mut out = Vec::new();
    for name in names {
        out.extend(check_context(inst, name, property, seed, tol)?);
    }
    Ok(out)
}

fn check_context(
    inst: &Instance,
    name: &str,
    property: Property,
    seed: u64,
    tol: &Tolerance<f64>,
) -> Result<Vec<Record>, CliError> {
    let ctx = inst.context(name)?;
    if !property.matches(ctx) && !(property == Property::Imprimitivity && matches!(ctx, ContextSpec::Morita { .. })) {
        return Err(CliError::Input(format!("context '{name}' is a {} context", ctx.property())));
    }
    let req = WitnessRequest::with_witness(seed);
    let label = format!("{}:{name}", property.as_str());
    Ok(match ctx {
        ContextSpec::Induction { .. } => Vec::new(),
        ContextSpec::Stages { phi1, phi2, rep } => {
            let (a1, a2, r) = (inst.action(phi1)?, inst.action(phi2)?, inst.rep(rep)?);
            vec![match check_stages(a1, a2, r, tol, req) {
                Ok(s) => verdict_record(&label, &s.verdict)
                    .detail("tensor_dim", s.tensor_dim)
                    .detail("left_hdim", s.left.hdim())
                    .detail("right_hdim", s.right.hdim()),
                Err(e) => error_record(&label, e),
            }]
        }
        ContextSpec::DirectSum { action, summands } => {
            let a = inst.action(action)?;
            let parts = summands.iter().map(|s| inst.rep(s).cloned()).collect::<Result<Vec<_>, _>>()?;
            vec![match check_direct_sum(a, &parts, tol, req) {
                Ok(v) => verdict_record(&label, &v).detail("summands", parts.len()),
                Err(e) => error_record(&label, e),
            }]
        }
        ContextSpec::Remark33 { action, rep1, rep2 } => {
            let (a, r1, r2) = (inst.action(action)?, inst.rep(rep1)?, inst.rep(rep2)?);
            vec![match check_remark33_reps(a, r1, r2, tol, req) {
                Ok(v) => verdict_record(&label, &v).detail("variant", 1),
                Err(e) => error_record(&label, e),
            }]
        }
        ContextSpec::Remark33Unitary { action, target, unitary, rep } => {
            let (a, f, r) = (inst.action(action)?, inst.module(target)?, inst.rep(rep)?);
            let u = to_mat(unitary)?;
            vec![match check_remark33_unitary(a, f, &u, r, tol, req) {
                Ok(v) => verdict_record(&label, &v).detail("variant", 2),
                Err(e) => error_record(&label, e),
            }]
        }
        ContextSpec::Prop34 { atower, module_tower, action, node, rep } => {
            let (at, et, a, r) = (inst.tower(atower)?, inst.module_tower(module_tower)?, inst.action(action)?, inst.rep(rep)?);
            vec![match check_prop34(at, et, a, node, r, tol, req) {
                Ok(p) => verdict_record(&label, &p.verdict)
                    .residual("factorization", p.factorization_residual)
                    .detail("found_p", p.found_p)
                    .detail("q", node.clone()),
                Err(e) => error_record(&label, e),
            }]
        }
        ContextSpec::Morita { module, iso, reps } => {
            let mctx = match morita_of(inst, module, iso, tol) {
                Ok(c) => c,
                Err(e) => return Ok(vec![error_record(&label, e)]),
            };
            let mut list = reps.iter().map(|r| Ok((r.clone(), inst.rep(r)?.clone()))).collect::<Result<Vec<_>, CliError>>()?;
            if property == Property::Correspondence {
                vec![correspondence_record(&label, &mctx, &list, tol)]
            } else {
                if list.is_empty() {
                    list.push(("identity".into(), Representation::identity(mctx.a())));
                }
                imprimitivity_records(&label, &mctx, &list, seed, tol)
            }
        }
        ContextSpec::Lemma41 { atower, module_tower, btower, iso } => {
            let mt = MoritaTower {
                atower: inst.tower(atower)?.clone(),
                etower: inst.module_tower(module_tower)?.clone(),
                btower: inst.tower(btower)?.clone(),
                iso: inst.action(iso)?.clone(),
            };
            vec![lemma41_record(&label, &mt, seed, tol)]
        }
    })
}

/// Seed of trial `i`; every trial is reproducible on its own.
pub fn trial_seed(seed: u64, i: usize) -> u64 {
    seed.wrapping_add(i as u64)
}

pub fn check_random(property: Property, trials: usize, seed: u64, tol: &Tolerance<f64>) -> Result<Vec<Record>, CliError> {
    (0..trials)
        .map(|i| {
            let s = trial_seed(seed, i);
            let label = format!("{}#{i}", property.as_str());
            random_trial(property, &label, s, tol).map(|r| r.detail("seed", s))
        })
        .collect()
}

fn gen_err(e: Error) -> CliError {
    CliError::Generator(e.to_string())
}

fn random_full_context(g: &mut Generator, tol: &Tolerance<f64>) -> Result<MoritaContext<f64>, CliError> {
    for _ in 0..g.retries {
        let a = g.algebra();
        let e = g.module::<f64>(&a).map_err(gen_err)?;
        match make_context(&e, tol) {
            Ok(ctx) => return Ok(ctx),
            Err(Error::NotFull) => continue,
            Err(e) => return Err(gen_err(e)),
        }
    }
    Err(gen_err(Error::GeneratorExhausted(g.retries)))
}

fn random_trial(property: Property, label: &str, seed: u64, tol: &Tolerance<f64>) -> Result<Record, CliError> {
    let mut g = Generator::new(seed);
    let req = WitnessRequest::with_witness(seed);
    Ok(match property {
        Property::Stages => {
            let inst = g.stages_instance::<f64>(tol).map_err(gen_err)?;
            match check_stages(&inst.phi1, &inst.phi2, &inst.rep, tol, req) {
                Ok(s) => verdict_record(label, &s.verdict)
                    .detail("a_blocks", inst.phi1.source().blocks().to_vec())
                    .detail("b_blocks", inst.phi2.source().blocks().to_vec())
                    .detail("c_blocks", inst.rep.algebra().blocks().to_vec())
                    .detail("e_dim", inst.phi1.module().dim())
                    .detail("f_dim", inst.phi2.module().dim())
                    .detail("rep_hdim", inst.rep.hdim())
                    .detail("tensor_dim", s.tensor_dim),
                Err(e) => error_record(label, e),
            }
        }
        Property::DirectSum => {
            let inst = g.direct_sum_instance::<f64>(tol).map_err(gen_err)?;
            match check_direct_sum(&inst.action, &inst.summands, tol, req) {
                Ok(v) => verdict_record(label, &v)
                    .detail("summands", inst.summands.len())
                    .detail("e_dim", inst.action.module().dim()),
                Err(e) => error_record(label, e),
            }
        }
        Property::Remark33 => {
            let b = g.algebra();
            let action = g.module_action::<f64>(&b, tol).map_err(gen_err)?;
            let phi = g.rep::<f64>(&b, tol).map_err(gen_err)?;
            let v = g.unitary::<f64>(phi.hdim(), tol).map_err(gen_err)?;
            let phi2 = phi.conjugate(&v)?;
            match check_remark33_reps(&action, &phi, &phi2, tol, req) {
                Ok(v) => verdict_record(label, &v).detail("variant", 1),
                Err(e) => error_record(label, e),
            }
        }
        Property::Imprimitivity => {
            let ctx = random_full_context(&mut g, tol)?;
            let phi = g.rep::<f64>(ctx.a(), tol).map_err(gen_err)?;
            imprimitivity_records(label, &ctx, &[("random".into(), phi)], seed, tol).remove(0)
        }
        Property::Correspondence => {
            let ctx = random_full_context(&mut g, tol)?;
            let phi = g.rep::<f64>(ctx.a(), tol).map_err(gen_err)?;
            let u = g.unitary::<f64>(phi.hdim(), tol).map_err(gen_err)?;
            let reps = vec![
                ("phi".to_string(), phi.clone()),
                ("phi+phi".to_string(), direct_sum(&[phi.clone(), phi.clone()])?),
                ("conjugate".to_string(), phi.conjugate(&u)?),
            ];
            correspondence_record(label, &ctx, &reps, tol)
        }
        Property::Prop34 | Property::Lemma41 => {
            return Err(CliError::Input(format!("no random generator for {}; supply a file", property.as_str())))
        }
    })
}

/// Every validator, then every context under its natural property.
pub fn report_all(inst: &Instance, seed: u64, tol: &Tolerance<f64>) -> Result<Vec<Record>, CliError> {
    let mut out = validate(inst, tol)?;
    for (name, ctx) in &inst.file.contexts {
        match ctx {
            ContextSpec::Induction { action, rep } => {
                let (mut rec, _) = induce_cmd(inst, action, rep, tol)?;
                rec.name = format!("induction:{name}");
                out.push(rec);
            }
            ContextSpec::Morita { reps, .. } => {
                out.extend(check_context(inst, name, Property::Imprimitivity, seed, tol)?);
                if !reps.is_empty() {
                    out.extend(check_context(inst, name, Property::Correspondence, seed, tol)?);
                }
            }
            _ => {
                let p = [
                    Property::Stages,
                    Property::DirectSum,
                    Property::Remark33,
                    Property::Prop34,
                    Property::Lemma41,
                ]
                .into_iter()
                .find(|p| p.matches(ctx))
                .expect("every context kind has a property");
                out.extend(check_context(inst, name, p, seed, tol)?);
            }
        }
    }
    Ok(out)
}
