//! JSON instance files and their resolution into core objects.

use std::collections::BTreeMap;

use lca_core::algebra::{MatrixStarAlgebra, StarMorphism};
use lca_core::linalg::{CMat, Tolerance};
use lca_core::module::{HilbertModule, ModuleAction, ModuleTower};
use lca_core::rep::Representation;
use lca_core::tower::{AlgebraTower, SeminormPoset};
use lca_core::{Complex64, Mat};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// A complex number as `[re, im]`.
pub type Cx = [f64; 2];
/// Row-major matrix of complex pairs.
pub type JsonMat = Vec<Vec<Cx>>;

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub algebras: BTreeMap<String, AlgebraSpec>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub posets: BTreeMap<String, PosetSpec>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub towers: BTreeMap<String, TowerSpec>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub morphisms: BTreeMap<String, MorphismSpec>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub modules: BTreeMap<String, ModuleSpec>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub module_towers: BTreeMap<String, ModuleTowerSpec>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub representations: BTreeMap<String, RepSpec>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub contexts: BTreeMap<String, ContextSpec>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraSpec {
    pub blocks: Vec<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PosetSpec {
    pub nodes: Vec<String>,
    /// Pairs `[p, q]` with `p ≥ q`.
    #[serde(default)]
    pub order: Vec<[String; 2]>,
    /// Triples `[p, q, r]` declaring `r` an upper bound of `p` and `q`.
    #[serde(default)]
    pub upper_bounds: Vec<[String; 3]>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TowerSpec {
    pub poset: String,
    /// Node name → algebra name.
    pub algebras: BTreeMap<String, String>,
    /// `[p, q, morphism]` for every `p > q`.
    #[serde(default)]
    pub connecting: Vec<[String; 3]>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MorphismSpec {
    /// A linear map between algebras, `dim(target) × dim(source)` on coefficients.
    Star { source: String, target: String, action: JsonMat },
    /// Target block `j` receives source block `picks[j]`.
    BlockProjection { source: String, target: String, picks: Vec<usize> },
    /// `A → L_B(E)`, one `d × d` matrix per basis element of `source`.
    ModuleAction { source: String, module: String, images: Vec<JsonMat> },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModuleSpec {
    /// Flat tensors in the declared index order.
    Tensor { over: String, dim: usize, index_order: IndexOrder, action: JsonMat, inner: JsonMat },
    /// `⊕ ℂ^{m_i × n_i}` with optional weights `H_i`.
    Standard {
        over: String,
        multiplicities: Vec<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        weights: Option<Vec<JsonMat>>,
    },
    OverItself { over: String },
}

/// Index layout of the flat module tensors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IndexOrder {
    /// `action[s', α·d + s]`, `inner[α, s·d + t]`.
    UnitMajor,
    /// `action[s', s·dim(A) + α]`, `inner[s·d + t, α]`.
    VectorMajor,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModuleTowerSpec {
    /// Localize a module over the top node along the tower.
    FromTop { tower: String, module: String },
    Explicit {
        tower: String,
        /// Node → module name.
        modules: BTreeMap<String, String>,
        /// `(p, q)` → `σ_pq` as a `d_q × d_p` matrix.
        connecting: Vec<ConnectingMap>,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConnectingMap {
    pub from: String,
    pub to: String,
    pub map: JsonMat,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepSpec {
    pub algebra: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub images: Option<Vec<JsonMat>>,
    /// `⊕ id^{m_i}` when `images` is absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub multiplicities: Option<Vec<usize>>,
    /// Conjugates by this unitary.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub conjugate: Option<JsonMat>,
    /// Gram eigenvalues kept by an induction; informational.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ContextSpec {
    Induction { action: String, rep: String },
    Stages { phi1: String, phi2: String, rep: String },
    DirectSum { action: String, summands: Vec<String> },
    Remark33 { action: String, rep1: String, rep2: String },
    Remark33Unitary { action: String, target: String, unitary: JsonMat, rep: String },
    Prop34 { atower: String, module_tower: String, action: String, node: String, rep: String },
    /// `iso` names a module action `B → L_A(E)`; recovered from `K_A(E)` when absent.
    Morita {
        module: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        iso: Option<String>,
        #[serde(default)]
        reps: Vec<String>,
    },
    Lemma41 { atower: String, module_tower: String, btower: String, iso: String },
}

impl ContextSpec {
    pub fn property(&self) -> &'static str {
        match self {
            Self::Induction { .. } => "induction",
            Self::Stages { .. } => "stages",
            Self::DirectSum { .. } => "direct-sum",
            Self::Remark33 { .. } | Self::Remark33Unitary { .. } => "remark33",
            Self::Prop34 { .. } => "prop34",
            Self::Morita { .. } => "imprimitivity",
            Self::Lemma41 { .. } => "lemma41",
        }
    }
}

pub fn parse(text: &str) -> Result<InstanceFile, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))
}

pub fn to_mat(m: &JsonMat) -> Result<Mat, CliError> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    if m.iter().any(|r| r.len() != cols) {
        return Err(CliError::Input("ragged matrix".into()));
    }
    let data = m.iter().flatten().map(|&[re, im]| Complex64::new(re, im)).collect();
    CMat::from_row_major(rows, cols, data).map_err(CliError::from)
}

/// Matrix with `rows` rows; empty JSON arrays stand for `rows × 0`.
fn to_mat_rows(m: &JsonMat, rows: usize) -> Result<Mat, CliError> {
    if m.is_empty() && rows > 0 {
        return Err(CliError::Input("empty matrix".into()));
    }
    if m.iter().all(Vec::is_empty) && m.len() == rows {
        return Ok(CMat::zeros(rows, 0));
    }
    to_mat(m)
}

pub fn from_mat(m: &Mat) -> JsonMat {
    (0..m.rows()).map(|i| m.row(i).iter().map(|z| [z.re, z.im]).collect()).collect()
}

/// Every object of a file, constructed but not validated.
#[derive(Clone, Debug, Default)]
pub struct Instance {
    pub file: InstanceFile,
    pub algebras: BTreeMap<String, MatrixStarAlgebra>,
    pub posets: BTreeMap<String, SeminormPoset>,
    pub morphisms: BTreeMap<String, StarMorphism<f64>>,
    pub actions: BTreeMap<String, ModuleAction<f64>>,
    pub towers: BTreeMap<String, AlgebraTower<f64>>,
    pub modules: BTreeMap<String, HilbertModule<f64>>,
    pub module_towers: BTreeMap<String, ModuleTower<f64>>,
    pub reps: BTreeMap<String, Representation<f64>>,
}

fn lookup<'a, V>(map: &'a BTreeMap<String, V>, kind: &str, name: &str) -> Result<&'a V, CliError> {
    map.get(name).ok_or_else(|| CliError::NameNotFound(format!("{kind} '{name}'")))
}

impl Instance {
    pub fn resolve(file: InstanceFile, tol: &Tolerance<f64>) -> Result<Self, CliError> {
        let mut inst = Instance { file: file.clone(), ..Default::default() };
        for (name, a) in &file.algebras {
            inst.algebras.insert(name.clone(), MatrixStarAlgebra::new(a.blocks.clone())?);
        }
        for (name, p) in &file.posets {
            let order: Vec<(String, String)> = p.order.iter().map(|[a, b]| (a.clone(), b.clone())).collect();
            let bounds: Vec<(String, String, String)> =
                p.upper_bounds.iter().map(|[a, b, c]| (a.clone(), b.clone(), c.clone())).collect();
            inst.posets.insert(name.clone(), SeminormPoset::new(&p.nodes, &order, &bounds)?);
        }
        for (name, m) in &file.modules {
            let e = inst.build_module(m)?;
            inst.modules.insert(name.clone(), e);
        }
        for (name, m) in &file.morphisms {
            match m {
                MorphismSpec::Star { source, target, action } => {
                    let (s, t) = (inst.algebra(source)?.clone(), inst.algebra(target)?.clone());
                    let act = to_mat_rows(action, t.dim())?;
                    inst.morphisms.insert(name.clone(), StarMorphism::new(s, t, act)?);
                }
                MorphismSpec::BlockProjection { source, target, picks } => {
                    let (s, t) = (inst.algebra(source)?, inst.algebra(target)?);
                    inst.morphisms.insert(name.clone(), StarMorphism::block_projection(s, t, picks)?);
                }
                MorphismSpec::ModuleAction { source, module, images } => {
                    let s = inst.algebra(source)?.clone();
                    let e = lookup(&inst.modules, "module", module)?.clone();
                    let imgs = images.iter().map(|m| to_mat_rows(m, e.dim())).collect::<Result<_, _>>()?;
                    inst.actions.insert(name.clone(), ModuleAction::new(s, e, imgs)?);
                }
            }
        }
        for (name, t) in &file.towers {
            let poset = lookup(&inst.posets, "poset", &t.poset)?.clone();
            let algebras = t
                .algebras
                .iter()
                .map(|(node, a)| Ok((node.clone(), inst.algebra(a)?.clone())))
                .collect::<Result<BTreeMap<_, _>, CliError>>()?;
            let connecting = t
                .connecting
                .iter()
                .map(|[p, q, m]| Ok(((p.clone(), q.clone()), lookup(&inst.morphisms, "morphism", m)?.clone())))
                .collect::<Result<BTreeMap<_, _>, CliError>>()?;
            inst.towers.insert(name.clone(), AlgebraTower::new(poset, algebras, connecting)?);
        }
        for (name, mt) in &file.module_towers {
            let built = match mt {
                ModuleTowerSpec::FromTop { tower, module } => ModuleTower::from_top(
                    lookup(&inst.towers, "tower", tower)?.clone(),
                    lookup(&inst.modules, "module", module)?.clone(),
                    tol,
                )?,
                ModuleTowerSpec::Explicit { tower, modules, connecting } => {
                    let mods = modules
                        .iter()
                        .map(|(node, m)| Ok((node.clone(), lookup(&inst.modules, "module", m)?.clone())))
                        .collect::<Result<BTreeMap<_, _>, CliError>>()?;
                    let conn = connecting
                        .iter()
                        .map(|c| {
                            let rows = lookup(&mods, "module tower node", &c.to)?.dim();
                            Ok(((c.from.clone(), c.to.clone()), to_mat_rows(&c.map, rows)?))
                        })
                        .collect::<Result<BTreeMap<_, _>, CliError>>()?;
                    ModuleTower::new(lookup(&inst.towers, "tower", tower)?.clone(), mods, conn)?
                }
            };
            inst.module_towers.insert(name.clone(), built);
        }
        for (name, r) in &file.representations {
            let rep = inst.build_rep(r)?;
            inst.reps.insert(name.clone(), rep);
        }
        Ok(inst)
    }

    pub fn algebra(&self, name: &str) -> Result<&MatrixStarAlgebra, CliError> {
        lookup(&self.algebras, "algebra", name)
    }

    pub fn action(&self, name: &str) -> Result<&ModuleAction<f64>, CliError> {
        lookup(&self.actions, "module action", name)
    }

    pub fn rep(&self, name: &str) -> Result<&Representation<f64>, CliError> {
        lookup(&self.reps, "representation", name)
    }

    pub fn module(&self, name: &str) -> Result<&HilbertModule<f64>, CliError> {
        lookup(&self.modules, "module", name)
    }

    pub fn tower(&self, name: &str) -> Result<&AlgebraTower<f64>, CliError> {
        lookup(&self.towers, "tower", name)
    }

    pub fn module_tower(&self, name: &str) -> Result<&ModuleTower<f64>, CliError> {
        lookup(&self.module_towers, "module tower", name)
    }

    pub fn context(&self, name: &str) -> Result<&ContextSpec, CliError> {
        lookup(&self.file.contexts, "context", name)
    }

    fn build_module(&self, m: &ModuleSpec) -> Result<HilbertModule<f64>, CliError> {
        Ok(match m {
            ModuleSpec::Tensor { over, dim, index_order, action, inner } => {
                let a = self.algebra(over)?.clone();
                let (act, inn) = (to_mat_rows(action, *dim)?, to_mat(inner)?);
                match index_order {
                    IndexOrder::UnitMajor => HilbertModule::new(a, *dim, &act, &inn)?,
                    IndexOrder::VectorMajor => {
                        let (n, d) = (a.dim(), *dim);
                        if act.shape() != (d, n * d) || inn.shape() != (d * d, n) {
                            return Err(CliError::Input("module tensor shapes".into()));
                        }
                        let act = CMat::from_fn(d, n * d, |r, c| act[(r, (c % d) * n + c / d)]);
                        HilbertModule::new(a, d, &act, &inn.transpose())?
                    }
                }
            }
            ModuleSpec::Standard { over, multiplicities, weights } => {
                let a = self.algebra(over)?;
                let w = weights.as_ref().map(|ws| ws.iter().map(to_mat).collect::<Result<Vec<_>, _>>()).transpose()?;
                HilbertModule::standard(a, multiplicities, w.as_deref())?
            }
            ModuleSpec::OverItself { over } => HilbertModule::over_itself(self.algebra(over)?),
        })
    }

    fn build_rep(&self, r: &RepSpec) -> Result<Representation<f64>, CliError> {
        let a = self.algebra(&r.algebra)?;
        let rep = match (&r.images, &r.multiplicities) {
            (Some(images), None) => {
                let imgs: Vec<Mat> = images.iter().map(to_mat).collect::<Result<_, _>>()?;
                let h = imgs.first().map_or(0, Mat::rows);
                Representation::new(a.clone(), h, imgs)?
            }
            (None, Some(m)) => Representation::from_multiplicities(a, m)?,
            _ => return Err(CliError::Input("representation needs exactly one of images, multiplicities".into())),
        };
        match &r.conjugate {
            Some(u) => Ok(rep.conjugate(&to_mat(u)?)?),
            None => Ok(rep),
        }
    }
}

pub fn rep_spec(algebra: &str, rep: &Representation<f64>, weights: Option<Vec<f64>>) -> RepSpec {
    RepSpec {
        algebra: algebra.to_string(),
        images: Some(rep.images().iter().map(from_mat).collect()),
        multiplicities: None,
        conjugate: None,
        weights,
    }
}
