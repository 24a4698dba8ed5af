//! Locally C*-algebras modeled as finite inverse systems of matrix *-algebras,
//! Hilbert C*-modules over them, Rieffel induction and strong Morita
//! equivalence, with numerical verification of the induction theorems.

pub mod algebra;
pub mod bundled;
mod error;
pub mod induction;
pub mod linalg;
pub mod module;
pub mod morita;
pub mod random;
pub mod rep;
pub mod scalar;
pub mod structure;
pub mod tower;

pub use error::{Error, Result};

/// Complex scalar at double precision.
pub type Complex64 = scalar::C<f64>;
pub type Mat = linalg::CMat<f64>;
pub type Tol = linalg::Tolerance<f64>;
pub type Element = algebra::AlgElem<f64>;
pub type Morphism = algebra::StarMorphism<f64>;
pub type Rep = rep::Representation<f64>;
pub type Module = module::HilbertModule<f64>;
pub type Action = module::ModuleAction<f64>;
pub type Tower = tower::AlgebraTower<f64>;
pub type ModTower = module::ModuleTower<f64>;
pub type Context = morita::MoritaContext<f64>;
