//! Satisfiability, finite-model extraction and certificate checking for the
//! quasi-dense modal logics `K_KL`, where each pair `(k, l)` with `k < l`
//! demands `R^k ⊆ R^l` of the frame.
//!
//! [`solver::decide`] runs a labeled tableau whose termination comes from
//! path-signature blocking, quotients the open branch by path-filtration and
//! re-checks the quotient with [`kripke::check_model`] before answering.

pub mod filtration;
pub mod formula;
pub mod kripke;
pub mod oracle;
pub mod solver;
pub mod tableau;

pub use filtration::{build_filtrated, FiltratedModel, PathSignature};
pub use formula::{parse, Formula, FormulaSet, ParseError, TargetFormula};
pub use kripke::{check_model, CertificateReport, KLSpec, KlSpecError, KripkeError, PointedModel};
pub use oracle::{enumerate_models, SearchBound, SearchResult};
pub use solver::{decide, verify_certificate, SolverConfig, Verdict};
pub use tableau::{saturate, SaturationResult, TableauConfig};
