//! Asymptotic means and Pólya-type upper/lower functionals of bounded
//! functions and sequences.

pub mod error;
pub mod fnspec;
pub mod identities;
pub mod means;
pub mod par;
pub mod special;
pub mod sublinear;

pub use error::{Error, Result};
pub use fnspec::{DomainTag, FunctionSpec, SequenceSpec, SpecInput};
pub use identities::{IdentityReport, SuiteParams, SuiteSummary};
pub use means::{Criterion, LimitEstimate, MeanKind};
pub use sublinear::{Direction, Functional, SweepConfig, SweepParams, SweepReport};
