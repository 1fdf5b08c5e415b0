//! Exact arithmetic for λ/μ transitions of modular forms along abelian
//! `p`-extensions of `Q`.

pub mod arith;
pub mod chargroup;
pub mod kida;
pub mod localfactor;
pub mod qexp;
pub mod splitting;
pub mod verify;

pub use kida::{
    compose, transition, InvariantKind, InvariantRecord, KidaError, LocalSource, TransitionInput,
    TransitionReport,
};
pub use localfactor::{LocalCharData, LocalError, LocalType};
pub use qexp::{EllipticCurve, ModularFormData, QexpError};
pub use splitting::{AbelianField, SplittingError};
pub use verify::{run_suite, Suite, SuiteReport};
