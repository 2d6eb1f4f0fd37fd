//! Modified Bernstein–Durrmeyer operators on `[0, 1]`.
//!
//! Two engines share one operator description. The exact engine works with
//! rational polynomials and produces moment identities with zero residual.
//! The floating engine evaluates operators on grids for convergence studies,
//! Voronovskaya scans and error-bound checks.
//!
//! ```
//! use durrmeyer_core::{apply, registry, OperatorSpec};
//!
//! let spec = OperatorSpec::m2(10).unwrap();
//! let e2 = registry::get("e2").unwrap();
//! let y = apply(&spec, &e2, 0.5, None).unwrap();
//! assert!((y - (0.25 - 3.0 / 156.0)).abs() < 1e-12);
//! ```

pub mod analysis;
pub mod basis;
pub mod error;
pub mod exactnum;
pub mod moments;
pub mod operators;
pub mod smoothness;

pub use analysis::{
    bound_check, convergence_study, voronovskaya_scan, BoundReport, BoundVerdict,
    ConvergenceReport, Theorem, VoronovskayaReport,
};
pub use error::{Error, Result};
pub use exactnum::{Polynomial, Rational};
pub use moments::errata::{run_errata, ErrataConfig, ErrataEntry, ErrataLedger};
pub use moments::{
    central_moment, component_monomial, operator_monomial, IdentityReport, MomentTable, Verdict,
};
pub use operators::{
    apply, apply_grid, registry, uniform_grid, FunctionSpec, OperatorDescriptor, OperatorKind,
    OperatorSpec, PreparedOperator, SequencePair, Smoothness,
};
pub use smoothness::{dt_modulus, modulus, ModulusEstimate, ModulusKind, ModulusProfile};
