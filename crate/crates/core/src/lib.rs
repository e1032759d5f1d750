//! Landau and Grüss type inequalities for inner product type transformers on
//! finite operator fields.

pub mod campaign;
pub mod chebyshev;
pub mod error;
pub mod exec;
pub mod fields;
pub mod generators;
pub mod inequalities;
pub mod linalg;
pub mod norms;
pub mod transformers;

pub use error::{Error, Result};
pub use fields::{Atom, Half, OperatorField, Side, StarPattern};
pub use inequalities::{CheckOptions, InequalityReport, Mode, Tolerances};
pub use linalg::{Operator, SingularSpectrum, C64};
pub use norms::{GaugeSpec, ProbeSet};
pub use transformers::TransformerPair;
