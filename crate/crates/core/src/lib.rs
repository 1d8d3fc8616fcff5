//! Numerical radii, Lipschitz norms and numerical-index estimates for linear
//! and continuous piecewise-linear operators on finite-dimensional normed spaces.

pub mod error;
pub mod index;
pub mod io;
pub mod linalg;
pub mod linop;
pub mod lipop;
mod lp;
pub mod maps;
pub mod constructions;
mod search;
pub mod spaces;

pub use error::{Error, Result};
pub use linop::{AlphaGrid, LinearOperator, NormBracket, RadiusBracket, UpperMethod, Witness};
pub use spaces::{parse_space, DualitySet, Field, Matrix, NormedSpace, SumKind, Vector, C64};
pub use lipop::{Cell, Derivative, PwlOperator, ValidationReport};
pub use maps::{LipschitzCallable, LipschitzMap};
pub use index::{estimate_index, IndexEstimate, Mode, Operator, VerificationReport};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
