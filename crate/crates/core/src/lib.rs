//! Exact calculus of locally abelian parabolic bundles on marked curves, the parabolic
//! Gunning bundle and its symmetric powers, and a numerical lab for Fuchsian systems.

pub mod bundle;
pub mod curve;
pub mod error;
pub mod fuchsian;
pub mod jet;
pub mod oper;
pub mod orbifold;
pub mod rational;

pub use bundle::{ConnectionReport, FlagRow, LocallyAbelianBundle};
pub use curve::{Coordinate, MarkedCurve, MarkedPoint};
pub use error::{Error, Result};
pub use oper::{OperFiltration, TransversalityReport};
pub use orbifold::{Expr, OracleReport, OrbifoldBundle, OrbifoldLine};
pub use rational::Rational;
