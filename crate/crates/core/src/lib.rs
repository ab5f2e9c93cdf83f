//! High-precision laboratory for the convergence of near-diagonal Padé
//! approximants: logarithmic test functions with branch points, branch-cut
//! portraits, Chebotarev-point blocking, convergence rates, and a minimal
//! holomorphic-embedding power-flow solver.

pub mod cut;
pub mod export;
pub mod hem;
pub mod kernel;
pub mod pade;
pub mod roots;
pub mod series;

pub use kernel::{BigComplex, PrecisionContext};
pub use pade::PadeApproximant;
pub use series::{ExpansionPoint, LogRatioSpec, PowerSeries};
