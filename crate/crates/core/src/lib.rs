//! Certification of zero subsets of holomorphic functions with a growth bound
//! `ln|f| <= M` for a δ-subharmonic majorant `M = M_up - M_low`.
//!
//! The crate is organized bottom-up:
//!
//! * [`measures`]: point distributions, counting functions, Riesz charges;
//! * [`majorants`]: subharmonic models with exact Riesz charges;
//! * [`means`]: radius profiles and circle/disk/mollified integral means;
//! * [`jensen`]: Jensen measures, their potentials, Poisson–Jensen, disk Green functions;
//! * [`testfam`]: test-function families for the plane and disk regimes;
//! * [`necessary`]: margin sweeps over test families, the growth regularity
//!   check on `M_up`, and the disk constants used by the margin inequality;
//! * [`construct`]: Weierstrass products and the pointwise sufficiency check;
//! * [`scenario`]: JSON scenarios and report files behind the `zerocert` CLI.

pub mod circle;
pub mod construct;
pub mod error;
pub mod exec;
pub mod field;
pub mod geometry;
pub mod jensen;
pub mod majorants;
pub mod means;
pub mod measures;
pub mod necessary;
pub mod poly;
pub mod quadrature;
pub mod scenario;
pub mod testfam;

pub use error::{Error, Result};
pub use exec::Execution;
pub use field::Field;
pub use geometry::Region;
pub use measures::{Count, Extended, Generator, RieszCharge, ZeroDistribution};
pub use num_complex::Complex64;
