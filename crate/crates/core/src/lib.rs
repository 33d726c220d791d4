//! Random walks on Gromov-hyperbolic spaces.
//!
//! Two backends implement the [`PointedAction`] contract: the free group
//! acting on its Cayley tree ([`FreeGroup`]) and `SL(2, ℝ)` acting on the
//! hyperbolic plane ([`HyperbolicPlane`]). On top of them sit a Monte Carlo
//! walk engine, exact laws for the simple random walk on free groups,
//! large-deviation rate-function tooling, Schottky-set certification and
//! tail/harmonic-measure probes.

pub mod error;
pub mod exact;
pub mod free_group;
pub mod ldp;
pub mod scalar;
pub mod schottky;
pub mod sl2;
pub mod space;
pub mod stats;
pub mod tails;
pub mod walk;

pub use error::{Error, Result};
pub use free_group::{FreeGroup, Letter, Word};
pub use scalar::{log_add, log_sum_exp, Real, Weight};
pub use sl2::{DiscPoint, HyperbolicPlane, MobiusElement, PlanePoint};
pub use schottky::SchottkyCertificate;
pub use space::{gromov_product, shadow_contains, stable_length, Length, PointedAction};
pub use tails::{CylinderEstimate, PowerLawFit};

/// Double-precision Möbius element.
pub type Mobius = MobiusElement<f64>;
/// Double-precision disc point.
pub type Disc = DiscPoint<f64>;
/// Double-precision hyperbolic plane.
pub type Plane = HyperbolicPlane<f64>;
