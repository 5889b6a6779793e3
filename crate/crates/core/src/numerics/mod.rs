//! Shared types and primitives: rational slopes, closed-form signals,
//! Gauss-Legendre quadrature, sampled traces, reports and tolerances.

pub mod quadrature;
pub mod report;
pub mod signal;
pub mod slope;
pub mod tolerance;
pub mod trace;

pub use quadrature::{quad_integrate, GaussLegendre, Integrator, QuadratureSpec};
pub use report::{ReportBundle, VerificationReport};
pub use signal::{l2_norm, signal_norm, DecayModel, LatticePiece, LatticeSeries, SignalExpr};
pub use slope::RationalSlope;
pub use tolerance::Tolerances;
pub use trace::{Grid, SampledTrace};
