//! Surface models and derived invariants of gentle algebras.
//!
//! The pipeline goes presentation -> dissected surface -> boundary curves and
//! windings -> homology and quadratic form -> invariant record. Surface cut
//! algebras of triangulations get the same treatment in [`surface_cut`].

pub mod curves;
pub mod homology;
pub mod invariants;
pub mod presentation;
pub mod ribbon;
pub mod surface;
pub mod surface_cut;
pub mod tilting;

pub use curves::{boundary_curves, winding, CurveKind, CurvePath};
pub use invariants::{compute_invariants, derived_equivalent, InvariantOptions, InvariantRecord, Verdict};
pub use presentation::{parse_presentation, validate_gentle, Classification, GentlePresentation};
pub use surface::{build_dissected_surface, compute_shape, DissectedSurface};
