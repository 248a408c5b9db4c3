//! Construction and verification of bi-umbilical foliated semi-symmetric
//! hypersurfaces of Euclidean 4-space.
//!
//! The hypersurfaces arise as envelopes of the hyperplane family
//! `<X, l> = r` over a unit isothermal surface `l` in the 3-sphere, with
//! `l` a small round sphere and `r` a four-parameter support function.
//! The crate provides the analytic objects ([`closed_forms`]), the envelope
//! construction with its shape operator ([`envelope`]), pointwise
//! curvature checks ([`curvature`]), and grid solvers for the underlying
//! PDE systems ([`pde`]).

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod closed_forms;
pub mod curvature;
pub mod envelope;
pub mod error;
pub mod grid;
pub mod jet;
pub mod kernel;
pub mod linalg;
pub mod mesh;
pub mod pde;
pub mod scalar;

pub use closed_forms::{CompactForm, ExplicitForm, SolutionParams};
pub use envelope::{EnvelopeMap, HypersurfaceJet, HypersurfaceMap, ShapeData};
pub use error::{GeomError, Result};
pub use grid::{GridField, GridSpec, Stencil};
pub use jet::Jet;
pub use kernel::{Jet2Surface, ScalarJet2, ScalarMap, SurfaceMap, Vec4};
pub use scalar::Scalar;
