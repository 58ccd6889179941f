//! Geometry of the nearly Kähler S³×S³, almost complex surfaces in it, and
//! their correspondence with solutions of the H-surface equation
//! `ε_uu + ε_vv = -(4/√3) ε_u × ε_v`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod csvio;
pub mod diff;
pub mod error;
pub mod examples;
pub mod grid;
pub mod hsystem;
pub mod identities;
pub mod nkspace;
pub mod quat;
pub mod sampling;
pub mod surface;

pub use error::{CorrespondenceError, CsvError, GeometryError, GridError, QuatError};
