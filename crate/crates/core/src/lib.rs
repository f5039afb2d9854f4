//! Hyperbolic amoebas and coamoebas of subvarieties of PSL₂(ℂ).
//!
//! A point of `CP³` is a 2×2 complex matrix up to scale ([`ProjPoint`]); the
//! degenerate matrices form the quadric `Q ≅ CP¹×CP¹`. The amoeba map sends an
//! invertible matrix `A` to the point `AA*/|det A|` of hyperbolic space,
//! modelled here as unimodular positive-definite Hermitian matrices.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod binary;
pub mod curve;
pub mod error;
pub mod export;
pub mod hyperbolic;
pub mod line;
pub mod optim;
pub mod proj;
pub mod sample;
mod serde_ext;
pub mod surface;
pub mod tol;
pub mod tropical;

pub use num_complex::Complex64 as C64;

pub use curve::{RationalCurve, Side, Sym2Point};
pub use error::{Error, Result};
pub use hyperbolic::{AbsPoint, BallPoint, HPoint, PolarCoord, RotationElt};
pub use line::{LineAmoebaClass, PointCloud};
pub use proj::{CP1Point, Line, LineKind, LineQData, ProjPoint, QuadricPoint};
pub use surface::{MembershipResult, Surface};
pub use tol::Tolerances;
pub use tropical::{FloorDiagram, SphericalComplex, TropicalCurveGraph};

/// Library version echoed into reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
