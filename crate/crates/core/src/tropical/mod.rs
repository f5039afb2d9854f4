//! Tropical curves in `Rⁿ`, floor diagrams in the ball, and the convergence check for rescaled amoebas.

pub mod converge;
pub mod floor;
pub mod graph;
pub mod hausdorff;
pub mod theta;

pub use converge::{kappa_convergence_check, pencil_family, ConvergenceReport};
pub use floor::{FloorDiagram, FloorEdge, FloorRule, FloorVertex, FloorViolation};
pub use graph::{
    build_psi, log_t, trop_limit, EdgeCircle, GraphRule, GraphViolation, PsiPoint, PsiSampler, TropicalCurveGraph,
    TropicalEdge, TropicalVertex,
};
pub use hausdorff::{directed_hausdorff, hausdorff};
pub use theta::{ball_radius, build_theta, Piece, SphericalComplex, TaggedCloud};
