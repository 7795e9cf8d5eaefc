//! Inscriptions of cyclic quadrilaterals in smooth Jordan curves.
//!
//! A cyclic quadrilateral with parameters `(s, t, phi)` inscribes in a curve
//! `gamma` exactly when four curve points `A, B, C, D` satisfy
//! `R_phi F_s (A, C) = F_t (B, D)` with `A != C`. [`solver`] finds such points
//! by multistart Newton iteration; [`maslov`] computes the Maslov indices of
//! the Lagrangian tori `R_phi F_s (gamma x gamma)` and `F_t (gamma x gamma)`.
//!
//! Everything is generic over [`Scalar`] (`f32` or `f64`); the aliases below
//! fix `f64`, which the default solver tolerances assume.

pub mod curve;
pub mod linalg;
pub mod maslov;
pub mod quadrilateral;
pub mod scalar;
pub mod solver;
pub mod winding;

pub use curve::{CurveError, CurveFileError, CurveKind, CurveSample, FourierCurve, ValidationOptions, ValidityReport};
pub use maslov::{FormWeights, LagrangianLoop, LagrangianPlane, MaslovError, TorusMap};
pub use quadrilateral::{ComplexPair, CyclicQuadParams, QuadError, QuadVertices};
pub use scalar::Scalar;
pub use solver::{Inscription, InscriptionProblem, RefineFailure, SolveDiagnostics, SolveReport, SolverError, SolverOptions};
pub use winding::WindingError;

pub use num_complex::Complex;

pub type Complex64 = Complex<f64>;
pub type Curve = FourierCurve<f64>;
pub type Curve32 = FourierCurve<f32>;
pub type Params = CyclicQuadParams<f64>;
pub type Params32 = CyclicQuadParams<f32>;
pub type Vertices = QuadVertices<f64>;
pub type Problem = InscriptionProblem<f64>;
pub type Options = SolverOptions<f64>;
pub type Solution = Inscription<f64>;
pub type Plane = LagrangianPlane<f64>;
pub type Loop = LagrangianLoop<f64>;
pub type Weights = FormWeights<f64>;
