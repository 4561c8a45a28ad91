//! Conditioning of the full-column-rank linear least-squares solution.
//!
//! For `x = argmin ‖b − A x‖₂` this crate computes
//!
//! * the condition number with respect to `b`,
//! * the tight lower and upper limits on the condition number with respect
//!   to `A` (they differ by at most √2), and the exact value by maximizing the
//!   nuclear norm of a rank-2 matrix over the unit sphere,
//! * a catalog of condition numbers and error-bound coefficients from the
//!   literature, and how much the classical textbook bound overestimates,
//!
//! and checks all of them against re-solved perturbed problems.
//!
//! ```
//! use llscond::{family::ExampleSpec, lls, conditioning};
//!
//! let ex = ExampleSpec::default().build().unwrap();
//! let s = lls::solve(&ex.problem).unwrap();
//! let g = lls::geometry(&ex.problem, &s);
//! let sc = conditioning::ScaleFactors::relative(&ex.problem, &s);
//! let (lower, upper) = conditioning::chi_a_bounds(&g, &sc);
//! assert!(lower <= upper && upper <= 2f64.sqrt() * lower);
//! ```

pub mod catalog;
pub mod conditioning;
pub mod error;
pub mod family;
pub mod io;
pub mod linalg;
pub mod lls;
pub mod perturb;
pub mod rank2;
pub mod report;

pub use error::{Error, ErrorClass, Result};
pub use linalg::{DenseMatrix, DenseVector};
pub use lls::{build_problem, LlsProblem, LlsSolution};
