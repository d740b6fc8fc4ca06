//! Periods of 1-motives `[u: Z^r -> G]` where `G` is an extension of a product
//! of elliptic curves by a torus, together with the exact dimension of their
//! motivic Galois groups.
//!
//! The crate is organised bottom-up:
//!
//! - [`lattice`]: period lattices, argument reduction, Eisenstein invariants
//!   and recovery of a lattice from `(g2, g3)`.
//! - [`weierstrass`]: `℘`, `℘'`, `ζ`, `σ`, quasi-periods, elliptic exp/log.
//! - [`third_kind`]: Serre's function `f_q`, third-kind quasi-periods and the
//!   semi-abelian exponential.
//! - [`quadrature`]: adaptive contour integration of the pulled-back forms,
//!   used as an independent oracle for every closed-form period.
//! - [`motive`]: the 1-motive data model and its period matrices.
//! - [`field`], [`rank`], [`galois`]: exact arithmetic over `Q` and imaginary
//!   quadratic fields, the rank engine, and the Galois dimension formulas.
//! - [`schema`]: JSON input schemas and deterministic output formatting.
//! - [`verify`]: reusable verification suites.
//!
//! ```
//! use motive_periods::lattice::curve_from_invariants;
//! use motive_periods::motive::{full_period_matrix, OneMotiveSpec};
//! use motive_periods::{C64, TWO_PI_I};
//!
//! let e = curve_from_invariants(C64::new(1.2, -0.7), C64::new(0.4, 0.3))?;
//! let m = OneMotiveSpec::new(
//!     1, 1, vec![e],
//!     vec![vec![C64::new(0.31, 0.22)]],
//!     vec![vec![C64::new(-0.4, 0.35)]],
//!     vec![vec![vec![C64::new(0.1, 0.2)]]],
//!     vec![],
//! )?;
//! let pm = full_period_matrix(&m)?;
//! let det = pm.determinant();
//! assert!((det.norm() - TWO_PI_I.norm().powi(2)).abs() < 1e-9);
//! # Ok::<(), motive_periods::Error>(())
//! ```

pub mod error;
pub mod field;
pub mod galois;
pub mod lattice;
pub mod motive;
pub mod quadrature;
pub mod rank;
pub mod schema;
pub mod third_kind;
pub mod verify;
pub mod weierstrass;

mod theta;

pub use error::{Error, Result};
pub use lattice::{
    curve_from_invariants, invariants_from_periods, reduce_mod_lattice, CmDescriptor, CurveData,
    LatticeBasis,
};
pub use num_complex::Complex64 as C64;

/// `2πi`.
pub const TWO_PI_I: C64 = C64::new(0.0, 2.0 * std::f64::consts::PI);
