//! Exact-arithmetic toolkit for the global determinant method on projective
//! hypersurfaces.
//!
//! The crate enumerates rational points of bounded naive height, builds
//! auxiliary integer forms that vanish on all of them without being
//! divisible by the defining form, and checks the determinant divisibility
//! and small-solution bounds the construction depends on.
//!
//! Module map:
//!
//! * [`forms`]: sparse homogeneous integer polynomials and their reductions mod p.
//! * [`points`]: projective points, height enumeration, residues mod p.
//! * [`exactla`]: exact integer linear algebra (Bareiss, Hermite, Smith, kernels).
//! * [`detmethod`]: monomial bases, evaluation matrices, p-adic cluster bounds.
//! * [`coords`]: the unimodular change of coordinates making `c_f` large.
//! * [`auxpoly`]: the auxiliary form construction and its audit.
//! * [`cli`]: command implementations behind the `detkit` binary.

pub mod arith;
pub mod auxpoly;
pub mod cli;
pub mod coords;
pub mod detmethod;
pub mod exactla;
pub mod forms;
pub mod points;

pub use auxpoly::{construct, AuxResult, ConstructError, ConstructOptions};
pub use coords::{normalize, BoundConstants};
pub use exactla::IntMatrix;
pub use forms::{Form, FormError, Monomial};
pub use points::{enumerate_points, ProjPoint};
