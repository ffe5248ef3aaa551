//! Construction and exact verification of C^r conforming finite element and
//! interpolation degrees of freedom on simplices.

pub mod arith;
pub mod continuity;
pub mod dof;
pub mod error;
pub mod fe_element;
pub mod geometry;
pub mod interp_element;
pub mod linalg;
pub mod mesh;
pub mod multiindex;
pub mod partition;
pub mod polynomial;

pub use arith::{Field, PrimeField, Rationals, Q};
pub use continuity::{build_patch, continuity_trials, ContinuityReport, Family, Patch};
pub use dof::{Certificate, Mode, Solver};
pub use error::{Error, Result};
pub use fe_element::FeElement;
pub use geometry::Simplex;
pub use interp_element::InterpElement;
pub use mesh::{parse_mesh, Mesh};
pub use multiindex::{Classification, IndexSet, Kind, MultiIndex, SmoothnessVector};
pub use polynomial::{BaryPoly, CartesianPoly};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
