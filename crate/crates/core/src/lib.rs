//! Exact special values of Lerch zeta functions and Hecke L-functions of
//! `Q` and real quadratic fields at nonpositive integers, computed from
//! Shintani cone decompositions and the derivatives of their generating
//! functions.

pub mod arith;
pub mod cech;
pub mod checks;
pub mod cli;
pub mod cones;
pub mod cyclotomic;
pub mod error;
pub mod field;
pub mod genfun;
pub mod intmat;
pub mod oracle;
pub mod residue;
pub mod zeta;

pub use cyclotomic::CycNumber;
pub use error::{Error, Result};
pub use field::{FieldElement, FieldSpec, IntegralElement, Sign};
