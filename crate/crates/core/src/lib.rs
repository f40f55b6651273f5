//! Exact computation of Alexander polynomials, Betti-number growth and
//! torsion growth of infinite cyclic covers, for finitely presented groups,
//! equivariant chain complexes and complex line arrangements.

pub mod arith;
pub mod arrangements;
mod bigjson;
pub mod covers;
pub mod error;
pub mod exactlin;
pub mod fields;
pub mod fox;
pub mod laurent;

pub use arrangements::{LineArrangement, Multinet};
pub use covers::EquivariantComplex;
pub use error::{Error, Result};
pub use exactlin::{IntMatrix, LaurentMatrixZ, Matrix};
pub use fields::{FieldElem, FieldSpec};
pub use fox::{GroupPresentation, OrbifoldData, Word};
pub use laurent::{CanonicalAlexanderRep, LaurentPolyK, LaurentPolyZ};
