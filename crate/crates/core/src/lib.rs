//! Leonard triples of q-Racah type, their Bethe ansatz equations, scalar
//! products of Bethe states and determinant formulas for q-Racah polynomials.

pub mod bethe;
pub mod bslinear;
pub mod ddouble;
pub mod error;
pub mod linalg;
pub mod params;
pub mod poly;
pub mod qcalc;
pub mod report;
pub mod scalprod;
pub mod triple;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
pub use params::{Label, ParamSet};
pub use report::{Check, VerifyReport};
