//! Reference symmetric Bethe roots for q = 3, r0 = 1, b = 5, b* = 7, b⋄ = 1/2, s = 1,
//! at printed precision.

use racah_bethe::ParamSet;

pub const REL_TOL: f64 = 5e-4;

pub fn params() -> ParamSet {
    ParamSet::table1()
}

/// Homogeneous roots (ε = +) for N = 0, 1, 2.
pub const HOMOGENEOUS: [&[f64]; 3] = [&[], &[18.5087], &[2.72742, 12.0749]];

/// Inhomogeneous roots (ε = −) for N = 0, 1, 2.
pub const INHOMOGENEOUS: [&[f64]; 3] = [&[3.50405, 11.9071], &[3.208, 12.0789], &[2.01305, 12.1539]];
