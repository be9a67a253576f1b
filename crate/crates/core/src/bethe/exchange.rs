//! Coefficient functions of the dynamical exchange relations.

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qcalc::b;

/// γ^ε(u, m) = α^{(1−ε)/2} β^{(1+ε)/2} q^{−m} u − α^{(1+ε)/2} β^{(1−ε)/2} q^m u⁻¹.
pub fn gamma(q: C64, alpha: C64, beta: C64, eps: i32, u: C64, m: i32) -> C64 {
    let (lo, hi) = if eps > 0 { (beta, alpha) } else { (alpha, beta) };
    lo * q.powi(-m) * u - hi * q.powi(m) / u
}

/// f(u,v) = b(qv/u) b(uv) / (b(v/u) b(quv)).
pub fn f(q: C64, u: C64, v: C64) -> C64 {
    b(q * v / u) * b(u * v) / (b(v / u) * b(q * u * v))
}

/// h(u,v) = b(q²uv) b(qu/v) / (b(quv) b(u/v)).
pub fn h(q: C64, u: C64, v: C64) -> C64 {
    b(q * q * u * v) * b(q * u / v) / (b(q * u * v) * b(u / v))
}

/// All exchange coefficients at one point.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ExchangeCoeffs {
    pub f: C64,
    pub h: C64,
    pub g: C64,
    pub w: C64,
    pub k: C64,
    pub n: C64,
    pub qc: C64,
    pub r: C64,
    pub sc: C64,
    pub x: C64,
    pub y: C64,
    pub z: C64,
    pub gamma: C64,
}

/// Evaluates the exchange coefficients at (u, v, m). `gamma` holds γ^ε(u, m).
pub fn exchange_coeffs(
    q: C64,
    alpha: C64,
    beta: C64,
    eps: i32,
    u: C64,
    v: C64,
    m: i32,
) -> Result<ExchangeCoeffs> {
    if u.norm() == 0.0 || v.norm() == 0.0 {
        return Err(Error::Domain("exchange coefficients need u, v ≠ 0".into()));
    }
    let ga = |x: C64, k: i32| gamma(q, alpha, beta, eps, x, k);
    let g1 = ga(C64::new(1.0, 0.0), m + 1);
    let poles = [
        ("b(u/v)", b(u / v)),
        ("b(quv)", b(q * u * v)),
        ("b(qu²)", b(q * u * u)),
        ("b(qv²)", b(q * v * v)),
        ("γ(1,m+1)", g1),
    ];
    for (name, val) in poles {
        if val.norm() <= 1e-14 {
            return Err(Error::Domain(format!("pole of the exchange coefficients: {name} = 0")));
        }
    }
    let bq = b(q);
    let (bu2, bv2) = (b(u * u), b(v * v));
    let (bqu2, bqv2) = (b(q * u * u), b(q * v * v));
    let bquv = b(q * u * v);
    Ok(ExchangeCoeffs {
        f: f(q, u, v),
        h: h(q, u, v),
        g: ga(u / v, m + 1) / g1 * bq * bv2 / (bqv2 * b(u / v)),
        w: -ga(u * v, m) / g1 * bq / bquv,
        k: ga(v / u, m + 1) / g1 * bq * b(q * q * u * u) / (bqu2 * b(v / u)),
        n: ga(1.0 / (u * v), m + 2) / g1 * bq * bv2 * b(q * q * u * u) / (bqu2 * bqv2 * bquv),
        qc: ga(u / v, m) * bq * b(u * v) / (g1 * b(u / v) * bquv),
        r: bq * bu2 * ga(C64::new(1.0, 0.0), m) * ga(v / u, m + 1) / (g1 * g1 * bqu2 * b(v / u)),
        sc: bq * bq * bu2 * ga(1.0 / (v * v), m + 1) * ga(v / u, m + 1)
            / (g1 * g1 * bqu2 * bqv2 * b(v / u)),
        x: bq * bu2 * b(q * u / v) * ga(1.0 / (u * v), m + 1) / (g1 * bqu2 * b(u / v) * bquv),
        y: -bq * bq * ga(1.0 / (v * v), m + 1) * ga(u * v, m) / (g1 * g1 * bqv2 * bquv),
        z: -bq * ga(C64::new(1.0, 0.0), m) * ga(u * v, m) / (g1 * g1 * bquv),
        gamma: ga(u, m),
    })
}
