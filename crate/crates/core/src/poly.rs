//! Monic interpolation through values known up to scale, and polynomial roots.

use num_complex::Complex64 as C64;

use crate::ddouble::Cdd;
use crate::error::{Error, Result};
use crate::linalg::{eigenvalues, CMat};

/// Residual above which roots are refined in double-double.
const RETRY_RESIDUAL: f64 = 1e-6;

/// Coefficients c_0..c_d (ascending, c_d = 1) of the unique monic polynomial p of
/// degree d = nodes.len() − 1 with p(x_i) = λ·v_i for some common λ.
pub fn monic_interpolate(nodes: &[C64], values: &[C64]) -> Result<Vec<C64>> {
    assert_eq!(nodes.len(), values.len());
    let n = nodes.len();
    let scale = nodes.iter().map(|x| x.norm()).fold(0.0, f64::max).max(1.0);
    for i in 0..n {
        for j in 0..i {
            if (nodes[i] - nodes[j]).norm() <= 1e-12 * scale {
                return Err(Error::InterpolationDegenerate);
            }
        }
    }
    // Newton divided differences, in place
    let mut dd = values.to_vec();
    for k in 1..n {
        for i in (k..n).rev() {
            dd[i] = (dd[i] - dd[i - 1]) / (nodes[i] - nodes[i - k]);
        }
    }
    let lead = dd[n - 1];
    let vscale = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if lead.norm() <= 1e-14 * vscale / scale.powi(n as i32 - 1) {
        return Err(Error::RootExtractionFailure { residual: f64::INFINITY });
    }
    // Horner-style expansion of the Newton form
    let mut c = vec![C64::new(0.0, 0.0); n];
    c[0] = dd[n - 1];
    for (deg, k) in (0..n - 1).rev().enumerate() {
        // c ← c·(x − x_k) + dd[k]
        for i in (0..=deg).rev() {
            let ci = c[i];
            c[i + 1] += ci;
            c[i] = -ci * nodes[k];
        }
        c[0] += dd[k];
    }
    Ok(c.into_iter().map(|z| z / lead).collect())
}

/// Evaluates the polynomial and Σ|c_k||x|^k (used to normalize residuals).
pub fn eval(c: &[C64], x: C64) -> (C64, f64) {
    let mut v = C64::new(0.0, 0.0);
    let mut s = 0.0;
    for ck in c.iter().rev() {
        v = v * x + ck;
        s = s * x.norm() + ck.norm();
    }
    (v, s)
}

fn eval_deriv(c: &[C64], x: C64) -> (C64, C64) {
    let mut v = C64::new(0.0, 0.0);
    let mut d = C64::new(0.0, 0.0);
    for ck in c.iter().rev() {
        d = d * x + v;
        v = v * x + ck;
    }
    (v, d)
}

fn eval_dd(c: &[C64], x: C64) -> C64 {
    let xd = Cdd::new(x);
    let mut v = Cdd::default();
    for ck in c.iter().rev() {
        v = v * xd + Cdd::new(*ck);
    }
    v.to_c64()
}

fn polish(c: &[C64], mut x: C64, extended: bool) -> C64 {
    for _ in 0..50 {
        let (v, d) = eval_deriv(c, x);
        let v = if extended { eval_dd(c, x) } else { v };
        if d.norm() == 0.0 {
            break;
        }
        let step = v / d;
        x -= step;
        if step.norm() <= 1e-17 * x.norm().max(1e-300) {
            break;
        }
    }
    x
}

fn rel_residual(c: &[C64], x: C64) -> f64 {
    let (v, s) = eval(c, x);
    v.norm() / s.max(f64::MIN_POSITIVE)
}

/// Roots of a monic polynomial with ascending coefficients, via the companion
/// matrix and Newton polishing.
pub fn roots(c: &[C64]) -> Result<Vec<C64>> {
    let d = c.len() - 1;
    if d == 0 {
        return Ok(vec![]);
    }
    let lead = c[d];
    let c: Vec<C64> = c.iter().map(|z| z / lead).collect();
    let mut comp = CMat::zeros(d, d);
    for i in 1..d {
        comp[(i, i - 1)] = C64::new(1.0, 0.0);
    }
    for i in 0..d {
        comp[(i, d - 1)] = -c[i];
    }
    let mut out = Vec::with_capacity(d);
    let mut worst: f64 = 0.0;
    for z in eigenvalues(&comp) {
        let mut r = polish(&c, z, false);
        if rel_residual(&c, r) > RETRY_RESIDUAL {
            r = polish(&c, z, true);
        }
        worst = worst.max(rel_residual(&c, r));
        out.push(r);
    }
    if worst > RETRY_RESIDUAL || out.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::RootExtractionFailure { residual: worst });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn recovers_monic_from_scaled_values() {
        // p(x) = (x − 2)(x + 1) = x² − x − 2, values scaled by 3i
        let nodes = [c(0.0), c(1.0), c(5.0)];
        let lam = C64::new(0.0, 3.0);
        let vals: Vec<C64> = nodes.iter().map(|&x| lam * (x * x - x - 2.0)).collect();
        let co = monic_interpolate(&nodes, &vals).unwrap();
        for (a, b) in co.iter().zip([c(-2.0), c(-1.0), c(1.0)]) {
            assert!((a - b).norm() < 1e-12);
        }
        let mut r: Vec<f64> = roots(&co).unwrap().iter().map(|z| z.re).collect();
        r.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((r[0] + 1.0).abs() < 1e-12 && (r[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn colliding_nodes() {
        let e = monic_interpolate(&[c(1.0), c(1.0)], &[c(1.0), c(2.0)]);
        assert_eq!(e, Err(Error::InterpolationDegenerate));
    }
}
