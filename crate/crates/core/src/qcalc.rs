//! q-calculus primitives and q-Racah polynomials.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::params::{Label, ParamSet};

/// Relative size below which a denominator factor counts as zero.
const ZERO_TOL: f64 = 1e-13;

/// b(x) = x − 1/x.
pub fn bfun(x: C64) -> Result<C64> {
    if x.norm() == 0.0 {
        return Err(Error::Domain("b(x) undefined at x = 0".into()));
    }
    Ok(b(x))
}

#[inline]
pub(crate) fn b(x: C64) -> C64 {
    x - x.inv()
}

/// [n]_q = (qⁿ − q⁻ⁿ)/(q − q⁻¹).
pub fn qnum(n: i32, q: C64) -> Result<C64> {
    if q.norm() == 0.0 || (q - 1.0).norm() < ZERO_TOL || (q + 1.0).norm() < ZERO_TOL {
        return Err(Error::Domain("q must not be 0 or ±1".into()));
    }
    Ok(qn(n, q))
}

#[inline]
pub(crate) fn qn(n: i32, q: C64) -> C64 {
    (q.powi(n) - q.powi(-n)) / (q - q.inv())
}

/// (a; q2)_n = ∏_{k<n} (1 − a q2^k).
pub fn qpoch(a: C64, q2: C64, n: usize) -> C64 {
    let mut r = C64::new(1.0, 0.0);
    let mut t = a;
    for _ in 0..n {
        r *= 1.0 - t;
        t *= q2;
    }
    r
}

/// (a1, a2, …; q2)_n.
pub fn qpoch_multi(a: &[C64], q2: C64, n: usize) -> C64 {
    a.iter().map(|&x| qpoch(x, q2, n)).product()
}

fn vanishes(f: C64, scale: f64) -> bool {
    f.norm() <= ZERO_TOL * scale.max(1.0)
}

/// Terminating ₄φ₃ with first numerator q2^{-n}:
/// Σ_{k=0}^{n} (q2^{-n}, a1, a2, a3; q2)_k / (d1, d2, d3, q2; q2)_k z^k.
///
/// The termination is structural: `n` is passed as an integer and the numerator
/// q2^{-n} is generated internally.
pub fn phi43_terminating(n: usize, upper: [C64; 3], lower: [C64; 3], q2: C64, z: C64) -> Result<C64> {
    let mut term = C64::new(1.0, 0.0);
    let mut terms = Vec::with_capacity(n + 1);
    terms.push(term);
    for k in 0..n {
        let q2k = q2.powi(k as i32);
        let mut num = 1.0 - q2.powi(k as i32 - n as i32);
        for a in upper {
            num *= 1.0 - a * q2k;
        }
        let mut den = 1.0 - q2k * q2;
        if vanishes(den, 1.0) {
            return Err(Error::SingularSeries { term: k + 1 });
        }
        for d in lower {
            let f = 1.0 - d * q2k;
            if vanishes(f, (d * q2k).norm()) {
                return Err(Error::SingularSeries { term: k + 1 });
            }
            den *= f;
        }
        term *= num / den * z;
        terms.push(term);
    }
    Ok(accumulate(terms))
}

fn check_cyclic(a: Label, b: Label, c: Label) -> Result<()> {
    if a == b || b == c || a == c || !Label::is_cyclic(a, b, c) {
        return Err(Error::Domain(format!(
            "labels ({a},{b},{c}) are not a cyclic ordering"
        )));
    }
    Ok(())
}

fn check_index(p: &ParamSet, m: usize) -> Result<()> {
    if m > p.two_s() {
        return Err(Error::Domain(format!("index {m} exceeds 2s = {}", p.two_s())));
    }
    Ok(())
}

/// R^{a,c}_M(θ^b_N), with b the label completing (a, b, c) to a cyclic ordering.
pub fn racah_eval(p: &ParamSet, a: Label, c: Label, m: usize, n: usize) -> Result<C64> {
    if a == c {
        return Err(Error::Domain("racah_eval needs two distinct labels".into()));
    }
    let b = Label::third(a, c);
    check_cyclic(a, b, c)?;
    check_index(p, m)?;
    check_index(p, n)?;
    p.check_conditions()?;
    racah_unchecked(p, a, b, c, m, n)
}

pub(crate) fn racah_unchecked(p: &ParamSet, a: Label, b: Label, c: Label, m: usize, n: usize) -> Result<C64> {
    let o = p.ordered(a, b, c);
    let q = o.q;
    let q2 = q * q;
    let (m_i, n_i) = (m as i32, n as i32);
    let (ra, rb) = (o.ba / o.ca, o.bb / o.cb);
    // pick the shorter of the two terminating numerators
    let (k, other) = if m <= n {
        (m, [ra * q.powi(2 * m_i), q.powi(-2 * n_i), rb * q.powi(2 * n_i)])
    } else {
        (n, [q.powi(-2 * m_i), ra * q.powi(2 * m_i), rb * q.powi(2 * n_i)])
    };
    let lower = [
        -o.ba * o.cc / o.cb * o.r0 * q,
        -o.bb * o.bc / o.ca * o.r0 * q.powi(2 * o.n + 1),
        q.powi(-2 * o.n),
    ];
    phi43_terminating(k, other, lower, q2, q2)
}

fn degenerate_den(what: &str) -> Error {
    Error::degenerate("(ii)", format!("vanishing denominator in {what}"))
}

/// k^{a,b,c}_N. Anti-cyclic orderings use the reversed c-scalars.
pub fn k_coeff(p: &ParamSet, a: Label, b: Label, c: Label, n: usize) -> Result<C64> {
    check_index(p, n)?;
    let o = p.ordered(a, b, c);
    let q = o.q;
    let q2 = q * q;
    let s4 = 2 * o.n;
    let rb = o.bb / o.cb;
    let num = qpoch_multi(
        &[
            -o.bb * o.bc / o.ca * o.r0 * q.powi(s4 + 1),
            -o.ba * o.cc / o.cb * o.r0 * q,
            rb,
            q.powi(-s4),
        ],
        q2,
        n,
    );
    let den = qpoch_multi(
        &[
            q2,
            -o.bb * o.bc / o.ba * o.r0 * q,
            -o.ca * o.cc / o.cb * o.r0 * q.powi(1 - s4),
            rb * q.powi(s4 + 2),
        ],
        q2,
        n,
    ) * (o.ba / o.ca).powi(n as i32)
        * (1.0 - rb);
    if vanishes(den, 0.0) {
        return Err(degenerate_den("k coefficient"));
    }
    Ok(num * (1.0 - rb * q.powi(4 * n as i32)) / den)
}

/// ν₀^{a,b,c}.
pub fn nu0_coeff(p: &ParamSet, a: Label, b: Label, c: Label) -> Result<C64> {
    let o = p.ordered(a, b, c);
    let q = o.q;
    let q2 = q * q;
    let n = o.n as usize;
    let s4 = 2 * o.n;
    let num = qpoch(o.ba / o.ca * q2, q2, n) * qpoch(o.bb / o.cb * q2, q2, n);
    let den = (-o.bb * o.bc / o.ca * o.r0 * q.powi(s4 + 1)).powi(o.n)
        * qpoch(-o.ba * o.cc / o.bb * o.r0 * q.powi(1 - s4), q2, n)
        * qpoch(-o.ca * o.cc / o.cb * o.r0 * q.powi(1 - s4), q2, n);
    if vanishes(den, 0.0) {
        return Err(degenerate_den("nu0"));
    }
    Ok(num / den)
}

/// Both sides of the terminating orthogonality identity for the cyclic ordering
/// starting at `a`. Returns (sum over M = 0..2s, closed product).
pub fn orthogonality_sides(p: &ParamSet, a: Label) -> (C64, C64) {
    let (b, c) = (a.next(), a.next().next());
    let o = p.ordered(a, b, c);
    let q = o.q;
    let q2 = q * q;
    let s4 = 2 * o.n;
    let rb = o.bb / o.cb;
    let up = [-q * o.r0 * o.ba * o.bc / o.cb * q.powi(s4), rb, q.powi(-s4)];
    let lo = [
        -o.bb / (q * o.r0 * o.ba * o.bc) * q.powi(2 - s4),
        rb * q.powi(s4 + 2),
        q2,
    ];
    let x = o.r0 * o.ba * o.bc / (q * o.bb);
    let terms = (0..=o.n as usize).map(|m| {
        let mi = m as i32;
        qpoch_multi(&up, q2, m) / qpoch_multi(&lo, q2, m) * (1.0 - rb * q.powi(4 * mi))
            / ((1.0 - rb) * x.powi(mi))
            * q.powi(mi * (mi - 1))
    });
    let lhs = accumulate(terms);
    let rhs = qpoch(q2 * o.r0 * o.r0 * o.bb * o.bb, q2, o.n as usize)
        / qpoch(-q.powi(1 - s4) * o.bb / (o.r0 * o.ba * o.bc), q2, o.n as usize);
    (lhs, rhs)
}

#[cfg(feature = "extended-precision")]
pub(crate) fn accumulate(terms: impl IntoIterator<Item = C64>) -> C64 {
    crate::ddouble::sum_c(terms)
}

#[cfg(not(feature = "extended-precision"))]
pub(crate) fn accumulate(terms: impl IntoIterator<Item = C64>) -> C64 {
    terms.into_iter().sum()
}
