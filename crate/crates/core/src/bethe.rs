//! Bethe ansatz equations of homogeneous and inhomogeneous type, and a
//! multistart solver in the symmetric variables U = (qu² + q⁻¹u⁻²)/(q + q⁻¹).

pub mod exchange;

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{solve, CMat, CVec};
use crate::params::{Label, ParamSet};
use crate::qcalc::{b, qn};

/// Sign ε of the Bethe states and equations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "i8", try_from = "i8")]
pub enum Epsilon {
    Minus,
    Plus,
}

impl Epsilon {
    pub const BOTH: [Epsilon; 2] = [Epsilon::Minus, Epsilon::Plus];

    pub fn sign(self) -> i32 {
        match self {
            Epsilon::Minus => -1,
            Epsilon::Plus => 1,
        }
    }

    /// The operator whose eigenvalues the inhomogeneous roots of this sign reproduce.
    pub fn inhom_label(self) -> Label {
        match self {
            Epsilon::Minus => Label::Star,
            Epsilon::Plus => Label::Plain,
        }
    }
}

impl From<Epsilon> for i8 {
    fn from(e: Epsilon) -> i8 {
        e.sign() as i8
    }
}

impl TryFrom<i8> for Epsilon {
    type Error = String;
    fn try_from(v: i8) -> std::result::Result<Self, String> {
        match v {
            1 => Ok(Epsilon::Plus),
            -1 => Ok(Epsilon::Minus),
            _ => Err(format!("epsilon must be ±1, got {v}")),
        }
    }
}

impl FromStr for Epsilon {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "+" | "+1" | "1" | "plus" => Ok(Epsilon::Plus),
            "-" | "-1" | "minus" => Ok(Epsilon::Minus),
            o => Err(Error::Config(format!("epsilon must be + or -, got '{o}'"))),
        }
    }
}

impl fmt::Display for Epsilon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Epsilon::Minus => "-",
            Epsilon::Plus => "+",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RootKind {
    Homogeneous,
    Inhomogeneous,
}

/// A solution of the Bethe equations in symmetric variables.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BetheRootSet {
    pub kind: RootKind,
    pub epsilon: Epsilon,
    pub level: usize,
    #[serde(rename = "U")]
    pub sym_roots: Vec<C64>,
    /// Normalized residual |E_i| / Σ|terms of E_i| at the representative u_i.
    pub residuals: Vec<f64>,
}

impl BetheRootSet {
    pub fn len(&self) -> usize {
        self.sym_roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sym_roots.is_empty()
    }

    /// Representative u_i for each U_i.
    pub fn u_roots(&self, q: C64) -> Vec<C64> {
        self.sym_roots.iter().map(|&x| u_from_sym(q, x)).collect()
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }
}

/// U(u) = (qu² + q⁻¹u⁻²)/(q + q⁻¹).
pub fn sym_var(q: C64, u: C64) -> C64 {
    let u2 = u * u;
    (q * u2 + 1.0 / (q * u2)) / (q + q.inv())
}

/// The representative u of U: the root t = u² of qt² − (q+q⁻¹)U t + q⁻¹ = 0 of
/// larger modulus, then the principal square root.
pub fn u_from_sym(q: C64, x: C64) -> C64 {
    u_branches(q, x)[0]
}

/// Both preimages t = u² (larger modulus first), as principal square roots.
pub fn u_branches(q: C64, x: C64) -> [C64; 2] {
    let bb = (q + q.inv()) * x;
    let disc = (bb * bb - 4.0).sqrt();
    let t1 = (bb + disc) / (2.0 * q);
    let t2 = (bb - disc) / (2.0 * q);
    if t1.norm() >= t2.norm() {
        [t1.sqrt(), t2.sqrt()]
    } else {
        [t2.sqrt(), t1.sqrt()]
    }
}

fn is_zero_b(x: C64) -> bool {
    b(x).norm() <= 1e-13 * x.norm().max(x.inv().norm())
}

fn zeta(p: &ParamSet) -> C64 {
    p.zeta2().sqrt()
}

/// Λ₁ and b(qu²)Λ₂ (the second with its pole removed).
fn lambda_parts(p: &ParamSet, eps: Epsilon, u: C64) -> (C64, C64) {
    use Label::*;
    let q = p.q();
    let n = p.two_s() as i32;
    let z = zeta(p);
    let (bb, c, bs, cs) = (p.b(Plain), p.c(Plain), p.b(Star), p.c(Star));
    let e = eps.sign();
    let (w1, w2) = if e > 0 { (C64::new(1.0, 0.0), bs / bb) } else { (c / cs, C64::new(1.0, 0.0)) };
    let ue = u.powi(-e);
    let q2s1 = q.powi(n + 1);
    let l1 = q.powi(-n - 1)
        * ue
        * (q2s1 * u / z - z / u)
        * (q2s1 * u * z - 1.0 / (u * z))
        * (u * cs * q.powi(-n) + bb * q.powi(n) / u)
        * (u * w1 + w2 / u);
    let q2sm1 = q.powi(n - 1);
    let l2c = b(u * u)
        * q.powi(-n - 1)
        * ue
        * (q2sm1 * z / u - u / z)
        * (q2sm1 / (u * z) - u * z)
        * (q * q * u * bb * q.powi(n) + cs * q.powi(-n) / u)
        * (q * q * u * w2 + w1 / u);
    (l1, l2c)
}

/// (Λ₁^ε(u), Λ₂^ε(u)).
pub fn lambda12(p: &ParamSet, eps: Epsilon, u: C64) -> Result<(C64, C64)> {
    if u.norm() == 0.0 {
        return Err(Error::Domain("Λ undefined at u = 0".into()));
    }
    if is_zero_b(p.q() * u * u) {
        return Err(Error::Domain("Λ₂ has a pole at qu² = q⁻¹u⁻²".into()));
    }
    let (l1, l2c) = lambda_parts(p, eps, u);
    Ok((l1, l2c / b(p.q() * u * u)))
}

fn check_roots(q: C64, i: usize, us: &[C64]) -> Result<()> {
    if i >= us.len() {
        return Err(Error::Domain(format!("root index {i} out of range")));
    }
    let u = us[i];
    if u.norm() == 0.0 || !u.re.is_finite() || !u.im.is_finite() {
        return Err(Error::Domain("roots must be finite and nonzero".into()));
    }
    if is_zero_b(q * u * u) {
        return Err(Error::Domain("pole at b(qu²) = 0".into()));
    }
    for (j, &v) in us.iter().enumerate() {
        if j == i {
            continue;
        }
        if v.norm() == 0.0 || is_zero_b(v / u) || is_zero_b(q * u * v) {
            return Err(Error::Domain(format!("roots {i} and {j} coincide or sit on a pole")));
        }
    }
    Ok(())
}

fn products(q: C64, i: usize, us: &[C64]) -> (C64, C64) {
    let u = us[i];
    let mut pf = C64::new(1.0, 0.0);
    let mut ph = C64::new(1.0, 0.0);
    for (j, &v) in us.iter().enumerate() {
        if j != i {
            pf *= exchange::f(q, u, v);
            ph *= exchange::h(q, u, v);
        }
    }
    (pf, ph)
}

/// Terms of b(qu_i²)·E^M_ε(u_i, ū_i); they sum to the pole-cleared equation.
pub fn e_hom_terms(p: &ParamSet, eps: Epsilon, i: usize, us: &[C64]) -> Result<[C64; 2]> {
    let q = p.q();
    check_roots(q, i, us)?;
    let u = us[i];
    let (l1, l2c) = lambda_parts(p, eps, u);
    let (pf, ph) = products(q, i, us);
    Ok([-b(u * u) * pf * l1, ph * l2c])
}

/// E^M_ε(u_i, ū_i), M = us.len().
pub fn e_hom(p: &ParamSet, eps: Epsilon, i: usize, us: &[C64]) -> Result<C64> {
    let t = e_hom_terms(p, eps, i, us)?;
    Ok((t[0] + t[1]) / b(p.q() * us[i] * us[i]))
}

/// ν₊ = q^{−1−4s}c*, ν₋ = q^{1+4s}b.
pub fn nu(p: &ParamSet, eps: Epsilon) -> C64 {
    let n = p.two_s() as i32;
    match eps {
        Epsilon::Plus => p.q().powi(-1 - 2 * n) * p.c(Label::Star),
        Epsilon::Minus => p.q().powi(1 + 2 * n) * p.b(Label::Plain),
    }
}

/// Π_{k=0}^{2s} b(q^{(1+2k−2s)/2} ζ u) b(q^{(1+2k−2s)/2} u/ζ).
pub(crate) fn zeta_product(p: &ParamSet, u: C64) -> C64 {
    let sq = p.q().sqrt();
    let n = p.two_s() as i32;
    let z = zeta(p);
    (0..=n)
        .map(|k| {
            let w = sq.powi(1 + 2 * k - n);
            b(w * z * u) * b(w * u / z)
        })
        .product()
}

/// Terms of b(qu_i²)·E_ε(u_i, ū_i) for the inhomogeneous equations.
pub fn e_inhom_terms(p: &ParamSet, eps: Epsilon, i: usize, us: &[C64]) -> Result<[C64; 3]> {
    if us.len() != p.two_s() {
        return Err(Error::Domain(format!(
            "inhomogeneous equations take 2s = {} roots, got {}",
            p.two_s(),
            us.len()
        )));
    }
    let q = p.q();
    check_roots(q, i, us)?;
    let u = us[i];
    let e = eps.sign();
    let (l1, l2c) = lambda_parts(p, eps, u);
    let (pf, ph) = products(q, i, us);
    let den: C64 = us
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .map(|(_, &v)| b(u / v) * b(q * u * v))
        .product();
    let bu2 = b(u * u);
    Ok([
        bu2 * u.powi(e) * pf * l1,
        -(q * q * u * u * u).powi(-e) * ph * l2c,
        nu(p, eps) * u.powi(-2 * e) * bu2 * b(q * u * u) / b(q) * zeta_product(p, u) / den,
    ])
}

/// E_ε(u_i, ū_i) with 2s roots.
pub fn e_inhom(p: &ParamSet, eps: Epsilon, i: usize, us: &[C64]) -> Result<C64> {
    let t = e_inhom_terms(p, eps, i, us)?;
    Ok((t[0] + t[1] + t[2]) / b(p.q() * us[i] * us[i]))
}

fn normalized<const K: usize>(t: [C64; K]) -> f64 {
    let s: C64 = t.iter().sum();
    let m: f64 = t.iter().map(|x| x.norm()).sum();
    s.norm() / m.max(f64::MIN_POSITIVE)
}

/// Normalized residuals of the equations at the given u-roots.
pub fn residuals(p: &ParamSet, kind: RootKind, eps: Epsilon, us: &[C64]) -> Result<Vec<f64>> {
    (0..us.len())
        .map(|i| match kind {
            RootKind::Homogeneous => e_hom_terms(p, eps, i, us).map(normalized),
            RootKind::Inhomogeneous => e_inhom_terms(p, eps, i, us).map(normalized),
        })
        .collect()
}

/// Eigenvalue from 2s inhomogeneous roots: θ_M for ε = +, θ*_N for ε = −.
pub fn eigenvalue_from_roots(p: &ParamSet, roots: &BetheRootSet) -> Result<C64> {
    if roots.kind != RootKind::Inhomogeneous {
        return Err(Error::KindMismatch {
            expected: "inhomogeneous",
        });
    }
    eigenvalue_from_sym(p, roots.epsilon, &roots.sym_roots)
}

pub(crate) fn eigenvalue_from_sym(p: &ParamSet, eps: Epsilon, sym: &[C64]) -> Result<C64> {
    use Label::*;
    if sym.len() != p.two_s() {
        return Err(Error::Domain("eigenvalue formula needs 2s roots".into()));
    }
    let q = p.q();
    let n = p.two_s() as i32;
    let z2 = p.zeta2();
    let zz = z2 + 1.0 / z2;
    let sum: C64 = sym.iter().sum::<C64>() * (q + q.inv());
    let qn2 = qn(n, q);
    Ok(match eps {
        Epsilon::Plus => {
            let cs = p.c(Star);
            q.powi(-2 * n)
                * (cs * zz * qn2 + q.powi(n) * (p.b(Plain) * q.powi(n) + p.c(Plain) * q.powi(-n))
                    - q * cs * sum)
        }
        Epsilon::Minus => {
            let bp = p.b(Plain);
            q.powi(2 * n)
                * (bp * zz * qn2 + q.powi(-n) * (p.b(Star) * q.powi(n) + p.c(Star) * q.powi(-n))
                    - bp / q * sum)
        }
    })
}

/// Multistart configuration.
#[derive(Clone, Debug)]
pub struct SolverConfig {
    pub seed: u64,
    /// Number of starting points; defaults to 200·n² for n unknowns.
    pub budget: Option<usize>,
    /// Acceptance threshold on the normalized residual.
    pub tol: f64,
    /// Relative tolerance for merging U-multisets.
    pub dedup_tol: f64,
    pub max_iter: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            seed: 0x5eed,
            budget: None,
            tol: 1e-9,
            dedup_tol: 1e-7,
            max_iter: 100,
        }
    }
}

/// Scale of the symmetric roots: max |r0 θ^a_M/(q+q⁻¹)|.
pub fn root_scale(p: &ParamSet) -> f64 {
    let k = p.r0() / (p.q() + p.q().inv());
    Label::ALL
        .iter()
        .flat_map(|&l| p.spectrum(l))
        .map(|t| (k * t).norm())
        .fold(1e-300, f64::max)
}

struct System<'a> {
    p: &'a ParamSet,
    kind: RootKind,
    eps: Epsilon,
}

impl System<'_> {
    fn eval(&self, us: &[C64]) -> Option<(CVec, f64)> {
        let mut out = CVec::zeros(us.len());
        let mut worst: f64 = 0.0;
        for i in 0..us.len() {
            let (val, nrm) = match self.kind {
                RootKind::Homogeneous => {
                    let t = e_hom_terms(self.p, self.eps, i, us).ok()?;
                    (t.iter().sum::<C64>(), normalized(t))
                }
                RootKind::Inhomogeneous => {
                    let t = e_inhom_terms(self.p, self.eps, i, us).ok()?;
                    (t.iter().sum::<C64>(), normalized(t))
                }
            };
            if !val.re.is_finite() || !val.im.is_finite() {
                return None;
            }
            out[i] = val;
            worst = worst.max(nrm);
        }
        Some((out, worst))
    }

    fn newton(&self, x0: Vec<C64>, max_iter: usize) -> Option<(Vec<C64>, f64)> {
        let n = x0.len();
        let mut x = x0;
        let (mut fx, mut worst) = self.eval(&x)?;
        for _ in 0..max_iter {
            let mut jac = CMat::zeros(n, n);
            for k in 0..n {
                let hk = 1e-7 * (1.0 + x[k].norm());
                let mut xk = x.clone();
                xk[k] += hk;
                let (fk, _) = self.eval(&xk)?;
                jac.set_column(k, &((fk - &fx) / C64::new(hk, 0.0)));
            }
            let step = solve(&jac, &fx).ok()?;
            if step.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return None;
            }
            let mut lam = 1.0;
            let fnorm = fx.norm();
            let accepted = loop {
                let xn: Vec<C64> = x.iter().zip(step.iter()).map(|(a, s)| a - s * lam).collect();
                if let Some((fnew, w)) = self.eval(&xn) {
                    if fnew.norm() < fnorm {
                        break Some((xn, fnew, w));
                    }
                }
                lam *= 0.5;
                if lam < 1e-4 {
                    break None;
                }
            };
            let Some((xn, fnew, w)) = accepted else { break };
            let xnorm = xn.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            let small = step.norm() * lam <= 1e-14 * (1.0 + xnorm);
            x = xn;
            fx = fnew;
            worst = w;
            if small || worst < 1e-15 {
                break;
            }
        }
        Some((x, worst))
    }
}

#[doc(hidden)]
pub fn newton_from(p: &ParamSet, kind: RootKind, eps: Epsilon, u0: Vec<C64>, max_iter: usize) -> Option<(Vec<C64>, f64)> {
    System { p, kind, eps }.newton(u0, max_iter)
}

fn admissible(q: C64, sym: &[C64], scale: f64) -> bool {
    for (i, &x) in sym.iter().enumerate() {
        if !x.re.is_finite() || !x.im.is_finite() {
            return false;
        }
        let u = u_from_sym(q, x);
        let u4 = u * u * u * u;
        if u.norm() == 0.0 || (u4 - 1.0).norm() <= 1e-8 * u4.norm().max(1.0) {
            return false;
        }
        // zeros of the cleared equations that sit on the pole b(qu²) = 0
        let qu2 = q * u * u;
        if b(qu2).norm() <= 1e-8 * qu2.norm().max(qu2.inv().norm()) {
            return false;
        }
        if sym[..i].iter().any(|&y| (x - y).norm() <= 1e-8 * scale) {
            return false;
        }
    }
    true
}

fn lex(a: &C64, b: &C64) -> std::cmp::Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

fn same_multiset(a: &[C64], b: &[C64], tol: f64) -> bool {
    let mut used = vec![false; b.len()];
    a.iter().all(|x| {
        if let Some(j) = (0..b.len()).find(|&j| !used[j] && (x - b[j]).norm() <= tol) {
            used[j] = true;
            true
        } else {
            false
        }
    })
}

/// A starting value: log-uniform modulus or uniform in a box of size ~scale.
fn seed_point(rng: &mut ChaCha8Rng, scale: f64, log: bool, real: bool) -> C64 {
    let (re, im) = if log {
        let mag = scale * 10f64.powf(rng.random_range(-3.0..1.0));
        let phase: f64 = if real {
            if rng.random_bool(0.5) { 0.0 } else { std::f64::consts::PI }
        } else {
            rng.random_range(-std::f64::consts::PI..std::f64::consts::PI)
        };
        (mag * phase.cos(), mag * phase.sin())
    } else {
        let re = rng.random_range(-3.0 * scale..3.0 * scale);
        let im = if real { 0.0 } else { rng.random_range(-2.0 * scale..2.0 * scale) };
        (re, im)
    };
    C64::new(re, im)
}

/// Every admissible solution found by the multistart, deduplicated and sorted.
pub fn collect_solutions(
    p: &ParamSet,
    kind: RootKind,
    eps: Epsilon,
    n: usize,
    cfg: &SolverConfig,
) -> Vec<(Vec<C64>, f64)> {
    if n == 0 {
        return vec![(vec![], 0.0)];
    }
    let scale = root_scale(p);
    let budget = cfg.budget.unwrap_or(200 * n * n).max(1);
    let tag = (kind == RootKind::Inhomogeneous) as u64 * 2 + (eps == Epsilon::Plus) as u64;
    let mut out = Vec::new();
    // a second, wider and denser pass only when the first finds nothing
    for (pass, widen) in [(0u64, 1.0), (1, 10.0)] {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ (tag << 56) ^ ((n as u64) << 48) ^ (pass << 40));
        let count = budget << (2 * pass);
        let real_first = if p.is_real() { count / 2 } else { 0 };
        let seeds: Vec<Vec<C64>> = (0..count)
            .map(|k| {
                (0..n)
                    .map(|_| seed_point(&mut rng, widen * scale, k % 2 == 0, k < real_first))
                    .collect()
            })
            .collect();
        merge_solutions(&mut out, multistart(p, kind, eps, seeds, cfg), cfg.dedup_tol * scale);
        if !out.is_empty() {
            break;
        }
    }
    sort_solutions(&mut out);
    out
}

/// Inhomogeneous multistart with seeds on the hyperplane ΣU = S fixed by the
/// eigenvalue of `level`.
pub fn collect_targeted(p: &ParamSet, eps: Epsilon, level: usize, cfg: &SolverConfig) -> Vec<(Vec<C64>, f64)> {
    let n = p.two_s();
    let Some(target) = level_sum(p, eps, level) else {
        return vec![];
    };
    let scale = root_scale(p);
    let budget = cfg.budget.unwrap_or(200 * n * n).max(1);
    let mut out = Vec::new();
    for (pass, widen) in [(0u64, 1.0), (1, 10.0)] {
        let mut rng = ChaCha8Rng::seed_from_u64(
            cfg.seed ^ (0xa5 << 56) ^ ((level as u64) << 40) ^ (pass << 32) ^ eps.sign() as u64,
        );
        let count = budget << (2 * pass);
        let real_first = if p.is_real() { count / 2 } else { 0 };
        let seeds: Vec<Vec<C64>> = (0..count)
            .map(|k| {
                let mut x: Vec<C64> = (0..n - 1)
                    .map(|_| seed_point(&mut rng, widen * scale, k % 2 == 0, k < real_first))
                    .collect();
                x.push(target - x.iter().sum::<C64>());
                x
            })
            .collect();
        let found = multistart(p, RootKind::Inhomogeneous, eps, seeds, cfg);
        merge_solutions(&mut out, found, cfg.dedup_tol * scale);
        if has_level(p, eps, &out, level) {
            break;
        }
    }
    sort_solutions(&mut out);
    out
}

fn has_level(p: &ParamSet, eps: Epsilon, sols: &[(Vec<C64>, f64)], level: usize) -> bool {
    sols.iter().any(|(x, _)| {
        eigenvalue_from_sym(p, eps, x)
            .map(|th| match_level(p, eps, th) == Some(level))
            .unwrap_or(false)
    })
}

/// ΣU reproducing the eigenvalue at `level` (the eigenvalue is affine in ΣU).
fn level_sum(p: &ParamSet, eps: Epsilon, level: usize) -> Option<C64> {
    let n = p.two_s();
    let zero = vec![C64::new(0.0, 0.0); n];
    let mut one = zero.clone();
    one[0] = C64::new(1.0, 0.0);
    let e0 = eigenvalue_from_sym(p, eps, &zero).ok()?;
    let slope = eigenvalue_from_sym(p, eps, &one).ok()? - e0;
    if slope.norm() == 0.0 {
        return None;
    }
    Some((p.theta(eps.inhom_label(), level) - e0) / slope)
}

fn multistart(
    p: &ParamSet,
    kind: RootKind,
    eps: Epsilon,
    seeds: Vec<Vec<C64>>,
    cfg: &SolverConfig,
) -> Vec<(Vec<C64>, f64)> {
    let q = p.q();
    let scale = root_scale(p);
    let sys = System { p, kind, eps };
    seeds
        .into_par_iter()
        .filter_map(|x0| {
            // iterate in u, where the equations are analytic, then map back to U
            let u0: Vec<C64> = x0.iter().map(|&x| u_from_sym(q, x)).collect();
            let (u, _) = sys.newton(u0, cfg.max_iter)?;
            let x: Vec<C64> = u.iter().map(|&v| sym_var(q, v)).collect();
            let rep: Vec<C64> = x.iter().map(|&v| u_from_sym(q, v)).collect();
            let (_, w) = sys.eval(&rep)?;
            Some((x, w))
        })
        .filter(|(x, w)| *w < cfg.tol && admissible(q, x, scale))
        .collect()
}

fn merge_solutions(into: &mut Vec<(Vec<C64>, f64)>, found: Vec<(Vec<C64>, f64)>, tol: f64) {
    for (mut x, w) in found {
        x.sort_by(lex);
        match into.iter_mut().find(|(y, _)| same_multiset(&x, y, tol)) {
            Some(entry) => {
                if w < entry.1 {
                    *entry = (x, w);
                }
            }
            None => into.push((x, w)),
        }
    }
}

fn sort_solutions(v: &mut [(Vec<C64>, f64)]) {
    v.sort_by(|a, b| {
        a.0.iter()
            .zip(b.0.iter())
            .map(|(x, y)| lex(x, y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
}

fn make_set(p: &ParamSet, kind: RootKind, eps: Epsilon, level: usize, sym: Vec<C64>) -> Result<BetheRootSet> {
    let us: Vec<C64> = sym.iter().map(|&x| u_from_sym(p.q(), x)).collect();
    let residuals = residuals(p, kind, eps, &us)?;
    Ok(BetheRootSet {
        kind,
        epsilon: eps,
        level,
        sym_roots: sym,
        residuals,
    })
}

/// The admissible solution of the homogeneous equations with `level` roots.
pub fn solve_hom(p: &ParamSet, eps: Epsilon, level: usize, cfg: &SolverConfig) -> Result<BetheRootSet> {
    if level > p.two_s() {
        return Err(Error::Domain(format!("level {level} exceeds 2s = {}", p.two_s())));
    }
    let sols = collect_solutions(p, RootKind::Homogeneous, eps, level, cfg);
    match sols.len() {
        0 => Err(Error::SolverFailure(format!(
            "no admissible homogeneous solution at level {level} (ε = {eps})"
        ))),
        1 => make_set(p, RootKind::Homogeneous, eps, level, sols.into_iter().next().unwrap().0),
        count => Err(Error::AmbiguousSolution { count }),
    }
}

/// Inhomogeneous solutions labelled by the level whose eigenvalue they reproduce.
#[derive(Clone, Debug, Serialize)]
pub struct InhomSolutions {
    pub sets: Vec<BetheRootSet>,
    /// Admissible solutions whose eigenvalue matches no level.
    #[serde(rename = "unmatched_U")]
    pub unmatched: Vec<Vec<C64>>,
}

/// Level index whose eigenvalue matches `value` within 1e-8·max|θ|.
pub(crate) fn match_level(p: &ParamSet, eps: Epsilon, value: C64) -> Option<usize> {
    let spec = p.spectrum(eps.inhom_label());
    let scale = spec.iter().map(|t| t.norm()).fold(0.0, f64::max);
    spec.iter()
        .enumerate()
        .map(|(k, t)| (k, (t - value).norm()))
        .filter(|&(_, d)| d <= 1e-8 * scale)
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(k, _)| k)
}

/// Exhaustive inhomogeneous solve: a free multistart, followed by a multistart
/// on the hyperplane ΣU = S_N for every level N it missed.
pub fn solve_inhom_all(p: &ParamSet, eps: Epsilon, cfg: &SolverConfig) -> Result<InhomSolutions> {
    let mut sols = collect_solutions(p, RootKind::Inhomogeneous, eps, p.two_s(), cfg);
    let scale = root_scale(p);
    for level in 0..=p.two_s() {
        if !has_level(p, eps, &sols, level) {
            merge_solutions(&mut sols, collect_targeted(p, eps, level, cfg), cfg.dedup_tol * scale);
        }
    }
    sort_solutions(&mut sols);
    let mut sets = Vec::new();
    let mut unmatched = Vec::new();
    for (sym, _) in sols {
        let th = eigenvalue_from_sym(p, eps, &sym)?;
        match match_level(p, eps, th) {
            Some(level) => sets.push(make_set(p, RootKind::Inhomogeneous, eps, level, sym)?),
            None => unmatched.push(sym),
        }
    }
    sets.sort_by_key(|s| s.level);
    Ok(InhomSolutions { sets, unmatched })
}

/// The inhomogeneous solution whose eigenvalue is the one at `level`.
pub fn solve_inhom(p: &ParamSet, eps: Epsilon, level: usize, cfg: &SolverConfig) -> Result<BetheRootSet> {
    if level > p.two_s() {
        return Err(Error::Domain(format!("level {level} exceeds 2s = {}", p.two_s())));
    }
    let all = solve_inhom_all(p, eps, cfg)?;
    if all.sets.is_empty() && all.unmatched.is_empty() {
        return Err(Error::SolverFailure(format!(
            "no admissible inhomogeneous solution (ε = {eps})"
        )));
    }
    let mut hits: Vec<BetheRootSet> = all.sets.into_iter().filter(|s| s.level == level).collect();
    match hits.len() {
        0 => Err(Error::NoMatchingLevel { level }),
        1 => Ok(hits.pop().unwrap()),
        count => Err(Error::AmbiguousSolution { count }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close_sets(got: &[C64], want: &[f64], tol: f64) -> bool {
        let mut g: Vec<f64> = got.iter().map(|z| z.re).collect();
        g.sort_by(f64::total_cmp);
        got.iter().all(|z| z.im.abs() < tol)
            && g.iter().zip(want).all(|(a, b)| (a - b).abs() < tol * b.abs().max(1.0))
    }

    #[test]
    fn table1_homogeneous() {
        let p = ParamSet::table1();
        let cfg = SolverConfig::default();
        let r0 = solve_hom(&p, Epsilon::Plus, 0, &cfg).unwrap();
        assert!(r0.is_empty());
        let r1 = solve_hom(&p, Epsilon::Plus, 1, &cfg).unwrap();
        assert!(close_sets(&r1.sym_roots, &[18.5087], 1e-4), "{:?}", r1.sym_roots);
        let r2 = solve_hom(&p, Epsilon::Plus, 2, &cfg).unwrap();
        assert!(close_sets(&r2.sym_roots, &[2.72742, 12.0749], 1e-4), "{:?}", r2.sym_roots);
        assert!(r2.max_residual() < 1e-9);
    }

    #[test]
    fn table1_inhomogeneous() {
        let p = ParamSet::table1();
        let all = solve_inhom_all(&p, Epsilon::Minus, &SolverConfig::default()).unwrap();
        assert!(all.unmatched.is_empty(), "{:?}", all.unmatched);
        let want = [[3.50405, 11.9071], [3.208, 12.0789], [2.01305, 12.1539]];
        assert_eq!(all.sets.len(), 3);
        for (s, w) in all.sets.iter().zip(want) {
            assert!(close_sets(&s.sym_roots, &w, 1e-4), "{} {:?}", s.level, s.sym_roots);
            let th = eigenvalue_from_roots(&p, s).unwrap();
            assert!((th - p.theta(Label::Star, s.level)).norm() < 1e-8 * 567.0);
        }
    }

    #[test]
    fn json_shape() {
        let s = BetheRootSet {
            kind: RootKind::Inhomogeneous,
            epsilon: Epsilon::Minus,
            level: 1,
            sym_roots: vec![C64::new(1.5, -0.25)],
            residuals: vec![1e-12],
        };
        let v: serde_json::Value = serde_json::to_value(&s).unwrap();
        assert_eq!(v["epsilon"], -1);
        assert_eq!(v["kind"], "inhomogeneous");
        assert_eq!(v["U"][0][1], -0.25);
        let back: BetheRootSet = serde_json::from_value(v).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn branch_pair_solves_quadratic() {
        let q = C64::new(1.3, 0.1);
        let x = C64::new(2.0, 0.7);
        for u in u_branches(q, x) {
            assert!((sym_var(q, u) - x).norm() < 1e-12);
        }
        assert!(u_from_sym(q, x).norm() >= u_branches(q, x)[1].norm());
    }

    #[test]
    fn domain_errors() {
        let p = ParamSet::table1();
        assert!(lambda12(&p, Epsilon::Plus, C64::new(0.0, 0.0)).is_err());
        let pole = (1.0 / p.q()).sqrt();
        assert!(lambda12(&p, Epsilon::Plus, pole).is_err());
        let u = C64::new(1.7, 0.0);
        assert!(e_hom(&p, Epsilon::Plus, 0, &[u, u]).is_err());
        let mut r = BetheRootSet {
            kind: RootKind::Homogeneous,
            epsilon: Epsilon::Plus,
            level: 0,
            sym_roots: vec![],
            residuals: vec![],
        };
        assert!(matches!(eigenvalue_from_roots(&p, &r), Err(Error::KindMismatch { .. })));
        r.kind = RootKind::Inhomogeneous;
        assert!(eigenvalue_from_roots(&p, &r).is_err());
    }
}
