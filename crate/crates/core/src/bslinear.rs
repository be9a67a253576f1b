//! The homogeneous linear system satisfied by the off-shell scalar products, and
//! the determinant route to q-Racah polynomials.

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bethe::{self, lambda12, nu, zeta_product, BetheRootSet, Epsilon, RootKind};
use crate::error::{Error, Result};
use crate::linalg::{frob, identity, null_vector, singular_values, CMat, CVec};
use crate::params::{Label, ParamSet};
use crate::qcalc::{b, qpoch};
use crate::report::{Check, VerifyReport};
use crate::scalprod;
use crate::triple::Model;

/// Default threshold on σ_min/σ_max below which 𝓜 counts as rank 2s.
pub const RANK_TOL: f64 = 1e-10;

fn pole(x: C64) -> bool {
    b(x).norm() <= 1e-13 * x.norm().max(x.inv().norm())
}

/// g(u, v̄) = ∏ 1/(b(u/v) b(quv)).
pub fn g_prod(q: C64, u: C64, vs: &[C64]) -> Result<C64> {
    let mut acc = C64::new(1.0, 0.0);
    for &v in vs {
        if v.norm() == 0.0 || pole(u / v) || pole(q * u * v) {
            return Err(Error::Domain("g(u, v̄) has a pole".into()));
        }
        acc /= b(u / v) * b(q * u * v);
    }
    Ok(acc)
}

/// Y_ε(u | v̄).
pub fn y_eps(p: &ParamSet, eps: Epsilon, u: C64, vs: &[C64]) -> Result<C64> {
    let q = p.q();
    if u.norm() == 0.0 || pole(u * u) || pole(q * u * u) || pole(q * q * u * u) {
        return Err(Error::Domain("Y_ε has a pole".into()));
    }
    let e = eps.sign();
    let (l1, l2) = lambda12(p, eps, u)?;
    let bu2 = b(u * u);
    let p1: C64 = vs.iter().map(|&v| b(u / (q * v)) * b(u * v)).product();
    let p2: C64 = vs.iter().map(|&v| b(q * u / v) * b(q * q * u * v)).product();
    let mut y = u.powi(2 * e + 1) * l1 / (bu2 * b(q * u * u)) * p1
        + q.powi(-e - 1) / u * l2 / (bu2 * b(q * q * u * u)) * p2;
    if eps == Epsilon::Plus {
        y -= nu(p, eps) * zeta_product(p, u);
    }
    Ok(y)
}

/// L and 𝓜 = L − θ_M for one choice of Ȳ.
#[derive(Clone, Debug)]
pub struct BSSystem {
    pub epsilon: Epsilon,
    pub level: usize,
    pub variables: Vec<C64>,
    pub l: CMat,
    pub matrix: CMat,
}

impl BSSystem {
    /// Ȳ with its k-th element removed.
    pub fn reduced(&self, k: usize) -> Vec<C64> {
        without(&self.variables, k)
    }

    pub fn singular_values(&self) -> Vec<f64> {
        singular_values(&self.matrix)
    }
}

fn without(ys: &[C64], k: usize) -> Vec<C64> {
    ys.iter()
        .enumerate()
        .filter(|&(i, _)| i != k)
        .map(|(_, &y)| y)
        .collect()
}

fn check_variables(p: &ParamSet, ys: &[C64]) -> Result<()> {
    if ys.len() != p.dim() {
        return Err(Error::Domain(format!(
            "the system needs 2s+1 = {} variables, got {}",
            p.dim(),
            ys.len()
        )));
    }
    let q = p.q();
    let sym: Vec<C64> = ys.iter().map(|&y| bethe::sym_var(q, y)).collect();
    let scale = bethe::root_scale(p).max(sym.iter().map(|x| x.norm()).fold(0.0, f64::max));
    for i in 0..sym.len() {
        for j in 0..i {
            if (sym[i] - sym[j]).norm() <= 1e-8 * scale {
                return Err(Error::Domain(format!("variables {j} and {i} are not distinct")));
            }
        }
    }
    Ok(())
}

pub fn build_system(m: &Model, eps: Epsilon, level: usize, ys: &[C64]) -> Result<BSSystem> {
    let p = &m.params;
    if level > p.two_s() {
        return Err(Error::Domain(format!("level {level} exceeds 2s = {}", p.two_s())));
    }
    check_variables(p, ys)?;
    let q = p.q();
    let n = ys.len();
    let e = eps.sign();
    let sc = &m.triple.consts;
    let qq = q + q.inv();
    let mut l = CMat::zeros(n, n);
    for j in 0..n {
        let yj = without(ys, j);
        for k in 0..n {
            let yk = without(ys, k);
            l[(j, k)] = (ys[j] / ys[k]).powi(e) * b(ys[k] * ys[k]) / b(ys[j] * ys[j])
                * g_prod(q, ys[k], &yk)?
                * y_eps(p, eps, ys[k], &yj)?;
        }
        let y = ys[j];
        l[(j, j)] += qq * qq / (sc.rho * b(y * y) * b(q * q * y * y))
            * (sc.eta_star + sc.eta * bethe::sym_var(q, y));
    }
    let matrix = &l - identity(n) * p.theta(Label::Plain, level);
    Ok(BSSystem {
        epsilon: eps,
        level,
        variables: ys.to_vec(),
        l,
        matrix,
    })
}

/// X^ε_M(Ȳ_k) for every k, from the closed expansion.
pub fn theorem_vector(m: &Model, sys: &BSSystem) -> Result<CVec> {
    let v = (0..sys.variables.len())
        .map(|k| scalprod::scalar_theorem(m, sys.epsilon, sys.level, &sys.reduced(k)).map(|x| x.value))
        .collect::<Result<Vec<_>>>()?;
    Ok(CVec::from_vec(v))
}

/// ‖A Ψ(Ȳ_j) − Σ_k L_jk Ψ(Ȳ_k)‖ / ‖A Ψ‖ over all j.
pub fn action_residual(m: &Model, sys: &BSSystem) -> Result<f64> {
    let d = m.params.dim();
    let n = sys.variables.len();
    let mut psi = CMat::zeros(d, n);
    for k in 0..n {
        let st = scalprod::off_shell_state(m, sys.epsilon, &sys.reduced(k))?;
        psi.set_column(k, &CVec::from_vec(st.vector));
    }
    let lhs = &m.triple.a * &psi;
    let rhs = &psi * sys.l.transpose();
    Ok(frob(&(&lhs - rhs)) / frob(&lhs))
}

/// Residual of 𝓜X with X from the closed expansion, plus the rank diagnostics.
pub fn verify_solution(m: &Model, sys: &BSSystem, tol: f64) -> Result<VerifyReport> {
    verify_solution_with(m, sys, tol, RANK_TOL)
}

pub fn verify_solution_with(m: &Model, sys: &BSSystem, tol: f64, rank_tol: f64) -> Result<VerifyReport> {
    let x = theorem_vector(m, sys)?;
    let res = (&sys.matrix * &x).norm() / (frob(&sys.matrix) * x.norm());
    let sv = sys.singular_values();
    let n = sv.len();
    let mut checks = vec![Check::new("theorem vector in kernel", res, tol)];
    if n >= 2 {
        checks.push(Check::new("smallest singular value ratio", sv[n - 1] / sv[0], rank_tol));
        checks.push(Check::new("kernel isolation", sv[n - 1] / sv[n - 2], rank_tol));
    }
    let mut r = VerifyReport::new(format!("bs/eps{}/M{}", sys.epsilon.sign(), sys.level), &m.params, checks);
    r.notes.push(format!(
        "singular values: [{}]",
        sv.iter().map(|s| format!("{s:.3e}")).collect::<Vec<_>>().join(", ")
    ));
    Ok(r)
}

/// Unit kernel vector of 𝓜, proportional to (X^ε_M(Ȳ_k))_k.
pub fn nullspace_route(sys: &BSSystem) -> Result<CVec> {
    nullspace_route_tol(sys, RANK_TOL)
}

pub fn nullspace_route_tol(sys: &BSSystem, rank_tol: f64) -> Result<CVec> {
    let (v, sv) = null_vector(&sys.matrix);
    let n = sv.len();
    let rank = sv.iter().filter(|&&s| s > rank_tol * sv[0]).count();
    if rank != n - 1 {
        return Err(Error::RankDeficiencyUnexpected {
            expected: n - 1,
            found: rank,
        });
    }
    Ok(v)
}

/// Max relative deviation of the componentwise ratio a_k/b_k from its mean.
pub fn proportionality_spread(a: &CVec, bv: &CVec) -> f64 {
    let ratios: Vec<C64> = a.iter().zip(bv.iter()).map(|(x, y)| x / y).collect();
    let mean = ratios.iter().sum::<C64>() / ratios.len() as f64;
    ratios.iter().map(|r| (r - mean).norm()).fold(0.0, f64::max) / mean.norm()
}

/// Spin-1/2 determinant data for one (ε, M).
#[derive(Clone, Debug, Serialize)]
pub struct DetRoute {
    pub epsilon: Epsilon,
    pub level: usize,
    pub variables: [C64; 2],
    /// W with W₁₁, W₂₂ as given and W₁₂, W₂₁ fixed by the kernel conditions.
    pub w: [[C64; 2]; 2],
    /// First row of W𝓜 from the closed forms.
    pub first_row: [C64; 2],
    /// First row of W𝓜 as computed from the assembled system.
    pub first_row_numeric: [C64; 2],
    /// Largest entry of the second row of W𝓜, which must vanish.
    pub second_row_max: f64,
    pub psi: C64,
    /// (X(Ȳ₁), X(Ȳ₂)) = (−ψ·𝓜̃₁₂, ψ·𝓜̃₁₁).
    pub values: [C64; 2],
}

struct Half {
    q: C64,
    r0: C64,
    b: C64,
    bs: C64,
    bd: C64,
}

impl Half {
    fn new(p: &ParamSet) -> Result<Self> {
        if p.two_s() != 1 {
            return Err(Error::SpinMismatch { two_s: p.two_s() });
        }
        Ok(Half {
            q: p.q(),
            r0: p.r0(),
            b: p.b(Label::Plain),
            bs: p.b(Label::Star),
            bd: p.b(Label::Diamond),
        })
    }

    fn q2(&self) -> C64 {
        self.q * self.q
    }

    fn poch1(&self, a: C64) -> C64 {
        qpoch(a, self.q2(), 1)
    }

    /// Y₋(x | {x}) as a Laurent polynomial in x.
    fn ym(&self, x: C64) -> C64 {
        let Half { q, r0, b: bb, bs, bd } = *self;
        let q2 = q * q;
        let t = q2 * r0 * r0 * bb * bb - 1.0;
        b(q) / (q.powi(3) * r0.powi(3) * bb * bs * bd)
            * (q * r0 * bd * bs * t / (x * x)
                + q.powi(3) * x * x * r0 * bd * bs * t
                + bs * (1.0 - q.powi(4) * r0 * r0 * bb * bb)
                - (q2 - 1.0) * q * r0 * bb * bd * (q2 * r0 * r0 * bs * bs + 1.0)
                + q2 * r0 * r0 * bd * bd * bs * (1.0 - q.powi(4) * r0 * r0 * bb * bb))
    }

    fn z1(&self, x: C64) -> C64 {
        let Half { q, r0, b: bb, bs, bd } = *self;
        q.powi(3) * r0 * bd * x * x + q * r0 * bd / (x * x) - 1.0
            + q * q * r0 * r0 * bd * (q * (q * q - 1.0) * r0 * bb * bs - bd)
    }

    fn z2(&self, x: C64) -> C64 {
        let Half { q, r0, b: bb, bs, bd } = *self;
        q.powi(3) * r0 * bb * bd * x * x + q * r0 * bb * bd / (x * x) + q * (q * q - 1.0) * r0 * bd * bs
            - bb * (q * q * r0 * r0 * bd * bd + 1.0)
    }

    fn k_minus(&self) -> C64 {
        b(self.q) / (self.q2() * self.r0.powi(3) * self.b * self.bs * self.bd)
    }

    fn k_plus(&self) -> C64 {
        1.0 / (self.q.powi(4) * self.r0.powi(4) * self.b * self.bs * self.bd * self.bd)
    }

    /// The factor of the first row of 𝓜̃ that depends on y.
    fn row_entry(&self, eps: Epsilon, level: usize, y: C64) -> C64 {
        let big_b = y * b(y * y);
        let big_bi = b(y * y) / y;
        match (eps, level) {
            (Epsilon::Minus, 0) => self.q * big_b * self.ym(y),
            (Epsilon::Minus, _) => self.k_minus() * big_b,
            (Epsilon::Plus, 0) => self.k_plus() * big_bi * self.z1(y),
            (Epsilon::Plus, _) => self.k_plus() * big_bi * self.z2(y),
        }
    }

    fn first_row(&self, eps: Epsilon, level: usize, y: [C64; 2]) -> [C64; 2] {
        let (a, c) = (self.row_entry(eps, level, y[0]), self.row_entry(eps, level, y[1]));
        match eps {
            Epsilon::Minus => [a, -c],
            Epsilon::Plus => [-a, c],
        }
    }

    fn psi(&self, eps: Epsilon, level: usize) -> C64 {
        let Half { q, r0, b: bb, bs, bd } = *self;
        let q2 = q * q;
        let base = self.poch1(q2 * r0 * r0 * bb * bb);
        match (eps, level) {
            (Epsilon::Minus, 0) => q2 * r0 * r0 * bb * bb / (b(q) * base),
            (Epsilon::Minus, _) => {
                -q.powi(3) * r0 * r0 * bb * bb * bs * self.poch1(-q * r0 * bb * bd / bs)
                    * self.poch1(-q * r0 * bd * bs / bb)
                    / base
            }
            (Epsilon::Plus, 0) => -r0 * bb * bd,
            (Epsilon::Plus, _) => -r0 * bd,
        }
    }

    fn w(&self, eps: Epsilon, level: usize, y: [C64; 2], w11: C64, w22: C64) -> Result<[[C64; 2]; 2]> {
        let Half { q, r0, b: bb, bs, bd } = *self;
        let (y1, y2) = (y[0], y[1]);
        let g = g_prod(q, y1, &[y2])?;
        let big_b = |y: C64| y * b(y * y);
        let big_bi = |y: C64| b(y * y) / y;
        let (w12, w21) = match (eps, level) {
            (Epsilon::Minus, 0) => (
                big_b(y2) / big_b(y1) * (q * big_b(y1) / g - w11),
                -big_b(y1) / big_b(y2) * w22,
            ),
            (Epsilon::Minus, _) => (
                big_b(y2) / self.ym(y1)
                    * (b(q) / (q * q * r0.powi(3) * bb * bs * bd * g) - self.ym(y2) / big_b(y1) * w11),
                -big_b(y1) * self.ym(y1) / (big_b(y2) * self.ym(y2)) * w22,
            ),
            (Epsilon::Plus, lvl) => {
                let z = |x: C64| if lvl == 0 { self.z2(x) } else { self.z1(x) };
                (
                    big_bi(y2) / z(y1) * (q / g - z(y2) / big_bi(y1) * w11),
                    -big_bi(y1) * z(y1) / (big_bi(y2) * z(y2)) * w22,
                )
            }
        };
        Ok([[w11, w12], [w21, w22]])
    }
}

/// The spin-1/2 determinant formula with C^{ε,M} = 1 and the given free entries W₁₁, W₂₂.
pub fn det_route_s_half_with(
    m: &Model,
    eps: Epsilon,
    level: usize,
    ys: [C64; 2],
    w11: C64,
    w22: C64,
) -> Result<DetRoute> {
    let h = Half::new(&m.params)?;
    if level > 1 {
        return Err(Error::Domain(format!("level {level} exceeds 2s = 1")));
    }
    let sys = build_system(m, eps, level, &ys)?;
    let w = h.w(eps, level, ys, w11, w22)?;
    let wm = CMat::from_row_slice(2, 2, &[w[0][0], w[0][1], w[1][0], w[1][1]]) * &sys.matrix;
    let first_row = h.first_row(eps, level, ys);
    let psi = h.psi(eps, level);
    Ok(DetRoute {
        epsilon: eps,
        level,
        variables: ys,
        w,
        first_row,
        first_row_numeric: [wm[(0, 0)], wm[(0, 1)]],
        second_row_max: wm[(1, 0)].norm().max(wm[(1, 1)].norm()),
        psi,
        values: [-psi * first_row[1], psi * first_row[0]],
    })
}

pub fn det_route_s_half(m: &Model, eps: Epsilon, level: usize, ys: [C64; 2]) -> Result<DetRoute> {
    det_route_s_half_with(m, eps, level, ys, C64::new(0.7, 0.1), C64::new(1.1, -0.3))
}

/// R^{·,⋄}_M(θ*_N) from the determinant route, with the spread over the extra variables.
#[derive(Clone, Debug, Serialize)]
pub struct RacahDet {
    pub m: usize,
    pub n: usize,
    pub value: C64,
    /// Relative spread of the value over the draws of the extra variable (0 at spin 1/2).
    pub spread: f64,
    pub draws: usize,
}

/// An extra variable distinct from the roots and away from the poles of the system.
fn extra_variable(p: &ParamSet, roots: &[C64], rng: &mut ChaCha8Rng) -> C64 {
    let q = p.q();
    let scale = bethe::root_scale(p);
    loop {
        let y = C64::from_polar(rng.random_range(0.7..1.6), rng.random_range(-2.5..2.5));
        let x = bethe::sym_var(q, y);
        let far = roots
            .iter()
            .all(|&r| (bethe::sym_var(q, r) - x).norm() > 1e-3 * scale.max(1.0));
        if far && !pole(y * y) && !pole(q * y * y) && !pole(q * q * y * y) {
            return y;
        }
    }
}

/// X^−_M at the on-shell point: the kernel of 𝓜^{−,M} with Ȳ = roots ∪ {y}, scaled so that
/// the component with y present matches the closed expansion.
fn on_shell_from_kernel(m: &Model, level: usize, roots: &[C64], y: C64) -> Result<C64> {
    let mut ys = roots.to_vec();
    ys.insert(0, y);
    let sys = build_system(m, Epsilon::Minus, level, &ys)?;
    let v = nullspace_route(&sys)?;
    let anchor = scalprod::scalar_theorem(m, Epsilon::Minus, level, &sys.reduced(1))?.value;
    Ok(v[0] * anchor / v[1])
}

/// R^{·,⋄}_M(θ*_N) = X^−_M(S)/X^−_0(S), S the inhomogeneous roots at level N.
pub fn racah_via_det(m: &Model, level_m: usize, inhom: &BetheRootSet, seed: u64, draws: usize) -> Result<RacahDet> {
    let p = &m.params;
    if inhom.kind != RootKind::Inhomogeneous || inhom.epsilon != Epsilon::Minus {
        return Err(Error::KindMismatch {
            expected: "inhomogeneous, ε = −",
        });
    }
    if level_m > p.two_s() {
        return Err(Error::Domain(format!("level {level_m} exceeds 2s = {}", p.two_s())));
    }
    let n = inhom.level;
    if level_m == 0 {
        return Ok(RacahDet { m: 0, n, value: C64::new(1.0, 0.0), spread: 0.0, draws: 0 });
    }
    let roots = inhom.u_roots(p.q());
    if p.two_s() == 1 {
        let h = Half::new(p)?;
        let y = roots[0];
        let x = |lvl| h.psi(Epsilon::Minus, lvl) * h.row_entry(Epsilon::Minus, lvl, y);
        return Ok(RacahDet { m: level_m, n, value: x(level_m) / x(0), spread: 0.0, draws: 0 });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draws = draws.max(1);
    let mut vals = Vec::with_capacity(draws);
    for _ in 0..draws {
        let y = extra_variable(p, &roots, &mut rng);
        let xm = on_shell_from_kernel(m, level_m, &roots, y)?;
        let x0 = on_shell_from_kernel(m, 0, &roots, y)?;
        vals.push(xm / x0);
    }
    let mean = vals.iter().sum::<C64>() / draws as f64;
    let spread = vals.iter().map(|v| (v - mean).norm()).fold(0.0, f64::max) / mean.norm();
    Ok(RacahDet { m: level_m, n, value: mean, spread, draws })
}

/// The spin-1/2 value of R₁ at an inhomogeneous root y₁ in closed form.
pub fn racah_s_half_closed(p: &ParamSet, y1: C64) -> Result<C64> {
    let h = Half::new(p)?;
    let Half { q, r0, b: bb, bs, bd } = h;
    Ok(-b(q) * b(q) * h.poch1(-q * r0 * bb * bd / bs) * h.poch1(-q * r0 * bd * bs / bb)
        / (q * q * r0.powi(3) * bb * bd)
        / h.ym(y1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bethe::{solve_inhom, SolverConfig};
    use crate::qcalc::racah_eval;

    fn rel(a: C64, b: C64) -> f64 {
        (a - b).norm() / b.norm().max(1e-300)
    }

    fn random_ys(rng: &mut ChaCha8Rng, n: usize) -> Vec<C64> {
        (0..n)
            .map(|_| C64::from_polar(rng.random_range(0.6..1.6), rng.random_range(-1.0..1.0)))
            .collect()
    }

    #[test]
    fn empty_products() {
        let p = ParamSet::table1();
        assert_eq!(g_prod(p.q(), C64::new(1.3, 0.2), &[]).unwrap(), C64::new(1.0, 0.0));
        assert!(g_prod(p.q(), C64::new(1.3, 0.2), &[C64::new(1.3, 0.2)]).is_err());
    }

    #[test]
    fn system_identities() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for two_s in 1..=3 {
            let p = ParamSet::real(1.3, 0.9, 1.7, 0.6, 2.1, two_s).unwrap();
            let m = Model::new(&p).unwrap();
            for eps in Epsilon::BOTH {
                let ys = random_ys(&mut rng, two_s + 1);
                for lvl in 0..=two_s {
                    let sys = build_system(&m, eps, lvl, &ys).unwrap();
                    if lvl == 0 {
                        assert!(action_residual(&m, &sys).unwrap() < 1e-9);
                    }
                    let rep = verify_solution(&m, &sys, 1e-8).unwrap();
                    assert!(rep.passed(), "{}", rep.to_pretty());
                    let k = nullspace_route(&sys).unwrap();
                    let x = theorem_vector(&m, &sys).unwrap();
                    assert!(proportionality_spread(&k, &x) < 1e-7);
                }
            }
        }
    }

    #[test]
    fn random_vector_not_in_kernel() {
        let p = ParamSet::real(1.3, 0.9, 1.7, 0.6, 2.1, 2).unwrap();
        let m = Model::new(&p).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let sys = build_system(&m, Epsilon::Plus, 1, &random_ys(&mut rng, 3)).unwrap();
        let x = CVec::from_vec(random_ys(&mut rng, 3));
        assert!((&sys.matrix * &x).norm() / (frob(&sys.matrix) * x.norm()) > 1e-6);
    }

    #[test]
    fn ym_is_y_minus_at_itself() {
        let p = ParamSet::real(1.3, 0.9, 1.7, 0.6, 2.1, 1).unwrap();
        let h = Half::new(&p).unwrap();
        let u = C64::new(0.8, 0.3);
        assert!(rel(h.ym(u), y_eps(&p, Epsilon::Minus, u, &[u]).unwrap()) < 1e-12);
    }

    #[test]
    fn spin_half_determinants() {
        let p = ParamSet::real(1.3, 0.9, 1.7, 0.6, 2.1, 1).unwrap();
        let m = Model::new(&p).unwrap();
        let ys = [C64::new(0.9, 0.2), C64::new(1.3, -0.4)];
        for eps in Epsilon::BOTH {
            for lvl in 0..=1 {
                let d = det_route_s_half(&m, eps, lvl, ys).unwrap();
                let scale = d.first_row[0].norm().max(d.first_row[1].norm());
                assert!(d.second_row_max < 1e-10 * scale, "{eps} {lvl}");
                for k in 0..2 {
                    assert!(rel(d.first_row_numeric[k], d.first_row[k]) < 1e-10, "{eps} {lvl} {k}");
                }
                let x1 = scalprod::scalar_theorem(&m, eps, lvl, &[ys[1]]).unwrap().value;
                let x2 = scalprod::scalar_theorem(&m, eps, lvl, &[ys[0]]).unwrap().value;
                assert!(rel(d.values[0], x1) < 1e-10 && rel(d.values[1], x2) < 1e-10, "{eps} {lvl}");
            }
        }
        let big = ParamSet::table1();
        assert_eq!(
            det_route_s_half(&Model::new(&big).unwrap(), Epsilon::Minus, 0, ys).unwrap_err(),
            Error::SpinMismatch { two_s: 2 }
        );
    }

    #[test]
    fn spin_half_racah() {
        let p = ParamSet::real(1.3, 0.9, 1.7, 0.6, 2.1, 1).unwrap();
        let m = Model::new(&p).unwrap();
        let cfg = SolverConfig::default();
        let (q, r0) = (p.q(), p.r0());
        let (bb, bs, bd) = (p.b(Label::Plain), p.b(Label::Star), p.b(Label::Diamond));
        let b17 = q * r0 * (bb + q * r0 * bs * bd) * (bs + q * r0 * bb * bd)
            / ((bd + q * r0 * bb * bs) * (1.0 + q.powi(3) * r0.powi(3) * bb * bs * bd));
        for n in 0..=1 {
            let inh = solve_inhom(&p, Epsilon::Minus, n, &cfg).unwrap();
            let r = racah_via_det(&m, 1, &inh, 1, 3).unwrap().value;
            let closed = racah_s_half_closed(&p, inh.u_roots(q)[0]).unwrap();
            let want = if n == 0 { C64::new(1.0, 0.0) } else { b17 };
            assert!(rel(r, want) < 1e-10 && rel(closed, want) < 1e-10, "N={n}: {r} {closed} {want}");
            assert!(rel(want, racah_eval(&p, Label::Plain, Label::Diamond, 1, n).unwrap()) < 1e-12);
        }
    }

    #[test]
    fn kernel_racah_spin_one() {
        let p = ParamSet::table1();
        let m = Model::new(&p).unwrap();
        let cfg = SolverConfig::default();
        for n in 0..=2 {
            let inh = solve_inhom(&p, Epsilon::Minus, n, &cfg).unwrap();
            for lm in 0..=2 {
                let r = racah_via_det(&m, lm, &inh, 7, 3).unwrap();
                let want = racah_eval(&p, Label::Plain, Label::Diamond, lm, n).unwrap();
                assert!(rel(r.value, want) < 1e-6, "M={lm} N={n}: {} vs {want}", r.value);
                assert!(r.spread < 1e-6);
            }
        }
    }

    #[test]
    fn distinct_variables_required() {
        let p = ParamSet::real(1.3, 0.9, 1.7, 0.6, 2.1, 1).unwrap();
        let m = Model::new(&p).unwrap();
        let y = C64::new(1.1, 0.2);
        assert!(matches!(build_system(&m, Epsilon::Minus, 0, &[y, y]), Err(Error::Domain(_))));
        // u and 1/(qu) share the symmetric variable
        assert!(build_system(&m, Epsilon::Minus, 0, &[y, 1.0 / (p.q() * y)]).is_err());
    }
}
