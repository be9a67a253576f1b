//! Identity suites run by `verify`.

use std::fs;
use std::path::Path;

use racah_bethe::bethe::{solve_hom, solve_inhom, Epsilon, SolverConfig};
use racah_bethe::bslinear::{
    action_residual, build_system, det_route_s_half, nullspace_route_tol, proportionality_spread,
    racah_s_half_closed, racah_via_det, theorem_vector, verify_solution_with,
};
use racah_bethe::qcalc::racah_eval;
use racah_bethe::report::save_matrix_csv;
use racah_bethe::scalprod::{
    inhom_from_hom, on_shell_residual, racah_decompositions, racah_scalar_ratio, sweep_csv, sweep_row,
};
use racah_bethe::triple::Model;
use racah_bethe::{Check, Label, Result, VerifyReport, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct Tolerances {
    pub residual: Option<f64>,
    pub rank: f64,
}

impl Tolerances {
    fn or(&self, default: f64) -> f64 {
        self.residual.unwrap_or(default)
    }
}

fn draw(rng: &mut ChaCha8Rng, n: usize) -> Vec<C64> {
    (0..n)
        .map(|_| C64::from_polar(rng.random_range(0.6..1.6), rng.random_range(-1.0..1.0)))
        .collect()
}

fn rel(a: C64, b: C64) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

/// Multiset distance between two lists of symmetric roots.
fn multiset_dev(a: &[C64], b: &[C64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut used = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for x in a {
        let Some((j, d)) = (0..b.len())
            .filter(|&j| !used[j])
            .map(|j| (j, (x - b[j]).norm() / b[j].norm().max(1.0)))
            .min_by(|u, v| u.1.total_cmp(&v.1))
        else {
            return f64::INFINITY;
        };
        used[j] = true;
        worst = worst.max(d);
    }
    worst
}

/// Closed sum vs direct inner product, on-shell normalizations and the
/// homogeneous-to-inhomogeneous map.
pub fn scalar(m: &Model, cfg: &SolverConfig, tol: &Tolerances, export: Option<&Path>) -> Result<VerifyReport> {
    let p = &m.params;
    let n = p.two_s();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut rows = Vec::new();
    for eps in Epsilon::BOTH {
        for lvl in 0..=n {
            for nvars in 1..=n + 1 {
                rows.push(sweep_row(m, eps, lvl, &draw(&mut rng, nvars))?);
            }
        }
    }
    let worst = rows.iter().map(|r| r.residual).fold(0.0, f64::max);
    let mut checks = vec![Check::new(
        format!("closed sum vs direct ({} draws)", rows.len()),
        worst,
        tol.or(1e-8),
    )];
    for lvl in 0..=n {
        for eps in Epsilon::BOTH {
            let h = solve_hom(p, eps, lvl, cfg)?;
            checks.push(Check::new(format!("on-shell hom eps{} N{lvl}", eps.sign()), on_shell_residual(m, &h)?, tol.or(1e-8)));
            let i = solve_inhom(p, eps, lvl, cfg)?;
            checks.push(Check::new(format!("on-shell inhom eps{} N{lvl}", eps.sign()), on_shell_residual(m, &i)?, tol.or(1e-8)));
        }
        let h = solve_hom(p, Epsilon::Plus, lvl, cfg)?;
        let via = inhom_from_hom(m, lvl, &h)?;
        let i = solve_inhom(p, Epsilon::Minus, lvl, cfg)?;
        checks.push(Check::new(format!("interpolated roots residual N{lvl}"), via.max_residual(), tol.or(1e-8)));
        checks.push(Check::new(
            format!("interpolated vs solved roots N{lvl}"),
            multiset_dev(&via.sym_roots, &i.sym_roots),
            tol.or(1e-6),
        ));
    }
    if let Some(dir) = export {
        fs::write(dir.join("scalar_sweep.csv"), sweep_csv(&rows))
            .map_err(|e| racah_bethe::Error::Config(format!("export: {e}")))?;
    }
    Ok(VerifyReport::new("scalar", p, checks))
}

/// Kernel, rank and action identities of the linear system, and the spin-1/2
/// determinant formulas.
pub fn bs(m: &Model, seed: u64, tol: &Tolerances, export: Option<&Path>) -> Result<VerifyReport> {
    let p = &m.params;
    let n = p.two_s();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xb5);
    let mut report = VerifyReport::new("bs", p, vec![]);
    for eps in Epsilon::BOTH {
        let ys = draw(&mut rng, n + 1);
        for lvl in 0..=n {
            let sys = build_system(m, eps, lvl, &ys)?;
            let mut r = verify_solution_with(m, &sys, tol.or(1e-8), tol.rank)?;
            if lvl == 0 {
                r.checks.push(Check::new("action on states", action_residual(m, &sys)?, tol.or(1e-9)));
            }
            let k = nullspace_route_tol(&sys, tol.rank)?;
            let x = theorem_vector(m, &sys)?;
            r.checks.push(Check::new("kernel proportional to closed sum", proportionality_spread(&k, &x), tol.or(1e-7)));
            if let Some(dir) = export {
                let name = format!("bs_eps{}_M{lvl}.csv", if eps == Epsilon::Plus { "p" } else { "m" });
                save_matrix_csv(&dir.join(name), &sys.matrix)
                    .map_err(|e| racah_bethe::Error::Config(format!("export: {e}")))?;
            }
            report.merge(r);
        }
        if n == 1 {
            for lvl in 0..=1 {
                let d = det_route_s_half(m, eps, lvl, [ys[0], ys[1]])?;
                let x1 = racah_bethe::scalprod::scalar_theorem(m, eps, lvl, &[ys[1]])?.value;
                let x2 = racah_bethe::scalprod::scalar_theorem(m, eps, lvl, &[ys[0]])?.value;
                let scale = d.first_row[0].norm().max(d.first_row[1].norm());
                let name = format!("det eps{} M{lvl}", eps.sign());
                report.checks.push(Check::new(format!("{name} second row"), d.second_row_max / scale, tol.or(1e-10)));
                report.checks.push(Check::new(
                    format!("{name} first row"),
                    rel(d.first_row_numeric[0], d.first_row[0]).max(rel(d.first_row_numeric[1], d.first_row[1])),
                    tol.or(1e-10),
                ));
                report.checks.push(Check::new(
                    format!("{name} values"),
                    rel(d.values[0], x1).max(rel(d.values[1], x2)),
                    tol.or(1e-10),
                ));
            }
        }
    }
    Ok(report)
}

/// q-Racah values from the ₄φ₃ sum, the scalar-product ratio, both root
/// decompositions and the determinant route.
pub fn racah(m: &Model, cfg: &SolverConfig, tol: &Tolerances) -> Result<VerifyReport> {
    let p = &m.params;
    let n = p.two_s();
    let t = tol.or(1e-6);
    let mut checks = Vec::new();
    let mut notes = Vec::new();
    for nn in 0..=n {
        let h = solve_hom(p, Epsilon::Plus, nn, cfg)?;
        let i = solve_inhom(p, Epsilon::Minus, nn, cfg)?;
        for mm in 0..=n {
            let want = racah_eval(p, Label::Plain, Label::Diamond, mm, nn)?;
            let ratio = racah_scalar_ratio(m, mm, &h)?;
            let (dh, di) = racah_decompositions(m, mm, &h, &i)?;
            let det = racah_via_det(m, mm, &i, cfg.seed, 3)?;
            let worst = [ratio, dh, di, det.value].iter().map(|v| rel(*v, want)).fold(0.0, f64::max);
            checks.push(Check::new(format!("R_{mm}(theta*_{nn}) routes"), worst, t));
            if det.draws > 0 {
                checks.push(Check::new(format!("R_{mm}(theta*_{nn}) kernel spread"), det.spread, t));
            }
            notes.push(format!(
                "R_{mm}(theta*_{nn}): 4phi3 {} | ratio {} | det {}",
                fmt(want),
                fmt(ratio),
                fmt(det.value)
            ));
        }
    }
    if n == 1 {
        let (q, r0) = (p.q(), p.r0());
        let (bb, bs, bd) = (p.b(Label::Plain), p.b(Label::Star), p.b(Label::Diamond));
        let closed = q * r0 * (bb + q * r0 * bs * bd) * (bs + q * r0 * bb * bd)
            / ((bd + q * r0 * bb * bs) * (1.0 + q.powi(3) * r0.powi(3) * bb * bs * bd));
        let i = solve_inhom(p, Epsilon::Minus, 1, cfg)?;
        let y1 = i.u_roots(q)[0];
        let det = racah_s_half_closed(p, y1)?;
        let want = racah_eval(p, Label::Plain, Label::Diamond, 1, 1)?;
        checks.push(Check::new("R_1(theta*_1) closed product", rel(closed, want).max(rel(det, want)), t));
        notes.push(format!("R_1(theta*_1) closed product {} | determinant at root {}", fmt(closed), fmt(det)));
    }
    let mut r = VerifyReport::new("racah", p, checks);
    r.notes = notes;
    Ok(r)
}

pub fn fmt(z: C64) -> String {
    if z.im == 0.0 {
        format!("{:.12e}", z.re)
    } else {
        format!("{:.12e}{:+.12e}i", z.re, z.im)
    }
}
