//! One pass/fail line per acceptance criterion.

use std::time::Instant;

use racah_bethe::bethe::{solve_hom, solve_inhom, Epsilon, SolverConfig};
use racah_bethe::bslinear::{build_system, racah_via_det, verify_solution};
use racah_bethe::qcalc::{k_coeff, racah_eval};
use racah_bethe::scalprod::{
    inhom_from_hom, racah_decompositions, racah_scalar_ratio, spin_half_roots, sweep_row,
};
use racah_bethe::triple::{aw_verify, triple_checks, Model};
use racah_bethe::{Label, ParamSet, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rel(a: C64, b: C64) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

/// Largest distance after pairing each element of `a` with its nearest unused element of `b`.
fn multiset_dev(a: &[C64], b: &[C64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut used = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for x in a {
        let (j, d) = (0..b.len())
            .filter(|&j| !used[j])
            .map(|j| (j, (x - b[j]).norm() / b[j].norm().max(1.0)))
            .min_by(|u, v| u.1.total_cmp(&v.1))
            .unwrap();
        used[j] = true;
        worst = worst.max(d);
    }
    worst
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

/// 20 parameter sets per spin, half real and half complex.
fn sweep(two_s: usize, seed: u64) -> Vec<ParamSet> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed + two_s as u64);
    (0..20)
        .map(|i| {
            if i % 2 == 0 {
                ParamSet::random_real(&mut rng, two_s)
            } else {
                ParamSet::random_complex(&mut rng, two_s)
            }
        })
        .collect()
}

fn golden_roots() -> Outcome {
    let start = Instant::now();
    let p = ParamSet::table1();
    let cfg = SolverConfig::default();
    let hom: [&[f64]; 3] = [&[], &[18.5087], &[2.72742, 12.0749]];
    let inhom: [&[f64]; 3] = [&[3.50405, 11.9071], &[3.208, 12.0789], &[2.01305, 12.1539]];
    let mut worst: f64 = 0.0;
    let mut ok = true;
    for n in 0..=2 {
        let sets = [
            (solve_hom(&p, Epsilon::Plus, n, &cfg), hom[n]),
            (solve_inhom(&p, Epsilon::Minus, n, &cfg), inhom[n]),
        ];
        for (got, want) in sets {
            match got {
                Ok(r) if r.sym_roots.len() == want.len() => {
                    for (g, w) in r.sym_roots.iter().zip(want) {
                        worst = worst.max(rel(*g, C64::new(*w, 0.0)));
                    }
                }
                _ => ok = false,
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        ok && worst < 5e-4 && secs < 30.0,
        format!("max rel dev {worst:.2e} (tol 5e-4), {secs:.2} s"),
    )
}

fn spin_half_closed() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(200);
    let cfg = SolverConfig::default();
    let mut worst: f64 = 0.0;
    let mut ok = true;
    for _ in 0..20 {
        let p = ParamSet::random_real(&mut rng, 1);
        let m = Model::new(&p).unwrap();
        let c = spin_half_roots(&m).unwrap();
        match solve_hom(&p, Epsilon::Plus, 1, &cfg) {
            Ok(h) => worst = worst.max(rel(h.sym_roots[0], c.hom_plus)),
            Err(_) => ok = false,
        }
        for n in 0..=1 {
            match solve_inhom(&p, Epsilon::Minus, n, &cfg) {
                Ok(i) => worst = worst.max(rel(i.sym_roots[0], c.inhom_minus[n])),
                Err(_) => ok = false,
            }
        }
    }
    outcome(ok && worst < 1e-10, format!("max rel dev {worst:.2e} (tol 1e-10), 20 draws"))
}

fn askey_wilson() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for two_s in 1..=4 {
        for p in sweep(two_s, 300) {
            let m = Model::new(&p).unwrap();
            let r = aw_verify(&m.triple, 1e-10);
            worst = worst.max(r.max_residual());
            count += r.checks.len();
        }
    }
    outcome(worst < 1e-10, format!("max residual {worst:.2e} (tol 1e-10), {count} relations"))
}

fn theorem_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(400);
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for two_s in 1..=3 {
        for i in 0..60 {
            let p = if i % 2 == 0 {
                ParamSet::random_real(&mut rng, two_s)
            } else {
                ParamSet::random_complex(&mut rng, two_s)
            };
            let m = Model::new(&p).unwrap();
            let eps = if rng.random_bool(0.5) { Epsilon::Plus } else { Epsilon::Minus };
            let lvl = rng.random_range(0..=two_s);
            let nvars = rng.random_range(1..=two_s + 1);
            let us: Vec<C64> = (0..nvars)
                .map(|_| C64::from_polar(rng.random_range(0.6..1.8), rng.random_range(-3.0..3.0)))
                .collect();
            worst = worst.max(sweep_row(&m, eps, lvl, &us).unwrap().residual);
            count += 1;
        }
    }
    outcome(worst < 1e-8, format!("max rel residual {worst:.2e} (tol 1e-8), {count} draws"))
}

fn orthogonality_ladders() -> Outcome {
    let mut worst: f64 = 0.0;
    for two_s in 1..=4 {
        for p in sweep(two_s, 300) {
            let m = Model::new(&p).unwrap();
            let r = triple_checks(&m, 1e-10);
            for c in r.checks.iter().filter(|c| c.name.starts_with("orthogonality") || c.name.starts_with("f0/")) {
                worst = worst.max(c.residual);
            }
        }
    }
    outcome(worst < 1e-10, format!("max residual {worst:.2e} (tol 1e-10)"))
}

fn rank_of_system() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(600);
    let mut min_gap = f64::INFINITY;
    let mut worst: f64 = 0.0;
    for two_s in 1..=3 {
        let p = ParamSet::random_real(&mut rng, two_s);
        let m = Model::new(&p).unwrap();
        for eps in Epsilon::BOTH {
            for lvl in 0..=two_s {
                for _ in 0..10 {
                    let ys: Vec<C64> = (0..=two_s)
                        .map(|_| C64::from_polar(rng.random_range(0.6..1.6), rng.random_range(-1.0..1.0)))
                        .collect();
                    let sys = build_system(&m, eps, lvl, &ys).unwrap();
                    let sv = sys.singular_values();
                    let n = sv.len();
                    min_gap = min_gap.min(sv[n - 2] / sv[n - 1]);
                    let rep = verify_solution(&m, &sys, 1e-8).unwrap();
                    worst = worst.max(rep.checks[0].residual);
                }
            }
        }
    }
    outcome(
        min_gap >= 1e8 && worst < 1e-8,
        format!("min singular gap {min_gap:.2e} (need 1e8), max kernel residual {worst:.2e} (tol 1e-8)"),
    )
}

fn interpolation_closure() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(700);
    let cfg = SolverConfig::default();
    let mut params = vec![ParamSet::table1()];
    for two_s in 1..=2 {
        for _ in 0..3 {
            params.push(ParamSet::random_real(&mut rng, two_s));
        }
    }
    let mut worst_res: f64 = 0.0;
    let mut worst_dev: f64 = 0.0;
    let mut ok = true;
    for p in &params {
        let m = Model::new(p).unwrap();
        for n in 0..=p.two_s() {
            let (Ok(h), Ok(i)) = (solve_hom(p, Epsilon::Plus, n, &cfg), solve_inhom(p, Epsilon::Minus, n, &cfg)) else {
                ok = false;
                continue;
            };
            let Ok(via) = inhom_from_hom(&m, n, &h) else {
                ok = false;
                continue;
            };
            worst_res = worst_res.max(via.max_residual());
            worst_dev = worst_dev.max(multiset_dev(&via.sym_roots, &i.sym_roots));
        }
    }
    outcome(
        ok && worst_res < 1e-8 && worst_dev < 1e-6,
        format!("max residual {worst_res:.2e} (tol 1e-8), max U deviation {worst_dev:.2e} (tol 1e-6)"),
    )
}

fn racah_routes() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(800);
    let cfg = SolverConfig::default();
    let mut params = vec![ParamSet::table1()];
    for _ in 0..3 {
        params.push(ParamSet::random_real(&mut rng, 1));
    }
    let mut worst: f64 = 0.0;
    let mut b17: f64 = 0.0;
    let mut ok = true;
    for p in &params {
        let m = Model::new(p).unwrap();
        for n in 0..=p.two_s() {
            let (Ok(h), Ok(i)) = (solve_hom(p, Epsilon::Plus, n, &cfg), solve_inhom(p, Epsilon::Minus, n, &cfg)) else {
                ok = false;
                continue;
            };
            for lm in 0..=p.two_s() {
                let want = racah_eval(p, Label::Plain, Label::Diamond, lm, n).unwrap();
                let (dh, di) = racah_decompositions(&m, lm, &h, &i).unwrap();
                let ratio = racah_scalar_ratio(&m, lm, &h).unwrap();
                let det = racah_via_det(&m, lm, &i, 9, 3).unwrap().value;
                for got in [dh, di, ratio, det] {
                    worst = worst.max(rel(got, want));
                }
                if p.two_s() == 1 && lm == 1 && n == 1 {
                    let (q, r0) = (p.q(), p.r0());
                    let (bb, bs, bd) = (p.b(Label::Plain), p.b(Label::Star), p.b(Label::Diamond));
                    let closed = q * r0 * (bb + q * r0 * bs * bd) * (bs + q * r0 * bb * bd)
                        / ((bd + q * r0 * bb * bs) * (1.0 + q.powi(3) * r0.powi(3) * bb * bs * bd));
                    b17 = b17.max(rel(det, closed)).max(rel(want, closed));
                }
            }
        }
    }
    outcome(
        ok && worst < 1e-6 && b17 < 1e-6,
        format!("max rel dev {worst:.2e} (tol 1e-6), spin-1/2 R1(θ*1) closed form dev {b17:.2e}"),
    )
}

fn transitions() -> Outcome {
    let mut inv: f64 = 0.0;
    let mut entry: f64 = 0.0;
    let mut basis: f64 = 0.0;
    for two_s in 1..=4 {
        for p in sweep(two_s, 300) {
            let m = Model::new(&p).unwrap();
            let r = triple_checks(&m, 1e-10);
            for c in &r.checks {
                if c.name.ends_with("·inverse") {
                    inv = inv.max(c.residual);
                }
                if c.name.starts_with("basis[·→*]") {
                    basis = basis.max(c.residual);
                }
            }
            let pm = &m.transitions.p_plain_star;
            for n in 0..p.dim() {
                let k = k_coeff(&p, Label::Plain, Label::Star, Label::Diamond, n).unwrap();
                for mm in 0..p.dim() {
                    let want = racah_eval(&p, Label::Plain, Label::Diamond, mm, n).unwrap();
                    entry = entry.max((pm[(mm, n)] / k - want).norm() / want.norm().max(1.0));
                }
            }
        }
    }
    outcome(
        inv < 1e-10 && entry < 1e-9 && basis < 1e-8,
        format!("P·P⁻¹ {inv:.2e} (tol 1e-10), P/k vs 4φ3 {entry:.2e} (tol 1e-9), V*=V·P {basis:.2e}"),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 9] = [
        ("golden s = 1 roots", golden_roots),
        ("spin-1/2 closed-form roots", spin_half_closed),
        ("Askey-Wilson relations", askey_wilson),
        ("scalar product closed sum vs direct", theorem_oracle),
        ("orthogonality and ladder identities", orthogonality_ladders),
        ("rank of the linear system", rank_of_system),
        ("homogeneous to inhomogeneous map", interpolation_closure),
        ("three routes to q-Racah values", racah_routes),
        ("transition matrices", transitions),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let o = f();
        if !o.pass {
            failed += 1;
        }
        println!(
            "criterion {}: {} - {name}: {}",
            i + 1,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
    println!("all 9 criteria passed");
}
