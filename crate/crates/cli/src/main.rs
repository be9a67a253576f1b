mod golden;
mod suites;

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use racah_bethe::bethe::{solve_hom, solve_inhom, solve_inhom_all, BetheRootSet, Epsilon, SolverConfig};
use racah_bethe::qcalc::racah_eval;
use racah_bethe::report::save_matrix_csv;
use racah_bethe::triple::{aw_verify, triple_checks, Model};
use racah_bethe::{Check, Error, Label, ParamSet, VerifyReport, C64};
use serde::Serialize;

use suites::Tolerances;

#[derive(Parser)]
#[command(name = "racah-bethe", version, about = "Leonard triples, Bethe roots and q-Racah identities")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Common {
    /// Parameter file with keys q, r0, b, bstar, bdiam, s (defaults to the s = 1 example set).
    #[arg(long, global = true)]
    params: Option<PathBuf>,
    /// Residual tolerance; replaces every per-check default.
    #[arg(long, global = true, env = "RACAH_BETHE_TOL")]
    tol: Option<f64>,
    /// Relative tolerance for merging Bethe root sets.
    #[arg(long, global = true, default_value_t = 1e-7)]
    dedup_tol: f64,
    /// Singular-value ratio below which a direction counts as kernel.
    #[arg(long, global = true, default_value_t = 1e-10)]
    rank_tol: f64,
    /// Seed for the multistart solver and random draws.
    #[arg(long, global = true, default_value_t = 0x5eed)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Pretty)]
    format: Format,
    /// Directory for CSV exports.
    #[arg(long, global = true)]
    export: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Pretty,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build the triple and check its identities.
    Triple,
    /// Solve Bethe equations.
    Bethe {
        #[command(subcommand)]
        which: BetheCmd,
    },
    /// Run an identity suite.
    Verify {
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
    },
    /// q-Racah values R_M(θ*_N) by every route.
    Racah {
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        n: Option<usize>,
    },
}

#[derive(Subcommand)]
enum BetheCmd {
    /// Homogeneous equations at one level.
    Hom {
        #[arg(long, default_value = "+", allow_hyphen_values = true)]
        eps: Epsilon,
        #[arg(long)]
        level: usize,
    },
    /// Inhomogeneous equations at one level, or every admissible solution.
    Inhom {
        #[arg(long, default_value = "-", allow_hyphen_values = true)]
        eps: Epsilon,
        #[arg(long, required_unless_present = "all", conflicts_with = "all")]
        level: Option<usize>,
        #[arg(long)]
        all: bool,
    },
    /// Compare against the golden s = 1 root table.
    Table1,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    Scalar,
    Bs,
    Racah,
    All,
}

enum Failure {
    Lib(Error),
    Identity(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::DegenerateParams { .. } => 2,
        Error::SolverFailure(_) | Error::AmbiguousSolution { .. } | Error::NoMatchingLevel { .. } => 3,
        Error::RankDeficiencyUnexpected { .. } | Error::RootExtractionFailure { .. } => 4,
        _ => 1,
    }
}

fn config_err(msg: impl Into<String>) -> Failure {
    Failure::Lib(Error::Config(msg.into()))
}

fn load_params(c: &Common) -> Result<ParamSet, Failure> {
    match &c.params {
        None => Ok(golden::params()),
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| config_err(format!("{}: {e}", path.display())))?;
            Ok(ParamSet::from_config(&text)?)
        }
    }
}

fn validate(c: &Common) -> Result<(), Failure> {
    let positive = |x: f64| x.is_finite() && x > 0.0;
    if c.tol.is_some_and(|t| !positive(t)) || !positive(c.dedup_tol) || !positive(c.rank_tol) {
        return Err(config_err("tolerances must be positive"));
    }
    if let Some(dir) = &c.export {
        fs::create_dir_all(dir).map_err(|e| config_err(format!("{}: {e}", dir.display())))?;
    }
    Ok(())
}

fn solver_config(c: &Common) -> SolverConfig {
    SolverConfig {
        seed: c.seed,
        tol: c.tol.unwrap_or(1e-9),
        dedup_tol: c.dedup_tol,
        ..SolverConfig::default()
    }
}

fn export_err(e: std::io::Error) -> Failure {
    config_err(format!("export: {e}"))
}

fn emit_report(r: &VerifyReport, format: Format) -> Result<(), Failure> {
    print!(
        "{}",
        match format {
            Format::Json => r.to_json() + "\n",
            Format::Csv => r.to_csv(),
            Format::Pretty => r.to_pretty(),
        }
    );
    if r.passed() {
        Ok(())
    } else {
        Err(Failure::Identity(format!("{} check(s) failed", r.failures().count())))
    }
}

fn finish(mut r: VerifyReport, start: Instant, format: Format) -> Result<(), Failure> {
    // wall time only in human output, so JSON stays reproducible
    if format == Format::Pretty {
        r.runtime_ms = Some(start.elapsed().as_secs_f64() * 1e3);
        r.notes.push(format!("runtime {:.0} ms", r.runtime_ms.unwrap_or(0.0)));
    }
    emit_report(&r, format)
}

fn cmd_triple(c: &Common, p: &ParamSet) -> Result<(), Failure> {
    let start = Instant::now();
    let m = Model::new(p)?;
    let tol = c.tol.unwrap_or(1e-10);
    let mut r = aw_verify(&m.triple, tol);
    r.suite = "triple".into();
    r.merge(triple_checks(&m, tol));
    if let Some(dir) = &c.export {
        let t = &m.triple;
        let tr = &m.transitions;
        let files = [
            ("A.csv", &t.a),
            ("A_star.csv", &t.a_star),
            ("A_diam.csv", &t.a_diam),
            ("eigvecs_plain.csv", &t.eigvecs[0]),
            ("eigvecs_star.csv", &t.eigvecs[1]),
            ("eigvecs_diam.csv", &t.eigvecs[2]),
            ("P_plain_star.csv", &tr.p_plain_star),
            ("P_star_diam.csv", &tr.p_star_diam),
            ("P_diam_plain.csv", &tr.p_diam_plain),
        ];
        for (name, mat) in files {
            save_matrix_csv(&dir.join(name), mat).map_err(export_err)?;
        }
    }
    finish(r, start, c.format)
}

fn roots_csv(sets: &[&BetheRootSet]) -> String {
    let mut s = String::from("kind,epsilon,level,index,U_re,U_im,residual\n");
    for r in sets {
        let kind = serde_json::to_value(r.kind).unwrap();
        for (i, (u, res)) in r.sym_roots.iter().zip(&r.residuals).enumerate() {
            let _ = writeln!(
                s,
                "{},{},{},{i},{:e},{:e},{:e}",
                kind.as_str().unwrap_or(""),
                r.epsilon.sign(),
                r.level,
                u.re,
                u.im,
                res
            );
        }
    }
    s
}

fn roots_pretty(sets: &[&BetheRootSet]) -> String {
    let mut s = String::new();
    for r in sets {
        let kind = serde_json::to_value(r.kind).unwrap();
        let _ = writeln!(
            s,
            "{} eps={} level={} ({} roots, max residual {:.2e})",
            kind.as_str().unwrap_or(""),
            r.epsilon,
            r.level,
            r.len(),
            r.max_residual()
        );
        for u in &r.sym_roots {
            let _ = writeln!(s, "  U = {}", suites::fmt(*u));
        }
    }
    s
}

fn emit_json<T: Serialize>(v: &T) {
    println!("{}", serde_json::to_string_pretty(v).expect("serializes"));
}

fn emit_roots(c: &Common, sets: &[&BetheRootSet], json: impl FnOnce()) -> Result<(), Failure> {
    match c.format {
        Format::Json => json(),
        Format::Csv => print!("{}", roots_csv(sets)),
        Format::Pretty => print!("{}", roots_pretty(sets)),
    }
    if let Some(dir) = &c.export {
        fs::write(dir.join("roots.csv"), roots_csv(sets)).map_err(export_err)?;
    }
    Ok(())
}

fn cmd_bethe(c: &Common, p: &ParamSet, which: &BetheCmd) -> Result<(), Failure> {
    let cfg = solver_config(c);
    match which {
        BetheCmd::Hom { eps, level } => {
            let r = solve_hom(p, *eps, *level, &cfg)?;
            emit_roots(c, &[&r], || emit_json(&r))
        }
        BetheCmd::Inhom { eps, level: Some(level), .. } => {
            let r = solve_inhom(p, *eps, *level, &cfg)?;
            emit_roots(c, &[&r], || emit_json(&r))
        }
        BetheCmd::Inhom { eps, .. } => {
            let all = solve_inhom_all(p, *eps, &cfg)?;
            let sets: Vec<&BetheRootSet> = all.sets.iter().collect();
            emit_roots(c, &sets, || emit_json(&all))?;
            if all.sets.len() != p.dim() {
                return Err(Failure::Lib(Error::SolverFailure(format!(
                    "found {} of {} inhomogeneous solutions",
                    all.sets.len(),
                    p.dim()
                ))));
            }
            Ok(())
        }
        BetheCmd::Table1 => cmd_table1(c, &cfg),
    }
}

fn cmd_table1(c: &Common, cfg: &SolverConfig) -> Result<(), Failure> {
    let start = Instant::now();
    let p = golden::params();
    let mut checks = Vec::new();
    let mut notes = Vec::new();
    for n in 0..=2 {
        let runs = [
            ("hom", solve_hom(&p, Epsilon::Plus, n, cfg)?, golden::HOMOGENEOUS[n]),
            ("inhom", solve_inhom(&p, Epsilon::Minus, n, cfg)?, golden::INHOMOGENEOUS[n]),
        ];
        for (name, got, want) in runs {
            if got.sym_roots.len() != want.len() {
                checks.push(Check::new(format!("{name} N={n} count"), f64::INFINITY, golden::REL_TOL));
                continue;
            }
            for (k, (g, w)) in got.sym_roots.iter().zip(want).enumerate() {
                let dev = (g - C64::new(*w, 0.0)).norm() / w.abs();
                checks.push(Check::new(format!("{name} N={n} U{}", k + 1), dev, golden::REL_TOL));
                notes.push(format!("{name} N={n} U{}: computed {} golden {w}", k + 1, suites::fmt(*g)));
            }
        }
    }
    let mut r = VerifyReport::new("table1", &p, checks);
    r.notes = notes;
    finish(r, start, c.format)
}

fn cmd_verify(c: &Common, p: &ParamSet, suite: Suite) -> Result<(), Failure> {
    let start = Instant::now();
    let m = Model::new(p)?;
    let cfg = solver_config(c);
    let tol = Tolerances {
        residual: c.tol,
        rank: c.rank_tol,
    };
    let export = c.export.as_deref();
    let mut r = VerifyReport::new(
        match suite {
            Suite::Scalar => "scalar",
            Suite::Bs => "bs",
            Suite::Racah => "racah",
            Suite::All => "all",
        },
        p,
        vec![],
    );
    if matches!(suite, Suite::Scalar | Suite::All) {
        r.merge(suites::scalar(&m, &cfg, &tol, export)?);
    }
    if matches!(suite, Suite::Bs | Suite::All) {
        r.merge(suites::bs(&m, c.seed, &tol, export)?);
    }
    if matches!(suite, Suite::Racah | Suite::All) {
        r.merge(suites::racah(&m, &cfg, &tol)?);
    }
    finish(r, start, c.format)
}

#[derive(Serialize)]
struct RacahRow {
    m: usize,
    n: usize,
    phi43: C64,
    ratio: C64,
    det: C64,
    max_rel_dev: f64,
}

fn cmd_racah(c: &Common, p: &ParamSet, m_sel: Option<usize>, n_sel: Option<usize>) -> Result<(), Failure> {
    let model = Model::new(p)?;
    let cfg = solver_config(c);
    let two_s = p.two_s();
    for sel in [m_sel, n_sel].into_iter().flatten() {
        if sel > two_s {
            return Err(config_err(format!("index {sel} exceeds 2s = {two_s}")));
        }
    }
    let tol = c.tol.unwrap_or(1e-6);
    let mut rows = Vec::new();
    for n in (0..=two_s).filter(|n| n_sel.is_none_or(|s| s == *n)) {
        let h = solve_hom(p, Epsilon::Plus, n, &cfg)?;
        let i = solve_inhom(p, Epsilon::Minus, n, &cfg)?;
        for m in (0..=two_s).filter(|m| m_sel.is_none_or(|s| s == *m)) {
            let phi43 = racah_eval(p, Label::Plain, Label::Diamond, m, n)?;
            let ratio = racah_bethe::scalprod::racah_scalar_ratio(&model, m, &h)?;
            let det = racah_bethe::bslinear::racah_via_det(&model, m, &i, c.seed, 3)?.value;
            let dev = [ratio, det]
                .iter()
                .map(|v| (v - phi43).norm() / phi43.norm().max(1e-300))
                .fold(0.0, f64::max);
            rows.push(RacahRow { m, n, phi43, ratio, det, max_rel_dev: dev });
        }
    }
    let csv = {
        let mut s = String::from("M,N,phi43_re,phi43_im,ratio_re,ratio_im,det_re,det_im,max_rel_dev\n");
        for r in &rows {
            let _ = writeln!(
                s,
                "{},{},{:e},{:e},{:e},{:e},{:e},{:e},{:e}",
                r.m, r.n, r.phi43.re, r.phi43.im, r.ratio.re, r.ratio.im, r.det.re, r.det.im, r.max_rel_dev
            );
        }
        s
    };
    match c.format {
        Format::Json => emit_json(&rows),
        Format::Csv => print!("{csv}"),
        Format::Pretty => {
            for r in &rows {
                println!(
                    "R_{}(theta*_{}) = {}  ratio {}  det {}  (dev {:.1e})",
                    r.m,
                    r.n,
                    suites::fmt(r.phi43),
                    suites::fmt(r.ratio),
                    suites::fmt(r.det),
                    r.max_rel_dev
                );
            }
        }
    }
    if let Some(dir) = &c.export {
        fs::write(dir.join("racah.csv"), &csv).map_err(export_err)?;
    }
    if rows.iter().any(|r| r.max_rel_dev.is_nan() || r.max_rel_dev >= tol) {
        return Err(Failure::Identity("q-Racah routes disagree".into()));
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<(), Failure> {
    validate(&cli.common)?;
    let c = &cli.common;
    if let Cmd::Bethe { which: BetheCmd::Table1 } = &cli.cmd {
        return cmd_table1(c, &solver_config(c));
    }
    let p = load_params(c)?;
    match &cli.cmd {
        Cmd::Triple => cmd_triple(c, &p),
        Cmd::Bethe { which } => cmd_bethe(c, &p, which),
        Cmd::Verify { suite } => cmd_verify(c, &p, *suite),
        Cmd::Racah { m, n } => cmd_racah(c, &p, *m, *n),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
        Err(Failure::Identity(msg)) => {
            eprintln!("identity failure: {msg}");
            ExitCode::from(4)
        }
    }
}
