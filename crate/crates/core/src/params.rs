//! Parameter sets of a Leonard triple of q-Racah type.
//!
//! A [`ParamSet`] holds q, r0, the three scalars b, b*, b⋄ and the spin s
//! (stored as the integer 2s). The partner scalars follow from
//! r0⁻² = b·c = b*·c* = b⋄·c⋄, and the spectra are θ^a_M = b^a q^{2M} + c^a q^{-2M}.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as C64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance of the degeneracy gates.
pub const DEGENERACY_TOL: f64 = 1e-8;

/// One of the three members A, A*, A⋄ of the triple.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Plain,
    Star,
    Diamond,
}

impl Label {
    pub const ALL: [Label; 3] = [Label::Plain, Label::Star, Label::Diamond];

    pub fn index(self) -> usize {
        match self {
            Label::Plain => 0,
            Label::Star => 1,
            Label::Diamond => 2,
        }
    }

    /// Cyclic successor: · → * → ⋄ → ·.
    pub fn next(self) -> Label {
        match self {
            Label::Plain => Label::Star,
            Label::Star => Label::Diamond,
            Label::Diamond => Label::Plain,
        }
    }

    pub fn prev(self) -> Label {
        self.next().next()
    }

    /// The label distinct from `a` and `b`.
    pub fn third(a: Label, b: Label) -> Label {
        assert_ne!(a, b, "labels must differ");
        Label::ALL.into_iter().find(|&l| l != a && l != b).unwrap()
    }

    /// Whether (a, b, c) is one of (·,*,⋄), (*,⋄,·), (⋄,·,*).
    pub fn is_cyclic(a: Label, b: Label, c: Label) -> bool {
        b == a.next() && c == b.next()
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Label::Plain => "·",
            Label::Star => "*",
            Label::Diamond => "⋄",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl FromStr for Label {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "." | "·" | "a" | "plain" => Ok(Label::Plain),
            "*" | "star" | "s" => Ok(Label::Star),
            "⋄" | "d" | "diam" | "diamond" => Ok(Label::Diamond),
            other => Err(Error::Config(format!("unknown label '{other}'"))),
        }
    }
}

/// Scalar data of a triple instance.
#[derive(Clone, Debug, PartialEq)]
pub struct ParamSet {
    q: C64,
    r0: C64,
    b: [C64; 3],
    two_s: usize,
}

/// Parameters of an ordered label triple (a, b, c). For anti-cyclic orderings the
/// c-scalars are reversed: b^c → c^c q^{-4s}, c^c → b^c q^{4s}.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Ordered {
    pub q: C64,
    pub r0: C64,
    pub n: i32,
    pub ba: C64,
    pub ca: C64,
    pub bb: C64,
    pub cb: C64,
    pub bc: C64,
    pub cc: C64,
}

fn close(x: C64, y: C64) -> bool {
    (x - y).norm() <= DEGENERACY_TOL * x.norm().max(y.norm())
}

impl ParamSet {
    /// Builds and validates a parameter set. `two_s` is twice the spin.
    pub fn new(q: C64, r0: C64, b: C64, b_star: C64, b_diam: C64, two_s: usize) -> Result<Self> {
        let p = Self::new_unchecked(q, r0, b, b_star, b_diam, two_s);
        p.check_conditions()?;
        Ok(p)
    }

    /// Builds a parameter set without the degeneracy gates.
    pub fn new_unchecked(q: C64, r0: C64, b: C64, b_star: C64, b_diam: C64, two_s: usize) -> Self {
        ParamSet {
            q,
            r0,
            b: [b, b_star, b_diam],
            two_s,
        }
    }

    /// Real-valued convenience constructor.
    pub fn real(q: f64, r0: f64, b: f64, b_star: f64, b_diam: f64, two_s: usize) -> Result<Self> {
        Self::new(q.into(), r0.into(), b.into(), b_star.into(), b_diam.into(), two_s)
    }

    /// The parameters of the worked example with q=3, r0=1, b=5, b*=7, b⋄=1/2, s=1.
    pub fn table1() -> Self {
        Self::real(3.0, 1.0, 5.0, 7.0, 0.5, 2).expect("valid parameters")
    }

    pub fn q(&self) -> C64 {
        self.q
    }
    pub fn r0(&self) -> C64 {
        self.r0
    }
    pub fn two_s(&self) -> usize {
        self.two_s
    }
    pub fn spin(&self) -> f64 {
        self.two_s as f64 / 2.0
    }
    /// Dimension 2s+1.
    pub fn dim(&self) -> usize {
        self.two_s + 1
    }
    pub(crate) fn n(&self) -> i32 {
        self.two_s as i32
    }

    pub fn b(&self, l: Label) -> C64 {
        self.b[l.index()]
    }

    /// c^a = 1/(r0² b^a).
    pub fn c(&self, l: Label) -> C64 {
        1.0 / (self.r0 * self.r0 * self.b(l))
    }

    /// θ^a_M = b^a q^{2M} + c^a q^{-2M}.
    pub fn theta(&self, l: Label, m: usize) -> C64 {
        let q2m = self.q.powi(2 * m as i32);
        self.b(l) * q2m + self.c(l) / q2m
    }

    /// θ^a at the formal index M = s, i.e. b^a q^{2s} + c^a q^{-2s}.
    pub fn theta_mid(&self, l: Label) -> C64 {
        let q2s = self.q.powi(self.n());
        self.b(l) * q2s + self.c(l) / q2s
    }

    pub fn spectrum(&self, l: Label) -> Vec<C64> {
        (0..self.dim()).map(|m| self.theta(l, m)).collect()
    }

    /// ζ² = c⋄ r0 q^{-2s}.
    pub fn zeta2(&self) -> C64 {
        self.c(Label::Diamond) * self.r0 * self.q.powi(-self.n())
    }

    /// All scalars real (imaginary parts exactly zero).
    pub fn is_real(&self) -> bool {
        self.q.im == 0.0 && self.r0.im == 0.0 && self.b.iter().all(|x| x.im == 0.0)
    }

    pub(crate) fn ordered(&self, a: Label, b: Label, c: Label) -> Ordered {
        let n = self.n();
        let (mut bc, mut cc) = (self.b(c), self.c(c));
        if !Label::is_cyclic(a, b, c) {
            let q4s = self.q.powi(2 * n);
            let (nb, nc) = (cc / q4s, bc * q4s);
            bc = nb;
            cc = nc;
        }
        Ordered {
            q: self.q,
            r0: self.r0,
            n,
            ba: self.b(a),
            ca: self.c(a),
            bb: self.b(b),
            cb: self.c(b),
            bc,
            cc,
        }
    }

    /// Validates q, the nonzero scalars, and conditions (i) and (ii) for the three
    /// cyclic orderings.
    pub fn check_conditions(&self) -> Result<()> {
        let q = self.q;
        let n = self.n();
        let finite = |x: C64| x.re.is_finite() && x.im.is_finite();
        if self.two_s == 0 {
            return Err(Error::Domain("spin must be at least 1/2".into()));
        }
        if !finite(q) || q.norm() == 0.0 {
            return Err(Error::Domain("q must be finite and nonzero".into()));
        }
        for m in 1..=2 * n {
            let q2m = q.powi(2 * m);
            if (q2m - 1.0).norm() <= DEGENERACY_TOL * q2m.norm().max(1.0) {
                return Err(Error::Domain(format!("q^{} = 1", 2 * m)));
            }
        }
        if !finite(self.r0) || self.r0.norm() == 0.0 {
            return Err(Error::Domain("r0 must be finite and nonzero".into()));
        }
        for l in Label::ALL {
            if !finite(self.b(l)) || self.b(l).norm() == 0.0 {
                return Err(Error::Domain(format!("b{} must be finite and nonzero", l)));
            }
        }
        for l in Label::ALL {
            let ratio = self.b(l) / self.c(l);
            for m in 1..2 * n {
                if close(ratio, q.powi(-2 * m)) {
                    return Err(Error::degenerate(
                        "(i)",
                        format!("b{l}/c{l} = q^-{} (spectrum of A{l} has a multiplicity)", 2 * m),
                    ));
                }
            }
        }
        let r0 = self.r0;
        for a in Label::ALL {
            let (b, c) = (a.next(), a.next().next());
            let (ba, ca, bb, cb, bc, cc) = (
                self.b(a),
                self.c(a),
                self.b(b),
                self.c(b),
                self.b(c),
                self.c(c),
            );
            for m in 1..=n {
                let tests = [
                    (cb, -r0 * q.powi(1 - 2 * m) * ca * cc),
                    (ba, -r0 * q.powi(1 - 2 * m + 2 * n) * bb * bc),
                    (ca, -r0 * q.powi(2 * m + 2 * n - 1) * bb * bc),
                    (cb, -r0 * q.powi(2 * m - 1) * ba * cc),
                ];
                for (x, y) in tests {
                    if close(x, y) {
                        return Err(Error::degenerate(
                            "(ii)",
                            format!("ordering ({a},{b},{c}) at M={m}: an off-diagonal entry vanishes"),
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    /// Canonical one-line description used for hashing and reports.
    pub fn canonical_string(&self) -> String {
        let f = |x: C64| format!("{:e}{:+e}i", x.re, x.im);
        format!(
            "q={} r0={} b={} bstar={} bdiam={} 2s={}",
            f(self.q),
            f(self.r0),
            f(self.b[0]),
            f(self.b[1]),
            f(self.b[2]),
            self.two_s
        )
    }

    /// Parses a `key = value` configuration. Keys: q, r0, b, bstar, bdiam, s.
    /// Complex values are written as "re+imi"; s accepts "1/2", "1", "1.5".
    pub fn from_config(text: &str) -> Result<Self> {
        let mut vals: [Option<C64>; 5] = [None; 5];
        let mut spin: Option<usize> = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected 'key = value'", lineno + 1))
            })?;
            let key = key.trim().to_ascii_lowercase();
            let value = value.trim();
            let slot = match key.as_str() {
                "q" => 0,
                "r0" => 1,
                "b" => 2,
                "bstar" | "b*" => 3,
                "bdiam" | "b⋄" => 4,
                "s" => {
                    spin = Some(parse_spin(value).map_err(|e| {
                        Error::Config(format!("line {}: {}", lineno + 1, e))
                    })?);
                    continue;
                }
                other => {
                    return Err(Error::Config(format!(
                        "line {}: unknown key '{other}'",
                        lineno + 1
                    )))
                }
            };
            vals[slot] = Some(
                parse_complex(value)
                    .map_err(|e| Error::Config(format!("line {}: {}", lineno + 1, e)))?,
            );
        }
        let names = ["q", "r0", "b", "bstar", "bdiam"];
        let mut got = [C64::new(0.0, 0.0); 5];
        for i in 0..5 {
            got[i] = vals[i].ok_or_else(|| Error::Config(format!("missing key '{}'", names[i])))?;
        }
        let two_s = spin.ok_or_else(|| Error::Config("missing key 's'".into()))?;
        ParamSet::new(got[0], got[1], got[2], got[3], got[4], two_s)
    }

    /// Draws a random real parameter set that passes the degeneracy gates.
    /// Ranges are kept moderate so that double precision suffices for s ≤ 2.
    pub fn random_real<R: Rng + ?Sized>(rng: &mut R, two_s: usize) -> Self {
        loop {
            let q = rng.random_range(1.15..1.5);
            let r0 = rng.random_range(0.7..1.4);
            let mut draw = || {
                let m: f64 = rng.random_range(0.4..2.5);
                if rng.random_bool(0.5) {
                    m
                } else {
                    -m
                }
            };
            let (b, bs, bd) = (draw(), draw(), draw());
            if let Ok(p) = Self::real(q, r0, b, bs, bd, two_s) {
                return p;
            }
        }
    }

    /// Draws a random complex parameter set near the real ranges of [`random_real`](Self::random_real).
    pub fn random_complex<R: Rng + ?Sized>(rng: &mut R, two_s: usize) -> Self {
        loop {
            let mut near = |lo: f64, hi: f64, spread: f64| {
                let m: f64 = rng.random_range(lo..hi);
                let ph: f64 = rng.random_range(-spread..spread);
                C64::from_polar(m, ph)
            };
            let q = near(1.15, 1.5, 0.2);
            let r0 = near(0.7, 1.4, 0.2);
            let (b, bs, bd) = (near(0.4, 2.5, 3.0), near(0.4, 2.5, 3.0), near(0.4, 2.5, 3.0));
            if let Ok(p) = Self::new(q, r0, b, bs, bd, two_s) {
                return p;
            }
        }
    }
}

/// Parses "re", "imi", "re+imi" or "re-imi" (also accepts a bare "i").
pub fn parse_complex(s: &str) -> std::result::Result<C64, String> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        return Err("empty value".into());
    }
    let bad = || format!("cannot parse complex number '{s}'");
    let num = |x: &str| -> std::result::Result<f64, String> {
        match x {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => x.parse::<f64>().map_err(|_| bad()),
        }
    };
    if let Some(body) = t.strip_suffix(['i', 'j']) {
        let bytes = body.as_bytes();
        let split = (1..bytes.len())
            .rev()
            .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
        match split {
            Some(k) => {
                let re = body[..k].parse::<f64>().map_err(|_| bad())?;
                Ok(C64::new(re, num(&body[k..])?))
            }
            None => Ok(C64::new(0.0, num(body)?)),
        }
    } else {
        Ok(C64::new(t.parse::<f64>().map_err(|_| bad())?, 0.0))
    }
}

/// Parses a spin such as "1/2", "3/2", "1" or "1.5" into 2s.
pub fn parse_spin(s: &str) -> std::result::Result<usize, String> {
    let t = s.trim();
    let two_s = if let Some((a, b)) = t.split_once('/') {
        let a: usize = a.trim().parse().map_err(|_| format!("bad spin '{t}'"))?;
        let b: usize = b.trim().parse().map_err(|_| format!("bad spin '{t}'"))?;
        match b {
            1 => 2 * a,
            2 => a,
            _ => return Err(format!("spin '{t}' is not a half-integer")),
        }
    } else {
        let v: f64 = t.parse().map_err(|_| format!("bad spin '{t}'"))?;
        let d = 2.0 * v;
        if d < 0.0 || (d - d.round()).abs() > 1e-12 {
            return Err(format!("spin '{t}' is not a half-integer"));
        }
        d.round() as usize
    };
    if two_s == 0 {
        return Err("spin must be at least 1/2".into());
    }
    Ok(two_s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_parsing() {
        assert_eq!(parse_complex("3").unwrap(), C64::new(3.0, 0.0));
        assert_eq!(parse_complex("1+2i").unwrap(), C64::new(1.0, 2.0));
        assert_eq!(parse_complex("1.5-0.25i").unwrap(), C64::new(1.5, -0.25));
        assert_eq!(parse_complex("-i").unwrap(), C64::new(0.0, -1.0));
        assert_eq!(parse_complex("2i").unwrap(), C64::new(0.0, 2.0));
        assert_eq!(parse_complex("1e-3+2e+1i").unwrap(), C64::new(1e-3, 20.0));
        assert_eq!(parse_complex(" -2 + 3i ").unwrap(), C64::new(-2.0, 3.0));
        assert!(parse_complex("abc").is_err());
        assert!(parse_complex("").is_err());
    }

    #[test]
    fn spin_parsing() {
        assert_eq!(parse_spin("1/2"), Ok(1));
        assert_eq!(parse_spin("3/2"), Ok(3));
        assert_eq!(parse_spin("1"), Ok(2));
        assert_eq!(parse_spin("1.5"), Ok(3));
        assert!(parse_spin("1/3").is_err());
        assert!(parse_spin("0").is_err());
        assert!(parse_spin("0.3").is_err());
    }

    #[test]
    fn config_roundtrip() {
        let p = ParamSet::from_config("# table\nq = 3\nr0 = 1\nb = 5\nbstar = 7\nbdiam = 0.5\ns = 1\n")
            .unwrap();
        assert_eq!(p, ParamSet::table1());
        assert!(matches!(
            ParamSet::from_config("q = 3\nr0 = 1\n"),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            ParamSet::from_config("q 3"),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            ParamSet::from_config("q = 3\nr0=1\nb=5\nbstar=7\nbdiam=0.5\ns=1\nfoo=2"),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn derived_scalars() {
        let p = ParamSet::table1();
        assert!((p.c(Label::Plain) - 0.2).norm() < 1e-15);
        assert!((p.theta(Label::Plain, 0) - 5.2).norm() < 1e-13);
        assert!((p.theta(Label::Plain, 1) - (45.0 + 1.0 / 45.0)).norm() < 1e-12);
        // ζ⁻² = b⋄ r0 q^{2s}
        let z2 = p.zeta2();
        let rhs = p.b(Label::Diamond) * p.r0() * p.q().powi(p.two_s() as i32);
        assert!((1.0 / z2 - rhs).norm() < 1e-14);
    }

    #[test]
    fn gates() {
        // b/c = q^{-2}: b = 1/(q r0)
        let q = 1.3;
        let err = ParamSet::real(q, 1.0, 1.0 / q, 0.7, 1.1, 2).unwrap_err();
        assert!(matches!(err, Error::DegenerateParams { condition: "(i)", .. }));
        assert!(matches!(ParamSet::real(1.0, 1.0, 2.0, 0.7, 1.1, 2), Err(Error::Domain(_))));
        assert!(matches!(ParamSet::real(-1.0, 1.0, 2.0, 0.7, 1.1, 2), Err(Error::Domain(_))));
        // c* = -r0 q^{-1} c c⋄ at M=1 for the ordering (·,*,⋄)
        let (q, r0, b, bd) = (1.3f64, 1.0f64, 0.8f64, 1.7f64);
        let c = 1.0 / (r0 * r0 * b);
        let cd = 1.0 / (r0 * r0 * bd);
        let cs = -r0 / q * c * cd;
        let bs = 1.0 / (r0 * r0 * cs);
        let err = ParamSet::real(q, r0, b, bs, bd, 2).unwrap_err();
        assert!(matches!(err, Error::DegenerateParams { condition: "(ii)", .. }));
    }

    #[test]
    fn ordering() {
        assert!(Label::is_cyclic(Label::Plain, Label::Star, Label::Diamond));
        assert!(Label::is_cyclic(Label::Diamond, Label::Plain, Label::Star));
        assert!(!Label::is_cyclic(Label::Star, Label::Plain, Label::Diamond));
        assert_eq!(Label::third(Label::Plain, Label::Diamond), Label::Star);
        assert_eq!("⋄".parse::<Label>().unwrap(), Label::Diamond);
    }
}
