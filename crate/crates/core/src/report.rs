//! Verification reports and CSV export.

use std::fmt::Write as _;
use std::io::{self, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::linalg::CMat;
use crate::params::ParamSet;

/// One identity check. `pass` holds iff the residual is finite and below the tolerance.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            residual,
            tolerance,
            pass: residual.is_finite() && residual < tolerance,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct VerifyReport {
    pub suite: String,
    pub params_hash: String,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub runtime_ms: Option<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub notes: Vec<String>,
}

/// First 16 hex digits of the SHA-256 of the canonical parameter string.
pub fn params_hash(p: &ParamSet) -> String {
    let digest = Sha256::digest(p.canonical_string().as_bytes());
    digest.iter().take(8).fold(String::new(), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

impl VerifyReport {
    pub fn new(suite: impl Into<String>, p: &ParamSet, checks: Vec<Check>) -> Self {
        VerifyReport {
            suite: suite.into(),
            params_hash: params_hash(p),
            checks,
            runtime_ms: None,
            notes: vec![],
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn max_residual(&self) -> f64 {
        self.checks.iter().map(|c| c.residual).fold(0.0, f64::max)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    /// Appends the checks of `other`, prefixing their names with its suite.
    pub fn merge(&mut self, other: VerifyReport) {
        for mut c in other.checks {
            c.name = format!("{}/{}", other.suite, c.name);
            self.checks.push(c);
        }
        self.notes.extend(other.notes);
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("suite,params_hash,name,residual,tolerance,pass\n");
        for c in &self.checks {
            let _ = writeln!(
                s,
                "{},{},\"{}\",{:e},{:e},{}",
                self.suite, self.params_hash, c.name, c.residual, c.tolerance, c.pass
            );
        }
        s
    }

    pub fn to_pretty(&self) -> String {
        let mut s = format!("suite {} (params {})\n", self.suite, self.params_hash);
        for c in &self.checks {
            let _ = writeln!(
                s,
                "  [{}] {:<40} {:>10.3e}  (tol {:.1e})",
                if c.pass { "pass" } else { "FAIL" },
                c.name,
                c.residual,
                c.tolerance
            );
        }
        for n in &self.notes {
            let _ = writeln!(s, "  note: {n}");
        }
        let _ = writeln!(
            s,
            "{}: {}/{} checks passed",
            if self.passed() { "PASS" } else { "FAIL" },
            self.checks.iter().filter(|c| c.pass).count(),
            self.checks.len()
        );
        s
    }
}

/// Writes a complex matrix as CSV, row-major, one "re,im" cell per entry.
pub fn write_matrix_csv<W: Write>(mut w: W, m: &CMat) -> io::Result<()> {
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols())
            .map(|j| format!("\"{:e},{:e}\"", m[(i, j)].re, m[(i, j)].im))
            .collect();
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}

pub fn save_matrix_csv(path: &Path, m: &CMat) -> io::Result<()> {
    let f = std::fs::File::create(path)?;
    write_matrix_csv(io::BufWriter::new(f), m)
}
