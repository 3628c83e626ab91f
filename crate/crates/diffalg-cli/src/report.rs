//! Machine-readable reports with a stable, versioned schema.
//!
//! Field order is fixed by the struct definitions; identical input and seed
//! produce byte-identical serialized reports except for the trailing timing
//! field. Certificates are emitted in re-parseable expression syntax.

use std::collections::BTreeMap;

use serde::Serialize;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub engine_version: String,
    pub command: String,
    pub input: InputEcho,
    pub seed: u64,
    pub payload: Payload,
    pub timing_ms: u128,
}

#[derive(Debug, Serialize)]
pub struct InputEcho {
    pub tower: Vec<String>,
    pub expressions: BTreeMap<String, String>,
    pub options: BTreeMap<String, String>,
}

#[derive(Debug, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Payload {
    Analyze {
        verdict: String,
        witnesses: Vec<WitnessOut>,
        certificate: Option<CertificateOut>,
        symbolic_check: Option<bool>,
        numeric_check: Option<bool>,
        decomposition: DecompositionOut,
    },
    IsomonoVerify {
        holds: bool,
        numeric_check: bool,
    },
    IsomonoSolve {
        witness: Option<Vec<Vec<String>>>,
        degree_cap: usize,
        verified: Option<bool>,
        numeric_check: Option<bool>,
    },
    SeqCheck {
        i0: i64,
        start: i64,
        horizon: usize,
        first: Vec<Vec<String>>,
        last: Vec<Vec<String>>,
        skipped: Vec<i64>,
        certificate_symbolic: Option<bool>,
        certificate_numeric: Option<bool>,
        certificate_agrees: Option<bool>,
    },
    VerifyCert {
        symbolic: bool,
        numeric: bool,
    },
    Error {
        code: String,
        message: String,
    },
}

#[derive(Debug, Serialize)]
pub struct WitnessOut {
    pub class: usize,
    pub representative: String,
    pub k: i64,
    pub value: i64,
}

#[derive(Debug, Serialize)]
pub struct CertificateOut {
    pub word: String,
    pub exponents: Vec<i64>,
    pub b: String,
    pub l_table: Vec<LEntry>,
    pub u: u32,
}

#[derive(Debug, Serialize)]
pub struct LEntry {
    pub k: i64,
    pub d: i64,
    pub class: usize,
    pub exponent: i64,
}

#[derive(Debug, Serialize)]
pub struct DecompositionOut {
    pub lambda: String,
    pub t: i64,
    pub n_window: i64,
    pub r_classes: usize,
    pub classes: Vec<ClassOut>,
}

#[derive(Debug, Serialize)]
pub struct ClassOut {
    pub representative: String,
    pub terms: Vec<TermOut>,
}

#[derive(Debug, Serialize)]
pub struct TermOut {
    pub k: i64,
    pub d: i64,
    pub exponent: i64,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Human rendering; one labeled line per fact.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut line = |s: String| {
            out.push_str(&s);
            out.push('\n');
        };
        line(format!("command: {}", self.command));
        match &self.payload {
            Payload::Analyze {
                verdict,
                witnesses,
                certificate,
                symbolic_check,
                numeric_check,
                decomposition,
            } => {
                line(format!("verdict: {verdict}"));
                line(format!(
                    "decomposition: lambda = {}, t = {}, N = {}, R = {}",
                    decomposition.lambda,
                    decomposition.t,
                    decomposition.n_window,
                    decomposition.r_classes
                ));
                for w in witnesses {
                    line(format!(
                        "witness: a[class {}, k {}] = {} (representative {})",
                        w.class, w.k, w.value, w.representative
                    ));
                }
                if let Some(c) = certificate {
                    line(format!("word: {}", c.word));
                    line(format!("b: {}", c.b));
                    line(format!("u: {}", c.u));
                    for l in &c.l_table {
                        line(format!(
                            "l[k {}, d {}, class {}] = {}",
                            l.k, l.d, l.class, l.exponent
                        ));
                    }
                }
                if let Some(s) = symbolic_check {
                    line(format!("symbolic check: {s}"));
                }
                if let Some(n) = numeric_check {
                    line(format!("numeric check: {n}"));
                }
            }
            Payload::IsomonoVerify {
                holds,
                numeric_check,
            } => {
                line(format!("isomonodromic: {holds}"));
                line(format!("numeric check: {numeric_check}"));
            }
            Payload::IsomonoSolve {
                witness,
                degree_cap,
                verified,
                numeric_check,
            } => {
                match witness {
                    Some(rows) => {
                        line("witness: found".into());
                        for r in rows {
                            line(format!("  [{}]", r.join(", ")));
                        }
                    }
                    None => line(format!("witness: none within degree cap {degree_cap}")),
                }
                if let Some(v) = verified {
                    line(format!("verified: {v}"));
                }
                if let Some(n) = numeric_check {
                    line(format!("numeric check: {n}"));
                }
            }
            Payload::SeqCheck {
                i0,
                start,
                horizon,
                first,
                last,
                skipped,
                certificate_symbolic,
                certificate_numeric,
                certificate_agrees,
            } => {
                line(format!("i0: {i0} (effective start {start}), horizon {horizon}"));
                line(format!("first: {first:?}"));
                line(format!("last: {last:?}"));
                if !skipped.is_empty() {
                    line(format!("skipped: {skipped:?}"));
                }
                if let Some(s) = certificate_symbolic {
                    line(format!("certificate symbolic: {s}"));
                }
                if let Some(n) = certificate_numeric {
                    line(format!("certificate numeric: {n}"));
                }
                if let Some(a) = certificate_agrees {
                    line(format!("certificate agrees: {a}"));
                }
            }
            Payload::VerifyCert { symbolic, numeric } => {
                line(format!("symbolic: {symbolic}"));
                line(format!("numeric: {numeric}"));
            }
            Payload::Error { code, message } => {
                line(format!("error: {code}"));
                line(format!("message: {message}"));
            }
        }
        line(format!("seed: {}", self.seed));
        line(format!("engine: {}", self.engine_version));
        line(format!("timing_ms: {}", self.timing_ms));
        out
    }
}
