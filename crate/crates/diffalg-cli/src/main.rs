//! Command-line front-end: tower configuration, expression parsing, and
//! machine-readable reports for the engine operations.
//!
//! Exit codes: `analyze` 0 = dependent, 1 = independent; `verify-cert`
//! 0 = valid, 1 = invalid; `isomono` 0 = holds / witness found, 1 = fails /
//! none within the cap; `seq-check` 0 = success, 1 = certificate disagrees.
//! Every command exits 2 on error with a machine-readable code in the report.

mod parser;
mod report;

use std::collections::BTreeMap;
use std::io::Read;
use std::time::Instant;

use clap::{Parser as ClapParser, Subcommand, ValueEnum};
use num_rational::BigRational;

use diffalg::dependence::{
    analyze, verify_certificate, Certificate, MultiplicativeWord, Verdict,
};
use diffalg::field::FieldElement;
use diffalg::isomono::{
    companion, is_isomonodromic, verify_isomonodromic, GaugeWitness, LinearSystem,
};
use diffalg::matrix::Mat;
use diffalg::seq::{
    check_certificate_numeric, check_isomonodromy_numeric, fundamental_matrix, SamplePlan,
};
use diffalg::{Action, EngineError, TowerSpec, VarSpec};

use parser::{parse_expression, ParseError};
use report::{
    CertificateOut, ClassOut, DecompositionOut, InputEcho, LEntry, Payload, Report, TermOut,
    WitnessOut, SCHEMA_VERSION,
};

#[derive(ClapParser)]
#[command(
    name = "diffalg",
    version,
    about = "Exact dependence and isomonodromy tests for linear difference equations"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum IsomonoMode {
    Verify,
    Solve,
}

#[derive(Subcommand)]
enum Cmd {
    /// Decide sigma-algebraic (in)dependence of solutions of phi(y) = a*y.
    Analyze {
        /// Coefficient a as an expression; read from stdin when omitted.
        expr: Option<String>,
        /// Variable declaration, repeatable: "z: phi=z+1, sigma=z+t".
        #[arg(long = "var")]
        vars: Vec<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Samples for the numeric cross-check of certificates.
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long = "z-range", default_value_t = 50)]
        z_range: i64,
        #[arg(long)]
        json: bool,
    },
    /// Verify or solve the gauge equation phi(B) = sigma(A) B A^{-1}.
    Isomono {
        #[arg(long, value_enum)]
        mode: IsomonoMode,
        /// System matrix, e.g. "[[0,1],[-c0,-c1]]" with expression entries.
        #[arg(long = "matrix-a")]
        matrix_a: Option<String>,
        /// Scalar-equation coefficients "c0; c1; ..." (companion form).
        #[arg(long)]
        companion: Option<String>,
        /// Witness matrix (verify mode).
        #[arg(long = "matrix-b")]
        matrix_b: Option<String>,
        #[arg(long = "var")]
        vars: Vec<String>,
        #[arg(long = "degree-cap", default_value_t = 20)]
        degree_cap: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[arg(long = "z-range", default_value_t = 50)]
        z_range: i64,
        #[arg(long)]
        json: bool,
    },
    /// Build a fundamental-matrix frame in the sequence model.
    SeqCheck {
        #[arg(long = "matrix-a")]
        matrix_a: Option<String>,
        #[arg(long)]
        companion: Option<String>,
        #[arg(long, default_value_t = 0)]
        i0: i64,
        #[arg(long, default_value_t = 10)]
        horizon: usize,
        /// Exact parameter values "t=1/3,q=2"; unassigned parameters default
        /// to 1/(3+2*level).
        #[arg(long)]
        params: Option<String>,
        /// Advance i0 past indices where A is singular or undefined.
        #[arg(long = "auto-advance")]
        auto_advance: bool,
        /// Optional certificate to corroborate: coefficient a.
        #[arg(long = "cert-a")]
        cert_a: Option<String>,
        /// Word exponents "n0,n1,...".
        #[arg(long = "cert-word")]
        cert_word: Option<String>,
        /// Witness b of the certificate.
        #[arg(long = "cert-b")]
        cert_b: Option<String>,
        #[arg(long = "var")]
        vars: Vec<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long = "z-range", default_value_t = 50)]
        z_range: i64,
        #[arg(long)]
        json: bool,
    },
    /// Check a certificate prod_r sigma^r(a)^{n_r} = phi(b)/b symbolically
    /// and numerically.
    VerifyCert {
        /// Coefficient a; read from stdin when omitted.
        expr: Option<String>,
        /// Word exponents "n0,n1,...".
        #[arg(long)]
        word: String,
        #[arg(long = "witness-b")]
        witness_b: String,
        #[arg(long = "var")]
        vars: Vec<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long = "z-range", default_value_t = 50)]
        z_range: i64,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug)]
struct CliError {
    code: String,
    message: String,
}

impl From<EngineError> for CliError {
    fn from(e: EngineError) -> Self {
        CliError {
            code: e.code().into(),
            message: e.to_string(),
        }
    }
}

impl From<ParseError> for CliError {
    fn from(e: ParseError) -> Self {
        CliError {
            code: e.code().into(),
            message: String::from(e),
        }
    }
}

fn bad_input(message: impl Into<String>) -> CliError {
    CliError {
        code: "invalid-input".into(),
        message: message.into(),
    }
}

fn main() {
    let cli = Cli::parse();
    std::process::exit(run(cli));
}

fn run(cli: Cli) -> i32 {
    let started = Instant::now();
    let (command, vars, seed, json) = match &cli.cmd {
        Cmd::Analyze { vars, seed, json, .. } => ("analyze", vars.clone(), *seed, *json),
        Cmd::Isomono { vars, seed, json, .. } => ("isomono", vars.clone(), *seed, *json),
        Cmd::SeqCheck { vars, seed, json, .. } => ("seq-check", vars.clone(), *seed, *json),
        Cmd::VerifyCert { vars, seed, json, .. } => ("verify-cert", vars.clone(), *seed, *json),
    };
    let mut expressions = BTreeMap::new();
    let mut options = BTreeMap::new();
    let outcome = dispatch(&cli.cmd, &mut expressions, &mut options);
    let (payload, exit) = match outcome {
        Ok((payload, exit)) => (payload, exit),
        Err(e) => (
            Payload::Error {
                code: e.code,
                message: e.message,
            },
            2,
        ),
    };
    let report = Report {
        schema_version: SCHEMA_VERSION,
        engine_version: env!("CARGO_PKG_VERSION").into(),
        command: command.into(),
        input: InputEcho {
            tower: vars,
            expressions,
            options,
        },
        seed,
        payload,
        timing_ms: started.elapsed().as_millis(),
    };
    if json {
        println!("{}", report.to_json());
    } else {
        print!("{}", report.to_text());
    }
    exit
}

fn dispatch(
    cmd: &Cmd,
    expressions: &mut BTreeMap<String, String>,
    options: &mut BTreeMap<String, String>,
) -> Result<(Payload, i32), CliError> {
    match cmd {
        Cmd::Analyze {
            expr,
            vars,
            seed,
            trials,
            z_range,
            ..
        } => {
            let tower = build_tower(vars)?;
            let text = read_expr(expr)?;
            expressions.insert("a".into(), text.clone());
            options.insert("trials".into(), trials.to_string());
            options.insert("z_range".into(), z_range.to_string());
            let a = parse_expression(&text, &tower)?;
            cmd_analyze(&a, &tower, *seed, *trials, *z_range)
        }
        Cmd::Isomono {
            mode,
            matrix_a,
            companion: comp,
            matrix_b,
            vars,
            degree_cap,
            seed,
            trials,
            z_range,
            ..
        } => {
            let tower = build_tower(vars)?;
            let sys = read_system(matrix_a.as_deref(), comp.as_deref(), &tower, expressions)?;
            options.insert("degree_cap".into(), degree_cap.to_string());
            options.insert("trials".into(), trials.to_string());
            options.insert(
                "mode".into(),
                match mode {
                    IsomonoMode::Verify => "verify".into(),
                    IsomonoMode::Solve => "solve".to_string(),
                },
            );
            match mode {
                IsomonoMode::Verify => {
                    let btext = matrix_b
                        .as_deref()
                        .ok_or_else(|| bad_input("verify mode needs --matrix-b"))?;
                    expressions.insert("B".into(), btext.to_string());
                    let b = parse_matrix(btext, &tower)?;
                    cmd_isomono_verify(&sys, b, &tower, *seed, *trials, *z_range)
                }
                IsomonoMode::Solve => {
                    cmd_isomono_solve(&sys, &tower, *degree_cap, *seed, *trials, *z_range)
                }
            }
        }
        Cmd::SeqCheck {
            matrix_a,
            companion: comp,
            i0,
            horizon,
            params,
            auto_advance,
            cert_a,
            cert_word,
            cert_b,
            vars,
            seed,
            trials,
            z_range,
            ..
        } => {
            let tower = build_tower(vars)?;
            let sys = read_system(matrix_a.as_deref(), comp.as_deref(), &tower, expressions)?;
            options.insert("i0".into(), i0.to_string());
            options.insert("horizon".into(), horizon.to_string());
            options.insert("auto_advance".into(), auto_advance.to_string());
            options.insert("trials".into(), trials.to_string());
            let assignment = parse_params(params.as_deref(), &tower)?;
            if let Some(p) = params {
                options.insert("params".into(), p.clone());
            }
            let cert = match (cert_a, cert_word, cert_b) {
                (None, None, None) => None,
                (Some(a), Some(w), Some(b)) => {
                    expressions.insert("cert_a".into(), a.clone());
                    expressions.insert("cert_b".into(), b.clone());
                    options.insert("cert_word".into(), w.clone());
                    let a = parse_expression(a, &tower)?;
                    let word = parse_word(w)?;
                    let b = parse_expression(b, &tower)?;
                    Some((a, word, b))
                }
                _ => {
                    return Err(bad_input(
                        "certificate corroboration needs --cert-a, --cert-word and --cert-b",
                    ))
                }
            };
            cmd_seq_check(
                &sys,
                *i0,
                *horizon,
                &assignment,
                *auto_advance,
                cert,
                &tower,
                *seed,
                *trials,
                *z_range,
            )
        }
        Cmd::VerifyCert {
            expr,
            word,
            witness_b,
            vars,
            seed,
            trials,
            z_range,
            ..
        } => {
            let tower = build_tower(vars)?;
            let text = read_expr(expr)?;
            expressions.insert("a".into(), text.clone());
            expressions.insert("b".into(), witness_b.clone());
            options.insert("word".into(), word.clone());
            options.insert("trials".into(), trials.to_string());
            let a = parse_expression(&text, &tower)?;
            let b = parse_expression(witness_b, &tower)?;
            let word = parse_word(word)?;
            cmd_verify_cert(&a, word, b, &tower, *seed, *trials, *z_range)
        }
    }
}

fn cmd_analyze(
    a: &FieldElement,
    tower: &TowerSpec,
    seed: u64,
    trials: usize,
    z_range: i64,
) -> Result<(Payload, i32), CliError> {
    let analysis = analyze(a, tower)?;
    let dec_out = DecompositionOut {
        lambda: analysis.decomposition.lambda.render(tower),
        t: analysis.decomposition.t,
        n_window: analysis.decomposition.n_window,
        r_classes: analysis.decomposition.r_classes(),
        classes: analysis
            .decomposition
            .classes
            .iter()
            .map(|c| ClassOut {
                representative: c.representative.to_field_element().render(tower),
                terms: c
                    .terms
                    .iter()
                    .map(|(&(k, d), &s)| TermOut { k, d, exponent: s })
                    .collect(),
            })
            .collect(),
    };
    match &analysis.verdict {
        Verdict::Independent { witnesses } => {
            let ws = witnesses
                .iter()
                .map(|w| WitnessOut {
                    class: w.class,
                    representative: analysis.decomposition.classes[w.class]
                        .representative
                        .to_field_element()
                        .render(tower),
                    k: w.k,
                    value: w.value,
                })
                .collect();
            Ok((
                Payload::Analyze {
                    verdict: "independent".into(),
                    witnesses: ws,
                    certificate: None,
                    symbolic_check: None,
                    numeric_check: None,
                    decomposition: dec_out,
                },
                1,
            ))
        }
        Verdict::Dependent { certificate } => {
            let symbolic = verify_certificate(a, certificate, tower);
            let plan = SamplePlan::new(tower, seed, trials, z_range);
            let numeric = check_certificate_numeric(a, certificate, &plan, tower)?;
            Ok((
                Payload::Analyze {
                    verdict: "dependent".into(),
                    witnesses: vec![],
                    certificate: Some(certificate_out(certificate, tower)),
                    symbolic_check: Some(symbolic),
                    numeric_check: Some(numeric),
                    decomposition: dec_out,
                },
                0,
            ))
        }
    }
}

fn certificate_out(c: &Certificate, tower: &TowerSpec) -> CertificateOut {
    CertificateOut {
        word: c.word.render(),
        exponents: c.word.exponents.clone(),
        b: c.b.render(tower),
        l_table: c
            .l_table
            .iter()
            .map(|(&(k, d, class), &exponent)| LEntry {
                k,
                d,
                class,
                exponent,
            })
            .collect(),
        u: c.u,
    }
}

fn cmd_isomono_verify(
    sys: &LinearSystem,
    b: Mat,
    tower: &TowerSpec,
    seed: u64,
    trials: usize,
    z_range: i64,
) -> Result<(Payload, i32), CliError> {
    let witness = GaugeWitness { b };
    let holds = verify_isomonodromic(sys, &witness, tower)?;
    let plan = SamplePlan::new(tower, seed, trials, z_range);
    let numeric = check_isomonodromy_numeric(sys, &witness, &plan, tower)?;
    let exit = if holds { 0 } else { 1 };
    Ok((
        Payload::IsomonoVerify {
            holds,
            numeric_check: numeric,
        },
        exit,
    ))
}

fn cmd_isomono_solve(
    sys: &LinearSystem,
    tower: &TowerSpec,
    degree_cap: usize,
    seed: u64,
    trials: usize,
    z_range: i64,
) -> Result<(Payload, i32), CliError> {
    match is_isomonodromic(sys, degree_cap, tower, seed)? {
        Some(w) => {
            let verified = verify_isomonodromic(sys, &w, tower)?;
            let plan = SamplePlan::new(tower, seed, trials, z_range);
            let numeric = check_isomonodromy_numeric(sys, &w, &plan, tower)?;
            let rows = (0..w.b.rows())
                .map(|i| {
                    (0..w.b.cols())
                        .map(|j| w.b.at(i, j).render(tower))
                        .collect()
                })
                .collect();
            Ok((
                Payload::IsomonoSolve {
                    witness: Some(rows),
                    degree_cap,
                    verified: Some(verified),
                    numeric_check: Some(numeric),
                },
                0,
            ))
        }
        None => Ok((
            Payload::IsomonoSolve {
                witness: None,
                degree_cap,
                verified: None,
                numeric_check: None,
            },
            1,
        )),
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_seq_check(
    sys: &LinearSystem,
    i0: i64,
    horizon: usize,
    assignment: &[BigRational],
    auto_advance: bool,
    cert: Option<(FieldElement, MultiplicativeWord, FieldElement)>,
    tower: &TowerSpec,
    seed: u64,
    trials: usize,
    z_range: i64,
) -> Result<(Payload, i32), CliError> {
    let frame = fundamental_matrix(sys, i0, horizon, assignment, auto_advance, tower)?;
    let render_mat = |m: &Vec<Vec<BigRational>>| -> Vec<Vec<String>> {
        m.iter()
            .map(|row| row.iter().map(|v| v.to_string()).collect())
            .collect()
    };
    let first = render_mat(frame.values.first().expect("nonempty frame"));
    let last = render_mat(frame.values.last().expect("nonempty frame"));
    let (mut cs, mut cn, mut agree) = (None, None, None);
    let mut exit = 0;
    if let Some((a, word, b)) = cert {
        let certificate = Certificate {
            word,
            b,
            l_table: Default::default(),
            u: 1,
        };
        let symbolic = verify_certificate(&a, &certificate, tower);
        let plan = SamplePlan::new(tower, seed, trials, z_range);
        let numeric = check_certificate_numeric(&a, &certificate, &plan, tower)?;
        cs = Some(symbolic);
        cn = Some(numeric);
        agree = Some(symbolic == numeric);
        if symbolic != numeric {
            exit = 1;
        }
    }
    Ok((
        Payload::SeqCheck {
            i0: frame.i0,
            start: frame.start,
            horizon: frame.horizon,
            first,
            last,
            skipped: frame.skipped.iter().copied().collect(),
            certificate_symbolic: cs,
            certificate_numeric: cn,
            certificate_agrees: agree,
        },
        exit,
    ))
}

fn cmd_verify_cert(
    a: &FieldElement,
    word: MultiplicativeWord,
    b: FieldElement,
    tower: &TowerSpec,
    seed: u64,
    trials: usize,
    z_range: i64,
) -> Result<(Payload, i32), CliError> {
    let certificate = Certificate {
        word,
        b,
        l_table: Default::default(),
        u: 1,
    };
    let symbolic = verify_certificate(a, &certificate, tower);
    let plan = SamplePlan::new(tower, seed, trials, z_range);
    let numeric = check_certificate_numeric(a, &certificate, &plan, tower)?;
    let exit = if symbolic { 0 } else { 1 };
    Ok((Payload::VerifyCert { symbolic, numeric }, exit))
}

fn read_expr(expr: &Option<String>) -> Result<String, CliError> {
    match expr {
        Some(e) => Ok(e.clone()),
        None => {
            let mut buf = String::new();
            std::io::stdin()
                .read_to_string(&mut buf)
                .map_err(|e| bad_input(format!("cannot read stdin: {e}")))?;
            let t = buf.trim().to_string();
            if t.is_empty() {
                Err(bad_input("empty expression on stdin"))
            } else {
                Ok(t)
            }
        }
    }
}

fn read_system(
    matrix_a: Option<&str>,
    comp: Option<&str>,
    tower: &TowerSpec,
    expressions: &mut BTreeMap<String, String>,
) -> Result<LinearSystem, CliError> {
    match (matrix_a, comp) {
        (Some(text), None) => {
            expressions.insert("A".into(), text.to_string());
            let a = parse_matrix(text, tower)?;
            Ok(LinearSystem::new(a)?)
        }
        (None, Some(text)) => {
            expressions.insert("companion".into(), text.to_string());
            let coeffs: Result<Vec<FieldElement>, ParseError> = text
                .split(';')
                .map(|c| parse_expression(c.trim(), tower))
                .collect();
            Ok(companion(&coeffs?)?)
        }
        _ => Err(bad_input("provide exactly one of --matrix-a or --companion")),
    }
}

/// Builds the tower from declarations like "z: phi=z+1, sigma=z+t".
/// The action expressions may reference the declared variable itself and any
/// lower variable; they must classify as identity, a shift, or a scaling.
fn build_tower(decls: &[String]) -> Result<TowerSpec, CliError> {
    if decls.is_empty() {
        return Err(bad_input("at least one --var declaration is required"));
    }
    let mut vars: Vec<VarSpec> = Vec::new();
    for decl in decls {
        let (name, actions_text) = match decl.split_once(':') {
            Some((n, rest)) => (n.trim().to_string(), rest.trim().to_string()),
            None => (decl.trim().to_string(), String::new()),
        };
        let mut phi = Action::Identity;
        let mut sigma = Action::Identity;
        if !actions_text.is_empty() {
            // temporary tower including the variable itself, identity actions
            let mut probe = vars.clone();
            probe.push(VarSpec {
                name: name.clone(),
                phi: Action::Identity,
                sigma: Action::Identity,
            });
            let probe_tower = TowerSpec::new(probe)?;
            let level = probe_tower.top_level();
            for clause in split_top_level(&actions_text, ',') {
                let clause = clause.trim();
                if clause.is_empty() {
                    continue;
                }
                let (which, rhs) = clause
                    .split_once('=')
                    .ok_or_else(|| bad_input(format!("malformed action clause `{clause}`")))?;
                let image = parse_expression(rhs.trim(), &probe_tower)?;
                let action = classify_action(&image, level, &name)?;
                match which.trim() {
                    "phi" => phi = action,
                    "sigma" => sigma = action,
                    other => {
                        return Err(bad_input(format!(
                            "unknown action `{other}` (expected phi or sigma)"
                        )))
                    }
                }
            }
        }
        vars.push(VarSpec { name, phi, sigma });
    }
    Ok(TowerSpec::new(vars)?)
}

fn classify_action(
    image: &FieldElement,
    level: usize,
    name: &str,
) -> Result<Action, CliError> {
    let v = FieldElement::var(level);
    if *image == v {
        return Ok(Action::Identity);
    }
    let diff = image.sub(&v);
    if diff.is_constant_in(level) {
        let c = diff
            .as_rpoly()
            .ok_or_else(|| bad_input(format!("shift constant of `{name}` must be polynomial")))?;
        return Ok(Action::Shift(c.clone()));
    }
    if let Ok(ratio) = image.div(&v) {
        if ratio.is_constant_in(level) && !ratio.is_zero() {
            let c = ratio.as_rpoly().ok_or_else(|| {
                bad_input(format!("scale constant of `{name}` must be polynomial"))
            })?;
            return Ok(Action::Scale(c.clone()));
        }
    }
    Err(bad_input(format!(
        "action on `{name}` must be the identity, a shift v+c, or a scaling c*v"
    )))
}

/// Splits on a separator at bracket depth zero (both `()` and `[]`).
fn split_top_level(s: &str, sep: char) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for c in s.chars() {
        match c {
            '(' | '[' => {
                depth += 1;
                cur.push(c);
            }
            ')' | ']' => {
                depth -= 1;
                cur.push(c);
            }
            c if c == sep && depth == 0 => {
                out.push(std::mem::take(&mut cur));
            }
            c => cur.push(c),
        }
    }
    out.push(cur);
    out
}

fn parse_matrix(text: &str, tower: &TowerSpec) -> Result<Mat, CliError> {
    let s = text.trim();
    let inner = s
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .ok_or_else(|| bad_input("matrix must look like [[...],[...]]"))?;
    let mut rows: Vec<Vec<FieldElement>> = Vec::new();
    for row_text in split_top_level(inner, ',') {
        let row_text = row_text.trim();
        if row_text.is_empty() {
            continue;
        }
        let cells_text = row_text
            .strip_prefix('[')
            .and_then(|s| s.strip_suffix(']'))
            .ok_or_else(|| bad_input(format!("matrix row `{row_text}` must be bracketed")))?;
        let mut row = Vec::new();
        for cell in split_top_level(cells_text, ',') {
            row.push(parse_expression(cell.trim(), tower)?);
        }
        rows.push(row);
    }
    if rows.is_empty() || rows.iter().any(|r| r.len() != rows.len()) {
        return Err(bad_input("matrix must be square and nonempty"));
    }
    Ok(Mat::from_rows(rows))
}

fn parse_word(text: &str) -> Result<MultiplicativeWord, CliError> {
    let exps: Result<Vec<i64>, _> = text
        .split(',')
        .map(|p| p.trim().parse::<i64>())
        .collect();
    let exps = exps.map_err(|_| bad_input("word must be comma-separated integers"))?;
    if exps.iter().all(|&n| n == 0) {
        return Err(bad_input("word must not be trivial"));
    }
    Ok(MultiplicativeWord::new(exps))
}

/// Full assignment for every tower variable; explicit "name=value" entries
/// override the defaults 1/(3 + 2*level). The top-variable slot is a
/// placeholder (overwritten by the running index).
fn parse_params(text: Option<&str>, tower: &TowerSpec) -> Result<Vec<BigRational>, CliError> {
    let mut values: Vec<BigRational> = (0..tower.nvars())
        .map(|l| {
            BigRational::new(
                num_bigint::BigInt::from(1),
                num_bigint::BigInt::from(3 + 2 * l as i64),
            )
        })
        .collect();
    if let Some(text) = text {
        for entry in text.split(',') {
            let entry = entry.trim();
            if entry.is_empty() {
                continue;
            }
            let (name, value) = entry
                .split_once('=')
                .ok_or_else(|| bad_input(format!("malformed parameter `{entry}`")))?;
            let level = tower
                .level_of(name.trim())
                .ok_or_else(|| bad_input(format!("unknown parameter `{}`", name.trim())))?;
            let parsed = parse_expression(value.trim(), tower)?;
            let c = parsed
                .as_const()
                .ok_or_else(|| bad_input(format!("parameter `{}` must be rational", name.trim())))?;
            values[level] = c.clone();
        }
    }
    Ok(values)
}
