//! The `shintani` command line: argument parsing, report rendering and the
//! exit status contract (0 ok, 1 failed verification, 2 usage or input error).

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use crate::cech::{cech_report, coboundary_invariance, is_circle_homology};
use crate::checks::{check_cocycle, check_fan_independence, fan_hash, subdivided_fans};
use crate::cones::{Cone, Fan};
use crate::cyclotomic::{CycJson, CycNumber};
use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::oracle::{
    basechange_factorization, dirichlet_l_oracle, hurwitz_lerch_oracle, parity_check, BernoulliTable,
    DirichletCharacter,
};
use crate::residue::{torsion_points, CharacterFile, HeckeCharacter, IdealSpec, TorsionPoint};
use crate::zeta::{hecke_l_value, lerch_value, shintani_value};

#[derive(Parser, Debug)]
#[command(name = "shintani", version, about = "Exact special values of Lerch zeta and Hecke L-functions")]
pub struct Cli {
    /// Emit machine-readable JSON.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct FieldArgs {
    /// Fundamental discriminant of the real quadratic field.
    #[arg(long, conflicts_with = "rational", allow_hyphen_values = true)]
    pub disc: Option<i64>,
    /// Work over Q.
    #[arg(long)]
    pub rational: bool,
}

impl FieldArgs {
    fn field(&self) -> Result<FieldSpec> {
        match (self.rational, self.disc) {
            (true, _) => Ok(FieldSpec::rational()),
            (false, Some(1)) => Ok(FieldSpec::rational()),
            (false, Some(d)) => FieldSpec::real_quadratic(d),
            (false, None) => Err(Error::Parse("one of --disc or --rational is required".into())),
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct PointArgs {
    /// Generator of the conductor ideal, e.g. `3` or `2+w`.
    #[arg(long)]
    pub conductor: String,
    /// Exponents of the torsion point on the basis (1, w), relative to the exponent of O/f.
    #[arg(long, allow_hyphen_values = true)]
    pub xi: String,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// L(xi Delta, -k) for a torsion point xi.
    Lerch {
        #[command(flatten)]
        field: FieldArgs,
        #[command(flatten)]
        point: PointArgs,
        #[arg(short = 'k', default_value_t = 0)]
        k: u32,
        /// Fan in JSON form.
        #[arg(long)]
        fan: Option<PathBuf>,
    },
    /// L(chi, -k) for a primitive finite Hecke character.
    Hecke {
        #[command(flatten)]
        field: FieldArgs,
        /// Character file (JSON).
        #[arg(long = "char", conflicts_with = "char_norm")]
        char_file: Option<PathBuf>,
        /// `q:j`: the j-th Dirichlet character modulo the prime q composed with the norm.
        #[arg(long)]
        char_norm: Option<String>,
        #[arg(short = 'k', default_value_t = 0)]
        k: u32,
        #[arg(long)]
        fan: Option<PathBuf>,
    },
    /// The Shintani zeta value of a single cone.
    Shintani {
        #[command(flatten)]
        field: FieldArgs,
        #[command(flatten)]
        point: PointArgs,
        /// Cone generators separated by `;`, e.g. `1;1+w`.
        #[arg(long)]
        cone: String,
        /// Diagonal weight.
        #[arg(short = 'k', conflicts_with = "weight")]
        k: Option<u32>,
        /// Weight vector, e.g. `1,0`.
        #[arg(long)]
        weight: Option<String>,
    },
    /// Verification suites.
    Verify {
        #[command(subcommand)]
        check: VerifyCommand,
    },
    /// Oracle self-check.
    Selfcheck,
}

#[derive(Subcommand, Debug)]
pub enum VerifyCommand {
    /// Cocycle identity on random tuples, with a truncated-series cross-check.
    Cocycle {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Trace bound of the series check.
        #[arg(long, default_value_t = 12)]
        bound: i64,
    },
    /// Homology and fundamental class of the quotient complexes.
    Homology {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        conductor: String,
        #[arg(long)]
        fan: Option<PathBuf>,
    },
    /// Coboundaries pair to zero with the fundamental class.
    Coboundary {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        conductor: String,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short = 'k', default_value_t = 0)]
        k: u32,
    },
    /// Lerch values agree on the standard and two subdivided fans.
    FanIndependence {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        conductor: String,
        /// Largest k to check (all of 0..=k).
        #[arg(short = 'k', default_value_t = 2)]
        k: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// Value report: the number's JSON form followed by provenance.
#[derive(Serialize)]
struct ValueReport {
    #[serde(flatten)]
    value: CycJson,
    field: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    conductor: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    xi: Option<PointJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    character: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    k: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    weight: Option<Vec<u32>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    fan_hash: Option<String>,
}

#[derive(Serialize)]
struct PointJson {
    level: u64,
    exps: Vec<i64>,
}

impl From<&TorsionPoint> for PointJson {
    fn from(xi: &TorsionPoint) -> Self {
        PointJson {
            level: xi.level(),
            exps: xi.exponents().to_vec(),
        }
    }
}

fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::Degenerate(_) | Error::DivisionByZero | Error::NotInSubfield(_) | Error::LevelMismatch(_) => 1,
        _ => 2,
    }
}

fn parse_list(s: &str) -> Result<Vec<i64>> {
    s.split(',')
        .map(|t| t.trim().parse::<i64>().map_err(|e| Error::Parse(format!("'{t}': {e}"))))
        .collect()
}

fn read_file(p: &PathBuf) -> Result<String> {
    std::fs::read_to_string(p).map_err(|e| Error::Parse(format!("{}: {e}", p.display())))
}

fn load_fan(field: &FieldSpec, path: &Option<PathBuf>) -> Result<Fan> {
    match path {
        Some(p) => Fan::from_json(field, &read_file(p)?),
        None => Fan::standard(field),
    }
}

fn conductor_ideal(field: &FieldSpec, s: &str) -> Result<IdealSpec> {
    let c = field.parse_integral(s)?;
    let ideal = IdealSpec::principal(field, &c)?;
    if ideal.is_unit() {
        return Err(Error::InvalidIdeal("the conductor must be a proper ideal".into()));
    }
    Ok(ideal)
}

fn torsion_point(field: &FieldSpec, p: &PointArgs) -> Result<(IdealSpec, TorsionPoint)> {
    let ideal = conductor_ideal(field, &p.conductor)?;
    let xi = TorsionPoint::from_exponents(&ideal, &parse_list(&p.xi)?)?;
    Ok((ideal, xi))
}

struct Output<'a> {
    out: &'a mut dyn Write,
    json: bool,
}

impl Output<'_> {
    fn value(&mut self, title: &str, v: &CycNumber, report: ValueReport) -> std::io::Result<()> {
        if self.json {
            writeln!(self.out, "{}", serde_json::to_string(&report).expect("serializable"))
        } else {
            writeln!(self.out, "{title} = {v}")?;
            writeln!(self.out, "  in Q(zeta_{}), field {}", v.level(), report.field)?;
            if let Some(h) = &report.fan_hash {
                writeln!(self.out, "  fan sha256 {h}")?;
            }
            Ok(())
        }
    }

    fn check(&mut self, ok: bool, line: &str) -> std::io::Result<()> {
        if !self.json {
            writeln!(self.out, "[{}] {line}", if ok { "PASS" } else { "FAIL" })?;
        }
        Ok(())
    }

    fn summary(&mut self, v: serde_json::Value) -> std::io::Result<()> {
        if self.json {
            writeln!(self.out, "{}", serde_json::to_string(&v).expect("serializable"))?;
        }
        Ok(())
    }
}

/// Parses `args` (including the program name) and runs; returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    let mut o = Output { out, json: cli.json };
    match execute(&cli.command, &mut o) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code_for(&e)
        }
    }
}

fn io(e: std::io::Error) -> Error {
    Error::Unsupported(format!("output: {e}"))
}

fn execute(cmd: &Command, o: &mut Output) -> Result<bool> {
    match cmd {
        Command::Lerch { field, point, k, fan } => {
            let field = field.field()?;
            let (_, xi) = torsion_point(&field, point)?;
            let fan = load_fan(&field, fan)?;
            let v = lerch_value(&xi, *k, &fan)?;
            let report = ValueReport {
                value: v.to_json_value(),
                field: field.label(),
                conductor: Some(point.conductor.clone()),
                xi: Some((&xi).into()),
                character: None,
                k: Some(*k),
                weight: None,
                fan_hash: Some(fan_hash(&fan)),
            };
            o.value(&format!("L({xi} Delta, {})", -(*k as i64)), &v, report).map_err(io)?;
            Ok(true)
        }
        Command::Hecke {
            field,
            char_file,
            char_norm,
            k,
            fan,
        } => {
            let (chi, label) = match (char_file, char_norm) {
                (Some(p), None) => {
                    let cf: CharacterFile =
                        serde_json::from_str(&read_file(p)?).map_err(|e| Error::Parse(e.to_string()))?;
                    if field.disc.is_some() || field.rational {
                        let f = field.field()?;
                        if f != cf.field()? {
                            return Err(Error::InvalidCharacter("--disc does not match the character file".into()));
                        }
                    }
                    (cf.to_character()?, p.display().to_string())
                }
                (None, Some(s)) => {
                    let f = field.field()?;
                    let (q, j) = s
                        .split_once(':')
                        .ok_or_else(|| Error::Parse(format!("expected q:j, got '{s}'")))?;
                    let q: u64 = q.parse().map_err(|_| Error::Parse(format!("bad modulus '{q}'")))?;
                    let j: i64 = j.parse().map_err(|_| Error::Parse(format!("bad index '{j}'")))?;
                    (HeckeCharacter::from_norm(&f, q, j)?, format!("norm:{q}:{j}"))
                }
                _ => return Err(Error::Parse("exactly one of --char or --char-norm is required".into())),
            };
            let f = chi.field().clone();
            let fan = load_fan(&f, fan)?;
            let v = hecke_l_value(&chi, *k, &fan)?;
            let report = ValueReport {
                value: v.to_json_value(),
                field: f.label(),
                conductor: Some(chi.conductor().to_string()),
                xi: None,
                character: Some(label),
                k: Some(*k),
                weight: None,
                fan_hash: Some(fan_hash(&fan)),
            };
            o.value(&format!("L(chi, {})", -(*k as i64)), &v, report).map_err(io)?;
            Ok(true)
        }
        Command::Shintani {
            field,
            point,
            cone,
            k,
            weight,
        } => {
            let field = field.field()?;
            let (_, xi) = torsion_point(&field, point)?;
            let gens = cone
                .split(';')
                .map(|s| field.parse_integral(s.trim()))
                .collect::<Result<Vec<_>>>()?;
            let cone = Cone::checked(&field, gens)?;
            let w: Vec<u32> = match (k, weight) {
                (_, Some(w)) => parse_list(w)?
                    .into_iter()
                    .map(|x| u32::try_from(x).map_err(|_| Error::Parse(format!("negative weight {x}"))))
                    .collect::<Result<_>>()?,
                (Some(k), None) => vec![*k; field.degree()],
                (None, None) => vec![0; field.degree()],
            };
            let v = shintani_value(&field, &cone, &xi, &w)?;
            let report = ValueReport {
                value: v.to_json_value(),
                field: field.label(),
                conductor: Some(point.conductor.clone()),
                xi: Some((&xi).into()),
                character: None,
                k: None,
                weight: Some(w.clone()),
                fan_hash: None,
            };
            o.value(&format!("zeta_{cone}({xi}, -{w:?})"), &v, report).map_err(io)?;
            Ok(true)
        }
        Command::Verify { check } => verify(check, o),
        Command::Selfcheck => selfcheck(o),
    }
}

fn verify(check: &VerifyCommand, o: &mut Output) -> Result<bool> {
    match check {
        VerifyCommand::Cocycle {
            field,
            trials,
            seed,
            bound,
        } => {
            let field = field.field()?;
            let results = check_cocycle(&field, *trials, *seed, *bound)?;
            let mut failures = Vec::new();
            for (t, r) in results.iter().enumerate() {
                let elems: Vec<String> = r.elements.iter().map(|x| x.to_string()).collect();
                o.check(r.passed(), &format!("trial {t}: ({}) defect={} series={}", elems.join(", "), r.defect_zero, r.series_zero))
                    .map_err(io)?;
                if !r.passed() {
                    failures.push(t);
                }
            }
            let ok = failures.is_empty();
            o.summary(json!({
                "check": "cocycle", "field": field.label(), "trials": trials, "seed": seed,
                "bound": bound, "passed": ok, "failures": failures,
            }))
            .map_err(io)?;
            Ok(ok)
        }
        VerifyCommand::Homology { field, conductor, fan } => {
            let field = field.field()?;
            let ideal = conductor_ideal(&field, conductor)?;
            let fan = load_fan(&field, fan)?;
            let mut rows = Vec::new();
            let mut all = true;
            for xi in torsion_points(&ideal).into_iter().filter(|x| !x.is_trivial()) {
                let r = cech_report(&fan, &xi, 0)?;
                let ranks: Vec<usize> = r.homology.iter().map(|h| h.rank).collect();
                let ok = r.complex && r.fundamental_class && is_circle_homology(&r.homology);
                all &= ok;
                o.check(ok, &format!("{xi}: d^2=0 {}, ranks {ranks:?}, fundamental class {}", r.complex, r.fundamental_class))
                    .map_err(io)?;
                rows.push(json!({"xi": PointJson::from(&xi), "complex": r.complex, "ranks": ranks,
                    "torsion": r.homology.iter().map(|h| h.torsion.clone()).collect::<Vec<_>>(),
                    "fundamental_class": r.fundamental_class}));
            }
            o.summary(json!({"check": "homology", "field": field.label(), "conductor": conductor,
                "fan_hash": fan_hash(&fan), "passed": all, "points": rows}))
                .map_err(io)?;
            Ok(all)
        }
        VerifyCommand::Coboundary {
            field,
            conductor,
            trials,
            seed,
            k,
        } => {
            let field = field.field()?;
            if field.degree() != 2 {
                return Err(Error::UnsupportedDegree(field.degree()));
            }
            let ideal = conductor_ideal(&field, conductor)?;
            let fan = Fan::standard(&field)?;
            let mut all = true;
            let mut rows = Vec::new();
            for xi in torsion_points(&ideal).into_iter().filter(|x| !x.is_trivial()) {
                let r = coboundary_invariance(&fan, &xi, *k, *trials, *seed)?;
                all &= r.passed();
                o.check(
                    r.passed(),
                    &format!("{xi}: {} of {} coboundaries pair to 0", r.trials - r.failures.len(), r.trials),
                )
                .map_err(io)?;
                rows.push(json!({"xi": PointJson::from(&xi), "failures": r.failures, "shintani_stable": r.shintani_stable}));
            }
            o.summary(json!({"check": "coboundary", "field": field.label(), "conductor": conductor,
                "trials": trials, "seed": seed, "k": k, "passed": all, "points": rows}))
                .map_err(io)?;
            Ok(all)
        }
        VerifyCommand::FanIndependence { field, conductor, k, seed } => {
            let field = field.field()?;
            let ideal = conductor_ideal(&field, conductor)?;
            let fans = subdivided_fans(&field, *seed)?;
            let ks: Vec<u32> = (0..=*k).collect();
            let results = check_fan_independence(&ideal, &ks, &fans)?;
            let mut all = true;
            for r in &results {
                all &= r.agrees();
                o.check(r.agrees(), &format!("{} k={}: {}", r.xi, r.k, r.values[0])).map_err(io)?;
            }
            o.summary(json!({"check": "fan-independence", "field": field.label(), "conductor": conductor,
                "seed": seed, "fans": fans.iter().map(fan_hash).collect::<Vec<_>>(), "passed": all,
                "comparisons": results.len()}))
                .map_err(io)?;
            Ok(all)
        }
    }
}

fn selfcheck(o: &mut Output) -> Result<bool> {
    let table = BernoulliTable::new(10);
    let q = FieldSpec::rational();
    let fan = Fan::standard(&q)?;
    let mut all = true;
    let mut rows = Vec::new();
    for n in 2..=12u64 {
        let mut ok = true;
        for a in 1..n as i64 {
            let xi = TorsionPoint::new(n, vec![a]);
            for k in 0..=6u32 {
                let lhs = lerch_value(&xi, k, &fan)?;
                let rhs = hurwitz_lerch_oracle(&table, xi.level(), xi.exponents()[0], k as usize)?;
                ok &= lhs == rhs;
            }
        }
        all &= ok;
        o.check(ok, &format!("Lerch over Q vs Hurwitz-Bernoulli, n={n}, k=0..6")).map_err(io)?;
        rows.push(json!({"check": "hurwitz", "n": n, "passed": ok}));
    }
    let mut parity = true;
    for p in [3u64, 5, 7, 11, 13] {
        for j in 1..p as i64 - 1 {
            let chi = DirichletCharacter::from_index(p, j)?;
            for k in 0..6 {
                parity &= parity_check(&table, &chi, k)?;
            }
        }
    }
    all &= parity;
    o.check(parity, "trivial zeros of Dirichlet L-values").map_err(io)?;
    rows.push(json!({"check": "parity", "passed": parity}));
    let anchor = dirichlet_l_oracle(&table, &DirichletCharacter::kronecker(-3), 0)?
        == CycNumber::from_rational(1, num_rational::BigRational::new(1.into(), 3.into()));
    all &= anchor;
    o.check(anchor, "L(chi_-3, 0) = 1/3").map_err(io)?;
    rows.push(json!({"check": "anchor", "passed": anchor}));
    for (d, p) in [(5i64, 3u64), (8, 3)] {
        for k in 0..=1usize {
            let r = basechange_factorization(d, p, (p as i64 - 1) / 2, k)?;
            all &= r.equal;
            o.check(r.equal, &format!("base change D={d} q={p} k={k}: {} = {}", r.lhs, r.rhs)).map_err(io)?;
            rows.push(json!({"check": "basechange", "disc": d, "q": p, "k": k, "passed": r.equal}));
        }
    }
    o.summary(json!({"check": "selfcheck", "passed": all, "results": rows})).map_err(io)?;
    Ok(all)
}
