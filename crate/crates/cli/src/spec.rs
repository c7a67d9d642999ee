//! Problem specification files.
//!
//! ```text
//! [problem]
//! name = halfturn
//! symmetry = spin
//! coefficients = spin_z2
//! complex = halfturn_e3
//! method = ahss
//!
//! [d2 3 -2] from = eta_transfer
//! cells = halfspace axis
//! ```
//!
//! The full grammar is documented in `docs/specfile.md`.

use std::fmt::{self, Write as _};

use invphase_core::ahss::InjectionData;
use invphase_core::dsl::{self, ParseError, Pos, Section, Token};
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Ahss,
    Cohomology,
    Les,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Ahss, Method::Cohomology, Method::Les];

    pub fn name(self) -> &'static str {
        match self {
            Method::Ahss => "ahss",
            Method::Cohomology => "cohomology",
            Method::Les => "les",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Emit {
    #[default]
    Text,
    Json,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellSpec {
    pub id: String,
    pub dim: usize,
    pub stabilizer: String,
    pub subcomplex: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ComplexSpec {
    Preset { name: String, params: Vec<i64> },
    Inline { cells: Vec<CellSpec>, boundary: Vec<(String, String, i64)> },
}

impl fmt::Display for ComplexSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ComplexSpec::Preset { name, params } if params.is_empty() => f.write_str(name),
            ComplexSpec::Preset { name, params } => {
                let args: Vec<String> = params.iter().map(i64::to_string).collect();
                write!(f, "{name}({})", args.join(","))
            }
            ComplexSpec::Inline { .. } => f.write_str("inline"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InjectionSpec {
    pub r: usize,
    pub p: i64,
    pub q: i64,
    pub data: InjectionData,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CohomologySpec {
    pub m: i64,
    pub n: i64,
    pub degree: i64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LesSpec {
    /// A builtin problem name or a path to a problem file.
    pub problem: String,
    /// Builtin problems only.
    pub subgroup: Option<String>,
    pub degree: Option<i64>,
}

impl LesSpec {
    pub fn is_builtin(&self) -> bool {
        invphase_core::lexseq::PROBLEMS.iter().any(|(n, _)| *n == self.problem)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProblemSpec {
    pub name: String,
    pub symmetry: Option<String>,
    pub coefficients: Option<String>,
    pub complex: Option<ComplexSpec>,
    pub method: Method,
    pub injected: Vec<InjectionSpec>,
    pub cohomology: Option<CohomologySpec>,
    pub les: Option<LesSpec>,
    pub emit: Option<Emit>,
}

impl ProblemSpec {
    /// Methods with enough data in this spec to run.
    pub fn available_methods(&self) -> Vec<Method> {
        let mut out = Vec::new();
        if self.complex.is_some() && self.coefficients.is_some() {
            out.push(Method::Ahss);
        }
        if self.cohomology.is_some() {
            out.push(Method::Cohomology);
        }
        if self.les.as_ref().is_some_and(|l| self.coefficients.is_some() || !l.is_builtin()) {
            out.push(Method::Les);
        }
        out
    }
}

const SECTIONS: &[&str] = &["problem", "cell", "boundary", "dN", "cohomology", "les", "output"];

fn int<T: std::str::FromStr>(tok: &Token, what: &str) -> Result<T, ParseError> {
    dsl::parse_int(tok, what)
}

/// Splits `text` on whitespace into integers, reporting the column of a bad word.
fn ints(tok: &Token, count: usize, shape: &str) -> Result<Vec<i64>, ParseError> {
    let mut out = Vec::new();
    let mut col = tok.pos.col;
    for w in tok.text.split(' ') {
        if !w.is_empty() {
            let t = Token { text: w.to_string(), pos: Pos { line: tok.pos.line, col } };
            out.push(int(&t, "an integer")?);
        }
        col += w.chars().count() + 1;
    }
    if out.len() != count {
        return Err(ParseError::expecting(tok.pos, format!("expected `{shape}`"), &[shape]));
    }
    Ok(out)
}

fn parse_complex(tok: &Token) -> Result<Option<(String, Vec<i64>)>, ParseError> {
    let text = tok.text.as_str();
    if text == "inline" {
        return Ok(None);
    }
    let bad = |msg: &str| ParseError::expecting(tok.pos, msg.to_string(), &["preset", "preset(args)", "inline"]);
    let (name, params) = match text.find('(') {
        None => (text, Vec::new()),
        Some(open) => {
            let inner = text[open + 1..].strip_suffix(')').ok_or_else(|| bad("unbalanced parentheses"))?;
            let mut params = Vec::new();
            for a in inner.split(',') {
                let a = a.trim();
                if a.is_empty() && inner.trim().is_empty() {
                    break;
                }
                params.push(a.parse::<i64>().map_err(|_| bad(&format!("preset argument `{a}` is not an integer")))?);
            }
            (&text[..open], params)
        }
    };
    if name.is_empty() || !name.chars().all(|c| c.is_alphanumeric() || c == '_') {
        return Err(bad(&format!("malformed preset name `{name}`")));
    }
    Ok(Some((name.to_string(), params)))
}

fn differential_order(kind: &Token) -> Option<usize> {
    let r: usize = kind.text.strip_prefix('d')?.parse().ok()?;
    (r >= 2).then_some(r)
}

fn one_of<'a>(s: &'a Section, keys: &[&'a str]) -> Result<(&'a str, &'a Token), ParseError> {
    let found: Vec<(&str, &Token)> = keys.iter().filter_map(|k| s.get(k).map(|t| (*k, t))).collect();
    match found[..] {
        [one] => Ok(one),
        _ => Err(ParseError::expecting(
            s.pos(),
            format!("[{}] needs exactly one of {}", s.kind.text, keys.join(", ")),
            keys,
        )),
    }
}

fn parse_injection(s: &Section, r: usize) -> Result<InjectionSpec, ParseError> {
    s.arity(2, "[dN p q]")?;
    let p = int(&s.args[0], "an integer")?;
    let q = int(&s.args[1], "an integer")?;
    s.check_keys(&["matrix", "chain", "from", "cells"])?;
    let (key, tok) = one_of(s, &["matrix", "chain", "from"])?;
    if key != "from" && s.get("cells").is_some() {
        return Err(ParseError::new(s.pos(), "`cells` only goes with `from = eta_transfer`"));
    }
    let data = match key {
        "matrix" => InjectionData::Page(dsl::parse_matrix(tok)?),
        "chain" => InjectionData::Chain(dsl::parse_matrix(tok)?),
        _ => {
            if tok.text != "eta_transfer" {
                return Err(ParseError::expecting(tok.pos, format!("unknown construction `{}`", tok.text), &["eta_transfer"]));
            }
            let cells = s.require("cells")?;
            let names: Vec<&str> = cells.text.split_whitespace().collect();
            let [a, b] = names[..] else {
                return Err(ParseError::expecting(cells.pos, "expected two cell names", &["source_cell target_cell"]));
            };
            InjectionData::EtaTransfer { source_cell: a.to_string(), target_cell: b.to_string() }
        }
    };
    Ok(InjectionSpec { r, p, q, data })
}

fn parse_method(tok: &Token) -> Result<Method, ParseError> {
    Method::ALL
        .into_iter()
        .find(|m| m.name() == tok.text)
        .ok_or_else(|| ParseError::expecting(tok.pos, format!("unknown method `{}`", tok.text), &["ahss", "cohomology", "les"]))
}

/// Parses a spec file. Every error carries a position and the expected tokens.
pub fn parse(text: &str) -> Result<ProblemSpec, ParseError> {
    let doc = dsl::parse_document(text)?;
    let mut sections = doc.sections.iter();
    let head = sections.next().ok_or_else(|| ParseError::expecting(Pos { line: 1, col: 1 }, "empty spec file", &["[problem]"]))?;
    if head.kind.text != "problem" {
        return Err(ParseError::expecting(head.pos(), format!("expected [problem], found [{}]", head.kind.text), &["problem"]));
    }
    head.arity(0, "[problem]")?;
    head.check_keys(&["name", "symmetry", "coefficients", "complex", "method"])?;
    if let Some(t) = head.bare() {
        return Err(ParseError::expecting(t.pos, "unexpected text after [problem]", &["key = value"]));
    }
    let text_of = |k: &str| head.get(k).map(|t| t.text.clone());
    let mut spec = ProblemSpec {
        name: head.require("name")?.text.clone(),
        symmetry: text_of("symmetry"),
        coefficients: text_of("coefficients"),
        complex: None,
        method: parse_method(head.require("method")?)?,
        injected: Vec::new(),
        cohomology: None,
        les: None,
        emit: None,
    };
    let preset = head.get("complex").map(parse_complex).transpose()?;
    let mut cells = Vec::new();
    let mut boundary = Vec::new();

    for s in sections {
        let kind = s.kind.text.as_str();
        if let Some(t) = s.bare() {
            return Err(ParseError::expecting(t.pos, format!("unexpected text after [{kind}]"), &["key = value"]));
        }
        match kind {
            "problem" => return Err(ParseError::new(s.pos(), "[problem] appears twice")),
            "cell" => {
                s.arity(1, "[cell id]")?;
                s.check_keys(&["dim", "stabilizer", "subcomplex"])?;
                cells.push(CellSpec {
                    id: s.args[0].text.clone(),
                    dim: int(s.require("dim")?, "a dimension")?,
                    stabilizer: s.require("stabilizer")?.text.clone(),
                    subcomplex: s.get("subcomplex").map(dsl::parse_bool).transpose()?.unwrap_or(false),
                });
            }
            "boundary" => {
                s.arity(2, "[boundary from to]")?;
                s.check_keys(&["degree"])?;
                boundary.push((s.args[0].text.clone(), s.args[1].text.clone(), int(s.require("degree")?, "an integer")?));
            }
            "cohomology" => {
                s.arity(0, "[cohomology]")?;
                s.check_keys(&["bundle", "degree"])?;
                let b = ints(s.require("bundle")?, 2, "m n")?;
                spec.cohomology = Some(CohomologySpec { m: b[0], n: b[1], degree: int(s.require("degree")?, "an integer")? });
            }
            "les" => {
                s.arity(0, "[les]")?;
                s.check_keys(&["problem", "subgroup", "degree"])?;
                spec.les = Some(LesSpec {
                    problem: s.require("problem")?.text.clone(),
                    subgroup: s.get("subgroup").map(|t| t.text.clone()),
                    degree: s.get("degree").map(|t| int(t, "an integer")).transpose()?,
                });
            }
            "output" => {
                s.arity(0, "[output]")?;
                s.check_keys(&["emit"])?;
                let t = s.require("emit")?;
                spec.emit = Some(match t.text.as_str() {
                    "text" => Emit::Text,
                    "json" => Emit::Json,
                    _ => return Err(ParseError::expecting(t.pos, format!("unknown format `{}`", t.text), &["text", "json"])),
                });
            }
            _ => match differential_order(&s.kind) {
                Some(r) => spec.injected.push(parse_injection(s, r)?),
                None => return Err(ParseError::expecting(s.pos(), format!("unknown section [{kind}]"), SECTIONS)),
            },
        }
    }

    let inline_section = doc.sections.iter().find(|s| s.kind.text == "cell" || s.kind.text == "boundary");
    spec.complex = match preset {
        Some(Some((name, params))) => {
            if let Some(s) = inline_section {
                return Err(ParseError::expecting(s.pos(), "[cell] and [boundary] sections need an inline complex", &["complex = inline"]));
            }
            Some(ComplexSpec::Preset { name, params })
        }
        Some(None) => Some(ComplexSpec::Inline { cells, boundary }),
        None => {
            if let Some(s) = inline_section {
                return Err(ParseError::expecting(s.pos(), "cells given but no `complex = inline`", &["complex = inline"]));
            }
            None
        }
    };
    Ok(spec)
}

/// Canonical text of a spec; `parse(print(s)) == s`.
pub fn print(spec: &ProblemSpec) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "[problem]");
    let _ = writeln!(out, "name = {}", spec.name);
    if let Some(s) = &spec.symmetry {
        let _ = writeln!(out, "symmetry = {s}");
    }
    if let Some(c) = &spec.coefficients {
        let _ = writeln!(out, "coefficients = {c}");
    }
    if let Some(c) = &spec.complex {
        let _ = writeln!(out, "complex = {c}");
    }
    let _ = writeln!(out, "method = {}", spec.method);
    if let Some(ComplexSpec::Inline { cells, boundary }) = &spec.complex {
        for c in cells {
            let _ = writeln!(out, "\n[cell {}] dim = {}", c.id, c.dim);
            let _ = writeln!(out, "stabilizer = {}", c.stabilizer);
            if c.subcomplex {
                let _ = writeln!(out, "subcomplex = true");
            }
        }
        for (a, b, d) in boundary {
            let _ = writeln!(out, "\n[boundary {a} {b}] degree = {d}");
        }
    }
    for inj in &spec.injected {
        let head = format!("[d{} {} {}]", inj.r, inj.p, inj.q);
        let _ = match &inj.data {
            InjectionData::Page(m) => writeln!(out, "\n{head} matrix = {}", dsl::format_entries(m)),
            InjectionData::Chain(m) => writeln!(out, "\n{head} chain = {}", dsl::format_entries(m)),
            InjectionData::EtaTransfer { source_cell, target_cell } => {
                writeln!(out, "\n{head} from = eta_transfer\ncells = {source_cell} {target_cell}")
            }
        };
    }
    if let Some(c) = &spec.cohomology {
        let _ = writeln!(out, "\n[cohomology] bundle = {} {}\ndegree = {}", c.m, c.n, c.degree);
    }
    if let Some(l) = &spec.les {
        let _ = writeln!(out, "\n[les] problem = {}", l.problem);
        if let Some(sub) = &l.subgroup {
            let _ = writeln!(out, "subgroup = {sub}");
        }
        if let Some(d) = l.degree {
            let _ = writeln!(out, "degree = {d}");
        }
    }
    if let Some(e) = spec.emit {
        let _ = writeln!(out, "\n[output] emit = {}", if e == Emit::Json { "json" } else { "text" });
    }
    out
}
