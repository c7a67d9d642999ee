//! Tabulated coefficient systems over the orbit category.
//!
//! For a symmetry type and every subgroup `L` of a finite group `G`, the
//! graded groups `E^{-q}(BL)` of invertible phases in spatial dimension `q`,
//! with transfers `groups(L', q) -> groups(L, q)` along inclusions `L' ⊂ L`,
//! point inclusions `groups(L, q) -> groups(L', q)` in the opposite
//! direction, and the action of `η` lowering `q` by one.
//!
//! Groups are data. Every entry of a coefficient file carries a comment
//! saying where its value comes from; `load` refuses entries without one.
//!
//! Matrices use the generator order of the tabulated group's normal form
//! (free generators first, then torsion by increasing order). A `*` entry
//! marks a value the tabulation leaves open; it ranges over the residues of
//! its target generator and every verdict downstream is quantified over it.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::path::Path;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::dsl::{self, ParseError, Pos, Section};
use crate::fgab::{kernel_subquotient, preimage, CyclicSum, Entry, FgAbError, FgAbGroup, Homomorphism, IntMatrix, ParametricHom};
use crate::lattice::{LatticeError, SubgroupLattice};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum CoeffError {
    #[error("parse error at {0}")]
    Parse(#[from] ParseError),
    #[error("{}", fmt_validation(invariant, pos, message))]
    Validation { invariant: &'static str, pos: Option<Pos>, message: String },
    #[error("degree {q} lies outside the window [{min}, {max}] of `{symmetry}`")]
    OutOfWindow { symmetry: String, q: i64, min: i64, max: i64 },
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("`{sub}` is not contained in `{sup}`")]
    NotIncluded { sub: String, sup: String },
    #[error("no {kind} tabulated for {from} -> {to} in degree {q}")]
    Missing { kind: &'static str, from: String, to: String, q: i64 },
    #[error("cannot read `{path}`: {message}")]
    Io { path: String, message: String },
    #[error("unknown builtin coefficient system `{0}`")]
    UnknownBuiltin(String),
}

fn fmt_validation(invariant: &str, pos: &Option<Pos>, message: &str) -> String {
    match pos {
        Some(p) => format!("validation failed [{invariant}] at {p}: {message}"),
        None => format!("validation failed [{invariant}]: {message}"),
    }
}

fn invalid(invariant: &'static str, pos: impl Into<Option<Pos>>, message: impl Into<String>) -> CoeffError {
    CoeffError::Validation { invariant, pos: pos.into(), message: message.into() }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SymmetryType {
    pub name: String,
    pub description: String,
    /// Inclusive range of spatial dimensions covered.
    pub window: (i64, i64),
}

/// Which family of maps a tabulated matrix belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MapKind {
    Transfer,
    Point,
    Eta,
}

impl MapKind {
    fn keyword(self) -> &'static str {
        match self {
            MapKind::Transfer => "transfer",
            MapKind::Point => "point",
            MapKind::Eta => "eta",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Tabulated<T> {
    value: T,
    comments: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoefficientSystem {
    symmetry: SymmetryType,
    lattice: SubgroupLattice,
    abelian: bool,
    groups: BTreeMap<(usize, i64), Tabulated<FgAbGroup>>,
    // transfer and point keys are (sub, sup, q); eta keys are (L, L, q)
    maps: BTreeMap<(MapKind, usize, usize, i64), Tabulated<ParametricHom>>,
    header_comments: Vec<String>,
}

impl CoefficientSystem {
    /// A system with every group trivial.
    pub fn empty(symmetry: SymmetryType, lattice: SubgroupLattice) -> Self {
        CoefficientSystem {
            symmetry,
            lattice,
            abelian: true,
            groups: BTreeMap::new(),
            maps: BTreeMap::new(),
            header_comments: Vec::new(),
        }
    }

    pub fn symmetry(&self) -> &SymmetryType {
        &self.symmetry
    }

    pub fn lattice(&self) -> &SubgroupLattice {
        &self.lattice
    }

    pub fn window(&self) -> (i64, i64) {
        self.symmetry.window
    }

    fn check_window(&self, q: i64) -> Result<(), CoeffError> {
        let (min, max) = self.symmetry.window;
        if q < min || q > max {
            return Err(CoeffError::OutOfWindow { symmetry: self.symmetry.name.clone(), q, min, max });
        }
        Ok(())
    }

    /// The group of `q`-dimensional phases with internal symmetry `L`.
    pub fn group_at(&self, subgroup: &str, q: i64) -> Result<FgAbGroup, CoeffError> {
        let l = self.lattice.require(subgroup)?;
        self.group_idx(l, q)
    }

    pub fn group_idx(&self, l: usize, q: i64) -> Result<FgAbGroup, CoeffError> {
        self.check_window(q)?;
        Ok(self.groups.get(&(l, q)).map(|t| t.value.clone()).unwrap_or_default())
    }

    fn presentation(&self, l: usize, q: i64) -> Result<CyclicSum, CoeffError> {
        Ok(self.group_idx(l, q)?.presentation())
    }

    fn lookup(&self, kind: MapKind, a: usize, b: usize, q: i64, src: CyclicSum, tgt: CyclicSum) -> Result<ParametricHom, CoeffError> {
        if let Some(t) = self.maps.get(&(kind, a, b, q)) {
            return Ok(t.value.clone());
        }
        if src.is_empty() || tgt.is_empty() {
            return Ok(Homomorphism::zero(src, tgt).into());
        }
        Err(CoeffError::Missing {
            kind: kind.keyword(),
            from: self.lattice.name(a).to_string(),
            to: self.lattice.name(b).to_string(),
            q,
        })
    }

    fn require_inclusion(&self, sub: usize, sup: usize) -> Result<(), CoeffError> {
        if !self.lattice.contains(sub, sup) {
            return Err(CoeffError::NotIncluded {
                sub: self.lattice.name(sub).to_string(),
                sup: self.lattice.name(sup).to_string(),
            });
        }
        Ok(())
    }

    /// Transfer `groups(sub, q) -> groups(sup, q)`.
    pub fn transfer_at(&self, sub: &str, sup: &str, q: i64) -> Result<ParametricHom, CoeffError> {
        self.transfer_idx(self.lattice.require(sub)?, self.lattice.require(sup)?, q)
    }

    pub fn transfer_idx(&self, sub: usize, sup: usize, q: i64) -> Result<ParametricHom, CoeffError> {
        self.require_inclusion(sub, sup)?;
        let (src, tgt) = (self.presentation(sub, q)?, self.presentation(sup, q)?);
        if sub == sup {
            return Ok(Homomorphism::identity(src).into());
        }
        self.lookup(MapKind::Transfer, sub, sup, q, src, tgt)
    }

    /// Point inclusion `groups(sup, q) -> groups(sub, q)` for `sub ⊂ sup`.
    pub fn point_at(&self, sub: &str, sup: &str, q: i64) -> Result<ParametricHom, CoeffError> {
        self.point_idx(self.lattice.require(sub)?, self.lattice.require(sup)?, q)
    }

    pub fn point_idx(&self, sub: usize, sup: usize, q: i64) -> Result<ParametricHom, CoeffError> {
        self.require_inclusion(sub, sup)?;
        let (src, tgt) = (self.presentation(sup, q)?, self.presentation(sub, q)?);
        if sub == sup {
            return Ok(Homomorphism::identity(src).into());
        }
        self.lookup(MapKind::Point, sub, sup, q, src, tgt)
    }

    /// Multiplication by `η`, `groups(L, q) -> groups(L, q - 1)`.
    pub fn eta_at(&self, subgroup: &str, q: i64) -> Result<ParametricHom, CoeffError> {
        self.eta_idx(self.lattice.require(subgroup)?, q)
    }

    pub fn eta_idx(&self, l: usize, q: i64) -> Result<ParametricHom, CoeffError> {
        let (src, tgt) = (self.presentation(l, q)?, self.presentation(l, q - 1)?);
        self.lookup(MapKind::Eta, l, l, q, src, tgt)
    }

    /// A lift of `η: groups(sub, q + 1) -> groups(sub, q)` through the point
    /// inclusion `groups(sup, q) -> groups(sub, q)`. Lifts differ by the
    /// kernel of the point inclusion; every kernel generator enters as a
    /// parameter on every source generator.
    pub fn eta_lift_idx(&self, sub: usize, sup: usize, q: i64) -> Result<ParametricHom, CoeffError> {
        let fail = |m: String| CoeffError::Validation { invariant: "eta-lift", pos: None, message: m };
        let eta = self.eta_idx(sub, q + 1)?.as_pinned()?;
        let point = self.point_idx(sub, sup, q)?.as_pinned()?;
        let (src, tgt) = (eta.source().clone(), point.source().clone());
        let mut cols = Vec::new();
        for j in 0..src.len() {
            let x = preimage(&point, &eta.matrix().column(j)).ok_or_else(|| {
                fail(format!("η on generator {j} does not lift through the point inclusion at q = {q}"))
            })?;
            cols.push(x);
        }
        let lift = Homomorphism::new(src.clone(), tgt.clone(), IntMatrix::from_columns(tgt.len(), &cols))?;
        let ker = kernel_subquotient(&point);
        let mut out = ParametricHom::pinned(lift);
        for j in 0..src.len() {
            for (k, order) in ker.group().generator_orders().iter().enumerate() {
                if order.is_zero() {
                    return Err(fail("the lift is ambiguous up to an element of infinite order".into()));
                }
                let mut delta = IntMatrix::zeros(tgt.len(), src.len());
                for (i, v) in ker.generators().column(k).into_iter().enumerate() {
                    delta.set(i, j, v);
                }
                out = out.with_param(format!("lift ambiguity {k} on column {j}"), delta, order.clone());
            }
        }
        Ok(out)
    }

    pub fn set_group(&mut self, subgroup: &str, q: i64, group: FgAbGroup, provenance: &str) -> Result<(), CoeffError> {
        let l = self.lattice.require(subgroup)?;
        self.check_window(q)?;
        self.groups.insert((l, q), Tabulated { value: group, comments: vec![provenance.to_string()] });
        Ok(())
    }

    pub fn set_map(&mut self, kind: MapKind, a: &str, b: &str, q: i64, map: ParametricHom, provenance: &str) -> Result<(), CoeffError> {
        let (a, b) = (self.lattice.require(a)?, self.lattice.require(b)?);
        self.maps.insert((kind, a, b, q), Tabulated { value: map, comments: vec![provenance.to_string()] });
        Ok(())
    }

    /// Checks every invariant; `load` calls this on each file.
    pub fn validate(&self) -> Result<(), CoeffError> {
        for (&(kind, a, b, q), t) in &self.maps {
            let name = |i: usize| self.lattice.name(i).to_string();
            let (src, tgt) = match kind {
                MapKind::Transfer | MapKind::Point => {
                    self.check_window(q).map_err(|e| invalid("window", None, e.to_string()))?;
                    if !self.lattice.contains(a, b) {
                        return Err(invalid("inclusion", None, format!("{} map along {} ⊄ {}", kind.keyword(), name(a), name(b))));
                    }
                    let (lo, hi) = (self.presentation(a, q)?, self.presentation(b, q)?);
                    if kind == MapKind::Transfer { (lo, hi) } else { (hi, lo) }
                }
                MapKind::Eta => {
                    for d in [q, q - 1] {
                        self.check_window(d).map_err(|e| invalid("window", None, e.to_string()))?;
                    }
                    (self.presentation(a, q)?, self.presentation(a, q - 1)?)
                }
            };
            if t.value.source() != &src || t.value.target() != &tgt {
                return Err(invalid(
                    "endpoint",
                    None,
                    format!(
                        "{} {} {} {q}: tabulated as {} -> {}, groups table says {} -> {}",
                        kind.keyword(),
                        name(a),
                        name(b),
                        t.value.source(),
                        t.value.target(),
                        src,
                        tgt
                    ),
                ));
            }
            t.value.instances().map_err(|e| invalid("well-defined", None, format!("{} {} {} {q}: {e}", kind.keyword(), name(a), name(b))))?;
            if kind != MapKind::Eta && a == b {
                let id = t.value.as_pinned().ok().filter(Homomorphism::is_identity);
                if id.is_none() {
                    return Err(invalid("identity", None, format!("{} {} {} {q} must be the identity", kind.keyword(), name(a), name(b))));
                }
            }
        }
        let (qmin, qmax) = self.symmetry.window;
        for q in qmin..=qmax {
            for (a, b, c) in self.lattice.chains() {
                let direct = self.transfer_idx(a, c, q);
                let (first, second) = (self.transfer_idx(a, b, q), self.transfer_idx(b, c, q));
                if let (Ok(d), Ok(f), Ok(s)) = (direct, first, second) {
                    if !composites_agree(&s, &f, &d)? {
                        return Err(invalid(
                            "functoriality",
                            None,
                            format!(
                                "transfer {}⊂{}⊂{} in degree {q} does not compose to the tabulated transfer",
                                self.lattice.name(a),
                                self.lattice.name(b),
                                self.lattice.name(c)
                            ),
                        ));
                    }
                }
                let direct = self.point_idx(a, c, q);
                let (first, second) = (self.point_idx(b, c, q), self.point_idx(a, b, q));
                if let (Ok(d), Ok(f), Ok(s)) = (direct, first, second) {
                    if !composites_agree(&s, &f, &d)? {
                        return Err(invalid(
                            "functoriality",
                            None,
                            format!("point inclusions along {}⊂{}⊂{} in degree {q} do not compose", self.lattice.name(a), self.lattice.name(b), self.lattice.name(c)),
                        ));
                    }
                }
            }
            if self.abelian {
                for (a, b) in self.lattice.strict_inclusions() {
                    let (Ok(tr), Ok(pt)) = (self.transfer_idx(a, b, q), self.point_idx(a, b, q)) else { continue };
                    let index = BigInt::from(self.lattice.index(a, b).expect("included"));
                    let expected: ParametricHom = Homomorphism::identity(self.presentation(a, q)?).scale(&index).into();
                    if !composites_always(&pt, &tr, &expected)? {
                        return Err(invalid(
                            "double-coset",
                            None,
                            format!(
                                "point inclusion after transfer along {}⊂{} in degree {q} is not multiplication by the index {index}",
                                self.lattice.name(a),
                                self.lattice.name(b)
                            ),
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    /// Text in the coefficient-file format; `parse` of the result equals `self`.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        for c in &self.header_comments {
            let _ = writeln!(out, "# {c}");
        }
        let _ = writeln!(out, "[symmetry {}]", self.symmetry.name);
        let _ = writeln!(out, "description = {}", self.symmetry.description);
        let _ = writeln!(out, "window = {} {}", self.symmetry.window.0, self.symmetry.window.1);
        out.push('\n');
        let amb = self.lattice.ambient();
        let _ = writeln!(out, "[ambient {}] order = {}", amb.name, amb.order);
        let _ = writeln!(out, "abelian = {}", self.abelian);
        for s in &self.lattice.subgroups()[1..] {
            let _ = writeln!(out, "[subgroup {}] order = {}", s.name, s.order);
        }
        for (a, b) in self.lattice.declared_inclusions() {
            let _ = writeln!(out, "[include {a} {b}]");
        }
        for (&(l, q), t) in &self.groups {
            out.push('\n');
            for c in &t.comments {
                let _ = writeln!(out, "# {c}");
            }
            let _ = writeln!(out, "[group {} {q}] {}", self.lattice.name(l), t.value);
        }
        for (&(kind, a, b, q), t) in &self.maps {
            out.push('\n');
            for c in &t.comments {
                let _ = writeln!(out, "# {c}");
            }
            let args = match kind {
                MapKind::Eta => format!("{} {q}", self.lattice.name(a)),
                _ => format!("{} {} {q}", self.lattice.name(a), self.lattice.name(b)),
            };
            let _ = writeln!(out, "[{} {args}] matrix = {}", kind.keyword(), dsl::format_entries(&t.value.entries()));
        }
        out
    }

    /// Deterministic JSON description of the loaded system.
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct GroupJson<'a> {
            subgroup: &'a str,
            q: i64,
            group: String,
        }
        #[derive(Serialize)]
        struct MapJson<'a> {
            kind: &'static str,
            from: &'a str,
            to: &'a str,
            q: i64,
            matrix: Vec<Vec<serde_json::Value>>,
        }
        #[derive(Serialize)]
        struct SysJson<'a> {
            symmetry: &'a SymmetryType,
            ambient: &'a crate::lattice::Subgroup,
            subgroups: &'a [crate::lattice::Subgroup],
            inclusions: Vec<(&'a str, &'a str)>,
            groups: Vec<GroupJson<'a>>,
            maps: Vec<MapJson<'a>>,
        }
        let entry_json = |e: &Entry| match e {
            Entry::Fixed(x) => serde_json::Value::String(x.to_string()),
            Entry::Undetermined => serde_json::Value::String("*".into()),
        };
        let view = SysJson {
            symmetry: &self.symmetry,
            ambient: self.lattice.ambient(),
            subgroups: self.lattice.subgroups(),
            inclusions: self.lattice.declared_inclusions().collect(),
            groups: self
                .groups
                .iter()
                .map(|(&(l, q), t)| GroupJson { subgroup: self.lattice.name(l), q, group: t.value.to_string() })
                .collect(),
            maps: self
                .maps
                .iter()
                .map(|(&(kind, a, b, q), t)| MapJson {
                    kind: kind.keyword(),
                    from: self.lattice.name(a),
                    to: self.lattice.name(b),
                    q,
                    matrix: t.value.entries().iter().map(|r| r.iter().map(entry_json).collect()).collect(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&view).expect("serializable")
    }
}

/// Is there an instance of `outer ∘ inner` that equals an instance of `direct`?
fn composites_agree(outer: &ParametricHom, inner: &ParametricHom, direct: &ParametricHom) -> Result<bool, CoeffError> {
    let err = |e: FgAbError| invalid("functoriality", None, e.to_string());
    let directs: Vec<Homomorphism> = direct.instances().map_err(err)?.into_iter().map(|(_, h)| h).collect();
    for (_, o) in outer.instances().map_err(err)? {
        for (_, i) in inner.instances().map_err(err)? {
            let c = o.compose(&i).map_err(err)?;
            if directs.contains(&c) {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// Does every instance of `outer ∘ inner` equal the pinned `expected`?
fn composites_always(outer: &ParametricHom, inner: &ParametricHom, expected: &ParametricHom) -> Result<bool, CoeffError> {
    let err = |e: FgAbError| invalid("double-coset", None, e.to_string());
    let expected = expected.as_pinned().map_err(err)?;
    for (_, o) in outer.instances().map_err(err)? {
        for (_, i) in inner.instances().map_err(err)? {
            if o.compose(&i).map_err(err)? != expected {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

impl fmt::Display for CoefficientSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.serialize())
    }
}

fn parse_window(tok: &dsl::Token) -> Result<(i64, i64), ParseError> {
    let parts: Vec<&str> = tok.text.split_whitespace().collect();
    let bad = || ParseError::expecting(tok.pos, format!("expected `min max`, found `{}`", tok.text), &["two integers"]);
    let [a, b] = parts[..] else { return Err(bad()) };
    let (a, b): (i64, i64) = (a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?);
    if a > b {
        return Err(ParseError::new(tok.pos, format!("empty window [{a}, {b}]")));
    }
    Ok((a, b))
}

fn require_provenance(s: &Section) -> Result<(), CoeffError> {
    if s.comments.iter().all(|c| c.is_empty()) {
        return Err(invalid(
            "provenance",
            s.pos(),
            format!("[{}] entry has no comment recording where its value comes from", s.kind.text),
        ));
    }
    Ok(())
}

/// Parses and validates coefficient-file text.
pub fn parse(text: &str) -> Result<CoefficientSystem, CoeffError> {
    let doc = dsl::parse_document(text)?;
    let mut sections = doc.sections.iter().peekable();

    let first = sections.next().ok_or_else(|| ParseError::expecting(Pos { line: 1, col: 1 }, "empty coefficient file", &["[symmetry"]))?;
    if first.kind.text != "symmetry" {
        return Err(ParseError::expecting(first.pos(), format!("expected [symmetry], found [{}]", first.kind.text), &["symmetry"]).into());
    }
    first.arity(1, "[symmetry name]")?;
    first.check_keys(&["description", "window"])?;
    let symmetry = SymmetryType {
        name: first.args[0].text.clone(),
        description: first.get("description").map(|t| t.text.clone()).unwrap_or_default(),
        window: parse_window(first.require("window")?)?,
    };

    let amb = sections.next().filter(|s| s.kind.text == "ambient").ok_or_else(|| {
        ParseError::expecting(doc.sections.get(1).map_or(first.pos(), Section::pos), "expected the [ambient] section after [symmetry]", &["ambient"])
    })?;
    amb.arity(1, "[ambient name]")?;
    amb.check_keys(&["order", "abelian"])?;
    let mut lattice = SubgroupLattice::new(&amb.args[0].text, dsl::parse_int(amb.require("order")?, "positive integer")?)
        .map_err(|e| invalid("lattice", amb.pos(), e.to_string()))?;
    let abelian = amb.get("abelian").map(dsl::parse_bool).transpose()?.unwrap_or(false);

    let mut sys = CoefficientSystem {
        symmetry,
        lattice: SubgroupLattice::trivial(),
        abelian,
        groups: BTreeMap::new(),
        maps: BTreeMap::new(),
        header_comments: first.comments.clone(),
    };

    let mut entries = Vec::new();
    for s in sections {
        match s.kind.text.as_str() {
            "subgroup" => {
                s.arity(1, "[subgroup name]")?;
                s.check_keys(&["order"])?;
                lattice
                    .add_subgroup(&s.args[0].text, dsl::parse_int(s.require("order")?, "positive integer")?)
                    .map_err(|e| invalid("lattice", s.pos(), e.to_string()))?;
            }
            "include" => {
                s.arity(2, "[include sub sup]")?;
                lattice.add_inclusion(&s.args[0].text, &s.args[1].text).map_err(|e| invalid("lattice", s.pos(), e.to_string()))?;
            }
            "group" | "transfer" | "point" | "eta" => entries.push(s),
            other => {
                return Err(ParseError::expecting(
                    s.pos(),
                    format!("unknown section [{other}]"),
                    &["subgroup", "include", "group", "transfer", "point", "eta"],
                )
                .into())
            }
        }
    }
    sys.lattice = lattice;

    let lookup = |tok: &dsl::Token, lattice: &SubgroupLattice| -> Result<usize, CoeffError> {
        lattice.index_of(&tok.text).ok_or_else(|| invalid("lattice", tok.pos, format!("unknown subgroup `{}`", tok.text)))
    };
    let degree = |tok: &dsl::Token, sys: &CoefficientSystem| -> Result<i64, CoeffError> {
        let q: i64 = dsl::parse_int(tok, "integer degree")?;
        sys.check_window(q).map_err(|e| invalid("window", tok.pos, e.to_string()))?;
        Ok(q)
    };

    // groups first so map endpoints can be resolved regardless of order
    for s in entries.iter().filter(|s| s.kind.text == "group") {
        s.arity(2, "[group subgroup q]")?;
        require_provenance(s)?;
        let l = lookup(&s.args[0], &sys.lattice)?;
        let q = degree(&s.args[1], &sys)?;
        let tok = s.bare().ok_or_else(|| ParseError::expecting(s.pos(), "[group] needs a group after the header", &["Z^r + Z/d ..."]))?;
        let orders = crate::fgab::parse_orders(&tok.text).map_err(|e| ParseError::new(tok.pos, e.to_string()))?;
        let group = FgAbGroup::from_orders(&orders);
        if group.generator_orders() != orders {
            return Err(invalid("normal-form", tok.pos, format!("`{}` is not in normal form; write `{group}`", tok.text)));
        }
        if sys.groups.insert((l, q), Tabulated { value: group, comments: s.comments.clone() }).is_some() {
            return Err(invalid("duplicate", s.pos(), format!("group ({}, {q}) tabulated twice", s.args[0].text)));
        }
    }
    for s in entries.iter().filter(|s| s.kind.text != "group") {
        let kind = match s.kind.text.as_str() {
            "transfer" => MapKind::Transfer,
            "point" => MapKind::Point,
            _ => MapKind::Eta,
        };
        require_provenance(s)?;
        s.check_keys(&["matrix"])?;
        let (a, b, q, src, tgt) = if kind == MapKind::Eta {
            s.arity(2, "[eta subgroup q]")?;
            let l = lookup(&s.args[0], &sys.lattice)?;
            let q = degree(&s.args[1], &sys)?;
            let tgt = sys.presentation(l, q - 1).map_err(|e| invalid("window", s.args[1].pos, e.to_string()))?;
            (l, l, q, sys.presentation(l, q)?, tgt)
        } else {
            s.arity(3, &format!("[{} sub sup q]", s.kind.text))?;
            let a = lookup(&s.args[0], &sys.lattice)?;
            let b = lookup(&s.args[1], &sys.lattice)?;
            let q = degree(&s.args[2], &sys)?;
            if !sys.lattice.contains(a, b) {
                return Err(invalid("inclusion", s.pos(), format!("`{}` is not contained in `{}`", s.args[0].text, s.args[1].text)));
            }
            let (lo, hi) = (sys.presentation(a, q)?, sys.presentation(b, q)?);
            if kind == MapKind::Transfer {
                (a, b, q, lo, hi)
            } else {
                (a, b, q, hi, lo)
            }
        };
        let mtok = s.require("matrix")?;
        let rows = dsl::parse_matrix(mtok)?;
        // an empty row list stands for any map out of or into the trivial group
        let rows = if rows.is_empty() { vec![Vec::new(); tgt.len()] } else { rows };
        let map = ParametricHom::from_entries(src.clone(), tgt.clone(), &rows).map_err(|e| {
            invalid("endpoint", mtok.pos, format!("{} -> {}: {e}", src, tgt))
        })?;
        if sys.maps.insert((kind, a, b, q), Tabulated { value: map, comments: s.comments.clone() }).is_some() {
            return Err(invalid("duplicate", s.pos(), format!("[{}] tabulated twice", s.kind.text)));
        }
    }
    sys.validate()?;
    Ok(sys)
}

pub fn load(path: impl AsRef<Path>) -> Result<CoefficientSystem, CoeffError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| CoeffError::Io { path: path.display().to_string(), message: e.to_string() })?;
    parse(&text)
}

const BUILTINS: &[(&str, &str)] = &[
    ("spin", include_str!("../data/spin.coeff")),
    ("spin_z2", include_str!("../data/spin_z2.coeff")),
    ("so", include_str!("../data/so.coeff")),
];

pub fn builtin_names() -> impl Iterator<Item = &'static str> {
    BUILTINS.iter().map(|(n, _)| *n)
}

pub fn builtin_source(name: &str) -> Option<&'static str> {
    BUILTINS.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

pub fn builtin(name: &str) -> Result<CoefficientSystem, CoeffError> {
    let text = builtin_source(name).ok_or_else(|| CoeffError::UnknownBuiltin(name.to_string()))?;
    parse(text)
}

/// A builtin name, or else a path to a coefficient file.
pub fn resolve(name_or_path: &str) -> Result<CoefficientSystem, CoeffError> {
    match builtin_source(name_or_path) {
        Some(text) => parse(text),
        None => load(name_or_path),
    }
}

impl From<FgAbError> for CoeffError {
    fn from(e: FgAbError) -> Self {
        invalid("algebra", None, e.to_string())
    }
}

/// Convenience for tests and presets: a pinned map from a row-major literal.
pub fn pinned(source: &FgAbGroup, target: &FgAbGroup, rows: &[&[i64]]) -> Result<ParametricHom, FgAbError> {
    let m = if rows.is_empty() { IntMatrix::zeros(target.num_generators(), source.num_generators()) } else { IntMatrix::from_i64(rows) };
    Ok(Homomorphism::new(source.presentation(), target.presentation(), m)?.into())
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINI: &str = "\
[symmetry toy]
description = two-element test system
window = 0 1

[ambient Z2] order = 2
abelian = true
[subgroup e] order = 1

# test value
[group e 0] Z/2
# test value
[group Z2 0] Z/2 + Z/2
# test value
[transfer e Z2 0] matrix = [[0],[1]]
# test value
[point e Z2 0] matrix = [[1,0]]
";

    #[test]
    fn parses_and_queries() {
        let sys = parse(MINI).unwrap();
        assert_eq!(sys.group_at("e", 0).unwrap().to_string(), "Z/2");
        assert!(sys.group_at("e", 1).unwrap().is_trivial());
        assert!(matches!(sys.group_at("e", 2), Err(CoeffError::OutOfWindow { .. })));
        assert!(matches!(sys.group_at("H", 0), Err(CoeffError::Lattice(_))));
        assert!(sys.transfer_at("e", "e", 0).unwrap().as_pinned().unwrap().is_identity());
        // both endpoints trivial: the zero map is forced
        assert!(sys.transfer_at("e", "Z2", 1).unwrap().as_pinned().unwrap().is_zero());
        assert!(matches!(sys.transfer_at("Z2", "e", 0), Err(CoeffError::NotIncluded { .. })));
    }

    #[test]
    fn round_trip() {
        let sys = parse(MINI).unwrap();
        let again = parse(&sys.serialize()).unwrap();
        assert_eq!(sys, again);
        assert_eq!(sys.to_json(), again.to_json());
    }

    #[test]
    fn missing_provenance_rejected() {
        let text = MINI.replacen("# test value\n[group e 0]", "[group e 0]", 1);
        let err = parse(&text).unwrap_err();
        assert!(matches!(err, CoeffError::Validation { invariant: "provenance", .. }), "{err}");
    }

    #[test]
    fn non_identity_self_transfer_rejected() {
        let text = format!("{MINI}# bad\n[transfer e e 0] matrix = [[0]]\n");
        let err = parse(&text).unwrap_err();
        assert!(matches!(err, CoeffError::Validation { invariant: "identity", .. }), "{err}");
    }

    #[test]
    fn double_coset_violation_rejected() {
        let text = MINI.replace("[point e Z2 0] matrix = [[1,0]]", "[point e Z2 0] matrix = [[0,1]]");
        let err = parse(&text).unwrap_err();
        assert!(matches!(err, CoeffError::Validation { invariant: "double-coset", .. }), "{err}");
    }

    #[test]
    fn non_normal_form_rejected() {
        let text = MINI.replace("Z/2 + Z/2", "Z/2 + Z/4 + Z/2");
        let err = parse(&text).unwrap_err();
        assert!(matches!(err, CoeffError::Validation { invariant: "normal-form", .. }), "{err}");
    }

    #[test]
    fn endpoint_mismatch_rejected() {
        let text = MINI.replace("[[0],[1]]", "[[0,1]]");
        assert!(matches!(parse(&text).unwrap_err(), CoeffError::Validation { invariant: "endpoint", .. }));
    }

    #[test]
    fn empty_table_is_all_trivial() {
        let sys = parse("[symmetry none]\nwindow = 0 0\n[ambient e] order = 1\n").unwrap();
        assert!(sys.group_at("e", 0).unwrap().is_trivial());
    }

    #[test]
    fn parse_errors_carry_positions() {
        let err = parse("").unwrap_err();
        assert!(matches!(err, CoeffError::Parse(ParseError { pos: Pos { line: 1, col: 1 }, .. })));
        let err = parse("[symmetry s]\nwindow = 0 x\n").unwrap_err();
        assert!(matches!(err, CoeffError::Parse(ParseError { pos: Pos { line: 2, col: 10 }, .. })), "{err:?}");
    }
}
