//! Deducing one unknown group in an exact sequence from its neighbours.
//!
//! In `A -f-> B -g-> U -h-> D -k-> E` exactness at `U` gives
//! `0 -> coker f -> U -> ker k -> 0`, so the unknown is pinned between a
//! cokernel on the left and a kernel on the right. Maps may carry
//! undetermined entries; every verdict is computed for every instance and
//! reported only when it does not depend on the choice.
//!
//! The builtin problem is the cofiber sequence of `S(2σ)₊ -> S⁰ -> S^{2σ}`
//! for a group of order two acting by `-1` on a plane. After the Adams
//! isomorphism `S(2σ)₊` contributes `[Σ^k ∧ RP¹₊] ≅ groups(e, q+1) ⊕ groups(e, q)`
//! with `q = k - 2`, and the map to `groups(Z2, q)` is assembled from the
//! components of the transfer `RP¹₊ ≃ S¹ ∨ S⁰ -> S⁰`: `η` on `S¹` and `2` on
//! `S⁰`.

use std::collections::BTreeSet;
use std::fmt::{self, Write as _};

use num_bigint::BigInt;
use serde::Serialize;
use thiserror::Error;

use crate::coeffsys::{CoeffError, CoefficientSystem};
use crate::dsl::{self, ParseError, Pos};
use crate::fgab::{
    cokernel, homology_at, image, is_epimorphism, is_monomorphism, kernel, resolve_extensions, FgAbError, FgAbGroup,
    Homomorphism, ParametricHom, MAX_INSTANCES,
};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum LexError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("map {index} ({from} -> {to}): {message}")]
    Endpoint { index: usize, from: String, to: String, message: String },
    #[error("exactly one unknown slot is required, found {0}")]
    UnknownCount(usize),
    #[error("underdetermined, missing: {}", missing.join("; "))]
    Underdetermined { missing: Vec<String> },
    #[error("not exact at {slot}: {message}")]
    InconsistentExactness { slot: String, message: String },
    #[error("the answer depends on undetermined entries: {}", values.join(" | "))]
    NotInvariant { values: Vec<String> },
    #[error("transfer component: {0}")]
    Component(String),
    #[error("unknown problem `{0}`")]
    UnknownProblem(String),
    #[error(transparent)]
    Coefficients(#[from] CoeffError),
    #[error(transparent)]
    Algebra(#[from] FgAbError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Slot {
    Known(FgAbGroup),
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlotSpec {
    pub label: String,
    pub slot: Slot,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MapProperty {
    Epi,
    Mono,
    Zero,
}

impl MapProperty {
    fn name(self) -> &'static str {
        match self {
            MapProperty::Epi => "epi",
            MapProperty::Mono => "mono",
            MapProperty::Zero => "zero",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MapSpec {
    Known(ParametricHom),
    Property(MapProperty),
    Unknown,
}

/// `slots[i] -> slots[i + 1]` is `maps[i]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactSequenceProblem {
    pub name: String,
    slots: Vec<SlotSpec>,
    maps: Vec<MapSpec>,
}

impl ExactSequenceProblem {
    pub fn new(name: impl Into<String>, slots: Vec<SlotSpec>, maps: Vec<MapSpec>) -> Result<Self, LexError> {
        let p = ExactSequenceProblem { name: name.into(), slots, maps };
        if p.maps.len() + 1 != p.slots.len() {
            return Err(LexError::Endpoint {
                index: p.maps.len(),
                from: String::new(),
                to: String::new(),
                message: format!("{} slots need {} maps", p.slots.len(), p.slots.len().saturating_sub(1)),
            });
        }
        for (i, m) in p.maps.iter().enumerate() {
            let MapSpec::Known(h) = m else { continue };
            for (slot, side, end) in [(&p.slots[i], "source", h.source()), (&p.slots[i + 1], "target", h.target())] {
                match &slot.slot {
                    Slot::Known(g) if *g != end.normal_form() => {
                        return Err(p.endpoint_error(i, format!("{side} is {}, slot is {g}", end.normal_form())));
                    }
                    Slot::Unknown => return Err(p.endpoint_error(i, format!("{side} slot is unknown"))),
                    _ => {}
                }
            }
        }
        Ok(p)
    }

    fn endpoint_error(&self, i: usize, message: String) -> LexError {
        LexError::Endpoint { index: i, from: self.slots[i].label.clone(), to: self.slots[i + 1].label.clone(), message }
    }

    pub fn slots(&self) -> &[SlotSpec] {
        &self.slots
    }

    pub fn maps(&self) -> &[MapSpec] {
        &self.maps
    }

    pub fn unknown_index(&self) -> Result<usize, LexError> {
        let unknown: Vec<usize> = (0..self.slots.len()).filter(|&i| self.slots[i].slot == Slot::Unknown).collect();
        match unknown[..] {
            [u] => Ok(u),
            _ => Err(LexError::UnknownCount(unknown.len())),
        }
    }

    fn known(&self, i: usize) -> Option<&FgAbGroup> {
        match &self.slots.get(i)?.slot {
            Slot::Known(g) => Some(g),
            Slot::Unknown => None,
        }
    }

    fn arrow(&self, i: usize) -> String {
        format!("{} -> {}", self.slots[i].label, self.slots[i + 1].label)
    }

    /// Problem-file text; parses back to an equal problem.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "[sequence {}]", self.name);
        for s in &self.slots {
            match &s.slot {
                Slot::Known(g) => {
                    let _ = writeln!(out, "[slot {}] {g}", s.label);
                }
                Slot::Unknown => {
                    let _ = writeln!(out, "[slot {}] unknown", s.label);
                }
            }
        }
        for (i, m) in self.maps.iter().enumerate() {
            let head = format!("[map {} {}]", self.slots[i].label, self.slots[i + 1].label);
            match m {
                MapSpec::Known(h) => {
                    let _ = writeln!(out, "{head} matrix = {}", dsl::format_entries(&h.entries()));
                }
                MapSpec::Property(p) => {
                    let _ = writeln!(out, "{head} property = {}", p.name());
                }
                MapSpec::Unknown => {}
            }
        }
        out
    }
}

impl fmt::Display for ExactSequenceProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (i, s) in self.slots.iter().enumerate() {
            parts.push(match &s.slot {
                Slot::Known(g) => format!("{} = {g}", s.label),
                Slot::Unknown => format!("{} = ?", s.label),
            });
            if let Some(m) = self.maps.get(i) {
                parts.push(match m {
                    MapSpec::Known(h) => format!("-{}->", dsl::format_entries(&h.entries())),
                    MapSpec::Property(p) => format!("-({})->", p.name()),
                    MapSpec::Unknown => "->".to_string(),
                });
            }
        }
        f.write_str(&parts.join(" "))
    }
}

/// Parses a problem file: `[sequence name]`, then `[slot L] <group | unknown>`
/// in order, then `[map L M]` with `matrix =` or `property = epi|mono|zero`.
pub fn parse_problem(text: &str) -> Result<ExactSequenceProblem, LexError> {
    let doc = dsl::parse_document(text)?;
    let mut sections = doc.sections.iter();
    let head = sections
        .next()
        .ok_or_else(|| ParseError::expecting(Pos { line: 1, col: 1 }, "empty problem file", &["[sequence"]))?;
    if head.kind.text != "sequence" {
        return Err(ParseError::expecting(head.pos(), format!("expected [sequence], found [{}]", head.kind.text), &["sequence"]).into());
    }
    head.arity(1, "[sequence name]")?;
    let mut slots: Vec<SlotSpec> = Vec::new();
    let mut maps: Vec<MapSpec> = Vec::new();
    let mut slot_pos = Vec::new();
    for s in sections {
        match s.kind.text.as_str() {
            "slot" => {
                s.arity(1, "[slot label]")?;
                if !maps.is_empty() {
                    return Err(ParseError::new(s.pos(), "all [slot] sections come before the [map] sections").into());
                }
                let label = s.args[0].text.clone();
                if slots.iter().any(|x| x.label == label) {
                    return Err(ParseError::new(s.pos(), format!("slot `{label}` declared twice")).into());
                }
                let tok = s.bare().ok_or_else(|| ParseError::expecting(s.pos(), "slot needs a group", &["a group", "unknown"]))?;
                let slot = if tok.text == "unknown" {
                    Slot::Unknown
                } else {
                    Slot::Known(tok.text.parse().map_err(|e: FgAbError| ParseError::expecting(tok.pos, e.to_string(), &["a group", "unknown"]))?)
                };
                slots.push(SlotSpec { label, slot });
                slot_pos.push(s.pos());
            }
            "map" => {
                s.arity(2, "[map from to]")?;
                if maps.is_empty() {
                    maps = vec![MapSpec::Unknown; slots.len().saturating_sub(1)];
                }
                let find = |t: &dsl::Token| {
                    slots
                        .iter()
                        .position(|x| x.label == t.text)
                        .ok_or_else(|| ParseError::new(t.pos, format!("unknown slot `{}`", t.text)))
                };
                let (a, b) = (find(&s.args[0])?, find(&s.args[1])?);
                if b != a + 1 {
                    return Err(ParseError::new(s.pos(), "a map joins consecutive slots").into());
                }
                if maps[a] != MapSpec::Unknown {
                    return Err(ParseError::new(s.pos(), "map declared twice").into());
                }
                s.check_keys(&["matrix", "property"])?;
                maps[a] = match (s.get("matrix"), s.get("property"), s.bare()) {
                    (Some(m), None, None) => {
                        let (Slot::Known(src), Slot::Known(tgt)) = (&slots[a].slot, &slots[b].slot) else {
                            return Err(ParseError::new(m.pos, "a matrix needs both slots known").into());
                        };
                        let entries = dsl::parse_matrix(m)?;
                        let h = ParametricHom::from_entries(src.presentation(), tgt.presentation(), &entries)
                            .map_err(|e| ParseError::new(m.pos, e.to_string()))?;
                        MapSpec::Known(h)
                    }
                    (None, Some(p), None) => MapSpec::Property(match p.text.as_str() {
                        "epi" => MapProperty::Epi,
                        "mono" => MapProperty::Mono,
                        "zero" => MapProperty::Zero,
                        _ => return Err(ParseError::expecting(p.pos, format!("unknown property `{}`", p.text), &["epi", "mono", "zero"]).into()),
                    }),
                    (None, None, Some(t)) if t.text == "unknown" => MapSpec::Unknown,
                    _ => return Err(ParseError::expecting(s.pos(), "a map needs exactly one description", &["matrix =", "property ="]).into()),
                };
            }
            other => {
                return Err(ParseError::expecting(s.pos(), format!("unexpected section [{other}]"), &["slot", "map"]).into());
            }
        }
    }
    if slots.is_empty() {
        return Err(ParseError::expecting(head.pos(), "no slots", &["[slot"]).into());
    }
    if maps.is_empty() {
        maps = vec![MapSpec::Unknown; slots.len() - 1];
    }
    ExactSequenceProblem::new(head.args[0].text.clone(), slots, maps)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Resolution {
    pub problem: String,
    pub unknown: String,
    /// Image of the slot before the unknown: the cokernel on the left.
    pub subgroup: FgAbGroup,
    /// Image of the unknown in the slot after it: the kernel on the right.
    pub quotient: FgAbGroup,
    pub group: Option<FgAbGroup>,
    pub extension_ambiguous: bool,
    pub instances: usize,
    pub steps: Vec<String>,
}

impl Resolution {
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "problem: {}", self.problem);
        for s in &self.steps {
            let _ = writeln!(out, "  {s}");
        }
        let _ = writeln!(out, "0 -> {} -> {} -> {} -> 0", self.subgroup, self.unknown, self.quotient);
        let _ = writeln!(out, "instances: {}", self.instances);
        let g = self.group.as_ref().map_or("undetermined (extension problem)".to_string(), |g| g.to_string());
        let _ = writeln!(out, "{} = {g}", self.unknown);
        out
    }
}

fn instances_of(h: &ParametricHom) -> Result<Vec<Homomorphism>, LexError> {
    Ok(h.instances()?.into_iter().map(|(_, m)| m).collect())
}

/// One side of the squeeze: the group for each instance of the map used.
struct Side {
    groups: Vec<FgAbGroup>,
    step: String,
}

fn left_side(p: &ExactSequenceProblem, u: usize) -> Result<Side, String> {
    let zero = |step: String| Ok(Side { groups: vec![FgAbGroup::trivial()], step });
    if u == 0 {
        return Err(format!("a slot before {}", p.slots[u].label));
    }
    let b = &p.slots[u - 1].label;
    if p.known(u - 1).is_some_and(FgAbGroup::is_trivial) {
        return zero(format!("{b} = 0"));
    }
    if let MapSpec::Property(MapProperty::Zero) = &p.maps[u - 1] {
        return zero(format!("{} is zero", p.arrow(u - 1)));
    }
    if let Some(MapSpec::Property(MapProperty::Mono)) = p.maps.get(u) {
        return zero(format!("{} is mono, so {} is zero", p.arrow(u), p.arrow(u - 1)));
    }
    let f = if u >= 2 { Some(&p.maps[u - 2]) } else { None };
    match f {
        Some(MapSpec::Property(MapProperty::Epi)) => zero(format!("{} is onto", p.arrow(u - 2))),
        Some(MapSpec::Property(MapProperty::Zero)) => match p.known(u - 1) {
            Some(g) => Ok(Side { groups: vec![g.clone()], step: format!("{} is zero, all of {b} injects", p.arrow(u - 2)) }),
            None => Err(format!("the group {b}")),
        },
        Some(MapSpec::Known(h)) => {
            let groups = instances_of(h).map_err(|e| e.to_string())?.iter().map(cokernel).collect();
            Ok(Side { groups, step: format!("coker({}) injects", p.arrow(u - 2)) })
        }
        _ if u >= 2 => Err(format!("the map {} (or that it is onto)", p.arrow(u - 2))),
        _ => Err(format!("a map into {b}")),
    }
}

fn right_side(p: &ExactSequenceProblem, u: usize) -> Result<Side, String> {
    let zero = |step: String| Ok(Side { groups: vec![FgAbGroup::trivial()], step });
    let last = p.slots.len() - 1;
    if u == last {
        return Err(format!("a slot after {}", p.slots[u].label));
    }
    let d = &p.slots[u + 1].label;
    if p.known(u + 1).is_some_and(FgAbGroup::is_trivial) {
        return zero(format!("{d} = 0"));
    }
    if let MapSpec::Property(MapProperty::Zero) = &p.maps[u] {
        return zero(format!("{} is zero", p.arrow(u)));
    }
    if u >= 1 {
        if let MapSpec::Property(MapProperty::Epi) = &p.maps[u - 1] {
            return zero(format!("{} is onto, so {} is zero", p.arrow(u - 1), p.arrow(u)));
        }
    }
    let k = if u + 1 < last { Some(&p.maps[u + 1]) } else { None };
    match k {
        Some(MapSpec::Property(MapProperty::Mono)) => zero(format!("{} is mono", p.arrow(u + 1))),
        Some(MapSpec::Property(MapProperty::Zero)) => match p.known(u + 1) {
            Some(g) => Ok(Side { groups: vec![g.clone()], step: format!("{} is zero, {d} is a quotient", p.arrow(u + 1)) }),
            None => Err(format!("the group {d}")),
        },
        Some(MapSpec::Known(h)) => {
            let groups = instances_of(h).map_err(|e| e.to_string())?.iter().map(kernel).collect();
            Ok(Side { groups, step: format!("ker({}) is the quotient", p.arrow(u + 1)) })
        }
        _ if u + 1 < last => Err(format!("the map {} (or that it is mono)", p.arrow(u + 1))),
        _ => Err(format!("a map out of {d}")),
    }
}

/// Exactness of the fully known parts, for every instance.
fn check_known_exactness(p: &ExactSequenceProblem) -> Result<(), LexError> {
    for (i, m) in p.maps.iter().enumerate() {
        let MapSpec::Property(prop) = m else { continue };
        let (src, tgt) = (p.known(i), p.known(i + 1));
        let bad = match prop {
            MapProperty::Epi => src.is_some_and(FgAbGroup::is_trivial) && tgt.is_some_and(|g| !g.is_trivial()),
            MapProperty::Mono => tgt.is_some_and(FgAbGroup::is_trivial) && src.is_some_and(|g| !g.is_trivial()),
            MapProperty::Zero => false,
        };
        if bad {
            return Err(LexError::InconsistentExactness {
                slot: p.slots[i].label.clone(),
                message: format!("{} cannot be {}", p.arrow(i), prop.name()),
            });
        }
    }
    for i in 1..p.slots.len().saturating_sub(1) {
        let (MapSpec::Known(f), MapSpec::Known(g)) = (&p.maps[i - 1], &p.maps[i]) else { continue };
        let (fs, gs) = (instances_of(f)?, instances_of(g)?);
        if fs.len().saturating_mul(gs.len()) as u64 > MAX_INSTANCES {
            return Err(FgAbError::TooManyInstances.into());
        }
        for f in &fs {
            for g in &gs {
                let label = p.slots[i].label.clone();
                if !g.compose(f)?.is_zero() {
                    return Err(LexError::InconsistentExactness { slot: label, message: "consecutive maps compose to a nonzero map".into() });
                }
                let h = homology_at(f, g)?;
                if !h.is_trivial() {
                    return Err(LexError::InconsistentExactness { slot: label, message: format!("ker / im = {h}") });
                }
            }
        }
    }
    Ok(())
}

/// Determines the unknown slot, quantified over all undetermined entries.
pub fn solve(p: &ExactSequenceProblem) -> Result<Resolution, LexError> {
    let u = p.unknown_index()?;
    check_known_exactness(p)?;
    let (left, right) = (left_side(p, u), right_side(p, u));
    let (left, right) = match (left, right) {
        (Ok(l), Ok(r)) => (l, r),
        (l, r) => {
            let missing = [l.err(), r.err()].into_iter().flatten().collect();
            return Err(LexError::Underdetermined { missing });
        }
    };
    let count = left.groups.len().saturating_mul(right.groups.len());
    if count as u64 > MAX_INSTANCES {
        return Err(FgAbError::TooManyInstances.into());
    }
    let mut outcomes = BTreeSet::new();
    for l in &left.groups {
        for r in &right.groups {
            let g = resolve_extensions(&[l.clone(), r.clone()]);
            outcomes.insert((l.to_string(), r.to_string(), g.as_ref().map(|g| g.to_string())));
        }
    }
    if outcomes.len() > 1 {
        let values = outcomes
            .iter()
            .map(|(l, r, g)| g.clone().unwrap_or_else(|| format!("extension of {r} by {l}")))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        return Err(LexError::NotInvariant { values });
    }
    let (l, r) = (left.groups[0].clone(), right.groups[0].clone());
    let group = resolve_extensions(&[l.clone(), r.clone()]);
    Ok(Resolution {
        problem: p.name.clone(),
        unknown: p.slots[u].label.clone(),
        subgroup: l,
        quotient: r,
        extension_ambiguous: group.is_none(),
        group,
        instances: count,
        steps: vec![left.step, right.step],
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Quantified {
    Always,
    Never,
    Sometimes,
}

impl Quantified {
    pub fn name(self) -> &'static str {
        match self {
            Quantified::Always => "always",
            Quantified::Never => "never",
            Quantified::Sometimes => "sometimes",
        }
    }

    fn of(values: impl IntoIterator<Item = bool>) -> Quantified {
        let (mut t, mut f) = (false, false);
        for v in values {
            if v {
                t = true;
            } else {
                f = true;
            }
        }
        match (t, f) {
            (true, false) => Quantified::Always,
            (false, _) => Quantified::Never,
            _ => Quantified::Sometimes,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MapVerdict {
    pub from: String,
    pub to: String,
    pub matrix: String,
    pub instances: usize,
    pub epi: Quantified,
    pub mono: Quantified,
    /// Distinct images, kernels and cokernels across the instances.
    pub images: Vec<String>,
    pub kernels: Vec<String>,
    pub cokernels: Vec<String>,
}

impl fmt::Display for MapVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} -> {} {}: epi {}, mono {} over {} instance(s); image {}, kernel {}, cokernel {}",
            self.from,
            self.to,
            self.matrix,
            self.epi.name(),
            self.mono.name(),
            self.instances,
            self.images.join(" | "),
            self.kernels.join(" | "),
            self.cokernels.join(" | ")
        )
    }
}

/// Epi and mono verdicts for every known map, over all of its instances.
pub fn check_epi_mono_claims(p: &ExactSequenceProblem) -> Result<Vec<MapVerdict>, LexError> {
    let mut out = Vec::new();
    for (i, m) in p.maps.iter().enumerate() {
        let MapSpec::Known(h) = m else { continue };
        let inst = instances_of(h)?;
        let distinct = |f: fn(&Homomorphism) -> FgAbGroup| -> Vec<String> {
            inst.iter().map(|x| f(x).to_string()).collect::<BTreeSet<_>>().into_iter().collect()
        };
        out.push(MapVerdict {
            from: p.slots[i].label.clone(),
            to: p.slots[i + 1].label.clone(),
            matrix: dsl::format_entries(&h.entries()),
            instances: inst.len(),
            epi: Quantified::of(inst.iter().map(is_epimorphism)),
            mono: Quantified::of(inst.iter().map(is_monomorphism)),
            images: distinct(image),
            kernels: distinct(kernel),
            cokernels: distinct(cokernel),
        });
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum StableElement {
    /// The nonzero element of the first stable stem.
    Eta,
    /// A multiple of the identity of the sphere.
    Times(i64),
}

/// Components of a stable transfer split along a wedge of spheres: for each
/// wedge summand `S^shift`, the stable element it maps by.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TransferComponents {
    pub components: Vec<(i64, StableElement)>,
}

impl TransferComponents {
    /// `RP¹₊ ≃ S¹ ∨ S⁰ -> S⁰`.
    pub fn circle() -> Self {
        TransferComponents { components: vec![(1, StableElement::Eta), (0, StableElement::Times(2))] }
    }
}

/// The map `⊕ groups(free, q + shift) -> groups(sup, q)` whose composite
/// with the point inclusion back to `groups(free, q)` is the given stable
/// element on each summand. `Eta` blocks are lifts of `η` through the point
/// inclusion (ambiguous up to its kernel); `Times(n)` blocks are the
/// tabulated transfer, checked to restrict to `n` times the identity.
pub fn assemble_map(c: &CoefficientSystem, tc: &TransferComponents, free: &str, sup: &str, q: i64) -> Result<ParametricHom, LexError> {
    let lat = c.lattice();
    let (fi, si) = (lat.require(free).map_err(CoeffError::from)?, lat.require(sup).map_err(CoeffError::from)?);
    if lat.order(fi) != 1 {
        return Err(LexError::Component(format!("`{free}` must be the trivial subgroup")));
    }
    let point = c.point_idx(fi, si, q)?.as_pinned()?;
    let mut blocks = Vec::new();
    for &(shift, elt) in &tc.components {
        let block = match (shift, elt) {
            (1, StableElement::Eta) => c.eta_lift_idx(fi, si, q)?,
            (0, StableElement::Times(n)) => {
                let t = c.transfer_idx(fi, si, q)?;
                for (_, inst) in t.instances()? {
                    let expected = Homomorphism::multiplication(point.target().clone(), n);
                    if point.compose(&inst)? != expected {
                        return Err(LexError::Component(format!(
                            "point inclusion after transfer at q = {q} is not {n} times the identity"
                        )));
                    }
                }
                t
            }
            (s, e) => return Err(LexError::Component(format!("no rule for {e:?} on a sphere of dimension {s}"))),
        };
        blocks.push(block);
    }
    let mut it = blocks.into_iter();
    let first = it.next().ok_or_else(|| LexError::Component("no components".into()))?;
    Ok(it.fold(first, |acc, b| acc.hstack(&b)))
}

pub const PROBLEMS: &[(&str, &str)] = &[(
    "cofiber_2sigma",
    "exact sequence of the cofibration S(2σ)₊ -> S⁰ -> S^{2σ}, solved for the S^{2σ} term in degree k",
)];

/// The five-term piece around `[Σ^k ∧ S^{2σ}]`:
/// `[Σ^k ∧ S(2σ)₊] -> [Σ^k] -> ? -> [Σ^{k+1} ∧ S(2σ)₊] -> [Σ^{k+1}]`,
/// equivariant for the order-two subgroup `sup`.
pub fn cofiber_problem(c: &CoefficientSystem, sup: &str, k: i64) -> Result<ExactSequenceProblem, LexError> {
    let lat = c.lattice();
    let si = lat.require(sup).map_err(CoeffError::from)?;
    if lat.order(si) != 2 {
        return Err(LexError::Component(format!("`{sup}` must have order 2")));
    }
    let fi = (0..lat.subgroups().len())
        .find(|&i| lat.order(i) == 1 && lat.contains(i, si))
        .ok_or_else(|| LexError::Component("the lattice has no trivial subgroup".into()))?;
    let free = lat.name(fi).to_string();
    let tc = TransferComponents::circle();
    let q = k - 2;
    let sphere = |q: i64| -> Result<FgAbGroup, LexError> { Ok(c.group_idx(fi, q + 1)?.direct_sum(&c.group_idx(fi, q)?)) };
    let f = assemble_map(c, &tc, &free, sup, q)?;
    let g = assemble_map(c, &tc, &free, sup, q + 1)?;
    let slot = |label: String, g: FgAbGroup| SlotSpec { label, slot: Slot::Known(g) };
    ExactSequenceProblem::new(
        "cofiber_2sigma",
        vec![
            slot(format!("S(2sigma)+^{k}"), sphere(q)?),
            slot(format!("pt^{k}"), c.group_idx(si, q)?),
            SlotSpec { label: format!("S^2sigma^{k}"), slot: Slot::Unknown },
            slot(format!("S(2sigma)+^{}", k + 1), sphere(q + 1)?),
            slot(format!("pt^{}", k + 1), c.group_idx(si, q + 1)?),
        ],
        vec![MapSpec::Known(f), MapSpec::Unknown, MapSpec::Unknown, MapSpec::Known(g)],
    )
}

pub fn builtin_problem(name: &str, c: &CoefficientSystem, sup: &str, k: i64) -> Result<ExactSequenceProblem, LexError> {
    match name {
        "cofiber_2sigma" => cofiber_problem(c, sup, k),
        _ => Err(LexError::UnknownProblem(name.to_string())),
    }
}

/// Entries as integers, for tests and reports.
pub fn entries_of(h: &ParametricHom) -> Vec<Vec<Option<BigInt>>> {
    h.entries()
        .into_iter()
        .map(|r| {
            r.into_iter()
                .map(|e| match e {
                    crate::fgab::Entry::Fixed(x) => Some(x),
                    crate::fgab::Entry::Undetermined => None,
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn known(label: &str, g: &str) -> SlotSpec {
        SlotSpec { label: label.into(), slot: Slot::Known(g.parse().unwrap()) }
    }

    fn unknown(label: &str) -> SlotSpec {
        SlotSpec { label: label.into(), slot: Slot::Unknown }
    }

    #[test]
    fn zero_squeeze() {
        let p = ExactSequenceProblem::new("z", vec![known("a", "0"), unknown("u"), known("b", "0")], vec![MapSpec::Unknown; 2]).unwrap();
        let r = solve(&p).unwrap();
        assert_eq!(r.group, Some(FgAbGroup::trivial()));
    }

    #[test]
    fn epi_mono_squeeze() {
        let p = ExactSequenceProblem::new(
            "s",
            vec![known("A", "Z+Z/3"), known("B", "Z/4"), unknown("U"), known("D", "Z/5"), known("E", "Z+Z/7")],
            vec![MapSpec::Property(MapProperty::Epi), MapSpec::Unknown, MapSpec::Unknown, MapSpec::Property(MapProperty::Mono)],
        )
        .unwrap();
        assert_eq!(solve(&p).unwrap().group, Some(FgAbGroup::trivial()));
    }

    #[test]
    fn missing_data_is_listed() {
        let p = ExactSequenceProblem::new("m", vec![known("B", "Z/2"), unknown("U"), known("D", "Z")], vec![MapSpec::Unknown; 2]).unwrap();
        let Err(LexError::Underdetermined { missing }) = solve(&p) else { panic!() };
        assert_eq!(missing.len(), 2);
    }

    #[test]
    fn two_unknowns_rejected() {
        let p = ExactSequenceProblem::new("m", vec![unknown("x"), unknown("y")], vec![MapSpec::Unknown]).unwrap();
        assert_eq!(solve(&p), Err(LexError::UnknownCount(2)));
    }

    #[test]
    fn impossible_epi() {
        let p = ExactSequenceProblem::new(
            "m",
            vec![known("A", "0"), known("B", "Z/2"), unknown("U"), known("D", "0")],
            vec![MapSpec::Property(MapProperty::Epi), MapSpec::Unknown, MapSpec::Unknown],
        )
        .unwrap();
        assert!(matches!(solve(&p), Err(LexError::InconsistentExactness { .. })));
    }

    #[test]
    fn problem_text_round_trip() {
        let text = "[sequence t]\n[slot A] Z\n[slot B] Z\n[slot U] unknown\n[slot D] 0\n[map A B] matrix = [[2]]\n";
        let p = parse_problem(text).unwrap();
        assert_eq!(parse_problem(&p.to_text()).unwrap(), p);
        assert_eq!(solve(&p).unwrap().group, Some(FgAbGroup::cyclic(2)));
    }

    #[test]
    fn empty_problem_file() {
        let Err(LexError::Parse(e)) = parse_problem("") else { panic!() };
        assert_eq!((e.pos.line, e.pos.col), (1, 1));
    }
}
