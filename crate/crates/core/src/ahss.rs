//! The equivariant Atiyah–Hirzebruch homology spectral sequence of a
//! finite `G`-CW pair with coefficients in a tabulated coefficient system.
//!
//! Bidegrees are homological: `E^r_{p,q}` with `q ≤ 0`, differentials
//! `d_r: (p, q) -> (p - r, q + r - 1)`, total degree `n = p + q`. The E¹ page
//! is the Bredon chain complex: entry `(p, q)` is the sum over relative
//! orbit `p`-cells `e` of `groups(L_e, -q)`, and `d¹` has `(e', e)` block
//! `deg(e, e') · transfer(L_e ⊂ L_{e'}, -q)`.
//!
//! Higher differentials are never computed; they are injected as data and
//! validated, and any differential that is not injected is zero. Tabulated `*` entries and free parameters of injected maps are
//! enumerated, every instance is run, and the degree-0 answer must agree
//! across all of them.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::coeffsys::{CoeffError, CoefficientSystem};
use crate::fgab::{
    assignments, homology_subquotient, image, is_epimorphism, is_monomorphism, kernel,
    resolve_extensions, CyclicSum, Entry, FgAbError, FgAbGroup, Homomorphism, IntMatrix, ParametricHom, Subquotient,
    MAX_INSTANCES,
};
use crate::gcw::{EquivariantComplex, GcwError};

pub type Bidegree = (i64, i64);

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum AhssError {
    #[error("window violation: the coefficient window [{min}, {max}] must contain 0..={needed} for a complex of dimension {needed}")]
    WindowViolation { min: i64, max: i64, needed: i64 },
    #[error("lattice mismatch: complex is over `{complex}` but coefficients are over `{coefficients}`")]
    LatticeMismatch { complex: String, coefficients: String },
    #[error(transparent)]
    Complex(#[from] GcwError),
    #[error(transparent)]
    Coefficients(#[from] CoeffError),
    #[error("d∘d ≠ 0 on page {r} at {at:?}: {detail}")]
    CompositionNotZero { r: usize, at: Bidegree, detail: String },
    #[error("invalid injected d{r} from {from:?}: {message}")]
    InvalidInjection { r: usize, from: Bidegree, message: String },
    #[error("the degree-0 result depends on undetermined data: {0}")]
    NotInvariant(String),
    #[error("too many instances to enumerate (limit {MAX_INSTANCES})")]
    TooManyInstances,
    #[error(transparent)]
    Algebra(#[from] FgAbError),
}

/// One page: entries as cyclic presentations, nonzero differentials keyed by source.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Page {
    pub r: usize,
    pub entries: BTreeMap<Bidegree, CyclicSum>,
    pub differentials: BTreeMap<Bidegree, Homomorphism>,
}

impl Page {
    pub fn target_of(&self, (p, q): Bidegree) -> Bidegree {
        (p - self.r as i64, q + self.r as i64 - 1)
    }

    pub fn group(&self, at: Bidegree) -> Option<FgAbGroup> {
        self.entries.get(&at).map(CyclicSum::normal_form)
    }

    /// The differential out of `at`, zero when none is set; `None` when
    /// either endpoint lies off the page.
    pub fn differential(&self, at: Bidegree) -> Option<Homomorphism> {
        let src = self.entries.get(&at)?;
        let tgt = self.entries.get(&self.target_of(at))?;
        Some(self.differentials.get(&at).cloned().unwrap_or_else(|| Homomorphism::zero(src.clone(), tgt.clone())))
    }

    /// Checks `d ∘ d = 0` wherever composable.
    pub fn check_square_zero(&self) -> Result<(), AhssError> {
        for &at in self.entries.keys() {
            let (Some(d1), Some(d2)) = (self.differential(at), self.differential(self.target_of(at))) else { continue };
            let c = d2.compose(&d1)?;
            if !c.is_zero() {
                return Err(AhssError::CompositionNotZero { r: self.r, at, detail: c.matrix().to_string() });
            }
        }
        Ok(())
    }

    pub fn set_differential(&mut self, at: Bidegree, d: Homomorphism) -> Result<(), AhssError> {
        let expected = (self.entries.get(&at), self.entries.get(&self.target_of(at)));
        match expected {
            (Some(s), Some(t)) if s == d.source() && t == d.target() => {
                self.differentials.insert(at, d);
                Ok(())
            }
            _ => Err(AhssError::InvalidInjection { r: self.r, from: at, message: "endpoints do not match the page".into() }),
        }
    }
}

/// Page `r + 1` together with the subquotient describing each new entry
/// inside the old one.
pub fn turn_page(page: &Page) -> Result<(Page, BTreeMap<Bidegree, Subquotient>), AhssError> {
    let r = page.r as i64;
    let mut entries = BTreeMap::new();
    let mut subs = BTreeMap::new();
    for (&at, group) in &page.entries {
        let (p, q) = at;
        let incoming = page
            .differential((p + r, q - r + 1))
            .unwrap_or_else(|| Homomorphism::zero(CyclicSum::trivial(), group.clone()));
        let outgoing = page.differential(at).unwrap_or_else(|| Homomorphism::zero(group.clone(), CyclicSum::trivial()));
        let sq = homology_subquotient(&incoming, &outgoing).map_err(|e| match e {
            FgAbError::CompositionNotZero(detail) => AhssError::CompositionNotZero { r: page.r, at: (p + r, q - r + 1), detail },
            other => other.into(),
        })?;
        entries.insert(at, sq.group().presentation());
        subs.insert(at, sq);
    }
    Ok((Page { r: page.r + 1, entries, differentials: BTreeMap::new() }, subs))
}

/// Where the coefficient entries of each E¹ entry come from.
#[derive(Clone, Debug)]
struct E1Layout {
    // (p, q) -> [(cell, offset)] in declaration order
    blocks: BTreeMap<Bidegree, Vec<(usize, usize)>>,
    entries: BTreeMap<Bidegree, CyclicSum>,
    pmin: i64,
    pmax: i64,
}

fn check_compatible(x: &EquivariantComplex, c: &CoefficientSystem) -> Result<(), AhssError> {
    if !x.lattice().equivalent(c.lattice()) {
        return Err(AhssError::LatticeMismatch {
            complex: x.lattice().ambient().name.clone(),
            coefficients: c.lattice().ambient().name.clone(),
        });
    }
    x.validate()?;
    if let Some(top) = x.max_dim() {
        let (min, max) = c.window();
        if min > 0 || max < top as i64 {
            return Err(AhssError::WindowViolation { min, max, needed: top as i64 });
        }
    }
    Ok(())
}

fn layout(x: &EquivariantComplex, c: &CoefficientSystem) -> Result<E1Layout, AhssError> {
    check_compatible(x, c)?;
    let mut blocks = BTreeMap::new();
    let mut entries = BTreeMap::new();
    let (qlo, qhi) = c.window();
    let dims: BTreeSet<usize> = x.cells().iter().filter(|c| !c.in_subcomplex).map(|c| c.dim).collect();
    let (pmin, pmax) = match (dims.first(), dims.last()) {
        (Some(&a), Some(&b)) => (a as i64, b as i64),
        _ => (0, -1),
    };
    for p in pmin..=pmax {
        let cells = x.relative_cells(p as usize);
        for s in qlo..=qhi {
            let q = -s;
            let mut parts = Vec::new();
            let mut layout = Vec::new();
            let mut off = 0;
            for &e in &cells {
                let g = c.group_idx(x.cells()[e].stabilizer, s)?.presentation();
                layout.push((e, off));
                off += g.len();
                parts.push(g);
            }
            entries.insert((p, q), CyclicSum::concat(&parts));
            blocks.insert((p, q), layout);
        }
    }
    Ok(E1Layout { blocks, entries, pmin, pmax })
}

type TransferKey = (usize, usize, i64);

/// Transfers used by d¹ with a nonzero degree between distinct stabilizers.
fn used_transfers(x: &EquivariantComplex, c: &CoefficientSystem) -> Vec<TransferKey> {
    let (qlo, qhi) = c.window();
    let mut keys = BTreeSet::new();
    for (a, b, _) in x.boundary_entries() {
        let (ca, cb) = (&x.cells()[a], &x.cells()[b]);
        if ca.in_subcomplex || cb.in_subcomplex || ca.stabilizer == cb.stabilizer {
            continue;
        }
        for s in qlo..=qhi {
            keys.insert((ca.stabilizer, cb.stabilizer, s));
        }
    }
    keys.into_iter().collect()
}

fn assemble_d1(
    x: &EquivariantComplex,
    lay: &E1Layout,
    at: Bidegree,
    transfer: &dyn Fn(TransferKey) -> Result<Homomorphism, AhssError>,
) -> Result<Option<Homomorphism>, AhssError> {
    let (p, q) = at;
    let (Some(src), Some(tgt)) = (lay.entries.get(&at), lay.entries.get(&(p - 1, q))) else { return Ok(None) };
    let mut m = IntMatrix::zeros(tgt.len(), src.len());
    for &(e, col) in &lay.blocks[&at] {
        for &(f, row) in &lay.blocks[&(p - 1, q)] {
            let deg = x.degree(e, f);
            if deg == 0 {
                continue;
            }
            let (le, lf) = (x.cells()[e].stabilizer, x.cells()[f].stabilizer);
            let t = transfer((le, lf, -q))?;
            let block = t.matrix().scale(&BigInt::from(deg));
            let (h, w) = (block.rows(), block.cols());
            let mut cur = m.submatrix(row, row + h, col, col + w);
            cur = cur.add(&block);
            m.put_block(row, col, &cur);
        }
    }
    Ok(Some(Homomorphism::new(src.clone(), tgt.clone(), m)?))
}

/// The `d¹` out of `(p, q)`, with any undetermined transfer entries left as parameters.
pub fn d1(x: &EquivariantComplex, c: &CoefficientSystem, p: i64, q: i64) -> Result<ParametricHom, AhssError> {
    let lay = layout(x, c)?;
    let at = (p, q);
    let (Some(src), Some(tgt)) = (lay.entries.get(&at), lay.entries.get(&(p - 1, q))) else {
        return Err(AhssError::InvalidInjection { r: 1, from: at, message: "entry or its target is off the page".into() });
    };
    // the base may be ill-defined on its own; assemble it entry by entry
    let mut base = IntMatrix::zeros(tgt.len(), src.len());
    let mut params: BTreeMap<(TransferKey, usize), (String, IntMatrix, BigInt)> = BTreeMap::new();
    for &(e, col) in &lay.blocks[&at] {
        for &(f, row) in &lay.blocks[&(p - 1, q)] {
            let deg = BigInt::from(x.degree(e, f));
            if deg.is_zero() {
                continue;
            }
            let k = (x.cells()[e].stabilizer, x.cells()[f].stabilizer, -q);
            let t = c.transfer_idx(k.0, k.1, k.2)?;
            let block = t.base_matrix().scale(&deg);
            let mut cur = base.submatrix(row, row + block.rows(), col, col + block.cols());
            cur = cur.add(&block);
            base.put_block(row, col, &cur);
            for (i, prm) in t.params().iter().enumerate() {
                let entry = params.entry((k, i)).or_insert_with(|| {
                    let label = format!("transfer {}⊂{} q={} {}", c.lattice().name(k.0), c.lattice().name(k.1), k.2, prm.label);
                    (label, IntMatrix::zeros(tgt.len(), src.len()), prm.range.clone())
                });
                let d = prm.delta.scale(&deg);
                let mut cur = entry.1.submatrix(row, row + d.rows(), col, col + d.cols());
                cur = cur.add(&d);
                entry.1.put_block(row, col, &cur);
            }
        }
    }
    let mut out = ParametricHom::from_entries(
        src.clone(),
        tgt.clone(),
        &base.to_rows().into_iter().map(|r| r.into_iter().map(Entry::Fixed).collect()).collect::<Vec<_>>(),
    )?;
    for (_, (label, delta, range)) in params {
        out = out.with_param(label, delta, range);
    }
    Ok(out)
}

/// How an injected higher differential is specified.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InjectionData {
    /// Matrix in the normal-form generators of the page-`r` entries.
    Page(Vec<Vec<Entry>>),
    /// Matrix on E¹ chains, inducing `d²` on E² (page 2 only).
    Chain(Vec<Vec<Entry>>),
    /// `d²` from a free cell onto a cell with stabilizer `L`, built from the
    /// η component of the transfer along the double cover: η on the free
    /// cell's coefficients, lifted through the point inclusion of `L`, with
    /// the lift's ambiguity (the kernel of the point inclusion) enumerated.
    EtaTransfer { source_cell: String, target_cell: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InjectedDifferential {
    pub r: usize,
    pub source: Bidegree,
    pub data: InjectionData,
}

/// Summary of one differential, merged over all instances.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DifferentialSummary {
    pub r: usize,
    pub source: Bidegree,
    pub target: Bidegree,
    pub source_group: String,
    pub target_group: String,
    pub image: String,
    pub kernel: String,
    /// `None` when the verdict differs between instances.
    pub injective: Option<bool>,
    pub surjective: Option<bool>,
    pub injected: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EntrySummary {
    pub p: i64,
    pub q: i64,
    pub group: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PageSummary {
    pub r: usize,
    pub entries: Vec<EntrySummary>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GradedPiece {
    pub p: i64,
    pub q: i64,
    pub group: FgAbGroup,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConvergenceReport {
    pub pages: Vec<PageSummary>,
    pub log: Vec<DifferentialSummary>,
    /// Nonzero total-degree-0 pieces of the last page, by increasing filtration `p`.
    pub graded: Vec<GradedPiece>,
    /// The group itself when every extension is forced to split.
    pub group: Option<FgAbGroup>,
    pub extension_ambiguous: bool,
    /// Number of instances of the undetermined data that were run.
    pub instances: usize,
}

impl ConvergenceReport {
    pub fn differential(&self, r: usize, source: Bidegree) -> Option<&DifferentialSummary> {
        self.log.iter().find(|d| d.r == r && d.source == source)
    }

    pub fn entry(&self, r: usize, at: Bidegree) -> Option<&str> {
        let page = self.pages.iter().find(|pg| pg.r == r)?;
        page.entries.iter().find(|e| (e.p, e.q) == at).map(|e| e.group.as_str())
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for page in &self.pages {
            let ps: BTreeSet<i64> = page.entries.iter().map(|e| e.p).collect();
            let qs: BTreeSet<i64> = page.entries.iter().map(|e| e.q).collect();
            let cell = |p: i64, q: i64| -> String {
                page.entries.iter().find(|e| e.p == p && e.q == q).map(|e| e.group.clone()).unwrap_or_default()
            };
            let mut width = 4;
            for e in &page.entries {
                width = width.max(e.group.chars().count());
            }
            let _ = writeln!(out, "E^{}", page.r);
            let _ = write!(out, "{:>5} |", "q\\p");
            for p in &ps {
                let _ = write!(out, "  {:>width$}", p);
            }
            out.push('\n');
            for &q in qs.iter().rev() {
                let _ = write!(out, "{q:>5} |");
                for &p in &ps {
                    let _ = write!(out, "  {:>width$}", cell(p, q));
                }
                out.push('\n');
            }
            out.push('\n');
        }
        if !self.log.is_empty() {
            out.push_str("differentials (r >= 2 are zero unless injected)\n");
            for d in &self.log {
                let verdict = |v: Option<bool>| match v {
                    Some(true) => "yes",
                    Some(false) => "no",
                    None => "varies",
                };
                let _ = writeln!(
                    out,
                    "  d{} {:?} -> {:?}: {} -> {}, image {}, kernel {}, injective {}, surjective {}{}",
                    d.r,
                    d.source,
                    d.target,
                    d.source_group,
                    d.target_group,
                    d.image,
                    d.kernel,
                    verdict(d.injective),
                    verdict(d.surjective),
                    if d.injected { " (injected)" } else { "" }
                );
            }
            out.push('\n');
        }
        let pieces: Vec<String> = self.graded.iter().map(|g| format!("{} at ({}, {})", g.group, g.p, g.q)).collect();
        let _ = writeln!(out, "degree-0 graded: {}", if pieces.is_empty() { "none".to_string() } else { pieces.join(", ") });
        let _ = writeln!(
            out,
            "group: {}",
            match &self.group {
                Some(g) => g.to_string(),
                None => "undetermined (extension problem)".to_string(),
            }
        );
        let _ = writeln!(out, "instances: {}", self.instances);
        out
    }
}

impl fmt::Display for ConvergenceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render_text())
    }
}

#[derive(Clone, Debug)]
struct DiffRecord {
    r: usize,
    source: Bidegree,
    target: Bidegree,
    source_group: FgAbGroup,
    target_group: FgAbGroup,
    image: FgAbGroup,
    kernel: FgAbGroup,
    injective: bool,
    surjective: bool,
    injected: bool,
}

#[derive(Clone, Debug)]
struct Branch {
    pages: Vec<Page>,
    e2: Option<BTreeMap<Bidegree, Subquotient>>,
    log: Vec<DiffRecord>,
}

struct Context<'a> {
    x: &'a EquivariantComplex,
    c: &'a CoefficientSystem,
    lay: E1Layout,
    injected: &'a [InjectedDifferential],
    last: usize,
}

/// Every pinned E¹ page, one per choice of undetermined transfer entries.
pub fn e1_pages(x: &EquivariantComplex, c: &CoefficientSystem) -> Result<Vec<Page>, AhssError> {
    let lay = layout(x, c)?;
    e1_pages_with(x, c, &lay)
}

fn e1_pages_with(x: &EquivariantComplex, c: &CoefficientSystem, lay: &E1Layout) -> Result<Vec<Page>, AhssError> {
    let keys = used_transfers(x, c);
    let mut options: Vec<Vec<Homomorphism>> = Vec::new();
    for &(a, b, s) in &keys {
        let t = c.transfer_idx(a, b, s)?;
        options.push(t.instances()?.into_iter().map(|(_, h)| h).collect());
    }
    let ranges: Vec<u64> = options.iter().map(|o| o.len() as u64).collect();
    if ranges.iter().try_fold(1u64, |acc, &r| acc.checked_mul(r)).is_none_or(|n| n > MAX_INSTANCES) {
        return Err(AhssError::TooManyInstances);
    }
    let mut pages = Vec::new();
    for pick in assignments(&ranges) {
        let chosen: BTreeMap<TransferKey, &Homomorphism> =
            keys.iter().zip(&pick).zip(&options).map(|((&k, &i), opts)| (k, &opts[i as usize])).collect();
        let transfer = |k: TransferKey| -> Result<Homomorphism, AhssError> {
            if let Some(h) = chosen.get(&k) {
                return Ok((*h).clone());
            }
            Ok(c.transfer_idx(k.0, k.1, k.2)?.as_pinned()?)
        };
        let mut page = Page { r: 1, entries: lay.entries.clone(), differentials: BTreeMap::new() };
        for &at in lay.entries.keys() {
            if let Some(d) = assemble_d1(x, lay, at, &transfer)? {
                if !d.is_zero() {
                    page.differentials.insert(at, d);
                }
            }
        }
        page.check_square_zero()?;
        pages.push(page);
    }
    Ok(pages)
}

/// The unique E¹ page; errors if tabulated data leaves it undetermined.
pub fn e1_page(x: &EquivariantComplex, c: &CoefficientSystem) -> Result<Page, AhssError> {
    let mut pages = e1_pages(x, c)?;
    if pages.len() != 1 {
        return Err(AhssError::NotInvariant(format!("the E¹ page has {} instances", pages.len())));
    }
    Ok(pages.remove(0))
}

fn record(page: &Page, at: Bidegree, injected: bool) -> Option<DiffRecord> {
    let d = page.differential(at)?;
    let (sg, tg) = (d.source().normal_form(), d.target().normal_form());
    if sg.is_trivial() || tg.is_trivial() {
        return None;
    }
    Some(DiffRecord {
        r: page.r,
        source: at,
        target: page.target_of(at),
        source_group: sg,
        target_group: tg,
        image: image(&d),
        kernel: kernel(&d),
        injective: is_monomorphism(&d),
        surjective: is_epimorphism(&d),
        injected,
    })
}

impl Context<'_> {
    fn injection_maps(&self, branch: &Branch, inj: &InjectedDifferential) -> Result<Vec<Homomorphism>, AhssError> {
        let page = branch.pages.last().expect("page");
        let bad = |m: String| AhssError::InvalidInjection { r: inj.r, from: inj.source, message: m };
        let target = page.target_of(inj.source);
        let (Some(src), Some(tgt)) = (page.entries.get(&inj.source), page.entries.get(&target)) else {
            return Err(bad("source or target lies off the page".into()));
        };
        match &inj.data {
            InjectionData::Page(rows) => {
                let rows = if rows.is_empty() { vec![Vec::new(); tgt.len()] } else { rows.clone() };
                let map = ParametricHom::from_entries(src.clone(), tgt.clone(), &rows).map_err(|e| bad(e.to_string()))?;
                Ok(map.instances().map_err(|e| bad(e.to_string()))?.into_iter().map(|(_, h)| h).collect())
            }
            InjectionData::Chain(rows) => {
                let e1_src = &self.lay.entries[&inj.source];
                let e1_tgt = &self.lay.entries[&target];
                let rows = if rows.is_empty() { vec![Vec::new(); e1_tgt.len()] } else { rows.clone() };
                let chain = ParametricHom::from_entries(e1_src.clone(), e1_tgt.clone(), &rows).map_err(|e| bad(e.to_string()))?;
                self.induce(branch, inj, &chain)
            }
            InjectionData::EtaTransfer { source_cell, target_cell } => {
                let chain = self.eta_transfer_chain(inj, source_cell, target_cell)?;
                self.induce(branch, inj, &chain)
            }
        }
    }

    fn eta_transfer_chain(&self, inj: &InjectedDifferential, source_cell: &str, target_cell: &str) -> Result<ParametricHom, AhssError> {
        let bad = |m: String| AhssError::InvalidInjection { r: inj.r, from: inj.source, message: m };
        let (p, q) = inj.source;
        let x = self.x;
        let s = x.cell_index(source_cell).ok_or_else(|| bad(format!("unknown cell `{source_cell}`")))?;
        let t = x.cell_index(target_cell).ok_or_else(|| bad(format!("unknown cell `{target_cell}`")))?;
        let (cs, ct) = (&x.cells()[s], &x.cells()[t]);
        if cs.dim as i64 != p || ct.dim as i64 != p - 2 || cs.in_subcomplex || ct.in_subcomplex {
            return Err(bad(format!("cells must be relative cells of dimensions {p} and {}", p - 2)));
        }
        let lat = self.c.lattice();
        if lat.order(cs.stabilizer) != 1 {
            return Err(bad(format!("`{source_cell}` must be a free cell")));
        }
        let lift = self.c.eta_lift_idx(cs.stabilizer, ct.stabilizer, -q - 1)?;
        let col_off = self.lay.blocks[&inj.source].iter().find(|(e, _)| *e == s).expect("relative cell").1;
        let row_off = self.lay.blocks[&(p - 2, q + 1)].iter().find(|(e, _)| *e == t).expect("relative cell").1;
        let e1_src = self.lay.entries[&inj.source].clone();
        let e1_tgt = self.lay.entries[&(p - 2, q + 1)].clone();
        let out = lift.embed(e1_src, e1_tgt, row_off, col_off);
        Ok(out)
    }

    /// The maps on E² induced by every instance of a chain-level map on E¹.
    fn induce(&self, branch: &Branch, inj: &InjectedDifferential, chain: &ParametricHom) -> Result<Vec<Homomorphism>, AhssError> {
        let bad = |m: String| AhssError::InvalidInjection { r: inj.r, from: inj.source, message: m };
        if inj.r != 2 {
            return Err(bad("chain-level data only defines d2".into()));
        }
        let e2 = branch.e2.as_ref().expect("E2 subquotients recorded");
        let target = (inj.source.0 - 2, inj.source.1 + 1);
        let (ssq, tsq) = (&e2[&inj.source], &e2[&target]);
        let src = ssq.group().presentation();
        let tgt = tsq.group().presentation();
        let mut out: Vec<Homomorphism> = Vec::new();
        for (_, h) in chain.instances().map_err(|e| bad(e.to_string()))? {
            let mut cols = Vec::new();
            for g in ssq.generators().columns() {
                cols.push(tsq.project(&h.apply(&g)).ok_or_else(|| bad("image of a cycle is not a cycle".into()))?);
            }
            let psi = Homomorphism::new(src.clone(), tgt.clone(), IntMatrix::from_columns(tgt.len(), &cols))
                .map_err(|e| bad(e.to_string()))?;
            // compare on a basis of all cycles, so boundaries must go to boundaries
            for z in ssq.numerator().columns() {
                let mut lhs = tsq.project(&h.apply(&z)).ok_or_else(|| bad("image of a cycle is not a cycle".into()))?;
                tgt.reduce(&mut lhs);
                let rhs = psi.apply(&ssq.project(&z).expect("numerator element"));
                if lhs != rhs {
                    return Err(bad("the chain map does not carry boundaries to boundaries".into()));
                }
            }
            if !out.contains(&psi) {
                out.push(psi);
            }
        }
        Ok(out)
    }

    fn advance(&self, branch: Branch, out: &mut Vec<Branch>) -> Result<(), AhssError> {
        let r = branch.pages.last().expect("page").r;
        let here: Vec<&InjectedDifferential> = self.injected.iter().filter(|d| d.r == r).collect();
        let mut options: Vec<Vec<(Bidegree, Homomorphism)>> = vec![Vec::new()];
        for inj in &here {
            if here.iter().filter(|d| d.source == inj.source).count() > 1 {
                return Err(AhssError::InvalidInjection { r, from: inj.source, message: "injected twice".into() });
            }
            let insts = self.injection_maps(&branch, inj)?;
            let mut next = Vec::new();
            for o in &options {
                for h in &insts {
                    let mut o = o.clone();
                    o.push((inj.source, h.clone()));
                    next.push(o);
                }
            }
            options = next;
            if options.len() as u64 > MAX_INSTANCES {
                return Err(AhssError::TooManyInstances);
            }
        }
        for choice in options {
            let mut b = branch.clone();
            let page = b.pages.last_mut().expect("page");
            for (at, h) in choice {
                page.set_differential(at, h)?;
            }
            page.check_square_zero()?;
            let page = b.pages.last().expect("page").clone();
            for &at in page.entries.keys() {
                let injected = here.iter().any(|d| d.source == at);
                if let Some(rec) = record(&page, at, injected) {
                    b.log.push(rec);
                }
            }
            if r >= self.last {
                out.push(b);
            } else {
                let (next, subs) = turn_page(&page)?;
                if r == 1 {
                    b.e2 = Some(subs);
                }
                b.pages.push(next);
                self.advance(b, out)?;
            }
            if out.len() as u64 > MAX_INSTANCES {
                return Err(AhssError::TooManyInstances);
            }
        }
        Ok(())
    }
}

fn distinct_join(values: impl IntoIterator<Item = String>) -> String {
    let mut seen: Vec<String> = Vec::new();
    for v in values {
        if !seen.contains(&v) {
            seen.push(v);
        }
    }
    seen.join(" | ")
}

fn constant<T: PartialEq + Copy>(values: impl IntoIterator<Item = T>) -> Option<T> {
    let mut it = values.into_iter();
    let first = it.next()?;
    it.all(|v| v == first).then_some(first)
}

/// Runs the spectral sequence to its last possible page.
pub fn run(x: &EquivariantComplex, c: &CoefficientSystem, injected: &[InjectedDifferential]) -> Result<ConvergenceReport, AhssError> {
    let lay = layout(x, c)?;
    let span = (lay.pmax - lay.pmin).max(0) as usize;
    let last = span + 1;
    for inj in injected {
        if inj.r < 2 || inj.r > span {
            return Err(AhssError::InvalidInjection {
                r: inj.r,
                from: inj.source,
                message: format!("only d2..d{span} can be nonzero on this complex"),
            });
        }
    }
    let ctx = Context { x, c, lay: lay.clone(), injected, last };
    let mut branches = Vec::new();
    for page in e1_pages_with(x, c, &lay)? {
        let b = Branch { pages: vec![page], e2: None, log: Vec::new() };
        ctx.advance(b, &mut branches)?;
    }

    let graded_of = |b: &Branch| -> Vec<GradedPiece> {
        let last = b.pages.last().expect("page");
        last.entries
            .iter()
            .filter(|(&(p, q), _)| p + q == 0)
            .map(|(&(p, q), g)| GradedPiece { p, q, group: g.normal_form() })
            .filter(|g| !g.group.is_trivial())
            .collect()
    };
    let graded = graded_of(&branches[0]);
    for b in &branches[1..] {
        let other = graded_of(b);
        if other != graded {
            let show = |g: &[GradedPiece]| g.iter().map(|x| format!("{} at ({}, {})", x.group, x.p, x.q)).collect::<Vec<_>>().join(", ");
            return Err(AhssError::NotInvariant(format!("[{}] versus [{}]", show(&graded), show(&other))));
        }
    }

    let mut pages = Vec::new();
    for (i, page) in branches[0].pages.iter().enumerate() {
        let entries = page
            .entries
            .keys()
            .map(|&(p, q)| EntrySummary {
                p,
                q,
                group: distinct_join(branches.iter().map(|b| b.pages[i].entries[&(p, q)].normal_form().to_string())),
            })
            .collect();
        pages.push(PageSummary { r: page.r, entries });
    }

    let mut keyed: BTreeMap<(usize, i64, i64), Vec<&DiffRecord>> = BTreeMap::new();
    for b in &branches {
        for rec in &b.log {
            keyed.entry((rec.r, -rec.source.0, rec.source.1)).or_default().push(rec);
        }
    }
    let n = branches.len();
    let log = keyed
        .into_values()
        .map(|recs| {
            let first = recs[0];
            let complete = recs.len() == n;
            let text = |f: &dyn Fn(&DiffRecord) -> String| {
                let mut vals: Vec<String> = recs.iter().map(|r| f(r)).collect();
                if !complete {
                    vals.push("0".into());
                }
                distinct_join(vals)
            };
            DifferentialSummary {
                r: first.r,
                source: first.source,
                target: first.target,
                source_group: text(&|r| r.source_group.to_string()),
                target_group: text(&|r| r.target_group.to_string()),
                image: text(&|r| r.image.to_string()),
                kernel: text(&|r| r.kernel.to_string()),
                injective: if complete { constant(recs.iter().map(|r| r.injective)) } else { None },
                surjective: if complete { constant(recs.iter().map(|r| r.surjective)) } else { None },
                injected: recs.iter().any(|r| r.injected),
            }
        })
        .collect();

    let pieces: Vec<FgAbGroup> = graded.iter().map(|g| g.group.clone()).collect();
    let group = resolve_extensions(&pieces);
    Ok(ConvergenceReport { pages, log, extension_ambiguous: group.is_none(), graded, group, instances: n })
}
