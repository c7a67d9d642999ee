//! The cohomological Atiyah–Hirzebruch spectral sequence for the 4-truncated
//! connective real K-theory `ko⟨0⋯4⟩` of Thom spectra `Thom(RP^∞; V)` with
//! `V = m·L + n`, `L` the tautological line.
//!
//! `E₂^{p,-t} = H^p(Thom(RP^∞; V); π_t ko⟨0⋯4⟩)` with `π_t = Z, Z/2, Z/2, 0, Z`
//! for `t = 0..4`. Mod-2 cohomology is free on the Thom class `Ū` over
//! `Z/2[a]`; integral cohomology is computed from the cellular cochains of
//! `RP^N`, twisted by the orientation character when `m` is odd. The only
//! nonzero `d₂` are `Sq² ∘ ρ` out of `t = 0` and `Sq²` out of `t = 1`, with
//! `Sq^k(Ū) = Ū·w_k(V)`.
//!
//! Degree dictionary: the phase group `[MTH, Σ^k IZ]` corresponds to total
//! degree `k - 4` (Anderson self-duality of `ko` with its shift of 4), so
//! for a point `ko⟨0⋯4⟩^{q-2}(pt) = π_{2-q}` recovers the spin column
//! `groups(e, q)`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::fgab::{homology_subquotient, resolve_extensions, CyclicSum, FgAbGroup, Homomorphism, IntMatrix, Subquotient};

/// Cells of `RP^N` used for integral cohomology; queries must stay below it.
pub const SKELETON: i64 = 64;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ThomError {
    #[error("total degree {degree} needs cells above the {SKELETON}-skeleton")]
    TruncationExceeded { degree: i64 },
    #[error("a product may contain at most one Thom class")]
    TwoThomClasses,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct VirtualBundle {
    /// Multiplicity of the tautological line.
    pub m: i64,
    /// Rank of the trivial summand.
    pub n: i64,
}

impl VirtualBundle {
    pub fn new(m: i64, n: i64) -> Self {
        VirtualBundle { m, n }
    }

    pub fn rank(&self) -> i64 {
        self.m + self.n
    }

    /// The Thom spectrum is orientable exactly when `w₁ = m·a` vanishes.
    pub fn orientable(&self) -> bool {
        self.m % 2 == 0
    }
}

impl fmt::Display for VirtualBundle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}L + {}", self.m, self.n)
    }
}

/// Total Stiefel–Whitney class `(1 + a)^m` mod 2, coefficients of `a^0..=a^deg`.
pub fn sw_total(v: VirtualBundle, deg: usize) -> Vec<bool> {
    let k = v.m.unsigned_abs();
    // (1 + a)^k has odd binomial coefficients exactly where i & k == i
    let pos: Vec<bool> = (0..=deg as u64).map(|i| i <= k && i & k == i).collect();
    if v.m >= 0 {
        return pos;
    }
    // invert the power series; constant term is 1
    let mut inv = vec![false; deg + 1];
    inv[0] = true;
    for i in 1..=deg {
        let mut c = false;
        for j in 1..=i {
            c ^= pos[j] & inv[i - j];
        }
        inv[i] = c;
    }
    inv
}

/// Series product mod 2, truncated to the shorter length.
pub fn series_mul(x: &[bool], y: &[bool]) -> Vec<bool> {
    let n = x.len().min(y.len());
    (0..n).map(|i| (0..=i).fold(false, |acc, j| acc ^ (x[j] & y[i - j]))).collect()
}

/// A mod-2 class `Σ a^j`, optionally multiplied by a Thom class.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModTwoClass {
    pub exponents: BTreeSet<u32>,
    pub thom: Option<VirtualBundle>,
}

impl ModTwoClass {
    pub fn zero() -> Self {
        ModTwoClass { exponents: BTreeSet::new(), thom: None }
    }

    pub fn a_pow(j: u32) -> Self {
        ModTwoClass { exponents: [j].into_iter().collect(), thom: None }
    }

    /// `Ū·a^j` for the bundle `v`.
    pub fn thom_a_pow(v: VirtualBundle, j: u32) -> Self {
        ModTwoClass { exponents: [j].into_iter().collect(), thom: Some(v) }
    }

    pub fn from_exponents(exps: impl IntoIterator<Item = u32>, thom: Option<VirtualBundle>) -> Self {
        let mut set = BTreeSet::new();
        for e in exps {
            if !set.remove(&e) {
                set.insert(e);
            }
        }
        ModTwoClass { exponents: set, thom }
    }

    pub fn is_zero(&self) -> bool {
        self.exponents.is_empty()
    }

    /// Degree of the top term; `None` for zero.
    pub fn degree(&self) -> Option<i64> {
        let top = *self.exponents.last()? as i64;
        Some(top + self.thom.map_or(0, |v| v.rank()))
    }

    /// Homogeneous of a single degree (or zero).
    pub fn is_homogeneous(&self) -> bool {
        self.exponents.len() <= 1
    }

    pub fn add(&self, other: &ModTwoClass) -> ModTwoClass {
        let thom = self.thom.or(other.thom);
        ModTwoClass { exponents: self.exponents.symmetric_difference(&other.exponents).copied().collect(), thom }
    }

    pub fn mul(&self, other: &ModTwoClass) -> Result<ModTwoClass, ThomError> {
        if self.thom.is_some() && other.thom.is_some() {
            return Err(ThomError::TwoThomClasses);
        }
        let exps = self.exponents.iter().flat_map(|&i| other.exponents.iter().map(move |&j| i + j));
        Ok(ModTwoClass::from_exponents(exps, self.thom.or(other.thom)))
    }
}

impl fmt::Display for ModTwoClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let u = if self.thom.is_some() { "Ū" } else { "" };
        let terms: Vec<String> = self
            .exponents
            .iter()
            .map(|&j| match (j, u.is_empty()) {
                (0, true) => "1".to_string(),
                (0, false) => u.to_string(),
                (1, _) => format!("{u}a"),
                _ => format!("{u}a^{j}"),
            })
            .collect();
        f.write_str(&terms.join(" + "))
    }
}

fn binom_odd(n: u32, k: u32) -> bool {
    k <= n && (k & n) == k
}

/// `Sq^k` on polynomial classes, extended to Thom classes through
/// `Sq^k(Ū·p) = Σ_i Ū·w_i(V)·Sq^{k-i}(p)`.
pub fn sq(k: u32, x: &ModTwoClass) -> ModTwoClass {
    let poly = |exps: &BTreeSet<u32>, k: u32| -> Vec<u32> {
        exps.iter().filter(|&&j| binom_odd(j, k)).map(|&j| j + k).collect()
    };
    match x.thom {
        None => ModTwoClass::from_exponents(poly(&x.exponents, k), None),
        Some(v) => {
            let w = sw_total(v, k as usize);
            let mut out = Vec::new();
            for i in 0..=k {
                if w[i as usize] {
                    out.extend(poly(&x.exponents, k - i).into_iter().map(|e| e + i));
                }
            }
            ModTwoClass::from_exponents(out, Some(v))
        }
    }
}

/// `π_t ko⟨0⋯4⟩`.
pub fn truncated_ko(t: i64) -> FgAbGroup {
    match t {
        0 | 4 => FgAbGroup::integers(),
        1 | 2 => FgAbGroup::cyclic(2),
        _ => FgAbGroup::trivial(),
    }
}

/// Integral cochain differential `C^j -> C^{j+1}` of `RP^N`, twisted or not.
fn cochain_degree(j: i64, twisted: bool) -> i64 {
    let sign = if (j + 1) % 2 == 0 { 1 } else { -1 };
    if twisted {
        1 - sign
    } else {
        1 + sign
    }
}

/// `H^j(RP^∞; Z)` (twisted by the orientation character when asked) as a
/// subquotient of the rank-one cochain group in degree `j`, computed from the
/// cellular cochains of `RP^SKELETON`.
pub fn rp_integral(j: i64, twisted: bool) -> Subquotient {
    assert!((0..SKELETON).contains(&j));
    let z = CyclicSum::free(1);
    let zero = CyclicSum::trivial();
    let incoming = if j == 0 {
        Homomorphism::zero(zero.clone(), z.clone())
    } else {
        Homomorphism::new(z.clone(), z.clone(), IntMatrix::from_i64(&[&[cochain_degree(j - 1, twisted)]])).expect("integral map")
    };
    let outgoing = Homomorphism::new(z.clone(), z, IntMatrix::from_i64(&[&[cochain_degree(j, twisted)]])).expect("integral map");
    homology_subquotient(&incoming, &outgoing).expect("δδ = 0")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CohEntry {
    pub p: i64,
    pub t: i64,
    pub group: FgAbGroup,
    /// Mod-2 name of the generator, when nonzero.
    pub generator: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CohDifferential {
    pub from: (i64, i64),
    pub to: (i64, i64),
    pub operation: String,
    pub image_of_generator: String,
    pub nonzero: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WindowReport {
    pub bundle: VirtualBundle,
    pub total_degree: i64,
    /// `k` in `[MTH, Σ^k IZ]`, i.e. `total_degree + 4`.
    pub phase_degree: i64,
    pub e2: Vec<CohEntry>,
    pub e3: Vec<CohEntry>,
    pub differentials: Vec<CohDifferential>,
    /// Nonzero E₃ entries of the requested total degree, by decreasing `p`.
    pub graded: Vec<CohEntry>,
    /// No `d_r`, `r ≥ 3`, can touch the requested degree.
    pub closed: bool,
    pub open_differentials: Vec<String>,
    pub group: Option<FgAbGroup>,
    pub extension_ambiguous: bool,
}

impl WindowReport {
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "Thom(RP^inf; {}), ko<0..4> total degree {} (phase degree {})",
            self.bundle, self.total_degree, self.phase_degree
        );
        for (name, entries) in [("E_2", &self.e2), ("E_3", &self.e3)] {
            let _ = writeln!(out, "{name}");
            for e in entries.iter().filter(|e| !e.group.is_trivial()) {
                let _ = writeln!(
                    out,
                    "  (p={}, t={}) total {}: {}{}",
                    e.p,
                    e.t,
                    e.p - e.t,
                    e.group,
                    e.generator.as_ref().map(|g| format!(" on {g}")).unwrap_or_default()
                );
            }
        }
        let _ = writeln!(out, "d_2");
        for d in &self.differentials {
            let _ = writeln!(out, "  {:?} -> {:?}: {} gives {}", d.from, d.to, d.operation, d.image_of_generator);
        }
        if self.closed {
            let _ = writeln!(out, "no d_r with r >= 3 can reach total degree {}", self.total_degree);
        } else {
            let _ = writeln!(out, "possible higher differentials: {}", self.open_differentials.join(", "));
        }
        let pieces: Vec<String> = self.graded.iter().map(|e| format!("{} at (p={}, t={})", e.group, e.p, e.t)).collect();
        let _ = writeln!(out, "graded: {}", if pieces.is_empty() { "none".into() } else { pieces.join(", ") });
        let group = match (&self.group, self.closed) {
            (Some(g), _) => g.to_string(),
            (None, true) => "undetermined (extension problem)".to_string(),
            (None, false) => "undetermined (higher differentials)".to_string(),
        };
        let _ = writeln!(out, "group: {group}");
        out
    }
}

/// One E₂ entry with how to read off its mod-2 reduction.
struct E2Entry {
    group: CyclicSum,
    /// For each generator, its mod-2 reduction as a multiple of `Ū a^j`
    /// (0 or 1); empty on trivial entries.
    reduction: Vec<BigInt>,
    j: i64,
}

fn e2_entry(v: VirtualBundle, p: i64, t: i64) -> Result<E2Entry, ThomError> {
    let j = p - v.rank();
    let trivial = E2Entry { group: CyclicSum::trivial(), reduction: Vec::new(), j };
    if j < 0 {
        return Ok(trivial);
    }
    if j >= SKELETON - 1 {
        return Err(ThomError::TruncationExceeded { degree: p - t });
    }
    match t {
        1 | 2 => Ok(E2Entry { group: CyclicSum::new(vec![BigInt::from(2)]).expect("Z/2"), reduction: vec![BigInt::one()], j }),
        0 | 4 => {
            let sq = rp_integral(j, !v.orientable());
            let reduction = sq.generators().row(0).iter().map(|x| x.mod_floor(&BigInt::from(2))).collect();
            Ok(E2Entry { group: sq.group().presentation(), reduction, j })
        }
        _ => Ok(trivial),
    }
}

fn name_of(v: VirtualBundle, e: &E2Entry) -> Option<String> {
    if e.group.is_empty() {
        return None;
    }
    Some(ModTwoClass::thom_a_pow(v, e.j as u32).to_string())
}

/// Runs `E₂ → E₃` around total degree `n` and reports the degree-`n` window.
pub fn compute_window(v: VirtualBundle, n: i64) -> Result<WindowReport, ThomError> {
    if n + 4 + v.rank().abs() + 8 >= SKELETON || n < -SKELETON {
        return Err(ThomError::TruncationExceeded { degree: n });
    }
    // entries of total degree n-1, n, n+1 and their d₂ neighbours
    let mut e2: BTreeMap<(i64, i64), E2Entry> = BTreeMap::new();
    for deg in n - 2..=n + 2 {
        for t in 0..=4 {
            let p = deg + t;
            if p >= v.rank() {
                e2.insert((p, t), e2_entry(v, p, t)?);
            }
        }
    }
    let zero_from = |g: &CyclicSum| Homomorphism::zero(CyclicSum::trivial(), g.clone());
    let zero_to = |g: &CyclicSum| Homomorphism::zero(g.clone(), CyclicSum::trivial());

    // d₂: (p, t) -> (p + 2, t + 1); Sq² on the mod-2 reduction
    let mut d2: BTreeMap<(i64, i64), Homomorphism> = BTreeMap::new();
    let mut differentials = Vec::new();
    for (&(p, t), src) in &e2 {
        let Some(tgt) = e2.get(&(p + 2, t + 1)) else { continue };
        if src.group.is_empty() || tgt.group.is_empty() || !(t == 0 || t == 1) {
            continue;
        }
        let image = sq(2, &ModTwoClass::thom_a_pow(v, src.j as u32));
        let hits = image.exponents.contains(&((tgt.j) as u32));
        let row: Vec<BigInt> = src.reduction.iter().map(|r| if hits { r.clone() } else { BigInt::zero() }).collect();
        let m = IntMatrix::from_rows(row.len(), &[row]);
        let h = Homomorphism::new(src.group.clone(), tgt.group.clone(), m).expect("map into Z/2");
        differentials.push(CohDifferential {
            from: (p, t),
            to: (p + 2, t + 1),
            operation: if t == 0 { "Sq^2 after reduction mod 2".into() } else { "Sq^2".into() },
            image_of_generator: image.to_string(),
            nonzero: !h.is_zero(),
        });
        d2.insert((p, t), h);
    }
    // d₂ ∘ d₂ = 0
    for (&(p, t), h) in &d2 {
        if let Some(next) = d2.get(&(p + 2, t + 1)) {
            assert!(next.compose(h).expect("composable").is_zero(), "d2 d2 != 0 at ({p}, {t})");
        }
    }
    let mut e3 = BTreeMap::new();
    for (&(p, t), e) in &e2 {
        let incoming = d2.get(&(p - 2, t - 1)).cloned().unwrap_or_else(|| zero_from(&e.group));
        let outgoing = d2.get(&(p, t)).cloned().unwrap_or_else(|| zero_to(&e.group));
        let g = homology_subquotient(&incoming, &outgoing).expect("d2 d2 = 0").into_group();
        e3.insert((p, t), g);
    }
    let listed = |deg_range: std::ops::RangeInclusive<i64>| -> Vec<(i64, i64)> {
        e2.keys().copied().filter(|&(p, t)| deg_range.contains(&(p - t))).collect()
    };
    let window = listed(n - 1..=n + 1);
    let e2_out: Vec<CohEntry> = window
        .iter()
        .map(|&(p, t)| {
            let e = &e2[&(p, t)];
            CohEntry { p, t, group: e.group.normal_form(), generator: name_of(v, e) }
        })
        .collect();
    let e3_out: Vec<CohEntry> = window
        .iter()
        .map(|&(p, t)| {
            let g = e3[&(p, t)].clone();
            let generator = if g.is_trivial() { None } else { name_of(v, &e2[&(p, t)]) };
            CohEntry { p, t, group: g, generator }
        })
        .collect();

    // d_r for r = 3..=5 go (p, t) -> (p + r, t + r - 1), raising total degree by one
    let mut open = Vec::new();
    let nonzero = |p: i64, t: i64| e3.get(&(p, t)).is_some_and(|g| !g.is_trivial());
    for r in 3..=5 {
        for t in 0..=4 - (r - 1) {
            for deg in [n - 1, n] {
                let (p, t2) = (deg + t, t + r - 1);
                if nonzero(p, t) && nonzero(p + r, t2) {
                    open.push(format!("d_{r}: (p={p}, t={t}) -> (p={}, t={t2})", p + r));
                }
            }
        }
    }
    let mut graded: Vec<CohEntry> = e3_out.iter().filter(|e| e.p - e.t == n && !e.group.is_trivial()).cloned().collect();
    graded.sort_by_key(|e| -e.p);
    let closed = open.is_empty();
    let pieces: Vec<FgAbGroup> = graded.iter().map(|e| e.group.clone()).collect();
    let group = if closed { resolve_extensions(&pieces) } else { None };
    Ok(WindowReport {
        bundle: v,
        total_degree: n,
        phase_degree: n + 4,
        e2: e2_out,
        e3: e3_out,
        differentials,
        extension_ambiguous: closed && group.is_none(),
        graded,
        closed,
        open_differentials: open,
        group,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const V: VirtualBundle = VirtualBundle { m: -2, n: 2 };

    #[test]
    fn squares_on_a() {
        assert_eq!(sq(1, &ModTwoClass::a_pow(1)), ModTwoClass::a_pow(2));
        assert_eq!(sq(0, &ModTwoClass::a_pow(5)), ModTwoClass::a_pow(5));
        assert!(sq(3, &ModTwoClass::a_pow(2)).is_zero());
        assert_eq!(sq(2, &ModTwoClass::a_pow(3)), ModTwoClass::a_pow(5));
    }

    #[test]
    fn squares_on_thom_class() {
        assert_eq!(sq(2, &ModTwoClass::thom_a_pow(V, 0)), ModTwoClass::thom_a_pow(V, 2));
        assert_eq!(sq(2, &ModTwoClass::thom_a_pow(V, 1)), ModTwoClass::thom_a_pow(V, 3));
    }

    #[test]
    fn stiefel_whitney_series() {
        assert_eq!(sw_total(VirtualBundle::new(2, 0), 4), vec![true, false, true, false, false]);
        assert_eq!(sw_total(VirtualBundle::new(-2, 0), 4), vec![true, false, true, false, true]);
        assert_eq!(sw_total(VirtualBundle::new(0, 3), 3), vec![true, false, false, false]);
    }

    #[test]
    fn rp_cohomology() {
        let orders: Vec<String> = (0..5).map(|j| rp_integral(j, false).group().to_string()).collect();
        assert_eq!(orders, ["Z", "0", "Z/2", "0", "Z/2"]);
        let twisted: Vec<String> = (0..5).map(|j| rp_integral(j, true).group().to_string()).collect();
        assert_eq!(twisted, ["0", "Z/2", "0", "Z/2", "0"]);
    }

    #[test]
    fn truncation() {
        assert!(matches!(compute_window(V, 100), Err(ThomError::TruncationExceeded { .. })));
    }
}
