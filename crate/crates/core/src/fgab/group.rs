use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::matrix::IntMatrix;
use super::snf::smith_normal_form;
use super::FgAbError;

/// A finitely generated abelian group `Z^r + Z/d1 + ... + Z/dk` in
/// invariant-factor form: every `di >= 2` and `di | d(i+1)`.
///
/// The representation is canonical, so structural equality is group
/// isomorphism. Generators are ordered free-first, then torsion in chain order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FgAbGroup {
    free_rank: usize,
    torsion: Vec<BigInt>,
}

impl FgAbGroup {
    pub fn new(free_rank: usize, torsion: Vec<BigInt>) -> Result<Self, FgAbError> {
        for (i, d) in torsion.iter().enumerate() {
            if *d < BigInt::from(2) {
                return Err(FgAbError::NotNormalForm(format!("torsion coefficient {d} < 2")));
            }
            if i > 0 && !d.is_multiple_of(&torsion[i - 1]) {
                return Err(FgAbError::NotNormalForm(format!(
                    "{} does not divide {}",
                    torsion[i - 1],
                    d
                )));
            }
        }
        Ok(FgAbGroup { free_rank, torsion })
    }

    pub fn trivial() -> Self {
        FgAbGroup { free_rank: 0, torsion: Vec::new() }
    }

    pub fn free(rank: usize) -> Self {
        FgAbGroup { free_rank: rank, torsion: Vec::new() }
    }

    pub fn integers() -> Self {
        Self::free(1)
    }

    /// `Z/n`; `n = 0` gives `Z` and `n = 1` the trivial group.
    pub fn cyclic(n: u64) -> Self {
        Self::from_orders(&[BigInt::from(n)])
    }

    /// Normalizes an arbitrary direct sum of cyclic groups (order 0 meaning `Z`).
    pub fn from_orders(orders: &[BigInt]) -> Self {
        let n = orders.len();
        let mut diag = IntMatrix::zeros(n, n);
        for (i, o) in orders.iter().enumerate() {
            diag.set(i, i, o.clone());
        }
        Self::from_relations(n, &diag)
    }

    /// `Z^generators / column span of relations`.
    pub fn from_relations(generators: usize, relations: &IntMatrix) -> Self {
        assert_eq!(relations.rows(), generators);
        let snf = smith_normal_form(relations);
        let factors = snf.invariant_factors();
        let torsion: Vec<BigInt> = factors.into_iter().filter(|d| !d.is_one()).collect();
        FgAbGroup { free_rank: generators - snf.rank(), torsion }
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn torsion(&self) -> &[BigInt] {
        &self.torsion
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    pub fn is_free(&self) -> bool {
        self.torsion.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.free_rank == 0
    }

    /// Order of a finite group; `None` when the free rank is positive.
    pub fn order(&self) -> Option<BigInt> {
        self.is_finite().then(|| self.torsion.iter().product())
    }

    pub fn num_generators(&self) -> usize {
        self.free_rank + self.torsion.len()
    }

    /// Orders of the standard generators (0 for a free generator).
    pub fn generator_orders(&self) -> Vec<BigInt> {
        let mut v = vec![BigInt::zero(); self.free_rank];
        v.extend(self.torsion.iter().cloned());
        v
    }

    pub fn presentation(&self) -> CyclicSum {
        CyclicSum { orders: self.generator_orders() }
    }

    pub fn direct_sum(&self, other: &FgAbGroup) -> FgAbGroup {
        let mut o = self.generator_orders();
        o.extend(other.generator_orders());
        Self::from_orders(&o)
    }
}

impl Default for FgAbGroup {
    fn default() -> Self {
        Self::trivial()
    }
}

impl fmt::Display for FgAbGroup {
    /// `0`, `Z`, `Z^3`, `Z/2 + Z/2`, `Z + Z/8`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "0");
        }
        let mut terms = Vec::new();
        match self.free_rank {
            0 => {}
            1 => terms.push("Z".to_string()),
            r => terms.push(format!("Z^{r}")),
        }
        terms.extend(self.torsion.iter().map(|d| format!("Z/{d}")));
        write!(f, "{}", terms.join(" + "))
    }
}

/// Parse a single cyclic-sum expression into its list of orders without
/// normalizing. Used by the data-file loaders, which insist on normal form.
pub fn parse_orders(s: &str) -> Result<Vec<BigInt>, FgAbError> {
    let s = s.trim();
    if s.is_empty() {
        return Err(FgAbError::Parse("empty group expression".into()));
    }
    let mut orders = Vec::new();
    for term in s.split(['+', '⊕']) {
        let t: String = term.chars().filter(|c| !c.is_whitespace()).collect();
        if t == "0" {
            continue;
        }
        if t == "Z" {
            orders.push(BigInt::zero());
        } else if let Some(exp) = t.strip_prefix("Z^") {
            let r: usize = exp
                .parse()
                .map_err(|_| FgAbError::Parse(format!("bad free rank in `{}`", term.trim())))?;
            orders.extend(std::iter::repeat_n(BigInt::zero(), r));
        } else if let Some(d) = t.strip_prefix("Z/") {
            let (base, count) = match d.split_once('^') {
                Some((b, c)) => (b, c.parse::<usize>().map_err(|_| {
                    FgAbError::Parse(format!("bad multiplicity in `{}`", term.trim()))
                })?),
                None => (d, 1),
            };
            let n = BigInt::from_str(base)
                .map_err(|_| FgAbError::Parse(format!("bad torsion order in `{}`", term.trim())))?;
            if n < BigInt::one() {
                return Err(FgAbError::Parse(format!("torsion order must be positive in `{}`", term.trim())));
            }
            if !n.is_one() {
                orders.extend(std::iter::repeat_n(n, count));
            }
        } else {
            return Err(FgAbError::Parse(format!(
                "expected `0`, `Z`, `Z^r` or `Z/d`, found `{}`",
                term.trim()
            )));
        }
    }
    Ok(orders)
}

impl FromStr for FgAbGroup {
    type Err = FgAbError;

    /// Accepts any sum of cyclic terms and normalizes it.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(FgAbGroup::from_orders(&parse_orders(s)?))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum JsonInt {
    Num(u64),
    Text(String),
}

impl From<&BigInt> for JsonInt {
    fn from(n: &BigInt) -> Self {
        n.to_u64().map_or_else(|| JsonInt::Text(n.to_string()), JsonInt::Num)
    }
}

#[derive(Serialize, Deserialize)]
struct GroupJson {
    free_rank: usize,
    torsion: Vec<JsonInt>,
}

impl Serialize for FgAbGroup {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        GroupJson { free_rank: self.free_rank, torsion: self.torsion.iter().map(JsonInt::from).collect() }
            .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FgAbGroup {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = GroupJson::deserialize(d)?;
        let torsion = raw
            .torsion
            .into_iter()
            .map(|t| match t {
                JsonInt::Num(n) => Ok(BigInt::from(n)),
                JsonInt::Text(s) => BigInt::from_str(&s).map_err(serde::de::Error::custom),
            })
            .collect::<Result<Vec<_>, _>>()?;
        FgAbGroup::new(raw.free_rank, torsion).map_err(serde::de::Error::custom)
    }
}

/// A direct sum of cyclic groups with fixed generators: the coordinate
/// system homomorphisms are written in. Order 0 is `Z`; orders are never 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct CyclicSum {
    orders: Vec<BigInt>,
}

impl CyclicSum {
    pub fn new(orders: Vec<BigInt>) -> Result<Self, FgAbError> {
        if let Some(bad) = orders.iter().find(|o| o.is_one() || *o < &BigInt::zero()) {
            return Err(FgAbError::NotNormalForm(format!("cyclic factor of order {bad}")));
        }
        Ok(CyclicSum { orders })
    }

    pub fn trivial() -> Self {
        CyclicSum { orders: Vec::new() }
    }

    pub fn free(rank: usize) -> Self {
        CyclicSum { orders: vec![BigInt::zero(); rank] }
    }

    pub fn concat<'a>(parts: impl IntoIterator<Item = &'a CyclicSum>) -> Self {
        CyclicSum { orders: parts.into_iter().flat_map(|p| p.orders.iter().cloned()).collect() }
    }

    pub fn orders(&self) -> &[BigInt] {
        &self.orders
    }

    pub fn len(&self) -> usize {
        self.orders.len()
    }

    pub fn is_empty(&self) -> bool {
        self.orders.is_empty()
    }

    pub fn normal_form(&self) -> FgAbGroup {
        FgAbGroup::from_orders(&self.orders)
    }

    /// Diagonal relation columns `d * e_i` for the torsion generators.
    pub fn relation_matrix(&self) -> IntMatrix {
        let cols: Vec<Vec<BigInt>> = self
            .orders
            .iter()
            .enumerate()
            .filter(|(_, o)| !o.is_zero())
            .map(|(i, o)| {
                let mut c = vec![BigInt::zero(); self.len()];
                c[i] = o.clone();
                c
            })
            .collect();
        IntMatrix::from_columns(self.len(), &cols)
    }

    /// Canonical representative of a coordinate vector (torsion entries in `[0, d)`).
    pub fn reduce(&self, v: &mut [BigInt]) {
        for (x, o) in v.iter_mut().zip(&self.orders) {
            if !o.is_zero() {
                *x = x.mod_floor(o);
            }
        }
    }
}

impl From<&FgAbGroup> for CyclicSum {
    fn from(g: &FgAbGroup) -> Self {
        g.presentation()
    }
}

impl From<FgAbGroup> for CyclicSum {
    fn from(g: FgAbGroup) -> Self {
        g.presentation()
    }
}

impl fmt::Display for CyclicSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.orders.is_empty() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .orders
            .iter()
            .map(|o| if o.is_zero() { "Z".to_string() } else { format!("Z/{o}") })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(s: &str) -> FgAbGroup {
        s.parse().unwrap()
    }

    #[test]
    fn normalization() {
        assert_eq!(g("Z/2 + Z/3"), g("Z/6"));
        assert_eq!(g("Z/4 + Z/6").to_string(), "Z/2 + Z/12");
        assert_eq!(g("Z/1 + 0"), FgAbGroup::trivial());
        assert_eq!(g("Z/8 + Z"), g("Z + Z/8"));
        assert_eq!(g("Z^2 + Z/2^2").to_string(), "Z^2 + Z/2 + Z/2");
        assert_eq!(FgAbGroup::cyclic(0), FgAbGroup::integers());
        assert_eq!(FgAbGroup::cyclic(1), FgAbGroup::trivial());
    }

    #[test]
    fn display_forms() {
        assert_eq!(FgAbGroup::trivial().to_string(), "0");
        assert_eq!(FgAbGroup::free(3).to_string(), "Z^3");
        assert_eq!(g("Z + Z/2 + Z/2").to_string(), "Z + Z/2 + Z/2");
    }

    #[test]
    fn rejects_bad_chain() {
        assert!(FgAbGroup::new(0, vec![BigInt::from(4), BigInt::from(6)]).is_err());
        assert!(FgAbGroup::new(0, vec![BigInt::from(1)]).is_err());
        assert!("Q".parse::<FgAbGroup>().is_err());
        assert!("".parse::<FgAbGroup>().is_err());
    }

    #[test]
    fn json_shape() {
        let x = g("Z + Z/8");
        let s = serde_json::to_string(&x).unwrap();
        assert_eq!(s, r#"{"free_rank":1,"torsion":[8]}"#);
        let back: FgAbGroup = serde_json::from_str(&s).unwrap();
        assert_eq!(back, x);
        assert!(serde_json::from_str::<FgAbGroup>(r#"{"free_rank":0,"torsion":[3,2]}"#).is_err());
    }

    #[test]
    fn order_and_generators() {
        assert_eq!(g("Z/2 + Z/4").order(), Some(BigInt::from(8)));
        assert_eq!(g("Z + Z/4").order(), None);
        assert_eq!(g("Z + Z/4").generator_orders(), vec![BigInt::zero(), BigInt::from(4)]);
    }
}
