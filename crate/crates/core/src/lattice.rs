//! Finite ambient groups described by a named subgroup lattice.
//!
//! Only what the orbit category needs is recorded: subgroup names, their
//! orders and the inclusion relation. Conjugacy is not modeled.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum LatticeError {
    #[error("subgroup `{0}` is declared twice")]
    Duplicate(String),
    #[error("unknown subgroup `{0}`")]
    UnknownSubgroup(String),
    #[error("order of `{sub}` ({sub_order}) does not divide order of `{sup}` ({sup_order})")]
    OrderDoesNotDivide { sub: String, sub_order: u64, sup: String, sup_order: u64 },
    #[error("subgroup order must be positive, `{0}` has order 0")]
    ZeroOrder(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Subgroup {
    pub name: String,
    pub order: u64,
}

/// The ambient group is always subgroup 0 and contains every other subgroup.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubgroupLattice {
    subgroups: Vec<Subgroup>,
    // reflexive and transitive, pairs (sub, sup)
    includes: BTreeSet<(usize, usize)>,
    // pairs as declared, kept for serialization
    declared: Vec<(usize, usize)>,
}

impl SubgroupLattice {
    pub fn new(ambient: &str, order: u64) -> Result<Self, LatticeError> {
        if order == 0 {
            return Err(LatticeError::ZeroOrder(ambient.to_string()));
        }
        let mut includes = BTreeSet::new();
        includes.insert((0, 0));
        Ok(SubgroupLattice { subgroups: vec![Subgroup { name: ambient.to_string(), order }], includes, declared: Vec::new() })
    }

    /// The trivial group `e`.
    pub fn trivial() -> Self {
        SubgroupLattice::new("e", 1).expect("order 1")
    }

    /// `Z/n` with the trivial subgroup `e` and the whole group `Zn`.
    pub fn cyclic_of_prime_order(n: u64) -> Self {
        let mut l = SubgroupLattice::new(&format!("Z{n}"), n).expect("positive order");
        l.add_subgroup("e", 1).expect("fresh name");
        l
    }

    pub fn add_subgroup(&mut self, name: &str, order: u64) -> Result<usize, LatticeError> {
        if self.index_of(name).is_some() {
            return Err(LatticeError::Duplicate(name.to_string()));
        }
        if order == 0 {
            return Err(LatticeError::ZeroOrder(name.to_string()));
        }
        let amb = &self.subgroups[0];
        if !amb.order.is_multiple_of(order) {
            return Err(LatticeError::OrderDoesNotDivide {
                sub: name.to_string(),
                sub_order: order,
                sup: amb.name.clone(),
                sup_order: amb.order,
            });
        }
        self.subgroups.push(Subgroup { name: name.to_string(), order });
        let i = self.subgroups.len() - 1;
        self.includes.insert((i, i));
        self.includes.insert((i, 0));
        Ok(i)
    }

    pub fn add_inclusion(&mut self, sub: &str, sup: &str) -> Result<(), LatticeError> {
        let a = self.require(sub)?;
        let b = self.require(sup)?;
        let (oa, ob) = (self.subgroups[a].order, self.subgroups[b].order);
        if ob % oa != 0 {
            return Err(LatticeError::OrderDoesNotDivide {
                sub: sub.to_string(),
                sub_order: oa,
                sup: sup.to_string(),
                sup_order: ob,
            });
        }
        self.declared.push((a, b));
        self.includes.insert((a, b));
        self.close();
        Ok(())
    }

    fn close(&mut self) {
        loop {
            let mut added = Vec::new();
            for &(a, b) in &self.includes {
                for &(c, d) in self.includes.range((b, 0)..(b + 1, 0)) {
                    debug_assert_eq!(c, b);
                    if !self.includes.contains(&(a, d)) {
                        added.push((a, d));
                    }
                }
            }
            if added.is_empty() {
                break;
            }
            self.includes.extend(added);
        }
    }

    pub fn ambient(&self) -> &Subgroup {
        &self.subgroups[0]
    }

    pub fn subgroups(&self) -> &[Subgroup] {
        &self.subgroups
    }

    pub fn declared_inclusions(&self) -> impl Iterator<Item = (&str, &str)> {
        self.declared.iter().map(|&(a, b)| (self.subgroups[a].name.as_str(), self.subgroups[b].name.as_str()))
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.subgroups.iter().position(|s| s.name == name)
    }

    pub fn require(&self, name: &str) -> Result<usize, LatticeError> {
        self.index_of(name).ok_or_else(|| LatticeError::UnknownSubgroup(name.to_string()))
    }

    pub fn name(&self, i: usize) -> &str {
        &self.subgroups[i].name
    }

    pub fn order(&self, i: usize) -> u64 {
        self.subgroups[i].order
    }

    pub fn contains(&self, sub: usize, sup: usize) -> bool {
        self.includes.contains(&(sub, sup))
    }

    /// `[sup : sub]`, or `None` when `sub` is not contained in `sup`.
    pub fn index(&self, sub: usize, sup: usize) -> Option<u64> {
        self.contains(sub, sup).then(|| self.subgroups[sup].order / self.subgroups[sub].order)
    }

    /// Same subgroups in the same order with the same inclusion relation,
    /// however the inclusions were declared.
    pub fn equivalent(&self, other: &SubgroupLattice) -> bool {
        self.subgroups == other.subgroups && self.includes == other.includes
    }

    /// Proper chains `a ⊂ b ⊂ c` with three distinct members.
    pub fn chains(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for &(a, b) in &self.includes {
            if a == b {
                continue;
            }
            for &(_, c) in self.includes.range((b, 0)..(b + 1, 0)) {
                if c != b && c != a {
                    out.push((a, b, c));
                }
            }
        }
        out
    }

    /// Strict inclusions as (sub, sup) pairs.
    pub fn strict_inclusions(&self) -> Vec<(usize, usize)> {
        self.includes.iter().copied().filter(|(a, b)| a != b).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transitive_closure() {
        let mut l = SubgroupLattice::new("Z4", 4).unwrap();
        l.add_subgroup("Z2", 2).unwrap();
        l.add_subgroup("e", 1).unwrap();
        l.add_inclusion("e", "Z2").unwrap();
        let (e, z2, z4) = (l.require("e").unwrap(), l.require("Z2").unwrap(), l.require("Z4").unwrap());
        assert!(l.contains(e, z4));
        assert!(l.contains(z2, z4));
        assert!(!l.contains(z4, e));
        assert_eq!(l.index(e, z4), Some(4));
        assert_eq!(l.chains(), vec![(e, z2, z4)]);
    }

    #[test]
    fn rejects_bad_orders() {
        let mut l = SubgroupLattice::new("Z2", 2).unwrap();
        assert!(matches!(l.add_subgroup("Z3", 3), Err(LatticeError::OrderDoesNotDivide { .. })));
        l.add_subgroup("e", 1).unwrap();
        assert!(matches!(l.add_inclusion("Z2", "e"), Err(LatticeError::OrderDoesNotDivide { .. })));
        assert!(matches!(l.add_subgroup("e", 1), Err(LatticeError::Duplicate(_))));
        assert!(matches!(l.add_inclusion("x", "e"), Err(LatticeError::UnknownSubgroup(_))));
    }
}
