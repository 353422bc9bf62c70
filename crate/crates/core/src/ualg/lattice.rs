use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::ualg::{principal_congruence, Congruence, FiniteAlgebra};

/// Size limits for [`congruence_lattice_with`].
#[derive(Clone, Copy, Debug)]
pub struct ConLatticeOptions {
    pub max_carrier: usize,
    pub max_members: usize,
}

impl Default for ConLatticeOptions {
    fn default() -> Self {
        ConLatticeOptions {
            max_carrier: 128,
            max_members: 200_000,
        }
    }
}

/// All congruences of an algebra, ordered by refinement.
///
/// Members are sorted canonically: more blocks first (so Δ is first and ∇
/// last), ties broken by label vectors.
#[derive(Clone, Debug)]
pub struct CongruenceLattice {
    carrier: usize,
    members: Vec<Congruence>,
    index: HashMap<Congruence, usize>,
}

impl CongruenceLattice {
    /// Wraps a set of partitions; duplicates are removed and the canonical
    /// order applied. No closure check is performed.
    pub fn from_members(carrier: usize, members: impl IntoIterator<Item = Congruence>) -> Self {
        let mut members: Vec<Congruence> = members.into_iter().collect();
        members.sort_by(canonical_cmp);
        members.dedup();
        let index = members.iter().cloned().enumerate().map(|(i, c)| (c, i)).collect();
        CongruenceLattice {
            carrier,
            members,
            index,
        }
    }

    pub fn members(&self) -> &[Congruence] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn carrier_size(&self) -> usize {
        self.carrier
    }

    pub fn get(&self, i: usize) -> &Congruence {
        &self.members[i]
    }

    pub fn index_of(&self, c: &Congruence) -> Option<usize> {
        self.index.get(c).copied()
    }

    pub fn contains(&self, c: &Congruence) -> bool {
        self.index.contains_key(c)
    }

    pub fn bottom(&self) -> usize {
        self.index[&Congruence::identity(self.carrier)]
    }

    pub fn top(&self) -> usize {
        self.index[&Congruence::total(self.carrier)]
    }

    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.members[i].refines(&self.members[j])
    }

    pub fn meet(&self, i: usize, j: usize) -> usize {
        self.index[&self.members[i].meet(&self.members[j])]
    }

    pub fn join(&self, i: usize, j: usize) -> usize {
        self.index[&self.members[i].join(&self.members[j])]
    }

    /// Hasse diagram edges `(lower, upper)`.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i != j
                    && self.leq(i, j)
                    && !(0..n).any(|k| k != i && k != j && self.leq(i, k) && self.leq(k, j))
                {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Exhaustive distributivity check over all triples.
    pub fn is_distributive(&self) -> bool {
        let n = self.len();
        (0..n).all(|a| {
            (0..n).all(|b| {
                (0..n).all(|c| self.meet(a, self.join(b, c)) == self.join(self.meet(a, b), self.meet(a, c)))
            })
        })
    }
}

fn canonical_cmp(a: &Congruence, b: &Congruence) -> std::cmp::Ordering {
    b.num_blocks()
        .cmp(&a.num_blocks())
        .then_with(|| a.labels().cmp(b.labels()))
}

/// [`congruence_lattice_with`] using default limits.
pub fn congruence_lattice(alg: &FiniteAlgebra) -> Result<CongruenceLattice> {
    congruence_lattice_with(alg, ConLatticeOptions::default())
}

/// All congruences, computed as the closure of Δ under joins with
/// principal congruences. Every congruence of a finite algebra is a finite
/// join of principal ones, so this reaches all of them.
pub fn congruence_lattice_with(alg: &FiniteAlgebra, opts: ConLatticeOptions) -> Result<CongruenceLattice> {
    let n = alg.size();
    if n > opts.max_carrier {
        return Err(Error::SizeGuard(format!(
            "carrier of {n} elements exceeds the congruence-lattice bound {}",
            opts.max_carrier
        )));
    }
    let mut principals: Vec<Congruence> = Vec::new();
    let mut seen_principal = std::collections::HashSet::new();
    for a in 0..n {
        for b in a + 1..n {
            let p = principal_congruence(alg, a, b);
            if seen_principal.insert(p.clone()) {
                principals.push(p);
            }
        }
    }
    let bottom = Congruence::identity(n);
    let mut found: std::collections::HashSet<Congruence> = std::collections::HashSet::new();
    found.insert(bottom.clone());
    let mut queue = vec![bottom];
    while let Some(c) = queue.pop() {
        for p in &principals {
            if p.refines(&c) {
                continue;
            }
            let j = c.join(p);
            if !found.contains(&j) {
                if found.len() >= opts.max_members {
                    return Err(Error::SizeGuard(format!(
                        "more than {} congruences",
                        opts.max_members
                    )));
                }
                found.insert(j.clone());
                queue.push(j);
            }
        }
    }
    Ok(CongruenceLattice::from_members(n, found))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ualg::{chain_lattice, product, two_element_lattice, Signature};

    #[test]
    fn small_lattices() {
        assert_eq!(congruence_lattice(&two_element_lattice()).unwrap().len(), 2);
        let con3 = congruence_lattice(&chain_lattice(3)).unwrap();
        assert_eq!(con3.len(), 4);
        assert!(con3.is_distributive());
        assert_eq!(con3.covers().len(), 4);
        let two = two_element_lattice();
        let (b4, _) = product(&Signature::bounded_lattice(), &[&two, &two]).unwrap();
        let con = congruence_lattice(&b4).unwrap();
        assert_eq!(con.len(), 4);
        assert_eq!(con.get(con.bottom()), &Congruence::identity(4));
        assert_eq!(con.get(con.top()), &Congruence::total(4));
        assert_eq!(con.bottom(), 0);
        assert_eq!(con.top(), 3);
    }

    #[test]
    fn size_guard() {
        let opts = ConLatticeOptions {
            max_carrier: 2,
            ..Default::default()
        };
        assert!(matches!(
            congruence_lattice_with(&chain_lattice(3), opts),
            Err(Error::SizeGuard(_))
        ));
    }
}
