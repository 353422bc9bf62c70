use std::fmt;

use crate::error::{Error, Result};
use crate::ualg::{for_each_tuple, FiniteAlgebra};

/// A partition of `{0, .., n-1}`, used for congruences.
///
/// Stored canonically as one block label per element, with blocks numbered
/// in order of their least member, so structural equality is partition
/// equality.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Congruence {
    labels: Vec<u32>,
    blocks: u32,
}

impl fmt::Debug for Congruence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Congruence{:?}", self.blocks())
    }
}

impl Congruence {
    /// The identity relation Δ.
    pub fn identity(n: usize) -> Self {
        Congruence {
            labels: (0..n as u32).collect(),
            blocks: n as u32,
        }
    }

    /// The total relation ∇.
    pub fn total(n: usize) -> Self {
        Congruence {
            labels: vec![0; n],
            blocks: u32::from(n > 0),
        }
    }

    /// Canonicalises arbitrary block labels.
    pub fn from_labels<L: Clone + Eq + std::hash::Hash>(labels: &[L]) -> Self {
        let mut seen = std::collections::HashMap::new();
        let mut out = Vec::with_capacity(labels.len());
        for l in labels {
            let next = seen.len() as u32;
            out.push(*seen.entry(l.clone()).or_insert(next));
        }
        Congruence {
            blocks: seen.len() as u32,
            labels: out,
        }
    }

    /// Partition from explicit blocks; they must be disjoint, nonempty and
    /// cover `{0, .., n-1}`.
    pub fn from_blocks(n: usize, blocks: &[Vec<usize>]) -> Result<Self> {
        let mut labels = vec![usize::MAX; n];
        for (b, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(Error::Parse("empty block in partition".into()));
            }
            for &x in block {
                if x >= n {
                    return Err(Error::UnknownElement(format!("index {x}")));
                }
                if labels[x] != usize::MAX {
                    return Err(Error::Parse(format!("element {x} occurs in two blocks")));
                }
                labels[x] = b;
            }
        }
        if let Some(x) = labels.iter().position(|&l| l == usize::MAX) {
            return Err(Error::Parse(format!("element {x} is in no block")));
        }
        Ok(Self::from_labels(&labels))
    }

    /// Equivalence relation generated by `pairs` (no compatibility closure).
    pub fn equivalence_from_pairs(n: usize, pairs: &[(usize, usize)]) -> Self {
        let mut uf = UnionFind::new(n);
        for &(a, b) in pairs {
            uf.union(a, b);
        }
        uf.into_congruence()
    }

    /// Number of underlying elements.
    pub fn size(&self) -> usize {
        self.labels.len()
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks as usize
    }

    #[inline]
    pub fn label(&self, a: usize) -> usize {
        self.labels[a] as usize
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    #[inline]
    pub fn related(&self, a: usize, b: usize) -> bool {
        self.labels[a] == self.labels[b]
    }

    pub fn is_identity(&self) -> bool {
        self.blocks as usize == self.labels.len()
    }

    pub fn is_total(&self) -> bool {
        self.blocks <= 1
    }

    /// Blocks in canonical order (by least member), members ascending.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.blocks as usize];
        for (a, &l) in self.labels.iter().enumerate() {
            out[l as usize].push(a);
        }
        out
    }

    /// The block containing `a`.
    pub fn block_of(&self, a: usize) -> Vec<usize> {
        (0..self.size()).filter(|&b| self.related(a, b)).collect()
    }

    /// `self ⊆ other` as relations.
    pub fn refines(&self, other: &Congruence) -> bool {
        debug_assert_eq!(self.size(), other.size());
        let mut image = vec![u32::MAX; self.blocks as usize];
        for (a, &l) in self.labels.iter().enumerate() {
            let slot = &mut image[l as usize];
            if *slot == u32::MAX {
                *slot = other.labels[a];
            } else if *slot != other.labels[a] {
                return false;
            }
        }
        true
    }

    /// Common refinement (intersection).
    pub fn meet(&self, other: &Congruence) -> Congruence {
        debug_assert_eq!(self.size(), other.size());
        let pairs: Vec<(u32, u32)> = self.labels.iter().copied().zip(other.labels.iter().copied()).collect();
        Congruence::from_labels(&pairs)
    }

    /// Transitive closure of the union. For two congruences this is their
    /// join in the congruence lattice.
    pub fn join(&self, other: &Congruence) -> Congruence {
        debug_assert_eq!(self.size(), other.size());
        let mut uf = UnionFind::new(self.size());
        for rel in [self, other] {
            let mut first = vec![usize::MAX; rel.blocks as usize];
            for (a, &l) in rel.labels.iter().enumerate() {
                let f = &mut first[l as usize];
                if *f == usize::MAX {
                    *f = a;
                } else {
                    uf.union(*f, a);
                }
            }
        }
        uf.into_congruence()
    }

    /// All related pairs `(a, b)`, including the diagonal.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.size();
        (0..n).flat_map(move |a| (0..n).filter(move |&b| self.related(a, b)).map(move |b| (a, b)))
    }

    /// Checks compatibility with every operation via unary basic
    /// translations; returns a human-readable witness on failure.
    pub fn compatibility_witness(&self, alg: &FiniteAlgebra) -> Option<String> {
        let n = alg.size();
        if self.size() != n {
            return Some(format!("partition has {} elements, algebra {}", self.size(), n));
        }
        let reps: Vec<(usize, usize)> = (0..n)
            .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
            .filter(|&(a, b)| self.related(a, b))
            .collect();
        let mut args = Vec::new();
        for (op, sym) in alg.signature().symbols().iter().enumerate() {
            if sym.arity == 0 {
                continue;
            }
            for pos in 0..sym.arity {
                let mut found = None;
                for_each_tuple(n, sym.arity - 1, |rest| {
                    if found.is_some() {
                        return;
                    }
                    for &(a, b) in &reps {
                        args.clear();
                        args.extend_from_slice(&rest[..pos]);
                        args.push(a);
                        args.extend_from_slice(&rest[pos..]);
                        let u = alg.apply(op, &args);
                        args[pos] = b;
                        let v = alg.apply(op, &args);
                        if !self.related(u, v) {
                            found = Some(format!(
                                "{} at argument {} relates {} and {} but maps them to {} and {}",
                                sym.name,
                                pos,
                                alg.element(a),
                                alg.element(b),
                                alg.element(u),
                                alg.element(v)
                            ));
                            return;
                        }
                    }
                });
                if found.is_some() {
                    return found;
                }
            }
        }
        None
    }

    pub fn is_congruence_of(&self, alg: &FiniteAlgebra) -> bool {
        self.compatibility_witness(alg).is_none()
    }

    /// Renders blocks with element names, e.g. `{{0,m},{1}}`.
    pub fn fmt_with(&self, alg: &FiniteAlgebra) -> String {
        let blocks: Vec<String> = self
            .blocks()
            .iter()
            .map(|b| {
                let names: Vec<&str> = b.iter().map(|&i| alg.element(i)).collect();
                format!("{{{}}}", names.join(","))
            })
            .collect();
        format!("{{{}}}", blocks.join(","))
    }
}

/// Smallest congruence containing `(a, b)`.
pub fn principal_congruence(alg: &FiniteAlgebra, a: usize, b: usize) -> Congruence {
    generated_congruence(alg, &[(a, b)])
}

/// Smallest congruence containing all `pairs`: equivalence closure plus
/// closure under unary basic translations, run to a fixpoint with a
/// worklist of merged pairs.
pub fn generated_congruence(alg: &FiniteAlgebra, pairs: &[(usize, usize)]) -> Congruence {
    let n = alg.size();
    let mut uf = UnionFind::new(n);
    let mut queue: Vec<(usize, usize)> = Vec::new();
    for &(a, b) in pairs {
        if uf.union(a, b) {
            queue.push((a, b));
        }
    }
    let mut args = Vec::new();
    while let Some((a, b)) = queue.pop() {
        for (op, sym) in alg.signature().symbols().iter().enumerate() {
            if sym.arity == 0 {
                continue;
            }
            for pos in 0..sym.arity {
                for_each_tuple(n, sym.arity - 1, |rest| {
                    args.clear();
                    args.extend_from_slice(&rest[..pos]);
                    args.push(a);
                    args.extend_from_slice(&rest[pos..]);
                    let u = alg.apply(op, &args);
                    args[pos] = b;
                    let v = alg.apply(op, &args);
                    if uf.union(u, v) {
                        queue.push((u, v));
                    }
                });
            }
        }
    }
    let theta = uf.into_congruence();
    debug_assert!(theta.is_congruence_of(alg));
    theta
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns true if the two classes were distinct.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        true
    }

    pub(crate) fn into_congruence(mut self) -> Congruence {
        let roots: Vec<usize> = (0..self.parent.len()).map(|x| self.find(x)).collect();
        Congruence::from_labels(&roots)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ualg::{chain_lattice, product, two_element_lattice, Signature};

    #[test]
    fn canonical_labels() {
        let c = Congruence::from_labels(&[7, 3, 7, 1]);
        assert_eq!(c.labels(), &[0, 1, 0, 2]);
        assert_eq!(c.blocks(), vec![vec![0, 2], vec![1], vec![3]]);
        assert!(Congruence::from_blocks(3, &[vec![0], vec![0, 1, 2]]).is_err());
        assert!(Congruence::from_blocks(3, &[vec![0]]).is_err());
    }

    #[test]
    fn principal_examples() {
        let c3 = chain_lattice(3);
        assert_eq!(principal_congruence(&c3, 1, 1), Congruence::identity(3));
        assert_eq!(principal_congruence(&c3, 0, 1).blocks(), vec![vec![0, 1], vec![2]]);
        assert_eq!(principal_congruence(&c3, 0, 2), Congruence::total(3));
    }

    #[test]
    fn meet_join_refines() {
        let c3 = chain_lattice(3);
        let a = principal_congruence(&c3, 0, 1);
        let b = principal_congruence(&c3, 1, 2);
        assert_eq!(a.meet(&b), Congruence::identity(3));
        assert_eq!(a.join(&b), Congruence::total(3));
        assert!(Congruence::identity(3).refines(&a));
        assert!(a.refines(&Congruence::total(3)));
        assert!(!a.refines(&b));
    }

    #[test]
    fn compatibility() {
        let two = two_element_lattice();
        let (b4, _) = product(&Signature::bounded_lattice(), &[&two, &two]).unwrap();
        let bad = Congruence::from_blocks(4, &[vec![0, 3], vec![1], vec![2]]).unwrap();
        assert!(bad.compatibility_witness(&b4).is_some());
        let good = Congruence::from_blocks(4, &[vec![0, 1], vec![2, 3]]).unwrap();
        assert!(good.is_congruence_of(&b4));
    }
}
