//! Relational composition, permuting congruences, generated sublattices and
//! the Chinese remainder solver for commuting distributive families.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::ualg::{Congruence, FiniteAlgebra};

/// A binary relation on `{0, .., n-1}` stored as a dense matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BinaryRelation {
    n: usize,
    bits: Vec<bool>,
}

impl std::fmt::Debug for BinaryRelation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_set().entries(self.pairs()).finish()
    }
}

impl BinaryRelation {
    pub fn empty(n: usize) -> Self {
        BinaryRelation {
            n,
            bits: vec![false; n * n],
        }
    }

    pub fn of_congruence(theta: &Congruence) -> Self {
        let mut r = Self::empty(theta.size());
        for (a, b) in theta.pairs() {
            r.insert(a, b);
        }
        r
    }

    pub fn size(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn contains(&self, a: usize, b: usize) -> bool {
        self.bits[a * self.n + b]
    }

    pub fn insert(&mut self, a: usize, b: usize) {
        self.bits[a * self.n + b] = true;
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n * self.n)
            .filter(|&i| self.bits[i])
            .map(|i| (i / self.n, i % self.n))
    }

    pub fn is_subset(&self, other: &BinaryRelation) -> bool {
        self.bits.iter().zip(&other.bits).all(|(&a, &b)| !a || b)
    }

    /// Left-first composition: `(a, c)` with `a R b` and `b S c`.
    pub fn then(&self, other: &BinaryRelation) -> BinaryRelation {
        let n = self.n;
        let mut out = BinaryRelation::empty(n);
        for a in 0..n {
            for b in 0..n {
                if self.contains(a, b) {
                    for c in 0..n {
                        if other.contains(b, c) {
                            out.insert(a, c);
                        }
                    }
                }
            }
        }
        out
    }

    /// First pair in row-major order that lies in exactly one relation.
    pub fn first_difference(&self, other: &BinaryRelation) -> Option<(usize, usize)> {
        (0..self.n * self.n)
            .find(|&i| self.bits[i] != other.bits[i])
            .map(|i| (i / self.n, i % self.n))
    }
}

fn same_algebra(a: &Congruence, b: &Congruence) -> Result<()> {
    if a.size() != b.size() {
        return Err(Error::AlgebraMismatch {
            left: a.size(),
            right: b.size(),
        });
    }
    Ok(())
}

/// `theta ∘ phi` with the left relation applied first:
/// `{ (a, c) | ∃b. a θ b and b φ c }`.
pub fn compose(theta: &Congruence, phi: &Congruence) -> Result<BinaryRelation> {
    same_algebra(theta, phi)?;
    let n = theta.size();
    let phi_blocks = phi.blocks();
    let mut out = BinaryRelation::empty(n);
    for a in 0..n {
        for b in 0..n {
            if theta.related(a, b) {
                for &c in &phi_blocks[phi.label(b)] {
                    out.insert(a, c);
                }
            }
        }
    }
    Ok(out)
}

/// Outcome of a commuting test. On failure `witness` is a pair in exactly
/// one of the two compositions; `in_left_first` says whether it lies in
/// `θ ∘ φ` (as opposed to `φ ∘ θ`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommuteReport {
    pub commutes: bool,
    pub witness: Option<(usize, usize)>,
    pub in_left_first: bool,
}

pub fn commute(theta: &Congruence, phi: &Congruence) -> Result<CommuteReport> {
    let tp = compose(theta, phi)?;
    let pt = compose(phi, theta)?;
    match tp.first_difference(&pt) {
        None => Ok(CommuteReport {
            commutes: true,
            witness: None,
            in_left_first: false,
        }),
        Some((a, b)) => Ok(CommuteReport {
            commutes: false,
            witness: Some((a, b)),
            in_left_first: tp.contains(a, b),
        }),
    }
}

pub fn commutes(theta: &Congruence, phi: &Congruence) -> bool {
    commute(theta, phi).map(|r| r.commutes).unwrap_or(false)
}

/// Closure of a family under binary meet and join, with the two properties
/// needed by the Chinese remainder argument.
#[derive(Clone, Debug)]
pub struct GeneratedSublattice {
    pub members: Vec<Congruence>,
    pub is_distributive: bool,
    pub pairwise_commuting: bool,
    /// A triple `(a, b, c)` of member indices violating distributivity.
    pub distributivity_witness: Option<(usize, usize, usize)>,
    /// A pair of member indices that do not commute.
    pub commuting_witness: Option<(usize, usize)>,
}

pub fn generated_sublattice(congs: &[Congruence]) -> Result<GeneratedSublattice> {
    if let Some(first) = congs.first() {
        for c in congs {
            same_algebra(first, c)?;
        }
    }
    let mut members: Vec<Congruence> = Vec::new();
    let mut seen: HashSet<Congruence> = HashSet::new();
    for c in congs {
        if seen.insert(c.clone()) {
            members.push(c.clone());
        }
    }
    let mut i = 0;
    while i < members.len() {
        for j in 0..=i {
            for c in [members[i].meet(&members[j]), members[i].join(&members[j])] {
                if seen.insert(c.clone()) {
                    members.push(c);
                }
            }
        }
        i += 1;
    }
    members.sort_by(|a, b| b.num_blocks().cmp(&a.num_blocks()).then_with(|| a.cmp(b)));
    let n = members.len();
    let mut distributivity_witness = None;
    'dist: for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let lhs = members[a].meet(&members[b].join(&members[c]));
                let rhs = members[a].meet(&members[b]).join(&members[a].meet(&members[c]));
                if lhs != rhs {
                    distributivity_witness = Some((a, b, c));
                    break 'dist;
                }
            }
        }
    }
    let mut commuting_witness = None;
    'comm: for a in 0..n {
        for b in a + 1..n {
            if !commute(&members[a], &members[b])?.commutes {
                commuting_witness = Some((a, b));
                break 'comm;
            }
        }
    }
    Ok(GeneratedSublattice {
        is_distributive: distributivity_witness.is_none(),
        pairwise_commuting: commuting_witness.is_none(),
        members,
        distributivity_witness,
        commuting_witness,
    })
}

/// Finds `a` with `a θ_i a_i` for every constraint `(θ_i, a_i)`.
///
/// Both preconditions are checked first: the `θ_i` generate a
/// distributive sublattice of pairwise commuting congruences, and
/// `(a_i, a_j) ∈ θ_i ∘ θ_j` for all `i, j`. Under those conditions a
/// solution exists; the first one in carrier order is returned.
pub fn crt_solve(alg: &FiniteAlgebra, constraints: &[(Congruence, usize)]) -> Result<usize> {
    let n = alg.size();
    for (theta, a) in constraints {
        if theta.size() != n {
            return Err(Error::AlgebraMismatch {
                left: theta.size(),
                right: n,
            });
        }
        if *a >= n {
            return Err(Error::UnknownElement(format!("index {a}")));
        }
    }
    let congs: Vec<Congruence> = constraints.iter().map(|(t, _)| t.clone()).collect();
    let sub = generated_sublattice(&congs)?;
    if let Some((i, j)) = sub.commuting_witness {
        let r = commute(&sub.members[i], &sub.members[j])?;
        let (x, y) = r.witness.expect("non-commuting pair has a witness");
        return Err(Error::Precondition(format!(
            "generated congruences {} and {} do not commute (witness ({}, {}))",
            sub.members[i].fmt_with(alg),
            sub.members[j].fmt_with(alg),
            alg.element(x),
            alg.element(y)
        )));
    }
    if let Some((a, b, c)) = sub.distributivity_witness {
        return Err(Error::Precondition(format!(
            "generated sublattice is not distributive at ({}, {}, {})",
            sub.members[a].fmt_with(alg),
            sub.members[b].fmt_with(alg),
            sub.members[c].fmt_with(alg)
        )));
    }
    for (i, (ti, ai)) in constraints.iter().enumerate() {
        for (j, (tj, aj)) in constraints.iter().enumerate() {
            if !compose(ti, tj)?.contains(*ai, *aj) {
                return Err(Error::Precondition(format!(
                    "targets {} and {} of constraints {i} and {j} are not related by the composition",
                    alg.element(*ai),
                    alg.element(*aj)
                )));
            }
        }
    }
    (0..n)
        .find(|&x| constraints.iter().all(|(t, a)| t.related(x, *a)))
        .ok_or_else(|| {
            Error::InternalInvariant("no solution although both preconditions hold".into())
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ualg::{chain_lattice, principal_congruence, product, two_element_lattice, Signature};

    fn b4() -> (FiniteAlgebra, Congruence, Congruence) {
        let two = two_element_lattice();
        let (b4, proj) = product(&Signature::bounded_lattice(), &[&two, &two]).unwrap();
        let k1 = b4.kernel(&two, &proj[0]).unwrap();
        let k2 = b4.kernel(&two, &proj[1]).unwrap();
        (b4, k1, k2)
    }

    #[test]
    fn compose_examples() {
        let c3 = chain_lattice(3);
        let t0m = principal_congruence(&c3, 0, 1);
        let tm1 = principal_congruence(&c3, 1, 2);
        assert_eq!(
            compose(&Congruence::identity(3), &t0m).unwrap(),
            BinaryRelation::of_congruence(&t0m)
        );
        assert!(compose(&t0m, &tm1).unwrap().contains(0, 2));
        assert!(!compose(&tm1, &t0m).unwrap().contains(0, 2));
        assert!(matches!(
            compose(&t0m, &Congruence::identity(4)),
            Err(Error::AlgebraMismatch { .. })
        ));
    }

    #[test]
    fn commute_examples() {
        let c3 = chain_lattice(3);
        let t0m = principal_congruence(&c3, 0, 1);
        let tm1 = principal_congruence(&c3, 1, 2);
        assert!(commute(&Congruence::identity(3), &t0m).unwrap().commutes);
        let (_, k1, k2) = b4();
        assert!(commute(&k1, &k2).unwrap().commutes);
        assert_eq!(compose(&k1, &k2).unwrap(), BinaryRelation::of_congruence(&Congruence::total(4)));
        let r = commute(&t0m, &tm1).unwrap();
        assert!(!r.commutes);
        assert_eq!(r.witness, Some((0, 2)));
        assert!(r.in_left_first);
    }

    #[test]
    fn generated_sublattice_examples() {
        let s = generated_sublattice(&[Congruence::identity(3)]).unwrap();
        assert_eq!(s.members.len(), 1);
        assert!(s.is_distributive && s.pairwise_commuting);
        let (_, k1, k2) = b4();
        let s = generated_sublattice(&[k1, k2]).unwrap();
        assert_eq!(s.members.len(), 4);
        assert!(s.is_distributive && s.pairwise_commuting);
        let c3 = chain_lattice(3);
        let s = generated_sublattice(&[principal_congruence(&c3, 0, 1), principal_congruence(&c3, 1, 2)])
            .unwrap();
        assert!(s.is_distributive);
        assert!(!s.pairwise_commuting);
    }

    #[test]
    fn crt_examples() {
        let c3 = chain_lattice(3);
        let t = principal_congruence(&c3, 0, 1);
        assert_eq!(crt_solve(&c3, &[(t.clone(), 2)]).unwrap(), 2);
        let (b4, k1, k2) = b4();
        assert_eq!(b4.element(crt_solve(&b4, &[(k1, 0), (k2, 3)]).unwrap()), "(0,1)");
        let tm1 = principal_congruence(&c3, 1, 2);
        assert!(matches!(crt_solve(&c3, &[(t, 0), (tm1, 2)]), Err(Error::Precondition(_))));
    }
}
