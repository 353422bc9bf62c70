//! Finite distributive lattices and their Priestley duals.
//!
//! Orientation: the dual `X` is the set of prime ideals ordered by
//! **inclusion** (the reverse of the specialization order of the Stone
//! spectrum). With this choice `â = { p ∈ X | a ∉ p }` is a down-set, the
//! closed sets of the Stone spectrum are up-sets, and a decomposition is a
//! map `q: X → Y` read as landing in `Y↓`. Every subset of a finite `X` is
//! patch-closed, so congruences of `A` correspond to arbitrary subsets of
//! `X`.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::poset::{FinitePoset, MonotoneMap};
use crate::sheafrep::{validate_frame_hom, FrameHom, SheafRep, StalkAssignment};
use crate::subset::{Subset, MAX_ELEMS};
use crate::ualg::{congruence_lattice, Congruence, FiniteAlgebra, Signature};

/// A bounded distributive lattice with signature `meet`, `join`, `bot`,
/// `top`. All axioms are checked exhaustively on construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistLattice {
    alg: Arc<FiniteAlgebra>,
    meet: usize,
    join: usize,
    bot: usize,
    top: usize,
}

impl DistLattice {
    pub fn new(alg: Arc<FiniteAlgebra>) -> Result<Self> {
        let meet = alg.op_index("meet")?;
        let join = alg.op_index("join")?;
        let bot = alg.op_index("bot")?;
        let top = alg.op_index("top")?;
        let sig = alg.signature().symbols();
        if sig[meet].arity != 2 || sig[join].arity != 2 || sig[bot].arity != 0 || sig[top].arity != 0 {
            return Err(Error::SignatureMismatch(
                "expected binary meet/join and constant bot/top".into(),
            ));
        }
        let l = DistLattice {
            bot: alg.apply(bot, &[]),
            top: alg.apply(top, &[]),
            alg,
            meet,
            join,
        };
        l.check_axioms()?;
        Ok(l)
    }

    fn check_axioms(&self) -> Result<()> {
        let n = self.alg.size();
        let name = |a: usize| self.alg.element(a).to_string();
        let fail = |law: &str, xs: &[usize]| {
            Err(Error::Invalid(format!(
                "{law} fails at ({})",
                xs.iter().map(|&x| name(x)).collect::<Vec<_>>().join(",")
            )))
        };
        for a in 0..n {
            if self.meet(a, a) != a || self.join(a, a) != a {
                return fail("idempotence", &[a]);
            }
            if self.join(self.bot, a) != a || self.meet(self.top, a) != a {
                return fail("boundedness", &[a]);
            }
            for b in 0..n {
                if self.meet(a, b) != self.meet(b, a) || self.join(a, b) != self.join(b, a) {
                    return fail("commutativity", &[a, b]);
                }
                if self.meet(a, self.join(a, b)) != a || self.join(a, self.meet(a, b)) != a {
                    return fail("absorption", &[a, b]);
                }
                for c in 0..n {
                    if self.meet(a, self.meet(b, c)) != self.meet(self.meet(a, b), c)
                        || self.join(a, self.join(b, c)) != self.join(self.join(a, b), c)
                    {
                        return fail("associativity", &[a, b, c]);
                    }
                    if self.meet(a, self.join(b, c)) != self.join(self.meet(a, b), self.meet(a, c)) {
                        return fail("distributivity", &[a, b, c]);
                    }
                }
            }
        }
        Ok(())
    }

    /// The lattice of down-sets of a finite poset (Birkhoff).
    pub fn of_down_sets(p: &FinitePoset) -> Self {
        let sets = p.down_sets();
        let index: HashMap<Subset, usize> = sets.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        let carrier = sets.iter().map(|&s| p.fmt_subset(s)).collect();
        let full = p.all();
        let alg = FiniteAlgebra::from_fn("Down(P)", carrier, Signature::bounded_lattice(), |op, a| match op {
            0 => index[&sets[a[0]].intersection(sets[a[1]])],
            1 => index[&sets[a[0]].union(sets[a[1]])],
            2 => index[&Subset::EMPTY],
            _ => index[&full],
        })
        .expect("down-set tables are total");
        DistLattice::new(Arc::new(alg)).expect("down-set lattices are distributive")
    }

    pub fn algebra(&self) -> &Arc<FiniteAlgebra> {
        &self.alg
    }

    pub fn size(&self) -> usize {
        self.alg.size()
    }

    #[inline]
    pub fn meet(&self, a: usize, b: usize) -> usize {
        self.alg.apply2(self.meet, a, b)
    }

    #[inline]
    pub fn join(&self, a: usize, b: usize) -> usize {
        self.alg.apply2(self.join, a, b)
    }

    pub fn bot(&self) -> usize {
        self.bot
    }

    pub fn top(&self) -> usize {
        self.top
    }

    #[inline]
    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.meet(a, b) == a
    }

    /// Nonzero elements that are not the join of two strictly smaller ones.
    pub fn join_irreducibles(&self) -> Vec<usize> {
        let n = self.size();
        (0..n)
            .filter(|&j| {
                j != self.bot
                    && !(0..n).any(|x| {
                        x != j && self.leq(x, j) && (0..n).any(|y| y != j && self.leq(y, j) && self.join(x, y) == j)
                    })
            })
            .collect()
    }
}

/// Builds the bounded lattice algebra of a poset that is a lattice, or
/// reports why it is not one.
pub fn lattice_from_order(p: &FinitePoset, name: &str) -> Result<FiniteAlgebra> {
    let n = p.len();
    if n == 0 {
        return Err(Error::Invalid("the empty poset is not a bounded lattice".into()));
    }
    let best = |cands: Subset, lower: bool| -> Option<usize> {
        cands.iter().find(|&c| {
            cands
                .iter()
                .all(|d| if lower { p.leq(d, c) } else { p.leq(c, d) })
        })
    };
    let mut meet = vec![0; n * n];
    let mut join = vec![0; n * n];
    for a in 0..n {
        for b in 0..n {
            let lower = p.down_of(a).intersection(p.down_of(b));
            let upper = p.up_of(a).intersection(p.up_of(b));
            meet[a * n + b] = best(lower, true)
                .ok_or_else(|| Error::Invalid(format!("{} and {} have no meet", p.name(a), p.name(b))))?;
            join[a * n + b] = best(upper, false)
                .ok_or_else(|| Error::Invalid(format!("{} and {} have no join", p.name(a), p.name(b))))?;
        }
    }
    let bot = best(p.all(), false).ok_or_else(|| Error::Invalid("no bottom".into()))?;
    let top = best(p.all(), true).ok_or_else(|| Error::Invalid("no top".into()))?;
    FiniteAlgebra::from_tables(
        name,
        p.names().to_vec(),
        Signature::bounded_lattice(),
        vec![meet, join, vec![bot], vec![top]],
    )
}

/// The Priestley dual of a finite distributive lattice.
#[derive(Clone, Debug)]
pub struct PriestleyDual {
    lattice: DistLattice,
    x: Arc<FinitePoset>,
    /// The join-irreducible `j` with `p = { a | j ≰ a }`, per point.
    generators: Vec<usize>,
    hat: Vec<Subset>,
}

/// Computes `X` from join-irreducibles: each `j` gives the prime ideal
/// `{ a | j ≰ a }`, and `p_j ⊆ p_k` iff `j <= k`. Verifies that `a ↦ â` is a
/// bounded-lattice isomorphism onto the down-sets of `X`.
pub fn priestley_dual(lattice: &DistLattice) -> Result<PriestleyDual> {
    let gens = lattice.join_irreducibles();
    if gens.len() > MAX_ELEMS {
        return Err(Error::SizeGuard(format!("{} join-irreducibles", gens.len())));
    }
    let alg = lattice.algebra();
    let names: Vec<String> = gens.iter().map(|&j| format!("p[{}]", alg.element(j))).collect();
    let mut pairs = Vec::new();
    for (i, &j) in gens.iter().enumerate() {
        for (k, &l) in gens.iter().enumerate() {
            if i != k && lattice.leq(j, l) {
                pairs.push((i, k));
            }
        }
    }
    let x = Arc::new(FinitePoset::from_index_pairs(names, &pairs)?);
    let hat: Vec<Subset> = (0..lattice.size())
        .map(|a| {
            gens.iter()
                .enumerate()
                .filter(|(_, &j)| lattice.leq(j, a))
                .map(|(i, _)| i)
                .collect()
        })
        .collect();
    let dual = PriestleyDual {
        lattice: lattice.clone(),
        x,
        generators: gens,
        hat,
    };
    dual.verify()?;
    Ok(dual)
}

impl PriestleyDual {
    fn verify(&self) -> Result<()> {
        let l = &self.lattice;
        let n = l.size();
        if self.hat[l.bot()] != Subset::EMPTY || self.hat[l.top()] != self.x.all() {
            return Err(Error::InternalInvariant("hat does not preserve bounds".into()));
        }
        for a in 0..n {
            if !self.x.is_down_set(self.hat[a]) {
                return Err(Error::InternalInvariant(format!(
                    "hat of {} is not a down-set",
                    l.algebra().element(a)
                )));
            }
            for b in 0..n {
                if self.hat[l.meet(a, b)] != self.hat[a].intersection(self.hat[b])
                    || self.hat[l.join(a, b)] != self.hat[a].union(self.hat[b])
                {
                    return Err(Error::InternalInvariant("hat is not a lattice homomorphism".into()));
                }
                if a != b && self.hat[a] == self.hat[b] {
                    return Err(Error::InternalInvariant("hat is not injective".into()));
                }
            }
        }
        if self.x.down_sets().len() != n {
            return Err(Error::InternalInvariant("hat is not onto the down-sets".into()));
        }
        Ok(())
    }

    pub fn lattice(&self) -> &DistLattice {
        &self.lattice
    }

    pub fn algebra(&self) -> &Arc<FiniteAlgebra> {
        self.lattice.algebra()
    }

    pub fn x(&self) -> &Arc<FinitePoset> {
        &self.x
    }

    /// `â` as a down-set of `X`.
    pub fn hat(&self, a: usize) -> Subset {
        self.hat[a]
    }

    /// The prime ideal at point `p`, as a membership vector over `A`.
    pub fn ideal(&self, p: usize) -> Vec<bool> {
        let j = self.generators[p];
        (0..self.lattice.size()).map(|a| !self.lattice.leq(j, a)).collect()
    }

    pub fn generator(&self, p: usize) -> usize {
        self.generators[p]
    }

    /// `θ_C = { (a, b) | â ∩ C = b̂ ∩ C }`.
    pub fn cong_from_closed(&self, c: Subset) -> Congruence {
        let keys: Vec<Subset> = self.hat.iter().map(|h| h.intersection(c)).collect();
        Congruence::from_labels(&keys)
    }

    /// `C_θ = { x | ∀ (a, b) ∈ θ. x ∈ â ⇔ x ∈ b̂ }`.
    pub fn closed_from_cong(&self, theta: &Congruence) -> Subset {
        let mut c = self.x.all();
        for (a, b) in theta.pairs() {
            let diff = Subset(self.hat[a].0 ^ self.hat[b].0);
            c = c.difference(diff);
        }
        c
    }

    /// Checks that `C ↦ θ_C` is an inclusion-reversing bijection from the
    /// subsets of `X` onto `Con A`, with `closed_from_cong` as its inverse.
    pub fn correspondence_check(&self) -> Result<bool> {
        let con = congruence_lattice(self.algebra())?;
        let subsets: Vec<Subset> = Subset::all(self.x.len()).collect();
        let images: Vec<Congruence> = subsets.iter().map(|&c| self.cong_from_closed(c)).collect();
        let onto = images.iter().all(|t| con.contains(t))
            && con.members().iter().all(|t| self.cong_from_closed(self.closed_from_cong(t)) == *t);
        let inverse = subsets
            .iter()
            .zip(&images)
            .all(|(&c, t)| self.closed_from_cong(t) == c);
        let reversing = subsets.iter().zip(&images).all(|(&c1, t1)| {
            subsets
                .iter()
                .zip(&images)
                .all(|(&c2, t2)| c1.is_subset(c2) == t2.refines(t1))
        });
        Ok(onto && inverse && reversing && con.len() == subsets.len())
    }
}

/// Outcome of an interpolation test; the witness is the offending pair of
/// points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InterpolationReport {
    pub holds: bool,
    pub witness: Option<(usize, usize)>,
}

/// For all `x1 ∈ C1`, `x2 ∈ C2` comparable in either direction, some
/// `z ∈ C1 ∩ C2` lies between them.
pub fn interpolation_condition(x: &FinitePoset, c1: Subset, c2: Subset) -> InterpolationReport {
    let both = c1.intersection(c2);
    for x1 in c1.iter() {
        for x2 in c2.iter() {
            for (lo, hi) in [(x1, x2), (x2, x1)] {
                if x.leq(lo, hi) && x.up_of(lo).intersection(x.down_of(hi)).intersection(both).is_empty() {
                    return InterpolationReport {
                        holds: false,
                        witness: Some((x1, x2)),
                    };
                }
            }
        }
    }
    InterpolationReport {
        holds: true,
        witness: None,
    }
}

/// A map `q: X → Y` between finite posets. Continuity for the down-set
/// topology on `Y` is automatic because the patch topology of `X` is
/// discrete.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    source: Arc<FinitePoset>,
    target: Arc<FinitePoset>,
    map: Vec<usize>,
}

impl Decomposition {
    pub fn new(source: Arc<FinitePoset>, target: Arc<FinitePoset>, map: Vec<usize>) -> Result<Self> {
        if map.len() != source.len() {
            return Err(Error::Precondition(format!(
                "{} values for {} points",
                map.len(),
                source.len()
            )));
        }
        if let Some(&bad) = map.iter().find(|&&y| y >= target.len()) {
            return Err(Error::UnknownElement(format!("target index {bad}")));
        }
        Ok(Decomposition { source, target, map })
    }

    pub fn source(&self) -> &Arc<FinitePoset> {
        &self.source
    }

    pub fn target(&self) -> &Arc<FinitePoset> {
        &self.target
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn apply(&self, x: usize) -> usize {
        self.map[x]
    }

    pub fn preimage(&self, s: Subset) -> Subset {
        (0..self.source.len()).filter(|&x| s.contains(self.map[x])).collect()
    }

    /// `f ∘ q` for a monotone `f` out of the target.
    pub fn then(&self, f: &MonotoneMap) -> Result<Decomposition> {
        if **f.source() != *self.target {
            return Err(Error::Precondition("map source is not the decomposition target".into()));
        }
        Decomposition::new(
            self.source.clone(),
            f.target().clone(),
            self.map.iter().map(|&y| f.apply(y)).collect(),
        )
    }

    /// For `x1 <= x2` there is `z` with `x1 <= z <= x2` and both `q(x1)`,
    /// `q(x2)` below `q(z)`.
    pub fn is_interpolating(&self) -> InterpolationReport {
        let (x, y) = (&self.source, &self.target);
        for x1 in 0..x.len() {
            for x2 in x.up_of(x1).iter() {
                let between = x.up_of(x1).intersection(x.down_of(x2));
                let ok = between
                    .iter()
                    .any(|z| y.leq(self.map[x1], self.map[z]) && y.leq(self.map[x2], self.map[z]));
                if !ok {
                    return InterpolationReport {
                        holds: false,
                        witness: Some((x1, x2)),
                    };
                }
            }
        }
        InterpolationReport {
            holds: true,
            witness: None,
        }
    }
}

/// The assignment `y ↦ θ_{q⁻¹(↑y)}`, defined for any `q`; it is monotone
/// but a frame homomorphism only when `q` interpolates.
pub fn psi_assignment(dual: &PriestleyDual, q: &Decomposition) -> Result<StalkAssignment> {
    if **q.source() != *dual.x {
        return Err(Error::Precondition("decomposition source is not the dual space".into()));
    }
    let y = q.target();
    let stalks = (0..y.len())
        .map(|t| dual.cong_from_closed(q.preimage(y.up_of(t))))
        .collect();
    StalkAssignment::new(y.clone(), dual.algebra().clone(), stalks)
}

/// `ψ_q`, validated as a frame homomorphism with commuting image.
pub fn psi_of_q(dual: &PriestleyDual, q: &Decomposition) -> Result<FrameHom> {
    let report = q.is_interpolating();
    if let Some((x1, x2)) = report.witness {
        return Err(Error::NotInterpolating(format!(
            "no interpolant between {} and {}",
            q.source().name(x1),
            q.source().name(x2)
        )));
    }
    let sa = psi_assignment(dual, q)?;
    validate_frame_hom(&sa).map_err(|v| Error::InternalInvariant(v.describe(&sa)))
}

/// Recovers the decomposition of a soft sheaf representation of `A`:
/// `q(x)` is the `y` with `↓y = ⋂ { U down-set | x ∉ C(ψ_F(U)) }`.
pub fn q_of_sheaf(dual: &PriestleyDual, sheaf: &SheafRep) -> Result<Decomposition> {
    if **sheaf.algebra() != **dual.algebra() {
        return Err(Error::Precondition("sheaf is not over the dual's lattice".into()));
    }
    if let Err(v) = validate_frame_hom(sheaf.assignment()) {
        return Err(Error::SoftnessRequired(v.describe(sheaf.assignment())));
    }
    if !sheaf.is_soft().soft {
        return Err(Error::SoftnessRequired("sheaf is not soft".into()));
    }
    let y = sheaf.base();
    let downs = y.down_sets();
    let opens: Vec<(Subset, Subset)> = downs
        .iter()
        .map(|&u| {
            let psi = sheaf.theta_at(u.complement(y.len()));
            (u, dual.closed_from_cong(&psi).complement(dual.x.len()))
        })
        .collect();
    let mut map = Vec::with_capacity(dual.x.len());
    for x in 0..dual.x.len() {
        let meet = opens
            .iter()
            .filter(|(_, open)| open.contains(x))
            .fold(y.all(), |acc, (u, _)| acc.intersection(*u));
        let point = (0..y.len())
            .find(|&t| y.down_of(t) == meet)
            .ok_or_else(|| {
                Error::InternalInvariant(format!(
                    "{} is not a principal down-set at {}",
                    y.fmt_subset(meet),
                    dual.x.name(x)
                ))
            })?;
        map.push(point);
    }
    Decomposition::new(dual.x.clone(), y.clone(), map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sheafrep::build_sheaf;
    use crate::ualg::{chain_lattice, principal_congruence, product, two_element_lattice};

    fn dl(alg: FiniteAlgebra) -> DistLattice {
        DistLattice::new(Arc::new(alg)).unwrap()
    }

    fn b4() -> DistLattice {
        let two = two_element_lattice();
        dl(product(&Signature::bounded_lattice(), &[&two, &two]).unwrap().0)
    }

    #[test]
    fn rejects_non_distributive() {
        // M3: bottom, three atoms, top
        let p = FinitePoset::new(
            &["0", "a", "b", "c", "1"],
            &[("0", "a"), ("0", "b"), ("0", "c"), ("a", "1"), ("b", "1"), ("c", "1")],
        )
        .unwrap();
        let m3 = lattice_from_order(&p, "M3").unwrap();
        assert!(matches!(DistLattice::new(Arc::new(m3)), Err(Error::Invalid(_))));
        let v = FinitePoset::new(&["a", "b", "c"], &[("a", "b"), ("a", "c")]).unwrap();
        assert!(lattice_from_order(&v, "V").is_err());
    }

    #[test]
    fn dual_examples() {
        let d = priestley_dual(&dl(two_element_lattice())).unwrap();
        assert_eq!(d.x().len(), 1);
        let d = priestley_dual(&b4()).unwrap();
        assert_eq!(d.x().len(), 2);
        assert!(d.x().covers().is_empty());
        for n in 2..=5 {
            let d = priestley_dual(&dl(chain_lattice(n))).unwrap();
            assert_eq!(d.x().len(), n - 1);
            assert!(d.x().is_chain(d.x().all()));
        }
    }

    #[test]
    fn chain3_correspondence() {
        let c3 = dl(chain_lattice(3));
        let d = priestley_dual(&c3).unwrap();
        // p0 = {0} (from m), p1 = {0,m} (from 1), p0 ⊂ p1
        assert_eq!(d.x().names(), &["p[m]", "p[1]"]);
        assert!(d.x().leq(0, 1));
        assert_eq!(d.ideal(0), vec![true, false, false]);
        assert_eq!(d.cong_from_closed(d.x().all()), Congruence::identity(3));
        assert_eq!(d.cong_from_closed(Subset::EMPTY), Congruence::total(3));
        let theta = d.cong_from_closed(Subset::singleton(0));
        assert_eq!(theta.blocks(), vec![vec![0], vec![1, 2]]);
        assert_eq!(d.closed_from_cong(&Congruence::identity(3)), d.x().all());
        assert_eq!(d.closed_from_cong(&Congruence::total(3)), Subset::EMPTY);
        assert_eq!(d.closed_from_cong(&theta), Subset::singleton(0));
        assert!(d.correspondence_check().unwrap());
    }

    #[test]
    fn interpolation_examples() {
        let x = FinitePoset::chain(2);
        let c = Subset::from_indices([0, 1]);
        assert!(interpolation_condition(&x, c, c).holds);
        assert!(interpolation_condition(&x, Subset::EMPTY, c).holds);
        let r = interpolation_condition(&x, Subset::singleton(1), Subset::singleton(0));
        assert!(!r.holds);
        assert_eq!(r.witness, Some((1, 0)));
    }

    #[test]
    fn decomposition_examples() {
        let x = Arc::new(FinitePoset::chain(2));
        let pt = Arc::new(FinitePoset::antichain(1));
        assert!(Decomposition::new(x.clone(), pt, vec![0, 0]).unwrap().is_interpolating().holds);
        assert!(Decomposition::new(x.clone(), x.clone(), vec![0, 1]).unwrap().is_interpolating().holds);
        let y = Arc::new(FinitePoset::antichain(2));
        let q = Decomposition::new(x, y, vec![0, 1]).unwrap();
        assert_eq!(q.is_interpolating().witness, Some((0, 1)));
    }

    #[test]
    fn psi_examples() {
        let c3 = dl(chain_lattice(3));
        let d = priestley_dual(&c3).unwrap();
        let pt = Arc::new(FinitePoset::antichain(1));
        let q = Decomposition::new(d.x().clone(), pt, vec![0, 0]).unwrap();
        let fh = psi_of_q(&d, &q).unwrap();
        assert_eq!(fh.assignment().stalk(0), &Congruence::identity(3));

        let lat = b4();
        let d = priestley_dual(&lat).unwrap();
        let y = Arc::new(FinitePoset::antichain(2));
        let q = Decomposition::new(d.x().clone(), y.clone(), vec![0, 1]).unwrap();
        let fh = psi_of_q(&d, &q).unwrap();
        let two = two_element_lattice();
        let (_, proj) = product(&Signature::bounded_lattice(), &[&two, &two]).unwrap();
        let k1 = lat.algebra().kernel(&two, &proj[0]).unwrap();
        let k2 = lat.algebra().kernel(&two, &proj[1]).unwrap();
        // p[(1,0)] is the ideal not containing (1,0): its stalk keeps the first coordinate
        assert_eq!(d.x().names(), &["p[(0,1)]", "p[(1,0)]"]);
        assert_eq!(fh.assignment().stalks(), &[k2, k1]);

        let sheaf = build_sheaf(fh.assignment()).unwrap();
        assert_eq!(q_of_sheaf(&d, &sheaf).unwrap(), q);

        // 3-chain with its dual 2-chain mapped injectively onto a 2-antichain
        let d = priestley_dual(&c3).unwrap();
        let q = Decomposition::new(d.x().clone(), y, vec![0, 1]).unwrap();
        assert!(matches!(psi_of_q(&d, &q), Err(Error::NotInterpolating(_))));
        let sa = psi_assignment(&d, &q).unwrap();
        assert!(validate_frame_hom(&sa).is_err());
        let c3a = c3.algebra();
        assert_eq!(sa.stalks(), &[principal_congruence(c3a, 1, 2), principal_congruence(c3a, 0, 1)]);
    }
}
