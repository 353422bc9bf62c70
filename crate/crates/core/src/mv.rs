//! Finite MV-algebras: Łukasiewicz chains and their products, prime
//! ideals, the spectrum, and the sheaf over it.

use std::sync::Arc;

use crate::dlat::{priestley_dual, psi_of_q, Decomposition, DistLattice, PriestleyDual};
use crate::error::{Error, Result};
use crate::poset::{FinitePoset, MonotoneMap};
use crate::sheafrep::{build_sheaf, direct_image, GlobalSectionsReport, SheafRep};
use crate::ualg::{generated_congruence, principal_congruence, product, Congruence, FiniteAlgebra, Signature, Symbol};

/// Largest carrier for brute-force ideal enumeration.
pub const MAX_IDEAL_SEARCH: usize = 20;

/// The signature `oplus/2`, `neg/1`, `zero/0`.
pub fn mv_signature() -> Signature {
    Signature::new(vec![Symbol::new("oplus", 2), Symbol::new("neg", 1), Symbol::new("zero", 0)])
        .expect("distinct symbols")
}

/// An MV-algebra with its derived operations tabulated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MVAlgebra {
    alg: Arc<FiniteAlgebra>,
    oplus: usize,
    neg: usize,
    zero: usize,
    one: usize,
    ominus: Vec<usize>,
    meet: Vec<usize>,
    join: Vec<usize>,
}

impl MVAlgebra {
    /// Validates the MV axioms exhaustively and tabulates `⊖`, `∧`, `∨`.
    pub fn new(alg: FiniteAlgebra) -> Result<Self> {
        let oplus = alg.op_index("oplus")?;
        let neg = alg.op_index("neg")?;
        let zero_op = alg.op_index("zero")?;
        let sig = alg.signature().symbols();
        if sig.len() != 3 || sig[oplus].arity != 2 || sig[neg].arity != 1 || sig[zero_op].arity != 0 {
            return Err(Error::SignatureMismatch("expected oplus/2, neg/1, zero/0".into()));
        }
        let n = alg.size();
        let zero = alg.apply(zero_op, &[]);
        let add = |a: usize, b: usize| alg.apply2(oplus, a, b);
        let not = |a: usize| alg.apply(neg, &[a]);
        let one = not(zero);
        let name = |xs: &[usize]| xs.iter().map(|&x| alg.element(x)).collect::<Vec<_>>().join(",");
        for x in 0..n {
            if add(x, zero) != x {
                return Err(Error::Invalid(format!("x + 0 = x fails at ({})", name(&[x]))));
            }
            if not(not(x)) != x {
                return Err(Error::Invalid(format!("double negation fails at ({})", name(&[x]))));
            }
            if add(x, one) != one {
                return Err(Error::Invalid(format!("x + 1 = 1 fails at ({})", name(&[x]))));
            }
            for y in 0..n {
                if add(x, y) != add(y, x) {
                    return Err(Error::Invalid(format!("commutativity fails at ({})", name(&[x, y]))));
                }
                if add(not(add(not(x), y)), y) != add(not(add(not(y), x)), x) {
                    return Err(Error::Invalid(format!("Łukasiewicz axiom fails at ({})", name(&[x, y]))));
                }
                for z in 0..n {
                    if add(x, add(y, z)) != add(add(x, y), z) {
                        return Err(Error::Invalid(format!("associativity fails at ({})", name(&[x, y, z]))));
                    }
                }
            }
        }
        let mut ominus = vec![0; n * n];
        let mut meet = vec![0; n * n];
        let mut join = vec![0; n * n];
        for x in 0..n {
            for y in 0..n {
                ominus[x * n + y] = not(add(not(x), y));
            }
        }
        for x in 0..n {
            for y in 0..n {
                join[x * n + y] = add(ominus[x * n + y], y);
            }
        }
        for x in 0..n {
            for y in 0..n {
                meet[x * n + y] = not(join[not(x) * n + not(y)]);
            }
        }
        Ok(MVAlgebra {
            alg: Arc::new(alg),
            oplus,
            neg,
            zero,
            one,
            ominus,
            meet,
            join,
        })
    }

    pub fn algebra(&self) -> &Arc<FiniteAlgebra> {
        &self.alg
    }

    pub fn size(&self) -> usize {
        self.alg.size()
    }

    pub fn name(&self) -> &str {
        self.alg.name()
    }

    #[inline]
    pub fn oplus(&self, a: usize, b: usize) -> usize {
        self.alg.apply2(self.oplus, a, b)
    }

    #[inline]
    pub fn neg(&self, a: usize) -> usize {
        self.alg.apply(self.neg, &[a])
    }

    #[inline]
    pub fn ominus(&self, a: usize, b: usize) -> usize {
        self.ominus[a * self.size() + b]
    }

    #[inline]
    pub fn meet(&self, a: usize, b: usize) -> usize {
        self.meet[a * self.size() + b]
    }

    #[inline]
    pub fn join(&self, a: usize, b: usize) -> usize {
        self.join[a * self.size() + b]
    }

    pub fn zero(&self) -> usize {
        self.zero
    }

    pub fn one(&self) -> usize {
        self.one
    }

    #[inline]
    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.meet(a, b) == a
    }

    /// `(a ⊖ b) ⊕ (b ⊖ a)`.
    pub fn distance(&self, a: usize, b: usize) -> usize {
        self.oplus(self.ominus(a, b), self.ominus(b, a))
    }

    /// The bounded-lattice reduct `(A, ∧, ∨, 0, 1)`.
    pub fn lattice_reduct(&self) -> DistLattice {
        let alg = FiniteAlgebra::from_fn(
            format!("{}-lattice", self.name()),
            self.alg.carrier().to_vec(),
            Signature::bounded_lattice(),
            |op, a| match op {
                0 => self.meet(a[0], a[1]),
                1 => self.join(a[0], a[1]),
                2 => self.zero,
                _ => self.one,
            },
        )
        .expect("reduct tables are total");
        DistLattice::new(Arc::new(alg)).expect("MV-algebras have distributive lattice reducts")
    }

    /// Contains 0, is down-closed and closed under `⊕`.
    pub fn is_ideal(&self, members: &[bool]) -> bool {
        let n = self.size();
        if members.len() != n || !members[self.zero] {
            return false;
        }
        (0..n).filter(|&a| members[a]).all(|a| {
            (0..n).all(|b| (!self.leq(b, a) || members[b]) && (!members[b] || members[self.oplus(a, b)]))
        })
    }

    /// A proper ideal with `a ∧ b ∈ I ⇒ a ∈ I or b ∈ I`.
    pub fn is_prime_ideal(&self, members: &[bool]) -> bool {
        let n = self.size();
        self.is_ideal(members)
            && !members[self.one]
            && (0..n).all(|a| (0..n).all(|b| !members[self.meet(a, b)] || members[a] || members[b]))
    }

    /// `θ_I`: `a ~ b` iff `(a ⊖ b) ⊕ (b ⊖ a) ∈ I`.
    pub fn ideal_congruence(&self, members: &[bool]) -> Congruence {
        let n = self.size();
        let mut labels = vec![usize::MAX; n];
        for a in 0..n {
            if labels[a] == usize::MAX {
                for b in a..n {
                    if labels[b] == usize::MAX && members[self.distance(a, b)] {
                        labels[b] = a;
                    }
                }
            }
        }
        Congruence::from_labels(&labels)
    }

    /// `A → A/I` computed algebraically, as the congruence generated by
    /// `{(0, a) | a ∈ I}`.
    pub fn quotient_kernel(&self, members: &[bool]) -> Congruence {
        let pairs: Vec<(usize, usize)> = (0..self.size())
            .filter(|&a| members[a])
            .map(|a| (self.zero, a))
            .collect();
        generated_congruence(&self.alg, &pairs)
    }

    pub fn fmt_members(&self, members: &[bool]) -> String {
        let names: Vec<&str> = (0..self.size())
            .filter(|&a| members[a])
            .map(|a| self.alg.element(a))
            .collect();
        format!("{{{}}}", names.join(","))
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn fraction(i: usize, n: usize) -> String {
    match i {
        0 => "0".into(),
        i if i == n => "1".into(),
        i => {
            let g = gcd(i, n);
            format!("{}/{}", i / g, n / g)
        }
    }
}

/// The Łukasiewicz chain `{0, 1/n, .., 1}`.
pub fn luk_chain(n: usize) -> Result<MVAlgebra> {
    if n == 0 {
        return Err(Error::InvalidSize("a Łukasiewicz chain needs n >= 1".into()));
    }
    let carrier = (0..=n).map(|i| fraction(i, n)).collect();
    let alg = FiniteAlgebra::from_fn(format!("L{n}"), carrier, mv_signature(), |op, a| match op {
        0 => (a[0] + a[1]).min(n),
        1 => n - a[0],
        _ => 0,
    })?;
    MVAlgebra::new(alg)
}

/// Direct product of MV-algebras, revalidated.
pub fn mv_product(factors: &[&MVAlgebra]) -> Result<MVAlgebra> {
    let algs: Vec<&FiniteAlgebra> = factors.iter().map(|f| f.algebra().as_ref()).collect();
    let (alg, _) = product(&mv_signature(), &algs)?;
    MVAlgebra::new(alg)
}

/// Product of Łukasiewicz chains `L_{n1} × .. × L_{nk}`.
pub fn luk_product(ns: &[usize]) -> Result<MVAlgebra> {
    let chains = ns.iter().map(|&n| luk_chain(n)).collect::<Result<Vec<_>>>()?;
    mv_product(&chains.iter().collect::<Vec<_>>())
}

/// Prime ideals ordered by inclusion, the root-system flag and the map to
/// maximal points.
#[derive(Clone, Debug)]
pub struct MVSpectrum {
    pub y: Arc<FinitePoset>,
    pub ideals: Vec<Vec<bool>>,
    pub is_root_system: bool,
    /// Maximal spectrum with the trivial order.
    pub z: Arc<FinitePoset>,
    pub m: MonotoneMap,
}

impl MVSpectrum {
    pub fn position(&self, members: &[bool]) -> Option<usize> {
        self.ideals.iter().position(|i| i == members)
    }
}

/// All prime ideals by filtering every subset of the carrier.
pub fn prime_ideals(a: &MVAlgebra) -> Result<Vec<Vec<bool>>> {
    let n = a.size();
    if n > MAX_IDEAL_SEARCH {
        return Err(Error::SizeGuard(format!(
            "ideal search over {n} elements exceeds {MAX_IDEAL_SEARCH}"
        )));
    }
    let mut out: Vec<Vec<bool>> = (0u64..1 << n)
        .map(|mask| (0..n).map(|i| mask >> i & 1 == 1).collect::<Vec<bool>>())
        .filter(|m| a.is_prime_ideal(m))
        .collect();
    out.sort_by_key(|m| (m.iter().filter(|&&b| b).count(), m.iter().map(|&b| !b).collect::<Vec<_>>()));
    Ok(out)
}

pub fn mv_spectrum(a: &MVAlgebra) -> Result<MVSpectrum> {
    let ideals = prime_ideals(a)?;
    let names: Vec<String> = ideals.iter().map(|m| a.fmt_members(m)).collect();
    let subset = |i: &[bool], j: &[bool]| i.iter().zip(j).all(|(&x, &y)| !x || y);
    let mut pairs = Vec::new();
    for (i, p) in ideals.iter().enumerate() {
        for (j, q) in ideals.iter().enumerate() {
            if i != j && subset(p, q) {
                pairs.push((i, j));
            }
        }
    }
    let y = Arc::new(FinitePoset::from_index_pairs(names, &pairs)?);
    let is_root_system = (0..y.len()).all(|p| y.is_chain(y.up_of(p)));
    let maximal: Vec<usize> = y.maximal_in(y.all()).iter().collect();
    let z = Arc::new(FinitePoset::antichain_named(
        maximal.iter().map(|&p| y.name(p).to_string()).collect(),
    )?);
    let mut mapping = Vec::with_capacity(y.len());
    for p in 0..y.len() {
        let above: Vec<usize> = maximal.iter().copied().filter(|&t| y.leq(p, t)).collect();
        if above.len() != 1 {
            return Err(Error::InternalInvariant(format!(
                "prime ideal {} lies below {} maximal ideals",
                y.name(p),
                above.len()
            )));
        }
        mapping.push(maximal.iter().position(|&t| t == above[0]).expect("maximal"));
    }
    let m = MonotoneMap::new(y.clone(), z.clone(), mapping)?;
    Ok(MVSpectrum {
        y,
        ideals,
        is_root_system,
        z,
        m,
    })
}

/// Checks on `λ: a ↦ θ(0, a)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LambdaReport {
    pub zero_is_identity: bool,
    pub preserves_meet: bool,
    pub preserves_join: bool,
    /// Every congruence is some `θ(0, a)`.
    pub surjective: bool,
    pub witness: Option<String>,
}

impl LambdaReport {
    pub fn ok(&self) -> bool {
        self.zero_is_identity && self.preserves_meet && self.preserves_join && self.surjective
    }
}

pub fn lambda_check(a: &MVAlgebra) -> Result<LambdaReport> {
    let n = a.size();
    let alg = a.algebra();
    let lambda: Vec<Congruence> = (0..n).map(|x| principal_congruence(alg, a.zero(), x)).collect();
    let mut witness = None;
    let mut preserves_meet = true;
    let mut preserves_join = true;
    for x in 0..n {
        for y in 0..n {
            if lambda[a.meet(x, y)] != lambda[x].meet(&lambda[y]) {
                preserves_meet = false;
                witness.get_or_insert_with(|| format!("meet at ({},{})", alg.element(x), alg.element(y)));
            }
            if lambda[a.join(x, y)] != lambda[x].join(&lambda[y]) {
                preserves_join = false;
                witness.get_or_insert_with(|| format!("join at ({},{})", alg.element(x), alg.element(y)));
            }
        }
    }
    let con = crate::ualg::congruence_lattice(alg)?;
    let surjective = con.members().iter().all(|c| lambda.contains(c));
    if !surjective {
        witness.get_or_insert_with(|| "some congruence is not of the form θ(0,a)".into());
    }
    Ok(LambdaReport {
        zero_is_identity: lambda[a.zero()].is_identity(),
        preserves_meet,
        preserves_join,
        surjective,
        witness,
    })
}

/// `k: X → Y` from lattice prime ideals to prime MV-ideals.
#[derive(Clone, Debug)]
pub struct KMap {
    pub dual: PriestleyDual,
    pub spectrum: MVSpectrum,
    pub decomposition: Decomposition,
}

/// `k(q) = { a | ∀ c ∈ q. a ⊕ c ∈ q }`, checked to be a prime MV-ideal and
/// to interpolate.
pub fn k_map(a: &MVAlgebra) -> Result<KMap> {
    let dual = priestley_dual(&a.lattice_reduct())?;
    let spectrum = mv_spectrum(a)?;
    let n = a.size();
    let mut map = Vec::with_capacity(dual.x().len());
    for p in 0..dual.x().len() {
        let q = dual.ideal(p);
        let k: Vec<bool> = (0..n)
            .map(|x| (0..n).filter(|&c| q[c]).all(|c| q[a.oplus(x, c)]))
            .collect();
        let target = spectrum.position(&k).ok_or_else(|| {
            Error::InternalInvariant(format!(
                "k({}) = {} is not a prime MV-ideal",
                dual.x().name(p),
                a.fmt_members(&k)
            ))
        })?;
        map.push(target);
    }
    let decomposition = Decomposition::new(dual.x().clone(), spectrum.y.clone(), map)?;
    if let Some((x1, x2)) = decomposition.is_interpolating().witness {
        return Err(Error::InternalInvariant(format!(
            "k does not interpolate between {} and {}",
            dual.x().name(x1),
            dual.x().name(x2)
        )));
    }
    Ok(KMap {
        dual,
        spectrum,
        decomposition,
    })
}

/// The sheaf over the spectrum and its direct image over the maximal
/// spectrum, with their global-section reports.
#[derive(Clone, Debug)]
pub struct MVSheaf {
    pub k: KMap,
    pub sheaf: SheafRep,
    pub sheaf_sections: GlobalSectionsReport,
    pub maximal: SheafRep,
    pub maximal_sections: GlobalSectionsReport,
    pub maximal_soft: bool,
}

pub fn mv_sheaf(a: &MVAlgebra) -> Result<MVSheaf> {
    let k = k_map(a)?;
    let fh = psi_of_q(&k.dual, &k.decomposition)?;
    let sa = fh.assignment();
    for (p, ideal) in k.spectrum.ideals.iter().enumerate() {
        let by_distance = a.ideal_congruence(ideal);
        if by_distance != a.quotient_kernel(ideal) {
            return Err(Error::InternalInvariant(format!(
                "ideal congruence of {} differs from the quotient kernel",
                k.spectrum.y.name(p)
            )));
        }
        if by_distance != *sa.stalk(p) {
            return Err(Error::InternalInvariant(format!(
                "stalk at {} is not the ideal congruence",
                k.spectrum.y.name(p)
            )));
        }
    }
    let sheaf = build_sheaf(sa)?;
    let soft = sheaf.is_soft().soft;
    let sheaf_sections = sheaf.global_sections_check()?;
    if !soft || !sheaf_sections.ok() {
        return Err(Error::InternalInvariant("sheaf over the spectrum is not a soft representation".into()));
    }
    let maximal = direct_image(&sheaf, &k.spectrum.m)?;
    let maximal_soft = maximal.is_soft().soft;
    let maximal_sections = maximal.global_sections_check()?;
    Ok(MVSheaf {
        k,
        sheaf,
        sheaf_sections,
        maximal,
        maximal_sections,
        maximal_soft,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ualg::two_element_lattice;

    #[test]
    fn chains() {
        assert!(matches!(luk_chain(0), Err(Error::InvalidSize(_))));
        let l1 = luk_chain(1).unwrap();
        assert_eq!(l1.algebra().carrier(), &["0", "1"]);
        let l2 = luk_chain(2).unwrap();
        assert_eq!(l2.algebra().carrier(), &["0", "1/2", "1"]);
        assert_eq!(l2.oplus(1, 1), 2);
        assert_eq!(l2.ominus(2, 1), 1);
        assert_eq!(luk_chain(4).unwrap().algebra().carrier()[2], "1/2");
        let p = luk_product(&[1, 2]).unwrap();
        assert_eq!(p.size(), 6);
        assert!(MVAlgebra::new(two_element_lattice()).is_err());
    }

    #[test]
    fn rejects_bad_tables() {
        let l2 = luk_chain(2).unwrap();
        let mut tables: Vec<Vec<usize>> = (0..3).map(|op| l2.algebra().table(op).to_vec()).collect();
        tables[0][4] = 1; // 1/2 + 1/2 = 1/2
        let bad = FiniteAlgebra::from_tables("bad", l2.algebra().carrier().to_vec(), mv_signature(), tables).unwrap();
        assert!(matches!(MVAlgebra::new(bad), Err(Error::Invalid(_))));
    }

    #[test]
    fn spectra() {
        for n in 1..=5 {
            let s = mv_spectrum(&luk_chain(n).unwrap()).unwrap();
            assert_eq!(s.y.len(), 1);
            assert_eq!(s.y.name(0), "{0}");
            assert!(s.is_root_system);
        }
        let s = mv_spectrum(&luk_product(&[1, 2]).unwrap()).unwrap();
        assert_eq!(s.y.len(), 2);
        assert!(s.y.covers().is_empty());
        assert_eq!(s.m.mapping(), &[0, 1]);
    }

    #[test]
    fn lambda() {
        let l2 = luk_chain(2).unwrap();
        let r = lambda_check(&l2).unwrap();
        assert!(r.ok());
        assert!(principal_congruence(l2.algebra(), 0, 1).is_total());
        assert!(principal_congruence(l2.algebra(), 0, 2).is_total());
        assert!(lambda_check(&luk_product(&[1, 2]).unwrap()).unwrap().ok());
    }

    #[test]
    fn k_examples() {
        let k = k_map(&luk_chain(1).unwrap()).unwrap();
        assert_eq!(k.decomposition.map(), &[0]);
        let k = k_map(&luk_chain(2).unwrap()).unwrap();
        assert_eq!(k.dual.x().len(), 2);
        assert_eq!(k.decomposition.map(), &[0, 0]);
        let k = k_map(&luk_product(&[1, 2]).unwrap()).unwrap();
        assert_eq!(k.dual.x().len(), 3);
        let mut image = k.decomposition.map().to_vec();
        image.sort();
        image.dedup();
        assert_eq!(image, vec![0, 1]);
    }

    #[test]
    fn sheaves() {
        let s = mv_sheaf(&luk_chain(3).unwrap()).unwrap();
        assert_eq!(s.sheaf.stalk_algebra(0).size(), 4);
        let a = luk_product(&[1, 2]).unwrap();
        let s = mv_sheaf(&a).unwrap();
        let mut sizes: Vec<usize> = (0..2).map(|y| s.sheaf.stalk_algebra(y).size()).collect();
        sizes.sort();
        assert_eq!(sizes, vec![2, 3]);
        assert_eq!(s.sheaf_sections.global_sections, 6);
        assert!(s.maximal_soft && s.maximal_sections.ok());
        assert_eq!(s.maximal.assignment().stalks(), s.sheaf.assignment().stalks());
    }
}
