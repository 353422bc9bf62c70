//! Finite posets as compact ordered spaces.
//!
//! A finite poset `Y` carries two stably compact topologies: the up-set
//! topology `Y↑` and the down-set topology `Y↓`. On a finite poset the
//! compact-saturated sets of `Y↑` are exactly the up-sets, which are also
//! the closed sets of `Y↓`; complementation toggles between up-sets and
//! down-sets. The patch topology is discrete, so every map is continuous
//! and the way-below relation between up-sets collapses to inclusion.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::subset::{Subset, MAX_ELEMS};

/// Which family of sets to work with.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SetKind {
    /// Up-sets: opens (= compact-saturated sets) of `Y↑`.
    Up,
    /// Down-sets: opens of `Y↓`.
    Down,
}

/// A finite partially ordered set with its order relation stored as a full
/// matrix (one bitset row per element).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FinitePoset {
    names: Vec<String>,
    /// `up[i]` = `{ j | i <= j }`.
    up: Vec<Subset>,
    /// `down[i]` = `{ j | j <= i }`.
    down: Vec<Subset>,
}

impl fmt::Debug for FinitePoset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let covers: Vec<_> = self
            .covers()
            .into_iter()
            .map(|(a, b)| format!("{}<{}", self.names[a], self.names[b]))
            .collect();
        f.debug_struct("FinitePoset")
            .field("elements", &self.names)
            .field("covers", &covers)
            .finish()
    }
}

impl FinitePoset {
    /// Builds the poset whose order is the reflexive-transitive closure of
    /// `relation` (pairs `(x, y)` meaning `x <= y`).
    pub fn new<S: AsRef<str>>(elements: &[S], relation: &[(S, S)]) -> Result<Self> {
        let names: Vec<String> = elements.iter().map(|s| s.as_ref().to_string()).collect();
        let index = index_names(&names)?;
        let mut pairs = Vec::with_capacity(relation.len());
        for (a, b) in relation {
            let ia = *index
                .get(a.as_ref())
                .ok_or_else(|| Error::UnknownElement(a.as_ref().to_string()))?;
            let ib = *index
                .get(b.as_ref())
                .ok_or_else(|| Error::UnknownElement(b.as_ref().to_string()))?;
            pairs.push((ia, ib));
        }
        Self::from_index_pairs(names, &pairs)
    }

    /// Like [`FinitePoset::new`] but with the relation given on indices.
    pub fn from_index_pairs(names: Vec<String>, pairs: &[(usize, usize)]) -> Result<Self> {
        let n = names.len();
        if n > MAX_ELEMS {
            return Err(Error::SizeGuard(format!(
                "posets are limited to {MAX_ELEMS} elements, got {n}"
            )));
        }
        index_names(&names)?;
        let mut up: Vec<Subset> = (0..n).map(Subset::singleton).collect();
        for &(a, b) in pairs {
            if a >= n || b >= n {
                return Err(Error::UnknownElement(format!("index {}", a.max(b))));
            }
            up[a] = up[a].with(b);
        }
        // Warshall on bit rows.
        for k in 0..n {
            for i in 0..n {
                if up[i].contains(k) {
                    up[i] = up[i].union(up[k]);
                }
            }
        }
        for i in 0..n {
            for j in up[i].iter() {
                if j != i && up[j].contains(i) {
                    return Err(Error::Cycle(names[i].clone(), names[j].clone()));
                }
            }
        }
        let mut down = vec![Subset::EMPTY; n];
        for i in 0..n {
            for j in up[i].iter() {
                down[j] = down[j].with(i);
            }
        }
        Ok(FinitePoset { names, up, down })
    }

    /// Discrete (trivially ordered) poset on the given names.
    pub fn antichain_named(names: Vec<String>) -> Result<Self> {
        Self::from_index_pairs(names, &[])
    }

    /// Antichain `y0, .., y{n-1}`.
    pub fn antichain(n: usize) -> Self {
        Self::antichain_named((0..n).map(|i| format!("y{i}")).collect()).expect("valid antichain")
    }

    /// Chain `y0 < y1 < .. < y{n-1}`.
    pub fn chain(n: usize) -> Self {
        let pairs: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Self::from_index_pairs((0..n).map(|i| format!("y{i}")).collect(), &pairs)
            .expect("valid chain")
    }

    pub fn into_arc(self) -> Arc<Self> {
        Arc::new(self)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::UnknownElement(name.to_string()))
    }

    /// All elements as a set.
    pub fn all(&self) -> Subset {
        Subset::full(self.len())
    }

    #[inline]
    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.up[a].contains(b)
    }

    #[inline]
    pub fn lt(&self, a: usize, b: usize) -> bool {
        a != b && self.leq(a, b)
    }

    pub fn comparable(&self, a: usize, b: usize) -> bool {
        self.leq(a, b) || self.leq(b, a)
    }

    /// Principal up-set `↑a`.
    #[inline]
    pub fn up_of(&self, a: usize) -> Subset {
        self.up[a]
    }

    /// Principal down-set `↓a`.
    #[inline]
    pub fn down_of(&self, a: usize) -> Subset {
        self.down[a]
    }

    pub fn is_up_set(&self, s: Subset) -> bool {
        s.iter().all(|i| self.up[i].is_subset(s))
    }

    pub fn is_down_set(&self, s: Subset) -> bool {
        s.iter().all(|i| self.down[i].is_subset(s))
    }

    pub fn is_kind(&self, s: Subset, kind: SetKind) -> bool {
        match kind {
            SetKind::Up => self.is_up_set(s),
            SetKind::Down => self.is_down_set(s),
        }
    }

    /// Smallest up-set (down-set) containing `s`.
    pub fn closure(&self, s: Subset, kind: SetKind) -> Subset {
        let rows = match kind {
            SetKind::Up => &self.up,
            SetKind::Down => &self.down,
        };
        s.iter().fold(Subset::EMPTY, |acc, i| acc.union(rows[i]))
    }

    /// [`FinitePoset::closure`] on element names.
    pub fn closure_named<S: AsRef<str>>(&self, names: &[S], kind: SetKind) -> Result<Subset> {
        Ok(self.closure(self.subset_of(names)?, kind))
    }

    pub fn subset_of<S: AsRef<str>>(&self, names: &[S]) -> Result<Subset> {
        names
            .iter()
            .map(|n| self.index_of(n.as_ref()))
            .collect::<Result<Vec<_>>>()
            .map(Subset::from_indices)
    }

    pub fn minimal_in(&self, s: Subset) -> Subset {
        s.iter()
            .filter(|&i| self.down[i].intersection(s) == Subset::singleton(i))
            .collect()
    }

    pub fn maximal_in(&self, s: Subset) -> Subset {
        s.iter()
            .filter(|&i| self.up[i].intersection(s) == Subset::singleton(i))
            .collect()
    }

    pub fn is_chain(&self, s: Subset) -> bool {
        s.iter()
            .all(|a| s.iter().all(|b| self.comparable(a, b)))
    }

    /// Covering pairs `(x, y)` with `x < y` and nothing strictly between.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        let mut out = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if self.lt(a, b) {
                    let between = self.up[a]
                        .intersection(self.down[b])
                        .without(a)
                        .without(b);
                    if between.is_empty() {
                        out.push((a, b));
                    }
                }
            }
        }
        out
    }

    /// Elements sorted so that `a < b` implies `a` comes first; ties keep
    /// input order.
    pub fn linear_extension(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by_key(|&i| self.down[i].len());
        order
    }

    /// Every up-set (or down-set), in canonical order (size, then members).
    /// The number of results equals the number of antichains.
    pub fn enumerate_sets(&self, kind: SetKind) -> Vec<Subset> {
        let mut order = self.linear_extension();
        // For up-sets decide maximal elements first, so that everything
        // above the current element is already decided.
        if kind == SetKind::Up {
            order.reverse();
        }
        let strict: Vec<Subset> = match kind {
            SetKind::Up => self.up.iter().enumerate().map(|(i, s)| s.without(i)).collect(),
            SetKind::Down => self.down.iter().enumerate().map(|(i, s)| s.without(i)).collect(),
        };
        let mut out = Vec::new();
        fn rec(k: usize, cur: Subset, order: &[usize], strict: &[Subset], out: &mut Vec<Subset>) {
            if k == order.len() {
                out.push(cur);
                return;
            }
            let x = order[k];
            rec(k + 1, cur, order, strict, out);
            if strict[x].is_subset(cur) {
                rec(k + 1, cur.with(x), order, strict, out);
            }
        }
        rec(0, Subset::EMPTY, &order, &strict, &mut out);
        out.sort_by(Subset::canonical_cmp);
        out
    }

    pub fn up_sets(&self) -> Vec<Subset> {
        self.enumerate_sets(SetKind::Up)
    }

    pub fn down_sets(&self) -> Vec<Subset> {
        self.enumerate_sets(SetKind::Down)
    }

    /// The same elements with the order reversed.
    pub fn opposite(&self) -> Self {
        FinitePoset {
            names: self.names.clone(),
            up: self.down.clone(),
            down: self.up.clone(),
        }
    }

    /// Renders a subset as `{a,b}` using element names.
    pub fn fmt_subset(&self, s: Subset) -> String {
        let parts: Vec<&str> = s.iter().map(|i| self.names[i].as_str()).collect();
        format!("{{{}}}", parts.join(","))
    }

    /// Order-isomorphism test by brute force over bijections; intended for
    /// small posets only.
    pub fn is_isomorphic(&self, other: &Self) -> bool {
        let n = self.len();
        if n != other.len() {
            return false;
        }
        let mut sig_a: Vec<_> = (0..n).map(|i| (self.up[i].len(), self.down[i].len())).collect();
        let mut sig_b: Vec<_> = (0..n).map(|i| (other.up[i].len(), other.down[i].len())).collect();
        sig_a.sort();
        sig_b.sort();
        if sig_a != sig_b {
            return false;
        }
        let mut perm = vec![usize::MAX; n];
        let mut used = vec![false; n];
        fn rec(
            k: usize,
            a: &FinitePoset,
            b: &FinitePoset,
            perm: &mut Vec<usize>,
            used: &mut Vec<bool>,
        ) -> bool {
            if k == a.len() {
                return true;
            }
            for t in 0..b.len() {
                if used[t] {
                    continue;
                }
                let ok = (0..k).all(|j| {
                    a.leq(j, k) == b.leq(perm[j], t) && a.leq(k, j) == b.leq(t, perm[j])
                });
                if ok {
                    perm[k] = t;
                    used[t] = true;
                    if rec(k + 1, a, b, perm, used) {
                        return true;
                    }
                    used[t] = false;
                }
            }
            false
        }
        rec(0, self, other, &mut perm, &mut used)
    }
}

fn index_names(names: &[String]) -> Result<HashMap<&str, usize>> {
    let mut index = HashMap::with_capacity(names.len());
    for (i, n) in names.iter().enumerate() {
        if index.insert(n.as_str(), i).is_some() {
            return Err(Error::DuplicateElement(n.clone()));
        }
    }
    Ok(index)
}

/// An order-preserving map between finite posets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonotoneMap {
    source: Arc<FinitePoset>,
    target: Arc<FinitePoset>,
    mapping: Vec<usize>,
}

impl MonotoneMap {
    pub fn new(
        source: Arc<FinitePoset>,
        target: Arc<FinitePoset>,
        mapping: Vec<usize>,
    ) -> Result<Self> {
        if mapping.len() != source.len() {
            return Err(Error::NotMonotone(format!(
                "map has {} values for {} source elements",
                mapping.len(),
                source.len()
            )));
        }
        if let Some(&bad) = mapping.iter().find(|&&m| m >= target.len()) {
            return Err(Error::UnknownElement(format!("target index {bad}")));
        }
        for a in 0..source.len() {
            for b in source.up_of(a).iter() {
                if !target.leq(mapping[a], mapping[b]) {
                    return Err(Error::NotMonotone(format!(
                        "{} <= {} but {} is not <= {}",
                        source.name(a),
                        source.name(b),
                        target.name(mapping[a]),
                        target.name(mapping[b])
                    )));
                }
            }
        }
        Ok(MonotoneMap {
            source,
            target,
            mapping,
        })
    }

    pub fn identity(p: Arc<FinitePoset>) -> Self {
        let mapping = (0..p.len()).collect();
        MonotoneMap {
            source: p.clone(),
            target: p,
            mapping,
        }
    }

    /// The unique map to a one-point poset.
    pub fn collapse(p: Arc<FinitePoset>) -> Self {
        let point = Arc::new(FinitePoset::antichain_named(vec!["*".to_string()]).unwrap());
        let mapping = vec![0; p.len()];
        MonotoneMap {
            source: p,
            target: point,
            mapping,
        }
    }

    pub fn source(&self) -> &Arc<FinitePoset> {
        &self.source
    }

    pub fn target(&self) -> &Arc<FinitePoset> {
        &self.target
    }

    pub fn mapping(&self) -> &[usize] {
        &self.mapping
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.mapping[x]
    }

    pub fn preimage(&self, s: Subset) -> Subset {
        (0..self.source.len())
            .filter(|&x| s.contains(self.mapping[x]))
            .collect()
    }

    pub fn image(&self, s: Subset) -> Subset {
        s.iter().map(|x| self.mapping[x]).collect()
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &MonotoneMap) -> Result<MonotoneMap> {
        if **next.source() != *self.target {
            return Err(Error::NotMonotone("composed maps do not share a poset".into()));
        }
        Ok(MonotoneMap {
            source: self.source.clone(),
            target: next.target.clone(),
            mapping: self.mapping.iter().map(|&y| next.mapping[y]).collect(),
        })
    }
}

/// Witnessed outcome of the finite Hofmann–Mislove correspondence check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HofmannMisloveReport {
    pub holds: bool,
    pub up_sets: usize,
    pub filters: usize,
    /// `(K, F_K)` pairs, with `F_K` given as a set of indices into the
    /// canonical up-set list.
    pub bijection: Vec<(Subset, Subset)>,
    pub counterexample: Option<String>,
}

/// Checks that `K ↦ F_K = { U up-set | K ⊆ U }` is an order-embedding of
/// the up-sets (reverse inclusion) into the filters of the up-set lattice,
/// and that every filter of that lattice arises this way.
///
/// Filters are enumerated independently as the nonempty, meet-closed
/// up-sets of the up-set lattice viewed as a poset.
pub fn hofmann_mislove_check(p: &FinitePoset) -> Result<HofmannMisloveReport> {
    let opens = p.up_sets();
    let m = opens.len();
    if m > MAX_ELEMS {
        return Err(Error::SizeGuard(format!(
            "the up-set lattice has {m} members; at most {MAX_ELEMS} supported"
        )));
    }
    let mut pairs = Vec::new();
    for (i, &a) in opens.iter().enumerate() {
        for (j, &b) in opens.iter().enumerate() {
            if i != j && a.is_subset(b) {
                pairs.push((i, j));
            }
        }
    }
    let lattice = FinitePoset::from_index_pairs((0..m).map(|i| i.to_string()).collect(), &pairs)?;
    let index: HashMap<Subset, usize> = opens.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    let filters: Vec<Subset> = lattice
        .up_sets()
        .into_iter()
        .filter(|f| {
            !f.is_empty()
                && f.iter().all(|i| {
                    f.iter()
                        .all(|j| f.contains(index[&opens[i].intersection(opens[j])]))
                })
        })
        .collect();

    let principal = |k: Subset| -> Subset {
        opens
            .iter()
            .enumerate()
            .filter(|(_, u)| k.is_subset(**u))
            .map(|(i, _)| i)
            .collect()
    };
    let mut bijection = Vec::with_capacity(m);
    let mut counterexample = None;
    for &k in &opens {
        let fk = principal(k);
        if !filters.contains(&fk) {
            counterexample.get_or_insert(format!("F_K for K = {} is not a filter", p.fmt_subset(k)));
        }
        bijection.push((k, fk));
    }
    'embed: for &(k1, f1) in &bijection {
        for &(k2, f2) in &bijection {
            if k1.is_subset(k2) != f2.is_subset(f1) {
                counterexample = Some(format!(
                    "order not reflected between {} and {}",
                    p.fmt_subset(k1),
                    p.fmt_subset(k2)
                ));
                break 'embed;
            }
        }
    }
    if counterexample.is_none() {
        if let Some(f) = filters.iter().find(|f| !bijection.iter().any(|(_, fk)| fk == *f)) {
            counterexample = Some(format!("filter {f:?} is not of the form F_K"));
        }
    }
    Ok(HofmannMisloveReport {
        holds: counterexample.is_none() && filters.len() == m,
        up_sets: m,
        filters: filters.len(),
        bijection,
        counterexample,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain2() -> FinitePoset {
        FinitePoset::new(&["a", "b"], &[("a", "b")]).unwrap()
    }

    fn vee() -> FinitePoset {
        FinitePoset::new(&["b", "l", "r"], &[("b", "l"), ("b", "r")]).unwrap()
    }

    #[test]
    fn make_poset_examples() {
        let one = FinitePoset::new::<&str>(&["a"], &[]).unwrap();
        assert_eq!(one.len(), 1);
        let c = chain2();
        assert!(c.leq(0, 1) && !c.leq(1, 0));
        assert!(matches!(
            FinitePoset::new(&["a", "b"], &[("a", "b"), ("b", "a")]),
            Err(Error::Cycle(..))
        ));
        assert!(matches!(
            FinitePoset::new::<&str>(&["a", "a"], &[]),
            Err(Error::DuplicateElement(_))
        ));
        assert!(matches!(
            FinitePoset::new(&["a"], &[("a", "z")]),
            Err(Error::UnknownElement(_))
        ));
    }

    #[test]
    fn transitive_closure() {
        let p = FinitePoset::new(&["a", "b", "c"], &[("a", "b"), ("b", "c")]).unwrap();
        assert!(p.leq(0, 2));
        assert_eq!(p.covers(), vec![(0, 1), (1, 2)]);
    }

    #[test]
    fn enumerate_examples() {
        let one = FinitePoset::antichain(1);
        assert_eq!(one.up_sets(), vec![Subset::EMPTY, Subset::from_indices([0])]);
        assert_eq!(
            chain2().up_sets(),
            vec![Subset::EMPTY, Subset::from_indices([1]), Subset::from_indices([0, 1])]
        );
        assert_eq!(FinitePoset::antichain(2).down_sets().len(), 4);
    }

    #[test]
    fn enumerate_matches_subset_filter() {
        let p = vee();
        let brute: Vec<Subset> = Subset::all(3).filter(|&s| p.is_up_set(s)).collect();
        let mut got = p.up_sets();
        got.sort();
        assert_eq!(got, brute);
        assert_eq!(p.up_sets().len(), 5);
    }

    #[test]
    fn closure_examples() {
        let c = chain2();
        assert_eq!(c.closure_named(&["a"], SetKind::Up).unwrap(), Subset::from_indices([0, 1]));
        assert_eq!(c.closure_named(&["b"], SetKind::Down).unwrap(), Subset::from_indices([0, 1]));
        assert_eq!(c.closure(Subset::EMPTY, SetKind::Up), Subset::EMPTY);
        assert!(matches!(c.closure_named(&["q"], SetKind::Up), Err(Error::UnknownElement(_))));
    }

    #[test]
    fn hofmann_mislove_examples() {
        let r = hofmann_mislove_check(&FinitePoset::antichain(1)).unwrap();
        assert!(r.holds);
        assert_eq!((r.up_sets, r.filters), (2, 2));
        let r = hofmann_mislove_check(&chain2()).unwrap();
        assert!(r.holds);
        assert_eq!((r.up_sets, r.filters), (3, 3));
        assert!(hofmann_mislove_check(&vee()).unwrap().holds);
    }

    #[test]
    fn monotone_maps() {
        let c = Arc::new(chain2());
        let a = Arc::new(FinitePoset::antichain(2));
        assert!(MonotoneMap::new(a.clone(), c.clone(), vec![1, 0]).is_ok());
        assert!(matches!(
            MonotoneMap::new(c.clone(), a.clone(), vec![0, 1]),
            Err(Error::NotMonotone(_))
        ));
        let f = MonotoneMap::new(c.clone(), c.clone(), vec![1, 1]).unwrap();
        assert_eq!(f.preimage(Subset::from_indices([1])), Subset::from_indices([0, 1]));
        assert_eq!(f.preimage(Subset::from_indices([0])), Subset::EMPTY);
    }

    #[test]
    fn isomorphism() {
        let v1 = vee();
        let v2 = FinitePoset::new(&["x", "y", "z"], &[("y", "x"), ("y", "z")]).unwrap();
        assert!(v1.is_isomorphic(&v2));
        assert!(!v1.is_isomorphic(&v1.opposite()));
    }
}
