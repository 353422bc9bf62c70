//! Sheaf representations over finite posets.
//!
//! A sheaf is described by a stalk assignment `y ↦ θ_y` on a finite poset
//! `Y`: the stalk over `y` is `A/θ_y`, every `a ∈ A` gives the canonical
//! section `s_a(y) = a/θ_y`, and the étale topology makes a function on
//! `S ⊆ Y` continuous when it agrees with some `s_a` on `↑y ∩ S` for each
//! `y ∈ S`. From the assignment one derives `θ(K) = ⋂_{y∈K} θ_y` on up-sets.
//!
//! When `θ` is a frame homomorphism `(up-sets)^op → Con A` with pairwise
//! commuting image, the sheaf is soft, its global sections are exactly `A`
//! and the kernel of `A → Γ K` is `θ(K)`; [`validate_frame_hom`],
//! [`SheafRep::is_soft`], [`SheafRep::global_sections_check`] and
//! [`roundtrip_main`] make those facts checkable on any instance.

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::perm::commute;
use crate::poset::{FinitePoset, MonotoneMap};
use crate::subset::Subset;
use crate::ualg::{Congruence, FiniteAlgebra};

/// A monotone map `y ↦ θ_y` from a finite poset into `Con A`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StalkAssignment {
    base: Arc<FinitePoset>,
    algebra: Arc<FiniteAlgebra>,
    stalks: Vec<Congruence>,
}

impl StalkAssignment {
    /// Validates that every stalk is a congruence of `algebra` and that
    /// `y <= y'` implies `θ_y ⊆ θ_y'`.
    pub fn new(
        base: Arc<FinitePoset>,
        algebra: Arc<FiniteAlgebra>,
        stalks: Vec<Congruence>,
    ) -> Result<Self> {
        if stalks.len() != base.len() {
            return Err(Error::Precondition(format!(
                "{} stalks for a base of {} points",
                stalks.len(),
                base.len()
            )));
        }
        for (y, theta) in stalks.iter().enumerate() {
            if theta.size() != algebra.size() {
                return Err(Error::ForeignCongruence(format!(
                    "stalk at {} has {} elements",
                    base.name(y),
                    theta.size()
                )));
            }
            if let Some(w) = theta.compatibility_witness(&algebra) {
                return Err(Error::ForeignCongruence(format!("stalk at {}: {w}", base.name(y))));
            }
        }
        for y in 0..base.len() {
            for z in base.up_of(y).iter() {
                if !stalks[y].refines(&stalks[z]) {
                    return Err(Error::Monotonicity {
                        lower: base.name(y).to_string(),
                        upper: base.name(z).to_string(),
                    });
                }
            }
        }
        Ok(StalkAssignment {
            base,
            algebra,
            stalks,
        })
    }

    pub fn base(&self) -> &Arc<FinitePoset> {
        &self.base
    }

    pub fn algebra(&self) -> &Arc<FiniteAlgebra> {
        &self.algebra
    }

    pub fn stalks(&self) -> &[Congruence] {
        &self.stalks
    }

    pub fn stalk(&self, y: usize) -> &Congruence {
        &self.stalks[y]
    }

    /// `θ(K) = ⋂_{y∈K} θ_y`, with `θ(∅) = ∇`.
    pub fn theta(&self, k: Subset) -> Congruence {
        k.iter()
            .fold(Congruence::total(self.algebra.size()), |acc, y| acc.meet(&self.stalks[y]))
    }

    /// Down-set form: `ψ(U) = θ(Y ∖ U)` for a down-set `U`.
    pub fn psi(&self, u: Subset) -> Congruence {
        self.theta(u.complement(self.base.len()))
    }

    /// Congruences `θ(K)` for every up-set `K`, in canonical up-set order.
    pub fn image(&self) -> Vec<(Subset, Congruence)> {
        self.base
            .up_sets()
            .into_iter()
            .map(|k| (k, self.theta(k)))
            .collect()
    }
}

/// First violated frame-homomorphism condition, with witnesses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FrameHomViolation {
    /// `θ(∅) ≠ ∇`.
    EmptyNotTotal(Congruence),
    /// `θ(Y) ≠ Δ`.
    BaseNotIdentity(Congruence),
    /// `θ(K1 ∩ K2) ≠ θ(K1) ∨ θ(K2)`.
    JoinNotPreserved {
        k1: Subset,
        k2: Subset,
        intersection: Congruence,
        join: Congruence,
    },
    /// Two image congruences do not commute.
    NotCommuting {
        k1: Subset,
        k2: Subset,
        witness: (usize, usize),
    },
}

impl FrameHomViolation {
    pub fn describe(&self, sa: &StalkAssignment) -> String {
        let alg = sa.algebra();
        let base = sa.base();
        match self {
            FrameHomViolation::EmptyNotTotal(c) => {
                format!("theta(empty) = {} is not the total congruence", c.fmt_with(alg))
            }
            FrameHomViolation::BaseNotIdentity(c) => {
                format!("theta(Y) = {} is not the identity congruence", c.fmt_with(alg))
            }
            FrameHomViolation::JoinNotPreserved {
                k1,
                k2,
                intersection,
                join,
            } => format!(
                "theta({} meet {}) = {} but the join is {}",
                base.fmt_subset(*k1),
                base.fmt_subset(*k2),
                intersection.fmt_with(alg),
                join.fmt_with(alg)
            ),
            FrameHomViolation::NotCommuting { k1, k2, witness } => format!(
                "theta({}) and theta({}) do not commute, witness ({}, {})",
                base.fmt_subset(*k1),
                base.fmt_subset(*k2),
                alg.element(witness.0),
                alg.element(witness.1)
            ),
        }
    }
}

/// A stalk assignment certified to be a frame homomorphism with pairwise
/// commuting image.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrameHom {
    assignment: StalkAssignment,
    up_sets_checked: usize,
    image_size: usize,
}

impl FrameHom {
    pub fn assignment(&self) -> &StalkAssignment {
        &self.assignment
    }

    pub fn into_assignment(self) -> StalkAssignment {
        self.assignment
    }

    pub fn up_sets_checked(&self) -> usize {
        self.up_sets_checked
    }

    /// Number of distinct congruences in the image.
    pub fn image_size(&self) -> usize {
        self.image_size
    }

    pub fn theta(&self, k: Subset) -> Congruence {
        self.assignment.theta(k)
    }

    pub fn psi(&self, u: Subset) -> Congruence {
        self.assignment.psi(u)
    }
}

/// Checks, over all pairs of up-sets, that `θ` preserves the bounds and
/// turns intersections into joins, and that its image commutes pairwise.
pub fn validate_frame_hom(sa: &StalkAssignment) -> std::result::Result<FrameHom, FrameHomViolation> {
    let n = sa.algebra.size();
    let image = sa.image();
    let empty = sa.theta(Subset::EMPTY);
    if empty != Congruence::total(n) {
        return Err(FrameHomViolation::EmptyNotTotal(empty));
    }
    let whole = sa.theta(sa.base.all());
    if whole != Congruence::identity(n) {
        return Err(FrameHomViolation::BaseNotIdentity(whole));
    }
    let lookup: HashMap<Subset, &Congruence> = image.iter().map(|(k, c)| (*k, c)).collect();
    for (i, (k1, t1)) in image.iter().enumerate() {
        for (k2, t2) in &image[i + 1..] {
            let inter = lookup[&k1.intersection(*k2)];
            let join = t1.join(t2);
            if *inter != join {
                return Err(FrameHomViolation::JoinNotPreserved {
                    k1: *k1,
                    k2: *k2,
                    intersection: inter.clone(),
                    join,
                });
            }
        }
    }
    let mut distinct: Vec<(Subset, &Congruence)> = Vec::new();
    for (k, c) in &image {
        if !distinct.iter().any(|(_, d)| *d == c) {
            distinct.push((*k, c));
        }
    }
    for (i, (k1, t1)) in distinct.iter().enumerate() {
        for (k2, t2) in &distinct[i + 1..] {
            let r = commute(t1, t2).expect("same algebra");
            if let Some(witness) = r.witness {
                return Err(FrameHomViolation::NotCommuting {
                    k1: *k1,
                    k2: *k2,
                    witness,
                });
            }
        }
    }
    Ok(FrameHom {
        assignment: sa.clone(),
        up_sets_checked: image.len(),
        image_size: distinct.len(),
    })
}

/// A continuous section over `domain`; `values[i]` is the stalk element
/// (block label of `θ_y`) at the `i`-th member of `domain`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Section {
    pub domain: Subset,
    pub values: Vec<u32>,
}

impl Section {
    /// Value at base point `y`, if `y` is in the domain.
    pub fn at(&self, y: usize) -> Option<u32> {
        self.domain
            .iter()
            .position(|z| z == y)
            .map(|i| self.values[i])
    }

    /// Restriction to a subset of the domain.
    pub fn restrict(&self, to: Subset) -> Section {
        debug_assert!(to.is_subset(self.domain));
        let values = self
            .domain
            .iter()
            .zip(&self.values)
            .filter(|(y, _)| to.contains(*y))
            .map(|(_, &v)| v)
            .collect();
        Section { domain: to, values }
    }
}

/// All sections over a subset, as a subalgebra of the product of stalks.
#[derive(Clone, Debug)]
pub struct SectionAlgebra {
    pub domain: Subset,
    pub sections: Vec<Section>,
    /// The sections with pointwise operations. Element `i` is
    /// `sections[i]`; `sections[i].values` is its inclusion into the
    /// product of stalks.
    pub algebra: FiniteAlgebra,
    index: HashMap<Vec<u32>, usize>,
}

impl SectionAlgebra {
    pub fn len(&self) -> usize {
        self.sections.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sections.is_empty()
    }

    pub fn position(&self, s: &Section) -> Option<usize> {
        if s.domain != self.domain {
            return None;
        }
        self.index.get(&s.values).copied()
    }
}

/// Outcome of the softness test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SoftnessReport {
    pub soft: bool,
    /// Up-set and local section over it that no global section extends.
    pub witness: Option<(Subset, Section)>,
}

/// Outcome of the global-sections check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GlobalSectionsReport {
    pub global_sections: usize,
    pub eta_injective: bool,
    pub eta_surjective: bool,
    pub eta_homomorphism: bool,
    /// First up-set `K` where `ker(a ↦ s_a|K) ≠ θ(K)`.
    pub kernel_mismatch: Option<Subset>,
}

impl GlobalSectionsReport {
    pub fn eta_isomorphism(&self) -> bool {
        self.eta_injective && self.eta_surjective && self.eta_homomorphism
    }

    pub fn ok(&self) -> bool {
        self.eta_isomorphism() && self.kernel_mismatch.is_none()
    }
}

/// The étale sheaf `F_θ` of a stalk assignment.
#[derive(Clone, Debug)]
pub struct SheafRep {
    assignment: StalkAssignment,
    stalk_algebras: Vec<FiniteAlgebra>,
}

/// Builds `F_θ`: stalks `A/θ_y` with their projections. Any monotone
/// assignment is accepted; non-frame-homomorphisms simply give sheaves
/// that may fail softness or representation.
pub fn build_sheaf(sa: &StalkAssignment) -> Result<SheafRep> {
    let stalk_algebras = sa
        .stalks
        .iter()
        .map(|theta| sa.algebra.quotient(theta).map(|(q, _)| q))
        .collect::<Result<Vec<_>>>()?;
    Ok(SheafRep {
        assignment: sa.clone(),
        stalk_algebras,
    })
}

impl SheafRep {
    pub fn assignment(&self) -> &StalkAssignment {
        &self.assignment
    }

    pub fn base(&self) -> &Arc<FinitePoset> {
        &self.assignment.base
    }

    pub fn algebra(&self) -> &Arc<FiniteAlgebra> {
        &self.assignment.algebra
    }

    pub fn stalk_algebra(&self, y: usize) -> &FiniteAlgebra {
        &self.stalk_algebras[y]
    }

    /// Projection `A → A/θ_y`, i.e. `a ↦ s_a(y)`.
    #[inline]
    pub fn project(&self, y: usize, a: usize) -> u32 {
        self.assignment.stalks[y].label(a) as u32
    }

    /// The canonical section `s_a` restricted to `domain`.
    pub fn canonical_section(&self, a: usize, domain: Subset) -> Section {
        Section {
            domain,
            values: domain.iter().map(|y| self.project(y, a)).collect(),
        }
    }

    /// Value vectors of all continuous sections over `s`, sorted.
    ///
    /// Continuity is checked at the minimal points of `s`: a candidate must
    /// agree with some `s_a` on `↑m ∩ s` for every minimal `m`, and those
    /// neighbourhoods cover `s`.
    pub fn enumerate_sections(&self, s: Subset) -> Vec<Vec<u32>> {
        let base = self.base();
        let members: Vec<usize> = s.iter().collect();
        let pos: HashMap<usize, usize> = members.iter().enumerate().map(|(i, &y)| (y, i)).collect();
        let minimals: Vec<usize> = base.minimal_in(s).iter().collect();
        // For each minimal point: its neighbourhood positions and the
        // distinct germs of canonical sections there.
        let mut germs: Vec<(Vec<usize>, Vec<Vec<u32>>)> = Vec::with_capacity(minimals.len());
        for &m in &minimals {
            let nbhd: Vec<usize> = base.up_of(m).intersection(s).iter().collect();
            let mut seen = HashSet::new();
            let mut list = Vec::new();
            for a in 0..self.algebra().size() {
                let g: Vec<u32> = nbhd.iter().map(|&y| self.project(y, a)).collect();
                if seen.insert(g.clone()) {
                    list.push(g);
                }
            }
            germs.push((nbhd.iter().map(|y| pos[y]).collect(), list));
        }
        let mut out = Vec::new();
        let mut current: Vec<Option<u32>> = vec![None; members.len()];
        fn rec(
            k: usize,
            germs: &[(Vec<usize>, Vec<Vec<u32>>)],
            current: &mut Vec<Option<u32>>,
            out: &mut Vec<Vec<u32>>,
        ) {
            if k == germs.len() {
                out.push(current.iter().map(|v| v.expect("minimal neighbourhoods cover")).collect());
                return;
            }
            let (positions, list) = &germs[k];
            for g in list {
                let consistent = positions
                    .iter()
                    .zip(g)
                    .all(|(&p, &v)| current[p].is_none_or(|c| c == v));
                if !consistent {
                    continue;
                }
                let saved: Vec<Option<u32>> = positions.iter().map(|&p| current[p]).collect();
                for (&p, &v) in positions.iter().zip(g) {
                    current[p] = Some(v);
                }
                rec(k + 1, germs, current, out);
                for (&p, v) in positions.iter().zip(saved) {
                    current[p] = v;
                }
            }
        }
        rec(0, &germs, &mut current, &mut out);
        out.sort();
        out.dedup();
        out
    }

    /// All sections over `s` as an algebra under pointwise operations.
    /// Fails with an internal-invariant error if pointwise operations leave
    /// the set of sections.
    pub fn sections_over(&self, s: Subset) -> Result<SectionAlgebra> {
        let values = self.enumerate_sections(s);
        let index: HashMap<Vec<u32>, usize> =
            values.iter().cloned().enumerate().map(|(i, v)| (v, i)).collect();
        let members: Vec<usize> = s.iter().collect();
        let names: Vec<String> = values
            .iter()
            .map(|v| {
                let parts: Vec<&str> = members
                    .iter()
                    .zip(v)
                    .map(|(&y, &b)| self.stalk_algebras[y].element(b as usize))
                    .collect();
                format!("<{}>", parts.join(";"))
            })
            .collect();
        let alg = self.algebra();
        let mut failure = None;
        let mut buf = Vec::new();
        let mut point = vec![0u32; members.len()];
        let algebra = FiniteAlgebra::from_fn(
            format!("sections over {}", self.base().fmt_subset(s)),
            names,
            alg.signature().clone(),
            |op, args| {
                for (i, &y) in members.iter().enumerate() {
                    buf.clear();
                    buf.extend(args.iter().map(|&a| values[a][i] as usize));
                    point[i] = self.stalk_algebras[y].apply(op, &buf) as u32;
                }
                match index.get(&point) {
                    Some(&j) => j,
                    None => {
                        failure.get_or_insert_with(|| point.clone());
                        0
                    }
                }
            },
        )?;
        if let Some(p) = failure {
            return Err(Error::InternalInvariant(format!(
                "sections over {} are not closed under the operations: {p:?}",
                self.base().fmt_subset(s)
            )));
        }
        let sections = values
            .into_iter()
            .map(|v| Section { domain: s, values: v })
            .collect();
        Ok(SectionAlgebra {
            domain: s,
            sections,
            algebra,
            index,
        })
    }

    /// `‖s_a = s_b‖ = { y | a θ_y b }`, an up-set.
    pub fn equalizer(&self, a: usize, b: usize) -> Result<Subset> {
        let n = self.algebra().size();
        if a >= n || b >= n {
            return Err(Error::UnknownElement(format!("index {}", a.max(b))));
        }
        let eq: Subset = (0..self.base().len())
            .filter(|&y| self.assignment.stalks[y].related(a, b))
            .collect();
        debug_assert!(self.base().is_up_set(eq));
        Ok(eq)
    }

    /// `θ_F(K) = { (a, b) | K ⊆ ‖s_a = s_b‖ }`, computed from equalizers.
    pub fn theta_at(&self, k: Subset) -> Congruence {
        let n = self.algebra().size();
        let mut pairs = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                if k.is_subset(self.equalizer(a, b).expect("in range")) {
                    pairs.push((a, b));
                }
            }
        }
        Congruence::equivalence_from_pairs(n, &pairs)
    }

    /// The stalk assignment `y ↦ θ_F(↑y)` recovered from equalizers.
    pub fn theta_of_sheaf(&self) -> Result<StalkAssignment> {
        let stalks = (0..self.base().len())
            .map(|y| self.theta_at(self.base().up_of(y)))
            .collect();
        StalkAssignment::new(self.base().clone(), self.algebra().clone(), stalks)
    }

    /// Soft iff for every nonempty up-set `K` every section over `K` is the
    /// restriction of a global section.
    pub fn is_soft(&self) -> SoftnessReport {
        let all = self.base().all();
        let global = self.enumerate_sections(all);
        for k in self.base().up_sets() {
            if k.is_empty() || k == all {
                continue;
            }
            let restricted: HashSet<Vec<u32>> = global
                .iter()
                .map(|v| {
                    Section {
                        domain: all,
                        values: v.clone(),
                    }
                    .restrict(k)
                    .values
                })
                .collect();
            if let Some(local) = self
                .enumerate_sections(k)
                .into_iter()
                .find(|v| !restricted.contains(v))
            {
                return SoftnessReport {
                    soft: false,
                    witness: Some((
                        k,
                        Section {
                            domain: k,
                            values: local,
                        },
                    )),
                };
            }
        }
        SoftnessReport {
            soft: true,
            witness: None,
        }
    }

    /// Checks that `η: a ↦ s_a` is an isomorphism onto the global sections
    /// and that, for every up-set `K`, the kernel of `a ↦ s_a|K` is `θ(K)`.
    pub fn global_sections_check(&self) -> Result<GlobalSectionsReport> {
        let alg = self.algebra();
        let all = self.base().all();
        let global = self.sections_over(all)?;
        let eta: Vec<Option<usize>> = (0..alg.size())
            .map(|a| global.position(&self.canonical_section(a, all)))
            .collect();
        let hit: HashSet<usize> = eta.iter().flatten().copied().collect();
        let eta_injective = eta.iter().all(Option::is_some) && hit.len() == alg.size();
        let eta_surjective = hit.len() == global.len();
        let mut eta_homomorphism = eta.iter().all(Option::is_some);
        if eta_homomorphism {
            let map: Vec<usize> = eta.iter().map(|e| e.unwrap()).collect();
            eta_homomorphism = alg.check_homomorphism(&global.algebra, &map).is_ok();
        }
        let mut kernel_mismatch = None;
        for k in self.base().up_sets() {
            let labels: Vec<Vec<u32>> = (0..alg.size())
                .map(|a| self.canonical_section(a, k).values)
                .collect();
            if Congruence::from_labels(&labels) != self.assignment.theta(k) {
                kernel_mismatch = Some(k);
                break;
            }
        }
        Ok(GlobalSectionsReport {
            global_sections: global.len(),
            eta_injective,
            eta_surjective,
            eta_homomorphism,
            kernel_mismatch,
        })
    }

    /// Kernel of the restriction `A → Γ K`, `a ↦ s_a|K`.
    pub fn restriction_kernel(&self, k: Subset) -> Congruence {
        let labels: Vec<Vec<u32>> = (0..self.algebra().size())
            .map(|a| self.canonical_section(a, k).values)
            .collect();
        Congruence::from_labels(&labels)
    }

    /// Checks that sections over the up-set `u` are the consistent families
    /// `(s_K)` indexed by up-sets `K ⊆ u` under restriction.
    pub fn limit_check(&self, u: Subset) -> Result<bool> {
        if !self.base().is_up_set(u) {
            return Err(Error::Precondition(format!(
                "{} is not an up-set",
                self.base().fmt_subset(u)
            )));
        }
        let mut diagram: Vec<Subset> = self
            .base()
            .up_sets()
            .into_iter()
            .filter(|k| k.is_subset(u))
            .collect();
        diagram.sort_by(|a, b| b.len().cmp(&a.len()).then(a.cmp(b)));
        let local: Vec<HashSet<Vec<u32>>> = diagram
            .iter()
            .map(|&k| self.enumerate_sections(k).into_iter().collect())
            .collect();
        // Enumerate consistent families by backtracking over the diagram,
        // largest sets first.
        let mut families = 0usize;
        let mut chosen: Vec<Section> = Vec::with_capacity(diagram.len());
        fn rec(
            i: usize,
            diagram: &[Subset],
            local: &[HashSet<Vec<u32>>],
            chosen: &mut Vec<Section>,
            families: &mut usize,
        ) {
            if i == diagram.len() {
                *families += 1;
                return;
            }
            let k = diagram[i];
            // Restrictions from already chosen supersets must agree.
            let forced: Option<Vec<u32>> = chosen
                .iter()
                .find(|s| k.is_subset(s.domain))
                .map(|s| s.restrict(k).values);
            let candidates: Vec<Vec<u32>> = match forced {
                Some(v) => local[i].contains(&v).then_some(v).into_iter().collect(),
                None => {
                    let mut c: Vec<_> = local[i].iter().cloned().collect();
                    c.sort();
                    c
                }
            };
            for v in candidates {
                let s = Section { domain: k, values: v };
                if chosen
                    .iter()
                    .filter(|c| k.is_subset(c.domain))
                    .all(|c| c.restrict(k) == s)
                {
                    chosen.push(s);
                    rec(i + 1, diagram, local, chosen, families);
                    chosen.pop();
                }
            }
        }
        rec(0, &diagram, &local, &mut chosen, &mut families);
        let over_u = &local[0];
        let every_restriction_continuous = over_u.iter().all(|v| {
            let s = Section {
                domain: u,
                values: v.clone(),
            };
            diagram
                .iter()
                .enumerate()
                .all(|(i, &k)| local[i].contains(&s.restrict(k).values))
        });
        Ok(every_restriction_continuous && families == over_u.len())
    }
}

/// `F_θ` is soft and `θ_{F_θ} = θ`.
pub fn roundtrip_main(fh: &FrameHom) -> Result<bool> {
    let sheaf = build_sheaf(fh.assignment())?;
    Ok(sheaf.is_soft().soft && sheaf.theta_of_sheaf()? == *fh.assignment())
}

/// Direct image along a monotone map `f: Y → Z`: the sheaf over `Z` with
/// stalks `z ↦ θ(f⁻¹(↑z))`.
///
/// Requires a soft sheaf whose assignment is a validated frame
/// homomorphism. Verifies that, for every up-set `K` of `Z`, the kernel of
/// `A → Γ_G K` is `θ(f⁻¹ K)` and that `Γ_G K` and `Γ_F f⁻¹K` have the same
/// size.
pub fn direct_image(sheaf: &SheafRep, f: &MonotoneMap) -> Result<SheafRep> {
    if **f.source() != **sheaf.base() {
        return Err(Error::Precondition("map source is not the sheaf's base".into()));
    }
    if let Err(v) = validate_frame_hom(sheaf.assignment()) {
        return Err(Error::SoftnessRequired(v.describe(sheaf.assignment())));
    }
    let soft = sheaf.is_soft();
    if !soft.soft {
        let (k, _) = soft.witness.expect("witness");
        return Err(Error::SoftnessRequired(format!(
            "a section over {} does not extend",
            sheaf.base().fmt_subset(k)
        )));
    }
    let z = f.target().clone();
    let sa = sheaf.assignment();
    let stalks = (0..z.len())
        .map(|t| sa.theta(f.preimage(z.up_of(t))))
        .collect();
    let image_sa = StalkAssignment::new(z.clone(), sa.algebra().clone(), stalks)?;
    let image = build_sheaf(&image_sa)?;
    for k in z.up_sets() {
        let pre = f.preimage(k);
        if image.restriction_kernel(k) != sa.theta(pre) {
            return Err(Error::InternalInvariant(format!(
                "direct image kernel over {} differs from theta of its preimage",
                z.fmt_subset(k)
            )));
        }
        if image.enumerate_sections(k).len() != sheaf.enumerate_sections(pre).len() {
            return Err(Error::InternalInvariant(format!(
                "sections of the direct image over {} differ from sections over {}",
                z.fmt_subset(k),
                sheaf.base().fmt_subset(pre)
            )));
        }
    }
    Ok(image)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ualg::{chain_lattice, principal_congruence, product, two_element_lattice, Signature};

    fn point() -> Arc<FinitePoset> {
        Arc::new(FinitePoset::antichain(1))
    }

    /// Two-point antichain base over 2x2 with the kernels of the projections.
    fn antichain_ker() -> StalkAssignment {
        let two = two_element_lattice();
        let (b4, proj) = product(&Signature::bounded_lattice(), &[&two, &two]).unwrap();
        let k1 = b4.kernel(&two, &proj[0]).unwrap();
        let k2 = b4.kernel(&two, &proj[1]).unwrap();
        StalkAssignment::new(Arc::new(FinitePoset::antichain(2)), Arc::new(b4), vec![k1, k2]).unwrap()
    }

    fn c3_pair() -> (Arc<FiniteAlgebra>, Congruence, Congruence) {
        let c3 = chain_lattice(3);
        let a = principal_congruence(&c3, 0, 1);
        let b = principal_congruence(&c3, 1, 2);
        (Arc::new(c3), a, b)
    }

    #[test]
    fn stalk_assignment_examples() {
        let c3 = Arc::new(chain_lattice(3));
        assert!(StalkAssignment::new(point(), c3.clone(), vec![Congruence::identity(3)]).is_ok());
        antichain_ker();
        let two = Arc::new(two_element_lattice());
        let err = StalkAssignment::new(
            Arc::new(FinitePoset::chain(2)),
            two,
            vec![Congruence::total(2), Congruence::identity(2)],
        );
        assert!(matches!(err, Err(Error::Monotonicity { .. })));
    }

    #[test]
    fn validate_examples() {
        let fh = validate_frame_hom(&antichain_ker()).unwrap();
        assert_eq!(fh.up_sets_checked(), 4);
        assert_eq!(fh.theta(Subset::full(2)), Congruence::identity(4));
        let c3 = Arc::new(chain_lattice(3));
        let total = StalkAssignment::new(point(), c3, vec![Congruence::total(3)]).unwrap();
        assert!(matches!(
            validate_frame_hom(&total),
            Err(FrameHomViolation::BaseNotIdentity(_))
        ));
        let (c3, a, b) = c3_pair();
        let sa = StalkAssignment::new(Arc::new(FinitePoset::antichain(2)), c3, vec![a, b]).unwrap();
        assert!(matches!(
            validate_frame_hom(&sa),
            Err(FrameHomViolation::NotCommuting { .. })
        ));
    }

    #[test]
    fn build_and_sections() {
        let c3 = Arc::new(chain_lattice(3));
        let f = build_sheaf(&StalkAssignment::new(point(), c3, vec![Congruence::identity(3)]).unwrap()).unwrap();
        assert_eq!(f.stalk_algebra(0).size(), 3);
        assert_eq!(f.sections_over(Subset::full(1)).unwrap().len(), 3);

        let f = build_sheaf(&antichain_ker()).unwrap();
        assert_eq!(f.stalk_algebra(0).size(), 2);
        assert_eq!(f.stalk_algebra(1).size(), 2);
        assert_eq!(f.sections_over(Subset::EMPTY).unwrap().len(), 1);
        let global = f.sections_over(Subset::full(2)).unwrap();
        assert_eq!(global.len(), 4);
        assert_eq!(f.sections_over(Subset::singleton(0)).unwrap().len(), 2);

        let two = Arc::new(two_element_lattice());
        let sa = StalkAssignment::new(
            Arc::new(FinitePoset::chain(2)),
            two,
            vec![Congruence::identity(2), Congruence::total(2)],
        )
        .unwrap();
        let f = build_sheaf(&sa).unwrap();
        assert_eq!((f.stalk_algebra(0).size(), f.stalk_algebra(1).size()), (2, 1));
    }

    #[test]
    fn equalizer_and_theta() {
        let f = build_sheaf(&antichain_ker()).unwrap();
        assert_eq!(f.equalizer(1, 1).unwrap(), Subset::full(2));
        // (0,0) and (0,1) agree in the first coordinate only
        assert_eq!(f.equalizer(0, 1).unwrap(), Subset::singleton(0));
        for a in 0..4 {
            for b in 0..4 {
                assert_eq!(f.equalizer(a, b).unwrap() == Subset::full(2), a == b);
            }
        }
        assert_eq!(f.theta_at(Subset::EMPTY), Congruence::total(4));
        assert_eq!(f.theta_at(Subset::singleton(0)), *f.assignment().stalk(0));
        assert_eq!(f.theta_at(Subset::full(2)), Congruence::identity(4));
        assert_eq!(f.theta_of_sheaf().unwrap(), antichain_ker());
    }

    #[test]
    fn softness_examples() {
        let c3 = Arc::new(chain_lattice(3));
        let f = build_sheaf(&StalkAssignment::new(point(), c3, vec![Congruence::identity(3)]).unwrap()).unwrap();
        assert!(f.is_soft().soft);
        assert!(build_sheaf(&antichain_ker()).unwrap().is_soft().soft);

        // Over a discrete base every local section extends, so this one is
        // soft, but A has 3 elements and there are 4 global sections.
        let (c3, a, b) = c3_pair();
        let sa = StalkAssignment::new(Arc::new(FinitePoset::antichain(2)), c3.clone(), vec![a.clone(), b.clone()])
            .unwrap();
        let f = build_sheaf(&sa).unwrap();
        assert!(f.is_soft().soft);
        assert!(!f.global_sections_check().unwrap().eta_isomorphism());

        // Put a point below both: global sections are forced to be s_a, and
        // the section ([1] at l, [0] at r) does not extend.
        let lambda = Arc::new(FinitePoset::new(&["b", "l", "r"], &[("b", "l"), ("b", "r")]).unwrap());
        let sa = StalkAssignment::new(lambda, c3, vec![Congruence::identity(3), a, b]).unwrap();
        let f = build_sheaf(&sa).unwrap();
        let r = f.is_soft();
        assert!(!r.soft);
        let (k, s) = r.witness.unwrap();
        assert_eq!(k, Subset::from_indices([1, 2]));
        // label of 1 under θ(0,m) is 1; label of 0 under θ(m,1) is 0
        assert_eq!(s.values, vec![1, 0]);
    }

    #[test]
    fn global_sections_examples() {
        let c3 = Arc::new(chain_lattice(3));
        let f = build_sheaf(&StalkAssignment::new(point(), c3, vec![Congruence::identity(3)]).unwrap()).unwrap();
        assert!(f.global_sections_check().unwrap().ok());
        let r = build_sheaf(&antichain_ker()).unwrap().global_sections_check().unwrap();
        assert!(r.ok());
        assert_eq!(r.global_sections, 4);

        let two = two_element_lattice();
        let (b4, proj) = product(&Signature::bounded_lattice(), &[&two, &two]).unwrap();
        let k1 = b4.kernel(&two, &proj[0]).unwrap();
        let sa = StalkAssignment::new(
            Arc::new(FinitePoset::chain(2)),
            Arc::new(b4),
            vec![Congruence::identity(4), k1.clone()],
        )
        .unwrap();
        let f = build_sheaf(&sa).unwrap();
        assert!(f.global_sections_check().unwrap().ok());
        assert_eq!(f.restriction_kernel(Subset::singleton(1)), k1);
    }

    #[test]
    fn roundtrip_examples() {
        let c3 = Arc::new(chain_lattice(3));
        let sa = StalkAssignment::new(point(), c3, vec![Congruence::identity(3)]).unwrap();
        assert!(roundtrip_main(&validate_frame_hom(&sa).unwrap()).unwrap());
        assert!(roundtrip_main(&validate_frame_hom(&antichain_ker()).unwrap()).unwrap());
    }

    #[test]
    fn direct_image_examples() {
        let f = build_sheaf(&antichain_ker()).unwrap();
        let id = MonotoneMap::identity(f.base().clone());
        let g = direct_image(&f, &id).unwrap();
        assert_eq!(g.assignment(), f.assignment());
        let collapse = MonotoneMap::collapse(f.base().clone());
        let g = direct_image(&f, &collapse).unwrap();
        assert_eq!(g.base().len(), 1);
        assert_eq!(g.stalk_algebra(0).size(), 4);
        assert!(g.global_sections_check().unwrap().ok());

        let (c3, a, b) = c3_pair();
        let lambda = Arc::new(FinitePoset::new(&["b", "l", "r"], &[("b", "l"), ("b", "r")]).unwrap());
        let sa = StalkAssignment::new(lambda.clone(), c3, vec![Congruence::identity(3), a, b]).unwrap();
        let f = build_sheaf(&sa).unwrap();
        assert!(matches!(
            direct_image(&f, &MonotoneMap::identity(lambda)),
            Err(Error::SoftnessRequired(_))
        ));
    }

    #[test]
    fn limit_examples() {
        let f = build_sheaf(&antichain_ker()).unwrap();
        assert!(f.limit_check(Subset::EMPTY).unwrap());
        assert!(f.limit_check(Subset::full(2)).unwrap());
        let chain = Arc::new(FinitePoset::chain(2));
        let sa = StalkAssignment::new(
            chain,
            Arc::new(two_element_lattice()),
            vec![Congruence::identity(2), Congruence::total(2)],
        )
        .unwrap();
        let f = build_sheaf(&sa).unwrap();
        assert!(matches!(f.limit_check(Subset::singleton(0)), Err(Error::Precondition(_))));
    }
}
