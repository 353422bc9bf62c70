use std::sync::Arc;

use proptest::prelude::*;
use softsheaf::corpus;
use softsheaf::format;
use softsheaf::oracle;
use softsheaf::par::{self, Mode};
use softsheaf::perm::{commute, commutes, compose, crt_solve};
use softsheaf::poset::{FinitePoset, SetKind};
use softsheaf::sheafrep::{build_sheaf, StalkAssignment};
use softsheaf::ualg::{congruence_lattice, principal_congruence, FiniteAlgebra};
use softsheaf::Subset;

fn poset_strategy() -> impl Strategy<Value = FinitePoset> {
    let all = corpus::posets_up_to(4);
    (0..all.len()).prop_map(move |i| all[i].clone())
}

fn algebra_strategy() -> impl Strategy<Value = FiniteAlgebra> {
    any::<u64>().prop_map(|seed| corpus::random_algebras(seed, 1, 4).remove(0))
}

fn lattice_strategy() -> impl Strategy<Value = FiniteAlgebra> {
    let all = corpus::bounded_lattices(5);
    (0..all.len()).prop_map(move |i| all[i].clone())
}

fn assignment_strategy() -> impl Strategy<Value = StalkAssignment> {
    (poset_strategy(), lattice_strategy(), any::<u64>()).prop_filter_map(
        "no monotone assignment",
        |(p, a, pick)| {
            if a.size() > 4 || p.is_empty() {
                return None;
            }
            let con = congruence_lattice(&a).ok()?;
            let all = corpus::monotone_assignments(&p, &con);
            let stalks = all[(pick % all.len() as u64) as usize].clone();
            StalkAssignment::new(p.into_arc(), Arc::new(a), stalks).ok()
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn closure_is_idempotent_and_monotone(p in poset_strategy(), s in any::<u64>(), t in any::<u64>()) {
        let n = p.len();
        let s = Subset(s).intersection(Subset::full(n));
        let t = s.union(Subset(t).intersection(Subset::full(n)));
        for kind in [SetKind::Up, SetKind::Down] {
            let cs = p.closure(s, kind);
            prop_assert!(s.is_subset(cs));
            prop_assert_eq!(p.closure(cs, kind), cs);
            prop_assert!(p.is_kind(cs, kind));
            prop_assert!(cs.is_subset(p.closure(t, kind)));
        }
    }

    #[test]
    fn up_sets_closed_under_union_and_intersection(p in poset_strategy()) {
        let ups = p.up_sets();
        for &u in &ups {
            prop_assert!(p.is_down_set(u.complement(p.len())));
            for &v in &ups {
                prop_assert!(p.is_up_set(u.union(v)));
                prop_assert!(p.is_up_set(u.intersection(v)));
            }
        }
    }

    #[test]
    fn congruence_lattice_matches_filtering(a in algebra_strategy()) {
        let con = congruence_lattice(&a).unwrap();
        let mut ours: Vec<_> = con.members().to_vec();
        ours.sort();
        prop_assert_eq!(ours, oracle::congruences_by_filtering(&a));
    }

    #[test]
    fn quotient_kernel_round_trip(a in algebra_strategy(), pick in any::<usize>()) {
        let con = congruence_lattice(&a).unwrap();
        let theta = con.get(pick % con.len());
        let (q, pi) = a.quotient(theta).unwrap();
        prop_assert_eq!(q.size(), theta.num_blocks());
        prop_assert_eq!(&a.kernel(&q, &pi).unwrap(), theta);
    }

    #[test]
    fn composition_laws(a in algebra_strategy(), i in any::<usize>(), j in any::<usize>(), k in any::<usize>()) {
        let con = congruence_lattice(&a).unwrap();
        let (x, y, z) = (con.get(i % con.len()), con.get(j % con.len()), con.get(k % con.len()));
        let xy_z = compose(x, y).unwrap().then(&softsheaf::perm::BinaryRelation::of_congruence(z));
        let x_yz = softsheaf::perm::BinaryRelation::of_congruence(x).then(&compose(y, z).unwrap());
        prop_assert_eq!(xy_z, x_yz);
        prop_assert_eq!(commutes(x, y), commutes(y, x));
        prop_assert_eq!(commute(x, y).unwrap().witness.is_none(), commutes(x, y));
        let join = x.join(y);
        prop_assert!(compose(x, y).unwrap().is_subset(&softsheaf::perm::BinaryRelation::of_congruence(&join)));
        if x.refines(z) {
            prop_assert!(compose(x, y).unwrap().is_subset(&compose(z, y).unwrap()));
        }
    }

    #[test]
    fn crt_agrees_with_exhaustive(a in lattice_strategy(), seeds in prop::collection::vec(any::<(usize, usize, usize)>(), 1..3)) {
        let n = a.size();
        let constraints: Vec<_> = seeds
            .iter()
            .map(|&(x, y, t)| (principal_congruence(&a, x % n, y % n), t % n))
            .collect();
        let exhaustive = oracle::crt_exhaustive(n, &constraints);
        match crt_solve(&a, &constraints) {
            Ok(s) => prop_assert!(exhaustive.contains(&s)),
            Err(e) => prop_assert!(matches!(e, softsheaf::Error::Precondition(_)), "{e}"),
        }
    }

    #[test]
    fn sections_match_definition(sa in assignment_strategy(), pick in any::<usize>()) {
        let sheaf = build_sheaf(&sa).unwrap();
        let ups = sheaf.base().up_sets();
        let u = ups[pick % ups.len()];
        let mut ours = sheaf.enumerate_sections(u);
        ours.sort();
        let mut theirs = oracle::sections_by_definition(&sheaf, u);
        theirs.sort();
        prop_assert_eq!(ours, theirs);
    }

    #[test]
    fn softness_matches_definition(sa in assignment_strategy()) {
        let sheaf = build_sheaf(&sa).unwrap();
        let report = sheaf.is_soft();
        prop_assert_eq!(report.soft, oracle::is_soft_by_definition(&sheaf));
        prop_assert_eq!(report.soft, report.witness.is_none());
    }

    #[test]
    fn formats_round_trip(p in poset_strategy(), a in algebra_strategy(), sa in assignment_strategy()) {
        prop_assert!(format::poset_from_json(&format::poset_to_json(&p)).unwrap().is_isomorphic(&p));
        let b = format::algebra_from_json(&format::algebra_to_json(&a)).unwrap();
        prop_assert_eq!(b.carrier(), a.carrier());
        for op in 0..a.signature().len() {
            prop_assert_eq!(b.table(op), a.table(op));
        }
        let text = format::frame_hom_to_json(&sa);
        let back = format::frame_hom_from_json(&text, std::path::Path::new(".")).unwrap();
        prop_assert_eq!(back.stalks(), sa.stalks());
    }

    #[test]
    fn parallel_equals_sequential(seed in any::<u64>()) {
        let algs = corpus::random_algebras(seed, 8, 4);
        let f = |a: &FiniteAlgebra| congruence_lattice(a).unwrap().members().to_vec();
        prop_assert_eq!(par::map(Mode::Sequential, &algs, f), par::map(Mode::Parallel, &algs, f));
    }
}
