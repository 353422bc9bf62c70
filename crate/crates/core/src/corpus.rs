//! Enumerated and seeded inputs for the sweeps.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dlat::{lattice_from_order, DistLattice};
use crate::mv::{luk_product, MVAlgebra};
use crate::poset::FinitePoset;
use crate::ualg::{Congruence, CongruenceLattice, FiniteAlgebra, Signature, Symbol};

/// Seed for the random algebra corpus unless overridden.
pub const DEFAULT_SEED: u64 = 0x5eed_0f_c0;

/// All posets with exactly `n` elements, one per isomorphism class, named
/// `y0, y1, ..`. Every class has a representative whose order extends the
/// natural order of indices, so only relations `i < j` are tried.
pub fn posets_of_size(n: usize) -> Vec<FinitePoset> {
    let slots: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let names: Vec<String> = (0..n).map(|i| format!("y{i}")).collect();
    let mut out: Vec<FinitePoset> = Vec::new();
    for mask in 0u64..1 << slots.len() {
        let rel: Vec<(usize, usize)> = slots
            .iter()
            .enumerate()
            .filter(|(k, _)| mask >> k & 1 == 1)
            .map(|(_, &p)| p)
            .collect();
        let transitive = rel.iter().all(|&(a, b)| {
            rel.iter()
                .filter(|&&(c, _)| c == b)
                .all(|&(_, d)| rel.contains(&(a, d)))
        });
        if !transitive {
            continue;
        }
        let p = FinitePoset::from_index_pairs(names.clone(), &rel).expect("acyclic by construction");
        if !out.iter().any(|q| q.is_isomorphic(&p)) {
            out.push(p);
        }
    }
    out
}

/// All posets with at most `max` elements up to isomorphism, smallest first.
pub fn posets_up_to(max: usize) -> Vec<FinitePoset> {
    (0..=max).flat_map(posets_of_size).collect()
}

/// All bounded lattices with at most `max` elements up to isomorphism.
pub fn bounded_lattices(max: usize) -> Vec<FiniteAlgebra> {
    let mut out = Vec::new();
    for n in 1..=max {
        for (k, p) in posets_of_size(n).iter().enumerate() {
            if let Ok(l) = lattice_from_order(p, &format!("lat{n}.{k}")) {
                out.push(l);
            }
        }
    }
    out
}

/// Down-set lattices of all posets with at most `max` elements; their
/// duals run over the same posets.
pub fn distributive_lattices_dual_to(max: usize) -> Vec<(FinitePoset, DistLattice)> {
    posets_up_to(max)
        .into_iter()
        .map(|p| {
            let l = DistLattice::of_down_sets(&p);
            (p, l)
        })
        .collect()
}

/// Chain lengths `n_i` with `∏(n_i + 1) <= max_size`, as non-decreasing
/// lists.
pub fn mv_shapes(max_size: usize) -> Vec<Vec<usize>> {
    fn rec(min: usize, budget: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        for n in min.. {
            if n + 1 > budget {
                break;
            }
            cur.push(n);
            out.push(cur.clone());
            rec(n, budget / (n + 1), cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(1, max_size, &mut Vec::new(), &mut out);
    out.sort_by_key(|s| (s.iter().map(|n| n + 1).product::<usize>(), s.clone()));
    out
}

/// Finite MV-algebras with at most `max_size` elements, as products of
/// Łukasiewicz chains.
pub fn mv_algebras(max_size: usize) -> Vec<MVAlgebra> {
    mv_shapes(max_size)
        .iter()
        .map(|s| luk_product(s).expect("chain products are MV-algebras"))
        .collect()
}

/// `count` random algebras with carriers of size 1 to `max_carrier` and
/// 1 to 4 operations of arity at most 2.
pub fn random_algebras(seed: u64, count: usize, max_carrier: usize) -> Vec<FiniteAlgebra> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let n = rng.gen_range(1..=max_carrier);
            let ops = rng.gen_range(1..=4);
            let symbols = (0..ops)
                .map(|k| Symbol::new(format!("f{k}"), rng.gen_range(0..=2)))
                .collect();
            let sig = Signature::new(symbols).expect("distinct names");
            let carrier = (0..n).map(|a| format!("a{a}")).collect();
            FiniteAlgebra::from_fn(format!("rand{i}"), carrier, sig, |_, _| rng.gen_range(0..n))
                .expect("random tables are total")
        })
        .collect()
}

/// The congruence-lattice corpus: bounded lattices up to 5 elements, MV
/// algebras up to 12 elements and 200 random algebras on at most 4
/// elements.
pub fn algebra_corpus(seed: u64) -> Vec<FiniteAlgebra> {
    let mut out = bounded_lattices(5);
    out.extend(mv_algebras(12).iter().map(|a| (**a.algebra()).clone()));
    out.extend(random_algebras(seed, 200, 4));
    out
}

/// Corpus algebras with at most `max` elements.
pub fn small_algebras(seed: u64, max: usize) -> Vec<FiniteAlgebra> {
    algebra_corpus(seed).into_iter().filter(|a| a.size() <= max).collect()
}

/// Every order-preserving map from `source` into a finite order given by
/// `leq` on `0..m`, in lexicographic order of value vectors.
pub fn monotone_maps_into<F>(source: &FinitePoset, m: usize, leq: F) -> Vec<Vec<usize>>
where
    F: Fn(usize, usize) -> bool,
{
    let order = source.linear_extension();
    let mut out = Vec::new();
    let mut values = vec![usize::MAX; source.len()];
    fn rec<F: Fn(usize, usize) -> bool>(
        i: usize,
        order: &[usize],
        source: &FinitePoset,
        m: usize,
        leq: &F,
        values: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if i == order.len() {
            out.push(values.clone());
            return;
        }
        let y = order[i];
        for v in 0..m {
            let ok = order[..i].iter().all(|&x| {
                (!source.leq(x, y) || leq(values[x], v)) && (!source.leq(y, x) || leq(v, values[x]))
            });
            if ok {
                values[y] = v;
                rec(i + 1, order, source, m, leq, values, out);
            }
        }
        values[y] = usize::MAX;
    }
    rec(0, &order, source, m, &leq, &mut values, &mut out);
    out.sort();
    out
}

/// Every monotone map between two posets.
pub fn monotone_maps(source: &FinitePoset, target: &FinitePoset) -> Vec<Vec<usize>> {
    monotone_maps_into(source, target.len(), |a, b| target.leq(a, b))
}

/// Every monotone stalk assignment `Y → Con A`.
pub fn monotone_assignments(base: &FinitePoset, con: &CongruenceLattice) -> Vec<Vec<Congruence>> {
    monotone_maps_into(base, con.len(), |a, b| con.leq(a, b))
        .into_iter()
        .map(|v| v.into_iter().map(|i| con.get(i).clone()).collect())
        .collect()
}

/// Every function `0..n → 0..m`.
pub fn all_functions(n: usize, m: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|v| {
                (0..m).map(move |x| {
                    let mut w = v.clone();
                    w.push(x);
                    w
                })
            })
            .collect();
    }
    out
}
