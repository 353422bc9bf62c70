//! Brute-force reference implementations. These share no code with the
//! algorithms they check beyond the data types.

use crate::sheafrep::SheafRep;
use crate::subset::Subset;
use crate::ualg::{Congruence, FiniteAlgebra};

/// Calls `f` with every partition of `0..n` as a restricted growth string.
pub fn for_each_partition<F: FnMut(&[u32])>(n: usize, mut f: F) {
    if n == 0 {
        f(&[]);
        return;
    }
    let mut labels = vec![0u32; n];
    let mut maxes = vec![0u32; n];
    loop {
        f(&labels);
        // next restricted growth string
        let mut i = n - 1;
        loop {
            if i == 0 {
                return;
            }
            if labels[i] <= maxes[i - 1] {
                labels[i] += 1;
                maxes[i] = maxes[i - 1].max(labels[i]);
                for j in i + 1..n {
                    labels[j] = 0;
                    maxes[j] = maxes[i];
                }
                break;
            }
            i -= 1;
        }
    }
}

/// Whether the partition given by `labels` is preserved by every
/// operation: for each tuple and each coordinate, replacing the argument
/// by a related element gives a related result.
pub fn is_compatible(alg: &FiniteAlgebra, labels: &[u32]) -> bool {
    let n = alg.size();
    let mut args = Vec::new();
    for (op, sym) in alg.signature().symbols().iter().enumerate() {
        let k = sym.arity;
        let total = n.pow(k as u32);
        for code in 0..total {
            args.clear();
            let mut c = code;
            for _ in 0..k {
                args.push(c % n);
                c /= n;
            }
            let base = labels[alg.apply(op, &args)];
            for pos in 0..k {
                let orig = args[pos];
                for b in orig + 1..n {
                    if labels[b] == labels[orig] {
                        args[pos] = b;
                        let v = labels[alg.apply(op, &args)];
                        args[pos] = orig;
                        if v != base {
                            return false;
                        }
                    }
                }
            }
        }
    }
    true
}

/// All congruences by filtering every partition of the carrier, sorted.
pub fn congruences_by_filtering(alg: &FiniteAlgebra) -> Vec<Congruence> {
    let mut out = Vec::new();
    for_each_partition(alg.size(), |labels| {
        if is_compatible(alg, labels) {
            out.push(Congruence::from_labels(labels));
        }
    });
    out.sort();
    out
}

/// Every `a` with `a θ_i a_i` for all constraints, by scanning the carrier.
pub fn crt_exhaustive(n: usize, constraints: &[(Congruence, usize)]) -> Vec<usize> {
    (0..n)
        .filter(|&a| constraints.iter().all(|(t, ai)| t.related(a, *ai)))
        .collect()
}

/// Sections over `s` from the étale definition: a choice of stalk element
/// at each point of `s` that agrees with some `s_a` on `↑y ∩ s` around
/// every `y ∈ s`. Enumerates the full product of stalks.
pub fn sections_by_definition(sheaf: &SheafRep, s: Subset) -> Vec<Vec<u32>> {
    let base = sheaf.base();
    let points: Vec<usize> = s.iter().collect();
    let sizes: Vec<usize> = points.iter().map(|&y| sheaf.stalk_algebra(y).size()).collect();
    let n = sheaf.algebra().size();
    let mut out = Vec::new();
    let mut values = vec![0u32; points.len()];
    let total: usize = sizes.iter().product();
    for code in 0..total {
        let mut c = code;
        for (i, &m) in sizes.iter().enumerate().rev() {
            values[i] = (c % m) as u32;
            c /= m;
        }
        let continuous = points.iter().all(|&y| {
            let nbhd: Vec<usize> = (0..points.len()).filter(|&i| base.leq(y, points[i])).collect();
            (0..n).any(|a| nbhd.iter().all(|&i| sheaf.project(points[i], a) == values[i]))
        });
        if continuous {
            out.push(values.clone());
        }
    }
    out.sort();
    out
}

/// Softness from the definition: every section over every nonempty up-set
/// is the restriction of a global section.
pub fn is_soft_by_definition(sheaf: &SheafRep) -> bool {
    let base = sheaf.base();
    let all = base.all();
    let global = sections_by_definition(sheaf, all);
    let points: Vec<usize> = all.iter().collect();
    base.up_sets().into_iter().filter(|k| !k.is_empty()).all(|k| {
        let idx: Vec<usize> = (0..points.len()).filter(|&i| k.contains(points[i])).collect();
        let restricted: std::collections::HashSet<Vec<u32>> = global
            .iter()
            .map(|g| idx.iter().map(|&i| g[i]).collect())
            .collect();
        sections_by_definition(sheaf, k).iter().all(|s| restricted.contains(s))
    })
}
