//! The acceptance sweep: ten criteria, each a zero-failure check over an
//! enumerated corpus, some with a runtime limit.

use std::fmt;
use std::sync::Arc;
use std::time::{Duration, Instant};

use crate::corpus::{
    algebra_corpus, all_functions, bounded_lattices, distributive_lattices_dual_to, monotone_assignments,
    monotone_maps, mv_algebras, posets_up_to, small_algebras,
};
use crate::dlat::{
    interpolation_condition, priestley_dual, psi_assignment, psi_of_q, q_of_sheaf, Decomposition, DistLattice,
};
use crate::error::{Error, Result};
use crate::mv::{k_map, lambda_check, mv_sheaf, mv_spectrum};
use crate::oracle;
use crate::par::{self, Mode};
use crate::perm::{commute, commutes, crt_solve, generated_sublattice};
use crate::poset::{hofmann_mislove_check, FinitePoset, MonotoneMap};
use crate::sheafrep::{build_sheaf, direct_image, validate_frame_hom, FrameHom, SheafRep, StalkAssignment};
use crate::subset::Subset;
use crate::ualg::{chain_lattice, congruence_lattice, principal_congruence, Congruence, FiniteAlgebra};

/// Largest base poset in the sheaf sweeps.
pub const MAX_BASE: usize = 3;
/// Largest algebra in the sheaf sweeps.
pub const MAX_SHEAF_CARRIER: usize = 4;

#[derive(Clone, Copy, Debug)]
pub struct SuiteConfig {
    pub seed: u64,
    pub mode: Mode,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: crate::corpus::DEFAULT_SEED,
            mode: Mode::Parallel,
        }
    }
}

/// Identifier, title and runtime limit in seconds of every criterion.
pub const CRITERIA: [(u8, &str, Option<u64>); 10] = [
    (1, "congruence lattices agree with partition filtering", Some(60)),
    (2, "commuting congruences iff interpolation", Some(30)),
    (3, "frame homomorphisms give soft representations", Some(300)),
    (4, "failed assignments never give soft representations", None),
    (5, "decompositions and sheaves round-trip", None),
    (6, "direct-image kernels are preimage kernels", None),
    (7, "congruence count is 2^|X| for distributive lattices", None),
    (8, "MV-algebra suite", Some(120)),
    (9, "Chinese remainder solver agrees with search", None),
    (10, "Hofmann-Mislove bijection on posets up to 5 points", None),
];

#[derive(Clone, Debug)]
pub struct CriterionResult {
    pub id: u8,
    pub title: &'static str,
    pub checked: usize,
    pub failures: usize,
    pub first_failure: Option<String>,
    pub elapsed: Duration,
    pub limit: Option<Duration>,
}

impl CriterionResult {
    pub fn within_limit(&self) -> bool {
        self.limit.is_none_or(|l| self.elapsed < l)
    }

    pub fn passed(&self) -> bool {
        self.failures == 0 && self.checked > 0 && self.within_limit()
    }
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let limit = match self.limit {
            Some(l) => format!(" (limit {}s)", l.as_secs()),
            None => String::new(),
        };
        write!(
            f,
            "criterion {:>2} {} {:<52} {} checked, {} failures, {:.2}s{}",
            self.id,
            if self.passed() { "PASS" } else { "FAIL" },
            self.title,
            self.checked,
            self.failures,
            self.elapsed.as_secs_f64(),
            limit
        )?;
        if let Some(w) = &self.first_failure {
            write!(f, "\n    first failure: {w}")?;
        }
        Ok(())
    }
}

type Check = std::result::Result<(), String>;

fn check(ok: bool, witness: impl FnOnce() -> String) -> Check {
    if ok {
        Ok(())
    } else {
        Err(witness())
    }
}

fn err(e: Error) -> String {
    e.to_string()
}

pub fn run_criterion(id: u8, cfg: &SuiteConfig) -> Result<CriterionResult> {
    let &(_, title, limit) = CRITERIA
        .iter()
        .find(|c| c.0 == id)
        .ok_or_else(|| Error::Invalid(format!("no criterion {id}")))?;
    let start = Instant::now();
    let checks = match id {
        1 => congruence_oracle(cfg),
        2 => interpolation_equivalence(cfg),
        3 => main_round_trip(cfg),
        4 => converse_sensitivity(cfg),
        5 => dl_round_trip(cfg),
        6 => direct_image_kernels(cfg),
        7 => sp_count(cfg),
        8 => mv_suite(cfg),
        9 => crt_agreement(cfg),
        _ => hofmann_mislove(cfg),
    };
    let elapsed = start.elapsed();
    let failures: Vec<&String> = checks.iter().filter_map(|c| c.as_ref().err()).collect();
    Ok(CriterionResult {
        id,
        title,
        checked: checks.len(),
        failures: failures.len(),
        first_failure: failures.first().map(|s| s.to_string()),
        elapsed,
        limit: limit.map(Duration::from_secs),
    })
}

pub fn run_all(cfg: &SuiteConfig) -> Vec<CriterionResult> {
    CRITERIA
        .iter()
        .map(|c| run_criterion(c.0, cfg).expect("known criterion"))
        .collect()
}

fn describe(sa: &StalkAssignment) -> String {
    let base = sa.base();
    let stalks: Vec<String> = (0..base.len())
        .map(|y| format!("{}:{}", base.name(y), sa.stalk(y).fmt_with(sa.algebra())))
        .collect();
    format!(
        "{} over {} covers {:?} with {}",
        sa.algebra().name(),
        base.len(),
        base.covers(),
        stalks.join(" ")
    )
}

fn congruence_oracle(cfg: &SuiteConfig) -> Vec<Check> {
    let corpus = algebra_corpus(cfg.seed);
    par::map(cfg.mode, &corpus, |alg| {
        let fast = congruence_lattice(alg).map_err(err)?;
        let mut ours = fast.members().to_vec();
        ours.sort();
        let reference = oracle::congruences_by_filtering(alg);
        check(ours == reference, || {
            format!("{}: {} congruences, oracle {}", alg.name(), ours.len(), reference.len())
        })
    })
}

fn interpolation_equivalence(cfg: &SuiteConfig) -> Vec<Check> {
    let lattices = distributive_lattices_dual_to(MAX_BASE);
    par::map(cfg.mode, &lattices, |(p, lat)| -> Vec<Check> {
        let dual = match priestley_dual(lat) {
            Ok(d) => d,
            Err(e) => return vec![Err(err(e))],
        };
        let x = dual.x();
        let mut out = vec![check(x.is_isomorphic(p), || {
            format!("dual of Down({:?}) is not isomorphic to it", p.covers())
        })];
        let n = x.len();
        for c1 in Subset::all(n) {
            for c2 in Subset::all(n) {
                let comm = commutes(&dual.cong_from_closed(c1), &dual.cong_from_closed(c2));
                let interp = interpolation_condition(x, c1, c2).holds;
                out.push(check(comm == interp, || {
                    format!(
                        "X with covers {:?}, C1 = {}, C2 = {}: commute {comm}, interpolate {interp}",
                        x.covers(),
                        x.fmt_subset(c1),
                        x.fmt_subset(c2)
                    )
                }));
            }
        }
        out
    })
    .into_iter()
    .flatten()
    .collect()
}

/// Every (base, algebra) pair of the sheaf sweeps.
fn sheaf_tasks(cfg: &SuiteConfig) -> Vec<(Arc<FinitePoset>, Arc<FiniteAlgebra>)> {
    let bases: Vec<Arc<FinitePoset>> = posets_up_to(MAX_BASE).into_iter().map(Arc::new).collect();
    let algebras: Vec<Arc<FiniteAlgebra>> = small_algebras(cfg.seed, MAX_SHEAF_CARRIER)
        .into_iter()
        .map(Arc::new)
        .collect();
    let mut tasks = Vec::new();
    for a in &algebras {
        for b in &bases {
            tasks.push((b.clone(), a.clone()));
        }
    }
    tasks
}

/// Every monotone stalk assignment of a task, split by validation.
fn assignments(base: &Arc<FinitePoset>, alg: &Arc<FiniteAlgebra>) -> Result<Vec<(StalkAssignment, bool)>> {
    let con = congruence_lattice(alg)?;
    monotone_assignments(base, &con)
        .into_iter()
        .map(|stalks| {
            let sa = StalkAssignment::new(base.clone(), alg.clone(), stalks)?;
            let valid = validate_frame_hom(&sa).is_ok();
            Ok((sa, valid))
        })
        .collect()
}

fn main_round_trip(cfg: &SuiteConfig) -> Vec<Check> {
    let tasks = sheaf_tasks(cfg);
    par::map(cfg.mode, &tasks, |(base, alg)| -> Vec<Check> {
        let list = match assignments(base, alg) {
            Ok(l) => l,
            Err(e) => return vec![Err(err(e))],
        };
        list.into_iter()
            .filter(|(_, valid)| *valid)
            .map(|(sa, _)| {
                let sheaf = build_sheaf(&sa).map_err(err)?;
                check(sheaf.is_soft().soft, || format!("not soft: {}", describe(&sa)))?;
                let gs = sheaf.global_sections_check().map_err(err)?;
                check(gs.eta_isomorphism(), || format!("eta not an isomorphism: {}", describe(&sa)))?;
                check(gs.kernel_mismatch.is_none(), || {
                    format!("kernel differs from theta(K): {}", describe(&sa))
                })?;
                let back = sheaf.theta_of_sheaf().map_err(err)?;
                check(back == sa, || format!("theta of the sheaf differs: {}", describe(&sa)))
            })
            .collect()
    })
    .into_iter()
    .flatten()
    .collect()
}

fn converse_sensitivity(cfg: &SuiteConfig) -> Vec<Check> {
    let tasks = sheaf_tasks(cfg);
    par::map(cfg.mode, &tasks, |(base, alg)| -> Vec<Check> {
        let list = match assignments(base, alg) {
            Ok(l) => l,
            Err(e) => return vec![Err(err(e))],
        };
        list.into_iter()
            .filter(|(_, valid)| !*valid)
            .map(|(sa, _)| {
                let sheaf = build_sheaf(&sa).map_err(err)?;
                if !sheaf.is_soft().soft {
                    return Ok(());
                }
                let gs = sheaf.global_sections_check().map_err(err)?;
                check(!gs.eta_isomorphism(), || {
                    format!("candidate internal invariant violation: {}", describe(&sa))
                })
            })
            .collect()
    })
    .into_iter()
    .flatten()
    .collect()
}

fn dl_round_trip(cfg: &SuiteConfig) -> Vec<Check> {
    let lattices = distributive_lattices_dual_to(MAX_BASE);
    let targets: Vec<Arc<FinitePoset>> = posets_up_to(MAX_BASE).into_iter().map(Arc::new).collect();
    let mut tasks = Vec::new();
    for (_, lat) in &lattices {
        for y in &targets {
            tasks.push((lat.clone(), y.clone()));
        }
    }
    par::map(cfg.mode, &tasks, |(lat, y)| -> Vec<Check> {
        let dual = match priestley_dual(lat) {
            Ok(d) => d,
            Err(e) => return vec![Err(err(e))],
        };
        let x = dual.x().clone();
        let mut out = Vec::new();
        // q -> psi_q -> F -> q_F
        for map in all_functions(x.len(), y.len()) {
            let q = Decomposition::new(x.clone(), y.clone(), map).expect("in range");
            if !q.is_interpolating().holds {
                continue;
            }
            out.push((|| {
                let fh = psi_of_q(&dual, &q).map_err(err)?;
                let sheaf = build_sheaf(fh.assignment()).map_err(err)?;
                let back = q_of_sheaf(&dual, &sheaf).map_err(err)?;
                check(back == q, || {
                    format!("q {:?} into covers {:?} came back as {:?}", q.map(), y.covers(), back.map())
                })
            })());
        }
        // F -> q_F -> psi_{q_F}
        let lat_alg = dual.algebra().clone();
        let list = match assignments(y, &lat_alg) {
            Ok(l) => l,
            Err(e) => return vec![Err(err(e))],
        };
        for (sa, _) in list.into_iter().filter(|(_, v)| *v) {
            out.push((|| {
                let sheaf = build_sheaf(&sa).map_err(err)?;
                let q = q_of_sheaf(&dual, &sheaf).map_err(err)?;
                check(q.is_interpolating().holds, || format!("q_F does not interpolate: {}", describe(&sa)))?;
                let again = psi_assignment(&dual, &q).map_err(err)?;
                check(again == sa, || format!("psi of q_F differs: {}", describe(&sa)))
            })());
        }
        out
    })
    .into_iter()
    .flatten()
    .collect()
}

fn direct_image_kernels(cfg: &SuiteConfig) -> Vec<Check> {
    let tasks = sheaf_tasks(cfg);
    let targets: Vec<Arc<FinitePoset>> = posets_up_to(MAX_BASE).into_iter().map(Arc::new).collect();
    par::map(cfg.mode, &tasks, |(base, alg)| -> Vec<Check> {
        let list = match assignments(base, alg) {
            Ok(l) => l,
            Err(e) => return vec![Err(err(e))],
        };
        let maps: Vec<MonotoneMap> = targets
            .iter()
            .flat_map(|z| {
                monotone_maps(base, z)
                    .into_iter()
                    .map(|m| MonotoneMap::new(base.clone(), z.clone(), m).expect("monotone by construction"))
            })
            .collect();
        let mut out = Vec::new();
        for (sa, _) in list.into_iter().filter(|(_, v)| *v) {
            let sheaf = match build_sheaf(&sa) {
                Ok(s) => s,
                Err(e) => {
                    out.push(Err(err(e)));
                    continue;
                }
            };
            for f in &maps {
                out.push(direct_image_check(&sheaf, f));
            }
        }
        out
    })
    .into_iter()
    .flatten()
    .collect()
}

fn direct_image_check(sheaf: &SheafRep, f: &MonotoneMap) -> Check {
    let image = direct_image(sheaf, f).map_err(err)?;
    let z = f.target();
    let sa = sheaf.assignment();
    for k in z.up_sets() {
        let pre = f.preimage(k);
        check(image.restriction_kernel(k) == sa.theta(pre), || {
            format!(
                "{} along {:?}: kernel over {} differs",
                describe(sa),
                f.mapping(),
                z.fmt_subset(k)
            )
        })?;
    }
    let fh: FrameHom = validate_frame_hom(image.assignment())
        .map_err(|v| format!("direct image is not a frame homomorphism: {}", v.describe(image.assignment())))?;
    check(image.is_soft().soft, || format!("direct image not soft: {}", describe(fh.assignment())))
}

fn sp_count(cfg: &SuiteConfig) -> Vec<Check> {
    let mut lattices: Vec<DistLattice> = bounded_lattices(5)
        .into_iter()
        .filter_map(|a| DistLattice::new(Arc::new(a)).ok())
        .collect();
    lattices.extend(distributive_lattices_dual_to(4).into_iter().map(|(_, l)| l));
    lattices.extend(mv_algebras(12).iter().map(|a| a.lattice_reduct()));
    par::map(cfg.mode, &lattices, |lat| {
        let dual = priestley_dual(lat).map_err(err)?;
        let con = congruence_lattice(lat.algebra()).map_err(err)?;
        let expected = 1usize << dual.x().len();
        check(con.len() == expected, || {
            format!("{}: |Con A| = {}, 2^|X| = {expected}", lat.algebra().name(), con.len())
        })?;
        check(dual.correspondence_check().map_err(err)?, || {
            format!("{}: C -> theta_C is not a bijection", lat.algebra().name())
        })
    })
}

fn mv_suite(cfg: &SuiteConfig) -> Vec<Check> {
    let algebras = mv_algebras(12);
    par::map(cfg.mode, &algebras, |a| {
        let name = a.name();
        let con = congruence_lattice(a.algebra()).map_err(err)?;
        let members = con.members();
        for (i, t) in members.iter().enumerate() {
            for u in &members[i + 1..] {
                check(commutes(t, u), || format!("{name}: congruences do not commute"))?;
            }
        }
        check(con.is_distributive(), || format!("{name}: Con A not distributive"))?;
        let lambda = lambda_check(a).map_err(err)?;
        check(lambda.ok(), || format!("{name}: lambda {:?}", lambda.witness))?;
        let spec = mv_spectrum(a).map_err(err)?;
        check(spec.is_root_system, || format!("{name}: spectrum is not a root system"))?;
        let k = k_map(a).map_err(err)?;
        check(k.decomposition.is_interpolating().holds, || format!("{name}: k does not interpolate"))?;
        let s = mv_sheaf(a).map_err(err)?;
        check(s.sheaf_sections.ok(), || format!("{name}: global sections over Y are not A"))?;
        check(s.maximal_soft, || format!("{name}: direct image is not soft"))?;
        check(s.maximal_sections.eta_isomorphism(), || {
            format!("{name}: global sections over the maximal spectrum are not A")
        })
    })
}

fn crt_agreement(cfg: &SuiteConfig) -> Vec<Check> {
    let corpus = algebra_corpus(cfg.seed);
    let mut out: Vec<Check> = par::map(cfg.mode, &corpus, |alg| -> Vec<Check> {
        let con = match congruence_lattice(alg) {
            Ok(c) => c,
            Err(e) => return vec![Err(err(e))],
        };
        let members = con.members();
        let c = members.len();
        let mut families: Vec<Vec<usize>> = Vec::new();
        for i in 0..c {
            for j in i + 1..c {
                families.push(vec![i, j]);
                if c <= 6 {
                    for k in j + 1..c {
                        families.push(vec![i, j, k]);
                    }
                }
            }
        }
        let n = alg.size();
        let mut out = Vec::new();
        for fam in families {
            let congs: Vec<Congruence> = fam.iter().map(|&i| members[i].clone()).collect();
            let sub = match generated_sublattice(&congs) {
                Ok(s) => s,
                Err(e) => {
                    out.push(Err(err(e)));
                    continue;
                }
            };
            if !(sub.is_distributive && sub.pairwise_commuting) {
                continue;
            }
            for targets in all_functions(congs.len(), n) {
                let pre = (0..congs.len()).all(|i| {
                    (0..congs.len()).all(|j| {
                        (0..n).any(|b| congs[i].related(targets[i], b) && congs[j].related(b, targets[j]))
                    })
                });
                let constraints: Vec<(Congruence, usize)> =
                    congs.iter().cloned().zip(targets.iter().copied()).collect();
                let solutions = oracle::crt_exhaustive(n, &constraints);
                let got = crt_solve(alg, &constraints);
                out.push(match (pre, got) {
                    (true, Ok(a)) => check(solutions.first() == Some(&a), || {
                        format!("{}: solver gave {} but search gave {:?}", alg.name(), alg.element(a), solutions)
                    }),
                    (true, Err(e)) => Err(format!("{}: valid instance rejected: {e}", alg.name())),
                    (false, Err(Error::Precondition(_))) => Ok(()),
                    (false, other) => Err(format!("{}: invalid instance gave {other:?}", alg.name())),
                });
            }
        }
        out
    })
    .into_iter()
    .flatten()
    .collect();
    let c3 = chain_lattice(3);
    let t0m = principal_congruence(&c3, 0, 1);
    let tm1 = principal_congruence(&c3, 1, 2);
    out.push(check(
        matches!(crt_solve(&c3, &[(t0m.clone(), 0), (tm1.clone(), 2)]), Err(Error::Precondition(_)))
            && commute(&t0m, &tm1).map(|r| !r.commutes).unwrap_or(false),
        || "3-chain non-commuting instance was not rejected".into(),
    ));
    out
}

fn hofmann_mislove(cfg: &SuiteConfig) -> Vec<Check> {
    let posets = posets_up_to(5);
    par::map(cfg.mode, &posets, |p| {
        let r = hofmann_mislove_check(p).map_err(err)?;
        check(r.holds, || {
            format!("covers {:?}: {}", p.covers(), r.counterexample.clone().unwrap_or_default())
        })
    })
}
