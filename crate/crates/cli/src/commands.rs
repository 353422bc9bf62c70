use std::path::Path;
use std::sync::Arc;

use serde_json::{json, Value};
use softsheaf::corpus::DEFAULT_SEED;
use softsheaf::dlat::{priestley_dual, psi_of_q, DistLattice};
use softsheaf::format::{self, DocKind};
use softsheaf::mv::{self, MVAlgebra};
use softsheaf::par::Mode;
use softsheaf::perm::{commute, crt_solve};
use softsheaf::poset::FinitePoset;
use softsheaf::sheafrep::{build_sheaf, direct_image, roundtrip_main, validate_frame_hom, SheafRep, StalkAssignment};
use softsheaf::suite::{run_all, run_criterion, SuiteConfig};
use softsheaf::ualg::{congruence_lattice, principal_congruence, Congruence, FiniteAlgebra, Signature};
use softsheaf::{dot, Error, Result, Subset};

use crate::outcome::Outcome;

fn load_algebra(path: &Path) -> Result<FiniteAlgebra> {
    format::algebra_from_json(&format::read_text(path)?)
}

fn load_assignment(path: &Path) -> Result<StalkAssignment> {
    format::frame_hom_from_json(&format::read_text(path)?, &format::base_dir(path))
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))
}

fn blocks_json(theta: &Congruence, alg: &FiniteAlgebra) -> Value {
    json!(theta
        .blocks()
        .iter()
        .map(|b| b.iter().map(|&i| alg.element(i)).collect::<Vec<_>>())
        .collect::<Vec<_>>())
}

fn parse_pair(alg: &FiniteAlgebra, s: &str) -> Result<(usize, usize)> {
    let parts: Vec<&str> = s.split_whitespace().collect();
    if parts.len() != 2 {
        return Err(Error::Parse(format!("expected a pair of elements, got {s:?}")));
    }
    Ok((alg.index_of(parts[0])?, alg.index_of(parts[1])?))
}

fn principal_name(alg: &FiniteAlgebra, (a, b): (usize, usize)) -> String {
    format!("θ({},{})", alg.element(a), alg.element(b))
}

fn subset_names(p: &FinitePoset, s: Subset) -> Vec<String> {
    s.iter().map(|i| p.name(i).to_string()).collect()
}

pub fn alg_validate(path: &Path) -> Result<Outcome> {
    let alg = load_algebra(path)?;
    let mut lines = vec![format!(
        "{}: {} elements, {} operations",
        alg.name(),
        alg.size(),
        alg.signature().len()
    )];
    let mut report = json!({ "name": alg.name(), "size": alg.size() });
    let mut holds = true;
    let axioms = if *alg.signature() == Signature::bounded_lattice() {
        Some(("distributive lattice", DistLattice::new(Arc::new(alg.clone())).map(|_| ())))
    } else if *alg.signature() == mv::mv_signature() {
        Some(("MV-algebra", MVAlgebra::new(alg.clone()).map(|_| ())))
    } else {
        None
    };
    if let Some((kind, result)) = axioms {
        match result {
            Ok(()) => lines.push(format!("{kind} axioms hold")),
            Err(Error::Invalid(w)) => {
                holds = false;
                lines.push(format!("{kind} axioms fail: {w}"));
                report["witness"] = json!(w);
            }
            Err(e) => return Err(e),
        }
        report["axioms"] = json!(kind);
        report["holds"] = json!(holds);
    }
    Ok(Outcome::property(holds, lines, report))
}

pub fn alg_con(path: &Path, dot_out: Option<&Path>) -> Result<Outcome> {
    let alg = load_algebra(path)?;
    let con = congruence_lattice(&alg)?;
    let mut lines = vec![format!("{} congruences of {}", con.len(), alg.name())];
    lines.extend(con.members().iter().map(|c| format!("  {}", c.fmt_with(&alg))));
    let report = json!({
        "algebra": alg.name(),
        "count": con.len(),
        "distributive": con.is_distributive(),
        "congruences": con.members().iter().map(|c| blocks_json(c, &alg)).collect::<Vec<_>>(),
    });
    let mut out = Outcome::ok(lines, report);
    if let Some(p) = dot_out {
        write_file(p, &dot::con_lattice_dot(&alg, &con))?;
        out = out.with_artifact(p);
    }
    Ok(out)
}

pub fn con_commute(path: &Path, pairs: &[String]) -> Result<Outcome> {
    let alg = load_algebra(path)?;
    let pairs = pairs.iter().map(|s| parse_pair(&alg, s)).collect::<Result<Vec<_>>>()?;
    let congs: Vec<Congruence> = pairs.iter().map(|&(a, b)| principal_congruence(&alg, a, b)).collect();
    for i in 0..congs.len() {
        for j in i + 1..congs.len() {
            let r = commute(&congs[i], &congs[j])?;
            if let Some((a, b)) = r.witness {
                let (l, rname) = (principal_name(&alg, pairs[i]), principal_name(&alg, pairs[j]));
                let (first, second) = if r.in_left_first { (&l, &rname) } else { (&rname, &l) };
                let lines = vec![
                    format!("{l} and {rname} do not commute"),
                    format!(
                        "witness ({},{}) lies in {first} ∘ {second} but not in {second} ∘ {first}",
                        alg.element(a),
                        alg.element(b)
                    ),
                ];
                let report = json!({
                    "commute": false,
                    "left": l,
                    "right": rname,
                    "witness": [alg.element(a), alg.element(b)],
                    "witness_in_left_first": r.in_left_first,
                });
                return Ok(Outcome::property(false, lines, report));
            }
        }
    }
    let names: Vec<String> = pairs.iter().map(|&p| principal_name(&alg, p)).collect();
    Ok(Outcome::ok(
        vec![format!("{} commute pairwise", names.join(", "))],
        json!({ "commute": true, "congruences": names }),
    ))
}

pub fn con_crt(path: &Path, pairs: &[String], targets: &[String]) -> Result<Outcome> {
    let alg = load_algebra(path)?;
    if pairs.len() != targets.len() {
        return Err(Error::Parse(format!(
            "{} pairs but {} targets",
            pairs.len(),
            targets.len()
        )));
    }
    let pairs = pairs.iter().map(|s| parse_pair(&alg, s)).collect::<Result<Vec<_>>>()?;
    let constraints = pairs
        .iter()
        .zip(targets)
        .map(|(&(a, b), t)| Ok((principal_congruence(&alg, a, b), alg.index_of(t)?)))
        .collect::<Result<Vec<_>>>()?;
    let a = crt_solve(&alg, &constraints)?;
    Ok(Outcome::ok(
        vec![format!("solution: {}", alg.element(a))],
        json!({ "solution": alg.element(a) }),
    ))
}

pub fn dl_dual(path: &Path) -> Result<Outcome> {
    let lat = DistLattice::new(Arc::new(load_algebra(path)?))?;
    let dual = priestley_dual(&lat)?;
    let x = dual.x();
    let alg = lat.algebra();
    let mut lines = vec![format!("X has {} points, ordered by inclusion of prime ideals", x.len())];
    for (a, b) in x.covers() {
        lines.push(format!("  {} < {}", x.name(a), x.name(b)));
    }
    let mut hats = serde_json::Map::new();
    for e in 0..alg.size() {
        lines.push(format!("  hat({}) = {}", alg.element(e), x.fmt_subset(dual.hat(e))));
        hats.insert(alg.element(e).to_string(), json!(subset_names(x, dual.hat(e))));
    }
    let report = json!({ "x": format::poset_doc(x), "hat": hats });
    Ok(Outcome::ok(lines, report))
}

pub fn dl_sp(path: &Path) -> Result<Outcome> {
    let lat = DistLattice::new(Arc::new(load_algebra(path)?))?;
    let dual = priestley_dual(&lat)?;
    let con = congruence_lattice(lat.algebra())?;
    let expected = 1usize << dual.x().len();
    let bijective = dual.correspondence_check()?;
    let holds = con.len() == expected && bijective;
    let lines = vec![
        format!("|Con A| = {}, 2^|X| = {expected}", con.len()),
        format!(
            "subsets of X correspond to congruences: {}",
            if bijective { "yes" } else { "no" }
        ),
    ];
    let report = json!({ "congruences": con.len(), "expected": expected, "bijective": bijective });
    Ok(Outcome::property(holds, lines, report))
}

pub fn dl_interp(path: &Path) -> Result<Outcome> {
    let input = format::decomposition_from_json(&format::read_text(path)?, &format::base_dir(path))?;
    let q = &input.q;
    let (x, y) = (q.source(), q.target());
    let r = q.is_interpolating();
    if let Some((x1, x2)) = r.witness {
        let lines = vec![format!(
            "not interpolating: no z between {} and {} whose image is above {} and {}",
            x.name(x1),
            x.name(x2),
            y.name(q.apply(x1)),
            y.name(q.apply(x2))
        )];
        let report = json!({ "interpolating": false, "witness": [x.name(x1), x.name(x2)] });
        return Ok(Outcome::property(false, lines, report));
    }
    let mut lines = vec!["interpolating".to_string()];
    let mut report = json!({ "interpolating": true });
    if let Some(dual) = &input.dual {
        let fh = psi_of_q(dual, q)?;
        let alg = dual.algebra();
        let mut stalks = serde_json::Map::new();
        for t in 0..y.len() {
            let theta = fh.assignment().stalk(t);
            lines.push(format!("  psi at {}: {}", y.name(t), theta.fmt_with(alg)));
            stalks.insert(y.name(t).to_string(), blocks_json(theta, alg));
        }
        report["stalks"] = Value::Object(stalks);
    }
    Ok(Outcome::ok(lines, report))
}

fn validated_sheaf(sa: &StalkAssignment) -> std::result::Result<SheafRep, Outcome> {
    if let Err(v) = validate_frame_hom(sa) {
        let w = v.describe(sa);
        return Err(Outcome::property(
            false,
            vec![format!("not a frame homomorphism with commuting image: {w}")],
            json!({ "frame_hom": false, "witness": w }),
        ));
    }
    build_sheaf(sa).map_err(Outcome::from_error)
}

pub fn sheaf_build(path: &Path) -> Result<Outcome> {
    let sa = load_assignment(path)?;
    let sheaf = match validated_sheaf(&sa) {
        Ok(s) => s,
        Err(o) => return Ok(o),
    };
    let base = sheaf.base();
    let mut lines = vec![format!(
        "sheaf of {} over {} points",
        sa.algebra().name(),
        base.len()
    )];
    let mut sizes = serde_json::Map::new();
    for y in 0..base.len() {
        let s = sheaf.stalk_algebra(y).size();
        lines.push(format!("  stalk at {}: {} elements", base.name(y), s));
        sizes.insert(base.name(y).to_string(), json!(s));
    }
    let gs = sheaf.global_sections_check()?;
    lines.push(format!("  global sections: {}", gs.global_sections));
    Ok(Outcome::ok(
        lines,
        json!({ "frame_hom": true, "stalk_sizes": sizes, "global_sections": gs.global_sections }),
    ))
}

pub fn sheaf_soft(path: &Path) -> Result<Outcome> {
    let sa = load_assignment(path)?;
    let sheaf = build_sheaf(&sa)?;
    let r = sheaf.is_soft();
    match r.witness {
        None => Ok(Outcome::ok(vec!["soft".into()], json!({ "soft": true }))),
        Some((k, s)) => {
            let base = sheaf.base();
            let values: Vec<String> = k
                .iter()
                .zip(&s.values)
                .map(|(y, &v)| format!("{}={}", base.name(y), sheaf.stalk_algebra(y).element(v as usize)))
                .collect();
            let lines = vec![format!(
                "not soft: the section {} over {} has no global extension",
                values.join(" "),
                base.fmt_subset(k)
            )];
            let report = json!({ "soft": false, "up_set": subset_names(base, k), "section": values });
            Ok(Outcome::property(false, lines, report))
        }
    }
}

pub fn sheaf_roundtrip(path: &Path) -> Result<Outcome> {
    let sa = load_assignment(path)?;
    let sheaf = match validated_sheaf(&sa) {
        Ok(s) => s,
        Err(o) => return Ok(o),
    };
    let fh = validate_frame_hom(&sa).expect("validated above");
    let back = roundtrip_main(&fh)?;
    let gs = sheaf.global_sections_check()?;
    let holds = back && gs.ok();
    let lines = vec![
        format!("soft and theta recovered: {}", if back { "yes" } else { "no" }),
        format!(
            "A is isomorphic to the global sections: {}",
            if gs.eta_isomorphism() { "yes" } else { "no" }
        ),
        format!(
            "kernels over up-sets equal theta(K): {}",
            if gs.kernel_mismatch.is_none() { "yes" } else { "no" }
        ),
    ];
    let report = json!({
        "roundtrip": back,
        "eta_isomorphism": gs.eta_isomorphism(),
        "kernels_match": gs.kernel_mismatch.is_none(),
    });
    Ok(Outcome::property(holds, lines, report))
}

pub fn sheaf_direct_image(path: &Path, map: &Path, out: Option<&Path>) -> Result<Outcome> {
    let sa = load_assignment(path)?;
    let sheaf = build_sheaf(&sa)?;
    let f = format::map_from_json(&format::read_text(map)?, sa.base().clone(), &format::base_dir(map))?;
    let image = direct_image(&sheaf, &f)?;
    let doc = format::frame_hom_to_json(image.assignment());
    let z = f.target();
    let mut lines = vec![format!("direct image over {} points", z.len())];
    for t in 0..z.len() {
        lines.push(format!(
            "  stalk at {}: {}",
            z.name(t),
            image.assignment().stalk(t).fmt_with(sa.algebra())
        ));
    }
    let report: Value = serde_json::from_str(&doc).expect("valid JSON");
    let mut outcome = Outcome::ok(lines, report);
    if let Some(p) = out {
        write_file(p, &doc)?;
        outcome = outcome.with_artifact(p);
    }
    Ok(outcome)
}

pub fn mv_generate(ns: &[usize], out: Option<&Path>) -> Result<Outcome> {
    let a = if ns.len() == 1 {
        mv::luk_chain(ns[0])?
    } else {
        mv::luk_product(ns)?
    };
    let doc = format::algebra_to_json(a.algebra());
    match out {
        Some(p) => {
            write_file(p, &doc)?;
            Ok(Outcome::ok(
                vec![format!("{}: {} elements", a.name(), a.size())],
                json!({ "name": a.name(), "size": a.size() }),
            )
            .with_artifact(p))
        }
        None => Ok(Outcome::ok(
            vec![doc.trim_end().to_string()],
            serde_json::from_str(&doc).expect("valid JSON"),
        )),
    }
}

fn load_mv(path: &Path) -> Result<MVAlgebra> {
    MVAlgebra::new(load_algebra(path)?)
}

pub fn mv_spectrum(path: &Path, dot_out: Option<&Path>) -> Result<Outcome> {
    let a = load_mv(path)?;
    let s = mv::mv_spectrum(&a)?;
    let mut lines = vec![format!("{} prime ideals", s.y.len())];
    for p in 0..s.y.len() {
        lines.push(format!("  {} below maximal {}", s.y.name(p), s.z.name(s.m.apply(p))));
    }
    lines.push(format!("root system: {}", if s.is_root_system { "yes" } else { "no" }));
    let report = json!({
        "spectrum": format::poset_doc(&s.y),
        "root_system": s.is_root_system,
        "maximal": (0..s.y.len()).map(|p| s.z.name(s.m.apply(p))).collect::<Vec<_>>(),
    });
    let mut outcome = Outcome::property(s.is_root_system, lines, report);
    if let Some(p) = dot_out {
        write_file(p, &dot::poset_dot(&s.y))?;
        outcome = outcome.with_artifact(p);
    }
    Ok(outcome)
}

pub fn mv_sheaf(path: &Path) -> Result<Outcome> {
    let a = load_mv(path)?;
    let s = mv::mv_sheaf(&a)?;
    let y = &s.k.spectrum.y;
    let mut lines = vec![format!("sheaf of {} over {} prime ideals", a.name(), y.len())];
    let mut sizes = serde_json::Map::new();
    for p in 0..y.len() {
        let n = s.sheaf.stalk_algebra(p).size();
        lines.push(format!("  stalk at {}: {} elements", y.name(p), n));
        sizes.insert(y.name(p).to_string(), json!(n));
    }
    lines.push(format!("  global sections: {}", s.sheaf_sections.global_sections));
    lines.push(format!(
        "direct image over the maximal spectrum: soft {}, represents A {}",
        if s.maximal_soft { "yes" } else { "no" },
        if s.maximal_sections.eta_isomorphism() { "yes" } else { "no" }
    ));
    let holds = s.sheaf_sections.ok() && s.maximal_soft && s.maximal_sections.eta_isomorphism();
    let report = json!({
        "stalk_sizes": sizes,
        "global_sections": s.sheaf_sections.global_sections,
        "k": s.k.decomposition.map().iter().map(|&p| y.name(p)).collect::<Vec<_>>(),
        "maximal_soft": s.maximal_soft,
        "maximal_represents": s.maximal_sections.eta_isomorphism(),
    });
    Ok(Outcome::property(holds, lines, report))
}

pub fn suite_run(seed: Option<u64>, criterion: Option<u8>, sequential: bool) -> Result<Outcome> {
    let cfg = SuiteConfig {
        seed: seed.unwrap_or(DEFAULT_SEED),
        mode: if sequential { Mode::Sequential } else { Mode::Parallel },
    };
    let results = match criterion {
        Some(id) => vec![run_criterion(id, &cfg)?],
        None => run_all(&cfg),
    };
    let lines = results.iter().map(|r| r.to_string()).collect();
    let report = json!(results
        .iter()
        .map(|r| json!({
            "criterion": r.id,
            "title": r.title,
            "passed": r.passed(),
            "checked": r.checked,
            "failures": r.failures,
            "first_failure": r.first_failure,
            "seconds": r.elapsed.as_secs_f64(),
            "limit_seconds": r.limit.map(|l| l.as_secs()),
        }))
        .collect::<Vec<_>>());
    Ok(Outcome::property(results.iter().all(|r| r.passed()), lines, report))
}

pub fn export_dot(path: &Path, out: Option<&Path>) -> Result<Outcome> {
    let text = format::read_text(path)?;
    let base = format::base_dir(path);
    let (kind, doc) = match format::detect_kind(&text)? {
        DocKind::Poset => ("poset", dot::poset_dot(&format::poset_from_json(&text)?)),
        DocKind::Algebra => {
            let alg = format::algebra_from_json(&text)?;
            ("congruence lattice", dot::con_lattice_dot(&alg, &congruence_lattice(&alg)?))
        }
        DocKind::FrameHom => {
            let sheaf = build_sheaf(&format::frame_hom_from_json(&text, &base)?)?;
            ("etale space", dot::etale_dot(&sheaf))
        }
        DocKind::Decomposition => {
            let input = format::decomposition_from_json(&text, &base)?;
            ("decomposition", dot::decomposition_dot(&input.q))
        }
        DocKind::Map => {
            return Err(Error::UnsupportedObject("maps have no diagram".into()));
        }
    };
    match out {
        Some(p) => {
            write_file(p, &doc)?;
            Ok(Outcome::ok(vec![format!("{kind} diagram")], json!({ "kind": kind })).with_artifact(p))
        }
        None => Ok(Outcome::ok(
            vec![doc.trim_end().to_string()],
            json!({ "kind": kind, "dot": doc }),
        )),
    }
}
