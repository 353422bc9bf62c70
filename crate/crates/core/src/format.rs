//! JSON documents for posets, algebras, stalk assignments, decompositions
//! and maps. References to other documents are either inline objects or
//! paths relative to the referring file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::dlat::{priestley_dual, Decomposition, DistLattice, PriestleyDual};
use crate::error::{Error, Result};
use crate::poset::{FinitePoset, MonotoneMap};
use crate::sheafrep::StalkAssignment;
use crate::ualg::{Congruence, FiniteAlgebra, Signature, Symbol};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PosetDoc {
    pub elements: Vec<String>,
    /// Pairs `[x, y]` meaning `x < y`. Any generating relation is accepted;
    /// covers are written back.
    #[serde(default)]
    pub covers: Vec<(String, String)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraDoc {
    pub name: String,
    pub carrier: Vec<String>,
    pub signature: Vec<Symbol>,
    pub tables: BTreeMap<String, BTreeMap<String, String>>,
}

/// An inline document or a path to one.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Ref<T> {
    Path(String),
    Inline(T),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameHomDoc {
    pub poset: Ref<PosetDoc>,
    pub algebra: Ref<AlgebraDoc>,
    /// Blocks of element names per base point.
    pub stalks: BTreeMap<String, Vec<Vec<String>>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecompositionDoc {
    /// A distributive lattice whose dual is `X`; `x` may then be omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub algebra: Option<Ref<AlgebraDoc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<Ref<PosetDoc>>,
    pub y: Ref<PosetDoc>,
    pub map: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapDoc {
    pub target: Ref<PosetDoc>,
    pub map: BTreeMap<String, String>,
}

/// Kinds of document, recognised by their keys.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DocKind {
    Poset,
    Algebra,
    FrameHom,
    Decomposition,
    Map,
}

pub fn detect_kind(text: &str) -> Result<DocKind> {
    let v: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let obj = v
        .as_object()
        .ok_or_else(|| Error::Parse("expected a JSON object".into()))?;
    let has = |k: &str| obj.contains_key(k);
    Ok(if has("stalks") {
        DocKind::FrameHom
    } else if has("carrier") {
        DocKind::Algebra
    } else if has("elements") {
        DocKind::Poset
    } else if has("target") {
        DocKind::Map
    } else if has("map") {
        DocKind::Decomposition
    } else {
        return Err(Error::UnsupportedObject("unrecognised document".into()));
    })
}

fn parse<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

fn pretty<T: Serialize>(doc: &T) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("documents serialize");
    s.push('\n');
    s
}

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn resolve<T: for<'de> Deserialize<'de> + Clone>(r: &Ref<T>, base: &Path) -> Result<T> {
    match r {
        Ref::Inline(doc) => Ok(doc.clone()),
        Ref::Path(p) => {
            let path = base.join(p);
            parse(&read_text(&path)?).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
        }
    }
}

pub fn poset_doc(p: &FinitePoset) -> PosetDoc {
    PosetDoc {
        elements: p.names().to_vec(),
        covers: p
            .covers()
            .into_iter()
            .map(|(a, b)| (p.name(a).to_string(), p.name(b).to_string()))
            .collect(),
    }
}

pub fn poset_from_doc(doc: &PosetDoc) -> Result<FinitePoset> {
    let elements: Vec<&str> = doc.elements.iter().map(String::as_str).collect();
    let rel: Vec<(&str, &str)> = doc.covers.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
    FinitePoset::new(&elements, &rel)
}

pub fn poset_to_json(p: &FinitePoset) -> String {
    pretty(&poset_doc(p))
}

pub fn poset_from_json(text: &str) -> Result<FinitePoset> {
    poset_from_doc(&parse(text)?)
}

pub fn algebra_doc(a: &FiniteAlgebra) -> AlgebraDoc {
    AlgebraDoc {
        name: a.name().to_string(),
        carrier: a.carrier().to_vec(),
        signature: a.signature().symbols().to_vec(),
        tables: a.named_tables(),
    }
}

pub fn algebra_from_doc(doc: &AlgebraDoc) -> Result<FiniteAlgebra> {
    let sig = Signature::new(doc.signature.clone())?;
    FiniteAlgebra::from_named_tables(&doc.name, doc.carrier.clone(), sig, &doc.tables)
}

pub fn algebra_to_json(a: &FiniteAlgebra) -> String {
    pretty(&algebra_doc(a))
}

pub fn algebra_from_json(text: &str) -> Result<FiniteAlgebra> {
    algebra_from_doc(&parse(text)?)
}

fn named_blocks(theta: &Congruence, alg: &FiniteAlgebra) -> Vec<Vec<String>> {
    theta
        .blocks()
        .iter()
        .map(|b| b.iter().map(|&i| alg.element(i).to_string()).collect())
        .collect()
}

/// Inline document for a stalk assignment.
pub fn frame_hom_doc(sa: &StalkAssignment) -> FrameHomDoc {
    let base = sa.base();
    FrameHomDoc {
        poset: Ref::Inline(poset_doc(base)),
        algebra: Ref::Inline(algebra_doc(sa.algebra())),
        stalks: (0..base.len())
            .map(|y| (base.name(y).to_string(), named_blocks(sa.stalk(y), sa.algebra())))
            .collect(),
    }
}

pub fn frame_hom_to_json(sa: &StalkAssignment) -> String {
    pretty(&frame_hom_doc(sa))
}

pub fn frame_hom_from_doc(doc: &FrameHomDoc, base_dir: &Path) -> Result<StalkAssignment> {
    let base = Arc::new(poset_from_doc(&resolve(&doc.poset, base_dir)?)?);
    let alg = Arc::new(algebra_from_doc(&resolve(&doc.algebra, base_dir)?)?);
    for y in doc.stalks.keys() {
        base.index_of(y)?;
    }
    let mut stalks = Vec::with_capacity(base.len());
    for y in base.names() {
        let blocks = doc
            .stalks
            .get(y)
            .ok_or_else(|| Error::Parse(format!("no stalk given for {y}")))?;
        let idx = blocks
            .iter()
            .map(|b| b.iter().map(|e| alg.index_of(e)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        stalks.push(Congruence::from_blocks(alg.size(), &idx)?);
    }
    StalkAssignment::new(base, alg, stalks)
}

pub fn frame_hom_from_json(text: &str, base_dir: &Path) -> Result<StalkAssignment> {
    frame_hom_from_doc(&parse(text)?, base_dir)
}

/// A parsed decomposition, with the lattice and its dual when given.
#[derive(Clone, Debug)]
pub struct DecompositionInput {
    pub q: Decomposition,
    pub dual: Option<PriestleyDual>,
}

pub fn decomposition_doc(q: &Decomposition, algebra: Option<&FiniteAlgebra>) -> DecompositionDoc {
    let (x, y) = (q.source(), q.target());
    DecompositionDoc {
        algebra: algebra.map(|a| Ref::Inline(algebra_doc(a))),
        x: if algebra.is_some() {
            None
        } else {
            Some(Ref::Inline(poset_doc(x)))
        },
        y: Ref::Inline(poset_doc(y)),
        map: (0..x.len())
            .map(|i| (x.name(i).to_string(), y.name(q.apply(i)).to_string()))
            .collect(),
    }
}

pub fn decomposition_to_json(q: &Decomposition, algebra: Option<&FiniteAlgebra>) -> String {
    pretty(&decomposition_doc(q, algebra))
}

pub fn decomposition_from_doc(doc: &DecompositionDoc, base_dir: &Path) -> Result<DecompositionInput> {
    let dual = match &doc.algebra {
        Some(r) => {
            let alg = algebra_from_doc(&resolve(r, base_dir)?)?;
            Some(priestley_dual(&DistLattice::new(Arc::new(alg))?)?)
        }
        None => None,
    };
    let x = match (&doc.x, &dual) {
        (Some(r), d) => {
            let x = poset_from_doc(&resolve(r, base_dir)?)?;
            if let Some(d) = d {
                if x != **d.x() {
                    return Err(Error::Precondition("x differs from the dual of the algebra".into()));
                }
            }
            Arc::new(x)
        }
        (None, Some(d)) => d.x().clone(),
        (None, None) => return Err(Error::Parse("either x or algebra is required".into())),
    };
    let y = Arc::new(poset_from_doc(&resolve(&doc.y, base_dir)?)?);
    let map = map_by_names(&x, &y, &doc.map)?;
    Ok(DecompositionInput {
        q: Decomposition::new(x, y, map)?,
        dual,
    })
}

pub fn decomposition_from_json(text: &str, base_dir: &Path) -> Result<DecompositionInput> {
    decomposition_from_doc(&parse(text)?, base_dir)
}

fn map_by_names(x: &FinitePoset, y: &FinitePoset, map: &BTreeMap<String, String>) -> Result<Vec<usize>> {
    for k in map.keys() {
        x.index_of(k)?;
    }
    x.names()
        .iter()
        .map(|n| {
            let v = map.get(n).ok_or_else(|| Error::Parse(format!("no image given for {n}")))?;
            y.index_of(v)
        })
        .collect()
}

pub fn map_doc(f: &MonotoneMap) -> MapDoc {
    let (s, t) = (f.source(), f.target());
    MapDoc {
        target: Ref::Inline(poset_doc(t)),
        map: (0..s.len())
            .map(|i| (s.name(i).to_string(), t.name(f.apply(i)).to_string()))
            .collect(),
    }
}

pub fn map_to_json(f: &MonotoneMap) -> String {
    pretty(&map_doc(f))
}

/// A monotone map out of `source`.
pub fn map_from_json(text: &str, source: Arc<FinitePoset>, base_dir: &Path) -> Result<MonotoneMap> {
    let doc: MapDoc = parse(text)?;
    let target = Arc::new(poset_from_doc(&resolve(&doc.target, base_dir)?)?);
    let mapping = map_by_names(&source, &target, &doc.map)?;
    MonotoneMap::new(source, target, mapping)
}

/// Directory against which relative references in `path` resolve.
pub fn base_dir(path: &Path) -> PathBuf {
    path.parent().map(Path::to_path_buf).unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ualg::{chain_lattice, principal_congruence};

    #[test]
    fn poset_round_trip() {
        let p = FinitePoset::new(&["a", "b", "c"], &[("a", "b"), ("a", "c")]).unwrap();
        let text = poset_to_json(&p);
        assert_eq!(poset_from_json(&text).unwrap(), p);
        assert_eq!(detect_kind(&text).unwrap(), DocKind::Poset);
        assert!(matches!(poset_from_json("{\"elements\": 3}"), Err(Error::Parse(_))));
    }

    #[test]
    fn algebra_round_trip() {
        let c3 = chain_lattice(3);
        let text = algebra_to_json(&c3);
        assert!(text.contains("\"(0,m)\": \"0\""));
        assert_eq!(algebra_from_json(&text).unwrap(), c3);
        assert_eq!(detect_kind(&text).unwrap(), DocKind::Algebra);
    }

    #[test]
    fn frame_hom_round_trip() {
        let c3 = Arc::new(chain_lattice(3));
        let base = Arc::new(FinitePoset::antichain_named(vec!["l".into(), "r".into()]).unwrap());
        let sa = StalkAssignment::new(
            base,
            c3.clone(),
            vec![principal_congruence(&c3, 0, 1), principal_congruence(&c3, 1, 2)],
        )
        .unwrap();
        let text = frame_hom_to_json(&sa);
        assert_eq!(frame_hom_from_json(&text, Path::new(".")).unwrap(), sa);
        assert_eq!(detect_kind(&text).unwrap(), DocKind::FrameHom);
    }

    #[test]
    fn decomposition_round_trip() {
        let lat = DistLattice::new(Arc::new(chain_lattice(3))).unwrap();
        let d = priestley_dual(&lat).unwrap();
        let y = Arc::new(FinitePoset::antichain(1));
        let q = Decomposition::new(d.x().clone(), y, vec![0, 0]).unwrap();
        let text = decomposition_to_json(&q, Some(lat.algebra()));
        let back = decomposition_from_json(&text, Path::new(".")).unwrap();
        assert_eq!(back.q, q);
        assert!(back.dual.is_some());
        let text = decomposition_to_json(&q, None);
        assert_eq!(decomposition_from_json(&text, Path::new(".")).unwrap().q, q);
        assert_eq!(detect_kind(&text).unwrap(), DocKind::Decomposition);
    }

    #[test]
    fn map_round_trip() {
        let c2 = Arc::new(FinitePoset::chain(2));
        let f = MonotoneMap::collapse(c2.clone());
        let text = map_to_json(&f);
        assert_eq!(map_from_json(&text, c2, Path::new(".")).unwrap(), f);
    }
}
