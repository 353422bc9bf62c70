//! Finite universal algebras given by operation tables.

mod congruence;
mod lattice;

pub use congruence::{generated_congruence, principal_congruence, Congruence};
pub use lattice::{congruence_lattice, congruence_lattice_with, ConLatticeOptions, CongruenceLattice};

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An operation symbol with its arity. Constants have arity 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Symbol {
    #[serde(rename = "symbol")]
    pub name: String,
    pub arity: usize,
}

impl Symbol {
    pub fn new(name: impl Into<String>, arity: usize) -> Self {
        Symbol {
            name: name.into(),
            arity,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Signature {
    symbols: Vec<Symbol>,
}

impl Signature {
    pub fn new(symbols: Vec<Symbol>) -> Result<Self> {
        for (i, s) in symbols.iter().enumerate() {
            if symbols[..i].iter().any(|t| t.name == s.name) {
                return Err(Error::DuplicateElement(format!("symbol {}", s.name)));
            }
        }
        Ok(Signature { symbols })
    }

    /// Bounded lattice signature: `meet`, `join` (binary), `bot`, `top` (constants).
    pub fn bounded_lattice() -> Self {
        Signature {
            symbols: vec![
                Symbol::new("meet", 2),
                Symbol::new("join", 2),
                Symbol::new("bot", 0),
                Symbol::new("top", 0),
            ],
        }
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.symbols.iter().position(|s| s.name == name)
    }
}

/// A finite algebra: a carrier of named elements plus one total table per
/// operation symbol.
///
/// Elements are addressed by index into the carrier. Table entries are
/// stored row-major: the tuple `(x0, .., x{k-1})` lives at
/// `sum x_i * n^(k-1-i)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FiniteAlgebra {
    name: String,
    carrier: Vec<String>,
    signature: Signature,
    tables: Vec<Vec<usize>>,
}

impl FiniteAlgebra {
    /// Builds an algebra from index tables, validating totality and range.
    pub fn from_tables(
        name: impl Into<String>,
        carrier: Vec<String>,
        signature: Signature,
        tables: Vec<Vec<usize>>,
    ) -> Result<Self> {
        let n = carrier.len();
        for (i, c) in carrier.iter().enumerate() {
            if carrier[..i].contains(c) {
                return Err(Error::DuplicateElement(c.clone()));
            }
        }
        if tables.len() != signature.len() {
            return Err(Error::SignatureMismatch(format!(
                "{} tables for {} symbols",
                tables.len(),
                signature.len()
            )));
        }
        for (sym, table) in signature.symbols.iter().zip(&tables) {
            let expected = table_len(n, sym.arity);
            if table.len() != expected {
                return Err(Error::PartialTable {
                    symbol: sym.name.clone(),
                    args: format!("({} of {} entries given)", table.len(), expected),
                });
            }
            if let Some(&v) = table.iter().find(|&&v| v >= n) {
                return Err(Error::Range {
                    symbol: sym.name.clone(),
                    args: "(some tuple)".into(),
                    value: v.to_string(),
                });
            }
        }
        Ok(FiniteAlgebra {
            name: name.into(),
            carrier,
            signature,
            tables,
        })
    }

    /// Builds an algebra by evaluating `f(symbol_index, args)` on every tuple.
    pub fn from_fn<F>(name: impl Into<String>, carrier: Vec<String>, signature: Signature, mut f: F) -> Result<Self>
    where
        F: FnMut(usize, &[usize]) -> usize,
    {
        let n = carrier.len();
        let mut tables = Vec::with_capacity(signature.len());
        for (op, sym) in signature.symbols.iter().enumerate() {
            let mut table = Vec::with_capacity(table_len(n, sym.arity));
            for_each_tuple(n, sym.arity, |args| table.push(f(op, args)));
            tables.push(table);
        }
        Self::from_tables(name, carrier, signature, tables)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn carrier(&self) -> &[String] {
        &self.carrier
    }

    pub fn size(&self) -> usize {
        self.carrier.len()
    }

    pub fn element(&self, i: usize) -> &str {
        &self.carrier[i]
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.carrier
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| Error::UnknownElement(name.to_string()))
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn table(&self, op: usize) -> &[usize] {
        &self.tables[op]
    }

    pub fn op_index(&self, name: &str) -> Result<usize> {
        self.signature
            .index_of(name)
            .ok_or_else(|| Error::UnknownSymbol(name.to_string()))
    }

    #[inline]
    pub fn apply(&self, op: usize, args: &[usize]) -> usize {
        debug_assert_eq!(args.len(), self.signature.symbols[op].arity);
        let n = self.carrier.len();
        let idx = args.iter().fold(0, |acc, &a| acc * n + a);
        self.tables[op][idx]
    }

    /// Applies a binary operation.
    #[inline]
    pub fn apply2(&self, op: usize, a: usize, b: usize) -> usize {
        self.tables[op][a * self.carrier.len() + b]
    }

    /// Applies the operation named `name`; panics if it is absent.
    pub fn eval(&self, name: &str, args: &[usize]) -> usize {
        let op = self.op_index(name).expect("operation present");
        self.apply(op, args)
    }

    /// Checks that `map` (indices into `target`) commutes with every
    /// operation. Signatures must agree.
    pub fn check_homomorphism(&self, target: &FiniteAlgebra, map: &[usize]) -> Result<()> {
        if self.signature != target.signature {
            return Err(Error::SignatureMismatch(format!(
                "{} vs {}",
                self.name, target.name
            )));
        }
        if map.len() != self.size() || map.iter().any(|&m| m >= target.size()) {
            return Err(Error::NotHomomorphism("map is not total into the target".into()));
        }
        for (op, sym) in self.signature.symbols.iter().enumerate() {
            let mut bad = None;
            let mut image = vec![0; sym.arity];
            for_each_tuple(self.size(), sym.arity, |args| {
                if bad.is_some() {
                    return;
                }
                for (slot, &a) in image.iter_mut().zip(args) {
                    *slot = map[a];
                }
                if map[self.apply(op, args)] != target.apply(op, &image) {
                    bad = Some(args.to_vec());
                }
            });
            if let Some(args) = bad {
                return Err(Error::NotHomomorphism(format!(
                    "{} fails at {}",
                    sym.name,
                    self.fmt_tuple(&args)
                )));
            }
        }
        Ok(())
    }

    /// Kernel of a homomorphism: the partition of the source into fibres.
    pub fn kernel(&self, target: &FiniteAlgebra, map: &[usize]) -> Result<Congruence> {
        self.check_homomorphism(target, map)?;
        Ok(Congruence::from_labels(map))
    }

    /// Quotient by a congruence together with the projection map. Quotient
    /// elements are named by their block, e.g. `[0,m]`.
    pub fn quotient(&self, theta: &Congruence) -> Result<(FiniteAlgebra, Vec<usize>)> {
        if theta.size() != self.size() {
            return Err(Error::ForeignCongruence(format!(
                "partition of {} elements on an algebra of {}",
                theta.size(),
                self.size()
            )));
        }
        if let Some(w) = theta.compatibility_witness(self) {
            return Err(Error::ForeignCongruence(w));
        }
        let blocks = theta.blocks();
        let carrier: Vec<String> = blocks
            .iter()
            .map(|b| {
                let names: Vec<&str> = b.iter().map(|&i| self.carrier[i].as_str()).collect();
                format!("[{}]", names.join(","))
            })
            .collect();
        let reps: Vec<usize> = blocks.iter().map(|b| b[0]).collect();
        let projection: Vec<usize> = (0..self.size()).map(|a| theta.label(a)).collect();
        let mut rep_args = Vec::new();
        let quotient = FiniteAlgebra::from_fn(
            format!("{}/~", self.name),
            carrier,
            self.signature.clone(),
            |op, args| {
                rep_args.clear();
                rep_args.extend(args.iter().map(|&b| reps[b]));
                projection[self.apply(op, &rep_args)]
            },
        )?;
        Ok((quotient, projection))
    }

    /// Subalgebra test for a set of element indices.
    pub fn is_closed_subset(&self, members: &[bool]) -> bool {
        self.signature.symbols.iter().enumerate().all(|(op, sym)| {
            let mut ok = true;
            for_each_tuple(self.size(), sym.arity, |args| {
                if ok && args.iter().all(|&a| members[a]) && !members[self.apply(op, args)] {
                    ok = false;
                }
            });
            ok
        })
    }

    pub fn fmt_tuple(&self, args: &[usize]) -> String {
        let parts: Vec<&str> = args.iter().map(|&a| self.carrier[a].as_str()).collect();
        format!("({})", parts.join(","))
    }

    /// Table contents keyed by symbol and argument tuple, in the textual
    /// form used by the algebra file format.
    pub fn named_tables(&self) -> BTreeMap<String, BTreeMap<String, String>> {
        let mut out = BTreeMap::new();
        for (op, sym) in self.signature.symbols.iter().enumerate() {
            let mut entries = BTreeMap::new();
            for_each_tuple(self.size(), sym.arity, |args| {
                entries.insert(
                    self.fmt_tuple(args),
                    self.carrier[self.apply(op, args)].clone(),
                );
            });
            out.insert(sym.name.clone(), entries);
        }
        out
    }

    /// Builds an algebra from named table entries such as `"(x,y)" -> "z"`.
    pub fn from_named_tables(
        name: impl Into<String>,
        carrier: Vec<String>,
        signature: Signature,
        tables: &BTreeMap<String, BTreeMap<String, String>>,
    ) -> Result<Self> {
        let n = carrier.len();
        let index: HashMap<&str, usize> =
            carrier.iter().enumerate().map(|(i, c)| (c.as_str(), i)).collect();
        if index.len() != n {
            let dup = carrier
                .iter()
                .enumerate()
                .find(|(i, c)| carrier[..*i].contains(c))
                .map(|(_, c)| c.clone())
                .unwrap_or_default();
            return Err(Error::DuplicateElement(dup));
        }
        if let Some(extra) = tables.keys().find(|k| signature.index_of(k).is_none()) {
            return Err(Error::UnknownSymbol(extra.clone()));
        }
        let mut out = Vec::with_capacity(signature.len());
        for sym in &signature.symbols {
            let entries = tables.get(&sym.name).ok_or_else(|| Error::PartialTable {
                symbol: sym.name.clone(),
                args: "(no table)".into(),
            })?;
            let mut table = vec![usize::MAX; table_len(n, sym.arity)];
            for (key, value) in entries {
                let args = split_tuple(key)?;
                if args.len() != sym.arity {
                    return Err(Error::ArityMismatch {
                        symbol: sym.name.clone(),
                        expected: sym.arity,
                        found: args.len(),
                    });
                }
                let mut idx = 0;
                for a in &args {
                    let i = *index
                        .get(a.as_str())
                        .ok_or_else(|| Error::UnknownElement(a.clone()))?;
                    idx = idx * n + i;
                }
                let v = *index.get(value.as_str()).ok_or_else(|| Error::Range {
                    symbol: sym.name.clone(),
                    args: key.clone(),
                    value: value.clone(),
                })?;
                table[idx] = v;
            }
            if let Some(missing) = table.iter().position(|&v| v == usize::MAX) {
                let mut args = vec![0; sym.arity];
                let mut rest = missing;
                for slot in args.iter_mut().rev() {
                    *slot = rest % n;
                    rest /= n;
                }
                return Err(Error::PartialTable {
                    symbol: sym.name.clone(),
                    args: format!(
                        "({})",
                        args.iter().map(|&a| carrier[a].as_str()).collect::<Vec<_>>().join(",")
                    ),
                });
            }
            out.push(table);
        }
        Self::from_tables(name, carrier, signature, out)
    }
}

/// Splits `"(a,(b,c))"` into `["a", "(b,c)"]`, respecting nesting.
pub fn split_tuple(key: &str) -> Result<Vec<String>> {
    let key = key.trim();
    let inner = key
        .strip_prefix('(')
        .and_then(|k| k.strip_suffix(')'))
        .ok_or_else(|| Error::Parse(format!("table key `{key}` is not a parenthesised tuple")))?;
    if inner.trim().is_empty() {
        return Ok(Vec::new());
    }
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for ch in inner.chars() {
        match ch {
            '(' | '[' => {
                depth += 1;
                cur.push(ch);
            }
            ')' | ']' => {
                depth -= 1;
                if depth < 0 {
                    return Err(Error::Parse(format!("unbalanced key `{key}`")));
                }
                cur.push(ch);
            }
            ',' if depth == 0 => parts.push(std::mem::take(&mut cur).trim().to_string()),
            _ => cur.push(ch),
        }
    }
    if depth != 0 {
        return Err(Error::Parse(format!("unbalanced key `{key}`")));
    }
    parts.push(cur.trim().to_string());
    Ok(parts)
}

#[inline]
fn table_len(n: usize, arity: usize) -> usize {
    n.pow(arity as u32)
}

/// Calls `f` on every tuple in `{0..n}^arity`, in row-major order.
pub fn for_each_tuple<F: FnMut(&[usize])>(n: usize, arity: usize, mut f: F) {
    if arity == 0 {
        f(&[]);
        return;
    }
    if n == 0 {
        return;
    }
    let mut t = vec![0usize; arity];
    loop {
        f(&t);
        let mut k = arity;
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            t[k] += 1;
            if t[k] < n {
                break;
            }
            t[k] = 0;
        }
    }
}

/// Direct product with componentwise operations, plus the projections.
/// Elements are tuples in lexicographic order (first factor most
/// significant) and are named `(a,b,..)`. The empty product is the
/// one-element algebra over `signature`.
pub fn product(
    signature: &Signature,
    factors: &[&FiniteAlgebra],
) -> Result<(FiniteAlgebra, Vec<Vec<usize>>)> {
    for f in factors {
        if f.signature != *signature {
            return Err(Error::SignatureMismatch(format!("factor {}", f.name)));
        }
    }
    let sizes: Vec<usize> = factors.iter().map(|f| f.size()).collect();
    let total: usize = sizes.iter().product();
    let decode = |mut idx: usize| -> Vec<usize> {
        let mut coords = vec![0; sizes.len()];
        for (k, &s) in sizes.iter().enumerate().rev() {
            coords[k] = idx % s;
            idx /= s;
        }
        coords
    };
    let coords: Vec<Vec<usize>> = (0..total).map(decode).collect();
    let carrier: Vec<String> = coords
        .iter()
        .map(|c| {
            let parts: Vec<&str> = c.iter().zip(factors).map(|(&i, f)| f.element(i)).collect();
            format!("({})", parts.join(","))
        })
        .collect();
    let name = if factors.is_empty() {
        "1".to_string()
    } else {
        factors.iter().map(|f| f.name.as_str()).collect::<Vec<_>>().join("x")
    };
    let mut fargs = Vec::new();
    let alg = FiniteAlgebra::from_fn(name, carrier, signature.clone(), |op, args| {
        let mut idx = 0;
        for (k, f) in factors.iter().enumerate() {
            fargs.clear();
            fargs.extend(args.iter().map(|&a| coords[a][k]));
            idx = idx * sizes[k] + f.apply(op, &fargs);
        }
        idx
    })?;
    let projections = (0..factors.len())
        .map(|k| coords.iter().map(|c| c[k]).collect())
        .collect();
    Ok((alg, projections))
}

/// Two-element bounded lattice `{0, 1}`.
pub fn two_element_lattice() -> FiniteAlgebra {
    chain_lattice(2)
}

/// Bounded lattice on a chain. Elements are `0`, `1` for `n = 2`, `0`, `m`,
/// `1` for `n = 3`, and `0`, `c1`, .., `1` otherwise.
pub fn chain_lattice(n: usize) -> FiniteAlgebra {
    assert!(n >= 1);
    let carrier: Vec<String> = match n {
        1 => vec!["0".into()],
        2 => vec!["0".into(), "1".into()],
        3 => vec!["0".into(), "m".into(), "1".into()],
        _ => (0..n)
            .map(|i| match i {
                0 => "0".to_string(),
                i if i == n - 1 => "1".to_string(),
                i => format!("c{i}"),
            })
            .collect(),
    };
    FiniteAlgebra::from_fn(format!("chain{n}"), carrier, Signature::bounded_lattice(), |op, a| {
        match op {
            0 => a[0].min(a[1]),
            1 => a[0].max(a[1]),
            2 => 0,
            _ => n - 1,
        }
    })
    .expect("chain tables are total")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn make_algebra_examples() {
        let two = two_element_lattice();
        assert_eq!(two.size(), 2);
        assert_eq!(two.eval("join", &[0, 1]), 1);
        let c3 = chain_lattice(3);
        assert_eq!(c3.carrier(), &["0", "m", "1"]);
        assert_eq!(c3.eval("meet", &[1, 2]), 1);
    }

    #[test]
    fn named_table_errors() {
        let sig = Signature::new(vec![Symbol::new("f", 1)]).unwrap();
        let carrier = vec!["a".to_string(), "b".to_string()];
        let mut tables = BTreeMap::new();
        let mut f = BTreeMap::new();
        f.insert("(a)".to_string(), "c".to_string());
        f.insert("(b)".to_string(), "a".to_string());
        tables.insert("f".to_string(), f.clone());
        assert!(matches!(
            FiniteAlgebra::from_named_tables("x", carrier.clone(), sig.clone(), &tables),
            Err(Error::Range { .. })
        ));
        f.insert("(a)".to_string(), "b".to_string());
        f.remove("(b)");
        tables.insert("f".to_string(), f.clone());
        assert!(matches!(
            FiniteAlgebra::from_named_tables("x", carrier.clone(), sig.clone(), &tables),
            Err(Error::PartialTable { .. })
        ));
        f.insert("(a,b)".to_string(), "a".to_string());
        tables.insert("f".to_string(), f);
        assert!(matches!(
            FiniteAlgebra::from_named_tables("x", carrier, sig, &tables),
            Err(Error::ArityMismatch { .. })
        ));
    }

    #[test]
    fn named_tables_round_trip() {
        let (p, _) = product(
            &Signature::bounded_lattice(),
            &[&two_element_lattice(), &chain_lattice(3)],
        )
        .unwrap();
        let back = FiniteAlgebra::from_named_tables(
            p.name(),
            p.carrier().to_vec(),
            p.signature().clone(),
            &p.named_tables(),
        )
        .unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn split_nested_keys() {
        assert_eq!(split_tuple("((0,1), (1,1))").unwrap(), vec!["(0,1)", "(1,1)"]);
        assert_eq!(split_tuple("()").unwrap(), Vec::<String>::new());
        assert_eq!(split_tuple("([0,m])").unwrap(), vec!["[0,m]"]);
        assert!(split_tuple("(a").is_err());
    }

    #[test]
    fn product_examples() {
        let two = two_element_lattice();
        let sig = Signature::bounded_lattice();
        let (b4, proj) = product(&sig, &[&two, &two]).unwrap();
        assert_eq!(b4.carrier(), &["(0,0)", "(0,1)", "(1,0)", "(1,1)"]);
        assert_eq!(b4.eval("join", &[1, 2]), 3);
        assert_eq!(b4.eval("meet", &[1, 2]), 0);
        for p in &proj {
            b4.check_homomorphism(&two, p).unwrap();
        }
        let (single, _) = product(&sig, &[&two]).unwrap();
        assert_eq!(single.size(), 2);
        single.check_homomorphism(&two, &[0, 1]).unwrap();
        let (empty, proj) = product(&sig, &[]).unwrap();
        assert_eq!(empty.size(), 1);
        assert!(proj.is_empty());
        let other = FiniteAlgebra::from_fn("u", vec!["a".into()], Signature::new(vec![Symbol::new("g", 1)]).unwrap(), |_, _| 0).unwrap();
        assert!(matches!(product(&sig, &[&two, &other]), Err(Error::SignatureMismatch(_))));
    }

    #[test]
    fn quotient_examples() {
        let two = two_element_lattice();
        let sig = Signature::bounded_lattice();
        let (b4, proj) = product(&sig, &[&two, &two]).unwrap();
        let (q, p) = b4.quotient(&Congruence::identity(4)).unwrap();
        assert_eq!(q.size(), 4);
        b4.check_homomorphism(&q, &p).unwrap();
        let (q, _) = b4.quotient(&Congruence::total(4)).unwrap();
        assert_eq!(q.size(), 1);
        let ker = b4.kernel(&two, &proj[0]).unwrap();
        let (q, p) = b4.quotient(&ker).unwrap();
        assert_eq!(q.size(), 2);
        // (2x2)/ker(pi_1) is the two-element lattice
        q.check_homomorphism(&two, &[0, 1]).unwrap();
        two.check_homomorphism(&q, &[0, 1]).unwrap();
        assert_eq!(b4.kernel(&q, &p).unwrap(), ker);
        assert!(matches!(
            b4.quotient(&Congruence::identity(3)),
            Err(Error::ForeignCongruence(_))
        ));
        let bad = Congruence::from_blocks(4, &[vec![0, 3], vec![1], vec![2]]).unwrap();
        assert!(matches!(b4.quotient(&bad), Err(Error::ForeignCongruence(_))));
    }

    #[test]
    fn kernel_examples() {
        let two = two_element_lattice();
        let (b4, proj) = product(&Signature::bounded_lattice(), &[&two, &two]).unwrap();
        assert_eq!(b4.kernel(&b4, &[0, 1, 2, 3]).unwrap(), Congruence::identity(4));
        let (one, _) = product(&Signature::bounded_lattice(), &[]).unwrap();
        assert_eq!(b4.kernel(&one, &[0, 0, 0, 0]).unwrap(), Congruence::total(4));
        assert_eq!(
            b4.kernel(&two, &proj[0]).unwrap().blocks(),
            vec![vec![0, 1], vec![2, 3]]
        );
        assert!(matches!(b4.kernel(&two, &[0, 1, 1, 0]), Err(Error::NotHomomorphism(_))));
    }
}
