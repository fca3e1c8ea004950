//! The indexing category Θⁿ.
//!
//! Objects are sequences `(m1, ..., mk)` with `k <= n` and every `mi >= 1`;
//! the empty sequence is the class usually written `0`. A morphism is stored
//! in normal form: its components up to and including the first one that is
//! constant (factors through `[0]`), everything after that being irrelevant.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};

/// A monotone map `[p] -> [q]`, stored as its values `f(0), ..., f(p)`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct DeltaMap {
    target: u8,
    values: Vec<u8>,
}

impl DeltaMap {
    pub fn new(target: u8, values: Vec<u8>) -> Result<Self> {
        if values.is_empty()
            || values.iter().any(|&v| v > target)
            || values.windows(2).any(|w| w[0] > w[1])
        {
            return Err(Error::InvalidDeltaMap);
        }
        Ok(DeltaMap { target, values })
    }

    pub fn identity(p: u8) -> Self {
        DeltaMap { target: p, values: (0..=p).collect() }
    }

    pub fn constant(p: u8, q: u8, value: u8) -> Self {
        debug_assert!(value <= q);
        DeltaMap { target: q, values: vec![value; p as usize + 1] }
    }

    /// The spine inclusion `[1] -> [m]` hitting `i, i+1`.
    pub fn principal(m: u8, i: u8) -> Self {
        debug_assert!(i < m);
        DeltaMap { target: m, values: vec![i, i + 1] }
    }

    pub fn source(&self) -> u8 {
        (self.values.len() - 1) as u8
    }

    pub fn target(&self) -> u8 {
        self.target
    }

    pub fn values(&self) -> &[u8] {
        &self.values
    }

    pub fn apply(&self, i: u8) -> u8 {
        self.values[i as usize]
    }

    /// Factors through `[0]`.
    pub fn is_constant(&self) -> bool {
        self.values.iter().all(|&v| v == self.values[0])
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &DeltaMap) -> Result<DeltaMap> {
        if inner.target != self.source() {
            return Err(Error::NotComposable);
        }
        Ok(DeltaMap {
            target: self.target,
            values: inner.values.iter().map(|&i| self.values[i as usize]).collect(),
        })
    }

    fn write_digits(&self, out: &mut impl fmt::Write) -> fmt::Result {
        for &v in &self.values {
            out.write_char(digit(v))?;
        }
        Ok(())
    }
}

fn digit(v: u8) -> char {
    core::char::from_digit(v as u32, 36).unwrap_or('?')
}

/// All monotone maps `[p] -> [q]` in lexicographic order.
pub fn hom_delta(p: u8, q: u8) -> Vec<DeltaMap> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(p as usize + 1);
    fn rec(p: u8, q: u8, lo: u8, cur: &mut Vec<u8>, out: &mut Vec<DeltaMap>) {
        if cur.len() == p as usize + 1 {
            out.push(DeltaMap { target: q, values: cur.clone() });
            return;
        }
        for v in lo..=q {
            cur.push(v);
            rec(p, q, v, cur, out);
            cur.pop();
        }
    }
    rec(p, q, 0, &mut cur, &mut out);
    out
}

/// `true` iff a map `[1] -> [m]` is one of the `m` spine inclusions.
pub fn is_principal(map: &DeltaMap) -> Result<bool> {
    if map.source() != 1 {
        return Err(Error::InvalidDeltaMap);
    }
    Ok(map.values[1] == map.values[0] + 1)
}

/// An object of Θⁿ.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct ThetaObject {
    n: u8,
    comps: Vec<u8>,
}

impl ThetaObject {
    pub fn new(n: u8, comps: Vec<u8>) -> Result<Self> {
        if comps.len() > n as usize {
            return Err(Error::InvalidObject(alloc::format!(
                "{} components at level {n}",
                comps.len()
            )));
        }
        if comps.contains(&0) {
            return Err(Error::InvalidObject("zero component".into()));
        }
        Ok(ThetaObject { n, comps })
    }

    /// The class `0`.
    pub fn point(n: u8) -> Self {
        ThetaObject { n, comps: Vec::new() }
    }

    pub fn n(&self) -> u8 {
        self.n
    }

    pub fn comps(&self) -> &[u8] {
        &self.comps
    }

    pub fn len(&self) -> usize {
        self.comps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.comps.is_empty()
    }

    /// Sum of the components.
    pub fn degree(&self) -> u32 {
        self.comps.iter().map(|&c| c as u32).sum()
    }

    /// Component `i` of the zero-padded `n`-tuple.
    pub fn padded(&self, i: usize) -> u8 {
        self.comps.get(i).copied().unwrap_or(0)
    }

    /// Concatenation `(self, tail)`.
    pub fn concat(&self, tail: &[u8]) -> Result<Self> {
        let mut comps = self.comps.clone();
        comps.extend_from_slice(tail);
        ThetaObject::new(self.n, comps)
    }

    pub fn prefix(&self, len: usize) -> ThetaObject {
        ThetaObject { n: self.n, comps: self.comps[..len.min(self.comps.len())].to_vec() }
    }

    /// The same components read at another level.
    pub fn at_level(&self, n: u8) -> Result<Self> {
        ThetaObject::new(n, self.comps.clone())
    }
}

impl fmt::Display for ThetaObject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, c) in self.comps.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(")")
    }
}

/// All objects of total degree at most `bound`, ordered by degree then components.
pub fn objects_up_to(n: u8, bound: u32) -> Vec<ThetaObject> {
    let mut out = Vec::new();
    fn rec(n: u8, left: u32, cur: &mut Vec<u8>, out: &mut Vec<ThetaObject>) {
        out.push(ThetaObject { n, comps: cur.clone() });
        if cur.len() == n as usize {
            return;
        }
        for c in 1..=left.min(u8::MAX as u32) {
            cur.push(c as u8);
            rec(n, left - c, cur, out);
            cur.pop();
        }
    }
    rec(n, bound, &mut Vec::new(), &mut out);
    out.sort_by(|a, b| a.degree().cmp(&b.degree()).then_with(|| a.comps.cmp(&b.comps)));
    out
}

/// A morphism of Θⁿ in normal form.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct ThetaMorphism {
    source: ThetaObject,
    target: ThetaObject,
    comps: Vec<DeltaMap>,
}

impl ThetaMorphism {
    /// Normal form of a Δⁿ lift with `n` components.
    pub fn project(source: &ThetaObject, target: &ThetaObject, lift: &[DeltaMap]) -> Result<Self> {
        check_levels(source, target)?;
        let n = source.n as usize;
        if lift.len() != n {
            return Err(Error::InconsistentLift);
        }
        for (i, c) in lift.iter().enumerate() {
            if c.source() != source.padded(i) || c.target != target.padded(i) {
                return Err(Error::InconsistentLift);
            }
        }
        let cut = lift.iter().position(|c| c.is_constant()).map_or(n, |j| j + 1);
        Ok(ThetaMorphism {
            source: source.clone(),
            target: target.clone(),
            comps: lift[..cut].to_vec(),
        })
    }

    pub fn identity(obj: &ThetaObject) -> Self {
        let lift: Vec<DeltaMap> =
            (0..obj.n as usize).map(|i| DeltaMap::identity(obj.padded(i))).collect();
        ThetaMorphism::project(obj, obj, &lift).expect("identity is well typed")
    }

    pub fn source(&self) -> &ThetaObject {
        &self.source
    }

    pub fn target(&self) -> &ThetaObject {
        &self.target
    }

    /// Components kept by the normal form.
    pub fn comps(&self) -> &[DeltaMap] {
        &self.comps
    }

    pub fn n(&self) -> u8 {
        self.source.n
    }

    /// `true` when the tail after the first constant component was discarded.
    pub fn is_truncated(&self) -> bool {
        self.comps.len() < self.source.n as usize
    }

    /// A representative Δⁿ lift; discarded components are filled with constant maps to 0.
    pub fn lift(&self) -> Vec<DeltaMap> {
        let mut out = self.comps.clone();
        for i in self.comps.len()..self.source.n as usize {
            out.push(DeltaMap::constant(self.source.padded(i), self.target.padded(i), 0));
        }
        out
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &ThetaMorphism) -> Result<ThetaMorphism> {
        if inner.target != self.source {
            return Err(Error::NotComposable);
        }
        let k = self.comps.len().min(inner.comps.len());
        let mut comps = Vec::with_capacity(k);
        for i in 0..k {
            let c = self.comps[i].compose(&inner.comps[i])?;
            let stop = c.is_constant();
            comps.push(c);
            if stop {
                break;
            }
        }
        Ok(ThetaMorphism { source: inner.source.clone(), target: self.target.clone(), comps })
    }

    /// Canonical text form `M -> N : [c1|c2|*]`.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        use core::fmt::Write;
        let _ = write!(s, "{self}");
        s
    }

    /// Parses the canonical text form at level `n`; non-canonical input is rejected.
    pub fn parse(n: u8, text: &str) -> Result<Self> {
        let err = |m: &str| Error::Parse(alloc::format!("{m}: {text:?}"));
        let (objs, body) = text.split_once(':').ok_or_else(|| err("missing ':'"))?;
        let (src, tgt) = objs.split_once("->").ok_or_else(|| err("missing '->'"))?;
        let source = parse_object(n, src.trim())?;
        let target = parse_object(n, tgt.trim())?;
        let body = body.trim();
        let inner = body
            .strip_prefix('[')
            .and_then(|b| b.strip_suffix(']'))
            .ok_or_else(|| err("missing brackets"))?;
        let mut parts: Vec<&str> = inner.split('|').collect();
        let truncated = parts.last() == Some(&"*");
        if truncated {
            parts.pop();
        }
        let mut lift = Vec::new();
        for (i, p) in parts.iter().enumerate() {
            let values: Option<Vec<u8>> =
                p.chars().map(|c| c.to_digit(36).map(|d| d as u8)).collect();
            let values = values.ok_or_else(|| err("bad digit"))?;
            let dm = DeltaMap::new(target.padded(i), values).map_err(|_| err("bad component"))?;
            lift.push(dm);
        }
        if lift.len() > n as usize {
            return Err(err("too many components"));
        }
        let keep = lift.len();
        for i in keep..n as usize {
            lift.push(DeltaMap::constant(source.padded(i), target.padded(i), 0));
        }
        let m = ThetaMorphism::project(&source, &target, &lift).map_err(|_| err("ill-typed"))?;
        if m.comps.len() != keep || m.is_truncated() != truncated {
            return Err(err("not in normal form"));
        }
        Ok(m)
    }
}

impl fmt::Display for ThetaMorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {} : [", self.source, self.target)?;
        for (i, c) in self.comps.iter().enumerate() {
            if i > 0 {
                f.write_str("|")?;
            }
            c.write_digits(f)?;
        }
        if self.is_truncated() {
            f.write_str("|*")?;
        }
        f.write_str("]")
    }
}

/// Parses `(1,2)` or `()`; a bare comma list without parentheses is accepted too.
pub fn parse_object(n: u8, text: &str) -> Result<ThetaObject> {
    let t = text.trim();
    let t = t.strip_prefix('(').and_then(|x| x.strip_suffix(')')).unwrap_or(t);
    let mut comps = Vec::new();
    for part in t.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        comps.push(part.parse::<u8>().map_err(|_| Error::Parse(alloc::format!("{text:?}")))?);
    }
    ThetaObject::new(n, comps)
}

fn check_levels(a: &ThetaObject, b: &ThetaObject) -> Result<()> {
    if a.n != b.n {
        return Err(Error::LevelMismatch { expected: a.n, found: b.n });
    }
    Ok(())
}

/// All morphisms `source -> target` in canonical order, one per equivalence class.
pub fn hom_theta(source: &ThetaObject, target: &ThetaObject) -> Result<Vec<ThetaMorphism>> {
    check_levels(source, target)?;
    let n = source.n as usize;
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(
        i: usize,
        n: usize,
        s: &ThetaObject,
        t: &ThetaObject,
        cur: &mut Vec<DeltaMap>,
        out: &mut Vec<ThetaMorphism>,
    ) {
        if i == n {
            out.push(ThetaMorphism { source: s.clone(), target: t.clone(), comps: cur.clone() });
            return;
        }
        for c in hom_delta(s.padded(i), t.padded(i)) {
            let stop = c.is_constant();
            cur.push(c);
            if stop {
                out.push(ThetaMorphism { source: s.clone(), target: t.clone(), comps: cur.clone() });
            } else {
                rec(i + 1, n, s, t, cur, out);
            }
            cur.pop();
        }
    }
    rec(0, n, source, target, &mut cur, &mut out);
    Ok(out)
}

pub type ObjId = usize;
pub type MorId = usize;

/// The full subcategory of Θⁿ on objects of degree at most `bound`, with interned morphisms.
#[derive(Debug)]
pub struct Site {
    n: u8,
    bound: u32,
    objects: Vec<ThetaObject>,
    object_ids: BTreeMap<ThetaObject, ObjId>,
    morphisms: Vec<ThetaMorphism>,
    ends: Vec<(ObjId, ObjId)>,
    morphism_ids: BTreeMap<ThetaMorphism, MorId>,
    homs: Vec<Vec<Vec<MorId>>>,
    into: Vec<Vec<MorId>>,
    identities: Vec<MorId>,
}

impl PartialEq for Site {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.bound == other.bound
    }
}

impl Site {
    pub fn new(n: u8, bound: u32) -> Site {
        let objects = objects_up_to(n, bound);
        let object_ids: BTreeMap<_, _> =
            objects.iter().cloned().enumerate().map(|(i, o)| (o, i)).collect();
        let k = objects.len();
        let mut morphisms = Vec::new();
        let mut ends = Vec::new();
        let mut morphism_ids = BTreeMap::new();
        let mut homs = vec![vec![Vec::new(); k]; k];
        let mut into = vec![Vec::new(); k];
        for (si, s) in objects.iter().enumerate() {
            for (ti, t) in objects.iter().enumerate() {
                for m in hom_theta(s, t).expect("same level") {
                    let id = morphisms.len();
                    morphism_ids.insert(m.clone(), id);
                    morphisms.push(m);
                    ends.push((si, ti));
                    homs[si][ti].push(id);
                    into[ti].push(id);
                }
            }
        }
        let identities = objects
            .iter()
            .map(|o| morphism_ids[&ThetaMorphism::identity(o)])
            .collect();
        Site { n, bound, objects, object_ids, morphisms, ends, morphism_ids, homs, into, identities }
    }

    pub fn n(&self) -> u8 {
        self.n
    }

    pub fn bound(&self) -> u32 {
        self.bound
    }

    pub fn objects(&self) -> &[ThetaObject] {
        &self.objects
    }

    pub fn object(&self, id: ObjId) -> &ThetaObject {
        &self.objects[id]
    }

    pub fn object_id(&self, obj: &ThetaObject) -> Result<ObjId> {
        self.object_ids.get(obj).copied().ok_or(Error::BoundExceeded {
            degree: obj.degree(),
            bound: self.bound,
        })
    }

    pub fn morphism_count(&self) -> usize {
        self.morphisms.len()
    }

    pub fn morphism(&self, id: MorId) -> &ThetaMorphism {
        &self.morphisms[id]
    }

    pub fn morphism_id(&self, m: &ThetaMorphism) -> Result<MorId> {
        match self.morphism_ids.get(m) {
            Some(&id) => Ok(id),
            None => Err(Error::BoundExceeded {
                degree: m.source.degree().max(m.target.degree()),
                bound: self.bound,
            }),
        }
    }

    /// `(source, target)` of a morphism.
    pub fn ends(&self, id: MorId) -> (ObjId, ObjId) {
        self.ends[id]
    }

    pub fn hom(&self, source: ObjId, target: ObjId) -> &[MorId] {
        &self.homs[source][target]
    }

    /// All morphisms with the given target.
    pub fn arrows_into(&self, target: ObjId) -> &[MorId] {
        &self.into[target]
    }

    pub fn identity(&self, obj: ObjId) -> MorId {
        self.identities[obj]
    }

    /// `f ∘ g` on interned morphisms.
    pub fn compose(&self, f: MorId, g: MorId) -> MorId {
        let c = self.morphisms[f].compose(&self.morphisms[g]).expect("composable ids");
        self.morphism_ids[&c]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn obj(n: u8, c: &[u8]) -> ThetaObject {
        ThetaObject::new(n, c.to_vec()).unwrap()
    }

    fn binom(n: u64, k: u64) -> u64 {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn hom_delta_counts() {
        let maps = hom_delta(1, 1);
        let vals: Vec<_> = maps.iter().map(|m| m.values().to_vec()).collect();
        assert_eq!(vals, vec![vec![0, 0], vec![0, 1], vec![1, 1]]);
        for q in 0..5 {
            assert_eq!(hom_delta(0, q).len(), q as usize + 1);
            assert_eq!(hom_delta(q, 0).len(), 1);
        }
    }

    #[test]
    fn n1_hom_sizes_are_binomial() {
        for p in 0..=5u8 {
            for q in 0..=5u8 {
                let s = if p == 0 { ThetaObject::point(1) } else { obj(1, &[p]) };
                let t = if q == 0 { ThetaObject::point(1) } else { obj(1, &[q]) };
                let h = hom_theta(&s, &t).unwrap();
                assert_eq!(h.len() as u64, binom(p as u64 + q as u64 + 1, p as u64 + 1));
            }
        }
    }

    #[test]
    fn n2_small_homs() {
        assert_eq!(hom_theta(&obj(2, &[1, 1]), &obj(2, &[1, 1])).unwrap().len(), 5);
        assert_eq!(hom_theta(&obj(2, &[1, 1]), &obj(2, &[2, 1])).unwrap().len(), 12);
        let h = hom_theta(&obj(2, &[1, 1]), &obj(2, &[1, 1])).unwrap();
        assert!(h.contains(&ThetaMorphism::identity(&obj(2, &[1, 1]))));
    }

    #[test]
    fn constant_first_component_collapses() {
        let s = obj(2, &[1, 1]);
        let t = obj(2, &[1, 1]);
        let c = DeltaMap::constant(1, 1, 0);
        let a = ThetaMorphism::project(&s, &t, &[c.clone(), DeltaMap::identity(1)]).unwrap();
        let b = ThetaMorphism::project(&s, &t, &[c, DeltaMap::constant(1, 1, 1)]).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_text(), "(1,1) -> (1,1) : [00|*]");
    }

    #[test]
    fn text_round_trip_and_rejection() {
        let s = obj(2, &[1, 1]);
        let t = obj(2, &[2, 1]);
        for m in hom_theta(&s, &t).unwrap() {
            assert_eq!(ThetaMorphism::parse(2, &m.to_text()).unwrap(), m);
        }
        assert!(ThetaMorphism::parse(2, "(1,1) -> (2,1) : [00|01]").is_err());
        assert!(ThetaMorphism::parse(2, "(1,1) -> (2,1) : [01|*]").is_err());
        let p = ThetaMorphism::parse(1, "() -> (2) : [1]").unwrap();
        assert_eq!(p.comps()[0].values(), &[1]);
    }

    #[test]
    fn principal_edges() {
        assert!(is_principal(&DeltaMap::new(2, vec![0, 1]).unwrap()).unwrap());
        assert!(!is_principal(&DeltaMap::new(2, vec![0, 2]).unwrap()).unwrap());
        assert!(!is_principal(&DeltaMap::new(2, vec![0, 0]).unwrap()).unwrap());
        assert!(is_principal(&DeltaMap::identity(2)).is_err());
    }

    #[test]
    fn compose_mismatch_and_level_errors() {
        let a = ThetaMorphism::identity(&obj(2, &[1]));
        let b = ThetaMorphism::identity(&obj(2, &[2]));
        assert_eq!(a.compose(&b), Err(Error::NotComposable));
        assert!(hom_theta(&obj(1, &[1]), &obj(2, &[1])).is_err());
        assert!(ThetaObject::new(1, vec![1, 1]).is_err());
        assert!(ThetaObject::new(2, vec![0, 1]).is_err());
    }

    #[test]
    fn site_composition_is_associative_up_to_degree_3() {
        for n in 1..=2u8 {
            let site = Site::new(n, 3);
            let k = site.objects().len();
            for a in 0..k {
                for b in 0..k {
                    for c in 0..k {
                        for &g in site.hom(a, b) {
                            for &f in site.hom(b, c) {
                                let fg = site.compose(f, g);
                                assert_eq!(site.compose(f, site.identity(b)), f);
                                assert_eq!(site.compose(site.identity(c), f), f);
                                for d in 0..k {
                                    for &e in site.hom(c, d) {
                                        assert_eq!(
                                            site.compose(e, fg),
                                            site.compose(site.compose(e, f), g)
                                        );
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
}
