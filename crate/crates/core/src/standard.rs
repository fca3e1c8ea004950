//! Builders for the standard objects: spines Υ, the generating cofibrations φ: Σ → h,
//! intervals, indiscrete categories and the free-standing isomorphism.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::category::ExplicitCategory;
use crate::error::{Error, Result};
use crate::presentation::{Element, PrecatMap, Presentation, Relation};
use crate::table::Table;
use crate::theta::{DeltaMap, Site, ThetaMorphism, ThetaObject};

/// Identity components except at index `at`, which is `d`; components past `at` are
/// identities when the sizes agree and constant otherwise.
pub fn along(source: &ThetaObject, target: &ThetaObject, at: usize, d: DeltaMap) -> Result<ThetaMorphism> {
    let n = source.n() as usize;
    let mut lift = Vec::with_capacity(n);
    for i in 0..n {
        let (p, q) = (source.padded(i), target.padded(i));
        lift.push(if i == at {
            d.clone()
        } else if p == q {
            DeltaMap::identity(p)
        } else {
            DeltaMap::constant(p, q, 0)
        });
    }
    ThetaMorphism::project(source, target, &lift)
}

/// The face picking value `v` in component `at` (where the source is `0`).
pub fn boundary(source: &ThetaObject, target: &ThetaObject, at: usize, v: u8) -> Result<ThetaMorphism> {
    along(source, target, at, DeltaMap::constant(0, target.padded(at), v))
}

/// Vertex `i` of `target`: the morphism `() -> target` with first component `i`.
pub fn vertex(target: &ThetaObject, i: u8) -> Result<ThetaMorphism> {
    boundary(&ThetaObject::point(target.n()), target, 0, i)
}

fn with_tail(prefix: &ThetaObject, m: u8, ones: usize) -> Result<ThetaObject> {
    let mut tail = vec![m];
    tail.extend(core::iter::repeat_n(1, ones));
    prefix.concat(&tail)
}

/// The parameters `(M, m, k)` of a generating cofibration.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SigmaShape {
    prefix: ThetaObject,
    m: u8,
    k: i32,
}

impl SigmaShape {
    pub fn new(prefix: ThetaObject, m: u8, k: i32) -> Result<Self> {
        let n = prefix.n() as i32;
        let l = prefix.len() as i32;
        if l > n - 1 {
            return Err(Error::InvalidShape("prefix too long"));
        }
        if m < 2 {
            return Err(Error::InvalidShape("m must be at least 2"));
        }
        if k < -1 || k > n - l - 1 {
            return Err(Error::InvalidShape("k out of range"));
        }
        Ok(SigmaShape { prefix, m, k })
    }

    pub fn n(&self) -> u8 {
        self.prefix.n()
    }

    pub fn prefix(&self) -> &ThetaObject {
        &self.prefix
    }

    pub fn m(&self) -> u8 {
        self.m
    }

    pub fn k(&self) -> i32 {
        self.k
    }

    /// Whether this is the top case, where φ identifies two parallel top cells.
    pub fn is_top(&self) -> bool {
        self.k >= 0 && self.k == self.n() as i32 - self.prefix.len() as i32 - 1
    }

    /// The object whose representable is the target of φ.
    pub fn target_object(&self) -> ThetaObject {
        let ones = if self.k < 0 {
            0
        } else if self.is_top() {
            self.k as usize
        } else {
            self.k as usize + 1
        };
        with_tail(&self.prefix, self.m, ones).expect("shape bounds checked")
    }

    pub fn degree(&self) -> u32 {
        self.target_object().degree()
    }

    /// Stable text form `M;m;k`, e.g. `(1);2;0`.
    pub fn to_text(&self) -> String {
        format!("{};{};{}", self.prefix, self.m, self.k)
    }
}

/// All shapes at level `n` of degree at most `bound` with `m <= m_max`, in canonical order.
pub fn shapes_up_to(n: u8, bound: u32, m_max: u8) -> Vec<SigmaShape> {
    let mut out = Vec::new();
    for prefix in crate::theta::objects_up_to(n, bound) {
        if prefix.len() + 1 > n as usize {
            continue;
        }
        for m in 2..=m_max {
            for k in -1..=(n as i32 - prefix.len() as i32 - 1) {
                let s = SigmaShape::new(prefix.clone(), m, k).expect("in range");
                if s.degree() <= bound {
                    out.push(s);
                }
            }
        }
    }
    out.sort_by(|a, b| (a.degree(), a).cmp(&(b.degree(), b)));
    out
}

/// `m` copies of `h(M,1,1^k)` glued end to end over `h(M)`.
pub fn upsilon(prefix: &ThetaObject, m: u8, k: usize) -> Result<Presentation> {
    let n = prefix.n();
    if m == 0 || prefix.len() + 1 + k > n as usize {
        return Err(Error::InvalidShape("spine does not fit at this level"));
    }
    let cell = with_tail(prefix, 1, k)?;
    let l = prefix.len();
    let src = boundary(prefix, &cell, l, 0)?;
    let tgt = boundary(prefix, &cell, l, 1)?;
    let relations = (0..m as usize - 1)
        .map(|i| Relation {
            source: prefix.clone(),
            left: Element::new(i, tgt.clone()),
            right: Element::new(i + 1, src.clone()),
        })
        .collect();
    Presentation::new(n, vec![cell; m as usize], relations)
}

/// The source of the generating cofibration of the given shape.
pub fn sigma(shape: &SigmaShape) -> Result<Presentation> {
    let (prefix, m, k) = (&shape.prefix, shape.m, shape.k);
    let l = prefix.len();
    if k < 0 {
        return upsilon(prefix, m, 0);
    }
    let k = k as usize;
    let top = shape.is_top();
    let mut p = upsilon(prefix, m, if top { k } else { k + 1 })?;
    let ab = with_tail(prefix, m, k)?;
    let a = p.add_generator(ab.clone())?;
    let b = p.add_generator(ab.clone())?;
    if k >= 1 {
        let lower = with_tail(prefix, m, k - 1)?;
        for v in [0, 1] {
            let f = boundary(&lower, &ab, l + k, v)?;
            p.add_relation(Relation {
                source: lower.clone(),
                left: Element::new(a, f.clone()),
                right: Element::new(b, f),
            })?;
        }
    }
    let piece = with_tail(prefix, 1, k)?;
    for i in 0..m {
        let pr = along(&piece, &ab, l, DeltaMap::principal(m, i))?;
        if top {
            let id = ThetaMorphism::identity(&piece);
            for g in [a, b] {
                p.add_relation(Relation {
                    source: piece.clone(),
                    left: Element::new(g, pr.clone()),
                    right: Element::new(i as usize, id.clone()),
                })?;
            }
        } else {
            let cell = with_tail(prefix, 1, k + 1)?;
            for (g, v) in [(a, 0), (b, 1)] {
                p.add_relation(Relation {
                    source: piece.clone(),
                    left: Element::new(g, pr.clone()),
                    right: Element::new(i as usize, boundary(&piece, &cell, l + k + 1, v)?),
                })?;
            }
        }
    }
    Ok(p)
}

/// The generating cofibration `φ: Σ -> h` of the given shape.
pub fn phi(shape: &SigmaShape) -> Result<PrecatMap> {
    let src = sigma(shape)?;
    let target_obj = shape.target_object();
    let h = Presentation::representable(&target_obj);
    let l = shape.prefix.len();
    let m = shape.m;
    let mut images = Vec::with_capacity(src.generators().len());
    for i in 0..m {
        let g = &src.generators()[i as usize];
        images.push(Element::new(0, along(g, &target_obj, l, DeltaMap::principal(m, i))?));
    }
    if shape.k >= 0 {
        let ab = &src.generators()[m as usize];
        if shape.is_top() {
            let id = ThetaMorphism::identity(&target_obj);
            images.push(Element::new(0, id.clone()));
            images.push(Element::new(0, id));
        } else {
            let at = l + shape.k as usize + 1;
            images.push(Element::new(0, boundary(ab, &target_obj, at, 0)?));
            images.push(Element::new(0, boundary(ab, &target_obj, at, 1)?));
        }
    }
    PrecatMap::new(src, h, images)
}

/// `m` copies of `h(1,1^j)` glued end to end over the point, with its map to `h(m,1^j)`.
pub fn sigma_nu(n: u8, m: u8, j: usize) -> Result<PrecatMap> {
    if m < 2 {
        return Err(Error::InvalidShape("m must be at least 2"));
    }
    let point = ThetaObject::point(n);
    let src = upsilon(&point, m, j)?;
    let target_obj = with_tail(&point, m, j)?;
    let images = src
        .generators()
        .iter()
        .enumerate()
        .map(|(i, g)| Ok(Element::new(0, along(g, &target_obj, 0, DeltaMap::principal(m, i as u8))?)))
        .collect::<Result<Vec<_>>>()?;
    PrecatMap::new(src, Presentation::representable(&target_obj), images)
}

/// The interval `I = h(1)`.
pub fn interval(n: u8) -> Result<Presentation> {
    interval_m(n, 1)
}

/// `I^(m)`, the nerve of `0 < 1 < ... < m`; this is the representable `h(m)` at every level.
pub fn interval_m(n: u8, m: u8) -> Result<Presentation> {
    Ok(Presentation::representable(&ThetaObject::new(n, vec![m])?))
}

/// The nerve of the chaotic category on `objects` objects.
pub fn indiscrete(objects: usize, site: Arc<Site>) -> Table {
    ExplicitCategory::indiscrete(objects).nerve(site)
}

/// Two isomorphic objects `0` and `1`: the chaotic category on two objects.
pub fn ibar(site: Arc<Site>) -> Table {
    indiscrete(2, site)
}

/// The free-standing isomorphism at `n = 1`: arrows `u: 0 -> 1`, `v: 1 -> 0` with `vu = 1`, `uv = 1`.
pub fn jbar_n1() -> Presentation {
    let pt = ThetaObject::point(1);
    let e = ThetaObject::new(1, vec![1]).expect("valid");
    let tri = ThetaObject::new(1, vec![2]).expect("valid");
    let v0 = vertex(&e, 0).expect("valid");
    let v1 = vertex(&e, 1).expect("valid");
    let face = |i: u8| {
        let vals: Vec<u8> = (0..3).filter(|&x| x != i).collect();
        ThetaMorphism::project(&e, &tri, &[DeltaMap::new(2, vals).expect("monotone")]).expect("valid")
    };
    let degenerate = ThetaMorphism::project(&e, &e, &[DeltaMap::constant(1, 1, 0)]).expect("valid");
    // Generators: u, v, and the two triangles witnessing vu = 1 and uv = 1.
    let mut rels = vec![
        Relation { source: pt.clone(), left: Element::new(0, v1.clone()), right: Element::new(1, v0.clone()) },
        Relation { source: pt, left: Element::new(1, v1), right: Element::new(0, v0) },
    ];
    for (t, first, second) in [(2usize, 0usize, 1usize), (3, 1, 0)] {
        rels.push(Relation { source: e.clone(), left: Element::new(t, face(2)), right: Element::new(first, ThetaMorphism::identity(&e)) });
        rels.push(Relation { source: e.clone(), left: Element::new(t, face(0)), right: Element::new(second, ThetaMorphism::identity(&e)) });
        rels.push(Relation { source: e.clone(), left: Element::new(t, face(1)), right: Element::new(first, degenerate.clone()) });
    }
    Presentation::new(1, vec![e.clone(), e, tri.clone(), tri], rels).expect("well typed")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::search::{all_presentation_maps, DEFAULT_LIMIT};

    fn obj(n: u8, c: &[u8]) -> ThetaObject {
        ThetaObject::new(n, c.to_vec()).unwrap()
    }

    #[test]
    fn spine_census() {
        let s = upsilon(&ThetaObject::point(1), 2, 0).unwrap();
        assert_eq!(s.eval(&obj(1, &[1])).unwrap().len(), 5);
        for m in 1..5u8 {
            let s = upsilon(&ThetaObject::point(1), m, 0).unwrap();
            assert_eq!(s.eval(&ThetaObject::point(1)).unwrap().len(), m as usize + 1);
        }
        assert_eq!(upsilon(&ThetaObject::point(2), 1, 1).unwrap(), Presentation::representable(&obj(2, &[1, 1])));
    }

    #[test]
    fn shapes_reject_m_one() {
        assert!(SigmaShape::new(ThetaObject::point(1), 1, 0).is_err());
        assert!(shapes_up_to(2, 4, 4).iter().all(|s| s.m() >= 2));
        assert!(SigmaShape::new(obj(1, &[1]), 2, -1).is_err());
    }

    #[test]
    fn top_sigma_keeps_two_cells() {
        let sh = SigmaShape::new(ThetaObject::point(1), 2, 0).unwrap();
        assert!(sh.is_top());
        let s = sigma(&sh).unwrap();
        let top = s.eval(&obj(1, &[2])).unwrap();
        let a = s.generator_element(2).unwrap();
        let b = s.generator_element(3).unwrap();
        assert!(!s.same_class(&a, &b).unwrap());
        // 7 simplices on the spine, plus the identity and two degeneracies of each of a and b.
        assert_eq!(top.len(), 7 + 2 * 3);
    }

    #[test]
    fn phi_is_a_cofibration_at_small_degree() {
        for n in 1..=2u8 {
            for sh in shapes_up_to(n, 3, 3) {
                let f = phi(&sh).unwrap();
                let site = Arc::new(Site::new(n, 3));
                let a = f.source.tabulate_on(site.clone()).unwrap();
                let b = f.target.tabulate_on(site.clone()).unwrap();
                let map = f.tabulate(&a, &b).unwrap();
                map.validate(&a.table, &b.table).unwrap();
                assert!(map.is_cofibration(&a.table), "{}", sh.to_text());
                assert!(map.is_injective_at(0) && map.is_surjective_at(0, b.table.size(0)));
            }
        }
    }

    #[test]
    fn top_phi_merges_top_cells() {
        let sh = SigmaShape::new(ThetaObject::point(1), 2, 0).unwrap();
        let f = phi(&sh).unwrap();
        let a = f.source.tabulate(2).unwrap();
        let b = f.target.tabulate(2).unwrap();
        let map = f.tabulate(&a, &b).unwrap();
        let top = a.table.site().object_id(&obj(1, &[2])).unwrap();
        assert!(!map.is_injective_at(top));
    }

    #[test]
    fn spine_maps_into_chain_nerve() {
        let site = Arc::new(Site::new(1, 3));
        let nerve = ExplicitCategory::chain(2).nerve(site);
        let spine = upsilon(&ThetaObject::point(1), 2, 0).unwrap();
        let maps = all_presentation_maps(&spine, &nerve, DEFAULT_LIMIT).unwrap();
        let nondegenerate: Vec<_> = maps
            .iter()
            .filter(|m| {
                let e = nerve.site().object_id(&obj(1, &[1])).unwrap();
                m.iter().all(|&x| {
                    let (s, t) = nerve.endpoints(e, x);
                    s != t
                }) && {
                    let (_, t0) = nerve.endpoints(e, m[0]);
                    let (s1, _) = nerve.endpoints(e, m[1]);
                    t0 == s1
                }
            })
            .collect();
        assert_eq!(nondegenerate.len(), 1);
    }

    #[test]
    fn sigma_nu_maps_to_representable() {
        let f = sigma_nu(1, 2, 0).unwrap();
        assert_eq!(f.source, upsilon(&ThetaObject::point(1), 2, 0).unwrap());
        assert!(sigma_nu(2, 3, 1).is_ok());
    }

    #[test]
    fn interval_counts() {
        assert_eq!(interval_m(1, 2).unwrap().eval(&obj(1, &[1])).unwrap().len(), 6);
        let t = ibar(Arc::new(Site::new(1, 4)));
        for p in 0..=4u32 {
            assert_eq!(t.size(p as usize), 1 << (p + 1));
        }
    }
}
