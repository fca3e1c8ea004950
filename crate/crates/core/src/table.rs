//! Bounded presheaves: level sets for every object of degree at most the
//! bound, together with the full contravariant action of the site.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::theta::{DeltaMap, MorId, ObjId, Site, ThetaMorphism, ThetaObject};
use crate::util::UnionFind;

#[derive(Clone, Debug)]
pub struct Table {
    site: Arc<Site>,
    sizes: Vec<usize>,
    /// `action[f][x]`: image of `x` at the target of `f`, living at its source.
    action: Vec<Vec<u32>>,
}

impl PartialEq for Table {
    fn eq(&self, other: &Self) -> bool {
        *self.site == *other.site && self.sizes == other.sizes && self.action == other.action
    }
}

impl Table {
    /// Builds a table from level sizes and an action function; functoriality is not checked here.
    pub fn from_fn(
        site: Arc<Site>,
        sizes: Vec<usize>,
        mut act: impl FnMut(MorId, usize) -> usize,
    ) -> Table {
        let mut action = Vec::with_capacity(site.morphism_count());
        for f in 0..site.morphism_count() {
            let (_, t) = site.ends(f);
            action.push((0..sizes[t]).map(|x| act(f, x) as u32).collect());
        }
        Table { site, sizes, action }
    }

    pub fn from_parts(site: Arc<Site>, sizes: Vec<usize>, action: Vec<Vec<u32>>) -> Result<Table> {
        if sizes.len() != site.objects().len() || action.len() != site.morphism_count() {
            return Err(Error::Malformed("table shape does not match the site".into()));
        }
        for (f, row) in action.iter().enumerate() {
            let (s, t) = site.ends(f);
            if row.len() != sizes[t] || row.iter().any(|&y| y as usize >= sizes[s]) {
                return Err(Error::Malformed("action out of range".into()));
            }
        }
        let t = Table { site, sizes, action };
        t.check_functorial()?;
        Ok(t)
    }

    pub fn empty(site: Arc<Site>) -> Table {
        let sizes = vec![0; site.objects().len()];
        Table::from_fn(site, sizes, |_, _| 0)
    }

    pub fn terminal(site: Arc<Site>) -> Table {
        let sizes = vec![1; site.objects().len()];
        Table::from_fn(site, sizes, |_, _| 0)
    }

    pub fn site(&self) -> &Arc<Site> {
        &self.site
    }

    pub fn n(&self) -> u8 {
        self.site.n()
    }

    pub fn bound(&self) -> u32 {
        self.site.bound()
    }

    pub fn size(&self, obj: ObjId) -> usize {
        self.sizes[obj]
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn size_of(&self, obj: &ThetaObject) -> Result<usize> {
        Ok(self.sizes[self.site.object_id(obj)?])
    }

    pub fn act(&self, f: MorId, x: usize) -> usize {
        self.action[f][x] as usize
    }

    pub fn action_row(&self, f: MorId) -> &[u32] {
        &self.action[f]
    }

    /// Acts by an arbitrary morphism between stored levels.
    pub fn act_by(&self, f: &ThetaMorphism, x: usize) -> Result<usize> {
        let id = self.site.morphism_id(f)?;
        if x >= self.sizes[self.site.ends(id).1] {
            return Err(Error::InvalidElement);
        }
        Ok(self.act(id, x))
    }

    /// `(object, size)` for every stored level.
    pub fn census(&self) -> Vec<(ThetaObject, usize)> {
        self.site.objects().iter().cloned().zip(self.sizes.iter().copied()).collect()
    }

    pub fn total_elements(&self) -> usize {
        self.sizes.iter().sum()
    }

    /// Identities act trivially and the action respects composition.
    pub fn check_functorial(&self) -> Result<()> {
        let site = &*self.site;
        for o in 0..site.objects().len() {
            let id = site.identity(o);
            if self.action[id].iter().enumerate().any(|(x, &y)| x != y as usize) {
                return Err(Error::Malformed("identity acts non-trivially".into()));
            }
        }
        let k = site.objects().len();
        for a in 0..k {
            for b in 0..k {
                for &g in site.hom(a, b) {
                    for c in 0..k {
                        for &f in site.hom(b, c) {
                            let fg = site.compose(f, g);
                            for x in 0..self.sizes[c] {
                                if self.act(fg, x) != self.act(g, self.act(f, x)) {
                                    return Err(Error::Malformed("action is not functorial".into()));
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Morphisms `() -> M` picking the vertices of a level.
    pub fn vertex_morphisms(&self, obj: ObjId) -> &[MorId] {
        self.site.hom(0, obj)
    }

    /// Vertex images of an element.
    pub fn vertices(&self, obj: ObjId, x: usize) -> Vec<usize> {
        self.vertex_morphisms(obj).iter().map(|&v| self.act(v, x)).collect()
    }

    /// Source and target vertices of an element at a level `(p, ...)`.
    pub fn endpoints(&self, obj: ObjId, x: usize) -> (usize, usize) {
        let v = self.vertices(obj, x);
        (v[0], v[v.len() - 1])
    }

    /// Cartesian product with the componentwise action; element `(a, b)` has index `a * |B| + b`.
    pub fn product(&self, other: &Table) -> Result<Table> {
        self.same_site(other)?;
        let sizes: Vec<usize> = self.sizes.iter().zip(&other.sizes).map(|(a, b)| a * b).collect();
        let rhs = other.sizes.clone();
        Ok(Table::from_fn(self.site.clone(), sizes, |f, x| {
            let (s, t) = self.site.ends(f);
            let (a, b) = (x / rhs[t], x % rhs[t]);
            self.act(f, a) * rhs[s] + other.act(f, b)
        }))
    }

    /// Projections out of `self.product(other)`.
    pub fn product_projections(&self, other: &Table) -> (TableMap, TableMap) {
        let k = self.sizes.len();
        let mut p1 = Vec::with_capacity(k);
        let mut p2 = Vec::with_capacity(k);
        for o in 0..k {
            let r = other.sizes[o];
            let total = self.sizes[o] * r;
            p1.push((0..total).map(|x| x / r.max(1)).collect());
            p2.push((0..total).map(|x| x % r.max(1)).collect());
        }
        (TableMap { components: p1 }, TableMap { components: p2 })
    }

    pub fn coproduct(&self, other: &Table) -> Result<Table> {
        self.same_site(other)?;
        let sizes: Vec<usize> = self.sizes.iter().zip(&other.sizes).map(|(a, b)| a + b).collect();
        let lhs = self.sizes.clone();
        Ok(Table::from_fn(self.site.clone(), sizes, |f, x| {
            let (s, t) = self.site.ends(f);
            if x < lhs[t] {
                self.act(f, x)
            } else {
                lhs[s] + other.act(f, x - lhs[t])
            }
        }))
    }

    /// Full sub-precat on a set of objects: keeps the elements all of whose vertices lie in `keep`.
    pub fn fullsub(&self, keep: &[usize]) -> (Table, TableMap) {
        let k = self.sizes.len();
        let mut kept: Vec<Vec<usize>> = Vec::with_capacity(k);
        let mut index: Vec<Vec<usize>> = Vec::with_capacity(k);
        for o in 0..k {
            let mut list = Vec::new();
            let mut idx = vec![usize::MAX; self.sizes[o]];
            for x in 0..self.sizes[o] {
                if self.vertices(o, x).iter().all(|v| keep.contains(v)) {
                    idx[x] = list.len();
                    list.push(x);
                }
            }
            kept.push(list);
            index.push(idx);
        }
        let sizes = kept.iter().map(Vec::len).collect();
        let sub = Table::from_fn(self.site.clone(), sizes, |f, x| {
            let (s, t) = self.site.ends(f);
            index[s][self.act(f, kept[t][x])]
        });
        (sub, TableMap { components: kept })
    }

    /// Sub-presheaf spanned by the given elements per level (must be closed under the action).
    pub fn subtable(&self, members: &[Vec<usize>]) -> Result<(Table, TableMap)> {
        let k = self.sizes.len();
        let mut index: Vec<Vec<usize>> = Vec::with_capacity(k);
        for o in 0..k {
            let mut idx = vec![usize::MAX; self.sizes[o]];
            for (i, &x) in members[o].iter().enumerate() {
                idx[x] = i;
            }
            index.push(idx);
        }
        for f in 0..self.site.morphism_count() {
            let (s, t) = self.site.ends(f);
            if members[t].iter().any(|&x| index[s][self.act(f, x)] == usize::MAX) {
                return Err(Error::Malformed("subset is not closed under the action".into()));
            }
        }
        let sizes = members.iter().map(Vec::len).collect();
        let sub = Table::from_fn(self.site.clone(), sizes, |f, x| {
            let (s, t) = self.site.ends(f);
            index[s][self.act(f, members[t][x])]
        });
        Ok((sub, TableMap { components: members.to_vec() }))
    }

    /// Fiber product `A ×_C B` of `f: A -> C` and `g: B -> C`, with its projections.
    pub fn fiber_product(
        a: &Table,
        f: &TableMap,
        b: &Table,
        g: &TableMap,
    ) -> Result<(Table, TableMap, TableMap)> {
        a.same_site(b)?;
        let k = a.sizes.len();
        let mut pairs: Vec<Vec<(usize, usize)>> = Vec::with_capacity(k);
        let mut lookup: Vec<alloc::collections::BTreeMap<(usize, usize), usize>> =
            Vec::with_capacity(k);
        for o in 0..k {
            let mut list = Vec::new();
            let mut map = alloc::collections::BTreeMap::new();
            for x in 0..a.sizes[o] {
                for y in 0..b.sizes[o] {
                    if f.components[o][x] == g.components[o][y] {
                        map.insert((x, y), list.len());
                        list.push((x, y));
                    }
                }
            }
            pairs.push(list);
            lookup.push(map);
        }
        let sizes = pairs.iter().map(Vec::len).collect();
        let t = Table::from_fn(a.site.clone(), sizes, |m, i| {
            let (s, tt) = a.site.ends(m);
            let (x, y) = pairs[tt][i];
            lookup[s][&(a.act(m, x), b.act(m, y))]
        });
        let p1 = TableMap { components: pairs.iter().map(|l| l.iter().map(|p| p.0).collect()).collect() };
        let p2 = TableMap { components: pairs.iter().map(|l| l.iter().map(|p| p.1).collect()).collect() };
        Ok((t, p1, p2))
    }

    /// Quotient by the smallest congruence identifying the given pairs `(level, x, y)`.
    pub fn quotient(&self, pairs: &[(ObjId, usize, usize)]) -> (Table, TableMap) {
        let k = self.sizes.len();
        let mut ufs: Vec<UnionFind> = self.sizes.iter().map(|&s| UnionFind::new(s)).collect();
        let mut work: Vec<(ObjId, usize, usize)> = pairs.to_vec();
        while let Some((o, x, y)) = work.pop() {
            if !ufs[o].union(x, y) {
                continue;
            }
            for &f in self.site.arrows_into(o) {
                let (s, _) = self.site.ends(f);
                let (a, b) = (self.act(f, x), self.act(f, y));
                if a != b {
                    work.push((s, a, b));
                }
            }
        }
        let mut components = Vec::with_capacity(k);
        let mut sizes = Vec::with_capacity(k);
        for uf in ufs.iter_mut() {
            let (cls, count) = uf.classes();
            components.push(cls);
            sizes.push(count);
        }
        let mut first = Vec::with_capacity(k);
        for (o, comp) in components.iter().enumerate() {
            let mut f = vec![usize::MAX; sizes[o]];
            for (x, &c) in comp.iter().enumerate().rev() {
                f[c] = x;
            }
            first.push(f);
        }
        let q = Table::from_fn(self.site.clone(), sizes, |f, c| {
            let (s, t) = self.site.ends(f);
            components[s][self.act(f, first[t][c])]
        });
        (q, TableMap { components })
    }

    /// Pushout of `f: A -> self` and `g: A -> other`, with the two coprojections.
    pub fn pushout(&self, f: &TableMap, other: &Table, g: &TableMap) -> Result<(Table, TableMap, TableMap)> {
        self.same_site(other)?;
        let sum = self.coproduct(other)?;
        let mut pairs = Vec::new();
        for (o, (fc, gc)) in f.components.iter().zip(&g.components).enumerate() {
            for (&x, &y) in fc.iter().zip(gc) {
                pairs.push((o, x, self.sizes[o] + y));
            }
        }
        let (q, proj) = sum.quotient(&pairs);
        let left = TableMap {
            components: (0..self.sizes.len()).map(|o| proj.components[o][..self.sizes[o]].to_vec()).collect(),
        };
        let right = TableMap {
            components: (0..self.sizes.len()).map(|o| proj.components[o][self.sizes[o]..].to_vec()).collect(),
        };
        Ok((q, left, right))
    }

    /// Restriction to a site with a smaller bound (same level).
    pub fn restrict(&self, site: Arc<Site>) -> Result<Table> {
        if site.n() != self.n() || site.bound() > self.bound() {
            return Err(Error::Unsupported("restriction to a larger or different site"));
        }
        let mut sizes = Vec::with_capacity(site.objects().len());
        for o in site.objects() {
            sizes.push(self.size_of(o)?);
        }
        let own = &self.site;
        let ids: Vec<MorId> = (0..site.morphism_count())
            .map(|f| own.morphism_id(site.morphism(f)).expect("smaller site embeds"))
            .collect();
        Ok(Table::from_fn(site, sizes, |f, x| self.act(ids[f], x)))
    }

    /// Level `(M, M')` of `self` seen as a presheaf in `M'` alone (the slice over a prefix).
    pub fn slice(&self, prefix: &ThetaObject, bound: u32) -> Result<Table> {
        if prefix.n() != self.n() {
            return Err(Error::LevelMismatch { expected: self.n(), found: prefix.n() });
        }
        let l = prefix.len();
        if l == 0 {
            return self.restrict(Arc::new(Site::new(self.n(), bound.min(self.bound()))));
        }
        let sub_n = self.n() - l as u8;
        let budget = self.bound().checked_sub(prefix.degree()).ok_or(Error::BoundExceeded {
            degree: prefix.degree(),
            bound: self.bound(),
        })?;
        let site = Arc::new(Site::new(sub_n, bound.min(budget)));
        let mut full_ids = Vec::new();
        for o in site.objects() {
            full_ids.push(self.site.object_id(&prefix.concat(o.comps())?)?);
        }
        let mut mor_ids = Vec::with_capacity(site.morphism_count());
        for f in 0..site.morphism_count() {
            let m = site.morphism(f);
            let (s, t) = site.ends(f);
            let mut lift: Vec<DeltaMap> = prefix.comps().iter().map(|&c| DeltaMap::identity(c)).collect();
            lift.extend(m.lift());
            let big = ThetaMorphism::project(
                self.site.object(full_ids[s]),
                self.site.object(full_ids[t]),
                &lift,
            )?;
            mor_ids.push(self.site.morphism_id(&big)?);
        }
        let sizes = full_ids.iter().map(|&o| self.sizes[o]).collect();
        Ok(Table::from_fn(site, sizes, |f, x| self.act(mor_ids[f], x)))
    }

    pub(crate) fn same_site(&self, other: &Table) -> Result<()> {
        if *self.site != *other.site {
            return Err(Error::Malformed("tables live on different sites".into()));
        }
        Ok(())
    }
}

/// A natural transformation between two tables on the same site.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct TableMap {
    pub components: Vec<Vec<usize>>,
}

impl TableMap {
    pub fn identity(t: &Table) -> TableMap {
        TableMap { components: t.sizes.iter().map(|&s| (0..s).collect()).collect() }
    }

    /// Constant map to the terminal table.
    pub fn to_terminal(t: &Table) -> TableMap {
        TableMap { components: t.sizes.iter().map(|&s| vec![0; s]).collect() }
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &TableMap) -> TableMap {
        TableMap {
            components: self
                .components
                .iter()
                .zip(&next.components)
                .map(|(a, b)| a.iter().map(|&x| b[x]).collect())
                .collect(),
        }
    }

    pub fn validate(&self, source: &Table, target: &Table) -> Result<()> {
        source.same_site(target)?;
        let site = source.site();
        if self.components.len() != source.sizes.len() {
            return Err(Error::Malformed("map has the wrong number of levels".into()));
        }
        for (o, comp) in self.components.iter().enumerate() {
            if comp.len() != source.sizes[o] || comp.iter().any(|&y| y >= target.sizes[o]) {
                return Err(Error::Malformed("map component out of range".into()));
            }
        }
        for f in 0..site.morphism_count() {
            let (s, t) = site.ends(f);
            for x in 0..source.sizes[t] {
                if self.components[s][source.act(f, x)] != target.act(f, self.components[t][x]) {
                    return Err(Error::Malformed("map is not natural".into()));
                }
            }
        }
        Ok(())
    }

    pub fn is_injective_at(&self, obj: ObjId) -> bool {
        let mut seen = alloc::collections::BTreeSet::new();
        self.components[obj].iter().all(|&y| seen.insert(y))
    }

    pub fn is_surjective_at(&self, obj: ObjId, target_size: usize) -> bool {
        let seen: alloc::collections::BTreeSet<_> = self.components[obj].iter().collect();
        seen.len() == target_size
    }

    /// Injective at every stored level of length below `n`; the top length is exempt.
    pub fn is_cofibration(&self, source: &Table) -> bool {
        let n = source.n() as usize;
        source
            .site()
            .objects()
            .iter()
            .enumerate()
            .filter(|(_, o)| o.len() < n)
            .all(|(i, _)| self.is_injective_at(i))
    }

    pub fn is_isomorphism(&self, target: &Table) -> bool {
        (0..self.components.len())
            .all(|o| self.is_injective_at(o) && self.components[o].len() == target.size(o))
    }
}

/// `A` seen as an `n`-precat: levels `(M, M')` with `M` of length `m` repeat `A_M`.
pub fn induce(a: &Table, n: u8, bound: u32) -> Result<Table> {
    let m = a.n();
    if n < m {
        return Err(Error::Unsupported("induction to a lower level"));
    }
    let site = Arc::new(Site::new(n, bound));
    let mut sizes = Vec::new();
    let mut low_ids = Vec::new();
    for o in site.objects() {
        let low = o.prefix(m as usize).at_level(m)?;
        let id = a.site().object_id(&low)?;
        low_ids.push(id);
        sizes.push(a.size(id));
    }
    let mut mor = Vec::with_capacity(site.morphism_count());
    for f in 0..site.morphism_count() {
        let (s, t) = site.ends(f);
        let full = site.morphism(f);
        let keep = full.comps().len().min(m as usize);
        let mut lift: Vec<DeltaMap> = full.comps()[..keep].to_vec();
        let src = a.site().object(low_ids[s]);
        let tgt = a.site().object(low_ids[t]);
        for i in keep..m as usize {
            lift.push(DeltaMap::constant(src.padded(i), tgt.padded(i), 0));
        }
        mor.push(a.site().morphism_id(&ThetaMorphism::project(src, tgt, &lift)?)?);
    }
    Ok(Table::from_fn(site, sizes, |f, x| a.act(mor[f], x)))
}

/// `D ⊕ C` for a 1-precat `D` and an `(n-1)`-precat `C`.
pub fn oplus(d: &Table, c: &Table, bound: u32) -> Result<Table> {
    if d.n() != 1 {
        return Err(Error::LevelMismatch { expected: 1, found: d.n() });
    }
    let n = c.n() + 1;
    let site = Arc::new(Site::new(n, bound));
    let ds = d.site();
    // Degeneracy test: f is totally degenerate when it equals s(v0(f)).
    let level_p = |p: u8| -> Result<ObjId> {
        ds.object_id(&if p == 0 { ThetaObject::point(1) } else { ThetaObject::new(1, alloc::vec![p])? })
    };
    let totally_degenerate = |p: u8, f: usize| -> Result<bool> {
        if p == 0 {
            return Ok(true);
        }
        let obj = level_p(p)?;
        let v0 = d.act(ds.hom(0, obj)[0], f);
        let degen = ds.hom(obj, 0)[0];
        Ok(d.act(degen, v0) == f)
    };
    // Elements of level (p, M'): (f, Some(c)) or (f, None).
    let mut elems: Vec<Vec<(usize, Option<usize>)>> = Vec::new();
    let mut lookup: Vec<alloc::collections::BTreeMap<(usize, Option<usize>), usize>> = Vec::new();
    for o in site.objects() {
        let p = o.padded(0);
        let dp = level_p(p)?;
        let mut list = Vec::new();
        if o.is_empty() {
            for f in 0..d.size(dp) {
                list.push((f, None));
            }
        } else {
            let tail = ThetaObject::new(n - 1, o.comps()[1..].to_vec())?;
            let cs = c.size_of(&tail)?;
            for f in 0..d.size(dp) {
                if totally_degenerate(p, f)? {
                    list.push((f, None));
                } else {
                    for x in 0..cs {
                        list.push((f, Some(x)));
                    }
                }
            }
        }
        let map = list.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        elems.push(list);
        lookup.push(map);
    }
    // Precompute the pieces of every morphism.
    struct Piece {
        head: MorId,
        tail: Option<MorId>,
        src_p: u8,
    }
    let mut pieces = Vec::with_capacity(site.morphism_count());
    for f in 0..site.morphism_count() {
        let m = site.morphism(f);
        let (s, t) = (m.source(), m.target());
        let hs = ThetaObject::new(1, s.comps().first().map(|&x| alloc::vec![x]).unwrap_or_default())?;
        let ht = ThetaObject::new(1, t.comps().first().map(|&x| alloc::vec![x]).unwrap_or_default())?;
        let head = ThetaMorphism::project(&hs, &ht, &m.lift()[..1])?;
        let tail = if m.comps().len() >= 2 || (!m.comps()[0].is_constant() && n >= 2) {
            let ts = ThetaObject::new(n - 1, s.comps().get(1..).unwrap_or(&[]).to_vec())?;
            let tt = ThetaObject::new(n - 1, t.comps().get(1..).unwrap_or(&[]).to_vec())?;
            let lift = m.lift()[1..].to_vec();
            let tm = ThetaMorphism::project(&ts, &tt, &lift)?;
            Some(c.site().morphism_id(&tm)?)
        } else {
            None
        };
        pieces.push(Piece { head: ds.morphism_id(&head)?, tail, src_p: s.padded(0) });
    }
    let sizes: Vec<usize> = elems.iter().map(Vec::len).collect();
    let mut failure = None;
    let table = Table::from_fn(site.clone(), sizes, |f, x| {
        let (s, t) = site.ends(f);
        let (df, cx) = elems[t][x];
        let pc = &pieces[f];
        let g = d.act(pc.head, df);
        let key = match totally_degenerate(pc.src_p, g) {
            Ok(true) => (g, None),
            Ok(false) => match (cx, pc.tail) {
                (Some(cx), Some(tail)) => (g, Some(c.act(tail, cx))),
                _ => (g, None),
            },
            Err(e) => {
                failure = Some(e);
                (g, None)
            }
        };
        match lookup[s].get(&key) {
            Some(&i) => i,
            None => {
                failure.get_or_insert(Error::Malformed("oplus action left its level".into()));
                0
            }
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn site(n: u8, d: u32) -> Arc<Site> {
        Arc::new(Site::new(n, d))
    }

    #[test]
    fn terminal_and_empty_are_functorial() {
        let s = site(2, 3);
        Table::terminal(s.clone()).check_functorial().unwrap();
        Table::empty(s).check_functorial().unwrap();
    }

    #[test]
    fn product_with_terminal_keeps_sizes() {
        let s = site(1, 3);
        let t = Table::terminal(s.clone());
        let two = t.coproduct(&t).unwrap();
        let p = two.product(&t).unwrap();
        assert_eq!(p.sizes(), two.sizes());
        p.check_functorial().unwrap();
        let pp = two.product(&two).unwrap();
        let (p1, p2) = two.product_projections(&two);
        p1.validate(&pp, &two).unwrap();
        p2.validate(&pp, &two).unwrap();
    }
}
