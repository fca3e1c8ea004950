//! Structural checks on n-precats: Segal maps, easiness, truncations, strict models,
//! equivalences and the 1-free ordered conditions.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::categorify::{Engine, EngineConfig, Precat};
use crate::category::{nerve_map, ExplicitCategory};
use crate::error::{Error, Result};
use crate::fincat::{cat1_exact, Completion};
use crate::presentation::PrecatMap;
use crate::search::{table_maps, MapSearch};
use crate::standard::{along, boundary};
use crate::table::{Table, TableMap};
use crate::theta::{DeltaMap, ObjId, Site, ThetaObject};

/// Three-valued answer of a bounded check; `No` carries a witness path.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Yes,
    No(String),
    Unknown(String),
}

impl Verdict {
    pub fn is_yes(&self) -> bool {
        matches!(self, Verdict::Yes)
    }

    pub fn is_no(&self) -> bool {
        matches!(self, Verdict::No(_))
    }

    /// Conjunction: the first `No` wins, then the first `Unknown`.
    pub fn and(self, other: impl FnOnce() -> Result<Verdict>) -> Result<Verdict> {
        match self {
            Verdict::No(_) => Ok(self),
            Verdict::Yes => other(),
            Verdict::Unknown(r) => match other()? {
                Verdict::No(w) => Ok(Verdict::No(w)),
                _ => Ok(Verdict::Unknown(r)),
            },
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Verdict::Yes => "yes",
            Verdict::No(_) => "no",
            Verdict::Unknown(_) => "unknown",
        }
    }

    fn context(self, prefix: &str) -> Verdict {
        match self {
            Verdict::No(w) => Verdict::No(format!("{prefix}: {w}")),
            Verdict::Unknown(w) => Verdict::Unknown(format!("{prefix}: {w}")),
            v => v,
        }
    }
}

/// The precat `A_{M/}` over a prefix, alias of [`Table::slice`] at the full bound.
pub fn slice(a: &Table, prefix: &ThetaObject) -> Result<Table> {
    a.slice(prefix, a.bound())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SegalKind {
    Bijective,
    InjectiveOnly,
    Neither,
}

/// One level `(P, m, M')` of a Segal map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SegalLevel {
    pub level: ThetaObject,
    pub source: usize,
    pub fiber_product: usize,
    pub image: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SegalReport {
    pub kind: SegalKind,
    pub levels: Vec<SegalLevel>,
}

/// The Segal map `A_{(P,m,M')} -> A_{(P,1,M')} ×_{A_P} ... ×_{A_P} A_{(P,1,M')}` at every
/// level inside the bound.
pub fn segal_map(a: &Table, prefix: &ThetaObject, m: u8) -> Result<SegalReport> {
    let site = a.site();
    let l = prefix.len();
    let p_id = site.object_id(prefix)?;
    let mut levels = Vec::new();
    for (o, obj) in site.objects().iter().enumerate() {
        if obj.len() <= l || obj.prefix(l) != *prefix || obj.comps()[l] != m {
            continue;
        }
        let mut edge_comps = obj.comps().to_vec();
        edge_comps[l] = 1;
        let edge = ThetaObject::new(a.n(), edge_comps)?;
        let e_id = site.object_id(&edge)?;
        let pieces = (0..m)
            .map(|i| site.morphism_id(&along(&edge, obj, l, DeltaMap::new(m, vec![i, i + 1])?)?))
            .collect::<Result<Vec<_>>>()?;
        let s = site.morphism_id(&boundary(prefix, &edge, l, 0)?)?;
        let t = site.morphism_id(&boundary(prefix, &edge, l, 1)?)?;
        let mut image = alloc::collections::BTreeSet::new();
        for x in 0..a.size(o) {
            image.insert(pieces.iter().map(|&f| a.act(f, x)).collect::<Vec<_>>());
        }
        // Composable strings of length m, counted by a walk over the prefix level.
        let mut by_source: Vec<Vec<usize>> = vec![Vec::new(); a.size(p_id)];
        for y in 0..a.size(e_id) {
            by_source[a.act(s, y)].push(y);
        }
        let mut ways: Vec<usize> = vec![1; a.size(p_id)];
        for _ in 0..m {
            ways = (0..a.size(p_id))
                .map(|v| by_source[v].iter().map(|&y| ways[a.act(t, y)]).sum())
                .collect();
        }
        levels.push(SegalLevel {
            level: obj.clone(),
            source: a.size(o),
            fiber_product: ways.iter().sum(),
            image: image.len(),
        });
    }
    let injective = levels.iter().all(|l| l.image == l.source);
    let surjective = levels.iter().all(|l| l.image == l.fiber_product);
    let kind = match (injective, surjective) {
        (true, true) => SegalKind::Bijective,
        (true, false) => SegalKind::InjectiveOnly,
        _ => SegalKind::Neither,
    };
    Ok(SegalReport { kind, levels })
}

/// Every Σ-map within bounds extends along φ.
pub fn is_easy_bounded(engine: &Engine, a: &Table) -> Result<Verdict> {
    Ok(match engine.first_non_extending(a)? {
        None => Verdict::Yes,
        Some(sm) => Verdict::No(format!(
            "no filler for the map from {} with images {:?}",
            engine.shapes[sm.shape].shape.to_text(),
            sm.images
        )),
    })
}

/// The brutal truncation to level `m`: unchanged below length `m`, and at length `m`
/// the quotient by the relation generated by the image of `A_{(M,1)}`.
pub fn truncate_brutal(a: &Table, m: u8) -> Result<Table> {
    if m > a.n() {
        return Err(Error::Unsupported("truncation above the level"));
    }
    let site = a.site();
    let low = Arc::new(Site::new(m, a.bound()));
    let ids = low
        .objects()
        .iter()
        .map(|o| site.object_id(&o.at_level(a.n())?))
        .collect::<Result<Vec<_>>>()?;
    // Classes at the length-m levels.
    let mut class: Vec<Vec<usize>> = Vec::with_capacity(ids.len());
    let mut counts = Vec::with_capacity(ids.len());
    for (lo, obj) in low.objects().iter().enumerate() {
        let id = ids[lo];
        let mut uf = crate::util::UnionFind::new(a.size(id));
        if obj.len() == m as usize && m < a.n() {
            let big = obj.at_level(a.n())?;
            if let Ok(up_id) = site.object_id(&big.concat(&[1])?) {
                let up = site.object(up_id);
                let s = site.morphism_id(&boundary(&big, up, m as usize, 0)?)?;
                let t = site.morphism_id(&boundary(&big, up, m as usize, 1)?)?;
                for z in 0..a.size(up_id) {
                    uf.union(a.act(s, z), a.act(t, z));
                }
            }
        }
        let (c, k) = uf.classes();
        class.push(c);
        counts.push(k);
    }
    let mut reps: Vec<Vec<usize>> = counts.iter().map(|&k| vec![usize::MAX; k]).collect();
    for (lo, row) in class.iter().enumerate() {
        for (x, &c) in row.iter().enumerate() {
            if reps[lo][c] == usize::MAX {
                reps[lo][c] = x;
            }
        }
    }
    let mors = (0..low.morphism_count())
        .map(|f| {
            let g = low.morphism(f);
            let (s, t) = low.ends(f);
            let (src, tgt) = (site.object(ids[s]), site.object(ids[t]));
            let mut lift = g.lift();
            for i in lift.len()..a.n() as usize {
                lift.push(DeltaMap::constant(src.padded(i), tgt.padded(i), 0));
            }
            let big = crate::theta::ThetaMorphism::project(src, tgt, &lift)?;
            site.morphism_id(&big)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Table::from_fn(low.clone(), counts, |f, c| {
        let (s, t) = low.ends(f);
        class[s][a.act(mors[f], reps[t][c])]
    }))
}

/// `Ind^n_m`: an `m`-precat repeated along the missing components.
pub fn induce(a: &Table, n: u8) -> Result<Table> {
    crate::table::induce(a, n, a.bound())
}

/// A finite table whose Segal maps are bijective at every prefix inside the bound.
#[derive(Clone, Debug, PartialEq)]
pub struct StrictModel {
    table: Table,
}

impl StrictModel {
    pub fn new(table: Table) -> Result<StrictModel> {
        if table.n() >= 1 && table.bound() < 2 {
            return Err(Error::Unsupported("strict models need degree bound at least 2"));
        }
        let site = table.site().clone();
        for obj in site.objects() {
            for (l, &m) in obj.comps().iter().enumerate() {
                if m < 2 || obj.comps()[l + 1..].iter().any(|&c| c != 1) && l + 1 < obj.len() {
                    continue;
                }
                let prefix = obj.prefix(l);
                let rep = segal_map(&table, &prefix, m)?;
                if rep.kind != SegalKind::Bijective {
                    let bad = rep.levels.iter().find(|x| x.image != x.source || x.image != x.fiber_product);
                    return Err(Error::Malformed(format!(
                        "Segal map is not bijective at {}",
                        bad.map(|b| format!("{}", b.level)).unwrap_or_default()
                    )));
                }
            }
        }
        Ok(StrictModel { table })
    }

    /// The nerve of a category at level 1.
    pub fn from_category(c: &ExplicitCategory, bound: u32) -> StrictModel {
        StrictModel { table: c.nerve(Arc::new(Site::new(1, bound.max(2)))) }
    }

    pub fn table(&self) -> &Table {
        &self.table
    }

    pub fn n(&self) -> u8 {
        self.table.n()
    }

    pub fn object_count(&self) -> usize {
        self.table.size(0)
    }

    fn level(&self, comps: &[u8]) -> ObjId {
        let o = ThetaObject::new(self.n(), comps.to_vec()).expect("valid object");
        self.table.site().object_id(&o).expect("within bound")
    }

    /// 1-cells from `x` to `y`, as indices into level `(1)`.
    pub fn cells(&self, x: usize, y: usize) -> Vec<usize> {
        let e = self.level(&[1]);
        (0..self.table.size(e)).filter(|&z| self.table.endpoints(e, z) == (x, y)).collect()
    }

    /// The hom model from `x` to `y` with, per level, the indices it keeps.
    pub fn hom(&self, x: usize, y: usize) -> Result<(StrictModel, Vec<Vec<usize>>)> {
        let one = ThetaObject::new(self.n(), vec![1])?;
        let sl = self.table.slice(&one, self.table.bound())?;
        let site = self.table.site();
        let members: Vec<Vec<usize>> = sl
            .site()
            .objects()
            .iter()
            .map(|o| {
                let full = site.object_id(&one.concat(o.comps()).expect("fits")).expect("within bound");
                (0..self.table.size(full)).filter(|&z| self.table.endpoints(full, z) == (x, y)).collect()
            })
            .collect();
        let (sub, _) = sl.subtable(&members)?;
        Ok((StrictModel { table: sub }, members))
    }

    pub fn identity1(&self, x: usize) -> usize {
        let site = self.table.site();
        let e = self.level(&[1]);
        self.table.act(site.hom(e, 0)[0], x)
    }

    /// `g ∘ f` for 1-cells, read off the unique 2-simplex with spine `(f, g)`.
    pub fn compose1(&self, f: usize, g: usize) -> Option<usize> {
        let site = self.table.site();
        let tri = self.level(&[2]);
        let tri_obj = site.object(tri).clone();
        let e_obj = ThetaObject::new(self.n(), vec![1]).ok()?;
        let face = |vals: Vec<u8>| {
            site.morphism_id(&along(&e_obj, &tri_obj, 0, DeltaMap::new(2, vals).ok()?).ok()?).ok()
        };
        let (d2, d0, d1) = (face(vec![0, 1])?, face(vec![1, 2])?, face(vec![0, 2])?);
        (0..self.table.size(tri))
            .find(|&z| self.table.act(d2, z) == f && self.table.act(d0, z) == g)
            .map(|z| self.table.act(d1, z))
    }

    /// Objects related by an equivalence: 1-cells both ways whose composites are
    /// equivalent to identities in the hom models.
    pub fn equivalent_objects(&self, x: usize, y: usize) -> Result<bool> {
        if x == y {
            return Ok(true);
        }
        if self.n() == 0 {
            return Ok(false);
        }
        let there = self.cells(x, y);
        let back = self.cells(y, x);
        if there.is_empty() || back.is_empty() {
            return Ok(false);
        }
        let (hx, mx) = self.hom(x, x)?;
        let (hy, my) = self.hom(y, y)?;
        let pos = |m: &Vec<Vec<usize>>, z: usize| m[0].iter().position(|&w| w == z).expect("in hom");
        let (ix, iy) = (pos(&mx, self.identity1(x)), pos(&my, self.identity1(y)));
        for &a in &there {
            for &b in &back {
                let (Some(ba), Some(ab)) = (self.compose1(a, b), self.compose1(b, a)) else { continue };
                if hx.equivalent_objects(pos(&mx, ba), ix)? && hy.equivalent_objects(pos(&my, ab), iy)? {
                    return Ok(true);
                }
            }
        }
        Ok(false)
    }

    /// Classes of objects up to equivalence: a class index per object and the count.
    pub fn object_classes(&self) -> Result<(Vec<usize>, usize)> {
        let k = self.object_count();
        let mut uf = crate::util::UnionFind::new(k);
        for x in 0..k {
            for y in x + 1..k {
                if uf.find(x) != uf.find(y) && self.equivalent_objects(x, y)? {
                    uf.union(x, y);
                }
            }
        }
        Ok(uf.classes())
    }
}

/// The good truncation: hom models replaced by their sets of equivalence classes.
/// Supported for `n <= 2`; the composition on classes is checked to be well defined.
pub fn truncate_good(a: &StrictModel) -> Result<StrictModel> {
    match a.n() {
        0 => Ok(a.clone()),
        1 => {
            let (_, k) = a.object_classes()?;
            let site = Arc::new(Site::new(0, a.table.bound()));
            Ok(StrictModel { table: Table::from_fn(site, vec![k], |_, x| x) })
        }
        2 => {
            let objects = a.object_count();
            let mut ends = Vec::new();
            let mut class_of: BTreeMap<usize, usize> = BTreeMap::new();
            let mut members: Vec<Vec<usize>> = Vec::new();
            for x in 0..objects {
                for y in 0..objects {
                    let (h, m) = a.hom(x, y)?;
                    let (cls, k) = h.object_classes()?;
                    let base = ends.len();
                    for _ in 0..k {
                        ends.push((x, y));
                        members.push(Vec::new());
                    }
                    for (i, &z) in m[0].iter().enumerate() {
                        class_of.insert(z, base + cls[i]);
                        members[base + cls[i]].push(z);
                    }
                }
            }
            let mut table = vec![vec![None; ends.len()]; ends.len()];
            for g in 0..ends.len() {
                for f in 0..ends.len() {
                    if ends[f].1 != ends[g].0 {
                        continue;
                    }
                    let mut seen = None;
                    for &zf in &members[f] {
                        for &zg in &members[g] {
                            let c = a
                                .compose1(zf, zg)
                                .map(|h| class_of[&h])
                                .ok_or_else(|| Error::Malformed("missing composite".into()))?;
                            if seen.is_some_and(|s| s != c) {
                                return Err(Error::Malformed("composition does not descend to classes".into()));
                            }
                            seen = Some(c);
                        }
                    }
                    table[g][f] = seen;
                }
            }
            let identities = (0..objects).map(|x| class_of[&a.identity1(x)]).collect();
            let c = ExplicitCategory::new(objects, ends, identities, |g, f| table[g][f].expect("composable"))?;
            Ok(StrictModel::from_category(&c, a.table.bound()))
        }
        _ => Err(Error::Unsupported("good truncation is implemented for n <= 2")),
    }
}

/// Equivalence of strict models: bijection at level 0, otherwise equivalences on all
/// hom models and essential surjectivity up to equivalence of objects.
pub fn is_equivalence(f: &TableMap, a: &StrictModel, b: &StrictModel) -> Result<Verdict> {
    if a.n() != b.n() {
        return Err(Error::LevelMismatch { expected: a.n(), found: b.n() });
    }
    f.validate(&a.table, &b.table)?;
    let obj = &f.components[0];
    if a.n() == 0 {
        if !f.is_injective_at(0) {
            return Ok(Verdict::No("not injective".into()));
        }
        if !f.is_surjective_at(0, b.object_count()) {
            return Ok(Verdict::No("not surjective".into()));
        }
        return Ok(Verdict::Yes);
    }
    for x in 0..a.object_count() {
        for y in 0..a.object_count() {
            let (ha, ma) = a.hom(x, y)?;
            let (hb, mb) = b.hom(obj[x], obj[y])?;
            let one = ThetaObject::new(a.n(), vec![1])?;
            let components = ha
                .table
                .site()
                .objects()
                .iter()
                .enumerate()
                .map(|(o, lev)| {
                    let full = a.table.site().object_id(&one.concat(lev.comps()).expect("fits")).expect("bound");
                    ma[o]
                        .iter()
                        .map(|&z| {
                            let w = f.components[full][z];
                            mb[o].iter().position(|&v| v == w).expect("endpoints are preserved")
                        })
                        .collect()
                })
                .collect();
            let v = is_equivalence(&TableMap { components }, &ha, &hb)?;
            if !v.is_yes() {
                return Ok(v.context(&format!("hom({x},{y})")));
            }
        }
    }
    for u in 0..b.object_count() {
        let mut hit = false;
        for &img in obj {
            if b.equivalent_objects(img, u)? {
                hit = true;
                break;
            }
        }
        if !hit {
            return Ok(Verdict::No(format!("object {u} is not in the essential image")));
        }
    }
    Ok(Verdict::Yes)
}

/// Default ceiling on arrows explored by the exact n=1 engine.
pub const EXACT_ARROW_LIMIT: usize = 20_000;

/// The exact categorification of a 1-precat: the category and the map of nerves from
/// the input's 1-skeleton, or `None` when the word service gives up.
pub fn cat1_nerve(a: &Table) -> Result<Option<(ExplicitCategory, Vec<Vec<usize>>)>> {
    let low = a.restrict(Arc::new(Site::new(1, 2)))?;
    let (fc, gen_of) = cat1_exact(&low)?;
    let Completion::Finite(done) = fc.complete(EXACT_ARROW_LIMIT) else { return Ok(None) };
    let e = low.site().object_id(&ThetaObject::new(1, vec![1])?)?;
    let edges: Vec<usize> = (0..low.size(e))
        .map(|z| match gen_of[z] {
            Some(g) => done.generator_arrows[g],
            None => done.category.identity(low.endpoints(e, z).0),
        })
        .collect();
    Ok(Some((done.category, vec![(0..low.size(0)).collect(), edges])))
}

/// A functor between the exact categorifications of two 1-precats.
#[derive(Clone, Debug)]
pub struct InducedFunctor {
    pub source: ExplicitCategory,
    pub target: ExplicitCategory,
    pub objects: Vec<usize>,
    pub arrows: Vec<usize>,
}

/// The functor induced by a map of 1-precats, or `None` when either side is undecided.
pub fn induced_functor(a: &Table, b: &Table, f: &TableMap) -> Result<Option<InducedFunctor>> {
    let (Some((ca, ia)), Some((cb, ib))) = (cat1_nerve(a)?, cat1_nerve(b)?) else {
        return Ok(None);
    };
    let e = a.site().object_id(&ThetaObject::new(1, vec![1])?)?;
    let mut arrows = vec![usize::MAX; ca.arrow_count()];
    for x in 0..ca.object_count() {
        arrows[ca.identity(x)] = cb.identity(f.components[0][x]);
    }
    // Close the images under composition with edges.
    let mut changed = true;
    while changed {
        changed = false;
        for z in 0..a.size(e) {
            let g = ia[1][z];
            let gi = ib[1][f.components[e][z]];
            for h in 0..ca.arrow_count() {
                if arrows[h] == usize::MAX {
                    continue;
                }
                if let Some(k) = ca.compose(g, h) {
                    let img = cb.compose(gi, arrows[h]).expect("endpoints are preserved");
                    if arrows[k] == usize::MAX {
                        arrows[k] = img;
                        changed = true;
                    } else if arrows[k] != img {
                        return Err(Error::Malformed("map does not induce a functor".into()));
                    }
                }
            }
        }
    }
    if arrows.contains(&usize::MAX) {
        return Err(Error::Malformed("category is not generated by its edges".into()));
    }
    let objects = f.components[0].clone();
    Ok(Some(InducedFunctor { source: ca, target: cb, objects, arrows }))
}

/// Weak equivalence of a map of tables, decided exactly at n <= 1 and through the
/// categorification engine above that.
pub fn weak_equiv_tables(a: &Table, b: &Table, f: &TableMap, cfg: &EngineConfig) -> Result<Verdict> {
    f.validate(a, b)?;
    match a.n() {
        0 => {
            let ok = f.is_injective_at(0) && f.is_surjective_at(0, b.size(0));
            Ok(if ok { Verdict::Yes } else { Verdict::No("not a bijection".into()) })
        }
        1 => {
            let Some(func) = induced_functor(a, b, f)? else {
                return Ok(Verdict::Unknown("word problem undecided within the arrow budget".into()));
            };
            let site = Arc::new(Site::new(1, 2));
            let fm = nerve_map(&func.source, &func.target, &func.objects, &func.arrows, &site)?;
            is_equivalence(&fm, &StrictModel::from_category(&func.source, 2), &StrictModel::from_category(&func.target, 2))
        }
        n => {
            let mut cfg = cfg.clone();
            cfg.degree_bound = a.bound();
            let engine = Engine::new(n, cfg)?;
            let sa = engine.cat_bounded(&Precat::from_table(a)?)?;
            let sb = engine.cat_bounded(&Precat::from_table(b)?)?;
            if !sa.stabilized || !sb.stabilized {
                return Ok(Verdict::Unknown("categorification did not stabilize".into()));
            }
            let (ta, tb) = (&sa.result.table, &sb.result.table);
            let mut fixed: Vec<Vec<Option<usize>>> = (0..ta.sizes().len()).map(|o| vec![None; ta.size(o)]).collect();
            for (o, row) in f.components.iter().enumerate() {
                for (x, &y) in row.iter().enumerate() {
                    let want = sb.map.components[o][y];
                    let slot = &mut fixed[o][sa.map.components[o][x]];
                    if slot.is_some_and(|v| v != want) {
                        return Ok(Verdict::Unknown("no induced map between the categorifications".into()));
                    }
                    *slot = Some(want);
                }
            }
            let mut induced = None;
            table_maps(ta, tb, &MapSearch { injective: false, limit: engine.cfg.limit, fixed }, |m| {
                induced = Some(m.clone());
                false
            })?;
            let Some(g) = induced else {
                return Ok(Verdict::Unknown("no induced map between the categorifications".into()));
            };
            match (StrictModel::new(ta.clone()), StrictModel::new(tb.clone())) {
                (Ok(ma), Ok(mb)) => is_equivalence(&g, &ma, &mb),
                _ => Ok(Verdict::Unknown("categorification is not strict within bounds".into())),
            }
        }
    }
}

/// Weak equivalence of a map of presentations at the configured degree bound.
pub fn weak_equiv_bounded(f: &PrecatMap, cfg: &EngineConfig) -> Result<Verdict> {
    let bound = if f.source.n() == 1 { cfg.degree_bound.max(2) } else { cfg.degree_bound };
    let site = Arc::new(Site::new(f.source.n(), bound));
    let a = f.source.tabulate_on(site.clone())?;
    let b = f.target.tabulate_on(site)?;
    let m = f.tabulate(&a, &b)?;
    weak_equiv_tables(&a.table, &b.table, &m, cfg)
}

/// The fiber `A_{m/}(x_0, ..., x_m)` as a level `n-1` table, with the indices it keeps.
fn sequence_fiber(a: &Table, seq: &[usize], bound: u32) -> Result<(Table, Vec<Vec<usize>>)> {
    let m = (seq.len() - 1) as u8;
    let top = ThetaObject::new(a.n(), vec![m])?;
    let sl = a.slice(&top, bound)?;
    let site = a.site();
    let members: Vec<Vec<usize>> = sl
        .site()
        .objects()
        .iter()
        .map(|o| {
            let full = site.object_id(&top.concat(o.comps()).expect("fits")).expect("within bound");
            (0..a.size(full)).filter(|&z| a.vertices(full, z) == seq).collect()
        })
        .collect();
    let (sub, _) = sl.subtable(&members)?;
    Ok((sub, members))
}

/// The 1-free ordered conditions for a total order given as a rank per object.
pub fn is_1_free_ordered(a: &Table, rank: &[usize], cfg: &EngineConfig) -> Result<Verdict> {
    if a.n() == 0 || rank.len() != a.size(0) {
        return Err(Error::Malformed("the order must rank every object of a precat with n >= 1".into()));
    }
    let site = a.site();
    for (o, obj) in site.objects().iter().enumerate() {
        if obj.is_empty() {
            continue;
        }
        for z in 0..a.size(o) {
            let v = a.vertices(o, z);
            if v.windows(2).any(|w| rank[w[0]] > rank[w[1]]) {
                return Ok(Verdict::No(format!("FO1: element {z} at {obj} has vertices {v:?} out of order")));
            }
        }
    }
    let objects: Vec<usize> = {
        let mut o: Vec<usize> = (0..a.size(0)).collect();
        o.sort_by_key(|&x| rank[x]);
        o
    };
    let needed = if a.n() >= 2 { 2 } else { 0 };
    let mut verdict = Verdict::Yes;
    for m in 1..=a.bound().saturating_sub(needed) as u8 {
        let sub_bound = a.bound() - m as u32;
        // Weakly increasing sequences of m+1 objects.
        let mut seqs: Vec<Vec<usize>> = vec![Vec::new()];
        for _ in 0..=m {
            seqs = seqs
                .into_iter()
                .flat_map(|s| {
                    let start = s.last().map_or(0, |&l| objects.iter().position(|&x| x == l).expect("object"));
                    objects[start..].iter().map(move |&x| {
                        let mut t = s.clone();
                        t.push(x);
                        t
                    })
                })
                .collect();
        }
        for seq in seqs {
            let (fiber, fm) = sequence_fiber(a, &seq, sub_bound)?;
            let stationary = seq.iter().all(|&x| x == seq[0]);
            let v = if stationary {
                let pt = Table::terminal(fiber.site().clone());
                weak_equiv_tables(&fiber, &pt, &TableMap::to_terminal(&fiber), cfg)?
                    .context(&format!("FO3 at {seq:?}"))
            } else if m >= 2 {
                let (target, tm) = sequence_fiber(a, &[seq[0], seq[m as usize]], sub_bound)?;
                let long = ThetaObject::new(a.n(), vec![1])?;
                let big = ThetaObject::new(a.n(), vec![m])?;
                let components = fiber
                    .site()
                    .objects()
                    .iter()
                    .enumerate()
                    .map(|(o, lev)| -> Result<Vec<usize>> {
                        let src = long.concat(lev.comps())?;
                        let dst = big.concat(lev.comps())?;
                        let mor = site.morphism_id(&along(&src, &dst, 0, DeltaMap::new(m, vec![0, m])?)?)?;
                        let full = site.object_id(&dst)?;
                        let _ = full;
                        Ok(fm[o]
                            .iter()
                            .map(|&z| tm[o].iter().position(|&w| w == a.act(mor, z)).expect("same ends"))
                            .collect())
                    })
                    .collect::<Result<Vec<_>>>()?;
                let tsub = target.restrict(fiber.site().clone())?;
                weak_equiv_tables(&fiber, &tsub, &TableMap { components }, cfg)?
                    .context(&format!("FO2 at {seq:?}"))
            } else {
                continue;
            };
            verdict = verdict.and(|| Ok(v))?;
            if verdict.is_no() {
                return Ok(verdict);
            }
        }
    }
    Ok(verdict)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::Presentation;
    use crate::standard::upsilon;

    fn spine_table(bound: u32) -> Table {
        upsilon(&ThetaObject::point(1), 2, 0).unwrap().tabulate(bound).unwrap().table
    }

    #[test]
    fn segal_on_nerves_and_spines() {
        let nerve = ExplicitCategory::chain(2).nerve(Arc::new(Site::new(1, 4)));
        for m in 1..=4 {
            assert_eq!(segal_map(&nerve, &ThetaObject::point(1), m).unwrap().kind, SegalKind::Bijective);
        }
        let rep = segal_map(&spine_table(2), &ThetaObject::point(1), 2).unwrap();
        assert_eq!(rep.kind, SegalKind::InjectiveOnly);
        // 3 totally degenerate and 4 once-degenerate triangles; the 8th composable
        // pair is (a, b), which has no filler.
        assert_eq!((rep.levels[0].source, rep.levels[0].fiber_product), (7, 8));
    }

    #[test]
    fn easy_check() {
        let e = Engine::new(1, EngineConfig::new(3, 4, 3)).unwrap();
        let nerve = ExplicitCategory::chain(2).nerve(e.site.clone());
        assert!(is_easy_bounded(&e, &nerve).unwrap().is_yes());
        assert!(is_easy_bounded(&e, &spine_table(3)).unwrap().is_no());
    }

    #[test]
    fn brutal_truncations() {
        let nerve = ExplicitCategory::indiscrete(3).nerve(Arc::new(Site::new(1, 3)));
        let t0 = truncate_brutal(&nerve, 0).unwrap();
        assert_eq!(t0.sizes(), &[1]);
        let t1 = truncate_brutal(&nerve, 1).unwrap();
        assert_eq!(t1.sizes(), nerve.sizes());
    }

    #[test]
    fn good_truncation_counts_classes() {
        let free = StrictModel::from_category(&ExplicitCategory::chain(2), 2);
        assert_eq!(truncate_good(&free).unwrap().table().sizes(), &[3]);
        let ibar = StrictModel::from_category(&ExplicitCategory::indiscrete(2), 2);
        assert_eq!(truncate_good(&ibar).unwrap().table().sizes(), &[1]);
    }

    #[test]
    fn equivalences_of_strict_models() {
        let ibar = StrictModel::from_category(&ExplicitCategory::indiscrete(2), 2);
        let pt = StrictModel::from_category(&ExplicitCategory::discrete(1), 2);
        let f = TableMap::to_terminal(ibar.table());
        assert!(is_equivalence(&f, &ibar, &pt).unwrap().is_yes());
        assert!(is_equivalence(&TableMap::identity(ibar.table()), &ibar, &ibar).unwrap().is_yes());
        let one = ExplicitCategory::discrete(1);
        let two = ExplicitCategory::discrete(2);
        let site = Arc::new(Site::new(1, 2));
        let inc = nerve_map(&one, &two, &[0], &[0], &site).unwrap();
        let v = is_equivalence(&inc, &StrictModel::from_category(&one, 2), &StrictModel::from_category(&two, 2));
        assert!(v.unwrap().is_no());
    }

    #[test]
    fn spine_into_simplex_is_a_weak_equivalence() {
        let spine = upsilon(&ThetaObject::point(1), 2, 0).unwrap();
        let tri = Presentation::representable(&ThetaObject::new(1, vec![2]).unwrap());
        let edge = |a: u8, b: u8| along(&ThetaObject::new(1, vec![1]).unwrap(), &ThetaObject::new(1, vec![2]).unwrap(), 0, DeltaMap::new(2, vec![a, b]).unwrap()).unwrap();
        let f = PrecatMap::new(spine, tri, vec![
            crate::presentation::Element::new(0, edge(0, 1)),
            crate::presentation::Element::new(0, edge(1, 2)),
        ])
        .unwrap();
        let cfg = EngineConfig::new(2, 4, 3);
        assert!(weak_equiv_bounded(&f, &cfg).unwrap().is_yes());
        let two = Presentation::representable(&ThetaObject::point(1))
            .coproduct(&Presentation::representable(&ThetaObject::point(1)))
            .unwrap();
        let pt = ThetaObject::point(1);
        let fold = PrecatMap::new(two, Presentation::representable(&pt), vec![
            crate::presentation::Element::new(0, crate::theta::ThetaMorphism::identity(&pt)),
            crate::presentation::Element::new(0, crate::theta::ThetaMorphism::identity(&pt)),
        ])
        .unwrap();
        assert!(weak_equiv_bounded(&fold, &cfg).unwrap().is_no());
    }

    #[test]
    fn free_ordered_examples() {
        let cfg = EngineConfig::new(3, 4, 3);
        assert!(is_1_free_ordered(&spine_table(3), &[0, 1, 2], &cfg).unwrap().is_yes());
        assert!(is_1_free_ordered(&spine_table(3), &[2, 1, 0], &cfg).unwrap().is_no());
        let ibar = ExplicitCategory::indiscrete(2).nerve(Arc::new(Site::new(1, 3)));
        assert!(is_1_free_ordered(&ibar, &[0, 1], &cfg).unwrap().is_no());
        let pt = Table::terminal(Arc::new(Site::new(1, 3)));
        assert!(is_1_free_ordered(&pt, &[0], &cfg).unwrap().is_yes());
    }
}
