//! n-precats presented as coequalizers of finite coproducts of representables.

use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::table::{Table, TableMap};
use crate::theta::{hom_theta, Site, ThetaMorphism, ThetaObject};
use crate::util::UnionFind;

/// A generator index together with a morphism into that generator's object.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Element {
    pub gen: usize,
    pub map: ThetaMorphism,
}

impl Element {
    pub fn new(gen: usize, map: ThetaMorphism) -> Self {
        Element { gen, map }
    }

    /// The level this element lives at.
    pub fn level(&self) -> &ThetaObject {
        self.map.source()
    }

    /// Restriction along `f`; not canonicalized.
    pub fn restrict(&self, f: &ThetaMorphism) -> Result<Element> {
        Ok(Element { gen: self.gen, map: self.map.compose(f)? })
    }
}

/// One identification arc: `left ∘ f ~ right ∘ f` for every `f` into `source`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    pub source: ThetaObject,
    pub left: Element,
    pub right: Element,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    n: u8,
    generators: Vec<ThetaObject>,
    relations: Vec<Relation>,
}

impl Presentation {
    pub fn new(n: u8, generators: Vec<ThetaObject>, relations: Vec<Relation>) -> Result<Self> {
        for g in &generators {
            if g.n() != n {
                return Err(Error::LevelMismatch { expected: n, found: g.n() });
            }
        }
        for (j, r) in relations.iter().enumerate() {
            if r.source.n() != n {
                return Err(Error::LevelMismatch { expected: n, found: r.source.n() });
            }
            for side in [&r.left, &r.right] {
                let target = generators.get(side.gen).ok_or(Error::InvalidGenerator(side.gen))?;
                if side.map.source() != &r.source || side.map.target() != target {
                    return Err(Error::RelationViolated(j));
                }
            }
        }
        Ok(Presentation { n, generators, relations })
    }

    pub fn empty(n: u8) -> Self {
        Presentation { n, generators: Vec::new(), relations: Vec::new() }
    }

    /// The representable `h(M)`.
    pub fn representable(obj: &ThetaObject) -> Self {
        Presentation { n: obj.n(), generators: alloc::vec![obj.clone()], relations: Vec::new() }
    }

    pub fn n(&self) -> u8 {
        self.n
    }

    pub fn generators(&self) -> &[ThetaObject] {
        &self.generators
    }

    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    /// Largest degree among generators and arc sources.
    pub fn max_degree(&self) -> u32 {
        self.generators
            .iter()
            .map(ThetaObject::degree)
            .chain(self.relations.iter().map(|r| r.source.degree()))
            .max()
            .unwrap_or(0)
    }

    /// Adds a generator, returning its index.
    pub fn add_generator(&mut self, obj: ThetaObject) -> Result<usize> {
        if obj.n() != self.n {
            return Err(Error::LevelMismatch { expected: self.n, found: obj.n() });
        }
        self.generators.push(obj);
        Ok(self.generators.len() - 1)
    }

    pub fn add_relation(&mut self, rel: Relation) -> Result<()> {
        let j = self.relations.len();
        for side in [&rel.left, &rel.right] {
            let target = self.generators.get(side.gen).ok_or(Error::InvalidGenerator(side.gen))?;
            if side.map.source() != &rel.source || side.map.target() != target {
                return Err(Error::RelationViolated(j));
            }
        }
        self.relations.push(rel);
        Ok(())
    }

    /// The generator itself, as an element at its own level.
    pub fn generator_element(&self, gen: usize) -> Result<Element> {
        let obj = self.generators.get(gen).ok_or(Error::InvalidGenerator(gen))?;
        Ok(Element::new(gen, ThetaMorphism::identity(obj)))
    }

    pub fn eval(&self, obj: &ThetaObject) -> Result<Level> {
        let mut cache = HomCache::default();
        self.eval_cached(obj, &mut cache)
    }

    fn eval_cached(&self, obj: &ThetaObject, cache: &mut HomCache) -> Result<Level> {
        if obj.n() != self.n {
            return Err(Error::LevelMismatch { expected: self.n, found: obj.n() });
        }
        let mut homs = Vec::with_capacity(self.generators.len());
        let mut offsets = Vec::with_capacity(self.generators.len() + 1);
        let mut total = 0;
        for g in &self.generators {
            let h = cache.get(obj, g)?;
            offsets.push(total);
            total += h.len();
            homs.push(h);
        }
        offsets.push(total);
        let mut level = Level {
            object: obj.clone(),
            homs,
            offsets,
            class_of: Vec::new(),
            reps: Vec::new(),
        };
        let mut uf = UnionFind::new(total);
        for rel in &self.relations {
            let arrows = cache.get(obj, &rel.source)?;
            for f in arrows.iter() {
                let a = level.key(&rel.left.restrict(f)?).ok_or(Error::InvalidElement)?;
                let b = level.key(&rel.right.restrict(f)?).ok_or(Error::InvalidElement)?;
                uf.union(a, b);
            }
        }
        let (class_of, count) = uf.classes();
        let mut reps: Vec<Option<Element>> = alloc::vec![None; count];
        for key in 0..total {
            let c = class_of[key];
            if reps[c].is_none() {
                reps[c] = Some(level.element_at(key));
            }
        }
        level.class_of = class_of;
        level.reps = reps.into_iter().map(|r| r.expect("every class has a member")).collect();
        Ok(level)
    }

    /// Canonical representative of an element.
    pub fn canonical(&self, x: &Element) -> Result<Element> {
        let level = self.eval(x.level())?;
        let c = level.class(x).ok_or(Error::InvalidElement)?;
        Ok(level.reps[c].clone())
    }

    /// Contravariant action: `f: M -> N` applied to `x` at `N`.
    pub fn act(&self, f: &ThetaMorphism, x: &Element) -> Result<Element> {
        if f.target() != x.level() || self.generators.get(x.gen) != Some(x.map.target()) {
            return Err(Error::InvalidElement);
        }
        self.canonical(&x.restrict(f)?)
    }

    /// Whether two elements at the same level are identified.
    pub fn same_class(&self, x: &Element, y: &Element) -> Result<bool> {
        if x.level() != y.level() {
            return Ok(false);
        }
        let level = self.eval(x.level())?;
        match (level.class(x), level.class(y)) {
            (Some(a), Some(b)) => Ok(a == b),
            _ => Err(Error::InvalidElement),
        }
    }

    /// Levels and action for every object of degree at most `bound`.
    pub fn tabulate(&self, bound: u32) -> Result<Tabulation> {
        self.tabulate_on(Arc::new(Site::new(self.n, bound)))
    }

    pub fn tabulate_on(&self, site: Arc<Site>) -> Result<Tabulation> {
        if site.n() != self.n {
            return Err(Error::LevelMismatch { expected: self.n, found: site.n() });
        }
        let mut cache = HomCache::default();
        let mut levels = Vec::with_capacity(site.objects().len());
        for o in site.objects() {
            levels.push(self.eval_cached(o, &mut cache)?);
        }
        let sizes = levels.iter().map(|l| l.reps.len()).collect();
        let mut failure = None;
        let table = Table::from_fn(site.clone(), sizes, |f, x| {
            let (s, t) = site.ends(f);
            let rep = &levels[t].reps[x];
            match rep.restrict(site.morphism(f)).ok().and_then(|e| levels[s].class(&e)) {
                Some(c) => c,
                None => {
                    failure = Some(Error::InvalidElement);
                    0
                }
            }
        });
        if let Some(e) = failure {
            return Err(e);
        }
        let reps = levels.into_iter().map(|l| l.reps).collect();
        Ok(Tabulation { table, reps })
    }

    /// Disjoint union; generators of `other` are shifted past those of `self`.
    pub fn coproduct(&self, other: &Presentation) -> Result<Presentation> {
        if self.n != other.n {
            return Err(Error::LevelMismatch { expected: self.n, found: other.n });
        }
        let shift = self.generators.len();
        let mut out = self.clone();
        out.generators.extend(other.generators.iter().cloned());
        for r in &other.relations {
            out.relations.push(Relation {
                source: r.source.clone(),
                left: Element::new(r.left.gen + shift, r.left.map.clone()),
                right: Element::new(r.right.gen + shift, r.right.map.clone()),
            });
        }
        Ok(out)
    }

    /// Pushout of `f: A -> B` and `g: A -> C`, with the two coprojections.
    pub fn pushout(f: &PrecatMap, g: &PrecatMap) -> Result<(Presentation, PrecatMap, PrecatMap)> {
        if f.source != g.source {
            return Err(Error::Malformed("pushout legs have different sources".into()));
        }
        let mut d = f.target.coproduct(&g.target)?;
        let shift = f.target.generators.len();
        for (i, obj) in f.source.generators.iter().enumerate() {
            let r = &g.images[i];
            d.relations.push(Relation {
                source: obj.clone(),
                left: f.images[i].clone(),
                right: Element::new(r.gen + shift, r.map.clone()),
            });
        }
        let ib = PrecatMap::inclusion(&f.target, &d, 0)?;
        let ic = PrecatMap::inclusion(&g.target, &d, shift)?;
        Ok((d, ib, ic))
    }
}

#[derive(Default)]
struct HomCache {
    map: BTreeMap<(ThetaObject, ThetaObject), Arc<Vec<ThetaMorphism>>>,
}

impl HomCache {
    fn get(&mut self, s: &ThetaObject, t: &ThetaObject) -> Result<Arc<Vec<ThetaMorphism>>> {
        if let Some(h) = self.map.get(&(s.clone(), t.clone())) {
            return Ok(h.clone());
        }
        let mut h = hom_theta(s, t)?;
        h.sort();
        let h = Arc::new(h);
        self.map.insert((s.clone(), t.clone()), h.clone());
        Ok(h)
    }
}

/// The evaluation of a presentation at one object.
#[derive(Clone, Debug)]
pub struct Level {
    object: ThetaObject,
    homs: Vec<Arc<Vec<ThetaMorphism>>>,
    offsets: Vec<usize>,
    class_of: Vec<usize>,
    reps: Vec<Element>,
}

impl Level {
    pub fn object(&self) -> &ThetaObject {
        &self.object
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    /// Canonical representatives, in increasing order.
    pub fn elements(&self) -> &[Element] {
        &self.reps
    }

    /// Class index of an element of this level.
    pub fn class(&self, x: &Element) -> Option<usize> {
        self.key(x).map(|k| self.class_of[k])
    }

    fn key(&self, x: &Element) -> Option<usize> {
        let h = self.homs.get(x.gen)?;
        h.binary_search(&x.map).ok().map(|i| self.offsets[x.gen] + i)
    }

    fn element_at(&self, key: usize) -> Element {
        let gen = self.offsets.partition_point(|&o| o <= key) - 1;
        Element::new(gen, self.homs[gen][key - self.offsets[gen]].clone())
    }
}

/// A tabulated presentation, remembering a representative for every element.
#[derive(Clone, Debug)]
pub struct Tabulation {
    pub table: Table,
    pub reps: Vec<Vec<Element>>,
}

impl Tabulation {
    /// Index of an element at its level.
    pub fn index_of(&self, x: &Element) -> Option<usize> {
        let o = self.table.site().object_id(x.level()).ok()?;
        self.reps[o].binary_search(x).ok()
    }
}

/// A morphism of presented n-precats, given on generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrecatMap {
    pub source: Presentation,
    pub target: Presentation,
    pub images: Vec<Element>,
}

impl PrecatMap {
    pub fn new(source: Presentation, target: Presentation, images: Vec<Element>) -> Result<Self> {
        let m = PrecatMap { source, target, images };
        m.validate()?;
        Ok(m)
    }

    pub fn identity(a: &Presentation) -> PrecatMap {
        let images = (0..a.generators.len())
            .map(|i| a.generator_element(i).expect("index in range"))
            .collect();
        PrecatMap { source: a.clone(), target: a.clone(), images }
    }

    /// Sends generator `i` of `a` to generator `i + shift` of `d`.
    pub fn inclusion(a: &Presentation, d: &Presentation, shift: usize) -> Result<PrecatMap> {
        let images = (0..a.generators.len())
            .map(|i| d.generator_element(i + shift))
            .collect::<Result<Vec<_>>>()?;
        PrecatMap::new(a.clone(), d.clone(), images)
    }

    /// Every generator lands at its level and every arc is respected.
    pub fn validate(&self) -> Result<()> {
        if self.images.len() != self.source.generators.len() {
            return Err(Error::Malformed("one image per generator is required".into()));
        }
        for (i, (x, obj)) in self.images.iter().zip(&self.source.generators).enumerate() {
            if x.level() != obj || self.target.generators.get(x.gen) != Some(x.map.target()) {
                return Err(Error::InvalidGenerator(i));
            }
        }
        for (j, r) in self.source.relations.iter().enumerate() {
            let a = self.images[r.left.gen].restrict(&r.left.map)?;
            let b = self.images[r.right.gen].restrict(&r.right.map)?;
            if !self.target.same_class(&a, &b)? {
                return Err(Error::RelationViolated(j));
            }
        }
        Ok(())
    }

    /// Image of an arbitrary element of the source, canonicalized in the target.
    pub fn apply(&self, x: &Element) -> Result<Element> {
        let img = self.images.get(x.gen).ok_or(Error::InvalidGenerator(x.gen))?;
        self.target.canonical(&img.restrict(&x.map)?)
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &PrecatMap) -> Result<PrecatMap> {
        if self.target != next.source {
            return Err(Error::NotComposable);
        }
        let images = self.images.iter().map(|x| next.apply(x)).collect::<Result<Vec<_>>>()?;
        Ok(PrecatMap { source: self.source.clone(), target: next.target.clone(), images })
    }

    /// Levelwise components between the two tabulations.
    pub fn tabulate(&self, source: &Tabulation, target: &Tabulation) -> Result<TableMap> {
        let site = source.table.site();
        let mut cache = HomCache::default();
        let mut components = Vec::with_capacity(site.objects().len());
        for (o, obj) in site.objects().iter().enumerate() {
            let level = self.target.eval_cached(obj, &mut cache)?;
            let mut comp = Vec::with_capacity(source.reps[o].len());
            for x in &source.reps[o] {
                let img = self.images[x.gen].restrict(&x.map)?;
                let c = level.class(&img).ok_or(Error::InvalidElement)?;
                let rep = &level.elements()[c];
                comp.push(target.reps[o].binary_search(rep).map_err(|_| Error::InvalidElement)?);
            }
            components.push(comp);
        }
        Ok(TableMap { components })
    }
}
