//! The saturation engine: pushouts along the generating cofibrations until every
//! Σ-map extends, within a degree bound.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::presentation::{Element, PrecatMap, Presentation, Relation};
use crate::search::{presentation_maps, DEFAULT_LIMIT};
use crate::standard::{phi, shapes_up_to, sigma, SigmaShape};
use crate::table::{Table, TableMap};
use crate::theta::{MorId, ObjId, Site, ThetaMorphism};

/// Which generating cofibrations a run pushes along.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    Full,
    /// Only shapes with a nonempty prefix (composition inside hom-levels).
    FixOnly,
    /// Nonempty-prefix shapes plus the empty-prefix shapes with this `m`.
    Gen(u8),
}

/// Order in which a stage's batch is pushed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StageOrder {
    Sorted,
    Reversed,
}

#[derive(Clone, Debug)]
pub struct EngineConfig {
    pub degree_bound: u32,
    pub stage_bound: usize,
    pub m_max: u8,
    pub strategy: Strategy,
    pub order: StageOrder,
    pub limit: u64,
}

impl EngineConfig {
    pub fn new(degree_bound: u32, stage_bound: usize, m_max: u8) -> Self {
        EngineConfig {
            degree_bound,
            stage_bound,
            m_max,
            strategy: Strategy::Full,
            order: StageOrder::Sorted,
            limit: DEFAULT_LIMIT,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.degree_bound == 0 || self.stage_bound == 0 || self.m_max < 2 {
            return Err(Error::Malformed("engine bounds must be positive and m_max at least 2".into()));
        }
        if let Strategy::Gen(m) = self.strategy {
            if m < 2 {
                return Err(Error::InvalidShape("m must be at least 2"));
            }
        }
        Ok(())
    }
}

/// A bounded n-precat together with a presentation whose tabulation it is.
#[derive(Clone, Debug)]
pub struct Precat {
    pub presentation: Presentation,
    pub table: Table,
    /// A presentation element for every table element (not necessarily canonical).
    pub reps: Vec<Vec<Element>>,
}

impl Precat {
    pub fn from_presentation(p: &Presentation, site: Arc<Site>) -> Result<Precat> {
        let tab = p.tabulate_on(site)?;
        Ok(Precat { presentation: p.clone(), table: tab.table, reps: tab.reps })
    }

    /// Presents a table: elements not reachable from a higher degree become generators,
    /// and every restriction of a generator is tied to a chosen expression.
    pub fn from_table(t: &Table) -> Result<Precat> {
        let site = t.site().clone();
        let k = site.objects().len();
        let mut levels: Vec<ObjId> = (0..k).collect();
        levels.sort_by_key(|&o| (core::cmp::Reverse(site.object(o).degree()), o));
        let mut expr: Vec<Vec<Option<Element>>> = (0..k).map(|o| alloc::vec![None; t.size(o)]).collect();
        let mut gens: Vec<(ObjId, usize)> = Vec::new();
        let mut p = Presentation::empty(t.n());
        let mut arcs = Vec::new();
        for &o in &levels {
            for x in 0..t.size(o) {
                if expr[o][x].is_some() {
                    continue;
                }
                let g = p.add_generator(site.object(o).clone())?;
                gens.push((o, x));
                for &f in site.arrows_into(o) {
                    let (s, _) = site.ends(f);
                    let z = t.act(f, x);
                    let here = Element::new(g, site.morphism(f).clone());
                    match &expr[s][z] {
                        None => expr[s][z] = Some(here),
                        Some(e) if *e != here => arcs.push(Relation {
                            source: site.object(s).clone(),
                            left: here,
                            right: e.clone(),
                        }),
                        Some(_) => {}
                    }
                }
            }
        }
        for a in arcs {
            p.add_relation(a)?;
        }
        let reps = expr
            .into_iter()
            .map(|row| row.into_iter().map(|e| e.expect("every element is expressed")).collect())
            .collect();
        Ok(Precat { presentation: p, table: t.clone(), reps })
    }

    /// Canonical text of an element, used in fingerprints.
    pub fn element_text(&self, level: ObjId, x: usize) -> String {
        let e = &self.reps[level][x];
        format!("{}@{}", e.gen, e.map)
    }
}

/// Precomputed data for one generating cofibration on the working site.
#[derive(Clone, Debug)]
pub struct ShapeData {
    pub shape: SigmaShape,
    pub sigma: Presentation,
    pub phi: PrecatMap,
    pub h_level: ObjId,
    pub gen_levels: Vec<ObjId>,
    /// Restriction morphisms `φ(g_i)` from the target level to each generator level.
    pub phi_mors: Vec<MorId>,
    pub h_table: Table,
    pub h_reps: Vec<Vec<Element>>,
}

impl ShapeData {
    pub fn new(shape: SigmaShape, site: &Arc<Site>) -> Result<ShapeData> {
        let sigma = sigma(&shape)?;
        let phi = phi(&shape)?;
        let h_level = site.object_id(&shape.target_object())?;
        let gen_levels = sigma.generators().iter().map(|g| site.object_id(g)).collect::<Result<Vec<_>>>()?;
        let phi_mors = phi.images.iter().map(|e| site.morphism_id(&e.map)).collect::<Result<Vec<_>>>()?;
        let tab = phi.target.tabulate_on(site.clone())?;
        Ok(ShapeData { shape, sigma, phi, h_level, gen_levels, phi_mors, h_table: tab.table, h_reps: tab.reps })
    }

    /// Elements of the `h`-level restricting to the given Σ-map.
    pub fn extensions(&self, t: &Table, images: &[usize]) -> Vec<usize> {
        (0..t.size(self.h_level))
            .filter(|&y| self.phi_mors.iter().zip(images).all(|(&f, &x)| t.act(f, y) == x))
            .collect()
    }

    /// The Σ-map obtained by restricting an element of the `h`-level along φ.
    pub fn restrict(&self, t: &Table, y: usize) -> Vec<usize> {
        self.phi_mors.iter().map(|&f| t.act(f, y)).collect()
    }
}

/// A Σ-map into the current table: shape index and image of each Σ generator.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct SigmaMap {
    pub shape: usize,
    pub images: Vec<usize>,
}

/// Already-extended Σ-maps with their chosen extensions.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Marking {
    entries: BTreeMap<SigmaMap, usize>,
}

impl Marking {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, key: &SigmaMap) -> Option<usize> {
        self.entries.get(key).copied()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&SigmaMap, &usize)> {
        self.entries.iter()
    }

    /// Moves every entry along a map of tables; colliding keys keep their first extension.
    pub fn transport(&self, shapes: &[ShapeData], f: &TableMap) -> Marking {
        let mut entries = BTreeMap::new();
        for (k, &ext) in &self.entries {
            let sd = &shapes[k.shape];
            let images = k.images.iter().zip(&sd.gen_levels).map(|(&x, &o)| f.components[o][x]).collect();
            entries.entry(SigmaMap { shape: k.shape, images }).or_insert(f.components[sd.h_level][ext]);
        }
        Marking { entries }
    }

    /// Every stored extension restricts along φ to its key.
    pub fn check(&self, shapes: &[ShapeData], t: &Table) -> Result<()> {
        for (k, &ext) in &self.entries {
            if shapes[k.shape].restrict(t, ext) != k.images {
                return Err(Error::Malformed(format!("marking entry for shape {} is unsound", k.shape)));
            }
        }
        Ok(())
    }

    /// `(fingerprint, extension)` pairs in canonical order.
    pub fn fingerprints(&self, shapes: &[ShapeData], a: &Precat) -> Vec<(String, String)> {
        let mut out: Vec<(String, String)> = self
            .entries
            .iter()
            .map(|(k, &ext)| {
                let sd = &shapes[k.shape];
                let imgs: Vec<String> =
                    k.images.iter().zip(&sd.gen_levels).map(|(&x, &o)| a.element_text(o, x)).collect();
                (format!("{}|{}", sd.shape.to_text(), imgs.join(",")), a.element_text(sd.h_level, ext))
            })
            .collect();
        out.sort();
        out
    }
}

/// Outcome of one saturation stage.
#[derive(Clone, Debug)]
pub struct Stage {
    pub result: Precat,
    pub marking: Marking,
    /// Levelwise map from the previous table into the new one.
    pub map: TableMap,
    pub pushed: usize,
}

/// The result of a bounded run.
#[derive(Clone, Debug)]
pub struct Saturation {
    pub result: Precat,
    pub marking: Marking,
    /// Composite levelwise map from the input into the result.
    pub map: TableMap,
    pub stabilized: bool,
    pub stages: usize,
}

/// The engine for one level and degree bound.
#[derive(Clone, Debug)]
pub struct Engine {
    pub site: Arc<Site>,
    pub shapes: Vec<ShapeData>,
    pub cfg: EngineConfig,
}

impl Engine {
    pub fn new(n: u8, cfg: EngineConfig) -> Result<Engine> {
        cfg.validate()?;
        let site = Arc::new(Site::new(n, cfg.degree_bound));
        let shapes = shapes_up_to(n, cfg.degree_bound, cfg.m_max)
            .into_iter()
            .filter(|s| match cfg.strategy {
                Strategy::Full => true,
                Strategy::FixOnly => !s.prefix().is_empty(),
                Strategy::Gen(m) => !s.prefix().is_empty() || s.m() == m,
            })
            .map(|s| ShapeData::new(s, &site))
            .collect::<Result<Vec<_>>>()?;
        if n == 1 && cfg.strategy == Strategy::FixOnly {
            return Err(Error::Unsupported("the fix strategy needs n >= 2"));
        }
        Ok(Engine { site, shapes, cfg })
    }

    pub fn precat(&self, p: &Presentation) -> Result<Precat> {
        Precat::from_presentation(p, self.site.clone())
    }

    /// All Σ-maps into the table, in canonical order.
    pub fn enumerate_sigma_maps(&self, t: &Table) -> Result<Vec<SigmaMap>> {
        let mut out = Vec::new();
        for (i, sd) in self.shapes.iter().enumerate() {
            presentation_maps(&sd.sigma, t, &[], self.cfg.limit, |m| {
                out.push(SigmaMap { shape: i, images: m.to_vec() });
                true
            })?;
        }
        Ok(out)
    }

    /// One stage: Σ-maps that already extend are marked with their least extension;
    /// a batch of the others is pushed out along φ simultaneously.
    pub fn raj(&self, a: &Precat, marking: &Marking) -> Result<Stage> {
        let t = &a.table;
        let mut marking = marking.clone();
        let mut push = Vec::new();
        for sm in self.enumerate_sigma_maps(t)? {
            if marking.get(&sm).is_some() {
                continue;
            }
            match self.shapes[sm.shape].extensions(t, &sm.images).first() {
                Some(&y) => {
                    marking.entries.insert(sm, y);
                }
                None => push.push(sm),
            }
        }
        // Merges first; otherwise only fillers of the least degree. Pushing everything at
        // once creates duplicate composites faster than later merges can remove them.
        if push.iter().any(|sm| self.shapes[sm.shape].shape.is_top()) {
            push.retain(|sm| self.shapes[sm.shape].shape.is_top());
        } else if let Some(d) = push.iter().map(|sm| self.shapes[sm.shape].shape.degree()).min() {
            push.retain(|sm| self.shapes[sm.shape].shape.degree() == d);
        }
        if self.cfg.order == StageOrder::Reversed {
            push.reverse();
        }
        if push.is_empty() {
            return Ok(Stage { result: a.clone(), marking, map: TableMap::identity(t), pushed: 0 });
        }
        // Multi-pushout: A ⊔ h_1 ⊔ ... ⊔ h_r modulo the φ-identifications.
        let mut sum = t.clone();
        let mut offsets = Vec::with_capacity(push.len());
        for sm in &push {
            offsets.push(sum.sizes().to_vec());
            sum = sum.coproduct(&self.shapes[sm.shape].h_table)?;
        }
        let mut pairs = Vec::new();
        for (j, sm) in push.iter().enumerate() {
            let sd = &self.shapes[sm.shape];
            let id = h_identity(sd);
            for ((&o, &f), &x) in sd.gen_levels.iter().zip(&sd.phi_mors).zip(&sm.images) {
                pairs.push((o, x, offsets[j][o] + sd.h_table.act(f, id)));
            }
        }
        let (q, proj) = sum.quotient(&pairs);
        // New presentation and representatives.
        let mut p = a.presentation.clone();
        let mut new_gens = Vec::with_capacity(push.len());
        for sm in &push {
            let sd = &self.shapes[sm.shape];
            let g = p.add_generator(sd.shape.target_object())?;
            new_gens.push(g);
            for (i, &x) in sm.images.iter().enumerate() {
                let o = sd.gen_levels[i];
                p.add_relation(Relation {
                    source: self.site.object(o).clone(),
                    left: Element::new(g, sd.phi.images[i].map.clone()),
                    right: a.reps[o][x].clone(),
                })?;
            }
        }
        let k = self.site.objects().len();
        let mut reps: Vec<Vec<Option<Element>>> = (0..k).map(|o| alloc::vec![None; q.size(o)]).collect();
        for o in 0..k {
            for (x, rep) in a.reps[o].iter().enumerate() {
                let c = proj.components[o][x];
                reps[o][c].get_or_insert_with(|| rep.clone());
            }
            for (j, sm) in push.iter().enumerate() {
                let sd = &self.shapes[sm.shape];
                for (y, e) in sd.h_reps[o].iter().enumerate() {
                    let c = proj.components[o][offsets[j][o] + y];
                    reps[o][c].get_or_insert_with(|| Element::new(new_gens[j], e.map.clone()));
                }
            }
        }
        let reps = reps
            .into_iter()
            .map(|row| row.into_iter().map(|e| e.expect("quotient classes are inhabited")).collect())
            .collect();
        let map = TableMap {
            components: (0..k).map(|o| proj.components[o][..t.size(o)].to_vec()).collect(),
        };
        let mut marking = marking.transport(&self.shapes, &map);
        for (j, sm) in push.iter().enumerate() {
            let sd = &self.shapes[sm.shape];
            let images = sm.images.iter().zip(&sd.gen_levels).map(|(&x, &o)| map.components[o][x]).collect();
            let ext = proj.components[sd.h_level][offsets[j][sd.h_level] + h_identity(sd)];
            marking.entries.entry(SigmaMap { shape: sm.shape, images }).or_insert(ext);
        }
        let pushed = push.len();
        Ok(Stage { result: Precat { presentation: p, table: q, reps }, marking, map, pushed })
    }

    fn run(&self, a: &Precat, keep_marking: bool) -> Result<Saturation> {
        let mut cur = a.clone();
        let mut marking = Marking::default();
        let mut map = TableMap::identity(&a.table);
        for stage in 0..self.cfg.stage_bound {
            let start = if keep_marking { marking.clone() } else { Marking::default() };
            let st = self.raj(&cur, &start)?;
            map = map.then(&st.map);
            cur = st.result;
            marking = st.marking;
            if st.pushed == 0 {
                return Ok(Saturation { result: cur, marking, map, stabilized: true, stages: stage });
            }
        }
        // One more look: stable if nothing is left to push.
        let empty = Marking::default();
        let st = self.raj(&cur, if keep_marking { &marking } else { &empty })?;
        let stabilized = st.pushed == 0;
        Ok(Saturation { result: cur, marking, map, stabilized, stages: self.cfg.stage_bound })
    }

    /// Iterates stages with carried markings.
    pub fn cat_bounded(&self, a: &Precat) -> Result<Saturation> {
        self.run(a, true)
    }

    /// Iterates stages discarding markings between stages.
    pub fn bigcat_bounded(&self, a: &Precat) -> Result<Saturation> {
        self.run(a, false)
    }

    /// Whether every Σ-map within bounds extends along φ; returns the first failure.
    pub fn first_non_extending(&self, t: &Table) -> Result<Option<SigmaMap>> {
        for sm in self.enumerate_sigma_maps(t)? {
            if self.shapes[sm.shape].extensions(t, &sm.images).is_empty() {
                return Ok(Some(sm));
            }
        }
        Ok(None)
    }
}

pub(crate) fn h_identity(sd: &ShapeData) -> usize {
    let id = ThetaMorphism::identity(&sd.shape.target_object());
    sd.h_reps[sd.h_level].iter().position(|e| e.map == id).expect("identity is an element of h")
}

/// Saturation restricted to nonempty-prefix shapes.
pub fn fix_bounded(a: &Precat, cfg: &EngineConfig) -> Result<Saturation> {
    let mut c = cfg.clone();
    c.strategy = Strategy::FixOnly;
    Engine::new(a.table.n(), c)?.bigcat_bounded(a)
}

/// Saturation by nonempty-prefix shapes together with the empty-prefix shapes of size `m`.
pub fn gen_m_bounded(a: &Precat, m: u8, cfg: &EngineConfig) -> Result<Saturation> {
    if a.table.n() < 2 {
        return Err(Error::Unsupported("the staged schedule needs n >= 2"));
    }
    let mut c = cfg.clone();
    c.strategy = Strategy::Gen(m);
    Engine::new(a.table.n(), c)?.bigcat_bounded(a)
}

/// The staged schedule: `Fix`, then for each `m` in turn `Fix(Gen[m](...))`.
pub fn staged_saturation(a: &Precat, cfg: &EngineConfig) -> Result<Saturation> {
    let mut s = fix_bounded(a, cfg)?;
    for m in 2..=cfg.m_max {
        let g = gen_m_bounded(&s.result, m, cfg)?;
        let f = fix_bounded(&g.result, cfg)?;
        s = Saturation {
            map: s.map.then(&g.map).then(&f.map),
            result: f.result,
            marking: f.marking,
            stabilized: g.stabilized && f.stabilized,
            stages: s.stages + g.stages + f.stages,
        };
    }
    Ok(s)
}
