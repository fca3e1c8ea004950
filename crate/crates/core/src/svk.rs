//! Fundamental groupoids of combinatorial complexes, Seifert–Van Kampen pushouts,
//! bounded internal Hom and nonabelian cohomology at n = 1.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::category::ExplicitCategory;
use crate::error::{Error, Result};
use crate::fincat::{cat1_exact, Census, GroupoidPresentation, WordRelation};
use crate::presentation::{Element, PrecatMap, Presentation, Relation};
use crate::search::{all_table_maps, table_maps, MapSearch};
use crate::standard::{along, vertex};
use crate::structure::{StrictModel, Verdict};
use crate::table::{Table, TableMap};
use crate::theta::{DeltaMap, Site, ThetaMorphism, ThetaObject};
use crate::util::UnionFind;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub name: String,
    pub source: usize,
    pub target: usize,
}

/// One letter of a boundary word: an edge, traversed backwards when `inverse`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Letter {
    pub edge: usize,
    pub inverse: bool,
}

/// Vertices, oriented edges and 2-cells attached along closed edge paths.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComboComplex {
    pub vertices: Vec<String>,
    pub edges: Vec<Edge>,
    pub faces: Vec<Vec<Letter>>,
}

impl ComboComplex {
    pub fn new(vertices: Vec<String>, edges: Vec<Edge>, faces: Vec<Vec<Letter>>) -> Result<Self> {
        let cx = ComboComplex { vertices, edges, faces };
        cx.validate()?;
        Ok(cx)
    }

    pub fn validate(&self) -> Result<()> {
        let mut names = alloc::collections::BTreeSet::new();
        for v in &self.vertices {
            if !names.insert(v.as_str()) {
                return Err(Error::Malformed(format!("duplicate vertex {v}")));
            }
        }
        let mut enames = alloc::collections::BTreeSet::new();
        for e in &self.edges {
            if e.source >= self.vertices.len() || e.target >= self.vertices.len() || !enames.insert(e.name.as_str()) {
                return Err(Error::Malformed(format!("bad edge {}", e.name)));
            }
        }
        for (i, w) in self.faces.iter().enumerate() {
            if w.is_empty() || w.iter().any(|l| l.edge >= self.edges.len()) {
                return Err(Error::Malformed(format!("face {i} has an empty or unknown boundary")));
            }
            for k in 0..w.len() {
                if self.letter_ends(w[k]).1 != self.letter_ends(w[(k + 1) % w.len()]).0 {
                    return Err(Error::Malformed(format!("face {i} is not a closed path")));
                }
            }
        }
        Ok(())
    }

    pub fn letter_ends(&self, l: Letter) -> (usize, usize) {
        let e = &self.edges[l.edge];
        if l.inverse {
            (e.target, e.source)
        } else {
            (e.source, e.target)
        }
    }

    pub fn vertex_index(&self, name: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v == name)
    }

    pub fn edge_index(&self, name: &str) -> Option<usize> {
        self.edges.iter().position(|e| e.name == name)
    }

    /// Builds a complex from names: edges as `(name, source, target)`, faces as words like
    /// `"a b^-1"`.
    pub fn from_names(vertices: &[&str], edges: &[(&str, &str, &str)], faces: &[&str]) -> Result<Self> {
        let vs: Vec<String> = vertices.iter().map(|v| String::from(*v)).collect();
        let find = |n: &str| vs.iter().position(|v| v == n).ok_or_else(|| Error::Malformed(format!("unknown vertex {n}")));
        let es = edges
            .iter()
            .map(|&(n, s, t)| Ok(Edge { name: n.into(), source: find(s)?, target: find(t)? }))
            .collect::<Result<Vec<_>>>()?;
        let fs = faces
            .iter()
            .map(|w| {
                w.split_whitespace()
                    .map(|tok| {
                        let (name, inverse) = match tok.strip_suffix("^-1") {
                            Some(n) => (n, true),
                            None => (tok, false),
                        };
                        let edge = es
                            .iter()
                            .position(|e| e.name == name)
                            .ok_or_else(|| Error::Malformed(format!("unknown edge {name}")))?;
                        Ok(Letter { edge, inverse })
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        ComboComplex::new(vs, es, fs)
    }

    /// The largest common subcomplex by names: shared vertices, edges with the same name
    /// and endpoints, faces with the same boundary word.
    pub fn intersection(&self, other: &ComboComplex) -> Result<ComboComplex> {
        let vertices: Vec<String> = self.vertices.iter().filter(|v| other.vertex_index(v).is_some()).cloned().collect();
        let vindex = |name: &str| vertices.iter().position(|v| v == name);
        let mut edges = Vec::new();
        let mut emap = vec![None; self.edges.len()];
        for (i, e) in self.edges.iter().enumerate() {
            let Some(j) = other.edge_index(&e.name) else { continue };
            let o = &other.edges[j];
            let same = self.vertices[e.source] == other.vertices[o.source] && self.vertices[e.target] == other.vertices[o.target];
            if let (true, Some(s), Some(t)) = (same, vindex(&self.vertices[e.source]), vindex(&self.vertices[e.target])) {
                emap[i] = Some((edges.len(), j));
                edges.push(Edge { name: e.name.clone(), source: s, target: t });
            }
        }
        let mut faces = Vec::new();
        for w in &self.faces {
            let mapped: Option<Vec<(Letter, Letter)>> = w
                .iter()
                .map(|l| emap[l.edge].map(|(a, b)| (Letter { edge: a, inverse: l.inverse }, Letter { edge: b, inverse: l.inverse })))
                .collect();
            if let Some(m) = mapped {
                let theirs: Vec<Letter> = m.iter().map(|p| p.1).collect();
                if other.faces.contains(&theirs) {
                    faces.push(m.into_iter().map(|p| p.0).collect());
                }
            }
        }
        ComboComplex::new(vertices, edges, faces)
    }

    /// The inclusion of `self` into `other` by names; faces are matched by boundary word.
    pub fn embedding(&self, other: &ComboComplex) -> Result<(Vec<usize>, Vec<usize>, Vec<usize>)> {
        let vmap = self
            .vertices
            .iter()
            .map(|v| other.vertex_index(v).ok_or_else(|| Error::Malformed(format!("vertex {v} is not shared"))))
            .collect::<Result<Vec<_>>>()?;
        let mut emap = Vec::with_capacity(self.edges.len());
        for e in &self.edges {
            let j = other.edge_index(&e.name).ok_or_else(|| Error::Malformed(format!("edge {} is not shared", e.name)))?;
            let o = &other.edges[j];
            if (vmap[e.source], vmap[e.target]) != (o.source, o.target) {
                return Err(Error::Malformed(format!("edge {} has different endpoints", e.name)));
            }
            emap.push(j);
        }
        let mut fmap = Vec::with_capacity(self.faces.len());
        for (i, w) in self.faces.iter().enumerate() {
            let mapped: Vec<Letter> = w.iter().map(|l| Letter { edge: emap[l.edge], inverse: l.inverse }).collect();
            let j = other
                .faces
                .iter()
                .position(|x| *x == mapped)
                .ok_or_else(|| Error::Malformed(format!("face {i} is not shared")))?;
            fmap.push(j);
        }
        Ok((vmap, emap, fmap))
    }
}

/// The edge-path groupoid: edges with formal inverses, one relation per face.
pub fn pi1(cx: &ComboComplex) -> Result<GroupoidPresentation> {
    cx.validate()?;
    let k = cx.edges.len();
    let mut gens: Vec<(usize, usize)> = cx.edges.iter().map(|e| (e.source, e.target)).collect();
    gens.extend(cx.edges.iter().map(|e| (e.target, e.source)));
    let inverse = (0..2 * k).map(|g| if g < k { g + k } else { g - k }).collect();
    let relations = cx
        .faces
        .iter()
        .map(|w| WordRelation {
            start: cx.letter_ends(w[0]).0,
            left: w.iter().map(|l| if l.inverse { l.edge + k } else { l.edge }).collect(),
            right: Vec::new(),
        })
        .collect();
    Ok(GroupoidPresentation { objects: cx.vertices.len(), gens, inverse, relations })
}

/// Generator indices of the 1-precat presenting a complex.
#[derive(Clone, Debug)]
pub struct ComplexLayout {
    pub vertex: Vec<usize>,
    /// Edge, inverse edge and the two inverse-law triangles.
    pub edge: Vec<[usize; 4]>,
    /// Diagonals followed by the fan triangles of each face.
    pub face: Vec<Vec<usize>>,
}

enum Side {
    Edge(usize),
    Id(usize),
}

/// The 1-precat of a complex: vertices and edges as representables, a formal inverse
/// for every edge with its two inverse-law triangles, and every face triangulated as a fan.
pub fn complex_precat(cx: &ComboComplex) -> Result<(Presentation, ComplexLayout)> {
    cx.validate()?;
    let pt = ThetaObject::point(1);
    let e = ThetaObject::new(1, vec![1])?;
    let t = ThetaObject::new(1, vec![2])?;
    let degen = ThetaMorphism::project(&e, &pt, &[DeltaMap::constant(1, 0, 0)])?;
    let id_e = ThetaMorphism::identity(&e);
    let id_p = ThetaMorphism::identity(&pt);
    let face = |a: u8, b: u8| along(&e, &t, 0, DeltaMap::new(2, vec![a, b])?);
    let mut p = Presentation::empty(1);
    let vertex_gens = (0..cx.vertices.len()).map(|_| p.add_generator(pt.clone())).collect::<Result<Vec<_>>>()?;
    let add_edge = |p: &mut Presentation, s: usize, tg: usize| -> Result<usize> {
        let g = p.add_generator(e.clone())?;
        for (v, end) in [(0, s), (1, tg)] {
            p.add_relation(Relation {
                source: pt.clone(),
                left: Element::new(g, vertex(&e, v)?),
                right: Element::new(vertex_gens[end], id_p.clone()),
            })?;
        }
        Ok(g)
    };
    let add_triangle = |p: &mut Presentation, sides: [Side; 3]| -> Result<usize> {
        let g = p.add_generator(t.clone())?;
        for (side, (a, b)) in sides.into_iter().zip([(0, 1), (1, 2), (0, 2)]) {
            let right = match side {
                Side::Edge(h) => Element::new(h, id_e.clone()),
                Side::Id(v) => Element::new(vertex_gens[v], degen.clone()),
            };
            p.add_relation(Relation { source: e.clone(), left: Element::new(g, face(a, b)?), right })?;
        }
        Ok(g)
    };
    let mut edge = Vec::with_capacity(cx.edges.len());
    for ed in &cx.edges {
        let g = add_edge(&mut p, ed.source, ed.target)?;
        let gi = add_edge(&mut p, ed.target, ed.source)?;
        let l = add_triangle(&mut p, [Side::Edge(g), Side::Edge(gi), Side::Id(ed.source)])?;
        let r = add_triangle(&mut p, [Side::Edge(gi), Side::Edge(g), Side::Id(ed.target)])?;
        edge.push([g, gi, l, r]);
    }
    let letter_gen = |l: &Letter| if l.inverse { edge[l.edge][1] } else { edge[l.edge][0] };
    let mut faces = Vec::with_capacity(cx.faces.len());
    for w in &cx.faces {
        let v0 = cx.letter_ends(w[0]).0;
        let mut gens = Vec::new();
        if w.len() == 1 {
            gens.push(add_triangle(&mut p, [Side::Id(v0), Side::Edge(letter_gen(&w[0])), Side::Id(v0)])?);
        } else {
            // Diagonal d_i runs from v0 to the end of letter i; d_1 is the first letter.
            let mut prev = Side::Edge(letter_gen(&w[0]));
            for (i, l) in w.iter().enumerate().skip(1) {
                let next = if i + 1 == w.len() {
                    Side::Id(v0)
                } else {
                    let d = add_edge(&mut p, v0, cx.letter_ends(*l).1)?;
                    gens.push(d);
                    Side::Edge(d)
                };
                let keep = match &next {
                    Side::Edge(d) => Side::Edge(*d),
                    Side::Id(v) => Side::Id(*v),
                };
                gens.push(add_triangle(&mut p, [prev, Side::Edge(letter_gen(l)), next])?);
                prev = keep;
            }
        }
        faces.push(gens);
    }
    Ok((p, ComplexLayout { vertex: vertex_gens, edge, face: faces }))
}

/// The inclusion of precats induced by an embedding of complexes.
fn layout_map(
    w: &ComboComplex,
    pw: &Presentation,
    lw: &ComplexLayout,
    x: &ComboComplex,
    px: &Presentation,
    lx: &ComplexLayout,
) -> Result<PrecatMap> {
    let (vmap, emap, fmap) = w.embedding(x)?;
    let mut images: Vec<Option<Element>> = vec![None; pw.generators().len()];
    let mut set = |from: usize, to: usize| -> Result<()> {
        images[from] = Some(px.generator_element(to)?);
        Ok(())
    };
    for (v, &g) in lw.vertex.iter().enumerate() {
        set(g, lx.vertex[vmap[v]])?;
    }
    for (e, gs) in lw.edge.iter().enumerate() {
        for (a, b) in gs.iter().zip(&lx.edge[emap[e]]) {
            set(*a, *b)?;
        }
    }
    for (f, gs) in lw.face.iter().enumerate() {
        for (a, b) in gs.iter().zip(&lx.face[fmap[f]]) {
            set(*a, *b)?;
        }
    }
    let images = images.into_iter().map(|e| e.ok_or(Error::Malformed("unmapped generator".into()))).collect::<Result<Vec<_>>>()?;
    PrecatMap::new(pw.clone(), px.clone(), images)
}

/// A presented groupoid with the object of every named vertex.
#[derive(Clone, Debug)]
pub struct PresentedGroupoid {
    pub groupoid: GroupoidPresentation,
    pub vertices: BTreeMap<String, usize>,
}

fn groupoid_of(p: &Presentation, named: &[(String, usize)]) -> Result<PresentedGroupoid> {
    let tab = p.tabulate(2)?;
    let (fc, _) = cat1_exact(&tab.table)?;
    let pt = ThetaObject::point(1);
    let mut vertices = BTreeMap::new();
    for (name, g) in named {
        let e = p.canonical(&Element::new(*g, ThetaMorphism::identity(&pt)))?;
        vertices.insert(name.clone(), tab.index_of(&e).ok_or(Error::InvalidElement)?);
    }
    Ok(PresentedGroupoid { groupoid: GroupoidPresentation::from_category(&fc), vertices })
}

/// The groupoid of a single complex through its precat.
pub fn complex_groupoid(cx: &ComboComplex) -> Result<PresentedGroupoid> {
    let (p, l) = complex_precat(cx)?;
    let named: Vec<(String, usize)> = cx.vertices.iter().cloned().zip(l.vertex.iter().copied()).collect();
    groupoid_of(&p, &named)
}

/// The categorified pushout `U ∪_W V` of complex precats, read back as a groupoid.
pub fn svk_pushout(u: &ComboComplex, v: &ComboComplex, w: &ComboComplex) -> Result<PresentedGroupoid> {
    let (pu, lu) = complex_precat(u)?;
    let (pv, lv) = complex_precat(v)?;
    let (pw, lw) = complex_precat(w)?;
    let f = layout_map(w, &pw, &lw, u, &pu, &lu)?;
    let g = layout_map(w, &pw, &lw, v, &pv, &lv)?;
    let (d, _, _) = Presentation::pushout(&f, &g)?;
    let shift = pu.generators().len();
    let mut named: Vec<(String, usize)> = u.vertices.iter().cloned().zip(lu.vertex.iter().copied()).collect();
    for (name, &gen) in v.vertices.iter().zip(&lv.vertex) {
        if u.vertex_index(name).is_none() {
            named.push((name.clone(), gen + shift));
        }
    }
    groupoid_of(&d, &named)
}

/// Elements of the vertex group at `base` by word length, after contracting a spanning tree.
pub fn endo_census(g: &GroupoidPresentation, base: usize, max_len: usize) -> Census {
    g.vertex_group(base).census(max_len, 10_000)
}

/// Components of two groupoids and the vertex-group censuses of each component, compared
/// up to `max_len`. Only exact censuses decide.
pub fn groupoid_equiv_bounded(g: &GroupoidPresentation, h: &GroupoidPresentation, max_len: usize) -> Verdict {
    let (cg, kg) = g.components();
    let (ch, kh) = h.components();
    if kg != kh {
        return Verdict::No(format!("{kg} components against {kh}"));
    }
    let censuses = |p: &GroupoidPresentation, comp: &[usize], k: usize| -> Option<Vec<Vec<usize>>> {
        let mut out = Vec::with_capacity(k);
        for c in 0..k {
            let base = comp.iter().position(|&x| x == c).expect("inhabited component");
            match endo_census(p, base, max_len) {
                Census::Exact(v) => out.push(v),
                _ => return None,
            }
        }
        out.sort();
        Some(out)
    };
    match (censuses(g, &cg, kg), censuses(h, &ch, kh)) {
        (Some(a), Some(b)) if a == b => Verdict::Yes,
        (Some(a), Some(b)) => Verdict::No(format!("vertex group censuses differ: {a:?} against {b:?}")),
        _ => Verdict::Unknown("a word census was not decided".into()),
    }
}

/// `Hom(A, B)` within the degree bound: level `M` lists the maps `h(M) × A -> B`.
#[derive(Clone, Debug)]
pub struct HomTable {
    pub table: Table,
    /// The maps at each level, in canonical order.
    pub maps: Vec<Vec<TableMap>>,
    reps: Vec<Vec<Vec<ThetaMorphism>>>,
}

/// The representable `h(M)` on a site, with the morphism behind every element.
fn representable_table(site: &Arc<Site>, obj: &ThetaObject) -> Result<(Table, Vec<Vec<ThetaMorphism>>)> {
    let tab = Presentation::representable(obj).tabulate_on(site.clone())?;
    let reps = tab.reps.iter().map(|row| row.iter().map(|e| e.map.clone()).collect()).collect();
    Ok((tab.table, reps))
}

/// Index of `(x, a)` in `h(M) × A` at level `o`.
fn pair(a: &Table, o: usize, x: usize, y: usize) -> usize {
    x * a.size(o) + y
}

pub fn hom_bounded(a: &Table, b: &Table, limit: u64) -> Result<HomTable> {
    if *a.site() != *b.site() {
        return Err(Error::Malformed("tables live on different sites".into()));
    }
    let site = a.site().clone();
    let k = site.objects().len();
    let mut maps = Vec::with_capacity(k);
    let mut reps = Vec::with_capacity(k);
    let mut lookup: Vec<BTreeMap<TableMap, usize>> = Vec::with_capacity(k);
    for obj in site.objects() {
        let (h, r) = representable_table(&site, obj)?;
        let ms = all_table_maps(&h.product(a)?, b, limit)?;
        lookup.push(ms.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect());
        maps.push(ms);
        reps.push(r);
    }
    // Index of each morphism among the elements of h(M) at its level.
    let index_in = |m: usize, mor: &ThetaMorphism| -> usize {
        let o = site.object_id(mor.source()).expect("on site");
        reps[m][o].iter().position(|x| x == mor).expect("element of the representable")
    };
    let sizes = maps.iter().map(Vec::len).collect();
    let mut rows: Vec<Vec<u32>> = Vec::with_capacity(site.morphism_count());
    for f in 0..site.morphism_count() {
        let (s, t) = site.ends(f);
        let fm = site.morphism(f);
        // h(f) × A: (x, y) at level o goes to (f ∘ x, y).
        let shift: Vec<Vec<usize>> =
            (0..k).map(|o| reps[s][o].iter().map(|x| index_in(t, &fm.compose(x).expect("composable"))).collect()).collect();
        let row = maps[t]
            .iter()
            .map(|m| {
                let comps = (0..k)
                    .map(|o| {
                        (0..reps[s][o].len() * a.size(o))
                            .map(|i| {
                                let (x, y) = (i / a.size(o), i % a.size(o));
                                m.components[o][pair(a, o, shift[o][x], y)]
                            })
                            .collect()
                    })
                    .collect();
                lookup[s][&TableMap { components: comps }] as u32
            })
            .collect();
        rows.push(row);
    }
    let table = Table::from_parts(site, sizes, rows)?;
    Ok(HomTable { table, maps, reps })
}

impl HomTable {
    /// Precomposition with `i: A' -> A`, as a map `Hom(A, B) -> Hom(A', B)`.
    pub fn precompose(&self, i: &TableMap, a_small: &Table, a: &Table, other: &HomTable) -> Result<TableMap> {
        let k = self.maps.len();
        let lookup: Vec<BTreeMap<&TableMap, usize>> =
            other.maps.iter().map(|ms| ms.iter().enumerate().map(|(j, m)| (m, j)).collect()).collect();
        let mut components = Vec::with_capacity(k);
        for m in 0..k {
            let mut row = Vec::with_capacity(self.maps[m].len());
            for map in &self.maps[m] {
                let comps: Vec<Vec<usize>> = (0..k)
                    .map(|o| {
                        (0..self.reps[m][o].len() * a_small.size(o))
                            .map(|idx| {
                                let (x, y) = (idx / a_small.size(o), idx % a_small.size(o));
                                map.components[o][pair(a, o, x, i.components[o][y])]
                            })
                            .collect()
                    })
                    .collect();
                row.push(*lookup[m].get(&TableMap { components: comps }).ok_or(Error::InvalidElement)?);
            }
            components.push(row);
        }
        Ok(TableMap { components })
    }
}

/// Maps `S × A -> B`, counted.
pub fn count_product_maps(s: &Table, a: &Table, b: &Table, limit: u64) -> Result<u64> {
    crate::search::count_table_maps(&s.product(a)?, b, limit)
}

/// A functor out of a presented groupoid: objects, and an arrow for every generator.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Functor {
    pub objects: Vec<usize>,
    pub arrows: Vec<usize>,
}

fn eval_word(a: &ExplicitCategory, start: usize, word: &[usize], arrows: &[usize]) -> Option<usize> {
    let mut acc = a.identity(start);
    for &g in word {
        acc = a.compose(arrows[g], acc)?;
    }
    Some(acc)
}

/// All functors from a presented groupoid to a finite category, in canonical order.
pub fn functors(g: &GroupoidPresentation, a: &ExplicitCategory, limit: u64) -> Result<Vec<Functor>> {
    let invertible: Vec<usize> = (0..a.arrow_count()).filter(|&f| a.inverse(f).is_some()).collect();
    let mut out = Vec::new();
    let mut nodes = 0u64;
    let mut objects = vec![0; g.objects];
    // Generators paired with a smaller partner are determined by it.
    let free: Vec<usize> = (0..g.gens.len()).filter(|&x| g.inverse[x] > x).collect();
    loop {
        let mut arrows = vec![usize::MAX; g.gens.len()];
        let mut choice = vec![0usize; free.len()];
        let options: Vec<Vec<usize>> = free
            .iter()
            .map(|&x| {
                let (s, t) = g.gens[x];
                invertible.iter().copied().filter(|&f| a.ends(f) == (objects[s], objects[t])).collect()
            })
            .collect();
        if options.iter().all(|o| !o.is_empty()) {
            loop {
                nodes += 1;
                if nodes > limit {
                    return Err(Error::SearchLimit(limit));
                }
                for (i, &x) in free.iter().enumerate() {
                    arrows[x] = options[i][choice[i]];
                    arrows[g.inverse[x]] = a.inverse(arrows[x]).expect("invertible");
                }
                let ok = g.relations.iter().all(|r| {
                    eval_word(a, objects[r.start], &r.left, &arrows) == eval_word(a, objects[r.start], &r.right, &arrows)
                });
                if ok {
                    out.push(Functor { objects: objects.clone(), arrows: arrows.clone() });
                }
                if !advance(&mut choice, |i| options[i].len()) {
                    break;
                }
            }
        }
        if !advance(&mut objects, |_| a.object_count()) {
            break;
        }
    }
    out.sort();
    Ok(out)
}

/// Odometer step; returns `false` after the last tuple.
fn advance(digits: &mut [usize], base: impl Fn(usize) -> usize) -> bool {
    for i in (0..digits.len()).rev() {
        digits[i] += 1;
        if digits[i] < base(i) {
            return true;
        }
        digits[i] = 0;
    }
    false
}

/// Natural isomorphism between functors out of a groupoid, by search over components.
pub fn naturally_isomorphic(g: &GroupoidPresentation, a: &ExplicitCategory, x: &Functor, y: &Functor) -> bool {
    let options: Vec<Vec<usize>> = (0..g.objects)
        .map(|v| {
            a.hom(x.objects[v], y.objects[v]).into_iter().filter(|&f| a.inverse(f).is_some()).collect()
        })
        .collect();
    if options.iter().any(Vec::is_empty) {
        return false;
    }
    let mut choice = vec![0; g.objects];
    loop {
        let alpha: Vec<usize> = (0..g.objects).map(|v| options[v][choice[v]]).collect();
        let natural = g.gens.iter().enumerate().all(|(e, &(s, t))| {
            a.compose(y.arrows[e], alpha[s]) == a.compose(alpha[t], x.arrows[e])
        });
        if natural {
            return true;
        }
        if !advance(&mut choice, |v| options[v].len()) {
            return false;
        }
    }
}

/// Class representatives of `Hom(Π(X), A)` up to natural isomorphism.
pub fn cohomology_classes(x: &ComboComplex, a: &ExplicitCategory, limit: u64) -> Result<Vec<Functor>> {
    let g = pi1(x)?;
    let fs = functors(&g, a, limit)?;
    let mut uf = UnionFind::new(fs.len());
    for i in 0..fs.len() {
        for j in i + 1..fs.len() {
            if uf.find(i) != uf.find(j) && naturally_isomorphic(&g, a, &fs[i], &fs[j]) {
                uf.union(i, j);
            }
        }
    }
    let mut reps = Vec::new();
    let mut seen = alloc::collections::BTreeSet::new();
    for i in 0..fs.len() {
        if seen.insert(uf.find(i)) {
            reps.push(fs[i].clone());
        }
    }
    Ok(reps)
}

/// The nerve of the groupoid of a simply connected complex (every vertex group trivial).
pub fn contractible_nerve(cx: &ComboComplex, site: &Arc<Site>) -> Result<Table> {
    let g = pi1(cx)?;
    let (comp, k) = g.components();
    for c in 0..k {
        let base = comp.iter().position(|&x| x == c).expect("inhabited");
        if endo_census(&g, base, 2) != Census::Exact(vec![1, 1, 1]) {
            return Err(Error::Unsupported("the complex has a nontrivial vertex group"));
        }
    }
    // One arrow between any two objects of the same component.
    let n = cx.vertices.len();
    let ends: Vec<(usize, usize)> = (0..n).flat_map(|x| (0..n).map(move |y| (x, y))).filter(|&(x, y)| comp[x] == comp[y]).collect();
    let idx = |x: usize, y: usize| ends.iter().position(|&e| e == (x, y)).expect("same component");
    let ids = (0..n).map(|x| idx(x, x)).collect();
    let cat = ExplicitCategory::new(n, ends.clone(), ids, |h, f| idx(ends[f].0, ends[h].1))?;
    Ok(cat.nerve(site.clone()))
}

/// Classes of the fiber product `Hom(Π U, A) ×_{Hom(Π W, A)} Hom(Π V, A)` for a cover of
/// `X` by simply connected pieces, computed from bounded internal Homs.
pub fn mayer_vietoris_classes(
    u: &ComboComplex,
    v: &ComboComplex,
    w: &ComboComplex,
    a: &ExplicitCategory,
    limit: u64,
) -> Result<usize> {
    let site = Arc::new(Site::new(1, 2));
    let coeff = a.nerve(site.clone());
    let (nu, nv, nw) = (contractible_nerve(u, &site)?, contractible_nerve(v, &site)?, contractible_nerve(w, &site)?);
    let inclusion = |small: &ComboComplex, big: &ComboComplex, ts: &Table, tb: &Table| -> Result<TableMap> {
        let (vmap, _, _) = small.embedding(big)?;
        // Elements of both nerves are vertex sequences in lexicographic order within a component.
        let fixed = vec![vmap.iter().map(|&x| Some(x)).collect::<Vec<_>>()];
        let mut out = None;
        table_maps(ts, tb, &MapSearch { injective: false, limit, fixed }, |m| {
            out = Some(m.clone());
            false
        })?;
        out.ok_or(Error::Malformed("no inclusion of nerves".into()))
    };
    let iu = inclusion(w, u, &nw, &nu)?;
    let iv = inclusion(w, v, &nw, &nv)?;
    let hu = hom_bounded(&nu, &coeff, limit)?;
    let hv = hom_bounded(&nv, &coeff, limit)?;
    let hw = hom_bounded(&nw, &coeff, limit)?;
    let ru = hu.precompose(&iu, &nw, &nu, &hw)?;
    let rv = hv.precompose(&iv, &nw, &nv, &hw)?;
    let (fp, _, _) = Table::fiber_product(&hu.table, &ru, &hv.table, &rv)?;
    let model = StrictModel::new(fp)?;
    Ok(model.object_classes()?.1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle() -> ComboComplex {
        ComboComplex::from_names(&["p"], &[("e", "p", "p")], &[]).unwrap()
    }

    fn two_arcs() -> (ComboComplex, ComboComplex, ComboComplex) {
        let u = ComboComplex::from_names(&["p", "q"], &[("a", "p", "q")], &[]).unwrap();
        let v = ComboComplex::from_names(&["p", "q"], &[("b", "p", "q")], &[]).unwrap();
        let w = ComboComplex::from_names(&["p", "q"], &[], &[]).unwrap();
        (u, v, w)
    }

    #[test]
    fn circle_and_disk() {
        let g = pi1(&circle()).unwrap();
        assert_eq!(endo_census(&g, 0, 3), Census::Exact(vec![1, 3, 5, 7]));
        let disk = ComboComplex::from_names(&["p"], &[("e", "p", "p")], &["e"]).unwrap();
        let d = pi1(&disk).unwrap();
        assert_eq!(endo_census(&d, 0, 3), Census::Exact(vec![1, 1, 1, 1]));
        assert!(groupoid_equiv_bounded(&g, &d, 2).is_no());
        assert!(groupoid_equiv_bounded(&g, &g, 2).is_yes());
    }

    #[test]
    fn circle_from_two_arcs() {
        let (u, v, w) = two_arcs();
        let po = svk_pushout(&u, &v, &w).unwrap();
        let base = po.vertices["p"];
        assert_eq!(endo_census(&po.groupoid, base, 4), Census::Exact(vec![1, 3, 5, 7, 9]));
        let x = complex_groupoid(&circle()).unwrap();
        assert!(groupoid_equiv_bounded(&po.groupoid, &x.groupoid, 4).is_yes());
    }

    #[test]
    fn faces_survive_the_precat_route() {
        let rp2 = ComboComplex::from_names(&["p"], &[("e", "p", "p")], &["e e"]).unwrap();
        let g = complex_groupoid(&rp2).unwrap();
        assert_eq!(endo_census(&g.groupoid, 0, 3), Census::Exact(vec![1, 2, 2, 2]));
        let square = ComboComplex::from_names(&["p"], &[("a", "p", "p"), ("b", "p", "p")], &["a b a^-1 b^-1"]).unwrap();
        let t = complex_groupoid(&square).unwrap();
        assert_eq!(endo_census(&t.groupoid, 0, 2).counts().unwrap(), &[1, 5, 13]);
    }

    #[test]
    fn cohomology_of_small_complexes() {
        let z2 = ExplicitCategory::cyclic(2);
        assert_eq!(cohomology_classes(&circle(), &z2, 1000).unwrap().len(), 2);
        let rp = ComboComplex::from_names(&["p"], &[("e", "p", "p")], &["e e"]).unwrap();
        assert_eq!(cohomology_classes(&rp, &z2, 1000).unwrap().len(), 2);
        let z3 = ExplicitCategory::cyclic(3);
        assert_eq!(cohomology_classes(&rp, &z3, 1000).unwrap().len(), 1);
        assert_eq!(cohomology_classes(&circle(), &ExplicitCategory::discrete(1), 1000).unwrap().len(), 1);
    }

    #[test]
    fn hom_from_the_point_is_the_target() {
        let site = Arc::new(Site::new(1, 2));
        let b = ExplicitCategory::chain(1).nerve(site.clone());
        let h = hom_bounded(&Table::terminal(site), &b, 10_000).unwrap();
        assert_eq!(h.table.sizes(), b.sizes());
        h.table.check_functorial().unwrap();
    }

    #[test]
    fn mayer_vietoris_on_the_circle() {
        let (u, v, w) = two_arcs();
        for order in [2, 3] {
            let a = ExplicitCategory::cyclic(order);
            let x = ComboComplex::from_names(&["p", "q"], &[("a", "p", "q"), ("b", "p", "q")], &[]).unwrap();
            let direct = cohomology_classes(&x, &a, 10_000).unwrap().len();
            assert_eq!(direct, order);
            assert_eq!(mayer_vietoris_classes(&u, &v, &w, &a, 100_000).unwrap(), direct);
        }
    }

    /// A circle cut into `k` arcs, covered by the first `k - 1` arcs and the last one.
    fn as_refs(r: &[(String, String, String)]) -> Vec<(&str, &str, &str)> {
        r.iter().map(|(a, b, c)| (a.as_str(), b.as_str(), c.as_str())).collect()
    }

    fn subdivided_cover(k: usize) -> (ComboComplex, ComboComplex, ComboComplex) {
        let names: Vec<String> = (0..k).map(|i| format!("v{i}")).collect();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        let arcs: Vec<(String, String, String)> =
            (0..k).map(|i| (format!("a{i}"), names[i].clone(), names[(i + 1) % k].clone())).collect();
        let u = ComboComplex::from_names(&refs, &as_refs(&arcs[..k - 1]), &[]).unwrap();
        let ends = [names[k - 1].as_str(), names[0].as_str()];
        let v = ComboComplex::from_names(&ends, &as_refs(&arcs[k - 1..]), &[]).unwrap();
        let w = ComboComplex::from_names(&ends, &[], &[]).unwrap();
        (u, v, w)
    }

    #[test]
    fn subdividing_the_cover_changes_nothing() {
        let x = pi1(&circle()).unwrap();
        for k in 2..=4 {
            let (u, v, w) = subdivided_cover(k);
            let po = svk_pushout(&u, &v, &w).unwrap();
            assert_eq!(endo_census(&po.groupoid, po.vertices["v0"], 6), Census::Exact(vec![1, 3, 5, 7, 9, 11, 13]));
            assert!(groupoid_equiv_bounded(&po.groupoid, &x, 6).is_yes(), "k = {k}");
        }
    }

    #[test]
    fn wedge_of_two_circles_is_free() {
        let vs = ["p", "q", "r"];
        let u = ComboComplex::from_names(&vs, &[("a", "p", "q"), ("b", "p", "r")], &[]).unwrap();
        let v = ComboComplex::from_names(&vs, &[("c", "q", "p"), ("d", "r", "p")], &[]).unwrap();
        let w = ComboComplex::from_names(&vs, &[], &[]).unwrap();
        let po = svk_pushout(&u, &v, &w).unwrap();
        // 1 + 4 (1 + 3 + ... + 3^(L-1)) reduced words.
        assert_eq!(endo_census(&po.groupoid, po.vertices["p"], 4), Census::Exact(vec![1, 5, 17, 53, 161]));
    }

    #[test]
    fn hom_out_of_a_sum_and_out_of_nerves() {
        let site = Arc::new(Site::new(1, 2));
        let b = ExplicitCategory::chain(2).nerve(site.clone());
        let pt = Table::terminal(site.clone());
        let h = hom_bounded(&pt.coproduct(&pt).unwrap(), &b, 100_000).unwrap();
        let bb = b.product(&b).unwrap();
        assert_eq!(h.table.sizes(), bb.sizes());
        // Objects of Hom(N C, N D) are functors: monotone maps [1] -> [2].
        let c = ExplicitCategory::chain(1).nerve(site);
        let h = hom_bounded(&c, &b, 100_000).unwrap();
        assert_eq!(h.table.sizes()[0], 6);
    }

    #[test]
    fn precat_route_agrees_with_pi1() {
        for cx in [
            circle(),
            ComboComplex::from_names(&["p", "q"], &[("a", "p", "q"), ("b", "q", "p")], &["a b"]).unwrap(),
            ComboComplex::from_names(&["p"], &[("a", "p", "p"), ("b", "p", "p")], &["a a", "b b b", "a b a^-1 b^-1"]).unwrap(),
        ] {
            let g = complex_groupoid(&cx).unwrap();
            let direct = pi1(&cx).unwrap();
            let v = groupoid_equiv_bounded(&g.groupoid, &direct, 4);
            assert!(v.is_yes(), "{v:?} {:?} {:?}", g.groupoid.vertex_group(0), direct.vertex_group(0));
        }
    }

    #[test]
    fn exponential_law() {
        let site = Arc::new(Site::new(1, 2));
        let a = ExplicitCategory::chain(1).nerve(site.clone());
        let b = ExplicitCategory::chain(2).nerve(site.clone());
        let h = hom_bounded(&a, &b, 100_000).unwrap();
        for s in [Table::terminal(site.clone()), a.clone(), ExplicitCategory::discrete(2).nerve(site.clone())] {
            let direct = crate::search::count_table_maps(&s, &h.table, 1_000_000).unwrap();
            assert_eq!(direct, count_product_maps(&s, &a, &b, 1_000_000).unwrap());
        }
    }

    #[test]
    fn pushout_along_identities() {
        let x = ComboComplex::from_names(&["p", "q"], &[("a", "p", "q"), ("b", "q", "p")], &[]).unwrap();
        let po = svk_pushout(&x, &x, &x).unwrap();
        assert!(groupoid_equiv_bounded(&po.groupoid, &pi1(&x).unwrap(), 4).is_yes());
    }

    #[test]
    fn malformed_faces_are_rejected() {
        assert!(ComboComplex::from_names(&["p", "q"], &[("a", "p", "q")], &["a"]).is_err());
        let (u, _, _) = two_arcs();
        assert!(circle().embedding(&u).is_err());
    }

    #[test]
    fn intersection_of_two_arcs_is_two_points() {
        let (u, v, w) = two_arcs();
        assert_eq!(u.intersection(&v).unwrap(), w);
        assert_eq!(u.intersection(&u).unwrap(), u);
    }
}
