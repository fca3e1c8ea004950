//! Seeded generation of small 1-precats, maps and triples for property suites.

use std::sync::Arc;

use anyhow::Result;
use precat_core::category::ExplicitCategory;
use precat_core::presentation::{Element, Presentation, Relation};
use precat_core::search::all_table_maps;
use precat_core::standard::{along, vertex};
use precat_core::table::{Table, TableMap};
use precat_core::theta::{DeltaMap, Site, ThetaMorphism, ThetaObject};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const DEFAULT_SEED: u64 = 0x5eed;

/// A 1-precat built from points, edges glued at their ends, and triangles glued along
/// their three edges.
#[derive(Default)]
struct Builder {
    p: Option<Presentation>,
    points: Vec<usize>,
    /// `(generator, source, target)`.
    edges: Vec<(usize, usize, usize)>,
}

enum Side {
    Edge(usize),
    Id(usize),
}

impl Builder {
    fn new(points: usize) -> Self {
        let mut p = Presentation::empty(1);
        let ids = (0..points).map(|_| p.add_generator(ThetaObject::point(1)).expect("n = 1")).collect();
        Builder { p: Some(p), points: ids, edges: Vec::new() }
    }

    fn pres(&mut self) -> &mut Presentation {
        self.p.as_mut().expect("unfinished")
    }

    fn edge(&mut self, s: usize, t: usize) -> usize {
        let e = ThetaObject::new(1, vec![1]).expect("edge");
        let pt = ThetaObject::point(1);
        let (ps, pt_t) = (self.points[s], self.points[t]);
        let p = self.pres();
        let g = p.add_generator(e.clone()).expect("n = 1");
        for (v, end) in [(0, ps), (1, pt_t)] {
            p.add_relation(Relation {
                source: pt.clone(),
                left: Element::new(g, vertex(&e, v).expect("vertex")),
                right: Element::new(end, ThetaMorphism::identity(&pt)),
            })
            .expect("well typed");
        }
        self.edges.push((g, s, t));
        self.edges.len() - 1
    }

    /// A triangle with edges `01`, `12`, `02`.
    fn triangle(&mut self, sides: [Side; 3]) {
        let e = ThetaObject::new(1, vec![1]).expect("edge");
        let t = ThetaObject::new(1, vec![2]).expect("triangle");
        let pt = ThetaObject::point(1);
        let degen = ThetaMorphism::project(&e, &pt, &[DeltaMap::constant(1, 0, 0)]).expect("degeneracy");
        let sides: Vec<Element> = sides
            .into_iter()
            .map(|s| match s {
                Side::Edge(i) => Element::new(self.edges[i].0, ThetaMorphism::identity(&e)),
                Side::Id(v) => Element::new(self.points[v], degen.clone()),
            })
            .collect();
        let p = self.pres();
        let g = p.add_generator(t.clone()).expect("n = 1");
        for (side, (a, b)) in sides.into_iter().zip([(0u8, 1u8), (1, 2), (0, 2)]) {
            let face = along(&e, &t, 0, DeltaMap::new(2, vec![a, b]).expect("face")).expect("face");
            p.add_relation(Relation { source: e.clone(), left: Element::new(g, face), right: side }).expect("well typed");
        }
    }

    fn finish(mut self) -> Presentation {
        self.p.take().expect("unfinished")
    }
}

/// A random 1-precat whose exact categorification is finite: forward edges between
/// at most three points, possibly an inverse pair on two unjoined points, possibly a commuting triangle.
pub fn small_precat(rng: &mut ChaCha8Rng) -> Presentation {
    let points = rng.gen_range(1..=3);
    let mut b = Builder::new(points);
    let edges = if points == 1 { 0 } else { rng.gen_range(1..=3) };
    for _ in 0..edges {
        let s = rng.gen_range(0..points - 1);
        let t = rng.gen_range(s + 1..points);
        b.edge(s, t);
    }
    // A parallel arrow next to an inverse pair would make the endomorphisms of 0 infinite.
    let joined = b.edges.iter().any(|e| (e.1, e.2) == (0, 1));
    if points >= 2 && !joined && rng.gen_bool(0.3) {
        let u = b.edge(0, 1);
        let w = b.edge(1, 0);
        b.triangle([Side::Edge(u), Side::Edge(w), Side::Id(0)]);
        b.triangle([Side::Edge(w), Side::Edge(u), Side::Id(1)]);
    }
    let composable: Vec<(usize, usize)> = (0..b.edges.len())
        .flat_map(|i| (0..b.edges.len()).map(move |j| (i, j)))
        .filter(|&(i, j)| b.edges[i].2 == b.edges[j].1 && b.edges[i].1 < b.edges[j].2)
        .collect();
    if let Some(&(i, j)) = composable.choose(rng) {
        let (s, t) = (b.edges[i].1, b.edges[j].2);
        let long = match b.edges.iter().position(|e| (e.1, e.2) == (s, t)) {
            Some(l) if rng.gen_bool(0.5) => l,
            _ => b.edge(s, t),
        };
        b.triangle([Side::Edge(i), Side::Edge(j), Side::Edge(long)]);
    }
    b.finish()
}

/// A small category: a chain, a chaotic category, a discrete one or a cyclic group.
pub fn small_category(rng: &mut ChaCha8Rng) -> ExplicitCategory {
    match rng.gen_range(0..4) {
        0 => ExplicitCategory::chain(rng.gen_range(0..=2)),
        1 => ExplicitCategory::indiscrete(rng.gen_range(1..=2)),
        2 => ExplicitCategory::discrete(rng.gen_range(1..=2)),
        _ => ExplicitCategory::cyclic(rng.gen_range(1..=2)),
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn precats(seed: u64, count: usize) -> Vec<Presentation> {
    let mut r = rng(seed);
    (0..count).map(|_| small_precat(&mut r)).collect()
}

/// Morphisms `A -> N(C)` from tabulated corpus precats into small nerves; draws without
/// any map are skipped.
pub fn morphisms(seed: u64, count: usize, bound: u32, limit: u64) -> Result<Vec<(Table, Table, TableMap)>> {
    let mut r = rng(seed);
    let site = Arc::new(Site::new(1, bound));
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let a = small_precat(&mut r).tabulate_on(site.clone())?.table;
        let b = small_category(&mut r).nerve(site.clone());
        let maps = all_table_maps(&a, &b, limit)?;
        if let Some(f) = maps.choose(&mut r) {
            out.push((a, b, f.clone()));
        }
    }
    Ok(out)
}

/// Triples `(S, A, B)`: two corpus precats with at most two points and a small nerve.
pub fn hom_triples(seed: u64, count: usize, bound: u32) -> Result<Vec<(Table, Table, Table)>> {
    let mut r = rng(seed);
    let site = Arc::new(Site::new(1, bound));
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let s = small_precat(&mut r);
        let a = small_precat(&mut r);
        let b = small_category(&mut r);
        let tiny = |p: &Presentation| p.generators().iter().filter(|g| g.comps().is_empty()).count() <= 2;
        if tiny(&s) && tiny(&a) && b.arrow_count() <= 3 {
            out.push((s.tabulate_on(site.clone())?.table, a.tabulate_on(site.clone())?.table, b.nerve(site.clone())));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use precat_core::fincat::{cat1_exact, Completion};

    #[test]
    fn same_seed_same_corpus() {
        assert_eq!(precats(7, 5), precats(7, 5));
        assert_ne!(precats(7, 5), precats(8, 5));
    }

    #[test]
    fn corpus_categorifies_to_finite_categories() {
        for p in precats(DEFAULT_SEED, 20) {
            let t = p.tabulate(2).unwrap().table;
            let (fc, _) = cat1_exact(&t).unwrap();
            assert!(matches!(fc.complete(1000), Completion::Finite(_)));
        }
    }
}
