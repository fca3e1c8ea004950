//! Finite categories given by explicit composition tables, and their nerves.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::table::{Table, TableMap};
use crate::theta::{DeltaMap, Site};

/// A finite category: arrows carry endpoints, `compose[g][f]` is `g ∘ f` when defined.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExplicitCategory {
    objects: usize,
    ends: Vec<(usize, usize)>,
    identities: Vec<usize>,
    compose: Vec<Vec<Option<usize>>>,
}

impl ExplicitCategory {
    /// Builds and validates a category from endpoints, identities and a total composition function.
    pub fn new(
        objects: usize,
        ends: Vec<(usize, usize)>,
        identities: Vec<usize>,
        mut comp: impl FnMut(usize, usize) -> usize,
    ) -> Result<Self> {
        let k = ends.len();
        let mut compose = vec![vec![None; k]; k];
        for (g, row) in compose.iter_mut().enumerate() {
            for (f, cell) in row.iter_mut().enumerate() {
                if ends[f].1 == ends[g].0 {
                    *cell = Some(comp(g, f));
                }
            }
        }
        let c = ExplicitCategory { objects, ends, identities, compose };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.ends.len();
        if self.identities.len() != self.objects
            || self.ends.iter().any(|&(s, t)| s >= self.objects || t >= self.objects)
        {
            return Err(Error::Malformed("category endpoints out of range".into()));
        }
        for (x, &i) in self.identities.iter().enumerate() {
            if i >= k || self.ends[i] != (x, x) {
                return Err(Error::Malformed("identity has wrong endpoints".into()));
            }
        }
        for g in 0..k {
            for f in 0..k {
                if let Some(h) = self.compose[g][f] {
                    if h >= k || self.ends[h] != (self.ends[f].0, self.ends[g].1) {
                        return Err(Error::Malformed("composite has wrong endpoints".into()));
                    }
                }
            }
            let (s, t) = self.ends[g];
            if self.compose[g][self.identities[s]] != Some(g)
                || self.compose[self.identities[t]][g] != Some(g)
            {
                return Err(Error::Malformed("identity law fails".into()));
            }
        }
        for h in 0..k {
            for g in 0..k {
                let Some(hg) = self.compose[h][g] else { continue };
                for f in 0..k {
                    let Some(gf) = self.compose[g][f] else { continue };
                    if self.compose[hg][f] != self.compose[h][gf] {
                        return Err(Error::Malformed("composition is not associative".into()));
                    }
                }
            }
        }
        Ok(())
    }

    /// The chaotic category with exactly one arrow between any two objects.
    pub fn indiscrete(objects: usize) -> Self {
        let ends: Vec<_> = (0..objects).flat_map(|x| (0..objects).map(move |y| (x, y))).collect();
        let identities = (0..objects).map(|x| x * objects + x).collect();
        let e = ends.clone();
        ExplicitCategory::new(objects, ends, identities, |g, f| e[f].0 * objects + e[g].1)
            .expect("indiscrete category is valid")
    }

    /// The poset `0 < 1 < ... < m`.
    pub fn chain(m: usize) -> Self {
        let ends: Vec<_> = (0..=m).flat_map(|x| (x..=m).map(move |y| (x, y))).collect();
        let index = |x: usize, y: usize| ends.iter().position(|&e| e == (x, y)).expect("in chain");
        let identities = (0..=m).map(|x| index(x, x)).collect();
        ExplicitCategory::new(m + 1, ends.clone(), identities, |g, f| index(ends[f].0, ends[g].1))
            .expect("chain is valid")
    }

    /// A group viewed as a one-object category; `mul(a, b)` is `a * b` and `0` is the unit.
    pub fn group(order: usize, mul: impl Fn(usize, usize) -> usize) -> Result<Self> {
        ExplicitCategory::new(1, vec![(0, 0); order], vec![0], mul)
    }

    /// The cyclic group of the given order as a one-object category.
    pub fn cyclic(order: usize) -> Self {
        ExplicitCategory::group(order, |a, b| (a + b) % order).expect("cyclic group is valid")
    }

    /// A discrete category.
    pub fn discrete(objects: usize) -> Self {
        ExplicitCategory::new(objects, (0..objects).map(|x| (x, x)).collect(), (0..objects).collect(), |g, _| g)
            .expect("discrete category is valid")
    }

    pub fn object_count(&self) -> usize {
        self.objects
    }

    pub fn arrow_count(&self) -> usize {
        self.ends.len()
    }

    pub fn ends(&self, f: usize) -> (usize, usize) {
        self.ends[f]
    }

    pub fn identity(&self, x: usize) -> usize {
        self.identities[x]
    }

    /// `g ∘ f`.
    pub fn compose(&self, g: usize, f: usize) -> Option<usize> {
        self.compose[g][f]
    }

    pub fn hom(&self, x: usize, y: usize) -> Vec<usize> {
        (0..self.ends.len()).filter(|&f| self.ends[f] == (x, y)).collect()
    }

    pub fn is_identity(&self, f: usize) -> bool {
        self.identities[self.ends[f].0] == f
    }

    /// A two-sided inverse, if any.
    pub fn inverse(&self, f: usize) -> Option<usize> {
        let (s, t) = self.ends[f];
        self.hom(t, s).into_iter().find(|&g| {
            self.compose[g][f] == Some(self.identities[s]) && self.compose[f][g] == Some(self.identities[t])
        })
    }

    pub fn is_groupoid(&self) -> bool {
        (0..self.ends.len()).all(|f| self.inverse(f).is_some())
    }

    /// Product category; arrow `(f, g)` has index `f * |arrows(other)| + g`.
    pub fn product(&self, other: &ExplicitCategory) -> ExplicitCategory {
        let (ka, kb) = (self.ends.len(), other.ends.len());
        let ob = other.objects;
        let ends = (0..ka * kb)
            .map(|i| {
                let (f, g) = (i / kb, i % kb);
                let (fs, ft) = self.ends[f];
                let (gs, gt) = other.ends[g];
                (fs * ob + gs, ft * ob + gt)
            })
            .collect();
        let identities = (0..self.objects * ob)
            .map(|x| self.identities[x / ob] * kb + other.identities[x % ob])
            .collect();
        ExplicitCategory::new(self.objects * ob, ends, identities, |h, f| {
            let a = self.compose[h / kb][f / kb].expect("composable");
            let b = other.compose[h % kb][f % kb].expect("composable");
            a * kb + b
        })
        .expect("product of categories is valid")
    }

    /// Composable chains of length `p`: objects for `p = 0`, otherwise arrow sequences.
    pub fn chains(&self, p: usize) -> Vec<Vec<usize>> {
        if p == 0 {
            return (0..self.objects).map(|x| vec![x]).collect();
        }
        let mut out: Vec<Vec<usize>> = (0..self.ends.len()).map(|f| vec![f]).collect();
        for _ in 1..p {
            let mut next = Vec::new();
            for c in &out {
                let t = self.ends[*c.last().expect("non-empty")].1;
                for f in 0..self.ends.len() {
                    if self.ends[f].0 == t {
                        let mut d = c.clone();
                        d.push(f);
                        next.push(d);
                    }
                }
            }
            out = next;
        }
        out
    }

    /// Vertex sequence of a chain.
    fn chain_vertices(&self, p: usize, c: &[usize]) -> Vec<usize> {
        if p == 0 {
            return c.to_vec();
        }
        let mut v = vec![self.ends[c[0]].0];
        v.extend(c.iter().map(|&f| self.ends[f].1));
        v
    }

    /// Restriction of a `p`-chain along a monotone map `[q] -> [p]`.
    fn restrict_chain(&self, p: usize, c: &[usize], g: &DeltaMap) -> Vec<usize> {
        let verts = self.chain_vertices(p, c);
        let vals = g.values();
        if vals.len() == 1 {
            return vec![verts[vals[0] as usize]];
        }
        vals.windows(2)
            .map(|w| {
                let (a, b) = (w[0] as usize, w[1] as usize);
                let mut acc = self.identities[verts[a]];
                for &f in &c[a..b] {
                    acc = self.compose[f][acc].expect("chain is composable");
                }
                acc
            })
            .collect()
    }

    /// The nerve, extended to level `n` by repeating it along every later component.
    pub fn nerve(&self, site: Arc<Site>) -> Table {
        let mut chains = Vec::new();
        let mut index = Vec::new();
        let mut max_p = 0;
        for o in site.objects() {
            max_p = max_p.max(o.padded(0) as usize);
        }
        for p in 0..=max_p {
            let cs = self.chains(p);
            let idx: alloc::collections::BTreeMap<Vec<usize>, usize> =
                cs.iter().cloned().enumerate().map(|(i, c)| (c, i)).collect();
            chains.push(cs);
            index.push(idx);
        }
        let sizes = site.objects().iter().map(|o| chains[o.padded(0) as usize].len()).collect();
        let s2 = site.clone();
        Table::from_fn(site, sizes, |f, x| {
            let m = s2.morphism(f);
            let p = m.target().padded(0) as usize;
            let q = m.source().padded(0) as usize;
            let r = self.restrict_chain(p, &chains[p][x], &m.comps()[0]);
            index[q][&r]
        })
    }
}

/// The map of nerves induced by a functor given on objects and arrows.
pub fn nerve_map(
    c: &ExplicitCategory,
    d: &ExplicitCategory,
    objects: &[usize],
    arrows: &[usize],
    site: &Arc<Site>,
) -> Result<TableMap> {
    for (f, &g) in arrows.iter().enumerate() {
        let (s, t) = c.ends(f);
        if d.ends(g) != (objects[s], objects[t]) {
            return Err(Error::Malformed("functor does not respect endpoints".into()));
        }
    }
    let mut components = Vec::new();
    for o in site.objects() {
        let p = o.padded(0) as usize;
        let index: alloc::collections::BTreeMap<Vec<usize>, usize> =
            d.chains(p).into_iter().enumerate().map(|(i, ch)| (ch, i)).collect();
        let row = c
            .chains(p)
            .iter()
            .map(|ch| {
                let img: Vec<usize> = if p == 0 { vec![objects[ch[0]]] } else { ch.iter().map(|&f| arrows[f]).collect() };
                index[&img]
            })
            .collect();
        components.push(row);
    }
    Ok(TableMap { components })
}
