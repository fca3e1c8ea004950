//! Finitely presented categories and groupoids with a bounded word-problem service.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::vec;
use alloc::vec::Vec;

use crate::category::ExplicitCategory;
use crate::error::{Error, Result};
use crate::table::Table;
use crate::theta::{DeltaMap, ThetaMorphism, ThetaObject};

/// A path of generators from `start`, in composition order (first arrow first).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Path {
    pub start: usize,
    pub arrows: Vec<usize>,
}

/// Relation `left = right` between parallel paths from `start`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct WordRelation {
    pub start: usize,
    pub left: Vec<usize>,
    pub right: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinCategory {
    objects: usize,
    gens: Vec<(usize, usize)>,
    relations: Vec<WordRelation>,
}

/// Outcome of completing a presentation to an explicit category.
#[derive(Clone, Debug)]
pub enum Completion {
    Finite(Completed),
    /// The enumeration exceeded its arrow budget.
    Undecided,
}

/// A finite category together with a normal word for each arrow.
#[derive(Clone, Debug)]
pub struct Completed {
    pub category: ExplicitCategory,
    pub words: Vec<Path>,
    /// Arrow index of every generator.
    pub generator_arrows: Vec<usize>,
}

impl FinCategory {
    pub fn new(objects: usize, gens: Vec<(usize, usize)>, relations: Vec<WordRelation>) -> Result<Self> {
        if gens.iter().any(|&(s, t)| s >= objects || t >= objects) {
            return Err(Error::Malformed("generator endpoints out of range".into()));
        }
        let c = FinCategory { objects, gens, relations: Vec::new() };
        for r in &relations {
            let a = c.target(r.start, &r.left);
            if a.is_none() || a != c.target(r.start, &r.right) {
                return Err(Error::Malformed("relation sides are not parallel paths".into()));
            }
        }
        Ok(FinCategory { relations, ..c })
    }

    pub fn object_count(&self) -> usize {
        self.objects
    }

    pub fn generators(&self) -> &[(usize, usize)] {
        &self.gens
    }

    pub fn relations(&self) -> &[WordRelation] {
        &self.relations
    }

    /// Endpoint of a path, or `None` if it is not composable.
    pub fn target(&self, start: usize, word: &[usize]) -> Option<usize> {
        let mut at = start;
        for &g in word {
            let &(s, t) = self.gens.get(g)?;
            if s != at {
                return None;
            }
            at = t;
        }
        Some(at)
    }

    /// Coset enumeration from every object; gives up past `max_arrows` defined states.
    pub fn complete(&self, max_arrows: usize) -> Completion {
        let mut graphs = Vec::with_capacity(self.objects);
        let mut budget = max_arrows;
        for x in 0..self.objects {
            match Enumeration::run(self, x, budget) {
                Some(mut e) => {
                    budget = budget.saturating_sub(e.live().len());
                    graphs.push(e);
                }
                None => return Completion::Undecided,
            }
        }
        // Number the arrows: object by object, states in order.
        let mut index: Vec<BTreeMap<usize, usize>> = Vec::with_capacity(self.objects);
        let mut ends = Vec::new();
        let mut words = Vec::new();
        for (x, e) in graphs.iter_mut().enumerate() {
            let mut map = BTreeMap::new();
            for s in e.live() {
                map.insert(s, ends.len());
                ends.push((x, e.tgt[s]));
                words.push(Path { start: x, arrows: e.word[s].clone() });
            }
            index.push(map);
        }
        let identities = (0..self.objects).map(|x| index[x][&graphs[x].find(0)]).collect();
        let comp = |g: usize, f: usize| -> usize {
            let x = words[f].start;
            let e = &graphs[x];
            let mut s = e.find_ro(e.trace_ro(0, &words[f].arrows).expect("complete graph"));
            s = e.find_ro(e.trace_ro(s, &words[g].arrows).expect("complete graph"));
            index[x][&s]
        };
        let category = match ExplicitCategory::new(self.objects, ends.clone(), identities, comp) {
            Ok(c) => c,
            Err(_) => return Completion::Undecided,
        };
        let generator_arrows = self
            .gens
            .iter()
            .enumerate()
            .map(|(g, &(s, _))| {
                let e = &graphs[s];
                index[s][&e.find_ro(e.trans[0][g].expect("complete graph"))]
            })
            .collect();
        Completion::Finite(Completed { category, words, generator_arrows })
    }
}

/// Right Cayley graph of the arrows out of one object, built by coset enumeration.
struct Enumeration {
    tgt: Vec<usize>,
    trans: Vec<Vec<Option<usize>>>,
    parent: Vec<usize>,
    word: Vec<Vec<usize>>,
}

impl Enumeration {
    fn run(c: &FinCategory, x: usize, cap: usize) -> Option<Enumeration> {
        let k = c.gens.len();
        let mut e = Enumeration { tgt: vec![x], trans: vec![vec![None; k]], parent: vec![0], word: vec![Vec::new()] };
        loop {
            let mut changed = false;
            let mut i = 0;
            while i < e.tgt.len() {
                if e.find(i) != i {
                    i += 1;
                    continue;
                }
                for r in &c.relations {
                    if r.start != e.tgt[i] || e.find(i) != i {
                        continue;
                    }
                    let a = e.trace_define(c, i, &r.left, cap, &mut changed)?;
                    let b = e.trace_define(c, i, &r.right, cap, &mut changed)?;
                    if e.find(a) != e.find(b) {
                        e.coincide(a, b);
                        changed = true;
                    }
                }
                if e.find(i) == i {
                    for g in 0..k {
                        if c.gens[g].0 == e.tgt[i] && e.trans[i][g].is_none() {
                            e.define(c, i, g, cap)?;
                            changed = true;
                        }
                    }
                }
                i += 1;
            }
            if !changed {
                return Some(e);
            }
        }
    }

    fn find(&mut self, mut s: usize) -> usize {
        while self.parent[s] != s {
            self.parent[s] = self.parent[self.parent[s]];
            s = self.parent[s];
        }
        s
    }

    fn find_ro(&self, mut s: usize) -> usize {
        while self.parent[s] != s {
            s = self.parent[s];
        }
        s
    }

    fn trace_ro(&self, s: usize, w: &[usize]) -> Option<usize> {
        let mut s = self.find_ro(s);
        for &g in w {
            s = self.find_ro(self.trans[s][g]?);
        }
        Some(s)
    }

    fn define(&mut self, c: &FinCategory, s: usize, g: usize, cap: usize) -> Option<usize> {
        if self.tgt.len() >= cap {
            return None;
        }
        let id = self.tgt.len();
        self.tgt.push(c.gens[g].1);
        self.trans.push(vec![None; c.gens.len()]);
        self.parent.push(id);
        let mut w = self.word[s].clone();
        w.push(g);
        self.word.push(w);
        self.trans[s][g] = Some(id);
        Some(id)
    }

    fn trace_define(&mut self, c: &FinCategory, s: usize, w: &[usize], cap: usize, changed: &mut bool) -> Option<usize> {
        let mut s = self.find(s);
        for &g in w {
            s = match self.trans[s][g] {
                Some(t) => self.find(t),
                None => {
                    *changed = true;
                    self.define(c, s, g, cap)?
                }
            };
        }
        Some(s)
    }

    fn coincide(&mut self, a: usize, b: usize) {
        let mut queue = VecDeque::from([(a, b)]);
        while let Some((a, b)) = queue.pop_front() {
            let (ra, rb) = (self.find(a), self.find(b));
            if ra == rb {
                continue;
            }
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
            for g in 0..self.trans[hi].len() {
                if let Some(t) = self.trans[hi][g] {
                    match self.trans[lo][g] {
                        Some(t2) => queue.push_back((t, t2)),
                        None => self.trans[lo][g] = Some(t),
                    }
                }
            }
        }
    }

    fn live(&mut self) -> Vec<usize> {
        (0..self.tgt.len()).filter(|&s| self.find(s) == s).collect()
    }
}

/// Elements of the 1-skeleton used to read off a category from a 1-precat table.
fn edge_faces(t: &Table) -> Result<(usize, usize, [usize; 3], usize)> {
    let site = t.site();
    let pt = ThetaObject::point(1);
    let e = ThetaObject::new(1, vec![1])?;
    let tri = ThetaObject::new(1, vec![2])?;
    let l0 = site.object_id(&pt)?;
    let l1 = site.object_id(&e)?;
    let l2 = site.object_id(&tri)?;
    let face = |vals: Vec<u8>| -> Result<usize> {
        site.morphism_id(&ThetaMorphism::project(&e, &tri, &[DeltaMap::new(2, vals)?])?)
    };
    let degen = site.morphism_id(&ThetaMorphism::project(&e, &pt, &[DeltaMap::constant(1, 0, 0)])?)?;
    let _ = l0;
    Ok((l1, l2, [face(vec![0, 1])?, face(vec![1, 2])?, face(vec![0, 2])?], degen))
}

/// The category generated by a 1-precat: objects at level 0, nondegenerate edges as
/// generators, and one relation per 2-simplex.
pub fn cat1_exact(t: &Table) -> Result<(FinCategory, Vec<Option<usize>>)> {
    if t.n() != 1 || t.bound() < 2 {
        return Err(Error::Unsupported("the exact engine needs a 1-precat tabulated to degree 2"));
    }
    let (l1, l2, [d2, d0, d1], degen) = edge_faces(t)?;
    let objects = t.size(0);
    let degenerate: BTreeSet<usize> = (0..objects).map(|x| t.act(degen, x)).collect();
    let mut gen_of = vec![None; t.size(l1)];
    let mut gens = Vec::new();
    for e in 0..t.size(l1) {
        if !degenerate.contains(&e) {
            gen_of[e] = Some(gens.len());
            gens.push(t.endpoints(l1, e));
        }
    }
    let word = |e: usize| -> Vec<usize> { gen_of[e].into_iter().collect() };
    let mut relations = BTreeSet::new();
    for z in 0..t.size(l2) {
        let (a, b, c) = (t.act(d2, z), t.act(d0, z), t.act(d1, z));
        let mut right = word(a);
        right.extend(word(b));
        let left = word(c);
        if left != right {
            relations.insert(WordRelation { start: t.endpoints(l1, a).0, left, right });
        }
    }
    Ok((FinCategory::new(objects, gens, relations.into_iter().collect())?, gen_of))
}

/// A presented group: letters `0..rank`, inverses written as `rank + i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupPresentation {
    pub rank: usize,
    pub relators: Vec<Vec<usize>>,
}

/// Element census of a group by word length.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Census {
    /// Distinct elements represented by words of length at most `L`, for `L = 0..`.
    Exact(Vec<usize>),
    /// Counts agreed under two widening rewrite windows but are not certified.
    Stable(Vec<usize>),
    Unknown,
}

impl Census {
    pub fn counts(&self) -> Option<&[usize]> {
        match self {
            Census::Exact(v) | Census::Stable(v) => Some(v),
            Census::Unknown => None,
        }
    }
}

impl GroupPresentation {
    fn inv(&self, a: usize) -> usize {
        if a < self.rank {
            a + self.rank
        } else {
            a - self.rank
        }
    }

    pub fn reduce(&self, w: &[usize]) -> Vec<usize> {
        let mut out: Vec<usize> = Vec::with_capacity(w.len());
        for &a in w {
            if out.last() == Some(&self.inv(a)) {
                out.pop();
            } else {
                out.push(a);
            }
        }
        out
    }

    pub fn inverse_word(&self, w: &[usize]) -> Vec<usize> {
        w.iter().rev().map(|&a| self.inv(a)).collect()
    }

    /// Free and cyclic reduction.
    fn cyclic_reduce(&self, w: &[usize]) -> Vec<usize> {
        let mut w = self.reduce(w);
        while w.len() >= 2 && w[0] == self.inv(w[w.len() - 1]) {
            w.pop();
            w.remove(0);
        }
        w
    }

    /// Tietze elimination: while some letter occurs exactly once in a relator, solve for it
    /// and drop it. Highest letters go first, so earlier generators survive.
    pub fn simplify(&self) -> GroupPresentation {
        let mut rank = self.rank;
        let mut rels: Vec<Vec<usize>> = self.relators.iter().map(|r| self.cyclic_reduce(r)).collect();
        loop {
            let cur = GroupPresentation { rank, relators: Vec::new() };
            rels = rels.iter().map(|r| cur.cyclic_reduce(r)).filter(|r| !r.is_empty()).collect();
            let found = (0..rank).rev().find_map(|x| {
                rels.iter().enumerate().find_map(|(i, r)| {
                    let hits: Vec<usize> = (0..r.len()).filter(|&k| r[k] % rank == x).collect();
                    (hits.len() == 1).then(|| (x, i, hits[0]))
                })
            });
            let Some((x, i, k)) = found else { break };
            let r = rels.remove(i);
            // r = u x^e v, so x^e = u^-1 v^-1 and x = (v u)^(-e).
            let mut vu: Vec<usize> = r[k + 1..].to_vec();
            vu.extend_from_slice(&r[..k]);
            let value = if r[k] < rank { cur.inverse_word(&vu) } else { vu };
            let value_inv = cur.inverse_word(&value);
            let next = GroupPresentation { rank: rank - 1, relators: Vec::new() };
            let renumber = |a: usize| {
                let (base, inv) = (a % rank, a >= rank);
                let b = if base > x { base - 1 } else { base };
                if inv {
                    b + rank - 1
                } else {
                    b
                }
            };
            rels = rels
                .iter()
                .map(|r| {
                    let mut out = Vec::new();
                    for &a in r {
                        if a % rank == x {
                            out.extend(if a < rank { &value } else { &value_inv }.iter().map(|&b| renumber(b)));
                        } else {
                            out.push(renumber(a));
                        }
                    }
                    next.reduce(&out)
                })
                .collect();
            rank -= 1;
        }
        rels.sort();
        rels.dedup();
        GroupPresentation { rank, relators: rels }
    }

    /// The one-object category with letters and formal inverses as generators.
    pub fn as_category(&self) -> FinCategory {
        let k = 2 * self.rank;
        let mut rels: Vec<WordRelation> = (0..k)
            .map(|a| WordRelation { start: 0, left: vec![a, self.inv(a)], right: Vec::new() })
            .collect();
        for r in &self.relators {
            rels.push(WordRelation { start: 0, left: r.clone(), right: Vec::new() });
        }
        FinCategory::new(1, vec![(0, 0); k], rels).expect("one object")
    }

    /// Number of elements represented by words of length at most `L`, for `L = 0..=max_len`.
    pub fn census(&self, max_len: usize, max_elements: usize) -> Census {
        let relators: Vec<Vec<usize>> =
            self.relators.iter().map(|r| self.reduce(r)).filter(|r| !r.is_empty()).collect();
        if relators.is_empty() {
            let mut counts = Vec::with_capacity(max_len + 1);
            let (mut total, mut layer) = (1usize, 1usize);
            for l in 0..=max_len {
                if l > 0 {
                    layer = if l == 1 { 2 * self.rank } else { layer * (2 * self.rank).saturating_sub(1) };
                    total += layer;
                }
                counts.push(total);
            }
            return Census::Exact(counts);
        }
        if let Completion::Finite(done) = self.as_category().complete(max_elements) {
            return Census::Exact(done.distance_census(0, max_len));
        }
        let slack = relators.iter().map(Vec::len).max().unwrap_or(0);
        let a = self.window_census(&relators, max_len, max_len + slack);
        let b = self.window_census(&relators, max_len, max_len + slack + 2);
        match (a, b) {
            (Some(a), Some(b)) if a == b => Census::Stable(a),
            _ => Census::Unknown,
        }
    }

    /// Union-find over reduced words of length at most `window`, closed under relator insertion.
    fn window_census(&self, relators: &[Vec<usize>], max_len: usize, window: usize) -> Option<Vec<usize>> {
        let words = reduced_words(self.rank, window, 2_000_000)?;
        let index: BTreeMap<&Vec<usize>, usize> = words.iter().enumerate().map(|(i, w)| (w, i)).collect();
        let mut uf = crate::util::UnionFind::new(words.len());
        let mut variants = Vec::new();
        for r in relators {
            for rr in [r.clone(), self.inverse_word(r)] {
                for i in 0..rr.len() {
                    let mut v = rr[i..].to_vec();
                    v.extend_from_slice(&rr[..i]);
                    variants.push(v);
                }
            }
        }
        for (i, w) in words.iter().enumerate() {
            for cut in 0..=w.len() {
                for v in &variants {
                    let mut x = w[..cut].to_vec();
                    x.extend_from_slice(v);
                    x.extend_from_slice(&w[cut..]);
                    let x = self.reduce(&x);
                    if let Some(&j) = index.get(&x) {
                        uf.union(i, j);
                    }
                }
            }
        }
        let mut counts = Vec::with_capacity(max_len + 1);
        let mut seen = BTreeSet::new();
        let mut i = 0;
        for l in 0..=max_len {
            while i < words.len() && words[i].len() <= l {
                seen.insert(uf.find(i));
                i += 1;
            }
            counts.push(seen.len());
        }
        Some(counts)
    }
}

/// Reduced words over `rank` letters and inverses, by length then lexicographically.
fn reduced_words(rank: usize, max_len: usize, cap: usize) -> Option<Vec<Vec<usize>>> {
    let mut out = vec![Vec::new()];
    let mut layer: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for a in 0..2 * rank {
                let inv = if a < rank { a + rank } else { a - rank };
                if w.last() == Some(&inv) {
                    continue;
                }
                let mut v = w.clone();
                v.push(a);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        if out.len() > cap {
            return None;
        }
        layer = next;
    }
    Some(out)
}

impl Completed {
    /// Number of arrows out of `start` (ending anywhere) at word distance at most `L`
    /// from the identity, restricted to endomorphisms of `start`.
    pub fn distance_census(&self, start: usize, max_len: usize) -> Vec<usize> {
        let c = &self.category;
        let mut dist = vec![usize::MAX; c.arrow_count()];
        let id = c.identity(start);
        dist[id] = 0;
        let mut queue = VecDeque::from([id]);
        while let Some(f) = queue.pop_front() {
            for &g in &self.generator_arrows {
                if let Some(h) = c.compose(g, f) {
                    if dist[h] == usize::MAX {
                        dist[h] = dist[f] + 1;
                        queue.push_back(h);
                    }
                }
            }
        }
        (0..=max_len)
            .map(|l| {
                (0..c.arrow_count()).filter(|&f| c.ends(f) == (start, start) && dist[f] <= l).count()
            })
            .collect()
    }
}

/// A presented groupoid: every generator has a paired inverse (possibly formal).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupoidPresentation {
    pub objects: usize,
    /// Generator endpoints; `inverse[g]` is the generator paired with `g`.
    pub gens: Vec<(usize, usize)>,
    pub inverse: Vec<usize>,
    pub relations: Vec<WordRelation>,
}

impl GroupoidPresentation {
    /// Pairs generators related by both inverse laws; the rest get formal inverses.
    pub fn from_category(c: &FinCategory) -> GroupoidPresentation {
        let k = c.gens.len();
        let is_trivial = |x: usize, w: &[usize]| {
            c.relations.iter().any(|r| {
                r.start == x
                    && ((r.left == w && r.right.is_empty()) || (r.right == w && r.left.is_empty()))
            })
        };
        let mut inverse = vec![usize::MAX; k];
        for g in 0..k {
            if inverse[g] != usize::MAX {
                continue;
            }
            let (s, t) = c.gens[g];
            for h in 0..k {
                if h != g && inverse[h] == usize::MAX && c.gens[h] == (t, s) && is_trivial(s, &[g, h]) && is_trivial(t, &[h, g]) {
                    inverse[g] = h;
                    inverse[h] = g;
                    break;
                }
            }
        }
        let mut gens = c.gens.clone();
        for g in 0..k {
            if inverse[g] == usize::MAX {
                let (s, t) = c.gens[g];
                inverse[g] = gens.len();
                inverse.push(g);
                gens.push((t, s));
            }
        }
        GroupoidPresentation { objects: c.objects, gens, inverse, relations: c.relations.clone() }
    }

    /// The underlying category presentation, inverse laws included.
    pub fn as_category(&self) -> FinCategory {
        let mut rels = self.relations.clone();
        for (g, &(s, _)) in self.gens.iter().enumerate() {
            rels.push(WordRelation { start: s, left: vec![g, self.inverse[g]], right: Vec::new() });
        }
        FinCategory::new(self.objects, self.gens.clone(), rels).expect("well-typed groupoid")
    }

    /// Connected components of the underlying graph, as a component index per object.
    pub fn components(&self) -> (Vec<usize>, usize) {
        let mut uf = crate::util::UnionFind::new(self.objects);
        for &(s, t) in &self.gens {
            uf.union(s, t);
        }
        uf.classes()
    }

    /// The vertex group at `base` after contracting a breadth-first spanning tree.
    pub fn vertex_group(&self, base: usize) -> GroupPresentation {
        // Tree path from the base to every reachable object, as generator words.
        let mut path: Vec<Option<Vec<usize>>> = vec![None; self.objects];
        path[base] = Some(Vec::new());
        let mut tree = BTreeSet::new();
        let mut queue = VecDeque::from([base]);
        while let Some(x) = queue.pop_front() {
            for (g, &(s, t)) in self.gens.iter().enumerate() {
                if s == x && path[t].is_none() {
                    let mut w = path[x].clone().expect("reached");
                    w.push(g);
                    path[t] = Some(w);
                    tree.insert(g);
                    tree.insert(self.inverse[g]);
                    queue.push_back(t);
                }
            }
        }
        // One letter per non-tree inverse pair.
        let mut letter = vec![None; self.gens.len()];
        let mut rank = 0;
        for g in 0..self.gens.len() {
            if tree.contains(&g) || path[self.gens[g].0].is_none() || letter[g].is_some() {
                continue;
            }
            letter[g] = Some((rank, false));
            letter[self.inverse[g]] = Some((rank, true));
            rank += 1;
        }
        let translate = |w: &[usize]| -> Vec<usize> {
            w.iter()
                .filter_map(|&g| letter[g].map(|(i, inv)| if inv { i + rank } else { i }))
                .collect()
        };
        let gp = GroupPresentation { rank, relators: Vec::new() };
        let mut relators = Vec::new();
        for r in &self.relations {
            if path[r.start].is_none() {
                continue;
            }
            let mut w = translate(&r.left);
            w.extend(gp.inverse_word(&translate(&r.right)));
            let w = gp.reduce(&w);
            if !w.is_empty() {
                relators.push(w);
            }
        }
        GroupPresentation { rank, relators }.simplify()
    }
}
