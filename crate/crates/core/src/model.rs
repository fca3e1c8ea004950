//! Closed-model checks at small scale: lifting problems, bounded fibrancy, the two
//! factorizations, retract transfer and the failure of properness.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::categorify::{h_identity, Engine, EngineConfig, SigmaMap};
use crate::category::ExplicitCategory;
use crate::error::{Error, Result};
use crate::presentation::PrecatMap;
use crate::search::presentation_maps;
use crate::structure::{induced_functor, weak_equiv_tables, Verdict};
use crate::table::{Table, TableMap};
use crate::theta::{ObjId, Site, ThetaObject};

/// A square `i: U -> V` against `p: A -> B`; `top` gives the images of the generators of
/// `U` in `A`, `bottom` those of `V` in `B`.
#[derive(Clone, Debug)]
pub struct LiftingProblem {
    pub i: PrecatMap,
    pub a: Table,
    pub b: Table,
    pub p: TableMap,
    pub top: Vec<usize>,
    pub bottom: Vec<usize>,
}

impl LiftingProblem {
    fn levels(&self, p: &crate::presentation::Presentation) -> Result<Vec<ObjId>> {
        p.generators().iter().map(|g| self.a.site().object_id(g)).collect()
    }

    /// Checks `p ∘ top = bottom ∘ i`.
    pub fn validate(&self) -> Result<()> {
        self.p.validate(&self.a, &self.b)?;
        let site = self.a.site();
        let ul = self.levels(&self.i.source)?;
        let vl = self.levels(&self.i.target)?;
        if self.top.len() != ul.len() || self.bottom.len() != vl.len() {
            return Err(Error::Malformed("square has the wrong number of images".into()));
        }
        for (u, e) in self.i.images.iter().enumerate() {
            let down = self.b.act(site.morphism_id(&e.map)?, self.bottom[e.gen]);
            if self.p.components[ul[u]][self.top[u]] != down {
                return Err(Error::Malformed(format!("square does not commute at generator {u}")));
            }
        }
        Ok(())
    }
}

/// The first lift `V -> A` (in canonical order) making both triangles commute.
pub fn lift_search(prob: &LiftingProblem, limit: u64) -> Result<Option<Vec<usize>>> {
    prob.validate()?;
    let site = prob.a.site();
    let vl = prob.levels(&prob.i.target)?;
    let mut fixed = vec![None; vl.len()];
    let mut conds = Vec::new();
    for (u, e) in prob.i.images.iter().enumerate() {
        let f = site.morphism_id(&e.map)?;
        if f == site.identity(vl[e.gen]) {
            fixed[e.gen] = Some(prob.top[u]);
        }
        conds.push((e.gen, f, prob.top[u]));
    }
    let mut found = None;
    presentation_maps(&prob.i.target, &prob.a, &fixed, limit, |m| {
        let upper = conds.iter().all(|&(v, f, x)| prob.a.act(f, m[v]) == x);
        let lower = m.iter().enumerate().all(|(v, &x)| prob.p.components[vl[v]][x] == prob.bottom[v]);
        if upper && lower {
            found = Some(m.to_vec());
            false
        } else {
            true
        }
    })?;
    Ok(found)
}

/// A square against a generating φ that has no lift: the Σ-map and the bottom element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OpenSquare {
    pub sigma: SigmaMap,
    pub bottom: usize,
}

/// Squares from the generating φ into `p: Z -> Y` without a lift, within the bounds.
pub fn open_squares(engine: &Engine, z: &Table, y: &Table, p: &TableMap) -> Result<Vec<OpenSquare>> {
    let mut out = Vec::new();
    for sm in engine.enumerate_sigma_maps(z)? {
        let sd = &engine.shapes[sm.shape];
        let down: Vec<usize> = sm.images.iter().zip(&sd.gen_levels).map(|(&x, &o)| p.components[o][x]).collect();
        let lifts: Vec<usize> =
            sd.extensions(z, &sm.images).into_iter().map(|e| p.components[sd.h_level][e]).collect();
        for bottom in sd.extensions(y, &down) {
            if !lifts.contains(&bottom) {
                out.push(OpenSquare { sigma: sm.clone(), bottom });
            }
        }
    }
    Ok(out)
}

/// Lifts exist against every generating φ within the bounds.
pub fn is_bounded_fibration(engine: &Engine, z: &Table, y: &Table, p: &TableMap) -> Result<Verdict> {
    Ok(match open_squares(engine, z, y, p)?.first() {
        None => Verdict::Yes,
        Some(sq) => Verdict::No(format!(
            "no lift for the square on {} with images {:?} over {}",
            engine.shapes[sq.sigma.shape].shape.to_text(),
            sq.sigma.images,
            sq.bottom
        )),
    })
}

/// `f = right ∘ left` through `middle`.
#[derive(Clone, Debug)]
pub struct Factorization {
    pub middle: Table,
    pub left: TableMap,
    pub right: TableMap,
    pub stabilized: bool,
    pub stages: usize,
}

/// Small-object factorization: glue in `h` along every open square until none is left.
pub fn factor_cm51_bounded(engine: &Engine, x: &Table, y: &Table, f: &TableMap) -> Result<Factorization> {
    f.validate(x, y)?;
    let site = engine.site.clone();
    let k = site.objects().len();
    let mut z = x.clone();
    let mut left = TableMap::identity(x);
    let mut right = f.clone();
    for stage in 0..engine.cfg.stage_bound {
        let mut open = open_squares(engine, &z, y, &right)?;
        if open.is_empty() {
            return Ok(Factorization { middle: z, left, right, stabilized: true, stages: stage });
        }
        // Same schedule as the categorification engine.
        if open.iter().any(|s| engine.shapes[s.sigma.shape].shape.is_top()) {
            open.retain(|s| engine.shapes[s.sigma.shape].shape.is_top());
        } else if let Some(d) = open.iter().map(|s| engine.shapes[s.sigma.shape].shape.degree()).min() {
            open.retain(|s| engine.shapes[s.sigma.shape].shape.degree() == d);
        }
        let mut sum = z.clone();
        let mut offsets = Vec::with_capacity(open.len());
        for sq in &open {
            offsets.push(sum.sizes().to_vec());
            sum = sum.coproduct(&engine.shapes[sq.sigma.shape].h_table)?;
        }
        let mut pairs = Vec::new();
        for (j, sq) in open.iter().enumerate() {
            let sd = &engine.shapes[sq.sigma.shape];
            let id = h_identity(sd);
            for ((&o, &m), &img) in sd.gen_levels.iter().zip(&sd.phi_mors).zip(&sq.sigma.images) {
                pairs.push((o, img, offsets[j][o] + sd.h_table.act(m, id)));
            }
        }
        let (q, proj) = sum.quotient(&pairs);
        let mut next_right: Vec<Vec<usize>> = (0..k).map(|o| vec![usize::MAX; q.size(o)]).collect();
        for o in 0..k {
            for xz in 0..z.size(o) {
                next_right[o][proj.components[o][xz]] = right.components[o][xz];
            }
            for (j, sq) in open.iter().enumerate() {
                let sd = &engine.shapes[sq.sigma.shape];
                for (e, rep) in sd.h_reps[o].iter().enumerate() {
                    let img = y.act(site.morphism_id(&rep.map)?, sq.bottom);
                    next_right[o][proj.components[o][offsets[j][o] + e]] = img;
                }
            }
        }
        let step = TableMap { components: (0..k).map(|o| proj.components[o][..z.size(o)].to_vec()).collect() };
        left = left.then(&step);
        right = TableMap { components: next_right };
        z = q;
    }
    let stabilized = open_squares(engine, &z, y, &right)?.is_empty();
    Ok(Factorization { middle: z, left, right, stabilized, stages: engine.cfg.stage_bound })
}

/// Rank of a vertex sequence in lexicographic order, the index used by indiscrete nerves.
fn sequence_index(seq: &[usize], objects: usize) -> usize {
    seq.iter().fold(0, |acc, &v| acc * objects + v)
}

/// The cofibration / weak-equivalence factorization through `M(A, B)`. At `n = 0` this is
/// `A -> B -> B`; at `n = 1` the inner factor `Q(A, N(A, B))` is `N(A, B) = L(A) × B`.
pub fn factor_cm52(a: &Table, b: &Table, f: &TableMap) -> Result<Factorization> {
    f.validate(a, b)?;
    match a.n() {
        0 => Ok(Factorization {
            middle: b.clone(),
            left: f.clone(),
            right: TableMap::identity(b),
            stabilized: true,
            stages: 0,
        }),
        1 => {
            let objects = a.size(0);
            let l = ExplicitCategory::indiscrete(objects).nerve(a.site().clone());
            let middle = l.product(b)?;
            let site = a.site();
            let left = TableMap {
                components: (0..site.objects().len())
                    .map(|o| {
                        (0..a.size(o))
                            .map(|x| sequence_index(&a.vertices(o, x), objects) * b.size(o) + f.components[o][x])
                            .collect()
                    })
                    .collect(),
            };
            let (_, right) = l.product_projections(b);
            Ok(Factorization { middle, left, right, stabilized: true, stages: 0 })
        }
        _ => Err(Error::Unsupported("the CM5(2) factorization is implemented for n <= 1")),
    }
}

/// The idempotent `e: [p] -> [0] -> [p]` (through vertex 0) fixes exactly the totally
/// degenerate elements of `A_p`.
pub fn fixed_points_are_degenerate(a: &Table, p: u8) -> Result<bool> {
    let site = a.site();
    let level = site.object_id(&ThetaObject::new(a.n(), vec![p])?)?;
    let v0 = site.hom(0, level)[0];
    let degen = site.hom(level, 0)[0];
    let e = site.compose(v0, degen);
    let degenerate: alloc::collections::BTreeSet<usize> = (0..a.size(0)).map(|x| a.act(degen, x)).collect();
    Ok((0..a.size(level)).all(|x| (a.act(e, x) == x) == degenerate.contains(&x)))
}

/// `f: A -> B` as a retract of `g: C -> D`: `r ∘ i = 1`, `s ∘ j = 1`, `g ∘ i = j ∘ f`,
/// `f ∘ r = s ∘ g`.
#[derive(Clone, Debug)]
pub struct RetractDiagram {
    pub a: Table,
    pub b: Table,
    pub c: Table,
    pub d: Table,
    pub f: TableMap,
    pub g: TableMap,
    pub i: TableMap,
    pub r: TableMap,
    pub j: TableMap,
    pub s: TableMap,
}

/// One property checked on `g` and on `f`; `None` when undecided.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transfer {
    pub property: &'static str,
    pub g: Option<bool>,
    pub f: Option<bool>,
}

impl Transfer {
    /// The property of `g` passes to `f` whenever both are decided.
    pub fn holds(&self) -> bool {
        !(self.g == Some(true) && self.f == Some(false))
    }
}

fn decided(v: Verdict) -> Option<bool> {
    match v {
        Verdict::Yes => Some(true),
        Verdict::No(_) => Some(false),
        Verdict::Unknown(_) => None,
    }
}

pub fn retract_transfer_check(dg: &RetractDiagram, cfg: &EngineConfig) -> Result<Vec<Transfer>> {
    for (m, s, t) in [
        (&dg.f, &dg.a, &dg.b),
        (&dg.g, &dg.c, &dg.d),
        (&dg.i, &dg.a, &dg.c),
        (&dg.r, &dg.c, &dg.a),
        (&dg.j, &dg.b, &dg.d),
        (&dg.s, &dg.d, &dg.b),
    ] {
        m.validate(s, t)?;
    }
    if dg.i.then(&dg.r) != TableMap::identity(&dg.a) || dg.j.then(&dg.s) != TableMap::identity(&dg.b) {
        return Err(Error::Malformed("retraction equations fail".into()));
    }
    if dg.i.then(&dg.g) != dg.f.then(&dg.j) || dg.r.then(&dg.f) != dg.g.then(&dg.s) {
        return Err(Error::Malformed("retract squares do not commute".into()));
    }
    let engine = Engine::new(dg.a.n(), EngineConfig { degree_bound: dg.a.bound(), ..cfg.clone() })?;
    Ok(vec![
        Transfer {
            property: "cofibration",
            g: Some(dg.g.is_cofibration(&dg.c)),
            f: Some(dg.f.is_cofibration(&dg.a)),
        },
        Transfer {
            property: "bounded fibration",
            g: decided(is_bounded_fibration(&engine, &dg.c, &dg.d, &dg.g)?),
            f: decided(is_bounded_fibration(&engine, &dg.a, &dg.b, &dg.f)?),
        },
        Transfer {
            property: "weak equivalence",
            g: decided(weak_equiv_tables(&dg.c, &dg.d, &dg.g, cfg)?),
            f: decided(weak_equiv_tables(&dg.a, &dg.b, &dg.f, cfg)?),
        },
    ])
}

/// The objects of the properness counterexample and the counts that matter.
#[derive(Clone, Debug)]
pub struct PropernessBundle {
    /// The chain `0 < 1 < 2`.
    pub a: Table,
    /// `A` without the arrow `0 -> 2`.
    pub b: Table,
    /// Three objects with `C(x0,x2) = {c, d}` and composite `c`.
    pub c: Table,
    /// The exact categorification of `B ×_A C`.
    pub d: ExplicitCategory,
    pub c_x0_x2: usize,
    pub d_x0_x2: usize,
    /// `D(x0,x2)` lands on the composite `c`.
    pub lands_on_composite: bool,
    pub fully_faithful: bool,
    pub b_to_a: Verdict,
    pub c_to_a_fibration: Verdict,
    pub d_to_c: Verdict,
}

/// The category `C`: objects `x0, x1, x2`; arrows `u: x0 -> x1`, `v: x1 -> x2`,
/// `c, d: x0 -> x2`, with `v ∘ u = c`.
pub fn properness_category() -> ExplicitCategory {
    // Identities 0..3, then u, v, c, d.
    let ends = vec![(0, 0), (1, 1), (2, 2), (0, 1), (1, 2), (0, 2), (0, 2)];
    ExplicitCategory::new(3, ends.clone(), vec![0, 1, 2], |g, f| {
        if g < 3 {
            f
        } else if f < 3 {
            g
        } else {
            5 // the only composable pair of non-identities is (u, v)
        }
    })
    .expect("valid category")
}

pub fn properness_counterexample() -> Result<PropernessBundle> {
    let site = Arc::new(Site::new(1, 3));
    let chain = ExplicitCategory::chain(2);
    let a = chain.nerve(site.clone());
    // B: elements of A whose vertices do not contain both 0 and 2.
    let members: Vec<Vec<usize>> = (0..site.objects().len())
        .map(|o| (0..a.size(o)).filter(|&x| { let v = a.vertices(o, x); !(v.contains(&0) && v.contains(&2)) }).collect())
        .collect();
    let (b, b_in_a) = a.subtable(&members)?;
    let cc = properness_category();
    let c = cc.nerve(site.clone());
    // C -> A sends x_i to i; arrows go to the unique arrow between the images.
    let chain_arrow = |s: usize, t: usize| chain.hom(s, t)[0];
    let c_arrows: Vec<usize> = (0..cc.arrow_count()).map(|f| { let (s, t) = cc.ends(f); chain_arrow(s, t) }).collect();
    let c_to_a = crate::category::nerve_map(&cc, &chain, &[0, 1, 2], &c_arrows, &site)?;
    let (fp, _, to_c) = Table::fiber_product(&b, &b_in_a, &c, &c_to_a)?;
    let func = induced_functor(&fp, &c, &to_c)?.ok_or(Error::Unsupported("word problem undecided"))?;
    // Objects of the fiber product are pairs (i, x_i); find the ones over x0 and x2.
    let obj = |xi: usize| func.objects.iter().position(|&o| o == xi).expect("object over x_i");
    let (d0, d2) = (obj(0), obj(2));
    let homs_d = func.source.hom(d0, d2);
    let t = &func.target;
    let composite = t.compose(t.hom(1, 2)[0], t.hom(0, 1)[0]).expect("composable");
    let lands_on_composite = homs_d.iter().all(|&h| func.arrows[h] == composite);
    let cfg = EngineConfig::new(3, 8, 3);
    let b_to_a = weak_equiv_tables(&b, &a, &b_in_a, &cfg)?;
    let engine = Engine::new(1, cfg.clone())?;
    let c_to_a_fibration = is_bounded_fibration(&engine, &c, &a, &c_to_a)?;
    let d_to_c = weak_equiv_tables(&fp, &c, &to_c, &cfg)?;
    Ok(PropernessBundle {
        c_x0_x2: cc.hom(0, 2).len(),
        d_x0_x2: homs_d.len(),
        lands_on_composite,
        fully_faithful: homs_d.len() == cc.hom(0, 2).len(),
        d: func.source,
        a,
        b,
        c,
        b_to_a,
        c_to_a_fibration,
        d_to_c,
    })
}

/// Human-readable one-line summary.
pub fn properness_summary(p: &PropernessBundle) -> String {
    format!(
        "|C(x0,x2)| = {}, |D(x0,x2)| = {}, D -> C fully faithful: {}, verdict: {}",
        p.c_x0_x2,
        p.d_x0_x2,
        p.fully_faithful,
        p.d_to_c.name()
    )
}
