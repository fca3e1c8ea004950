use std::sync::Arc;

use precat_core::category::ExplicitCategory;
use precat_core::model::{lift_search, LiftingProblem};
use precat_core::presentation::{Element, PrecatMap, Presentation, Relation};
use precat_core::search::{all_presentation_maps, all_table_maps, count_table_maps, presentation_maps};
use precat_core::standard::{phi, SigmaShape};
use precat_core::structure::{induce, is_equivalence, truncate_brutal, StrictModel};
use precat_core::table::{Table, TableMap};
use precat_core::theta::{hom_theta, objects_up_to, Site, ThetaObject};
use proptest::prelude::*;

/// Generators and arcs chosen by index, so every draw is well typed.
#[derive(Clone, Debug)]
struct Recipe {
    n: u8,
    gens: Vec<usize>,
    arcs: Vec<(usize, usize, usize, usize, usize)>,
}

fn recipe() -> impl Strategy<Value = Recipe> {
    (1u8..=2, prop::collection::vec(0usize..64, 1..=3), prop::collection::vec((0usize..64, 0usize..8, 0usize..8, 0usize..64, 0usize..64), 0..=3))
        .prop_map(|(n, gens, arcs)| Recipe { n, gens, arcs })
}

fn build(r: &Recipe, gen_degree: u32) -> Presentation {
    let objs = objects_up_to(r.n, gen_degree);
    let gens: Vec<ThetaObject> = r.gens.iter().map(|&i| objs[i % objs.len()].clone()).collect();
    let sources = objects_up_to(r.n, 1);
    let mut p = Presentation::new(r.n, gens.clone(), Vec::new()).unwrap();
    for &(s, a, b, u, v) in &r.arcs {
        let src = sources[s % sources.len()].clone();
        let (a, b) = (a % gens.len(), b % gens.len());
        let hu = hom_theta(&src, &gens[a]).unwrap();
        let hv = hom_theta(&src, &gens[b]).unwrap();
        p.add_relation(Relation {
            source: src,
            left: Element::new(a, hu[u % hu.len()].clone()),
            right: Element::new(b, hv[v % hv.len()].clone()),
        })
        .unwrap();
    }
    p
}

/// Class count at `m` by repeated relabelling until nothing changes.
fn naive_level_size(p: &Presentation, m: &ThetaObject) -> usize {
    let mut elems = Vec::new();
    for (i, g) in p.generators().iter().enumerate() {
        for f in hom_theta(m, g).unwrap() {
            elems.push(Element::new(i, f));
        }
    }
    let mut pairs = Vec::new();
    for r in p.relations() {
        for g in hom_theta(m, &r.source).unwrap() {
            let l = r.left.restrict(&g).unwrap();
            let rr = r.right.restrict(&g).unwrap();
            let li = elems.iter().position(|e| *e == l).unwrap();
            let ri = elems.iter().position(|e| *e == rr).unwrap();
            pairs.push((li, ri));
        }
    }
    let mut label: Vec<usize> = (0..elems.len()).collect();
    loop {
        let mut changed = false;
        for &(a, b) in &pairs {
            let (la, lb) = (label[a], label[b]);
            if la != lb {
                let (keep, drop) = (la.min(lb), la.max(lb));
                for l in label.iter_mut() {
                    if *l == drop {
                        *l = keep;
                    }
                }
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    label.sort_unstable();
    label.dedup();
    label.len()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn eval_agrees_with_naive_closure(r in recipe()) {
        let p = build(&r, 2);
        for m in objects_up_to(r.n, 3) {
            prop_assert_eq!(p.eval(&m).unwrap().len(), naive_level_size(&p, &m), "level {}", m);
        }
    }

    #[test]
    fn tabulations_are_functorial(r in recipe()) {
        let t = build(&r, 2).tabulate(3).unwrap().table;
        t.check_functorial().unwrap();
        // Constancy: one morphism from every level to the point.
        let site = t.site();
        for o in 0..site.objects().len() {
            prop_assert_eq!(site.hom(o, 0).len(), 1);
        }
    }

    #[test]
    fn brutal_truncation_is_left_adjoint_to_induction(r in recipe(), target in 0usize..3) {
        let r = Recipe { n: 2, ..r };
        let b3 = build(&r, 2).tabulate(3).unwrap().table;
        let low2 = Arc::new(Site::new(1, 2));
        let truncated = truncate_brutal(&b3, 1).unwrap().restrict(low2.clone()).unwrap();
        let b2 = b3.restrict(Arc::new(Site::new(2, 2))).unwrap();
        let a = match target {
            0 => ExplicitCategory::chain(1),
            1 => ExplicitCategory::indiscrete(2),
            _ => ExplicitCategory::cyclic(2),
        }
        .nerve(low2);
        let left = count_table_maps(&truncated, &a, 1_000_000).unwrap();
        let right = count_table_maps(&b2, &induce(&a, 2).unwrap(), 1_000_000).unwrap();
        prop_assert_eq!(left, right);
    }
}

/// Images of the generators of `a` under a map into `z`, read through `f: A -> B`.
fn restrict_images(f: &PrecatMap, z: &Table, m: &[usize]) -> Vec<usize> {
    f.images.iter().map(|e| z.act_by(&e.map, m[e.gen]).unwrap()).collect()
}

#[test]
fn pushouts_have_the_universal_property() {
    let e = ThetaObject::new(1, vec![1]).unwrap();
    let pt = ThetaObject::point(1);
    let point = Presentation::representable(&pt);
    let edge = Presentation::representable(&e);
    let site = Arc::new(Site::new(1, 3));
    let vertex = |i: u8| PrecatMap::new(point.clone(), edge.clone(), vec![Element::new(0, precat_core::standard::vertex(&e, i).unwrap())]).unwrap();
    let targets = [
        ExplicitCategory::chain(2).nerve(site.clone()),
        ExplicitCategory::indiscrete(2).nerve(site.clone()),
        ExplicitCategory::cyclic(2).nerve(site.clone()),
    ];
    for (f, g) in [(vertex(1), vertex(0)), (vertex(0), vertex(0)), (vertex(1), vertex(1))] {
        let (d, _, _) = Presentation::pushout(&f, &g).unwrap();
        for z in &targets {
            let direct = all_presentation_maps(&d, z, 100_000).unwrap().len();
            let bs = all_presentation_maps(&f.target, z, 100_000).unwrap();
            let cs = all_presentation_maps(&g.target, z, 100_000).unwrap();
            let pairs = bs
                .iter()
                .flat_map(|b| cs.iter().map(move |c| (b, c)))
                .filter(|(b, c)| restrict_images(&f, z, b) == restrict_images(&g, z, c))
                .count();
            assert_eq!(direct, pairs);
        }
    }
}

/// Every assignment of generator images, filtered by relations and both triangles.
fn naive_lifts(prob: &LiftingProblem) -> Vec<Vec<usize>> {
    let v = &prob.i.target;
    let site = prob.a.site();
    let levels: Vec<usize> = v.generators().iter().map(|g| site.object_id(g).unwrap()).collect();
    let mut out = Vec::new();
    let mut cur = vec![0usize; levels.len()];
    if levels.iter().any(|&l| prob.a.size(l) == 0) {
        return out;
    }
    loop {
        let relations = v.relations().iter().all(|r| {
            prob.a.act_by(&r.left.map, cur[r.left.gen]).unwrap() == prob.a.act_by(&r.right.map, cur[r.right.gen]).unwrap()
        });
        let upper = prob.i.images.iter().zip(&prob.top).all(|(e, &x)| prob.a.act_by(&e.map, cur[e.gen]).unwrap() == x);
        let lower = cur.iter().enumerate().all(|(k, &x)| prob.p.components[levels[k]][x] == prob.bottom[k]);
        if relations && upper && lower {
            out.push(cur.clone());
        }
        let mut k = levels.len();
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            cur[k] += 1;
            if cur[k] < prob.a.size(levels[k]) {
                break;
            }
            cur[k] = 0;
        }
    }
}

#[test]
fn lift_search_matches_naive_enumeration() {
    let site = Arc::new(Site::new(1, 3));
    let shapes = [
        SigmaShape::new(ThetaObject::point(1), 2, -1).unwrap(),
        SigmaShape::new(ThetaObject::point(1), 2, 0).unwrap(),
        SigmaShape::new(ThetaObject::point(1), 3, -1).unwrap(),
    ];
    let sources = [ExplicitCategory::chain(2), ExplicitCategory::indiscrete(2), ExplicitCategory::cyclic(2)];
    for shape in &shapes {
        let i = phi(shape).unwrap();
        for cat in &sources {
            let a = cat.nerve(site.clone());
            let b = ExplicitCategory::discrete(1).nerve(site.clone());
            let p = TableMap::to_terminal(&a);
            let b_levels: Vec<usize> = i.target.generators().iter().map(|_| 0).collect();
            // Every top square: every map of the source into `a`.
            let mut tops = Vec::new();
            presentation_maps(&i.source, &a, &[], 10_000, |m| {
                tops.push(m.to_vec());
                true
            })
            .unwrap();
            for top in tops {
                let prob = LiftingProblem { i: i.clone(), a: a.clone(), b: b.clone(), p: p.clone(), top, bottom: b_levels.clone() };
                let naive = naive_lifts(&prob);
                assert_eq!(lift_search(&prob, 100_000).unwrap(), naive.first().cloned());
            }
        }
    }
}

#[test]
fn equivalences_satisfy_two_of_three() {
    let site = Arc::new(Site::new(1, 2));
    let cats = [ExplicitCategory::discrete(1), ExplicitCategory::indiscrete(2), ExplicitCategory::chain(1), ExplicitCategory::cyclic(2)];
    let models: Vec<StrictModel> = cats.iter().map(|c| StrictModel::from_category(c, 2)).collect();
    let tables: Vec<Table> = cats.iter().map(|c| c.nerve(site.clone())).collect();
    let mut checked = 0;
    for x in 0..cats.len() {
        for y in 0..cats.len() {
            for z in [0, 1] {
                let fs = all_table_maps(&tables[x], &tables[y], 10_000).unwrap();
                let gs = all_table_maps(&tables[y], &tables[z], 10_000).unwrap();
                for f in &fs {
                    for g in &gs {
                        let vf = is_equivalence(f, &models[x], &models[y]).unwrap().is_yes();
                        let vg = is_equivalence(g, &models[y], &models[z]).unwrap().is_yes();
                        let vgf = is_equivalence(&f.then(g), &models[x], &models[z]).unwrap().is_yes();
                        let yes = [vf, vg, vgf].iter().filter(|&&b| b).count();
                        assert_ne!(yes, 2, "two of three failed for {x} -> {y} -> {z}");
                        checked += 1;
                    }
                }
            }
        }
    }
    assert!(checked > 50);
}
