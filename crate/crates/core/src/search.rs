//! Exhaustive enumeration of maps into tables.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::presentation::Presentation;
use crate::table::{Table, TableMap};
use crate::theta::{MorId, ObjId};

/// Default ceiling on visited search nodes.
pub const DEFAULT_LIMIT: u64 = 1_000_000;

struct Arc_ {
    left: (usize, MorId),
    right: (usize, MorId),
}

/// Maps from a presented precat into a table, given by the index of each generator's image.
///
/// `fixed[i] = Some(x)` pins generator `i`. The visitor returns `false` to stop early.
/// Returns the number of maps visited.
pub fn presentation_maps(
    a: &Presentation,
    t: &Table,
    fixed: &[Option<usize>],
    limit: u64,
    mut visit: impl FnMut(&[usize]) -> bool,
) -> Result<u64> {
    if a.n() != t.n() {
        return Err(Error::LevelMismatch { expected: t.n(), found: a.n() });
    }
    let site = t.site();
    let g = a.generators().len();
    let levels = a
        .generators()
        .iter()
        .map(|o| site.object_id(o))
        .collect::<Result<Vec<_>>>()?;
    // Arcs are checked as soon as the later of their two generators is assigned.
    let mut by_last: Vec<Vec<Arc_>> = (0..g).map(|_| Vec::new()).collect();
    for r in a.relations() {
        site.object_id(&r.source)?;
        let arc = Arc_ {
            left: (r.left.gen, site.morphism_id(&r.left.map)?),
            right: (r.right.gen, site.morphism_id(&r.right.map)?),
        };
        by_last[r.left.gen.max(r.right.gen)].push(arc);
    }
    let mut assign = vec![usize::MAX; g];
    let mut nodes = 0u64;
    let mut found = 0u64;
    let mut stop = false;
    fn rec(
        i: usize,
        t: &Table,
        levels: &[ObjId],
        by_last: &[Vec<Arc_>],
        fixed: &[Option<usize>],
        assign: &mut Vec<usize>,
        nodes: &mut u64,
        limit: u64,
        found: &mut u64,
        stop: &mut bool,
        visit: &mut dyn FnMut(&[usize]) -> bool,
    ) -> Result<()> {
        if i == levels.len() {
            *found += 1;
            if !visit(assign) {
                *stop = true;
            }
            return Ok(());
        }
        let range: Vec<usize> = match fixed.get(i).copied().flatten() {
            Some(x) if x < t.size(levels[i]) => vec![x],
            Some(_) => Vec::new(),
            None => (0..t.size(levels[i])).collect(),
        };
        for x in range {
            *nodes += 1;
            if *nodes > limit {
                return Err(Error::SearchLimit(limit));
            }
            assign[i] = x;
            let ok = by_last[i].iter().all(|arc| {
                t.act(arc.left.1, assign[arc.left.0]) == t.act(arc.right.1, assign[arc.right.0])
            });
            if ok {
                rec(i + 1, t, levels, by_last, fixed, assign, nodes, limit, found, stop, visit)?;
                if *stop {
                    break;
                }
            }
        }
        assign[i] = usize::MAX;
        Ok(())
    }
    rec(0, t, &levels, &by_last, fixed, &mut assign, &mut nodes, limit, &mut found, &mut stop, &mut visit)?;
    Ok(found)
}

/// All maps from a presentation into a table, in canonical order.
pub fn all_presentation_maps(a: &Presentation, t: &Table, limit: u64) -> Result<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    presentation_maps(a, t, &[], limit, |m| {
        out.push(m.to_vec());
        true
    })?;
    Ok(out)
}

/// Options for table-to-table map search.
#[derive(Clone, Debug)]
pub struct MapSearch {
    pub injective: bool,
    pub limit: u64,
    /// Pre-assigned images, `fixed[level][x]`, or empty for none.
    pub fixed: Vec<Vec<Option<usize>>>,
}

impl Default for MapSearch {
    fn default() -> Self {
        MapSearch { injective: false, limit: DEFAULT_LIMIT, fixed: Vec::new() }
    }
}

struct TableSearch<'a> {
    src: &'a Table,
    dst: &'a Table,
    order: Vec<(ObjId, usize)>,
    assign: Vec<Vec<usize>>,
    used: Vec<Vec<bool>>,
    injective: bool,
    trail: Vec<(ObjId, usize)>,
    nodes: u64,
    limit: u64,
    found: u64,
    stop: bool,
}

impl TableSearch<'_> {
    fn set(&mut self, o: ObjId, x: usize, y: usize) -> bool {
        let cur = self.assign[o][x];
        if cur != usize::MAX {
            return cur == y;
        }
        if self.injective {
            if self.used[o][y] {
                return false;
            }
            self.used[o][y] = true;
        }
        self.assign[o][x] = y;
        self.trail.push((o, x));
        true
    }

    /// Assigns `x -> y` and everything it forces through the action.
    fn place(&mut self, o: ObjId, x: usize, y: usize) -> bool {
        if !self.set(o, x, y) {
            return false;
        }
        let site = self.src.site().clone();
        for &f in site.arrows_into(o) {
            let (s, _) = site.ends(f);
            if !self.set(s, self.src.act(f, x), self.dst.act(f, y)) {
                return false;
            }
        }
        true
    }

    fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let (o, x) = self.trail.pop().expect("non-empty trail");
            if self.injective {
                self.used[o][self.assign[o][x]] = false;
            }
            self.assign[o][x] = usize::MAX;
        }
    }

    fn run(&mut self, pos: usize, visit: &mut dyn FnMut(&TableMap) -> bool) -> Result<()> {
        let mut pos = pos;
        while pos < self.order.len() && self.assign[self.order[pos].0][self.order[pos].1] != usize::MAX {
            pos += 1;
        }
        if pos == self.order.len() {
            self.found += 1;
            if !visit(&TableMap { components: self.assign.clone() }) {
                self.stop = true;
            }
            return Ok(());
        }
        let (o, x) = self.order[pos];
        for y in 0..self.dst.size(o) {
            self.nodes += 1;
            if self.nodes > self.limit {
                return Err(Error::SearchLimit(self.limit));
            }
            let mark = self.trail.len();
            if self.place(o, x, y) {
                self.run(pos + 1, visit)?;
            }
            self.undo(mark);
            if self.stop {
                break;
            }
        }
        Ok(())
    }
}

/// Natural transformations `src -> dst`, visited in canonical order. Returns the number visited.
pub fn table_maps(
    src: &Table,
    dst: &Table,
    opts: &MapSearch,
    mut visit: impl FnMut(&TableMap) -> bool,
) -> Result<u64> {
    if *src.site() != *dst.site() {
        return Err(Error::Malformed("tables live on different sites".into()));
    }
    let site = src.site();
    let k = site.objects().len();
    if opts.injective && (0..k).any(|o| src.size(o) > dst.size(o)) {
        return Ok(0);
    }
    // Highest levels first: their images force everything below them.
    let mut levels: Vec<ObjId> = (0..k).collect();
    levels.sort_by_key(|&o| (core::cmp::Reverse(site.object(o).degree()), o));
    let order = levels.iter().flat_map(|&o| (0..src.size(o)).map(move |x| (o, x))).collect();
    let mut st = TableSearch {
        src,
        dst,
        order,
        assign: (0..k).map(|o| vec![usize::MAX; src.size(o)]).collect(),
        used: (0..k).map(|o| vec![false; dst.size(o)]).collect(),
        injective: opts.injective,
        trail: Vec::new(),
        nodes: 0,
        limit: opts.limit,
        found: 0,
        stop: false,
    };
    for (o, row) in opts.fixed.iter().enumerate() {
        for (x, y) in row.iter().enumerate() {
            if let Some(y) = *y {
                if y >= dst.size(o) || !st.place(o, x, y) {
                    return Ok(0);
                }
            }
        }
    }
    st.run(0, &mut visit)?;
    Ok(st.found)
}

pub fn count_table_maps(src: &Table, dst: &Table, limit: u64) -> Result<u64> {
    table_maps(src, dst, &MapSearch { limit, ..MapSearch::default() }, |_| true)
}

pub fn all_table_maps(src: &Table, dst: &Table, limit: u64) -> Result<Vec<TableMap>> {
    let mut out = Vec::new();
    table_maps(src, dst, &MapSearch { limit, ..MapSearch::default() }, |m| {
        out.push(m.clone());
        true
    })?;
    Ok(out)
}

/// A levelwise isomorphism, if one exists.
pub fn find_isomorphism(a: &Table, b: &Table, limit: u64) -> Result<Option<TableMap>> {
    if *a.site() != *b.site() || a.sizes() != b.sizes() {
        return Ok(None);
    }
    let mut out = None;
    table_maps(a, b, &MapSearch { injective: true, limit, fixed: Vec::new() }, |m| {
        out = Some(m.clone());
        false
    })?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theta::{Site, ThetaObject};
    use alloc::sync::Arc;

    #[test]
    fn yoneda_counts() {
        let site = Arc::new(Site::new(1, 3));
        let spine = crate::presentation::tests::spine2().tabulate_on(site.clone()).unwrap().table;
        for m in [&[1u8][..], &[2], &[]] {
            let obj = ThetaObject::new(1, m.to_vec()).unwrap();
            let h = crate::presentation::Presentation::representable(&obj);
            let maps = all_presentation_maps(&h, &spine, DEFAULT_LIMIT).unwrap();
            assert_eq!(maps.len(), spine.size_of(&obj).unwrap());
            let ht = h.tabulate_on(site.clone()).unwrap().table;
            assert_eq!(count_table_maps(&ht, &spine, DEFAULT_LIMIT).unwrap() as usize, maps.len());
        }
    }

    #[test]
    fn isomorphism_of_spine_with_itself() {
        let t = crate::presentation::tests::spine2().tabulate(3).unwrap().table;
        let iso = find_isomorphism(&t, &t, DEFAULT_LIMIT).unwrap().unwrap();
        assert!(iso.is_isomorphism(&t));
        // The spine has no automorphisms besides the identity.
        assert_eq!(iso, TableMap::identity(&t));
        let mut autos = 0;
        table_maps(&t, &t, &MapSearch { injective: true, ..MapSearch::default() }, |_| {
            autos += 1;
            true
        })
        .unwrap();
        assert_eq!(autos, 1);
    }

    #[test]
    fn limit_is_reported() {
        let t = crate::presentation::tests::spine2().tabulate(3).unwrap().table;
        assert_eq!(count_table_maps(&t, &t, 2), Err(Error::SearchLimit(2)));
    }
}
