//! Graphviz export of 1-skeleta and presented groupoids.

use std::fmt::Write;

use precat_core::fincat::GroupoidPresentation;
use precat_core::table::Table;
use precat_core::theta::ThetaObject;

/// Objects and nondegenerate arrows of a table at `n >= 1`.
pub fn table_dot(t: &Table, name: &str) -> String {
    let site = t.site();
    let mut out = format!("digraph \"{name}\" {{\n");
    for x in 0..t.size(0) {
        let _ = writeln!(out, "  x{x};");
    }
    if let Ok(e) = ThetaObject::new(t.n(), vec![1]).and_then(|o| site.object_id(&o)) {
        let degen = site.hom(e, 0)[0];
        let degenerate: Vec<usize> = (0..t.size(0)).map(|x| t.act(degen, x)).collect();
        for a in 0..t.size(e) {
            if degenerate.contains(&a) {
                continue;
            }
            let (s, tg) = t.endpoints(e, a);
            let _ = writeln!(out, "  x{s} -> x{tg} [label=\"{a}\"];");
        }
    }
    out.push_str("}\n");
    out
}

/// One arrow per inverse pair of generators, labelled by the smaller index.
pub fn groupoid_dot(g: &GroupoidPresentation, labels: &[String], name: &str) -> String {
    let mut out = format!("digraph \"{name}\" {{\n");
    for x in 0..g.objects {
        let label = labels.get(x).cloned().unwrap_or_else(|| format!("{x}"));
        let _ = writeln!(out, "  o{x} [label=\"{label}\"];");
    }
    for (i, &(s, t)) in g.gens.iter().enumerate() {
        if g.inverse[i] > i {
            let _ = writeln!(out, "  o{s} -> o{t} [label=\"g{i}\"];");
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use precat_core::category::ExplicitCategory;
    use precat_core::theta::Site;
    use std::sync::Arc;

    #[test]
    fn chain_has_three_nondegenerate_arrows() {
        let t = ExplicitCategory::chain(2).nerve(Arc::new(Site::new(1, 2)));
        let dot = table_dot(&t, "chain");
        assert_eq!(dot.matches("->").count(), 3);
    }
}
