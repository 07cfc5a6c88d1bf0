use std::collections::BTreeMap;

use super::iso::{canonical_form, DEFAULT_ISO_BUDGET};
use super::SimpleGraph;

/// One representative per isomorphism class of simple graphs on `n`
/// vertices, in canonical labelling, sorted by canonical certificate.
///
/// Built by adding a vertex to every graph on `n - 1` vertices in every
/// possible way; intended for `n <= 8`.
pub fn all_graphs(n: usize) -> Vec<SimpleGraph> {
    let mut level = vec![SimpleGraph::new(0)];
    for m in 1..=n {
        let mut seen = BTreeMap::new();
        for g in &level {
            for mask in 0u64..(1 << (m - 1)) {
                let mut h = SimpleGraph::new(m);
                for (u, v) in g.edges() {
                    h.connect(u, v);
                }
                for u in 0..m - 1 {
                    if mask >> u & 1 == 1 {
                        h.connect(u, m - 1);
                    }
                }
                let cf = canonical_form(&h.to_looped(), DEFAULT_ISO_BUDGET).expect("small graph");
                let key = (cf.n(), cf.key().1.to_vec());
                seen.entry(key).or_insert_with(|| h.permute(cf.labelling()));
            }
        }
        level = seen.into_values().collect();
    }
    level
}

/// All graphs on `0..=n_max` vertices, smallest order first.
pub fn all_graphs_up_to(n_max: usize) -> Vec<SimpleGraph> {
    (0..=n_max).flat_map(all_graphs).collect()
}
