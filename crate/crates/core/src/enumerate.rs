//! Exhaustive enumeration of small graphs up to isomorphism, one canonical
//! representative per class. Classes on `k` vertices are generated by
//! extending the `k-1`-vertex representatives with every possible
//! neighborhood of a new vertex and deduplicating canonically.

use std::collections::BTreeMap;

use crate::canon::canonical_form_bounded;
use crate::graph::Graph;
use crate::{Error, Result};

pub const ENUM_BOUND: usize = 8;

/// All graphs on exactly `n >= 1` vertices, up to isomorphism, in
/// certificate order.
pub fn graphs_exactly(n: usize) -> Result<Vec<Graph>> {
    if n == 0 || n > ENUM_BOUND {
        return Err(Error::SizeBound {
            what: "graph enumeration vertex count",
            got: n,
            limit: ENUM_BOUND,
        });
    }
    let mut reps = vec![Graph::empty(1)];
    for k in 2..=n {
        let mut seen: BTreeMap<Vec<u64>, Graph> = BTreeMap::new();
        for base in &reps {
            for mask in 0u64..(1 << (k - 1)) {
                let mut g = Graph::empty(k);
                for (u, v) in base.edges() {
                    g.add_edge(u, v);
                }
                for v in 0..k - 1 {
                    if mask >> v & 1 == 1 {
                        g.add_edge(v, k - 1);
                    }
                }
                let cf = canonical_form_bounded(&g, ENUM_BOUND)?;
                seen.entry(cf.cert.clone())
                    .or_insert_with(|| cf.representative(&g));
            }
        }
        reps = seen.into_values().collect();
    }
    Ok(reps)
}

/// All graphs with `1..=n` vertices, up to isomorphism.
pub fn graphs_up_to(n: usize) -> Result<Vec<Graph>> {
    let mut out = Vec::new();
    for k in 1..=n {
        out.extend(graphs_exactly(k)?);
    }
    Ok(out)
}
