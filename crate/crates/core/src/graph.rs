//! Finite simple graphs on dense integer vertices with per-vertex bitset
//! adjacency, nested (rooted) pairs, and labeled extension checks.
//!
//! Vertices are `0..n-1`. Adjacency rows are multi-word bitsets, so all the
//! subset-heavy operations in the calculus reduce to word operations; graphs
//! with tens of thousands of vertices are still fine for the samplers.

use crate::{Error, Result};

const WORD: usize = 64;

#[inline]
fn words_for(n: usize) -> usize {
    n.div_ceil(WORD)
}

/// A finite simple graph: symmetric, irreflexive adjacency over `0..n-1`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    words: usize,
    bits: Vec<u64>,
}

impl Graph {
    pub fn empty(n: usize) -> Graph {
        let words = words_for(n).max(1);
        Graph {
            n,
            words,
            bits: vec![0; words * n.max(1)],
        }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Graph {
        let mut g = Graph::empty(n);
        for &(u, v) in edges {
            g.add_edge(u, v);
        }
        g
    }

    pub fn complete(n: usize) -> Graph {
        let mut g = Graph::empty(n);
        for u in 0..n {
            for v in u + 1..n {
                g.add_edge(u, v);
            }
        }
        g
    }

    pub fn path(n: usize) -> Graph {
        let mut g = Graph::empty(n);
        for u in 1..n {
            g.add_edge(u - 1, u);
        }
        g
    }

    pub fn cycle(n: usize) -> Graph {
        let mut g = Graph::path(n);
        if n >= 3 {
            g.add_edge(n - 1, 0);
        }
        g
    }

    /// Star with center 0 and `n - 1` leaves.
    pub fn star(n: usize) -> Graph {
        let mut g = Graph::empty(n);
        for v in 1..n {
            g.add_edge(0, v);
        }
        g
    }

    #[inline]
    pub fn v(&self) -> usize {
        self.n
    }

    pub fn e(&self) -> usize {
        self.bits
            .iter()
            .map(|w| w.count_ones() as usize)
            .sum::<usize>()
            / 2
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        assert!(u < self.n && v < self.n, "vertex out of range");
        assert!(u != v, "self-loop");
        self.bits[u * self.words + v / WORD] |= 1 << (v % WORD);
        self.bits[v * self.words + u / WORD] |= 1 << (u % WORD);
    }

    pub fn remove_edge(&mut self, u: usize, v: usize) {
        assert!(u < self.n && v < self.n && u != v);
        self.bits[u * self.words + v / WORD] &= !(1 << (v % WORD));
        self.bits[v * self.words + u / WORD] &= !(1 << (u % WORD));
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u != v && self.bits[u * self.words + v / WORD] >> (v % WORD) & 1 == 1
    }

    #[inline]
    pub fn row(&self, v: usize) -> &[u64] {
        &self.bits[v * self.words..(v + 1) * self.words]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.row(v).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        BitIter::new(self.row(v))
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for u in 0..self.n {
            for v in self.neighbors(u) {
                if v > u {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// Adjacency row of `v` restricted to the first 64 vertices. Only valid
    /// for graphs with at most 64 vertices; the small combinatorial kernels
    /// use this fast path.
    #[inline]
    pub fn row64(&self, v: usize) -> u64 {
        debug_assert!(self.n <= WORD);
        self.bits[v * self.words]
    }

    /// Number of common neighbors of `u` and `v`.
    pub fn common_neighbors(&self, u: usize, v: usize) -> usize {
        self.row(u)
            .iter()
            .zip(self.row(v))
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    /// Induced subgraph on the (distinct, in-range) vertices of `s`, plus the
    /// stable index mapping: vertex `i` of the result is `s[i]` in `self`.
    pub fn induced_subgraph(&self, s: &[usize]) -> Result<(Graph, Vec<usize>)> {
        let mut seen = vec![false; self.n];
        for &v in s {
            if v >= self.n {
                return Err(Error::VertexOutOfRange {
                    vertex: v,
                    n: self.n,
                });
            }
            if seen[v] {
                return Err(Error::DuplicateVertex(v));
            }
            seen[v] = true;
        }
        let mut g = Graph::empty(s.len());
        for (i, &u) in s.iter().enumerate() {
            for (j, &v) in s.iter().enumerate().skip(i + 1) {
                if self.has_edge(u, v) {
                    g.add_edge(i, j);
                }
            }
        }
        Ok((g, s.to_vec()))
    }

    /// Relabels vertices by `perm`: vertex `v` becomes `perm[v]`.
    pub fn permuted(&self, perm: &[usize]) -> Graph {
        assert_eq!(perm.len(), self.n);
        let mut g = Graph::empty(self.n);
        for (u, v) in self.edges() {
            g.add_edge(perm[u], perm[v]);
        }
        g
    }

    /// Disjoint union; vertices of `other` are shifted by `self.v()`.
    pub fn disjoint_union(&self, other: &Graph) -> Graph {
        let mut g = Graph::empty(self.n + other.n);
        for (u, v) in self.edges() {
            g.add_edge(u, v);
        }
        for (u, v) in other.edges() {
            g.add_edge(u + self.n, v + self.n);
        }
        g
    }

    /// True if the subgraph induced on `s` is connected (vacuously for |s| <= 1).
    pub fn connected_on(&self, s: &[usize]) -> bool {
        if s.len() <= 1 {
            return true;
        }
        let mut in_s = vec![false; self.n];
        for &v in s {
            in_s[v] = true;
        }
        let mut seen = vec![false; self.n];
        let mut stack = vec![s[0]];
        seen[s[0]] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for v in self.neighbors(u) {
                if in_s[v] && !seen[v] {
                    seen[v] = true;
                    count += 1;
                    stack.push(v);
                }
            }
        }
        count == s.len()
    }

    /// DOT rendering for visualization.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph g {\n");
        for v in 0..self.n {
            out.push_str(&format!("  {v};\n"));
        }
        for (u, v) in self.edges() {
            out.push_str(&format!("  {u} -- {v};\n"));
        }
        out.push('}');
        out
    }
}

impl std::fmt::Debug for Graph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Graph(n={}, e={}, {:?})", self.n, self.e(), self.edges())
    }
}

/// Iterator over set bit positions of a word slice.
pub struct BitIter<'a> {
    words: &'a [u64],
    idx: usize,
    cur: u64,
}

impl<'a> BitIter<'a> {
    pub fn new(words: &'a [u64]) -> Self {
        BitIter {
            words,
            idx: 0,
            cur: if words.is_empty() { 0 } else { words[0] },
        }
    }
}

impl Iterator for BitIter<'_> {
    type Item = usize;
    fn next(&mut self) -> Option<usize> {
        while self.cur == 0 {
            self.idx += 1;
            if self.idx >= self.words.len() {
                return None;
            }
            self.cur = self.words[self.idx];
        }
        let b = self.cur.trailing_zeros() as usize;
        self.cur &= self.cur - 1;
        Some(self.idx * WORD + b)
    }
}

/// A nested pair `(G, H)`: `H` is the induced subgraph of `g` on `h_vertices`.
///
/// Houses the pair quantities `V(G,H)`, `E(G,H)`, `v(G,H)`, `e(G,H)`.
#[derive(Clone, Debug)]
pub struct RootedPair {
    g: Graph,
    h_vertices: Vec<usize>,
    in_h: Vec<bool>,
}

impl RootedPair {
    /// `h_vertices` may be empty; it must be a duplicate-free subset of `V(g)`.
    pub fn new(g: Graph, h_vertices: &[usize]) -> Result<RootedPair> {
        let mut in_h = vec![false; g.v()];
        for &v in h_vertices {
            if v >= g.v() {
                return Err(Error::VertexOutOfRange {
                    vertex: v,
                    n: g.v(),
                });
            }
            if in_h[v] {
                return Err(Error::DuplicateVertex(v));
            }
            in_h[v] = true;
        }
        let mut h: Vec<usize> = h_vertices.to_vec();
        h.sort_unstable();
        Ok(RootedPair {
            g,
            h_vertices: h,
            in_h,
        })
    }

    pub fn graph(&self) -> &Graph {
        &self.g
    }

    pub fn h_vertices(&self) -> &[usize] {
        &self.h_vertices
    }

    pub fn contains_h(&self, v: usize) -> bool {
        self.in_h[v]
    }

    /// The vertices of `V(G, H) = V(G) \ V(H)`, ascending.
    pub fn ext_vertices(&self) -> Vec<usize> {
        (0..self.g.v()).filter(|&v| !self.in_h[v]).collect()
    }

    /// `v(G, H) = v(G) - v(H)`.
    pub fn v_gh(&self) -> usize {
        self.g.v() - self.h_vertices.len()
    }

    /// `e(G, H) = e(G) - e(H)`: edges with at least one endpoint outside `H`.
    pub fn e_gh(&self) -> usize {
        let mut count = 0;
        for (u, v) in self.g.edges() {
            if !(self.in_h[u] && self.in_h[v]) {
                count += 1;
            }
        }
        count
    }
}

/// A pair `(G, H)` with an explicit vertex ordering `x_1..x_l` whose first
/// `k` entries enumerate `V(H)`. Extension checks are defined relative to
/// such orderings.
#[derive(Clone, Debug)]
pub struct LabeledPair {
    pub graph: Graph,
    pub order: Vec<usize>,
    pub k: usize,
}

impl LabeledPair {
    pub fn new(graph: Graph, order: Vec<usize>, k: usize) -> Result<LabeledPair> {
        if k > order.len() {
            return Err(Error::BadLabeling(format!(
                "k = {k} exceeds ordering length {}",
                order.len()
            )));
        }
        if order.len() != graph.v() {
            return Err(Error::BadLabeling(format!(
                "ordering length {} != v(G) = {}",
                order.len(),
                graph.v()
            )));
        }
        let mut seen = vec![false; graph.v()];
        for &v in &order {
            if v >= graph.v() {
                return Err(Error::VertexOutOfRange {
                    vertex: v,
                    n: graph.v(),
                });
            }
            if seen[v] {
                return Err(Error::DuplicateVertex(v));
            }
            seen[v] = true;
        }
        Ok(LabeledPair { graph, order, k })
    }

    pub fn added(&self) -> usize {
        self.order.len() - self.k
    }

    /// Template edge between ordering positions `i` and `j` (0-based), i.e.
    /// membership in `E(G) \ E(H)`. Pairs inside `H` never count.
    pub fn template_edge(&self, i: usize, j: usize) -> bool {
        if i < self.k && j < self.k {
            return false;
        }
        self.graph.has_edge(self.order[i], self.order[j])
    }
}

/// An injective vertex map between two graphs, with the extension-isomorphism
/// checks it supports.
#[derive(Clone, Debug)]
pub struct VertexMap {
    map: Vec<usize>,
}

impl VertexMap {
    pub fn new(from_n: usize, to_n: usize, map: Vec<usize>) -> Result<VertexMap> {
        if map.len() != from_n {
            return Err(Error::LengthMismatch(map.len(), from_n));
        }
        let mut seen = vec![false; to_n];
        for &v in &map {
            if v >= to_n {
                return Err(Error::VertexOutOfRange { vertex: v, n: to_n });
            }
            if seen[v] {
                return Err(Error::DuplicateVertex(v));
            }
            seen[v] = true;
        }
        Ok(VertexMap { map })
    }

    pub fn apply(&self, v: usize) -> usize {
        self.map[v]
    }

    /// Checks (does not assume) that the map sends the labeled pair onto the
    /// candidate as a strict pair isomorphism.
    pub fn is_strict_pair_isomorphism(&self, pair: &LabeledPair, host: &Graph) -> bool {
        let image: Vec<usize> = pair.order.iter().map(|&v| self.map[v]).collect();
        is_extension_orders(pair, host, &image, true, false).unwrap_or(false)
    }
}

/// Extension test between a labeled pair `(G, H)` and a candidate ordering in
/// `host`: positions `0..k` are the (possibly repeated, when `generalised`)
/// images of `V(H)`, the rest the images of `V(G, H)`.
///
/// Non-strict asks every template edge to be present; strict asks the edge
/// pattern on pairs touching the added vertices to match exactly. Repeated
/// root images are resolved by merging the template pattern, so a physical
/// pair is required exactly when some preimage index pair is a template edge.
pub fn is_extension_orders(
    pair: &LabeledPair,
    host: &Graph,
    candidate_order: &[usize],
    strict: bool,
    generalised: bool,
) -> Result<bool> {
    let l = pair.order.len();
    let k = pair.k;
    if candidate_order.len() != l {
        return Err(Error::LengthMismatch(candidate_order.len(), l));
    }
    for &v in candidate_order {
        if v >= host.v() {
            return Err(Error::VertexOutOfRange {
                vertex: v,
                n: host.v(),
            });
        }
    }
    // Added images are always distinct; root images too unless generalised.
    for i in 0..l {
        for j in i + 1..l {
            let same = candidate_order[i] == candidate_order[j];
            if same && (j >= k || !generalised) {
                return Err(Error::BadLabeling(format!(
                    "candidate images at positions {i} and {j} coincide"
                )));
            }
        }
    }
    for i in k..l {
        for j in 0..l {
            if i == j {
                continue;
            }
            let (p, q) = (candidate_order[i], candidate_order[j]);
            if p == q {
                continue;
            }
            // Merge the template pattern over preimages of the physical pair.
            let mut required = false;
            for a in 0..l {
                for b in 0..l {
                    if a == b || (a < k && b < k) {
                        continue;
                    }
                    let (pa, pb) = (candidate_order[a], candidate_order[b]);
                    if (pa == p && pb == q) || (pa == q && pb == p) {
                        required |= pair.template_edge(a, b);
                    }
                }
            }
            let present = host.has_edge(p, q);
            if required && !present {
                return Ok(false);
            }
            if strict && present && !required {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Two-sided form: both the template and the candidate given as labeled
/// pairs over their own graphs.
pub fn is_extension(
    pair: &LabeledPair,
    candidate: &LabeledPair,
    strict: bool,
    generalised: bool,
) -> Result<bool> {
    if candidate.k != pair.k {
        return Err(Error::LengthMismatch(candidate.k, pair.k));
    }
    is_extension_orders(
        pair,
        &candidate.graph,
        &candidate.order,
        strict,
        generalised,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn handshake() {
        let g = Graph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (1, 3)]);
        let total: usize = (0..5).map(|v| g.degree(v)).sum();
        assert_eq!(total, 2 * g.e());
        assert_eq!(g.e(), 6);
    }

    #[test]
    fn induced_subgraph_examples() {
        // complete graph restricted to two vertices is an edge
        let (h, map) = Graph::complete(3).induced_subgraph(&[0, 1]).unwrap();
        assert_eq!((h.v(), h.e()), (2, 1));
        assert_eq!(map, vec![0, 1]);
        // identity on the full vertex set
        let g = Graph::path(4);
        let (h, _) = g.induced_subgraph(&[0, 1, 2, 3]).unwrap();
        assert_eq!(h, g);
        // endpoints of P3 induce an empty pair
        let p3 = Graph::from_edges(3, &[(0, 1), (1, 2)]);
        let (h, _) = p3.induced_subgraph(&[0, 2]).unwrap();
        assert_eq!((h.v(), h.e()), (2, 0));
        // errors
        assert!(matches!(
            p3.induced_subgraph(&[0, 7]),
            Err(Error::VertexOutOfRange { .. })
        ));
        assert!(matches!(
            p3.induced_subgraph(&[0, 0]),
            Err(Error::DuplicateVertex(0))
        ));
    }

    #[test]
    fn induced_idempotent() {
        let g = Graph::from_edges(6, &[(0, 2), (2, 4), (4, 5), (1, 3)]);
        let (h, _) = g.induced_subgraph(&[1, 2, 3, 4]).unwrap();
        let (h2, _) = h.induced_subgraph(&[0, 1, 2, 3]).unwrap();
        assert_eq!(h, h2);
    }

    #[test]
    fn rooted_pair_counts() {
        // tick: two roots, one added vertex adjacent to both
        let g = Graph::from_edges(3, &[(0, 2), (1, 2)]);
        let p = RootedPair::new(g, &[0, 1]).unwrap();
        assert_eq!(p.v_gh(), 1);
        assert_eq!(p.e_gh(), 2);
        assert_eq!(p.ext_vertices(), vec![2]);
    }

    #[test]
    fn extension_strict_vs_loose() {
        // tick pattern over a three-vertex root set: the added vertex is
        // prescribed adjacent to roots 0 and 1 only
        let tick =
            LabeledPair::new(Graph::from_edges(4, &[(0, 3), (1, 3)]), vec![0, 1, 2, 3], 3).unwrap();
        // identity copy is a strict extension
        assert!(is_extension_orders(&tick, &tick.graph, &[0, 1, 2, 3], true, false).unwrap());
        // candidate whose new vertex has an extra edge to the third root
        let host = Graph::from_edges(4, &[(0, 3), (1, 3), (2, 3)]);
        assert!(!is_extension_orders(&tick, &host, &[0, 1, 2, 3], true, false).unwrap());
        // the one-directional check still accepts it
        assert!(is_extension_orders(&tick, &host, &[0, 1, 2, 3], false, false).unwrap());
    }

    #[test]
    fn generalised_root_merging() {
        // tick with both roots mapped to the same vertex: required pattern is
        // a single edge to the merged root
        let tick =
            LabeledPair::new(Graph::from_edges(3, &[(0, 2), (1, 2)]), vec![0, 1, 2], 2).unwrap();
        let host = Graph::from_edges(2, &[(0, 1)]);
        assert!(is_extension_orders(&tick, &host, &[0, 0, 1], true, true).unwrap());
        // non-generalised rejects repeated roots outright
        assert!(is_extension_orders(&tick, &host, &[0, 0, 1], true, false).is_err());
        // length mismatch is an error
        assert!(matches!(
            is_extension_orders(&tick, &host, &[0, 1], true, false),
            Err(Error::LengthMismatch(2, 3))
        ));
    }

    #[test]
    fn vertex_map_checks() {
        let tick =
            LabeledPair::new(Graph::from_edges(3, &[(0, 2), (1, 2)]), vec![0, 1, 2], 2).unwrap();
        let host = Graph::from_edges(4, &[(1, 3), (2, 3)]);
        let map = VertexMap::new(3, 4, vec![1, 2, 3]).unwrap();
        assert!(map.is_strict_pair_isomorphism(&tick, &host));
        assert_eq!(map.apply(2), 3);
        // an image clashing with an extra edge fails the strict check
        let host2 = Graph::from_edges(4, &[(1, 3), (2, 3), (0, 3)]);
        let map2 = VertexMap::new(3, 4, vec![1, 2, 3]).unwrap();
        assert!(map2.is_strict_pair_isomorphism(&tick, &host2));
        let map3 = VertexMap::new(3, 4, vec![0, 1, 3]).unwrap();
        assert!(!map3.is_strict_pair_isomorphism(
            &LabeledPair::new(Graph::from_edges(3, &[(0, 2)]), vec![0, 1, 2], 2).unwrap(),
            &host2
        ));
        // non-injective maps are rejected
        assert!(VertexMap::new(3, 4, vec![1, 1, 3]).is_err());
    }

    #[test]
    fn connectivity_and_dot() {
        let g = Graph::from_edges(4, &[(0, 1), (2, 3)]);
        assert!(g.connected_on(&[0, 1]));
        assert!(!g.connected_on(&[0, 1, 2]));
        assert!(g.to_dot().contains("0 -- 1"));
    }
}
