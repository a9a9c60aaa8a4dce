//! Exact canonical forms by ordered partition refinement with backtracking,
//! in the nauty style: equitable refinement, target-cell individualization,
//! and pruning by discovered automorphisms. No hashing shortcuts — two
//! graphs get equal certificates if and only if they are isomorphic.
//!
//! Also houses the small embedding searches (induced and monomorphic) the
//! registry and profile machinery are built on.

use crate::graph::Graph;
use crate::{Error, Result};

pub const DEFAULT_CANON_BOUND: usize = 16;

/// Canonical certificate: `cert` is the upper-triangle bitstring of the
/// canonically relabeled graph, most significant bit first. `labeling[i]`
/// is the original vertex placed at canonical position `i`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalForm {
    pub n: usize,
    pub cert: Vec<u64>,
    pub labeling: Vec<usize>,
}

impl CanonicalForm {
    /// The canonical representative itself.
    pub fn representative(&self, g: &Graph) -> Graph {
        let mut pos = vec![0usize; self.n];
        for (i, &v) in self.labeling.iter().enumerate() {
            pos[v] = i;
        }
        g.permuted(&pos)
    }
}

pub fn canonical_form(g: &Graph) -> Result<CanonicalForm> {
    canonical_form_bounded(g, DEFAULT_CANON_BOUND)
}

pub fn canonical_form_bounded(g: &Graph, bound: usize) -> Result<CanonicalForm> {
    if g.v() > bound {
        return Err(Error::SizeBound {
            what: "canonical_form vertex count",
            got: g.v(),
            limit: bound,
        });
    }
    Ok(canon_search(g, initial_cells(g.v(), None)))
}

/// As [`canonical_form`] but isomorphisms must fix the root, which lands at
/// canonical position 0.
pub fn rooted_canonical_form(g: &Graph, root: usize) -> Result<CanonicalForm> {
    rooted_canonical_form_bounded(g, root, DEFAULT_CANON_BOUND)
}

pub fn rooted_canonical_form_bounded(
    g: &Graph,
    root: usize,
    bound: usize,
) -> Result<CanonicalForm> {
    if g.v() > bound {
        return Err(Error::SizeBound {
            what: "rooted_canonical_form vertex count",
            got: g.v(),
            limit: bound,
        });
    }
    if root >= g.v() {
        return Err(Error::VertexOutOfRange {
            vertex: root,
            n: g.v(),
        });
    }
    Ok(canon_search(g, initial_cells(g.v(), Some(root))))
}

fn initial_cells(n: usize, root: Option<usize>) -> Vec<Vec<usize>> {
    match root {
        None => {
            if n == 0 {
                vec![]
            } else {
                vec![(0..n).collect()]
            }
        }
        Some(r) => {
            let rest: Vec<usize> = (0..n).filter(|&v| v != r).collect();
            if rest.is_empty() {
                vec![vec![r]]
            } else {
                vec![vec![r], rest]
            }
        }
    }
}

struct CanonState<'a> {
    g: &'a Graph,
    best: Option<(Vec<u64>, Vec<usize>)>,
    auts: Vec<Vec<usize>>,
}

fn canon_search(g: &Graph, cells: Vec<Vec<usize>>) -> CanonicalForm {
    let mut st = CanonState {
        g,
        best: None,
        auts: Vec::new(),
    };
    let mut prefix = Vec::new();
    descend(&mut st, cells, &mut prefix);
    let (cert, labeling) = st.best.expect("search visits at least one leaf");
    CanonicalForm {
        n: g.v(),
        cert,
        labeling,
    }
}

fn descend(st: &mut CanonState, mut cells: Vec<Vec<usize>>, prefix: &mut Vec<usize>) {
    refine(st.g, &mut cells);
    let target = cells.iter().position(|c| c.len() > 1);
    match target {
        None => {
            let labeling: Vec<usize> = cells.iter().map(|c| c[0]).collect();
            let cert = cert_of(st.g, &labeling);
            match &st.best {
                None => st.best = Some((cert, labeling)),
                Some((bc, bl)) => {
                    if cert < *bc {
                        st.best = Some((cert, labeling));
                    } else if cert == *bc {
                        // Equal leaves yield an automorphism: bl[i] -> labeling[i].
                        let mut sigma = vec![0usize; st.g.v()];
                        for (i, &v) in bl.iter().enumerate() {
                            sigma[v] = labeling[i];
                        }
                        debug_assert!(is_automorphism(st.g, &sigma));
                        if st.auts.len() < 64 {
                            st.auts.push(sigma);
                        }
                    }
                }
            }
        }
        Some(t) => {
            let cell = cells[t].clone();
            let mut tried: Vec<usize> = Vec::new();
            for &v in &cell {
                let pruned = st.auts.iter().any(|sigma| {
                    prefix.iter().all(|&p| sigma[p] == p) && tried.contains(&sigma[v])
                });
                if pruned {
                    tried.push(v);
                    continue;
                }
                let mut branch = Vec::with_capacity(cells.len() + 1);
                for (i, c) in cells.iter().enumerate() {
                    if i == t {
                        branch.push(vec![v]);
                        branch.push(c.iter().copied().filter(|&w| w != v).collect());
                    } else {
                        branch.push(c.clone());
                    }
                }
                prefix.push(v);
                descend(st, branch, prefix);
                prefix.pop();
                tried.push(v);
            }
        }
    }
}

/// Equitable refinement: split cells by neighbor counts toward every cell
/// until stable. Sub-cells are ordered by count ascending, which keeps the
/// whole procedure deterministic.
fn refine(g: &Graph, cells: &mut Vec<Vec<usize>>) {
    loop {
        let mut changed = false;
        's: for s in 0..cells.len() {
            let mut in_splitter = vec![false; g.v()];
            for &v in &cells[s] {
                in_splitter[v] = true;
            }
            for c in 0..cells.len() {
                if cells[c].len() <= 1 {
                    continue;
                }
                let counts: Vec<usize> = cells[c]
                    .iter()
                    .map(|&v| g.neighbors(v).filter(|&w| in_splitter[w]).count())
                    .collect();
                if counts.windows(2).all(|w| w[0] == w[1]) {
                    continue;
                }
                let mut groups: Vec<(usize, Vec<usize>)> = Vec::new();
                for (&v, &k) in cells[c].iter().zip(&counts) {
                    match groups.iter_mut().find(|(gk, _)| *gk == k) {
                        Some((_, vs)) => vs.push(v),
                        None => groups.push((k, vec![v])),
                    }
                }
                groups.sort_by_key(|(k, _)| *k);
                let tail = cells.split_off(c + 1);
                cells.pop();
                cells.extend(groups.into_iter().map(|(_, vs)| vs));
                cells.extend(tail);
                changed = true;
                break 's;
            }
        }
        if !changed {
            return;
        }
    }
}

fn cert_of(g: &Graph, labeling: &[usize]) -> Vec<u64> {
    let n = labeling.len();
    let nbits = n * (n - 1) / 2;
    let mut words = vec![0u64; nbits.div_ceil(64).max(1)];
    let mut idx = 0;
    for i in 0..n {
        for j in i + 1..n {
            if g.has_edge(labeling[i], labeling[j]) {
                words[idx / 64] |= 1u64 << (63 - idx % 64);
            }
            idx += 1;
        }
    }
    words
}

fn is_automorphism(g: &Graph, sigma: &[usize]) -> bool {
    for u in 0..g.v() {
        for v in u + 1..g.v() {
            if g.has_edge(u, v) != g.has_edge(sigma[u], sigma[v]) {
                return false;
            }
        }
    }
    true
}

/// All automorphisms of a small graph by exhaustive backtracking, as maps
/// `vertex -> image`. Intended for `v(g) <= 10`.
pub fn automorphism_group(g: &Graph) -> Vec<Vec<usize>> {
    induced_embeddings(g, g, &[], None)
}

/// Vertex orbits under the full automorphism group; `orbit[v]` is the least
/// vertex in the orbit of `v`.
pub fn automorphism_orbits(g: &Graph) -> Vec<usize> {
    let mut orbit: Vec<usize> = (0..g.v()).collect();
    fn find(orbit: &mut Vec<usize>, v: usize) -> usize {
        if orbit[v] != v {
            let r = find(orbit, orbit[v]);
            orbit[v] = r;
        }
        orbit[v]
    }
    for sigma in automorphism_group(g) {
        for v in 0..g.v() {
            let (a, b) = (find(&mut orbit, v), find(&mut orbit, sigma[v]));
            let r = a.min(b);
            orbit[a] = r;
            orbit[b] = r;
        }
    }
    (0..g.v()).map(|v| find(&mut orbit, v)).collect()
}

/// Enumerates injective maps `pattern -> host` preserving adjacency exactly
/// (induced embeddings), with some pattern vertices pinned by `fixed`.
/// Results are in lexicographic order of the assignment vector; `cap` stops
/// the search early when only existence or a few witnesses are needed.
pub fn induced_embeddings(
    pattern: &Graph,
    host: &Graph,
    fixed: &[(usize, usize)],
    cap: Option<usize>,
) -> Vec<Vec<usize>> {
    embeddings(pattern, host, fixed, cap, true, &[])
}

/// Enumerates injective maps `pattern -> host` where every pattern edge maps
/// to a host edge (monomorphisms); extra host edges are allowed.
/// `must_cover` lists host vertices every image has to contain.
pub fn monomorphisms(
    pattern: &Graph,
    host: &Graph,
    fixed: &[(usize, usize)],
    cap: Option<usize>,
    must_cover: &[usize],
) -> Vec<Vec<usize>> {
    embeddings(pattern, host, fixed, cap, false, must_cover)
}

fn embeddings(
    pattern: &Graph,
    host: &Graph,
    fixed: &[(usize, usize)],
    cap: Option<usize>,
    induced: bool,
    must_cover: &[usize],
) -> Vec<Vec<usize>> {
    let np = pattern.v();
    let mut assign = vec![usize::MAX; np];
    let mut used = vec![false; host.v()];
    let mut covered = vec![false; host.v()];
    let mut need: Vec<usize> = Vec::new();
    for &v in must_cover {
        if !covered[v] {
            covered[v] = true;
            need.push(v);
        }
    }
    for &(p, h) in fixed {
        assert!(p < np && h < host.v());
        assign[p] = h;
        used[h] = true;
    }
    let mut out = Vec::new();
    fn rec(
        pattern: &Graph,
        host: &Graph,
        assign: &mut Vec<usize>,
        used: &mut Vec<bool>,
        covered: &[bool],
        need_left: usize,
        i: usize,
        induced: bool,
        cap: Option<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if cap.is_some_and(|c| out.len() >= c) {
            return;
        }
        let np = pattern.v();
        if i == np {
            out.push(assign.clone());
            return;
        }
        if assign[i] != usize::MAX {
            rec(
                pattern,
                host,
                assign,
                used,
                covered,
                need_left,
                i + 1,
                induced,
                cap,
                out,
            );
            return;
        }
        // Cover pruning: every still-uncovered required vertex needs a slot.
        let slots = (i..np).filter(|&j| assign[j] == usize::MAX).count();
        if need_left > slots {
            return;
        }
        'cand: for w in 0..host.v() {
            if used[w] {
                continue;
            }
            if host.degree(w) < pattern.degree(i) {
                continue;
            }
            for j in 0..np {
                if assign[j] == usize::MAX || j == i {
                    continue;
                }
                let pe = pattern.has_edge(i, j);
                let he = host.has_edge(w, assign[j]);
                if (pe && !he) || (induced && he && !pe) {
                    continue 'cand;
                }
            }
            assign[i] = w;
            used[w] = true;
            let nl = need_left - (covered[w] as usize);
            rec(
                pattern,
                host,
                assign,
                used,
                covered,
                nl,
                i + 1,
                induced,
                cap,
                out,
            );
            assign[i] = usize::MAX;
            used[w] = false;
        }
    }
    let need_left = need.iter().filter(|&&v| !used[v]).count();
    rec(
        pattern,
        host,
        &mut assign,
        &mut used,
        &covered,
        need_left,
        0,
        induced,
        cap,
        &mut out,
    );
    // Covering is only checked at completion; filter non-covering images.
    if !need.is_empty() {
        out.retain(|a| need.iter().all(|v| a.contains(v)));
    }
    out
}
