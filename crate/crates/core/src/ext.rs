//! Exact rational density calculus over nested pairs: `f_alpha`, the
//! safe/rigid/neutral classification, maximal subgraph density by brute
//! force and by parametric min-cut, rigid composition, and the safety
//! transfer predicate for neutral-over-safe stacks.
//!
//! Everything here compares exact integers of the form `q*v - p*e`; no
//! floating point touches a classification decision.

use crate::graph::{Graph, RootedPair};
use crate::rational::Rat;
use crate::{Error, Result};

pub const DEFAULT_CLASSIFY_BOUND: usize = 12;
pub const RHO_BRUTE_BOUND: usize = 25;

/// Outcome of classifying a nested pair at a fixed alpha. `None` carries a
/// violating intermediate subgraph (as vertices of `G`) for the class the
/// sign of `f_alpha(G, H)` pointed at.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PairClass {
    Safe,
    Rigid,
    Neutral,
    None { witness: Vec<usize> },
}

/// `f_alpha(G, H) = v(G, H) - alpha * e(G, H)`.
pub fn f_alpha(pair: &RootedPair, alpha: Rat) -> Rat {
    Rat::integer(pair.v_gh() as i64) - alpha * Rat::integer(pair.e_gh() as i64)
}

/// `f(G) = v(G) - alpha * e(G)`, the whole-graph weight.
pub fn f_graph(g: &Graph, alpha: Rat) -> Rat {
    Rat::integer(g.v() as i64) - alpha * Rat::integer(g.e() as i64)
}

/// Precomputed local view of the extension vertices `V(G, H)`: adjacency
/// among them as masks, and per-vertex edge counts into `H`.
struct ExtLocal {
    /// e(S, H) for S = H plus the mask's vertices.
    e_table: Vec<u32>,
}

impl ExtLocal {
    fn new(pair: &RootedPair) -> ExtLocal {
        let ext = pair.ext_vertices();
        let d = ext.len();
        let g = pair.graph();
        let mut adj = vec![0u64; d];
        let mut deg_h = vec![0u32; d];
        for (i, &u) in ext.iter().enumerate() {
            for (j, &v) in ext.iter().enumerate() {
                if i != j && g.has_edge(u, v) {
                    adj[i] |= 1 << j;
                }
            }
            deg_h[i] = g.neighbors(u).filter(|&w| pair.contains_h(w)).count() as u32;
        }
        let mut e_table = vec![0u32; 1usize << d];
        for m in 1usize..(1 << d) {
            let lsb = m.trailing_zeros() as usize;
            let rest = m & (m - 1);
            e_table[m] = e_table[rest] + deg_h[lsb] + (adj[lsb] & rest as u64).count_ones();
        }
        ExtLocal { e_table }
    }

    /// Sign of `f_alpha(H + mask, H)` as `q*v - p*e`.
    fn f_sign(&self, mask: usize, p: i64, q: i64) -> i64 {
        q * (mask.count_ones() as i64) - p * (self.e_table[mask] as i64)
    }
}

/// Classifies `(G, H)` at `alpha` by enumerating every intermediate
/// subgraph `S` with `H ⊆ S ⊆ G` (induced on `H` plus a subset of the
/// extension vertices; non-induced intermediates are never tighter).
pub fn classify_pair(pair: &RootedPair, alpha: Rat) -> Result<PairClass> {
    classify_pair_bounded(pair, alpha, DEFAULT_CLASSIFY_BOUND)
}

pub fn classify_pair_bounded(pair: &RootedPair, alpha: Rat, bound: usize) -> Result<PairClass> {
    let d = pair.v_gh();
    if d == 0 {
        return Err(Error::DegeneratePair);
    }
    if d > bound {
        return Err(Error::SizeBound {
            what: "classify_pair v(G,H)",
            got: d,
            limit: bound,
        });
    }
    let local = ExtLocal::new(pair);
    let (p, q) = (alpha.numerator(), alpha.denominator());
    let full = (1usize << d) - 1;
    let ext = pair.ext_vertices();
    let witness = |mask: usize| -> Vec<usize> {
        let mut s: Vec<usize> = pair.h_vertices().to_vec();
        for i in 0..d {
            if mask >> i & 1 == 1 {
                s.push(ext[i]);
            }
        }
        s.sort_unstable();
        s
    };
    let f_gh = local.f_sign(full, p, q);
    if f_gh > 0 {
        // Safe candidate: every H ⊂ S ⊆ G must have f(S, H) > 0.
        for m in 1..=full {
            if local.f_sign(m, p, q) <= 0 {
                return Ok(PairClass::None {
                    witness: witness(m),
                });
            }
        }
        Ok(PairClass::Safe)
    } else if f_gh < 0 {
        // Rigid candidate: every H ⊆ S ⊂ G must have f(G, S) < 0.
        for m in 0..full {
            if f_gh - local.f_sign(m, p, q) >= 0 {
                return Ok(PairClass::None {
                    witness: witness(m),
                });
            }
        }
        Ok(PairClass::Rigid)
    } else {
        // Neutral candidate: every H ⊂ S ⊂ G must have f(S, H) > 0.
        for m in 1..full {
            if local.f_sign(m, p, q) <= 0 {
                return Ok(PairClass::None {
                    witness: witness(m),
                });
            }
        }
        Ok(PairClass::Neutral)
    }
}

/// Classification of the composed pair `(G', H)` for `H ⊆ mid ⊆ V(G')`.
/// This is the tested form of the composition statement — rigid over rigid
/// stays rigid, safe over safe stays safe — not a shortcut around it.
pub fn compose_rigid(
    g_prime: &Graph,
    mid: &[usize],
    inner: &[usize],
    alpha: Rat,
) -> Result<PairClass> {
    let mid_set: std::collections::BTreeSet<usize> = mid.iter().copied().collect();
    for &v in inner {
        if !mid_set.contains(&v) {
            return Err(Error::NotNested(format!(
                "inner vertex {v} not in the middle subgraph"
            )));
        }
    }
    for &v in mid {
        if v >= g_prime.v() {
            return Err(Error::VertexOutOfRange {
                vertex: v,
                n: g_prime.v(),
            });
        }
    }
    let pair = RootedPair::new(g_prime.clone(), inner)?;
    classify_pair(&pair, alpha)
}

/// Exact `rho_max(G) = max over nonempty H ⊆ G of e(H)/v(H)` by subset
/// enumeration. The maximum over all subgraphs is attained on an induced one.
pub fn rho_max_bruteforce(g: &Graph) -> Result<Rat> {
    let n = g.v();
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    if n > RHO_BRUTE_BOUND {
        return Err(Error::SizeBound {
            what: "rho_max_bruteforce vertex count",
            got: n,
            limit: RHO_BRUTE_BOUND,
        });
    }
    let mut adj = vec![0u64; n];
    for u in 0..n {
        for v in g.neighbors(u) {
            adj[u] |= 1 << v;
        }
    }
    let (mut best_e, mut best_v) = (0u64, 1u64);
    if n <= 20 {
        let mut table = vec![0u32; 1usize << n];
        for m in 1usize..(1 << n) {
            let lsb = m.trailing_zeros() as usize;
            let rest = m & (m - 1);
            let e = table[rest] + (adj[lsb] & rest as u64).count_ones();
            table[m] = e;
            let v = m.count_ones() as u64;
            if (e as u64) * best_v > best_e * v {
                best_e = e as u64;
                best_v = v;
            }
        }
    } else {
        for m in 1u64..(1 << n) {
            let mut e = 0u64;
            let mut rest = m;
            while rest != 0 {
                let v = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                e += (adj[v] & rest).count_ones() as u64;
            }
            let v = m.count_ones() as u64;
            if e * best_v > best_e * v {
                best_e = e;
                best_v = v;
            }
        }
    }
    Ok(Rat::new(best_e as i64, best_v as i64))
}

/// Exact maximal density by iterated min-cut: starting from the whole
/// graph's density, each round either certifies that no denser subgraph
/// exists or extracts one from the source side of the cut and tightens the
/// threshold to its density. Thresholds strictly increase through the
/// finite candidate set `{e/v}`, so this terminates, and it agrees with
/// the brute force on every input; this is the route that scales past
/// subset enumeration.
pub fn rho_max_flow(g: &Graph) -> Result<Rat> {
    let n = g.v();
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    let edges = g.edges();
    let m = edges.len();
    if m == 0 {
        return Ok(Rat::ZERO);
    }
    let mut t = Rat::new(m as i64, n as i64);
    loop {
        match denser_subgraph(g, &edges, t) {
            None => return Ok(t),
            Some(s) => {
                let (sub, _) = g.induced_subgraph(&s)?;
                let t_next = Rat::new(sub.e() as i64, s.len() as i64);
                debug_assert!(t_next > t);
                t = t_next;
            }
        }
    }
}

/// Finds a nonempty `S` with `e(S)/|S| > a/b`, if any. Goldberg
/// construction: source -> edge nodes (capacity b), edge -> endpoints
/// (infinite), vertex -> sink (capacity a); the min cut drops below `b*m`
/// exactly when such an `S` exists, and the source side of the cut carries
/// a witness.
fn denser_subgraph(g: &Graph, edges: &[(usize, usize)], t: Rat) -> Option<Vec<usize>> {
    let (a, b) = (t.numerator(), t.denominator());
    debug_assert!(a >= 0);
    let n = g.v();
    let m = edges.len();
    let mut net = Dinic::new(2 + m + n);
    let (src, sink) = (0, 1);
    let inf = i64::MAX / 4;
    for (i, &(u, v)) in edges.iter().enumerate() {
        net.add_edge(src, 2 + i, b);
        net.add_edge(2 + i, 2 + m + u, inf);
        net.add_edge(2 + i, 2 + m + v, inf);
    }
    for v in 0..n {
        net.add_edge(2 + m + v, sink, a);
    }
    let cut = net.max_flow(src, sink);
    if cut >= b * m as i64 {
        return None;
    }
    let reach = net.source_side(src);
    let s: Vec<usize> = (0..n).filter(|&v| reach[2 + m + v]).collect();
    debug_assert!(!s.is_empty());
    Some(s)
}

/// Dinic's max-flow on a small network.
struct Dinic {
    to: Vec<usize>,
    cap: Vec<i64>,
    head: Vec<Vec<usize>>,
    level: Vec<i32>,
    iter: Vec<usize>,
}

impl Dinic {
    fn new(n: usize) -> Dinic {
        Dinic {
            to: Vec::new(),
            cap: Vec::new(),
            head: vec![Vec::new(); n],
            level: vec![0; n],
            iter: vec![0; n],
        }
    }

    fn add_edge(&mut self, u: usize, v: usize, c: i64) {
        self.head[u].push(self.to.len());
        self.to.push(v);
        self.cap.push(c);
        self.head[v].push(self.to.len());
        self.to.push(u);
        self.cap.push(0);
    }

    fn bfs(&mut self, s: usize, t: usize) -> bool {
        self.level.fill(-1);
        let mut q = std::collections::VecDeque::new();
        self.level[s] = 0;
        q.push_back(s);
        while let Some(u) = q.pop_front() {
            for &e in &self.head[u] {
                let v = self.to[e];
                if self.cap[e] > 0 && self.level[v] < 0 {
                    self.level[v] = self.level[u] + 1;
                    q.push_back(v);
                }
            }
        }
        self.level[t] >= 0
    }

    fn dfs(&mut self, u: usize, t: usize, f: i64) -> i64 {
        if u == t {
            return f;
        }
        while self.iter[u] < self.head[u].len() {
            let e = self.head[u][self.iter[u]];
            let v = self.to[e];
            if self.cap[e] > 0 && self.level[v] == self.level[u] + 1 {
                let d = self.dfs(v, t, f.min(self.cap[e]));
                if d > 0 {
                    self.cap[e] -= d;
                    self.cap[e ^ 1] += d;
                    return d;
                }
            }
            self.iter[u] += 1;
        }
        0
    }

    fn max_flow(&mut self, s: usize, t: usize) -> i64 {
        let mut flow = 0;
        while self.bfs(s, t) {
            self.iter.fill(0);
            loop {
                let f = self.dfs(s, t, i64::MAX / 2);
                if f == 0 {
                    break;
                }
                flow += f;
            }
        }
        flow
    }

    /// Nodes reachable from `s` in the residual network of a finished flow.
    fn source_side(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.head.len()];
        let mut stack = vec![s];
        seen[s] = true;
        while let Some(u) = stack.pop() {
            for &e in &self.head[u] {
                let v = self.to[e];
                if self.cap[e] > 0 && !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen
    }
}

/// The tested safety-transfer statement: `(G, U)` alpha-neutral, `(U, W)`
/// alpha-safe (or `W` empty with `rho_max(U) < 1/alpha`), and at least one
/// edge between `V(G) \ V(U)` and `V(U) \ V(W)`, force `(G, W)` alpha-safe.
///
/// Hypothesis violations and conclusion failures are reported as distinct
/// errors; a conclusion failure would be an implementation bug.
pub fn safety_transfer_check(
    g: &Graph,
    u_vertices: &[usize],
    w_vertices: &[usize],
    alpha: Rat,
) -> Result<bool> {
    let u_set: std::collections::BTreeSet<usize> = u_vertices.iter().copied().collect();
    let w_set: std::collections::BTreeSet<usize> = w_vertices.iter().copied().collect();
    if !w_set.is_subset(&u_set) || w_set == u_set {
        return Err(Error::Hypothesis("need W strictly inside U".into()));
    }
    for &v in &u_set {
        if v >= g.v() {
            return Err(Error::VertexOutOfRange {
                vertex: v,
                n: g.v(),
            });
        }
    }
    if u_set.len() == g.v() {
        return Err(Error::Hypothesis("need U strictly inside G".into()));
    }
    let gu = RootedPair::new(g.clone(), u_vertices)?;
    match classify_pair(&gu, alpha)? {
        PairClass::Neutral => {}
        other => {
            return Err(Error::Hypothesis(format!(
                "(G, U) must be alpha-neutral, got {other:?}"
            )))
        }
    }
    let (u_graph, u_map) = g.induced_subgraph(&u_set.iter().copied().collect::<Vec<_>>())?;
    if w_set.is_empty() {
        let rho = rho_max_bruteforce(&u_graph)?;
        if rho >= alpha.recip() {
            return Err(Error::Hypothesis(format!(
                "W empty requires rho_max(U) < 1/alpha, got {rho}"
            )));
        }
    } else {
        let w_local: Vec<usize> = u_map
            .iter()
            .enumerate()
            .filter(|(_, v)| w_set.contains(v))
            .map(|(i, _)| i)
            .collect();
        let uw = RootedPair::new(u_graph.clone(), &w_local)?;
        match classify_pair(&uw, alpha)? {
            PairClass::Safe => {}
            other => {
                return Err(Error::Hypothesis(format!(
                    "(U, W) must be alpha-safe, got {other:?}"
                )))
            }
        }
    }
    let has_bridge = g.edges().iter().any(|&(x, y)| {
        let x_out = !u_set.contains(&x);
        let y_out = !u_set.contains(&y);
        let x_mid = u_set.contains(&x) && !w_set.contains(&x);
        let y_mid = u_set.contains(&y) && !w_set.contains(&y);
        (x_out && y_mid) || (y_out && x_mid)
    });
    if !has_bridge {
        return Err(Error::Hypothesis(
            "need an edge between V(G) \\ V(U) and V(U) \\ V(W)".into(),
        ));
    }
    let gw = RootedPair::new(g.clone(), w_vertices)?;
    match classify_pair(&gw, alpha)? {
        PairClass::Safe => Ok(true),
        other => Err(Error::ConclusionFailed(format!(
            "(G, W) classified {other:?} despite the hypotheses"
        ))),
    }
}
