//! The layered family of dangerous rooted neighbourhood graphs: the
//! gamma-bad predicate, desk-scale inductive enumeration of the layers, the
//! per-member property report, and the glued-member closure check.
//!
//! Everything is rooted at a common vertex `z`, stored as vertex 0 of every
//! member. Enumeration deduplicates by root-fixing canonical form and is
//! deterministic for fixed parameters; full-scale bounds are accepted
//! in configuration but refuse to run without an explicit override.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::canon::rooted_canonical_form_bounded;
use crate::ext::{classify_pair_bounded, f_graph, rho_max_bruteforce, rho_max_flow, PairClass};
use crate::graph::{Graph, LabeledPair, RootedPair};
use crate::rational::Rat;
use crate::{graph6, Error, Result};

/// The alpha all registry machinery lives at.
pub fn alpha_g() -> Rat {
    Rat::new(3, 5)
}

/// The density ceiling `5/3`.
pub fn density_cap_default() -> Rat {
    Rat::new(5, 3)
}

pub const FULL_V0_BOUND: usize = 10;
pub const FULL_BAD_BOUNDS: [usize; 4] = [15, 30, 60, 60];
pub const MAX_LAYERS: usize = 4;

const CANON_BOUND: usize = 16;
const CLASSIFY_BOUND: usize = 20;

/// Enumeration bounds. `v0_bound` caps `v(G, H)` in layer 0; `bad_bounds[i]`
/// caps `v(K, T)` of an `(i+1)`-bad pair; `ext_bound` additionally caps the
/// candidate extension size the enumerator explores per layer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GSetParams {
    pub v0_bound: usize,
    pub bad_bounds: [usize; 4],
    pub ext_bound: usize,
    pub layers: usize,
    pub density_cap: Rat,
    pub allow_infeasible: bool,
}

impl Default for GSetParams {
    fn default() -> GSetParams {
        GSetParams {
            v0_bound: 4,
            bad_bounds: FULL_BAD_BOUNDS,
            ext_bound: 3,
            layers: 2,
            density_cap: density_cap_default(),
            allow_infeasible: false,
        }
    }
}

impl GSetParams {
    /// Full-scale configuration; enumeration refuses it without the
    /// explicit override flag.
    pub fn full_scale() -> GSetParams {
        GSetParams {
            v0_bound: FULL_V0_BOUND,
            bad_bounds: FULL_BAD_BOUNDS,
            ext_bound: 60,
            layers: MAX_LAYERS,
            density_cap: density_cap_default(),
            allow_infeasible: false,
        }
    }

    /// Cap on `v(K, T)` of a gamma-bad pair.
    pub fn bad_bound(&self, gamma: usize) -> usize {
        assert!(gamma >= 1);
        self.bad_bounds[gamma.min(4) - 1]
    }

    fn check_positive(&self) -> Result<()> {
        if self.v0_bound == 0 || self.ext_bound == 0 || self.bad_bounds.contains(&0) {
            return Err(Error::BadParams("bounds must be positive".into()));
        }
        Ok(())
    }

    /// Rough work estimate: candidate masks the enumerator would visit.
    /// Layer-0 cost is `2^C(v0+1, 2)`; per-layer extension cost explodes in
    /// the slot count. The full-scale bounds (10/15/30/60, graphs up to 176
    /// vertices) are astronomically beyond this budget.
    fn feasibility(&self) -> Result<()> {
        if self.allow_infeasible {
            return Ok(());
        }
        let g0_bits = (self.v0_bound + 1) * self.v0_bound / 2;
        let ext = self.ext_bound.min(
            (1..=self.layers.max(1))
                .map(|g| self.bad_bound(g))
                .max()
                .unwrap_or(self.ext_bound),
        );
        if g0_bits > 21 || ext > 4 {
            return Err(Error::Infeasible(format!(
                "layer-0 needs ~2^{g0_bits} candidate masks and per-layer extensions of \
                 up to {ext} vertices; rerun with allow_infeasible=true if you mean it"
            )));
        }
        Ok(())
    }

    /// Parses the line-oriented `key=value` config format.
    pub fn from_config(text: &str) -> Result<GSetParams> {
        let mut p = GSetParams::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Format(format!("line {}: expected key=value", lineno + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            let parse_usize = |v: &str| -> Result<usize> {
                v.parse()
                    .map_err(|_| Error::Format(format!("line {}: bad integer", lineno + 1)))
            };
            match key {
                "v0_bound" => p.v0_bound = parse_usize(value)?,
                "ext_bound" => p.ext_bound = parse_usize(value)?,
                "layers" => p.layers = parse_usize(value)?,
                "bad_bound_1" => p.bad_bounds[0] = parse_usize(value)?,
                "bad_bound_2" => p.bad_bounds[1] = parse_usize(value)?,
                "bad_bound_3" => p.bad_bounds[2] = parse_usize(value)?,
                "bad_bound_4" => p.bad_bounds[3] = parse_usize(value)?,
                "density_cap" => p.density_cap = Rat::parse(value)?,
                "allow_infeasible" => {
                    p.allow_infeasible = value == "true" || value == "1";
                }
                other => {
                    return Err(Error::Format(format!(
                        "line {}: unknown key `{other}`",
                        lineno + 1
                    )))
                }
            }
        }
        Ok(p)
    }

    pub fn to_config(&self) -> String {
        format!(
            "v0_bound={}\next_bound={}\nlayers={}\nbad_bound_1={}\nbad_bound_2={}\n\
             bad_bound_3={}\nbad_bound_4={}\ndensity_cap={}\nallow_infeasible={}\n",
            self.v0_bound,
            self.ext_bound,
            self.layers,
            self.bad_bounds[0],
            self.bad_bounds[1],
            self.bad_bounds[2],
            self.bad_bounds[3],
            self.density_cap,
            self.allow_infeasible
        )
    }
}

/// The gamma-bad predicate: `(K, T)` is 3/5-rigid, within the size bound for
/// gamma, and every extension vertex reaches `V(T) \ {z}` inside `K - z`.
pub fn is_gamma_bad(
    pair: &RootedPair,
    z: usize,
    gamma: usize,
    params: &GSetParams,
) -> Result<bool> {
    if gamma == 0 {
        return Err(Error::BadParams("gamma must be positive".into()));
    }
    if !pair.contains_h(z) {
        return Err(Error::RootNotInT(z));
    }
    // (b) size bound
    if pair.v_gh() > params.bad_bound(gamma) {
        return Ok(false);
    }
    // (c) v(T) >= 2 and the path condition in K - z
    if pair.h_vertices().len() < 2 {
        return Ok(false);
    }
    if !path_condition(pair.graph(), pair.h_vertices(), z) {
        return Ok(false);
    }
    // (a) 3/5-rigid
    Ok(matches!(
        classify_pair_bounded(pair, alpha_g(), CLASSIFY_BOUND)?,
        PairClass::Rigid
    ))
}

/// Every vertex outside `t_vertices` reaches `t_vertices \ {z}` in `g - z`.
fn path_condition(g: &Graph, t_vertices: &[usize], z: usize) -> bool {
    let mut target = vec![false; g.v()];
    let mut seen = vec![false; g.v()];
    let mut stack = Vec::new();
    for &v in t_vertices {
        if v != z {
            target[v] = true;
            seen[v] = true;
            stack.push(v);
        }
    }
    while let Some(u) = stack.pop() {
        for w in g.neighbors(u) {
            if w != z && !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    let in_t: Vec<bool> = {
        let mut m = vec![false; g.v()];
        for &v in t_vertices {
            m[v] = true;
        }
        m
    };
    (0..g.v()).all(|v| in_t[v] || seen[v])
}

/// One registry member: a rooted graph with `z = 0`, stored as its rooted
/// canonical representative.
#[derive(Clone, Debug)]
pub struct Member {
    pub graph: Graph,
    pub layer: usize,
    pub cert: Vec<u64>,
    pub parent: Option<usize>,
    pub f_value: Rat,
    pub rho_max: Rat,
}

/// The enumerated family, layers 0..=layers, one canonical representative
/// per rooted-isomorphism class.
#[derive(Clone, Debug)]
pub struct GSetRegistry {
    pub params: GSetParams,
    pub members: Vec<Member>,
}

impl GSetRegistry {
    pub fn kappa(&self) -> usize {
        self.members.len()
    }

    pub fn layer_members(&self, layer: usize) -> Vec<usize> {
        (0..self.members.len())
            .filter(|&i| self.members[i].layer == layer)
            .collect()
    }

    pub fn find_by_cert(&self, cert: &[u64], n: usize) -> Option<usize> {
        self.members
            .iter()
            .position(|m| m.graph.v() == n && m.cert == cert)
    }

    /// Membership test for an arbitrary rooted graph.
    pub fn contains_rooted(&self, g: &Graph, root: usize) -> Result<Option<usize>> {
        let cf = rooted_canonical_form_bounded(g, root, CANON_BOUND)?;
        Ok(self.find_by_cert(&cf.cert, g.v()))
    }

    /// Provenance chain of member `i`: layer-0 ancestor first, `i` last.
    pub fn provenance_chain(&self, i: usize) -> Vec<usize> {
        let mut chain = vec![i];
        let mut cur = i;
        while let Some(p) = self.members[cur].parent {
            chain.push(p);
            cur = p;
        }
        chain.reverse();
        chain
    }
}

/// All pair slots among `0..n`, new-vertex slots last. Returns (slot list,
/// index of first slot touching a new vertex).
fn extension_slots(v_old: usize, b: usize) -> Vec<(usize, usize)> {
    let mut slots = Vec::new();
    for i in 0..b {
        for j in 0..v_old {
            slots.push((j, v_old + i));
        }
    }
    for i in 0..b {
        for j in i + 1..b {
            slots.push((v_old + i, v_old + j));
        }
    }
    slots
}

/// Iterates bitmasks of fixed popcount (Gosper's hack), ascending.
struct FixedPopcount {
    cur: u64,
    limit: u64,
    done: bool,
}

impl FixedPopcount {
    fn new(bits: usize, k: usize) -> FixedPopcount {
        assert!(bits < 63);
        if k == 0 || k > bits {
            return FixedPopcount {
                cur: 0,
                limit: 0,
                done: k != 0,
            };
        }
        FixedPopcount {
            cur: (1u64 << k) - 1,
            limit: 1u64 << bits,
            done: false,
        }
    }
}

impl Iterator for FixedPopcount {
    type Item = u64;
    fn next(&mut self) -> Option<u64> {
        if self.done || self.cur >= self.limit {
            return None;
        }
        let out = self.cur;
        if self.cur == 0 {
            self.done = true;
            return Some(0);
        }
        let c = self.cur & self.cur.wrapping_neg();
        let r = self.cur + c;
        if c == 0 || r == 0 {
            self.done = true;
        } else {
            self.cur = (((r ^ self.cur) >> 2) / c) | r;
        }
        Some(out)
    }
}

/// Layer 0: one representative per rooted-isomorphism class of graphs `G`
/// over the singleton root with `v(G, H) <= v0_bound`, `(G, H)` 3/5-neutral
/// or 3/5-rigid, `rho_max(G) < 5/3`, and `G - z` connected.
pub fn enumerate_g0(params: &GSetParams) -> Result<Vec<Member>> {
    params.check_positive()?;
    params.feasibility()?;
    let cap = params.density_cap;
    let mut seen: BTreeMap<(usize, Vec<u64>), Member> = BTreeMap::new();
    for t in 1..=params.v0_bound {
        let n = t + 1;
        let slots = {
            let mut s = Vec::new();
            for i in 0..n {
                for j in i + 1..n {
                    s.push((i, j));
                }
            }
            s
        };
        // f(G, H) <= 0 needs e >= ceil(5 t / 3); rho(G) < cap caps e(G)
        let e_lo = (5 * t).div_ceil(3);
        let e_hi_density = {
            // largest e with e/n < cap
            let mut e = slots.len();
            while e > 0 && Rat::new(e as i64, n as i64) >= cap {
                e -= 1;
            }
            e
        };
        for e in e_lo..=e_hi_density.min(slots.len()) {
            for mask in FixedPopcount::new(slots.len(), e) {
                let mut g = Graph::empty(n);
                for (s, &(u, v)) in slots.iter().enumerate() {
                    if mask >> s & 1 == 1 {
                        g.add_edge(u, v);
                    }
                }
                let rest: Vec<usize> = (1..n).collect();
                if !g.connected_on(&rest) {
                    continue;
                }
                if rho_max_bruteforce(&g)? >= cap {
                    continue;
                }
                let pair = RootedPair::new(g.clone(), &[0])?;
                let class = classify_pair_bounded(&pair, alpha_g(), CLASSIFY_BOUND)?;
                if !matches!(class, PairClass::Neutral | PairClass::Rigid) {
                    continue;
                }
                let cf = rooted_canonical_form_bounded(&g, 0, CANON_BOUND)?;
                seen.entry((n, cf.cert.clone())).or_insert_with(|| {
                    let canon_graph = cf.representative(&g);
                    Member {
                        f_value: f_graph(&canon_graph, alpha_g()),
                        rho_max: rho_max_bruteforce(&canon_graph).unwrap(),
                        graph: canon_graph,
                        layer: 0,
                        cert: cf.cert,
                        parent: None,
                    }
                });
            }
        }
    }
    Ok(seen.into_values().collect())
}

/// Full layered enumeration up to `layers.min(params.layers)`.
pub fn enumerate_g(params: &GSetParams, layers: usize) -> Result<GSetRegistry> {
    let layers = layers.min(params.layers);
    let mut members = enumerate_g0(params)?;
    let mut known: BTreeMap<(usize, Vec<u64>), usize> = members
        .iter()
        .enumerate()
        .map(|(i, m)| ((m.graph.v(), m.cert.clone()), i))
        .collect();
    for gamma in 1..=layers {
        let parents = (0..members.len())
            .filter(|&i| members[i].layer == gamma - 1)
            .collect::<Vec<_>>();
        let mut layer_new: BTreeMap<(usize, Vec<u64>), (Graph, usize)> = BTreeMap::new();
        for &pi in &parents {
            let base = members[pi].graph.clone();
            let v_old = base.v();
            let b_max = params.ext_bound.min(params.bad_bound(gamma));
            for b in 1..=b_max {
                let n = v_old + b;
                if n > CANON_BOUND {
                    break;
                }
                let slots = extension_slots(v_old, b);
                if slots.len() >= 63 {
                    return Err(Error::Infeasible(format!(
                        "{} extension slots at layer {gamma}",
                        slots.len()
                    )));
                }
                let e_old = base.e();
                // rigidity needs f(K, T) < 0: e_ext > 5b/3
                let e_lo = 5 * b / 3 + 1;
                // density cap limits total edges
                let e_hi = {
                    let mut e = slots.len();
                    while e > 0 && Rat::new((e_old + e) as i64, n as i64) >= params.density_cap {
                        e -= 1;
                    }
                    e
                };
                for e in e_lo..=e_hi {
                    'mask: for mask in FixedPopcount::new(slots.len(), e) {
                        let mut g = base.clone();
                        let mut grown = Graph::empty(n);
                        for (u, v) in g.edges() {
                            grown.add_edge(u, v);
                        }
                        g = grown;
                        let mut new_deg = vec![0usize; b];
                        for (s, &(u, v)) in slots.iter().enumerate() {
                            if mask >> s & 1 == 1 {
                                g.add_edge(u, v);
                                if u >= v_old {
                                    new_deg[u - v_old] += 1;
                                }
                                if v >= v_old {
                                    new_deg[v - v_old] += 1;
                                }
                            }
                        }
                        // every new vertex needs degree >= 2 for rigidity
                        if new_deg.iter().any(|&d| d < 2) {
                            continue 'mask;
                        }
                        let t_vertices: Vec<usize> = (0..v_old).collect();
                        if !path_condition(&g, &t_vertices, 0) {
                            continue 'mask;
                        }
                        let pair = RootedPair::new(g.clone(), &t_vertices)?;
                        if !is_gamma_bad(&pair, 0, gamma, params)? {
                            continue 'mask;
                        }
                        if rho_max_bruteforce(&g)? >= params.density_cap {
                            continue 'mask;
                        }
                        let cf = rooted_canonical_form_bounded(&g, 0, CANON_BOUND)?;
                        let key = (n, cf.cert.clone());
                        if known.contains_key(&key) {
                            continue 'mask;
                        }
                        layer_new
                            .entry(key)
                            .or_insert_with(|| (cf.representative(&g), pi));
                    }
                }
            }
        }
        for ((n, cert), (graph, parent)) in layer_new {
            let idx = members.len();
            members.push(Member {
                f_value: f_graph(&graph, alpha_g()),
                rho_max: rho_max_bruteforce(&graph)?,
                graph,
                layer: gamma,
                cert: cert.clone(),
                parent: Some(parent),
            });
            known.insert((n, cert), idx);
        }
    }
    Ok(GSetRegistry {
        params: params.clone(),
        members,
    })
}

/// One row of the property report.
#[derive(Clone, Debug)]
pub struct PropertyCheck {
    pub member: usize,
    pub property: u8,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default)]
pub struct GPropertiesReport {
    pub checks: Vec<PropertyCheck>,
}

impl GPropertiesReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> Vec<&PropertyCheck> {
        self.checks.iter().filter(|c| !c.pass).collect()
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let _ = writeln!(
                out,
                "member={} property={} {} {}",
                c.member,
                c.property,
                if c.pass { "pass" } else { "FAIL" },
                c.detail
            );
        }
        out
    }
}

/// Per-member verification of the provable registry properties: the
/// whole-graph weight bound `f(G) <= 1 - i/5`, the density ceiling, the 176
/// vertex cap, rigidity over the root for layers >= 1, and connectivity
/// after root deletion. Any failure is an implementation bug.
pub fn verify_g_properties(reg: &GSetRegistry) -> Result<GPropertiesReport> {
    let mut report = GPropertiesReport::default();
    for (i, m) in reg.members.iter().enumerate() {
        let f = f_graph(&m.graph, alpha_g());
        let bound = Rat::ONE - Rat::new(m.layer as i64, 5);
        report.checks.push(PropertyCheck {
            member: i,
            property: 1,
            pass: f <= bound,
            detail: format!("f={f} bound={bound}"),
        });
        let rho = rho_max_bruteforce(&m.graph)?;
        report.checks.push(PropertyCheck {
            member: i,
            property: 2,
            pass: rho < reg.params.density_cap,
            detail: format!("rho={rho}"),
        });
        report.checks.push(PropertyCheck {
            member: i,
            property: 3,
            pass: m.graph.v() <= 176,
            detail: format!("v={}", m.graph.v()),
        });
        if m.layer >= 1 {
            let pair = RootedPair::new(m.graph.clone(), &[0])?;
            let class = classify_pair_bounded(&pair, alpha_g(), CLASSIFY_BOUND)?;
            report.checks.push(PropertyCheck {
                member: i,
                property: 4,
                pass: class == PairClass::Rigid,
                detail: format!("class={class:?}"),
            });
        }
        let rest: Vec<usize> = (1..m.graph.v()).collect();
        report.checks.push(PropertyCheck {
            member: i,
            property: 5,
            pass: m.graph.connected_on(&rest),
            detail: String::new(),
        });
    }
    Ok(report)
}

/// Re-validates a member's provenance chain: the layer-0 ancestor is
/// neutral-or-rigid over the root and each step is an i-bad pair.
pub fn verify_provenance(reg: &GSetRegistry, i: usize) -> Result<bool> {
    let chain = reg.provenance_chain(i);
    let first = &reg.members[chain[0]];
    if first.layer != 0 {
        return Ok(false);
    }
    let pair0 = RootedPair::new(first.graph.clone(), &[0])?;
    if !matches!(
        classify_pair_bounded(&pair0, alpha_g(), CLASSIFY_BOUND)?,
        PairClass::Neutral | PairClass::Rigid
    ) {
        return Ok(false);
    }
    for w in chain.windows(2) {
        let (parent, child) = (&reg.members[w[0]], &reg.members[w[1]]);
        // re-embed the parent inside the child as a rooted induced copy
        let embeds =
            crate::canon::induced_embeddings(&parent.graph, &child.graph, &[(0, 0)], Some(1));
        let embed = match embeds.first() {
            Some(e) => e.clone(),
            None => return Ok(false),
        };
        let pair = RootedPair::new(child.graph.clone(), &embed)?;
        if !is_gamma_bad(&pair, 0, child.layer, &reg.params)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Glued-member closure check: two members merged at the root,
/// extended by a rigid bridge pattern whose template roots map onto
/// `attach` (vertices of the merged graph), and verifies that the result is
/// either dense (`rho_max >= 5/3`) or lands back in the registry.
pub fn property6_check(
    reg: &GSetRegistry,
    i1: usize,
    i2: usize,
    bridge: &LabeledPair,
    attach: &[usize],
) -> Result<bool> {
    let g1 = &reg.members[i1].graph;
    let g2 = &reg.members[i2].graph;
    let added = bridge.added();
    if added == 0 || added > 5 {
        return Err(Error::SizeBound {
            what: "bridge extension size",
            got: added,
            limit: 5,
        });
    }
    if attach.len() != bridge.k {
        return Err(Error::ArityMismatch {
            expected: bridge.k,
            got: attach.len(),
        });
    }
    // bridge pair must be 3/5-rigid
    let bridge_pair = RootedPair::new(bridge.graph.clone(), &bridge.order[..bridge.k])?;
    if !matches!(
        classify_pair_bounded(&bridge_pair, alpha_g(), CLASSIFY_BOUND)?,
        PairClass::Rigid
    ) {
        return Err(Error::Hypothesis("bridge pair is not 3/5-rigid".into()));
    }
    // merged graph: g1 as-is, g2 shifted with its root identified with 0
    let v1 = g1.v();
    let merged_n = v1 + g2.v() - 1;
    let map2 = |v: usize| if v == 0 { 0 } else { v1 + v - 1 };
    let mut k_graph = Graph::empty(merged_n + added);
    for (u, v) in g1.edges() {
        k_graph.add_edge(u, v);
    }
    for (u, v) in g2.edges() {
        k_graph.add_edge(map2(u), map2(v));
    }
    for &a in attach {
        if a >= merged_n {
            return Err(Error::VertexOutOfRange {
                vertex: a,
                n: merged_n,
            });
        }
    }
    // wire the bridge template: position i -> attach[i] for roots, fresh
    // vertices for the rest
    let mut phys = Vec::with_capacity(bridge.order.len());
    phys.extend_from_slice(attach);
    for i in 0..added {
        phys.push(merged_n + i);
    }
    for i in bridge.k..bridge.order.len() {
        for j in 0..bridge.order.len() {
            if i != j && bridge.template_edge(i, j) && phys[i] != phys[j] {
                if !k_graph.has_edge(phys[i], phys[j]) {
                    k_graph.add_edge(phys[i], phys[j]);
                }
            }
        }
    }
    // path condition: every bridge vertex reaches both sides minus z
    let side1: Vec<usize> = (1..v1).collect();
    let side2: Vec<usize> = (v1..merged_n).collect();
    for b in 0..added {
        let from = merged_n + b;
        if !reaches_avoiding(&k_graph, from, &side1, 0)
            || !reaches_avoiding(&k_graph, from, &side2, 0)
        {
            return Err(Error::PathCondition(format!(
                "bridge vertex {from} misses one side in K - z"
            )));
        }
    }
    // the disjunction
    let rho = if k_graph.v() <= 20 {
        rho_max_bruteforce(&k_graph)?
    } else {
        rho_max_flow(&k_graph)?
    };
    if rho >= reg.params.density_cap {
        return Ok(true);
    }
    Ok(reg.contains_rooted(&k_graph, 0)?.is_some())
}

fn reaches_avoiding(g: &Graph, from: usize, targets: &[usize], avoid: usize) -> bool {
    if targets.is_empty() {
        return false;
    }
    let mut target = vec![false; g.v()];
    for &t in targets {
        target[t] = true;
    }
    let mut seen = vec![false; g.v()];
    let mut stack = vec![from];
    seen[from] = true;
    seen[avoid] = true;
    if target[from] {
        return true;
    }
    while let Some(u) = stack.pop() {
        for w in g.neighbors(u) {
            if !seen[w] {
                if target[w] {
                    return true;
                }
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    false
}

// ---------------------------------------------------------------------------
// persistence

fn cert_to_hex(cert: &[u64]) -> String {
    cert.iter()
        .map(|w| format!("{w:016x}"))
        .collect::<Vec<_>>()
        .join(":")
}

fn cert_from_hex(s: &str) -> Result<Vec<u64>> {
    s.split(':')
        .map(|w| u64::from_str_radix(w, 16).map_err(|_| Error::Format("bad cert hex".into())))
        .collect()
}

/// Writes the registry as a directory: `manifest.txt` plus one graph6 file
/// per member under `members/`.
pub fn save_registry(reg: &GSetRegistry, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir.join("members"))?;
    let mut manifest = String::new();
    manifest.push_str("# gset registry manifest\n");
    for line in reg.params.to_config().lines() {
        manifest.push_str(&format!("param {line}\n"));
    }
    for (i, m) in reg.members.iter().enumerate() {
        let file = format!("members/{i:04}.g6");
        std::fs::write(
            dir.join(&file),
            format!("{}\n", graph6::encode_rooted(&m.graph, 0)),
        )?;
        let parent = m
            .parent
            .map(|p| p.to_string())
            .unwrap_or_else(|| "-".into());
        manifest.push_str(&format!(
            "member={i} layer={} parent={} f={} rho={} file={} cert={}\n",
            m.layer,
            parent,
            m.f_value,
            m.rho_max,
            file,
            cert_to_hex(&m.cert)
        ));
    }
    std::fs::write(dir.join("manifest.txt"), manifest)?;
    Ok(())
}

/// Loads and re-validates a registry directory.
pub fn load_registry(dir: &Path) -> Result<GSetRegistry> {
    let manifest = std::fs::read_to_string(dir.join("manifest.txt"))?;
    let mut param_text = String::new();
    let mut members = Vec::new();
    for line in manifest.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("param ") {
            param_text.push_str(rest);
            param_text.push('\n');
            continue;
        }
        let mut fields = BTreeMap::new();
        for tok in line.split_whitespace() {
            let (k, v) = tok
                .split_once('=')
                .ok_or_else(|| Error::Format(format!("bad manifest token `{tok}`")))?;
            fields.insert(k.to_string(), v.to_string());
        }
        let need = |k: &str| -> Result<String> {
            fields
                .get(k)
                .cloned()
                .ok_or_else(|| Error::Format(format!("manifest line missing `{k}`")))
        };
        let file = need("file")?;
        let text = std::fs::read_to_string(dir.join(&file))?;
        let (graph, root) = graph6::decode_rooted(&text)?;
        if root != 0 {
            return Err(Error::Format("member root must be 0".into()));
        }
        let layer: usize = need("layer")?
            .parse()
            .map_err(|_| Error::Format("bad layer".into()))?;
        let parent = match need("parent")?.as_str() {
            "-" => None,
            s => Some(
                s.parse::<usize>()
                    .map_err(|_| Error::Format("bad parent".into()))?,
            ),
        };
        let cert = cert_from_hex(&need("cert")?)?;
        let recomputed = rooted_canonical_form_bounded(&graph, 0, CANON_BOUND)?;
        if recomputed.cert != cert {
            return Err(Error::Format(format!(
                "member {} certificate mismatch",
                members.len()
            )));
        }
        members.push(Member {
            f_value: Rat::parse(&need("f")?)?,
            rho_max: Rat::parse(&need("rho")?)?,
            graph,
            layer,
            cert,
            parent,
        });
    }
    Ok(GSetRegistry {
        params: GSetParams::from_config(&param_text)?,
        members,
    })
}
