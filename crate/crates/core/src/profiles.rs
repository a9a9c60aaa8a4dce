//! Vertex profiles over bad subgraphs and the witness-graph builder.
//!
//! For a graph and a vertex `u`, this module finds the registry-maximal
//! strict member copies through `u` (the u-bad subgraphs), evaluates which
//! neutral template extensions their root tuples admit (`zeta`), describes
//! the second-level extensions of each such copy (`theta`, a
//! specification), aggregates everything into the per-member profile sets,
//! and replays a vertex's entire profile into a fresh witness graph whose
//! root realizes the same profile.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::canon::{induced_embeddings, monomorphisms};
use crate::ext::{classify_pair_bounded, rho_max_bruteforce, rho_max_flow, PairClass};
use crate::graph::{is_extension_orders, Graph, LabeledPair, RootedPair};
use crate::gset::{alpha_g, GSetRegistry};
use crate::{Error, Result};

// ---------------------------------------------------------------------------
// templates

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum TemplateId {
    K1,
    K2,
    KStar,
}

/// The two neutral extension templates and the rigid tick. The concrete
/// edge structure is validated by the classifier at construction; the
/// constructor panics if a template stops classifying as required.
#[derive(Clone, Debug)]
pub struct NeutralTemplates {
    pub k1_t1: LabeledPair,
    pub k2_t2: LabeledPair,
    pub kstar_tstar: LabeledPair,
}

impl NeutralTemplates {
    pub fn standard() -> NeutralTemplates {
        // (K1, T1): roots z1 z2 z3, added t1 w t3 on a path, hooked by
        // t1-z1, w-z2, t3-z3
        let k1 = Graph::from_edges(6, &[(0, 3), (1, 4), (2, 5), (3, 4), (4, 5)]);
        let k1_t1 = LabeledPair::new(k1, vec![0, 1, 2, 3, 4, 5], 3).unwrap();
        // (K2, T2): roots a b, added c d e with edges a-c, c-d, d-b, e-d, e-c
        let k2 = Graph::from_edges(5, &[(0, 2), (2, 3), (3, 1), (4, 3), (4, 2)]);
        let k2_t2 = LabeledPair::new(k2, vec![0, 1, 2, 3, 4], 2).unwrap();
        // (K*, T*): two roots, one added vertex adjacent to both
        let ks = Graph::from_edges(3, &[(0, 2), (1, 2)]);
        let kstar_tstar = LabeledPair::new(ks, vec![0, 1, 2], 2).unwrap();
        let t = NeutralTemplates {
            k1_t1,
            k2_t2,
            kstar_tstar,
        };
        t.validate().expect("standard templates must classify");
        t
    }

    fn validate(&self) -> Result<()> {
        for (pair, want, name) in [
            (&self.k1_t1, PairClass::Neutral, "K1/T1"),
            (&self.k2_t2, PairClass::Neutral, "K2/T2"),
            (&self.kstar_tstar, PairClass::Rigid, "K*/T*"),
        ] {
            let rp = RootedPair::new(pair.graph.clone(), &pair.order[..pair.k])?;
            let got = classify_pair_bounded(&rp, alpha_g(), 12)?;
            if got != want {
                return Err(Error::Hypothesis(format!(
                    "template {name} classifies {got:?}, expected {want:?}"
                )));
            }
        }
        if self.k1_t1.added() != 3 || self.k2_t2.added() != 3 {
            return Err(Error::Hypothesis(
                "neutral templates must add 3 vertices".into(),
            ));
        }
        Ok(())
    }

    pub fn get(&self, id: TemplateId) -> &LabeledPair {
        match id {
            TemplateId::K1 => &self.k1_t1,
            TemplateId::K2 => &self.k2_t2,
            TemplateId::KStar => &self.kstar_tstar,
        }
    }

    /// Root arity of a template.
    pub fn nu(&self, id: TemplateId) -> usize {
        self.get(id).k
    }
}

// ---------------------------------------------------------------------------
// neighbourhood sets

/// The common-neighbourhood set with polarities: vertices adjacent to every
/// positive constraint and to no negative one, excluding the constraint
/// vertices themselves.
pub fn neighbourhood_set(g: &Graph, constraints: &[(usize, bool)]) -> Result<Vec<usize>> {
    let mut seen = BTreeSet::new();
    for &(v, _) in constraints {
        if v >= g.v() {
            return Err(Error::VertexOutOfRange {
                vertex: v,
                n: g.v(),
            });
        }
        if !seen.insert(v) {
            return Err(Error::DuplicateVertex(v));
        }
    }
    let mut out = Vec::new();
    'vert: for u in 0..g.v() {
        if seen.contains(&u) {
            continue;
        }
        for &(v, pol) in constraints {
            if g.has_edge(u, v) != pol {
                continue 'vert;
            }
        }
        out.push(u);
    }
    Ok(out)
}

/// `delta`: the emptiness indicator of the neighbourhood set.
pub fn delta(g: &Graph, constraints: &[(usize, bool)]) -> Result<bool> {
    Ok(!neighbourhood_set(g, constraints)?.is_empty())
}

// ---------------------------------------------------------------------------
// strict generalised template extensions

/// Enumerates strict generalised extensions of `roots` (physical vertices,
/// repeats allowed) in `g`: tuples of distinct added vertices, all from
/// `allowed`, matching the template's merged edge pattern exactly. Returns
/// added-vertex tuples in lexicographic order.
fn strict_generalised_extensions(
    g: &Graph,
    template: &LabeledPair,
    roots: &[usize],
    allowed: &[bool],
    cap: Option<usize>,
) -> Vec<Vec<usize>> {
    let k = template.k;
    let t = template.added();
    debug_assert_eq!(roots.len(), k);
    // distinct physical roots
    let mut root_phys: Vec<usize> = roots.to_vec();
    root_phys.sort_unstable();
    root_phys.dedup();
    // merged required adjacency of each added position toward each physical root
    let mut req_root: Vec<Vec<bool>> = vec![vec![false; root_phys.len()]; t];
    for (ai, req) in req_root.iter_mut().enumerate() {
        for (ri, &r) in roots.iter().enumerate() {
            if template.template_edge(k + ai, ri) {
                let pos = root_phys.iter().position(|&p| p == r).unwrap();
                req[pos] = true;
            }
        }
    }
    let mut out = Vec::new();
    let mut added = vec![usize::MAX; t];
    fn rec(
        g: &Graph,
        template: &LabeledPair,
        root_phys: &[usize],
        req_root: &[Vec<bool>],
        allowed: &[bool],
        added: &mut Vec<usize>,
        i: usize,
        cap: Option<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if cap.is_some_and(|c| out.len() >= c) {
            return;
        }
        let t = added.len();
        let k = template.k;
        if i == t {
            out.push(added.clone());
            return;
        }
        // candidate source: a required root's neighborhood when one exists
        let from_root = req_root[i].iter().position(|&b| b);
        let candidates: Vec<usize> = match from_root {
            Some(pos) => g.neighbors(root_phys[pos]).collect(),
            None => (0..g.v()).collect(),
        };
        'cand: for w in candidates {
            if !allowed[w] || root_phys.contains(&w) || added[..i].contains(&w) {
                continue;
            }
            for (pos, &r) in root_phys.iter().enumerate() {
                if g.has_edge(w, r) != req_root[i][pos] {
                    continue 'cand;
                }
            }
            for j in 0..i {
                let te = template.template_edge(k + i, k + j);
                if g.has_edge(w, added[j]) != te {
                    continue 'cand;
                }
            }
            added[i] = w;
            rec(
                g,
                template,
                root_phys,
                req_root,
                allowed,
                added,
                i + 1,
                cap,
                out,
            );
            added[i] = usize::MAX;
        }
    }
    rec(
        g, template, &root_phys, &req_root, allowed, &mut added, 0, cap, &mut out,
    );
    out
}

/// `zeta`: does a strict generalised template extension of `roots` exist in
/// the graph induced on `V(g) \ (u_subgraph \ roots)`?
pub fn zeta(
    g: &Graph,
    u_subgraph: &[usize],
    roots: &[usize],
    templates: &NeutralTemplates,
    id: TemplateId,
) -> Result<bool> {
    let template = templates.get(id);
    if roots.len() != template.k {
        return Err(Error::ArityMismatch {
            expected: template.k,
            got: roots.len(),
        });
    }
    for &r in roots {
        if !u_subgraph.contains(&r) {
            return Err(Error::Hypothesis(format!(
                "root {r} does not lie in the subgraph"
            )));
        }
    }
    let allowed = allowed_mask(g, u_subgraph, roots);
    Ok(!strict_generalised_extensions(g, template, roots, &allowed, Some(1)).is_empty())
}

fn allowed_mask(g: &Graph, excluded_set: &[usize], kept_roots: &[usize]) -> Vec<bool> {
    let mut allowed = vec![true; g.v()];
    for &v in excluded_set {
        allowed[v] = false;
    }
    for &r in kept_roots {
        if r < allowed.len() {
            allowed[r] = true;
        }
    }
    allowed
}

// ---------------------------------------------------------------------------
// specifications

/// A specification: the second-level extension pattern of a template copy.
/// Domain: ordered position triples over the copy's canonical order (0-based,
/// `p = nu + 3` positions) that do not lie entirely among the roots.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct ThetaMap {
    pub nu: usize,
    pub p: usize,
    bits: Vec<u64>,
}

impl ThetaMap {
    fn new(nu: usize, p: usize) -> ThetaMap {
        let n = p * p * p;
        ThetaMap {
            nu,
            p,
            bits: vec![0; n.div_ceil(64)],
        }
    }

    pub fn in_domain(&self, s: (usize, usize, usize)) -> bool {
        s.0 < self.p
            && s.1 < self.p
            && s.2 < self.p
            && !(s.0 < self.nu && s.1 < self.nu && s.2 < self.nu)
    }

    fn index(&self, s: (usize, usize, usize)) -> usize {
        (s.0 * self.p + s.1) * self.p + s.2
    }

    pub fn get(&self, s: (usize, usize, usize)) -> Option<bool> {
        if !self.in_domain(s) {
            return None;
        }
        let i = self.index(s);
        Some(self.bits[i / 64] >> (i % 64) & 1 == 1)
    }

    fn set(&mut self, s: (usize, usize, usize), v: bool) {
        debug_assert!(self.in_domain(s));
        let i = self.index(s);
        if v {
            self.bits[i / 64] |= 1 << (i % 64);
        }
    }

    /// Ordered domain triples.
    pub fn domain(nu: usize, p: usize) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for s1 in 0..p {
            for s2 in 0..p {
                for s3 in 0..p {
                    if !(s1 < nu && s2 < nu && s3 < nu) {
                        out.push((s1, s2, s3));
                    }
                }
            }
        }
        out
    }

    pub fn is_all_zero(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }
}

/// A located strict generalised template copy: physical roots (repeats
/// allowed) followed by the three added vertices, in canonical order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct ExtensionCopy {
    pub template: TemplateId,
    pub roots: Vec<usize>,
    pub added: Vec<usize>,
}

impl ExtensionCopy {
    pub fn positions(&self) -> Vec<usize> {
        let mut v = self.roots.clone();
        v.extend_from_slice(&self.added);
        v
    }
}

/// The specification of a verified copy relative to `u_subgraph`: for each
/// admissible position triple, whether a strict generalised (K1, T1)
/// second-level extension exists outside the copy and the subgraph.
pub fn specification(
    g: &Graph,
    u_subgraph: &[usize],
    copy: &ExtensionCopy,
    templates: &NeutralTemplates,
) -> Result<ThetaMap> {
    let template = templates.get(copy.template);
    let order = copy.positions();
    if !is_extension_orders(template, g, &order, true, true)? {
        return Err(Error::NonCanonicalOrder);
    }
    let nu = template.k;
    let p = nu + 3;
    let mut theta = ThetaMap::new(nu, p);
    // region excluded for second-level searches: the subgraph and the copy
    let mut blob: Vec<usize> = u_subgraph.to_vec();
    blob.extend_from_slice(&copy.added);
    blob.extend_from_slice(&copy.roots);
    blob.sort_unstable();
    blob.dedup();
    for s in ThetaMap::domain(nu, p) {
        let roots = [order[s.0], order[s.1], order[s.2]];
        let allowed = allowed_mask(g, &blob, &roots);
        let found = !strict_generalised_extensions(g, &templates.k1_t1, &roots, &allowed, Some(1))
            .is_empty();
        theta.set(s, found);
    }
    Ok(theta)
}

// ---------------------------------------------------------------------------
// u-bad subgraphs

/// The u-bad subgraphs per registry member: registry-maximal strict member
/// copies through `u`, as sorted vertex sets.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct UBadSets {
    pub per_member: Vec<Vec<Vec<usize>>>,
}

impl UBadSets {
    pub fn all_sets(&self) -> Vec<&Vec<usize>> {
        self.per_member.iter().flatten().collect()
    }
}

/// Strict rooted member copies through `u`, filtered to the
/// registry-maximal ones. A copy is discarded when some (not necessarily
/// strict) member extension of `u` properly contains it.
pub fn find_u_bad(g: &Graph, u: usize, reg: &GSetRegistry) -> Result<UBadSets> {
    if u >= g.v() {
        return Err(Error::VertexOutOfRange {
            vertex: u,
            n: g.v(),
        });
    }
    let mut per_member: Vec<Vec<Vec<usize>>> = vec![Vec::new(); reg.kappa()];
    for (mi, member) in reg.members.iter().enumerate() {
        if member.graph.v() > g.v() {
            continue;
        }
        let embeds = induced_embeddings(&member.graph, g, &[(0, u)], None);
        let mut sets: BTreeSet<Vec<usize>> = BTreeSet::new();
        for e in embeds {
            let mut s = e.clone();
            s.sort_unstable();
            sets.insert(s);
        }
        'set: for s in sets {
            for bigger in reg.members.iter() {
                if bigger.graph.v() <= s.len() || bigger.graph.v() > g.v() {
                    continue;
                }
                let found = monomorphisms(&bigger.graph, g, &[(0, u)], Some(1), &s);
                if !found.is_empty() {
                    continue 'set;
                }
            }
            per_member[mi].push(s);
        }
    }
    Ok(UBadSets { per_member })
}

/// The 0-neighbourhood: all vertices outside every u-bad subgraph.
pub fn zero_neighbourhood(g: &Graph, u: usize, reg: &GSetRegistry) -> Result<Vec<usize>> {
    let bad = find_u_bad(g, u, reg)?;
    let mut excluded = vec![false; g.v()];
    for s in bad.all_sets() {
        for &v in s {
            excluded[v] = true;
        }
    }
    Ok((0..g.v()).filter(|&v| !excluded[v]).collect())
}

/// Desk check: do all u-bad subgraphs pairwise intersect only in `u`?
/// Returns the first offending pair of vertex sets when not.
pub fn bad_subgraphs_disjoint(
    g: &Graph,
    u: usize,
    reg: &GSetRegistry,
) -> Result<std::result::Result<(), (Vec<usize>, Vec<usize>)>> {
    let bad = find_u_bad(g, u, reg)?;
    let sets = bad.all_sets();
    for i in 0..sets.len() {
        for j in i + 1..sets.len() {
            let inter: Vec<usize> = sets[i]
                .iter()
                .filter(|v| sets[j].contains(v))
                .copied()
                .collect();
            if inter != [u] {
                return Ok(Err((sets[i].clone(), sets[j].clone())));
            }
        }
    }
    Ok(Ok(()))
}

// ---------------------------------------------------------------------------
// profiles

/// T_j(U): for every root tuple over the copy's canonical order, the set of
/// specifications realized by strict generalised template extensions.
pub type TVector = Vec<BTreeSet<ThetaMap>>;

/// The order-quotiented profile entry of one u-bad subgraph: the set of
/// (T_1, T_2) vectors over all canonical orders of the copy.
pub type ProfileEntry = BTreeSet<(TVector, TVector)>;

/// Everything the witness builder needs about one u-bad subgraph.
#[derive(Clone, Debug)]
pub struct UBadData {
    pub member: usize,
    pub vertices: Vec<usize>,
    pub orders: Vec<Vec<usize>>,
    pub entry: ProfileEntry,
    /// For the first canonical order: per template and root-tuple rank, one
    /// representative extension per distinct specification.
    pub representatives: [Vec<Vec<(ThetaMap, ExtensionCopy)>>; 2],
}

/// The profile of a vertex: per registry member, the data of its u-bad
/// subgraphs; `j_set(i)` is the comparable profile set of member `i`.
#[derive(Clone, Debug)]
pub struct Profile {
    pub per_member: Vec<Vec<UBadData>>,
    pub zero_neighbourhood: Vec<usize>,
}

impl Profile {
    pub fn j_set(&self, member: usize) -> BTreeSet<ProfileEntry> {
        self.per_member[member]
            .iter()
            .map(|d| d.entry.clone())
            .collect()
    }

    pub fn j_sets(&self) -> Vec<BTreeSet<ProfileEntry>> {
        (0..self.per_member.len()).map(|i| self.j_set(i)).collect()
    }

    /// Line-oriented rendering for diffing between graphs.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (mi, datas) in self.per_member.iter().enumerate() {
            for (ui, d) in datas.iter().enumerate() {
                let _ = writeln!(out, "member={mi} copy={ui} vertices={:?}", d.vertices);
                for (ei, t_pair) in d.entry.iter().enumerate() {
                    for (j, tv) in [&t_pair.0, &t_pair.1].into_iter().enumerate() {
                        for (rank, thetas) in tv.iter().enumerate() {
                            if thetas.is_empty() {
                                continue;
                            }
                            let bitmaps: Vec<String> = thetas
                                .iter()
                                .map(|t| {
                                    t.bits
                                        .iter()
                                        .map(|w| format!("{w:016x}"))
                                        .collect::<Vec<_>>()
                                        .join(":")
                                })
                                .collect();
                            let _ = writeln!(
                                out,
                                "  order_class={ei} template=K{} tuple={rank} thetas=[{}]",
                                j + 1,
                                bitmaps.join(",")
                            );
                        }
                    }
                }
            }
        }
        let _ = writeln!(out, "zero_neighbourhood={:?}", self.zero_neighbourhood);
        out
    }
}

fn tuple_at(rank: usize, arity: usize, base: usize) -> Vec<usize> {
    let mut r = rank;
    let mut out = vec![0; arity];
    for slot in (0..arity).rev() {
        out[slot] = r % base;
        r /= base;
    }
    out
}

/// The full profile of `u` in `g` over the registry.
pub fn profile(
    g: &Graph,
    u: usize,
    reg: &GSetRegistry,
    templates: &NeutralTemplates,
) -> Result<Profile> {
    let bad = find_u_bad(g, u, reg)?;
    let mut per_member: Vec<Vec<UBadData>> = vec![Vec::new(); reg.kappa()];
    for (mi, sets) in bad.per_member.iter().enumerate() {
        let member = &reg.members[mi];
        for s in sets {
            // canonical orders: root-fixing induced embeddings onto this set
            let embeds = induced_embeddings(&member.graph, g, &[(0, u)], None);
            let orders: Vec<Vec<usize>> = embeds
                .into_iter()
                .filter(|e| {
                    let mut t = e.clone();
                    t.sort_unstable();
                    &t == s
                })
                .collect();
            debug_assert!(!orders.is_empty());
            let mut entry: ProfileEntry = BTreeSet::new();
            let mut representatives: [Vec<Vec<(ThetaMap, ExtensionCopy)>>; 2] =
                [Vec::new(), Vec::new()];
            for (oi, order) in orders.iter().enumerate() {
                let mut pair_vec: Vec<TVector> = Vec::new();
                for (ji, id) in [TemplateId::K1, TemplateId::K2].into_iter().enumerate() {
                    let template = templates.get(id);
                    let nu = template.k;
                    let ranks = order.len().pow(nu as u32);
                    let mut tv: TVector = Vec::with_capacity(ranks);
                    let mut reps: Vec<Vec<(ThetaMap, ExtensionCopy)>> = Vec::with_capacity(ranks);
                    for rank in 0..ranks {
                        let idxs = tuple_at(rank, nu, order.len());
                        let roots: Vec<usize> = idxs.iter().map(|&a| order[a]).collect();
                        let allowed = allowed_mask(g, s, &roots);
                        let exts =
                            strict_generalised_extensions(g, template, &roots, &allowed, None);
                        let mut thetas: BTreeSet<ThetaMap> = BTreeSet::new();
                        let mut rank_reps: Vec<(ThetaMap, ExtensionCopy)> = Vec::new();
                        for added in exts {
                            let copy = ExtensionCopy {
                                template: id,
                                roots: roots.clone(),
                                added,
                            };
                            let theta = specification(g, s, &copy, templates)?;
                            if thetas.insert(theta.clone()) {
                                rank_reps.push((theta, copy));
                            }
                        }
                        tv.push(thetas);
                        reps.push(rank_reps);
                    }
                    pair_vec.push(tv);
                    if oi == 0 {
                        representatives[ji] = reps;
                    }
                }
                let t2 = pair_vec.pop().unwrap();
                let t1 = pair_vec.pop().unwrap();
                entry.insert((t1, t2));
            }
            per_member[mi].push(UBadData {
                member: mi,
                vertices: s.clone(),
                orders,
                entry,
                representatives,
            });
        }
    }
    let zero = {
        let mut excluded = vec![false; g.v()];
        for datas in &per_member {
            for d in datas {
                for &v in &d.vertices {
                    excluded[v] = true;
                }
            }
        }
        (0..g.v()).filter(|&v| !excluded[v]).collect()
    };
    Ok(Profile {
        per_member,
        zero_neighbourhood: zero,
    })
}

// ---------------------------------------------------------------------------
// tick neighbourhoods and (K, T)-maximality

/// Grows `seed` by repeatedly absorbing vertices with at least two
/// neighbours in the current set; `order` caps the number of iterations
/// (`None` runs to the fixpoint). Returns the sorted vertex set.
pub fn kt_star_neighbourhood(
    g: &Graph,
    seed: &[usize],
    order: Option<usize>,
) -> Result<Vec<usize>> {
    if seed.is_empty() {
        return Err(Error::Hypothesis("seed must be nonempty".into()));
    }
    let mut in_w = vec![false; g.v()];
    for &v in seed {
        if v >= g.v() {
            return Err(Error::VertexOutOfRange {
                vertex: v,
                n: g.v(),
            });
        }
        in_w[v] = true;
    }
    let max_iters = order.unwrap_or(g.v());
    for _ in 0..max_iters {
        let mut grew = false;
        let snapshot = in_w.clone();
        for v in 0..g.v() {
            if snapshot[v] {
                continue;
            }
            let count = g.neighbors(v).filter(|&w| snapshot[w]).count();
            if count >= 2 {
                in_w[v] = true;
                grew = true;
            }
        }
        if !grew {
            break;
        }
    }
    Ok((0..g.v()).filter(|&v| in_w[v]).collect())
}

/// A maximality violation: the root tuple inside the extension and the
/// offending outside copy.
#[derive(Clone, Debug)]
pub struct KtViolation {
    pub t_tilde: Vec<usize>,
    pub k_tilde: Vec<usize>,
}

/// Is the pair `(G~, H~)` (given as vertex sets of `g`) `(K, T)`-maximal?
/// Checks every ordered tuple `T~` inside `G~` not fully contained in `H~`
/// for a template extension outside `G~` with no edges back into
/// `G~ \ T~`. Returns the first violation, or `None` when maximal.
pub fn kt_maximal(
    g: &Graph,
    gt: &[usize],
    ht: &[usize],
    template: &LabeledPair,
) -> Result<Option<KtViolation>> {
    let vt = template.k;
    if vt > gt.len() {
        return Err(Error::ArityMismatch {
            expected: vt,
            got: gt.len(),
        });
    }
    let ht_set: BTreeSet<usize> = ht.iter().copied().collect();
    let gt_set: BTreeSet<usize> = gt.iter().copied().collect();
    let mut tuple = vec![usize::MAX; vt];
    fn tuples(
        g: &Graph,
        gt: &[usize],
        ht_set: &BTreeSet<usize>,
        gt_set: &BTreeSet<usize>,
        template: &LabeledPair,
        tuple: &mut Vec<usize>,
        i: usize,
    ) -> Option<KtViolation> {
        if i == tuple.len() {
            if tuple.iter().all(|v| ht_set.contains(v)) {
                return None;
            }
            // extension candidates live strictly outside G~
            if let Some(k_tilde) = outside_extension(g, gt_set, template, tuple) {
                return Some(KtViolation {
                    t_tilde: tuple.clone(),
                    k_tilde,
                });
            }
            return None;
        }
        for &v in gt {
            if tuple[..i].contains(&v) {
                continue;
            }
            tuple[i] = v;
            if let Some(viol) = tuples(g, gt, ht_set, gt_set, template, tuple, i + 1) {
                return Some(viol);
            }
            tuple[i] = usize::MAX;
        }
        None
    }
    Ok(tuples(g, gt, &ht_set, &gt_set, template, &mut tuple, 0))
}

/// Finds a non-strict template extension of `roots` with all added vertices
/// outside `gt_set` and no edges from the added vertices into
/// `gt_set \ roots`.
fn outside_extension(
    g: &Graph,
    gt_set: &BTreeSet<usize>,
    template: &LabeledPair,
    roots: &[usize],
) -> Option<Vec<usize>> {
    let k = template.k;
    let t = template.added();
    let mut added = vec![usize::MAX; t];
    fn rec(
        g: &Graph,
        gt_set: &BTreeSet<usize>,
        template: &LabeledPair,
        roots: &[usize],
        added: &mut Vec<usize>,
        i: usize,
    ) -> bool {
        let k = template.k;
        if i == added.len() {
            return true;
        }
        'cand: for w in 0..g.v() {
            if gt_set.contains(&w) || added[..i].contains(&w) {
                continue;
            }
            // no edges into G~ \ T~
            for &x in gt_set {
                if !roots.contains(&x) && g.has_edge(w, x) {
                    continue 'cand;
                }
            }
            // template edges toward roots and earlier added vertices
            for (ri, &r) in roots.iter().enumerate() {
                if template.template_edge(k + i, ri) && !g.has_edge(w, r) {
                    continue 'cand;
                }
            }
            for j in 0..i {
                if template.template_edge(k + i, k + j) && !g.has_edge(w, added[j]) {
                    continue 'cand;
                }
            }
            added[i] = w;
            if rec(g, gt_set, template, roots, added, i + 1) {
                return true;
            }
            added[i] = usize::MAX;
        }
        false
    }
    let _ = k;
    if rec(g, gt_set, template, roots, &mut added, 0) {
        Some(added)
    } else {
        None
    }
}

/// Does some strict `(G, H)`-extension of `roots` exist in `g` that is
/// `(K, T)`-maximal? Used by the maximal-extension probes.
pub fn has_maximal_strict_extension(
    g: &Graph,
    pair: &LabeledPair,
    roots: &[usize],
    template: &LabeledPair,
) -> Result<bool> {
    if roots.len() != pair.k {
        return Err(Error::ArityMismatch {
            expected: pair.k,
            got: roots.len(),
        });
    }
    let allowed = vec![true; g.v()];
    let exts = strict_generalised_extensions(g, pair, roots, &allowed, None);
    for added in exts {
        let mut gt: Vec<usize> = roots.to_vec();
        gt.extend_from_slice(&added);
        gt.sort_unstable();
        if kt_maximal(g, &gt, roots, template)?.is_none() {
            return Ok(true);
        }
    }
    Ok(false)
}

// ---------------------------------------------------------------------------
// witness builder

/// The constructed witness graph: the root realizes, member by member, the
/// same profile as the source vertex.
#[derive(Clone, Debug)]
pub struct Witness {
    pub graph: Graph,
    pub z1: usize,
    /// member copies laid down by the builder, in canonical order
    pub copies: Vec<(usize, Vec<usize>)>,
}

/// Replays the profile of `x1` into a fresh graph: one member copy per
/// distinct profile entry, one template extension per realized
/// specification, and one second-level extension per set specification bit.
pub fn build_witness(
    a: &Graph,
    x1: usize,
    reg: &GSetRegistry,
    templates: &NeutralTemplates,
) -> Result<Witness> {
    // density hypothesis within the desk-scale window
    let rho = if a.v() <= 20 {
        rho_max_bruteforce(a)?
    } else {
        rho_max_flow(a)?
    };
    if rho >= reg.params.density_cap {
        return Err(Error::Hypothesis(format!(
            "witness source graph has rho_max = {rho} >= {}",
            reg.params.density_cap
        )));
    }
    let prof = profile(a, x1, reg, templates)?;
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut n = 1usize; // z1 = 0
    let mut copies = Vec::new();
    for mi in 0..reg.kappa() {
        // one representative per distinct profile entry, deterministic order
        let mut seen: BTreeSet<&ProfileEntry> = BTreeSet::new();
        for data in &prof.per_member[mi] {
            if !seen.insert(&data.entry) {
                continue;
            }
            let member = &reg.members[mi];
            let v = member.graph.v();
            // fresh copy: member vertex 0 -> z1, vertex j -> n + j - 1
            let map = |j: usize| if j == 0 { 0 } else { n + j - 1 };
            for (x, y) in member.graph.edges() {
                edges.push((map(x), map(y)));
            }
            let copy_order: Vec<usize> = (0..v).map(map).collect();
            n += v - 1;
            copies.push((mi, copy_order.clone()));
            for (ji, id) in [TemplateId::K1, TemplateId::K2].into_iter().enumerate() {
                let template = templates.get(id);
                let nu = template.k;
                for rank in 0..v.pow(nu as u32) {
                    let idxs = tuple_at(rank, nu, v);
                    for (theta, _) in &data.representatives[ji][rank] {
                        // first-level extension over the copy's roots
                        let roots: Vec<usize> = idxs.iter().map(|&a| copy_order[a]).collect();
                        let added: Vec<usize> = (0..3).map(|i| n + i).collect();
                        n += 3;
                        wire_template(&mut edges, template, &roots, &added);
                        // canonical positions of the new copy
                        let mut positions = roots.clone();
                        positions.extend_from_slice(&added);
                        // second-level extensions per specification bit
                        for s in ThetaMap::domain(nu, nu + 3) {
                            if theta.get(s) == Some(true) {
                                let sl_roots = vec![positions[s.0], positions[s.1], positions[s.2]];
                                let sl_added: Vec<usize> = (0..3).map(|i| n + i).collect();
                                n += 3;
                                wire_template(&mut edges, &templates.k1_t1, &sl_roots, &sl_added);
                            }
                        }
                    }
                }
            }
        }
    }
    let mut graph = Graph::empty(n);
    for (u, v) in edges {
        if u != v && !graph.has_edge(u, v) {
            graph.add_edge(u, v);
        }
    }
    Ok(Witness {
        graph,
        z1: 0,
        copies,
    })
}

/// Adds the merged template pattern over possibly repeated physical roots.
fn wire_template(
    edges: &mut Vec<(usize, usize)>,
    template: &LabeledPair,
    roots: &[usize],
    added: &[usize],
) {
    let k = template.k;
    let phys = |pos: usize| {
        if pos < k {
            roots[pos]
        } else {
            added[pos - k]
        }
    };
    for i in k..template.order.len() {
        for j in 0..template.order.len() {
            if i == j {
                continue;
            }
            if template.template_edge(i, j) && phys(i) != phys(j) {
                let (a, b) = (phys(i).min(phys(j)), phys(i).max(phys(j)));
                edges.push((a, b));
            }
        }
    }
}
