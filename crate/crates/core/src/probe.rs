//! Seeded `G(n, p = n^{-alpha})` sampling and Monte-Carlo experiments.
//!
//! All randomness flows through a self-contained xoshiro256++ generator
//! seeded by splitmix64, so identical specs reproduce identical graphs and
//! identical CSV bytes, independent of platform threading or library
//! versions. Per-sample streams are derived as
//! `hash(master_seed, cell_index, sample_index)`.

use crate::ext::{classify_pair, PairClass};
use crate::fo::Formula;
use crate::game::{self, Winner};
use crate::graph::{Graph, LabeledPair, RootedPair};
use crate::profiles;
use crate::rational::Rat;
use crate::{Error, Result};

#[inline]
fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e3779b97f4a7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// xoshiro256++ with splitmix64 seeding.
#[derive(Clone, Debug)]
pub struct Rng {
    s: [u64; 4],
}

impl Rng {
    pub fn seeded(seed: u64) -> Rng {
        let mut sm = seed;
        Rng {
            s: [
                splitmix64(&mut sm),
                splitmix64(&mut sm),
                splitmix64(&mut sm),
                splitmix64(&mut sm),
            ],
        }
    }

    /// Stream derivation: folds the parts into the master seed through
    /// splitmix64 so that (cell, sample) streams are independent of
    /// evaluation order.
    pub fn derived(master: u64, parts: &[u64]) -> Rng {
        let mut sm = master;
        let mut acc = splitmix64(&mut sm);
        for &p in parts {
            let mut x = acc ^ p;
            acc = splitmix64(&mut x);
        }
        Rng::seeded(acc)
    }

    pub fn next_u64(&mut self) -> u64 {
        let result = (self.s[0].wrapping_add(self.s[3]))
            .rotate_left(23)
            .wrapping_add(self.s[0]);
        let t = self.s[1] << 17;
        self.s[2] ^= self.s[0];
        self.s[3] ^= self.s[1];
        self.s[1] ^= self.s[2];
        self.s[0] ^= self.s[3];
        self.s[2] ^= t;
        self.s[3] = self.s[3].rotate_left(45);
        result
    }

    /// Uniform in `0..n` by rejection; `n > 0`.
    pub fn next_below(&mut self, n: u64) -> u64 {
        assert!(n > 0);
        let zone = u64::MAX - u64::MAX % n;
        loop {
            let x = self.next_u64();
            if x < zone {
                return x % n;
            }
        }
    }

    /// Uniform in `[0, 1)` with 53-bit resolution.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.next_f64() < p
    }

    /// Uniform random permutation of `0..n` (Fisher-Yates).
    pub fn permutation(&mut self, n: usize) -> Vec<usize> {
        let mut perm: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            let j = self.next_below(i as u64 + 1) as usize;
            perm.swap(i, j);
        }
        perm
    }

    /// Geometric number of failures before a success, `P(X = k) = (1-p)^k p`.
    pub fn geometric(&mut self, p: f64) -> u64 {
        debug_assert!(p > 0.0 && p <= 1.0);
        if p >= 1.0 {
            return 0;
        }
        let u = loop {
            let u = self.next_f64();
            if u > 0.0 {
                break u;
            }
        };
        let k = (u.ln() / (1.0 - p).ln()).floor();
        if k >= u64::MAX as f64 {
            u64::MAX
        } else {
            k as u64
        }
    }

    /// `k` distinct values from `0..n`, ascending.
    pub fn distinct(&mut self, n: usize, k: usize) -> Vec<usize> {
        assert!(k <= n);
        let mut out = Vec::with_capacity(k);
        let mut chosen = vec![false; n];
        while out.len() < k {
            let v = self.next_below(n as u64) as usize;
            if !chosen[v] {
                chosen[v] = true;
                out.push(v);
            }
        }
        out.sort_unstable();
        out
    }
}

/// A fully determined sampling cell: `p` is derived as `n^{-alpha}`.
#[derive(Clone, Debug)]
pub struct SampleSpec {
    pub n: usize,
    pub alpha: Rat,
    pub seed: u64,
}

impl SampleSpec {
    pub fn p(&self) -> f64 {
        derived_p(self.n, self.alpha)
    }
}

/// `p = n^{-alpha}` in double precision via `exp(-alpha ln n)`.
pub fn derived_p(n: usize, alpha: Rat) -> f64 {
    if n <= 1 {
        return 1.0;
    }
    (-alpha.to_f64() * (n as f64).ln()).exp()
}

/// Draws one graph from `G(n, p)`. Sparse cells use geometric skip-sampling
/// over the lexicographic pair order; dense cells fall back to per-pair
/// Bernoulli draws. Both modes agree in distribution.
pub fn sample_gnp(n: usize, p: f64, rng: &mut Rng) -> Result<Graph> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::BadProbability(p));
    }
    if p == 0.0 {
        return Ok(Graph::empty(n));
    }
    if p == 1.0 {
        return Ok(Graph::complete(n));
    }
    if p <= 0.25 {
        Ok(sample_skip(n, p, rng))
    } else {
        Ok(sample_bernoulli(n, p, rng))
    }
}

pub fn sample(spec: &SampleSpec) -> Result<Graph> {
    let mut rng = Rng::seeded(spec.seed);
    sample_gnp(spec.n, spec.p(), &mut rng)
}

/// Per-pair Bernoulli draws in lexicographic order.
pub fn sample_bernoulli(n: usize, p: f64, rng: &mut Rng) -> Graph {
    let mut g = Graph::empty(n);
    for u in 0..n {
        for v in u + 1..n {
            if rng.bernoulli(p) {
                g.add_edge(u, v);
            }
        }
    }
    g
}

/// Geometric skips over the lexicographic pair ranking.
pub fn sample_skip(n: usize, p: f64, rng: &mut Rng) -> Graph {
    let mut g = Graph::empty(n);
    if n < 2 {
        return g;
    }
    let total = n as u64 * (n as u64 - 1) / 2;
    let mut cur: u64 = 0;
    loop {
        let skip = rng.geometric(p);
        cur = match cur.checked_add(skip) {
            Some(x) => x,
            None => break,
        };
        if cur >= total {
            break;
        }
        let (u, v) = unrank_pair(n as u64, cur);
        g.add_edge(u as usize, v as usize);
        cur += 1;
    }
    g
}

/// Rank `r` in the lexicographic order of pairs `(u, v)`, `u < v`.
fn unrank_pair(n: u64, r: u64) -> (u64, u64) {
    // offset(u) = u*n - u*(u+1)/2 is the rank of (u, u+1); binary search the
    // largest u with offset(u) <= r.
    let offset = |u: u64| u * n - u * (u + 1) / 2;
    let (mut lo, mut hi) = (0u64, n - 1);
    while lo + 1 < hi {
        let mid = (lo + hi) / 2;
        if offset(mid) <= r {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let u = if offset(hi) <= r { hi } else { lo };
    let v = u + 1 + (r - offset(u));
    (u, v)
}

/// Existence detectors for probe cells. Formula evaluation is exact but only
/// feasible at small `n`; the clique detectors scale to the Poisson-probe
/// sizes.
#[derive(Clone, Debug)]
pub enum Detector {
    Clique(usize),
    Sentence(Formula),
}

impl Detector {
    pub fn check(&self, g: &Graph) -> Result<bool> {
        match self {
            Detector::Clique(k) => Ok(has_clique(g, *k)),
            Detector::Sentence(f) => f.evaluate(g),
        }
    }

    pub fn name(&self) -> String {
        match self {
            Detector::Clique(k) => format!("k{k}"),
            Detector::Sentence(f) => format!("fo:{f}"),
        }
    }
}

/// Pivoting existence search: first witness wins, no counting.
pub fn has_clique(g: &Graph, k: usize) -> bool {
    if k == 0 {
        return true;
    }
    if k == 1 {
        return g.v() > 0;
    }
    let words = g.row(0).len();
    let mut cand = vec![0u64; words];
    for v in 0..g.v() {
        cand[v / 64] |= 1 << (v % 64);
    }
    clique_rec(g, &cand, k)
}

fn clique_rec(g: &Graph, cand: &[u64], k: usize) -> bool {
    let size: usize = cand.iter().map(|w| w.count_ones() as usize).sum();
    if k == 0 {
        return true;
    }
    if size < k {
        return false;
    }
    let mut rest = cand.to_vec();
    loop {
        let v = match first_bit(&rest) {
            Some(v) => v,
            None => return false,
        };
        clear_bit(&mut rest, v);
        // candidates after choosing v: later candidates adjacent to v
        let next: Vec<u64> = rest.iter().zip(g.row(v)).map(|(c, r)| c & r).collect();
        let remaining: usize = next.iter().map(|w| w.count_ones() as usize).sum();
        if remaining >= k - 1 && clique_rec(g, &next, k - 1) {
            return true;
        }
        let left: usize = rest.iter().map(|w| w.count_ones() as usize).sum();
        if left < k {
            return false;
        }
    }
}

fn first_bit(words: &[u64]) -> Option<usize> {
    for (i, &w) in words.iter().enumerate() {
        if w != 0 {
            return Some(i * 64 + w.trailing_zeros() as usize);
        }
    }
    None
}

fn clear_bit(words: &mut [u64], v: usize) {
    words[v / 64] &= !(1 << (v % 64));
}

/// One probe cell outcome. The half-width is the 95% normal-approximation
/// binomial interval `1.96 * sqrt(phat (1 - phat) / samples)`.
#[derive(Clone, Debug)]
pub struct ProbeResult {
    pub alpha: Rat,
    pub n: usize,
    pub m: Option<usize>,
    pub samples: usize,
    pub successes: usize,
}

impl ProbeResult {
    pub fn phat(&self) -> f64 {
        if self.samples == 0 {
            0.0
        } else {
            self.successes as f64 / self.samples as f64
        }
    }

    pub fn halfwidth(&self) -> f64 {
        if self.samples == 0 {
            return 0.0;
        }
        let p = self.phat();
        1.96 * (p * (1.0 - p) / self.samples as f64).sqrt()
    }
}

/// CSV with the fixed column contract.
pub fn results_to_csv(results: &[ProbeResult]) -> String {
    let mut out = String::from("alpha_num,alpha_den,n,m,samples,successes,phat,halfwidth\n");
    for r in results {
        out.push_str(&format!(
            "{},{},{},{},{},{},{:.6},{:.6}\n",
            r.alpha.numerator(),
            r.alpha.denominator(),
            r.n,
            r.m.map_or(String::new(), |m| m.to_string()),
            r.samples,
            r.successes,
            r.phat(),
            r.halfwidth()
        ));
    }
    out
}

/// Rough per-cell cost guard: cells whose estimated work exceeds the budget
/// are reported as errors rather than silently skipped.
fn cell_budget_check(est_ops: f64, what: &str) -> Result<()> {
    const BUDGET: f64 = 5e12;
    if est_ops > BUDGET {
        return Err(Error::BudgetExceeded(format!(
            "{what}: estimated {est_ops:.2e} ops exceeds budget {BUDGET:.0e}"
        )));
    }
    Ok(())
}

/// Empirical `Pr(G(n, n^{-alpha}) satisfies the detector)` over the grid.
pub fn probe_sentence(
    detector: &Detector,
    grid: &[(Rat, usize)],
    samples: usize,
    seed: u64,
) -> Result<Vec<ProbeResult>> {
    let mut out = Vec::new();
    for (cell, &(alpha, n)) in grid.iter().enumerate() {
        let pairs = n as f64 * (n as f64 - 1.0) / 2.0;
        let per_sample = match detector {
            Detector::Clique(_) => pairs,
            Detector::Sentence(f) => (n as f64).powi(f.quantifier_depth() as i32) * 16.0,
        };
        cell_budget_check(samples as f64 * per_sample, &detector.name())?;
        let mut successes = 0;
        for s in 0..samples {
            let mut rng = Rng::derived(seed, &[cell as u64, s as u64]);
            let g = sample_gnp(n, derived_p(n, alpha), &mut rng)?;
            if detector.check(&g)? {
                successes += 1;
            }
        }
        out.push(ProbeResult {
            alpha,
            n,
            m: None,
            samples,
            successes,
        });
    }
    Ok(out)
}

/// Empirical probability that Duplicator wins `EHR(X, Y, k)` for independent
/// `X = G(n, n^{-alpha})`, `Y = G(m, m^{-alpha})`.
pub fn probe_ehr(
    grid: &[(Rat, usize, usize)],
    k: usize,
    samples: usize,
    seed: u64,
) -> Result<Vec<ProbeResult>> {
    for &(_, n, m) in grid {
        let cap = if k >= 4 { 14 } else { 30 };
        if n.max(m) > cap || k > 6 {
            return Err(Error::SizeBound {
                what: "probe_ehr cell",
                got: n.max(m),
                limit: cap,
            });
        }
    }
    let mut out = Vec::new();
    for (cell, &(alpha, n, m)) in grid.iter().enumerate() {
        // pairing-set memoization keeps the solver near max(n,m)^(k+1) in
        // practice, far below the naive (n*m)^k game tree
        let est = samples as f64 * (n.max(m) as f64).powi(k as i32 + 1);
        cell_budget_check(est, "ehr")?;
        let mut successes = 0;
        for s in 0..samples {
            let mut rng_x = Rng::derived(seed, &[cell as u64, s as u64, 0]);
            let mut rng_y = Rng::derived(seed, &[cell as u64, s as u64, 1]);
            let x = sample_gnp(n, derived_p(n, alpha), &mut rng_x)?;
            let y = sample_gnp(m, derived_p(m, alpha), &mut rng_y)?;
            if game::winner(&x, &y, k)? == Winner::Duplicator {
                successes += 1;
            }
        }
        out.push(ProbeResult {
            alpha,
            n,
            m: Some(m),
            samples,
            successes,
        });
    }
    Ok(out)
}

/// Empirical frequency that a sampled graph grants a random root tuple a
/// strict `(G, H)`-extension that is `(K, T)`-maximal.
pub fn probe_maximal_extension(
    pair: &LabeledPair,
    template: &LabeledPair,
    grid: &[(Rat, usize)],
    samples: usize,
    seed: u64,
) -> Result<Vec<ProbeResult>> {
    // the pair must be alpha-safe at each grid alpha
    for &(alpha, _) in grid {
        let rp = RootedPair::new(pair.graph.clone(), &pair.order[..pair.k])?;
        match classify_pair(&rp, alpha)? {
            PairClass::Safe => {}
            other => {
                return Err(Error::Hypothesis(format!(
                    "pair must be alpha-safe at {alpha}, got {other:?}"
                )))
            }
        }
    }
    let mut out = Vec::new();
    for (cell, &(alpha, n)) in grid.iter().enumerate() {
        cell_budget_check(
            samples as f64 * (n as f64).powf(1.0 + pair.added() as f64),
            "maximal-extension",
        )?;
        let mut successes = 0;
        for s in 0..samples {
            let mut rng = Rng::derived(seed, &[cell as u64, s as u64]);
            let g = sample_gnp(n, derived_p(n, alpha), &mut rng)?;
            let r = pair.k;
            if g.v() < r {
                continue;
            }
            let roots = rng.distinct(g.v(), r);
            if profiles::has_maximal_strict_extension(&g, pair, &roots, template)? {
                successes += 1;
            }
        }
        out.push(ProbeResult {
            alpha,
            n,
            m: None,
            samples,
            successes,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extreme_p() {
        let mut rng = Rng::seeded(1);
        assert_eq!(sample_gnp(6, 0.0, &mut rng).unwrap().e(), 0);
        assert_eq!(sample_gnp(6, 1.0, &mut rng).unwrap().e(), 15);
        assert!(sample_gnp(6, 1.5, &mut rng).is_err());
    }

    #[test]
    fn determinism() {
        let spec = SampleSpec {
            n: 50,
            alpha: Rat::new(3, 5),
            seed: 99,
        };
        assert_eq!(sample(&spec).unwrap(), sample(&spec).unwrap());
    }

    #[test]
    fn unrank_pairs() {
        let n = 6u64;
        let mut r = 0;
        for u in 0..n {
            for v in u + 1..n {
                assert_eq!(unrank_pair(n, r), (u, v));
                r += 1;
            }
        }
    }

    #[test]
    fn edge_count_mean() {
        // mean edge count within 4 sigma of the binomial mean, three cells
        let cells = [
            (10_000usize, Rat::integer(1)),
            (2_000, Rat::new(2, 3)),
            (500, Rat::new(1, 2)),
        ];
        for (cell, &(n, alpha)) in cells.iter().enumerate() {
            let p = derived_p(n, alpha);
            let pairs = n as f64 * (n as f64 - 1.0) / 2.0;
            let runs = 200;
            let mut total = 0f64;
            for s in 0..runs {
                let mut rng = Rng::derived(7, &[cell as u64, s]);
                total += sample_gnp(n, p, &mut rng).unwrap().e() as f64;
            }
            let mean = total / runs as f64;
            let expect = pairs * p;
            let sigma = (pairs * p * (1.0 - p)).sqrt() / (runs as f64).sqrt();
            assert!(
                (mean - expect).abs() < 4.0 * sigma,
                "cell {cell}: mean {mean} vs {expect} (sigma {sigma})"
            );
        }
    }

    #[test]
    fn skip_and_bernoulli_agree() {
        // two-sample Kolmogorov-Smirnov on edge counts, alpha = 0.01
        let n = 60;
        let p = 0.12;
        let runs = 500;
        let mut a: Vec<usize> = (0..runs)
            .map(|s| {
                let mut rng = Rng::derived(11, &[s]);
                sample_skip(n, p, &mut rng).e()
            })
            .collect();
        let mut b: Vec<usize> = (0..runs)
            .map(|s| {
                let mut rng = Rng::derived(12, &[s]);
                sample_bernoulli(n, p, &mut rng).e()
            })
            .collect();
        a.sort_unstable();
        b.sort_unstable();
        let mut d: f64 = 0.0;
        let (mut i, mut j) = (0usize, 0usize);
        while i < a.len() && j < b.len() {
            if a[i] <= b[j] {
                i += 1;
            } else {
                j += 1;
            }
            let fa = i as f64 / a.len() as f64;
            let fb = j as f64 / b.len() as f64;
            d = d.max((fa - fb).abs());
        }
        // critical value at alpha = 0.01: 1.63 * sqrt(2/runs)
        let crit = 1.63 * (2.0 / runs as f64).sqrt();
        assert!(d < crit, "KS statistic {d} exceeds {crit}");
    }

    #[test]
    fn clique_detectors() {
        assert!(has_clique(&Graph::complete(5), 5));
        assert!(!has_clique(&Graph::complete(4), 5));
        assert!(has_clique(
            &Graph::from_edges(5, &[(0, 1), (1, 2), (2, 0)]),
            3
        ));
        assert!(!has_clique(&Graph::cycle(5), 3));
        assert!(has_clique(&Graph::empty(3), 1));
        assert!(!has_clique(&Graph::empty(0), 1));
    }

    #[test]
    fn infeasible_cell_is_reported() {
        // a depth-4 sentence at n = 10^5 blows the budget and must error
        // out rather than be skipped
        let f = crate::fo::parse("Ax.Ey.Ez.Et.(x~y | y~z | z~t)").unwrap();
        let err = probe_sentence(&Detector::Sentence(f), &[(Rat::new(3, 5), 100_000)], 10, 1);
        assert!(matches!(err, Err(Error::BudgetExceeded(_))));
    }

    #[test]
    fn csv_shape() {
        let r = ProbeResult {
            alpha: Rat::new(3, 5),
            n: 100,
            m: None,
            samples: 10,
            successes: 3,
        };
        let csv = results_to_csv(&[r]);
        assert!(csv.starts_with("alpha_num,alpha_den,n,m,samples,successes,phat,halfwidth\n"));
        assert!(csv.contains("3,5,100,,10,3,0.300000,"));
    }
}
