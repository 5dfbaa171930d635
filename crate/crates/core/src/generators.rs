//! Benchmark graph families. Every generator is deterministic in its seed.
//!
//! CFI wiring: for each base vertex `v` (ascending) with incident edges
//! `e_0 < e_1 < ..` ordered by the other endpoint, the gadget lists its
//! middle vertices first, one per even-size subset `S` of incident edges in
//! ascending bitmask order, then `a(v,e_i,0), a(v,e_i,1)` for each `i`. The
//! middle vertex for `S` is joined to `a(v,e,1)` when `e` is in `S` and to
//! `a(v,e,0)` otherwise. A base edge `{u,v}` joins `a(u,e,i)` to `a(v,e,i)`;
//! the twisted companion crosses the pair for the first base edge in
//! lexicographic order.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::graph::{Graph, Permutation};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Erdős–Rényi `G(n, p)`.
pub fn gnp(n: usize, p: f64, seed: u64) -> Result<Graph> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("edge probability {p} outside [0,1]")));
    }
    let mut r = rng(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if r.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, &edges)
}

/// `G(n, n^(-1/2))`.
pub fn gn_sqrt(n: usize, seed: u64) -> Result<Graph> {
    let p = if n == 0 { 0.0 } else { (n as f64).sqrt().recip().min(1.0) };
    gnp(n, p, seed)
}

/// Random `d`-regular graph from the configuration model, rejecting
/// pairings with loops or repeated edges.
pub fn random_regular(n: usize, d: usize, seed: u64) -> Result<Graph> {
    if d >= n.max(1) || (n * d) % 2 == 1 {
        return Err(Error::InvalidParameter(format!("no {d}-regular graph on {n} vertices")));
    }
    let mut r = rng(seed);
    let mut stubs: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat(v).take(d)).collect();
    for _ in 0..100_000 {
        stubs.shuffle(&mut r);
        let mut edges: Vec<(usize, usize)> = stubs
            .chunks(2)
            .map(|c| if c[0] < c[1] { (c[0], c[1]) } else { (c[1], c[0]) })
            .collect();
        if edges.iter().any(|&(a, b)| a == b) {
            continue;
        }
        edges.sort_unstable();
        if edges.windows(2).any(|w| w[0] == w[1]) {
            continue;
        }
        return Graph::from_edges(n, &edges);
    }
    Err(Error::InvalidParameter(format!("rejection sampling failed for {d}-regular on {n}")))
}

/// The `d`-dimensional hypercube.
pub fn hypercube(d: u32) -> Result<Graph> {
    if d > 20 {
        return Err(Error::InvalidParameter(format!("hypercube dimension {d} too large")));
    }
    let n = 1usize << d;
    let mut edges = Vec::new();
    for v in 0..n {
        for b in 0..d {
            let w = v ^ (1 << b);
            if v < w {
                edges.push((v, w));
            }
        }
    }
    Graph::from_edges(n, &edges)
}

/// Uniform random labelled tree via a random Prüfer sequence.
pub fn random_tree(n: usize, seed: u64) -> Result<Graph> {
    if n <= 2 {
        let edges: Vec<_> = if n == 2 { vec![(0, 1)] } else { vec![] };
        return Graph::from_edges(n, &edges);
    }
    let mut r = rng(seed);
    let code: Vec<usize> = (0..n - 2).map(|_| r.gen_range(0..n)).collect();
    Graph::from_edges(n, &prufer_decode(n, &code))
}

fn prufer_decode(n: usize, code: &[usize]) -> Vec<(usize, usize)> {
    let mut degree = vec![1usize; n];
    for &c in code {
        degree[c] += 1;
    }
    let mut leaves: std::collections::BTreeSet<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
    let mut edges = Vec::with_capacity(n - 1);
    for &c in code {
        let leaf = *leaves.iter().next().unwrap();
        leaves.remove(&leaf);
        edges.push((leaf.min(c), leaf.max(c)));
        degree[c] -= 1;
        if degree[c] == 1 {
            leaves.insert(c);
        }
    }
    let rest: Vec<usize> = leaves.into_iter().collect();
    edges.push((rest[0], rest[1]));
    edges
}

/// A uniformly random permutation of `0..n`.
pub fn random_permutation(n: usize, seed: u64) -> Permutation {
    let mut images: Vec<usize> = (0..n).collect();
    images.shuffle(&mut rng(seed));
    Permutation::from_images(images).expect("shuffle is a bijection")
}

/// `g` under a random relabelling, together with that relabelling.
pub fn random_relabel(g: &Graph, seed: u64) -> (Graph, Permutation) {
    let perm = random_permutation(g.n(), seed);
    (g.permuted(&perm).expect("sizes agree"), perm)
}

fn is_connected(g: &Graph) -> bool {
    if g.n() == 0 {
        return true;
    }
    let mut seen = vec![false; g.n()];
    let mut stack = vec![0];
    seen[0] = true;
    let mut count = 1;
    while let Some(v) = stack.pop() {
        for &u in g.neighbours(v) {
            if !seen[u] {
                seen[u] = true;
                count += 1;
                stack.push(u);
            }
        }
    }
    count == g.n()
}

/// The untwisted and once-twisted CFI graphs over a connected base.
pub fn cfi_pair(base: &Graph) -> Result<(Graph, Graph)> {
    if base.m() == 0 || !is_connected(base) {
        return Err(Error::InvalidParameter("CFI base must be connected with an edge".into()));
    }
    if let Some(v) = (0..base.n()).find(|&v| base.degree(v) > 16) {
        return Err(Error::InvalidParameter(format!("CFI base vertex {v} has degree above 16")));
    }
    // a_index[v][i] is the id of a(v, e_i, 0); a(v, e_i, 1) follows it.
    let mut a_index: Vec<Vec<usize>> = Vec::with_capacity(base.n());
    let mut inner = Vec::new();
    let mut next = 0usize;
    for v in 0..base.n() {
        let nb = base.neighbours(v);
        let d = nb.len();
        let middles: Vec<u32> = (0u32..1 << d).filter(|s| s.count_ones() % 2 == 0).collect();
        let first_a = next + middles.len();
        let a: Vec<usize> = (0..d).map(|i| first_a + 2 * i).collect();
        for (k, &s) in middles.iter().enumerate() {
            for (i, &ai) in a.iter().enumerate() {
                let bit = (s >> i & 1) as usize;
                inner.push((next + k, ai + bit));
            }
        }
        next = first_a + 2 * d;
        a_index.push(a);
    }
    let slot = |v: usize, w: usize| base.neighbours(v).binary_search(&w).unwrap();
    let mut plain = inner.clone();
    let mut twisted = inner;
    let first_edge = base.edges().next().unwrap();
    for (u, v) in base.edges() {
        let au = a_index[u][slot(u, v)];
        let av = a_index[v][slot(v, u)];
        plain.push((au, av));
        plain.push((au + 1, av + 1));
        if (u, v) == first_edge {
            twisted.push((au, av + 1));
            twisted.push((au + 1, av));
        } else {
            twisted.push((au, av));
            twisted.push((au + 1, av + 1));
        }
    }
    Ok((Graph::from_edges(next, &plain)?, Graph::from_edges(next, &twisted)?))
}

/// A connected random `d`-regular base graph.
pub fn connected_regular(n: usize, d: usize, seed: u64) -> Result<Graph> {
    for attempt in 0..1000u64 {
        let g = random_regular(n, d, seed.wrapping_add(attempt.wrapping_mul(0x9e37_79b9)))?;
        if is_connected(&g) {
            return Ok(g);
        }
    }
    Err(Error::InvalidParameter(format!("no connected {d}-regular graph on {n} found")))
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    Gnp { n: usize, p: f64 },
    GnSqrt { n: usize },
    RandomRegular { n: usize, d: usize },
    Hypercube { d: u32 },
    RandomTree { n: usize },
    /// CFI pair over a connected random regular base with `n` vertices.
    CfiPair { n: usize, d: usize },
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
pub struct FamilySpec {
    #[serde(flatten)]
    pub family: Family,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Generated {
    Single(Graph),
    Pair(Graph, Graph),
}

impl Generated {
    pub fn graphs(&self) -> Vec<&Graph> {
        match self {
            Generated::Single(g) => vec![g],
            Generated::Pair(a, b) => vec![a, b],
        }
    }
}

pub fn generate(spec: &FamilySpec) -> Result<Generated> {
    let seed = spec.seed;
    Ok(match spec.family {
        Family::Gnp { n, p } => Generated::Single(gnp(n, p, seed)?),
        Family::GnSqrt { n } => Generated::Single(gn_sqrt(n, seed)?),
        Family::RandomRegular { n, d } => Generated::Single(random_regular(n, d, seed)?),
        Family::Hypercube { d } => Generated::Single(hypercube(d)?),
        Family::RandomTree { n } => Generated::Single(random_tree(n, seed)?),
        Family::CfiPair { n, d } => {
            let (a, b) = cfi_pair(&connected_regular(n, d, seed)?)?;
            Generated::Pair(a, b)
        }
    })
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Gnp { .. } => "gnp",
            Family::GnSqrt { .. } => "gn_sqrt",
            Family::RandomRegular { .. } => "random_regular",
            Family::Hypercube { .. } => "hypercube",
            Family::RandomTree { .. } => "random_tree",
            Family::CfiPair { .. } => "cfi_pair",
        }
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            Family::Gnp { n, p } => write!(f, "gnp:n={n},p={p}")?,
            Family::GnSqrt { n } => write!(f, "gn_sqrt:n={n}")?,
            Family::RandomRegular { n, d } => write!(f, "random_regular:n={n},d={d}")?,
            Family::Hypercube { d } => write!(f, "hypercube:d={d}")?,
            Family::RandomTree { n } => write!(f, "random_tree:n={n}")?,
            Family::CfiPair { n, d } => write!(f, "cfi_pair:n={n},d={d}")?,
        }
        write!(f, ",seed={}", self.seed)
    }
}

/// Parses `family:key=value,...`, for example `gnp:n=100,p=0.5,seed=3`.
impl FromStr for FamilySpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |m: String| Error::InvalidParameter(m);
        let (name, rest) = s.split_once(':').unwrap_or((s, ""));
        let mut kv = std::collections::BTreeMap::new();
        for part in rest.split(',').filter(|p| !p.is_empty()) {
            let (k, v) = part.split_once('=').ok_or_else(|| bad(format!("expected key=value, got {part:?}")))?;
            kv.insert(k.trim().to_string(), v.trim().to_string());
        }
        let get = |k: &str| kv.get(k).ok_or_else(|| bad(format!("{name} needs {k}=")));
        let int = |k: &str| -> Result<usize> { get(k)?.parse().map_err(|_| bad(format!("bad integer for {k}"))) };
        let family = match name {
            "gnp" if get("p")? == "sqrt" => Family::GnSqrt { n: int("n")? },
            "gnp" => Family::Gnp {
                n: int("n")?,
                p: get("p")?.parse().map_err(|_| bad(format!("bad probability for {name}")))?,
            },
            "gn_sqrt" => Family::GnSqrt { n: int("n")? },
            "random_regular" | "regular" => Family::RandomRegular { n: int("n")?, d: int("d")? },
            "cubic" => Family::RandomRegular { n: int("n")?, d: 3 },
            "hypercube" => Family::Hypercube { d: int("d")? as u32 },
            "random_tree" | "tree" => Family::RandomTree { n: int("n")? },
            "cfi_pair" | "cfi" => Family::CfiPair {
                n: int("n")?,
                d: kv.get("d").map(|d| d.parse()).transpose().map_err(|_| bad("bad degree".into()))?.unwrap_or(3),
            },
            other => return Err(bad(format!("unknown family {other:?}"))),
        };
        let seed = match kv.get("seed") {
            Some(s) => s.parse().map_err(|_| bad(format!("bad seed {s:?}")))?,
            None => 0,
        };
        Ok(FamilySpec { family, seed })
    }
}
