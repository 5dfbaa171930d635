//! Value types: graphs, ordered colourings and permutations, with the
//! relabelling actions of the symmetric group on each of them.
//!
//! Vertices are `0..n`. Permutations act on the right and compose left to
//! right: `v^(a*b) = (v^a)^b`.

use std::fmt;
use std::ops::Mul;

use crate::error::{Error, Result};

/// Fraction of `n^2` above which the packed adjacency matrix is materialized.
pub const DEFAULT_DENSITY_DIVISOR: usize = 8;

/// Packed adjacency rows, one bit per vertex pair.
#[derive(Clone, Debug)]
struct BitRows {
    words: usize,
    bits: Vec<u64>,
}

impl BitRows {
    fn new(n: usize) -> Self {
        let words = n.div_ceil(64);
        BitRows {
            words,
            bits: vec![0; words * n],
        }
    }

    #[inline]
    fn set(&mut self, u: usize, v: usize) {
        self.bits[u * self.words + v / 64] |= 1 << (v % 64);
    }

    #[inline]
    fn get(&self, u: usize, v: usize) -> bool {
        self.bits[u * self.words + v / 64] >> (v % 64) & 1 == 1
    }
}

/// Undirected simple graph on `0..n`.
///
/// Sorted neighbour lists are always present; a packed bit matrix is added
/// when the graph is dense enough to make constant-time adjacency tests pay.
#[derive(Clone, Debug)]
pub struct Graph {
    n: usize,
    m: usize,
    adj: Vec<Vec<usize>>,
    dense: Option<BitRows>,
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.adj == other.adj
    }
}

impl Eq for Graph {}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph {
            n,
            m: 0,
            adj: vec![Vec::new(); n],
            dense: None,
        }
    }

    /// Builds a graph from an edge list. Duplicate edges collapse; self-loops
    /// and out-of-range endpoints are rejected.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        Self::from_edges_with_threshold(n, edges, DEFAULT_DENSITY_DIVISOR)
    }

    /// As [`Graph::from_edges`], materializing the bit matrix when
    /// `m > n^2 / divisor`. A divisor of 0 never materializes it.
    pub fn from_edges_with_threshold(
        n: usize,
        edges: &[(usize, usize)],
        divisor: usize,
    ) -> Result<Self> {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            for x in [u, v] {
                if x >= n {
                    return Err(Error::VertexOutOfRange { vertex: x, n });
                }
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        let m = adj.iter().map(Vec::len).sum::<usize>() / 2;
        let mut g = Graph {
            n,
            m,
            adj,
            dense: None,
        };
        if divisor > 0 && m * divisor > n * n {
            g.materialize_dense();
        }
        Ok(g)
    }

    /// Forces the packed representation on.
    pub fn materialize_dense(&mut self) {
        if self.dense.is_some() {
            return;
        }
        let mut rows = BitRows::new(self.n);
        for (u, list) in self.adj.iter().enumerate() {
            for &v in list {
                rows.set(u, v);
            }
        }
        self.dense = Some(rows);
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn is_dense(&self) -> bool {
        self.dense.is_some()
    }

    #[inline]
    pub fn neighbours(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    #[inline]
    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        match &self.dense {
            Some(rows) => rows.get(u, v),
            None => self.adj[u].binary_search(&v).is_ok(),
        }
    }

    /// Edges as `(u, v)` with `u < v`, in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
    }

    /// `G^g`: `v^g ~ w^g` exactly when `v ~ w`.
    pub fn permuted(&self, g: &Permutation) -> Result<Graph> {
        check_len(self.n, g.len())?;
        let mut adj = vec![Vec::new(); self.n];
        for (u, list) in self.adj.iter().enumerate() {
            let gu = g.image(u);
            adj[gu] = list.iter().map(|&v| g.image(v)).collect();
            adj[gu].sort_unstable();
        }
        let mut out = Graph {
            n: self.n,
            m: self.m,
            adj,
            dense: None,
        };
        if self.dense.is_some() {
            out.materialize_dense();
        }
        Ok(out)
    }

    /// True when `g` maps every edge onto an edge.
    pub fn is_automorphism(&self, g: &Permutation) -> bool {
        if g.len() != self.n {
            return false;
        }
        self.adj.iter().enumerate().all(|(u, list)| {
            let gu = g.image(u);
            list.len() == self.adj[gu].len() && list.iter().all(|&v| self.adjacent(gu, g.image(v)))
        })
    }
}

/// `G^g`.
pub fn apply_perm_graph(g: &Graph, perm: &Permutation) -> Result<Graph> {
    g.permuted(perm)
}

fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::Dimension { expected, found })
    }
}

/// A bijection of `0..n`, stored as its image array.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation {
            images: (0..n).collect(),
        }
    }

    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in &images {
            if x >= n || seen[x] {
                return Err(Error::NotBijection(format!("{images:?}")));
            }
            seen[x] = true;
        }
        Ok(Permutation { images })
    }

    pub(crate) fn from_images_unchecked(images: Vec<usize>) -> Self {
        debug_assert!(Permutation::from_images(images.clone()).is_ok());
        Permutation { images }
    }

    /// Builds a permutation of degree `n` from disjoint cycles.
    pub fn from_cycles(n: usize, cycles: &[&[usize]]) -> Result<Self> {
        let mut images: Vec<usize> = (0..n).collect();
        let mut touched = vec![false; n];
        for cycle in cycles {
            for (i, &v) in cycle.iter().enumerate() {
                if v >= n {
                    return Err(Error::VertexOutOfRange { vertex: v, n });
                }
                if touched[v] {
                    return Err(Error::NotBijection(format!("{v} repeated in cycles")));
                }
                touched[v] = true;
                images[v] = cycle[(i + 1) % cycle.len()];
            }
        }
        Ok(Permutation { images })
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    #[inline]
    pub fn image(&self, v: usize) -> usize {
        self.images[v]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i == x)
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.len()];
        for (v, &x) in self.images.iter().enumerate() {
            inv[x] = v;
        }
        Permutation { images: inv }
    }

    /// `self * other`: apply `self` first, then `other`.
    pub fn then(&self, other: &Permutation) -> Result<Permutation> {
        check_len(self.len(), other.len())?;
        Ok(self.then_unchecked(other))
    }

    #[inline]
    pub(crate) fn then_unchecked(&self, other: &Permutation) -> Permutation {
        Permutation {
            images: self.images.iter().map(|&x| other.images[x]).collect(),
        }
    }

    /// Disjoint cycles of length at least 2, each starting at its smallest
    /// element, sorted by that element.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.len()];
        let mut out = Vec::new();
        for start in 0..self.len() {
            if seen[start] || self.images[start] == start {
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut v = self.images[start];
            while v != start {
                seen[v] = true;
                cycle.push(v);
                v = self.images[v];
            }
            out.push(cycle);
        }
        out
    }
}

/// `perm_compose(a, b) = a * b`.
pub fn perm_compose(a: &Permutation, b: &Permutation) -> Result<Permutation> {
    a.then(b)
}

pub fn perm_inverse(a: &Permutation) -> Permutation {
    a.inverse()
}

impl Mul for &Permutation {
    type Output = Permutation;

    fn mul(self, rhs: &Permutation) -> Permutation {
        assert_eq!(self.len(), rhs.len(), "permutation degrees differ");
        self.then_unchecked(rhs)
    }
}

impl fmt::Display for Permutation {
    /// Disjoint cycle notation, fixed points omitted; identity prints `()`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return f.write_str("()");
        }
        for cycle in cycles {
            f.write_str("(")?;
            for (i, v) in cycle.iter().enumerate() {
                if i > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "{v}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Ordered partition of `0..n`. Colours are cell indices `0..k`; the cell
/// list is in colour order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Colouring {
    colour_of: Vec<usize>,
    cells: Vec<Vec<usize>>,
}

impl Colouring {
    pub fn unit(n: usize) -> Self {
        let cells = if n == 0 { Vec::new() } else { vec![(0..n).collect()] };
        Colouring {
            colour_of: vec![0; n],
            cells,
        }
    }

    pub fn discrete_identity(n: usize) -> Self {
        Colouring {
            colour_of: (0..n).collect(),
            cells: (0..n).map(|v| vec![v]).collect(),
        }
    }

    /// From a colour map that must be surjective onto `0..k`.
    pub fn from_colours(colour_of: Vec<usize>) -> Result<Self> {
        let k = colour_of.iter().map(|&c| c + 1).max().unwrap_or(0);
        let mut cells = vec![Vec::new(); k];
        for (v, &c) in colour_of.iter().enumerate() {
            cells[c].push(v);
        }
        if let Some(c) = cells.iter().position(Vec::is_empty) {
            return Err(Error::Precondition(format!("colour {c} is unused")));
        }
        Ok(Colouring { colour_of, cells })
    }

    /// From arbitrary integer labels: vertices are grouped by label and cells
    /// ordered by ascending label.
    pub fn from_labels(labels: &[i64]) -> Self {
        let mut distinct: Vec<i64> = labels.to_vec();
        distinct.sort_unstable();
        distinct.dedup();
        let colour_of = labels
            .iter()
            .map(|l| distinct.binary_search(l).unwrap())
            .collect();
        Colouring::from_colours(colour_of).unwrap()
    }

    /// From an ordered list of cells that must partition `0..n`.
    pub fn from_cells(n: usize, cells: Vec<Vec<usize>>) -> Result<Self> {
        let mut colour_of = vec![usize::MAX; n];
        for (c, cell) in cells.iter().enumerate() {
            if cell.is_empty() {
                return Err(Error::Precondition(format!("cell {c} is empty")));
            }
            for &v in cell {
                if v >= n {
                    return Err(Error::VertexOutOfRange { vertex: v, n });
                }
                if colour_of[v] != usize::MAX {
                    return Err(Error::Precondition(format!("vertex {v} in two cells")));
                }
                colour_of[v] = c;
            }
        }
        if let Some(v) = colour_of.iter().position(|&c| c == usize::MAX) {
            return Err(Error::Precondition(format!("vertex {v} is uncoloured")));
        }
        let mut cells = cells;
        for cell in &mut cells {
            cell.sort_unstable();
        }
        Ok(Colouring { colour_of, cells })
    }

    pub fn n(&self) -> usize {
        self.colour_of.len()
    }

    /// Number of colours, `|π|`.
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    #[inline]
    pub fn colour(&self, v: usize) -> usize {
        self.colour_of[v]
    }

    pub fn colours(&self) -> &[usize] {
        &self.colour_of
    }

    pub fn cells(&self) -> &[Vec<usize>] {
        &self.cells
    }

    pub fn cell(&self, c: usize) -> &[usize] {
        &self.cells[c]
    }

    pub fn is_discrete(&self) -> bool {
        self.cells.len() == self.colour_of.len()
    }

    /// A discrete colouring read as the permutation `v -> colour(v)`.
    pub fn as_permutation(&self) -> Result<Permutation> {
        if !self.is_discrete() {
            return Err(Error::Precondition("colouring is not discrete".into()));
        }
        Ok(Permutation::from_images_unchecked(self.colour_of.clone()))
    }

    /// The relabelled colouring `π^g`, defined by `π^g(v^g) = π(v)` so that
    /// `(G, π)^g` is a relabelling of `(G, π)`.
    pub fn permuted(&self, g: &Permutation) -> Result<Colouring> {
        check_len(self.n(), g.len())?;
        let mut colour_of = vec![0; self.n()];
        for (v, &c) in self.colour_of.iter().enumerate() {
            colour_of[g.image(v)] = c;
        }
        let cells = self
            .cells
            .iter()
            .map(|cell| {
                let mut c: Vec<usize> = cell.iter().map(|&v| g.image(v)).collect();
                c.sort_unstable();
                c
            })
            .collect();
        Ok(Colouring { colour_of, cells })
    }

    /// `self ⪯ other`: `other(v) < other(w)` implies `self(v) < self(w)`.
    pub fn finer_or_equal(&self, other: &Colouring) -> Result<bool> {
        check_len(self.n(), other.n())?;
        // Each cell must sit inside one cell of `other`, and the induced map
        // on colours must be non-decreasing.
        let mut last = 0;
        for cell in &self.cells {
            let c = other.colour(cell[0]);
            if cell.iter().any(|&v| other.colour(v) != c) || c < last {
                return Ok(false);
            }
            last = c;
        }
        Ok(true)
    }
}

pub fn apply_perm_colouring(p: &Colouring, g: &Permutation) -> Result<Colouring> {
    p.permuted(g)
}

pub fn finer_or_equal(p1: &Colouring, p2: &Colouring) -> Result<bool> {
    p1.finer_or_equal(p2)
}

/// A graph together with an initial colouring: the unit of work.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColouredGraph {
    pub graph: Graph,
    pub colouring: Colouring,
}

impl ColouredGraph {
    pub fn new(graph: Graph, colouring: Colouring) -> Result<Self> {
        check_len(graph.n(), colouring.n())?;
        Ok(ColouredGraph { graph, colouring })
    }

    pub fn uncoloured(graph: Graph) -> Self {
        let colouring = Colouring::unit(graph.n());
        ColouredGraph { graph, colouring }
    }

    pub fn permuted(&self, g: &Permutation) -> Result<ColouredGraph> {
        Ok(ColouredGraph {
            graph: self.graph.permuted(g)?,
            colouring: self.colouring.permuted(g)?,
        })
    }
}
