//! Node invariants: the per-level refinement trace, leaf certificates and
//! quotient graphs.
//!
//! Certificate layout (all integers little-endian `u32`):
//!
//! ```text
//! level_count
//! repeat level_count: len, value_0 .. value_{len-1}
//! n
//! upper-triangle adjacency bits of G^π: rows ascending, columns ascending
//! within a row, most significant bit first, zero-padded to a byte
//! ```

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::graph::{Colouring, Graph};
use crate::refine::Partition;

/// Outcome of comparing a reference trace against a candidate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TraceCmp {
    /// The reference is smaller.
    Less,
    /// No difference yet; keep going.
    EqualPrefix,
    /// The reference is larger.
    Greater,
}

impl From<Ordering> for TraceCmp {
    fn from(o: Ordering) -> Self {
        match o {
            Ordering::Less => TraceCmp::Less,
            Ordering::Equal => TraceCmp::EqualPrefix,
            Ordering::Greater => TraceCmp::Greater,
        }
    }
}

/// A vector of per-level integer vectors, ordered lexicographically level by
/// level (a level that is a proper prefix of another is smaller).
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct TraceValue {
    levels: Vec<Vec<u32>>,
}

impl TraceValue {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_levels(levels: Vec<Vec<u32>>) -> Self {
        TraceValue { levels }
    }

    pub fn levels(&self) -> &[Vec<u32>] {
        &self.levels
    }

    pub fn level(&self, i: usize) -> &[u32] {
        &self.levels[i]
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn push(&mut self, fragment: Vec<u32>) {
        self.levels.push(fragment);
    }

    pub fn truncate(&mut self, len: usize) {
        self.levels.truncate(len);
    }

    pub fn flattened(&self) -> Vec<u32> {
        self.levels.iter().flatten().copied().collect()
    }

    /// Orders the first `depth` levels of both values.
    pub fn cmp_prefix(&self, other: &TraceValue, depth: usize) -> Ordering {
        self.levels[..depth].cmp(&other.levels[..depth])
    }

    fn encode_into(&self, out: &mut Vec<u8>) {
        out.extend_from_slice(&(self.levels.len() as u32).to_le_bytes());
        for level in &self.levels {
            out.extend_from_slice(&(level.len() as u32).to_le_bytes());
            for &x in level {
                out.extend_from_slice(&x.to_le_bytes());
            }
        }
    }
}

impl PartialOrd for TraceValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for TraceValue {
    fn cmp(&self, other: &Self) -> Ordering {
        self.levels.cmp(&other.levels)
    }
}

/// Returns `t` extended by one level.
pub fn trace_append(t: &TraceValue, fragment: &[u32]) -> TraceValue {
    let mut out = t.clone();
    out.push(fragment.to_vec());
    out
}

/// Compares a complete reference against a partially evaluated candidate.
///
/// Both must have the same number of levels; all candidate levels except the
/// last are complete, and the last may still be growing. A `Less` or
/// `Greater` verdict holds for every extension of the candidate.
pub fn trace_compare_incremental(reference: &TraceValue, candidate: &TraceValue) -> Result<TraceCmp> {
    if reference.len() != candidate.len() || reference.is_empty() {
        return Err(Error::Precondition(format!(
            "trace depth mismatch: reference {} levels, candidate {}",
            reference.len(),
            candidate.len()
        )));
    }
    let last = reference.len() - 1;
    match reference.cmp_prefix(candidate, last) {
        Ordering::Equal => {}
        o => return Ok(o.into()),
    }
    let mut inc = IncrementalCmp::new(&reference.levels[last]);
    Ok(inc.update(&candidate.levels[last]))
}

/// Streaming comparison of one reference level against a growing candidate
/// level. Only the new tail of the candidate is inspected on each update.
#[derive(Clone, Debug)]
pub struct IncrementalCmp<'a> {
    reference: &'a [u32],
    seen: usize,
    verdict: TraceCmp,
}

impl<'a> IncrementalCmp<'a> {
    pub fn new(reference: &'a [u32]) -> Self {
        IncrementalCmp {
            reference,
            seen: 0,
            verdict: TraceCmp::EqualPrefix,
        }
    }

    /// Verdict from the reference's point of view after seeing `candidate`.
    pub fn update(&mut self, candidate: &[u32]) -> TraceCmp {
        if self.verdict != TraceCmp::EqualPrefix {
            return self.verdict;
        }
        while self.seen < candidate.len() {
            let i = self.seen;
            self.seen += 1;
            match self.reference.get(i) {
                // The reference ended first, so it is the smaller.
                None => {
                    self.verdict = TraceCmp::Less;
                    break;
                }
                Some(&r) if r != candidate[i] => {
                    self.verdict = r.cmp(&candidate[i]).into();
                    break;
                }
                _ => {}
            }
        }
        self.verdict
    }

    /// Verdict once the candidate level is complete.
    pub fn finish(&mut self, candidate: &[u32]) -> Ordering {
        match self.update(candidate) {
            TraceCmp::Less => Ordering::Less,
            TraceCmp::Greater => Ordering::Greater,
            TraceCmp::EqualPrefix => self.reference.len().cmp(&candidate.len()),
        }
    }
}

/// Cells with `(colour, size)` labels and symmetric inter-cell edge counts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientGraph {
    pub cell_labels: Vec<(usize, usize)>,
    pub edge_weights: Vec<Vec<usize>>,
}

impl QuotientGraph {
    /// Sum of weights with each intra-cell count taken once.
    pub fn total_weight(&self) -> usize {
        let k = self.edge_weights.len();
        (0..k)
            .map(|i| (i..k).map(|j| self.edge_weights[i][j]).sum::<usize>())
            .sum()
    }
}

/// Quotient graph of `g` under `p`. Colours are reported 1-based.
pub fn quotient(g: &Graph, p: &Colouring) -> QuotientGraph {
    debug_assert!(Partition::from_colouring(p).is_equitable(g));
    let k = p.len();
    let mut w = vec![vec![0usize; k]; k];
    for (u, v) in g.edges() {
        let (a, b) = (p.colour(u), p.colour(v));
        w[a][b] += 1;
        if a != b {
            w[b][a] += 1;
        }
    }
    QuotientGraph {
        cell_labels: p.cells().iter().enumerate().map(|(i, c)| (i + 1, c.len())).collect(),
        edge_weights: w,
    }
}

/// Byte certificate of a leaf: its trace followed by the relabelled graph.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LeafCertificate {
    bytes: Vec<u8>,
}

impl LeafCertificate {
    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn to_hex(&self) -> String {
        hex::encode(&self.bytes)
    }
}

/// Packed upper triangle of `G^π`, where `label[v]` is the new name of `v`.
pub(crate) fn relabelled_bits(g: &Graph, label: &[usize]) -> Vec<u8> {
    let n = g.n();
    let total = n * n.saturating_sub(1) / 2;
    let mut bits = vec![0u8; total.div_ceil(8)];
    // Row i starts after sum_{r<i} (n-1-r) bits.
    let row_offset = |i: usize| i * (2 * n - i - 1) / 2;
    for (u, v) in g.edges() {
        let (a, b) = {
            let (x, y) = (label[u], label[v]);
            if x < y { (x, y) } else { (y, x) }
        };
        let idx = row_offset(a) + (b - a - 1);
        bits[idx / 8] |= 0x80 >> (idx % 8);
    }
    bits
}

pub(crate) fn certificate_from_parts(trace: &TraceValue, n: usize, graph_bits: &[u8]) -> LeafCertificate {
    let mut bytes = Vec::with_capacity(graph_bits.len() + 4 * trace.len() + 8);
    trace.encode_into(&mut bytes);
    bytes.extend_from_slice(&(n as u32).to_le_bytes());
    bytes.extend_from_slice(graph_bits);
    LeafCertificate { bytes }
}

/// Certificate of the discrete colouring `p` with trace `t`.
pub fn leaf_certificate(g: &Graph, p: &Colouring, t: &TraceValue) -> Result<LeafCertificate> {
    if g.n() != p.n() {
        return Err(Error::Dimension {
            expected: g.n(),
            found: p.n(),
        });
    }
    if !p.is_discrete() {
        return Err(Error::Precondition("leaf certificate needs a discrete colouring".into()));
    }
    let bits = relabelled_bits(g, p.colours());
    Ok(certificate_from_parts(t, g.n(), &bits))
}

/// Optional extra invariant appended to each trace level after refinement.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum InvariantHook {
    #[default]
    None,
    /// Per non-singleton cell, the sorted sizes of distance-≤2 balls.
    Distance2,
}

impl InvariantHook {
    pub(crate) fn append(&self, g: &Graph, part: &Partition, out: &mut Vec<u32>) {
        match self {
            InvariantHook::None => {}
            InvariantHook::Distance2 => {
                let mut mark = vec![usize::MAX; g.n()];
                let mut sizes = Vec::new();
                for s in part.cell_starts() {
                    if part.cell_len(s) < 2 {
                        continue;
                    }
                    sizes.clear();
                    for &v in part.cell(s) {
                        let mut count = 0u32;
                        mark[v] = v;
                        for &u in g.neighbours(v) {
                            if mark[u] != v {
                                mark[u] = v;
                                count += 1;
                            }
                            for &w in g.neighbours(u) {
                                if mark[w] != v {
                                    mark[w] = v;
                                    count += 1;
                                }
                            }
                        }
                        sizes.push(count);
                    }
                    sizes.sort_unstable();
                    out.push(s as u32);
                    out.extend_from_slice(&sizes);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tv(levels: &[&[u32]]) -> TraceValue {
        TraceValue::from_levels(levels.iter().map(|l| l.to_vec()).collect())
    }

    #[test]
    fn append_levels() {
        let t = trace_append(&TraceValue::new(), &[3, 1]);
        assert_eq!(t, tv(&[&[3, 1]]));
        let t = trace_append(&t, &[]);
        assert_eq!(t, tv(&[&[3, 1], &[]]));
        let a = trace_append(&trace_append(&TraceValue::new(), &[1]), &[2]);
        assert_eq!(a.levels(), tv(&[&[1], &[2]]).levels());
    }

    #[test]
    fn incremental_comparison() {
        let r = tv(&[&[3, 1], &[5]]);
        let c = tv(&[&[3, 1], &[4]]);
        assert_eq!(trace_compare_incremental(&r, &c).unwrap(), TraceCmp::Greater);
        assert_eq!(trace_compare_incremental(&r, &r).unwrap(), TraceCmp::EqualPrefix);
        let r = tv(&[&[3, 1]]);
        let c = tv(&[&[3, 2]]);
        assert_eq!(trace_compare_incremental(&r, &c).unwrap(), TraceCmp::Less);
        assert!(trace_compare_incremental(&r, &tv(&[&[3], &[1]])).is_err());
    }

    #[test]
    fn incremental_handles_prefixes() {
        let mut inc = IncrementalCmp::new(&[1, 2]);
        assert_eq!(inc.update(&[1]), TraceCmp::EqualPrefix);
        assert_eq!(inc.finish(&[1]), Ordering::Greater);
        let mut inc = IncrementalCmp::new(&[1, 2]);
        assert_eq!(inc.update(&[1, 2, 0]), TraceCmp::Less);
    }

    #[test]
    fn quotient_small_cases() {
        let c4 = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let p = Colouring::from_cells(4, vec![vec![0, 2], vec![1, 3]]).unwrap();
        let q = quotient(&c4, &p);
        assert_eq!(q.cell_labels, vec![(1, 2), (2, 2)]);
        assert_eq!(q.edge_weights, vec![vec![0, 4], vec![4, 0]]);
        assert_eq!(q.total_weight(), 4);

        let k4 = Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        let q = quotient(&k4, &Colouring::unit(4));
        assert_eq!(q.cell_labels, vec![(1, 4)]);
        assert_eq!(q.edge_weights, vec![vec![6]]);
    }

    #[test]
    fn complete_graph_certificates_agree() {
        let k3 = Graph::from_edges(3, &[(0, 1), (0, 2), (1, 2)]).unwrap();
        let t = tv(&[&[1]]);
        let first = leaf_certificate(&k3, &Colouring::discrete_identity(3), &t).unwrap();
        for images in [[0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]] {
            let p = Colouring::from_colours(images.to_vec()).unwrap();
            assert_eq!(leaf_certificate(&k3, &p, &t).unwrap(), first);
        }
    }

    #[test]
    fn path_certificates_distinguish_centre() {
        let p3 = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let t = TraceValue::new();
        // Centre relabelled to 1: edges {0,1},{1,2} -> bits 1,0,1.
        let a = leaf_certificate(&p3, &Colouring::from_colours(vec![0, 1, 2]).unwrap(), &t).unwrap();
        // Centre relabelled to 0: edges {0,1},{0,2} -> bits 1,1,0.
        let b = leaf_certificate(&p3, &Colouring::from_colours(vec![1, 0, 2]).unwrap(), &t).unwrap();
        assert_ne!(a, b);
        assert_eq!(a.as_bytes()[8..], [0b1010_0000]);
        assert_eq!(b.as_bytes()[8..], [0b1100_0000]);
        let again = leaf_certificate(&p3, &Colouring::from_colours(vec![0, 1, 2]).unwrap(), &t).unwrap();
        assert_eq!(a, again);
        assert!(leaf_certificate(&p3, &Colouring::unit(3), &t).is_err());
    }

    #[test]
    fn certificate_matches_relabelled_graph() {
        let g = Graph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (0, 2)]).unwrap();
        let t = TraceValue::new();
        let pi = Colouring::from_colours(vec![3, 0, 4, 1, 2]).unwrap();
        let sigma = Colouring::from_colours(vec![2, 4, 0, 1, 3]).unwrap();
        let a = leaf_certificate(&g, &pi, &t).unwrap();
        let b = leaf_certificate(&g, &sigma, &t).unwrap();
        let ga = g.permuted(&pi.as_permutation().unwrap()).unwrap();
        let gb = g.permuted(&sigma.as_permutation().unwrap()).unwrap();
        assert_eq!(a == b, ga == gb);
    }
}
