//! Nodes whose non-singleton cells hold only vertices of degree 0, 1, 2 or
//! n-1. What is left is a union of labelled paths and cycles plus cells of
//! universal vertices, whose stabilizer can be written down directly.

use std::collections::BTreeMap;

use crate::graph::{Colouring, Graph, Permutation};
use crate::refine::Partition;

/// Generators and a forced discrete refinement for a low-degree node.
#[derive(Clone, Debug)]
pub struct LowDegreeOutcome {
    pub generators: Vec<Permutation>,
    /// `v -> position` in the forced discrete refinement.
    pub label: Vec<usize>,
}

/// The shortcut on a refined colouring `p` of `g`, or `None` if some
/// non-singleton cell has a vertex of another degree.
pub fn low_degree_shortcut(g: &Graph, p: &Colouring) -> Option<LowDegreeOutcome> {
    let part = Partition::from_colouring(p);
    applies(g, &part).then(|| analyse(g, &part))
}

fn low(g: &Graph, v: usize) -> bool {
    let d = g.degree(v);
    d <= 2 || d + 1 == g.n()
}

/// True if the partition is not discrete and every non-singleton cell is
/// low-degree. Cells of an equitable partition have uniform degree.
pub(crate) fn applies(g: &Graph, part: &Partition) -> bool {
    let mut any = false;
    for s in part.cell_starts() {
        if part.cell_len(s) > 1 {
            if !low(g, part.cell(s)[0]) {
                return false;
            }
            any = true;
        }
    }
    any
}

struct Component {
    cycle: bool,
    /// Vertices in canonical traversal order.
    order: Vec<usize>,
    seq: Vec<Vec<usize>>,
}

pub(crate) fn analyse(g: &Graph, part: &Partition) -> LowDegreeOutcome {
    let n = g.n();
    let fixed = |v: usize| part.cell_len(part.cell_of(v)) == 1;
    let in_h = |v: usize| !fixed(v) && g.degree(v) <= 2;

    let sig = |v: usize| {
        let mut s = vec![part.cell_of(v)];
        let mut f: Vec<usize> = g.neighbours(v).iter().filter(|&&u| fixed(u)).map(|&u| part.cell_of(u)).collect();
        f.sort_unstable();
        s.extend(f);
        s
    };
    let h_nbrs = |v: usize| -> Vec<usize> { g.neighbours(v).iter().copied().filter(|&u| in_h(u)).collect() };

    let mut seen = vec![false; n];
    let mut comps = Vec::new();
    for v0 in 0..n {
        if seen[v0] || !in_h(v0) {
            continue;
        }
        let mut members = vec![v0];
        seen[v0] = true;
        let mut i = 0;
        while i < members.len() {
            for u in h_nbrs(members[i]) {
                if !seen[u] {
                    seen[u] = true;
                    members.push(u);
                }
            }
            i += 1;
        }
        let cycle = members.iter().all(|&v| h_nbrs(v).len() == 2);
        let start = if cycle {
            v0
        } else {
            *members.iter().filter(|&&v| h_nbrs(v).len() < 2).min().unwrap()
        };
        let mut walk = vec![start];
        let mut prev = usize::MAX;
        let mut cur = start;
        while walk.len() < members.len() {
            let next = h_nbrs(cur).into_iter().find(|&u| u != prev).unwrap();
            walk.push(next);
            prev = cur;
            cur = next;
        }
        comps.push(canonical_component(walk, cycle, &sig));
    }

    comps.sort_by(|a, b| (a.cycle, &a.seq).cmp(&(b.cycle, &b.seq)));

    let mut rank = vec![(usize::MAX, usize::MAX); n];
    for (ci, c) in comps.iter().enumerate() {
        for (i, &v) in c.order.iter().enumerate() {
            rank[v] = (ci, i);
        }
    }
    let mut label = vec![0; n];
    for s in part.cell_starts() {
        let mut cell = part.cell(s).to_vec();
        cell.sort_by_key(|&v| (rank[v], v));
        for (i, &v) in cell.iter().enumerate() {
            label[v] = s + i;
        }
    }

    let mut generators = Vec::new();
    let perm_from = |pairs: &mut dyn Iterator<Item = (usize, usize)>| {
        let mut img: Vec<usize> = (0..n).collect();
        for (a, b) in pairs {
            img[a] = b;
        }
        Permutation::from_images(img).ok()
    };

    let mut i = 0;
    while i < comps.len() {
        let mut j = i + 1;
        while j < comps.len() && comps[j].cycle == comps[i].cycle && comps[j].seq == comps[i].seq {
            j += 1;
        }
        let c0 = &comps[i];
        generators.extend(internal_symmetries(c0, &perm_from));
        if j - i >= 2 {
            let c1 = &comps[i + 1];
            let swap = c0.order.iter().zip(&c1.order).flat_map(|(&a, &b)| [(a, b), (b, a)]);
            generators.extend(perm_from(&mut swap.into_iter()));
            let k = j - i;
            let rot = (0..k).flat_map(|t| {
                let from = &comps[i + t].order;
                let to = &comps[i + (t + 1) % k].order;
                from.iter().copied().zip(to.iter().copied()).collect::<Vec<_>>()
            });
            if k > 2 {
                generators.extend(perm_from(&mut rot.into_iter()));
            }
        }
        i = j;
    }

    // Universal vertices in non-singleton cells can be permuted freely.
    for s in part.cell_starts() {
        let cell = part.cell(s);
        if cell.len() < 2 || g.degree(cell[0]) <= 2 {
            continue;
        }
        let mut c = cell.to_vec();
        c.sort_unstable();
        generators.extend(perm_from(&mut [(c[0], c[1]), (c[1], c[0])].into_iter()));
        if c.len() > 2 {
            generators.extend(perm_from(&mut (0..c.len()).map(|t| (c[t], c[(t + 1) % c.len()]))));
        }
    }

    LowDegreeOutcome { generators, label }
}

/// Chooses the traversal with the smallest signature sequence.
fn canonical_component(walk: Vec<usize>, cycle: bool, sig: &dyn Fn(usize) -> Vec<usize>) -> Component {
    let sigs: BTreeMap<usize, Vec<usize>> = walk.iter().map(|&v| (v, sig(v))).collect();
    let seq_of = |order: &[usize]| order.iter().map(|v| sigs[v].clone()).collect::<Vec<_>>();
    let mut candidates: Vec<Vec<usize>> = Vec::new();
    let len = walk.len();
    if cycle {
        for r in 0..len {
            let fwd: Vec<usize> = (0..len).map(|i| walk[(r + i) % len]).collect();
            let bwd: Vec<usize> = (0..len).map(|i| walk[(r + len - i) % len]).collect();
            candidates.push(fwd);
            candidates.push(bwd);
        }
    } else {
        let mut rev = walk.clone();
        rev.reverse();
        candidates.push(walk);
        candidates.push(rev);
    }
    let (order, seq) = candidates
        .into_iter()
        .map(|o| {
            let s = seq_of(&o);
            (o, s)
        })
        .min_by(|a, b| a.1.cmp(&b.1))
        .unwrap();
    Component { cycle, order, seq }
}

fn internal_symmetries(
    c: &Component,
    perm_from: &dyn Fn(&mut dyn Iterator<Item = (usize, usize)>) -> Option<Permutation>,
) -> Vec<Permutation> {
    let len = c.order.len();
    let v = &c.order;
    let s = &c.seq;
    let mut out = Vec::new();
    if len < 2 {
        return out;
    }
    if !c.cycle {
        if (0..len).all(|i| s[i] == s[len - 1 - i]) {
            out.extend(perm_from(&mut (0..len).map(|i| (v[i], v[len - 1 - i]))));
        }
        return out;
    }
    if let Some(r) = (1..len).find(|&r| (0..len).all(|i| s[i] == s[(i + r) % len])) {
        out.extend(perm_from(&mut (0..len).map(|i| (v[i], v[(i + r) % len]))));
    }
    if let Some(r) = (0..len).find(|&r| (0..len).all(|i| s[i] == s[(r + len - i) % len])) {
        out.extend(perm_from(&mut (0..len).map(|i| (v[i], v[(r + len - i) % len]))));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::PermGroup;
    use crate::refine::refine_sequence;

    fn order_of(n: usize, gens: &[Permutation]) -> u64 {
        let mut grp = PermGroup::from_generators(n, gens, 1).unwrap();
        grp.complete();
        grp.order().try_into().unwrap()
    }

    fn root_outcome(g: &Graph) -> Option<LowDegreeOutcome> {
        let p = refine_sequence(g, &Colouring::unit(g.n()), &[]).unwrap().colouring;
        low_degree_shortcut(g, &p)
    }

    #[test]
    fn star_leaves() {
        let g = Graph::from_edges(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
        let out = root_outcome(&g).unwrap();
        assert!(out.generators.iter().all(|p| g.is_automorphism(p)));
        assert_eq!(order_of(5, &out.generators), 24);
    }

    #[test]
    fn empty_graph() {
        let out = root_outcome(&Graph::empty(5)).unwrap();
        assert_eq!(order_of(5, &out.generators), 120);
    }

    #[test]
    fn long_path_and_cycles() {
        let edges: Vec<(usize, usize)> = (0..9).map(|i| (i, i + 1)).collect();
        let g = Graph::from_edges(10, &edges).unwrap();
        assert_eq!(order_of(10, &root_outcome(&g).unwrap().generators), 2);

        // Two disjoint 4-cycles: (D4 x D4) x 2.
        let g = Graph::from_edges(8, &[(0, 1), (1, 2), (2, 3), (3, 0), (4, 5), (5, 6), (6, 7), (7, 4)]).unwrap();
        let out = root_outcome(&g).unwrap();
        assert!(out.generators.iter().all(|p| g.is_automorphism(p)));
        assert_eq!(order_of(8, &out.generators), 128);
    }

    #[test]
    fn complete_graph_is_universal() {
        let mut edges = Vec::new();
        for i in 0..5 {
            for j in i + 1..5 {
                edges.push((i, j));
            }
        }
        let g = Graph::from_edges(5, &edges).unwrap();
        assert_eq!(order_of(5, &root_outcome(&g).unwrap().generators), 120);
    }

    #[test]
    fn high_degree_cells_do_not_apply() {
        let g = Graph::from_edges(6, &[(0, 1), (1, 2), (2, 0), (0, 3), (1, 4), (2, 5), (3, 4), (4, 5), (5, 3)]).unwrap();
        assert!(root_outcome(&g).is_none());
    }

    #[test]
    fn forced_labels_are_a_refinement() {
        let g = Graph::from_edges(7, &[(0, 1), (1, 2), (3, 4)]).unwrap();
        let p = refine_sequence(&g, &Colouring::unit(7), &[]).unwrap().colouring;
        let out = low_degree_shortcut(&g, &p).unwrap();
        let mut sorted = out.label.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, (0..7).collect::<Vec<_>>());
        for v in 0..7 {
            for w in 0..7 {
                if p.colour(v) < p.colour(w) {
                    assert!(out.label[v] < out.label[w]);
                }
            }
        }
    }
}
