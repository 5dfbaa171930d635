//! Automorphisms forced by the fixed vertices of two nodes with equal
//! traces.

use crate::graph::{Colouring, Graph, Permutation};
use crate::refine::Partition;

/// Looks for an automorphism of `(g, p0)` taking colouring `a` to colouring
/// `b`, both refined colourings of tree nodes. Fixed vertices go to the fixed
/// vertex of the same colour; the rest is first tried as the identity, then
/// by matching cells on their fixed neighbours. Only verified maps are
/// returned.
pub fn detect_fixed_vertex_automorphism(g: &Graph, p0: &Colouring, a: &Colouring, b: &Colouring) -> Option<Permutation> {
    if a.n() != g.n() || b.n() != g.n() || p0.n() != g.n() {
        return None;
    }
    detect_partitions(g, p0, &Partition::from_colouring(a), &Partition::from_colouring(b))
}

pub(crate) fn detect_partitions(g: &Graph, p0: &Colouring, a: &Partition, b: &Partition) -> Option<Permutation> {
    let n = g.n();
    if a.num_cells() != b.num_cells() || a.cell_starts().any(|s| b.cell_of(b.lab()[s]) != s || a.cell_len(s) != b.cell_len(s)) {
        return None;
    }
    let verify = |images: Vec<usize>| {
        let perm = Permutation::from_images(images).ok()?;
        let ok = g.is_automorphism(&perm) && (0..n).all(|v| p0.colour(v) == p0.colour(perm.image(v)));
        ok.then_some(perm)
    };

    let mut images = vec![usize::MAX; n];
    for s in a.cell_starts().filter(|&s| a.cell_len(s) == 1) {
        images[a.lab()[s]] = b.lab()[s];
    }

    // Identity on everything that is not fixed.
    let mut identity_ext = images.clone();
    let mut consistent = true;
    for v in 0..n {
        if identity_ext[v] == usize::MAX {
            if a.cell_of(v) != b.cell_of(v) {
                consistent = false;
                break;
            }
            identity_ext[v] = v;
        }
    }
    if consistent {
        if let Some(p) = verify(identity_ext) {
            return Some(p);
        }
    }

    // Cell matching by the positions of fixed neighbours.
    let key = |part: &Partition, v: usize| {
        let mut k: Vec<usize> = g
            .neighbours(v)
            .iter()
            .filter(|&&u| part.cell_len(part.cell_of(u)) == 1)
            .map(|&u| part.cell_of(u))
            .collect();
        k.sort_unstable();
        k
    };
    for s in a.cell_starts().filter(|&s| a.cell_len(s) > 1) {
        let mut ca: Vec<(Vec<usize>, usize)> = a.cell(s).iter().map(|&v| (key(a, v), v)).collect();
        let mut cb: Vec<(Vec<usize>, usize)> = b.cell(s).iter().map(|&v| (key(b, v), v)).collect();
        ca.sort_unstable();
        cb.sort_unstable();
        for ((ka, va), (kb, vb)) in ca.iter().zip(&cb) {
            if ka != kb {
                return None;
            }
            images[*va] = *vb;
        }
    }
    verify(images)
}
