//! Target cell selection. "First" always means lowest colour.

use std::fmt;
use std::str::FromStr;

use crate::graph::{Colouring, Graph};
use crate::refine::Partition;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SelectorStrategy {
    FirstNonSingleton,
    FirstSmallest,
    MostJoined,
    TracesAncestral,
}

impl FromStr for SelectorStrategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "first" => Ok(Self::FirstNonSingleton),
            "smallest" => Ok(Self::FirstSmallest),
            "joined" => Ok(Self::MostJoined),
            "ancestral" => Ok(Self::TracesAncestral),
            _ => Err(format!("unknown selector {s:?}")),
        }
    }
}

impl fmt::Display for SelectorStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::FirstNonSingleton => "first",
            Self::FirstSmallest => "smallest",
            Self::MostJoined => "joined",
            Self::TracesAncestral => "ancestral",
        })
    }
}

/// Picks the target cell of `part`, returning its start position, or `None`
/// when `part` is discrete. `ancestry` lists earlier target cells, parent
/// first, as they were when chosen.
pub fn select_in_partition(
    strategy: SelectorStrategy,
    g: &Graph,
    part: &Partition,
    ancestry: &[Vec<usize>],
) -> Option<usize> {
    let mut candidates = part.cell_starts().filter(|&s| part.cell_len(s) > 1).peekable();
    candidates.peek()?;
    match strategy {
        SelectorStrategy::FirstNonSingleton => candidates.next(),
        SelectorStrategy::FirstSmallest => first_by(candidates, |s| std::cmp::Reverse(part.cell_len(s))),
        SelectorStrategy::MostJoined => {
            let cells: Vec<usize> = part.cell_starts().collect();
            let mut colour = vec![0usize; part.n()];
            for (k, &s) in cells.iter().enumerate() {
                for &v in part.cell(s) {
                    colour[v] = k;
                }
            }
            let mut edges = vec![0usize; cells.len()];
            first_by(candidates, |s| {
                edges.iter_mut().for_each(|e| *e = 0);
                for &v in part.cell(s) {
                    for &u in g.neighbours(v) {
                        edges[colour[u]] += 1;
                    }
                }
                let c = part.cell_len(s);
                cells
                    .iter()
                    .zip(&edges)
                    .filter(|&(&t, &e)| {
                        let max = if t == s { c * (c - 1) } else { c * part.cell_len(t) };
                        // Intra-cell edges were counted from both ends.
                        e > 0 && e < max
                    })
                    .count()
            })
        }
        SelectorStrategy::TracesAncestral => {
            let cands: Vec<usize> = candidates.collect();
            let mut inside = vec![false; part.n()];
            for anc in ancestry {
                anc.iter().for_each(|&v| inside[v] = true);
                let sub = cands
                    .iter()
                    .copied()
                    .filter(|&s| part.cell(s).iter().all(|&v| inside[v]));
                let pick = first_by(sub, |s| part.cell_len(s));
                anc.iter().for_each(|&v| inside[v] = false);
                if pick.is_some() {
                    return pick;
                }
            }
            first_by(cands.into_iter(), |s| part.cell_len(s))
        }
    }
}

/// First element attaining the maximum key.
fn first_by<K: Ord>(it: impl Iterator<Item = usize>, mut key: impl FnMut(usize) -> K) -> Option<usize> {
    let mut best: Option<(K, usize)> = None;
    for s in it {
        let k = key(s);
        if best.as_ref().is_none_or(|(bk, _)| k > *bk) {
            best = Some((k, s));
        }
    }
    best.map(|(_, s)| s)
}

/// Target cell of a colouring as a sorted vertex set.
pub fn select(
    strategy: SelectorStrategy,
    g: &Graph,
    p: &Colouring,
    ancestry: &[Vec<usize>],
) -> Option<Vec<usize>> {
    let part = Partition::from_colouring(p);
    select_in_partition(strategy, g, &part, ancestry).map(|s| {
        let mut cell = part.cell(s).to_vec();
        cell.sort_unstable();
        cell
    })
}
