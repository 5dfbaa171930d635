//! Breadth-first traversal: each level keeps only the nodes of greatest
//! invariant, and every kept node sends one random experimental path down to
//! a leaf to harvest automorphisms early.

use std::cmp::Ordering;
use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{dfs, Ctx, EngineResult, Leaf, Node};
use crate::error::Result;
use crate::group::OrbitPartition;
use crate::invariant::{IncrementalCmp, LeafCertificate, TraceCmp};

struct Stored {
    leaf: Leaf,
    /// Depth and id of the level node the path started from.
    origin: Option<(usize, usize)>,
}

struct Bfs<'a> {
    ctx: Ctx<'a>,
    rng: ChaCha8Rng,
    leaves: HashMap<LeafCertificate, Stored>,
}

/// Nodes of the level under construction and their common level trace.
struct NextLevel {
    nodes: Vec<(usize, Node)>,
    /// Leaf data of the kept nodes when they are leaves.
    leaves: Vec<Leaf>,
    max: Option<Vec<u32>>,
    next_id: usize,
}

pub(super) fn search(ctx: Ctx<'_>) -> Result<EngineResult> {
    let seed = ctx.cfg.seed ^ 0x9e37_79b9_7f4a_7c15;
    let mut bfs = Bfs {
        ctx,
        rng: ChaCha8Rng::seed_from_u64(seed),
        leaves: HashMap::new(),
    };
    let root = bfs.ctx.root()?;
    if root.is_leaf() {
        bfs.ctx.low_degree_generators(&root);
        let leaf = bfs.ctx.leaf(&root);
        let best = bfs.ctx.canonical.then_some(leaf);
        return Ok(bfs.ctx.finish(best.as_ref()));
    }
    let mut level = vec![root];
    loop {
        let depth = level[0].depth();
        bfs.ctx.low_degree_generators(&level[0]);
        bfs.ctx.group.set_base_prefix(&level[0].seq);
        let mut next = NextLevel {
            nodes: Vec::new(),
            leaves: Vec::new(),
            max: None,
            next_id: 0,
        };
        let mut shortcut = false;
        for (idx, node) in level.iter().enumerate() {
            if shortcut {
                bfs.match_one_child(node, &next)?;
                continue;
            }
            bfs.expand(node, idx == 0, &mut next)?;
            if idx == 0
                && level.len() > 1
                && !bfs.ctx.canonical
                && bfs.ctx.cfg.discrete_children
                && next.nodes.first().is_some_and(|(_, c)| c.is_leaf())
            {
                shortcut = true;
            }
            if next.nodes.len() > bfs.ctx.cfg.level_cap {
                log::info!("level {} exceeds the cap; continuing depth-first", depth + 1);
                return dfs::search(bfs.ctx);
            }
        }
        // The smallest vertex of the first target cell always survives.
        debug_assert!(!next.nodes.is_empty());
        if next.nodes[0].1.is_leaf() {
            return Ok(bfs.finish_leaves(next));
        }
        level = next.nodes.into_iter().map(|(_, n)| n).collect();
    }
}

impl Bfs<'_> {
    /// Generates the surviving children of `node` into `next`.
    fn expand(&mut self, node: &Node, rebase: bool, next: &mut NextLevel) -> Result<()> {
        let Some((_, cell)) = self.ctx.target(node) else {
            return Ok(());
        };
        let mut orbits: Option<(usize, OrbitPartition)> = None;
        for &w in &cell {
            if !self.ctx.generators.is_empty() {
                let gens = self.ctx.generators.len();
                if orbits.as_ref().is_none_or(|(n, _)| *n != gens) {
                    let o = if rebase {
                        self.ctx.group.stabilizer_orbits(&node.seq)
                    } else {
                        self.ctx.group.filtered_orbits(&node.seq)
                    };
                    orbits = Some((gens, o));
                }
                if orbits.as_ref().unwrap().1.root(w) != w {
                    self.ctx.stats.prunes_c += 1;
                    continue;
                }
            }
            let Some(child) = self.child_vs_max(node, &cell, w, next)? else {
                continue;
            };
            self.offer(child, next)?;
        }
        Ok(())
    }

    /// The child `node ‖ w` unless its invariant is below the level maximum.
    fn child_vs_max(&mut self, node: &Node, cell: &[usize], w: usize, next: &mut NextLevel) -> Result<Option<Node>> {
        let mut inc = next.max.as_deref().map(IncrementalCmp::new);
        let mut abort = |partial: &[u32]| inc.as_mut().is_some_and(|c| c.update(partial) == TraceCmp::Greater);
        let Some(child) = self.ctx.child(node, cell, w, &mut abort)? else {
            self.ctx.stats.prunes_a += 1;
            return Ok(None);
        };
        match next.max.as_deref().map(|m| child.level().cmp(m)) {
            Some(Ordering::Less) => {
                self.ctx.stats.prunes_a += 1;
                Ok(None)
            }
            Some(Ordering::Equal) => Ok(Some(child)),
            _ => {
                self.ctx.stats.prunes_a += next.nodes.len() as u64;
                next.nodes.clear();
                next.leaves.clear();
                next.max = Some(child.level().to_vec());
                Ok(Some(child))
            }
        }
    }

    /// Adds a child of maximal invariant to the level unless a kept node is
    /// known to be equivalent to it.
    fn offer(&mut self, child: Node, next: &mut NextLevel) -> Result<()> {
        let depth = child.depth();
        if let Some((_, reference)) = next.nodes.first() {
            if let Some(g) = self.ctx.fixed_vertex_map(reference, &child) {
                if !g.is_identity() {
                    self.ctx.stats.fixed_vertex_auts += 1;
                    self.ctx.add_automorphism(g);
                    self.ctx.stats.prunes_c += 1;
                    return Ok(());
                }
            }
        }
        let id = next.next_id;
        next.next_id += 1;
        let leaf = if child.is_leaf() {
            self.ctx.leaf(&child)
        } else {
            self.experimental_path(&child)?
        };
        let live_from = next.nodes.first().map(|(i, _)| *i).unwrap_or(id);
        if let Some(prev) = self.leaves.get(&leaf.certificate()) {
            let g = prev.leaf.map_to(&leaf);
            let origin_live = prev.origin.is_some_and(|(d, i)| d == depth && i >= live_from);
            let maps_node = (0..depth).all(|k| g.image(prev.leaf.seq[k]) == leaf.seq[k]);
            self.ctx.add_automorphism(g);
            if origin_live && maps_node {
                self.ctx.stats.prunes_c += 1;
                return Ok(());
            }
        } else {
            self.leaves.insert(
                leaf.certificate(),
                Stored {
                    leaf: leaf.clone(),
                    origin: Some((depth, id)),
                },
            );
        }
        if child.is_leaf() {
            next.leaves.push(leaf);
        }
        next.nodes.push((id, child));
        Ok(())
    }

    fn experimental_path(&mut self, node: &Node) -> Result<Leaf> {
        self.ctx.stats.experimental_paths += 1;
        let mut cur = node.clone();
        while let Some((_, cell)) = self.ctx.target(&cur) {
            let v = cell[self.rng.gen_range(0..cell.len())];
            cur = self.ctx.child(&cur, &cell, v, &mut |_| false)?.expect("no abort");
        }
        Ok(self.ctx.leaf(&cur))
    }

    /// Discrete-children shortcut: one leaf child of `node`, matched against
    /// the stored children of the first node of the level.
    fn match_one_child(&mut self, node: &Node, next: &NextLevel) -> Result<()> {
        let Some((_, cell)) = self.ctx.target(node) else {
            return Ok(());
        };
        let orbits = self.ctx.group.filtered_orbits(&node.seq);
        for &w in &cell {
            if orbits.root(w) != w {
                continue;
            }
            let mut inc = next.max.as_deref().map(IncrementalCmp::new);
            let mut abort = |partial: &[u32]| inc.as_mut().is_some_and(|c| c.update(partial) != TraceCmp::EqualPrefix);
            let Some(child) = self.ctx.child(node, &cell, w, &mut abort)? else {
                continue;
            };
            if next.max.as_deref() != Some(child.level()) {
                continue;
            }
            let leaf = self.ctx.leaf(&child);
            if let Some(prev) = self.leaves.get(&leaf.certificate()) {
                let g = prev.leaf.map_to(&leaf);
                self.ctx.stats.discrete_shortcut_auts += 1;
                self.ctx.add_automorphism(g);
            } else {
                self.ctx.stats.prunes_a += 1;
            }
            return Ok(());
        }
        Ok(())
    }

    /// The last level: all its leaves are registered already, so what is
    /// left is the reference stabilizer and, in canonical mode, the best leaf.
    fn finish_leaves(mut self, next: NextLevel) -> EngineResult {
        let first = &next.nodes[0].1;
        if first.terminal {
            self.ctx.low_degree_generators(first);
        }
        let best = if self.ctx.canonical {
            next.leaves.iter().reduce(|a, b| if b.key_cmp(a) == Ordering::Greater { b } else { a })
        } else {
            None
        };
        self.ctx.finish(best)
    }
}
