//! Depth-first traversal keeping the first leaf and, in canonical mode, the
//! best leaf found so far.

use std::cmp::Ordering;

use super::{jump_level, Ctx, EngineResult, Flow, Leaf, Node};
use crate::error::Result;
use crate::graph::Permutation;
use crate::group::OrbitPartition;
use crate::invariant::{IncrementalCmp, TraceCmp};

struct Dfs<'a> {
    ctx: Ctx<'a>,
    /// Nodes of the first path, root first.
    path: Vec<Node>,
    path_cells: Vec<Vec<usize>>,
    first: Leaf,
    best: Option<Leaf>,
    /// Relation of the current path's node at each depth to the best leaf.
    rel: Vec<Ordering>,
}

pub(super) fn search(mut ctx: Ctx<'_>) -> Result<EngineResult> {
    let (path, path_cells) = first_path(&mut ctx)?;
    let first = ctx.leaf(path.last().unwrap());
    ctx.group.set_base_prefix(&first.seq);
    let best = ctx.canonical.then(|| first.clone());
    let mut dfs = Dfs {
        rel: vec![Ordering::Equal; path.len()],
        ctx,
        path,
        path_cells,
        first,
        best,
    };
    dfs.explore_path(0)?;
    let Dfs { ctx, best, .. } = dfs;
    Ok(ctx.finish(best.as_ref()))
}

/// Descends from the root along the smallest vertex of each target cell.
fn first_path(ctx: &mut Ctx<'_>) -> Result<(Vec<Node>, Vec<Vec<usize>>)> {
    let mut path = vec![ctx.root()?];
    let mut cells = Vec::new();
    loop {
        let node = path.last().unwrap();
        ctx.low_degree_generators(node);
        let Some((_, cell)) = ctx.target(node) else { break };
        let child = ctx.child(node, &cell, cell[0], &mut |_| false)?.expect("no abort");
        cells.push(cell);
        path.push(child);
    }
    Ok((path, cells))
}

impl Dfs<'_> {
    fn depth_rel(&mut self, d: usize) -> Ordering {
        if self.rel.len() <= d {
            self.rel.resize(d + 1, Ordering::Equal);
        }
        self.rel[d]
    }

    /// Children of the first-path node at depth `d`.
    fn explore_path(&mut self, d: usize) -> Result<Flow> {
        if d + 1 == self.path.len() {
            return Ok(Flow::Continue);
        }
        if let Flow::JumpTo(k) = self.explore_path(d + 1)? {
            if k < d {
                return Ok(Flow::JumpTo(k));
            }
        }
        let cell = self.path_cells[d].clone();
        let mut orbits: Option<(usize, OrbitPartition)> = None;
        for &w in &cell[1..] {
            let gens = self.ctx.generators.len();
            if orbits.as_ref().is_none_or(|(n, _)| *n != gens) {
                orbits = Some((gens, self.ctx.group.level_orbits(d)));
            }
            if orbits.as_ref().unwrap().1.root(w) != w {
                self.ctx.stats.prunes_c += 1;
                continue;
            }
            let node = self.path[d].clone();
            if let Flow::JumpTo(k) = self.try_child(&node, &cell, w, true)? {
                if k < d {
                    return Ok(Flow::JumpTo(k));
                }
            }
        }
        Ok(Flow::Continue)
    }

    /// Computes `node ‖ w` with early abort and explores it if it survives.
    fn try_child(&mut self, node: &Node, cell: &[usize], w: usize, eq_first: bool) -> Result<Flow> {
        let d = node.depth();
        let canonical = self.ctx.canonical;
        let rel = if canonical { self.depth_rel(d) } else { Ordering::Less };
        let first_ref = (eq_first && d + 1 < self.first.trace.len()).then(|| self.first.trace.level(d + 1));
        let best_ref = match (&self.best, rel) {
            (Some(b), Ordering::Equal) if d + 1 < b.trace.len() => Some(b.trace.level(d + 1)),
            _ => None,
        };
        let mut inc_first = first_ref.map(IncrementalCmp::new);
        let mut inc_best = best_ref.map(IncrementalCmp::new);
        let mut abort = |partial: &[u32]| {
            if let Some(c) = inc_first.as_mut() {
                if c.update(partial) == TraceCmp::EqualPrefix {
                    return false;
                }
            }
            match rel {
                _ if !canonical => true,
                Ordering::Greater => false,
                Ordering::Less => true,
                Ordering::Equal => match inc_best.as_mut() {
                    Some(c) => c.update(partial) == TraceCmp::Greater,
                    None => false,
                },
            }
        };
        let Some(child) = self.ctx.child(node, cell, w, &mut abort)? else {
            self.ctx.stats.prunes_a += 1;
            return Ok(Flow::Continue);
        };
        let level = child.level();
        let child_eq_first = first_ref.is_some_and(|r| r == level);
        let child_rel = match rel {
            Ordering::Equal => match best_ref {
                Some(r) => level.cmp(r),
                None => Ordering::Greater,
            },
            o => o,
        };
        let keep = child_eq_first || (canonical && child_rel != Ordering::Less);
        if !keep {
            if canonical && !eq_first {
                self.ctx.stats.prunes_b += 1;
            } else {
                self.ctx.stats.prunes_a += 1;
            }
            return Ok(Flow::Continue);
        }
        if canonical {
            self.depth_rel(d + 1);
            self.rel[d + 1] = child_rel;
        }
        self.explore(child, child_eq_first)
    }

    fn explore(&mut self, node: Node, eq_first: bool) -> Result<Flow> {
        let d = node.depth();
        if node.is_leaf() {
            return Ok(self.visit_leaf(&node, eq_first));
        }
        if eq_first && d < self.path.len() {
            let reference = &self.path[d];
            if let Some(g) = self.ctx.fixed_vertex_map(reference, &node) {
                if !g.is_identity() {
                    self.ctx.stats.fixed_vertex_auts += 1;
                    self.ctx.add_automorphism(g.clone());
                    self.ctx.stats.prunes_c += 1;
                    let from = self.path[d].seq.clone();
                    return Ok(self.jump(&g, &from, &node.seq));
                }
            }
        }
        let Some((_, cell)) = self.ctx.target(&node) else {
            return Ok(Flow::Continue);
        };
        let mut orbits: Option<(usize, OrbitPartition)> = None;
        for &w in &cell {
            let gens = self.ctx.generators.len();
            if gens > 0 {
                if orbits.as_ref().is_none_or(|(n, _)| *n != gens) {
                    orbits = Some((gens, self.ctx.group.filtered_orbits(&node.seq)));
                }
                if orbits.as_ref().unwrap().1.root(w) != w {
                    self.ctx.stats.prunes_c += 1;
                    continue;
                }
            }
            if let Flow::JumpTo(k) = self.try_child(&node, &cell, w, eq_first)? {
                if k < d {
                    return Ok(Flow::JumpTo(k));
                }
            }
        }
        Ok(Flow::Continue)
    }

    fn jump(&self, g: &Permutation, from: &[usize], to: &[usize]) -> Flow {
        match jump_level(g, from, to) {
            Some(k) => Flow::JumpTo(k),
            None => Flow::Continue,
        }
    }

    fn visit_leaf(&mut self, node: &Node, eq_first: bool) -> Flow {
        let leaf = self.ctx.leaf(node);
        if eq_first && leaf.same_graph(&self.first) {
            let g = self.first.map_to(&leaf);
            self.ctx.add_automorphism(g.clone());
            return self.jump(&g, &self.first.seq, &leaf.seq);
        }
        let Some(best) = &self.best else {
            return Flow::Continue;
        };
        let d = node.depth();
        let order = match self.rel[d] {
            Ordering::Equal => leaf.bits.cmp(&best.bits),
            o => o,
        };
        match order {
            Ordering::Less => Flow::Continue,
            Ordering::Equal => {
                let g = best.map_to(&leaf);
                let from = best.seq.clone();
                self.ctx.add_automorphism(g.clone());
                self.jump(&g, &from, &leaf.seq)
            }
            Ordering::Greater => {
                self.best = Some(leaf);
                for r in &mut self.rel[..=d] {
                    *r = Ordering::Equal;
                }
                Flow::Continue
            }
        }
    }
}
