//! Search-tree engines: depth-first with first and best reference leaves,
//! and breadth-first with experimental paths.

mod bfs;
mod detect;
mod dfs;
mod lowdeg;

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_bigint::BigUint;

pub use detect::detect_fixed_vertex_automorphism;
pub use lowdeg::{low_degree_shortcut, LowDegreeOutcome};

use crate::error::{Error, Result};
use crate::graph::{Colouring, Graph, Permutation};
use crate::group::{OrbitPartition, PermGroup};
use crate::invariant::{certificate_from_parts, relabelled_bits, InvariantHook, LeafCertificate, TraceValue};
use crate::refine::{close_level, root_trace_prefix, Partition, RefineStatus, Refiner};
use crate::target::{select_in_partition, SelectorStrategy};

/// Per-level node cap for the breadth-first engine.
pub const DEFAULT_LEVEL_CAP: usize = 1 << 16;

/// Appended to the level of a node collapsed by the low-degree shortcut.
const TERMINAL_MARK: u32 = u32::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    GroupOnly,
    Canonical,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Strategy {
    Dfs,
    Bfs,
}

impl std::str::FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "dfs" => Ok(Strategy::Dfs),
            "bfs" => Ok(Strategy::Bfs),
            _ => Err(format!("unknown engine {s:?}")),
        }
    }
}

impl std::fmt::Display for Strategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Strategy::Dfs => "dfs",
            Strategy::Bfs => "bfs",
        })
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::GroupOnly => "group",
            Mode::Canonical => "canonical",
        })
    }
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "group" | "group_only" => Ok(Mode::GroupOnly),
            "canonical" | "canon" => Ok(Mode::Canonical),
            _ => Err(format!("unknown mode {s:?}")),
        }
    }
}

#[derive(Clone, Debug)]
pub struct EngineConfig {
    pub mode: Mode,
    pub strategy: Strategy,
    /// `None` picks the engine's default selector.
    pub selector: Option<SelectorStrategy>,
    pub seed: u64,
    pub fixed_vertex: bool,
    pub low_degree: bool,
    pub discrete_children: bool,
    pub invariant_hook: InvariantHook,
    pub node_budget: Option<u64>,
    pub level_cap: usize,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            mode: Mode::Canonical,
            strategy: Strategy::Dfs,
            selector: None,
            seed: 0x5eed,
            fixed_vertex: true,
            low_degree: true,
            discrete_children: true,
            invariant_hook: InvariantHook::None,
            node_budget: None,
            level_cap: DEFAULT_LEVEL_CAP,
        }
    }
}

impl EngineConfig {
    pub fn new(mode: Mode, strategy: Strategy) -> Self {
        EngineConfig {
            mode,
            strategy,
            ..Default::default()
        }
    }

    pub fn with_selector(mut self, s: SelectorStrategy) -> Self {
        self.selector = Some(s);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Turns off fixed-vertex detection, the discrete-children shortcut and
    /// the low-degree shortcut.
    pub fn without_shortcuts(mut self) -> Self {
        self.fixed_vertex = false;
        self.low_degree = false;
        self.discrete_children = false;
        self
    }

    pub fn effective_selector(&self) -> SelectorStrategy {
        self.selector.unwrap_or(match self.strategy {
            Strategy::Dfs => SelectorStrategy::FirstNonSingleton,
            Strategy::Bfs => SelectorStrategy::TracesAncestral,
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub nodes: u64,
    pub leaves: u64,
    pub prunes_a: u64,
    pub prunes_b: u64,
    pub prunes_c: u64,
    pub aborted_refinements: u64,
    pub automorphisms: u64,
    pub fixed_vertex_auts: u64,
    pub discrete_shortcut_auts: u64,
    pub low_degree_nodes: u64,
    pub experimental_paths: u64,
}

impl SearchStats {
    pub fn to_map(&self) -> BTreeMap<&'static str, u64> {
        BTreeMap::from([
            ("nodes", self.nodes),
            ("leaves", self.leaves),
            ("prunes_a", self.prunes_a),
            ("prunes_b", self.prunes_b),
            ("prunes_c", self.prunes_c),
            ("aborted_refinements", self.aborted_refinements),
            ("automorphisms", self.automorphisms),
            ("fixed_vertex_auts", self.fixed_vertex_auts),
            ("discrete_shortcut_auts", self.discrete_shortcut_auts),
            ("low_degree_nodes", self.low_degree_nodes),
            ("experimental_paths", self.experimental_paths),
        ])
    }

    pub fn prunes(&self) -> u64 {
        self.prunes_a + self.prunes_b + self.prunes_c
    }
}

#[derive(Clone, Debug)]
pub struct CanonicalForm {
    /// `v -> canonical name of v`.
    pub labelling: Permutation,
    pub certificate: LeafCertificate,
    pub graph: Graph,
    pub colouring: Colouring,
}

#[derive(Clone, Debug)]
pub struct EngineResult {
    pub generators: Vec<Permutation>,
    pub group_order: BigUint,
    pub orbit_partition: OrbitPartition,
    pub canonical: Option<CanonicalForm>,
    pub stats: SearchStats,
}

/// A tree node as seen from outside the engines.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchNode {
    pub nu: Vec<usize>,
    pub colouring: Colouring,
    pub trace: TraceValue,
    pub target: Option<Vec<usize>>,
    pub ancestry: Vec<Vec<usize>>,
}

impl SearchNode {
    /// Evaluates the node `nu` of the tree of `(g, p0)`.
    pub fn compute(g: &Graph, p0: &Colouring, nu: &[usize], selector: SelectorStrategy) -> Result<SearchNode> {
        let cfg = EngineConfig {
            selector: Some(selector),
            low_degree: false,
            ..Default::default()
        };
        let mut ctx = Ctx::new(g, p0, &cfg)?;
        let mut node = ctx.root()?;
        for (i, &v) in nu.iter().enumerate() {
            let (_, cell) = ctx
                .target(&node)
                .ok_or_else(|| Error::InvalidSequence(format!("node at depth {i} is a leaf")))?;
            if !cell.contains(&v) {
                return Err(Error::InvalidSequence(format!("vertex {v} is not in the target cell at depth {i}")));
            }
            node = ctx.child(&node, &cell, v, &mut |_| false)?.unwrap();
        }
        let target = ctx.target(&node).map(|(_, c)| c);
        Ok(SearchNode {
            nu: node.seq,
            colouring: node.part.to_colouring(),
            trace: node.trace,
            target,
            ancestry: node.ancestry,
        })
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Node {
    pub part: Partition,
    pub seq: Vec<usize>,
    pub trace: TraceValue,
    /// Target cells of the ancestors, parent first.
    pub ancestry: Vec<Vec<usize>>,
    /// Collapsed by the low-degree shortcut (group-only mode).
    pub terminal: bool,
}

impl Node {
    pub fn depth(&self) -> usize {
        self.seq.len()
    }

    pub fn is_leaf(&self) -> bool {
        self.terminal || self.part.is_discrete()
    }

    pub fn level(&self) -> &[u32] {
        self.trace.level(self.trace.len() - 1)
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Leaf {
    pub seq: Vec<usize>,
    pub trace: TraceValue,
    /// `v -> position`.
    pub label: Vec<usize>,
    /// `position -> v`.
    pub lab: Vec<usize>,
    pub bits: Vec<u8>,
}

impl Leaf {
    /// Leaf order: trace first, then the relabelled graph.
    pub fn key_cmp(&self, other: &Leaf) -> Ordering {
        self.trace.cmp(&other.trace).then_with(|| self.bits.cmp(&other.bits))
    }

    pub fn same_graph(&self, other: &Leaf) -> bool {
        self.trace == other.trace && self.bits == other.bits
    }

    pub fn certificate(&self) -> LeafCertificate {
        certificate_from_parts(&self.trace, self.label.len(), &self.bits)
    }

    /// The automorphism taking this leaf to `other`.
    pub fn map_to(&self, other: &Leaf) -> Permutation {
        Permutation::from_images_unchecked(self.label.iter().map(|&p| other.lab[p]).collect())
    }
}

pub(crate) enum Flow {
    Continue,
    /// Resume at the ancestor on this level.
    JumpTo(usize),
}

/// State shared by both engines.
pub(crate) struct Ctx<'a> {
    pub g: &'a Graph,
    pub p0: &'a Colouring,
    pub cfg: &'a EngineConfig,
    pub selector: SelectorStrategy,
    pub refiner: Refiner,
    pub group: PermGroup,
    pub generators: Vec<Permutation>,
    pub stats: SearchStats,
    pub canonical: bool,
    /// Low-degree generators already emitted in canonical mode.
    pub low_degree_done: bool,
}

impl<'a> Ctx<'a> {
    pub fn new(g: &'a Graph, p0: &'a Colouring, cfg: &'a EngineConfig) -> Result<Self> {
        if g.n() != p0.n() {
            return Err(Error::Dimension {
                expected: g.n(),
                found: p0.n(),
            });
        }
        Ok(Ctx {
            g,
            p0,
            cfg,
            selector: cfg.effective_selector(),
            refiner: Refiner::new(g.n()),
            group: PermGroup::trivial(g.n(), cfg.seed),
            generators: Vec::new(),
            stats: SearchStats::default(),
            canonical: cfg.mode == Mode::Canonical,
            low_degree_done: false,
        })
    }

    fn tick(&mut self) -> Result<()> {
        self.stats.nodes += 1;
        match self.cfg.node_budget {
            Some(b) if self.stats.nodes > b => Err(Error::BudgetExceeded {
                budget: b,
                stats: Box::new(self.stats.clone()),
            }),
            _ => Ok(()),
        }
    }

    /// Finishes a level: cell count, invariant hook, shortcut marker.
    fn finish_level(&mut self, part: &Partition, level: &mut Vec<u32>) -> bool {
        close_level(part, level);
        self.cfg.invariant_hook.append(self.g, part, level);
        let terminal = !self.canonical && self.cfg.low_degree && lowdeg::applies(self.g, part);
        if terminal {
            level.push(TERMINAL_MARK);
            self.stats.low_degree_nodes += 1;
        }
        terminal
    }

    pub fn root(&mut self) -> Result<Node> {
        self.tick()?;
        let mut part = Partition::from_colouring(self.p0);
        let mut level = root_trace_prefix(&part);
        self.refiner.refine_all(self.g, &mut part, &mut level, &mut |_| false);
        let terminal = self.finish_level(&part, &mut level);
        Ok(Node {
            part,
            seq: Vec::new(),
            trace: TraceValue::from_levels(vec![level]),
            ancestry: Vec::new(),
            terminal,
        })
    }

    /// Target cell start and its vertices in ascending order.
    pub fn target(&self, node: &Node) -> Option<(usize, Vec<usize>)> {
        if node.is_leaf() {
            return None;
        }
        let s = select_in_partition(self.selector, self.g, &node.part, &node.ancestry)?;
        let mut cell = node.part.cell(s).to_vec();
        cell.sort_unstable();
        Some((s, cell))
    }

    /// The child `node ‖ v`, or `None` when `abort` stopped the refinement.
    pub fn child(
        &mut self,
        node: &Node,
        cell: &[usize],
        v: usize,
        abort: &mut dyn FnMut(&[u32]) -> bool,
    ) -> Result<Option<Node>> {
        self.tick()?;
        let mut part = node.part.clone();
        let mut level = Vec::new();
        let status = self.refiner.individualize_and_refine(self.g, &mut part, v, &mut level, abort)?;
        if status == RefineStatus::Aborted {
            self.stats.aborted_refinements += 1;
            return Ok(None);
        }
        let terminal = self.finish_level(&part, &mut level);
        let mut trace = node.trace.clone();
        trace.push(level);
        let mut seq = node.seq.clone();
        seq.push(v);
        let mut ancestry = Vec::with_capacity(node.ancestry.len() + 1);
        ancestry.push(cell.to_vec());
        ancestry.extend(node.ancestry.iter().cloned());
        Ok(Some(Node {
            part,
            seq,
            trace,
            ancestry,
            terminal,
        }))
    }

    /// Leaf data of a discrete or collapsed node.
    pub fn leaf(&mut self, node: &Node) -> Leaf {
        self.stats.leaves += 1;
        let label = if node.part.is_discrete() {
            node.part.positions().to_vec()
        } else {
            lowdeg::analyse(self.g, &node.part).label
        };
        let mut lab = vec![0; label.len()];
        for (v, &p) in label.iter().enumerate() {
            lab[p] = v;
        }
        let bits = relabelled_bits(self.g, &label);
        Leaf {
            seq: node.seq.clone(),
            trace: node.trace.clone(),
            label,
            lab,
            bits,
        }
    }

    /// True if `g` preserves both the graph and the input colouring.
    pub fn is_automorphism(&self, g: &Permutation) -> bool {
        g.len() == self.g.n()
            && self.g.is_automorphism(g)
            && (0..g.len()).all(|v| self.p0.colour(v) == self.p0.colour(g.image(v)))
    }

    /// Records a verified automorphism. Returns whether the group grew.
    pub fn add_automorphism(&mut self, g: Permutation) -> bool {
        assert!(self.is_automorphism(&g), "engine produced a non-automorphism {g}");
        if g.is_identity() {
            return false;
        }
        let grew = self.group.add_generator(&g).expect("degree checked");
        if grew {
            self.stats.automorphisms += 1;
            self.generators.push(g);
        }
        grew
    }

    /// Adds the low-degree stabilizer generators of `node`, once per run in
    /// canonical mode and for every collapsed reference node otherwise.
    pub fn low_degree_generators(&mut self, node: &Node) {
        if !self.cfg.low_degree || node.part.is_discrete() {
            return;
        }
        if self.canonical {
            if self.low_degree_done || !lowdeg::applies(self.g, &node.part) {
                return;
            }
            self.low_degree_done = true;
            self.stats.low_degree_nodes += 1;
        } else if !node.terminal {
            return;
        }
        for g in lowdeg::analyse(self.g, &node.part).generators {
            let fixes = node.seq.iter().all(|&v| g.image(v) == v);
            if fixes && self.is_automorphism(&g) {
                self.add_automorphism(g);
            } else {
                log::debug!("dropping unverified low-degree generator {g}");
            }
        }
    }

    /// Tries the fixed-vertex map from `reference` onto `node`.
    pub fn fixed_vertex_map(&mut self, reference: &Node, node: &Node) -> Option<Permutation> {
        if !self.cfg.fixed_vertex || reference.trace != node.trace {
            return None;
        }
        let g = detect::detect_partitions(self.g, self.p0, &reference.part, &node.part)?;
        if self.selector == SelectorStrategy::TracesAncestral {
            // The subtree shape also depends on the ancestor target cells.
            let maps = reference.ancestry.iter().zip(&node.ancestry).all(|(a, b)| {
                let mut img: Vec<usize> = a.iter().map(|&v| g.image(v)).collect();
                img.sort_unstable();
                &img == b
            });
            if !maps {
                return None;
            }
        }
        Some(g)
    }

    pub fn finish(mut self, best: Option<&Leaf>) -> EngineResult {
        self.group.complete();
        let group_order = self.group.order();
        let orbit_partition = OrbitPartition::from_generators(self.g.n(), &self.generators);
        let canonical = best.map(|leaf| {
            let labelling = Permutation::from_images_unchecked(leaf.label.clone());
            let graph = self.g.permuted(&labelling).expect("sizes agree");
            let colouring = Colouring::from_colours(leaf.lab.iter().map(|&v| self.p0.colour(v)).collect())
                .expect("relabelled colouring is surjective");
            CanonicalForm {
                labelling,
                certificate: leaf.certificate(),
                graph,
                colouring,
            }
        });
        EngineResult {
            generators: self.generators,
            group_order,
            orbit_partition,
            canonical,
            stats: self.stats,
        }
    }
}

/// Length of the common prefix of two sequences.
pub(crate) fn common_prefix(a: &[usize], b: &[usize]) -> usize {
    a.iter().zip(b).take_while(|(x, y)| x == y).count()
}

/// If `g` takes the node `from[..k+1]` to `to[..k+1]`, where `k` is the
/// common prefix length, the subtree below `to[..k+1]` is an image of the
/// one below `from[..k+1]` and the search may resume at level `k`.
pub(crate) fn jump_level(g: &Permutation, from: &[usize], to: &[usize]) -> Option<usize> {
    let k = common_prefix(from, to);
    if k >= from.len() || k >= to.len() {
        return None;
    }
    (0..=k).all(|i| g.image(from[i]) == to[i]).then_some(k)
}

pub fn run_dfs(g: &Graph, p0: &Colouring, cfg: &EngineConfig) -> Result<EngineResult> {
    let ctx = Ctx::new(g, p0, cfg)?;
    dfs::search(ctx)
}

pub fn run_bfs(g: &Graph, p0: &Colouring, cfg: &EngineConfig) -> Result<EngineResult> {
    let ctx = Ctx::new(g, p0, cfg)?;
    bfs::search(ctx)
}

/// Runs the engine named by `cfg.strategy`.
pub fn run(g: &Graph, p0: &Colouring, cfg: &EngineConfig) -> Result<EngineResult> {
    match cfg.strategy {
        Strategy::Dfs => run_dfs(g, p0, cfg),
        Strategy::Bfs => run_bfs(g, p0, cfg),
    }
}

/// An isomorphism `G1 -> G2` of coloured graphs, verified edge by edge.
pub fn isomorphic_coloured(
    g1: &Graph,
    p1: &Colouring,
    g2: &Graph,
    p2: &Colouring,
    cfg: &EngineConfig,
) -> Result<Option<Permutation>> {
    if g1.n() != g2.n() || g1.m() != g2.m() || p1.len() != p2.len() {
        return Ok(None);
    }
    let cfg = EngineConfig {
        mode: Mode::Canonical,
        ..cfg.clone()
    };
    let c1 = run(g1, p1, &cfg)?.canonical.expect("canonical mode");
    let c2 = run(g2, p2, &cfg)?.canonical.expect("canonical mode");
    if c1.certificate != c2.certificate || c1.colouring != c2.colouring {
        return Ok(None);
    }
    let sigma = c1.labelling.then(&c2.labelling.inverse())?;
    let ok = g1.permuted(&sigma)? == *g2 && (0..g1.n()).all(|v| p1.colour(v) == p2.colour(sigma.image(v)));
    Ok(ok.then_some(sigma))
}

/// An isomorphism `G1 -> G2` of uncoloured graphs.
pub fn isomorphic(g1: &Graph, g2: &Graph, cfg: &EngineConfig) -> Result<Option<Permutation>> {
    isomorphic_coloured(g1, &Colouring::unit(g1.n()), g2, &Colouring::unit(g2.n()), cfg)
}
