//! Equitable refinement, individualization and the composed refinement
//! function over vertex sequences.
//!
//! The working representation is [`Partition`]: vertices laid out in cell
//! order, each cell named by the position of its first vertex. Positions and
//! sizes are label-invariant, so everything the refinement emits into the
//! trace is built from them and from edge counts.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::graph::{Colouring, Graph};
use crate::invariant::TraceValue;

/// Ordered partition in array form, suitable for in-place splitting.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    lab: Vec<usize>,
    pos: Vec<usize>,
    /// `start[i]` is the first position of the cell holding position `i`.
    start: Vec<usize>,
    /// `len[s]` is the size of the cell starting at `s`; stale elsewhere.
    len: Vec<usize>,
    cells: usize,
}

impl Partition {
    pub fn from_colouring(c: &Colouring) -> Self {
        let n = c.n();
        let mut lab = Vec::with_capacity(n);
        let mut start = vec![0; n];
        let mut len = vec![0; n];
        for cell in c.cells() {
            let s = lab.len();
            len[s] = cell.len();
            for &v in cell {
                start[lab.len()] = s;
                lab.push(v);
            }
        }
        let mut pos = vec![0; n];
        for (i, &v) in lab.iter().enumerate() {
            pos[v] = i;
        }
        Partition {
            lab,
            pos,
            start,
            len,
            cells: c.len(),
        }
    }

    pub fn unit(n: usize) -> Self {
        Self::from_colouring(&Colouring::unit(n))
    }

    pub fn to_colouring(&self) -> Colouring {
        Colouring::from_cells(self.n(), self.cell_list()).expect("partition is consistent")
    }

    pub fn n(&self) -> usize {
        self.lab.len()
    }

    pub fn num_cells(&self) -> usize {
        self.cells
    }

    pub fn is_discrete(&self) -> bool {
        self.cells == self.n()
    }

    /// Start position of the cell containing `v`.
    #[inline]
    pub fn cell_of(&self, v: usize) -> usize {
        self.start[self.pos[v]]
    }

    #[inline]
    pub fn cell_len(&self, start: usize) -> usize {
        self.len[start]
    }

    #[inline]
    pub fn cell(&self, start: usize) -> &[usize] {
        &self.lab[start..start + self.len[start]]
    }

    /// Cell start positions in colour order.
    pub fn cell_starts(&self) -> impl Iterator<Item = usize> + '_ {
        let mut s = 0;
        std::iter::from_fn(move || {
            if s >= self.lab.len() {
                return None;
            }
            let cur = s;
            s += self.len[cur];
            Some(cur)
        })
    }

    /// Cells in colour order, each sorted by vertex.
    pub fn cell_list(&self) -> Vec<Vec<usize>> {
        self.cell_starts()
            .map(|s| {
                let mut c = self.cell(s).to_vec();
                c.sort_unstable();
                c
            })
            .collect()
    }

    /// Colour index (rank of the cell) of every vertex.
    pub fn colour_indices(&self) -> Vec<usize> {
        let mut out = vec![0; self.n()];
        for (k, s) in self.cell_starts().enumerate() {
            for &v in self.cell(s) {
                out[v] = k;
            }
        }
        out
    }

    /// For a discrete partition, `v -> position of v`.
    pub fn positions(&self) -> &[usize] {
        &self.pos
    }

    pub(crate) fn lab(&self) -> &[usize] {
        &self.lab
    }

    /// Gives `v` its own cell at the front of its current cell. Returns the
    /// start of the remainder.
    pub fn individualize(&mut self, v: usize) -> Result<usize> {
        let s = self.cell_of(v);
        let l = self.len[s];
        if l < 2 {
            return Err(Error::Precondition(format!("vertex {v} is already a singleton")));
        }
        let pv = self.pos[v];
        let u = self.lab[s];
        self.lab.swap(s, pv);
        self.pos[u] = pv;
        self.pos[v] = s;
        self.len[s] = 1;
        self.len[s + 1] = l - 1;
        for i in s + 1..s + l {
            self.start[i] = s + 1;
        }
        self.cells += 1;
        Ok(s + 1)
    }

    /// True if every pair of same-coloured vertices has equal neighbour
    /// counts in every cell.
    pub fn is_equitable(&self, g: &Graph) -> bool {
        let mut counts = vec![0usize; self.n()];
        for s in self.cell_starts() {
            for &w in self.cell(s) {
                for &u in g.neighbours(w) {
                    counts[u] += 1;
                }
            }
            for t in self.cell_starts() {
                let cell = self.cell(t);
                if cell.iter().any(|&v| counts[v] != counts[cell[0]]) {
                    return false;
                }
            }
            counts.iter_mut().for_each(|c| *c = 0);
        }
        true
    }
}

/// The sequence `α` of cells still to be used as splitters.
#[derive(Clone, Debug, Default)]
pub struct RefinementQueue {
    singletons: VecDeque<usize>,
    others: VecDeque<usize>,
    queued: Vec<bool>,
    singleton_first: bool,
}

impl RefinementQueue {
    pub fn new(n: usize) -> Self {
        RefinementQueue {
            singletons: VecDeque::new(),
            others: VecDeque::new(),
            queued: vec![false; n],
            singleton_first: true,
        }
    }

    /// Queue holding the given colours (cell indices) of `c`.
    pub fn from_colours(c: &Colouring, colours: &[usize]) -> Result<Self> {
        let part = Partition::from_colouring(c);
        let starts: Vec<usize> = part.cell_starts().collect();
        let mut q = RefinementQueue::new(c.n());
        for &k in colours {
            let s = *starts.get(k).ok_or_else(|| {
                Error::Precondition(format!("queue names colour {k} of a {}-colouring", c.len()))
            })?;
            if q.queued[s] {
                return Err(Error::Precondition(format!("colour {k} queued twice")));
            }
            q.push(s, part.cell_len(s));
        }
        Ok(q)
    }

    /// Every cell of `c`.
    pub fn all_cells(c: &Colouring) -> Self {
        let colours: Vec<usize> = (0..c.len()).collect();
        Self::from_colours(c, &colours).expect("all colours are valid")
    }

    /// Disables singleton priority so cells are taken in plain FIFO order.
    pub fn fifo_only(mut self) -> Self {
        self.singleton_first = false;
        self.others.extend(self.singletons.drain(..));
        self
    }

    fn clear(&mut self, n: usize) {
        self.singletons.clear();
        self.others.clear();
        self.queued.clear();
        self.queued.resize(n, false);
    }

    fn push(&mut self, start: usize, size: usize) {
        if self.queued[start] {
            return;
        }
        self.queued[start] = true;
        if self.singleton_first && size == 1 {
            self.singletons.push_back(start);
        } else {
            self.others.push_back(start);
        }
    }

    /// A queued cell shrank to a singleton; let it jump the queue.
    fn promote(&mut self, start: usize) {
        if self.singleton_first && self.queued[start] {
            self.singletons.push_back(start);
        }
    }

    fn pop(&mut self) -> Option<usize> {
        loop {
            let s = self.singletons.pop_front().or_else(|| self.others.pop_front())?;
            if self.queued[s] {
                self.queued[s] = false;
                return Some(s);
            }
        }
    }

    pub fn is_empty(&self) -> bool {
        !self.queued.iter().any(|&q| q)
    }
}

/// Whether a refinement ran to completion.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RefineStatus {
    Complete,
    Aborted,
}

/// Reusable scratch space for refinement. One per engine; not shareable
/// across concurrent calls.
#[derive(Debug, Default)]
pub struct Refiner {
    counts: Vec<u32>,
    touched: Vec<usize>,
    touched_mark: Vec<bool>,
    splitter: Vec<usize>,
    group: Vec<(u32, usize)>,
    queue: RefinementQueue,
    pub splits: u64,
}

impl Refiner {
    pub fn new(n: usize) -> Self {
        Refiner {
            counts: vec![0; n],
            touched_mark: vec![false; n],
            queue: RefinementQueue::new(n),
            ..Default::default()
        }
    }

    fn ensure(&mut self, n: usize) {
        if self.counts.len() != n {
            self.counts = vec![0; n];
            self.touched_mark = vec![false; n];
        }
    }

    /// Refines `part` in place with the queue already loaded into
    /// `self.queue`. Trace events are appended to `trace`; `abort` sees the
    /// trace after each splitter and may stop the refinement.
    fn run(
        &mut self,
        g: &Graph,
        part: &mut Partition,
        trace: &mut Vec<u32>,
        abort: &mut dyn FnMut(&[u32]) -> bool,
    ) -> RefineStatus {
        while !part.is_discrete() {
            let Some(w) = self.queue.pop() else { break };
            let wlen = part.cell_len(w);
            trace.push(wlen as u32);
            self.splitter.clear();
            self.splitter.extend_from_slice(part.cell(w));
            if wlen == 1 {
                self.split_by_singleton(g, part, trace);
            } else {
                self.split_by_cell(g, part, trace);
            }
            if abort(trace) {
                return RefineStatus::Aborted;
            }
        }
        RefineStatus::Complete
    }

    fn split_by_singleton(&mut self, g: &Graph, part: &mut Partition, trace: &mut Vec<u32>) {
        let w = self.splitter[0];
        for &u in g.neighbours(w) {
            let s = part.cell_of(u);
            if part.cell_len(s) > 1 {
                self.counts[u] = 1;
                if !self.touched_mark[s] {
                    self.touched_mark[s] = true;
                    self.touched.push(s);
                }
            }
        }
        self.touched.sort_unstable();
        let touched = std::mem::take(&mut self.touched);
        for &s in &touched {
            self.touched_mark[s] = false;
            let l = part.cell_len(s);
            // Neighbours of w move to the back, keeping key order 0 < 1.
            let mut back = s + l;
            let mut i = s;
            while i < back {
                let v = part.lab[i];
                if self.counts[v] == 1 {
                    back -= 1;
                    let u = part.lab[back];
                    part.lab.swap(i, back);
                    part.pos[u] = i;
                    part.pos[v] = back;
                } else {
                    i += 1;
                }
            }
            let hit = s + l - back;
            for k in back..s + l {
                self.counts[part.lab[k]] = 0;
            }
            if hit == l {
                continue;
            }
            let sizes = [(l - hit, 0u32), (hit, 1u32)];
            self.commit_split(part, s, &sizes, trace);
        }
        self.touched = touched;
        self.touched.clear();
    }

    fn split_by_cell(&mut self, g: &Graph, part: &mut Partition, trace: &mut Vec<u32>) {
        for &w in &self.splitter {
            for &u in g.neighbours(w) {
                let s = part.cell_of(u);
                if part.cell_len(s) > 1 {
                    self.counts[u] += 1;
                    if !self.touched_mark[s] {
                        self.touched_mark[s] = true;
                        self.touched.push(s);
                    }
                }
            }
        }
        self.touched.sort_unstable();
        let touched = std::mem::take(&mut self.touched);
        let mut sizes: Vec<(usize, u32)> = Vec::new();
        for &s in &touched {
            self.touched_mark[s] = false;
            let l = part.cell_len(s);
            self.group.clear();
            for &v in &part.lab[s..s + l] {
                self.group.push((self.counts[v], v));
            }
            for &(_, v) in &self.group {
                self.counts[v] = 0;
            }
            let first = self.group[0].0;
            if self.group.iter().all(|&(c, _)| c == first) {
                continue;
            }
            self.group.sort_unstable();
            sizes.clear();
            for (i, &(c, v)) in self.group.iter().enumerate() {
                part.lab[s + i] = v;
                part.pos[v] = s + i;
                match sizes.last_mut() {
                    Some((len, key)) if *key == c => *len += 1,
                    _ => sizes.push((1, c)),
                }
            }
            self.commit_split(part, s, &sizes, trace);
        }
        self.touched = touched;
        self.touched.clear();
    }

    /// Records fragments of the cell at `s` (already laid out in order),
    /// updates the queue and emits the split event.
    fn commit_split(&mut self, part: &mut Partition, s: usize, sizes: &[(usize, u32)], trace: &mut Vec<u32>) {
        self.splits += 1;
        trace.push(s as u32);
        trace.push(sizes.len() as u32);
        let mut at = s;
        for &(len, key) in sizes {
            trace.push(len as u32);
            trace.push(key);
            part.len[at] = len;
            for i in at..at + len {
                part.start[i] = at;
            }
            at += len;
        }
        part.cells += sizes.len() - 1;

        let was_queued = self.queue.queued[s];
        if was_queued {
            if sizes[0].0 == 1 {
                self.queue.promote(s);
            }
            let mut at = s + sizes[0].0;
            for &(len, _) in &sizes[1..] {
                self.queue.push(at, len);
                at += len;
            }
        } else {
            // The first largest fragment stays out of the queue.
            let largest = sizes
                .iter()
                .enumerate()
                .max_by(|a, b| a.1 .0.cmp(&b.1 .0).then(b.0.cmp(&a.0)))
                .map(|(i, _)| i)
                .unwrap();
            let mut at = s;
            for (i, &(len, _)) in sizes.iter().enumerate() {
                if i != largest {
                    self.queue.push(at, len);
                }
                at += len;
            }
        }
    }

    /// Refinement of `part` starting from all of its cells.
    pub fn refine_all(
        &mut self,
        g: &Graph,
        part: &mut Partition,
        trace: &mut Vec<u32>,
        abort: &mut dyn FnMut(&[u32]) -> bool,
    ) -> RefineStatus {
        self.ensure(g.n());
        self.queue.clear(g.n());
        let starts: Vec<usize> = part.cell_starts().collect();
        for s in starts {
            self.queue.push(s, part.cell_len(s));
        }
        self.run(g, part, trace, abort)
    }

    /// Individualizes `v` and refines with `({v})` as the queue.
    pub fn individualize_and_refine(
        &mut self,
        g: &Graph,
        part: &mut Partition,
        v: usize,
        trace: &mut Vec<u32>,
        abort: &mut dyn FnMut(&[u32]) -> bool,
    ) -> Result<RefineStatus> {
        self.ensure(g.n());
        part.individualize(v)?;
        self.queue.clear(g.n());
        let s = part.cell_of(v);
        self.queue.push(s, 1);
        Ok(self.run(g, part, trace, abort))
    }

    /// Refinement with an explicit queue.
    pub fn refine_with_queue(
        &mut self,
        g: &Graph,
        part: &mut Partition,
        queue: RefinementQueue,
        trace: &mut Vec<u32>,
    ) -> RefineStatus {
        self.ensure(g.n());
        self.queue = queue;
        self.run(g, part, trace, &mut |_| false)
    }
}

/// Refined colouring plus the trace it produced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RefinementOutcome {
    pub colouring: Colouring,
    pub trace: TraceValue,
}

impl RefinementOutcome {
    /// All trace levels concatenated.
    pub fn trace_fragment(&self) -> Vec<u32> {
        self.trace.flattened()
    }
}

/// One refinement pass `F(G, π, α)`.
pub fn refine(g: &Graph, p: &Colouring, alpha: RefinementQueue) -> Result<RefinementOutcome> {
    if g.n() != p.n() {
        return Err(Error::Dimension {
            expected: g.n(),
            found: p.n(),
        });
    }
    if alpha.queued.len() != g.n() {
        return Err(Error::Precondition("queue built for a different vertex count".into()));
    }
    let mut part = Partition::from_colouring(p);
    let mut refiner = Refiner::new(g.n());
    let mut trace = Vec::new();
    refiner.refine_with_queue(g, &mut part, alpha, &mut trace);
    Ok(RefinementOutcome {
        colouring: part.to_colouring(),
        trace: TraceValue::from_levels(vec![trace]),
    })
}

/// `I(π, v)`: `v` keeps its colour, every later colour shifts up by one.
pub fn individualize(p: &Colouring, v: usize) -> Result<Colouring> {
    if v >= p.n() {
        return Err(Error::VertexOutOfRange { vertex: v, n: p.n() });
    }
    let cv = p.colour(v);
    if p.cell(cv).len() < 2 {
        return Err(Error::Precondition(format!("vertex {v} is already a singleton")));
    }
    let colours = p
        .colours()
        .iter()
        .enumerate()
        .map(|(w, &c)| if c < cv || w == v { c } else { c + 1 })
        .collect();
    Colouring::from_colours(colours)
}

/// Root-level trace prefix: the initial cell sizes, so that coloured inputs
/// with different colour-class profiles never share a trace.
pub(crate) fn root_trace_prefix(part: &Partition) -> Vec<u32> {
    let mut t = vec![part.num_cells() as u32];
    t.extend(part.cell_starts().map(|s| part.cell_len(s) as u32));
    t
}

/// Appends the end-of-level summary: the number of cells.
pub(crate) fn close_level(part: &Partition, trace: &mut Vec<u32>) {
    trace.push(part.num_cells() as u32);
}

/// `R(G, π₀, ν)` by the composed recursion, one trace level per node.
pub fn refine_sequence(g: &Graph, p0: &Colouring, nu: &[usize]) -> Result<RefinementOutcome> {
    if g.n() != p0.n() {
        return Err(Error::Dimension {
            expected: g.n(),
            found: p0.n(),
        });
    }
    let mut refiner = Refiner::new(g.n());
    let mut part = Partition::from_colouring(p0);
    let mut levels = Vec::with_capacity(nu.len() + 1);
    let mut trace = root_trace_prefix(&part);
    refiner.refine_all(g, &mut part, &mut trace, &mut |_| false);
    close_level(&part, &mut trace);
    levels.push(trace);
    for (i, &v) in nu.iter().enumerate() {
        if v >= g.n() {
            return Err(Error::InvalidSequence(format!("vertex {v} out of range")));
        }
        let mut trace = Vec::new();
        refiner
            .individualize_and_refine(g, &mut part, v, &mut trace, &mut |_| false)
            .map_err(|_| Error::InvalidSequence(format!("element {i} ({v}) is already a singleton")))?;
        close_level(&part, &mut trace);
        levels.push(trace);
    }
    Ok(RefinementOutcome {
        colouring: part.to_colouring(),
        trace: TraceValue::from_levels(levels),
    })
}
