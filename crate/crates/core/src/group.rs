//! Permutation groups held as a base with Schreier transversals, grown by
//! the random Schreier method.
//!
//! A strong generator stored at level `i` fixes the first `i` base points;
//! generators at levels `>= i` generate the `i`-th stabilizer in the chain.
//! Random sifting may under-approximate the chain, which only makes orbits
//! finer. [`PermGroup::complete`] closes the chain deterministically when an
//! exact order is required.

use num_bigint::BigUint;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::Permutation;

/// Consecutive identity sifts before the random phase stops.
pub const DEFAULT_RANDOM_SIFTS: usize = 10;

/// Union-find over `0..n`.
#[derive(Clone, Debug)]
pub struct OrbitPartition {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl OrbitPartition {
    pub fn trivial(n: usize) -> Self {
        OrbitPartition {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub fn from_generators<'a>(n: usize, gens: impl IntoIterator<Item = &'a Permutation>) -> Self {
        let mut o = Self::trivial(n);
        for g in gens {
            o.add_generator(g);
        }
        o
    }

    pub fn add_generator(&mut self, g: &Permutation) {
        for v in 0..self.parent.len() {
            self.union(v, g.image(v));
        }
    }

    pub fn find(&mut self, mut v: usize) -> usize {
        while self.parent[v] != v {
            self.parent[v] = self.parent[self.parent[v]];
            v = self.parent[v];
        }
        v
    }

    /// Representative without path compression.
    pub fn root(&self, mut v: usize) -> usize {
        while self.parent[v] != v {
            v = self.parent[v];
        }
        v
    }

    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        // Smaller index stays root so representatives are orbit minima.
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
        true
    }

    pub fn same(&self, a: usize, b: usize) -> bool {
        self.root(a) == self.root(b)
    }

    pub fn orbit_size(&self, v: usize) -> usize {
        self.size[self.root(v)]
    }

    pub fn num_orbits(&self) -> usize {
        (0..self.parent.len()).filter(|&v| self.parent[v] == v).count()
    }

    /// Orbits as sorted vertex lists, ordered by smallest element.
    pub fn classes(&self) -> Vec<Vec<usize>> {
        let n = self.parent.len();
        let mut by_root: Vec<Vec<usize>> = vec![Vec::new(); n];
        for v in 0..n {
            by_root[self.root(v)].push(v);
        }
        by_root.into_iter().filter(|c| !c.is_empty()).collect()
    }
}

impl PartialEq for OrbitPartition {
    fn eq(&self, other: &Self) -> bool {
        self.classes() == other.classes()
    }
}

impl Eq for OrbitPartition {}

#[derive(Clone, Debug)]
struct Level {
    point: usize,
    /// `reps[β]` maps the base point to `β`.
    reps: Vec<Option<Permutation>>,
    orbit: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct PermGroup {
    degree: usize,
    generators: Vec<Permutation>,
    strong: Vec<(Permutation, usize)>,
    levels: Vec<Level>,
    /// Requested base prefix; the chain is rebuilt on it lazily.
    base_prefix: Vec<usize>,
    built: bool,
    rng: ChaCha8Rng,
    random_sifts: usize,
}

impl PermGroup {
    pub fn trivial(degree: usize, seed: u64) -> Self {
        PermGroup {
            degree,
            generators: Vec::new(),
            strong: Vec::new(),
            levels: Vec::new(),
            base_prefix: Vec::new(),
            built: true,
            rng: ChaCha8Rng::seed_from_u64(seed),
            random_sifts: DEFAULT_RANDOM_SIFTS,
        }
    }

    pub fn from_generators(degree: usize, gens: &[Permutation], seed: u64) -> Result<Self> {
        let mut g = Self::trivial(degree, seed);
        for p in gens {
            g.add_generator(p)?;
        }
        Ok(g)
    }

    pub fn with_random_sifts(mut self, sifts: usize) -> Self {
        self.random_sifts = sifts.max(1);
        self
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    pub fn base(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.point).collect()
    }

    /// Whether the transversal chain is worth maintaining eagerly.
    fn chain_active(&self) -> bool {
        self.generators.len() > 2 || self.degree > 64
    }

    /// Adds `g` and returns whether the group (as currently known) grew.
    pub fn add_generator(&mut self, g: &Permutation) -> Result<bool> {
        if g.len() != self.degree {
            return Err(Error::Dimension {
                expected: self.degree,
                found: g.len(),
            });
        }
        if g.is_identity() {
            return Ok(false);
        }
        if self.built || self.chain_active() {
            self.ensure_built();
            let (residue, level) = self.sift_from(g.clone(), 0);
            if residue.is_identity() {
                return Ok(false);
            }
            self.generators.push(g.clone());
            self.insert_strong(residue, level);
            self.random_schreier();
        } else {
            // Cheap mode: the chain is rebuilt from the generators on demand.
            if self.generators.contains(g) {
                return Ok(false);
            }
            self.generators.push(g.clone());
        }
        Ok(true)
    }

    /// Requests `prefix` as the leading base points, rebuilding if needed.
    pub fn set_base_prefix(&mut self, prefix: &[usize]) {
        if self.base_prefix == prefix {
            return;
        }
        self.base_prefix = prefix.to_vec();
        self.built = false;
        if self.chain_active() {
            self.ensure_built();
        }
    }

    fn ensure_built(&mut self) {
        if self.built {
            return;
        }
        self.built = true;
        self.strong.clear();
        self.levels = self.base_prefix.iter().map(|&b| Self::new_level(self.degree, b)).collect();
        let gens = std::mem::take(&mut self.generators);
        for g in &gens {
            let (residue, level) = self.sift_from(g.clone(), 0);
            if !residue.is_identity() {
                self.insert_strong(residue, level);
            }
        }
        self.generators = gens;
        self.random_schreier();
    }

    fn new_level(n: usize, point: usize) -> Level {
        let mut reps = vec![None; n];
        reps[point] = Some(Permutation::identity(n));
        Level {
            point,
            reps,
            orbit: vec![point],
        }
    }

    /// Sifts `g` through levels `from..`; returns the residue and the level
    /// where it stopped (the chain length if it passed every level).
    fn sift_from(&self, mut g: Permutation, from: usize) -> (Permutation, usize) {
        for (i, level) in self.levels.iter().enumerate().skip(from) {
            let beta = g.image(level.point);
            match &level.reps[beta] {
                None => return (g, i),
                Some(u) => g = g.then_unchecked(&u.inverse()),
            }
        }
        (g, self.levels.len())
    }

    /// Residue of `g` after sifting; the identity iff `g` is recognised as a
    /// member of the current chain.
    pub fn sift(&mut self, g: &Permutation) -> Permutation {
        self.ensure_built();
        self.sift_from(g.clone(), 0).0
    }

    pub fn contains(&mut self, g: &Permutation) -> bool {
        g.len() == self.degree && self.sift(g).is_identity()
    }

    fn insert_strong(&mut self, h: Permutation, level: usize) {
        debug_assert!(!h.is_identity());
        let level = if level == self.levels.len() {
            let moved = (0..self.degree).find(|&v| h.image(v) != v).unwrap();
            self.levels.push(Self::new_level(self.degree, moved));
            self.levels.len() - 1
        } else {
            level
        };
        self.strong.push((h, level));
        for j in 0..=level {
            self.extend_orbit(j);
        }
    }

    fn extend_orbit(&mut self, j: usize) {
        let gens: Vec<&Permutation> = self
            .strong
            .iter()
            .filter(|(_, l)| *l >= j)
            .map(|(g, _)| g)
            .collect();
        let level = &mut self.levels[j];
        let mut i = 0;
        while i < level.orbit.len() {
            let beta = level.orbit[i];
            let u = level.reps[beta].clone().unwrap();
            for g in &gens {
                let gamma = g.image(beta);
                if level.reps[gamma].is_none() {
                    level.reps[gamma] = Some(u.then_unchecked(g));
                    level.orbit.push(gamma);
                }
            }
            i += 1;
        }
    }

    fn random_element(&mut self) -> Permutation {
        let n = self.degree;
        let mut r = Permutation::identity(n);
        for k in 0..self.strong.len() {
            if self.rng.gen_bool(0.5) {
                r = r.then_unchecked(&self.strong[k].0);
            }
        }
        for level in &self.levels {
            let beta = level.orbit[self.rng.gen_range(0..level.orbit.len())];
            r = r.then_unchecked(level.reps[beta].as_ref().unwrap());
        }
        r
    }

    fn random_schreier(&mut self) {
        if self.strong.is_empty() {
            return;
        }
        let mut quiet = 0;
        while quiet < self.random_sifts {
            let r = self.random_element();
            let (residue, level) = self.sift_from(r, 0);
            if residue.is_identity() {
                quiet += 1;
            } else {
                self.insert_strong(residue, level);
                quiet = 0;
            }
        }
    }

    /// Closes the chain deterministically by sifting every Schreier
    /// generator. Afterwards [`PermGroup::order`] is exact.
    pub fn complete(&mut self) {
        self.ensure_built();
        'outer: loop {
            for j in (0..self.levels.len()).rev() {
                let orbit = self.levels[j].orbit.clone();
                let gens: Vec<Permutation> = self
                    .strong
                    .iter()
                    .filter(|(_, l)| *l >= j)
                    .map(|(g, _)| g.clone())
                    .collect();
                for &beta in &orbit {
                    let u = self.levels[j].reps[beta].clone().unwrap();
                    for s in &gens {
                        let gamma = s.image(beta);
                        let ug_inv = self.levels[j].reps[gamma].as_ref().unwrap().inverse();
                        let schreier = u.then_unchecked(s).then_unchecked(&ug_inv);
                        let (residue, level) = self.sift_from(schreier, j + 1);
                        if !residue.is_identity() {
                            self.insert_strong(residue, level);
                            continue 'outer;
                        }
                    }
                }
            }
            break;
        }
    }

    /// Product of the basic orbit lengths.
    pub fn order(&mut self) -> BigUint {
        self.ensure_built();
        self.levels
            .iter()
            .fold(BigUint::one(), |acc, l| acc * BigUint::from(l.orbit.len()))
    }

    /// Orbits of the whole group.
    pub fn orbits(&self) -> OrbitPartition {
        OrbitPartition::from_generators(self.degree, &self.generators)
    }

    /// Orbits of the point-wise stabilizer of `fixed`, with `fixed` used as
    /// the base prefix. Never coarser than the true orbits.
    pub fn stabilizer_orbits(&mut self, fixed: &[usize]) -> OrbitPartition {
        if fixed.is_empty() {
            return self.orbits();
        }
        let prefix_ok = self.built
            && self.levels.len() >= fixed.len()
            && self.levels.iter().zip(fixed).all(|(l, &b)| l.point == b);
        if !prefix_ok {
            self.set_base_prefix(fixed);
            self.ensure_built();
        }
        self.level_orbits(fixed.len())
    }

    /// Orbits of the stabilizer of the first `depth` base points.
    pub fn level_orbits(&mut self, depth: usize) -> OrbitPartition {
        self.ensure_built();
        OrbitPartition::from_generators(
            self.degree,
            self.strong.iter().filter(|(_, l)| *l >= depth).map(|(g, _)| g),
        )
    }

    /// Orbits under the known generators that fix `fixed` point-wise. Sound
    /// but usually finer than [`PermGroup::stabilizer_orbits`].
    pub fn filtered_orbits(&self, fixed: &[usize]) -> OrbitPartition {
        let fixes = |g: &&Permutation| fixed.iter().all(|&v| g.image(v) == v);
        OrbitPartition::from_generators(
            self.degree,
            self.generators
                .iter()
                .chain(self.strong.iter().map(|(g, _)| g))
                .filter(fixes),
        )
    }

    /// True if the current chain starts with `prefix`.
    pub fn base_starts_with(&self, prefix: &[usize]) -> bool {
        self.built
            && self.levels.len() >= prefix.len()
            && self.levels.iter().zip(prefix).all(|(l, &b)| l.point == b)
    }
}
