//! Brute-force oracles shared by the integration tests. Nothing here calls
//! into the search engines.
#![allow(dead_code)]

use ircanon::{Colouring, Graph, Permutation};

/// Adjacency matrix as booleans.
pub fn matrix(g: &Graph) -> Vec<Vec<bool>> {
    let n = g.n();
    let mut a = vec![vec![false; n]; n];
    for (u, v) in g.edges() {
        a[u][v] = true;
        a[v][u] = true;
    }
    a
}

/// Calls `f` on every colour-preserving automorphism, found by extending
/// partial maps that respect adjacency among the assigned vertices.
pub fn for_each_automorphism(g: &Graph, p: &Colouring, f: &mut dyn FnMut(&[usize])) {
    let a = matrix(g);
    let n = g.n();
    let mut img = vec![usize::MAX; n];
    let mut used = vec![false; n];
    fn rec(
        v: usize,
        a: &[Vec<bool>],
        p: &Colouring,
        img: &mut Vec<usize>,
        used: &mut Vec<bool>,
        f: &mut dyn FnMut(&[usize]),
    ) {
        let n = a.len();
        if v == n {
            f(img);
            return;
        }
        for w in 0..n {
            if used[w] || p.colour(w) != p.colour(v) {
                continue;
            }
            if (0..v).any(|u| a[u][v] != a[img[u]][w]) {
                continue;
            }
            img[v] = w;
            used[w] = true;
            rec(v + 1, a, p, img, used, f);
            used[w] = false;
        }
        img[v] = usize::MAX;
    }
    rec(0, &a, p, &mut img, &mut used, f);
}

pub fn brute_aut_order(g: &Graph, p: &Colouring) -> u64 {
    let mut count = 0u64;
    for_each_automorphism(g, p, &mut |_| count += 1);
    count
}

/// Orbit classes of the full automorphism group, each sorted, ordered by
/// smallest element.
pub fn brute_orbits(g: &Graph, p: &Colouring) -> Vec<Vec<usize>> {
    let n = g.n();
    let mut rep: Vec<usize> = (0..n).collect();
    for_each_automorphism(g, p, &mut |img| {
        for v in 0..n {
            let w = img[v];
            rep[w] = rep[w].min(v);
        }
    });
    // rep[w] is now the least vertex mapped onto w, which is the orbit min.
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for v in 0..n {
        if rep[v] == v {
            classes.push((0..n).filter(|&w| rep[w] == v).collect());
        }
    }
    classes
}

/// Some isomorphism `g1 -> g2` by backtracking.
pub fn brute_isomorphism(g1: &Graph, g2: &Graph) -> Option<Vec<usize>> {
    let n = g1.n();
    if n != g2.n() || g1.m() != g2.m() {
        return None;
    }
    let mut d1: Vec<usize> = (0..n).map(|v| g1.degree(v)).collect();
    let mut d2: Vec<usize> = (0..n).map(|v| g2.degree(v)).collect();
    let (a, b) = (matrix(g1), matrix(g2));
    let deg1 = d1.clone();
    let deg2 = d2.clone();
    d1.sort_unstable();
    d2.sort_unstable();
    if d1 != d2 {
        return None;
    }
    let mut img = vec![usize::MAX; n];
    let mut used = vec![false; n];
    fn rec(
        v: usize,
        a: &[Vec<bool>],
        b: &[Vec<bool>],
        deg1: &[usize],
        deg2: &[usize],
        img: &mut Vec<usize>,
        used: &mut Vec<bool>,
    ) -> bool {
        let n = a.len();
        if v == n {
            return true;
        }
        for w in 0..n {
            if used[w] || deg1[v] != deg2[w] || (0..v).any(|u| a[u][v] != b[img[u]][w]) {
                continue;
            }
            img[v] = w;
            used[w] = true;
            if rec(v + 1, a, b, deg1, deg2, img, used) {
                return true;
            }
            used[w] = false;
        }
        false
    }
    rec(0, &a, &b, &deg1, &deg2, &mut img, &mut used).then_some(img)
}

/// Upper-triangle bits of an `n <= 11` graph under `perm`, row-major, as an
/// integer whose most significant bit is the first pair.
fn code_under(n: usize, edges: &[(usize, usize)], perm: &[usize], index: &[Vec<usize>]) -> u64 {
    let total = n * n.saturating_sub(1) / 2;
    let mut code = 0u64;
    for &(u, v) in edges {
        let (a, b) = (perm[u], perm[v]);
        let idx = index[a.min(b)][a.max(b)];
        code |= 1 << (total - 1 - idx);
    }
    code
}

fn pair_index(n: usize) -> Vec<Vec<usize>> {
    let mut index = vec![vec![0; n]; n];
    let mut k = 0;
    for i in 0..n {
        for j in i + 1..n {
            index[i][j] = k;
            k += 1;
        }
    }
    index
}

fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    fn heap(k: usize, p: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k <= 1 {
            out.push(p.clone());
            return;
        }
        for i in 0..k {
            heap(k - 1, p, out);
            if k % 2 == 0 {
                p.swap(i, k - 1);
            } else {
                p.swap(0, k - 1);
            }
        }
    }
    heap(n, &mut p, &mut out);
    out
}

/// One representative of every isomorphism class of graphs on `0..=max_n`
/// vertices. Classes on `n` vertices come from adding a vertex to the
/// classes on `n - 1`, deduplicated by a brute-force canonical code.
pub fn all_graphs_up_to(max_n: usize) -> Vec<Graph> {
    assert!(max_n <= 8);
    let mut out = vec![Graph::empty(0)];
    let mut prev: Vec<Vec<(usize, usize)>> = vec![vec![]];
    for n in 1..=max_n {
        let perms = all_permutations(n);
        let index = pair_index(n);
        let mut seen = std::collections::HashSet::new();
        let mut cur = Vec::new();
        for base in &prev {
            for mask in 0u32..1 << (n - 1) {
                let mut edges = base.clone();
                edges.extend((0..n - 1).filter(|&u| mask >> u & 1 == 1).map(|u| (u, n - 1)));
                let canon = perms.iter().map(|p| code_under(n, &edges, p, &index)).min().unwrap();
                if seen.insert(canon) {
                    cur.push(edges);
                }
            }
        }
        out.extend(cur.iter().map(|e| Graph::from_edges(n, e).unwrap()));
        prev = cur;
    }
    out
}

pub fn petersen() -> Graph {
    let mut edges = Vec::new();
    for i in 0..5 {
        edges.push((i, (i + 1) % 5));
        edges.push((i, i + 5));
        edges.push((5 + i, 5 + (i + 2) % 5));
    }
    Graph::from_edges(10, &edges).unwrap()
}

pub fn cycle(n: usize) -> Graph {
    let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    Graph::from_edges(n, &edges).unwrap()
}

pub fn path(n: usize) -> Graph {
    let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
    Graph::from_edges(n, &edges).unwrap()
}

pub fn complete(n: usize) -> Graph {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            edges.push((i, j));
        }
    }
    Graph::from_edges(n, &edges).unwrap()
}

/// Colour-preserving automorphism check written out directly.
pub fn preserves(g: &Graph, p: &Colouring, perm: &Permutation) -> bool {
    let a = matrix(g);
    let n = g.n();
    (0..n).all(|v| p.colour(v) == p.colour(perm.image(v)))
        && (0..n).all(|u| (0..n).all(|v| a[u][v] == a[perm.image(u)][perm.image(v)]))
}

/// Upper-triangle bytes of `G^label`, rows ascending, MSB first.
pub fn oracle_bits(g: &Graph, label: &[usize]) -> Vec<u8> {
    let n = g.n();
    let index = pair_index(n);
    let total = n * n.saturating_sub(1) / 2;
    let mut bits = vec![0u8; total.div_ceil(8)];
    for (u, v) in g.edges() {
        let (a, b) = (label[u], label[v]);
        let idx = index[a.min(b)][a.max(b)];
        bits[idx / 8] |= 0x80 >> (idx % 8);
    }
    bits
}

/// Random graph from a simple LCG, independent of the library generators.
pub fn lcg_graph(n: usize, p_num: u64, p_den: u64, seed: u64) -> Graph {
    let mut s = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            if (s >> 33) % p_den < p_num {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, &edges).unwrap()
}
