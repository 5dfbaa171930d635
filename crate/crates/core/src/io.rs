//! graph6 and DIMACS formats, plus cycle notation for permutations.
//!
//! graph6: an optional `>>graph6<<` header, then the vertex count `N(n)` and
//! the upper triangle in column-major order (`(0,1),(0,2),(1,2),(0,3),..`),
//! six bits per byte, each byte offset by 63. `N(n)` is one byte `n+63` for
//! `n <= 62`, `126` plus three bytes for `n <= 258047`, and `126 126` plus
//! six bytes above that.
//!
//! DIMACS: `c` comment lines, one `p edge n m` header, `e u v` edge lines
//! with 1-based vertices, and optional `n v c` lines giving vertex `v` the
//! integer colour `c` (vertices without a line get colour 0). Colours are
//! ordered by value.

use crate::error::{Error, Result};
use crate::graph::{ColouredGraph, Colouring, Graph, Permutation};

const GRAPH6_HEADER: &str = ">>graph6<<";

fn push_size(out: &mut Vec<u8>, n: usize) {
    if n <= 62 {
        out.push(n as u8 + 63);
    } else if n <= 258_047 {
        out.push(126);
        for shift in [12, 6, 0] {
            out.push(((n >> shift) & 63) as u8 + 63);
        }
    } else {
        out.push(126);
        out.push(126);
        for shift in [30, 24, 18, 12, 6, 0] {
            out.push(((n >> shift) & 63) as u8 + 63);
        }
    }
}

pub fn encode_graph6(g: &Graph) -> String {
    let n = g.n();
    let mut out = Vec::new();
    push_size(&mut out, n);
    let mut acc = 0u8;
    let mut k = 0;
    for j in 1..n {
        for i in 0..j {
            acc = acc << 1 | g.adjacent(i, j) as u8;
            k += 1;
            if k == 6 {
                out.push(acc + 63);
                acc = 0;
                k = 0;
            }
        }
    }
    if k > 0 {
        out.push((acc << (6 - k)) + 63);
    }
    String::from_utf8(out).expect("printable ascii")
}

pub fn decode_graph6(s: &str) -> Result<Graph> {
    let trimmed = s.trim_end_matches(['\n', '\r']);
    let (body, base) = match trimmed.strip_prefix(GRAPH6_HEADER) {
        Some(rest) => (rest.as_bytes(), GRAPH6_HEADER.len()),
        None => (trimmed.as_bytes(), 0),
    };
    let err = |offset: usize, message: &str| Error::Graph6 {
        offset: base + offset,
        message: message.to_string(),
    };
    for (i, &b) in body.iter().enumerate() {
        if !(63..=126).contains(&b) {
            return Err(err(i, "byte outside the printable range 63..126"));
        }
    }
    let six = |i: usize| -> Result<usize> {
        body.get(i)
            .map(|&b| (b - 63) as usize)
            .ok_or_else(|| err(i, "truncated size header"))
    };
    let (n, mut pos) = match body.first() {
        None => return Err(err(0, "empty input")),
        Some(&126) if body.get(1) == Some(&126) => {
            let mut n = 0;
            for i in 2..8 {
                n = n << 6 | six(i)?;
            }
            (n, 8)
        }
        Some(&126) => {
            let mut n = 0;
            for i in 1..4 {
                n = n << 6 | six(i)?;
            }
            (n, 4)
        }
        Some(&b) => ((b - 63) as usize, 1),
    };
    let total = n * n.saturating_sub(1) / 2;
    let need = total.div_ceil(6);
    if body.len() != pos + need {
        return Err(err(
            body.len().min(pos + need),
            &format!("expected {need} adjacency bytes for n={n}, found {}", body.len() - pos),
        ));
    }
    let mut edges = Vec::new();
    let mut bit = 0;
    'outer: for j in 1..n {
        for i in 0..j {
            if bit == total {
                break 'outer;
            }
            let byte = body[pos] - 63;
            if byte >> (5 - bit % 6) & 1 == 1 {
                edges.push((i, j));
            }
            bit += 1;
            if bit % 6 == 0 {
                pos += 1;
            }
        }
    }
    if total % 6 != 0 {
        let last = body[body.len() - 1] - 63;
        if last & ((1 << (6 - total % 6)) - 1) != 0 {
            return Err(err(body.len() - 1, "nonzero padding bits"));
        }
    }
    Graph::from_edges(n, &edges)
}

/// Parses DIMACS text into a coloured graph.
pub fn decode_dimacs(text: &str) -> Result<ColouredGraph> {
    let mut n: Option<usize> = None;
    let mut declared_m = 0;
    let mut edges = Vec::new();
    let mut colours: Vec<(usize, i64, usize)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let err = |message: String| Error::Dimacs { line, message };
        let fields: Vec<&str> = raw.split_whitespace().collect();
        let Some(&kind) = fields.first() else { continue };
        let num = |i: usize| -> Result<usize> {
            fields
                .get(i)
                .ok_or_else(|| err(format!("missing field {i}")))?
                .parse()
                .map_err(|_| err(format!("bad integer {:?}", fields[i])))
        };
        match kind {
            "c" => {}
            "p" => {
                if n.is_some() {
                    return Err(err("second p line".into()));
                }
                if fields.len() != 4 || !matches!(fields[1], "edge" | "col") {
                    return Err(err("expected `p edge n m`".into()));
                }
                n = Some(num(2)?);
                declared_m = num(3)?;
            }
            "e" | "n" => {
                let Some(nv) = n else {
                    return Err(err(format!("`{kind}` line before the p line")));
                };
                if fields.len() != 3 {
                    return Err(err(format!("`{kind}` line needs two values")));
                }
                let u = num(1)?;
                if u == 0 || u > nv {
                    return Err(err(format!("vertex {u} outside 1..{nv}")));
                }
                if kind == "e" {
                    let v = num(2)?;
                    if v == 0 || v > nv {
                        return Err(err(format!("vertex {v} outside 1..{nv}")));
                    }
                    if u == v {
                        return Err(err(format!("self-loop at vertex {u}")));
                    }
                    edges.push(((u - 1).min(v - 1), (u - 1).max(v - 1)));
                } else {
                    let c: i64 = fields[2].parse().map_err(|_| err(format!("bad colour {:?}", fields[2])))?;
                    colours.push((u - 1, c, line));
                }
            }
            other => return Err(err(format!("unknown line type {other:?}"))),
        }
    }
    let n = n.ok_or(Error::Dimacs {
        line: 0,
        message: "missing `p edge n m` header".into(),
    })?;
    let before = edges.len();
    edges.sort_unstable();
    edges.dedup();
    if edges.len() != before {
        log::warn!("collapsed {} duplicate edges", before - edges.len());
    }
    if edges.len() != declared_m && before != declared_m {
        log::warn!("header declares {declared_m} edges, found {}", edges.len());
    }
    let mut labels = vec![0i64; n];
    let mut set = vec![false; n];
    for (v, c, line) in colours {
        if set[v] && labels[v] != c {
            return Err(Error::Dimacs {
                line,
                message: format!("vertex {} coloured twice", v + 1),
            });
        }
        set[v] = true;
        labels[v] = c;
    }
    let graph = Graph::from_edges(n, &edges)?;
    ColouredGraph::new(graph, Colouring::from_labels(&labels))
}

/// DIMACS text; colour lines are written only for non-unit colourings,
/// using the colour index.
pub fn encode_dimacs(cg: &ColouredGraph) -> String {
    let g = &cg.graph;
    let mut out = format!("p edge {} {}\n", g.n(), g.m());
    for (u, v) in g.edges() {
        out.push_str(&format!("e {} {}\n", u + 1, v + 1));
    }
    if cg.colouring.len() > 1 {
        for v in 0..g.n() {
            out.push_str(&format!("n {} {}\n", v + 1, cg.colouring.colour(v)));
        }
    }
    out
}

/// Disjoint cycles, 0-based, fixed points omitted; `()` for the identity.
pub fn format_cycles(p: &Permutation) -> String {
    p.to_string()
}

/// Parses cycle notation such as `(0 2)(1 3 4)` on `n` points.
pub fn parse_cycles(n: usize, s: &str) -> Result<Permutation> {
    let mut cycles: Vec<Vec<usize>> = Vec::new();
    let mut rest = s.trim();
    while !rest.is_empty() {
        let open = rest
            .strip_prefix('(')
            .ok_or_else(|| Error::InvalidParameter(format!("expected '(' in {s:?}")))?;
        let close = open
            .find(')')
            .ok_or_else(|| Error::InvalidParameter(format!("unclosed cycle in {s:?}")))?;
        let cycle = open[..close]
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(|t| t.parse().map_err(|_| Error::InvalidParameter(format!("bad point {t:?}"))))
            .collect::<Result<Vec<usize>>>()?;
        if !cycle.is_empty() {
            cycles.push(cycle);
        }
        rest = open[close + 1..].trim_start();
    }
    let refs: Vec<&[usize]> = cycles.iter().map(|c| c.as_slice()).collect();
    Permutation::from_cycles(n, &refs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graph6_known_values() {
        assert_eq!(encode_graph6(&Graph::empty(1)), "@");
        assert_eq!(encode_graph6(&Graph::from_edges(2, &[(0, 1)]).unwrap()), "A_");
        let k3 = Graph::from_edges(3, &[(0, 1), (0, 2), (1, 2)]).unwrap();
        assert_eq!(encode_graph6(&k3), "Bw");
        assert_eq!(decode_graph6("Bw").unwrap(), k3);
        assert_eq!(decode_graph6(">>graph6<<A_\n").unwrap().m(), 1);
        assert_eq!(encode_graph6(&Graph::empty(0)), "?");
    }

    #[test]
    fn graph6_large_sizes() {
        for n in [62, 63, 64, 100] {
            let g = Graph::from_edges(n, &[(0, n - 1), (3, 7)]).unwrap();
            let s = encode_graph6(&g);
            assert_eq!(decode_graph6(&s).unwrap(), g, "n={n}");
        }
        assert!(encode_graph6(&Graph::empty(63)).starts_with("~??~"));
    }

    #[test]
    fn graph6_errors_carry_offsets() {
        match decode_graph6("B w") {
            Err(Error::Graph6 { offset, .. }) => assert_eq!(offset, 1),
            other => panic!("{other:?}"),
        }
        match decode_graph6("C") {
            Err(Error::Graph6 { offset, .. }) => assert_eq!(offset, 1),
            other => panic!("{other:?}"),
        }
        assert!(decode_graph6("Bx").is_err());
        assert!(decode_graph6("").is_err());
    }

    #[test]
    fn dimacs_round_trip() {
        let cg = decode_dimacs("c path\np edge 3 2\ne 1 2\ne 2 3\n").unwrap();
        assert_eq!(cg.graph, Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap());
        assert_eq!(decode_dimacs(&encode_dimacs(&cg)).unwrap(), cg);

        let coloured = decode_dimacs("p edge 3 1\ne 1 3\ne 3 1\nn 2 5\n").unwrap();
        assert_eq!(coloured.graph.m(), 1);
        assert_eq!(coloured.colouring.cells(), &[vec![0, 2], vec![1]]);
        assert_eq!(decode_dimacs(&encode_dimacs(&coloured)).unwrap(), coloured);
    }

    #[test]
    fn dimacs_errors() {
        match decode_dimacs("p edge 2 1\ne 1 1\n") {
            Err(Error::Dimacs { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        assert!(decode_dimacs("e 1 2\n").is_err());
        assert!(decode_dimacs("p edge 2 1\ne 1 3\n").is_err());
        assert!(decode_dimacs("p edge 2\n").is_err());
        assert!(decode_dimacs("c nothing\n").is_err());
    }

    #[test]
    fn cycles_round_trip() {
        let p = parse_cycles(9, "(0 6 8 2)(1 3 7 5)").unwrap();
        assert_eq!(format_cycles(&p), "(0 6 8 2)(1 3 7 5)");
        assert_eq!(format_cycles(&p.inverse()), "(0 2 8 6)(1 5 7 3)");
        assert!(parse_cycles(3, "()").unwrap().is_identity());
        assert!(parse_cycles(3, "(0 5)").is_err());
    }
}
