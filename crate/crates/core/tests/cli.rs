use std::path::Path;
use std::process::{Command, Output};

use ircanon::generators::random_relabel;
use ircanon::io::{decode_graph6, encode_graph6};
use ircanon::Permutation;

fn ircanon(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ircanon")).args(args).output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn petersen_g6() -> String {
    let mut edges = Vec::new();
    for i in 0..5 {
        edges.extend([(i, (i + 1) % 5), (i, i + 5), (5 + i, 5 + (i + 2) % 5)]);
    }
    encode_graph6(&ircanon::Graph::from_edges(10, &edges).unwrap())
}

#[test]
fn aut_on_triangle() {
    let dir = tempfile::tempdir().unwrap();
    let k3 = write(dir.path(), "k3.g6", "Bw\n");
    for engine in ["dfs", "bfs"] {
        let out = ircanon(&["aut", &k3, "--engine", engine]);
        assert_eq!(out.status.code(), Some(0));
        let text = stdout(&out);
        assert!(text.starts_with("order 6\norbits [0 1 2]\n"), "{text}");
        assert!(text.lines().filter(|l| l.starts_with("generator ")).count() >= 1);
    }
}

#[test]
fn canon_is_relabelling_invariant() {
    let dir = tempfile::tempdir().unwrap();
    let g = decode_graph6(&petersen_g6()).unwrap();
    let (h, _) = random_relabel(&g, 9);
    let a = write(dir.path(), "a.g6", &encode_graph6(&g));
    let b = write(dir.path(), "b.g6", &encode_graph6(&h));
    let field = |text: &str, key: &str| {
        text.lines().find_map(|l| l.strip_prefix(key).map(str::to_string)).unwrap()
    };
    for selector in ["first", "smallest", "joined", "ancestral"] {
        let ta = stdout(&ircanon(&["canon", &a, "--selector", selector]));
        let tb = stdout(&ircanon(&["canon", &b, "--selector", selector]));
        assert_eq!(field(&ta, "order "), "120");
        assert_eq!(field(&ta, "certificate "), field(&tb, "certificate "));
        assert_eq!(field(&ta, "graph6 "), field(&tb, "graph6 "));
        let labelling: Vec<usize> = field(&ta, "labelling ").split(' ').map(|x| x.parse().unwrap()).collect();
        let canon = decode_graph6(&field(&ta, "graph6 ")).unwrap();
        assert_eq!(g.permuted(&Permutation::from_images(labelling).unwrap()).unwrap(), canon);
    }
}

#[test]
fn iso_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let g = decode_graph6(&petersen_g6()).unwrap();
    let (h, _) = random_relabel(&g, 4);
    let a = write(dir.path(), "a.g6", &encode_graph6(&g));
    let b = write(dir.path(), "b.g6", &encode_graph6(&h));
    let out = ircanon(&["iso", &a, &b, "--engine", "bfs"]);
    assert_eq!(out.status.code(), Some(0));
    let images: Vec<usize> = stdout(&out)
        .trim()
        .strip_prefix("mapping ")
        .unwrap()
        .split(' ')
        .map(|x| x.parse().unwrap())
        .collect();
    assert_eq!(g.permuted(&Permutation::from_images(images).unwrap()).unwrap(), h);

    let c = write(dir.path(), "c.dimacs", "p edge 10 15\n");
    let out = ircanon(&["iso", &a, &c, "--format", "graph6"]);
    assert_eq!(out.status.code(), Some(2), "unparsable second input");
    let gen = stdout(&ircanon(&["gen", "cfi:n=10,seed=2"]));
    let mut lines = gen.lines();
    let x = write(dir.path(), "x.g6", lines.next().unwrap());
    let y = write(dir.path(), "y.g6", lines.next().unwrap());
    let out = ircanon(&["iso", &x, &y]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout(&out).trim(), "NONISOMORPHIC");
}

#[test]
fn dimacs_input_with_colours() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "c4.dimacs", "c square\np edge 4 4\ne 1 2\ne 2 3\ne 3 4\ne 4 1\nn 1 1\n");
    let text = stdout(&ircanon(&["aut", &path]));
    assert!(text.starts_with("order 2\n"), "{text}");
    let out = ircanon(&["aut", &write(dir.path(), "bad.dimacs", "p edge 2 1\ne 1 1\n")]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn budget_and_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "p.g6", &petersen_g6());
    assert_eq!(ircanon(&["aut", &p, "--budget", "1"]).status.code(), Some(3));
    assert_eq!(ircanon(&["aut"]).status.code(), Some(2));
    assert_eq!(ircanon(&["aut", &p, "--engine", "xyz"]).status.code(), Some(2));
}

#[test]
fn gen_emits_graph6() {
    let out = stdout(&ircanon(&["gen", "hypercube:d=3"]));
    let g = decode_graph6(out.trim()).unwrap();
    assert_eq!((g.n(), g.m()), (8, 12));
    let tree = stdout(&ircanon(&["gen", "tree:n=50,seed=1", "--relabel", "3"]));
    assert_eq!(decode_graph6(tree.trim()).unwrap().m(), 49);
}

#[test]
fn bench_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let plan = write(
        dir.path(),
        "plan.toml",
        "seed = 5\nmin_seconds = 0.0\n[[graphs]]\nfamily = \"gnp\"\nn = 100\np = 0.5\nseed = 1\n",
    );
    let csv = dir.path().join("out.csv");
    let out = ircanon(&["bench", &plan, "--csv", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&csv).unwrap();
    let rows: Vec<Vec<&str>> = text.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r[12] == rows[0][12]), "group orders differ: {text}");
    let again = ircanon(&["bench", &plan]);
    let strip = |t: &str| -> Vec<String> {
        t.lines()
            .map(|l| {
                let mut f: Vec<&str> = l.split(',').collect();
                f.drain(6..9);
                f.join(",")
            })
            .collect()
    };
    assert_eq!(strip(&stdout(&again)), strip(&text));
}
