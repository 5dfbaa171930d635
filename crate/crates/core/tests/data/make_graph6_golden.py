"""Regenerates graph6_golden.txt with networkx as the reference encoder.

Each line is `n<TAB>edges<TAB>graph6`, edges as `u-v` separated by spaces.
"""
import random

import networkx as nx

rng = random.Random(20121014)
sizes = [0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 17, 20, 25, 31, 40, 62, 63, 64, 70, 100, 130]
lines = []
for i in range(50):
    n = sizes[i % len(sizes)]
    p = rng.choice([0.1, 0.3, 0.5, 0.9])
    g = nx.gnp_random_graph(n, p, seed=rng.randrange(1 << 30))
    edges = " ".join(f"{u}-{v}" for u, v in sorted(tuple(sorted(e)) for e in g.edges()))
    code = nx.to_graph6_bytes(g, header=False).decode().strip()
    lines.append(f"{n}\t{edges}\t{code}")
with open("graph6_golden.txt", "w") as f:
    f.write("\n".join(lines) + "\n")
