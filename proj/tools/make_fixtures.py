"""Writes the JSON fixtures in data/ in canonical form (run from the repo root)."""
import itertools
import json
import random
from fractions import Fraction as F

rng = random.Random(20240521)


def num(x):
    x = F(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def interval_vertices(lo, hi):
    lo, hi = F(lo), F(hi)
    if lo == hi:
        return [[num(lo), num(1 - lo)]]
    return [[num(lo), num(1 - lo)], [num(hi), num(1 - hi)]]


def interval_constraints(lo, hi):
    return [{"alpha": ["1", "0"], "beta": num(lo)}, {"alpha": ["-1", "0"], "beta": num(-F(hi))}]


def random_interval():
    a, b = sorted(rng.sample(range(1, 8), 2))
    return F(a, 8), F(b, 8)


def network(nodes, edges, local_fn):
    order = [n for n, _ in nodes]
    states = dict(nodes)
    edges = sorted(edges, key=lambda e: (order.index(e[0]), order.index(e[1])))
    parents = {n: [a for a, b in edges if b == n] for n in order}
    parents = {n: sorted(p, key=order.index) for n, p in parents.items()}
    locals_ = []
    for n in order:
        for combo in itertools.product(*[states[p] for p in parents[n]]):
            pa = dict(zip(parents[n], combo))
            entry = {"node": n, "parents": pa}
            entry.update(local_fn(n, pa))
            locals_.append(entry)
    return {
        "nodes": [{"name": n, "states": s} for n, s in nodes],
        "edges": [[a, b] for a, b in edges],
        "locals": locals_,
    }


def write(name, doc):
    with open(f"data/{name}", "w") as fh:
        fh.write(json.dumps(doc, indent=2) + "\n")


def random_local(_n, _pa):
    lo, hi = random_interval()
    if rng.random() < 0.5:
        return {"vertices": interval_vertices(lo, hi)}
    return {"constraints": interval_constraints(lo, hi)}


binary = ["h", "t"]

# Two unconnected coins with P(h) in [1/4, 3/4].
write("two_coins.json", network([("1", binary), ("2", binary)], [],
                                lambda n, pa: {"constraints": interval_constraints(F(1, 4), F(3, 4))}))
write("two_coins_agreement.json",
      {"target": {"indicator": {"scope": ["1", "2"], "states": [["h", "h"], ["t", "t"]]}}, "rule": "unconditional"})
write("two_coins_empty_event.json",
      {"target": {"indicator": {"1": "h"}}, "given": {"scope": ["2"], "states": []}, "rule": "regular"})
write("two_coins_conditional.json",
      {"target": {"indicator": {"1": "h"}}, "given": {"2": "h"}, "rule": "regular"})

# Ten-node graph of the running example.
ten = [str(i) for i in range(1, 11)]
ten_edges = [("1", "3"), ("2", "3"), ("3", "4"), ("3", "5"), ("5", "7"), ("5", "8"), ("6", "8"), ("4", "7"),
             ("7", "9"), ("7", "10")]
write("ten_nodes.json", network([(n, ["0", "1"]) for n in ten], ten_edges, random_local))
write("ten_nodes_query.json", [
    {"target": {"scope": ["9"], "table": ["2", "-1"]}, "given": {"3": "1", "4": "0", "6": "1"}, "rule": "regular"},
    {"target": {"scope": ["9"], "table": ["2", "-1"]}, "given": {"3": "1", "4": "0", "6": "1"}, "rule": "natural"},
    {"target": {"scope": ["8", "10"], "table": ["1", "0", "1/2", "3"]}, "rule": "unconditional"},
])

# Converging pair 1 -> 3 <- 2.
write("vstructure.json", network([("1", binary), ("2", binary), ("3", binary)], [("1", "3"), ("2", "3")],
                                 random_local))
write("vstructure_query.json", {"target": {"scope": ["1", "2", "3"], "table": ["1", "0", "2", "-1", "0", "1", "1/2", "1"]},
                                "rule": "unconditional"})

# Chain of length three.
write("chain3.json", network([("1", binary), ("2", binary), ("3", binary)], [("1", "2"), ("2", "3")], random_local))
write("chain3_query.json", {"target": {"indicator": {"1": "h"}}, "given": {"3": "t"}, "rule": "regular",
                            "method": "chain"})

# Hidden Markov model with two observations.
hmm_nodes = [("S1", binary), ("S2", binary), ("S3", binary), ("O1", ["a", "b"]), ("O2", ["a", "b"])]
hmm_edges = [("S1", "S2"), ("S2", "S3"), ("S1", "O1"), ("S2", "O2")]
write("hmm.json", network(hmm_nodes, hmm_edges, random_local))
write("hmm_query.json", {"target": {"scope": ["S3"], "table": ["1", "0"]}, "given": {"O1": "a", "O2": "b"},
                         "rule": "regular", "method": "hmm",
                         "hmm": {"states": ["S1", "S2", "S3"], "observations": ["O1", "O2"], "order": 1}})

# Dynamic network with three time slices: temperatures t_i drive the pair (a_i, b_i).
dyn_nodes = []
dyn_edges = []
for i in range(1, 4):
    dyn_nodes += [(f"t{i}", ["cold", "warm"]), (f"a{i}", binary), (f"b{i}", binary)]
for i in range(1, 3):
    for child in (f"a{i + 1}", f"b{i + 1}"):
        for parent in (f"t{i}", f"a{i}", f"b{i}"):
            dyn_edges.append((parent, child))
write("dynamic.json", network(dyn_nodes, dyn_edges, random_local))
write("dynamic_query.json", {"target": {"scope": ["a3", "b3"], "table": ["1", "0", "0", "1"]},
                             "given": {"t1": "warm", "t2": "cold", "t3": "warm", "a1": "h", "b1": "t"},
                             "rule": "regular"})
