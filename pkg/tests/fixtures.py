"""Tiny hand-built problems and random generators shared by the tests."""

from rolloutmix import Rollout, Schema, make_problem, validate_cover
from rolloutmix.cover import build_partition

SPECS = {
    # homologous, two actions
    "H2": (
        [("alpha", ["a1", "b1", "c1"], "f1"), ("beta", ["a2", "b2"], "f2"),
         ("alpha", ["a3", "d3"], "f3")],
        {"A1": ["a1", "a2"], "A2": ["a2", "a3"], "B": ["b1", "b2"], "C": ["c1"], "D": ["d3"]},
    ),
    # homologous, one action
    "H3": (
        [("alpha", ["a1", "b1"], "f1"), ("alpha", ["a2", "b2", "c2"], "f2"),
         ("alpha", ["a3"], "f3")],
        {"A1": ["a1", "a2"], "A2": ["a2", "a3"], "B": ["b1", "b2"], "C": ["c2"]},
    ),
    "H4": (
        [("alpha", ["x1", "y1", "z1"], "f1"), ("alpha", ["x2", "y2"], "f2")],
        {"X": ["x1", "x2"], "Y1": ["y1"], "Y": ["y1", "y2"], "Z": ["z1"]},
    ),
    # not homologous
    "N1": (
        [("alpha", ["a", "b"], "f1"), ("beta", ["c"], "f2")],
        {"S1": ["a", "c"], "S2": ["b", "c"]},
    ),
    "H5": (
        [("alpha", ["a", "b"], "f1"), ("beta", ["c", "d"], "f2"), ("alpha", ["e"], "f3")],
        {"S1": ["a", "c"], "S2": ["b", "d"], "S3": ["c", "e"]},
    ),
}


def build(name):
    rollouts, sets = SPECS[name]
    pop = [Rollout(a, tuple(s), f) for a, s, f in rollouts]
    states = [s for r in pop for s in r.states]
    return make_problem(validate_cover(states, sets), pop)


def random_cover(rng, n_states, max_sets=5):
    states = [f"s{i}" for i in range(n_states)]
    k = rng.randint(1, max_sets)
    sets = {f"O{j}": set() for j in range(k)}
    for s in states:
        for j in rng.sample(range(k), rng.randint(1, min(2, k))):
            sets[f"O{j}"].add(s)
    sets = {j: sorted(v) for j, v in sets.items() if v}
    return states, sets


def random_problem(rng, max_rollouts=4, max_height=4, actions=("alpha", "beta")):
    b = rng.randint(1, max_rollouts)
    heights = [rng.randint(1, max_height) for _ in range(b)]
    n = sum(heights)
    states, sets = random_cover(rng, n)
    rng.shuffle(states)
    pop, k = [], 0
    for i, h in enumerate(heights):
        pop.append(Rollout(rng.choice(actions), tuple(states[k:k + h]), f"f{i}"))
        k += h
    return make_problem(validate_cover(states, sets), pop)


def random_schema(rng, problem, max_len=4, classes=False):
    """A random schema over the problem's cover sets (or classes)."""
    if rng.random() < 0.05:
        return Schema()
    pool = sorted(problem.partition.classes if classes else problem.cover.sets)
    path = tuple(rng.choice(pool) for _ in range(rng.randint(0, max_len)))
    terminals = sorted(problem.terminals)
    tail = "#" if rng.random() < 0.5 else rng.choice(terminals)
    return Schema(rng.choice(sorted(problem.actions)), path, tail)


def closure_oracle(states, sets):
    """Equivalence classes from the boolean relation matrix, squared to a fixpoint."""
    idx = {s: i for i, s in enumerate(states)}
    n = len(states)
    r = [[i == j for j in range(n)] for i in range(n)]
    for members in sets.values():
        for u in members:
            for v in members:
                r[idx[u]][idx[v]] = True
    while True:
        sq = [[any(r[i][k] and r[k][j] for k in range(n)) for j in range(n)] for i in range(n)]
        if sq == r:
            break
        r = sq
    return {frozenset(states[j] for j in range(n) if r[i][j]) for i in range(n)}


def partition_blocks(cover):
    return {frozenset(v) for v in build_partition(cover).classes.values()}
