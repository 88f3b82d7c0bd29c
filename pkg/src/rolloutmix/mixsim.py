"""The population Markov chain driven by random crossover, and brute-force oracles.

Simulation: ``step`` applies one draw of the mixing distribution and
``run_chain`` tallies the fraction of visited individuals that fit each
schema.  Oracles: ``enumerate_class`` materialises the set of populations
reachable from the initial one, on which the exact transition matrix and
uniform-average schema fractions can be computed.
"""
from __future__ import annotations

import math
import random
from bisect import bisect_right
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from fractions import Fraction
from itertools import accumulate
from typing import Sequence

from .cover import Partition, SetCover, base_of, build_partition, partition_as_cover
from .errors import ClassTooLarge
from .population import Population, Problem, inflate, state_positions
from .recombination import ONE_POINT, CrossoverOp, apply_op, enumerate_generators
from .schema import WILDCARD, Schema, matcher, resolve_symbol


@dataclass(frozen=True)
class MixDistribution:
    """Identity with probability ``p_identity``, otherwise one op drawn by weight."""

    p_identity: Fraction
    ops: tuple
    weights: tuple  # normalised op probabilities, summing to 1 - p_identity

    def __post_init__(self):
        if not 0 < self.p_identity <= 1:
            raise ValueError("p_identity must lie in (0, 1]")
        if any(w <= 0 for w in self.weights) and self.p_identity < 1:
            raise ValueError("every generator needs positive probability")
        if self.ops and self.p_identity < 1 and sum(self.weights) + self.p_identity != 1:
            raise ValueError("probabilities must sum to 1")

    @classmethod
    def uniform(cls, ops: Sequence[CrossoverOp], p_identity=Fraction(1, 2)) -> "MixDistribution":
        p_identity = Fraction(p_identity)
        ops = tuple(ops)
        if not ops:
            return cls(Fraction(1), (), ())
        w = (1 - p_identity) / len(ops)
        return cls(p_identity, ops, (w,) * len(ops))

    @classmethod
    def weighted(cls, weights: dict, p_identity=Fraction(1, 2)) -> "MixDistribution":
        p_identity = Fraction(p_identity)
        total = sum(Fraction(w) for w in weights.values())
        ops = tuple(weights)
        return cls(p_identity, ops,
                   tuple((1 - p_identity) * Fraction(weights[o]) / total for o in ops))

    @cached_property
    def is_uniform(self) -> bool:
        return len(set(self.weights)) <= 1

    @cached_property
    def _cum(self) -> list:
        return list(accumulate(float(w) for w in self.weights))

    def draw(self, rng: random.Random) -> CrossoverOp | None:
        """One draw: ``None`` for the identity, else an op.

        Consumes one uniform for the identity test and one for the op.
        """
        if rng.random() < self.p_identity or not self.ops:
            return None
        return self.ops[self._index(rng.random())]

    def _index(self, x: float) -> int:
        n = len(self.ops)
        if self.is_uniform:
            return min(int(x * n), n - 1)
        cum = self._cum
        return min(bisect_right(cum, x * cum[-1]), n - 1)


def default_mix(problem: Problem, p_identity=Fraction(1, 2)) -> MixDistribution:
    return MixDistribution.uniform(enumerate_generators(problem.cover), p_identity)


@dataclass(frozen=True)
class ChainState:
    population: Population
    step_index: int
    rng: random.Random


def initial_state(population: Population, seed) -> ChainState:
    return ChainState(population, 0, random.Random(seed))


def step(state: ChainState, mu: MixDistribution) -> ChainState:
    op = mu.draw(state.rng)
    pop = state.population if op is None else apply_op(state.population, op)
    return ChainState(pop, state.step_index + 1, state.rng)


@dataclass(frozen=True)
class FrequencyEstimate:
    """Schema tally of one chain run.

    ``phi_hat`` counts from time zero.  The post-burn-in tally excludes the
    first ``burn_in`` populations, and ``batch_phi`` holds per-batch
    fractions for a batch-means standard error.
    """

    schema: Schema
    hits: int
    individuals_seen: int
    hits_post_burn_in: int = 0
    individuals_post_burn_in: int = 0
    batch_phi: tuple = ()

    @property
    def phi_hat(self) -> float:
        return self.hits / self.individuals_seen

    @property
    def phi_hat_post_burn_in(self) -> float:
        if not self.individuals_post_burn_in:
            return float("nan")
        return self.hits_post_burn_in / self.individuals_post_burn_in

    @property
    def stderr(self) -> float:
        """Batch-means standard error of ``phi_hat`` (nan with fewer than 2 batches)."""
        n = len(self.batch_phi)
        if n < 2:
            return float("nan")
        mean = sum(self.batch_phi) / n
        var = sum((x - mean) ** 2 for x in self.batch_phi) / (n - 1)
        return math.sqrt(var / n)


class _Kernel:
    """Mutable integer-indexed copy of a population for fast stepping."""

    def __init__(self, population: Population, ops, schemata, cover, partition):
        states = [s for r in population for s in r.states]
        self.sid = {s: i for i, s in enumerate(states)}
        self.rolls = [[self.sid[s] for s in r.states] for r in population]
        self.terms = [r.terminal for r in population]
        self.actions = [r.action for r in population]
        n = len(states)
        self.roll_of = [0] * n
        self.idx_of = [0] * n
        for i, r in enumerate(self.rolls):
            for k, s in enumerate(r):
                self.roll_of[s] = i
                self.idx_of[s] = k
        self.op_kind = [op.kind == ONE_POINT for op in ops]
        self.op_u = [self.sid[op.u] for op in ops]
        self.op_v = [self.sid[op.v] for op in ops]
        self.states = states
        self.compiled = [self._compile(h, cover, partition) for h in schemata]

    def _compile(self, h: Schema, cover, partition):
        if h.is_universal:
            return None
        sets = []
        for o in h.path:
            members = resolve_symbol(o, cover, partition).members
            sets.append(frozenset(i for i, s in enumerate(self.states) if base_of(s) in members))
        tail = None
        if h.tail != WILDCARD:
            tail = frozenset(f for f in self.terms
                             if base_of(f) == h.tail or str(base_of(f)) == str(h.tail))
        return (h.action, sets, len(sets), tail)

    def fit(self, c, i) -> bool:
        if c is None:
            return True
        action, sets, n, tail = c
        if self.actions[i] != action:
            return False
        r = self.rolls[i]
        if tail is not None:
            if len(r) != n or self.terms[i] not in tail:
                return False
        elif len(r) < n:
            return False
        for s, members in zip(r, sets):
            if s not in members:
                return False
        return True

    def population(self) -> Population:
        from .population import Rollout

        return tuple(Rollout(a, tuple(self.states[s] for s in r), f)
                     for a, r, f in zip(self.actions, self.rolls, self.terms))


def run_chain(problem: Problem, t: int, schemata: Sequence[Schema], seed, m: int = 1,
              mu: MixDistribution | None = None, p_identity=Fraction(1, 2),
              burn_in: int = 0, batches: int = 0) -> list:
    """Tally schema fits over the first ``t`` populations of the chain (X_0 included).

    The problem is inflated by ``m`` first; schemata match through the base
    labels.  ``mu`` defaults to the uniform mix over the inflated problem's
    generators.  Trajectories are identical to repeated :func:`step` calls
    with ``random.Random(seed)``.  With ``batches > 1`` the run is cut into
    that many equal time batches for a batch-means error estimate.
    """
    if t < 1:
        raise ValueError("t must be >= 1")
    if m < 1:
        raise ValueError("m must be >= 1")
    if burn_in < 0 or batches < 0:
        raise ValueError("burn_in and batches must be nonnegative")
    work = inflate(problem.root, m) if m > 1 else problem
    if mu is None:
        mu = default_mix(work, p_identity)
    root = problem.root
    schemata = list(schemata)
    kern = _Kernel(work.population, mu.ops, schemata, root.cover, root.partition)
    rng = random.Random(seed)
    rnd = rng.random
    p_id = float(mu.p_identity)
    n_ops = len(mu.ops)

    compiled = kern.compiled
    tracked = [k for k, c in enumerate(compiled) if c is not None]
    b = len(kern.rolls)
    n_sch = len(compiled)
    cnt = [sum(kern.fit(c, i) for i in range(b)) for c in compiled]
    hits = [0] * n_sch
    since = [0] * n_sch

    def flush(now):
        for k in range(n_sch):
            hits[k] += cnt[k] * (now - since[k])
            since[k] = now

    # Time points at which the running tallies are snapshotted.
    marks = set()
    if 0 < burn_in < t:
        marks.add(burn_in)
    edges = []
    if batches > 1:
        edges = sorted({t * i // batches for i in range(1, batches)} - {0})
        marks.update(edges)
    snapshots: dict = {}
    pending = sorted(marks)
    next_mark = pending.pop(0) if pending else t

    rolls, terms = kern.rolls, kern.terms
    roll_of, idx_of = kern.roll_of, kern.idx_of
    op_kind, op_u, op_v = kern.op_kind, kern.op_u, kern.op_v
    uniform = mu.is_uniform
    fit = kern.fit

    for now in range(1, t):
        if now == next_mark:
            flush(now)
            snapshots[now] = list(hits)
            next_mark = pending.pop(0) if pending else t
        if rnd() < p_id or not n_ops:
            continue
        x = rnd()
        idx = min(int(x * n_ops), n_ops - 1) if uniform else mu._index(x)
        u, v = op_u[idx], op_v[idx]
        i, j = roll_of[u], roll_of[v]
        if op_kind[idx]:
            if i == j:
                continue
            touched = (i, j)
        else:
            touched = (i,) if i == j else (i, j)
        before = [sum(fit(compiled[k], r) for r in touched) for k in tracked]

        k, q = idx_of[u], idx_of[v]
        if op_kind[idx]:
            s1, s2 = rolls[i], rolls[j]
            n1 = s1[:k] + s2[q:]
            n2 = s2[:q] + s1[k:]
            rolls[i], rolls[j] = n1, n2
            for p in range(k, len(n1)):
                s = n1[p]
                roll_of[s] = i
                idx_of[s] = p
            for p in range(q, len(n2)):
                s = n2[p]
                roll_of[s] = j
                idx_of[s] = p
            terms[i], terms[j] = terms[j], terms[i]
        else:
            rolls[i][k], rolls[j][q] = v, u
            roll_of[u], roll_of[v] = j, i
            idx_of[u], idx_of[v] = q, k

        for pos, kk in enumerate(tracked):
            after = sum(fit(compiled[kk], r) for r in touched)
            if after != before[pos]:
                hits[kk] += cnt[kk] * (now - since[kk])
                since[kk] = now
                cnt[kk] += after - before[pos]
    flush(t)

    out = []
    bounds = [0] + edges + [t]
    for k, h in enumerate(schemata):
        def at(time_point):
            if time_point == 0:
                return 0
            if time_point == t:
                return hits[k]
            return snapshots[time_point][k]

        if 0 < burn_in < t:
            post_hits, post_n = hits[k] - at(burn_in), b * (t - burn_in)
        elif burn_in >= t:
            post_hits, post_n = 0, 0
        else:
            post_hits, post_n = hits[k], b * t
        batch_phi = ()
        if edges:
            batch_phi = tuple((at(hi) - at(lo)) / (b * (hi - lo))
                              for lo, hi in zip(bounds, bounds[1:]))
        out.append(FrequencyEstimate(h, hits[k], b * t, post_hits, post_n, batch_phi))
    return out


def final_population(problem: Problem, t: int, seed, m: int = 1,
                     mu: MixDistribution | None = None) -> Population:
    """Population X_{t-1} reached by :func:`run_chain` with the same arguments."""
    work = inflate(problem.root, m) if m > 1 else problem
    if mu is None:
        mu = default_mix(work)
    state = initial_state(work.population, seed)
    for _ in range(t - 1):
        state = step(state, mu)
    return state.population


# ---------------------------------------------------------------------------
# brute-force oracles

def enumerate_class(population: Population, cover: SetCover, bound: int = 10**6,
                    generators: Sequence[CrossoverOp] | None = None) -> list:
    """Breadth-first closure of ``population`` under the generators of ``cover``.

    Returns the class in discovery order (the initial population first).
    """
    if generators is None:
        generators = enumerate_generators(cover)
    seen = {population: None}
    queue = deque([population])
    while queue:
        pop = queue.popleft()
        pos = state_positions(pop)
        for op in generators:
            nxt = apply_op(pop, op, pos=pos)
            if nxt not in seen:
                if len(seen) >= bound:
                    raise ClassTooLarge(bound)
                seen[nxt] = None
                queue.append(nxt)
    return list(seen)


def enumerate_problem_class(problem: Problem, bound: int = 10**6,
                            use_partition: bool = False) -> list:
    cover = partition_as_cover(problem.partition) if use_partition else problem.cover
    return enumerate_class(problem.population, cover, bound)


@dataclass(frozen=True)
class TransitionMatrix:
    members: list
    rows: list  # rows[i] = {j: probability}

    def is_stochastic(self) -> bool:
        return all(sum(r.values()) == 1 and all(p >= 0 for p in r.values()) for r in self.rows)

    def is_symmetric(self) -> bool:
        return all(self.rows[j].get(i) == p for i, r in enumerate(self.rows)
                   for j, p in r.items())

    def uniform_is_stationary(self) -> bool:
        """Whether u^T M = u^T for the uniform vector u, in exact arithmetic."""
        n = len(self.rows)
        u = Fraction(1, n)
        col = [Fraction(0)] * n
        for r in self.rows:
            for j, p in r.items():
                col[j] += u * p
        return all(c == u for c in col)

    def has_positive_diagonal(self) -> bool:
        return all(r.get(i, 0) > 0 for i, r in enumerate(self.rows))

    def is_irreducible(self) -> bool:
        n = len(self.rows)

        def reach(adj):
            seen = {0}
            queue = deque([0])
            while queue:
                x = queue.popleft()
                for y in adj[x]:
                    if y not in seen:
                        seen.add(y)
                        queue.append(y)
            return len(seen) == n

        fwd = [[j for j, p in r.items() if p > 0] for r in self.rows]
        rev: list = [[] for _ in range(n)]
        for i, r in enumerate(fwd):
            for j in r:
                rev[j].append(i)
        return reach(fwd) and reach(rev)

    def to_floats(self):
        import numpy as np

        n = len(self.rows)
        out = np.zeros((n, n))
        for i, r in enumerate(self.rows):
            for j, p in r.items():
                out[i, j] = float(p)
        return out


def exact_transition_matrix(members: Sequence[Population], mu: MixDistribution) -> TransitionMatrix:
    index = {p: i for i, p in enumerate(members)}
    rows = []
    for i, pop in enumerate(members):
        row = {i: mu.p_identity}
        pos = state_positions(pop)
        for op, w in zip(mu.ops, mu.weights):
            j = index[apply_op(pop, op, pos=pos)]
            row[j] = row.get(j, Fraction(0)) + w
        rows.append(row)
    return TransitionMatrix(list(members), rows)


def first_position_fraction(members: Sequence[Population], schema: Schema, cover: SetCover,
                            partition: Partition | None = None) -> Fraction:
    """Share of populations in the class whose first rollout fits ``schema``."""
    if partition is None:
        partition = build_partition(cover)
    match = matcher(schema, cover, partition)
    hits = sum(match(p[0]) for p in members)
    return Fraction(hits, len(members))


def uniform_average_fraction(members: Sequence[Population], schema: Schema, cover: SetCover,
                             partition: Partition | None = None) -> Fraction:
    """Class average of the fraction of rollouts fitting ``schema``."""
    if partition is None:
        partition = build_partition(cover)
    b = len(members[0])
    match = matcher(schema, cover, partition)
    hits = sum(match(r) for p in members for r in p)
    return Fraction(hits, b * len(members))


def project_equiv(population: Population, partition: Partition) -> tuple:
    """Relabel every state by its class; actions and terminals are kept."""
    cls = partition.member_of
    return tuple((r.action, tuple(cls[s] for s in r.states), r.terminal) for r in population)
