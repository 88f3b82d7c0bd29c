"""One-point (chi) and single-swap (nu) crossover on whole populations.

Both operators are keyed by a recombination-compatible triple (O, u, v).
Because every state occurs at most once in a population, the triple picks
out at most one pair of positions, and each operator is an involution.
"""
from __future__ import annotations

from itertools import combinations
from typing import Hashable, Iterable, NamedTuple

from .cover import SetCover, is_compatible_triple, sort_key
from .errors import IncompatibleTriple
from .population import Population, Rollout, state_positions

ONE_POINT = "chi"
SINGLE_SWAP = "nu"


class CrossoverOp(NamedTuple):
    kind: str
    set_id: Hashable
    u: Hashable
    v: Hashable

    def __str__(self):
        return f"{self.kind}[{self.set_id},{self.u},{self.v}]"


def _check(cover, set_id, u, v):
    if cover is not None and not is_compatible_triple(cover, set_id, u, v):
        raise IncompatibleTriple(set_id, u, v)


def _one_point(pop: Population, u, v, pos) -> Population:
    if u == v or u not in pos or v not in pos:
        return pop
    (i, k), (j, q) = pos[u], pos[v]
    if i == j:
        return pop
    r1, r2 = pop[i], pop[j]
    new1 = Rollout(r1.action, r1.states[:k] + r2.states[q:], r2.terminal)
    new2 = Rollout(r2.action, r2.states[:q] + r1.states[k:], r1.terminal)
    out = list(pop)
    out[i], out[j] = new1, new2
    return tuple(out)


def _single_swap(pop: Population, u, v, pos) -> Population:
    if u == v or u not in pos or v not in pos:
        return pop
    (i, k), (j, q) = pos[u], pos[v]
    out = list(pop)
    if i == j:
        states = list(pop[i].states)
        states[k], states[q] = states[q], states[k]
        out[i] = pop[i]._replace(states=tuple(states))
    else:
        s1, s2 = list(pop[i].states), list(pop[j].states)
        s1[k], s2[q] = s2[q], s1[k]
        out[i] = pop[i]._replace(states=tuple(s1))
        out[j] = pop[j]._replace(states=tuple(s2))
    return tuple(out)


def apply_one_point(population: Population, set_id, u, v, cover: SetCover | None = None,
                    pos: dict | None = None) -> Population:
    """Exchange the suffixes (terminals included) starting at ``u`` and ``v``.

    Identity when either state is absent or both sit in the same rollout.
    """
    _check(cover, set_id, u, v)
    return _one_point(population, u, v, pos if pos is not None else state_positions(population))


def apply_single_swap(population: Population, set_id, u, v, cover: SetCover | None = None,
                      pos: dict | None = None) -> Population:
    """Exchange the positions of ``u`` and ``v`` (within one rollout or across two)."""
    _check(cover, set_id, u, v)
    return _single_swap(population, u, v, pos if pos is not None else state_positions(population))


def apply_op(population: Population, op: CrossoverOp, cover: SetCover | None = None,
             pos: dict | None = None) -> Population:
    _check(cover, op.set_id, op.u, op.v)
    if pos is None:
        pos = state_positions(population)
    if op.kind == ONE_POINT:
        return _one_point(population, op.u, op.v, pos)
    if op.kind == SINGLE_SWAP:
        return _single_swap(population, op.u, op.v, pos)
    raise ValueError(f"unknown crossover kind {op.kind!r}")


def apply_sequence(population: Population, ops: Iterable[CrossoverOp],
                   cover: SetCover | None = None) -> Population:
    """Apply ``ops`` left to right; the empty sequence is the identity."""
    for op in ops:
        population = apply_op(population, op, cover)
    return population


def enumerate_generators(cover: SetCover, population: Population | None = None) -> list:
    """All nontrivial chi and nu ops, one per unordered pair inside each cover set.

    ``population`` is accepted for interface symmetry; every cover state is
    assumed to occur in it.
    """
    ops = []
    for set_id in sorted(cover.sets, key=sort_key):
        members = sorted(cover.sets[set_id], key=sort_key)
        for u, v in combinations(members, 2):
            ops.append(CrossoverOp(ONE_POINT, set_id, u, v))
            ops.append(CrossoverOp(SINGLE_SWAP, set_id, u, v))
    return ops
