"""Rollouts, populations and problems, plus inflation."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Mapping, NamedTuple, Sequence

from .cover import Copy, Partition, SetCover, build_partition
from .errors import DuplicateState, DuplicateTerminal, MissingState, UnknownReference


class Rollout(NamedTuple):
    action: Hashable
    states: tuple
    terminal: Hashable

    @property
    def height(self) -> int:
        return len(self.states)

    def __str__(self):
        inner = ", ".join(str(s) for s in self.states)
        return f"({self.action}; {inner}; {self.terminal})"


# Ordered: permuting rollouts yields a different population.
Population = tuple


def make_population(rollouts: Sequence) -> Population:
    return tuple(
        r if isinstance(r, Rollout) else Rollout(r[0], tuple(r[1]), r[2])
        for r in rollouts
    )


@dataclass(frozen=True)
class Problem:
    cover: SetCover
    partition: Partition
    actions: frozenset
    terminals: frozenset
    population: Population
    payoff: Mapping | None = None
    # inflation bookkeeping: factor relative to the base problem
    inflation: int = 1
    base: "Problem | None" = field(default=None, repr=False, compare=False)

    @property
    def b(self) -> int:
        return len(self.population)

    @property
    def root(self) -> "Problem":
        return self.base if self.base is not None else self


def make_problem(cover: SetCover, population, actions=None, terminals=None,
                 payoff=None) -> Problem:
    """Assemble and validate a problem; actions/terminals default to those used."""
    population = make_population(population)
    if actions is None:
        actions = {r.action for r in population}
    if terminals is None:
        terminals = {r.terminal for r in population}
    if payoff is not None:
        payoff = {f: Fraction(v) for f, v in payoff.items()}
    problem = Problem(
        cover=cover,
        partition=build_partition(cover),
        actions=frozenset(actions),
        terminals=frozenset(terminals),
        population=population,
        payoff=payoff,
    )
    validate_population(problem)
    return problem


def validate_population(problem: Problem) -> bool:
    seen: dict = {}
    terminals_seen: set = set()
    for i, r in enumerate(problem.population):
        if r.action not in problem.actions:
            raise UnknownReference("action", r.action, f"rollout {i}")
        if r.terminal not in problem.terminals:
            raise UnknownReference("terminal", r.terminal, f"rollout {i}")
        if not r.states:
            raise UnknownReference("state", None, f"rollout {i} (height 0)")
        for j, s in enumerate(r.states):
            if s not in problem.cover.states:
                raise UnknownReference("state", s, f"rollout {i} position {j}")
            seen.setdefault(s, []).append((i, j))
        if r.terminal in terminals_seen:
            raise DuplicateTerminal(r.terminal)
        terminals_seen.add(r.terminal)
    for s, positions in seen.items():
        if len(positions) > 1:
            raise DuplicateState(s, positions)
    missing = problem.cover.states - seen.keys()
    if missing:
        raise MissingState(missing)
    if problem.payoff is not None:
        for f in problem.payoff:
            if f not in problem.terminals:
                raise UnknownReference("terminal", f, "payoff")
    return True


def state_positions(population: Population) -> dict:
    """Map each state to its (rollout index, position) pair."""
    return {s: (i, j) for i, r in enumerate(population) for j, s in enumerate(r.states)}


def is_homologous(population: Population, cover: SetCover) -> bool:
    pos = {s: j for r in population for j, s in enumerate(r.states)}
    for members in cover.sets.values():
        heights = {pos[s] for s in members if s in pos}
        if len(heights) > 1:
            return False
    return True


def total_states(population: Population) -> int:
    return sum(len(r.states) for r in population)


def inflate(problem: Problem, m: int) -> Problem:
    """Replace every state, terminal and rollout by ``m`` indexed copies.

    Cover sets keep their ids, so classes of the inflated partition carry the
    same labels as the base ones.  Rollout copies are listed rollout-major:
    ``r_{1,1}, ..., r_{1,m}, r_{2,1}, ...``.
    """
    if m < 1:
        raise ValueError("inflation factor must be >= 1")
    root = problem.root
    if problem.base is not None:
        raise ValueError("inflate the base problem, not an inflated one")
    ks = range(1, m + 1)
    states = frozenset(Copy(s, k) for s in root.cover.states for k in ks)
    sets = {o: frozenset(Copy(s, k) for s in members for k in ks)
            for o, members in root.cover.sets.items()}
    cover = SetCover(states, sets)
    population = tuple(
        Rollout(r.action, tuple(Copy(s, k) for s in r.states), Copy(r.terminal, k))
        for r in root.population
        for k in ks
    )
    payoff = None
    if root.payoff is not None:
        payoff = {Copy(f, k): v for f, v in root.payoff.items() for k in ks}
    return Problem(
        cover=cover,
        partition=build_partition(cover),
        actions=root.actions,
        terminals=frozenset(Copy(f, k) for f in root.terminals for k in ks),
        population=population,
        payoff=payoff,
        inflation=m,
        base=root,
    )
