"""Set covers of a finite state space and the partition they induce.

A cover is a family of (possibly overlapping) similarity sets whose union is
the whole state space.  Two states are similar when some cover set contains
both; the transitive closure of that relation partitions the states into
classes, and every cover set expands to the unique class containing it.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from typing import Callable, Hashable, Iterable, Mapping, NamedTuple

from .errors import (
    EmptyCoverSet,
    NotCovering,
    PseudometricAxiomViolation,
    UnknownCoverSet,
    UnknownState,
)

StateId = Hashable
CoverSetId = Hashable
ClassId = str


class Copy(NamedTuple):
    """Label of the ``index``-th copy of ``base`` produced by inflation."""

    base: Hashable
    index: int


def base_of(x):
    """Project an inflated label back onto the original one."""
    while isinstance(x, Copy):
        x = x.base
    return x


def sort_key(x):
    """Total order on labels that tolerates mixed ints, strings and copies."""
    copies = []
    while isinstance(x, Copy):
        copies.append(x.index)
        x = x.base
    return (str(x), tuple(reversed(copies)))


@dataclass(frozen=True)
class SetCover:
    states: frozenset
    sets: Mapping[CoverSetId, frozenset]
    # For ball covers: cover set id -> list of (centre, radius) that produced it.
    provenance: Mapping[CoverSetId, tuple] | None = field(default=None, compare=False)

    @cached_property
    def _sets_of_state(self) -> dict:
        out: dict = {s: set() for s in self.states}
        for set_id, members in self.sets.items():
            for s in members:
                out[s].add(set_id)
        return {s: frozenset(ids) for s, ids in out.items()}

    @cached_property
    def base_sets(self) -> dict:
        """Cover sets projected onto base (non-inflated) labels."""
        return {k: frozenset(base_of(s) for s in v) for k, v in self.sets.items()}

    def similarity_sets_of(self, s) -> frozenset:
        try:
            return self._sets_of_state[s]
        except KeyError:
            raise UnknownState(s) from None

    def is_partition(self) -> bool:
        return sum(len(v) for v in self.sets.values()) == len(self.states)


def validate_cover(states: Iterable, sets: Mapping) -> SetCover:
    states = frozenset(states)
    frozen = {}
    for set_id, members in sets.items():
        members = frozenset(members)
        if not members:
            raise EmptyCoverSet(set_id)
        for s in members:
            if s not in states:
                raise UnknownState(s)
        frozen[set_id] = members
    covered = frozenset().union(*frozen.values()) if frozen else frozenset()
    if covered != states:
        raise NotCovering(states - covered)
    return SetCover(states, frozen)


class _UnionFind:
    def __init__(self, items):
        self.parent = {x: x for x in items}

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x, y):
        rx, ry = self.find(x), self.find(y)
        if rx != ry:
            self.parent[ry] = rx


@dataclass(frozen=True)
class Partition:
    classes: Mapping[ClassId, frozenset]
    member_of: Mapping[StateId, ClassId]
    # cover set id -> label of its expansion
    expansion_of: Mapping[CoverSetId, ClassId]

    @cached_property
    def base_classes(self) -> dict:
        return {k: frozenset(base_of(s) for s in v) for k, v in self.classes.items()}

    def class_of(self, s) -> ClassId:
        try:
            return self.member_of[s]
        except KeyError:
            raise UnknownState(s) from None


def class_label(set_ids: Iterable) -> ClassId:
    return "+".join(str(i) for i in sorted(set_ids, key=sort_key))


def build_partition(cover: SetCover) -> Partition:
    """Connected components of the "shares a cover set" graph.

    Classes are labelled by the sorted ids of the cover sets they contain, so
    a class made of a single cover set carries that set's id.
    """
    uf = _UnionFind(cover.states)
    for members in cover.sets.values():
        it = iter(members)
        first = next(it)
        for s in it:
            uf.union(first, s)

    root_sets: dict = {}
    for set_id, members in cover.sets.items():
        root_sets.setdefault(uf.find(next(iter(members))), []).append(set_id)
    root_label = {root: class_label(ids) for root, ids in root_sets.items()}

    member_of = {s: root_label[uf.find(s)] for s in cover.states}
    classes: dict = {}
    for s, label in member_of.items():
        classes.setdefault(label, set()).add(s)
    expansion_of = {
        set_id: root_label[uf.find(next(iter(members)))]
        for set_id, members in cover.sets.items()
    }
    return Partition(
        {k: frozenset(v) for k, v in classes.items()}, member_of, expansion_of
    )


def expansion(cover: SetCover, partition: Partition, set_id) -> ClassId:
    if set_id not in cover.sets:
        raise UnknownCoverSet(set_id)
    return partition.expansion_of[set_id]


def partition_as_cover(partition: Partition) -> SetCover:
    """The partition viewed as a cover whose sets are the classes themselves."""
    states = frozenset(partition.member_of)
    return SetCover(states, dict(partition.classes))


def similarity_sets_of(cover: SetCover, s) -> frozenset:
    return cover.similarity_sets_of(s)


def is_compatible_triple(cover: SetCover, set_id, u, v) -> bool:
    if set_id not in cover.sets:
        raise UnknownCoverSet(set_id)
    return set_id in cover.similarity_sets_of(u) and set_id in cover.similarity_sets_of(v)


@dataclass(frozen=True)
class Pseudometric:
    points: tuple
    d: Callable[[StateId, StateId], Fraction]

    @classmethod
    def from_table(cls, points, table: Mapping) -> "Pseudometric":
        """Build from a ``{(x, y): distance}`` table; missing pairs use symmetry."""

        def d(x, y):
            if x == y and (x, y) not in table:
                return Fraction(0)
            if (x, y) in table:
                return Fraction(table[(x, y)])
            return Fraction(table[(y, x)])

        return cls(tuple(points), d)

    def validate(self) -> None:
        pts = self.points
        for x in pts:
            if self.d(x, x) != 0:
                raise PseudometricAxiomViolation("identity", (x, x, x))
        for x, y in combinations(pts, 2):
            dxy = self.d(x, y)
            if dxy < 0:
                raise PseudometricAxiomViolation("nonnegativity", (x, y, y))
            if dxy != self.d(y, x):
                raise PseudometricAxiomViolation("symmetry", (x, y, y))
        for x in pts:
            for y in pts:
                for z in pts:
                    if self.d(x, z) > self.d(x, y) + self.d(y, z):
                        raise PseudometricAxiomViolation("triangle", (x, y, z))


def cover_from_pseudometric(pm: Pseudometric, radii: Iterable) -> SetCover:
    """Cover by the open balls ``B(x, r) = {y : d(x, y) < r}``.

    Balls that are equal as sets share one cover set; the ids are
    ``"B(x,r)"`` of the first (centre, radius) producing the ball, and every
    producing pair is kept in ``provenance``.
    """
    radii = sorted(Fraction(r) for r in radii)
    if not radii or radii[0] <= 0:
        raise ValueError("radii must be a nonempty collection of positive rationals")
    pm.validate()
    by_members: dict = {}
    provenance: dict = {}
    for x in pm.points:
        for r in radii:
            ball = frozenset(y for y in pm.points if pm.d(x, y) < r)
            if ball not in by_members:
                by_members[ball] = f"B({x},{r})"
                provenance[by_members[ball]] = []
            provenance[by_members[ball]].append((x, r))
    sets = {set_id: members for members, set_id in by_members.items()}
    cover = validate_cover(pm.points, sets)
    return SetCover(
        cover.states, cover.sets, {k: tuple(v) for k, v in provenance.items()}
    )
