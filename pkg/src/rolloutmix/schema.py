"""Holland-Poli rollout schemata and the population counting statistics.

A schema ``(action, O_1, ..., O_{k-1}, tail)`` matches rollouts that start
with ``action`` and whose first k-1 states lie in the listed sets; ``tail``
is either a terminal label (the rollout then ends right there) or ``#``
(any continuation, including none).  Path entries may name cover sets or
partition classes.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Hashable, Mapping

from .cover import Partition, SetCover, base_of, build_partition
from .errors import UnknownSchemaSymbol
from .population import Population, Rollout

WILDCARD = "#"


@dataclass(frozen=True)
class Schema:
    action: Hashable | None = None
    path: tuple = ()
    tail: Hashable = WILDCARD

    def __post_init__(self):
        object.__setattr__(self, "path", tuple(self.path))
        if self.action is None and (self.path or self.tail != WILDCARD):
            raise ValueError("only the universal schema may omit the action")

    @property
    def is_universal(self) -> bool:
        return self.action is None

    @property
    def height(self) -> int:
        return len(self.path)

    def __str__(self):
        if self.is_universal:
            return WILDCARD
        return "(" + ",".join(str(x) for x in (self.action, *self.path, self.tail)) + ")"

    @classmethod
    def parse(cls, text: str) -> "Schema":
        """Parse ``"#"`` or ``"beta,4,7,5,f2"`` (parentheses optional)."""
        text = text.strip()
        if text.startswith("(") and text.endswith(")"):
            text = text[1:-1]
        tokens = [t.strip() for t in text.split(",") if t.strip()]
        if tokens == [WILDCARD] or not tokens:
            return cls()
        if len(tokens) < 2:
            raise ValueError(f"schema {text!r} needs an action and a tail")
        return cls(tokens[0], tuple(tokens[1:-1]), tokens[-1])

    def to_json(self):
        if self.is_universal:
            return WILDCARD
        return {"action": self.action, "path": list(self.path), "tail": self.tail}


UNIVERSAL = Schema()


@dataclass(frozen=True)
class Symbol:
    """A resolved path entry: its base members, size, and expansion class."""

    members: frozenset
    size: int
    class_id: str
    class_size: int


def resolve_symbol(sym, cover: SetCover, partition: Partition) -> Symbol:
    for key in (sym, str(sym)):
        if key in cover.sets:
            cls = partition.expansion_of[key]
            return Symbol(cover.base_sets[key], len(cover.sets[key]), cls,
                          len(partition.classes[cls]))
        if key in partition.classes:
            n = len(partition.classes[key])
            return Symbol(partition.base_classes[key], n, key, n)
    by_str = {str(k): k for k in cover.sets}
    if str(sym) in by_str:
        return resolve_symbol(by_str[str(sym)], cover, partition)
    raise UnknownSchemaSymbol(sym)


def _tail_matches(terminal, tail) -> bool:
    t = base_of(terminal)
    return t == tail or str(t) == str(tail)


def matcher(schema: Schema, cover: SetCover, partition: Partition | None = None):
    """Compile ``schema`` into a predicate on rollouts."""
    if schema.is_universal:
        return lambda rollout: True
    if partition is None:
        partition = build_partition(cover)
    sets = [resolve_symbol(o, cover, partition).members for o in schema.path]
    n = len(sets)
    action, tail = schema.action, schema.tail

    def match(rollout: Rollout) -> bool:
        if rollout.action != action:
            return False
        states = rollout.states
        if tail == WILDCARD:
            if len(states) < n:
                return False
        elif len(states) != n or not _tail_matches(rollout.terminal, tail):
            return False
        return all(base_of(s) in members for s, members in zip(states, sets))

    return match


def fits(rollout: Rollout, schema: Schema, cover: SetCover,
         partition: Partition | None = None) -> bool:
    return matcher(schema, cover, partition)(rollout)


def schema_geq(h: Schema, g: Schema) -> bool:
    """Partial order on schemata: ``h >= g`` when h is g or a #-prefix of g."""
    if h == g:
        return True
    if h.is_universal:
        return True
    if g.is_universal or h.tail != WILDCARD or h.action != g.action:
        return False
    n = len(h.path)
    if g.path[:n] != h.path:
        return False
    if g.tail == WILDCARD:
        return len(g.path) > n
    return len(g.path) >= n


def coarsen(schema: Schema, cover: SetCover, partition: Partition) -> Schema:
    """Replace every path entry by its expansion class."""
    if schema.is_universal:
        return schema
    path = tuple(resolve_symbol(o, cover, partition).class_id for o in schema.path)
    return Schema(schema.action, path, schema.tail)


@dataclass(frozen=True)
class OrderTable:
    b: int
    numb: Mapping
    down_action: Mapping
    down_class: Mapping
    down_terminal: Mapping
    order_action: Mapping
    order_class: Mapping
    order_terminal: Mapping
    order_action_total: Mapping
    order_class_total: Mapping
    class_size: Mapping
    set_size: Mapping
    set_class: Mapping = field(compare=False)

    def down(self, class_id) -> frozenset:
        """Successor classes and terminal labels of ``class_id``."""
        return self.down_class.get(class_id, frozenset()) | self.down_terminal.get(
            class_id, frozenset())

    def counts(self) -> dict:
        """All integer statistics keyed by name, for scaling comparisons."""
        return {
            "b": self.b,
            "numb": dict(self.numb),
            "order_action": dict(self.order_action),
            "order_class": dict(self.order_class),
            "order_terminal": dict(self.order_terminal),
            "order_action_total": dict(self.order_action_total),
            "order_class_total": dict(self.order_class_total),
            "class_size": dict(self.class_size),
            "set_size": dict(self.set_size),
        }

    def down_sets(self) -> dict:
        return {
            "down_action": dict(self.down_action),
            "down_class": dict(self.down_class),
            "down_terminal": dict(self.down_terminal),
        }


def build_order_table(population: Population, cover: SetCover,
                      partition: Partition | None = None) -> OrderTable:
    """Numb, successor sets and Order counts in one pass over adjacent pairs.

    Terminal labels are reported by their base (non-inflated) label, but the
    per-class terminal totals count occurrences so that they scale with
    inflation like every other count.
    """
    if partition is None:
        partition = build_partition(cover)
    cls = partition.member_of
    numb: Counter = Counter()
    order_action: Counter = Counter()
    order_class: Counter = Counter()
    order_terminal: Counter = Counter()
    for r in population:
        numb[r.action] += 1
        classes = [cls[s] for s in r.states]
        order_action[(r.action, classes[0])] += 1
        for a, c in zip(classes, classes[1:]):
            order_class[(a, c)] += 1
        order_terminal[(classes[-1], base_of(r.terminal))] += 1

    down_action: dict = {}
    for (a, c) in order_action:
        down_action.setdefault(a, set()).add(c)
    down_class: dict = {}
    for (a, c) in order_class:
        down_class.setdefault(a, set()).add(c)
    down_terminal: dict = {}
    for (a, f) in order_terminal:
        down_terminal.setdefault(a, set()).add(f)

    action_total: Counter = Counter()
    for (a, _), n in order_action.items():
        action_total[a] += n
    class_total: Counter = Counter()
    for (a, _), n in order_class.items():
        class_total[a] += n
    for (a, _), n in order_terminal.items():
        class_total[a] += n

    return OrderTable(
        b=len(population),
        numb=dict(numb),
        down_action={k: frozenset(v) for k, v in down_action.items()},
        down_class={k: frozenset(v) for k, v in down_class.items()},
        down_terminal={k: frozenset(v) for k, v in down_terminal.items()},
        order_action=dict(order_action),
        order_class=dict(order_class),
        order_terminal=dict(order_terminal),
        order_action_total=dict(action_total),
        order_class_total=dict(class_total),
        class_size={k: len(v) for k, v in partition.classes.items()},
        set_size={k: len(v) for k, v in cover.sets.items()},
        set_class=dict(partition.expansion_of),
    )
