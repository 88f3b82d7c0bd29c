"""Closed-form limiting schema frequencies and what can be built on them.

The limiting frequency of a schema factorises into an action weight, a
per-entry set-size ratio, and transition ratios between successive classes.
Read at class granularity this is an absorbing Markov chain over classes
with terminal labels as exits, which gives a direct sampler and an exact
expected-payoff solver.
"""
from __future__ import annotations

import math
import random
from bisect import bisect_right
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import accumulate
from typing import Hashable, Mapping

from .cover import Partition, SetCover
from .errors import AllTruncated, TerminalUnreachable, UnknownReference
from .schema import WILDCARD, OrderTable, Schema, resolve_symbol


def _in_terminals(tail, terminals) -> bool:
    return tail in terminals or str(tail) in {str(f) for f in terminals}


def limiting_frequency(table: OrderTable, schema: Schema, cover: SetCover,
                       partition: Partition) -> Fraction:
    """Exact limiting frequency of ``schema`` for the population behind ``table``.

    Path entries may be cover sets or classes; a class entry contributes a
    set-size ratio of 1.
    """
    if schema.is_universal:
        return Fraction(1)
    symbols = [resolve_symbol(o, cover, partition) for o in schema.path]
    numb = table.numb.get(schema.action, 0)
    value = Fraction(numb, table.b)
    if numb == 0:
        return Fraction(0)
    if not symbols:
        # Height-0 schema: no rollout ends right after the action.
        return value if schema.tail == WILDCARD else Fraction(0)

    for sym in symbols:
        value *= Fraction(sym.size, sym.class_size)

    first = symbols[0].class_id
    value *= Fraction(table.order_action.get((schema.action, first), 0),
                      table.order_action_total[schema.action])
    prev = first
    for sym in symbols[1:]:
        if value == 0:
            return value
        value *= Fraction(table.order_class.get((prev, sym.class_id), 0),
                          table.order_class_total[prev])
        prev = sym.class_id

    if value == 0 or schema.tail == WILDCARD:
        return value
    terminals = table.down_terminal.get(prev, frozenset())
    if not _in_terminals(schema.tail, terminals):
        return Fraction(0)
    tail = schema.tail if schema.tail in terminals else next(
        f for f in terminals if str(f) == str(schema.tail))
    return value * Fraction(table.order_terminal[(prev, tail)], table.order_class_total[prev])


@dataclass(frozen=True)
class ClassChain:
    """Product-form limiting distribution as a chain over classes.

    ``start[action][class]`` is the first-class law given the action,
    ``step[class][class']`` the class-to-class law and ``exits[class][f]``
    the probability of ending with terminal ``f``.
    """

    b: int
    numb: Mapping
    start: Mapping
    step: Mapping
    exits: Mapping
    _tables: dict = field(default_factory=dict, compare=False, repr=False)

    def row(self, class_id) -> dict:
        """Outgoing law of ``class_id`` with targets tagged ("class"|"terminal", id)."""
        out = {("class", c): p for c, p in self.step.get(class_id, {}).items()}
        out.update({("terminal", f): p for f, p in self.exits.get(class_id, {}).items()})
        return out

    def _sampler(self, key):
        # Cumulative float weights for fast bisection.
        if key not in self._tables:
            kind, ident = key
            if kind == "action":
                items = [(("action", a), Fraction(n, self.b)) for a, n in sorted(
                    self.numb.items(), key=lambda kv: str(kv[0]))]
            elif kind == "start":
                items = [(("class", c), p) for c, p in sorted(
                    self.start[ident].items(), key=lambda kv: str(kv[0]))]
            else:
                items = sorted(self.row(ident).items(), key=lambda kv: (kv[0][0], str(kv[0][1])))
            targets = [t for t, _ in items]
            cum = list(accumulate(float(p) for _, p in items))
            self._tables[key] = (targets, cum)
        return self._tables[key]


def build_class_chain(table: OrderTable) -> ClassChain:
    start = {}
    for (a, c), n in table.order_action.items():
        start.setdefault(a, {})[c] = Fraction(n, table.order_action_total[a])
    step: dict = {}
    for (a, c), n in table.order_class.items():
        step.setdefault(a, {})[c] = Fraction(n, table.order_class_total[a])
    exits: dict = {}
    for (a, f), n in table.order_terminal.items():
        exits.setdefault(a, {})[f] = Fraction(n, table.order_class_total[a])
    return ClassChain(table.b, dict(table.numb), start, step, exits)


@dataclass(frozen=True)
class SampledRollout:
    action: Hashable
    classes: tuple
    terminal: Hashable | None
    truncated: bool = False


def _draw(chain: ClassChain, key, rng: random.Random):
    targets, cum = chain._sampler(key)
    i = bisect_right(cum, rng.random() * cum[-1])
    return targets[min(i, len(targets) - 1)]


def _as_rng(rng) -> random.Random:
    return rng if isinstance(rng, random.Random) else random.Random(rng)


def sample_class_rollout(chain: ClassChain, rng, height_cap: int,
                         action=None) -> SampledRollout:
    """Ancestral sample of (action, class path, terminal) from the limiting law.

    When ``action`` is given the draw is conditioned on it.  A path that would
    exceed ``height_cap`` states is returned with ``truncated=True``.
    """
    if height_cap < 1:
        raise ValueError("height_cap must be >= 1")
    rng = _as_rng(rng)
    if action is None:
        action = _draw(chain, ("action", None), rng)[1]
    if action not in chain.start:
        raise UnknownReference("action", action)
    cur = _draw(chain, ("start", action), rng)[1]
    classes = [cur]
    while True:
        kind, target = _draw(chain, ("row", cur), rng)
        if kind == "terminal":
            return SampledRollout(action, tuple(classes), target)
        if len(classes) >= height_cap:
            return SampledRollout(action, tuple(classes), None, truncated=True)
        classes.append(target)
        cur = target


def _reachable(chain: ClassChain, action) -> list:
    seen = dict.fromkeys(chain.start[action])
    queue = deque(seen)
    while queue:
        c = queue.popleft()
        for nxt in chain.step.get(c, {}):
            if nxt not in seen:
                seen[nxt] = None
                queue.append(nxt)
    return list(seen)


def _solve_exact(a: list, rhs: list) -> list:
    """Gauss-Jordan elimination over the rationals."""
    n = len(a)
    m = [row[:] + [r] for row, r in zip(a, rhs)]
    for col in range(n):
        piv = next(r for r in range(col, n) if m[r][col] != 0)
        m[col], m[piv] = m[piv], m[col]
        p = m[col][col]
        m[col] = [x / p for x in m[col]]
        for r in range(n):
            if r != col and m[r][col] != 0:
                f = m[r][col]
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    return [m[i][n] for i in range(n)]


def _payoff_of(payoff: Mapping, f) -> Fraction:
    if f in payoff:
        return Fraction(payoff[f])
    for k, v in payoff.items():
        if str(k) == str(f):
            return Fraction(v)
    raise UnknownReference("payoff for terminal", f)


def class_values(chain: ClassChain, payoff: Mapping, action) -> dict:
    """Exact expected terminal payoff from every class reachable after ``action``."""
    if action not in chain.start:
        raise UnknownReference("action", action)
    classes = _reachable(chain, action)
    # Classes with an exit, then everything that reaches one.
    good = {c for c in classes if chain.exits.get(c)}
    changed = True
    while changed:
        changed = False
        for c in classes:
            if c not in good and any(n in good for n in chain.step.get(c, {})):
                good.add(c)
                changed = True
    for c in classes:
        if c not in good:
            raise TerminalUnreachable(c)

    index = {c: i for i, c in enumerate(classes)}
    n = len(classes)
    a = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    rhs = [Fraction(0)] * n
    for c, i in index.items():
        for nxt, p in chain.step.get(c, {}).items():
            a[i][index[nxt]] -= p
        rhs[i] = sum((p * _payoff_of(payoff, f) for f, p in chain.exits.get(c, {}).items()),
                     Fraction(0))
    values = _solve_exact(a, rhs)
    return dict(zip(classes, values))


def expected_payoff_exact(chain: ClassChain, payoff: Mapping, action) -> Fraction:
    values = class_values(chain, payoff, action)
    return sum((p * values[c] for c, p in chain.start[action].items()), Fraction(0))


@dataclass(frozen=True)
class PayoffEstimate:
    mean: float
    stderr: float
    n_used: int
    truncated: int


def estimate_payoff_mc(chain: ClassChain, payoff: Mapping, action, n: int, rng,
                       height_cap: int) -> PayoffEstimate:
    """Monte Carlo mean terminal payoff over ``n`` sampled rollouts starting with ``action``.

    Truncated samples are excluded from the mean and counted.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = _as_rng(rng)
    values = {}
    total = total_sq = 0.0
    used = truncated = 0
    for _ in range(n):
        s = sample_class_rollout(chain, rng, height_cap, action=action)
        if s.truncated:
            truncated += 1
            continue
        if s.terminal not in values:
            values[s.terminal] = float(_payoff_of(payoff, s.terminal))
        x = values[s.terminal]
        total += x
        total_sq += x * x
        used += 1
    if used == 0:
        raise AllTruncated(n, height_cap)
    mean = total / used
    if used > 1:
        var = max(total_sq - used * mean * mean, 0.0) / (used - 1)
        stderr = math.sqrt(var / used)
    else:
        stderr = float("nan")
    return PayoffEstimate(mean, stderr, used, truncated)


def default_height_cap(population) -> int:
    return 64 * max(len(r.states) for r in population)
