import random

import pytest
from hypothesis import given, settings, strategies as st

from rolloutmix import (
    UNIVERSAL,
    Rollout,
    Schema,
    apply_sequence,
    build_order_table,
    coarsen,
    fits,
    schema_geq,
)
from rolloutmix.errors import UnknownSchemaSymbol
from rolloutmix.recombination import CrossoverOp

from fixtures import random_problem, random_schema

A = "1+2+3+4+6"


def test_parse_and_render():
    h = Schema.parse("(beta,4,7,5,f2)")
    assert h == Schema("beta", ("4", "7", "5"), "f2")
    assert str(h) == "(beta,4,7,5,f2)"
    assert Schema.parse("#") is not None and Schema.parse("#").is_universal
    assert Schema.parse("alpha,#").height == 0


def test_fits_worked_example(fig2):
    ops = [CrossoverOp("chi", "3", "3d", "3b"), CrossoverOp("chi", "4", "3b", "3c"),
           CrossoverOp("chi", "5", "5a", "5b"), CrossoverOp("nu", "5", "5a", "5b")]
    r = apply_sequence(fig2.population, ops, fig2.cover)
    h = Schema.parse("beta,6,3,1,4,#")
    assert fits(r[2], h, fig2.cover)
    # 3a is an alias of 1a, which is not in set 4
    assert not fits(Rollout("beta", ("6c", "1a", "1c", "1a"), "f2"), h, fig2.cover)
    assert fits(r[2], UNIVERSAL, fig2.cover)


def test_terminal_tail_needs_exact_height(fig2):
    r = fig2.population[1]  # (alpha; 3d, 1c, 4b, 5a; f2)
    assert fits(r, Schema("alpha", ("3", "1", "4", "5"), "f2"), fig2.cover)
    assert not fits(r, Schema("alpha", ("3", "1", "4"), "f2"), fig2.cover)
    assert fits(r, Schema("alpha", ("3", "1", "4"), "#"), fig2.cover)
    assert not fits(r, Schema("alpha", ("3", "1", "4", "5"), "f1"), fig2.cover)


def test_unknown_symbol(fig2):
    with pytest.raises(UnknownSchemaSymbol):
        fits(fig2.population[0], Schema("alpha", ("99",), "#"), fig2.cover)


def test_order_examples():
    h = Schema.parse("beta,6,3,1,4,#")
    assert schema_geq(h, Schema.parse("beta,6,3,1,4,7,f2"))
    g = Schema.parse("beta,6,3,1,6,#")
    assert not schema_geq(h, g) and not schema_geq(g, h)
    assert schema_geq(h, h)
    assert schema_geq(UNIVERSAL, h)


def test_coarsen(fig2):
    h = Schema.parse("beta,4,7,5,f2")
    assert coarsen(h, fig2.cover, fig2.partition) == Schema("beta", (A, "7", "5"), "f2")
    hbar = coarsen(h, fig2.cover, fig2.partition)
    assert coarsen(hbar, fig2.cover, fig2.partition) == hbar


def test_fig2_order_table(fig2):
    t = build_order_table(fig2.population, fig2.cover, fig2.partition)
    assert t.b == 4
    assert t.numb == {"alpha": 2, "beta": 1, "gamma": 1}
    assert t.order_action == {("alpha", A): 2, ("beta", A): 1, ("gamma", "5"): 1}
    assert t.order_class[(A, A)] == 4 and t.order_class[(A, "5")] == 1
    assert t.order_class[(A, "7")] == 2 and t.order_class_total[A] == 7
    assert t.order_class[("5", "7")] == 1 and t.order_class_total["5"] == 3
    assert t.order_class[("7", "5")] == 1 and t.order_class_total["7"] == 3
    assert t.down("5") == {"f2", "7", "f4"}
    assert t.down("7") == {"f1", "f3", "5"}
    assert t.down(A) == {A, "5", "7"}
    assert t.down_action == {"alpha": {A}, "beta": {A}, "gamma": {"5"}}
    assert t.class_size == {A: 7, "5": 3, "7": 3}
    assert t.set_size["4"] == 2


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2**32))
def test_table_identities(seed):
    prob = random_problem(random.Random(seed))
    t = build_order_table(prob.population, prob.cover, prob.partition)
    assert sum(t.numb.values()) == t.b
    for a, total in t.order_action_total.items():
        assert total == sum(n for (x, _), n in t.order_action.items() if x == a)
    for c, total in t.order_class_total.items():
        succ = sum(n for (x, _), n in t.order_class.items() if x == c)
        assert total == succ + len(t.down_terminal.get(c, ()))


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32))
def test_monotone_and_coarsening(seed):
    rng = random.Random(seed)
    prob = random_problem(rng)
    g = random_schema(rng, prob)
    if g.is_universal:
        return
    cut = rng.randint(0, g.height)
    h = Schema(g.action, g.path[:cut], "#")
    if h.height == g.height and g.tail == "#":
        h = g
    assert schema_geq(h, g)
    gbar = coarsen(g, prob.cover, prob.partition)
    for r in prob.population:
        if fits(r, g, prob.cover):
            assert fits(r, h, prob.cover)
            assert fits(r, gbar, prob.cover, prob.partition)


