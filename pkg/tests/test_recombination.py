import random

import pytest
from hypothesis import given, settings, strategies as st

from rolloutmix import (
    CrossoverOp,
    Rollout,
    apply_one_point,
    apply_op,
    apply_sequence,
    apply_single_swap,
    build_order_table,
    enumerate_generators,
    validate_population,
)
from rolloutmix.errors import IncompatibleTriple

from fixtures import random_problem


def test_fig2_chi_3(fig2):
    q = apply_one_point(fig2.population, "3", "3d", "3b", fig2.cover)
    # 3d heads rollout 2, 3b (alias 4a) sits at position 1 of rollout 3
    assert q[1] == Rollout("alpha", ("3b", "7b", "5b", "7c"), "f3")
    assert q[2] == Rollout("beta", ("6c", "3d", "1c", "3c", "5a"), "f2")
    assert q[0] == fig2.population[0] and q[3] == fig2.population[3]


def test_example_sequence(fig2):
    ops = [CrossoverOp("chi", "3", "3d", "3b"), CrossoverOp("chi", "4", "3b", "3c"),
           CrossoverOp("chi", "5", "5a", "5b"), CrossoverOp("nu", "5", "5a", "5b")]
    r = apply_sequence(fig2.population, ops, fig2.cover)
    assert r[0] == Rollout("alpha", ("1b", "1a", "7a"), "f1")
    assert r[1] == Rollout("alpha", ("3c", "5a", "7c"), "f3")
    assert r[2] == Rollout("beta", ("6c", "3d", "1c", "3b", "7b", "5b"), "f2")
    assert r[3] == Rollout("gamma", ("5c",), "f4")


def test_incompatible_triple(fig2):
    with pytest.raises(IncompatibleTriple):
        apply_single_swap(fig2.population, "4", "3d", "3b", fig2.cover)


def test_missing_states_are_identity(fig2):
    assert apply_one_point(fig2.population, "3", "zz", "3b") == fig2.population


def test_generator_count(fig2):
    assert len(enumerate_generators(fig2.cover)) == 38


def test_same_rollout_swap(small):
    h4 = small["H4"]
    pop = (Rollout("alpha", ("y1", "x1", "z1"), "f1"), h4.population[1])
    once = apply_single_swap(pop, "X", "x1", "x2")
    assert once[0].states == ("y1", "x2", "z1")
    assert apply_op(once, CrossoverOp("nu", "X", "x1", "x2")) == pop


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 2**32), st.data())
def test_involution_and_conservation(seed, data):
    prob = random_problem(random.Random(seed))
    ops = enumerate_generators(prob.cover)
    if not ops:
        return
    op = data.draw(st.sampled_from(ops))
    pop = prob.population
    out = apply_op(pop, op, prob.cover)
    assert apply_op(out, op, prob.cover) == pop
    assert sorted(s for r in out for s in r.states) == sorted(s for r in pop for s in r.states)
    assert sorted(r.terminal for r in out) == sorted(r.terminal for r in pop)
    assert sorted(r.action for r in out) == sorted(r.action for r in pop)
    before = build_order_table(pop, prob.cover, prob.partition)
    after = build_order_table(out, prob.cover, prob.partition)
    assert before.counts() == after.counts()
    assert before.down_sets() == after.down_sets()
    validate_population(prob.__class__(prob.cover, prob.partition, prob.actions,
                                       prob.terminals, out))
