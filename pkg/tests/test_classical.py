from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from clusterq.classical import (
    TransformationWord,
    apply_word,
    initial_vars,
    mutate_classical,
    poisson_bracket,
    polygon_word,
    verify_poisson_preserved,
    verify_trivial,
)
from clusterq.seed import canonical_seed, random_seed

POLYGONS = [("a1xa1", 2), ("a2", 3), ("b2", 4), ("g2", 6)]


def test_a2_exchange_oracle():
    s = canonical_seed("a2")
    v = mutate_classical(initial_vars(s, "A"), s, 1)
    A1, A2 = v.ctx.gens()
    assert v.a == ((1 + A2) / A1, A2)


def test_a2_x_oracle():
    s = canonical_seed("a2")
    v = mutate_classical(initial_vars(s, "X"), s, 1)
    X1, X2 = v.ctx.gens()
    assert v.x == (1 / X1, X2 * (1 + X1))


def test_b2_a_oracle():
    # eps_12 = 2: A'_1 = (A2^2 + 1) / A1
    s = canonical_seed("b2")
    v = mutate_classical(initial_vars(s, "A"), s, 1)
    A1, A2 = v.ctx.gens()
    assert v.a[0] == (A2 * A2 + 1) / A1


def test_a2_five_periodic_values():
    # the classical A2 recurrence at A1 = A2 = 1 runs 1, 1, 2, 3, 2, 1, 1
    s = canonical_seed("a2")
    v = initial_vars(s, "A")
    seen = []
    for step in polygon_word(1, 2, 2, 3):
        v = apply_word(v, v.seed, [step])
        if step[0] == "mu":
            seen.append(v.a[0].evaluate({"A1": Fraction(1), "A2": Fraction(1)}))
    assert seen == [2, 3, 2, 1, 1]


@pytest.mark.parametrize("name,h", POLYGONS)
@pytest.mark.parametrize("kind", ["A", "X", "D"])
def test_polygon_trivial(name, h, kind):
    s = canonical_seed(name)
    rep = verify_trivial(s, polygon_word(1, 2, 2, h), kind)
    assert rep["is_trivial"], rep


@pytest.mark.parametrize("name,h", POLYGONS)
def test_truncated_word_nontrivial(name, h):
    s = canonical_seed(name)
    w = polygon_word(1, 2, 2, h)[:-2]
    rep = verify_trivial(s, w, "A")
    assert not rep["is_trivial"]
    assert rep["witness"] is not None


def test_single_mutation_witness_is_mutated_variable():
    s = canonical_seed("a2")
    rep = verify_trivial(s, [("mu", 2)], "X")
    assert rep["witness"] == "X1"
    assert rep["per_variable"] == {"X1": False, "X2": False}


def test_word_parsing():
    w = TransformationWord.parse(["mu:1", "perm:2,1"])
    assert w == [("mu", 1), ("perm", (2, 1))]
    assert TransformationWord.from_json('["mu:1", "perm:2,1"]').to_json() == ["mu:1", "perm:2,1"]
    with pytest.raises(ValueError):
        TransformationWord.parse(["nu:1"])


def test_poisson_structure():
    s = canonical_seed("b2")
    v = initial_vars(s, "X")
    X1, X2 = v.x
    assert poisson_bracket(X1, X2, s, "X") == X1 * X2 * s.eps_hat(0, 1)
    assert poisson_bracket(X2, X1, s, "X") == -(X1 * X2 * s.eps_hat(0, 1))
    with pytest.raises(ValueError):
        poisson_bracket(X1, X2, s, "A")


@pytest.mark.parametrize("kind", ["X", "D"])
@pytest.mark.parametrize("name", ["a2", "b2", "g2"])
def test_poisson_preserved_canonical(name, kind):
    s = canonical_seed(name)
    assert all(verify_poisson_preserved(s, k, kind) for k in (1, 2))


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10**6), st.integers(2, 3), st.data())
def test_poisson_preserved_random(seed, n, data):
    s = random_seed(random.Random(seed), n, max_entry=1)
    k = data.draw(st.integers(1, n))
    assert verify_poisson_preserved(s, k, "X")


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 3), st.data())
def test_double_mutation_trivial(seed, n, data):
    s = random_seed(random.Random(seed), n)
    k = data.draw(st.integers(1, n))
    kind = data.draw(st.sampled_from("AXD"))
    assert verify_trivial(s, [("mu", k), ("mu", k)], kind)["is_trivial"]
