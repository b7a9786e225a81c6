from __future__ import annotations

import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from clusterq.seed import (
    CANONICAL_SEEDS,
    ClosureError,
    RelationSpec,
    Seed,
    SeedError,
    canonical_seed,
    detect_relation,
    dual_mutate,
    langlands_dual,
    load_seed,
    mutate_exchange,
    permute_seed,
    random_seed,
    relation_sequence,
    spectator_extend,
)


@st.composite
def seeds(draw, max_n=4):
    n = draw(st.integers(1, max_n))
    rng = random.Random(draw(st.integers(0, 2**32 - 1)))
    return random_seed(rng, n)


class TestValidation:
    def test_not_square(self):
        with pytest.raises(SeedError, match="square"):
            Seed([[0, 1], [1]], [1, 1])

    def test_bad_d(self):
        with pytest.raises(SeedError, match="positive integer"):
            Seed([[0]], [0])
        with pytest.raises(SeedError, match="length"):
            Seed([[0, 1], [-1, 0]], [1])

    def test_not_skew_symmetrizable(self):
        with pytest.raises(SeedError, match="skew-symmetrizable"):
            Seed([[0, 1], [1, 0]], [1, 1])

    def test_json_missing_field(self):
        with pytest.raises(SeedError, match="'d'"):
            Seed.from_json({"epsilon": [[0]]})

    def test_json_n_disagrees(self):
        with pytest.raises(SeedError, match="disagrees"):
            Seed.from_json({"n": 3, "epsilon": [[0]], "d": [1]})

    def test_load_bad_file(self, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text("{not json")
        with pytest.raises(SeedError, match="not valid JSON"):
            load_seed(p)
        p.write_text("[1, 2]")
        with pytest.raises(SeedError, match="JSON object"):
            load_seed(p)

    def test_index_range(self):
        with pytest.raises(IndexError):
            mutate_exchange(canonical_seed("a2"), 3)


class TestInvariants:
    def test_b2_eps_accessors(self):
        s = canonical_seed("b2")
        assert s.eps_hat(0, 1) == 1 and s.eps_hat(1, 0) == -1
        assert s.eps_tilde(0, 1) == 2 and s.eps_tilde(1, 0) == -2
        assert s.N == 1 and s.root_order == 2

    def test_g2_mutation_oracle(self):
        s = canonical_seed("g2")
        m = mutate_exchange(s, 1)
        assert m.epsilon == tuple(tuple(-x for x in r) for r in s.epsilon)

    def test_mutation_rule_oracle(self):
        # three-vertex quiver 1 -> 2 -> 3; mutating at 2 adds the arrow 1 -> 3
        s = Seed([[0, 1, 0], [-1, 0, 1], [0, -1, 0]], [1, 1, 1])
        m = mutate_exchange(s, 2)
        assert m.epsilon == ((0, -1, 1), (1, 0, -1), (-1, 1, 0))

    def test_json_roundtrip(self):
        for name in CANONICAL_SEEDS:
            s = canonical_seed(name)
            assert Seed.from_json(json.loads(str(s))) == s

    def test_langlands_dual(self):
        s = canonical_seed("b2")
        ds = langlands_dual(s)
        assert ds.epsilon_vee == ((0, 1), (-2, 0))
        assert ds.dual() == s


@settings(max_examples=80, deadline=None)
@given(seeds(), st.data())
def test_mutation_is_involution(s, data):
    k = data.draw(st.integers(1, s.n))
    m = mutate_exchange(s, k)
    assert mutate_exchange(m, k) == s
    # mutation keeps d and skew-symmetrizability (Seed() would raise otherwise)
    assert m.d == s.d and m.N == s.N


@settings(max_examples=60, deadline=None)
@given(seeds(), st.data())
def test_dual_mutation_commutes(s, data):
    k = data.draw(st.integers(1, s.n))
    assert dual_mutate(langlands_dual(s), k) == langlands_dual(mutate_exchange(s, k))


@settings(max_examples=40, deadline=None)
@given(seeds(), st.data())
def test_permutation_conjugates_mutation(s, data):
    sigma = data.draw(st.permutations(range(1, s.n + 1)))
    k = data.draw(st.integers(1, s.n))
    lhs = permute_seed(mutate_exchange(s, k), sigma)
    rhs = mutate_exchange(permute_seed(s, sigma), sigma[k - 1])
    assert lhs == rhs


class TestRelations:
    @pytest.mark.parametrize("name,kind", [("a1xa1", "A1xA1"), ("a2", "A2"), ("b2", "B2"), ("g2", "G2")])
    def test_detect(self, name, kind):
        r = detect_relation(canonical_seed(name), 1, 2)
        assert r is not None and r.kind == kind

    def test_detect_none(self):
        s = Seed([[0, 2], [-2, 0]], [1, 1])
        assert detect_relation(s, 1, 2) is None

    def test_a2_sequence(self):
        rs = relation_sequence(canonical_seed("a2"), RelationSpec("A2", 1, 2))
        assert len(rs.seeds) == 6
        assert rs.signs == [1, -1, 1, -1, -1, 1]
        assert rs.closure.startswith("Gamma(3) = P_(1 2)")

    @pytest.mark.parametrize("name,kind,length", [
        ("a1", "A1", 2), ("a1xa1", "A1xA1", 4), ("b2", "B2", 6), ("g2", "G2", 8),
    ])
    def test_sequence_lengths(self, name, kind, length):
        j = None if kind == "A1" else 2
        rs = relation_sequence(canonical_seed(name), RelationSpec(kind, 1, j))
        assert rs.closed and len(rs.seeds) == length

    def test_hypothesis_violated(self):
        with pytest.raises(ClosureError):
            relation_sequence(canonical_seed("a2"), RelationSpec("B2", 1, 2))

    def test_bad_spec(self):
        with pytest.raises(ValueError):
            RelationSpec("A3", 1, 2)
        with pytest.raises(ValueError):
            RelationSpec("A2", 1, 1)


def test_spectator_extend_keeps_base():
    rng = random.Random(5)
    base = canonical_seed("b2")
    for _ in range(10):
        s = spectator_extend(base, rng)
        assert s.n == 3
        assert tuple(row[:2] for row in s.epsilon[:2]) == base.epsilon
        assert detect_relation(s, 1, 2).kind == "B2"
