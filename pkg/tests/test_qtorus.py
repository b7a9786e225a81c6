from __future__ import annotations

import pytest

from clusterq.exact import QCoeff
from clusterq.qtorus import (
    QSeries,
    TorusContext,
    TruncationError,
    classical_limit_check,
    generator,
    psi_of,
    quantum_mutation_prime,
    quantum_mutation_sharp,
    verify_compact_identity,
    verify_dual_quantum,
    verify_quantum_relation,
)
from clusterq.seed import RelationSpec, canonical_seed

CASES = [("a1", "A1"), ("a1xa1", "A1xA1"), ("a2", "A2"), ("b2", "B2"), ("g2", "G2")]


class TestTorus:
    def setup_method(self):
        self.s = canonical_seed("b2")
        self.ctx = TorusContext.for_seed(self.s, 4)

    def test_commutation_twist(self):
        # X1 X2 = q^(2 eps^_12) X2 X1 and X1 B1 = q^(2/d_1) B1 X1, with u^N = q
        X1, X2, B1 = (generator(self.ctx, g) for g in ("X1", "X2", "B1"))
        N = self.ctx.N
        assert X1 * X2 == (X2 * X1).scale(QCoeff.qpow(2 * self.s.eps_hat(0, 1), N))
        assert X1 * B1 == (B1 * X1).scale(QCoeff.qpow(2, N))
        assert generator(self.ctx, "B1") * generator(self.ctx, "B2") == \
            generator(self.ctx, "B2") * generator(self.ctx, "B1")

    def test_inverse(self):
        X1 = generator(self.ctx, "X1")
        e = X1 + generator(self.ctx, "B2")
        assert (X1 * X1.inverse()).agrees(QSeries.scalar(self.ctx, 1))
        assert (e * e.inverse()).agrees(QSeries.scalar(self.ctx, 1))

    def test_psi_needs_positive_weight(self):
        with pytest.raises(TruncationError):
            psi_of(QSeries.scalar(self.ctx, 1), 1)

    def test_mixed_contexts_rejected(self):
        other = TorusContext.for_seed(canonical_seed("a2"), 4)
        with pytest.raises(Exception):
            generator(self.ctx, "X1") + generator(other, "X1")


@pytest.mark.parametrize("which", ["pentagon", "split2", "split3", "hexagon", "octagon"])
def test_compact_identities(which):
    assert verify_compact_identity(which, 6)


def test_pentagon_with_q_xy_argument_fails():
    assert not verify_compact_identity("pentagon_qXY", 6)


@pytest.mark.parametrize("name,kind", CASES)
def test_quantum_relations(name, kind):
    s = canonical_seed(name)
    r = RelationSpec(kind, 1, None if kind == "A1" else 2)
    res = verify_quantum_relation(s, r, order=4)
    assert res["identity"], res


@pytest.mark.parametrize("name", ["a2", "b2", "g2"])
@pytest.mark.parametrize("gen", ["X1", "X2", "B1", "B2"])
def test_sharp_closed_form_matches_conjugation(name, gen):
    s = canonical_seed(name)
    ctx = TorusContext.for_seed(s, 5)
    e = generator(ctx, gen)
    for k in (1, 2):
        assert quantum_mutation_sharp(e, s, k, "closed_form").agrees(quantum_mutation_sharp(e, s, k, "conjugation"))


def test_sharp_unknown_mode():
    s = canonical_seed("a2")
    with pytest.raises(ValueError):
        quantum_mutation_sharp(generator(TorusContext.for_seed(s, 3), "X1"), s, 1, "other")


def test_prime_on_mutated_generator():
    s = canonical_seed("a2")
    ctx = TorusContext.for_seed(s, 3)
    assert quantum_mutation_prime("X1", s, 1, ctx).agrees(generator(ctx, "X1", -1))
    # eps_21 < 0, so X'_2 = X2
    assert quantum_mutation_prime("X2", s, 1, ctx).agrees(generator(ctx, "X2"))


@pytest.mark.parametrize("name", ["a2", "b2", "g2"])
def test_dual_quantum_sign(name):
    s = canonical_seed(name)
    assert verify_dual_quantum(s, 1, order=4, dual_sign=-1)


def test_dual_quantum_wrong_sign_fails():
    assert not verify_dual_quantum(canonical_seed("b2"), 1, order=4, dual_sign=1)


@pytest.mark.parametrize("name", ["a2", "b2", "g2"])
def test_classical_limit(name):
    s = canonical_seed(name)
    for k in (1, 2):
        res = classical_limit_check(s, k, order=4)
        assert all(res.values()), res
