from __future__ import annotations

import cmath
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from clusterq.dilog import (
    DEFAULT_TOLERANCES,
    DilogParams,
    PoleError,
    QuadratureConfig,
    c_const,
    phi_eval,
    psi_eval,
    run_identity_suite,
)


def euler_series(z: complex, q: complex, terms: int = 400) -> complex:
    """1/(-qz; q^2)_inf = sum_n (-qz)^n / (q^2; q^2)_n."""
    out, num, den = 0j, 1 + 0j, 1 + 0j
    q2 = q * q
    for n in range(terms):
        out += num / den
        num *= -q * z
        den *= 1 - q2 ** (n + 1)
    return out


class TestPsi:
    @pytest.mark.parametrize("z", [0.3, -0.7 + 0.2j, 1.5j])
    def test_euler_series(self, z):
        q = 0.6 * cmath.exp(0.4j)
        assert abs(psi_eval(z, q) - euler_series(z, q)) < 1e-12

    def test_rejects_unit_circle(self):
        with pytest.raises(ValueError):
            psi_eval(1, 1.0)

    def test_pole(self):
        q = 0.5
        with pytest.raises(PoleError):
            psi_eval(-1 / q, q)


class TestParams:
    def test_validation(self):
        with pytest.raises(ValueError):
            DilogParams(-1)
        with pytest.raises(ValueError):
            DilogParams(1 - 0.1j)
        with pytest.raises(ValueError):
            QuadratureConfig(r0=1.5)

    def test_dual(self):
        p = DilogParams(2.0)
        assert p.dual().h == 0.5 and p.is_real
        assert abs(p.q_dual - p.dual().q) < 1e-15


@pytest.mark.parametrize("h", [0.7, 1.0, 1.3, math.sqrt(2), 4.0])
def test_phi_at_zero(h):
    p = DilogParams(h)
    assert abs(phi_eval(0, p) - cmath.exp(-1j * math.pi * (h + 1 / h) / 24)) < 1e-10


def test_phi_ratio_at_complex_h():
    # independent route: truncated infinite products
    p = DilogParams(0.8 + 0.3j)
    for z in (0.4, -1.1 + 0.5j, 2.0 - 0.3j):
        prod = psi_eval(cmath.exp(z), p.q) / psi_eval(cmath.exp(z / p.h), 1 / p.q_dual)
        assert abs(phi_eval(z, p) - prod) < 1e-8


def test_phi_pole():
    h = 0.9
    with pytest.raises(PoleError):
        phi_eval(-1j * math.pi - 1j * math.pi * h, DilogParams(h))


def test_continuation_matches_direct_quadrature():
    # Im z just beyond the switch-over, then compared with the doubled rule
    p = DilogParams(0.6)
    z = 0.3 + 1j * (math.pi * 1.6 - 0.5)
    assert abs(phi_eval(z, p) - phi_eval(z, p, QuadratureConfig().doubled())) < 1e-10
    phi_eval(z, p, check=True)


@settings(max_examples=25, deadline=None)
@given(st.floats(0.3, 3.0), st.floats(-8, 8))
def test_unitarity_real_h(h, x):
    assert abs(abs(phi_eval(x, DilogParams(h))) - 1) < 1e-10


@settings(max_examples=15, deadline=None)
@given(st.floats(0.3, 3.0), st.floats(-4, 4))
def test_inversion(h, x):
    p = DilogParams(h)
    lhs = phi_eval(x, p) * phi_eval(-x, p) * cmath.exp(-x * x / (4j * math.pi * h))
    assert abs(lhs - c_const(h)) < 1e-8


@pytest.mark.parametrize("h", [0.7, 1.3, math.sqrt(2), 0.5 + 0.2j])
def test_identity_suite(h):
    rows = run_identity_suite(DilogParams(h), sample_count=8, unitarity_count=20)
    names = {r["identity"] for r in rows}
    assert {"phi_zero", "difference_h", "difference_1", "involutivity", "ratio"} <= names
    if isinstance(h, complex):
        assert "unitarity" not in names and "self_duality" not in names
    for r in rows:
        assert r["passed"], r
        assert r["tolerance"] == DEFAULT_TOLERANCES[r["identity"]]


def test_suite_tolerance_override_can_fail():
    rows = run_identity_suite(DilogParams(0.7), sample_count=3, unitarity_count=3, tol=1e-30)
    assert not any(r["passed"] for r in rows if r["max_residual"])
