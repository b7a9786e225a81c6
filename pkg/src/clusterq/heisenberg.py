"""Linear forms in Heisenberg generators p_1..p_n, q_1..q_n and the special
affine group acting on them by conjugation.

[L1, L2] = 2 pi i hbar * bracket(L1, L2).  Everything is exact (Fraction).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .exact import identity, mat_det, mat_inv, mat_mul
from .seed import Seed, _check_index, mutate_exchange

__all__ = [
    "LinearForm",
    "ScaledPlanck",
    "SpecialAffine",
    "bracket",
    "affine_compose",
    "affine_inverse",
    "conjugate_linear_form",
    "quad_conjugate",
    "seed_forms",
    "mutation_shift",
    "permutation_shift",
    "quad_pair_to_shift",
    "QuadPairError",
    "kprime_conjugation_check",
]


def _frac_vec(v) -> tuple:
    return tuple(Fraction(x) for x in v)


@dataclass(frozen=True)
class LinearForm:
    """sum_i p[i] * p_i + q[i] * q_i."""

    p: tuple
    q: tuple

    def __post_init__(self):
        object.__setattr__(self, "p", _frac_vec(self.p))
        object.__setattr__(self, "q", _frac_vec(self.q))
        if len(self.p) != len(self.q):
            raise ValueError("p and q parts must have the same length")

    @property
    def n(self) -> int:
        return len(self.p)

    @classmethod
    def zero(cls, n: int) -> "LinearForm":
        return cls((0,) * n, (0,) * n)

    @classmethod
    def P(cls, n: int, i: int, c=1) -> "LinearForm":
        """c * p_i with 0-based i."""
        v = [0] * n
        v[i] = c
        return cls(v, (0,) * n)

    @classmethod
    def Q(cls, n: int, i: int, c=1) -> "LinearForm":
        v = [0] * n
        v[i] = c
        return cls((0,) * n, v)

    def is_zero(self) -> bool:
        return not any(self.p) and not any(self.q)

    def __add__(self, other: "LinearForm") -> "LinearForm":
        return LinearForm(
            tuple(a + b for a, b in zip(self.p, other.p)), tuple(a + b for a, b in zip(self.q, other.q))
        )

    def __neg__(self) -> "LinearForm":
        return LinearForm(tuple(-a for a in self.p), tuple(-a for a in self.q))

    def __sub__(self, other: "LinearForm") -> "LinearForm":
        return self + (-other)

    def __mul__(self, c) -> "LinearForm":
        c = Fraction(c)
        return LinearForm(tuple(a * c for a in self.p), tuple(a * c for a in self.q))

    __rmul__ = __mul__

    def to_json(self) -> dict:
        return {"p": [str(x) for x in self.p], "q": [str(x) for x in self.q]}

    def __str__(self):
        parts = []
        for name, vec in (("p", self.p), ("q", self.q)):
            for i, c in enumerate(vec):
                if c:
                    coef = "" if c == 1 else "-" if c == -1 else f"{c}*"
                    parts.append(f"{coef}{name}{i + 1}")
        return " + ".join(parts).replace("+ -", "- ") if parts else "0"


@dataclass(frozen=True, order=True)
class ScaledPlanck:
    """hbar_s = scale * hbar."""

    scale: Fraction

    def __post_init__(self):
        object.__setattr__(self, "scale", Fraction(self.scale))
        if self.scale <= 0:
            raise ValueError("ScaledPlanck scale must be positive")

    def __str__(self):
        return str(self.scale)


@dataclass(frozen=True)
class SpecialAffine:
    """Element (c, t) of SL+-(n, Q) x Q^n."""

    c: tuple
    t: tuple

    def __post_init__(self):
        c = tuple(tuple(Fraction(x) for x in row) for row in self.c)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "t", _frac_vec(self.t))
        if abs(mat_det(c)) != 1:
            raise ValueError(f"|det c| must be 1, got {mat_det(c)}")

    @property
    def n(self) -> int:
        return len(self.t)

    @classmethod
    def identity(cls, n: int) -> "SpecialAffine":
        return cls(identity(n, Fraction(1)), (0,) * n)

    def is_identity(self) -> bool:
        return self.c == identity(self.n, Fraction(1)) and not any(self.t)

    def to_json(self) -> dict:
        return {"c": [[str(x) for x in row] for row in self.c], "t": [str(x) for x in self.t]}


def bracket(L1: LinearForm, L2: LinearForm) -> Fraction:
    if L1.n != L2.n:
        raise ValueError("forms live in different ambient dimensions")
    return sum((a * b2 - a2 * b for a, b, a2, b2 in zip(L1.p, L1.q, L2.p, L2.q)), Fraction(0))


def affine_compose(g1: SpecialAffine, g2: SpecialAffine) -> SpecialAffine:
    """(c, t)(c', t') = (c c', t c' + t')."""
    c = mat_mul(g1.c, g2.c)
    tc = mat_mul((g1.t,), g2.c)[0]
    return SpecialAffine(c, tuple(a + b for a, b in zip(tc, g2.t)))


def affine_inverse(g: SpecialAffine) -> SpecialAffine:
    ci = mat_inv(g.c)
    return SpecialAffine(ci, tuple(-x for x in mat_mul((g.t,), ci)[0]))


def conjugate_linear_form(g: SpecialAffine, L: LinearForm) -> LinearForm:
    """S_g L S_g^-1: p_i -> sum_j (c^-1)_ij p_j, q_i -> sum_j c_ji q_j."""
    if any(g.t):
        raise ValueError("conjugation is implemented for t = 0 only")
    n = L.n
    ci = mat_inv(g.c)
    p = [sum((L.p[i] * ci[i][j] for i in range(n)), Fraction(0)) for j in range(n)]
    q = [sum((L.q[i] * g.c[j][i] for i in range(n)), Fraction(0)) for j in range(n)]
    return LinearForm(p, q)


def quad_conjugate(L: LinearForm, s: ScaledPlanck, M: LinearForm, inverted: bool = False) -> LinearForm:
    """Conjugation of M by exp(+-L^2 / (4 pi i hbar_s)): M + +-(bracket(L, M)/s) L."""
    b = bracket(L, M) / s.scale
    return M + L * (-b if inverted else b)


# ---------------------------------------------------------------------------
# seed data
# ---------------------------------------------------------------------------


def seed_forms(s: Seed, rep: str = "old") -> dict:
    """b^_i, x^_i and x~^_i as LinearForms (lists indexed 0..n-1)."""
    n = s.n
    eps = s.epsilon
    if rep == "old":
        b = [LinearForm.Q(n, i, 2) for i in range(n)]
        x = [
            LinearForm.P(n, i, Fraction(1, 2 * s.d[i])) - LinearForm((0,) * n, eps[i])
            for i in range(n)
        ]
        xt = [
            LinearForm.P(n, i, Fraction(1, 2 * s.d[i])) + LinearForm((0,) * n, eps[i])
            for i in range(n)
        ]
    elif rep == "new":
        b = [LinearForm.Q(n, i) for i in range(n)]
        x = [
            LinearForm.P(n, i, Fraction(1, s.d[i])) - LinearForm((0,) * n, [max(e, 0) for e in eps[i]])
            for i in range(n)
        ]
        xt = []
        for i in range(n):
            f = x[i]
            for j in range(n):
                if eps[i][j]:
                    f = f + b[j] * eps[i][j]
            xt.append(f)
    else:
        raise ValueError(f"unknown representation {rep!r}; expected 'old' or 'new'")
    return {"b": b, "x": x, "xt": xt}


def mutation_shift(s: Seed, k: int) -> SpecialAffine:
    """The shift of K'_k: c_kk = -1, c_ik = [-eps_ki]_+ (i != k), c_ii = 1."""
    k0 = _check_index(s, k)
    n = s.n
    c = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    c[k0][k0] = Fraction(-1)
    for i in range(n):
        if i != k0:
            c[i][k0] = Fraction(max(-s.epsilon[k0][i], 0))
    return SpecialAffine(c, (0,) * n)


def permutation_shift(sigma: Sequence[int]) -> SpecialAffine:
    """Shift for the seed automorphism P_sigma: c_lm = delta(l, sigma(m))."""
    n = len(sigma)
    p = [x - 1 for x in sigma]
    c = [[Fraction(int(l == p[m])) for m in range(n)] for l in range(n)]
    return SpecialAffine(c, (0,) * n)


class QuadPairError(ValueError):
    """The two forms are not a recognised quadratic pair."""


def quad_pair_to_shift(L1: LinearForm, L2: LinearForm, s: ScaledPlanck) -> SpecialAffine:
    """exp(L1^2/(4 pi i hbar_s)) exp(-L2^2/(4 pi i hbar_s)) as a shift.

    Needs L1 + L2 = alpha p_k and L1 - L2 = sum_j beta_j q_j with beta_k = 0.
    Then c = id + (alpha beta_j / (2 s)) in column k.  Because the
    exponentials only see L2^2, the sign of L2 is tried both ways.
    """
    n = L1.n
    if isinstance(s, (int, Fraction)):
        s = ScaledPlanck(s)
    if L1 == L2:
        return SpecialAffine.identity(n)
    for sign in (1, -1):
        M = L2 * sign
        plus, minus = L1 + M, L1 - M
        if bracket(plus, minus) != 0 or any(plus.q) or any(minus.p):
            continue
        nz = [i for i, a in enumerate(plus.p) if a]
        if len(nz) != 1:
            continue
        k = nz[0]
        if minus.q[k]:
            continue
        alpha = plus.p[k]
        c = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
        for j in range(n):
            if j != k:
                c[j][k] = alpha * minus.q[j] / (2 * s.scale)
        return SpecialAffine(c, (0,) * n)
    raise QuadPairError(f"not a recognized quadratic pair: ({L1}, {L2})")


def kprime_conjugation_check(s: Seed, k: int, rep: str = "old") -> dict:
    """Check the K'_k conjugation identities on b^, x^ and x~^.

    Returns ``{"holds": bool, "mismatches": [...]}``; each mismatch records
    the family, index and the difference form (actual - required).
    """
    k0 = _check_index(s, k)
    s1 = mutate_exchange(s, k)
    old, new = seed_forms(s, rep), seed_forms(s1, rep)
    g = mutation_shift(s, k)
    n = s.n
    eps = s.epsilon
    mism = []

    def expect(family, i, actual, required):
        if actual != required:
            mism.append({"family": family, "index": i + 1, "actual": str(actual),
                         "required": str(required), "difference": str(actual - required)})

    for i in range(n):
        actual = conjugate_linear_form(g, new["b"][i])
        if i != k0:
            req = old["b"][i]
        else:
            req = -old["b"][k0]
            for j in range(n):
                if eps[k0][j] < 0:
                    req = req + old["b"][j] * (-eps[k0][j])
        expect("b", i, actual, req)
    for fam in ("x", "xt"):
        for i in range(n):
            actual = conjugate_linear_form(g, new[fam][i])
            if i == k0:
                req = -old[fam][k0]
            else:
                req = old[fam][i] + old[fam][k0] * max(eps[i][k0], 0)
            expect(fam, i, actual, req)
    return {"seed": s.to_json(), "k": k, "rep": rep, "holds": not mism, "mismatches": mism}
