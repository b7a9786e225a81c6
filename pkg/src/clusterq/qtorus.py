"""Quantum D-torus algebras over Q(u), u = q^(1/N), with truncated
noncommutative Laurent series, quantum mutation maps and the compact
quantum dilogarithm identities.

Truncation
----------
Series are Malcev-Neumann style expansions with respect to an integer
weight on exponent vectors.  X-generators get weights near ``UNIT`` (plus a
small random perturbation), B-generators get small random weights, so the
weight of a monomial is essentially ``UNIT * (total X-degree)`` and distinct
monomials of moderate size never tie.  A series knows every coefficient of
weight below its ``prec``; order ``D`` keeps a relative window of
``(D + 1/2) * UNIT`` above the leading weight, i.e. roughly X-degree D
beyond the leading term.  Every inverse expands around the unique
lowest-weight term, so ``(1 + c M)^-1`` is expanded in ``M`` or in ``M^-1``
as the weights dictate.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .exact import ContextError, QCoeff
from .seed import (
    DualSeed,
    RelationSpec,
    Seed,
    _check_index,
    detect_relation,
    dual_mutate,
    langlands_dual,
    mutate_exchange,
    permute_seed,
    relation_sequence,
)

__all__ = [
    "UNIT",
    "TruncationError",
    "TorusContext",
    "QSeries",
    "qtorus_mul",
    "generator",
    "quantum_mutation_prime",
    "quantum_mutation_sharp",
    "psi_series_coeffs",
    "psi_inverse_series",
    "psi_of",
    "verify_compact_identity",
    "verify_quantum_relation",
    "verify_dual_quantum",
    "classical_limit_check",
]

UNIT = 10 ** 6
INF = math.inf


class TruncationError(ArithmeticError):
    """The requested comparison needs more precision than was kept."""


class TorusContext:
    """Commutation data of a quantum torus and its truncation weights.

    ``lam[i][j]``: X_i X_j = u^lam_ij X_j X_i.  ``kappa[i]``: X_i B_i =
    u^kappa_i B_i X_i.  B's commute with each other and with X_j, j != i.
    """

    def __init__(self, lam, kappa, N: int, order: int = 6, weights=None, rng_seed: int = 0, label: str = ""):
        self.n = len(kappa)
        self.lam = tuple(tuple(int(x) for x in row) for row in lam)
        self.kappa = tuple(int(x) for x in kappa)
        self.N = N
        self.order = order
        self.R = order * UNIT + UNIT // 2
        self.label = label
        for i in range(self.n):
            for j in range(self.n):
                if self.lam[i][j] != -self.lam[j][i]:
                    raise ValueError("lam must be antisymmetric")
        if weights is None:
            rnd = random.Random(rng_seed)
            weights = [rnd.randint(-999, 999) for _ in range(self.n)]
            weights += [UNIT + rnd.randint(0, 999) for _ in range(self.n)]
        self.weights = tuple(weights)
        self.one = QCoeff.one(N)

    # constructors ---------------------------------------------------------
    @classmethod
    def for_seed(cls, s: Seed, order: int = 6, rng_seed: int = 0, N: int | None = None) -> "TorusContext":
        N = N or s.root_order
        lam = [[_as_int(2 * N * s.eps_hat(i, j)) for j in range(s.n)] for i in range(s.n)]
        kappa = [_as_int(Fraction(2 * N, s.d[i])) for i in range(s.n)]
        return cls(lam, kappa, N, order, rng_seed=rng_seed, label=f"seed {s.epsilon} d={s.d}")

    @classmethod
    def for_dual(cls, ds: DualSeed, order: int = 6, rng_seed: int = 0) -> "TorusContext":
        """Dual torus over u = q_vee: X_iX_j = u^(2 eps~_ij) X_jX_i, X_iB_i = u^(2 d_i) B_iX_i."""
        lam = [[_as_int(2 * ds.eps_hat(i, j)) for j in range(ds.n)] for i in range(ds.n)]
        kappa = [_as_int(2 / ds.d_vee[i]) for i in range(ds.n)]
        return cls(lam, kappa, 1, order, rng_seed=rng_seed, label="dual")

    @classmethod
    def weyl(cls, order: int) -> "TorusContext":
        """U = e^P, V = e^Q with UV = q^2 VU (B-part unused), u = q."""
        return cls([[0, 2], [-2, 0]], [0, 0], 1, order, weights=[0, 0, UNIT + 1, UNIT + 2], label="weyl")

    @classmethod
    def line(cls, order: int) -> "TorusContext":
        return cls([[0]], [0], 1, order, weights=[0, UNIT], label="line")

    def same(self, other: "TorusContext") -> bool:
        return self is other or (
            self.lam == other.lam and self.kappa == other.kappa and self.N == other.N and self.weights == other.weights
        )

    # monomials ------------------------------------------------------------
    def weight(self, key) -> int:
        return sum(w * e for w, e in zip(self.weights, key))

    def twist(self, ka, kb) -> int:
        """u-exponent of (B^a X^b)(B^c X^d) relative to B^(a+c) X^(b+d)."""
        n = self.n
        e = 0
        for i in range(n):
            bi = ka[n + i]
            if bi:
                ci = kb[i]
                if ci:
                    e += self.kappa[i] * bi * ci
                row = self.lam[i]
                for j in range(i):
                    dj = kb[n + j]
                    if dj:
                        e += row[j] * bi * dj
        return e

    def key_B(self, i: int, e: int = 1) -> tuple:
        k = [0] * (2 * self.n)
        k[i] = e
        return tuple(k)

    def key_X(self, i: int, e: int = 1) -> tuple:
        k = [0] * (2 * self.n)
        k[self.n + i] = e
        return tuple(k)

    def zero_key(self) -> tuple:
        return (0,) * (2 * self.n)


def _as_int(x) -> int:
    x = Fraction(x)
    if x.denominator != 1:
        raise ContextError(f"exponent {x} is not an integer power of u")
    return int(x)


class QSeries:
    """Truncated series sum c_m m over normal-ordered monomials B^a X^b.

    Coefficients of monomials with weight below ``prec`` are exact; ``prec``
    is ``inf`` for exact (finite) elements.
    """

    __slots__ = ("ctx", "terms", "prec", "_sorted")

    def __init__(self, ctx: TorusContext, terms: dict | None = None, prec=INF):
        self.ctx = ctx
        terms = terms or {}
        if prec != INF:
            terms = {k: c for k, c in terms.items() if ctx.weight(k) < prec}
        self.terms = {k: c for k, c in terms.items() if not c.is_zero()}
        self.prec = prec
        self._sorted = None

    # constructors ---------------------------------------------------------
    @classmethod
    def mono(cls, ctx: TorusContext, key, coeff: QCoeff | None = None) -> "QSeries":
        return cls(ctx, {tuple(key): coeff if coeff is not None else ctx.one})

    @classmethod
    def scalar(cls, ctx: TorusContext, c) -> "QSeries":
        if not isinstance(c, QCoeff):
            c = QCoeff.const(c, ctx.N)
        return cls(ctx, {ctx.zero_key(): c})

    # helpers --------------------------------------------------------------
    def sorted_terms(self):
        if self._sorted is None:
            w = self.ctx.weight
            self._sorted = sorted(((w(k), k, c) for k, c in self.terms.items()), key=lambda t: t[0])
        return self._sorted

    def valuation(self):
        st = self.sorted_terms()
        return st[0][0] if st else self.prec

    def is_exact(self) -> bool:
        return self.prec == INF

    def _check(self, other: "QSeries"):
        if not self.ctx.same(other.ctx):
            raise ContextError("QSeries context mismatch")

    # arithmetic -----------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, QSeries):
            other = QSeries.scalar(self.ctx, other)
        self._check(other)
        terms = dict(self.terms)
        for k, c in other.terms.items():
            if k in terms:
                terms[k] = terms[k] + c
            else:
                terms[k] = c
        return QSeries(self.ctx, terms, min(self.prec, other.prec))

    __radd__ = __add__

    def __neg__(self):
        return QSeries(self.ctx, {k: -c for k, c in self.terms.items()}, self.prec)

    def __sub__(self, other):
        if not isinstance(other, QSeries):
            other = QSeries.scalar(self.ctx, other)
        return self + (-other)

    def scale(self, c: QCoeff) -> "QSeries":
        return QSeries(self.ctx, {k: v * c for k, v in self.terms.items()}, self.prec)

    def __mul__(self, other):
        if not isinstance(other, QSeries):
            if not isinstance(other, QCoeff):
                other = QCoeff.const(other, self.ctx.N)
            return self.scale(other)
        self._check(other)
        ctx = self.ctx
        va, vb = self.valuation(), other.valuation()
        prec = min(va + other.prec, self.prec + vb, va + vb + ctx.R)
        twist = ctx.twist
        out: dict = {}
        bt = other.sorted_terms()
        for wa, ka, ca in self.sorted_terms():
            if wa + vb >= prec:
                break
            for wb, kb, cb in bt:
                if wa + wb >= prec:
                    break
                key = tuple(x + y for x, y in zip(ka, kb))
                c = (ca * cb).mul_upow(twist(ka, kb))
                if key in out:
                    out[key] = out[key] + c
                else:
                    out[key] = c
        return QSeries(ctx, out, prec)

    def __rmul__(self, other):
        return self * other

    def inverse(self) -> "QSeries":
        st = self.sorted_terms()
        if not st:
            raise ZeroDivisionError("inverse of a zero series")
        if len(st) > 1 and st[1][0] == st[0][0]:
            raise ArithmeticError("leading term is not unique; pick another weight vector")
        ctx = self.ctx
        w0, k0, c0 = st[0]
        lead_inv = _mono_inverse(ctx, k0, c0)
        if len(st) == 1 and self.prec == INF:
            return lead_inv
        h = lead_inv * self - 1  # valuation > 0, precision prec - w0
        rel = min(self.prec - w0, ctx.R)
        h = QSeries(ctx, h.terms, min(h.prec, rel))
        vh = h.valuation()
        total = QSeries.scalar(ctx, 1)
        total = QSeries(ctx, total.terms, rel)
        term = total
        if vh < rel:
            for _ in range(int(rel // max(vh, 1)) + 1):
                term = -(term * h)
                if not term.terms:
                    break
                total = total + term
        total = QSeries(ctx, total.terms, rel)
        return total * lead_inv

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out = QSeries.scalar(self.ctx, 1)
        base = self
        while k:
            if k & 1:
                out = out * base
            k >>= 1
            if k:
                base = base * base
        return out

    # comparison -----------------------------------------------------------
    def agrees(self, other: "QSeries", bound=None) -> bool:
        """Coefficient-wise equality below the common precision (or ``bound``)."""
        self._check(other)
        p = min(self.prec, other.prec)
        if bound is not None:
            p = min(p, bound)
        w = self.ctx.weight
        keys = {k for k in self.terms if w(k) < p} | {k for k in other.terms if w(k) < p}
        zero = QCoeff.zero(self.ctx.N)
        return all(self.terms.get(k, zero) == other.terms.get(k, zero) for k in keys)

    def __eq__(self, other):
        if not isinstance(other, QSeries):
            return NotImplemented
        return self.prec == other.prec and self.agrees(other)

    __hash__ = None

    def star(self) -> "QSeries":
        """Anti-automorphism: reverse factors, u -> 1/u, generators fixed."""
        if not self.is_exact():
            raise ValueError("star is applied to exact series only")
        ctx = self.ctx
        n = ctx.n
        out = QSeries(ctx, {})
        for k, c in self.terms.items():
            # reversed product X_n^b_n ... X_1^b_1 B^a
            prod = QSeries.scalar(ctx, 1)
            for i in reversed(range(n)):
                if k[n + i]:
                    prod = prod * QSeries.mono(ctx, ctx.key_X(i, k[n + i]))
            prod = prod * QSeries.mono(ctx, tuple(k[:n]) + (0,) * n)
            out = out + prod.scale(c.star())
        return out

    def at_one(self) -> dict:
        """Specialise u = 1 coefficient-wise (keys unchanged)."""
        out = {}
        for k, c in self.terms.items():
            v = c.at_one()
            if v:
                out[k] = v
        return out

    def __repr__(self):
        n = self.ctx.n
        parts = []
        for w, k, c in self.sorted_terms()[:12]:
            mon = "".join(f"B{i + 1}^{k[i]}" for i in range(n) if k[i])
            mon += "".join(f"X{i + 1}^{k[n + i]}" for i in range(n) if k[n + i])
            parts.append(f"{c}*{mon or '1'}")
        tail = "" if self.prec == INF else f" + O(w>={self.prec})"
        return " + ".join(parts) + (" ..." if len(self.terms) > 12 else "") + tail


def _mono_inverse(ctx: TorusContext, key, c: QCoeff) -> QSeries:
    neg = tuple(-x for x in key)
    # (c m)(c^-1 u^-t m^-1) = 1 where t = twist(m, m^-1)
    return QSeries.mono(ctx, neg, c.inverse().mul_upow(-ctx.twist(key, neg)))


def qtorus_mul(a: QSeries, b: QSeries, s: Seed | None = None) -> QSeries:
    """Normal-ordered product; ``s`` (optional) must match the context."""
    if s is not None:
        ref = TorusContext.for_seed(s, a.ctx.order)
        if ref.lam != a.ctx.lam or ref.kappa != a.ctx.kappa or ref.N != a.ctx.N:
            raise ContextError("series context does not belong to the given seed")
    return a * b


def generator(ctx: TorusContext, name: str, power: int = 1) -> QSeries:
    """``name`` is 'X3' or 'B1' (1-based)."""
    kind, idx = name[0], int(name[1:]) - 1
    if not 0 <= idx < ctx.n:
        raise IndexError(f"generator {name} out of range")
    if kind == "X":
        return QSeries.mono(ctx, ctx.key_X(idx, power))
    if kind == "B":
        return QSeries.mono(ctx, ctx.key_B(idx, power))
    raise ValueError(f"unknown generator {name!r}")


# ---------------------------------------------------------------------------
# compact quantum dilogarithm
# ---------------------------------------------------------------------------


def psi_series_coeffs(m: int, qexp: int = 1, N: int = 1) -> list[QCoeff]:
    """Coefficients a_k of Psi^q(z) = sum a_k z^k, q = u^qexp, k <= m.

    a_k = (-1)^k q^k / prod_{j<=k} (1 - q^(2j)).
    """
    out = [QCoeff.one(N)]
    for k in range(1, m + 1):
        q2k = QCoeff.upow(2 * k * qexp, N)
        out.append(out[-1] * QCoeff.upow(qexp, N, -1) / (1 - q2k))
    return out


def psi_inverse_series(m: int, qexp: int = 1, N: int = 1) -> list[QCoeff]:
    """Coefficients c_k of Psi^q(z)^-1, c_k = q^(k^2) / prod_{j<=k}(1 - q^(2j))."""
    out = [QCoeff.one(N)]
    for k in range(1, m + 1):
        q2k = QCoeff.upow(2 * k * qexp, N)
        out.append(out[-1] * QCoeff.upow((2 * k - 1) * qexp, N) / (1 - q2k))
    return out


def psi_of(M: QSeries, qexp: int, inverse: bool = False) -> QSeries:
    """Psi^q(M) (or its inverse) for a series M of positive valuation."""
    ctx = M.ctx
    vm = M.valuation()
    if vm <= 0:
        raise TruncationError("Psi expansion needs an argument of positive weight")
    m = int(ctx.R // vm) + 1
    coeffs = (psi_inverse_series if inverse else psi_series_coeffs)(m, qexp, ctx.N)
    total = QSeries(ctx, {ctx.zero_key(): coeffs[0]}, ctx.R)
    power = QSeries(ctx, {ctx.zero_key(): ctx.one}, ctx.R)
    for k in range(1, m + 1):
        power = power * M
        if not power.terms:
            break
        total = total + power.scale(coeffs[k])
    return total


def _weyl_mono(ctx: TorusContext, a: int, b: int, c: QCoeff | None = None) -> QSeries:
    """e^(aP + bQ) = q^(-ab) U^a V^b, times c."""
    coeff = QCoeff.upow(-a * b, 1) if c is None else c.mul_upow(-a * b)
    return QSeries.mono(ctx, (0, 0, a, b), coeff)


def _prod(factors: Iterable[QSeries]) -> QSeries:
    it = iter(factors)
    out = next(it)
    for f in it:
        out = out * f
    return out


def verify_compact_identity(which: str, order: int) -> bool:
    """Check a compact dilogarithm identity to total degree ``order``."""
    if which in ("split2", "split3"):
        ctx = TorusContext.line(order)
        z = QSeries.mono(ctx, (0, 1))
        if which == "split2":
            lhs = psi_of(z.scale(QCoeff.upow(1)), 2) * psi_of(z.scale(QCoeff.upow(-1)), 2)
        else:
            lhs = _prod(psi_of(z.scale(QCoeff.upow(e)), 3) for e in (-2, 0, 2))
        rhs = psi_of(z, 1)
        return lhs.agrees(rhs)
    ctx = TorusContext.weyl(order)
    W = lambda a, b: _weyl_mono(ctx, a, b)  # noqa: E731
    if which in ("pentagon", "pentagon_qXY"):
        X, Y = QSeries.mono(ctx, (0, 0, 1, 0)), QSeries.mono(ctx, (0, 0, 0, 1))
        # q^-1 XY (= q YX); the argument q XY does not satisfy the identity
        qXY = (X * Y).scale(QCoeff.upow(-1 if which == "pentagon" else 1))
        lhs = psi_of(Y, 1, True) * psi_of(X, 1, True)
        rhs = psi_of(X, 1, True) * psi_of(qXY, 1, True) * psi_of(Y, 1, True)
        return lhs.agrees(rhs)
    if which == "hexagon":
        lhs = psi_of(W(2, 0), 2) * psi_of(W(0, 1), 1)
        rhs = _prod([psi_of(W(0, 1), 1), psi_of(W(2, 2), 2), psi_of(W(2, 1), 1), psi_of(W(2, 0), 2)])
        return lhs.agrees(rhs)
    if which == "octagon":
        lhs = psi_of(W(3, 0), 3) * psi_of(W(0, 1), 1)
        rhs = _prod([
            psi_of(W(0, 1), 1), psi_of(W(3, 3), 3), psi_of(W(3, 2), 1),
            psi_of(W(6, 3), 3), psi_of(W(3, 1), 1), psi_of(W(3, 0), 3),
        ])
        return lhs.agrees(rhs)
    raise ValueError(f"unknown identity {which!r}")


# ---------------------------------------------------------------------------
# quantum mutation maps
# ---------------------------------------------------------------------------
# A "formula" is a list of factors evaluated left to right:
#   ("mono", coeff, key)           coeff * B^a X^b
#   ("binom", coeff, key, e)       (1 + coeff * B^a X^b)^e


@dataclass(frozen=True)
class _MutData:
    """What a single mutation step needs: the seed it starts from."""

    eps: tuple
    d: tuple
    N: int

    def q_k(self, k: int) -> int:
        """u-exponent of q_k = q^(1/d_k)."""
        return _as_int(Fraction(self.N, self.d[k]))


def _sgn(x: int) -> int:
    return 1 if x > 0 else -1


def _sharp_formula(ctx: TorusContext, md: _MutData, k: int, gen: tuple[str, int]):
    """Closed form of mu#_k on one generator of the same torus."""
    kind, i = gen
    n = ctx.n
    qk = md.q_k(k)
    if kind == "B":
        if i != k:
            return [("mono", ctx.one, ctx.key_B(i))]
        xt = tuple(md.eps[k][j] for j in range(n)) + ctx.key_X(k)[n:]
        return [
            ("mono", ctx.one, ctx.key_B(k)),
            ("binom", QCoeff.upow(qk, ctx.N), ctx.key_X(k), 1),
            ("binom", QCoeff.upow(qk, ctx.N), xt, -1),
        ]
    e = md.eps[i][k]
    out = [("mono", ctx.one, ctx.key_X(i))]
    sg = _sgn(-e)
    for r in range(1, abs(e) + 1):
        out.append(("binom", QCoeff.upow(sg * qk * (2 * r - 1), ctx.N), ctx.key_X(k), sg))
    return out


def _quantum_formula(ctx: TorusContext, md: _MutData, k: int, gen: tuple[str, int], dual_sign: int = -1):
    """mu^q_k = mu#_k o mu'_k on a generator of the mutated torus.

    ``dual_sign`` is the sign in the q_k prefactor of mu'_k(X'_i).
    """
    kind, i = gen
    n = ctx.n
    qk = md.q_k(k)
    eps = md.eps
    if kind == "B":
        if i != k:
            return [("mono", ctx.one, ctx.key_B(i))]
        xt = tuple(eps[k][j] for j in range(n)) + ctx.key_X(k)[n:]
        key = [0] * (2 * n)
        key[k] = -1
        for j in range(n):
            if j != k and eps[k][j] < 0:
                key[j] = -eps[k][j]
        return [
            ("binom", QCoeff.upow(qk, ctx.N), xt, 1),
            ("binom", QCoeff.upow(qk, ctx.N), ctx.key_X(k), -1),
            ("mono", ctx.one, tuple(key)),
        ]
    if i == k:
        return [("mono", ctx.one, ctx.key_X(k, -1))]
    e = eps[i][k]
    a = max(e, 0)
    pref = QCoeff.upow(dual_sign * qk * e * a, ctx.N)
    out = [("mono", pref, ctx.key_X(i))]
    sg = _sgn(-e)
    for r in range(1, abs(e) + 1):
        out.append(("binom", QCoeff.upow(sg * qk * (2 * r - 1), ctx.N), ctx.key_X(k), sg))
    if a:
        out.append(("mono", ctx.one, ctx.key_X(k, a)))
    return out


class _Images:
    """Images in the base torus of the generators of some later seed."""

    def __init__(self, ctx: TorusContext, images: dict | None = None):
        self.ctx = ctx
        n = ctx.n
        if images is None:
            images = {("B", i): QSeries.mono(ctx, ctx.key_B(i)) for i in range(n)}
            images.update({("X", i): QSeries.mono(ctx, ctx.key_X(i)) for i in range(n)})
        self.images = images
        self._pow: dict = {}

    def power(self, gen, e: int) -> QSeries:
        if e == 1:
            return self.images[gen]
        key = (gen, e)
        if key not in self._pow:
            if e < 0:
                base = self.power(gen, -1) if e != -1 else self.images[gen].inverse()
                self._pow[key] = base if e == -1 else self.power(gen, -1) ** (-e)
            else:
                self._pow[key] = self.images[gen] ** e
        return self._pow[key]

    def monomial(self, key, coeff: QCoeff) -> QSeries:
        n = self.ctx.n
        out = QSeries.scalar(self.ctx, coeff)
        for i in range(n):
            if key[i]:
                out = out * self.power(("B", i), key[i])
        for i in range(n):
            if key[n + i]:
                out = out * self.power(("X", i), key[n + i])
        return out

    def evaluate(self, formula) -> QSeries:
        out = None
        for f in formula:
            if f[0] == "mono":
                val = self.monomial(f[2], f[1])
            else:
                _, c, key, e = f
                val = (self.monomial(key, c) + 1) ** e
            out = val if out is None else out * val
        return out


def _step(images: _Images, seed_data: _MutData, step, n: int, dual_sign: int = -1) -> _Images:
    ctx = images.ctx
    kind, arg = step
    new = {}
    if kind == "mu":
        k = arg - 1
        for g in [("B", i) for i in range(n)] + [("X", i) for i in range(n)]:
            new[g] = images.evaluate(_quantum_formula(ctx, seed_data, k, g, dual_sign))
    else:
        p = [x - 1 for x in arg]
        for i in range(n):
            new[("B", p[i])] = images.images[("B", i)]
            new[("X", p[i])] = images.images[("X", i)]
    return _Images(ctx, new)


def quantum_mutation_prime(gen: str, s: Seed, k: int, ctx: TorusContext | None = None) -> QSeries:
    """mu'_k on a generator ('X2', 'B1', ...) of the mutated torus."""
    k0 = _check_index(s, k)
    ctx = ctx or TorusContext.for_seed(s)
    kind, i = gen[0], int(gen[1:]) - 1
    n = s.n
    if kind == "B":
        if i != k0:
            return QSeries.mono(ctx, ctx.key_B(i))
        key = [0] * (2 * n)
        key[k0] = -1
        for j in range(n):
            if j != k0 and s.epsilon[k0][j] < 0:
                key[j] = -s.epsilon[k0][j]
        return QSeries.mono(ctx, tuple(key))
    if i == k0:
        return QSeries.mono(ctx, ctx.key_X(k0, -1))
    e = s.epsilon[i][k0]
    a = max(e, 0)
    qk = _as_int(Fraction(ctx.N, s.d[k0]))
    return QSeries.mono(ctx, ctx.key_X(i), QCoeff.upow(-qk * e * a, ctx.N)) * QSeries.mono(ctx, ctx.key_X(k0, a))


def quantum_mutation_sharp(e: QSeries, s: Seed, k: int, mode: str = "closed_form") -> QSeries:
    """Apply the automorphism mu#_k of the torus of ``s`` to a series."""
    k0 = _check_index(s, k)
    ctx = e.ctx
    md = _MutData(s.epsilon, s.d, ctx.N)
    if mode == "closed_form":
        base = _Images(ctx)
        imgs = _Images(ctx, {g: base.evaluate(_sharp_formula(ctx, md, k0, g))
                             for g in [("B", i) for i in range(ctx.n)] + [("X", i) for i in range(ctx.n)]})
        out = QSeries(ctx, {}, e.prec)
        for key, c in e.terms.items():
            out = out + imgs.monomial(key, c)
        return out
    if mode == "conjugation":
        qk = md.q_k(k0)
        Xk = QSeries.mono(ctx, ctx.key_X(k0))
        Xt = QSeries.mono(ctx, tuple(s.epsilon[k0]) + ctx.key_X(k0)[ctx.n:])
        left = psi_of(Xk, qk) * psi_of(Xt, qk, inverse=True)
        right = psi_of(Xt, qk) * psi_of(Xk, qk, inverse=True)
        return left * e * right
    raise ValueError(f"unknown mode {mode!r}")


def _all_gens(n: int):
    return [("B", i) for i in range(n)] + [("X", i) for i in range(n)]


def _gen_name(g) -> str:
    return f"{g[0]}{g[1] + 1}"


def _run_path(ctx: TorusContext, seeds_along: Sequence, steps: Sequence, N: int, dual_sign: int = -1) -> _Images:
    """Compose quantum maps along ``steps``; seeds_along[t] is the seed before step t."""
    imgs = _Images(ctx)
    for sd, st in zip(seeds_along, steps):
        md = _MutData(sd.epsilon if isinstance(sd, Seed) else sd.epsilon_vee, sd.d if isinstance(sd, Seed) else sd.d_vee, N)
        imgs = _step(imgs, md, st, ctx.n, dual_sign)
    return imgs


def _check_images(ctx: TorusContext, a: _Images, b: _Images, order: int) -> dict:
    out = {}
    for g in _all_gens(ctx.n):
        x, y = a.images[g], b.images[g]
        for z in (x, y):
            if z.prec != INF and z.prec - z.valuation() < order * UNIT:
                raise TruncationError(
                    f"image of {_gen_name(g)} kept relative precision {z.prec - z.valuation()}, "
                    f"below order {order}"
                )
        out[_gen_name(g)] = x.agrees(y)
    return out


def verify_quantum_relation(s: Seed, r: RelationSpec, order: int = 6, rng_seed: int = 0) -> dict:
    """Compose the quantum maps along both branches of ``r`` and compare."""
    seq = relation_sequence(s, r)
    ctx = TorusContext.for_seed(s, order, rng_seed)
    lhs_steps, rhs_steps = r.branches(s.n)
    a = _run_path(ctx, seq.lhs_path[:-1], lhs_steps, ctx.N)
    if r.kind == "A1":
        b = _Images(ctx)
    else:
        b = _run_path(ctx, seq.rhs_path[:-1], rhs_steps, ctx.N)
    per = _check_images(ctx, a, b, order)
    return {
        "relation": r.to_json(),
        "order": order,
        "root_order": ctx.N,
        "generators": per,
        "identity": all(per.values()),
    }


def verify_dual_quantum(s: Seed, k: int, order: int = 6, dual_sign: int = -1) -> bool:
    """Dual-seed quantum mutation: involutivity plus the rank-2 relations.

    Runs mu_k mu_k on the dual torus and, for every pair (i, j) on which a
    rank-2 relation is detected for the original seed, the dual relation
    along the same branches.  ``dual_sign`` selects the sign of the q_k
    prefactor in the dual mu'_k.
    """
    ds = langlands_dual(s)
    ctx = TorusContext.for_dual(ds, order)
    mid = dual_mutate(ds, k)
    if langlands_dual(mutate_exchange(s, k)).epsilon_vee != mid.epsilon_vee:
        return False
    a = _run_path(ctx, [ds, mid], [("mu", k), ("mu", k)], 1, dual_sign)
    if not all(_check_images(ctx, a, _Images(ctx), order).values()):
        return False
    for i in range(1, s.n + 1):
        for j in range(1, s.n + 1):
            if i == j:
                continue
            r = detect_relation(s, i, j)
            if r is None or k not in (i, j):
                continue
            lhs, rhs = r.branches(s.n)
            paths = []
            for steps in (lhs, rhs):
                cur, along = ds, []
                for st in steps:
                    along.append(cur)
                    cur = dual_mutate(cur, st[1]) if st[0] == "mu" else _dual_permute(cur, st[1])
                paths.append((along, steps, cur))
            if paths[0][2] != paths[1][2]:
                return False
            ia = _run_path(ctx, paths[0][0], paths[0][1], 1, dual_sign)
            ib = _run_path(ctx, paths[1][0], paths[1][1], 1, dual_sign)
            if not all(_check_images(ctx, ia, ib, order).values()):
                return False
    return True


def _dual_permute(ds: DualSeed, sigma) -> DualSeed:
    p = [x - 1 for x in sigma]
    n = ds.n
    eps = [[0] * n for _ in range(n)]
    d = [None] * n
    for i in range(n):
        d[p[i]] = ds.d_vee[i]
        for j in range(n):
            eps[p[i]][p[j]] = ds.epsilon_vee[i][j]
    return DualSeed(tuple(map(tuple, eps)), tuple(d))


# ---------------------------------------------------------------------------
# q -> 1
# ---------------------------------------------------------------------------


def classical_limit_check(s: Seed, k: int, order: int = 6) -> dict:
    """Compare u = 1 specialisations of mu^q_k images with classical mutation.

    The classical D-kind rational functions are expanded with the same
    weights in a commutative torus, so both sides are compared as series.
    """
    from .classical import initial_vars, mutate_classical

    ctx = TorusContext.for_seed(s, order)
    md = _MutData(s.epsilon, s.d, ctx.N)
    base = _Images(ctx)
    quantum = {g: base.evaluate(_quantum_formula(ctx, md, k - 1, g)) for g in _all_gens(s.n)}
    comm = TorusContext([[0] * s.n for _ in range(s.n)], [0] * s.n, 1, order, weights=ctx.weights)
    v = mutate_classical(initial_vars(s, "D"), s, k)
    out = {}
    for g in _all_gens(s.n):
        expr = v.b[g[1]] if g[0] == "B" else v.x[g[1]]
        cl = _ratexpr_to_series(expr, comm, s.n)
        qs = quantum[g]
        p = min(qs.prec, cl.prec)
        lhs = {key: c for key, c in qs.at_one().items() if ctx.weight(key) < p}
        rhs = {key: c.at_one() for key, c in cl.terms.items() if ctx.weight(key) < p}
        rhs = {key: c for key, c in rhs.items() if c}
        out[_gen_name(g)] = lhs == rhs
    return out


def _ratexpr_to_series(expr, ctx: TorusContext, n: int) -> QSeries:
    names = expr.ctx.names

    def poly(p):
        terms = {}
        for exps, c in p.to_dict().items():
            key = [0] * (2 * n)
            for name, e in zip(names, exps):
                idx = int(name[1:]) - 1
                key[idx if name[0] == "B" else n + idx] += int(e)
            terms[tuple(key)] = QCoeff.const(Fraction(int(c.p), int(c.q)), ctx.N)
        return QSeries(ctx, terms)

    return poly(expr.num) * poly(expr.den).inverse()
