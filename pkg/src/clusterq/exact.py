"""Exact arithmetic: rationals, rational functions in u = q^(1/N), and
rational functions in commuting cluster variables.

``Rational`` is :class:`fractions.Fraction`.  Polynomial arithmetic is
delegated to python-flint (``fmpq_poly`` and ``fmpq_mpoly``); this module
only owns canonical forms, context checks and the small matrix helpers.
"""
from __future__ import annotations

from fractions import Fraction
from functools import reduce
from math import gcd
from typing import Iterable, Sequence

from flint import fmpq, fmpq_mpoly, fmpq_mpoly_ctx, fmpq_poly

Rational = Fraction

__all__ = [
    "Rational",
    "ContextError",
    "QCoeff",
    "qcoeff_arith",
    "RatContext",
    "RatExpr",
    "ratexpr_simplify",
    "lcm",
    "mat_mul",
    "mat_inv",
    "mat_det",
    "identity",
]


class ContextError(ValueError):
    """Raised when values from different arithmetic contexts are mixed."""


def lcm(values: Iterable[int]) -> int:
    return reduce(lambda a, b: a * b // gcd(a, b), values, 1)


def _to_fmpq(x) -> fmpq:
    if isinstance(x, Fraction):
        return fmpq(x.numerator, x.denominator)
    return fmpq(x)


def _from_fmpq(x: fmpq) -> Fraction:
    return Fraction(int(x.p), int(x.q))


# ---------------------------------------------------------------------------
# QCoeff
# ---------------------------------------------------------------------------

_ONE = fmpq_poly([1])
_ZERO = fmpq_poly([])


def _valuation(p: fmpq_poly) -> int:
    """Order of vanishing of ``p`` at u = 0 (p nonzero)."""
    for i, c in enumerate(p.coeffs()):
        if c != 0:
            return i
    raise ZeroDivisionError("valuation of zero polynomial")


def _shift_down(p: fmpq_poly, k: int) -> fmpq_poly:
    if k == 0:
        return p
    return fmpq_poly(p.coeffs()[k:])


class QCoeff:
    """Element of Q(u) where u stands for q^(1/N).

    Canonical form is ``u**shift * num / den`` with ``num(0) != 0``,
    ``den(0) != 0``, ``den`` monic and ``gcd(num, den) == 1``.  Zero is
    ``(0, 1, 0)``.  With this normalisation equality is syntactic and
    Laurent polynomials (the common case) have ``den == 1``.

    Numerators carry rational coefficients so that a monic denominator is
    always available; this is the same field as integer-coefficient
    fractions and the representation is unique.
    """

    __slots__ = ("num", "den", "shift", "N")

    def __init__(self, num, den=None, shift: int = 0, N: int = 1, *, _canonical=False):
        if not isinstance(num, fmpq_poly):
            num = fmpq_poly(num) if isinstance(num, (list, tuple)) else fmpq_poly([_to_fmpq(num)])
        if den is None:
            den = _ONE
        elif not isinstance(den, fmpq_poly):
            den = fmpq_poly(den) if isinstance(den, (list, tuple)) else fmpq_poly([_to_fmpq(den)])
        self.N = N
        if _canonical:
            self.num, self.den, self.shift = num, den, shift
        else:
            self.num, self.den, self.shift = QCoeff._canon(num, den, shift)

    @staticmethod
    def _canon(num: fmpq_poly, den: fmpq_poly, shift: int):
        if den == 0:
            raise ZeroDivisionError("QCoeff with zero denominator")
        if num == 0:
            return _ZERO, _ONE, 0
        v = _valuation(num)
        if v:
            num = _shift_down(num, v)
            shift += v
        v = _valuation(den)
        if v:
            den = _shift_down(den, v)
            shift -= v
        if den.degree() > 0:
            g = num.gcd(den)
            if g.degree() > 0:
                num = num // g
                den = den // g
        lc = den.coeffs()[-1]
        if lc != 1:
            num = num / lc
            den = den / lc
        return num, den, shift

    # constructors ---------------------------------------------------------
    @classmethod
    def one(cls, N: int = 1) -> "QCoeff":
        return cls(_ONE, _ONE, 0, N, _canonical=True)

    @classmethod
    def zero(cls, N: int = 1) -> "QCoeff":
        return cls(_ZERO, _ONE, 0, N, _canonical=True)

    @classmethod
    def const(cls, c, N: int = 1) -> "QCoeff":
        return cls(fmpq_poly([_to_fmpq(c)]), _ONE, 0, N)

    @classmethod
    def upow(cls, e: int, N: int = 1, c=1) -> "QCoeff":
        """``c * u**e``."""
        if c == 0:
            return cls.zero(N)
        return cls(fmpq_poly([_to_fmpq(c)]), _ONE, e, N, _canonical=True)

    @classmethod
    def qpow(cls, e, N: int = 1) -> "QCoeff":
        """``q**e`` for rational e with e*N integral."""
        e = Fraction(e) * N
        if e.denominator != 1:
            raise ContextError(f"q^{e / N} is not an integer power of u = q^(1/{N})")
        return cls.upow(int(e), N)

    # predicates -----------------------------------------------------------
    def is_zero(self) -> bool:
        return self.num == 0

    def is_laurent(self) -> bool:
        return self.den.degree() == 0

    def _check(self, other: "QCoeff"):
        if self.N != other.N:
            raise ContextError(f"QCoeff context mismatch: N={self.N} vs N={other.N}")

    # arithmetic -----------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, QCoeff):
            other = QCoeff.const(other, self.N)
        self._check(other)
        if self.num == 0:
            return other
        if other.num == 0:
            return self
        m = min(self.shift, other.shift)
        a = self.num if self.shift == m else self.num * fmpq_poly([0] * (self.shift - m) + [1])
        b = other.num if other.shift == m else other.num * fmpq_poly([0] * (other.shift - m) + [1])
        if self.den.degree() == 0 and other.den.degree() == 0:
            num = a + b
            if num == 0:
                return QCoeff.zero(self.N)
            v = _valuation(num)
            return QCoeff(_shift_down(num, v), _ONE, m + v, self.N, _canonical=True)
        if self.den == other.den:
            return QCoeff(a + b, self.den, m, self.N)
        return QCoeff(a * other.den + b * self.den, self.den * other.den, m, self.N)

    __radd__ = __add__

    def __neg__(self):
        return QCoeff(-self.num, self.den, self.shift, self.N, _canonical=True)

    def __sub__(self, other):
        if not isinstance(other, QCoeff):
            other = QCoeff.const(other, self.N)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, QCoeff):
            if other == 0:
                return QCoeff.zero(self.N)
            return QCoeff(self.num * _to_fmpq(other), self.den, self.shift, self.N, _canonical=True)
        self._check(other)
        if self.num == 0 or other.num == 0:
            return QCoeff.zero(self.N)
        if self.den.degree() == 0 and other.den.degree() == 0:
            return QCoeff(self.num * other.num, _ONE, self.shift + other.shift, self.N, _canonical=True)
        return QCoeff(self.num * other.num, self.den * other.den, self.shift + other.shift, self.N)

    __rmul__ = __mul__

    def mul_upow(self, e: int) -> "QCoeff":
        if self.num == 0 or e == 0:
            return self
        return QCoeff(self.num, self.den, self.shift + e, self.N, _canonical=True)

    def inverse(self) -> "QCoeff":
        if self.num == 0:
            raise ZeroDivisionError("QCoeff division by zero")
        return QCoeff(self.den, self.num, -self.shift, self.N)

    def __truediv__(self, other):
        if not isinstance(other, QCoeff):
            other = QCoeff.const(other, self.N)
        self._check(other)
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        if self.num == 0:
            return QCoeff.one(self.N) if k == 0 else self
        return QCoeff(self.num ** k, self.den ** k, self.shift * k, self.N, _canonical=True)

    # comparison -----------------------------------------------------------
    def __eq__(self, other):
        if not isinstance(other, QCoeff):
            try:
                other = QCoeff.const(other, self.N)
            except (TypeError, ValueError):
                return NotImplemented
        return (
            self.N == other.N
            and self.shift == other.shift
            and self.num == other.num
            and self.den == other.den
        )

    def __hash__(self):
        return hash((self.N, self.shift, tuple(self.num.coeffs()), tuple(self.den.coeffs())))

    # specialisations ------------------------------------------------------
    def star(self) -> "QCoeff":
        """Image under u -> 1/u."""
        if self.num == 0:
            return self
        dn, dd = self.num.degree(), self.den.degree()
        rn = fmpq_poly(self.num.coeffs()[::-1])
        rd = fmpq_poly(self.den.coeffs()[::-1])
        return QCoeff(rn, rd, -self.shift - dn + dd, self.N)

    def at(self, u):
        """Evaluate at ``u``: exactly for int/Fraction, else as complex."""
        if isinstance(u, (int, Fraction)):
            uq = _to_fmpq(u)
            return _from_fmpq(self.num(uq) / self.den(uq) * uq ** self.shift)
        n = sum(float(c) * u ** i for i, c in enumerate(self.num.coeffs()))
        d = sum(float(c) * u ** i for i, c in enumerate(self.den.coeffs()))
        return n / d * u ** self.shift

    def at_one(self) -> Fraction:
        d = self.den(fmpq(1))
        if d == 0:
            raise ZeroDivisionError(f"QCoeff {self} has a pole at u = 1")
        return _from_fmpq(self.num(fmpq(1)) / d)

    def laurent_terms(self) -> dict[int, Fraction]:
        if not self.is_laurent():
            raise ValueError("not a Laurent polynomial")
        return {
            self.shift + i: _from_fmpq(c) for i, c in enumerate(self.num.coeffs()) if c != 0
        }

    def __repr__(self):
        if self.num == 0:
            return "0"
        s = f"({str(self.num).replace('x', 'u')})"
        if self.shift:
            s = f"u^{self.shift}*" + s
        if self.den.degree() > 0:
            s += f"/({str(self.den).replace('x', 'u')})"
        return s


def qcoeff_arith(a: QCoeff, b: QCoeff, op: str) -> QCoeff:
    """Binary QCoeff arithmetic; ``op`` is one of add, sub, mul, div."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        if b.is_zero():
            raise ZeroDivisionError("qcoeff_arith: division by zero")
        return a / b
    raise ValueError(f"unknown op {op!r}")


# ---------------------------------------------------------------------------
# RatExpr
# ---------------------------------------------------------------------------


class RatContext:
    """A fixed, named set of commuting indeterminates."""

    _cache: dict = {}

    def __init__(self, names: Sequence[str]):
        self.names = tuple(names)
        self.ctx = fmpq_mpoly_ctx.get(self.names, "deglex")
        self._index = {n: i for i, n in enumerate(self.names)}

    @classmethod
    def get(cls, names: Sequence[str]) -> "RatContext":
        key = tuple(names)
        if key not in cls._cache:
            cls._cache[key] = cls(key)
        return cls._cache[key]

    def gen(self, name: str) -> "RatExpr":
        return RatExpr(self.ctx.gens()[self._index[name]], self.ctx.from_dict({}) + 1, self, _canonical=True)

    def gens(self) -> list["RatExpr"]:
        one = self.ctx.from_dict({}) + 1
        return [RatExpr(g, one, self, _canonical=True) for g in self.ctx.gens()]

    def const(self, c) -> "RatExpr":
        return RatExpr(self.ctx.from_dict({}) + _to_fmpq(c), self.ctx.from_dict({}) + 1, self, _canonical=True)

    def index(self, name: str) -> int:
        return self._index[name]

    def __eq__(self, other):
        return isinstance(other, RatContext) and self.names == other.names

    def __hash__(self):
        return hash(self.names)

    def __repr__(self):
        return f"RatContext{self.names}"


class RatExpr:
    """Rational function num/den over Q in the variables of a RatContext.

    Canonical: gcd(num, den) = 1 and den has leading coefficient 1 in the
    deglex order, so two canonical values are equal iff their parts are.
    """

    __slots__ = ("num", "den", "ctx")

    def __init__(self, num: fmpq_mpoly, den: fmpq_mpoly, ctx: RatContext, *, _canonical=False):
        self.ctx = ctx
        if _canonical:
            self.num, self.den = num, den
        else:
            self.num, self.den = RatExpr._canon(num, den, ctx)

    @staticmethod
    def _canon(num, den, ctx):
        if den.is_zero():
            raise ZeroDivisionError("RatExpr with zero denominator")
        if num.is_zero():
            return num, ctx.ctx.from_dict({}) + 1
        if not den.is_constant():
            g = num.gcd(den)
            if not g.is_constant():
                num = num // g
                den = den // g
        lc = den.leading_coefficient()
        if lc != 1:
            num = num / lc
            den = den / lc
        return num, den

    def _lift(self, other) -> "RatExpr":
        if isinstance(other, RatExpr):
            if other.ctx != self.ctx:
                raise ContextError(f"RatExpr context mismatch: {self.ctx} vs {other.ctx}")
            return other
        return self.ctx.const(other)

    def __add__(self, other):
        o = self._lift(other)
        if self.den == o.den:
            return RatExpr(self.num + o.num, self.den, self.ctx)
        return RatExpr(self.num * o.den + o.num * self.den, self.den * o.den, self.ctx)

    __radd__ = __add__

    def __neg__(self):
        return RatExpr(-self.num, self.den, self.ctx, _canonical=True)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._lift(other)
        # reduce crosswise before multiplying to keep intermediates small
        g1 = self.num.gcd(o.den) if not o.den.is_constant() else None
        g2 = o.num.gcd(self.den) if not self.den.is_constant() else None
        n1, d2 = (self.num, o.den) if g1 is None or g1.is_constant() else (self.num // g1, o.den // g1)
        n2, d1 = (o.num, self.den) if g2 is None or g2.is_constant() else (o.num // g2, self.den // g2)
        num, den = n1 * n2, d1 * d2
        lc = den.leading_coefficient()
        if lc != 1:
            num, den = num / lc, den / lc
        return RatExpr(num, den, self.ctx, _canonical=True)

    __rmul__ = __mul__

    def inverse(self) -> "RatExpr":
        if self.num.is_zero():
            raise ZeroDivisionError("RatExpr division by zero")
        return RatExpr(self.den, self.num, self.ctx)

    def __truediv__(self, other):
        return self * self._lift(other).inverse()

    def __rtruediv__(self, other):
        return self._lift(other) * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        return RatExpr(self.num ** k, self.den ** k, self.ctx, _canonical=True)

    def __eq__(self, other):
        try:
            o = self._lift(other)
        except (ContextError, TypeError):
            return NotImplemented
        return self.num == o.num and self.den == o.den

    def __hash__(self):
        return hash((str(self.num), str(self.den)))

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def derivative(self, name: str) -> "RatExpr":
        """Formal partial derivative with respect to the variable ``name``."""
        i = self.ctx.index(name)
        dn = self.num.derivative(i)
        dd = self.den.derivative(i)
        if dd.is_zero():
            return RatExpr(dn, self.den, self.ctx)
        return RatExpr(dn * self.den - self.num * dd, self.den * self.den, self.ctx)

    def has_monomial_denominator(self) -> bool:
        return len(self.den.to_dict()) == 1

    def is_subtraction_free_num(self) -> bool:
        return all(c > 0 for c in self.num.to_dict().values())

    def evaluate(self, values: dict[str, Fraction]) -> Fraction:
        args = [_to_fmpq(values[n]) for n in self.ctx.names]
        return _from_fmpq(self.num(*args) / self.den(*args))

    def __repr__(self):
        if self.den.is_one():
            return str(self.num)
        return f"({self.num})/({self.den})"


def ratexpr_simplify(e: RatExpr) -> RatExpr:
    """Return the lowest-terms canonical form (idempotent)."""
    return RatExpr(e.num, e.den, e.ctx)


# ---------------------------------------------------------------------------
# matrices as tuples of tuples
# ---------------------------------------------------------------------------

Matrix = tuple


def identity(n: int, one=1) -> Matrix:
    zero = one - one
    return tuple(tuple(one if i == j else zero for j in range(n)) for i in range(n))


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    n, m, p = len(a), len(b), len(b[0]) if b else 0
    return tuple(
        tuple(sum((a[i][k] * b[k][j] for k in range(m)), a[i][0] * 0) for j in range(p))
        for i in range(n)
    )


def mat_det(a: Matrix) -> Fraction:
    """Determinant by fraction-exact Gaussian elimination."""
    m = [[Fraction(x) for x in row] for row in a]
    n = len(m)
    det = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            det = -det
        det *= m[c][c]
        for r in range(c + 1, n):
            f = m[r][c] / m[c][c]
            if f:
                for k in range(c, n):
                    m[r][k] -= f * m[c][k]
    return det


def mat_inv(a: Matrix) -> Matrix:
    n = len(a)
    m = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(a)]
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        m[c], m[piv] = m[piv], m[c]
        p = m[c][c]
        m[c] = [x / p for x in m[c]]
        for r in range(n):
            if r != c and m[r][c] != 0:
                f = m[r][c]
                m[r] = [x - f * y for x, y in zip(m[r], m[c])]
    return tuple(tuple(row[n:]) for row in m)
