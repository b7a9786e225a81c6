"""Classical A/X/D cluster variables as exact rational functions of the
initial variables, trivial-transformation checks and Poisson brackets."""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .exact import RatContext, RatExpr
from .seed import Seed, mutate_exchange, permute_seed, _check_index, _check_perm

__all__ = [
    "ClassicalVars",
    "TransformationWord",
    "initial_vars",
    "mutate_classical",
    "permute_classical",
    "apply_word",
    "verify_trivial",
    "poisson_bracket",
    "verify_poisson_preserved",
    "polygon_word",
]

KINDS = ("A", "X", "D")


def _names(kind: str, n: int) -> list[str]:
    if kind == "A":
        return [f"A{i}" for i in range(1, n + 1)]
    if kind == "X":
        return [f"X{i}" for i in range(1, n + 1)]
    if kind == "D":
        return [f"B{i}" for i in range(1, n + 1)] + [f"X{i}" for i in range(1, n + 1)]
    raise ValueError(f"unknown kind {kind!r}; expected A, X or D")


@dataclass(frozen=True)
class ClassicalVars:
    """Variables of the current seed, pulled back to the initial field.

    ``a`` holds A_i (A-kind); ``x`` holds X_i (X- and D-kind); ``b`` holds
    B_i (D-kind).  Unused slots are empty tuples.
    """

    kind: str
    seed: Seed
    ctx: RatContext
    a: tuple = ()
    x: tuple = ()
    b: tuple = ()

    def values(self) -> list[tuple[str, RatExpr]]:
        n = self.seed.n
        if self.kind == "A":
            return [(f"A{i + 1}", self.a[i]) for i in range(n)]
        out = [(f"X{i + 1}", self.x[i]) for i in range(n)]
        if self.kind == "D":
            out = [(f"B{i + 1}", self.b[i]) for i in range(n)] + out
        return out

    def x_tilde(self, i: int) -> RatExpr:
        """X~_i = X_i prod_j B_j^eps_ij (1-based i, D-kind)."""
        i0 = _check_index(self.seed, i)
        out = self.x[i0]
        for j, e in enumerate(self.seed.epsilon[i0]):
            if e:
                out = out * self.b[j] ** e
        return out


def initial_vars(s: Seed, kind: str) -> ClassicalVars:
    ctx = RatContext.get(_names(kind, s.n))
    g = {name: ctx.gen(name) for name in ctx.names}
    n = s.n
    if kind == "A":
        return ClassicalVars("A", s, ctx, a=tuple(g[f"A{i}"] for i in range(1, n + 1)))
    if kind == "X":
        return ClassicalVars("X", s, ctx, x=tuple(g[f"X{i}"] for i in range(1, n + 1)))
    return ClassicalVars(
        "D", s, ctx,
        x=tuple(g[f"X{i}"] for i in range(1, n + 1)),
        b=tuple(g[f"B{i}"] for i in range(1, n + 1)),
    )


def _monomial(vals: Sequence[RatExpr], exps: Iterable[int], one: RatExpr) -> RatExpr:
    out = one
    for v, e in zip(vals, exps):
        if e:
            out = out * v ** e
    return out


def mutate_classical(v: ClassicalVars, s: Seed, k: int) -> ClassicalVars:
    """Mutate in direction ``k``; ``s`` is the seed the variables live on.

    Returns variables on mu_k(s), still expressed in the initial field.
    """
    k0 = _check_index(s, k)
    eps = s.epsilon
    n = s.n
    one = v.ctx.const(1)
    new_seed = mutate_exchange(s, k)
    if v.kind == "A":
        plus = _monomial(v.a, [max(eps[k0][j], 0) for j in range(n)], one)
        minus = _monomial(v.a, [max(-eps[k0][j], 0) for j in range(n)], one)
        a = list(v.a)
        a[k0] = (plus + minus) / v.a[k0]
        return ClassicalVars("A", new_seed, v.ctx, a=tuple(a))
    xk = v.x[k0]
    x = list(v.x)
    for i in range(n):
        if i == k0:
            x[i] = xk.inverse()
            continue
        e = eps[i][k0]
        if e > 0:
            x[i] = v.x[i] * (1 + xk.inverse()) ** (-e)
        elif e < 0:
            x[i] = v.x[i] * (1 + xk) ** (-e)
    if v.kind == "X":
        return ClassicalVars("X", new_seed, v.ctx, x=tuple(x))
    b = list(v.b)
    bplus = _monomial(v.b, [max(eps[k0][j], 0) for j in range(n)], one)
    bminus = _monomial(v.b, [max(-eps[k0][j], 0) for j in range(n)], one)
    b[k0] = (bminus + xk * bplus) / (v.b[k0] * (1 + xk))
    return ClassicalVars("D", new_seed, v.ctx, x=tuple(x), b=tuple(b))


def permute_classical(v: ClassicalVars, s: Seed, sigma: Sequence[int]) -> ClassicalVars:
    """Seed automorphism: the variable at sigma(i) of the new seed is V_i."""
    p = _check_perm(sigma, s.n)

    def move(vals):
        if not vals:
            return vals
        out = [None] * len(vals)
        for i, val in enumerate(vals):
            out[p[i]] = val
        return tuple(out)

    return ClassicalVars(v.kind, permute_seed(s, sigma), v.ctx, a=move(v.a), x=move(v.x), b=move(v.b))


class TransformationWord(list):
    """Steps ("mu", k) or ("perm", sigma), applied left to right."""

    @classmethod
    def parse(cls, items: Iterable[str]) -> "TransformationWord":
        out = cls()
        for item in items:
            head, _, rest = item.partition(":")
            if head == "mu":
                out.append(("mu", int(rest)))
            elif head == "perm":
                out.append(("perm", tuple(int(x) for x in rest.split(","))))
            else:
                raise ValueError(f"bad step {item!r}; expected 'mu:k' or 'perm:s1,...,sn'")
        return out

    @classmethod
    def from_json(cls, text: str) -> "TransformationWord":
        return cls.parse(json.loads(text))

    def to_json(self) -> list[str]:
        return [f"mu:{a}" if k == "mu" else "perm:" + ",".join(map(str, a)) for k, a in self]


def polygon_word(i: int, j: int, n: int, h: int) -> TransformationWord:
    """(P_(i j) o mu_i)^(h+2), i.e. [mu_i, perm (i j)] repeated h+2 times."""
    sigma = list(range(1, n + 1))
    sigma[i - 1], sigma[j - 1] = j, i
    return TransformationWord([("mu", i), ("perm", tuple(sigma))] * (h + 2))


def apply_word(v: ClassicalVars, s: Seed, w: Iterable) -> ClassicalVars:
    for kind, arg in w:
        if kind == "mu":
            v = mutate_classical(v, s, arg)
        else:
            v = permute_classical(v, s, arg)
        s = v.seed
    return v


def verify_trivial(s: Seed, w: Iterable, kind: str) -> dict:
    """Check that ``w`` returns to ``s`` with every variable unchanged."""
    v0 = initial_vars(s, kind)
    v1 = apply_word(v0, s, w)
    report = {"kind": kind, "seed_matches": v1.seed == s, "per_variable": {}, "witness": None}
    for (name, a), (_, b) in zip(v0.values(), v1.values()):
        ok = a == b
        report["per_variable"][name] = ok
        if not ok and report["witness"] is None:
            report["witness"] = name
    if report["witness"] is None and not report["seed_matches"]:
        report["witness"] = "seed"
    report["is_trivial"] = report["witness"] is None
    return report


# ---------------------------------------------------------------------------
# Poisson structures
# ---------------------------------------------------------------------------


def _structure(s: Seed, kind: str):
    """Pairs (a, b, coefficient c) with {v_a, v_b} = c v_a v_b, names given."""
    n = s.n
    out = []
    for i in range(n):
        for j in range(n):
            c = s.eps_hat(i, j)
            if c:
                out.append((f"X{i + 1}", f"X{j + 1}", c))
    if kind == "D":
        for i in range(n):
            c = Fraction(1, s.d[i])
            out.append((f"X{i + 1}", f"B{i + 1}", c))
            out.append((f"B{i + 1}", f"X{i + 1}", -c))
    elif kind != "X":
        raise ValueError("Poisson brackets are defined for X and D kinds")
    return out


def poisson_bracket(f: RatExpr, g: RatExpr, s: Seed, kind: str) -> RatExpr:
    """Biderivation with {X_i, X_j} = eps^_ij X_i X_j (and B-terms for D)."""
    ctx = f.ctx
    out = ctx.const(0)
    df, dg = {}, {}
    for a, b, c in _structure(s, kind):
        if a not in df:
            df[a] = f.derivative(a)
        if b not in dg:
            dg[b] = g.derivative(b)
        if df[a].is_zero() or dg[b].is_zero():
            continue
        out = out + df[a] * dg[b] * (ctx.gen(a) * ctx.gen(b) * c)
    return out


def verify_poisson_preserved(s: Seed, k: int, kind: str) -> bool:
    v = mutate_classical(initial_vars(s, kind), s, k)
    s1 = v.seed
    n = s.n
    for i in range(n):
        for j in range(n):
            lhs = poisson_bracket(v.x[i], v.x[j], s, kind)
            if lhs != v.x[i] * v.x[j] * s1.eps_hat(i, j):
                return False
    if kind == "D":
        for i in range(n):
            for j in range(n):
                if not poisson_bracket(v.b[i], v.b[j], s, kind).is_zero():
                    return False
                want = v.x[i] * v.b[j] * (Fraction(1, s1.d[i])) if i == j else 0
                if poisson_bracket(v.x[i], v.b[j], s, kind) != want:
                    return False
    return True
