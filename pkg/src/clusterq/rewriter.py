"""Rewriting of intertwiner words: products of non-compact quantum
dilogarithms Phi, quadratic exponentials, special affine shifts and the
phase constants c_hbar.

Factors
-------
``Phi(s, L, inv)``   Phi^{hbar_s}(L)^{+-1}, hbar_s = s * hbar
``Quad(s, L, inv)``  exp(+-L^2 / (4 pi i hbar_s))
``Shift(g)``         the special affine shift operator S_g

A word is read left to right as an operator product, with a phase ledger
{s: e} standing for prod c_{hbar_s}^e.

Rules (each application is recorded in the trace)
-------------------------------------------------
shift-push     S_g F(L) = F(g.L) S_g
shift-merge    S_g S_h = S_gh
commute        F1(L1) F2(L2) = F2(L2) F1(L1) when bracket(L1, L2) = 0
cancel         F(L) F(L)^-1 = 1
involution     Phi_s(T) Phi_s(-T) = c_s Quad_s(T)
polygon        Phi_s1(L1) Phi_s2(L2) Phi_s1(-L1) = c_s1 Phi_s2(L2) [middle] Quad_s1(L1)
               for s1 = m s2, bracket(L1, L2) = s1, m = 1, 2, 3
quad-push      Quad_s(L) F(M) = F(M + (bracket(L, M)/s) L) Quad_s(L)
quad-pair      Quad_s(L1) Quad_s(L2)^-1 = S_c
polygon-conj   Phi_s1(L1) Phi_s2(L2) Phi_s1(L1)^-1 = Phi_s2(L2) [middle]
               Phi_s2(L2)^-1 Phi_s1(L1) Phi_s2(L2) = [middle] Phi_s1(L1)
               (polygon combined with involution; no phase)
plus the formal inverses of involution and the polygon forms (reverse,
invert, negate the ledger entry).
"""
from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .heisenberg import (
    LinearForm,
    QuadPairError,
    ScaledPlanck,
    SpecialAffine,
    affine_compose,
    affine_inverse,
    bracket,
    conjugate_linear_form,
    mutation_shift,
    permutation_shift,
    quad_conjugate,
    quad_pair_to_shift,
    seed_forms,
)
from .seed import RelationSpec, Seed, _check_index, apply_step, relation_sequence

__all__ = [
    "Phi",
    "Quad",
    "Shift",
    "OperatorWord",
    "RewriteTrace",
    "NormalizationError",
    "build_K_word",
    "build_relation_word",
    "normalize",
    "verify_phase_constant",
    "polygon_rhs",
    "polygon_self_test",
    "replay_trace",
    "certificate",
]


# ---------------------------------------------------------------------------
# factors and words
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Phi:
    scale: Fraction
    arg: LinearForm
    inverted: bool = False

    def __post_init__(self):
        object.__setattr__(self, "scale", Fraction(self.scale))
        if self.arg.is_zero():
            raise ValueError("Phi argument must be a nonzero form")

    def inv(self) -> "Phi":
        return Phi(self.scale, self.arg, not self.inverted)

    def conj(self, f) -> "Phi":
        return Phi(self.scale, f(self.arg), self.inverted)

    def __str__(self):
        return f"Phi[{self.scale}]({self.arg})" + ("^-1" if self.inverted else "")


@dataclass(frozen=True)
class Quad:
    scale: Fraction
    arg: LinearForm
    inverted: bool = False

    def __post_init__(self):
        object.__setattr__(self, "scale", Fraction(self.scale))

    def inv(self) -> "Quad":
        return Quad(self.scale, self.arg, not self.inverted)

    def conj(self, f) -> "Quad":
        return Quad(self.scale, f(self.arg), self.inverted)

    def __str__(self):
        return f"Quad[{self.scale}]({self.arg})" + ("^-1" if self.inverted else "")


@dataclass(frozen=True)
class Shift:
    g: SpecialAffine

    def inv(self) -> "Shift":
        return Shift(affine_inverse(self.g))

    def __str__(self):
        rows = ";".join(",".join(str(x) for x in r) for r in self.g.c)
        return f"S[{rows}]"


def _add_phase(phase: dict, s: Fraction, e: int) -> dict:
    out = dict(phase)
    out[s] = out.get(s, 0) + e
    if out[s] == 0:
        del out[s]
    return out


@dataclass(frozen=True)
class OperatorWord:
    n: int
    factors: tuple
    phase: dict = field(default_factory=dict)

    def inverse(self) -> "OperatorWord":
        return OperatorWord(self.n, tuple(f.inv() for f in reversed(self.factors)),
                            {s: -e for s, e in self.phase.items()})

    def __mul__(self, other: "OperatorWord") -> "OperatorWord":
        ph = dict(self.phase)
        for s, e in other.phase.items():
            ph = _add_phase(ph, s, e)
        return OperatorWord(self.n, self.factors + other.factors, ph)

    def __len__(self):
        return len(self.factors)

    def __str__(self):
        ph = " ".join(f"c[{s}]^{e}" for s, e in sorted(self.phase.items()))
        return (ph + " " if ph else "") + " ".join(str(f) for f in self.factors)


@dataclass
class RewriteTrace:
    steps: list = field(default_factory=list)

    def add(self, rule: str, pos: int, before: Sequence, after: Sequence, phase=None):
        step = {
            "rule": rule,
            "position": pos,
            "before": [str(f) for f in before],
            "after": [str(f) for f in after],
        }
        if phase:
            step["phase"] = {str(k): v for k, v in phase.items()}
        self.steps.append(step)

    def __len__(self):
        return len(self.steps)


class NormalizationError(RuntimeError):
    def __init__(self, msg: str, word: OperatorWord | None = None):
        super().__init__(msg)
        self.word = word


# ---------------------------------------------------------------------------
# word construction
# ---------------------------------------------------------------------------


def build_K_word(s: Seed, k: int) -> OperatorWord:
    """K = Phi_{1/d_k}(x^_k) Phi_{1/d_k}(x~^_k)^-1 S_{c_k}, old representation."""
    k0 = _check_index(s, k)
    f = seed_forms(s, "old")
    sc = Fraction(1, s.d[k0])
    return OperatorWord(s.n, (
        Phi(sc, f["x"][k0]),
        Phi(sc, f["xt"][k0], True),
        Shift(mutation_shift(s, k)),
    ))


def _branch_word(s: Seed, steps) -> OperatorWord:
    w = OperatorWord(s.n, ())
    cur = s
    for st in steps:
        if st[0] == "mu":
            w = w * build_K_word(cur, st[1])
        else:
            w = w * OperatorWord(s.n, (Shift(permutation_shift(st[1])),))
        cur = apply_step(cur, st)
    return w


def build_relation_word(s: Seed, r: RelationSpec) -> OperatorWord:
    """RHS^-1 LHS for the two branches of the relation (LHS alone for A1)."""
    relation_sequence(s, r)  # closure check; raises on failure
    lhs, rhs = r.branches(s.n)
    return _branch_word(s, rhs).inverse() * _branch_word(s, lhs)


# ---------------------------------------------------------------------------
# rule kernels
# ---------------------------------------------------------------------------


def _commutes(a, b) -> bool:
    return bracket(a.arg, b.arg) == 0


def polygon_rhs(m: int, s2: Fraction, L1: LinearForm, L2: LinearForm) -> list:
    """Right side (without the phase) of the unified polygon rule."""
    s2 = Fraction(s2)
    s1 = m * s2
    if m == 1:
        middle = [Phi(s1, L1 + L2)]
    elif m == 2:
        middle = [Phi(s1, L1 + L2 * 2), Phi(s2, L1 + L2)]
    elif m == 3:
        middle = [Phi(s1, L1 + L2 * 3), Phi(s2, L1 + L2 * 2), Phi(s1, L1 * 2 + L2 * 3), Phi(s2, L1 + L2)]
    else:
        raise ValueError(f"polygon rule needs m in (1, 2, 3), got {m}")
    return [Phi(s2, L2)] + middle + [Quad(s1, L1)]


def _polygon_match(a, b, c):
    """m if a b c = Phi_s1(L1) Phi_s2(L2) Phi_s1(-L1) satisfies the side conditions."""
    if not all(isinstance(f, Phi) and not f.inverted for f in (a, b, c)):
        return None
    if a.scale != c.scale or c.arg != -a.arg:
        return None
    m = a.scale / b.scale
    if m not in (1, 2, 3) or bracket(a.arg, b.arg) != a.scale:
        return None
    return int(m)


def _polygon_forward(a, b, c):
    m = _polygon_match(a, b, c)
    if m is None:
        return None
    return polygon_rhs(m, b.scale, a.arg, b.arg), {a.scale: 1}


def _polygon_inverse(a, b, c):
    # inverse of the forward rule: Phi_s1(-L1)^-1 Phi_s2(L2)^-1 Phi_s1(L1)^-1
    if not all(isinstance(f, Phi) and f.inverted for f in (a, b, c)):
        return None
    fa, fb, fc = c.inv(), b.inv(), a.inv()
    fwd = _polygon_forward(fa, fb, fc)
    if fwd is None:
        return None
    rhs, ph = fwd
    return [f.inv() for f in reversed(rhs)], {s: -e for s, e in ph.items()}


def _involution_forward(a, b):
    if isinstance(a, Phi) and isinstance(b, Phi) and not a.inverted and not b.inverted:
        if a.scale == b.scale and b.arg == -a.arg:
            return [Quad(a.scale, a.arg)], {a.scale: 1}
    return None


def _involution_inverse(a, b):
    if isinstance(a, Phi) and isinstance(b, Phi) and a.inverted and b.inverted:
        fwd = _involution_forward(b.inv(), a.inv())
        if fwd is not None:
            rhs, ph = fwd
            return [f.inv() for f in reversed(rhs)], {s: -e for s, e in ph.items()}
    return None


def _cancel(a, b):
    if type(a) is type(b) and not isinstance(a, Shift) and a.inv() == b:
        return [], {}
    return None


def _polygon_conj(a, b, c):
    # Phi_s1(L1) Phi_s2(L2) Phi_s1(L1)^-1 = Phi_s2(L2) [middle]; follows from the
    # polygon rule after rewriting Phi_s1(-L1) with the involution rule
    if not (isinstance(c, Phi) and c.inverted and not a.inverted) or c.inv() != a:
        return None
    m = _polygon_match(a, b, Phi(a.scale, -a.arg))
    if m is None:
        return None
    return polygon_rhs(m, b.scale, a.arg, b.arg)[:-1], {}


def _polygon_conj_inverse(a, b, c):
    # Phi_s1(L1) Phi_s2(L2)^-1 Phi_s1(L1)^-1 = [middle]^-1 Phi_s2(L2)^-1
    if not (isinstance(b, Phi) and b.inverted):
        return None
    r = _polygon_conj(a, b.inv(), c)
    if r is None:
        return None
    return [f.inv() for f in reversed(r[0])], {}


def _polygon_conj_left(a, b, c):
    # Phi_s2(L2)^-1 Phi_s1(L1) Phi_s2(L2) = [middle] Phi_s1(L1), same identity
    if not (isinstance(a, Phi) and a.inverted and isinstance(b, Phi) and not b.inverted):
        return None
    if c != a.inv():
        return None
    m = _polygon_match(b, c, Phi(b.scale, -b.arg))
    if m is None:
        return None
    rhs = polygon_rhs(m, c.scale, b.arg, c.arg)
    return rhs[1:-1] + [b], {}


def _polygon_conj_left_inverse(a, b, c):
    # Phi_s2(L2)^-1 Phi_s1(L1)^-1 Phi_s2(L2) = Phi_s1(L1)^-1 [middle]^-1
    if not (isinstance(b, Phi) and b.inverted):
        return None
    r = _polygon_conj_left(a, b.inv(), c)
    if r is None:
        return None
    return [f.inv() for f in reversed(r[0])], {}


PAIR_RULES = (("cancel", _cancel), ("involution", _involution_forward),
              ("involution-inverse", _involution_inverse))
TRIPLE_RULES = (("polygon", _polygon_forward), ("polygon-inverse", _polygon_inverse),
                ("polygon-conj", _polygon_conj), ("polygon-conj-inverse", _polygon_conj_inverse),
                ("polygon-conj-left", _polygon_conj_left),
                ("polygon-conj-left-inverse", _polygon_conj_left_inverse))


def polygon_self_test() -> None:
    """Check the unified polygon rule against the three operator corollaries.

    The corollaries are written out independently in P, Q with
    bracket(P, Q) = 1 and s2 = 1, L1 = m P, L2 = Q.
    """
    P, Q = LinearForm.P(1, 0), LinearForm.Q(1, 0)
    one = Fraction(1)
    expected = {
        1: [Phi(1, Q), Phi(1, P + Q), Quad(1, P)],
        2: [Phi(1, Q), Phi(2, 2 * P + 2 * Q), Phi(1, 2 * P + Q), Quad(2, 2 * P)],
        3: [Phi(1, Q), Phi(3, 3 * P + 3 * Q), Phi(1, 3 * P + 2 * Q), Phi(3, 6 * P + 3 * Q),
            Phi(1, 3 * P + Q), Quad(3, 3 * P)],
    }
    for m, want in expected.items():
        a, b, c = Phi(m, P * m), Phi(1, Q), Phi(m, P * (-m))
        got = _polygon_forward(a, b, c)
        if got is None or got[0] != want or got[1] != {one * m: 1}:
            raise AssertionError(f"polygon rule self-test failed for m={m}")
        inv = _polygon_inverse(c.inv(), b.inv(), a.inv())
        if inv is None or inv[0] != [f.inv() for f in reversed(want)]:
            raise AssertionError(f"inverse polygon rule self-test failed for m={m}")
        # exchange form Phi(mP) Phi(Q) = Phi(Q) [middle] Phi(mP)
        conj = _polygon_conj(a, b, a.inv())
        if conj is None or conj[0] != want[:-1] or conj[1]:
            raise AssertionError(f"conjugation polygon rule self-test failed for m={m}")
        left = _polygon_conj_left(b.inv(), a, b)
        if left is None or left[0] != want[1:-1] + [a]:
            raise AssertionError(f"left conjugation polygon rule self-test failed for m={m}")


polygon_self_test()


# ---------------------------------------------------------------------------
# normalization
# ---------------------------------------------------------------------------


class _NullTrace(RewriteTrace):
    def add(self, *args, **kw):
        pass


class _State:
    """Mutable working copy: factors without shifts, a trailing shift, a phase."""

    def __init__(self, factors, g, phase, trace):
        self.factors = list(factors)
        self.g = g
        self.phase = dict(phase)
        self.trace = trace

    def word(self, n) -> OperatorWord:
        return OperatorWord(n, tuple(self.factors) + (Shift(self.g),), dict(self.phase))

    def key(self):
        return tuple(self.factors), tuple(sorted(self.phase.items())), self.g

    def copy(self) -> "_State":
        return _State(self.factors, self.g, self.phase, RewriteTrace(list(self.trace.steps)))

    def replace(self, rule, pos, length, new, phase=None):
        old = self.factors[pos:pos + length]
        self.factors[pos:pos + length] = new
        self.trace.add(rule, pos, old, new, phase)
        for s, e in (phase or {}).items():
            self.phase = _add_phase(self.phase, s, e)


def _push_shifts(w: OperatorWord, trace: RewriteTrace) -> _State:
    """R-shift-push every shift to the right end and R-shift-merge them.

    One trace step per elementary push or merge.  A trailing identity
    shift is appended first so that every later step has a shift to merge
    into.
    """
    facs = list(w.factors)
    ident = Shift(SpecialAffine.identity(w.n))
    trace.add("shift-identity", len(facs), [], [ident])
    facs.append(ident)
    while True:
        i = next((t for t, f in enumerate(facs[:-1]) if isinstance(f, Shift)), None)
        if i is None:
            break
        a, b = facs[i], facs[i + 1]
        if isinstance(b, Shift):
            new = [Shift(affine_compose(a.g, b.g))]
            trace.add("shift-merge", i, [a, b], new)
        else:
            new = [b.conj(lambda L: conjugate_linear_form(a.g, L)), a]
            trace.add("shift-push", i, [a, b], new)
        facs[i:i + 2] = new
    return _State(facs[:-1], facs[-1].g, w.phase, trace)


def _can_move(facs, src, dst) -> bool:
    """Factor at src can slide to dst past everything in between (bracket 0)."""
    f = facs[src]
    lo, hi = (dst, src) if dst < src else (src + 1, dst + 1)
    return all(_commutes(f, facs[t]) for t in range(lo, hi) if t != src)


def _slide(st: _State, src: int, dst: int) -> None:
    if src == dst:
        return
    lo, hi = min(src, dst), max(src, dst) + 1
    old = st.factors[lo:hi]
    f = st.factors.pop(src)
    st.factors.insert(dst, f)
    st.trace.add("commute", lo, old, st.factors[lo:hi])


def _gather(st: _State, idx: Sequence[int]) -> int | None:
    """Slide factors at sorted positions idx to be adjacent; returns the new start.

    Factors after the first are slid leftwards, one at a time, each past
    factors it commutes with.  Falls back to sliding earlier ones rightwards.
    """
    facs = st.factors
    # try: keep idx[0], slide the others left
    ok = True
    pos = idx[0]
    trial = list(facs)
    moves = []
    for t, src in enumerate(idx[1:], 1):
        dst = pos + t
        if not _can_move(trial, src, dst):
            ok = False
            break
        f = trial.pop(src)
        trial.insert(dst, f)
        moves.append((src, dst))
    if ok:
        for src, dst in moves:
            _slide(st, src, dst)
        return pos
    # try: keep idx[-1], slide the others right
    trial = list(facs)
    moves = []
    last = idx[-1]
    for t, src in enumerate(reversed(idx[:-1]), 1):
        dst = last - t
        if not _can_move(trial, src, dst):
            return None
        f = trial.pop(src)
        trial.insert(dst, f)
        moves.append((src, dst))
    for src, dst in moves:
        _slide(st, src, dst)
    return last - (len(idx) - 1)


def _gatherable(facs, idx) -> bool:
    st = _State(facs, None, {}, _NullTrace())
    return _gather(st, idx) is not None


def _candidates(facs, only_phi=True):
    """All (span, rule, idx, rhs, phase) instances reachable modulo commutation."""
    out = []
    n = len(facs)
    for i in range(n):
        for j in range(i + 1, n):
            for name, fn in PAIR_RULES:
                r = fn(facs[i], facs[j])
                if r is not None and _gatherable(facs, (i, j)):
                    out.append((j - i, name, (i, j), r[0], r[1]))
    for i in range(n):
        if not isinstance(facs[i], Phi):
            continue
        for j in range(i + 1, n):
            if not isinstance(facs[j], Phi):
                continue
            for k in range(j + 1, n):
                for name, fn in TRIPLE_RULES:
                    r = fn(facs[i], facs[j], facs[k])
                    if r is not None and _gatherable(facs, (i, j, k)):
                        out.append((k - i, name, (i, j, k), r[0], r[1]))
    out.sort(key=lambda c: (c[0], c[2]))
    return out


def _apply(st: _State, cand) -> None:
    _, name, idx, rhs, ph = cand
    start = _gather(st, idx)
    st.replace(name, start, len(idx), rhs, ph)


def _push_quads(st: _State) -> None:
    """R-quad-push each Quad right past the Phi factors that follow it.

    Quads collect in a tail segment after the last Phi.
    """
    while True:
        last_phi = max((t for t, f in enumerate(st.factors) if isinstance(f, Phi)), default=-1)
        qi = next((t for t in range(last_phi) if isinstance(st.factors[t], Quad)), None)
        if qi is None:
            return
        q = st.factors[qi]
        seg = st.factors[qi:last_phi + 1]
        moved = [f.conj(lambda M: quad_conjugate(q.arg, ScaledPlanck(q.scale), M, q.inverted))
                 for f in seg[1:]]
        st.replace("quad-push", qi, len(seg), moved + [q])


def _pair_quads(st: _State) -> bool:
    """R-quad-pair one pair of tail Quads into a shift, then push and merge it."""
    facs = st.factors
    for i, a in enumerate(facs):
        if not isinstance(a, Quad):
            continue
        for j in range(i + 1, len(facs)):
            b = facs[j]
            if not isinstance(b, Quad) or b.scale != a.scale or a.inverted == b.inverted:
                continue
            first, second = (a, b) if not a.inverted else (b, a)
            try:
                c = quad_pair_to_shift(first.arg, second.arg, ScaledPlanck(a.scale))
            except QuadPairError:
                continue
            if not _gatherable(facs, (i, j)):
                continue
            start = _gather(st, (i, j))
            if st.factors[start].inverted:
                # Quad^-1 Quad' = Quad' Quad^-1 when they commute; gathered pairs do
                if not _commutes(st.factors[start], st.factors[start + 1]):
                    continue
                _slide(st, start + 1, start)
            g = SpecialAffine(c.c, c.t)
            st.replace("quad-pair", start, 2, [Shift(g)])
            st.factors.pop(start)
            for t in range(start, len(st.factors)):
                f = st.factors[t]
                st.factors[t] = f.conj(lambda L: conjugate_linear_form(g, L))
                st.trace.add("shift-push", t, [Shift(g), f], [st.factors[t], Shift(g)])
            merged = affine_compose(g, st.g)
            st.trace.add("shift-merge", len(st.factors), [Shift(g), Shift(st.g)], [Shift(merged)])
            st.g = merged
            return True
    return False


def _partition(st: _State) -> None:
    """R-commute the word into bracket-connected blocks (stable order)."""
    facs = st.factors
    n = len(facs)
    comp = list(range(n))

    def find(x):
        while comp[x] != x:
            comp[x] = comp[comp[x]]
            x = comp[x]
        return x

    for i in range(n):
        for j in range(i + 1, n):
            if not _commutes(facs[i], facs[j]):
                comp[find(i)] = find(j)
    roots = []
    for i in range(n):
        r = find(i)
        if r not in roots:
            roots.append(r)
    new = [facs[i] for r in roots for i in range(n) if find(i) == r]
    if new != facs:
        st.replace("commute", 0, n, new)


def _greedy(st: _State, max_steps: int) -> bool:
    for _ in range(max_steps):
        _push_quads(st)
        phis = [f for f in st.factors if isinstance(f, Phi)]
        if not phis:
            while _pair_quads(st):
                pass
            # leftover inverse pairs of identical quads
            cands = [c for c in _candidates(st.factors) if c[1] == "cancel"]
            if cands:
                _apply(st, cands[0])
                continue
            return not st.factors
        cands = _candidates(st.factors)
        if not cands:
            return False
        _apply(st, cands[0])
    return False


def _bfs(start: _State, depth: int, max_nodes: int) -> _State | None:
    seen = {start.key()}
    queue = deque([(start, 0)])
    nodes = 0
    while queue:
        st, d = queue.popleft()
        trial = st.copy()
        if _greedy(trial, 64):
            return trial
        if d >= depth:
            continue
        for cand in _candidates(st.factors):
            nxt = st.copy()
            _apply(nxt, cand)
            _push_quads(nxt)
            k = nxt.key()
            if k in seen:
                continue
            seen.add(k)
            nodes += 1
            if nodes > max_nodes:
                return None
            queue.append((nxt, d + 1))
    return None


def normalize(w: OperatorWord, depth: int = 64, max_nodes: int = 5000) -> dict:
    """Reduce ``w`` to phase * Shift.

    Returns ``{"phase", "shift", "trace"}``; raises NormalizationError with
    the stuck word when neither the greedy schedule nor the bounded search
    eliminates every Phi and Quad factor.
    """
    trace = RewriteTrace()
    st = _push_shifts(w, trace)
    _partition(st)
    trial = st.copy()
    if _greedy(trial, 4 * len(st.factors) + 16):
        st = trial
    else:
        found = _bfs(st, depth, max_nodes)
        if found is None:
            raise NormalizationError(f"normalization stuck: {trial.word(w.n)}", trial.word(w.n))
        st = found
    return {"phase": st.phase, "shift": st.g, "trace": st.trace}


def replay_trace(w: OperatorWord, steps: Sequence[dict]) -> tuple[list[str], dict]:
    """Replay a trace on the printed form of ``w``.

    Returns the final factor strings and the phase ledger (scale strings to
    exponents).  Raises ValueError when a step does not match the word.
    """
    facs = [str(f) for f in w.factors]
    phase = {str(k): v for k, v in w.phase.items()}
    for t, st in enumerate(steps):
        pos, before = st["position"], st["before"]
        if facs[pos:pos + len(before)] != before:
            raise ValueError(f"trace step {t} ({st['rule']}) does not match the word")
        facs[pos:pos + len(before)] = st["after"]
        for k, e in st.get("phase", {}).items():
            phase[k] = phase.get(k, 0) + e
            if not phase[k]:
                del phase[k]
    return facs, phase


def certificate(s: Seed, r: RelationSpec, result: dict) -> dict:
    g = result["shift"]
    ok = not result["phase"] and g.is_identity()
    return {
        "relation": r.to_json(),
        "seed": s.to_json(),
        "verdict": "constant = 1" if ok else "nontrivial",
        "phase_exponents": {str(k): v for k, v in sorted(result["phase"].items())},
        "shift": g.to_json(),
        "trace": result["trace"].steps,
    }


def verify_phase_constant(s: Seed, r: RelationSpec) -> dict:
    """Certificate for the phase constant of relation ``r`` at seed ``s``.

    Raises NormalizationError (with the stuck word) if the word cannot be
    reduced; a failed reduction never produces a certificate.
    """
    return certificate(s, r, normalize(build_relation_word(s, r)))
