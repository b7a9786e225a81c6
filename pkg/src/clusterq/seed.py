"""Seeds: exchange matrices with skew-symmetrizers, their mutations,
permutations, Langlands duals, and the rank-2 relation sequences.

Public functions take 1-based indices; everything stored is 0-based.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from .exact import lcm

__all__ = [
    "SeedError",
    "ClosureError",
    "Seed",
    "DualSeed",
    "RelationSpec",
    "RelationSequence",
    "mutate_exchange",
    "permute_seed",
    "langlands_dual",
    "dual_mutate",
    "detect_relation",
    "relation_sequence",
    "load_seed",
    "canonical_seed",
    "CANONICAL_SEEDS",
    "RELATION_KINDS",
    "random_seed",
    "spectator_extend",
]


class SeedError(ValueError):
    """Invalid seed data; the message names the violated condition."""


class ClosureError(RuntimeError):
    """Relation closure failed at the exchange-matrix level."""


def _pos(x):
    return x if x > 0 else 0


@dataclass(frozen=True)
class Seed:
    epsilon: tuple
    d: tuple

    def __post_init__(self):
        eps = tuple(tuple(int(x) for x in row) for row in self.epsilon)
        d = tuple(self.d)
        object.__setattr__(self, "epsilon", eps)
        n = len(eps)
        if any(len(row) != n for row in eps):
            raise SeedError(f"epsilon must be square; got rows of lengths {[len(r) for r in eps]}")
        if len(d) != n:
            raise SeedError(f"d must have length n={n}; got {len(d)}")
        for i, x in enumerate(d):
            if isinstance(x, bool) or int(x) != x or x <= 0:
                raise SeedError(f"d[{i + 1}]={x!r} is not a positive integer")
        object.__setattr__(self, "d", tuple(int(x) for x in d))
        for i in range(n):
            for j in range(n):
                if Fraction(eps[i][j], self.d[j]) != -Fraction(eps[j][i], self.d[i]):
                    raise SeedError(
                        "not skew-symmetrizable: "
                        f"epsilon[{i + 1}][{j + 1}]/d[{j + 1}] = {Fraction(eps[i][j], self.d[j])} but "
                        f"-epsilon[{j + 1}][{i + 1}]/d[{i + 1}] = {-Fraction(eps[j][i], self.d[i])}"
                    )

    @property
    def n(self) -> int:
        return len(self.d)

    @property
    def N(self) -> int:
        """Smallest N >= 1 with eps_ij/d_j in (1/N)Z for all i, j."""
        return lcm(Fraction(self.epsilon[i][j], self.d[j]).denominator for i in range(self.n) for j in range(self.n))

    @property
    def root_order(self) -> int:
        """Order of the root u = q^(1/N) used for quantum coefficients: lcm(d).

        Every q_i = q^(1/d_i) is an integral power of u, and so is every
        q^(eps_ij/d_j); the minimal ``N`` need not have the first property.
        """
        return lcm(self.d)

    def eps_hat(self, i: int, j: int) -> Fraction:
        return Fraction(self.epsilon[i][j], self.d[j])

    def eps_tilde(self, i: int, j: int) -> int:
        return self.d[i] * self.epsilon[i][j]

    def to_json(self) -> dict:
        return {"n": self.n, "epsilon": [list(r) for r in self.epsilon], "d": list(self.d)}

    @classmethod
    def from_json(cls, data: dict) -> "Seed":
        for key in ("epsilon", "d"):
            if key not in data:
                raise SeedError(f"seed JSON is missing field {key!r}")
        seed = cls(tuple(tuple(r) for r in data["epsilon"]), tuple(data["d"]))
        if "n" in data and data["n"] != seed.n:
            raise SeedError(f"field n={data['n']} disagrees with matrix size {seed.n}")
        return seed

    def __str__(self):
        return json.dumps(self.to_json())


def _check_index(s: Seed, k: int) -> int:
    if not isinstance(k, int) or not 1 <= k <= s.n:
        raise IndexError(f"index {k} out of range 1..{s.n}")
    return k - 1


def _mutate_matrix(eps, k: int):
    n = len(eps)
    out = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            if i == k or j == k:
                out[i][j] = -eps[i][j]
            else:
                twice = abs(eps[i][k]) * eps[k][j] + eps[i][k] * abs(eps[k][j])
                out[i][j] = eps[i][j] + Fraction(twice, 2)
    return out


def mutate_exchange(s: Seed, k: int) -> Seed:
    """Mutation of the combinatorial data in direction ``k`` (1-based)."""
    k0 = _check_index(s, k)
    out = _mutate_matrix(s.epsilon, k0)
    res = Seed(tuple(tuple(int(x) for x in row) for row in out), s.d)
    assert res.N == s.N
    return res


def _check_perm(sigma: Sequence[int], n: int) -> tuple:
    sigma = tuple(sigma)
    if sorted(sigma) != list(range(1, n + 1)):
        raise ValueError(f"{list(sigma)} is not a permutation of 1..{n}")
    return tuple(x - 1 for x in sigma)


def permute_seed(s: Seed, sigma: Sequence[int]) -> Seed:
    """Seed automorphism: eps'[sigma(i)][sigma(j)] = eps[i][j].

    ``sigma`` lists (sigma(1), ..., sigma(n)) in 1-based form.
    """
    p = _check_perm(sigma, s.n)
    n = s.n
    eps = [[0] * n for _ in range(n)]
    d = [0] * n
    for i in range(n):
        d[p[i]] = s.d[i]
        for j in range(n):
            eps[p[i]][p[j]] = s.epsilon[i][j]
    return Seed(tuple(map(tuple, eps)), tuple(d))


@dataclass(frozen=True)
class DualSeed:
    """Langlands dual data; d_vee has rational entries 1/d_i."""

    epsilon_vee: tuple
    d_vee: tuple

    @property
    def n(self) -> int:
        return len(self.d_vee)

    def eps_hat(self, i: int, j: int) -> Fraction:
        return Fraction(self.epsilon_vee[i][j]) / self.d_vee[j]

    def dual(self) -> Seed:
        """Dual of the dual: recovers the original seed."""
        d = tuple(int(1 / x) for x in self.d_vee)
        eps = tuple(
            tuple(int(self.epsilon_vee[i][j] * self.d_vee[i] / self.d_vee[j]) for j in range(self.n))
            for i in range(self.n)
        )
        return Seed(eps, d)


def langlands_dual(s: Seed) -> DualSeed:
    n = s.n
    eps = []
    for i in range(n):
        row = []
        for j in range(n):
            v = Fraction(s.d[i] * s.epsilon[i][j], s.d[j])
            assert v == -s.epsilon[j][i], "dual characterisations disagree"
            row.append(int(v))
        eps.append(tuple(row))
    return DualSeed(tuple(eps), tuple(Fraction(1, x) for x in s.d))


def dual_mutate(ds: DualSeed, k: int) -> DualSeed:
    """Mutation of a dual seed; same matrix rule, d_vee unchanged."""
    if not 1 <= k <= ds.n:
        raise IndexError(f"index {k} out of range 1..{ds.n}")
    out = _mutate_matrix(ds.epsilon_vee, k - 1)
    return DualSeed(tuple(tuple(int(x) for x in r) for r in out), ds.d_vee)


# ---------------------------------------------------------------------------
# relations
# ---------------------------------------------------------------------------

RELATION_KINDS = ("A1", "A1xA1", "A2", "B2", "G2")
_KIND_BY_P = {0: "A1xA1", 1: "A2", 2: "B2", 3: "G2"}
_H = {"A1xA1": 2, "A2": 3, "B2": 4, "G2": 6}


@dataclass(frozen=True)
class RelationSpec:
    """One of the five consistency relations, anchored at indices i, j.

    ``lhs`` and ``rhs`` are the two mutation branches from the base seed;
    each is a list of steps ``("mu", k)`` or ``("perm", sigma)`` (1-based).
    The branches end at the same seed.  For A1 the right branch is empty.
    """

    kind: str
    i: int
    j: int | None = None

    def __post_init__(self):
        if self.kind not in RELATION_KINDS:
            raise ValueError(f"unknown relation kind {self.kind!r}; expected one of {RELATION_KINDS}")
        if self.kind != "A1" and (self.j is None or self.j == self.i):
            raise ValueError(f"relation {self.kind} needs two distinct indices")

    @property
    def h(self) -> int | None:
        return _H.get(self.kind)

    def branches(self, n: int) -> tuple[list, list]:
        i, j = self.i, self.j
        if self.kind == "A1":
            return [("mu", i), ("mu", i)], []
        if self.kind == "A1xA1":
            return [("mu", i), ("mu", j)], [("mu", j), ("mu", i)]
        if self.kind in ("A2", "B2"):
            lhs = [("mu", i), ("mu", j), ("mu", i)]
            if self.kind == "A2":
                sigma = list(range(1, n + 1))
                sigma[i - 1], sigma[j - 1] = j, i
                return lhs, [("mu", j), ("mu", i), ("perm", tuple(sigma))]
            return lhs, [("mu", j), ("mu", i), ("mu", j)]
        return [("mu", i), ("mu", j), ("mu", i), ("mu", j)], [("mu", j), ("mu", i), ("mu", j), ("mu", i)]

    @property
    def expected_length(self) -> int:
        """Number of distinct seeds Gamma(0), Gamma(1), ... along both branches."""
        return {"A1": 2, "A1xA1": 4, "A2": 6, "B2": 6, "G2": 8}[self.kind]

    def to_json(self) -> dict:
        return {"kind": self.kind, "i": self.i, "j": self.j}


def detect_relation(s: Seed, i: int, j: int) -> RelationSpec | None:
    """Classify the pair (i, j): eps_ij = -p eps_ji with |eps_ij| = p."""
    i0, j0 = _check_index(s, i), _check_index(s, j)
    if i0 == j0:
        raise ValueError("detect_relation needs i != j")
    a, b = s.epsilon[i0][j0], s.epsilon[j0][i0]
    p = abs(a)
    if p in _KIND_BY_P and a == -p * b:
        return RelationSpec(_KIND_BY_P[p], i, j)
    return None


def apply_step(s: Seed, step) -> Seed:
    kind, arg = step
    if kind == "mu":
        return mutate_exchange(s, arg)
    if kind == "perm":
        return permute_seed(s, arg)
    raise ValueError(f"unknown step {step!r}")


@dataclass
class RelationSequence:
    """Seeds along both branches.

    ``seeds`` follows the numbering Gamma(0), Gamma(1), ...: the left
    branch first, then the intermediate seeds of the right branch.  The
    final step of the right branch is the closure step, which must land
    on the last seed of the left branch.
    """

    spec: RelationSpec
    seeds: list
    lhs_path: list
    rhs_path: list
    closure: str
    closed: bool = True
    signs: list = field(default_factory=list)


def relation_sequence(s: Seed, r: RelationSpec) -> RelationSequence:
    lhs, rhs = r.branches(s.n)
    if r.kind != "A1" and detect_relation(s, r.i, r.j) != r:
        raise ClosureError(f"seed does not satisfy the {r.kind} hypothesis at ({r.i}, {r.j})")
    lhs_path = [s]
    for st in lhs:
        lhs_path.append(apply_step(lhs_path[-1], st))
    rhs_path = [s]
    for st in rhs:
        rhs_path.append(apply_step(rhs_path[-1], st))
    if r.kind == "A1":
        target, end = s, lhs_path[-1]
        seeds = lhs_path[:2]
        closure = f"mu_{r.i}(mu_{r.i}(Gamma)) = Gamma"
    else:
        target, end = lhs_path[-1], rhs_path[-1]
        seeds = lhs_path + rhs_path[1:-1]
        last = rhs[-1]
        name = f"P_({r.i} {r.j})" if last[0] == "perm" else f"mu_{last[1]}"
        closure = f"Gamma({len(lhs)}) = {name}(Gamma({len(seeds) - 1}))"
    if end != target:
        raise ClosureError(f"{r.kind} closure failed: {closure}")
    if r.kind != "A1":
        i0, j0 = r.i - 1, r.j - 1
        signs = [g.epsilon[i0][j0] for g in seeds]
    else:
        signs = []
    assert len(seeds) == r.expected_length
    assert all(g.N == s.N for g in seeds)
    return RelationSequence(r, seeds, lhs_path, rhs_path, closure, True, signs)


# ---------------------------------------------------------------------------
# bundled seeds and file loading
# ---------------------------------------------------------------------------

CANONICAL_SEEDS = ("a1", "a1xa1", "a2", "b2", "g2")
_DATA = Path(__file__).with_name("data")


def canonical_seed(name: str) -> Seed:
    name = name.lower()
    if name not in CANONICAL_SEEDS:
        raise KeyError(f"no bundled seed {name!r}")
    return load_seed(_DATA / f"{name}.json")


def load_seed(path) -> Seed:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise SeedError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(data, dict):
        raise SeedError(f"{path}: seed file must hold a JSON object")
    try:
        return Seed.from_json(data)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, SeedError):
            raise
        raise SeedError(f"{path}: malformed seed ({exc})") from exc


# ---------------------------------------------------------------------------
# random seeds
# ---------------------------------------------------------------------------


def random_seed(rng, n: int, max_entry: int = 2, d_choices: Sequence[int] = (1, 2, 3)) -> Seed:
    """eps_ij = a_ij d_j, eps_ji = -a_ij d_i with a_ij uniform in [-max_entry, max_entry]."""
    d = [rng.choice(list(d_choices)) for _ in range(n)]
    eps = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            a = rng.randint(-max_entry, max_entry)
            eps[i][j] = a * d[j]
            eps[j][i] = -a * d[i]
    return Seed(eps, d)


def spectator_extend(base: Seed, rng, entries: int = 2, d_choices: Sequence[int] = (1, 2, 3, 6)) -> Seed:
    """Append one index to ``base``; the new row and column get random
    entries in [-entries, entries], resampled until skew-symmetrizable."""
    n = base.n
    for _ in range(10000):
        d = list(base.d) + [rng.choice(list(d_choices))]
        col = [rng.randint(-entries, entries) for _ in range(n)]
        row = [rng.randint(-entries, entries) for _ in range(n)]
        eps = [list(base.epsilon[i]) + [col[i]] for i in range(n)] + [row + [0]]
        try:
            return Seed(eps, d)
        except SeedError:
            continue
    raise RuntimeError("could not sample a skew-symmetrizable extension")
