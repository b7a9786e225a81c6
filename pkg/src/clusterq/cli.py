"""Command line entry point.

    clusterq seed mutate --file s.json --k 1 --k 2
    clusterq verify --layer operator --relation A2 --file a2.json
    clusterq verify-all --jobs 4 --format csv
    clusterq dilog check --hbar 0.7 --tol 1e-8
    clusterq dilog eval --hbar 1.3 --z 0

Exit codes: 0 success, 1 a check failed, 2 malformed seed, 3 relation not
applicable to the seed.  The default truncation order is read from
CLUSTERQ_ORDER (6 if unset); --order always wins.
"""
from __future__ import annotations

import csv
import io
import json
import math
import random
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path

import click

from . import classical, dilog, heisenberg, qtorus, rewriter
from .seed import (
    CANONICAL_SEEDS,
    RELATION_KINDS,
    RelationSpec,
    Seed,
    SeedError,
    apply_step,
    canonical_seed,
    detect_relation,
    load_seed,
    random_seed,
    spectator_extend,
)

EXIT_FAIL, EXIT_SEED, EXIT_RELATION = 1, 2, 3
_CANONICAL_BY_KIND = {"A1": "a1", "A1xA1": "a1xa1", "A2": "a2", "B2": "b2", "G2": "g2"}


class RelationNotApplicable(ValueError):
    pass


def _load(file: str | None, name: str | None, relation: str | None = None) -> Seed:
    try:
        if file:
            return load_seed(file)
        if name:
            return canonical_seed(name)
        if relation:
            return canonical_seed(_CANONICAL_BY_KIND[relation])
    except SeedError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_SEED)
    except (KeyError, FileNotFoundError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_SEED)
    click.echo("error: give --file or --seed", err=True)
    sys.exit(EXIT_SEED)


def resolve_relation(s: Seed, kind: str, i: int | None, j: int | None) -> RelationSpec:
    """The relation of ``kind`` at (i, j), searching all pairs when unset."""
    if kind == "A1":
        k = i or 1
        if not 1 <= k <= s.n:
            raise RelationNotApplicable(f"index {k} out of range for n={s.n}")
        return RelationSpec("A1", k)
    pairs = [(i, j)] if i and j else [(a, b) for a in range(1, s.n + 1) for b in range(1, s.n + 1) if a != b]
    for a, b in pairs:
        if not (1 <= a <= s.n and 1 <= b <= s.n) or a == b:
            raise RelationNotApplicable(f"bad index pair ({a}, {b}) for n={s.n}")
        r = detect_relation(s, a, b)
        if r is not None and r.kind == kind:
            return r
    where = f"at ({i}, {j})" if i and j else "at any index pair"
    raise RelationNotApplicable(f"relation {kind} does not apply to this seed {where}")


# ---------------------------------------------------------------------------
# single verifications
# ---------------------------------------------------------------------------


def classical_word(s: Seed, r: RelationSpec):
    if r.kind == "A1":
        return [("mu", r.i), ("mu", r.i)]
    return classical.polygon_word(r.i, r.j, s.n, r.h)


def verify_layer(layer: str, s: Seed, r: RelationSpec, order: int) -> tuple[bool, dict]:
    if layer == "operator":
        try:
            cert = rewriter.verify_phase_constant(s, r)
        except rewriter.NormalizationError as exc:
            return False, {"relation": r.to_json(), "seed": s.to_json(), "verdict": "normalization failed",
                           "error": str(exc)}
        return cert["verdict"] == "constant = 1", cert
    if layer == "classical":
        word = classical_word(s, r)
        reports = {kind: classical.verify_trivial(s, word, kind) for kind in ("A", "X", "D")}
        ok = all(rep["is_trivial"] for rep in reports.values())
        return ok, {"relation": r.to_json(), "seed": s.to_json(),
                    "word": classical.TransformationWord(word).to_json(),
                    "verdict": "identity" if ok else "nontrivial", "kinds": reports}
    if layer == "quantum":
        rep = qtorus.verify_quantum_relation(s, r, order)
        rep["seed"] = s.to_json()
        rep["verdict"] = "identity" if rep["identity"] else "nontrivial"
        return rep["identity"], rep
    raise click.BadParameter(f"unknown layer {layer}")


# ---------------------------------------------------------------------------
# acceptance suite
# ---------------------------------------------------------------------------


def _operator_ok(s: Seed, r: RelationSpec) -> bool:
    try:
        return rewriter.verify_phase_constant(s, r)["verdict"] == "constant = 1"
    except rewriter.NormalizationError:
        return False


def criterion_1(seed: int = 1) -> tuple[bool, str]:
    rng = random.Random(seed)
    fails, worst, count = [], 0.0, 0
    for kind, name in _CANONICAL_BY_KIND.items():
        base = canonical_seed(name)
        cases = [base]
        for _ in range(10):
            cases.append(random_seed(rng, 3) if kind == "A1" else spectator_extend(base, rng))
        for s in cases:
            r = RelationSpec("A1", 1) if kind == "A1" else detect_relation(s, 1, 2)
            t = time.perf_counter()
            ok = r is not None and r.kind == kind and _operator_ok(s, r)
            worst = max(worst, time.perf_counter() - t)
            count += 1
            if not ok:
                fails.append(f"{kind}:{s.epsilon}")
    ok = not fails and worst < 1.0
    return ok, f"{count} instances, slowest {worst:.3f}s" + (f", failures {fails[:3]}" if fails else "")


def criterion_2(seed: int = 2) -> tuple[bool, str]:
    rng = random.Random(seed)
    t = time.perf_counter()
    fails, words = [], 0
    for _ in range(50):
        s = random_seed(rng, rng.randint(1, 5))
        for k in range(1, s.n + 1):
            words += 1
            if not _operator_ok(s, RelationSpec("A1", k)):
                fails.append((s.epsilon, k))
    dt = time.perf_counter() - t
    return not fails and dt < 10, f"{words} twice-flip words in {dt:.2f}s, {len(fails)} failures"


def criterion_3(seed: int = 3) -> tuple[bool, str]:
    rng = random.Random(seed)
    t = time.perf_counter()
    fails, checks = [], 0
    for _ in range(100):
        s = random_seed(rng, rng.randint(1, 4))
        for k in range(1, s.n + 1):
            for kind in ("A", "X", "D"):
                checks += 1
                if not classical.verify_trivial(s, [("mu", k), ("mu", k)], kind)["is_trivial"]:
                    fails.append((s.epsilon, k, kind))
    for name in ("a1xa1", "a2", "b2", "g2"):
        s = canonical_seed(name)
        r = detect_relation(s, 1, 2)
        for kind in ("A", "X", "D"):
            checks += 1
            if not classical.verify_trivial(s, classical.polygon_word(1, 2, 2, r.h), kind)["is_trivial"]:
                fails.append((name, kind))
    dt = time.perf_counter() - t
    return not fails and dt < 30, f"{checks} checks in {dt:.2f}s, {len(fails)} failures"


def criterion_4(seed: int = 4) -> tuple[bool, str]:
    rng = random.Random(seed)
    fails = []
    for _ in range(50):
        s = random_seed(rng, rng.randint(1, 4))
        k = rng.randint(1, s.n)
        for kind in ("X", "D"):
            if not classical.verify_poisson_preserved(s, k, kind):
                fails.append((s.epsilon, k, kind))
    return not fails, f"50 (seed, k) pairs x 2 kinds, {len(fails)} failures"


def criterion_5() -> tuple[bool, str]:
    t = time.perf_counter()
    plan = [("pentagon", 8), ("split2", 8), ("split3", 8), ("hexagon", 6), ("octagon", 6)]
    res = {f"{w}@{o}": qtorus.verify_compact_identity(w, o) for w, o in plan}
    dt = time.perf_counter() - t
    return all(res.values()) and dt < 60, f"{res} in {dt:.2f}s"


def criterion_6(order: int = 6) -> tuple[bool, str]:
    res = {}
    for kind, name in _CANONICAL_BY_KIND.items():
        s = canonical_seed(name)
        r = RelationSpec("A1", 1) if kind == "A1" else detect_relation(s, 1, 2)
        res[kind] = qtorus.verify_quantum_relation(s, r, order)["identity"]
    lim = {}
    for name in ("a2", "b2", "g2"):
        s = canonical_seed(name)
        for k in (1, 2):
            lim[f"{name}/{k}"] = all(qtorus.classical_limit_check(s, k, order).values())
    return all(res.values()) and all(lim.values()), f"relations {res}; q->1 {lim}"


def criterion_7() -> tuple[bool, str]:
    s = canonical_seed("a2")
    old = [heisenberg.kprime_conjugation_check(s, k, "old") for k in (1, 2)]
    new = [heisenberg.kprime_conjugation_check(s, k, "new") for k in (1, 2)]
    old_ok = all(r["holds"] for r in old)
    mism = [m for r in new for m in r["mismatches"]]
    new_fails = bool(mism) and all(m["difference"] != "0" for m in mism)
    first = f"{mism[0]['family']}{mism[0]['index']}: {mism[0]['difference']}" if mism else "none"
    return old_ok and new_fails, f"old holds={old_ok}; new mismatches={len(mism)} (first {first})"


def criterion_8() -> tuple[bool, str]:
    t = time.perf_counter()
    bad = []
    for hb in (0.7, 1.3, math.sqrt(2)):
        for row in dilog.run_identity_suite(dilog.DilogParams(hb), sample_count=20, unitarity_count=100):
            if not row["passed"]:
                bad.append(f"h={hb:.4g} {row['identity']} {row['max_residual']}")
    dt = time.perf_counter() - t
    return not bad and dt < 60, f"3 values of hbar in {dt:.2f}s" + (f"; failing {bad}" if bad else "")


CRITERIA = {
    1: ("phase constants (operator layer)", criterion_1),
    2: ("rank-1 robustness", criterion_2),
    3: ("classical trivial transformations", criterion_3),
    4: ("Poisson compatibility", criterion_4),
    5: ("compact-dilogarithm identities", criterion_5),
    6: ("quantum mutation consistency", criterion_6),
    7: ("representation discrepancy", criterion_7),
    8: ("dilogarithm numerics", criterion_8),
}


def run_criterion(num: int) -> dict:
    name, fn = CRITERIA[num]
    t = time.perf_counter()
    try:
        ok, detail = fn()
    except Exception as exc:  # a crash is a failure, reported as such
        ok, detail = False, f"{type(exc).__name__}: {exc}"
    return {"criterion": num, "name": name, "passed": bool(ok), "detail": detail,
            "seconds": round(time.perf_counter() - t, 3)}


# ---------------------------------------------------------------------------
# output helpers
# ---------------------------------------------------------------------------


def _emit_rows(rows: list[dict], fmt: str, out: str | None) -> None:
    if fmt == "json":
        text = json.dumps(rows, indent=2, default=str)
    else:
        buf = io.StringIO()
        keys = list(dict.fromkeys(k for r in rows for k in r))
        w = csv.DictWriter(buf, fieldnames=keys)
        w.writeheader()
        w.writerows(rows)
        text = buf.getvalue()
    if out:
        Path(out).write_text(text)
    else:
        click.echo(text)


def _emit_json(obj, out: str | None) -> None:
    text = json.dumps(obj, indent=2, default=str)
    if out:
        Path(out).write_text(text)
    else:
        click.echo(text)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

_order_opt = click.option("--order", type=click.IntRange(1), default=6, show_default=True,
                          envvar="CLUSTERQ_ORDER", help="truncation order (env CLUSTERQ_ORDER)")


@click.group()
@click.version_option(package_name="artifact")
def main():
    """Exact checks of cluster mutation relations and quantum dilogarithm identities."""


@main.group()
def seed():
    """Seed utilities."""


@seed.command("mutate")
@click.option("--file", "file", type=click.Path(dir_okay=False), help="seed JSON file")
@click.option("--seed", "name", type=click.Choice(CANONICAL_SEEDS), help="bundled seed")
@click.option("--k", "ks", type=int, multiple=True, required=True, help="direction, repeatable")
@click.option("--out", type=click.Path(dir_okay=False))
def seed_mutate(file, name, ks, out):
    """Mutate in the given directions, left to right."""
    s = _load(file, name)
    for k in ks:
        if not 1 <= k <= s.n:
            click.echo(f"error: direction {k} out of range 1..{s.n}", err=True)
            sys.exit(EXIT_SEED)
        s = apply_step(s, ("mu", k))
    _emit_json(s.to_json(), out)


@main.command()
@click.option("--layer", type=click.Choice(["classical", "quantum", "operator"]), required=True)
@click.option("--relation", type=click.Choice(RELATION_KINDS), required=True)
@click.option("--file", "file", type=click.Path(dir_okay=False), help="seed JSON file")
@click.option("--seed", "name", type=click.Choice(CANONICAL_SEEDS), help="bundled seed")
@click.option("--i", "i", type=int, help="first index (1-based)")
@click.option("--j", "j", type=int, help="second index (1-based)")
@_order_opt
@click.option("--out", type=click.Path(dir_okay=False), help="write the report/certificate here")
def verify(layer, relation, file, name, i, j, order, out):
    """Verify one relation at one layer; exit 0 iff it holds."""
    s = _load(file, name, relation)
    try:
        r = resolve_relation(s, relation, i, j)
    except RelationNotApplicable as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_RELATION)
    ok, report = verify_layer(layer, s, r, order)
    _emit_json(report, out)
    click.echo(f"{layer} {relation}: {report.get('verdict')}", err=True)
    sys.exit(0 if ok else EXIT_FAIL)


@main.command("verify-all")
@click.option("--jobs", type=click.IntRange(1), default=1, show_default=True, help="parallel workers")
@click.option("--only", type=click.IntRange(1, 8), multiple=True, help="criterion number, repeatable")
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json", show_default=True)
@click.option("--out", type=click.Path(dir_okay=False))
def verify_all(jobs, only, fmt, out):
    """Run every acceptance criterion (or the --only subset)."""
    nums = sorted(set(only)) or sorted(CRITERIA)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            rows = list(ex.map(run_criterion, nums))
    else:
        rows = [run_criterion(n) for n in nums]
    for row in rows:
        click.echo(f"[{'PASS' if row['passed'] else 'FAIL'}] {row['criterion']}. {row['name']}: {row['detail']}",
                   err=True)
    _emit_rows(rows, fmt, out)
    sys.exit(0 if all(r["passed"] for r in rows) else EXIT_FAIL)


@main.group("dilog")
def dilog_group():
    """Numerical quantum dilogarithms."""


@dilog_group.command("check")
@click.option("--hbar", type=float, required=True)
@click.option("--tol", type=float, default=None, help="one tolerance for every identity")
@click.option("--samples", type=click.IntRange(1), default=20, show_default=True)
@click.option("--seed", "rng_seed", type=int, default=0, show_default=True)
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="csv", show_default=True)
@click.option("--out", type=click.Path(dir_okay=False))
def dilog_check(hbar, tol, samples, rng_seed, fmt, out):
    """Residual table for the functional identities at real hbar."""
    if tol is not None and tol <= 0:
        raise click.BadParameter("tolerance must be positive", param_hint="--tol")
    try:
        p = dilog.DilogParams(hbar)
    except ValueError as exc:
        raise click.BadParameter(str(exc), param_hint="--hbar")
    if _looks_rational(hbar):
        click.echo(f"note: hbar={hbar} is rational; poles and zeros of Phi are not simple", err=True)
    rows = dilog.run_identity_suite(p, sample_count=samples, tol=tol, seed=rng_seed)
    _emit_rows(rows, fmt, out)
    sys.exit(0 if all(r["passed"] for r in rows) else EXIT_FAIL)


def _looks_rational(x: float, max_den: int = 12) -> bool:
    """True when x is (to double precision) a fraction with small denominator."""
    f = Fraction(x).limit_denominator(max_den)
    return abs(float(f) - x) < 1e-12


@dilog_group.command("eval")
@click.option("--hbar", type=str, required=True, help="real or complex, e.g. 1.3 or 0.8+0.3j")
@click.option("--z", type=str, required=True, help="complex, e.g. 0.5-1j")
def dilog_eval(hbar, z):
    """Print Phi^hbar(z)."""
    try:
        p = dilog.DilogParams(complex(hbar))
        val = dilog.phi_eval(complex(z), p)
    except (ValueError, dilog.QuadratureError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_FAIL)
    click.echo(json.dumps({"hbar": str(p.h), "z": str(complex(z)), "real": val.real, "imag": val.imag}))


if __name__ == "__main__":
    main()
