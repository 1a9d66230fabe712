"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Runs are cached per (benchmark, mode) with invariant checking switched on,
so the verdict, count, invariant and fixed-point criteria share the same
explorations.  Timing checks use fresh runs without checks.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass
from functools import lru_cache

import pytest

from pdta import zones
from pdta.benchmarks import generate
from pdta.engine import EngineConfig, InvariantViolation, pdta_reach, verify_fixed_point
from pdta.model import parse_model
from pdta.regions import region_reach
from pdta.zones import bound_add, elapse, includes, intersect_guard, le, lu_le, reset, successor

import _oracle as oracle

MODES = ("sim", "equiv", "region")


@dataclass(frozen=True)
class Outcome:
    nonempty: bool
    reachable: frozenset
    pairs: int
    fixed_point: bool
    violation: str | None = None


@lru_cache(maxsize=None)
def model(name, params=()):
    return parse_model(generate(name, params))


def _reach(m, cfg):
    return region_reach(m, cfg) if cfg.mode == "region" else pdta_reach(m, cfg)


@lru_cache(maxsize=None)
def checked(name, params, mode) -> Outcome:
    """lifo run with invariant checks and a fixed-point verification."""
    m = model(name, params)
    cfg = EngineConfig(mode=mode, check_invariants=True)
    try:
        res = _reach(m, cfg)
    except InvariantViolation as e:
        return Outcome(False, frozenset(), -1, False, str(e))
    ok = verify_fixed_point(m, res.tlm, cfg, res.domain)
    return Outcome(res.nonempty, frozenset(res.reachable), res.stats.pairs_added, ok)


def plain(name, params, mode, order="lifo"):
    return _reach(model(name, params), EngineConfig(mode=mode, order=order))


def label(name, params):
    return f"{name}({','.join(map(str, params))})" if params else name


# instance -> (state whose reachability is the verdict, or None for "any final", expected)
VERDICTS = {
    ("B1", ()): (None, True),
    ("B2", (5,)): (None, False),
    ("B2", (10,)): (None, False),
    ("B2", (100,)): (None, False),
    ("B3", (4, 3)): ("s1", False),
    ("B3", (3, 4)): ("s1", True),
    ("B4", ()): (None, False),
    ("B5", (4, 2)): ("q1", True),
    ("B5", (100, 10)): ("q1", True),
    ("B6", (4, 5, 100)): ("q5", True),
    ("B6", (5, 4, 100)): ("q5", False),
    ("B7", ()): (None, False),
    ("B8", ()): (None, True),
    ("B9", (10, 10)): (None, True),
    ("B10", ()): (None, True),
}

# region exploration of B2(100) does not finish on desk hardware
OUT_OF_REACH = {("B2", (100,), "region")}


def runs_of_criterion_1():
    for (name, params) in VERDICTS:
        for mode in MODES:
            if (name, params, mode) not in OUT_OF_REACH:
                yield name, params, mode


def verdict_of(out: Outcome, state):
    return out.nonempty if state is None else state in out.reachable


# --- 1: emptiness verdicts -------------------------------------------------------


def test_criterion_1_verdicts(verdict):
    wrong = []
    n = 0
    for name, params, mode in runs_of_criterion_1():
        state, expected = VERDICTS[(name, params)]
        out = checked(name, params, mode)
        n += 1
        if out.violation or verdict_of(out, state) is not expected:
            wrong.append(f"{label(name, params)}/{mode}")
    verdict(1, not wrong, f"{n - len(wrong)}/{n} verdicts correct" + (f", wrong: {wrong}" if wrong else ""))
    assert not wrong


@pytest.mark.xfail(strict=True, reason="region exploration of B2(100) does not terminate within the budget")
def test_criterion_1_region_b2_100(verdict):
    budget = 30.0
    res = region_reach(model("B2", (100,)), EngineConfig(mode="region", timeout=budget))
    done = not res.timed_out and not res.nonempty
    partial = f"region B2(100): {'empty' if done else 'no verdict'} after {res.stats.pairs_added} pairs"
    verdict(1, done, partial + f" ({budget:.0f} s budget)")
    verdict(7, done, partial + ", region set unavailable for agreement")
    assert done


# --- 2: node counts in sim mode ---------------------------------------------------

COUNTS = [
    ("B1", (), 17), ("B2", (5,), 27), ("B2", (10,), 77), ("B2", (100,), 5252),
    ("B3", (4, 3), 6), ("B3", (3, 4), 9), ("B4", (), 8), ("B5", (100, 10), 202),
    ("B5", (1000, 100), 2002), ("B6", (5, 4, 1000), 30), ("B7", (), 4475), ("B8", (), 8),
    ("B9", (10, 10), 81), ("B10", (), 150),
]


def test_criterion_2_node_counts(verdict):
    exact, off = 0, []
    for name, params, target in COUNTS:
        got = checked(name, params, "sim").pairs
        if got == target:
            exact += 1
        elif abs(got - target) > 0.1 * target:
            off.append(f"{label(name, params)}={got} (want {target})")
    verdict(2, not off, f"{exact}/{len(COUNTS)} exact" + (f", outside 10%: {off}" if off else ""))
    assert not off


# --- 3: pruning strength -----------------------------------------------------------

STRICT = [("B5", (100, 10)), ("B6", (5, 4, 1000)), ("B9", (10, 10)), ("B10", ())]
EQUAL = [("B1", ()), ("B2", (10,)), ("B4", ()), ("B7", ()), ("B8", ())]


def test_criterion_3_separation(verdict):
    bad, shown = [], []
    for name, params in STRICT:
        s, e = checked(name, params, "sim").pairs, checked(name, params, "equiv").pairs
        shown.append(f"{label(name, params)} {e}>{s}")
        if not e > s:
            bad.append(label(name, params))
    for name, params in EQUAL:
        if checked(name, params, "sim").pairs != checked(name, params, "equiv").pairs:
            bad.append(label(name, params))
    verdict(3, not bad, "; ".join(shown) + f"; equal on {len(EQUAL)}" + (f"; failing: {bad}" if bad else ""))
    assert not bad


# --- 4: unsound naive pruning ------------------------------------------------------


def test_criterion_4_naive_unsound(verdict):
    naive = pdta_reach(model("FIG3"), EngineConfig(mode="naive"))
    sound = {mode: "q3" in checked("FIG3", (), mode).reachable for mode in MODES}
    ok = "q3" in naive.reachable and not any(sound.values())
    verdict(4, ok, f"naive reaches q3: {'q3' in naive.reachable}; sound modes reaching q3: "
                   f"{[m for m, v in sound.items() if v]}")
    assert ok


# --- 5: property suites ------------------------------------------------------------

CASES = 10_000


def _canonical(z) -> bool:
    if z.is_empty:
        return True
    n = z.dim + 1
    m = z.m
    for i in range(n):
        if m[i * n + i] != le(0) or m[i] > le(0):
            return False
        for j in range(n):
            mij = m[i * n + j]
            for k in range(n):
                if mij > bound_add(m[i * n + k], m[k * n + j]):
                    return False
    return True


def _dim(rng):
    return rng.choice((1, 1, 2, 2, 3))


def suite_canonical(rng):
    dim = _dim(rng)
    z = oracle.random_zone(rng, dim, 4)
    return all(_canonical(out) for out in (
        elapse(z),
        reset(z, oracle.random_resets(rng, dim)),
        intersect_guard(z, oracle.random_guard(rng, dim, 4)),
        successor(z, oracle.random_guard(rng, dim, 4), oracle.random_resets(rng, dim)),
    ))


def suite_preorder(rng):
    dim = _dim(rng)
    lu = oracle.random_lu(rng, dim, 4)
    a = oracle.random_zone(rng, dim, 4)
    b = intersect_guard(a, oracle.random_guard(rng, dim, 4)) if rng.random() < 0.5 else oracle.random_zone(rng, dim, 4)
    c = oracle.random_zone(rng, dim, 4)
    if not lu_le(a, a, lu):
        return False
    # orient the triple so that the transitivity premise holds often
    if lu_le(b, a, lu) and lu_le(c, b, lu) and not lu_le(c, a, lu):
        return False
    return not (lu_le(a, b, lu) and lu_le(b, c, lu) and not lu_le(a, c, lu))


def suite_inclusion(rng):
    dim = _dim(rng)
    lu = oracle.random_lu(rng, dim, 4)
    big = oracle.random_zone(rng, dim, 4)
    small = intersect_guard(big, oracle.random_guard(rng, dim, 4)) if rng.random() < 0.7 else oracle.random_zone(rng, dim, 4)
    return not includes(big, small) or lu_le(small, big, lu)


def suite_transfer(rng):
    dim = _dim(rng)
    lu = oracle.random_lu(rng, dim, 4)
    z2 = oracle.random_zone(rng, dim, 4)
    z1 = intersect_guard(z2, oracle.random_guard(rng, dim, 4)) if rng.random() < 0.5 else oracle.random_zone(rng, dim, 4)
    if z1.is_empty or not lu_le(z1, z2, lu):
        return True
    g, r = oracle.random_guard(rng, dim, 4, lu), oracle.random_resets(rng, dim)
    s1, s2 = successor(z1, g, r), successor(z2, g, r)
    return (s1.is_empty or not s2.is_empty) and lu_le(s1, s2, lu)


def suite_region_oracle(rng):
    dim = _dim(rng)
    # the oracle enumerates every region, so three-clock cases mostly use smaller maxima
    cap = 4 if dim < 3 else rng.choice((2, 2, 3, 4))
    lu = oracle.random_lu(rng, dim, cap)
    z2 = oracle.random_zone(rng, dim, 4)
    z1 = oracle.random_zone(rng, dim, 4) if rng.random() < 0.6 else intersect_guard(z2, oracle.random_guard(rng, dim, 4))
    return lu_le(z1, z2, lu) == oracle.lu_le_oracle(z1, z2, lu)


SUITES = [
    ("canonical form", suite_canonical),
    ("lu_le reflexive/transitive", suite_preorder),
    ("includes implies lu_le", suite_inclusion),
    ("successor transfer", suite_transfer),
    ("lu_le vs region oracle", suite_region_oracle),
]


def test_criterion_5_properties(verdict):
    results = []
    for seed, (name, suite) in enumerate(SUITES):
        rng = random.Random(1000 + seed)
        bad = sum(not suite(rng) for _ in range(CASES))
        results.append((name, bad))
    ok = all(bad == 0 for _, bad in results)
    verdict(5, ok, f"{CASES} cases each, failures: " + ", ".join(f"{n}={b}" for n, b in results))
    assert ok


# --- 6: invariants and fixed point -------------------------------------------------

EXTRA_RUNS = [
    ("FIG1", (), "sim"), ("FIG1", (), "equiv"), ("FIG1", (), "region"),
    ("B5", (1000, 100), "sim"), ("B6", (5, 4, 1000), "sim"), ("B6", (5, 4, 1000), "equiv"),
]


def test_criterion_6_fixed_point(verdict):
    runs = list(runs_of_criterion_1()) + [("FIG3", (), m) for m in MODES] + EXTRA_RUNS
    bad = []
    for name, params, mode in runs:
        out = checked(name, params, mode)
        if out.violation or not out.fixed_point:
            bad.append(f"{label(name, params)}/{mode}: {out.violation or 'not a fixed point'}")
    verdict(6, not bad, f"{len(runs) - len(bad)}/{len(runs)} runs clean" + (f", failing: {bad}" if bad else ""))
    assert not bad


# --- 7: agreement across modes and orders ------------------------------------------


def test_criterion_7_agreement(verdict):
    bad = []
    n = 0
    for name, params in VERDICTS:
        sets = {}
        for mode in MODES:
            if (name, params, mode) in OUT_OF_REACH:
                continue
            sets[(mode, "lifo")] = checked(name, params, mode).reachable
            sets[(mode, "fifo")] = frozenset(plain(name, params, mode, "fifo").reachable)
        n += len(sets)
        if len(set(sets.values())) != 1:
            bad.append(label(name, params))
    verdict(7, not bad, f"{n} runs over {len(VERDICTS)} instances agree" + (f"; disagree: {bad}" if bad else ""))
    assert not bad


# --- 8: performance -----------------------------------------------------------------


def _time(name, params, mode, repeat=1):
    best = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        plain(name, params, mode)
        dt = time.perf_counter() - t0
        best = dt if best is None else min(best, dt)
    return best


def test_criterion_8_performance(verdict):
    notes, ok = [], True
    for name, params in (("B5", (5000, 100)), ("B2", (1000,))):
        dt = _time(name, params, "sim")
        ok &= dt < 60
        notes.append(f"{label(name, params)} sim {dt:.1f}s")
    instances = list(VERDICTS) + [("B6", (5, 4, 1000))]
    wide = 0
    for name, params in instances:
        s, e = checked(name, params, "sim").pairs, checked(name, params, "equiv").pairs
        if e < 10 * s:
            continue
        wide += 1
        ts, te = _time(name, params, "sim", 3), _time(name, params, "equiv", 3)
        if ts > 2 * te:
            ok = False
            notes.append(f"{label(name, params)} sim {ts * 1e3:.1f}ms vs equiv {te * 1e3:.1f}ms")
    notes.append(f"sim within 2x of equiv on {wide} instances with a 10x node gap")
    verdict(8, ok, "; ".join(notes))
    assert ok
