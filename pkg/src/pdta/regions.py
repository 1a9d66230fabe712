"""Region abstraction used as an exact reference for the zone engine.

A region over clocks ``x1..xn`` with maximal constants ``M`` is stored as a
pair ``(ints, fracs)``:

* ``ints[i]`` is the integer part of clock ``i+1``, or ``M+1`` when the clock
  has passed its maximal constant (its fractional part is then irrelevant);
* ``fracs`` is a tuple of clock-index groups.  ``fracs[0]`` holds the bounded
  clocks with zero fractional part (possibly empty); the following groups
  hold bounded clocks with equal non-zero fractional parts, in increasing
  order of that fraction.

The representation is canonical, so regions are compared with ``==``.
"""

from __future__ import annotations

import math
from typing import NamedTuple

from . import zones
from .engine import Domain, EngineConfig, ReachResult, UsageError, pdta_reach
from .model import POP, PUSH, Atom, PdtaModel, compute_lu_bounds


class Region(NamedTuple):
    # a plain tuple underneath, so hashing and equality run at C speed
    ints: tuple[int, ...]
    fracs: tuple[tuple[int, ...], ...]

    def __repr__(self):
        return f"Region({self.ints}, {self.fracs})"


def clock_maxima(m: PdtaModel) -> tuple[int, ...]:
    """Per-clock maximal constant ``max(L, U, 0)``, reference clock excluded."""
    lu = compute_lu_bounds(m)
    return tuple(max(lu.max_bound(x), 0) for x in range(1, m.dim + 1))


def region_initial(m: PdtaModel) -> Region:
    n = m.dim
    return Region((0,) * n, (tuple(range(n)),))


def _normalize(ints: list[int], groups: list[list[int]]) -> Region:
    fracs = [tuple(sorted(groups[0]))] + [tuple(sorted(g)) for g in groups[1:] if g]
    return Region(tuple(ints), tuple(fracs))


def delay_successor(r: Region, maxima: tuple[int, ...]) -> Region | None:
    """Immediate time successor, or None when ``r`` is closed under delay."""
    zero, rest = r.fracs[0], r.fracs[1:]
    ints = list(r.ints)
    if zero:
        moving = []
        for x in zero:
            if ints[x] == maxima[x]:
                ints[x] = maxima[x] + 1
            else:
                moving.append(x)
        return _normalize(ints, [[], moving, *map(list, rest)])
    if rest:
        top = rest[-1]
        new_zero = []
        for x in top:
            ints[x] += 1
            if ints[x] <= maxima[x]:
                new_zero.append(x)
        return _normalize(ints, [new_zero, *map(list, rest[:-1])])
    return None


def delay_chain(r: Region, maxima: tuple[int, ...]) -> list[Region]:
    out = [r]
    while True:
        nxt = delay_successor(out[-1], maxima)
        if nxt is None:
            return out
        out.append(nxt)


def atom_holds(r: Region, atom: Atom, idx: dict[str, int], maxima: tuple[int, ...]) -> bool:
    if atom.diagonal:
        raise UsageError("regions do not support diagonal constraints")
    x = idx[atom.clock] - 1
    c = atom.const
    n = r.ints[x]
    if n > maxima[x]:
        # beyond every constant of this clock
        return atom.op in (">", ">=")
    frac = x not in r.fracs[0]
    if atom.op == "<":
        return n < c
    if atom.op == "<=":
        return n < c if frac else n <= c
    if atom.op == ">=":
        return n >= c
    if atom.op == ">":
        return n >= c if frac else n > c
    raise UsageError(f"unsupported operator {atom.op!r}")


def apply_reset(r: Region, clocks) -> Region:
    if not clocks:
        return r
    ints = list(r.ints)
    for x in clocks:
        ints[x] = 0
    cleared = set(clocks)
    groups = [[x for x in g if x not in cleared] for g in r.fracs]
    groups[0].extend(clocks)
    return _normalize(ints, groups)


def region_successors(m: PdtaModel, r: Region, t, maxima: tuple[int, ...] | None = None) -> list[Region]:
    """Regions reachable from ``r`` by some delay followed by transition ``t``."""
    if maxima is None:
        maxima = clock_maxima(m)
    idx = {c: i + 1 for i, c in enumerate(m.clocks)}
    resets = [idx[c] - 1 for c in t.resets]
    out: list[Region] = []
    for d in delay_chain(r, maxima):
        if all(atom_holds(d, a, idx, maxima) for a in t.guard):
            s = apply_reset(d, resets)
            if s not in out:
                out.append(s)
    return out


def region_count_bound(m: PdtaModel) -> int:
    """Classical upper bound on the number of regions."""
    maxima = clock_maxima(m)
    n = len(maxima)
    prod = 1
    for c in maxima:
        prod *= 2 * c + 2
    return prod * math.factorial(n) * 2**n


class RegionDomain(Domain):
    name = "region"
    sound = True

    def __init__(self, model: PdtaModel):
        self.model = model
        self.maxima = clock_maxima(model)
        self.idx = {c: i + 1 for i, c in enumerate(model.clocks)}
        self._cache: dict = {}
        self.seen: set[Region] = set()

    def initial(self):
        r = region_initial(self.model)
        self.seen.add(r)
        return r

    def successors(self, payload, edge):
        key = (payload, edge.index)
        hit = self._cache.get(key)
        if hit is None:
            hit = region_successors(self.model, payload, edge.transition, self.maxima)
            self._cache[key] = hit
            self.seen.update(hit)
        return hit

    def covers(self, new, old):
        return new == old

    def same_root(self, new, old):
        return new == old

    def cover_key(self, r):
        return r

    def root_key(self, r):
        return r

    def describe(self, payload):
        names = self.model.clocks
        parts = []
        for i, name in enumerate(names):
            n = payload.ints[i]
            if n > self.maxima[i]:
                parts.append(f"{name}>{self.maxima[i]}")
            elif i in payload.fracs[0]:
                parts.append(f"{name}={n}")
            else:
                parts.append(f"{n}<{name}<{n + 1}")
        order = " < ".join("{" + ",".join(names[x] for x in g) + "}" for g in payload.fracs[1:])
        return " & ".join(parts) + (f" | frac: {order}" if order else "")


def region_reach(m: PdtaModel, cfg: EngineConfig | None = None) -> ReachResult:
    if cfg is None:
        cfg = EngineConfig(mode="region")
    elif cfg.mode != "region":
        raise UsageError("region_reach needs mode 'region'")
    return pdta_reach(m, cfg, RegionDomain(m))


def replay_trace(m: PdtaModel, trace) -> bool:
    """Is the sequence of transition indices a feasible run from the initial state?

    Delays are free between steps; the stack only has to match on pops.
    """
    transitions = m.transitions
    state = m.q0
    z = zones.zone_initial(m.dim)
    stack: list[str] = []
    for step, i in enumerate(trace):
        if not 0 <= i < len(transitions):
            raise UsageError(f"step {step}: no transition with index {i}")
        t = transitions[i]
        if t.src != state:
            raise UsageError(f"step {step}: transition {i} leaves {t.src}, run is in {state}")
        edge = m.compile(t)
        z = zones.successor(z, edge.constraints, edge.resets)
        if z.is_empty:
            return False
        if t.op.tag == PUSH:
            stack.append(t.op.symbol)
        elif t.op.tag == POP:
            if not stack or stack[-1] != t.op.symbol:
                return False
            stack.pop()
        state = t.tgt
    return True
