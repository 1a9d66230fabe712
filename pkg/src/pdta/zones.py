"""Difference bound matrices over clocks, and the LU preorder on zones.

A bound ``(op, c)`` on a difference ``x_i - x_j`` is packed into one integer
``2*c + 1`` for ``<=`` and ``2*c`` for ``<``, so that the natural integer
order is the bound order and addition is a couple of integer ops.  ``INF``
is a sentinel larger than any packed bound.

Matrices are stored row-major in a flat tuple of size ``(dim+1)**2``; entry
``(i, j)`` bounds ``x_i - x_j`` and index 0 is the reference clock (always 0).
Every non-empty :class:`Zone` is kept in canonical (all-pairs tight) form, so
equality and hashing of the tuple coincide with equality of valuation sets.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, NamedTuple, Sequence

INF = 1 << 62
LE_ZERO = 1
LT_ZERO = 0

# Guard constants are limited so that every finite sum stays far below INF.
MAX_CONSTANT = 1 << 30


class DimensionError(ValueError):
    """Raised when zones of different dimension are combined."""


def le(c: int) -> int:
    """Packed bound ``(<=, c)``."""
    return 2 * c + 1


def lt(c: int) -> int:
    """Packed bound ``(<, c)``."""
    return 2 * c


def bound_add(a: int, b: int) -> int:
    if a == INF or b == INF:
        return INF
    return a + b - ((a | b) & 1)


def bound_value(b: int) -> int:
    return b >> 1


def bound_is_weak(b: int) -> bool:
    return bool(b & 1)


def bound_str(b: int) -> str:
    if b == INF:
        return "<inf"
    return ("<=" if b & 1 else "<") + str(b >> 1)


class Constraint(NamedTuple):
    """``x_i - x_j`` bounded by the packed bound ``bound``."""

    i: int
    j: int
    bound: int


class LuBounds(NamedTuple):
    """Per-clock lower/upper constants; ``None`` stands for minus infinity.

    Both tuples are indexed by clock number with index 0 the reference clock,
    whose entries are 0.
    """

    lower: tuple
    upper: tuple

    @classmethod
    def make(cls, lower: Sequence, upper: Sequence) -> "LuBounds":
        """Build from per-clock sequences that omit the reference clock."""
        if len(lower) != len(upper):
            raise DimensionError("L and U must have the same length")
        return cls((0, *lower), (0, *upper))

    @property
    def dim(self) -> int:
        return len(self.lower) - 1

    def max_bound(self, x: int) -> int:
        """``max(L(x), U(x), 0)``, the per-clock region granularity."""
        return max(self.lower[x] or 0, self.upper[x] or 0, 0)


class Zone:
    """Immutable canonical DBM.  The empty zone has ``m is None``."""

    __slots__ = ("dim", "m", "_hash")

    def __init__(self, dim: int, m: tuple | None):
        self.dim = dim
        self.m = m
        self._hash = hash((dim, m))

    def __eq__(self, other):
        if not isinstance(other, Zone):
            return NotImplemented
        return self.dim == other.dim and self.m == other.m

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Zone({self.describe()})"

    @property
    def is_empty(self) -> bool:
        return self.m is None

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.m[i * (self.dim + 1) + j]

    def rows(self) -> list[list[int]]:
        n = self.dim + 1
        return [list(self.m[i * n:(i + 1) * n]) for i in range(n)]

    def describe(self, names: Sequence[str] | None = None) -> str:
        if self.m is None:
            return "empty"
        n = self.dim + 1
        if names is None:
            names = [f"x{i}" for i in range(1, n)]
        label = ["0", *names]
        parts = []
        for i in range(n):
            for j in range(n):
                b = self.m[i * n + j]
                if i == j or b == INF or (i == 0 and b == LE_ZERO):
                    continue
                if j == 0:
                    parts.append(f"{label[i]}{bound_str(b)}")
                elif i == 0:
                    # -x_j <= c  reads as  x_j >= -c
                    op = ">=" if b & 1 else ">"
                    parts.append(f"{label[j]}{op}{-(b >> 1)}")
                else:
                    parts.append(f"{label[i]}-{label[j]}{bound_str(b)}")
        return " & ".join(parts) if parts else "true"

    def contains(self, valuation: Sequence) -> bool:
        """Membership of a per-clock valuation (ints or Fractions)."""
        if self.m is None:
            return False
        vals = (0, *valuation)
        n = self.dim + 1
        for i in range(n):
            for j in range(n):
                b = self.m[i * n + j]
                if b == INF:
                    continue
                d = vals[i] - vals[j]
                c = b >> 1
                if d > c or (d == c and not b & 1):
                    return False
        return True


def empty(dim: int) -> Zone:
    return Zone(dim, None)


def universe(dim: int) -> Zone:
    """All valuations with nonnegative clocks."""
    n = dim + 1
    m = [INF] * (n * n)
    for i in range(n):
        m[i * n + i] = LE_ZERO
        m[i] = LE_ZERO
    return Zone(dim, tuple(m))


def zone_initial(dim: int) -> Zone:
    """Delay closure of the all-zero valuation: all clocks equal."""
    n = dim + 1
    m = [LE_ZERO] * (n * n)
    for i in range(1, n):
        m[i * n] = INF
    return Zone(dim, tuple(m))


def _floyd_warshall(m: list[int], n: int) -> bool:
    """Tighten ``m`` in place; False when a negative cycle shows up."""
    for k in range(n):
        kn = k * n
        for i in range(n):
            mik = m[i * n + k]
            if mik == INF:
                continue
            inn = i * n
            for j in range(n):
                mkj = m[kn + j]
                if mkj == INF:
                    continue
                s = mik + mkj - ((mik | mkj) & 1)
                if s < m[inn + j]:
                    m[inn + j] = s
        if m[k * n + k] < LE_ZERO:
            return False
    return all(m[i * n + i] >= LE_ZERO for i in range(n))


def canonicalize(dim: int, matrix: Iterable[int]) -> Zone:
    """Close an arbitrary matrix.  Diagonal entries are clamped to ``<=0``."""
    n = dim + 1
    m = list(matrix)
    if len(m) != n * n:
        raise DimensionError(f"expected {n * n} entries, got {len(m)}")
    for i in range(n):
        if m[i * n + i] < LE_ZERO:
            return empty(dim)
        m[i * n + i] = LE_ZERO
    if not _floyd_warshall(m, n):
        return empty(dim)
    return Zone(dim, tuple(m))


def from_constraints(dim: int, constraints: Iterable[Constraint]) -> Zone:
    """Zone of nonnegative valuations satisfying every constraint."""
    n = dim + 1
    m = list(universe(dim).m)
    for i, j, b in constraints:
        if b < m[i * n + j]:
            m[i * n + j] = b
    return canonicalize(dim, m)


def is_canonical(z: Zone) -> bool:
    if z.m is None:
        return True
    n = z.dim + 1
    m = z.m
    for i in range(n):
        if m[i * n + i] != LE_ZERO or m[i] > LE_ZERO:
            return False
    for k in range(n):
        for i in range(n):
            for j in range(n):
                if m[i * n + j] > bound_add(m[i * n + k], m[k * n + j]):
                    return False
    return True


def _tighten(m: list[int], n: int, i: int, j: int, b: int) -> bool:
    """Conjoin ``x_i - x_j <= b`` into canonical ``m``; False if empty."""
    if b >= m[i * n + j]:
        return True
    mji = m[j * n + i]
    if mji != INF and mji + b - ((mji | b) & 1) < LE_ZERO:
        return False
    m[i * n + j] = b
    for k in range(n):
        mki = m[k * n + i]
        if mki == INF:
            continue
        ki_b = mki + b - ((mki | b) & 1)
        kn = k * n
        for l in range(n):
            mjl = m[j * n + l]
            if mjl == INF:
                continue
            s = ki_b + mjl - ((ki_b | mjl) & 1)
            if s < m[kn + l]:
                m[kn + l] = s
    return True


def intersect_guard(z: Zone, guard: Iterable[Constraint]) -> Zone:
    if z.m is None:
        return z
    n = z.dim + 1
    m = list(z.m)
    for i, j, b in guard:
        if not _tighten(m, n, i, j, b):
            return empty(z.dim)
    return Zone(z.dim, tuple(m))


def reset(z: Zone, clocks: Iterable[int]) -> Zone:
    if z.m is None:
        return z
    n = z.dim + 1
    m = list(z.m)
    for x in clocks:
        xn = x * n
        for k in range(n):
            m[xn + k] = m[k]
            m[k * n + x] = m[k * n]
        m[xn + x] = LE_ZERO
    return Zone(z.dim, tuple(m))


def elapse(z: Zone) -> Zone:
    if z.m is None:
        return z
    n = z.dim + 1
    m = list(z.m)
    for i in range(1, n):
        m[i * n] = INF
    return Zone(z.dim, tuple(m))


def successor(z: Zone, guard: Iterable[Constraint], resets: Iterable[int]) -> Zone:
    """``elapse(reset(intersect_guard(z, guard), resets))``, fused."""
    if z.m is None:
        return z
    n = z.dim + 1
    m = list(z.m)
    for i, j, b in guard:
        if not _tighten(m, n, i, j, b):
            return empty(z.dim)
    for x in resets:
        xn = x * n
        for k in range(n):
            m[xn + k] = m[k]
            m[k * n + x] = m[k * n]
        m[xn + x] = LE_ZERO
    for i in range(1, n):
        m[i * n] = INF
    return Zone(z.dim, tuple(m))


def _check_dims(z1: Zone, z2: Zone) -> None:
    if z1.dim != z2.dim:
        raise DimensionError(f"dimension mismatch: {z1.dim} vs {z2.dim}")


def includes(z1: Zone, z2: Zone) -> bool:
    """True iff ``z2`` is a subset of ``z1``."""
    _check_dims(z1, z2)
    if z2.m is None:
        return True
    if z1.m is None:
        return False
    return all(b2 <= b1 for b1, b2 in zip(z1.m, z2.m))


class LuTable:
    """Packed ``(<=,-U(x))`` and ``(<,-L(y))`` vectors used by :func:`lu_le`.

    Minus-infinity bounds become ``None``, which disables the corresponding
    clock in the entrywise test.
    """

    __slots__ = ("dim", "neg_u", "neg_l")

    def __init__(self, lu: LuBounds):
        self.dim = lu.dim
        self.neg_u = tuple(None if u is None else le(-u) for u in lu.upper)
        self.neg_l = tuple(None if l is None else lt(-l) for l in lu.lower)


def lu_le(z1: Zone, z2: Zone, lu: LuBounds | LuTable) -> bool:
    """Is every valuation of ``z1`` LU-simulated by some valuation of ``z2``?

    Uses the entrywise characterisation: ``z1`` escapes the LU-abstraction of
    ``z2`` iff for some clocks ``x != y`` (reference clock included)

        z1[0,x] >= (<=,-U(x))  and  z2[y,x] < z1[y,x]
        and  z2[y,x] + (<,-L(y)) < z1[0,x].
    """
    _check_dims(z1, z2)
    if z1.m is None:
        return True
    if z2.m is None:
        return False
    table = lu if isinstance(lu, LuTable) else LuTable(lu)
    if table.dim != z1.dim:
        raise DimensionError("LU bounds do not match zone dimension")
    m1, m2 = z1.m, z2.m
    if m1 == m2:
        return True
    n = z1.dim + 1
    neg_u, neg_l = table.neg_u, table.neg_l
    for x in range(n):
        nux = neg_u[x]
        if nux is None:
            continue
        z1_0x = m1[x]
        if z1_0x < nux:
            continue
        for y in range(n):
            if y == x:
                continue
            nly = neg_l[y]
            if nly is None:
                continue
            yx = y * n + x
            b2 = m2[yx]
            if b2 < m1[yx] and b2 != INF and b2 + nly - ((b2 | nly) & 1) < z1_0x:
                return False
    return True


def lu_equiv(z1: Zone, z2: Zone, lu: LuBounds | LuTable) -> bool:
    return lu_le(z1, z2, lu) and lu_le(z2, z1, lu)


def max_constant(z: Zone) -> int:
    """Largest absolute finite constant appearing in the matrix."""
    if z.m is None:
        return 0
    return max((abs(b >> 1) for b in z.m if b != INF), default=0)


def sample_point(z: Zone) -> tuple[Fraction, ...] | None:
    """Some rational valuation inside ``z`` (None for the empty zone).

    Clocks are fixed one at a time strictly inside their projected interval,
    re-tightening after each choice.
    """
    if z.m is None:
        return None
    n = z.dim + 1
    # (value, weak) pairs; None is +inf
    m = [None if b == INF else (Fraction(b >> 1), bool(b & 1)) for b in z.m]
    point = []
    for x in range(1, n):
        up = m[x * n]
        lo_v = -m[x][0]
        if up is None:
            v = lo_v + Fraction(1, 2)
        elif up[0] == lo_v:
            v = lo_v
        else:
            v = (lo_v + up[0]) / 2
        point.append(v)
        # pin x to v and re-close
        m[x * n] = (v, True)
        m[x] = (-v, True)
        for k in range(n):
            for i in range(n):
                a = m[i * n + k]
                if a is None:
                    continue
                for j in range(n):
                    b = m[k * n + j]
                    if b is None:
                        continue
                    s = (a[0] + b[0], a[1] and b[1])
                    cur = m[i * n + j]
                    if cur is None or s[0] < cur[0] or (s[0] == cur[0] and cur[1] and not s[1]):
                        m[i * n + j] = s
    return tuple(point)
