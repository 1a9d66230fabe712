"""Well-nested reachability for pushdown timed automata.

The explored state is a two-level map (``Tlm``): first level keyed by control
state holding *root* nodes, each root owning

* ``S``: nodes reachable from the root by a well-nested run,
* ``push``: per stack symbol, the roots that pushed into this root,
* ``pop``: per stack symbol, the nodes reached by popping out of this root.

:func:`pdta_reach` saturates these sets with a worklist of (root, node)
pairs.  Node payloads come from a pluggable :class:`Domain`: zones compared
by LU simulation or LU equivalence, zones with the (unsound) simulation test
at roots, or exact regions.
"""

from __future__ import annotations

import time
from collections import deque
from dataclasses import dataclass, field
from typing import Any, Callable, Iterator

from . import zones
from .model import NOP, POP, PUSH, Edge, PdtaModel, compute_lu_bounds, validate

MODES = ("simulation", "equivalence", "naive", "region")
MODE_ALIASES = {"sim": "simulation", "equiv": "equivalence"}
ORDERS = ("lifo", "fifo")


class UsageError(ValueError):
    pass


class InvariantViolation(AssertionError):
    """A runtime check of the algorithm's invariants failed."""


@dataclass(frozen=True)
class EngineConfig:
    mode: str = "simulation"
    order: str = "lifo"
    stop_early: bool = False
    check_invariants: bool = False
    record_provenance: bool = False
    timeout: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "mode", MODE_ALIASES.get(self.mode, self.mode))
        if self.mode not in MODES:
            raise UsageError(f"unknown mode {self.mode!r}")
        if self.order not in ORDERS:
            raise UsageError(f"unknown order {self.order!r}")


# --- node domains ------------------------------------------------------------


class Bucket:
    """Insertion-ordered payload list with an exact-membership index.

    With a ``keyfn`` the payloads are also grouped by key, so that a test
    which can only succeed between equal keys scans one group.
    """

    __slots__ = ("items", "index", "groups", "keyfn")

    def __init__(self, keyfn: Callable | None = None):
        self.items: list = []
        self.index: set = set()
        self.keyfn = keyfn
        self.groups: dict = {}

    def add(self, payload) -> None:
        self.items.append(payload)
        self.index.add(payload)
        if self.keyfn is not None:
            self.groups.setdefault(self.keyfn(payload), []).append(payload)

    def discard(self, payload) -> None:
        if payload in self.index:
            self.index.remove(payload)
            self.items.remove(payload)
            if self.keyfn is not None:
                self.groups[self.keyfn(payload)].remove(payload)

    def candidates(self, payload) -> list:
        if self.keyfn is None:
            return self.items
        return self.groups.get(self.keyfn(payload), [])

    def __contains__(self, payload) -> bool:
        return payload in self.index

    def __iter__(self):
        return iter(self.items)

    def __len__(self):
        return len(self.items)


class Domain:
    """Payload semantics the engine is parameterised by."""

    name = "abstract"
    sound = True

    def initial(self) -> Any:
        raise NotImplementedError

    def successors(self, payload, edge: Edge) -> list:
        raise NotImplementedError

    def covers(self, new, old) -> bool:
        """Test used by isNewNode / isNewPop: ``new`` is pruned by ``old``."""
        raise NotImplementedError

    def same_root(self, new, old) -> bool:
        """Test used by isNewRoot."""
        raise NotImplementedError

    # Optional hashable invariants: payloads related by ``covers`` (resp.
    # ``same_root``) always share a key.  None means no such key is known.
    cover_key: Callable | None = None
    root_key: Callable | None = None

    def covered(self, bucket: Bucket | None, payload) -> bool:
        if bucket is None:
            return False
        if payload in bucket.index:
            return True
        covers = self.covers
        return any(covers(payload, old) for old in bucket.candidates(payload))

    def describe(self, payload) -> str:
        return repr(payload)


class ZoneDomain(Domain):
    def __init__(self, model: PdtaModel, mode: str):
        self.name = mode
        self.sound = mode != "naive"
        self.dim = model.dim
        self.lu = compute_lu_bounds(model)
        self.table = zones.LuTable(self.lu)
        self.clock_names = list(model.clocks)
        if mode == "equivalence":
            self.covers = self._equiv
            self.cover_key = self._key
        else:
            self.covers = self._le
        if mode == "naive":
            self.same_root = self._le
        else:
            self.same_root = self._equiv
            self.root_key = self._key

    def initial(self):
        return zones.zone_initial(self.dim)

    def successors(self, payload, edge):
        z = zones.successor(payload, edge.constraints, edge.resets)
        return [] if z.m is None else [z]

    def _key(self, z):
        # LU-equivalent zones agree on every lower bound z[0,x] that is
        # at most U(x): the reference-clock case of the entrywise test.
        m = z.m
        return tuple(m[x] if u is not None and m[x] >= u else None
                     for x, u in enumerate(self.table.neg_u) if x)

    def _le(self, new, old):
        return zones.lu_le(new, old, self.table)

    def _equiv(self, new, old):
        t = self.table
        return zones.lu_le(new, old, t) and zones.lu_le(old, new, t)

    def describe(self, payload):
        return payload.describe(self.clock_names)


def make_domain(model: PdtaModel, mode: str) -> Domain:
    mode = MODE_ALIASES.get(mode, mode)
    if mode == "region":
        from .regions import RegionDomain

        return RegionDomain(model)
    if mode not in MODES:
        raise UsageError(f"unknown mode {mode!r}")
    return ZoneDomain(model, mode)


# --- two-level map -----------------------------------------------------------


class Root:
    """A root node together with its second-level maps."""

    __slots__ = ("state", "payload", "S", "push", "pop", "pop_order", "serial")

    def __init__(self, state: str, payload, serial: int):
        self.state = state
        self.payload = payload
        self.serial = serial
        self.S: dict[str, Bucket] = {}
        # symbol -> {source Root: None}, insertion ordered
        self.push: dict[str, dict[Root, None]] = {}
        # symbol -> state -> Bucket, plus symbol -> [(state, payload)] in insertion order
        self.pop: dict[str, dict[str, Bucket]] = {}
        self.pop_order: dict[str, list] = {}

    def __repr__(self):
        return f"Root#{self.serial}({self.state})"

    def nodes(self) -> Iterator[tuple[str, Any]]:
        for q, bucket in self.S.items():
            for p in bucket.items:
                yield q, p


class Tlm:
    """Store for the pair set, the push set and the pop set."""

    def __init__(self, domain: Domain | None = None):
        self.roots: dict[str, list[Root]] = {}
        self.pairs = 0
        self._serial = 0
        self._cover_key = domain.cover_key if domain is not None else None
        self._root_key = domain.root_key if domain is not None else None
        self._root_groups: dict[tuple, list[Root]] = {}

    # creation / insertion
    def create_root(self, state: str, payload) -> Root:
        root = Root(state, payload, self._serial)
        self._serial += 1
        self.roots.setdefault(state, []).append(root)
        if self._root_key is not None:
            self._root_groups.setdefault((state, self._root_key(payload)), []).append(root)
        return root

    def add(self, root: Root, state: str, payload) -> None:
        bucket = root.S.get(state)
        if bucket is None:
            bucket = root.S[state] = Bucket(self._cover_key)
        bucket.add(payload)
        self.pairs += 1

    def add_push(self, src: Root, symbol: str, dst: Root) -> None:
        dst.push.setdefault(symbol, {})[src] = None

    def add_pop(self, root: Root, symbol: str, state: str, payload) -> None:
        by_state = root.pop.setdefault(symbol, {})
        bucket = by_state.get(state)
        if bucket is None:
            bucket = by_state[state] = Bucket(self._cover_key)
        bucket.add(payload)
        root.pop_order.setdefault(symbol, []).append((state, payload))

    # queries
    def is_new_root(self, domain: Domain, state: str, payload) -> tuple[bool, Root | None]:
        if self._root_key is not None:
            candidates = self._root_groups.get((state, self._root_key(payload)), ())
        else:
            candidates = self.roots.get(state, ())
        for root in candidates:
            if root.payload == payload or domain.same_root(payload, root.payload):
                return False, root
        return True, None

    def is_new_node(self, domain: Domain, root: Root, state: str, payload) -> bool:
        return not domain.covered(root.S.get(state), payload)

    def is_new_pop(self, domain: Domain, root: Root, symbol: str, state: str, payload) -> bool:
        by_state = root.pop.get(symbol)
        return by_state is None or not domain.covered(by_state.get(state), payload)

    def is_new_push(self, src: Root, symbol: str, dst: Root) -> bool:
        return src not in dst.push.get(symbol, ())

    # iteration (snapshots)
    def iter_pop(self, root: Root, symbol: str) -> list:
        return list(root.pop_order.get(symbol, ()))

    def iter_push(self, symbol: str, dst: Root) -> list[Root]:
        return list(dst.push.get(symbol, ()))

    # views
    def all_roots(self) -> Iterator[Root]:
        for bucket in self.roots.values():
            yield from bucket

    @property
    def root_count(self) -> int:
        return sum(len(b) for b in self.roots.values())

    def find_root(self, state: str, payload) -> Root | None:
        for root in self.roots.get(state, ()):
            if root.payload == payload:
                return root
        return None

    def remove_pair(self, root: Root, state: str, payload) -> None:
        """Drop a pair (used to build negative tests for the verifier)."""
        bucket = root.S.get(state)
        if bucket is None or payload not in bucket:
            raise KeyError((root, state))
        bucket.discard(payload)
        self.pairs -= 1


# --- results -----------------------------------------------------------------


@dataclass
class Stats:
    pairs_added: int = 0
    roots: int = 0
    elapsed: float = 0.0
    iterations: int = 0


@dataclass
class ReachResult:
    model: str
    mode: str
    order: str
    reachable: frozenset
    nonempty: bool
    stats: Stats
    sound: bool = True
    timed_out: bool = False
    invariants_checked: bool = False
    tlm: Tlm | None = field(default=None, repr=False)
    initial_root: Root | None = field(default=None, repr=False)
    provenance: dict | None = field(default=None, repr=False)
    domain: Domain | None = field(default=None, repr=False)


# --- the worklist algorithm ----------------------------------------------------


class _Run:
    """State of one saturation run; kept separate so checks can inspect it."""

    def __init__(self, model: PdtaModel, cfg: EngineConfig, domain: Domain):
        self.model = model
        self.cfg = cfg
        self.domain = domain
        self.tlm = Tlm(domain)
        self.check = cfg.check_invariants
        self.record = cfg.record_provenance or cfg.check_invariants
        # (root, state, payload) -> derivation
        self.provenance: dict | None = {} if self.record else None
        # (root, symbol, state, payload) -> (q', Z', edge)
        self.pop_witness: dict | None = {} if self.record else None
        # (src root, symbol, dst root) -> (q', Z', edge, Z'')
        self.push_witness: dict | None = {} if self.record else None

    # rule application bookkeeping -------------------------------------------
    def add_pair(self, root: Root, state: str, payload, why: tuple) -> None:
        if self.check:
            self._shadow_check(root, state, payload, why)
        self.tlm.add(root, state, payload)
        if self.record:
            self.provenance[(root, state, payload)] = why

    def _shadow_check(self, root: Root, state: str, payload, why: tuple) -> None:
        """Confirm that adding the pair is one legal rule application."""
        d, tlm = self.domain, self.tlm
        kind = why[0]

        def in_s(r: Root, q: str, p) -> bool:
            b = r.S.get(q)
            return b is not None and p in b

        if kind == "start":
            ok = tlm.pairs == 0 and root.state == self.model.q0 and payload == d.initial()
        elif kind == "internal":
            _, q1, p1, edge = why
            ok = (
                in_s(root, q1, p1)
                and edge.transition.src == q1
                and edge.tag == NOP
                and edge.tgt == state
                and payload in d.successors(p1, edge)
                and tlm.is_new_node(d, root, state, payload)
            )
        elif kind == "push":
            _, src, q1, p1, edge = why
            ok = (
                in_s(src, q1, p1)
                and edge.tag == PUSH
                and edge.tgt == state == root.state
                and payload == root.payload
                and payload in d.successors(p1, edge)
                and not root.S
                and all(r is root or not d.same_root(payload, r.payload) for r in tlm.roots.get(state, ()))
            )
        elif kind == "pop":
            _, q1, p1, push_edge, inner, q2, p2, pop_edge = why
            mids = d.successors(p1, push_edge)
            ok = (
                in_s(root, q1, p1)
                and push_edge.tag == PUSH
                and push_edge.transition.src == q1
                and push_edge.tgt == inner.state
                and any(m == inner.payload or d.same_root(m, inner.payload) for m in mids)
                and in_s(inner, q2, p2)
                and pop_edge.tag == POP
                and pop_edge.symbol == push_edge.symbol
                and pop_edge.transition.src == q2
                and pop_edge.tgt == state
                and payload in d.successors(p2, pop_edge)
                and tlm.is_new_node(d, root, state, payload)
            )
        else:
            ok = False
        if not ok:
            raise InvariantViolation(f"{kind} step adding ({state}, {d.describe(payload)}) to {root} is not derivable")

    def _check_todo(self, todo) -> None:
        for root, state, payload in todo:
            b = root.S.get(state)
            if b is None or payload not in b:
                raise InvariantViolation(f"worklist entry ({root}, {state}) is missing from S")

    def _check_pop_witness(self, root: Root, symbol: str, q2: str, p2, edge: Edge, q1: str, p1) -> None:
        b = root.S.get(q1)
        if (
            b is None
            or p1 not in b
            or edge.tag != POP
            or edge.symbol != symbol
            or edge.tgt != q2
            or p2 not in self.domain.successors(p1, edge)
        ):
            raise InvariantViolation(f"pop entry ({symbol}, {q2}) of {root} lacks a witness")

    def _check_push_witness(self, src: Root, symbol: str, dst: Root, q1: str, p1, edge: Edge, mid) -> None:
        b = src.S.get(q1)
        d = self.domain
        if (
            b is None
            or p1 not in b
            or edge.tag != PUSH
            or edge.symbol != symbol
            or edge.tgt != dst.state
            or mid not in d.successors(p1, edge)
            or not (mid == dst.payload or d.same_root(mid, dst.payload))
        ):
            raise InvariantViolation(f"push entry ({src}, {symbol}) of {dst} lacks a witness")

    # main loop ----------------------------------------------------------------
    def run(self) -> ReachResult:
        model, cfg, d, tlm = self.model, self.cfg, self.domain, self.tlm
        started = time.perf_counter()
        deadline = None if cfg.timeout is None else started + cfg.timeout
        finals = set(model.finals)
        lifo = cfg.order == "lifo"
        todo: Any = [] if lifo else deque()
        get = todo.pop if lifo else todo.popleft
        put = todo.append

        q0 = model.q0
        z0 = d.initial()
        init = tlm.create_root(q0, z0)
        self.add_pair(init, q0, z0, ("start",))
        put((init, q0, z0))

        timed_out = False
        stop = cfg.stop_early and q0 in finals
        iterations = 0
        edges_from = model.edges_from
        is_new_node = tlm.is_new_node
        while todo and not stop:
            iterations += 1
            if deadline is not None and iterations % 256 == 0 and time.perf_counter() > deadline:
                timed_out = True
                break
            if self.check and iterations & (iterations - 1) == 0:
                # S only grows, so a full scan at powers of two plus the
                # per-pop check below keeps the cost linear
                self._check_todo(todo)
            root, q1, z1 = get()
            if self.check:
                self._check_todo(((root, q1, z1),))
            for edge in edges_from(q1):
                for z2 in d.successors(z1, edge):
                    q2 = edge.tgt
                    tag = edge.tag
                    if tag == NOP:
                        if is_new_node(d, root, q2, z2):
                            self.add_pair(root, q2, z2, ("internal", q1, z1, edge))
                            put((root, q2, z2))
                            if cfg.stop_early and root is init and q2 in finals:
                                stop = True
                    elif tag == PUSH:
                        a = edge.symbol
                        is_new, inner = tlm.is_new_root(d, q2, z2)
                        if is_new:
                            inner = tlm.create_root(q2, z2)
                            self.add_pair(inner, q2, z2, ("push", root, q1, z1, edge))
                            put((inner, q2, z2))
                        if tlm.is_new_push(root, a, inner):
                            if self.check:
                                self._check_push_witness(root, a, inner, q1, z1, edge, z2)
                            tlm.add_push(root, a, inner)
                            if self.record:
                                self.push_witness[(root, a, inner)] = (q1, z1, edge)
                            for q3, z3 in tlm.iter_pop(inner, a):
                                if is_new_node(d, root, q3, z3):
                                    pw = self.pop_witness[(inner, a, q3, z3)] if self.record else None
                                    why = ("pop", q1, z1, edge, inner, *pw) if pw else ("pop",)
                                    self.add_pair(root, q3, z3, why)
                                    put((root, q3, z3))
                                    if cfg.stop_early and root is init and q3 in finals:
                                        stop = True
                    else:  # POP
                        a = edge.symbol
                        if tlm.is_new_pop(d, root, a, q2, z2):
                            if self.check:
                                self._check_pop_witness(root, a, q2, z2, edge, q1, z1)
                            tlm.add_pop(root, a, q2, z2)
                            if self.record:
                                self.pop_witness[(root, a, q2, z2)] = (q1, z1, edge)
                            for src in tlm.iter_push(a, root):
                                if is_new_node(d, src, q2, z2):
                                    if self.record:
                                        pq, pz, pedge = self.push_witness[(src, a, root)]
                                        why = ("pop", pq, pz, pedge, root, q1, z1, edge)
                                    else:
                                        why = ("pop",)
                                    self.add_pair(src, q2, z2, why)
                                    put((src, q2, z2))
                                    if cfg.stop_early and src is init and q2 in finals:
                                        stop = True

        elapsed = time.perf_counter() - started
        reachable = frozenset(q for q, b in init.S.items() if len(b))
        stats = Stats(tlm.pairs, tlm.root_count, elapsed, iterations)
        return ReachResult(
            model=model.name,
            mode=cfg.mode,
            order=cfg.order,
            reachable=reachable,
            nonempty=bool(reachable & finals),
            stats=stats,
            sound=d.sound,
            timed_out=timed_out,
            invariants_checked=self.check,
            tlm=tlm,
            initial_root=init,
            provenance=self.provenance,
            domain=d,
        )


def pdta_reach(model: PdtaModel, cfg: EngineConfig | None = None, domain: Domain | None = None) -> ReachResult:
    """Saturate the inductive rules for ``model`` and report well-nested reachability."""
    cfg = cfg or EngineConfig()
    diags = validate(model)
    if diags:
        raise UsageError("model is not admissible: " + "; ".join(diags))
    if domain is None:
        domain = make_domain(model, cfg.mode)
    return _Run(model, cfg, domain).run()


# --- fixed point verification ----------------------------------------------------


def fixed_point_violations(model: PdtaModel, tlm: Tlm, cfg: EngineConfig | None = None,
                           domain: Domain | None = None, limit: int = 20) -> list[str]:
    """Rule instances whose conclusion is not already present in ``tlm``."""
    cfg = cfg or EngineConfig()
    d = domain or make_domain(model, cfg.mode)
    out: list[str] = []
    q0, z0 = model.q0, d.initial()
    init = tlm.find_root(q0, z0)
    if init is None or z0 not in init.S.get(q0, ()):
        out.append("start rule: initial pair missing")
        return out

    like: dict = {}

    def roots_like(state, payload):
        # a deliberate full scan, independent of the engine's root grouping
        key = (state, payload)
        if key not in like:
            like[key] = [r for r in tlm.roots.get(state, ()) if r.payload == payload or d.same_root(payload, r.payload)]
        return like[key]

    pop_results: dict = {}

    def pops_of(inner: Root, symbol: str) -> list:
        key = (id(inner), symbol)
        if key not in pop_results:
            found = []
            for q3, z3 in list(inner.nodes()):
                for pop_edge in model.edges_from(q3):
                    if pop_edge.tag == POP and pop_edge.symbol == symbol:
                        found += [(pop_edge, z4) for z4 in d.successors(z3, pop_edge)]
            pop_results[key] = found
        return pop_results[key]

    # (root, inner root, symbol) combinations seen so far; each is checked once
    done: set = set()
    for root in list(tlm.all_roots()):
        for q1, z1 in list(root.nodes()):
            for edge in model.edges_from(q1):
                for z2 in d.successors(z1, edge):
                    q2 = edge.tgt
                    if edge.tag == NOP:
                        if tlm.is_new_node(d, root, q2, z2):
                            out.append(f"internal rule: {root} misses ({q2}, {d.describe(z2)}) via edge {edge.index}")
                    elif edge.tag == PUSH:
                        inners = roots_like(q2, z2)
                        if not inners:
                            out.append(f"push rule: no root for ({q2}, {d.describe(z2)}) via edge {edge.index}")
                        for inner in inners:
                            key = (id(root), id(inner), edge.symbol)
                            if key in done:
                                continue
                            done.add(key)
                            for pop_edge, z4 in pops_of(inner, edge.symbol):
                                if tlm.is_new_node(d, root, pop_edge.tgt, z4):
                                    out.append(
                                        f"pop rule: {root} misses ({pop_edge.tgt}, {d.describe(z4)}) "
                                        f"via edges {edge.index}/{pop_edge.index}"
                                    )
                if len(out) >= limit:
                    return out
    return out


def verify_fixed_point(model: PdtaModel, tlm: Tlm, cfg: EngineConfig | None = None,
                       domain: Domain | None = None) -> bool:
    return not fixed_point_violations(model, tlm, cfg, domain, limit=1)


# --- witnesses -------------------------------------------------------------------


def witness_trace(result: ReachResult, state: str) -> list[int] | None:
    """Transition indices of a well-nested run from the initial node to ``state``.

    Needs a result computed with ``record_provenance``.  Returns None when
    ``state`` is not in the initial root's node set.
    """
    if result.provenance is None:
        raise UsageError("run was not recorded; enable record_provenance")
    root = result.initial_root
    bucket = root.S.get(state)
    if not bucket:
        return None
    return _order_trace(result.provenance, root, state, bucket.items[0])


def _order_trace(prov: dict, root: Root, state: str, payload) -> list[int]:
    trace: list[int] = []
    # iterative post-order: frames are ("node", r, q, p) or ("edge", index)
    stack: list[tuple] = [("node", root, state, payload)]
    while stack:
        frame = stack.pop()
        if frame[0] == "edge":
            trace.append(frame[1])
            continue
        _, r, q, p = frame
        why = prov[(r, q, p)]
        kind = why[0]
        if kind in ("start", "push"):
            continue
        if kind == "internal":
            _, q1, p1, edge = why
            stack.append(("edge", edge.index))
            stack.append(("node", r, q1, p1))
        else:
            _, q1, p1, push_edge, inner, q2, p2, pop_edge = why
            stack.append(("edge", pop_edge.index))
            stack.append(("node", inner, q2, p2))
            stack.append(("edge", push_edge.index))
            stack.append(("node", r, q1, p1))
    return trace
