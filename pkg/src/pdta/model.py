"""Pushdown timed automata: data model, text format, validation, LU bounds.

The text format is line oriented, ``#`` starts a comment::

    system:P
    clock:x
    clock:y
    state:q0:initial
    state:q1:final
    symbol:a
    edge:P:q0:q1:e{provided: x>=1 && y<3 : do: x=0}[push:a]

``provided:`` and ``do:`` may come in either order or be absent, and an empty
or missing ``[...]`` suffix means the edge leaves the stack untouched.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable

from .zones import MAX_CONSTANT, Constraint, LuBounds, le, lt

COMPARATORS = ("<", "<=", ">=", ">")
NOP, PUSH, POP = "nop", "push", "pop"


class ModelError(ValueError):
    """Syntax or resolution error in a model document."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(where + message)


@dataclass(frozen=True)
class Atom:
    """``clock op const``, or ``clock - other op const`` when diagonal."""

    clock: str
    op: str
    const: int
    other: str | None = None

    @property
    def diagonal(self) -> bool:
        return self.other is not None

    def __str__(self):
        lhs = self.clock if self.other is None else f"{self.clock}-{self.other}"
        return f"{lhs}{self.op}{self.const}"


@dataclass(frozen=True)
class StackOp:
    tag: str = NOP
    symbol: str | None = None

    def __str__(self):
        return "" if self.tag == NOP else f"{self.tag}:{self.symbol}"


@dataclass(frozen=True)
class Transition:
    src: str
    guard: tuple[Atom, ...]
    op: StackOp
    resets: tuple[str, ...]
    tgt: str
    decl_index: int
    label: str = ""


@dataclass(frozen=True)
class Edge:
    """A transition compiled against the clock numbering of its model."""

    transition: Transition
    constraints: tuple[Constraint, ...]
    resets: tuple[int, ...]

    @property
    def tag(self) -> str:
        return self.transition.op.tag

    @property
    def symbol(self) -> str | None:
        return self.transition.op.symbol

    @property
    def tgt(self) -> str:
        return self.transition.tgt

    @property
    def index(self) -> int:
        return self.transition.decl_index


@dataclass
class PdtaModel:
    name: str
    clocks: list[str]
    states: list[str]
    initial: list[str]
    finals: list[str]
    symbols: list[str]
    transitions: list[Transition]
    _edges: dict = field(default=None, init=False, repr=False, compare=False)

    @property
    def dim(self) -> int:
        return len(self.clocks)

    @property
    def q0(self) -> str:
        if len(self.initial) != 1:
            raise ModelError(f"model {self.name!r} needs exactly one initial state")
        return self.initial[0]

    def clock_index(self, name: str) -> int:
        return self.clocks.index(name) + 1

    def compile(self, t: Transition) -> Edge:
        idx = {c: i for i, c in enumerate(self.clocks, start=1)}
        return Edge(t, tuple(atom_constraints(a, idx) for a in t.guard), tuple(idx[c] for c in t.resets))

    def edges_from(self, state: str) -> list[Edge]:
        """Outgoing edges of ``state`` in declaration order."""
        if self._edges is None:
            table: dict[str, list[Edge]] = {q: [] for q in self.states}
            for t in sorted(self.transitions, key=lambda t: t.decl_index):
                table[t.src].append(self.compile(t))
            self._edges = table
        return self._edges.get(state, [])

    def max_constant(self) -> int:
        return max((a.const for t in self.transitions for a in t.guard), default=0)


def atom_constraints(atom: Atom, idx: dict[str, int]) -> Constraint:
    """Translate one (already equality-free) atom into a DBM constraint."""
    i = idx[atom.clock]
    j = 0 if atom.other is None else idx[atom.other]
    c = atom.const
    if atom.op == "<=":
        return Constraint(i, j, le(c))
    if atom.op == "<":
        return Constraint(i, j, lt(c))
    if atom.op == ">=":
        return Constraint(j, i, le(-c))
    if atom.op == ">":
        return Constraint(j, i, lt(-c))
    raise ModelError(f"unknown comparator {atom.op!r}")


# --- parsing ---------------------------------------------------------------

_IDENT = r"[A-Za-z_][A-Za-z0-9_.']*"
_ATOM_RE = re.compile(
    rf"^\s*(?P<x>{_IDENT})\s*(?:-\s*(?P<y>{_IDENT})\s*)?(?P<op><=|>=|==|=|<|>)\s*(?P<c>-?\d+)\s*$"
)
_RESET_RE = re.compile(rf"^\s*(?P<x>{_IDENT})\s*:?=\s*0\s*$")
_EDGE_RE = re.compile(
    rf"^edge:(?P<proc>[^:{{\[]*):(?P<src>[^:{{\[]*):(?P<tgt>[^:{{\[]*):(?P<label>[^:{{\[]*)"
    r"(?P<body>\{[^}]*\})?\s*(?P<stack>\[[^\]]*\])?\s*$"
)


def _parse_atoms(text: str, lineno: int, col: int) -> list[Atom]:
    atoms: list[Atom] = []
    text = text.strip()
    if not text or text == "true":
        return atoms
    for part in text.split("&&"):
        m = _ATOM_RE.match(part)
        if m is None:
            raise ModelError(f"malformed guard atom {part.strip()!r}", lineno, col)
        x, y, op, c = m["x"], m["y"], m["op"], int(m["c"])
        if c < 0:
            raise ModelError(f"negative constant in {part.strip()!r}", lineno, col)
        if op in ("==", "="):
            atoms.append(Atom(x, "<=", c, y))
            atoms.append(Atom(x, ">=", c, y))
        else:
            atoms.append(Atom(x, op, c, y))
    return atoms


def _parse_resets(text: str, lineno: int, col: int) -> list[str]:
    out = []
    for part in text.replace(",", ";").split(";"):
        if not part.strip():
            continue
        m = _RESET_RE.match(part)
        if m is None:
            raise ModelError(f"malformed reset {part.strip()!r} (only x=0 is supported)", lineno, col)
        out.append(m["x"])
    return out


def _parse_body(body: str, lineno: int, col: int) -> tuple[list[Atom], list[str]]:
    inner = body[1:-1]
    guard: list[Atom] = []
    resets: list[str] = []
    # sections are introduced by the keywords; ':' also separates them
    pieces = re.split(r"(provided\s*:|do\s*:)", inner)
    if pieces[0].strip(" :\t"):
        raise ModelError(f"unexpected text {pieces[0].strip()!r} in edge attributes", lineno, col)
    for key, value in zip(pieces[1::2], pieces[2::2]):
        value = value.strip()
        if value.endswith(":"):
            value = value[:-1]
        if key.startswith("provided"):
            guard.extend(_parse_atoms(value, lineno, col))
        else:
            resets.extend(_parse_resets(value, lineno, col))
    return guard, resets


def _parse_stack(text: str | None, lineno: int, col: int) -> StackOp:
    if text is None:
        return StackOp()
    inner = text[1:-1].strip()
    if not inner:
        return StackOp()
    tag, sep, sym = inner.partition(":")
    tag, sym = tag.strip(), sym.strip()
    if not sep or tag not in (PUSH, POP) or not sym:
        raise ModelError(f"malformed stack operation {text!r}", lineno, col)
    return StackOp(tag, sym)


def parse_model(text: str) -> PdtaModel:
    name = None
    clocks: list[str] = []
    states: list[str] = []
    initial: list[str] = []
    finals: list[str] = []
    symbols: list[str] = []
    pending: list[tuple[int, int, re.Match]] = []

    def declare(kind: str, seq: list[str], ident: str, lineno: int):
        if not re.fullmatch(_IDENT, ident):
            raise ModelError(f"invalid {kind} name {ident!r}", lineno, 1)
        if ident in seq:
            raise ModelError(f"duplicate {kind} {ident!r}", lineno, 1)
        seq.append(ident)

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        col = len(raw) - len(raw.lstrip()) + 1
        kind, _, rest = line.partition(":")
        if kind == "system":
            if name is not None:
                raise ModelError("duplicate system declaration", lineno, col)
            name = rest.strip()
            if not name:
                raise ModelError("empty system name", lineno, col)
        elif kind == "clock":
            declare("clock", clocks, rest.strip(), lineno)
        elif kind == "symbol":
            declare("symbol", symbols, rest.strip(), lineno)
        elif kind == "state":
            parts = [p.strip() for p in rest.split(":")]
            declare("state", states, parts[0], lineno)
            for flag in parts[1:]:
                if flag == "initial":
                    initial.append(parts[0])
                elif flag == "final":
                    finals.append(parts[0])
                else:
                    raise ModelError(f"unknown state attribute {flag!r}", lineno, col)
        elif kind == "edge":
            m = _EDGE_RE.match(line)
            if m is None:
                raise ModelError("malformed edge declaration", lineno, col)
            pending.append((lineno, col, m))
        else:
            raise ModelError(f"unknown declaration {kind!r}", lineno, col)

    if name is None:
        raise ModelError("missing system declaration")

    transitions = []
    for index, (lineno, col, m) in enumerate(pending):
        proc = m["proc"].strip()
        if proc != name:
            raise ModelError(f"edge refers to undeclared process {proc!r}", lineno, col)
        src, tgt = m["src"].strip(), m["tgt"].strip()
        for q in (src, tgt):
            if q not in states:
                raise ModelError(f"undeclared state {q!r}", lineno, col)
        guard, resets = _parse_body(m["body"], lineno, col) if m["body"] else ([], [])
        for a in guard:
            for c in (a.clock, a.other):
                if c is not None and c not in clocks:
                    raise ModelError(f"undeclared clock {c!r}", lineno, col)
        for c in resets:
            if c not in clocks:
                raise ModelError(f"undeclared clock {c!r}", lineno, col)
        op = _parse_stack(m["stack"], lineno, col)
        if op.symbol is not None and op.symbol not in symbols:
            raise ModelError(f"undeclared stack symbol {op.symbol!r}", lineno, col)
        transitions.append(
            Transition(src, tuple(guard), op, tuple(dict.fromkeys(resets)), tgt, index, m["label"].strip())
        )
    return PdtaModel(name, clocks, states, initial, finals, symbols, transitions)


def format_model(m: PdtaModel) -> str:
    """Render ``m`` back into the text format (round-trips through the parser)."""
    lines = [f"system:{m.name}"]
    lines += [f"clock:{c}" for c in m.clocks]
    for q in m.states:
        flags = (":initial" if q in m.initial else "") + (":final" if q in m.finals else "")
        lines.append(f"state:{q}{flags}")
    lines += [f"symbol:{a}" for a in m.symbols]
    for t in sorted(m.transitions, key=lambda t: t.decl_index):
        attrs = []
        if t.guard:
            attrs.append("provided: " + " && ".join(str(a) for a in t.guard))
        if t.resets:
            attrs.append("do: " + "; ".join(f"{c}=0" for c in t.resets))
        body = "{" + " : ".join(attrs) + "}" if attrs else ""
        lines.append(f"edge:{m.name}:{t.src}:{t.tgt}:{t.label}{body}[{t.op}]")
    return "\n".join(lines) + "\n"


def validate(m: PdtaModel) -> list[str]:
    """Diagnostics that make ``m`` unusable for the zone engine (empty if fine)."""
    diags = []
    if not m.initial:
        diags.append("no initial state")
    elif len(m.initial) > 1:
        diags.append(f"multiple initial states: {', '.join(m.initial)}")
    for q in m.finals:
        if q not in m.states:
            diags.append(f"final state {q!r} is not declared")
    for t in m.transitions:
        for a in t.guard:
            if a.diagonal:
                diags.append(f"edge {t.decl_index} ({t.src}->{t.tgt}): diagonal constraint unsupported: {a}")
            if a.const > MAX_CONSTANT:
                diags.append(f"edge {t.decl_index} ({t.src}->{t.tgt}): constant exceeds bound 2^30: {a}")
    return diags


def compute_lu_bounds(m: PdtaModel, transitions: Iterable[Transition] | None = None) -> LuBounds:
    """Global per-clock maxima of lower-bound (L) and upper-bound (U) guard constants."""
    lower: dict[str, int | None] = {c: None for c in m.clocks}
    upper: dict[str, int | None] = {c: None for c in m.clocks}
    for t in m.transitions if transitions is None else transitions:
        for a in t.guard:
            if a.diagonal:
                continue
            table = lower if a.op in (">=", ">") else upper
            cur = table[a.clock]
            table[a.clock] = a.const if cur is None else max(cur, a.const)
    return LuBounds.make([lower[c] for c in m.clocks], [upper[c] for c in m.clocks])


def load_model(path) -> PdtaModel:
    with open(path, encoding="utf-8") as fh:
        return parse_model(fh.read())
