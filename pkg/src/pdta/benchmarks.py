"""Generators for the parametric PDTA benchmark family B1..B10.

Each generator returns model text.  Edges are declared in the left-to-right,
top-to-bottom reading order of the benchmark drawings, because node counts
depend on the order in which outgoing transitions are explored:

B1   q0 -push a-> r1 -> ... -> r8 (8 pushes), r8 -y<=10, pop a, {x}-> q1,
     q1 loop x>=1, pop a, {x}.
B2   q0 -x>=1,{x}-> q1 -y<=k, push a-> q0, then k+1 pops q0 -> p1 -> ... ->
     p(k+1) and a silent edge p(k+1) -> q2.
B3   untimed-stack encoding of a timed-stack automaton; s1 needs k1 <= k2.
B4   three clocks, one push/pop pair, q5 unreachable.
B5   k1 gadgets r_i <-> r_i' (x>=1,{x} / y<=k2); the first half of the
     forward edges push, the second half pop, then r(k1) -> q1.
B6   push loop q1 -> q2 -> q1 counted by y, clock-drift loop q1 <-> q1'
     bounded by k3, then pops counted against k2.
B7   pushes of a and b under x>1 / y<2; pops must follow b, a, a.
B8   straight line of two push/pop pairs.
B9   k1 four-push loops around q0 on distinct symbols, a drift loop on each
     middle state, and one pop line matching the loops in order.
B10  like B7 with the pop cycle a, b.
"""

from __future__ import annotations

from dataclasses import dataclass, field


class BenchmarkError(ValueError):
    pass


@dataclass
class _Builder:
    name: str
    clocks: list[str]
    states: list[str] = field(default_factory=list)
    initial: str | None = None
    finals: set[str] = field(default_factory=set)
    symbols: list[str] = field(default_factory=list)
    edges: list[str] = field(default_factory=list)

    def state(self, *names: str) -> None:
        for q in names:
            if q not in self.states:
                self.states.append(q)

    def edge(self, src: str, tgt: str, guard: str = "", reset: str = "", op: str = "", label: str = "") -> None:
        self.state(src, tgt)
        if op:
            sym = op.split(":", 1)[1]
            if sym not in self.symbols:
                self.symbols.append(sym)
        attrs = []
        if guard:
            attrs.append(f"provided: {guard}")
        if reset:
            attrs.append("do: " + "; ".join(f"{c}=0" for c in reset.split(",")))
        body = "{" + " : ".join(attrs) + "}" if attrs else ""
        label = label or f"t{len(self.edges)}"
        self.edges.append(f"edge:{self.name}:{src}:{tgt}:{label}{body}[{op}]")

    def text(self) -> str:
        lines = [f"system:{self.name}"]
        lines += [f"clock:{c}" for c in self.clocks]
        for q in self.states:
            flags = (":initial" if q == self.initial else "") + (":final" if q in self.finals else "")
            lines.append(f"state:{q}{flags}")
        lines += [f"symbol:{a}" for a in self.symbols]
        lines += self.edges
        return "\n".join(lines) + "\n"


def fig1() -> str:
    """Three pushes, then a pop under y<=3 and a pop loop under x>=1."""
    b = _Builder("fig1", ["x", "y"], initial="q0", finals={"q4"})
    b.state("q0", "q1", "q2", "q3", "q4")
    b.edge("q0", "q1", op="push:a")
    b.edge("q1", "q2", op="push:a")
    b.edge("q2", "q3", op="push:a")
    b.edge("q3", "q4", guard="y<=3", reset="x", op="pop:a")
    b.edge("q4", "q4", guard="x>=1", reset="x", op="pop:a")
    return b.text()


def fig3() -> str:
    """The counterexample to simulation pruning at push roots."""
    b = _Builder("fig3", ["x", "y"], initial="q0", finals={"q3"})
    b.state("q0", "q1", "q2", "q3")
    b.edge("q0", "q1", guard="x>=1", reset="x")
    b.edge("q1", "q0", guard="y<=1", op="push:a")
    b.edge("q0", "q2", op="pop:a")
    b.edge("q2", "q3", op="pop:a")
    return b.text()


def b1() -> str:
    b = _Builder("B1", ["x", "y"], initial="q0", finals={"q1"})
    chain = ["q0"] + [f"r{i}" for i in range(1, 9)]
    b.state(*chain, "q1")
    for src, tgt in zip(chain, chain[1:]):
        b.edge(src, tgt, op="push:a")
    b.edge("r8", "q1", guard="y<=10", reset="x", op="pop:a")
    b.edge("q1", "q1", guard="x>=1", reset="x", op="pop:a")
    return b.text()


def b2(k: int) -> str:
    b = _Builder(f"B2_{k}", ["x", "y"], initial="q0", finals={"q2"})
    b.state("q0", "q1", "q2")
    b.edge("q0", "q1", guard="x>=1", reset="x")
    b.edge("q1", "q0", guard=f"y<={k}", op="push:a")
    line = ["q0"] + [f"p{i}" for i in range(1, k + 2)]
    for src, tgt in zip(line, line[1:]):
        b.edge(src, tgt, op="pop:a")
    b.edge(line[-1], "q2")
    return b.text()


def b3(k1: int, k2: int) -> str:
    b = _Builder(f"B3_{k1}_{k2}", ["x", "y"], initial="q1", finals={"s1"})
    b.state("q1", "q2", "r1", "r2", "s1", "s2")
    b.edge("q1", "q2", reset="y", op="push:a2")
    b.edge("q1", "q1", reset="x", op="push:a1")
    b.edge("q2", "q2", op="push:a")
    b.edge("q2", "q2", reset="x", op="push:a1")
    b.edge("q1", "r1", guard=f"x>={k1}", op="pop:a1")
    b.edge("q2", "r2", guard=f"x>={k1}", op="pop:a1")
    b.edge("r2", "s2", guard=f"y<={k2}", op="pop:a")
    b.edge("r2", "s1", guard=f"y<={k2}", op="pop:a2")
    return b.text()


def b4() -> str:
    b = _Builder("B4", ["x1", "x2", "x3"], initial="q0", finals={"q5"})
    b.state("q0", "q1", "q2", "q3", "q4", "q5", "q6")
    b.edge("q0", "q1", reset="x1,x2")
    b.edge("q1", "q2", guard="x1>=1", reset="x3", op="push:a")
    b.edge("q1", "q3", guard="x1==1", reset="x2")
    b.edge("q2", "q6", guard="x1==1 && x2<=3")
    b.edge("q6", "q3", guard="x1==1")
    b.edge("q6", "q5", guard="x1<=1 && x2>=1 && x3==1", op="pop:a")
    b.edge("q3", "q4", reset="x1,x2")
    b.edge("q4", "q5", guard="x1==1 && x2==0")
    b.edge("q3", "q4", guard="x1==0")
    return b.text()


def b5(k1: int, k2: int) -> str:
    b = _Builder(f"B5_{k1}_{k2}", ["x", "y"], initial="q0", finals={"q1"})
    b.state("q0")
    b.edge("q0", "r1", op="push:a")
    for i in range(1, k1 + 1):
        r, rp = f"r{i}", f"r{i}p"
        b.edge(r, rp, guard="x>=1", reset="x")
        b.edge(rp, r, guard=f"y<={k2}")
        if i < k1:
            b.edge(r, f"r{i + 1}", op="push:a" if 2 * i < k1 else "pop:a")
    b.edge(f"r{k1}", "q1")
    return b.text()


def b6(k1: int, k2: int, k3: int) -> str:
    b = _Builder(f"B6_{k1}_{k2}_{k3}", ["x", "y", "z1", "z2"], initial="q1", finals={"q5"})
    b.state("q1", "q1p", "q2", "q3", "q4", "q5")
    b.edge("q1", "q2", guard="x==1", reset="x")
    b.edge("q2", "q1", guard=f"y<={k1}", op="push:a")
    b.edge("q1", "q1p", guard="z1>=1", reset="z1")
    b.edge("q1p", "q1", guard=f"z2<={k3}")
    b.edge("q1", "q3", guard=f"x==0 && y>={k1}", reset="x,y")
    b.edge("q3", "q4", guard="x==1", reset="x")
    b.edge("q4", "q3", guard=f"y<{k2}", op="pop:a")
    b.edge("q3", "q5")
    return b.text()


def b7() -> str:
    b = _Builder("B7", ["x", "y", "z"], initial="q1", finals={"q5"})
    b.state("q1", "q2", "q3", "q4", "q5")
    b.edge("q1", "q1", guard="x>1", reset="x", op="push:a")
    b.edge("q1", "q1", guard="y<2", reset="y", op="push:b")
    b.edge("q1", "q2", guard="x==0 && z==20")
    b.edge("q2", "q3", op="pop:b")
    b.edge("q3", "q4", op="pop:a")
    b.edge("q4", "q2", op="pop:a")
    b.edge("q2", "q5")
    return b.text()


def b8() -> str:
    b = _Builder("B8", ["x1", "x2", "x3", "x4"], initial="q1", finals={"q8"})
    b.state(*(f"q{i}" for i in range(1, 9)))
    b.edge("q1", "q2", reset="x2", op="push:a")
    b.edge("q2", "q3", guard="x2==1", reset="x4", op="pop:a")
    b.edge("q3", "q4", guard="x4==0", reset="x3", op="push:b")
    b.edge("q4", "q5", guard="x3>=1", reset="x1", op="pop:b")
    b.edge("q5", "q6", reset="x1")
    b.edge("q6", "q7", reset="x2", op="push:a")
    b.edge("q7", "q8", guard="x2>=1", op="pop:a")
    return b.text()


def b9(k1: int, k2: int) -> str:
    b = _Builder(f"B9_{k1}_{k2}", ["x", "y"], initial="q0", finals={"sf"})
    b.state("q0")
    middles = []
    for i in range(k1):
        base = 4 * i
        ra, rb, rc = (f"r{3 * i + j}" for j in (1, 2, 3))
        b.edge("q0", ra, op=f"push:a{base + 1}")
        b.edge(ra, rb, op=f"push:a{base + 2}")
        b.edge(rb, rc, op=f"push:a{base + 3}")
        b.edge(rc, "q0", op=f"push:a{base + 4}")
        middles.append(rb)
    pops = [f"a{4 * i + j}" for i in range(k1) for j in (4, 3, 2, 1)]
    line = ["q0"] + [f"s{i}" for i in range(1, len(pops))] + ["sf"]
    for src, tgt, sym in zip(line, line[1:], pops):
        b.edge(src, tgt, op=f"pop:{sym}")
    for rb in middles:
        b.edge(rb, rb + "p", guard="x>=1", reset="x")
        b.edge(rb + "p", rb, guard=f"y<={k2}")
    return b.text()


def b10() -> str:
    b = _Builder("B10", ["x", "y", "z"], initial="q1", finals={"q4"})
    b.state("q1", "q2", "q3", "q4")
    b.edge("q1", "q1", guard="x>1", reset="x", op="push:a")
    b.edge("q1", "q1", guard="y<2", reset="y", op="push:b")
    b.edge("q1", "q2", guard="x==0 && z==4")
    b.edge("q2", "q3", op="pop:a")
    b.edge("q3", "q2", op="pop:b")
    b.edge("q2", "q4")
    return b.text()


GENERATORS = {
    "B1": (b1, 0),
    "B2": (b2, 1),
    "B3": (b3, 2),
    "B4": (b4, 0),
    "B5": (b5, 2),
    "B6": (b6, 3),
    "B7": (b7, 0),
    "B8": (b8, 0),
    "B9": (b9, 2),
    "B10": (b10, 0),
    "FIG1": (fig1, 0),
    "FIG3": (fig3, 0),
}


def generate(name: str, params: list[int] | tuple[int, ...] = ()) -> str:
    key = name.upper()
    if key not in GENERATORS:
        raise BenchmarkError(f"unknown benchmark {name!r}; choose from {', '.join(GENERATORS)}")
    fn, arity = GENERATORS[key]
    if len(params) != arity:
        raise BenchmarkError(f"{key} takes {arity} parameter(s), got {len(params)}")
    if any(int(p) <= 0 for p in params):
        raise BenchmarkError("benchmark parameters must be positive")
    return fn(*(int(p) for p in params))
