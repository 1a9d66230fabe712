"""Command line front end: ``pdta run | generate | replay | witness``.

Exit codes: 0 nonempty (or feasible), 1 empty (or infeasible), 2 error or
undecided because of a timeout.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from dataclasses import asdict, dataclass, fields
from pathlib import Path

from .benchmarks import GENERATORS, BenchmarkError, generate
from .engine import MODE_ALIASES, EngineConfig, InvariantViolation, UsageError, pdta_reach, verify_fixed_point, witness_trace
from .model import ModelError, PdtaModel, parse_model
from .regions import region_reach, replay_trace

EXIT_NONEMPTY, EXIT_EMPTY, EXIT_ERROR = 0, 1, 2

UNSOUND_BANNER = "UNSOUND MODE: naive pruning at push roots can report unreachable states"


@dataclass
class RunReport:
    model: str
    mode: str
    order: str
    nonempty: bool
    reachable: list[str]
    pairs_added: int
    roots: int
    time_ms: float
    invariants_ok: bool | None = None
    timed_out: bool = False

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=False)

    def to_csv(self, header: bool = True) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        row = asdict(self)
        row["reachable"] = " ".join(self.reachable)
        if header:
            w.writerow(row.keys())
        w.writerow(row.values())
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "RunReport":
        row = next(csv.DictReader(io.StringIO(text)))
        conv = {
            "nonempty": lambda s: s == "True",
            "timed_out": lambda s: s == "True",
            "reachable": lambda s: s.split() if s else [],
            "pairs_added": int,
            "roots": int,
            "time_ms": float,
            "invariants_ok": lambda s: None if s == "" else s == "True",
        }
        return cls(**{f.name: conv.get(f.name, str)(row[f.name]) for f in fields(cls)})


def _load(args) -> PdtaModel:
    if args.gen:
        name, *params = args.gen
        try:
            nums = [int(p) for p in params]
        except ValueError:
            raise UsageError(f"benchmark parameters must be integers: {params}") from None
        return parse_model(generate(name, nums))
    if not args.file:
        raise UsageError("give a model file or --gen NAME PARAMS...")
    return parse_model(Path(args.file).read_text())


def run_model(m: PdtaModel, cfg: EngineConfig) -> tuple[RunReport, object]:
    t0 = time.perf_counter()
    if cfg.mode == "region":
        res = region_reach(m, cfg)
    else:
        res = pdta_reach(m, cfg)
    ok = None
    if cfg.check_invariants and not res.timed_out:
        ok = verify_fixed_point(m, res.tlm, cfg, res.domain)
    ms = (time.perf_counter() - t0) * 1000.0
    report = RunReport(
        model=m.name,
        mode=cfg.mode,
        order=cfg.order,
        nonempty=res.nonempty,
        reachable=sorted(res.reachable),
        pairs_added=res.stats.pairs_added,
        roots=res.stats.roots,
        time_ms=round(ms, 3),
        invariants_ok=ok,
        timed_out=res.timed_out,
    )
    return report, res


def _summary(r: RunReport) -> str:
    if r.timed_out:
        verdict = "nonempty (timeout)" if r.nonempty else "unknown (timeout)"
    else:
        verdict = "nonempty" if r.nonempty else "empty"
    lines = [
        f"model:     {r.model}",
        f"mode:      {r.mode} ({r.order})",
        f"verdict:   {verdict}",
        f"reachable: {', '.join(r.reachable)}",
        f"nodes:     {r.pairs_added}" + (" (partial)" if r.timed_out else ""),
        f"roots:     {r.roots}",
        f"time:      {r.time_ms:.1f} ms",
    ]
    if r.invariants_ok is not None:
        lines.append(f"invariants: {'ok' if r.invariants_ok else 'VIOLATED'}")
    return "\n".join(lines)


def cmd_run(args, out) -> int:
    m = _load(args)
    cfg = EngineConfig(
        mode=args.mode,
        order=args.order,
        stop_early=args.stop_early,
        check_invariants=args.check_invariants,
        timeout=args.timeout,
    )
    if cfg.mode == "naive":
        print(UNSOUND_BANNER, file=out)
    try:
        report, _ = run_model(m, cfg)
    except InvariantViolation as e:
        print(f"error: invariant violated: {e}", file=sys.stderr)
        return EXIT_ERROR
    print(_summary(report), file=out)
    text = None
    if args.stats_format == "json":
        text = report.to_json() + "\n"
    elif args.stats_format == "csv":
        text = report.to_csv()
    if text is not None:
        if args.stats_file:
            Path(args.stats_file).write_text(text)
        else:
            out.write(text)
    if report.invariants_ok is False:
        return EXIT_ERROR
    if report.nonempty:
        return EXIT_NONEMPTY
    return EXIT_ERROR if report.timed_out else EXIT_EMPTY


def cmd_generate(args, out) -> int:
    text = generate(args.name, args.params)
    if args.output:
        Path(args.output).write_text(text)
    else:
        out.write(text)
    return 0


def read_trace(text: str) -> list[int]:
    steps = []
    for n, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if not line.isdigit():
            raise UsageError(f"trace line {n}: expected a transition index, got {line!r}")
        steps.append(int(line))
    return steps


def cmd_replay(args, out) -> int:
    m = _load(args)
    trace = read_trace(Path(args.trace).read_text())
    ok = replay_trace(m, trace)
    print("feasible" if ok else "infeasible", file=out)
    return EXIT_NONEMPTY if ok else EXIT_EMPTY


def cmd_witness(args, out) -> int:
    m = _load(args)
    res = pdta_reach(m, EngineConfig(mode=args.mode, record_provenance=True))
    target = args.state
    if target is None:
        hits = [q for q in m.finals if q in res.reachable]
        if not hits:
            print("no final state is reachable", file=sys.stderr)
            return EXIT_EMPTY
        target = hits[0]
    trace = witness_trace(res, target)
    if trace is None:
        print(f"state {target} is not reachable", file=sys.stderr)
        return EXIT_EMPTY
    out.write("".join(f"{i}\n" for i in trace))
    return EXIT_NONEMPTY


def _add_source(p: argparse.ArgumentParser) -> None:
    p.add_argument("file", nargs="?", help="model file")
    p.add_argument("--gen", nargs="+", metavar="ARG", help="use a generated benchmark: NAME PARAMS...")


def build_parser() -> argparse.ArgumentParser:
    modes = sorted(set(MODE_ALIASES) | {"naive", "region", "simulation", "equivalence"})
    ap = argparse.ArgumentParser(prog="pdta", description="Reachability for pushdown timed automata.")
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="decide reachability of a final state")
    _add_source(run)
    run.add_argument("--mode", choices=modes, default="sim")
    run.add_argument("--order", choices=["lifo", "fifo"], default="lifo")
    run.add_argument("--stop-early", action="store_true", help="stop once a final state is reached")
    run.add_argument("--stats-format", choices=["json", "csv", "none"], default="none")
    run.add_argument("--stats-file", help="write the report here instead of standard output")
    run.add_argument("--check-invariants", action="store_true")
    run.add_argument("--timeout", type=float, help="seconds; the report keeps the partial node count")
    run.set_defaults(func=cmd_run)

    gen = sub.add_parser("generate", help="print a benchmark model")
    gen.add_argument("name", help=", ".join(GENERATORS))
    gen.add_argument("params", nargs="*", type=int)
    gen.add_argument("-o", "--output")
    gen.set_defaults(func=cmd_generate)

    rep = sub.add_parser("replay", help="check that a trace of transition indices is feasible")
    _add_source(rep)
    rep.add_argument("--trace", required=True, help="file with one transition index per line")
    rep.set_defaults(func=cmd_replay)

    wit = sub.add_parser("witness", help="print a trace reaching a state")
    _add_source(wit)
    wit.add_argument("--state", help="target state (default: first reachable final state)")
    wit.add_argument("--mode", choices=["sim", "equiv", "simulation", "equivalence"], default="sim")
    wit.set_defaults(func=cmd_witness)
    return ap


def main(argv: list[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_ERROR if e.code else 0
    try:
        return args.func(args, out)
    except (ModelError, UsageError, BenchmarkError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
