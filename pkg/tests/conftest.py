import pytest

_LINES = pytest.StashKey[list]()


@pytest.fixture
def verdict(request):
    """Record one pass/fail line for an acceptance criterion."""
    lines = request.config.stash.setdefault(_LINES, [])

    def record(criterion: int, ok: bool, detail: str) -> None:
        line = f"criterion {criterion}: {'PASS' if ok else 'FAIL'}  {detail}"
        print(line)
        lines.append((criterion, ok, line))

    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_LINES, [])
    if not lines:
        return
    merged: dict[int, list] = {}
    for n, ok, line in lines:
        merged.setdefault(n, []).append((ok, line.split("  ", 1)[1]))
    terminalreporter.section("acceptance criteria")
    for n in sorted(merged):
        ok = all(o for o, _ in merged[n])
        detail = " | ".join(d for _, d in merged[n])
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
