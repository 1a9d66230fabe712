import pytest

from pdta.benchmarks import GENERATORS, BenchmarkError, generate
from pdta.engine import EngineConfig, pdta_reach
from pdta.model import parse_model, validate


def sim(name, params=()):
    return pdta_reach(parse_model(generate(name, params)), EngineConfig(mode="sim"))


@pytest.mark.parametrize("name, params", [("B9", ()), ("B1", (3,)), ("B6", (1, 2))])
def test_wrong_arity(name, params):
    with pytest.raises(BenchmarkError, match="parameter"):
        generate(name, params)


def test_unknown_name():
    with pytest.raises(BenchmarkError, match="unknown benchmark"):
        generate("B11")


@pytest.mark.parametrize("params", [(0,), (-3,)])
def test_non_positive(params):
    with pytest.raises(BenchmarkError):
        generate("B2", params)


def test_case_insensitive():
    assert generate("b4") == generate("B4")


@pytest.mark.parametrize("k", [1, 5, 10, 100])
def test_b2_state_count(k):
    assert len(parse_model(generate("B2", [k])).states) == k + 4


def test_b1_has_eight_pushes():
    m = parse_model(generate("B1"))
    assert sum(t.op.tag == "push" for t in m.transitions) == 8


@pytest.mark.parametrize("name", sorted(GENERATORS))
def test_generated_models_validate(name):
    arity = GENERATORS[name][1]
    assert validate(parse_model(generate(name, [4] * arity))) == []


@pytest.mark.parametrize("name", sorted(GENERATORS))
def test_deterministic(name):
    arity = GENERATORS[name][1]
    assert generate(name, [3] * arity) == generate(name, [3] * arity)


# Reference verdicts and sim-mode node counts, for the instances that
# finish quickly.
TABLE = [
    ("B1", (), True, 17),
    ("B2", (5,), False, 27),
    ("B2", (10,), False, 77),
    ("B2", (100,), False, 5252),
    ("B3", (4, 3), False, 6),
    ("B3", (3, 4), True, 9),
    ("B4", (), False, 8),
    ("B5", (100, 10), True, 202),
    ("B5", (100, 100), True, 202),
    ("B5", (100, 1000), True, 202),
    ("B5", (1000, 100), True, 2002),
    ("B6", (4, 5, 100), True, 30),
    ("B6", (4, 5, 1000), True, 30),
    ("B6", (4, 5, 10000), True, 30),
    ("B6", (5, 4, 100), False, 30),
    ("B6", (5, 4, 1000), False, 30),
    ("B6", (5, 4, 10000), False, 30),
    ("B6", (500, 501, 100), True, 3006),
    ("B6", (501, 500, 100), False, 3006),
    ("B7", (), False, 4475),
    ("B8", (), True, 8),
    ("B9", (10, 10), True, 81),
    ("B9", (50, 10), True, 401),
    ("B9", (100, 10), True, 801),
    ("B9", (10, 20), True, 81),
    ("B9", (10, 50), True, 81),
    ("B9", (10, 100), True, 81),
    ("B10", (), True, 150),
]


@pytest.mark.parametrize("name, params, nonempty, nodes", TABLE)
def test_table_instances(name, params, nonempty, nodes):
    res = sim(name, params)
    assert res.nonempty is nonempty
    assert res.stats.pairs_added == nodes


@pytest.mark.parametrize("k1, reach", [(2, True), (3, False), (4, True), (7, False)])
def test_b5_parity(k1, reach):
    assert ("q1" in sim("B5", (k1, 3)).reachable) is reach


@pytest.mark.parametrize("k1, k2, reach", [(2, 3, True), (3, 3, False), (6, 2, False)])
def test_b6_threshold(k1, k2, reach):
    assert ("q5" in sim("B6", (k1, k2, 20)).reachable) is reach


def test_b9_reaches_only_the_nested_states():
    res = sim("B9", (3, 4))
    assert "sf" in res.reachable and "q0" in res.reachable
    assert not any(q.startswith("r") for q in res.reachable)
