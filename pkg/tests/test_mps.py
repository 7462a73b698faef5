import numpy as np
import pytest

from gen import random_model
from sagin_iscpt.milp import (BINARY, CONTINUOUS, MilpModel, MpsFormatError, NameCollision,
                              export_mps, import_mps, solve_bnb)

GOLDEN_ONE = """\
NAME          ONE
OBJSENSE
    MAX
ROWS
 N  OBJ
 L  c1
COLUMNS
    MARKER0000  'MARKER'                 'INTORG'
    x         OBJ                1.0   c1                 2.0
    MARKER0001  'MARKER'                 'INTEND'
RHS
    RHS       c1                 1.5
BOUNDS
 BV BND       x
ENDATA
"""


def _one():
    m = MilpModel("ONE")
    x = m.add_variable("x", BINARY)
    m.set_objective({x: 1.0})
    m.add_constraint("c1", {x: 2.0}, "<=", 1.5)
    return m


def test_golden_one_variable():
    assert export_mps(_one()) == GOLDEN_ONE


def test_binary_emits_bv_line():
    assert " BV BND       x" in export_mps(_one()).splitlines()


def test_continuous_bounds():
    m = MilpModel("C")
    m.add_variable("y", CONTINUOUS, -1.0, 2.5)
    m.set_objective({0: 1.0}, "min")
    text = export_mps(m)
    assert " LO BND       y                 -1.0" in text
    assert " UP BND       y                  2.5" in text
    assert "OBJSENSE" not in text
    back = import_mps(text)
    assert back.sense == "min" and back.variables[0].lower == -1.0


def _same(a: MilpModel, b: MilpModel):
    assert a.sense == b.sense
    assert [(v.name, v.kind, v.lower, v.upper) for v in a.variables] == \
        [(v.name, v.kind, v.lower, v.upper) for v in b.variables]
    assert a.objective == b.objective
    assert [(c.name, c.coeffs, c.relation, c.rhs) for c in a.constraints] == \
        [(c.name, c.coeffs, c.relation, c.rhs) for c in b.constraints]


def test_round_trip_structure_on_50_models():
    rng = np.random.default_rng(2024)
    for _ in range(50):
        m = random_model(rng)
        _same(m, import_mps(export_mps(m)))


def test_round_trip_objective_on_50_models():
    rng = np.random.default_rng(8)
    for _ in range(50):
        m = random_model(rng)
        a, b = solve_bnb(m), solve_bnb(import_mps(export_mps(m)))
        assert a.status is b.status
        if a.objective_value is not None:
            assert b.objective_value == pytest.approx(a.objective_value, abs=1e-6)


def test_name_collision():
    m = MilpModel()
    m.add_variable("abcdefgh1")
    m.add_variable("abcdefgh2")
    with pytest.raises(NameCollision):
        export_mps(m)
    m = MilpModel()
    m.add_variable("x")
    m.add_constraint("OBJ", {0: 1.0}, "<=", 1.0)
    with pytest.raises(NameCollision):
        export_mps(m)


def test_empty_column_and_free_bounds_survive():
    m = MilpModel("E")
    m.add_variable("idle", CONTINUOUS, 0.0, 1.0)
    m.add_variable("free", CONTINUOUS, float("-inf"), float("inf"))
    m.add_variable("fix", CONTINUOUS, 2.0, 2.0)
    m.add_constraint("r", {1: 1.0, 2: 1.0}, "=", 3.0)
    _same(m, import_mps(export_mps(m)))


def test_import_rejects_unknown_section():
    with pytest.raises(MpsFormatError):
        import_mps("NAME x\nBOGUS\nENDATA\n")
