import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from injlock.errors import ShapeError, UsageError
from injlock.gol import (
    X1,
    Grid,
    boolean_oracle_step,
    cell_update,
    load_pattern,
    pulsar,
    read_grid,
    run_generations,
    step_grid,
    write_grid,
)

BLINKER = ".....\n..#..\n..#..\n..#..\n.....\n"


def conway(alive, n):
    return n in (2, 3) if alive else n == 3


@pytest.mark.parametrize("mode", ["formula", "ideal"])
def test_cell_rule(mode):
    for alive in (False, True):
        for n in range(9):
            st_ = cell_update(alive, n, mode)
            assert st_.alive == conway(alive, n)
            # outputs are ideally 0 or 2
            assert st_.field == pytest.approx(2.0 if st_.alive else 0.0, abs=1e-12)


def test_laser_injections_stay_away_from_zero():
    from injlock.field_math import JonesField
    from injlock.gol import cell_spec
    from injlock.network import eval_dag

    smallest = np.inf
    for alive in (False, True):
        for n in range(9):
            tr = {}
            ins = [JonesField(X1)] * n + [JonesField()] * (8 - n) + [JonesField(X1 if alive else 0.0)]
            eval_dag(cell_spec(), ins, trace=tr)
            for node in ("C31", "C21"):
                smallest = min(smallest, abs(tr[node][0].v) / X1)
    # in units of x1 the combined injections are at least ~0.12/sqrt(3)
    assert smallest > 0.06


def test_cell_update_validation():
    with pytest.raises(UsageError):
        cell_update(True, 9)
    with pytest.raises(UsageError):
        cell_update(True, 2, "quantum")


def test_path_amplitude():
    assert X1 == pytest.approx(np.sqrt(2 / 9))
    assert 2.0 / np.sqrt(18.0) == pytest.approx(X1)


def test_grid_io_roundtrip():
    g = read_grid(BLINKER)
    assert write_grid(g) == BLINKER
    assert g.alive.sum() == 3
    with pytest.raises(ShapeError):
        read_grid("..\n...\n")
    with pytest.raises(UsageError):
        read_grid("..x\n")
    with pytest.raises(UsageError):
        read_grid("\n\n")


def test_empty_grid_dump_is_all_dots():
    g = Grid.from_bits(np.zeros((3, 4), bool))
    assert write_grid(g) == "....\n" * 3
    assert write_grid(step_grid(g)) == "....\n" * 3


@pytest.mark.parametrize("mode", ["formula", "ideal"])
def test_blinker(mode):
    g0 = read_grid(BLINKER)
    g1 = step_grid(g0, mode)
    assert write_grid(g1) == ".....\n.....\n.###.\n.....\n.....\n"
    assert step_grid(g1, mode) == g0


def test_blinker_dynamical(methods_params):
    grids, rep = run_generations(read_grid(BLINKER), 2, "dynamical", methods_params)
    assert rep.ok
    assert grids[2] == grids[0] and grids[1] != grids[0]


def test_pulsar_shipped_and_by_name(tmp_path):
    g = pulsar()
    assert g.alive.shape == (17, 17) and g.alive.sum() == 48
    assert load_pattern("pulsar.txt") == g
    p = tmp_path / "p.txt"
    p.write_text(write_grid(g))
    assert load_pattern(p) == g
    with pytest.raises(OSError):
        load_pattern(tmp_path / "missing.txt")


def test_divergence_report_detects_differences():
    g = read_grid(BLINKER)
    grids, rep = run_generations(g, 3)
    assert rep.ok and len(grids) == 4
    doc = rep.to_json()
    assert '"divergent_cells": 0' in doc
    with pytest.raises(UsageError):
        run_generations(g, 0)


@settings(max_examples=40, deadline=None)
@given(arrays(bool, st.tuples(st.integers(1, 9), st.integers(1, 9))))
def test_formula_matches_oracle(bits):
    g = Grid.from_bits(bits)
    assert np.array_equal(step_grid(g).alive, boolean_oracle_step(bits))


@settings(max_examples=5, deadline=None)
@given(arrays(bool, (4, 4)))
def test_ideal_matches_oracle(bits):
    g = Grid.from_bits(bits)
    assert np.array_equal(step_grid(g, "ideal").alive, boolean_oracle_step(bits))


def test_oracle_known_cases():
    block = np.zeros((4, 4), bool)
    block[1:3, 1:3] = True
    assert np.array_equal(boolean_oracle_step(block), block)
    lone = np.zeros((3, 3), bool)
    lone[1, 1] = True
    assert not boolean_oracle_step(lone).any()
