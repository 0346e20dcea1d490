import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tagsurface.loads import (
    DegenerateLoadSetError,
    LoadSet,
    angular_span,
    arc_gammas,
    binary_load_set,
    element_gain,
    mean_square_deviation,
    modulation_alphabet,
    read_load_table,
    synth_varactor_set,
    write_load_table,
)


def test_msd_examples():
    assert mean_square_deviation(binary_load_set()) == pytest.approx(1.0)
    assert mean_square_deviation(binary_load_set(structural_mode=0.5)) == pytest.approx(1.25)


def test_degenerate_load_set_rejected():
    with pytest.raises(DegenerateLoadSetError):
        LoadSet([0.3, 0.3], structural_mode=0.3)


def test_load_set_validation():
    with pytest.raises(ValueError):
        LoadSet([1.0])
    with pytest.raises(ValueError):
        LoadSet([1.0, 1.5])
    with pytest.raises(ValueError):
        LoadSet([1.0, -1.0], eta=0.0)


def test_alphabet_examples():
    np.testing.assert_allclose(modulation_alphabet(binary_load_set()).symbols, [-1, 1])
    sym = modulation_alphabet(binary_load_set(structural_mode=0.5)).symbols
    np.testing.assert_allclose(sym, [-0.4472, 1.3416], atol=1e-4)


unit = st.floats(-1.0, 1.0, allow_nan=False)


@settings(max_examples=200, deadline=None)
@given(
    st.lists(st.tuples(unit, unit), min_size=2, max_size=30),
    st.tuples(st.floats(-2, 2), st.floats(-2, 2)),
)
def test_alphabet_has_unit_mean_square(points, a_s):
    gammas = np.array([complex(r, i) for r, i in points])
    mag = np.abs(gammas)
    gammas[mag > 1] /= mag[mag > 1]
    structural = complex(*a_s)
    if np.mean(np.abs(structural - gammas) ** 2) < 1e-6:
        return
    sym = modulation_alphabet(LoadSet(gammas, structural)).symbols
    assert abs(np.mean(np.abs(sym) ** 2) - 1.0) <= 1e-12


def test_varactor_two_antipodal_loads():
    ls = synth_varactor_set(2, 180.0, structural_mode=0j)
    assert angular_span(ls.gammas) == pytest.approx(180.0)


def test_varactor_span_preserved_without_structural_mode():
    ls = synth_varactor_set(21, 120.0, structural_mode=0j)
    assert angular_span(ls.gammas) == pytest.approx(120.0)
    assert angular_span(ls.structural_mode - ls.gammas) == pytest.approx(120.0)


def test_varactor_calibrated_span():
    ls = synth_varactor_set(21, 120.0)
    assert angular_span(ls.structural_mode - ls.gammas) == pytest.approx(60.0, abs=5.0)
    assert ls.structural_mode.imag == 0.0
    assert np.all(np.abs(np.abs(ls.gammas) - 1) < 1e-12)


def test_varactor_count_validation():
    with pytest.raises(ValueError):
        synth_varactor_set(1, 120.0)
    with pytest.raises(ValueError):
        arc_gammas(5, 0.0)


def test_element_gain_examples():
    assert element_gain(1.0, 1.0, 1.0, 1.0, 1.0) == 1.0
    assert element_gain(0.1, 8.357e-5, 8.357e-5, 1.25, 10.0) == pytest.approx(8.729e-9, rel=1e-3)
    assert element_gain(0.1, 0.5, 0.5, 1.0, 2.0) == pytest.approx(0.1 * element_gain(1.0, 0.5, 0.5, 1.0, 2.0))
    with pytest.raises(ValueError):
        element_gain(0.1, 0.0, 1.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        element_gain(0.1, 1.0, 1.0, -1.0, 1.0)


def test_load_table_round_trip(tmp_path):
    ls = synth_varactor_set(21, 120.0, eta=0.1)
    path = tmp_path / "loads.txt"
    write_load_table(ls, path)
    back = read_load_table(path)
    assert np.array_equal(back.gammas, ls.gammas)
    assert back.structural_mode == ls.structural_mode
    assert back.eta == ls.eta


def test_load_table_parse_errors(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("# header\nA_s = 0 0\n1 0\nnot a number\n")
    with pytest.raises(ValueError, match="bad.txt:4"):
        read_load_table(path)


def test_angular_span_wraps():
    pts = np.exp(1j * np.radians([350.0, 10.0]))
    assert angular_span(pts) == pytest.approx(20.0)
    assert math.isclose(angular_span([1.0]), 0.0)
