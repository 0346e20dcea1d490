import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_terms
from tagsurface.channel import ChannelSet
from tagsurface.loads import ModulationAlphabet, modulation_alphabet, synth_varactor_set
from tagsurface.optimizer import (
    CapacityError,
    ElementTerms,
    breakpoints_k2,
    brute_force,
    dump_instance,
    element_terms,
    envelope_breakpoints,
    load_decision,
    load_instance,
    optimal_config_factored,
    optimal_config_general,
    optimal_config_k2,
    optimize,
    received_amplitude,
)

REL = 1e-9


def close(a, b):
    return abs(a - b) <= REL * max(abs(b), 1e-300)


# ---- worked examples -----------------------------------------------------

def test_element_terms_examples():
    alpha = ModulationAlphabet(np.array([-1.0, 1.0], dtype=complex), 1.0)
    empty = element_terms(ChannelSet(2j, np.zeros(0)), 4.0, np.zeros(0), alpha)
    assert empty.num_elements == 0 and empty.y0 == 4j
    one = element_terms(ChannelSet(1.0, np.array([1.0])), 1.0, [1.0], alpha)
    np.testing.assert_array_equal(one.terms, [[-1, 1]])
    unit = ModulationAlphabet(np.array([1.0, 1.0], dtype=complex), 1.0)
    two = element_terms(ChannelSet(1.0, np.array([1j])), 1.0, [4.0], unit)
    np.testing.assert_allclose(two.terms, [[2j, 2j]])
    with pytest.raises(ValueError):
        element_terms(ChannelSet(1.0, np.array([1j, 1j])), 1.0, [4.0], unit)


def test_load_decision_examples():
    assert load_decision(0.0, [1, -1]) == 0
    assert load_decision(math.pi, [1, -1]) == 1
    assert load_decision(0.0, [1j, -1j]) == 0


def test_breakpoints_k2_examples():
    np.testing.assert_allclose(breakpoints_k2(ElementTerms(0, [[1, -1]])), [math.pi / 2, 3 * math.pi / 2])
    q = np.exp(1j * math.pi / 4)
    np.testing.assert_allclose(breakpoints_k2(ElementTerms(0, [[q, -q]])), [3 * math.pi / 4, 7 * math.pi / 4])


def test_breakpoints_k2_match_decision_flips(rng):
    terms = random_terms(rng, 2, 2)
    bps = breakpoints_k2(terms)
    assert bps.size == 4 and np.all(np.diff(bps) >= 0)
    eps = 1e-7
    for b in bps:
        flips = [
            load_decision(b - eps, terms.terms[m]) != load_decision(b + eps, terms.terms[m]) for m in range(2)
        ]
        assert sum(flips) == 1


def test_k2_single_element_examples():
    sol = optimal_config_k2(ElementTerms(1.0, [[0.5, -0.5]]))
    assert sol.config.tolist() == [0] and sol.amplitude == pytest.approx(1.5)
    terms = ElementTerms(0.0, [[0.3 * np.exp(1j * math.pi), 0.8 * np.exp(1j * math.pi / 3)]])
    sol = optimal_config_k2(terms)
    assert sol.config.tolist() == [1] and sol.amplitude == pytest.approx(0.8)


def test_k2_matches_brute_force_m12():
    rng = np.random.default_rng(2024)
    for _ in range(200):
        terms = random_terms(rng, 12, 2)
        assert close(optimal_config_k2(terms).amplitude, brute_force(terms).amplitude)


def fine_grid_switches(terms_m, samples=1_000_000):
    phi = np.arange(samples) * (2 * math.pi / samples)
    best = np.argmax((np.exp(-1j * phi)[:, None] * np.asarray(terms_m)[None, :]).real, axis=1)
    change = np.flatnonzero(best != np.roll(best, 1))
    return phi[change]


def test_envelope_k3_symmetric():
    terms_m = [1, np.exp(2j * math.pi / 3), np.exp(-2j * math.pi / 3)]
    got = envelope_breakpoints(terms_m)
    np.testing.assert_allclose(got, [math.pi / 3, math.pi, 5 * math.pi / 3], atol=1e-12)
    oracle = fine_grid_switches(terms_m)
    np.testing.assert_allclose(np.sort(oracle), got, atol=2 * math.pi / 1_000_000 + 1e-12)


def test_envelope_random_against_fine_grid():
    rng = np.random.default_rng(5)
    for k in (3, 4, 6):
        terms_m = rng.standard_normal(k) + 1j * rng.standard_normal(k)
        got = envelope_breakpoints(terms_m)
        oracle = np.sort(fine_grid_switches(terms_m, 200_000))
        assert got.size == oracle.size
        np.testing.assert_allclose(got, oracle, atol=2 * math.pi / 200_000 + 1e-12)


def test_envelope_k2_consistent_with_breakpoints_k2(rng):
    terms = random_terms(rng, 1, 2)
    np.testing.assert_allclose(envelope_breakpoints(terms.terms[0]), breakpoints_k2(terms), atol=1e-15)


def test_envelope_identical_terms_is_empty():
    assert envelope_breakpoints([0.4 - 0.2j, 0.4 - 0.2j]).size == 0


def test_envelope_collinear_terms_swap_at_quadrature():
    # the smaller copy wins whenever the projection is negative
    got = envelope_breakpoints([10.0, 0.1])
    np.testing.assert_allclose(got, [math.pi / 2, 3 * math.pi / 2])
    np.testing.assert_allclose(fine_grid_switches([10.0, 0.1], 100_000), got, atol=1e-4)


def test_general_matches_k2(rng):
    for _ in range(50):
        terms = random_terms(rng, int(rng.integers(0, 15)), 2)
        a, b = optimal_config_k2(terms), optimal_config_general(terms)
        assert close(a.amplitude, b.amplitude) or a.amplitude == b.amplitude
        assert received_amplitude(terms, b.config) == pytest.approx(b.amplitude)


def test_general_k21_matches_brute_force_m4():
    rng = np.random.default_rng(77)
    symbols = modulation_alphabet(synth_varactor_set(21, 120.0)).symbols
    for _ in range(100):
        coeffs = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        terms = ElementTerms(complex(rng.standard_normal(), rng.standard_normal()), coeffs[:, None] * symbols)
        assert close(optimal_config_general(terms).amplitude, brute_force(terms).amplitude)


@pytest.mark.parametrize("k", [2, 3, 7, 21])
def test_single_element_any_k(rng, k):
    terms = random_terms(rng, 1, k)
    expected = np.max(np.abs(terms.y0 + terms.terms[0]))
    assert optimize(terms).amplitude == pytest.approx(expected, rel=1e-12)


def test_brute_force_examples(rng):
    assert brute_force(ElementTerms(3 - 4j, np.zeros((0, 2)))).amplitude == 5.0
    terms = random_terms(rng, 1, 2)
    assert brute_force(terms).amplitude == pytest.approx(np.abs(terms.y0 + terms.terms[0]).max())
    terms = random_terms(np.random.default_rng(33), 3, 3)
    a, b = brute_force(terms), optimal_config_general(terms)
    assert close(a.amplitude, b.amplitude) and close(b.amplitude, a.amplitude)
    np.testing.assert_array_equal(a.config, b.config)


def test_brute_force_capacity():
    with pytest.raises(CapacityError):
        brute_force(ElementTerms(1.0, np.ones((30, 2))))


def test_received_amplitude_examples():
    assert received_amplitude(ElementTerms(2j, np.zeros((3, 2))), [0, 1, 0]) == 2.0
    assert received_amplitude(ElementTerms(0, [[1, 0], [0, 1]]), [0, 1]) == 2.0
    assert received_amplitude(ElementTerms(1, [[np.exp(1j * math.pi), 0]]), [0]) == pytest.approx(0, abs=1e-15)
    with pytest.raises(ValueError):
        received_amplitude(ElementTerms(0, [[1, 0]]), [2])
    with pytest.raises(ValueError):
        received_amplitude(ElementTerms(0, [[1, 0]]), [0, 0])


# ---- properties ----------------------------------------------------------

instances = st.tuples(st.integers(0, 2**32 - 1), st.integers(0, 10), st.integers(2, 4))


def small(m, k):
    while k**m > 20_000:
        m -= 1
    return m


@settings(max_examples=150, deadline=None)
@given(instances)
def test_oracle_equivalence(params):
    seed, m, k = params
    terms = random_terms(np.random.default_rng(seed), small(m, k), k)
    fast = optimize(terms)
    assert close(fast.amplitude, brute_force(terms).amplitude)
    assert received_amplitude(terms, fast.config) == pytest.approx(fast.amplitude, rel=1e-12)


@settings(max_examples=100, deadline=None)
@given(instances, st.floats(0, 2 * math.pi), st.floats(1e-3, 1e3))
def test_rotation_and_scaling_invariance(params, theta, scale):
    seed, m, k = params
    terms = random_terms(np.random.default_rng(seed), small(m, k), k)
    base = optimize(terms).amplitude
    moved = optimize(ElementTerms(scale * np.exp(1j * theta) * terms.y0, scale * np.exp(1j * theta) * terms.terms))
    assert moved.amplitude == pytest.approx(scale * base, rel=1e-9)


@settings(max_examples=100, deadline=None)
@given(instances)
def test_factored_matches_general(params):
    seed, m, k = params
    rng = np.random.default_rng(seed)
    coeffs = rng.standard_normal(m) + 1j * rng.standard_normal(m)
    symbols = rng.standard_normal(k) + 1j * rng.standard_normal(k)
    y0 = complex(rng.standard_normal(), rng.standard_normal())
    terms = ElementTerms(y0, coeffs[:, None] * symbols[None, :])
    assert optimal_config_factored(y0, coeffs, symbols).amplitude == pytest.approx(
        optimal_config_general(terms).amplitude, rel=1e-12
    )


def test_breakpoint_count_bound(rng):
    for k in (2, 3, 5, 9):
        table = random_terms(rng, 1, k).terms[0]
        assert envelope_breakpoints(table).size <= k
    terms = random_terms(rng, 40, 2)
    assert breakpoints_k2(terms).size <= 2 * 40


def test_optimum_dominates_direct_and_random_configs(rng):
    terms = random_terms(rng, 50, 3)
    best = optimize(terms).amplitude
    for _ in range(200):
        config = rng.integers(0, 3, size=50)
        assert received_amplitude(terms, config) <= best * (1 + 1e-12)


# ---- degenerate inputs ---------------------------------------------------

def test_identical_elements_coincident_breakpoints():
    row = np.array([1 + 1j, -0.5 + 0.2j])
    terms = ElementTerms(0.3 - 0.1j, np.tile(row, (8, 1)))
    assert close(optimal_config_k2(terms).amplitude, brute_force(terms).amplitude)


def test_equal_terms_and_zero_rows():
    terms = ElementTerms(1.0, [[0.5, 0.5], [0, 0], [1j, -1j]])
    sol = optimize(terms)
    assert sol.config[1] == 0
    assert close(sol.amplitude, brute_force(terms).amplitude)


def test_zero_direct_term(rng):
    terms = ElementTerms(0.0, random_terms(rng, 9, 2).terms)
    assert close(optimize(terms).amplitude, brute_force(terms).amplitude)


def test_all_zero_everything():
    sol = optimize(ElementTerms(0.0, np.zeros((4, 3))))
    assert sol.amplitude == 0.0
    assert sol.config.tolist() == [0, 0, 0, 0]


def test_empty_surface():
    sol = optimize(ElementTerms(1 + 1j, np.zeros((0, 2))))
    assert sol.config.size == 0 and sol.amplitude == pytest.approx(math.sqrt(2))


def test_instance_dump_round_trip(tmp_path, rng):
    terms = random_terms(rng, 6, 3)
    path = tmp_path / "inst.txt"
    dump_instance(terms, path)
    back = load_instance(path)
    assert back.y0 == terms.y0
    assert np.array_equal(back.terms, terms.terms)


def test_instance_parse_errors(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("1 0\n1 0 2\n")
    with pytest.raises(ValueError):
        load_instance(path)
    path.write_text("1 0\n1 0 2 0\n1 0\n")
    with pytest.raises(ValueError):
        load_instance(path)
