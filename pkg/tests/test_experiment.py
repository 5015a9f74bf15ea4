import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from swapbell.experiment import (
    Configuration,
    DetectionPattern,
    PostSelectionError,
    ProbabilityTable,
    TWO_PHOTON_PATTERNS,
    build_pdc_state,
    hom_scan,
    post_select,
    station_probabilities,
)
from swapbell.fock import (
    A_H,
    A_V,
    B_H,
    B_V,
    D_H,
    D_V,
    DT_H,
    E_H,
    ET_V,
    CreationPolynomial,
    Monomial,
)

_angles = st.floats(min_value=-math.pi, max_value=math.pi,
                    allow_nan=False, allow_infinity=False)


def test_source_state_structure():
    state = build_pdc_state()
    assert len(state) == 10
    # double emission from one crystal beats one emission from each
    assert state.coefficient(Monomial({A_H: 1, A_V: 1, D_V: 1, D_H: 1})) == pytest.approx(2.0)
    assert state.coefficient(Monomial({A_H: 1, D_V: 1, E_H: 1, B_V: 1})) == pytest.approx(1.0)
    assert state.norm_squared() == pytest.approx(28.0)


def test_post_selected_norms():
    from swapbell.optics import beam_splitter_map

    mixed = build_pdc_state().substitute(beam_splitter_map())
    assert post_select(mixed, "A").norm_squared() == pytest.approx(13.0, abs=1e-10)
    assert post_select(mixed, "B").norm_squared() == pytest.approx(2.5, abs=1e-10)


def test_selected_state_structure():
    # the coincidence-trigger component mixes a same-station pair term with a
    # cross-station singlet-like term at a 2:1 amplitude ratio, a quarter turn
    # out of phase
    from swapbell.optics import beam_splitter_map

    mixed = build_pdc_state().substitute(beam_splitter_map())
    selected = post_select(mixed, "A")
    sector = lambda m: m.count(ET_V) == 1 and m.count(DT_H) == 1
    part = selected.filter(lambda m: sector(m) and m.degree == 4)

    same_a = part.coefficient(Monomial({A_H: 1, A_V: 1, ET_V: 1, DT_H: 1}))
    same_b = part.coefficient(Monomial({B_H: 1, B_V: 1, ET_V: 1, DT_H: 1}))
    cross_hv = part.coefficient(Monomial({A_H: 1, B_V: 1, ET_V: 1, DT_H: 1}))
    cross_vh = part.coefficient(Monomial({A_V: 1, B_H: 1, ET_V: 1, DT_H: 1}))

    assert same_a == pytest.approx(same_b)
    assert cross_hv == pytest.approx(-cross_vh)
    assert abs(same_a) == pytest.approx(2 * abs(cross_hv))
    # pair term is imaginary, the cross term real: they cannot interfere
    assert abs(same_a.real) < 1e-12 and abs(cross_hv.imag) < 1e-12


def test_post_select_requires_triggered_terms():
    with pytest.raises(PostSelectionError):
        post_select(CreationPolynomial.creation(A_H, A_V), "A")


def test_configuration_validation():
    with pytest.raises(ValueError):
        Configuration("C", 0.0, 0.0)
    with pytest.raises(ValueError):
        Configuration("A", math.nan, 0.0)


def test_pattern_labels_and_order():
    assert TWO_PHOTON_PATTERNS[0] == DetectionPattern(1, 1, 0, 0)
    assert TWO_PHOTON_PATTERNS[0].label() == "1a+,1a-;0b+,0b-"
    assert TWO_PHOTON_PATTERNS[-1].label() == "0a+,1a-;1b+,0b-"
    assert all(p.total == 2 for p in TWO_PHOTON_PATTERNS)
    assert len(set(TWO_PHOTON_PATTERNS)) == 10


def test_probability_table_validation():
    base = {p: 0.0 for p in TWO_PHOTON_PATTERNS}
    good = {**base, DetectionPattern(1, 1, 0, 0): 1.0}
    table = ProbabilityTable(good, "test")
    assert table[DetectionPattern(1, 1, 0, 0)] == 1.0
    assert table.total() == pytest.approx(1.0)

    # clamps a rounding-level negative, rejects a real one
    tiny = {**good, DetectionPattern(2, 0, 0, 0): -1e-15,
            DetectionPattern(1, 1, 0, 0): 1.0 + 1e-15}
    assert ProbabilityTable(tiny, "test")[DetectionPattern(2, 0, 0, 0)] == 0.0
    with pytest.raises(ValueError):
        ProbabilityTable({**good, DetectionPattern(2, 0, 0, 0): -1e-6}, "test")
    with pytest.raises(ValueError):
        ProbabilityTable({**good, DetectionPattern(2, 0, 0, 0): 0.5}, "test")


def test_variant_a_table_at_equal_angles():
    table = station_probabilities(Configuration("A", 0.7, 0.7))
    for pattern in TWO_PHOTON_PATTERNS[:6]:
        assert table[pattern] == pytest.approx(2 / 13, abs=1e-12)
    assert table[DetectionPattern(1, 0, 1, 0)] == pytest.approx(0.0, abs=1e-12)
    assert table[DetectionPattern(1, 0, 0, 1)] == pytest.approx(1 / 26, abs=1e-12)


def test_variant_b_table_at_zero():
    table = station_probabilities(Configuration("B", 0.0, 0.0))
    assert table[DetectionPattern(1, 1, 0, 0)] == pytest.approx(2 / 5, abs=1e-12)
    assert table[DetectionPattern(2, 0, 0, 0)] == pytest.approx(0.0, abs=1e-12)
    assert table[DetectionPattern(1, 0, 0, 1)] == pytest.approx(1 / 10, abs=1e-12)
    assert table[DetectionPattern(1, 0, 1, 0)] == pytest.approx(0.0, abs=1e-12)


@given(_angles, _angles)
@settings(max_examples=40, deadline=None)
def test_tables_sum_to_one(t1, t2):
    for variant in ("A", "B"):
        table = station_probabilities(Configuration(variant, t1, t2))
        assert table.total() == pytest.approx(1.0, abs=1e-9)


@given(_angles, _angles, _angles)
@settings(max_examples=25, deadline=None)
def test_variant_a_depends_only_on_angle_difference(t1, t2, shift):
    base = station_probabilities(Configuration("A", t1, t2))
    moved = station_probabilities(Configuration("A", t1 + shift, t2 + shift))
    for pattern in TWO_PHOTON_PATTERNS:
        assert base[pattern] == pytest.approx(moved[pattern], abs=1e-9)


@given(_angles, _angles)
@settings(max_examples=25, deadline=None)
def test_quarter_turn_swaps_station_a_outputs(t1, t2):
    base = station_probabilities(Configuration("B", t1, t2))
    turned = station_probabilities(Configuration("B", t1 + math.pi / 2, t2))
    for pattern in TWO_PHOTON_PATTERNS:
        swapped = DetectionPattern(pattern.n_a_minus, pattern.n_a_plus,
                                   pattern.n_b_plus, pattern.n_b_minus)
        assert base[pattern] == pytest.approx(turned[swapped], abs=1e-9)


@given(_angles, _angles)
@settings(max_examples=20, deadline=None)
def test_half_turn_is_a_symmetry(t1, t2):
    for variant in ("A", "B"):
        base = station_probabilities(Configuration(variant, t1, t2))
        turned = station_probabilities(Configuration(variant, t1 + math.pi, t2 + math.pi))
        for pattern in TWO_PHOTON_PATTERNS:
            assert base[pattern] == pytest.approx(turned[pattern], abs=1e-9)


def test_hom_scan_dip():
    points = hom_scan([0.0, math.pi / 8, math.pi / 4])
    values = dict(points)
    assert values[0.0] == pytest.approx(2 / 5, abs=1e-10)
    assert values[math.pi / 8] == pytest.approx(1 / 5, abs=1e-10)
    assert values[math.pi / 4] == pytest.approx(0.0, abs=1e-12)
