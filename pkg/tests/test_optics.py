import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from swapbell.fock import (
    A_MINUS,
    A_PLUS,
    A_H,
    A_V,
    B_H,
    B_V,
    D_V,
    DT_H,
    DT_V,
    E_V,
    ET_H,
    ET_V,
    LOSS_D,
    LOSS_E,
    CreationPolynomial,
)
from swapbell.optics import (
    LinearMap,
    analyzer_map,
    beam_splitter_map,
    polarizer_filter_map,
)

_angles = st.floats(min_value=-2 * math.pi, max_value=2 * math.pi,
                    allow_nan=False, allow_infinity=False)


def test_beam_splitter_matrix_is_unitary():
    inputs, outputs, matrix = beam_splitter_map().coefficient_matrix()
    assert len(inputs) == 4 and len(outputs) == 4
    gram = matrix @ matrix.conj().T
    assert np.allclose(gram, np.eye(4), atol=1e-12)


def test_beam_splitter_bunches_identical_photons():
    # two indistinguishable photons entering opposite ports leave together
    both = CreationPolynomial.creation(D_V, E_V).substitute(beam_splitter_map())
    want = (
        CreationPolynomial.creation(DT_V, DT_V)
        + CreationPolynomial.creation(ET_V, ET_V)
    ) * 0.5j
    assert both.isclose(want, tol=1e-12)
    coincidence = both.filter(lambda m: m.count(DT_V) == 1 and m.count(ET_V) == 1)
    assert not coincidence


def test_analyzer_basis_at_zero():
    mapped = analyzer_map("a", 0.0)
    assert mapped.image(A_V).isclose(CreationPolynomial.creation(A_PLUS))
    assert mapped.image(A_H).isclose(CreationPolynomial.creation(A_MINUS))


def test_analyzer_rejects_bad_station():
    with pytest.raises(ValueError):
        analyzer_map("d", 0.3)
    with pytest.raises(ValueError):
        analyzer_map("a", math.inf)


@given(_angles)
@settings(max_examples=50, deadline=None)
def test_analyzer_preserves_norm(theta):
    mapped = analyzer_map("b", theta)
    state = CreationPolynomial.creation(B_H) * 0.6 + CreationPolynomial.creation(B_V) * 0.8j
    assert state.substitute(mapped).norm_squared() == pytest.approx(1.0, abs=1e-12)


@given(_angles, _angles)
@settings(max_examples=30, deadline=None)
def test_composition_matches_sequential_substitution(t1, t2):
    analyzers = LinearMap({**analyzer_map("a", t1).images,
                           **analyzer_map("b", t2).images})
    chain = beam_splitter_map().then(analyzers)
    state = CreationPolynomial.creation(D_V, A_H, B_V)
    via_chain = state.substitute(chain)
    via_steps = state.substitute(beam_splitter_map()).substitute(analyzers)
    assert via_chain.isclose(via_steps, tol=1e-10)
    # analyzers never touch the mixer inputs
    assert analyzers.image(D_V) is None


def test_polarizer_filter_routes_blocked_polarization_to_loss():
    et_pass_v = polarizer_filter_map("et", "V")
    assert et_pass_v.lossy
    assert et_pass_v.image(ET_V).isclose(CreationPolynomial.creation(ET_V))
    assert et_pass_v.image(ET_H).isclose(CreationPolynomial.creation(LOSS_E))

    dt_pass_h = polarizer_filter_map("dt", "H")
    assert dt_pass_h.image(DT_H).isclose(CreationPolynomial.creation(DT_H))
    assert dt_pass_h.image(DT_V).isclose(CreationPolynomial.creation(LOSS_D))


def test_polarizer_filter_rejects_bad_arguments():
    with pytest.raises(ValueError):
        polarizer_filter_map("a", "V")
    with pytest.raises(ValueError):
        polarizer_filter_map("et", "Q")


def test_non_orthonormal_map_is_rejected():
    with pytest.raises(ValueError):
        LinearMap({D_V: CreationPolynomial.creation(DT_V) * 2.0})
    # the same rows are fine when declared lossy
    LinearMap({D_V: CreationPolynomial.creation(DT_V) * 2.0}, lossy=True)


def test_map_rejects_higher_degree_images():
    with pytest.raises(ValueError):
        LinearMap({D_V: CreationPolynomial.creation(DT_V, DT_V)}, lossy=True)
