"""Independent cross-checks for the polynomial pipeline.

Two kinds of reference live here:

* a dense Fock-basis simulation (`oracle_probabilities`) that carries
  normalized amplitudes on occupation tuples and pushes them through the
  same optical elements by explicit per-photon routing.  It shares no
  expansion code with :mod:`swapbell.fock`; the polynomial path expands
  operator powers symbolically, the dense path enumerates photon
  assignments and keeps factorial bookkeeping explicit;

* closed-form expressions (`analytic_probabilities`, `analytic_correlation`,
  `analytic_chsh`) for the conditional tables and the correlation function
  of both variants, against which the pipeline must agree identically.

Both are used by the test suite and by the CLI ``verify`` command.
"""

from __future__ import annotations

import itertools
import math
from functools import lru_cache

from .bell import AngleSet, _check_alpha
from .experiment import (
    Configuration,
    DetectionPattern,
    PostSelectionError,
    ProbabilityTable,
    TWO_PHOTON_PATTERNS,
)
from .fock import (
    A_H,
    A_MINUS,
    A_PLUS,
    A_V,
    B_H,
    B_MINUS,
    B_PLUS,
    B_V,
    DT_H,
    DT_V,
    D_H,
    D_V,
    ET_H,
    ET_V,
    E_H,
    E_V,
    LOSS_D,
    LOSS_E,
    MODES,
    mode_index,
)
from .optics import LinearMap, analyzer_map, beam_splitter_map, polarizer_filter_map

#: dense state: occupation tuple over MODES -> normalized amplitude
DenseState = dict[tuple[int, ...], complex]

_N = len(MODES)
_VACUUM: tuple[int, ...] = (0,) * _N

_AMP_PRUNE = 1e-14


def _apply_creation(state: DenseState, mode_pos: int) -> DenseState:
    """One creation operator on every basis ket: amp -> amp * sqrt(n + 1)."""
    out: DenseState = {}
    for occ, amp in state.items():
        n = occ[mode_pos]
        lifted = occ[:mode_pos] + (n + 1,) + occ[mode_pos + 1 :]
        out[lifted] = out.get(lifted, 0j) + amp * math.sqrt(n + 1)
    return out


def _apply_pair_emission(state: DenseState, pairs: list[tuple[int, int]]) -> DenseState:
    """Sum over the two-mode creation products of one source emission."""
    out: DenseState = {}
    for first, second in pairs:
        lifted = _apply_creation(_apply_creation(state, first), second)
        for occ, amp in lifted.items():
            out[occ] = out.get(occ, 0j) + amp
    return out


def _dense_initial_state() -> DenseState:
    """Second-order emission state, same normalization convention as the
    polynomial pipeline (global prefactor dropped)."""
    pos = mode_index
    source_ad = [(pos(A_H), pos(D_V)), (pos(A_V), pos(D_H))]
    source_eb = [(pos(E_H), pos(B_V)), (pos(E_V), pos(B_H))]
    vacuum: DenseState = {_VACUUM: 1.0 + 0j}
    once_ad = _apply_pair_emission(vacuum, source_ad)
    once_eb = _apply_pair_emission(vacuum, source_eb)
    twice_ad = _apply_pair_emission(once_ad, source_ad)
    twice_eb = _apply_pair_emission(once_eb, source_eb)
    one_each = _apply_pair_emission(once_eb, source_ad)
    total: DenseState = {}
    for part in (twice_ad, one_each, twice_eb):
        for occ, amp in part.items():
            total[occ] = total.get(occ, 0j) + amp
    return total


def _routing_table(element: LinearMap) -> dict[int, list[tuple[int, complex]]]:
    """Flatten a degree-1 substitution map into per-mode routing choices."""
    routes: dict[int, list[tuple[int, complex]]] = {}
    for mode, image in element.images.items():
        choices = []
        for mono, coeff in image.terms.items():
            (out_mode, count), = mono.items()
            if count != 1:
                raise ValueError("routing requires a degree-1 map")
            choices.append((mode_index(out_mode), coeff))
        routes[mode_index(mode)] = choices
    return routes


def apply_element(state: DenseState, element: LinearMap) -> DenseState:
    """Push a dense state through one optical element.

    Every photon is routed independently over the element's outputs and
    the amplitudes are rebuilt with explicit factorial normalization: the
    input ket contributes amp / sqrt(prod n_in!) per operator monomial,
    each routed assignment multiplies the route coefficients, and the
    resulting monomial gains sqrt(prod n_out!) when read back as a ket.
    Boson statistics (bunching and cancellations) emerge from the sum over
    assignments; nothing is inherited from the polynomial algebra.
    """
    routes = _routing_table(element)
    out: DenseState = {}
    for occ, amp in state.items():
        in_norm = 1.0
        photons: list[int] = []
        for pos, n in enumerate(occ):
            if n:
                photons.extend([pos] * n)
                in_norm *= math.factorial(n)
        base = amp / math.sqrt(in_norm)
        options = [routes.get(pos, [(pos, 1.0 + 0j)]) for pos in photons]
        for assignment in itertools.product(*options):
            coeff = base
            counts = [0] * _N
            for pos_out, route_coeff in assignment:
                coeff *= route_coeff
                counts[pos_out] += 1
            out_norm = 1.0
            for c in counts:
                if c > 1:
                    out_norm *= math.factorial(c)
            key = tuple(counts)
            out[key] = out.get(key, 0j) + coeff * math.sqrt(out_norm)
    return {occ: amp for occ, amp in out.items() if abs(amp) > _AMP_PRUNE}


def total_weight(state: DenseState) -> float:
    """Sum of squared amplitude magnitudes."""
    return sum(amp.real * amp.real + amp.imag * amp.imag for amp in state.values())


_ET_H, _ET_V = mode_index(ET_H), mode_index(ET_V)
_DT_H, _DT_V = mode_index(DT_H), mode_index(DT_V)
_LOSS_E, _LOSS_D = mode_index(LOSS_E), mode_index(LOSS_D)
_STATION = tuple(mode_index(m) for m in (A_PLUS, A_MINUS, B_PLUS, B_MINUS))


def _trigger_keep(occ: tuple[int, ...], variant: str) -> bool:
    if variant == "A":
        return occ[_ET_H] + occ[_ET_V] >= 1 and occ[_DT_H] + occ[_DT_V] >= 1
    return (
        occ[_ET_V] == 1
        and occ[_DT_H] == 1
        and occ[_LOSS_E] == 0
        and occ[_LOSS_D] == 0
    )


@lru_cache(maxsize=None)
def _dense_selected(variant: str) -> tuple[tuple[tuple[tuple[int, ...], complex], ...], float]:
    state = apply_element(_dense_initial_state(), beam_splitter_map())
    if variant == "B":
        state = apply_element(state, polarizer_filter_map("et", "V"))
        state = apply_element(state, polarizer_filter_map("dt", "H"))
    selected = {occ: amp for occ, amp in state.items() if _trigger_keep(occ, variant)}
    if not selected:
        raise PostSelectionError(f"dense post-selection for variant {variant} is empty")
    return tuple(selected.items()), total_weight(selected)


def oracle_probabilities(config: Configuration) -> ProbabilityTable:
    """Conditional pattern probabilities from the dense reference path."""
    selected_items, norm = _dense_selected(config.variant)
    state: DenseState = dict(selected_items)
    state = apply_element(state, analyzer_map("a", config.theta1))
    state = apply_element(state, analyzer_map("b", config.theta2))
    weights: dict[DetectionPattern, float] = {}
    for occ, amp in state.items():
        pattern = DetectionPattern(*(occ[pos] for pos in _STATION))
        weights[pattern] = weights.get(pattern, 0.0) + (amp.real * amp.real + amp.imag * amp.imag)
    entries = {p: weights.get(p, 0.0) / norm for p in TWO_PHOTON_PATTERNS}
    return ProbabilityTable(entries, conditioned_on=f"dense reference, variant {config.variant}")


# -- closed-form references --------------------------------------------------


def analytic_probabilities(variant: str, theta1: float, theta2: float) -> ProbabilityTable:
    """The conditional tables in closed form.

    Variant A: every one-station double event carries constant weight 2/13
    and the split events carry sin^2/cos^2 of the angle difference over 26.
    Variant B: the one-station events inherit fringes in the doubled local
    angle, the split events keep the difference fringes over 10.
    """
    diff = theta1 - theta2
    sin_d2, cos_d2 = math.sin(diff) ** 2, math.cos(diff) ** 2
    if variant == "A":
        entries = {
            DetectionPattern(1, 1, 0, 0): 2 / 13,
            DetectionPattern(2, 0, 0, 0): 2 / 13,
            DetectionPattern(0, 2, 0, 0): 2 / 13,
            DetectionPattern(0, 0, 1, 1): 2 / 13,
            DetectionPattern(0, 0, 2, 0): 2 / 13,
            DetectionPattern(0, 0, 0, 2): 2 / 13,
            DetectionPattern(1, 0, 1, 0): sin_d2 / 26,
            DetectionPattern(0, 1, 0, 1): sin_d2 / 26,
            DetectionPattern(1, 0, 0, 1): cos_d2 / 26,
            DetectionPattern(0, 1, 1, 0): cos_d2 / 26,
        }
    elif variant == "B":
        cos1sq = math.cos(2 * theta1) ** 2
        cos2sq = math.cos(2 * theta2) ** 2
        sin1sq = math.sin(2 * theta1) ** 2
        sin2sq = math.sin(2 * theta2) ** 2
        entries = {
            DetectionPattern(1, 1, 0, 0): (2 / 5) * cos1sq,
            DetectionPattern(2, 0, 0, 0): (1 / 5) * sin1sq,
            DetectionPattern(0, 2, 0, 0): (1 / 5) * sin1sq,
            DetectionPattern(0, 0, 1, 1): (2 / 5) * cos2sq,
            DetectionPattern(0, 0, 2, 0): (1 / 5) * sin2sq,
            DetectionPattern(0, 0, 0, 2): (1 / 5) * sin2sq,
            DetectionPattern(1, 0, 1, 0): sin_d2 / 10,
            DetectionPattern(0, 1, 0, 1): sin_d2 / 10,
            DetectionPattern(1, 0, 0, 1): cos_d2 / 10,
            DetectionPattern(0, 1, 1, 0): cos_d2 / 10,
        }
    else:
        raise ValueError(f"variant must be 'A' or 'B', got {variant!r}")
    return ProbabilityTable(entries, conditioned_on=f"closed form, variant {variant}")


def analytic_correlation(variant: str, theta1: float, theta2: float, alpha: float) -> float:
    """Closed form of the correlation function for either variant."""
    alpha = _check_alpha(alpha)
    if variant == "A":
        return -math.cos(2 * (theta1 - theta2)) / 13 + 4 * (1 + 2 * alpha) / 13
    if variant == "B":
        return (
            -math.cos(2 * (theta1 - theta2)) / 5
            + (2 / 5) * (1 - alpha) * (math.cos(2 * theta1) ** 2 + math.cos(2 * theta2) ** 2)
            + (4 / 5) * alpha
        )
    raise ValueError(f"variant must be 'A' or 'B', got {variant!r}")


def analytic_chsh(variant: str, angles: AngleSet, alpha: float) -> float:
    """Closed form of the CHSH combination, for cross-checking the pipeline."""
    return (
        analytic_correlation(variant, angles.theta1, angles.theta2, alpha)
        + analytic_correlation(variant, angles.theta1, angles.theta2p, alpha)
        + analytic_correlation(variant, angles.theta1p, angles.theta2, alpha)
        - analytic_correlation(variant, angles.theta1p, angles.theta2p, alpha)
    )
