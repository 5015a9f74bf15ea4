"""The swapping interferometer, from pair sources to detection statistics.

Two spontaneous parametric down-conversion sources each emit polarization
entangled pairs: one into signal arm ``a`` and idler arm ``d``, the other
into idler arm ``e`` and signal arm ``b``.  The idlers meet on a balanced
beam splitter whose outputs ``dt`` and ``et`` feed the trigger detectors;
the signals pass rotatable analyzers into the station outputs.  Keeping
terms up to two pair emissions makes the double-emission amplitudes of a
single source interfere with the genuine one-pair-each amplitudes, which
is the whole point of the exercise: a trigger coincidence does not project
the signals onto a clean entangled state.

Two trigger configurations are modeled:

* variant ``A``: a coincidence of the two trigger detectors, regardless of
  polarization;
* variant ``B``: polarizers in front of the triggers (V passes toward the
  ``et`` detector, H toward the ``dt`` detector) and exactly one photon in
  each passing mode.

All probabilities are conditioned on the trigger event, so the global
emission prefactor of the source state is dropped throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Mapping, NamedTuple

from .fock import (
    A_H,
    A_MINUS,
    A_PLUS,
    A_V,
    B_H,
    B_MINUS,
    B_PLUS,
    B_V,
    CreationPolynomial,
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
    Monomial,
)
from .optics import LinearMap, analyzer_map, beam_splitter_map, polarizer_filter_map

VARIANTS = ("A", "B")

#: probabilities may undershoot zero by at most this much before it's an error
NEGATIVE_TOL = 1e-12

#: a conditional distribution must sum to one within this
SUM_TOL = 1e-9


class PostSelectionError(RuntimeError):
    """Raised when post-selection leaves nothing, which means a broken pipeline."""


@dataclass(frozen=True)
class Configuration:
    """One experimental setting: trigger variant plus both analyzer angles."""

    variant: str
    theta1: float
    theta2: float

    def __post_init__(self) -> None:
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}, got {self.variant!r}")
        for name in ("theta1", "theta2"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value)):
                raise ValueError(f"{name} must be a finite angle in radians, got {value!r}")


class DetectionPattern(NamedTuple):
    """Photon counts at the four station outputs (a+, a-, b+, b-)."""

    n_a_plus: int
    n_a_minus: int
    n_b_plus: int
    n_b_minus: int

    @property
    def total(self) -> int:
        return sum(self)

    def label(self) -> str:
        return (
            f"{self.n_a_plus}a+,{self.n_a_minus}a-;"
            f"{self.n_b_plus}b+,{self.n_b_minus}b-"
        )


#: the ten ways two signal photons can land on the four outputs, in the
#: order used for reporting: both at station a, both at b, then split.
TWO_PHOTON_PATTERNS: tuple[DetectionPattern, ...] = (
    DetectionPattern(1, 1, 0, 0),
    DetectionPattern(2, 0, 0, 0),
    DetectionPattern(0, 2, 0, 0),
    DetectionPattern(0, 0, 1, 1),
    DetectionPattern(0, 0, 2, 0),
    DetectionPattern(0, 0, 0, 2),
    DetectionPattern(1, 0, 1, 0),
    DetectionPattern(0, 1, 0, 1),
    DetectionPattern(1, 0, 0, 1),
    DetectionPattern(0, 1, 1, 0),
)

_CONDITION_LABEL = {
    "A": "both trigger detectors fire (any polarization)",
    "B": "one V photon at the et trigger and one H photon at the dt trigger, no loss",
}


@dataclass(frozen=True)
class ProbabilityTable:
    """Conditional distribution over detection patterns.

    Tiny negative entries from float rounding are clamped to zero at
    construction; anything more negative, or a total off from one, raises.
    """

    entries: Mapping[DetectionPattern, float]
    conditioned_on: str

    def __post_init__(self) -> None:
        cleaned: dict[DetectionPattern, float] = {}
        for pattern, p in self.entries.items():
            if p < -NEGATIVE_TOL:
                raise ValueError(f"negative probability {p!r} for {pattern.label()}")
            cleaned[pattern] = 0.0 if p < 0.0 else float(p)
        total = sum(cleaned.values())
        if abs(total - 1.0) > SUM_TOL:
            raise ValueError(f"probabilities sum to {total!r}, not 1")
        object.__setattr__(self, "entries", cleaned)

    def __getitem__(self, pattern: DetectionPattern) -> float:
        return self.entries.get(pattern, 0.0)

    def total(self) -> float:
        return sum(self.entries.values())

    def rows(self) -> list[tuple[DetectionPattern, float]]:
        """Entries in canonical reporting order."""
        listed = [(p, self.entries[p]) for p in TWO_PHOTON_PATTERNS if p in self.entries]
        extras = sorted(set(self.entries) - set(TWO_PHOTON_PATTERNS))
        listed.extend((p, self.entries[p]) for p in extras)
        return listed


def build_pdc_state() -> CreationPolynomial:
    """Both sources expanded to second order in the pair emission amplitude.

    Each source contributes (a_H d_V + a_V d_H) resp. (e_H b_V + e_V b_H)
    per emitted pair; the second-order component is the sum of the three
    ways to distribute two emissions over the two sources.  The common
    prefactor (squared emission amplitude over two) is dropped, since every
    reported probability is conditioned on the trigger anyway.
    """
    source_ad = CreationPolynomial.creation(A_H, D_V) + CreationPolynomial.creation(A_V, D_H)
    source_eb = CreationPolynomial.creation(E_H, B_V) + CreationPolynomial.creation(E_V, B_H)
    return source_ad * source_ad + source_ad * source_eb + source_eb * source_eb


def _both_triggers(mono: Monomial) -> bool:
    return (
        mono.count(ET_H) + mono.count(ET_V) >= 1
        and mono.count(DT_H) + mono.count(DT_V) >= 1
    )


def _filtered_triggers(mono: Monomial) -> bool:
    return (
        mono.count(ET_V) == 1
        and mono.count(DT_H) == 1
        and mono.count(LOSS_E) == 0
        and mono.count(LOSS_D) == 0
    )


def post_select(state: CreationPolynomial, variant: str) -> CreationPolynomial:
    """Keep only the terms compatible with the variant's trigger event.

    Expects the state after the beam splitter (and, for variant B, after
    both polarizer filters).  An empty result means the pipeline upstream
    is inconsistent and raises rather than returning silently.
    """
    if variant == "A":
        selected = state.filter(_both_triggers)
    elif variant == "B":
        selected = state.filter(_filtered_triggers)
    else:
        raise ValueError(f"variant must be one of {VARIANTS}, got {variant!r}")
    if not selected:
        raise PostSelectionError(f"post-selection for variant {variant} removed every term")
    return selected


@lru_cache(maxsize=None)
def _selected_state(variant: str) -> tuple[CreationPolynomial, float]:
    """Angle-independent part of the pipeline: source, mixer, trigger.

    Returns the post-selected state and its squared norm.  Cached because
    the CHSH optimizer asks for thousands of analyzer settings.
    """
    state = build_pdc_state().substitute(beam_splitter_map())
    if variant == "B":
        state = state.substitute(polarizer_filter_map("et", "V"))
        state = state.substitute(polarizer_filter_map("dt", "H"))
    selected = post_select(state, variant)
    return selected, selected.norm_squared()


def station_probabilities(config: Configuration) -> ProbabilityTable:
    """Conditional pattern probabilities for one experimental setting.

    The trigger part of the state is fixed; only the two analyzer
    substitutions depend on the angles.  Distinct monomials are mutually
    orthogonal, so each pattern's probability is a plain weighted sum of
    squared coefficients over the terms whose station counts match.
    """
    selected, norm2 = _selected_state(config.variant)
    both_analyzers = LinearMap(
        {
            **analyzer_map("a", config.theta1).images,
            **analyzer_map("b", config.theta2).images,
        }
    )
    analyzed = selected.substitute(both_analyzers)
    weights: dict[DetectionPattern, float] = {}
    for mono, coeff in analyzed.terms.items():
        pattern = DetectionPattern(
            mono.count(A_PLUS), mono.count(A_MINUS), mono.count(B_PLUS), mono.count(B_MINUS)
        )
        weights[pattern] = weights.get(pattern, 0.0) + (
            (coeff.real * coeff.real + coeff.imag * coeff.imag) * mono.factorial_weight()
        )
    entries = {p: weights.get(p, 0.0) / norm2 for p in TWO_PHOTON_PATTERNS}
    return ProbabilityTable(entries, conditioned_on=_CONDITION_LABEL[config.variant])


def hom_scan(theta1_grid: Iterable[float]) -> list[tuple[float, float]]:
    """Coincidence probability of the two station-a detectors, variant B.

    Sweeping the station-a analyzer shows the two-photon interference dip:
    the amplitude for one photon in each output vanishes at theta1 = pi/4.
    The station-b angle is irrelevant for this pattern and fixed at zero.
    """
    target = DetectionPattern(1, 1, 0, 0)
    out = []
    for theta1 in theta1_grid:
        table = station_probabilities(Configuration("B", theta1, 0.0))
        out.append((theta1, table[target]))
    return out
