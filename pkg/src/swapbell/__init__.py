"""Entanglement swapping with spontaneous pair sources, post-selected.

Simulates the full optical train of a two-source swapping experiment
(pair sources, idler mixing at a beam splitter, optional trigger
polarizers, polarization analyzers) on sparse creation-operator
polynomials, post-selects on the trigger detectors, and analyzes the
resulting two-station statistics: conditional pattern probabilities,
correlation functions for partially distinguishing detectors, CHSH
maximization, and the distinguishability threshold for violation.
"""

from .bell import (
    AngleSet,
    ChshResult,
    ThresholdResult,
    alpha_threshold,
    chsh,
    correlation,
    local_value,
    maximize_chsh,
)
from .experiment import (
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
from .fock import CreationPolynomial, Mode, Monomial
from .optics import LinearMap, analyzer_map, beam_splitter_map, polarizer_filter_map
from .oracle import analytic_chsh, analytic_correlation, analytic_probabilities, oracle_probabilities

__version__ = "0.1.0"

__all__ = [
    "AngleSet",
    "ChshResult",
    "Configuration",
    "CreationPolynomial",
    "DetectionPattern",
    "LinearMap",
    "Mode",
    "Monomial",
    "PostSelectionError",
    "ProbabilityTable",
    "TWO_PHOTON_PATTERNS",
    "ThresholdResult",
    "alpha_threshold",
    "analytic_chsh",
    "analytic_correlation",
    "analytic_probabilities",
    "analyzer_map",
    "beam_splitter_map",
    "build_pdc_state",
    "chsh",
    "correlation",
    "hom_scan",
    "local_value",
    "maximize_chsh",
    "oracle_probabilities",
    "polarizer_filter_map",
    "post_select",
    "station_probabilities",
]
