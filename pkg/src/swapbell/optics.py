"""Linear optical elements as substitution maps on creation operators.

Every element is a :class:`LinearMap`: a dict from input modes to degree-1
polynomials in output modes.  Applying an element to a state is then just
``state.substitute(map)``.  Maps that are not marked lossy must have
orthonormal rows, i.e. they embed unitarily into the larger mode space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .fock import (
    CreationPolynomial,
    DT_H,
    DT_V,
    ET_H,
    ET_V,
    D_H,
    D_V,
    E_H,
    E_V,
    LOSS_D,
    LOSS_E,
    Mode,
    mode_index,
)

_ROW_TOL = 1e-12

_STATION_OUTPUTS = {
    "a": (Mode("a+"), Mode("a-")),
    "b": (Mode("b+"), Mode("b-")),
}

_TRIGGER_LOSS = {"et": LOSS_E, "dt": LOSS_D}


@dataclass(frozen=True, eq=False)
class LinearMap:
    """Mode substitution x_k -> sum_j u_jk y_j, one polynomial per input.

    ``lossy`` marks elements whose outputs are partly discarded downstream
    (polarizer ports routed to loss channels); the substitution itself is
    still a relabeling with orthonormal rows, but the flag documents that
    row orthonormality is not required.
    """

    images: Mapping[Mode, CreationPolynomial]
    lossy: bool = False

    def __post_init__(self) -> None:
        frozen = {}
        for mode, img in self.images.items():
            if not isinstance(mode, Mode):
                raise TypeError("map domain must consist of Mode keys")
            for mono in img.terms:
                if mono.degree != 1:
                    raise ValueError(f"image of {mode} is not degree 1: {img!r}")
            frozen[mode] = img
        object.__setattr__(self, "images", frozen)
        if not self.lossy:
            self._check_orthonormal_rows()

    def _check_orthonormal_rows(self) -> None:
        rows = []
        for mode in self.images:
            vec: dict[Mode, complex] = {}
            for mono, c in self.images[mode].terms.items():
                (out_mode, _), = mono.items()
                vec[out_mode] = vec.get(out_mode, 0j) + c
            rows.append(vec)
        for i, ri in enumerate(rows):
            for j in range(i, len(rows)):
                rj = rows[j]
                overlap = sum(c * rj[m].conjugate() for m, c in ri.items() if m in rj)
                expected = 1.0 if i == j else 0.0
                if abs(overlap - expected) > _ROW_TOL:
                    raise ValueError("map rows are not orthonormal (not a unitary embedding)")

    def coefficient_matrix(self) -> tuple[list[Mode], list[Mode], np.ndarray]:
        """Rows follow the input modes, columns the union of output modes."""
        inputs = sorted(self.images, key=mode_index)
        out_set = {m for img in self.images.values() for mono in img.terms for m, _ in mono.items()}
        outputs = sorted(out_set, key=mode_index)
        col = {m: j for j, m in enumerate(outputs)}
        matrix = np.zeros((len(inputs), len(outputs)), dtype=complex)
        for i, mode in enumerate(inputs):
            for mono, c in self.images[mode].terms.items():
                (out_mode, _), = mono.items()
                matrix[i, col[out_mode]] = c
        return inputs, outputs, matrix

    def image(self, mode: Mode) -> CreationPolynomial | None:
        return self.images.get(mode)

    @property
    def domain(self) -> tuple[Mode, ...]:
        return tuple(sorted(self.images, key=mode_index))

    def then(self, after: "LinearMap") -> "LinearMap":
        """Composite map: apply self first, then ``after``."""
        domain = set(self.images) | set(after.images)
        images = {}
        for mode in domain:
            base = self.images.get(mode)
            if base is None:
                base = CreationPolynomial.creation(mode)
            images[mode] = base.substitute(after)
        return LinearMap(images, lossy=self.lossy or after.lossy)


def beam_splitter_map() -> LinearMap:
    """Balanced polarization-preserving mixer of the two idler arms.

    Transmission is real, reflection picks up i:
    d -> (dt + i et)/sqrt(2) and e -> (et + i dt)/sqrt(2), per polarization.
    """
    t = 1.0 / math.sqrt(2.0)
    r = 1j / math.sqrt(2.0)
    images = {
        D_H: t * CreationPolynomial.creation(DT_H) + r * CreationPolynomial.creation(ET_H),
        D_V: t * CreationPolynomial.creation(DT_V) + r * CreationPolynomial.creation(ET_V),
        E_H: t * CreationPolynomial.creation(ET_H) + r * CreationPolynomial.creation(DT_H),
        E_V: t * CreationPolynomial.creation(ET_V) + r * CreationPolynomial.creation(DT_V),
    }
    return LinearMap(images)


def analyzer_map(station: str, theta: float) -> LinearMap:
    """Polarization analyzer of one station, rotated by ``theta`` radians.

    The V component goes to the + output with weight cos(theta), to the -
    output with sin(theta); the H component is the orthogonal combination.
    """
    if station not in _STATION_OUTPUTS:
        raise ValueError(f"station must be 'a' or 'b', got {station!r}")
    if not (isinstance(theta, (int, float)) and math.isfinite(theta)):
        raise ValueError(f"analyzer angle must be finite, got {theta!r}")
    plus, minus = _STATION_OUTPUTS[station]
    c, s = math.cos(theta), math.sin(theta)
    images = {
        Mode(station, "V"): c * CreationPolynomial.creation(plus) + s * CreationPolynomial.creation(minus),
        Mode(station, "H"): -s * CreationPolynomial.creation(plus) + c * CreationPolynomial.creation(minus),
    }
    return LinearMap(images)


def polarizer_filter_map(trigger: str, passing: str) -> LinearMap:
    """Polarizer in front of one trigger detector.

    The passing polarization keeps its mode; the blocked one is relabeled
    into that arm's loss channel, to be discarded by post-selection.
    """
    if trigger not in _TRIGGER_LOSS:
        raise ValueError(f"trigger arm must be 'et' or 'dt', got {trigger!r}")
    if passing not in ("H", "V"):
        raise ValueError(f"passing polarization must be 'H' or 'V', got {passing!r}")
    blocked = "H" if passing == "V" else "V"
    images = {
        Mode(trigger, passing): CreationPolynomial.creation(Mode(trigger, passing)),
        Mode(trigger, blocked): CreationPolynomial.creation(_TRIGGER_LOSS[trigger]),
    }
    return LinearMap(images, lossy=True)
