"""Exact algebra of photon creation operators acting on the vacuum.

A state is kept as a polynomial in commuting creation operators applied to
|0>: a dict from occupation monomials to complex coefficients.  Nothing is
ever normal-ordered or truncated behind the caller's back, and vacuum
expectation values carry the exact factorial weights, so inner products of
few-photon states are exact up to float rounding.

The mode universe is fixed: six polarized spatial channels (the two signal
arms ``a``/``b``, the two idler arms ``d``/``e`` and the two mixer outputs
``dt``/``et``), four polarization-free station outputs ``a+ a- b+ b-`` and
two loss channels for blocked polarizer ports.
"""

from __future__ import annotations

import math
from collections.abc import Mapping
from dataclasses import dataclass
from types import MappingProxyType
from typing import Callable, Iterable, Iterator, Protocol

#: coefficients with magnitude at or below this are dropped after every operation
PRUNE_EPS = 1e-12

_POLARIZED = ("a", "b", "d", "e", "dt", "et")
_BARE = ("a+", "a-", "b+", "b-", "loss_e", "loss_d")


@dataclass(frozen=True, slots=True)
class Mode:
    """A single optical mode: spatial channel plus polarization.

    Station outputs and loss channels carry no polarization label; every
    other channel must be H or V.  Construction rejects anything outside
    the fixed universe.
    """

    spatial: str
    pol: str | None = None

    def __post_init__(self) -> None:
        if self.spatial in _POLARIZED:
            if self.pol not in ("H", "V"):
                raise ValueError(f"channel {self.spatial!r} needs polarization H or V, got {self.pol!r}")
        elif self.spatial in _BARE:
            if self.pol is not None:
                raise ValueError(f"channel {self.spatial!r} carries no polarization, got {self.pol!r}")
        else:
            raise ValueError(f"unknown spatial channel {self.spatial!r}")

    def __repr__(self) -> str:
        return self.spatial if self.pol is None else f"{self.spatial}_{self.pol}"


A_H = Mode("a", "H")
A_V = Mode("a", "V")
B_H = Mode("b", "H")
B_V = Mode("b", "V")
D_H = Mode("d", "H")
D_V = Mode("d", "V")
E_H = Mode("e", "H")
E_V = Mode("e", "V")
DT_H = Mode("dt", "H")
DT_V = Mode("dt", "V")
ET_H = Mode("et", "H")
ET_V = Mode("et", "V")
A_PLUS = Mode("a+")
A_MINUS = Mode("a-")
B_PLUS = Mode("b+")
B_MINUS = Mode("b-")
LOSS_E = Mode("loss_e")
LOSS_D = Mode("loss_d")

#: canonical ordering of the full mode universe
MODES: tuple[Mode, ...] = (
    A_H, A_V, B_H, B_V, D_H, D_V, E_H, E_V,
    DT_H, DT_V, ET_H, ET_V,
    A_PLUS, A_MINUS, B_PLUS, B_MINUS,
    LOSS_E, LOSS_D,
)

_MODE_ORDER: dict[Mode, int] = {m: i for i, m in enumerate(MODES)}


def mode_index(mode: Mode) -> int:
    """Position of ``mode`` in the canonical ordering ``MODES``."""
    return _MODE_ORDER[mode]


class Monomial:
    """A product of creation operators, stored as occupation counts.

    Monomials commute, so the counts are the whole story; zero counts are
    never stored and the items are kept sorted in canonical mode order,
    which makes equal monomials compare and hash equal.
    """

    __slots__ = ("_items", "_hash", "degree")

    _items: tuple[tuple[Mode, int], ...]
    degree: int

    def __init__(self, occupations: Mapping[Mode, int] | Iterable[tuple[Mode, int]] = ()) -> None:
        merged: dict[Mode, int] = {}
        items = occupations.items() if isinstance(occupations, Mapping) else occupations
        for mode, count in items:
            if not isinstance(count, int) or count < 0:
                raise ValueError(f"occupation counts must be non-negative integers, got {count!r}")
            if count:
                merged[mode] = merged.get(mode, 0) + count
        ordered = tuple(sorted(merged.items(), key=lambda mc: _MODE_ORDER[mc[0]]))
        self._items = ordered
        self._hash = hash(ordered)
        self.degree = sum(c for _, c in ordered)

    @property
    def occupations(self) -> dict[Mode, int]:
        return dict(self._items)

    def items(self) -> Iterator[tuple[Mode, int]]:
        return iter(self._items)

    def count(self, mode: Mode) -> int:
        for m, c in self._items:
            if m is mode or m == mode:
                return c
        return 0

    def factorial_weight(self) -> int:
        """Vacuum overlap of the monomial with itself: prod n! over modes."""
        w = 1
        for _, c in self._items:
            w *= math.factorial(c)
        return w

    @classmethod
    def _from_sorted(cls, items: tuple[tuple[Mode, int], ...]) -> "Monomial":
        # internal fast path: items already canonical (sorted, no zeros)
        mono = cls.__new__(cls)
        mono._items = items
        mono._hash = hash(items)
        mono.degree = sum(c for _, c in items)
        return mono

    def __mul__(self, other: "Monomial") -> "Monomial":
        if not isinstance(other, Monomial):
            return NotImplemented
        # merge two canonically sorted occupation lists
        left, right = self._items, other._items
        if not left:
            return other
        if not right:
            return self
        merged: list[tuple[Mode, int]] = []
        i = j = 0
        while i < len(left) and j < len(right):
            ml, cl = left[i]
            mr, cr = right[j]
            oi, oj = _MODE_ORDER[ml], _MODE_ORDER[mr]
            if oi == oj:
                merged.append((ml, cl + cr))
                i += 1
                j += 1
            elif oi < oj:
                merged.append((ml, cl))
                i += 1
            else:
                merged.append((mr, cr))
                j += 1
        merged.extend(left[i:])
        merged.extend(right[j:])
        return Monomial._from_sorted(tuple(merged))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Monomial) and self._items == other._items

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        if not self._items:
            return "1"
        return " ".join(f"{m}" if c == 1 else f"{m}^{c}" for m, c in self._items)


IDENTITY = Monomial()


class SubstitutionMap(Protocol):
    """Anything that can rewrite a single creation operator as a polynomial."""

    def image(self, mode: Mode) -> "CreationPolynomial | None": ...


class CreationPolynomial:
    """Finite sum of occupation monomials with complex coefficients.

    Represents the (generally unnormalized) state P|0>.  All operations
    return new polynomials with coefficients below ``PRUNE_EPS`` dropped.
    """

    __slots__ = ("_terms",)

    def __init__(
        self,
        terms: Mapping[Monomial, complex] | Iterable[tuple[Monomial, complex]] = (),
        prune_eps: float = PRUNE_EPS,
    ) -> None:
        data: dict[Monomial, complex] = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for mono, coeff in items:
            if not isinstance(mono, Monomial):
                raise TypeError(f"keys must be Monomial, got {type(mono).__name__}")
            c = data.get(mono, 0j) + complex(coeff)
            data[mono] = c
        self._terms = {m: c for m, c in data.items() if abs(c) > prune_eps}

    # -- constructors ------------------------------------------------------

    @classmethod
    def _from_clean(cls, data: dict[Monomial, complex]) -> "CreationPolynomial":
        # internal fast path: keys are known-good Monomials, only prune
        poly = cls.__new__(cls)
        poly._terms = {m: c for m, c in data.items() if abs(c) > PRUNE_EPS}
        return poly

    @classmethod
    def zero(cls) -> "CreationPolynomial":
        return cls()

    @classmethod
    def unit(cls) -> "CreationPolynomial":
        """The vacuum itself: empty monomial with coefficient 1."""
        return cls({IDENTITY: 1.0})

    @classmethod
    def creation(cls, *modes: Mode) -> "CreationPolynomial":
        """Product of one creation operator per listed mode (repeats allowed)."""
        return cls({Monomial([(m, 1) for m in modes]): 1.0})

    # -- accessors ---------------------------------------------------------

    @property
    def terms(self) -> Mapping[Monomial, complex]:
        return MappingProxyType(self._terms)

    def coefficient(self, mono: Monomial) -> complex:
        return self._terms.get(mono, 0j)

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    # -- ring operations ---------------------------------------------------

    def __add__(self, other: "CreationPolynomial") -> "CreationPolynomial":
        if not isinstance(other, CreationPolynomial):
            return NotImplemented
        data = dict(self._terms)
        for mono, c in other._terms.items():
            data[mono] = data.get(mono, 0j) + c
        return CreationPolynomial._from_clean(data)

    def __sub__(self, other: "CreationPolynomial") -> "CreationPolynomial":
        if not isinstance(other, CreationPolynomial):
            return NotImplemented
        return self + (-1.0) * other

    def __neg__(self) -> "CreationPolynomial":
        return (-1.0) * self

    def __mul__(self, other: "CreationPolynomial | complex | float") -> "CreationPolynomial":
        if isinstance(other, CreationPolynomial):
            return self.multiply(other)
        if isinstance(other, (int, float, complex)):
            return CreationPolynomial._from_clean({m: c * other for m, c in self._terms.items()})
        return NotImplemented

    __rmul__ = __mul__

    def multiply(self, other: "CreationPolynomial") -> "CreationPolynomial":
        """Polynomial product; commutative since all operators commute."""
        data: dict[Monomial, complex] = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                prod = m1 * m2
                data[prod] = data.get(prod, 0j) + c1 * c2
        return CreationPolynomial._from_clean(data)

    def __pow__(self, exponent: int) -> "CreationPolynomial":
        if not isinstance(exponent, int) or exponent < 0:
            raise ValueError("exponent must be a non-negative integer")
        out = CreationPolynomial.unit()
        for _ in range(exponent):
            out = out.multiply(self)
        return out

    # -- physics operations ------------------------------------------------

    def substitute(self, linear_map: SubstitutionMap) -> "CreationPolynomial":
        """Rewrite every creation operator through ``linear_map``.

        Modes outside the map's domain pass through untouched.  Powers are
        expanded by repeated multiplication, so bosonic interference terms
        (bunching, cancellation) come out exactly.
        """
        power_cache: dict[tuple[Mode, int], CreationPolynomial] = {}
        data: dict[Monomial, complex] = {}
        for mono, coeff in self._terms.items():
            passthrough: list[tuple[Mode, int]] = []
            factors: list[CreationPolynomial] = []
            for mode, n in mono.items():
                img = linear_map.image(mode)
                if img is None:
                    passthrough.append((mode, n))
                    continue
                key = (mode, n)
                powered = power_cache.get(key)
                if powered is None:
                    powered = img ** n
                    power_cache[key] = powered
                factors.append(powered)
            piece = CreationPolynomial._from_clean({Monomial(passthrough): coeff})
            for f in factors:
                piece = piece.multiply(f)
            for m, c in piece._terms.items():
                data[m] = data.get(m, 0j) + c
        return CreationPolynomial._from_clean(data)

    def inner_product(self, other: "CreationPolynomial") -> complex:
        """Vacuum expectation <0| P^dag Q |0> with P = self, Q = other.

        Distinct monomials are orthogonal; a shared monomial contributes
        conj(c_P) * c_Q * prod(n!) over its occupation counts.
        """
        if len(other._terms) < len(self._terms):
            return complex(other.inner_product(self)).conjugate()
        total = 0j
        for mono, c in self._terms.items():
            oc = other._terms.get(mono)
            if oc is not None:
                total += c.conjugate() * oc * mono.factorial_weight()
        return total

    def norm_squared(self) -> float:
        return self.inner_product(self).real

    def filter(self, predicate: Callable[[Monomial], bool]) -> "CreationPolynomial":
        """Keep only the terms whose monomial satisfies ``predicate``."""
        return CreationPolynomial._from_clean({m: c for m, c in self._terms.items() if predicate(m)})

    def prune(self, eps: float = PRUNE_EPS) -> "CreationPolynomial":
        return CreationPolynomial(self._terms, prune_eps=eps)

    # -- comparison helpers --------------------------------------------------

    def isclose(self, other: "CreationPolynomial", tol: float = 1e-9) -> bool:
        """True when all coefficients agree within ``tol`` (absolute)."""
        for mono in self._terms.keys() | other._terms.keys():
            if abs(self.coefficient(mono) - other.coefficient(mono)) > tol:
                return False
        return True

    def __eq__(self, other: object) -> bool:
        return isinstance(other, CreationPolynomial) and self._terms == other._terms

    def __repr__(self) -> str:
        if not self._terms:
            return "CreationPolynomial(0)"
        parts = [f"({c:.6g})*{m!r}" for m, c in sorted(self._terms.items(), key=lambda t: repr(t[0]))]
        return "CreationPolynomial(" + " + ".join(parts) + ")"
