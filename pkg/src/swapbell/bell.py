"""CHSH analysis on top of the pipeline's detection statistics.

The reading of the four station outputs follows the coarse-grained detector
model: each station nominally sees one photon, read as +1 or -1 depending
on which output fires.  Two-photon events at one station are non-standard;
they are kept and assigned values according to how well the detectors
distinguish photon number.  The distinguishability ``alpha`` is the
probability that a double hit on a single detector is recognized as such
(and scored +1 like every other non-standard event) rather than misread as
an ordinary single click.

Only a double hit on a minus detector can flip sign under misreading, so
every expected local value is affine in alpha and the CHSH curve
S*(alpha) is monotone, which is what makes the threshold search below a
plain bisection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .experiment import Configuration, ProbabilityTable, station_probabilities

#: classical bound of the CHSH combination
CHSH_BOUND = 2.0

#: S must clear the bound by this much to count as a violation
VIOLATION_EPS = 1e-9

#: default coarse-grid resolution of the maximizer (radians per step)
GRID_STEP = math.pi / 60

#: the local refinement stops once its probe step shrinks below this
REFINE_MIN_STEP = 1e-7


def _check_alpha(alpha: float) -> float:
    if not (isinstance(alpha, (int, float)) and math.isfinite(alpha) and 0.0 <= alpha <= 1.0):
        raise ValueError(f"alpha must lie in [0, 1], got {alpha!r}")
    return float(alpha)


@dataclass(frozen=True)
class AngleSet:
    """The four analyzer settings of a CHSH run: theta1/theta1p at station a,
    theta2/theta2p at station b."""

    theta1: float
    theta1p: float
    theta2: float
    theta2p: float

    def __post_init__(self) -> None:
        for name in ("theta1", "theta1p", "theta2", "theta2p"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v)):
                raise ValueError(f"{name} must be a finite angle in radians, got {v!r}")

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.theta1, self.theta1p, self.theta2, self.theta2p)

    def doubled(self) -> tuple[float, float, float, float]:
        """The same settings as doubled angles, the natural variable of the
        correlation fringes."""
        return tuple(2.0 * v for v in self.as_tuple())


@dataclass(frozen=True)
class ChshResult:
    """Value of the CHSH combination at one angle set, with the violation flag."""

    s: float
    angles: AngleSet
    alpha: float
    violated: bool

    def __post_init__(self) -> None:
        if not (abs(self.s) <= 4.0 + 1e-9):
            raise ValueError(f"|S| cannot exceed 4, got {self.s!r}")


@dataclass(frozen=True)
class ThresholdResult:
    """Outcome of the distinguishability threshold search."""

    alpha_star: float
    always_violated: bool


def local_value(side_counts: tuple[int, int], alpha: float) -> float:
    """Expected reading of one station given its (n_plus, n_minus) counts.

    Single clicks read +1 / -1.  No photon and every recognized double
    count score +1.  A double hit on the minus detector is recognized with
    probability alpha (+1) and misread as a single minus click otherwise
    (-1), hence the expectation 2*alpha - 1.  A double hit on the plus
    detector reads +1 either way.  More than two photons cannot happen at
    the order kept by the pipeline and is rejected.
    """
    alpha = _check_alpha(alpha)
    n_plus, n_minus = side_counts
    if n_plus < 0 or n_minus < 0:
        raise ValueError(f"negative photon counts {side_counts!r}")
    total = n_plus + n_minus
    if total > 2:
        raise ValueError(f"more than two photons at one station: {side_counts!r}")
    if side_counts == (0, 1):
        return -1.0
    if side_counts == (0, 2):
        return 2.0 * alpha - 1.0
    return 1.0


def correlation(table: ProbabilityTable, alpha: float) -> float:
    """Expected product of the two stations' readings under ``table``.

    Exact factorization: patterns never place two photons at both stations
    at once, so at most one side's value is random and the expectation of
    the product is the product of expectations.
    """
    alpha = _check_alpha(alpha)
    total = 0.0
    for pattern, p in table.entries.items():
        if p == 0.0:
            continue
        v_a = local_value((pattern.n_a_plus, pattern.n_a_minus), alpha)
        v_b = local_value((pattern.n_b_plus, pattern.n_b_minus), alpha)
        total += p * v_a * v_b
    return total


@lru_cache(maxsize=None)
def _correlation_components(variant: str, theta_a: float, theta_b: float) -> tuple[float, float]:
    """Correlation at alpha=0 and its alpha-slope for one angle pair.

    The correlation is exactly affine in alpha (see ``correlation``), so
    two evaluations determine it for every alpha; caching the pair makes
    the optimizer and the threshold bisection revisit angle pairs for free.
    """
    table = station_probabilities(Configuration(variant, theta_a, theta_b))
    e0 = correlation(table, 0.0)
    e1 = correlation(table, 1.0) - e0
    return e0, e1


def _corr(variant: str, theta_a: float, theta_b: float, alpha: float) -> float:
    e0, e1 = _correlation_components(variant, theta_a, theta_b)
    return e0 + alpha * e1


def chsh(variant: str, angles: AngleSet, alpha: float) -> ChshResult:
    """CHSH combination S = E(t1,t2) + E(t1,t2') + E(t1',t2) - E(t1',t2')."""
    alpha = _check_alpha(alpha)
    s = (
        _corr(variant, angles.theta1, angles.theta2, alpha)
        + _corr(variant, angles.theta1, angles.theta2p, alpha)
        + _corr(variant, angles.theta1p, angles.theta2, alpha)
        - _corr(variant, angles.theta1p, angles.theta2p, alpha)
    )
    return ChshResult(s=s, angles=angles, alpha=alpha, violated=s > CHSH_BOUND + VIOLATION_EPS)


@lru_cache(maxsize=8)
def _correlation_grid(variant: str, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Affine correlation pieces on the n x n coarse angle grid over [0, pi)."""
    step = math.pi / n
    e0 = np.empty((n, n))
    e1 = np.empty((n, n))
    for i in range(n):
        for j in range(n):
            c0, c1 = _correlation_components(variant, i * step, j * step)
            e0[i, j] = c0
            e1[i, j] = c1
    return e0, e1


def _grid_argmax(corr: np.ndarray) -> tuple[int, int, int, int]:
    """Exact maximizer of S over the 4-fold grid, by separability.

    For fixed (i, j) = (theta1, theta1p) indices the objective splits into
    max over k of E[i,k] + E[j,k] plus max over l of E[i,l] - E[j,l], so
    the full 4-d scan reduces to two 3-d reductions.  Ties resolve to the
    lexicographically first index tuple, keeping the result deterministic.
    """
    plus = corr[:, None, :] + corr[None, :, :]
    minus = corr[:, None, :] - corr[None, :, :]
    best_k = plus.argmax(axis=2)
    best_l = minus.argmax(axis=2)
    totals = plus.max(axis=2) + minus.max(axis=2)
    i, j = np.unravel_index(int(totals.argmax()), totals.shape)
    return int(i), int(j), int(best_k[i, j]), int(best_l[i, j])


def _pattern_search(
    objective: Callable[[Sequence[float]], float],
    start: Sequence[float],
    step: float,
    min_step: float,
    max_sweeps: int = 20_000,
) -> tuple[tuple[float, ...], float]:
    """Derivative-free compass search: probe +-step on each coordinate, move
    to the best improving probe, halve the step when nothing improves."""
    point = list(start)
    value = objective(point)
    for _ in range(max_sweeps):
        if step <= min_step:
            break
        best_probe: tuple[float, list[float]] | None = None
        for axis in range(len(point)):
            for delta in (step, -step):
                probe = list(point)
                probe[axis] += delta
                probe_value = objective(probe)
                if probe_value > value and (best_probe is None or probe_value > best_probe[0]):
                    best_probe = (probe_value, probe)
        if best_probe is not None:
            value, point = best_probe
        else:
            step *= 0.5
    return tuple(point), value


def maximize_chsh(
    variant: str,
    alpha: float,
    grid_step: float = GRID_STEP,
    refine_min_step: float = REFINE_MIN_STEP,
) -> ChshResult:
    """Global maximum of S over the four analyzer angles.

    Everything is pi-periodic per angle, so a coarse exhaustive grid over
    [0, pi)^4 brackets the global basin; a compass search then refines to
    the stated step resolution.  Fully deterministic for a given grid.
    """
    alpha = _check_alpha(alpha)
    if not (0 < grid_step <= math.pi / 4):
        raise ValueError(f"grid_step must lie in (0, pi/4], got {grid_step!r}")
    n = max(4, round(math.pi / grid_step))
    e0, e1 = _correlation_grid(variant, n)
    corr = e0 + alpha * e1
    i, j, k, l = _grid_argmax(corr)
    actual_step = math.pi / n
    start = (i * actual_step, j * actual_step, k * actual_step, l * actual_step)

    def objective(x: Sequence[float]) -> float:
        return chsh(variant, AngleSet(*x), alpha).s

    best_point, _ = _pattern_search(objective, start, actual_step, refine_min_step)
    return chsh(variant, AngleSet(*best_point), alpha)


def alpha_threshold(
    variant: str,
    tol: float = 1e-6,
    grid_step: float = GRID_STEP,
) -> ThresholdResult:
    """Smallest distinguishability at which the maximal S reaches the bound.

    S*(alpha) is non-decreasing; this is verified on a coarse alpha grid
    before trusting the bisection.  If even alpha = 0 violates, there is no
    threshold: every detector quality shows the violation.
    """
    if variant not in ("A", "B"):
        raise ValueError(f"variant must be 'A' or 'B', got {variant!r}")

    def s_star(alpha: float) -> float:
        return maximize_chsh(variant, alpha, grid_step=grid_step).s

    probes = [0.0, 0.25, 0.5, 0.75, 1.0]
    values = [s_star(a) for a in probes]
    for (a_lo, v_lo), (a_hi, v_hi) in zip(zip(probes, values), zip(probes[1:], values[1:])):
        if v_hi < v_lo - 1e-9:
            raise RuntimeError(
                f"S*({a_hi}) = {v_hi} < S*({a_lo}) = {v_lo}: monotonicity check failed"
            )
    if values[0] > CHSH_BOUND:
        return ThresholdResult(alpha_star=0.0, always_violated=True)
    if values[-1] <= CHSH_BOUND:
        raise RuntimeError("no violation even at alpha = 1; threshold undefined")

    lo = max(a for a, v in zip(probes, values) if v <= CHSH_BOUND)
    hi = min(a for a, v in zip(probes, values) if v > CHSH_BOUND)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if s_star(mid) > CHSH_BOUND:
            hi = mid
        else:
            lo = mid
    return ThresholdResult(alpha_star=0.5 * (lo + hi), always_violated=False)
