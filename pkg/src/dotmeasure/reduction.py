"""Tracing the detector out of the double-dot + detector model.

:func:`compare_reduction` measures how far the traced full dynamics is from
the reduced (dephased double-dot) generator, and how that gap closes as the
detector's exit width grows relative to its entry width.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from .dynamics import DensityVector, evolve, steady_state
from .errors import ParameterError, StateError
from .models import (
    DOUBLE_DOT_DETECTOR,
    REDUCED,
    DetectorRegime,
    DoubleDotDetectorParams,
    build_double_dot_detector,
    build_reduced_double_dot,
)
from .observables import current, system_current_spec

DEFAULT_LADDER = (1e1, 1e2, 1e3, 1e4)
# relative current gaps below this are treated as an exact reduction
EXACT_TOL = 1e-12


def _trace_matrix() -> np.ndarray:
    full, red = DOUBLE_DOT_DETECTOR, REDUCED
    t = np.zeros((red.dim_real, full.dim_real))
    for x in ("a", "b", "c"):
        r = red.pop_index(x + "bar")
        t[r, full.pop_index(x)] = 1.0
        t[r, full.pop_index(x + "'")] = 1.0
    r_re, r_im = red.coherence_index(("bbar", "cbar"))
    for pair in (("b", "c"), ("b'", "c'")):
        re, im = full.coherence_index(pair)
        t[r_re, re] = 1.0
        t[r_im, im] = 1.0
    return t


TRACE_MAP = _trace_matrix()
TRACE_MAP.flags.writeable = False


def trace_detector(state: DensityVector) -> DensityVector:
    """Sum each system state over detector empty/occupied."""
    if state.space != DOUBLE_DOT_DETECTOR:
        raise StateError(
            f"trace_detector expects a {DOUBLE_DOT_DETECTOR.name} state, got {state.space.name}"
        )
    return DensityVector(TRACE_MAP @ state.values, REDUCED)


@dataclass(frozen=True)
class LadderPoint:
    gamma_ratio: float
    current_full: float
    current_reduced: float
    steady_current_discrepancy: float
    max_state_discrepancy: float


@dataclass(frozen=True)
class ReductionReport:
    """Gap between traced full dynamics and the reduced generator.

    ``scaling_exponent`` is the fitted slope of log(steady-current gap)
    versus log(gamma_R/gamma_L) over ``ladder``; it is NaN when the gap
    vanishes to roundoff at every rung (the reduction is then exact) or when
    no ladder could be formed.
    """

    gamma_ratio: float
    max_state_discrepancy: float
    steady_current_discrepancy: float
    scaling_exponent: float
    ladder: tuple[LadderPoint, ...] = ()


def _compare_once(p: DoubleDotDetectorParams, times) -> LadderPoint:
    full = build_double_dot_detector(p)
    red = build_reduced_double_dot(p.bare, p.gamma_L)
    traj_full = evolve(full, DensityVector.empty(full.space), times)
    traj_red = evolve(red, DensityVector.empty(red.space), times)
    traced = traj_full.states @ TRACE_MAP.T
    state_gap = float(np.max(np.abs(traced - traj_red.states)))
    i_full = current(steady_state(full), system_current_spec(full))
    i_red = current(steady_state(red), system_current_spec(red))
    ratio = p.gamma_R / p.gamma_L if p.gamma_L > 0 else math.inf
    return LadderPoint(ratio, i_full, i_red, abs(i_full - i_red), state_gap)


def _with_ratio(p: DoubleDotDetectorParams, ratio: float) -> DoubleDotDetectorParams:
    # keep gamma_Rp / gamma_R fixed while moving gamma_R
    scale = ratio * p.gamma_L / p.gamma_R
    return dataclasses.replace(p, gamma_R=p.gamma_R * scale, gamma_Rp=p.gamma_Rp * scale)


def fit_exponent(ratios, gaps, reference: float) -> float:
    ratios = np.asarray(ratios, dtype=float)
    gaps = np.asarray(gaps, dtype=float)
    if ratios.size < 2 or np.all(gaps <= EXACT_TOL * max(reference, 1.0)):
        return math.nan
    if np.any(gaps <= 0):
        return math.nan
    return float(np.polyfit(np.log(ratios), np.log(gaps), 1)[0])


def compare_reduction(p: DoubleDotDetectorParams, horizon: float = 20.0,
                      ladder=DEFAULT_LADDER, npoints: int = 401) -> ReductionReport:
    """Compare traced full dynamics with the reduced model.

    Both models start with every well empty.  The transient gap is the
    sup-norm over ``npoints`` grid points in ``[0, horizon]``.  The ladder
    rescales ``gamma_R`` (and ``gamma_Rp`` proportionally) so that
    ``gamma_R / gamma_L`` takes each value in ``ladder``.
    """
    if p.regime is not DetectorRegime.BLOCKED_BY_DOT1:
        raise ParameterError("reduction comparison requires regime BlockedByDot1")
    if p.gamma_R <= 0 or p.gamma_Rp <= 0:
        raise ParameterError("detector exit widths gamma_R, gamma_Rp must be positive")
    if horizon <= 0:
        raise ValueError("horizon must be positive")
    times = np.linspace(0.0, horizon, npoints)
    here = _compare_once(p, times)

    points = ()
    exponent = math.nan
    if p.gamma_L > 0 and len(ladder) >= 2:
        points = tuple(_compare_once(_with_ratio(p, r), times) for r in ladder)
        exponent = fit_exponent(
            [pt.gamma_ratio for pt in points],
            [pt.steady_current_discrepancy for pt in points],
            here.current_reduced,
        )
    return ReductionReport(
        gamma_ratio=here.gamma_ratio,
        max_state_discrepancy=here.max_state_discrepancy,
        steady_current_discrepancy=here.steady_current_discrepancy,
        scaling_exponent=exponent,
        ladder=points,
    )
