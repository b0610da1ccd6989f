"""Collector currents, accumulated charge and coherence envelopes.

A collector current is ``I = sum_c sigma_cc * w_c`` over the charge states
``c`` in which the well next to that collector is occupied, with ``w_c``
the width for tunnelling from ``c`` into the collector.  Currents are in
units of e times the reference width.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .dynamics import DensityVector, Trajectory
from .errors import StateError
from .models import (
    DoubleDotDetectorParams,
    DoubleDotParams,
    Liouvillian,
    SingleDotDetectorParams,
    StateSpace,
)

CURRENT_UNIT = "e*Gamma0"


@dataclass(frozen=True)
class CurrentSpec:
    terms: tuple[tuple[str, float], ...]
    collector: str
    space: StateSpace

    def __post_init__(self):
        if self.collector not in self.space.collector_wells:
            raise StateError(
                f"space {self.space.name} has no {self.collector!r} collector"
            )
        well = self.space.collector_wells[self.collector]
        adjacent = {s for s in self.space.labels if well in self.space.occupied[s]}
        labels = [label for label, _ in self.terms]
        unknown = [s for s in labels if s not in self.space.labels]
        if unknown:
            raise StateError(f"labels {unknown} not in space {self.space.name}")
        if set(labels) != adjacent or len(labels) != len(adjacent):
            raise StateError(
                f"{self.collector} current must sum over {sorted(adjacent)}, got {labels}"
            )
        if any(w < 0 for _, w in self.terms):
            raise StateError("current widths must be non-negative")

    def weights(self) -> np.ndarray:
        w = np.zeros(self.space.dim_real)
        for label, width in self.terms:
            w[self.space.pop_index(label)] = width
        return w


def system_current_spec(L: Liouvillian) -> CurrentSpec:
    p = L.params
    space = L.space
    if isinstance(p, SingleDotDetectorParams):
        terms = (("b", p.Gamma_R), ("b'", p.Gamma_Rp))
    elif isinstance(p, DoubleDotDetectorParams):
        terms = (("c", p.Gamma_R), ("c'", p.Gamma_R))
    elif isinstance(p, DoubleDotParams):
        terms = ((space.labels[2], p.Gamma_R),)
    else:
        raise StateError(f"no system current defined for model {space.name}")
    return CurrentSpec(terms, "system", space)


def detector_current_spec(L: Liouvillian) -> CurrentSpec:
    p = L.params
    if isinstance(p, SingleDotDetectorParams):
        terms = (("a'", p.gamma_R), ("b'", p.gamma_Rp))
    elif isinstance(p, DoubleDotDetectorParams):
        terms = (("a'", p.gamma_R), ("b'", p.gamma_Rp), ("c'", p.gamma_R))
    else:
        raise StateError(f"model {L.space.name} has no detector")
    return CurrentSpec(terms, "detector", L.space)


def has_detector(L: Liouvillian) -> bool:
    return "detector" in L.space.collector_wells


def current(state: DensityVector, spec: CurrentSpec) -> float:
    if state.space != spec.space:
        raise StateError(
            f"state on {state.space.name} but current defined on {spec.space.name}"
        )
    return float(spec.weights() @ state.values)


def current_series(traj: Trajectory, spec: CurrentSpec) -> np.ndarray:
    if traj.space != spec.space:
        raise StateError("trajectory and current spec live on different spaces")
    return traj.states @ spec.weights()


def accumulated_charge(traj: Trajectory, spec: CurrentSpec) -> np.ndarray:
    """Charge collected since ``traj.times[0]`` (trapezoid rule on the grid)."""
    return cumulative_trapezoid(current_series(traj, spec), traj.times, initial=0.0)


def coherence_envelope(traj: Trajectory, pair) -> np.ndarray:
    return np.abs(traj.coherence(tuple(pair)))
