"""State spaces, parameter sets and generator builders for the quantum-dot models.

Four models are provided:

* ``single_dot_detector`` -- one dot watched by a detector dot (4 charge states).
* ``double_dot`` -- the bare coupled double dot (Bloch equations, 3 states).
* ``double_dot_detector`` -- the double dot watched by a detector (6 states).
* ``reduced`` -- the double dot with the detector traced out; identical to
  ``double_dot`` except for the extra dephasing of the inter-dot coherence.

Every generator acts on a real vector: populations first (in label order),
then one ``(Re, Im)`` pair per coherence.  Units: e = hbar = 1, rates and
energies in units of a reference width.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, fields
from typing import Mapping

import numpy as np

from .errors import ParameterError

__all__ = [
    "DetectorRegime",
    "EnergyConfig",
    "SingleDotDetectorParams",
    "DoubleDotParams",
    "ReducedParams",
    "DoubleDotDetectorParams",
    "StateSpace",
    "Liouvillian",
    "SINGLE_DOT_DETECTOR",
    "DOUBLE_DOT",
    "DOUBLE_DOT_DETECTOR",
    "REDUCED",
    "classify_regime",
    "build_single_dot_detector",
    "build_double_dot",
    "build_double_dot_detector",
    "build_reduced_double_dot",
]


class DetectorRegime(enum.Enum):
    """Which system charge states still let an electron into the detector."""

    NEVER_BLOCKED = "NeverBlocked"
    BLOCKED_BY_DOT1 = "BlockedByDot1"
    ALWAYS_BLOCKED = "AlwaysBlocked"

    @property
    def open_when_dot1(self) -> bool:
        return self is DetectorRegime.NEVER_BLOCKED

    @property
    def open_when_dot2(self) -> bool:
        return self is not DetectorRegime.ALWAYS_BLOCKED

    @classmethod
    def parse(cls, value) -> "DetectorRegime":
        if isinstance(value, cls):
            return value
        for member in cls:
            if value in (member.value, member.name):
                return member
        raise ParameterError(f"unknown detector regime {value!r}")


@dataclass(frozen=True)
class EnergyConfig:
    """Level energies, Coulomb shifts and emitter Fermi energies.

    Only ``E0``, ``U1``, ``U2`` and ``EF_det`` enter :func:`classify_regime`;
    the remaining fields are carried for completeness.
    """

    E0: float
    U1: float
    U2: float
    EF_det: float
    E1: float = 0.0
    E2: float = 0.0
    EF_sys: float = math.inf

    def __post_init__(self):
        if not self.E0 < self.EF_det:
            raise ParameterError(
                f"detector level E0={self.E0} must lie below EF_det={self.EF_det}"
            )
        if not self.E1 < self.EF_sys:
            raise ParameterError(
                f"dot level E1={self.E1} must lie below EF_sys={self.EF_sys}"
            )
        if self.U1 < 0 or self.U2 < 0:
            raise ParameterError("Coulomb shifts U1, U2 must be non-negative")

    @property
    def epsilon(self) -> float:
        return self.E2 - self.E1


def classify_regime(cfg: EnergyConfig) -> DetectorRegime:
    """Decide which charge states of the measured system block the detector.

    A detector electron can enter while system dot k is occupied only if the
    shifted level ``E0 + Uk`` lies strictly below ``EF_det``; equality counts
    as blocked.
    """
    if cfg.EF_det <= cfg.E0 + cfg.U2:
        return DetectorRegime.ALWAYS_BLOCKED
    if cfg.EF_det <= cfg.E0 + cfg.U1:
        return DetectorRegime.BLOCKED_BY_DOT1
    return DetectorRegime.NEVER_BLOCKED


def _check_nonnegative(obj, names):
    for name in names:
        value = getattr(obj, name)
        if not np.isfinite(value):
            raise ParameterError(f"{name} must be finite, got {value!r}")
        if value < 0:
            raise ParameterError(f"{name} must be non-negative, got {value!r}")


def _fill_primed(obj, pairs):
    # primed widths default to their unprimed counterpart
    for primed, base in pairs:
        if getattr(obj, primed) is None:
            object.__setattr__(obj, primed, float(getattr(obj, base)))


@dataclass(frozen=True)
class SingleDotDetectorParams:
    """Widths for a single dot measured by a detector dot.

    Primed widths apply while the other dot is occupied; when omitted they
    take the unprimed value.
    """

    Gamma_L: float
    Gamma_R: float
    gamma_L: float
    gamma_R: float
    Gamma_Lp: float | None = None
    Gamma_Rp: float | None = None
    gamma_Lp: float | None = None
    gamma_Rp: float | None = None

    def __post_init__(self):
        _fill_primed(
            self,
            [("Gamma_Lp", "Gamma_L"), ("Gamma_Rp", "Gamma_R"),
             ("gamma_Lp", "gamma_L"), ("gamma_Rp", "gamma_R")],
        )
        _check_nonnegative(self, [f.name for f in fields(self)])


@dataclass(frozen=True)
class DoubleDotParams:
    Gamma_L: float
    Gamma_R: float
    Omega: float
    epsilon: float = 0.0

    def __post_init__(self):
        _check_nonnegative(self, ["Gamma_L", "Gamma_R"])
        if not (np.isfinite(self.Omega) and np.isfinite(self.epsilon)):
            raise ParameterError("Omega and epsilon must be finite")


@dataclass(frozen=True)
class ReducedParams(DoubleDotParams):
    """Double-dot widths plus the detector entry rate that dephases the coherence."""

    gamma_L: float = 0.0

    def __post_init__(self):
        super().__post_init__()
        _check_nonnegative(self, ["gamma_L"])


@dataclass(frozen=True)
class DoubleDotDetectorParams:
    """Double dot plus detector.

    ``Gamma_Lp`` (entry into dot 1 while the detector is occupied) and
    ``Omega_p`` (hopping while the detector is occupied) default to their
    unprimed values, as do the primed detector widths.  If ``energies`` is
    given, ``regime`` and ``U1``/``U2`` must agree with it.
    """

    Gamma_L: float
    Gamma_R: float
    Omega: float
    gamma_L: float
    gamma_R: float
    epsilon: float = 0.0
    Omega_p: float | None = None
    Gamma_Lp: float | None = None
    gamma_Lp: float | None = None
    gamma_Rp: float | None = None
    U1: float = 0.0
    U2: float = 0.0
    regime: DetectorRegime = DetectorRegime.BLOCKED_BY_DOT1
    energies: EnergyConfig | None = field(default=None, compare=False)

    def __post_init__(self):
        _fill_primed(
            self,
            [("Omega_p", "Omega"), ("Gamma_Lp", "Gamma_L"),
             ("gamma_Lp", "gamma_L"), ("gamma_Rp", "gamma_R")],
        )
        object.__setattr__(self, "regime", DetectorRegime.parse(self.regime))
        _check_nonnegative(
            self,
            ["Gamma_L", "Gamma_R", "Gamma_Lp", "gamma_L", "gamma_R",
             "gamma_Lp", "gamma_Rp", "U1", "U2"],
        )
        if not all(np.isfinite(v) for v in (self.Omega, self.Omega_p, self.epsilon)):
            raise ParameterError("Omega, Omega_p and epsilon must be finite")
        if self.energies is not None:
            expected = classify_regime(self.energies)
            if expected is not self.regime:
                raise ParameterError(
                    f"regime {self.regime.value} inconsistent with energies "
                    f"(classified as {expected.value})"
                )
            if (self.U1, self.U2) != (self.energies.U1, self.energies.U2):
                raise ParameterError("U1/U2 differ from the attached EnergyConfig")

    @classmethod
    def from_energies(cls, energies: EnergyConfig, **widths) -> "DoubleDotDetectorParams":
        """Build params whose regime and Coulomb shifts come from ``energies``."""
        widths.setdefault("epsilon", energies.epsilon)
        return cls(
            U1=energies.U1,
            U2=energies.U2,
            regime=classify_regime(energies),
            energies=energies,
            **widths,
        )

    @property
    def bare(self) -> DoubleDotParams:
        return DoubleDotParams(self.Gamma_L, self.Gamma_R, self.Omega, self.epsilon)


@dataclass(frozen=True)
class StateSpace:
    """Ordered basis of charge states and the coherences carried between them.

    ``occupied`` maps each label to the wells holding an electron in that
    state; ``collector_wells`` names the well adjacent to each collector.
    """

    name: str
    labels: tuple[str, ...]
    coherence_pairs: tuple[tuple[str, str], ...]
    occupied: Mapping[str, frozenset]
    collector_wells: Mapping[str, str]

    @property
    def n_pop(self) -> int:
        return len(self.labels)

    @property
    def dim_real(self) -> int:
        return self.n_pop + 2 * len(self.coherence_pairs)

    def pop_index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(f"state {label!r} not in space {self.name}") from None

    def coherence_index(self, pair) -> tuple[int, int]:
        """Return the (Re, Im) slots of a coherence pair."""
        pair = tuple(pair)
        try:
            k = self.coherence_pairs.index(pair)
        except ValueError:
            raise KeyError(f"coherence {pair!r} not in space {self.name}") from None
        re = self.n_pop + 2 * k
        return re, re + 1

    def component_names(self) -> list[str]:
        names = [f"P_{s}" for s in self.labels]
        for i, j in self.coherence_pairs:
            names += [f"Re_{i}{j}", f"Im_{i}{j}"]
        return names


def _space(name, occupied, pairs, collectors):
    return StateSpace(
        name=name,
        labels=tuple(occupied),
        coherence_pairs=tuple(pairs),
        occupied={k: frozenset(v) for k, v in occupied.items()},
        collector_wells=dict(collectors),
    )


SINGLE_DOT_DETECTOR = _space(
    "single_dot_detector",
    {"a": (), "b": ("dot",), "a'": ("det",), "b'": ("det", "dot")},
    [],
    {"system": "dot", "detector": "det"},
)
DOUBLE_DOT = _space(
    "double_dot",
    {"a": (), "b": ("dot1",), "c": ("dot2",)},
    [("b", "c")],
    {"system": "dot2"},
)
DOUBLE_DOT_DETECTOR = _space(
    "double_dot_detector",
    {"a": (), "b": ("dot1",), "c": ("dot2",),
     "a'": ("det",), "b'": ("det", "dot1"), "c'": ("det", "dot2")},
    [("b", "c"), ("b'", "c'")],
    {"system": "dot2", "detector": "det"},
)
REDUCED = _space(
    "reduced",
    {"abar": (), "bbar": ("dot1",), "cbar": ("dot2",)},
    [("bbar", "cbar")],
    {"system": "dot2"},
)


@dataclass(frozen=True)
class Liouvillian:
    """Real generator of d(sigma)/dt = L sigma on ``space``."""

    matrix: np.ndarray
    space: StateSpace
    params: object = None

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        n = self.space.dim_real
        if m.shape != (n, n):
            raise ParameterError(f"generator shape {m.shape} does not match dim {n}")
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @property
    def model(self) -> str:
        return self.space.name

    def population_column_sums(self) -> np.ndarray:
        return self.matrix[: self.space.n_pop].sum(axis=0)


class _Builder:
    """Accumulates generator entries so that every population transfer
    leaves the column sums over population rows at exactly zero."""

    def __init__(self, space: StateSpace):
        self.space = space
        self.m = np.zeros((space.dim_real, space.dim_real))

    def transfer(self, src, dst, rate):
        if rate == 0:
            return
        i, j = self.space.pop_index(src), self.space.pop_index(dst)
        self.m[i, i] -= rate
        self.m[j, i] += rate

    def hop(self, pair, omega):
        # i*Omega*(s - s*) = -2*Omega*Im s feeds the first state, drains the second
        b, c = (self.space.pop_index(s) for s in pair)
        _, im = self.space.coherence_index(pair)
        self.m[b, im] -= 2 * omega
        self.m[c, im] += 2 * omega
        self.m[im, b] += omega
        self.m[im, c] -= omega

    def coherence(self, pair, detuning, dephasing):
        # ds/dt = (i*detuning - dephasing) s
        re, im = self.space.coherence_index(pair)
        self.m[re, re] -= dephasing
        self.m[im, im] -= dephasing
        self.m[re, im] -= detuning
        self.m[im, re] += detuning

    def feed(self, src_pair, dst_pair, rate):
        sre, sim = self.space.coherence_index(src_pair)
        dre, dim = self.space.coherence_index(dst_pair)
        self.m[dre, sre] += rate
        self.m[dim, sim] += rate

    def finish(self, params) -> Liouvillian:
        return Liouvillian(self.m, self.space, params)


def build_single_dot_detector(p: SingleDotDetectorParams) -> Liouvillian:
    """Rate equations for a single dot (b = occupied) and a detector dot (primed = occupied).

    The detector cannot be entered while the dot is occupied; a detector
    electron in ``b'`` leaves through either barrier.
    """
    g = _Builder(SINGLE_DOT_DETECTOR)
    g.transfer("a", "b", p.Gamma_L)
    g.transfer("b", "a", p.Gamma_R)
    g.transfer("a", "a'", p.gamma_L)
    g.transfer("a'", "a", p.gamma_R)
    g.transfer("a'", "b'", p.Gamma_Lp)
    g.transfer("b'", "a'", p.Gamma_Rp)
    g.transfer("b'", "b", p.gamma_Lp + p.gamma_Rp)
    return g.finish(p)


def _double_dot(space, p: DoubleDotParams, extra_dephasing) -> Liouvillian:
    a, b, c = space.labels
    g = _Builder(space)
    g.transfer(a, b, p.Gamma_L)
    g.transfer(c, a, p.Gamma_R)
    g.hop((b, c), p.Omega)
    g.coherence((b, c), p.epsilon, 0.5 * (p.Gamma_R + extra_dephasing))
    return g.finish(p)


def build_double_dot(p: DoubleDotParams) -> Liouvillian:
    """Bloch equations of the bare double dot; states a (empty), b (dot 1), c (dot 2)."""
    return _double_dot(DOUBLE_DOT, p, 0.0)


def build_reduced_double_dot(p: DoubleDotParams, gamma_L: float) -> Liouvillian:
    """Double dot with the detector traced out: coherence dephasing (Gamma_R + gamma_L)/2."""
    rp = ReducedParams(p.Gamma_L, p.Gamma_R, p.Omega, p.epsilon, gamma_L=float(gamma_L))
    return _double_dot(REDUCED, rp, rp.gamma_L)


def build_double_dot_detector(p: DoubleDotDetectorParams) -> Liouvillian:
    """Full double-dot + detector generator (10 real components).

    For ``BlockedByDot1`` this is the standard detector-blocking set of
    rate equations.  The other regimes switch the detector-entry rate
    ``gamma_L`` on or off per system state:

    * a detector electron can enter from ``b`` only if ``open_when_dot1``,
      from ``c`` only if ``open_when_dot2``; ``AlwaysBlocked`` also closes
      entry from the empty state, leaving the detector inert;
    * where entry is blocked the detector level sits above the emitter Fermi
      energy, so the primed state may also drain back through ``gamma_Lp``;
    * coherences decay at half the summed decay rates of ``b`` and ``c``
      (resp. ``b'``, ``c'``); a channel open to both states carries coherence
      between sectors with the mean of the two widths.

    With ``gamma_Rp != gamma_R`` the mean-width coherence feed exceeds the
    geometric mean and the coherence bound |s|^2 <= P_b P_c can be violated.
    """
    reg = p.regime
    open_a = reg is not DetectorRegime.ALWAYS_BLOCKED
    open_b = reg.open_when_dot1
    open_c = reg.open_when_dot2
    enter_a = p.gamma_L if open_a else 0.0
    enter_b = p.gamma_L if open_b else 0.0
    enter_c = p.gamma_L if open_c else 0.0
    exit_b = p.gamma_Rp + (0.0 if open_b else p.gamma_Lp)
    exit_c = p.gamma_R + (0.0 if open_c else p.gamma_Lp)

    g = _Builder(DOUBLE_DOT_DETECTOR)
    # measured system, detector empty / occupied
    g.transfer("a", "b", p.Gamma_L)
    g.transfer("c", "a", p.Gamma_R)
    g.transfer("a'", "b'", p.Gamma_Lp)
    g.transfer("c'", "a'", p.Gamma_R)
    g.hop(("b", "c"), p.Omega)
    g.hop(("b'", "c'"), p.Omega_p)
    # detector
    g.transfer("a", "a'", enter_a)
    g.transfer("a'", "a", p.gamma_R)
    g.transfer("b", "b'", enter_b)
    g.transfer("b'", "b", exit_b)
    g.transfer("c", "c'", enter_c)
    g.transfer("c'", "c", exit_c)

    g.coherence(("b", "c"), p.epsilon, 0.5 * (p.Gamma_R + enter_b + enter_c))
    g.coherence(("b'", "c'"), p.epsilon - p.U1 + p.U2, 0.5 * (p.Gamma_R + exit_b + exit_c))
    back = 0.5 * (p.gamma_R + p.gamma_Rp)
    if not open_b and not open_c:
        back += p.gamma_Lp
    g.feed(("b'", "c'"), ("b", "c"), back)
    if open_b and open_c:
        g.feed(("b", "c"), ("b'", "c'"), p.gamma_L)
    return g.finish(p)


BUILDERS = {
    "single_dot_detector": build_single_dot_detector,
    "double_dot": build_double_dot,
    "double_dot_detector": build_double_dot_detector,
    "reduced": build_reduced_double_dot,
}
