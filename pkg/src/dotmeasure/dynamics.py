"""Time evolution, steady states and coherence decay fits."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy import linalg
from scipy.integrate import solve_ivp

from .errors import FitError, IntegrationError, StateError, SteadyStateError
from .models import Liouvillian, StateSpace

logger = logging.getLogger(__name__)

TRACE_TOL = 1e-12
POSITIVITY_TOL = 1e-9
COHERENCE_TOL = 1e-8


@dataclass
class DensityVector:
    """Real embedding of a density matrix on ``space``."""

    values: np.ndarray
    space: StateSpace

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.space.dim_real,):
            raise StateError(
                f"vector of shape {self.values.shape} does not fit space "
                f"{self.space.name} (dim {self.space.dim_real})"
            )

    @classmethod
    def from_components(cls, space, populations=None, coherences=None):
        """Build a vector from ``{label: p}`` and ``{(i, j): complex}`` maps."""
        v = np.zeros(space.dim_real)
        for label, p in (populations or {}).items():
            v[space.pop_index(label)] = p
        for pair, s in (coherences or {}).items():
            re, im = space.coherence_index(pair)
            v[re], v[im] = complex(s).real, complex(s).imag
        return cls(v, space)

    @classmethod
    def basis(cls, space, label) -> "DensityVector":
        return cls.from_components(space, {label: 1.0})

    @classmethod
    def empty(cls, space) -> "DensityVector":
        """All wells empty; the default initial state."""
        return cls.basis(space, space.labels[0])

    @property
    def populations(self) -> np.ndarray:
        return self.values[: self.space.n_pop]

    def population(self, label) -> float:
        return float(self.values[self.space.pop_index(label)])

    def coherence(self, pair) -> complex:
        re, im = self.space.coherence_index(pair)
        return complex(self.values[re], self.values[im])

    def trace(self) -> float:
        return float(self.populations.sum())

    def violations(self) -> list[str]:
        """Return the physical-state invariants this vector breaks (empty if none)."""
        out = []
        if abs(self.trace() - 1.0) > TRACE_TOL:
            out.append(f"trace {self.trace()!r} != 1")
        low = self.populations.min()
        if low < -POSITIVITY_TOL:
            out.append(f"negative population {low!r}")
        for pair in self.space.coherence_pairs:
            s = self.coherence(pair)
            bound = self.population(pair[0]) * self.population(pair[1])
            if abs(s) ** 2 > bound + COHERENCE_TOL:
                out.append(f"coherence {pair} exceeds population bound")
        return out

    def check(self) -> "DensityVector":
        bad = self.violations()
        if bad:
            raise StateError("; ".join(bad))
        return self


@dataclass
class Trajectory:
    """States on a time grid; ``states[k]`` is the real vector at ``times[k]``."""

    times: np.ndarray
    states: np.ndarray
    space: StateSpace
    generator: Liouvillian | None = None

    def __len__(self):
        return len(self.times)

    def __getitem__(self, k) -> DensityVector:
        return DensityVector(self.states[k], self.space)

    def component(self, label) -> np.ndarray:
        return self.states[:, self.space.pop_index(label)]

    def coherence(self, pair) -> np.ndarray:
        re, im = self.space.coherence_index(pair)
        return self.states[:, re] + 1j * self.states[:, im]

    @property
    def final(self) -> DensityVector:
        return self[-1]


def _check_grid(times):
    t = np.asarray(times, dtype=float)
    if t.ndim != 1 or t.size == 0:
        raise ValueError("time grid must be a nonempty 1-D sequence")
    if t.size > 1 and np.any(np.diff(t) <= 0):
        raise ValueError("time grid must be strictly increasing")
    return t


def _propagate_exact(m, x0, t):
    out = np.empty((t.size, x0.size))
    out[0] = linalg.expm(m * (t[0])) @ x0 if t[0] != 0 else x0
    if t.size == 1:
        return out
    dt = np.diff(t)
    if np.allclose(dt, dt[0], rtol=1e-12, atol=0):
        step = linalg.expm(m * dt[0])
        for k in range(1, t.size):
            out[k] = step @ out[k - 1]
    else:
        for k in range(1, t.size):
            out[k] = linalg.expm(m * dt[k - 1]) @ out[k - 1]
    return out


def _propagate_adaptive(m, x0, t, tol):
    if t.size == 1 and t[0] == 0:
        return x0[None, :].copy()
    span = (0.0, float(t[-1]))
    sol = solve_ivp(
        lambda _t, y: m @ y,
        span,
        x0,
        method="DOP853",
        t_eval=t,
        rtol=tol,
        atol=tol * 1e-3,
    )
    if sol.status != 0:
        failed_at = float(sol.t[-1]) if sol.t.size else span[0]
        raise IntegrationError(
            f"adaptive integration failed at t={failed_at!r}: {sol.message}",
            time=failed_at,
        )
    return sol.y.T.copy()


def evolve(L: Liouvillian, sigma0: DensityVector | None = None, times=None,
           method: str = "exact", tol: float = 1e-10) -> Trajectory:
    """Propagate ``sigma0`` under ``L`` on the grid ``times`` (starting from t=0).

    ``method="exact"`` uses dense matrix exponentials; ``"rk-adaptive"``
    uses an embedded Runge-Kutta integrator with relative tolerance ``tol``
    and is kept as a cross-check.
    """
    if times is None:
        raise ValueError("a time grid is required")
    t = _check_grid(times)
    if t[0] < 0:
        raise ValueError("time grid must start at t >= 0")
    if tol <= 0:
        raise ValueError("tol must be positive")
    if sigma0 is None:
        sigma0 = DensityVector.empty(L.space)
    if sigma0.space != L.space:
        raise StateError(
            f"initial state lives on {sigma0.space.name}, generator on {L.space.name}"
        )
    sigma0.check()
    if method == "exact":
        states = _propagate_exact(L.matrix, sigma0.values, t)
    elif method in ("rk-adaptive", "adaptive", "rk"):
        states = _propagate_adaptive(L.matrix, sigma0.values, t, tol)
    else:
        raise ValueError(f"unknown evolution method {method!r}")
    return Trajectory(t, states, L.space, L)


def _trace_row(space: StateSpace) -> np.ndarray:
    row = np.zeros(space.dim_real)
    row[: space.n_pop] = 1.0
    return row


def null_space_dimension(L: Liouvillian, rtol: float = 1e-9) -> int:
    s = linalg.svdvals(L.matrix)
    if s[0] == 0:
        return s.size
    return int(np.sum(s <= rtol * s[0]))


def steady_state(L: Liouvillian, rtol: float = 1e-9) -> DensityVector:
    """Unique stationary state of ``L`` with unit trace.

    Raises :class:`SteadyStateError` if the numerical null space of ``L``
    (singular values below ``rtol * ||L||``) is not one-dimensional.
    """
    m = L.matrix
    space = L.space
    dim = null_space_dimension(L, rtol)
    if dim != 1:
        if np.all(m == 0):
            basis = np.eye(space.dim_real)
        else:
            basis = linalg.null_space(m, rcond=rtol)
        names = space.component_names()
        involved = sorted({names[i] for i in np.nonzero(np.abs(basis) > 1e-8)[0]},
                          key=names.index)
        raise SteadyStateError(
            f"no unique steady state: null-space dimension {dim}; "
            f"degenerate directions span {', '.join(involved)}"
        )
    # one population row is redundant; replace it by the trace condition
    a = m.copy()
    a[0] = _trace_row(space)
    b = np.zeros(space.dim_real)
    b[0] = 1.0
    x = linalg.solve(a, b)
    x += linalg.solve(a, b - a @ x)
    residual = np.max(np.abs(m @ x))
    scale = max(1.0, np.max(np.abs(m)))
    if residual > 1e-12 * scale:
        raise SteadyStateError(f"steady-state residual {residual:.3e} too large")
    return DensityVector(x, space)


def _coherence_rate(L: Liouvillian, pair) -> float:
    re, _ = L.space.coherence_index(pair)
    return -float(L.matrix[re, re])


def decoherence_rate(traj: Trajectory, pair, window=None) -> float:
    """Fit the exponential decay rate of ``|sigma_pair(t)|`` over ``window``.

    Returns minus the least-squares slope of ``log|s(t)|``.  Without an
    explicit window, uses ``[0.1, 1.0] / rate`` where ``rate`` is read off
    the generator's coherence diagonal.
    """
    if window is None:
        if traj.generator is None:
            raise FitError("no window given and trajectory carries no generator")
        expected = _coherence_rate(traj.generator, tuple(pair))
        if expected <= 0:
            raise FitError("generator has no coherence decay; cannot choose a fit window")
        window = (0.1 / expected, 1.0 / expected)
    t0, t1 = window
    if not (traj.times[0] <= t0 < t1 <= traj.times[-1]):
        raise FitError(
            f"fit window [{t0}, {t1}] outside trajectory [{traj.times[0]}, {traj.times[-1]}]"
        )
    mask = (traj.times >= t0) & (traj.times <= t1)
    if mask.sum() < 2:
        raise FitError("fewer than two grid points in the fit window")
    env = np.abs(traj.coherence(tuple(pair)))[mask]
    if np.any(env < 1e-14):
        raise FitError("coherence vanishes inside the fit window; fit unreliable")
    slope = np.polyfit(traj.times[mask], np.log(env), 1)[0]
    if slope >= 0:
        raise FitError(f"coherence does not decay in the window (slope {slope:.3e})")
    return float(-slope)
