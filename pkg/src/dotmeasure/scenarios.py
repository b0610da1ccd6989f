"""Runs driven by a :class:`~dotmeasure.config.RunConfig`, plus the named scenarios.

Every runner returns a :class:`~dotmeasure.table.Table`; rows are ordered
by sweep index even when points are computed concurrently.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import analytics
from .config import RunConfig, build_model
from .dynamics import DensityVector, evolve, steady_state
from .errors import ConfigError
from .models import (
    DetectorRegime,
    DoubleDotDetectorParams,
    DoubleDotParams,
    EnergyConfig,
    SingleDotDetectorParams,
    build_double_dot_detector,
    build_reduced_double_dot,
    build_single_dot_detector,
)
from .observables import (
    accumulated_charge,
    current,
    current_series,
    detector_current_spec,
    has_detector,
    system_current_spec,
)
from .reduction import compare_reduction
from .table import Table, emit_csv

logger = logging.getLogger(__name__)

I_UNIT = "[e*Gamma0]"
T_UNIT = "[1/Gamma0]"
E_UNIT = "[Gamma0]"


def _state_columns(space):
    return [f"{name} [1]" for name in space.component_names()]


def run_evolve(cfg: RunConfig) -> Table:
    L = build_model(cfg.model, cfg.params)
    r = cfg.run
    sigma0 = (DensityVector.basis(L.space, r.initial) if r.initial
              else DensityVector.empty(L.space))
    times = np.linspace(0.0, r.tmax, r.npoints)
    traj = evolve(L, sigma0, times, method=r.method, tol=r.tol)
    sys_spec = system_current_spec(L)
    cols = [f"t {T_UNIT}"] + _state_columns(L.space) + [f"I_S {I_UNIT}", "Q_S [e]"]
    series = [current_series(traj, sys_spec), accumulated_charge(traj, sys_spec)]
    if has_detector(L):
        det_spec = detector_current_spec(L)
        cols += [f"I_D {I_UNIT}", "Q_D [e]"]
        series += [current_series(traj, det_spec), accumulated_charge(traj, det_spec)]
    data = np.column_stack([traj.times, traj.states] + series)
    return Table(cols, data.tolist())


def run_steady(cfg: RunConfig) -> Table:
    L = build_model(cfg.model, cfg.params)
    x = steady_state(L)
    cols = _state_columns(L.space) + [f"I_S {I_UNIT}"]
    row = list(x.values) + [current(x, system_current_spec(L))]
    if has_detector(L):
        cols.append(f"I_D {I_UNIT}")
        row.append(current(x, detector_current_spec(L)))
    return Table(cols, [row])


def sweep_values(start, stop, count, scale="linear") -> np.ndarray:
    if scale == "log":
        return np.geomspace(start, stop, count)
    return np.linspace(start, stop, count)


def _steady_row(model, params):
    L = build_model(model, params)
    x = steady_state(L)
    i_s = current(x, system_current_spec(L))
    i_d = current(x, detector_current_spec(L)) if has_detector(L) else None
    pairs = L.space.coherence_pairs
    coh = abs(x.coherence(pairs[0])) if pairs else None
    regime = L.params.regime.value if isinstance(L.params, DoubleDotDetectorParams) else ""
    return [i_s, i_d, coh, regime]


def run_sweep(cfg: RunConfig, jobs: int = 1) -> Table:
    """Steady-state currents over a range of one parameter (the SweepTable)."""
    r = cfg.run
    if r.parameter is None:
        raise ConfigError("sweep requires [run] parameter", key="parameter")
    values = sweep_values(r.start, r.stop, r.count, r.scale)

    def point(v):
        return [float(v)] + _steady_row(cfg.model, {**cfg.params, r.parameter: float(v)})

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(point, values))
    else:
        rows = [point(v) for v in values]
    cols = [r.parameter, f"I_S {I_UNIT}", f"I_D {I_UNIT}", "|s_bc| [1]", "regime"]
    return Table(cols, rows)


# ---------------------------------------------------------------- scenarios

FIG3_DEFAULTS = dict(
    Gamma_L=1.0, Gamma_R=1.0, Omega=1.0, gamma_L=50.0, gamma_R=5.0e4,
    E0=0.0, U1=4.0, U2=2.0, npoints=121,
)
ZENO_DEFAULTS = dict(
    Gamma_L=1.0, Gamma_R=1.0, Omega=1.0, epsilon=0.0,
    gamma_min=0.0, gamma_max=100.0, count=20,
)
NONINVASIVE_DEFAULTS = dict(
    Gamma_L=1.0, Gamma_R=1.0, gamma_L=1.0, ratio_min=1.0, ratio_max=1.0e3, count=7,
)
REDUCTION_DEFAULTS = dict(
    Gamma_L=1.0, Gamma_R=1.0, Omega=1.0, epsilon=0.0, gamma_L=1.0, gamma_R=1.0e3,
    Gamma_Lp=0.5, U1=2.0, U2=0.0, horizon=20.0,
)


def _merge(defaults, overrides):
    out = dict(defaults)
    for key, value in (overrides or {}).items():
        if key not in defaults:
            raise ConfigError(f"unknown override {key!r}; expected one of {sorted(defaults)}",
                              key=key)
        try:
            out[key] = type(defaults[key])(float(value))
        except (TypeError, ValueError):
            raise ConfigError(f"override {key} must be numeric, got {value!r}", key=key) from None
    return out


def scenario_fig3(overrides=None) -> Table:
    """Maximal (E1 = E2) double-dot current versus the detector emitter Fermi energy.

    The Fermi energy runs across [E0+U2-1, E0+U1+1]; each point is solved in
    the regime it falls into.  The NeverBlocked segment extrapolates the
    BlockedByDot1 rate equations and is tagged ``extension``.
    """
    o = _merge(FIG3_DEFAULTS, overrides)
    if o["E0"] + o["U2"] - 1 <= o["E0"]:
        raise ConfigError("fig3 needs U2 > 1 so that every swept EF_det lies above E0", key="U2")
    bare = DoubleDotParams(o["Gamma_L"], o["Gamma_R"], o["Omega"], 0.0)
    reference = analytics.double_dot_dc(bare)
    grid = np.linspace(o["E0"] + o["U2"] - 1, o["E0"] + o["U1"] + 1, o["npoints"])
    # the regime alone fixes the generator; solve once per regime
    cache = {}
    rows = []
    for ef in grid:
        energies = EnergyConfig(E0=o["E0"], U1=o["U1"], U2=o["U2"], EF_det=float(ef))
        p = DoubleDotDetectorParams.from_energies(
            energies, Gamma_L=o["Gamma_L"], Gamma_R=o["Gamma_R"], Omega=o["Omega"],
            gamma_L=o["gamma_L"], gamma_R=o["gamma_R"],
        )
        if p.regime not in cache:
            L = build_double_dot_detector(p)
            cache[p.regime] = current(steady_state(L), system_current_spec(L))
        note = "extension" if p.regime is DetectorRegime.NEVER_BLOCKED else ""
        rows.append([float(ef), p.regime.value, cache[p.regime], reference, note])
    cols = [f"EF_det {E_UNIT}", "regime", f"I_S {I_UNIT}", f"I_S0 {I_UNIT}", "note"]
    return Table(cols, rows)


def scenario_zeno(overrides=None) -> Table:
    """Steady current of the reduced model against the detector entry rate."""
    o = _merge(ZENO_DEFAULTS, overrides)
    bare = DoubleDotParams(o["Gamma_L"], o["Gamma_R"], o["Omega"], o["epsilon"])
    rows = []
    for g in np.linspace(o["gamma_min"], o["gamma_max"], o["count"]):
        L = build_reduced_double_dot(bare, float(g))
        i_num = current(steady_state(L), system_current_spec(L))
        rows.append([float(g), i_num, analytics.dephased_double_dot_dc(bare, float(g))])
    return Table([f"gamma_L {E_UNIT}", f"I_S {I_UNIT}", f"I_closed {I_UNIT}"], rows)


def scenario_noninvasive(overrides=None) -> Table:
    """Single dot + detector as the detector exit width grows past its entry width."""
    o = _merge(NONINVASIVE_DEFAULTS, overrides)
    rows = []
    for ratio in np.geomspace(o["ratio_min"], o["ratio_max"], o["count"]):
        g_r = float(ratio) * o["gamma_L"]
        p = SingleDotDetectorParams(o["Gamma_L"], o["Gamma_R"], o["gamma_L"], g_r)
        L = build_single_dot_detector(p)
        x = steady_state(L)
        i_s = current(x, system_current_spec(L))
        i_d = current(x, detector_current_spec(L))
        rows.append([float(ratio), i_s, i_d, i_d / i_s, o["gamma_L"] / o["Gamma_L"]])
    cols = ["gamma_R/gamma_L [1]", f"I_S {I_UNIT}", f"I_D {I_UNIT}", "I_D/I_S [1]",
            "gamma_L/Gamma_L [1]"]
    return Table(cols, rows)


def reduction_params(overrides=None) -> tuple[DoubleDotDetectorParams, float]:
    o = _merge(REDUCTION_DEFAULTS, overrides)
    horizon = o.pop("horizon")
    return DoubleDotDetectorParams(**o), horizon


def scenario_reduction(overrides=None):
    """Ladder of traced-full versus reduced discrepancies; returns (table, report)."""
    p, horizon = reduction_params(overrides)
    report = compare_reduction(p, horizon=horizon)
    rows = [[pt.gamma_ratio, pt.current_full, pt.current_reduced,
             pt.steady_current_discrepancy, pt.max_state_discrepancy]
            for pt in report.ladder]
    cols = ["gamma_R/gamma_L [1]", f"I_full {I_UNIT}", f"I_reduced {I_UNIT}",
            f"|dI| {I_UNIT}", "max|dsigma| [1]"]
    return Table(cols, rows), report


SCENARIOS = {
    "fig3": scenario_fig3,
    "zeno": scenario_zeno,
    "noninvasive": scenario_noninvasive,
    "reduction": lambda overrides=None: scenario_reduction(overrides)[0],
}


def run_scenario(name: str, overrides=None, out=None) -> Table:
    """Run a named scenario and, if ``out`` is given, write its CSV there."""
    if name not in SCENARIOS:
        raise ConfigError(f"unknown scenario {name!r}; expected one of {sorted(SCENARIOS)}",
                          key="scenario")
    table = SCENARIOS[name](overrides)
    if out is not None:
        emit_csv(table, out)
    return table
