import numpy as np
import pytest

from dotmeasure import (
    DOUBLE_DOT,
    SINGLE_DOT_DETECTOR,
    CurrentSpec,
    DensityVector,
    DoubleDotDetectorParams,
    DoubleDotParams,
    SingleDotDetectorParams,
    StateError,
    accumulated_charge,
    build_double_dot,
    build_double_dot_detector,
    build_reduced_double_dot,
    build_single_dot_detector,
    coherence_envelope,
    current,
    detector_current_spec,
    evolve,
    steady_state,
    system_current_spec,
)
from dotmeasure.observables import current_series

from conftest import MODELS, random_generator, random_state


def test_current_spec_terms_per_model():
    p1 = SingleDotDetectorParams(1, 2, 3, 4, Gamma_Rp=5, gamma_Rp=6)
    L1 = build_single_dot_detector(p1)
    assert system_current_spec(L1).terms == (("b", 2), ("b'", 5))
    assert detector_current_spec(L1).terms == (("a'", 4), ("b'", 6))
    L3 = build_double_dot_detector(DoubleDotDetectorParams(1, 2, 1, gamma_L=3, gamma_R=4, gamma_Rp=7))
    assert system_current_spec(L3).terms == (("c", 2), ("c'", 2))
    assert detector_current_spec(L3).terms == (("a'", 4), ("b'", 7), ("c'", 4))
    L4 = build_reduced_double_dot(DoubleDotParams(1, 2, 1), 3)
    assert system_current_spec(L4).terms == (("cbar", 2),)
    with pytest.raises(StateError):
        detector_current_spec(L4)


def test_current_spec_must_cover_collector_adjacent_states():
    with pytest.raises(StateError):
        CurrentSpec((("b", 1.0),), "system", DOUBLE_DOT)
    with pytest.raises(StateError):
        CurrentSpec((("z", 1.0),), "system", DOUBLE_DOT)
    with pytest.raises(StateError):
        CurrentSpec((("c", -1.0),), "system", DOUBLE_DOT)
    with pytest.raises(StateError):
        CurrentSpec((("c", 1.0),), "detector", DOUBLE_DOT)
    CurrentSpec((("b", 1.0), ("b'", 1.0)), "system", SINGLE_DOT_DETECTOR)


def test_zero_current_when_collector_states_empty():
    L = build_double_dot(DoubleDotParams(1, 1, 1))
    x = DensityVector.from_components(DOUBLE_DOT, {"a": 0.4, "b": 0.6})
    assert current(x, system_current_spec(L)) == 0.0


def test_double_dot_steady_current():
    L = build_double_dot(DoubleDotParams(1, 1, 1, 0))
    assert current(steady_state(L), system_current_spec(L)) == pytest.approx(1 / 3.25, abs=1e-14)


def test_fast_detector_ratio():
    p = SingleDotDetectorParams(1, 1, gamma_L=1, gamma_R=100, gamma_Lp=1, gamma_Rp=100)
    L = build_single_dot_detector(p)
    x = steady_state(L)
    i_s = current(x, system_current_spec(L))
    i_d = current(x, detector_current_spec(L))
    assert i_d / i_s == pytest.approx(1.0, rel=0.02)


def test_current_rejects_wrong_space():
    L = build_double_dot(DoubleDotParams(1, 1, 1))
    with pytest.raises(StateError):
        current(DensityVector.empty(SINGLE_DOT_DETECTOR), system_current_spec(L))


@pytest.mark.parametrize("model", MODELS)
def test_steady_currents_nonnegative(model, rng):
    for _ in range(100):
        L = random_generator(model, rng, low=0.0, high=5.0)
        x = steady_state(L)
        assert current(x, system_current_spec(L)) >= -1e-14
        if "detector" in L.space.collector_wells:
            assert current(x, detector_current_spec(L)) >= -1e-14


@pytest.mark.parametrize("model", MODELS)
def test_current_is_linear(model, rng):
    L = random_generator(model, rng)
    spec = system_current_spec(L)
    x, y = random_state(L.space, rng), random_state(L.space, rng)
    a, b = rng.normal(size=2)
    combo = DensityVector(a * x.values + b * y.values, L.space)
    assert current(combo, spec) == pytest.approx(a * current(x, spec) + b * current(y, spec),
                                                 abs=1e-14)


def test_accumulated_charge_zero_current():
    L = build_double_dot(DoubleDotParams(1, 1, 0.0))
    traj = evolve(L, DensityVector.basis(DOUBLE_DOT, "b"), np.linspace(0, 5, 51))
    assert not accumulated_charge(traj, system_current_spec(L)).any()


def test_accumulated_charge_in_steady_regime():
    L = build_double_dot(DoubleDotParams(1, 1, 1))
    spec = system_current_spec(L)
    t = np.linspace(0, 60, 6001)
    q = accumulated_charge(evolve(L, times=t), spec)
    i_dc = 1 / 3.25
    k1, k2 = np.searchsorted(t, [40.0, 60.0])
    assert (q[k2] - q[k1]) == pytest.approx(i_dc * (t[k2] - t[k1]), rel=1e-3)
    # late-time slope of Q
    slope = (q[-1] - q[-101]) / (t[-1] - t[-101])
    assert slope == pytest.approx(i_dc, rel=5e-3)


@pytest.mark.parametrize("model", MODELS)
def test_charge_derivative_matches_current(model, rng):
    L = random_generator(model, rng, low=0.2, high=2.0)
    spec = system_current_spec(L)
    t = np.linspace(0, 5, 5001)
    traj = evolve(L, random_state(L.space, rng), t)
    q = accumulated_charge(traj, spec)
    i = current_series(traj, spec)
    dq = np.gradient(q, t)
    np.testing.assert_allclose(dq[1:-1], i[1:-1], atol=1e-5)
    assert np.all(np.diff(q) >= -1e-15)


def test_coherence_envelope_examples():
    L = build_double_dot(DoubleDotParams(1, 1, 1))
    traj = evolve(L, DensityVector.basis(DOUBLE_DOT, "a"), [0.0])
    assert coherence_envelope(traj, ("b", "c"))[0] == 0.0
    closed = build_double_dot(DoubleDotParams(0, 0, 1))
    traj = evolve(closed, DensityVector.basis(DOUBLE_DOT, "b"), np.linspace(0, 2 * np.pi, 2001))
    assert coherence_envelope(traj, ("b", "c")).max() == pytest.approx(0.5, abs=1e-6)
    with pytest.raises(KeyError):
        coherence_envelope(traj, ("a", "c"))


def test_coherence_envelope_decays_under_strong_dephasing():
    gamma_L = 40.0
    L = build_reduced_double_dot(DoubleDotParams(1, 1, 0.01), gamma_L)
    x0 = DensityVector.from_components(L.space, {"bbar": 0.5, "cbar": 0.5},
                                       {("bbar", "cbar"): 0.5})
    traj = evolve(L, x0, np.linspace(0, 1, 1001))
    env = coherence_envelope(traj, ("bbar", "cbar"))
    k = np.searchsorted(traj.times, 2 / (1 + gamma_L))
    # two e-foldings at rate (Gamma_R + gamma_L)/2
    assert env[k] == pytest.approx(0.5 * np.exp(-1), rel=0.02)
