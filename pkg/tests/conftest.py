import numpy as np
import pytest

from dotmeasure import (
    DetectorRegime,
    DensityVector,
    DoubleDotDetectorParams,
    DoubleDotParams,
    SingleDotDetectorParams,
    build_double_dot,
    build_double_dot_detector,
    build_reduced_double_dot,
    build_single_dot_detector,
)

MODELS = ("single_dot_detector", "double_dot", "double_dot_detector", "reduced")

_acceptance_lines = []


def random_generator(model, rng, low=0.1, high=3.0, symmetric_exit=True):
    """A generator with independently drawn widths.

    For the double dot + detector the two right-exit detector widths are tied
    (``gamma_Rp = gamma_R``) unless ``symmetric_exit`` is False.
    """
    u = lambda: float(rng.uniform(low, high))  # noqa: E731
    signed = lambda: float(rng.uniform(-high, high))  # noqa: E731
    if model == "single_dot_detector":
        return build_single_dot_detector(
            SingleDotDetectorParams(u(), u(), u(), u(), u(), u(), u(), u()))
    if model == "double_dot":
        return build_double_dot(DoubleDotParams(u(), u(), signed(), signed()))
    if model == "reduced":
        return build_reduced_double_dot(DoubleDotParams(u(), u(), signed(), signed()), u())
    g_r = u()
    return build_double_dot_detector(DoubleDotDetectorParams(
        Gamma_L=u(), Gamma_R=u(), Omega=signed(), epsilon=signed(),
        gamma_L=u(), gamma_R=g_r, gamma_Lp=u(), gamma_Rp=g_r if symmetric_exit else u(),
        Omega_p=signed(), Gamma_Lp=u(), U1=u(), U2=u(),
        regime=list(DetectorRegime)[rng.integers(3)],
    ))


def random_state(space, rng):
    """A physical state: random populations, coherences inside the bound."""
    x = np.zeros(space.dim_real)
    x[: space.n_pop] = rng.dirichlet(np.ones(space.n_pop))
    for i, j in space.coherence_pairs:
        bound = np.sqrt(x[space.pop_index(i)] * x[space.pop_index(j)])
        z = bound * rng.uniform(0, 1) * np.exp(1j * rng.uniform(0, 2 * np.pi))
        re, im = space.coherence_index((i, j))
        x[re], x[im] = z.real, z.imag
    return DensityVector(x, space)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def criterion(request):
    """Record a pass/fail line for an acceptance criterion.

    Usage: ``criterion("C3", "description", ok)``; the line is printed in the
    terminal summary and the test asserts ``ok``.
    """
    def record(tag, text, ok):
        _acceptance_lines.append(f"[{'PASS' if ok else 'FAIL'}] {tag}: {text}")
        print(_acceptance_lines[-1])
        assert ok, f"{tag}: {text}"

    return record


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)
