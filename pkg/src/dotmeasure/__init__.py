"""Measurement-induced decoherence in coupled quantum-dot transport.

Builds the rate/Bloch generators of a dot (or double dot) watched by a
detector dot, evolves and solves them, and compares against closed forms.
"""

from .analytics import dephased_double_dot_dc, double_dot_dc, single_dot_dc
from .dynamics import DensityVector, Trajectory, decoherence_rate, evolve, steady_state
from .errors import (
    ConfigError,
    DotMeasureError,
    FitError,
    IntegrationError,
    ParameterError,
    StateError,
    SteadyStateError,
    UndefinedCurrentError,
)
from .models import (
    DOUBLE_DOT,
    DOUBLE_DOT_DETECTOR,
    REDUCED,
    SINGLE_DOT_DETECTOR,
    DetectorRegime,
    DoubleDotDetectorParams,
    DoubleDotParams,
    EnergyConfig,
    Liouvillian,
    ReducedParams,
    SingleDotDetectorParams,
    StateSpace,
    build_double_dot,
    build_double_dot_detector,
    build_reduced_double_dot,
    build_single_dot_detector,
    classify_regime,
)
from .observables import (
    CurrentSpec,
    accumulated_charge,
    coherence_envelope,
    current,
    detector_current_spec,
    system_current_spec,
)
from .reduction import ReductionReport, compare_reduction, trace_detector

__version__ = "0.1.0"
