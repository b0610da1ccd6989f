"""Closed-form dc currents used as references in tests and sweeps."""

from __future__ import annotations

from .errors import UndefinedCurrentError
from .models import DoubleDotParams


def single_dot_dc(Gamma_L: float, Gamma_R: float) -> float:
    """Resonant dc current through one level: Gamma_L*Gamma_R/(Gamma_L+Gamma_R)."""
    if Gamma_L < 0 or Gamma_R < 0:
        raise ValueError("widths must be non-negative")
    if Gamma_L + Gamma_R == 0:
        raise UndefinedCurrentError("both widths vanish; current undefined")
    return Gamma_L * Gamma_R / (Gamma_L + Gamma_R)


def dephased_double_dot_dc(p: DoubleDotParams, gamma_L: float) -> float:
    """dc current of the double dot whose coherence decays at (Gamma_R + gamma_L)/2.

    Obtained by solving the stationary Bloch equations with the extra
    dephasing; reduces to :func:`double_dot_dc` at ``gamma_L = 0``.
    """
    if p.Gamma_L <= 0:
        raise UndefinedCurrentError("Gamma_L = 0 blocks the emitter; current undefined")
    if p.Gamma_R <= 0:
        raise UndefinedCurrentError("Gamma_R = 0 blocks the collector; current undefined")
    if gamma_L < 0:
        raise ValueError("gamma_L must be non-negative")
    if p.Omega == 0:
        return 0.0
    dephasing = 0.5 * (p.Gamma_R + gamma_L)
    lorentz = (dephasing**2 + p.epsilon**2) / (2 * p.Omega**2 * dephasing)
    return p.Gamma_R / (2 + p.Gamma_R / p.Gamma_L + p.Gamma_R * lorentz)


def double_dot_dc(p: DoubleDotParams) -> float:
    """dc current of the bare double dot.

    Gamma_R Omega^2 / (eps^2 + Gamma_R^2/4 + Omega^2 (2 + Gamma_R/Gamma_L))
    """
    if p.Gamma_L <= 0:
        raise UndefinedCurrentError("Gamma_L = 0 blocks the emitter; current undefined")
    if p.Gamma_R <= 0:
        raise UndefinedCurrentError("Gamma_R = 0 blocks the collector; current undefined")
    om2 = p.Omega**2
    return p.Gamma_R * om2 / (
        p.epsilon**2 + p.Gamma_R**2 / 4 + om2 * (2 + p.Gamma_R / p.Gamma_L)
    )
