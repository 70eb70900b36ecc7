"""Photoabsorber thermal model.

Single thermal node with resistance R_abs to the environment and heat
capacity C_abs.  Temperatures are rises above ambient, so the zero state is
exact and the RC step response needs no offset term.  Cavity air couples
quasi-statically through the dimensionless fraction kappa.
"""
from __future__ import annotations

import numpy as np

from .model import ThermalParams, ThermalState


def t_abs_step(t: float, P_L: float, thermal: ThermalParams, dT_init: float = 0.0) -> float:
    """Closed-form absorber rise under constant optical power.

    dT(t) = eps*P_L*R * (1 - e^(-t/tau)) + dT_init * e^(-t/tau)
    """
    tau = thermal.tau
    decay = np.exp(-t / tau)
    return thermal.epsilon * P_L * thermal.R_abs * (1.0 - decay) + dT_init * decay


def thermal_rhs(state: ThermalState, P_abs: float, thermal: ThermalParams) -> float:
    """d(dT_abs)/dt for absorbed power P_abs; constant-input solution is t_abs_step."""
    return (P_abs - state.dT_abs / thermal.R_abs) / thermal.C_abs


def air_rise_from_abs(dT_abs, kappa: float):
    """Quasi-static cavity-air rise: kappa * dT_abs.  Accepts scalars or arrays."""
    return kappa * dT_abs
