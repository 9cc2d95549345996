"""Amplitude-modulated driven four-level quantum heat engine.

Photon full counting statistics from the instantaneous spectral data of the
5x5 counting-field generator (dynamic part) plus the Berry-phase-like loop
integral over one driving cycle (geometric part), with the derived
thermodynamics: work, power, efficiency at maximum power and the
uncertainty-relation ratio gamma/eta.
"""

__version__ = "0.1.0"

from .fcs import CgfResult, CumulantSet, cumulants, dynamic_cgf, geometric_cgf
from .model import (DrivingSpec, EngineParams, LiouvillianMatrix, Occupations,
                    assemble_liouvillian, bath_temperatures, envelope_value,
                    fig2_defaults, occupations)
from .oracle import PropagationResult, propagate_cgf
from .spectral import SpectralTriple, dominant_triple, triple_derivative_t
from .thermo import (EmpResult, ThermoReport, affinity, carnot_efficiency,
                     carnot_sweep, efficiency, emp, power, thermo_report,
                     tur_ratio, work)

__all__ = [
    "CgfResult", "CumulantSet", "DrivingSpec", "EmpResult", "EngineParams",
    "LiouvillianMatrix", "Occupations", "PropagationResult", "SpectralTriple",
    "ThermoReport", "affinity", "assemble_liouvillian", "bath_temperatures",
    "carnot_efficiency", "carnot_sweep", "cumulants", "dominant_triple",
    "dynamic_cgf", "efficiency", "emp", "envelope_value", "fig2_defaults",
    "geometric_cgf", "occupations", "power", "propagate_cgf",
    "thermo_report", "triple_derivative_t", "tur_ratio", "work",
]
