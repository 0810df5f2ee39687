"""thermokerr: few-mode nonlinear interferometers as thermodynamic machines.

Subpackages:
    fock       truncated Fock-space states and circuit elements
    thermo     ergotropy, passive states, entropies
    engine     semiclassical 4-mode heat-engine block, Monte Carlo, cascades
    metrology  cross-Kerr MZI and quantum Fisher information
    sensor     black-box process traces and identification
    cli        command-line dataset generator
"""

from . import engine, fock, metrology, sensor, thermo
from .engine import EngineParams, EngineOutput, mc_engine_output, analytic_engine_output
from .fock import (BeamSplitter, Circuit, CrossKerr, KPhotonExchange, MultiModeState,
                   PhaseShift, apply, apply_circuit, choose_cutoff, make_coherent,
                   make_number, make_thermal, mean_photon, reduced_density, tensor)
from .metrology import MziSpec, QfiReport, qfi, qfi_closed_form
from .sensor import BlackBoxProcess, EfficiencyTrace, identify_process, wc_trace
from .thermo import ErgotropyReport, ergotropy, is_passive, von_neumann_entropy

__all__ = [
    "engine", "fock", "metrology", "sensor", "thermo",
    "EngineParams", "EngineOutput", "mc_engine_output", "analytic_engine_output",
    "BeamSplitter", "Circuit", "CrossKerr", "KPhotonExchange", "MultiModeState",
    "PhaseShift", "apply", "apply_circuit", "choose_cutoff", "make_coherent",
    "make_number", "make_thermal", "mean_photon", "reduced_density", "tensor",
    "MziSpec", "QfiReport", "qfi", "qfi_closed_form",
    "BlackBoxProcess", "EfficiencyTrace", "identify_process", "wc_trace",
    "ErgotropyReport", "ergotropy", "is_passive", "von_neumann_entropy",
]

__version__ = "0.1.0"
