"""Quantum Szilard-engine models: spectra, thermal averages, cycles and ledgers."""

__version__ = "0.1.0"

from .box_spectrum import ContinuationStall, Eigenstate, GasBoxParams, solve_eigenvalue
from .engine_cycle import EngineParams, ResetUnitary, energy_flow, mc_engine
from .general_demon import DemonParams, demon_flow, mc_demon
from .quantum_weight import WeightParams
from .thermal_gas import GasThermalState

__all__ = [
    "ContinuationStall", "Eigenstate", "GasBoxParams", "solve_eigenvalue",
    "EngineParams", "ResetUnitary", "energy_flow", "mc_engine",
    "DemonParams", "demon_flow", "mc_demon", "WeightParams", "GasThermalState",
]
