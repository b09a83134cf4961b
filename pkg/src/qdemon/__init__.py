"""Desk-scale simulator for a cavity-memory quantum Maxwell demon."""
__version__ = "0.1.0"

from .device import DeviceParams
from .dynamics import evolve, evolve_adjoint, equilibrium_state
from .kernels import BACKEND
from .protocol import DEMON_ALPHA, DemonRun, DemonSimulator
from .sequences import PulseSegment, PulseSequence, calibrate, make_continuous_sequence, make_sequential_sequence
from .tomography import ReconstructionConfig, TomographyGrid, build_effects, maxlike_reconstruct, simulate_tomography

__all__ = [
    "__version__",
    "BACKEND",
    "DEMON_ALPHA",
    "DemonRun",
    "DemonSimulator",
    "DeviceParams",
    "PulseSegment",
    "PulseSequence",
    "ReconstructionConfig",
    "TomographyGrid",
    "build_effects",
    "calibrate",
    "equilibrium_state",
    "evolve",
    "evolve_adjoint",
    "make_continuous_sequence",
    "make_sequential_sequence",
    "maxlike_reconstruct",
    "simulate_tomography",
]
