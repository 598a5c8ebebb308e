"""Digital-analog counterdiabatic circuit synthesis and verification."""

from .pauli import KERNEL_BACKEND, PauliString, PauliSum

__version__ = "0.1.0"

__all__ = ["PauliString", "PauliSum", "KERNEL_BACKEND", "__version__"]
