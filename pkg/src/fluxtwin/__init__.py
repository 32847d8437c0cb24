"""Three-body contact fluxes on the line: twisted boundary conditions and
their gauge-field counterpart, with twin-group words as loop labels."""

__version__ = "0.1.0"

from ._backend import BACKEND
from .coords import MassSystem, Trajectory, reduced_masses, relative_loop, to_hyperpolar, to_jacobi
from .errors import FluxTwinError
from .gauge import FluxSet, gauge_potential, loop_flux, rep_value, wilson_line, wilson_loop
from .kernel import KernelSpec, covering_sum_kernel_ring, gauge_transform_kernel, mode_sum_kernel_ring
from .spectral import RadialGrid, RingGrid, build_ring_hamiltonian, spectrum, unitary_equivalence_check
from .twin import TwinWord, induced_permutation, is_pure, reduce_word, winding_numbers, word_to_trajectory

__all__ = [
    "BACKEND",
    "FluxSet",
    "FluxTwinError",
    "KernelSpec",
    "MassSystem",
    "RadialGrid",
    "RingGrid",
    "Trajectory",
    "TwinWord",
    "build_ring_hamiltonian",
    "covering_sum_kernel_ring",
    "gauge_potential",
    "gauge_transform_kernel",
    "induced_permutation",
    "is_pure",
    "loop_flux",
    "mode_sum_kernel_ring",
    "reduce_word",
    "reduced_masses",
    "relative_loop",
    "rep_value",
    "spectrum",
    "to_hyperpolar",
    "to_jacobi",
    "unitary_equivalence_check",
    "winding_numbers",
    "wilson_line",
    "wilson_loop",
    "word_to_trajectory",
]
