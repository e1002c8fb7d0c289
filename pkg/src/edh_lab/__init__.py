"""Exact-diagonalization laboratory for a heavy particle in a 1D Fermi gas.

The package measures how far the particle's quantum coherence survives
contact with a fermionic environment: eigenstates of the composite system
are diagonalized exactly, the fermions are traced out, and the coherence
length of the remaining particle density matrix is profiled across the
spectrum, across system sizes, and against the analytically solvable
pinned-particle sector.

Submodules
----------
fock         composite basis, Hamiltonian assembly, matrix-free application
spectral     dense diagonalization, invariant checks, checkpoints
reduced      reduced density matrices, coherence lengths, spectrum profiles
freefermion  pinned-particle analytics: determinants, overlaps, node states
experiments  campaign drivers and file outputs
cli          command-line front end

Importing the top-level package is deliberately cheap; submodules (and
numpy/scipy with them) load on first attribute access so the CLI can pin
BLAS thread counts beforehand.
"""

from importlib import import_module

__version__ = "0.1.0"

_EXPORTS = {
    "ModelParams": "fock",
    "ParameterError": "fock",
    "FockBasis": "fock",
    "ManyBodyState": "fock",
    "enumerate_basis": "fock",
    "assemble_hamiltonian": "fock",
    "apply_hamiltonian": "fock",
    "half_filling": "fock",
    "EigenDecomposition": "spectral",
    "full_diagonalize": "spectral",
    "ReducedDensityMatrix": "reduced",
    "reduced_density_matrix": "reduced",
    "coherence_length": "reduced",
    "spectrum_coherence_profile": "reduced",
    "SingleParticleHamiltonian": "freefermion",
    "single_particle_diagonalize": "freefermion",
    "SlaterState": "freefermion",
    "ground_slater": "freefermion",
    "slater_overlap": "freefermion",
    "embed_slater": "freefermion",
    "integrable_eigenstate": "freefermion",
    "degenerate_superposition": "freefermion",
    "overlap_form_length": "freefermion",
    "direct_form_length": "freefermion",
    "orthogonality_scaling": "freefermion",
    "node_state_construction": "freefermion",
    "OutlierPolicy": "experiments",
    "flag_outliers": "experiments",
    "SweepSpec": "experiments",
    "run_spectrum_job": "experiments",
    "run_scaling_sweep": "experiments",
}

__all__ = sorted(_EXPORTS) + ["__version__"]


def __getattr__(name):
    try:
        module = _EXPORTS[name]
    except KeyError:
        raise AttributeError(f"module {__name__!r} has no attribute {name!r}") from None
    return getattr(import_module(f".{module}", __name__), name)


def __dir__():
    return sorted(set(globals()) | set(_EXPORTS))
