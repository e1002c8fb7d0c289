"""Particle reduced density matrix and the coherence-length observable.

Tracing the fermions out of a pure composite state gives the L x L matrix

    rho_ij = <Psi| a+_j a_i |Psi> = sum_mask psi(i, mask) psi(j, mask),

a blocked dot product thanks to the site-major basis ordering.  The particle
index is a tensor factor, not a fermion mode, so no fermionic sign enters.

The coherence length of rho is

    l(rho) = sqrt( 2 sum_ij |rho_ij|^2 (j-i)^2 / sum_ij |rho_ij|^2 ),

which ranges from 0 for a state localized on one site to L-1 for the
end-to-end superposition (|1> + |L>)/sqrt(2) tensor |F>.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .fock import FockBasis, ManyBodyState
from .spectral import EigenDecomposition

_NORM_TOL = 1e-8
_TRACE_TOL = 1e-10
_SYMMETRY_TOL = 1e-12
_PSD_TOL = -1e-10

PROFILE_CHUNK = 256  # fixed batch size keeps results bit-identical across runs


@dataclass
class ReducedDensityMatrix:
    """Unit-trace, symmetric, positive-semidefinite particle state."""

    L: int
    entries: np.ndarray

    def validate(self) -> None:
        tr = float(np.trace(self.entries))
        if abs(tr - 1.0) > _TRACE_TOL:
            raise ValueError(f"trace {tr!r} deviates from 1 beyond {_TRACE_TOL:g}")
        asym = float(np.abs(self.entries - self.entries.T).max())
        if asym > _SYMMETRY_TOL:
            raise ValueError(f"asymmetry {asym:.3e} beyond {_SYMMETRY_TOL:g}")
        lo = float(np.linalg.eigvalsh(self.entries)[0])
        if lo < _PSD_TOL:
            raise ValueError(f"negative eigenvalue {lo:.3e} beyond {_PSD_TOL:g}")

    def purity(self) -> float:
        return float(np.sum(self.entries * self.entries))


@dataclass
class CoherenceRecord:
    """Per-eigenstate unit of every scaling analysis."""

    index: int
    energy: float
    length: float
    outlier: bool = False


@dataclass
class CorrelationRow:
    """|<Phi| a+_j a_ref |Phi>| for j = 1..L at a fixed reference site."""

    ref_site: int
    values: np.ndarray


@lru_cache(maxsize=32)
def _distance_sq(L: int) -> np.ndarray:
    j = np.arange(L, dtype=float)
    return (j[None, :] - j[:, None]) ** 2


def reduced_density_matrix(psi: ManyBodyState) -> ReducedDensityMatrix:
    """Trace out the fermions; requires a normalized input state."""
    norm = psi.norm()
    if abs(norm - 1.0) > _NORM_TOL:
        raise ValueError(f"state norm {norm!r} deviates from 1 beyond {_NORM_TOL:g}")
    blocks = psi.blocks()
    rho = ReducedDensityMatrix(L=psi.basis.params.L, entries=blocks @ blocks.T)
    rho.validate()
    return rho


def coherence_length(rho: ReducedDensityMatrix | np.ndarray) -> float:
    entries = rho.entries if isinstance(rho, ReducedDensityMatrix) else np.asarray(rho)
    w2 = entries * entries
    num = 2.0 * float((w2 * _distance_sq(entries.shape[0])).sum())
    den = float(w2.sum())
    return float(np.sqrt(num / den))


def correlation_row(psi: ManyBodyState, ref_site: int = 1) -> CorrelationRow:
    L = psi.basis.params.L
    if not 1 <= ref_site <= L:
        raise ValueError(f"reference site {ref_site} outside 1..{L}")
    rho = reduced_density_matrix(psi)
    return CorrelationRow(ref_site=ref_site, values=np.abs(rho.entries[ref_site - 1]))


def _profile_arrays(vectors: np.ndarray, basis: FockBasis, ref_site: int = 1,
                    chunk: int = PROFILE_CHUNK) -> tuple[np.ndarray, np.ndarray]:
    """Coherence lengths and |rho[ref_site - 1, :]| rows for all column states.

    Processes eigenvectors in fixed-size chunks of batched L x L Gram
    matrices; per-state arithmetic is independent of the chunk boundaries.
    """
    L, M = basis.params.L, basis.n_masks
    if not 1 <= ref_site <= L:
        raise ValueError(f"reference site {ref_site} outside 1..{L}")
    n_states = vectors.shape[1]
    d2 = _distance_sq(L)
    lengths = np.empty(n_states)
    rows = np.empty((n_states, L))
    for a in range(0, n_states, chunk):
        b = min(a + chunk, n_states)
        blocks = np.ascontiguousarray(vectors[:, a:b].T).reshape(b - a, L, M)
        rho = blocks @ blocks.transpose(0, 2, 1)
        w2 = rho * rho
        num = 2.0 * (w2 * d2).sum(axis=(1, 2))
        den = w2.sum(axis=(1, 2))
        lengths[a:b] = np.sqrt(num / den)
        rows[a:b] = np.abs(rho[:, ref_site - 1, :])
    return lengths, rows


def spectrum_coherence_profile(decomp: EigenDecomposition, basis: FockBasis) -> list[CoherenceRecord]:
    """One coherence record per eigenstate, in ascending energy order.

    Outlier flags default to False here; flagging policy lives with the
    experiment drivers.
    """
    if decomp.dim != basis.dimension:
        raise ValueError(f"decomposition dim {decomp.dim} != basis dimension {basis.dimension}")
    lengths, _ = _profile_arrays(decomp.vectors, basis)
    return [CoherenceRecord(index=k, energy=float(decomp.energies[k]), length=float(lengths[k]))
            for k in range(decomp.dim)]


def write_spectrum_csv(path: str | Path, records: Iterable[CoherenceRecord]) -> None:
    """Columns: index, energy, coherence_length, outlier (0/1)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["state_index", "energy", "coherence_length", "outlier"])
        for r in records:
            writer.writerow([r.index, repr(r.energy), repr(r.length), int(r.outlier)])


def write_correlations_csv(path: str | Path,
                           rows: Sequence[tuple[int, np.ndarray]]) -> None:
    """Columns: state_index, j, abs_correlation.

    A state_index of -1 denotes the row averaged over the whole spectrum.
    """
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["state_index", "j", "abs_correlation"])
        for state_index, values in rows:
            for j, value in enumerate(values, start=1):
                writer.writerow([state_index, j, repr(float(value))])
