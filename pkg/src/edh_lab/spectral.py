"""Full real-symmetric eigendecomposition of the assembled Hamiltonian.

Every analysis downstream scans the complete spectrum, so the solver
densifies the sparse Hamiltonian and calls LAPACK's divide-and-conquer
driver.  At the largest production size (L=12 half filled, dim=11088) the
dense matrix plus workspace peaks near 3 GB and a run takes minutes, hence
the checkpoint helpers at the bottom of the module.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.linalg as sla

from .fock import FockBasis, ManyBodyState, ModelParams, SparseHamiltonian, apply_hamiltonian

DEFAULT_DIM_CAP = 20000

CHECKPOINT_FORMAT = "edh-lab/eigendecomposition"
CHECKPOINT_VERSION = 1

# full Gram-matrix verification above this size costs more than the solve
_FULL_GRAM_LIMIT = 1500
_ORTHO_SAMPLE = 64
_ORTHO_TOL = 1e-10
_RESIDUAL_TOL = 1e-9
_DEGENERACY_TOL = 1e-10


class DiagonalizationError(RuntimeError):
    """The eigensolver failed or its output violates the solver contract."""


@dataclass
class EigenDecomposition:
    """Complete spectrum: ascending energies and orthonormal eigenvectors.

    ``vectors[:, k]`` is the k-th eigenstate in the Fock basis, sign-fixed so
    its largest-magnitude component is positive.  ``near_degenerate`` lists
    indices i where E_{i+1} - E_i <= 1e-10 * spectral range; eigenvector
    mixing inside such pairs is solver-dependent, which matters to per-state
    observables.
    """

    energies: np.ndarray
    vectors: np.ndarray
    residual_bound: float
    near_degenerate: np.ndarray

    @property
    def dim(self) -> int:
        return int(self.energies.size)

    @property
    def spectral_range(self) -> float:
        return float(self.energies[-1] - self.energies[0])

    def state(self, k: int, basis: FockBasis) -> ManyBodyState:
        return ManyBodyState(basis, self.vectors[:, k].copy())


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    lead = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[lead, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    vectors *= signs
    return vectors


def _residual_bound(h: SparseHamiltonian, energies: np.ndarray, vectors: np.ndarray,
                    block: int = 512) -> float:
    csr = h.to_csr()
    worst = 0.0
    for a in range(0, energies.size, block):
        b = min(a + block, energies.size)
        r = csr @ vectors[:, a:b] - vectors[:, a:b] * energies[a:b]
        worst = max(worst, float(np.sqrt((r * r).sum(axis=0)).max()))
    return worst


def _check_orthonormality(vectors: np.ndarray) -> float:
    n = vectors.shape[1]
    if n <= _FULL_GRAM_LIMIT:
        gram = vectors.T @ vectors
        return float(np.abs(gram - np.eye(n)).max())
    # sampled columns checked against the full set
    rng = np.random.default_rng(0)
    cols = np.sort(rng.choice(n, size=_ORTHO_SAMPLE, replace=False))
    gram = vectors.T @ vectors[:, cols]
    expect = np.zeros((n, cols.size))
    expect[cols, np.arange(cols.size)] = 1.0
    return float(np.abs(gram - expect).max())


def full_diagonalize(h: SparseHamiltonian, *, dim_cap: int = DEFAULT_DIM_CAP) -> EigenDecomposition:
    """Dense divide-and-conquer diagonalization of the full spectrum.

    Deterministic for a fixed input: LAPACK orders energies ascending and the
    eigenvector gauge is fixed by making the largest-magnitude component of
    each vector positive.
    """
    if h.dimension > dim_cap:
        raise ValueError(
            f"dimension {h.dimension} exceeds the solver cap {dim_cap}; "
            f"raise dim_cap explicitly for larger runs")
    dense = h.to_dense()
    try:
        energies, vectors = sla.eigh(dense, driver="evd", overwrite_a=True,
                                     check_finite=False)
    except sla.LinAlgError as exc:
        raise DiagonalizationError(f"eigensolver failed to converge: {exc}") from exc
    del dense

    vectors = _fix_signs(vectors)

    ortho_err = _check_orthonormality(vectors)
    if ortho_err > _ORTHO_TOL:
        raise DiagonalizationError(
            f"eigenvector orthonormality violated: max deviation {ortho_err:.3e}")

    residual = _residual_bound(h, energies, vectors)
    spectral_range = float(energies[-1] - energies[0])
    if residual > _RESIDUAL_TOL * spectral_range and h.dimension > 1:
        raise DiagonalizationError(
            f"residual bound {residual:.3e} exceeds "
            f"{_RESIDUAL_TOL:g} * spectral range {spectral_range:.3e}")

    gaps = np.diff(energies)
    near = np.flatnonzero(gaps <= _DEGENERACY_TOL * spectral_range)

    return EigenDecomposition(
        energies=energies,
        vectors=vectors,
        residual_bound=residual,
        near_degenerate=near,
    )


def residual_report(basis: FockBasis, decomp: EigenDecomposition) -> np.ndarray:
    """Per-eigenpair ||H v - E v|| recomputed through the matrix-free route.

    Independent of the assembled matrix used by the solver, so it certifies
    assembly and diagonalization at once.
    """
    if basis.dimension != decomp.dim:
        raise ValueError(f"basis dimension {basis.dimension} != decomposition dim {decomp.dim}")
    residuals = np.empty(decomp.dim)
    for k in range(decomp.dim):
        v = ManyBodyState(basis, decomp.vectors[:, k])
        hv = apply_hamiltonian(basis, v).amplitudes
        residuals[k] = np.linalg.norm(hv - decomp.energies[k] * decomp.vectors[:, k])
    return residuals


def _checkpoint_path(path: str | Path) -> Path:
    path = Path(path)
    if not path.name.endswith(".npz"):
        path = path.with_name(path.name + ".npz")
    return path


def save_checkpoint(path: str | Path, decomp: EigenDecomposition, params: ModelParams) -> None:
    """Binary checkpoint with a versioned header, for re-analysis without re-solving."""
    path = _checkpoint_path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    np.savez(
        path,
        format=CHECKPOINT_FORMAT,
        version=CHECKPOINT_VERSION,
        L=params.L, N=params.N, J=params.J, Jp=params.Jp, U=params.U, eps=params.eps,
        energies=decomp.energies,
        vectors=decomp.vectors,
        residual_bound=decomp.residual_bound,
        near_degenerate=decomp.near_degenerate,
    )


def load_checkpoint(path: str | Path) -> tuple[EigenDecomposition, ModelParams]:
    with np.load(_checkpoint_path(path)) as data:
        if "format" not in data.files or str(data["format"]) != CHECKPOINT_FORMAT:
            raise ValueError(f"not an eigendecomposition checkpoint: {path}")
        if int(data["version"]) != CHECKPOINT_VERSION:
            raise ValueError(
                f"checkpoint version {int(data['version'])} unsupported "
                f"(expected {CHECKPOINT_VERSION})")
        params = ModelParams(L=int(data["L"]), N=int(data["N"]), J=float(data["J"]),
                             Jp=float(data["Jp"]), U=float(data["U"]), eps=float(data["eps"]))
        decomp = EigenDecomposition(
            energies=data["energies"],
            vectors=data["vectors"],
            residual_bound=float(data["residual_bound"]),
            near_degenerate=data["near_degenerate"],
        )
    return decomp, params
