"""Composite Fock space of one distinguishable particle plus N spinless fermions.

The lattice is an open chain with L sites (labelled 1..L).  A basis state is a
pair (particle site, fermion occupation bitmask); site i corresponds to bit
i-1 of the mask.  The many-body Hamiltonian is

    H = -J sum_{i<L} (c+_i c_{i+1} + h.c.) - J' sum_{i<L} (a+_i a_{i+1} + h.c.)
        + U sum_i n^a_i n^c_i + eps * sum_j (j/L) n^c_j

with open boundaries.  All couplings are real, so H is real symmetric and all
amplitudes are kept real.

Fermion operator ordering: creation operators are ordered by ascending site
index, so a hop between sites i and j carries the sign
(-1)^(number of occupied sites strictly between i and j).  For the
nearest-neighbour hops used here the sign is always +1; the general rule is
kept in ``fermion_hop_sign`` so longer-range terms can be added safely.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
import scipy.sparse as sps


class ParameterError(ValueError):
    """Model parameters are combinatorially or physically invalid."""


@dataclass(frozen=True)
class ModelParams:
    """Couplings and sizes of the chain.

    L     number of lattice sites
    N     number of fermions, 0 <= N <= L
    J     fermion hopping (sets the energy scale)
    Jp    particle hopping J'
    U     contact coupling between the particle and a fermion
    eps   amplitude of the linear on-site bias felt by the fermions
    """

    L: int
    N: int
    J: float = 1.0
    Jp: float = 0.0
    U: float = 0.0
    eps: float = 0.0

    def __post_init__(self):
        if not isinstance(self.L, int) or not isinstance(self.N, int):
            raise ParameterError(f"L and N must be integers, got L={self.L!r} N={self.N!r}")
        if self.L < 1:
            raise ParameterError(f"need at least one site, got L={self.L}")
        if not 0 <= self.N <= self.L:
            raise ParameterError(f"fermion count N={self.N} outside 0..L={self.L}")
        for name in ("J", "Jp", "U", "eps"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise ParameterError(f"{name}={v!r} is not finite")
        if self.J < 0:
            raise ParameterError(f"fermion hopping must be non-negative, got J={self.J}")
        if self.Jp < 0:
            raise ParameterError(f"particle hopping must be non-negative, got Jp={self.Jp}")

    @property
    def density(self) -> float:
        """Fermion density n = N/L."""
        return self.N / self.L

    @classmethod
    def half_filled(cls, L: int, **couplings) -> "ModelParams":
        """N = L/2 for even L, (L-1)/2 for odd L."""
        return cls(L=L, N=half_filling(L), **couplings)


def half_filling(L: int) -> int:
    return L // 2


def enumerate_masks(L: int, N: int) -> list[int]:
    """All L-bit masks with exactly N set bits, in increasing integer order."""
    if not 0 <= N <= L:
        raise ParameterError(f"cannot place {N} fermions on {L} sites")
    return sorted(sum(1 << (s - 1) for s in combo)
                  for combo in combinations(range(1, L + 1), N))


class FockBasis:
    """Ordered enumeration of (particle site, fermion mask) basis states.

    Ordering is particle-site major with masks ascending inside each site
    block, so a state vector reshaped to (L, n_masks) has the particle index
    as its leading axis.  dimension = L * C(L, N).
    """

    def __init__(self, params: ModelParams):
        self.params = params
        self.masks = enumerate_masks(params.L, params.N)
        self.n_masks = len(self.masks)
        self.dimension = params.L * self.n_masks
        self.states = [(site, mask)
                       for site in range(1, params.L + 1)
                       for mask in self.masks]
        self.mask_rank = {m: r for r, m in enumerate(self.masks)}
        self.index_of = {sm: k for k, sm in enumerate(self.states)}

    def index(self, site: int, mask: int) -> int:
        return self.index_of[(site, mask)]

    def __len__(self) -> int:
        return self.dimension

    def __repr__(self) -> str:
        p = self.params
        return f"FockBasis(L={p.L}, N={p.N}, dim={self.dimension})"


def enumerate_basis(params: ModelParams) -> FockBasis:
    return FockBasis(params)


@dataclass
class ManyBodyState:
    """Real amplitude vector over a FockBasis."""

    basis: FockBasis
    amplitudes: np.ndarray

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=float)
        if self.amplitudes.shape != (self.basis.dimension,):
            raise ValueError(
                f"amplitude vector of shape {self.amplitudes.shape} does not "
                f"match basis dimension {self.basis.dimension}")

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def blocks(self) -> np.ndarray:
        """View of the amplitudes as an (L, n_masks) array, particle-site major."""
        return self.amplitudes.reshape(self.basis.params.L, self.basis.n_masks)


def basis_vector(basis: FockBasis, site: int, mask: int) -> ManyBodyState:
    v = np.zeros(basis.dimension)
    v[basis.index(site, mask)] = 1.0
    return ManyBodyState(basis, v)


def product_state(basis: FockBasis, site: int, fermion_amplitudes: np.ndarray) -> ManyBodyState:
    """|site> tensor |F>, with F given as amplitudes over the mask ordering."""
    f = np.asarray(fermion_amplitudes, dtype=float)
    if f.shape != (basis.n_masks,):
        raise ValueError(f"fermion amplitudes of shape {f.shape}, expected ({basis.n_masks},)")
    if not 1 <= site <= basis.params.L:
        raise ValueError(f"particle site {site} outside 1..{basis.params.L}")
    v = np.zeros(basis.dimension)
    v[(site - 1) * basis.n_masks: site * basis.n_masks] = f
    return ManyBodyState(basis, v)


def two_site_superposition(basis: FockBasis, site_a: int, site_b: int,
                           fermion_a: np.ndarray,
                           fermion_b: np.ndarray | None = None) -> ManyBodyState:
    """(|a> tensor |F_a> + |b> tensor |F_b>) / sqrt(2).

    With ``fermion_b`` omitted both branches share the same fermion state,
    which is the maximally delocalized two-site configuration.
    """
    if site_a == site_b:
        raise ValueError("superposition sites must be distinct")
    fa = np.asarray(fermion_a, dtype=float)
    fb = fa if fermion_b is None else np.asarray(fermion_b, dtype=float)
    v = np.zeros(basis.dimension)
    v[(site_a - 1) * basis.n_masks: site_a * basis.n_masks] = fa / math.sqrt(2)
    v[(site_b - 1) * basis.n_masks: site_b * basis.n_masks] = fb / math.sqrt(2)
    return ManyBodyState(basis, v)


def fermion_hop_sign(mask: int, i: int, j: int) -> int:
    """Sign of c+_i c_j on |mask>, with creation operators ordered by site.

    Equals (-1)^(occupied sites strictly between i and j); +1 for any
    nearest-neighbour pair.
    """
    lo, hi = (i, j) if i < j else (j, i)
    between = mask & (((1 << (hi - 1)) - 1) ^ ((1 << lo) - 1))
    return -1 if bin(between).count("1") % 2 else 1


def _bias_sum(mask: int, L: int) -> float:
    """sum over occupied sites j of j/L."""
    total = 0.0
    for j in range(1, L + 1):
        if mask >> (j - 1) & 1:
            total += j / L
    return total


@dataclass
class SparseHamiltonian:
    """Real symmetric H stored as a diagonal plus upper-triangular entries."""

    dimension: int
    diagonal: np.ndarray
    rows: np.ndarray
    cols: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        if not (np.all(np.isfinite(self.diagonal)) and np.all(np.isfinite(self.values))):
            raise ValueError("Hamiltonian entries must be finite")
        if self.rows.size and not np.all(self.rows < self.cols):
            raise ValueError("off-diagonal entries must satisfy row < col")

    @property
    def nnz_offdiagonal(self) -> int:
        return int(self.values.size)

    def to_dense(self) -> np.ndarray:
        h = np.zeros((self.dimension, self.dimension))
        h[np.arange(self.dimension), np.arange(self.dimension)] = self.diagonal
        h[self.rows, self.cols] = self.values
        h[self.cols, self.rows] = self.values
        return h

    def to_csr(self) -> sps.csr_matrix:
        n = self.dimension
        idx = np.arange(n)
        coo = sps.coo_matrix(
            (np.concatenate([self.diagonal, self.values, self.values]),
             (np.concatenate([idx, self.rows, self.cols]),
              np.concatenate([idx, self.cols, self.rows]))),
            shape=(n, n))
        return coo.tocsr()

    def one_norm(self) -> float:
        """Max absolute row sum; an upper bound on the spectral norm."""
        n = self.dimension
        sums = np.abs(self.diagonal).copy()
        np.add.at(sums, self.rows, np.abs(self.values))
        np.add.at(sums, self.cols, np.abs(self.values))
        return float(sums.max()) if n else 0.0


def assemble_hamiltonian(basis: FockBasis) -> SparseHamiltonian:
    """Build H in the given basis as a symmetric sparse matrix.

    Diagonal: U when the particle shares its site with a fermion, plus the
    fermionic bias eps * sum_occupied (j/L).  Off-diagonals: -J per fermion
    nearest-neighbour hop and -J' per particle hop, both on the open chain.
    """
    p = basis.params
    L, M = p.L, basis.n_masks
    dim = basis.dimension

    mask_bias = {m: _bias_sum(m, L) for m in basis.masks}

    diagonal = np.empty(dim)
    rows: list[int] = []
    cols: list[int] = []
    values: list[float] = []

    for k, (site, mask) in enumerate(basis.states):
        diagonal[k] = p.U * (mask >> (site - 1) & 1) + p.eps * mask_bias[mask]

        # fermion hops stay inside one particle-site block
        if p.J != 0.0:
            for i in range(1, L):
                pair = mask >> (i - 1) & 0b11
                if pair == 0b01 or pair == 0b10:
                    flipped = mask ^ (0b11 << (i - 1))
                    if flipped > mask:
                        k2 = k + basis.mask_rank[flipped] - basis.mask_rank[mask]
                        sign = fermion_hop_sign(mask, i, i + 1)
                        rows.append(k)
                        cols.append(k2)
                        values.append(-p.J * sign)

        # particle hop to site+1 lands exactly one block later
        if site < L and p.Jp != 0.0:
            rows.append(k)
            cols.append(k + M)
            values.append(-p.Jp)

    return SparseHamiltonian(
        dimension=dim,
        diagonal=diagonal,
        rows=np.asarray(rows, dtype=np.int64),
        cols=np.asarray(cols, dtype=np.int64),
        values=np.asarray(values, dtype=float),
    )


def apply_hamiltonian(basis: FockBasis, state: ManyBodyState) -> ManyBodyState:
    """Matrix-free H|v>, walking the basis with bit operations.

    Kept independent of :func:`assemble_hamiltonian` so the two routes can
    cross-check each other.
    """
    if (state.basis.params.L, state.basis.params.N) != (basis.params.L, basis.params.N):
        raise ValueError(
            f"state lives on {state.basis!r}, not on {basis!r}")
    p = basis.params
    L, M = p.L, basis.n_masks
    v = state.amplitudes
    out = np.zeros_like(v)

    for k, (site, mask) in enumerate(basis.states):
        amp = v[k]
        if amp == 0.0:
            continue
        out[k] += (p.U * (mask >> (site - 1) & 1) + p.eps * _bias_sum(mask, L)) * amp
        for i in range(1, L):
            pair = mask >> (i - 1) & 0b11
            if pair == 0b01 or pair == 0b10:
                flipped = mask ^ (0b11 << (i - 1))
                k2 = (site - 1) * M + basis.mask_rank[flipped]
                out[k2] += -p.J * fermion_hop_sign(mask, i, i + 1) * amp
        if p.Jp != 0.0:
            if site > 1:
                out[k - M] += -p.Jp * amp
            if site < L:
                out[k + M] += -p.Jp * amp

    return ManyBodyState(basis, out)


def reflect_mask(mask: int, L: int) -> int:
    """Mirror the occupation pattern, site i -> L+1-i."""
    out = 0
    for i in range(1, L + 1):
        if mask >> (i - 1) & 1:
            out |= 1 << (L - i)
    return out


def reflection_permutation(basis: FockBasis) -> np.ndarray:
    """Index permutation implementing the site reflection on both factors.

    Conjugating H by this permutation leaves it invariant entrywise when
    eps = 0 (every hop maps onto a hop of equal amplitude).
    """
    L = basis.params.L
    perm = np.empty(basis.dimension, dtype=np.int64)
    for k, (site, mask) in enumerate(basis.states):
        perm[k] = basis.index(L + 1 - site, reflect_mask(mask, L))
    return perm


def reflect_state(state: ManyBodyState) -> ManyBodyState:
    perm = reflection_permutation(state.basis)
    out = np.empty_like(state.amplitudes)
    out[perm] = state.amplitudes
    return ManyBodyState(state.basis, out)
