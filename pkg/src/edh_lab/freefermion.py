"""Single-particle chains, Slater determinants, and analytic eigenstates.

When the heavy particle cannot hop (J' = 0) it sits frozen at some site j and
the fermions see a one-body problem: an open chain with hopping -J, a
potential U on the frozen site, and an optional linear bias eps * i / L.
Every many-body eigenstate of that sector factorizes as |j> tensor |F> with
|F> a Slater determinant filling N orbitals of the chain seen from j.  This
module builds those objects and what follows from them:

* tridiagonal diagonalization of the one-body chain,
* determinant overlaps <F|F'> = det(A^T B) between filled-orbital sets,
* embedding of a determinant into the composite-basis amplitude layout
  (one minor determinant per occupation bitmask),
* the end-to-end degenerate superposition at eps = 0 and the two closed-form
  coherence lengths written in terms of the squared overlap,
* the finite-size overlap sweep g(L) with its power-law fit,
* node states: exact eigenstates at J' = 0 whose orbitals all vanish on two
  chosen sites, available whenever L permits.

Orbital sign convention matches the dense solver: the largest-magnitude
component of each orbital is made positive, so repeated runs and the two
diagonalization routes produce comparable vectors.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.linalg as sla
from scipy import stats

from .fock import (
    FockBasis,
    ManyBodyState,
    ModelParams,
    ParameterError,
    apply_hamiltonian,
    enumerate_basis,
    half_filling,
    product_state,
    two_site_superposition,
)
from .reduced import coherence_length, reduced_density_matrix
from .spectral import _fix_signs

_ORBITAL_ORTHO_TOL = 1e-12
_EMBED_NORM_TOL = 1e-10
_DEGENERACY_TOL = 1e-10
_NODE_RESIDUAL_TOL = 1e-9
_FULL_GRAM_LIMIT = 1500
_MIN_SWEEP_POINTS = 4

DEFAULT_GROWTH_SIZES = (4, 6, 8, 10, 12)


@dataclass(frozen=True)
class SingleParticleHamiltonian:
    """Open chain -J hopping, potential U at one site, linear bias eps*i/L."""

    L: int
    impurity_site: int
    J: float = 1.0
    U: float = 0.0
    eps: float = 0.0

    def __post_init__(self):
        if not isinstance(self.L, int) or self.L < 1:
            raise ParameterError(f"chain length L={self.L!r}, expected a positive integer")
        if not isinstance(self.impurity_site, int) or not 1 <= self.impurity_site <= self.L:
            raise ParameterError(
                f"impurity site {self.impurity_site!r} outside 1..{self.L}")
        for name in ("J", "U", "eps"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ParameterError(f"coupling {name}={value!r} is not finite")
        if self.J < 0:
            raise ParameterError(f"hopping J={self.J} must be non-negative")

    def diagonal(self) -> np.ndarray:
        d = self.eps * np.arange(1, self.L + 1) / self.L
        d[self.impurity_site - 1] += self.U
        return d

    def offdiagonal(self) -> np.ndarray:
        return np.full(self.L - 1, -self.J)

    def to_dense(self) -> np.ndarray:
        h = np.diag(self.diagonal())
        off = self.offdiagonal()
        h += np.diag(off, 1) + np.diag(off, -1)
        return h


@dataclass
class OrbitalSet:
    """Eigenbasis of a single-particle chain; column k is the k-th orbital."""

    source: SingleParticleHamiltonian
    energies: np.ndarray
    orbitals: np.ndarray

    def __post_init__(self):
        L = self.source.L
        if self.energies.shape != (L,) or self.orbitals.shape != (L, L):
            raise ValueError(
                f"orbital set shapes {self.energies.shape}/{self.orbitals.shape} "
                f"do not match L={L}")


def _orthonormality_defect(q: np.ndarray) -> float:
    n = q.shape[1]
    if n <= _FULL_GRAM_LIMIT:
        gram = q.T @ q
    else:
        rng = np.random.default_rng(0)
        cols = rng.choice(n, size=64, replace=False)
        gram = q[:, cols].T @ q
        return float(np.abs(gram - np.eye(n)[cols]).max())
    return float(np.abs(gram - np.eye(n)).max())


def single_particle_diagonalize(h: SingleParticleHamiltonian) -> OrbitalSet:
    """All eigenpairs of the chain, energies ascending, gauge-fixed signs."""
    if h.L == 1:
        energies = h.diagonal()
        orbitals = np.ones((1, 1))
    else:
        energies, orbitals = sla.eigh_tridiagonal(h.diagonal(), h.offdiagonal())
        orbitals = _fix_signs(orbitals)
    defect = _orthonormality_defect(orbitals)
    if defect > _ORBITAL_ORTHO_TOL:
        raise ValueError(f"orbital set orthonormality defect {defect:.3e} "
                         f"exceeds {_ORBITAL_ORTHO_TOL}")
    return OrbitalSet(h, energies, orbitals)


@dataclass
class SlaterState:
    """N filled orbitals out of an OrbitalSet, indices ascending and 0-based."""

    orbitals: OrbitalSet
    occupied: tuple[int, ...]
    degenerate_cut: bool = False

    def __post_init__(self):
        L = self.orbitals.source.L
        if any(not 0 <= k < L for k in self.occupied):
            raise ValueError(f"occupied orbital indices {self.occupied} outside 0..{L - 1}")
        if list(self.occupied) != sorted(set(self.occupied)):
            raise ValueError(f"occupied orbital indices {self.occupied} must be "
                             "strictly increasing")

    @property
    def L(self) -> int:
        return self.orbitals.source.L

    @property
    def n(self) -> int:
        return len(self.occupied)

    def energy(self) -> float:
        return float(self.orbitals.energies[list(self.occupied)].sum())

    def matrix(self) -> np.ndarray:
        """L x N matrix whose columns are the filled orbitals."""
        return self.orbitals.orbitals[:, list(self.occupied)]


def ground_slater(orbitals: OrbitalSet, n: int) -> SlaterState:
    """Fill the n lowest orbitals.

    When the cut falls inside a degenerate level the lowest-index selection is
    still returned, deterministically, with ``degenerate_cut`` set so callers
    know the choice was a gauge.
    """
    L = orbitals.source.L
    if not 0 <= n <= L:
        raise ValueError(f"cannot fill {n} of {L} orbitals")
    degenerate = False
    if 0 < n < L:
        scale = max(1.0, float(orbitals.energies[-1] - orbitals.energies[0]))
        degenerate = bool(orbitals.energies[n] - orbitals.energies[n - 1]
                          <= _DEGENERACY_TOL * scale)
    return SlaterState(orbitals, tuple(range(n)), degenerate_cut=degenerate)


def slater_overlap(a: SlaterState, b: SlaterState) -> float:
    """<F_a|F_b> = det(A^T B) for the two L x N orbital matrices."""
    if a.L != b.L or a.n != b.n:
        raise ValueError(f"overlap needs matching shapes, got L={a.L},{b.L} "
                         f"N={a.n},{b.n}")
    if a.n == 0:
        return 1.0
    return float(np.linalg.det(a.matrix().T @ b.matrix()))


def _mask_rows(basis: FockBasis) -> np.ndarray:
    """(n_masks, N) array of 0-based site rows per occupation bitmask."""
    L, N = basis.params.L, basis.params.N
    rows = np.empty((basis.n_masks, N), dtype=np.intp)
    for r, mask in enumerate(basis.masks):
        rows[r] = [j for j in range(L) if mask >> j & 1]
    return rows


def _embed_matrix(a: np.ndarray, basis: FockBasis) -> np.ndarray:
    """Minor determinants det(A[rows(mask), :]) over the mask ordering."""
    if basis.params.N == 0:
        return np.ones(1)
    minors = a[_mask_rows(basis)]
    return np.linalg.det(minors)


def embed_slater(state: SlaterState, basis: FockBasis) -> np.ndarray:
    """Amplitudes of a Slater determinant in the occupation-mask ordering.

    The amplitude on a mask is the determinant of the orbital matrix
    restricted to the occupied rows; the Cauchy-Binet identity then makes the
    result unit-norm, which is enforced here as a cross-check on both the
    mask ordering and the orbital set.
    """
    if state.L != basis.params.L or state.n != basis.params.N:
        raise ValueError(f"determinant with L={state.L}, N={state.n} does not fit "
                         f"a basis with L={basis.params.L}, N={basis.params.N}")
    amps = _embed_matrix(state.matrix(), basis)
    defect = abs(float(amps @ amps) - 1.0)
    if defect > _EMBED_NORM_TOL:
        raise ValueError(f"embedded determinant norm off by {defect:.3e}")
    return amps


def integrable_eigenstate(site: int, state: SlaterState, basis: FockBasis) -> ManyBodyState:
    """|site> tensor |F| as a composite-basis vector.

    The determinant must come from the chain seen from that very site and the
    couplings must agree with the target basis, otherwise the product is not
    the eigenstate it claims to be.
    """
    src = state.orbitals.source
    if src.impurity_site != site:
        raise ValueError(f"determinant was built for impurity site "
                         f"{src.impurity_site}, not {site}")
    p = basis.params
    if (src.L, src.J, src.U, src.eps) != (p.L, p.J, p.U, p.eps):
        raise ValueError("single-particle couplings do not match the target basis")
    return product_state(basis, site, embed_slater(state, basis))


def degenerate_superposition(state_a: SlaterState, state_b: SlaterState,
                             basis: FockBasis) -> ManyBodyState:
    """(|1> tensor |F_1> + |L> tensor |F_L>) / sqrt(2) for a degenerate pair.

    Requires the two determinant energies to agree within 1e-10; a linear
    bias lifts the end-to-end degeneracy and is rejected through that check.
    """
    L = basis.params.L
    sites = (state_a.orbitals.source.impurity_site, state_b.orbitals.source.impurity_site)
    if sites != (1, L):
        raise ValueError(f"expected impurities at sites (1, {L}), got {sites}")
    for st in (state_a, state_b):
        src = st.orbitals.source
        p = basis.params
        if (src.L, src.J, src.U, src.eps) != (p.L, p.J, p.U, p.eps):
            raise ValueError("single-particle couplings do not match the target basis")
    gap = abs(state_a.energy() - state_b.energy())
    if gap > _DEGENERACY_TOL * max(1.0, abs(state_a.energy())):
        raise ValueError(f"determinant energies differ by {gap:.3e}; "
                         "superposing non-degenerate eigenstates is not allowed")
    return two_site_superposition(basis, 1, L,
                                  embed_slater(state_a, basis),
                                  embed_slater(state_b, basis))


def _check_overlap_sq(overlap_sq: float) -> float:
    if not 0.0 <= overlap_sq <= 1.0 + 1e-12:
        raise ValueError(f"squared overlap {overlap_sq!r} outside [0, 1]")
    return min(overlap_sq, 1.0)


def overlap_form_length(overlap_sq: float, L: int) -> float:
    """Closed form (L-1) * g / sqrt(1+g) in the squared overlap g.

    One of two closed forms in circulation for the coherence length of the
    end-to-end superposition.  It does NOT reproduce evaluating the length
    definition on the constructed state: at g = 1 it gives (L-1)/sqrt(2)
    where the direct evaluation gives L-1.  Reported alongside
    :func:`direct_form_length` wherever overlaps are tabulated, never
    silently preferred.
    """
    g = _check_overlap_sq(overlap_sq)
    return (L - 1) * g / math.sqrt(1.0 + g)


def direct_form_length(overlap_sq: float, L: int) -> float:
    """Closed form (L-1) * sqrt(2g / (1+g)) in the squared overlap g.

    Matches evaluating the coherence-length definition on the constructed
    end-to-end superposition exactly (g = 1 gives L-1, g = 0 gives 0).
    """
    g = _check_overlap_sq(overlap_sq)
    return (L - 1) * math.sqrt(2.0 * g / (1.0 + g))


@dataclass
class OverlapPoint:
    L: int
    N: int
    overlap: float
    overlap_sq: float
    overlap_form: float
    direct_form: float


@dataclass
class PowerLawFit:
    """Least-squares slope of log(y) against log(L)."""

    exponent: float
    stderr: float
    intercept: float
    r_value: float
    points: int


def _power_law_fit(sizes: list[int], values: list[float], sign: float) -> PowerLawFit:
    fit = stats.linregress(np.log(sizes), np.log(values))
    return PowerLawFit(exponent=float(sign * fit.slope), stderr=float(fit.stderr),
                       intercept=float(fit.intercept), r_value=float(fit.rvalue),
                       points=len(sizes))


@dataclass
class OverlapScaling:
    points: list[OverlapPoint]
    decay: PowerLawFit
    growth: PowerLawFit | None


def end_to_end_overlap(L: int, *, J: float = 1.0, U: float = 1.0,
                       density: float = 0.5,
                       occupied: tuple[int, ...] | None = None) -> OverlapPoint:
    """Determinant overlap between the impurity at site 1 and at site L.

    Fills the lowest orbitals at the requested density by default; pass
    ``occupied`` (0-based orbital indices, applied to both chains) to probe
    excited determinants instead.
    """
    orbitals_a = single_particle_diagonalize(SingleParticleHamiltonian(L, 1, J=J, U=U))
    orbitals_b = single_particle_diagonalize(SingleParticleHamiltonian(L, L, J=J, U=U))
    if occupied is None:
        n = int(round(density * L))
        fill_a = ground_slater(orbitals_a, n)
        fill_b = ground_slater(orbitals_b, n)
    else:
        n = len(occupied)
        fill_a = SlaterState(orbitals_a, tuple(occupied))
        fill_b = SlaterState(orbitals_b, tuple(occupied))
    overlap = slater_overlap(fill_a, fill_b)
    g = overlap * overlap
    return OverlapPoint(L=L, N=n, overlap=overlap, overlap_sq=g,
                        overlap_form=overlap_form_length(g, L),
                        direct_form=direct_form_length(g, L))


def superposition_growth(sizes: tuple[int, ...] = DEFAULT_GROWTH_SIZES, *,
                         J: float = 1.0, U: float = 1.0) -> PowerLawFit:
    """Growth exponent of the directly evaluated superposition length.

    Builds the degenerate end-to-end superposition in the composite basis at
    each (small) L, evaluates the coherence length on its reduced density
    matrix, and fits log(length) against log(L).
    """
    lengths = []
    for L in sizes:
        params = ModelParams(L=L, N=half_filling(L), J=J, Jp=0.0, U=U, eps=0.0)
        basis = enumerate_basis(params)
        fills = [ground_slater(single_particle_diagonalize(
            SingleParticleHamiltonian(L, site, J=J, U=U)), params.N)
            for site in (1, L)]
        psi = degenerate_superposition(fills[0], fills[1], basis)
        lengths.append(coherence_length(reduced_density_matrix(psi)))
    return _power_law_fit(list(sizes), lengths, sign=+1.0)


def orthogonality_scaling(sizes: list[int], *, J: float = 1.0, U: float = 1.0,
                          density: float = 0.5,
                          growth_sizes: tuple[int, ...] | None = DEFAULT_GROWTH_SIZES,
                          ) -> OverlapScaling:
    """Sweep g(L) over chain lengths and fit the orthogonality decay exponent.

    The squared overlap of the two end-of-chain ground determinants shrinks
    with L as a power law g ~ L**(-alpha); the fit reports alpha with its
    standard error.  ``growth_sizes`` adds the complementary small-L fit of
    the directly constructed superposition length (None skips it).
    """
    ordered = sorted(set(sizes))
    if len(ordered) < _MIN_SWEEP_POINTS:
        raise ValueError(f"overlap sweep needs at least {_MIN_SWEEP_POINTS} "
                         f"distinct sizes, got {len(ordered)}")
    points = [end_to_end_overlap(L, J=J, U=U, density=density) for L in ordered]
    decay = _power_law_fit([p.L for p in points], [p.overlap_sq for p in points],
                           sign=-1.0)
    growth = None
    if growth_sizes is not None:
        growth = superposition_growth(growth_sizes, J=J, U=U)
    return OverlapScaling(points=points, decay=decay, growth=growth)


def write_overlap_csv(path: str | Path, scaling: OverlapScaling) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["L", "overlap_squared", "overlap_form_length",
                         "direct_form_length"])
        for p in scaling.points:
            writer.writerow([p.L, repr(p.overlap_sq), repr(p.overlap_form),
                             repr(p.direct_form)])


def write_overlap_fit_json(path: str | Path, scaling: OverlapScaling) -> None:
    def as_dict(fit: PowerLawFit | None):
        if fit is None:
            return None
        return {"exponent": fit.exponent, "stderr": fit.stderr,
                "intercept": fit.intercept, "r_value": fit.r_value,
                "points": fit.points}

    payload = {"overlap_decay": as_dict(scaling.decay),
               "direct_growth": as_dict(scaling.growth)}
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


@dataclass
class NodeState:
    """Exact two-site eigenstate whose orbitals vanish on both sites."""

    state: ManyBodyState
    sites: tuple[int, int]
    orbital_indices: tuple[int, ...]
    energy: float
    length: float


def admissible_node_orbitals(L: int, site_a: int, site_b: int) -> list[int]:
    """Open-chain orbitals m (1-based) with nodes at both sites.

    The orbital sin(m*pi*j/(L+1)) vanishes at site j exactly when m*j is a
    multiple of L+1, so the test is pure integer arithmetic.
    """
    period = L + 1
    return [m for m in range(1, L + 1)
            if m * site_a % period == 0 and m * site_b % period == 0]


def node_state_construction(basis: FockBasis, site_a: int,
                            site_b: int) -> NodeState | None:
    """Exact eigenstate (|a> + |b>)/sqrt(2) tensor one shared determinant.

    Fills the N lowest free-chain orbitals that vanish at both sites; since
    no fermion weight ever touches the particle, the state is an eigenstate
    for every interaction strength U.  Returns None when fewer than N such
    orbitals exist; demands a pinned particle (J' = 0) and no bias.  The
    result is verified in place: the matrix-free Hamiltonian application
    must leave a residual below 1e-9 or the construction raises.
    """
    p = basis.params
    if p.Jp != 0.0 or p.eps != 0.0:
        raise ValueError("node construction requires J' = 0 and eps = 0")
    if site_a == site_b or not (1 <= site_a <= p.L and 1 <= site_b <= p.L):
        raise ValueError(f"need two distinct sites in 1..{p.L}, got "
                         f"({site_a}, {site_b})")
    admissible = admissible_node_orbitals(p.L, site_a, site_b)
    if len(admissible) < p.N:
        return None
    chosen = tuple(admissible[:p.N])

    period = p.L + 1
    j = np.arange(1, p.L + 1)
    a = np.zeros((p.L, p.N))
    for k, m in enumerate(chosen):
        col = math.sqrt(2.0 / period) * np.sin(m * np.pi * j / period)
        col[(m * j) % period == 0] = 0.0
        a[:, k] = col

    amps = _embed_matrix(a, basis)
    defect = abs(float(amps @ amps) - 1.0)
    if defect > _EMBED_NORM_TOL:
        raise ValueError(f"node determinant norm off by {defect:.3e}")
    psi = two_site_superposition(basis, site_a, site_b, amps)
    energy = float(sum(-2.0 * p.J * math.cos(m * math.pi / period) for m in chosen))

    residual = apply_hamiltonian(basis, psi).amplitudes - energy * psi.amplitudes
    residual_norm = float(np.linalg.norm(residual))
    if residual_norm > _NODE_RESIDUAL_TOL:
        raise ValueError(f"node state residual {residual_norm:.3e} exceeds "
                         f"{_NODE_RESIDUAL_TOL}")
    length = coherence_length(reduced_density_matrix(psi))
    return NodeState(state=psi, sites=(site_a, site_b), orbital_indices=chosen,
                     energy=energy, length=length)
