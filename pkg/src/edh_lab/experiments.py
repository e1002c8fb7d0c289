"""Campaign drivers tying the solver to files on disk.

A "job" is one parameter point: assemble, diagonalize (or reuse a
checkpoint), profile every eigenstate, flag outliers, and optionally write
the spectrum and correlation tables.  A "sweep" maps a job over a parameter
grid and fits the size dependence of the maximal and average coherence
lengths.  All tabular output is CSV with repr-formatted floats so files are
bit-identical across runs; manifests carry parameter echoes and checksums
but deliberately no timestamps.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
from scipy import stats

from .fock import FockBasis, ModelParams, assemble_hamiltonian, enumerate_basis
from .reduced import (
    CoherenceRecord,
    _profile_arrays,
    write_correlations_csv,
    write_spectrum_csv,
)
from .spectral import EigenDecomposition, full_diagonalize, load_checkpoint, save_checkpoint

DEFAULT_KAPPA = 3.0


@dataclass(frozen=True)
class OutlierPolicy:
    """Flag states with length above kappa times the spectrum average.

    The global maximum (including ties) is always flagged regardless of
    kappa, so every profile names at least one outlier.
    """

    kappa: float = DEFAULT_KAPPA

    def __post_init__(self):
        if math.isnan(self.kappa) or self.kappa <= 0:
            raise ValueError(f"kappa={self.kappa!r} must be positive")


def flag_outliers(records: list[CoherenceRecord],
                  policy: OutlierPolicy | None = None) -> list[CoherenceRecord]:
    """Annotated copy of the records; the inputs are left untouched."""
    if not records:
        raise ValueError("cannot flag outliers in an empty profile")
    policy = policy or OutlierPolicy()
    lengths = np.array([r.length for r in records])
    mean = lengths.mean()
    threshold = policy.kappa * mean if math.isfinite(policy.kappa) else math.inf
    flags = lengths > threshold
    flags |= lengths == lengths.max()
    return [CoherenceRecord(index=r.index, energy=r.energy, length=r.length,
                            outlier=bool(f)) for r, f in zip(records, flags)]


@dataclass
class MarkedStates:
    """Indices singled out for correlation tables.

    ``mid_peak`` is the largest-length state whose energy falls in the middle
    third of the spectral range; None when that window is empty.
    """

    ground: int
    peak: int
    mid_peak: int | None


@dataclass
class SpectrumJob:
    params: ModelParams
    records: list[CoherenceRecord]
    l_max: float
    l_av: float
    marked: MarkedStates
    correlations: list[tuple[int, np.ndarray]]
    checkpoint_used: bool = False
    written: list[Path] = field(default_factory=list)


def default_tag(params: ModelParams) -> str:
    return (f"L{params.L}_N{params.N}_J{params.J:g}_Jp{params.Jp:g}"
            f"_U{params.U:g}_eps{params.eps:g}")


def _mark_states(energies: np.ndarray, lengths: np.ndarray) -> MarkedStates:
    peak = int(np.argmax(lengths))
    lo, hi = float(energies[0]), float(energies[-1])
    third = (hi - lo) / 3.0
    window = (energies >= lo + third) & (energies <= hi - third)
    mid_peak = None
    if window.any():
        inside = np.flatnonzero(window)
        mid_peak = int(inside[np.argmax(lengths[inside])])
    return MarkedStates(ground=0, peak=peak, mid_peak=mid_peak)


def _obtain_decomposition(params: ModelParams, basis: FockBasis,
                          checkpoint: str | Path | None) -> tuple[EigenDecomposition, bool]:
    if checkpoint is not None and Path(checkpoint).exists():
        decomp, stored = load_checkpoint(checkpoint)
        if stored != params:
            raise ValueError(f"checkpoint {checkpoint} holds {stored}, wanted {params}")
        return decomp, True
    decomp = full_diagonalize(assemble_hamiltonian(basis))
    if checkpoint is not None:
        save_checkpoint(checkpoint, decomp, params)
    return decomp, False


def run_spectrum_job(params: ModelParams, *, policy: OutlierPolicy | None = None,
                     checkpoint: str | Path | None = None,
                     out_dir: str | Path | None = None, tag: str | None = None,
                     ref_site: int = 1) -> SpectrumJob:
    """Profile one parameter point end to end.

    Correlation rows are produced for the ground state, the global peak, the
    mid-spectrum peak, and (under index -1) the average over the whole
    spectrum, each as |rho[ref_site, j]| against j.
    """
    basis = enumerate_basis(params)
    decomp, reused = _obtain_decomposition(params, basis, checkpoint)
    lengths, rows = _profile_arrays(decomp.vectors, basis, ref_site=ref_site)
    records = flag_outliers(
        [CoherenceRecord(index=k, energy=float(decomp.energies[k]), length=float(lengths[k]))
         for k in range(decomp.dim)], policy)
    marked = _mark_states(decomp.energies, lengths)

    picked: list[int] = []
    for idx in (marked.ground, marked.peak, marked.mid_peak):
        if idx is not None and idx not in picked:
            picked.append(idx)
    correlations = [(idx, rows[idx]) for idx in picked]
    correlations.append((-1, rows.mean(axis=0)))

    job = SpectrumJob(params=params, records=records,
                      l_max=float(lengths.max()), l_av=float(lengths.mean()),
                      marked=marked, correlations=correlations,
                      checkpoint_used=reused)
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        tag = tag or default_tag(params)
        spectrum_path = out / f"spectrum_{tag}.csv"
        corr_path = out / f"correlations_{tag}.csv"
        write_spectrum_csv(spectrum_path, records)
        write_correlations_csv(corr_path, correlations)
        job.written = [spectrum_path, corr_path]
    return job


@dataclass
class SweepSpec:
    """A grid of parameter points plus output and policy knobs.

    ``seed`` feeds any randomized self-checks; the physics itself is
    deterministic and the outputs do not depend on it.
    """

    points: tuple[ModelParams, ...]
    out_dir: Path | None = None
    tag: str = "sweep"
    seed: int = 0
    policy: OutlierPolicy = field(default_factory=OutlierPolicy)
    write_spectra: bool = False
    checkpoint_dir: Path | None = None

    def __post_init__(self):
        if not self.points:
            raise ValueError("sweep needs at least one parameter point")


def half_filled_grid(l_min: int, l_max: int, *, J: float = 1.0, Jp: float = 0.2,
                     U: float = 1.0, eps_values: tuple[float, ...] = (0.0,),
                     ) -> tuple[ModelParams, ...]:
    """The standard sweep grid: every L in the range at half filling."""
    return tuple(ModelParams.half_filled(L, J=J, Jp=Jp, U=U, eps=eps)
                 for L in range(l_min, l_max + 1) for eps in eps_values)


@dataclass
class LinearFit:
    slope: float
    intercept: float
    stderr: float
    r_value: float
    points: int


@dataclass
class ScalingRow:
    L: int
    N: int
    eps: float
    l_max: float
    l_av: float


@dataclass
class BranchSummary:
    """Fit and trend diagnostics for one eps branch of a sweep.

    l_av_nonincreasing compares the endpoints: the average at the largest
    size must not exceed the average at the smallest.  Interior sizes are
    allowed to wiggle because the half-filling rule alternates the density
    with the parity of L; the full value sequence is kept alongside so the
    wiggles stay visible.
    """

    eps: float
    l_max_fit: LinearFit
    l_av_values: list[float]
    l_av_nonincreasing: bool


@dataclass
class ScalingResult:
    rows: list[ScalingRow]
    branches: list[BranchSummary]
    written: list[Path] = field(default_factory=list)


def run_scaling_sweep(spec: SweepSpec) -> ScalingResult:
    """Map a spectrum job over the grid and fit l_max, l_av against L.

    Points are processed in sorted (L, N, eps) order so identical specs give
    identical files; each eps branch gets its own least-squares line for
    l_max and an endpoint trend diagnostic for l_av.
    """
    ordered = sorted(spec.points, key=lambda p: (p.L, p.N, p.eps))
    if len({p.L for p in ordered}) < 3:
        raise ValueError("scaling sweep needs at least 3 distinct sizes")

    rows = []
    for params in ordered:
        checkpoint = None
        if spec.checkpoint_dir is not None:
            spec.checkpoint_dir.mkdir(parents=True, exist_ok=True)
            checkpoint = spec.checkpoint_dir / f"eig_{default_tag(params)}.npz"
        job = run_spectrum_job(
            params, policy=spec.policy, checkpoint=checkpoint,
            out_dir=spec.out_dir if spec.write_spectra else None)
        rows.append(ScalingRow(L=params.L, N=params.N, eps=params.eps,
                               l_max=job.l_max, l_av=job.l_av))

    branches = []
    for eps in sorted({r.eps for r in rows}):
        branch = [r for r in rows if r.eps == eps]
        fit = stats.linregress([r.L for r in branch], [r.l_max for r in branch])
        l_av = [r.l_av for r in branch]
        branches.append(BranchSummary(
            eps=eps,
            l_max_fit=LinearFit(slope=float(fit.slope), intercept=float(fit.intercept),
                                stderr=float(fit.stderr), r_value=float(fit.rvalue),
                                points=len(branch)),
            l_av_values=l_av,
            l_av_nonincreasing=l_av[-1] <= l_av[0]))

    result = ScalingResult(rows=rows, branches=branches)
    if spec.out_dir is not None:
        spec.out_dir.mkdir(parents=True, exist_ok=True)
        csv_path = spec.out_dir / f"scaling_{spec.tag}.csv"
        json_path = spec.out_dir / f"fits_{spec.tag}.json"
        write_scaling_csv(csv_path, result)
        write_fits_json(json_path, result)
        result.written = [csv_path, json_path]
    return result


def write_scaling_csv(path: str | Path, result: ScalingResult) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["L", "N", "eps", "l_max", "l_av"])
        for r in result.rows:
            writer.writerow([r.L, r.N, repr(r.eps), repr(r.l_max), repr(r.l_av)])


def write_fits_json(path: str | Path, result: ScalingResult) -> None:
    payload = {"branches": [
        {"eps": b.eps,
         "l_max_fit": asdict(b.l_max_fit),
         "l_av_values": b.l_av_values,
         "l_av_nonincreasing": b.l_av_nonincreasing}
        for b in result.branches]}
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            digest.update(block)
    return digest.hexdigest()


def write_manifest(out_dir: str | Path, config: dict, files: list[Path]) -> Path:
    """Write manifest.json with the effective config and output checksums.

    Contains no timestamps or host details: reruns of the same configuration
    must produce byte-identical manifests.
    """
    from . import __version__

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    manifest = {
        "tool": "edh-lab",
        "version": __version__,
        "config": config,
        "checksums": {p.name: _sha256(p) for p in sorted(files)},
    }
    path = out / "manifest.json"
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def params_config(params: ModelParams) -> dict:
    return asdict(params)
