"""Command-line front end: one subcommand per campaign.

Subcommands
-----------
spectrum         profile every eigenstate at one parameter point
scaling          sweep system sizes and fit l_max, l_av against L
integrable       pinned-particle sector report, optional degenerate pair
overlap-scaling  end-to-end determinant overlaps up to thousands of sites
correlations     regenerate correlation tables from a saved checkpoint

Configuration may come from a JSON file (``--config``); explicit flags beat
file values, and the effective configuration is echoed into the run's
``manifest.json``.  The file holds a single object whose keys are the long
flag names of the chosen subcommand with underscores for dashes, e.g.::

    {"L": 12, "N": 6, "Jp": 0.2, "U": 1.0, "eps": 0.0}

Exit codes: 0 on success, 1 on runtime failure (solver, I/O), 2 on invalid
parameters, flags, or config.  This module imports only the standard
library at load time; numpy and scipy come in after ``--threads`` has been
applied to the BLAS environment.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_USAGE = 2

_THREAD_VARS = ("OPENBLAS_NUM_THREADS", "OMP_NUM_THREADS", "MKL_NUM_THREADS",
                "VECLIB_MAXIMUM_THREADS", "NUMEXPR_NUM_THREADS")

OVERLAP_GRID_START = 64
OVERLAP_GRID_END = 4096


class ConfigError(ValueError):
    """Bad config file or flag combination."""


def _apply_threads(threads: int | None) -> None:
    if threads is None:
        return
    if threads < 1:
        raise ConfigError(f"--threads must be positive, got {threads}")
    for var in _THREAD_VARS:
        os.environ[var] = str(threads)


_COMMON_SCHEMA = {
    "out": str,
    "checkpoint": str,
    "threads": int,
    "seed": int,
    "tag": str,
}

_SCHEMAS: dict[str, dict[str, object]] = {
    "spectrum": {"L": int, "N": int, "J": float, "Jp": float, "U": float,
                 "eps": float, "kappa": float, "ref_site": int},
    "scaling": {"Lmin": int, "Lmax": int, "J": float, "Jp": float, "U": float,
                "eps": "float_list", "kappa": float, "half_fill": bool,
                "write_spectra": bool},
    "integrable": {"L": int, "N": int, "J": float, "U": float, "eps": float,
                   "build_superposition": bool},
    "overlap-scaling": {"Lmin": int, "Lmax": int, "J": float, "U": float,
                        "density": float},
    "correlations": {"ref_site": int},
}

_DEFAULTS: dict[str, dict[str, object]] = {
    "spectrum": {"J": 1.0, "Jp": 0.0, "U": 0.0, "eps": 0.0, "kappa": 3.0,
                 "ref_site": 1},
    "scaling": {"Lmin": 8, "Lmax": 12, "J": 1.0, "Jp": 0.2, "U": 1.0,
                "eps": [0.0], "kappa": 3.0, "half_fill": True,
                "write_spectra": False, "tag": "sweep"},
    "integrable": {"J": 1.0, "U": 1.0, "eps": 0.0, "build_superposition": False},
    "overlap-scaling": {"Lmin": OVERLAP_GRID_START, "Lmax": OVERLAP_GRID_END,
                        "J": 1.0, "U": 1.0, "density": 0.5, "tag": "sweep"},
    "correlations": {"ref_site": 1},
    "_common": {"seed": 0},
}


def _check_type(key: str, value: object, expected) -> object:
    if expected is bool:
        if not isinstance(value, bool):
            raise ConfigError(f"config key {key!r} must be a boolean")
        return value
    if expected is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"config key {key!r} must be an integer")
        return value
    if expected is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"config key {key!r} must be a number")
        return float(value)
    if expected is str:
        if not isinstance(value, str):
            raise ConfigError(f"config key {key!r} must be a string")
        return value
    if expected == "float_list":
        if not isinstance(value, list) or not value:
            raise ConfigError(f"config key {key!r} must be a nonempty list of numbers")
        return [_check_type(key, v, float) for v in value]
    raise AssertionError(f"unhandled schema type for {key}")


def load_config(path: str, command: str) -> dict:
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"config {path} must hold a JSON object")
    schema = {**_SCHEMAS[command], **_COMMON_SCHEMA}
    config = {}
    for key, value in raw.items():
        if key not in schema:
            raise ConfigError(f"config key {key!r} not recognized for '{command}'")
        config[key] = _check_type(key, value, schema[key])
    return config


def effective_config(args: argparse.Namespace, command: str) -> dict:
    """Defaults, overridden by config-file values, overridden by flags."""
    cfg = dict(_DEFAULTS["_common"])
    cfg.update(_DEFAULTS[command])
    if args.config is not None:
        cfg.update(load_config(args.config, command))
    schema = {**_SCHEMAS[command], **_COMMON_SCHEMA}
    for key in schema:
        flag_value = getattr(args, key, None)
        if flag_value is not None:
            cfg[key] = flag_value
    return cfg


def _require(cfg: dict, key: str, command: str):
    if cfg.get(key) is None:
        raise ConfigError(f"'{command}' needs --{key.replace('_', '-')}")
    return cfg[key]


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--out", help="output directory for CSVs and manifest")
    sub.add_argument("--config", help="JSON config file; flags override it")
    sub.add_argument("--checkpoint",
                     help="eigendecomposition checkpoint (.npz) to reuse or create")
    sub.add_argument("--threads", type=int, help="BLAS/OpenMP thread cap")
    sub.add_argument("--seed", type=int, help="seed for randomized self-checks")
    sub.add_argument("--tag", help="basename tag for output files")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="edh-lab",
        description="coherence-length campaigns for a particle in a Fermi gas")
    commands = parser.add_subparsers(dest="command", metavar="COMMAND")

    sp = commands.add_parser("spectrum", help="profile one parameter point")
    sp.add_argument("--L", type=int, help="number of sites")
    sp.add_argument("--N", type=int, help="fermion count (default: half filling)")
    sp.add_argument("--J", type=float, help="fermion hopping")
    sp.add_argument("--Jp", type=float, help="particle hopping")
    sp.add_argument("--U", type=float, help="contact coupling")
    sp.add_argument("--eps", type=float, help="linear bias amplitude")
    sp.add_argument("--kappa", type=float, help="outlier threshold multiplier")
    sp.add_argument("--ref-site", dest="ref_site", type=int,
                    help="reference site for correlation rows")
    _add_common(sp)

    sc = commands.add_parser("scaling", help="finite-size sweep and fits")
    sc.add_argument("--Lmin", type=int)
    sc.add_argument("--Lmax", type=int)
    sc.add_argument("--J", type=float)
    sc.add_argument("--Jp", type=float)
    sc.add_argument("--U", type=float)
    sc.add_argument("--eps", type=float, action="append",
                    help="bias amplitude; repeat for several branches")
    sc.add_argument("--kappa", type=float)
    sc.add_argument("--half-fill", dest="half_fill",
                    action=argparse.BooleanOptionalAction, default=None,
                    help="couple N to L by the half-filling rule (default on)")
    sc.add_argument("--write-spectra", dest="write_spectra",
                    action=argparse.BooleanOptionalAction, default=None,
                    help="also write per-point spectrum CSVs")
    _add_common(sc)

    ig = commands.add_parser("integrable",
                             help="pinned-particle sector: residuals and lengths")
    ig.add_argument("--L", type=int)
    ig.add_argument("--N", type=int)
    ig.add_argument("--J", type=float)
    ig.add_argument("--U", type=float)
    ig.add_argument("--eps", type=float)
    ig.add_argument("--build-superposition", dest="build_superposition",
                    action=argparse.BooleanOptionalAction, default=None,
                    help="also build the end-to-end degenerate pair (eps = 0)")
    _add_common(ig)

    ov = commands.add_parser("overlap-scaling",
                             help="determinant overlap decay over doubling sizes")
    ov.add_argument("--Lmin", type=int)
    ov.add_argument("--Lmax", type=int)
    ov.add_argument("--J", type=float)
    ov.add_argument("--U", type=float)
    ov.add_argument("--density", type=float)
    _add_common(ov)

    co = commands.add_parser("correlations",
                             help="rebuild correlation tables from a checkpoint")
    co.add_argument("--ref-site", dest="ref_site", type=int)
    _add_common(co)
    return parser


def _manifest(cfg: dict, out_dir, files) -> None:
    if out_dir is None:
        return
    from .experiments import write_manifest
    write_manifest(out_dir, config=cfg, files=list(files))


def cmd_spectrum(cfg: dict) -> int:
    from .experiments import OutlierPolicy, default_tag, run_spectrum_job
    from .fock import ModelParams, half_filling

    L = _require(cfg, "L", "spectrum")
    N = cfg.get("N")
    if N is None:
        N = half_filling(L)
        cfg["N"] = N
    params = ModelParams(L=L, N=N, J=cfg["J"], Jp=cfg["Jp"], U=cfg["U"],
                         eps=cfg["eps"])
    job = run_spectrum_job(params, policy=OutlierPolicy(cfg["kappa"]),
                           checkpoint=cfg.get("checkpoint"),
                           out_dir=cfg.get("out"),
                           tag=cfg.get("tag") or default_tag(params),
                           ref_site=cfg["ref_site"])
    outliers = sum(r.outlier for r in job.records)
    print(f"dimension {len(job.records)}")
    print(f"l_av = {job.l_av!r}")
    print(f"l_max = {job.l_max!r}")
    print(f"outliers = {outliers}")
    if job.l_max <= 1e-8:
        print("all coherence lengths vanish within 1e-08")
    if job.checkpoint_used:
        print(f"reused checkpoint {cfg['checkpoint']}")
    for path in job.written:
        print(f"wrote {path}")
    _manifest(cfg, cfg.get("out"), job.written)
    return EXIT_OK


def cmd_scaling(cfg: dict) -> int:
    from .experiments import OutlierPolicy, SweepSpec, half_filled_grid, run_scaling_sweep

    if not cfg["half_fill"]:
        raise ConfigError("only the half-filling rule is wired to the sweep "
                          "command; use the API for custom (L, N) grids")
    points = half_filled_grid(_require(cfg, "Lmin", "scaling"),
                              _require(cfg, "Lmax", "scaling"),
                              J=cfg["J"], Jp=cfg["Jp"], U=cfg["U"],
                              eps_values=tuple(cfg["eps"]))
    spec = SweepSpec(points=points,
                     out_dir=Path(cfg["out"]) if cfg.get("out") else None,
                     tag=cfg["tag"], seed=cfg["seed"],
                     policy=OutlierPolicy(cfg["kappa"]),
                     write_spectra=cfg["write_spectra"],
                     checkpoint_dir=Path(cfg["checkpoint"]) if cfg.get("checkpoint") else None)
    result = run_scaling_sweep(spec)
    for branch in result.branches:
        fit = branch.l_max_fit
        print(f"eps={branch.eps:g}: l_max slope = {fit.slope!r} "
              f"(stderr {fit.stderr!r}), l_av non-increasing: "
              f"{branch.l_av_nonincreasing}")
        print(f"eps={branch.eps:g}: l_av values = "
              f"{[round(v, 6) for v in branch.l_av_values]}")
    for path in result.written:
        print(f"wrote {path}")
    _manifest(cfg, cfg.get("out"), result.written)
    return EXIT_OK


def cmd_integrable(cfg: dict) -> int:
    import numpy as np

    from .fock import ModelParams, apply_hamiltonian, enumerate_basis, half_filling
    from .freefermion import (
        SingleParticleHamiltonian,
        degenerate_superposition,
        direct_form_length,
        ground_slater,
        integrable_eigenstate,
        overlap_form_length,
        single_particle_diagonalize,
        slater_overlap,
    )
    from .reduced import coherence_length, reduced_density_matrix

    L = _require(cfg, "L", "integrable")
    N = cfg.get("N")
    if N is None:
        N = half_filling(L)
        cfg["N"] = N
    params = ModelParams(L=L, N=N, J=cfg["J"], Jp=0.0, U=cfg["U"], eps=cfg["eps"])
    basis = enumerate_basis(params)

    fills = {}
    max_residual = 0.0
    max_length = 0.0
    for site in range(1, L + 1):
        chain = SingleParticleHamiltonian(L, site, J=cfg["J"], U=cfg["U"],
                                          eps=cfg["eps"])
        fills[site] = ground_slater(single_particle_diagonalize(chain), N)
        psi = integrable_eigenstate(site, fills[site], basis)
        energy = fills[site].energy()
        residual = apply_hamiltonian(basis, psi).amplitudes - energy * psi.amplitudes
        max_residual = max(max_residual, float(np.linalg.norm(residual)))
        max_length = max(max_length, coherence_length(reduced_density_matrix(psi)))

    print(f"pinned-particle sector L={L} N={N} U={cfg['U']:g} eps={cfg['eps']:g}")
    print(f"max eigenstate residual = {max_residual!r}")
    print(f"max coherence length = {max_length!r}")
    report = {"params": {"L": L, "N": N, "J": cfg["J"], "U": cfg["U"],
                         "eps": cfg["eps"]},
              "max_residual": max_residual, "max_length": max_length}

    if cfg["build_superposition"]:
        overlap = slater_overlap(fills[1], fills[L])
        g = overlap * overlap
        psi = degenerate_superposition(fills[1], fills[L], basis)
        measured = coherence_length(reduced_density_matrix(psi))
        print(f"degenerate pair squared overlap g = {g!r}")
        print(f"superposition length, overlap form = {overlap_form_length(g, L)!r}")
        print(f"superposition length, direct form  = {direct_form_length(g, L)!r}")
        print(f"superposition length, constructed  = {measured!r}")
        report["superposition"] = {
            "overlap_squared": g,
            "overlap_form_length": overlap_form_length(g, L),
            "direct_form_length": direct_form_length(g, L),
            "constructed_length": measured,
        }

    written = []
    if cfg.get("out"):
        out = Path(cfg["out"])
        out.mkdir(parents=True, exist_ok=True)
        tag = cfg.get("tag") or f"L{L}_N{N}"
        path = out / f"integrable_{tag}.json"
        with open(path, "w") as fh:
            json.dump(report, fh, indent=2, sort_keys=True)
            fh.write("\n")
        written.append(path)
        print(f"wrote {path}")
    _manifest(cfg, cfg.get("out"), written)
    return EXIT_OK


def cmd_overlap_scaling(cfg: dict) -> int:
    from .freefermion import (
        orthogonality_scaling,
        write_overlap_csv,
        write_overlap_fit_json,
    )

    l_min, l_max = cfg["Lmin"], cfg["Lmax"]
    if l_min < 2:
        raise ConfigError(f"--Lmin must be at least 2, got {l_min}")
    sizes = []
    size = l_min
    while size <= l_max:
        sizes.append(size)
        size *= 2
    scaling = orthogonality_scaling(sizes, J=cfg["J"], U=cfg["U"],
                                    density=cfg["density"])
    decay = scaling.decay
    print(f"sizes = {sizes}")
    print(f"alpha = {decay.exponent!r} +/- {decay.stderr!r} "
          f"({decay.points} points)")
    first, last = scaling.points[0], scaling.points[-1]
    print(f"overlap_squared: {first.overlap_sq!r} at L={first.L} -> "
          f"{last.overlap_sq!r} at L={last.L}")
    if scaling.growth is not None:
        print(f"direct growth exponent = {scaling.growth.exponent!r} "
              f"+/- {scaling.growth.stderr!r}")

    written = []
    if cfg.get("out"):
        out = Path(cfg["out"])
        out.mkdir(parents=True, exist_ok=True)
        tag = cfg["tag"]
        csv_path = out / f"overlap_{tag}.csv"
        json_path = out / f"overlap_fit_{tag}.json"
        write_overlap_csv(csv_path, scaling)
        write_overlap_fit_json(json_path, scaling)
        written = [csv_path, json_path]
        for path in written:
            print(f"wrote {path}")
    _manifest(cfg, cfg.get("out"), written)
    return EXIT_OK


def cmd_correlations(cfg: dict) -> int:
    from .experiments import default_tag
    from .fock import enumerate_basis
    from .reduced import _profile_arrays, write_correlations_csv
    from .spectral import load_checkpoint

    checkpoint = _require(cfg, "checkpoint", "correlations")
    out = _require(cfg, "out", "correlations")
    decomp, params = load_checkpoint(checkpoint)
    basis = enumerate_basis(params)
    _, rows = _profile_arrays(decomp.vectors, basis, ref_site=cfg["ref_site"])

    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    tag = cfg.get("tag") or default_tag(params)
    path = out_dir / f"correlations_{tag}.csv"
    pairs = [(k, rows[k]) for k in range(rows.shape[0])]
    pairs.append((-1, rows.mean(axis=0)))
    write_correlations_csv(path, pairs)
    print(f"wrote {path} ({rows.shape[0]} states + average)")
    _manifest(cfg, out, [path])
    return EXIT_OK


_HANDLERS = {
    "spectrum": cmd_spectrum,
    "scaling": cmd_scaling,
    "integrable": cmd_integrable,
    "overlap-scaling": cmd_overlap_scaling,
    "correlations": cmd_correlations,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_help()
        return EXIT_USAGE
    try:
        cfg = effective_config(args, args.command)
        _apply_threads(cfg.get("threads"))
        return _HANDLERS[args.command](cfg)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
