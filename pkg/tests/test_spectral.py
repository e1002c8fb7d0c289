"""Dense diagonalization contract: invariants, determinism, checkpoints."""

import numpy as np
import pytest

from edh_lab.fock import ModelParams, assemble_hamiltonian, enumerate_basis
from edh_lab.spectral import (
    DiagonalizationError,
    SparseHamiltonian,
    full_diagonalize,
    load_checkpoint,
    residual_report,
    save_checkpoint,
)


def random_sparse(dim, rng, fill=0.1):
    diag = rng.standard_normal(dim)
    pairs = [(r, c) for r in range(dim) for c in range(r + 1, dim)
             if rng.random() < fill]
    rows = np.array([p[0] for p in pairs], dtype=int)
    cols = np.array([p[1] for p in pairs], dtype=int)
    return SparseHamiltonian(dimension=dim, diagonal=diag, rows=rows, cols=cols,
                             values=rng.standard_normal(len(pairs)))


def test_two_by_two():
    h = SparseHamiltonian(dimension=2, diagonal=np.zeros(2),
                          rows=np.array([0]), cols=np.array([1]),
                          values=np.array([-1.0]))
    decomp = full_diagonalize(h)
    assert np.allclose(decomp.energies, [-1.0, 1.0], atol=1e-14)


def test_decoupled_blocks_spectrum():
    basis = enumerate_basis(ModelParams(L=2, N=1, J=1.0))
    decomp = full_diagonalize(assemble_hamiltonian(basis))
    assert np.allclose(decomp.energies, [-1.0, -1.0, 1.0, 1.0], atol=1e-12)


@pytest.mark.parametrize("dim", [5, 40])
def test_trace_identity(dim):
    h = random_sparse(dim, np.random.default_rng(dim))
    decomp = full_diagonalize(h)
    assert abs(h.diagonal.sum() - decomp.energies.sum()) < 1e-9 * dim


def test_completeness_small():
    basis = enumerate_basis(ModelParams(L=4, N=2, J=1.0, Jp=0.3, U=1.0))
    decomp = full_diagonalize(assemble_hamiltonian(basis))
    v = decomp.vectors
    assert np.abs(v @ v.T - np.eye(decomp.dim)).max() < 1e-8


def test_sign_gauge_deterministic():
    basis = enumerate_basis(ModelParams(L=4, N=2, J=1.0, Jp=0.2, U=1.0))
    h = assemble_hamiltonian(basis)
    a = full_diagonalize(h)
    b = full_diagonalize(assemble_hamiltonian(basis))
    assert np.array_equal(a.vectors, b.vectors)
    # largest-magnitude component of every column is positive
    lead = np.argmax(np.abs(a.vectors), axis=0)
    assert (a.vectors[lead, np.arange(a.dim)] > 0).all()


def test_residual_report_via_independent_route():
    basis = enumerate_basis(ModelParams(L=5, N=2, J=1.0, Jp=0.4, U=0.9, eps=0.1))
    decomp = full_diagonalize(assemble_hamiltonian(basis))
    residuals = residual_report(basis, decomp)
    assert residuals.shape == (decomp.dim,)
    assert residuals.max() <= 1e-9 * decomp.spectral_range


def test_perturbed_vector_grows_residual():
    basis = enumerate_basis(ModelParams(L=4, N=2, J=1.0, Jp=0.2, U=1.0))
    decomp = full_diagonalize(assemble_hamiltonian(basis))
    clean = residual_report(basis, decomp).max()
    rng = np.random.default_rng(3)
    for delta in (1e-8, 1e-6):
        noisy = decomp.vectors.copy()
        noisy[:, 0] += delta * rng.standard_normal(decomp.dim)
        perturbed = type(decomp)(energies=decomp.energies, vectors=noisy,
                                 residual_bound=decomp.residual_bound,
                                 near_degenerate=decomp.near_degenerate)
        grown = residual_report(basis, perturbed)[0]
        assert grown > clean
        assert grown == pytest.approx(delta * decomp.spectral_range, rel=5.0)


def test_dim_cap():
    basis = enumerate_basis(ModelParams(L=8, N=4, J=1.0))
    h = assemble_hamiltonian(basis)
    with pytest.raises(ValueError):
        full_diagonalize(h, dim_cap=100)


def test_reflection_symmetric_spectrum():
    from edh_lab.fock import reflection_permutation

    basis = enumerate_basis(ModelParams(L=4, N=2, J=1.0, Jp=0.3, U=1.1))
    dense = assemble_hamiltonian(basis).to_dense()
    perm = reflection_permutation(basis)
    reflected = dense[np.ix_(perm, perm)]
    a = np.linalg.eigvalsh(dense)
    b = np.linalg.eigvalsh(reflected)
    assert np.abs(a - b).max() < 1e-11


def test_near_degenerate_flagging():
    # U=0 with Jp=J makes particle/fermion excitations cross exactly
    basis = enumerate_basis(ModelParams(L=2, N=1, J=1.0, Jp=1.0, U=0.0))
    decomp = full_diagonalize(assemble_hamiltonian(basis))
    assert decomp.near_degenerate.size > 0


def test_checkpoint_roundtrip(tmp_path):
    params = ModelParams(L=4, N=2, J=1.0, Jp=0.2, U=1.0, eps=0.1)
    basis = enumerate_basis(params)
    decomp = full_diagonalize(assemble_hamiltonian(basis))
    path = tmp_path / "eig"
    save_checkpoint(path, decomp, params)
    loaded, stored = load_checkpoint(path)
    assert stored == params
    assert np.array_equal(loaded.energies, decomp.energies)
    assert np.array_equal(loaded.vectors, decomp.vectors)


def test_checkpoint_rejects_foreign_format(tmp_path):
    path = tmp_path / "bogus.npz"
    np.savez(path, stuff=np.arange(3))
    with pytest.raises(ValueError):
        load_checkpoint(path)
