"""Truncated-space operators and Hamiltonian builders."""

import numpy as np
import pytest

from crosskerr import (
    ConfigError,
    DriveAndBath,
    EffectiveCouplings,
    FockOperator,
    SpaceSpec,
    hamiltonian_driven,
    hamiltonian_lab,
    ladder,
    number,
)

EFF = EffectiveCouplings(
    omega_c=5.0,
    omega_M=1.0,
    g0=-0.3,
    g_CK=0.12,
    g_CK_prime=0.05,
    g_cub=0.0,
    G2=0.0,
    G4=0.0,
)


def test_space_spec_indexing():
    space = SpaceSpec(n_a=3, n_m=5)
    assert space.dim == 15
    assert space.joint_index(0, 0) == 0
    assert space.joint_index(0, 4) == 4
    assert space.joint_index(2, 3) == 13
    with pytest.raises(ConfigError):
        SpaceSpec(n_a=1, n_m=5)


def test_ladder_matrix_elements():
    space = SpaceSpec(n_a=4, n_m=3)
    a = ladder(space, "cavity").dense()
    b = ladder(space, "mechanics").dense()
    # <n-1, m| a |n, m> = sqrt(n)
    for n in range(1, 4):
        for m in range(3):
            assert a[space.joint_index(n - 1, m), space.joint_index(n, m)] == (
                pytest.approx(np.sqrt(n))
            )
    # <n, m-1| b |n, m> = sqrt(m)
    for n in range(4):
        for m in range(1, 3):
            assert b[space.joint_index(n, m - 1), space.joint_index(n, m)] == (
                pytest.approx(np.sqrt(m))
            )
    # the two modes commute
    assert np.allclose(a @ b, b @ a)
    with pytest.raises(ConfigError):
        ladder(space, "qubit")


def test_number_operator():
    space = SpaceSpec(n_a=3, n_m=4)
    n_a = number(space, "cavity").dense()
    n_b = number(space, "mechanics").dense()
    expected_a = np.repeat(np.arange(3), 4).astype(complex)
    expected_b = np.tile(np.arange(4), 3).astype(complex)
    assert np.allclose(np.diag(n_a), expected_a)
    assert np.allclose(np.diag(n_b), expected_b)
    assert np.allclose(n_a, np.triu(n_a) + np.tril(n_a, -1))  # diagonal


def test_hamiltonian_lab_matches_formula():
    space = SpaceSpec(n_a=3, n_m=6)
    h = hamiltonian_lab(EFF, space)
    assert isinstance(h, FockOperator)
    assert h.is_hermitian()
    dense = h.dense()
    gbar = EFF.g_CK + EFF.g_CK_prime
    for n in range(3):
        for m in range(6):
            i = space.joint_index(n, m)
            expected = (
                EFF.omega_c * n
                + EFF.omega_M * m
                + gbar * n * m
                + EFF.g_CK_prime * n * m**2
            )
            assert dense[i, i] == pytest.approx(expected)
    # single-phonon coupling: <n, m+1| H |n, m> = g0 n sqrt(m+1)
    for n in range(3):
        for m in range(5):
            val = dense[space.joint_index(n, m + 1), space.joint_index(n, m)]
            assert val == pytest.approx(EFF.g0 * n * np.sqrt(m + 1))


def test_hamiltonian_block_structure_without_linear_coupling():
    space = SpaceSpec(n_a=3, n_m=6)
    eff = EFF.replace(g0=0.0)
    dense = hamiltonian_lab(eff, space).dense()
    assert np.allclose(dense, np.diag(np.diag(dense)))


def test_hamiltonian_driven_blocks():
    space = SpaceSpec(n_a=3, n_m=4)
    bath = DriveAndBath(Delta_c=-0.7, kappa=0.01, gamma=0.001, Omega=0.2, n_th=0.0)
    h = hamiltonian_driven(EFF, bath, space).dense()
    assert hamiltonian_driven(EFF, bath, space).is_hermitian()
    # cavity frequency is replaced by the detuning
    i = space.joint_index(1, 0)
    assert h[i, i] == pytest.approx(-0.7)
    # drive block: <n+1, m| H |n, m> = Omega sqrt(n+1)
    for n in range(2):
        for m in range(4):
            val = h[space.joint_index(n + 1, m), space.joint_index(n, m)]
            assert val == pytest.approx(0.2 * np.sqrt(n + 1))


def test_large_space_stays_sparse():
    space = SpaceSpec(n_a=5, n_m=100)
    op = ladder(space, "mechanics")
    assert not isinstance(op.matrix, np.ndarray)
    small = SpaceSpec(n_a=4, n_m=12)
    assert isinstance(ladder(small, "cavity").matrix, np.ndarray)
