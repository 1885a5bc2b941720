"""Truncated two-mode Fock space and Hamiltonian builders.

The joint basis is cavity-major: basis state |n_a, m_b> sits at joint
index ``a_index * N_m + m_index``.  That convention is baked into
:class:`SpaceSpec` and shared by every module.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np
import scipy.sparse as sp

from .circuit import EffectiveCouplings
from .errors import ConfigError

if TYPE_CHECKING:
    from .lindblad import DriveAndBath

__all__ = [
    "SpaceSpec",
    "FockOperator",
    "ladder",
    "number",
    "hamiltonian_lab",
    "hamiltonian_driven",
]

# joint dimension above which operators are kept sparse
_DENSE_LIMIT = 400


@dataclass(frozen=True)
class SpaceSpec:
    """Truncation levels of the two modes.

    n_a levels for the cavity (photon numbers 0..n_a-1) and n_m for
    the mechanics.  The joint index of |n, m> is n * n_m + m.
    """

    n_a: int
    n_m: int

    def __post_init__(self) -> None:
        if self.n_a < 2 or self.n_m < 2:
            raise ConfigError("both modes need at least two levels")

    @property
    def dim(self) -> int:
        return self.n_a * self.n_m

    def joint_index(self, n: int, m: int) -> int:
        return n * self.n_m + m


@dataclass(frozen=True)
class FockOperator:
    """Operator on the joint truncated space.

    The matrix is dense below joint dimension 400 and sparse CSR above,
    since Liouvillian memory grows with the fourth power of the mode
    dimensions.  Use :meth:`sparse` / :meth:`dense` to get a specific
    representation.
    """

    space: SpaceSpec
    matrix: object

    def sparse(self) -> sp.csr_matrix:
        if sp.issparse(self.matrix):
            return self.matrix.tocsr()
        return sp.csr_matrix(self.matrix)

    def dense(self) -> np.ndarray:
        if sp.issparse(self.matrix):
            return self.matrix.toarray()
        return np.asarray(self.matrix)

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        m = self.sparse()
        scale = sp.linalg.norm(m) or 1.0
        return abs(m - m.getH()).max() < tol * scale


def _store(space: SpaceSpec, matrix: sp.spmatrix) -> FockOperator:
    if space.dim <= _DENSE_LIMIT:
        return FockOperator(space, matrix.toarray())
    return FockOperator(space, matrix.tocsr())


def _destroy_single(n_levels: int) -> sp.csr_matrix:
    return sp.diags(np.sqrt(np.arange(1, n_levels)), 1, format="csr", dtype=complex)


def ladder(space: SpaceSpec, mode: str) -> FockOperator:
    """Annihilation operator of one mode on the joint space.

    Parameters
    ----------
    space : SpaceSpec
    mode : {"cavity", "mechanics"}

    Returns
    -------
    FockOperator
        a (x) 1 for the cavity, 1 (x) b for the mechanics, in the
        cavity-major ordering.
    """
    if mode == "cavity":
        op = sp.kron(_destroy_single(space.n_a), sp.identity(space.n_m), format="csr")
    elif mode == "mechanics":
        op = sp.kron(sp.identity(space.n_a), _destroy_single(space.n_m), format="csr")
    else:
        raise ConfigError(f"unknown mode {mode!r}")
    return _store(space, op)


def number(space: SpaceSpec, mode: str) -> FockOperator:
    """Number operator of one mode on the joint space."""
    a = ladder(space, mode).sparse()
    return _store(space, (a.getH() @ a).tocsr())


def _diagonal_part(eff: EffectiveCouplings, space: SpaceSpec, omega_c: float) -> np.ndarray:
    """Diagonal entries omega_c n + omega_M m + gbar n m + g' n m^2."""
    n = np.arange(space.n_a)[:, None]
    m = np.arange(space.n_m)[None, :]
    diag = (
        omega_c * n
        + eff.omega_M * m
        + eff.gbar_CK * n * m
        + eff.g_CK_prime * n * m**2
    )
    return diag.reshape(-1).astype(float)


def hamiltonian_lab(eff: EffectiveCouplings, space: SpaceSpec) -> FockOperator:
    """Lab-frame Hamiltonian on the joint truncated space.

    H = omega_c n_a + omega_M n_b + g0 n_a (b + b^dag)
        + gbar_CK n_a n_b + g_CK_prime n_a n_b^2

    The cross-Kerr terms are diagonal in both number operators, so the
    matrix is block-diagonal in photon number; only the g0 term moves
    population between phonon levels.
    """
    h = sp.diags(_diagonal_part(eff, space, eff.omega_c), 0, format="csr", dtype=complex)
    if eff.g0 != 0.0:
        b = sp.kron(sp.identity(space.n_a), _destroy_single(space.n_m), format="csr")
        n_a = sp.kron(
            sp.diags(np.arange(space.n_a, dtype=float), 0),
            sp.identity(space.n_m),
            format="csr",
        )
        h = h + eff.g0 * (n_a @ (b + b.getH()))
    return _store(space, h)


def hamiltonian_driven(
    eff: EffectiveCouplings, drive: "DriveAndBath", space: SpaceSpec
) -> FockOperator:
    """Hamiltonian in the frame rotating at the drive frequency.

    Replaces omega_c by the detuning Delta_c and adds the drive term
    Omega (a + a^dag).
    """
    h = sp.diags(
        _diagonal_part(eff, space, drive.Delta_c), 0, format="csr", dtype=complex
    )
    if eff.g0 != 0.0:
        b = sp.kron(sp.identity(space.n_a), _destroy_single(space.n_m), format="csr")
        n_a = sp.kron(
            sp.diags(np.arange(space.n_a, dtype=float), 0),
            sp.identity(space.n_m),
            format="csr",
        )
        h = h + eff.g0 * (n_a @ (b + b.getH()))
    omega = drive.drive_amplitude()
    if omega != 0.0:
        a = sp.kron(_destroy_single(space.n_a), sp.identity(space.n_m), format="csr")
        h = h + omega * (a + a.getH())
    return _store(space, h)
