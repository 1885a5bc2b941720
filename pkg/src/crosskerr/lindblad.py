"""Open-system dynamics on the truncated two-mode space.

Builds Liouvillians for the master equation

    d rho / dt = i [rho, H] + kappa D[a] rho
                 + gamma (n_th + 1) D[b] rho + gamma n_th D[b^dag] rho

with D[c] rho = c rho c^dag - (c^dag c rho + rho c^dag c) / 2, solves
for steady states, propagates trajectories, and classifies the photon
statistics.  The cavity couples to a vacuum reservoir; kappa is the
steady cavity linewidth, so a bare Fock excitation decays as
<n_a>(t) = n e^(-kappa t).

Superoperators act on column-stacked density matrices: the matrix
element rho[i, j] lives at vector index i + j * dim.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.constants import hbar as HBAR, k as K_B

from .errors import ConfigError, SolverError
from .fockspace import FockOperator, SpaceSpec, ladder

__all__ = [
    "DriveAndBath",
    "DensityMatrix",
    "Liouvillian",
    "liouvillian",
    "steady_state",
    "propagate",
    "PropagationResult",
    "gn0",
    "classify",
    "thermal_occupation",
    "drive_from_power",
    "liouvillian_spectral_gap",
]

# vec dimension up to which the steady state is solved by direct LU
_DIRECT_LIMIT = 10_000

CLASS_LABELS = ("OnePB", "TwoPB", "TwoPIT", "ThreePIT", "Poissonian")


def thermal_occupation(omega: float, T: float) -> float:
    """Mean thermal occupation 1 / (exp(hbar omega / k_B T) - 1)."""
    if T <= 0:
        return 0.0
    return 1.0 / math.expm1(HBAR * omega / (K_B * T))


def drive_from_power(power_dBm: float, omega_d: float, kappa: float) -> float:
    """Drive amplitude Omega = sqrt(2 kappa P / (hbar omega_d)).

    The power P is converted from dBm, P = 10^(dBm/10) mW.
    """
    power_watt = 10.0 ** (power_dBm / 10.0) * 1e-3
    return math.sqrt(2.0 * kappa * power_watt / (HBAR * omega_d))


@dataclass(frozen=True)
class DriveAndBath:
    """Drive and reservoir parameters, all rates in rad/s.

    The drive can be given directly as ``Omega`` or as an input power
    in dBm together with the drive frequency ``omega_d``.  The thermal
    phonon number can be given directly as ``n_th`` or as a temperature
    ``T`` in kelvin, resolved against the mechanical frequency through
    :meth:`thermal_phonons`.
    """

    Delta_c: float
    kappa: float
    gamma: float
    Omega: float | None = None
    power_dBm: float | None = None
    omega_d: float | None = None
    n_th: float | None = None
    T: float | None = None

    def __post_init__(self) -> None:
        if self.kappa < 0 or self.gamma < 0:
            raise ConfigError("decay rates must be nonnegative")
        if self.Omega is not None and self.power_dBm is not None:
            raise ConfigError("give either Omega or power_dBm, not both")
        if self.power_dBm is not None and self.omega_d is None:
            raise ConfigError("power_dBm requires omega_d")
        if self.n_th is not None and self.T is not None:
            raise ConfigError("give either n_th or T, not both")
        if self.n_th is not None and self.n_th < 0:
            raise ConfigError("n_th must be nonnegative")

    def drive_amplitude(self) -> float:
        if self.Omega is not None:
            return self.Omega
        if self.power_dBm is not None:
            return drive_from_power(self.power_dBm, self.omega_d, self.kappa)
        return 0.0

    def thermal_phonons(self, omega_M: float | None = None) -> float:
        if self.n_th is not None:
            return self.n_th
        if self.T is not None:
            if omega_M is None:
                raise ConfigError("temperature given; omega_M needed to resolve n_th")
            return thermal_occupation(omega_M, self.T)
        return 0.0


@dataclass(frozen=True)
class DensityMatrix:
    """Density matrix on a joint truncated space.

    ``residual`` records the solver residual for steady states.
    """

    space: SpaceSpec
    rho: np.ndarray
    residual: float | None = None

    def validate(
        self,
        trace_tol: float = 1e-10,
        herm_tol: float = 1e-10,
        eig_floor: float = -1e-8,
    ) -> "DensityMatrix":
        """Check trace, Hermiticity, and numerical positivity.

        Raises SolverError when any bound is violated; returns self so
        that calls can be chained.
        """
        trace_err = abs(np.trace(self.rho) - 1.0)
        if trace_err > trace_tol:
            raise SolverError(f"density matrix trace off by {trace_err:.2e}")
        herm_err = np.abs(self.rho - self.rho.conj().T).max()
        if herm_err > herm_tol:
            raise SolverError(f"density matrix non-Hermitian by {herm_err:.2e}")
        eig_min = np.linalg.eigvalsh((self.rho + self.rho.conj().T) / 2.0).min()
        if eig_min < eig_floor:
            raise SolverError(f"density matrix eigenvalue {eig_min:.2e} below floor")
        return self

    def expect(self, op: FockOperator | np.ndarray) -> complex:
        m = op.sparse() if isinstance(op, FockOperator) else np.asarray(op)
        if sp.issparse(m):
            return complex((m @ self.rho).diagonal().sum())
        return complex(np.trace(m @ self.rho))

    def photon_distribution(self) -> np.ndarray:
        """Diagonal photon-number populations p_n."""
        r = self.rho.reshape(self.space.n_a, self.space.n_m, self.space.n_a, self.space.n_m)
        return np.einsum("imim->i", r).real

    def reduced_mechanics(self) -> np.ndarray:
        """Partial trace over the cavity."""
        r = self.rho.reshape(self.space.n_a, self.space.n_m, self.space.n_a, self.space.n_m)
        return np.einsum("imik->mk", r)

    def reduced_cavity(self) -> np.ndarray:
        """Partial trace over the mechanics."""
        r = self.rho.reshape(self.space.n_a, self.space.n_m, self.space.n_a, self.space.n_m)
        return np.einsum("imjm->ij", r)


def _pre(op: sp.spmatrix, dim: int) -> sp.csr_matrix:
    """Superoperator for left multiplication, rho -> op rho."""
    return sp.kron(sp.identity(dim, format="csr"), op, format="csr")


def _post(op: sp.spmatrix, dim: int) -> sp.csr_matrix:
    """Superoperator for right multiplication, rho -> rho op."""
    return sp.kron(op.T, sp.identity(dim, format="csr"), format="csr")


def _dissipator(c: sp.spmatrix, dim: int) -> sp.csr_matrix:
    cdc = (c.getH() @ c).tocsr()
    sandwich = sp.kron(c.conj(), c, format="csr")
    return sandwich - 0.5 * (_pre(cdc, dim) + _post(cdc, dim))


@dataclass(frozen=True)
class Liouvillian:
    """Sparse superoperator matrix together with its space."""

    space: SpaceSpec
    matrix: sp.csr_matrix
    norm: float

    def apply(self, rho: np.ndarray) -> np.ndarray:
        d = self.space.dim
        return (self.matrix @ rho.reshape(-1, order="F")).reshape((d, d), order="F")


def liouvillian(
    H: FockOperator, bath: DriveAndBath, n_th: float | None = None
) -> Liouvillian:
    """Build the master-equation generator for a given Hamiltonian.

    Parameters
    ----------
    H : FockOperator
        System Hamiltonian (must be Hermitian).
    bath : DriveAndBath
        Decay rates and thermal occupation.  The drive enters through
        the Hamiltonian, not here.
    n_th : float, optional
        Resolved thermal phonon number; defaults to
        ``bath.thermal_phonons()``, which requires n_th-style input.

    Returns
    -------
    Liouvillian

    Notes
    -----
    The generator is trace preserving by construction: the identity row
    vector is a left null vector, which is what makes the replaced-row
    trick in :func:`steady_state` well posed.
    """
    if not H.is_hermitian():
        raise ConfigError("liouvillian requires a Hermitian Hamiltonian")
    space = H.space
    d = space.dim
    h = H.sparse()
    if n_th is None:
        n_th = bath.thermal_phonons()

    lv = 1j * (_post(h, d) - _pre(h, d))
    if bath.kappa > 0:
        a = ladder(space, "cavity").sparse()
        lv = lv + bath.kappa * _dissipator(a, d)
    if bath.gamma > 0:
        b = ladder(space, "mechanics").sparse()
        lv = lv + bath.gamma * (n_th + 1.0) * _dissipator(b, d)
        if n_th > 0:
            lv = lv + bath.gamma * n_th * _dissipator(b.getH().tocsr(), d)
    lv = lv.tocsr()
    return Liouvillian(space=space, matrix=lv, norm=spla.norm(lv))


def steady_state(
    L: Liouvillian, tol: float = 1e-10, method: str = "auto"
) -> DensityMatrix:
    """Solve L(rho) = 0 with unit trace.

    One row of the superoperator is replaced by the trace constraint
    and the resulting nonsingular system is solved directly with a
    sparse LU factorization; above a vec dimension of about 10^4 a
    preconditioned restarted iterative solver takes over.  The result
    is Hermitized, normalized, and checked against
    ||L(rho)|| <= tol * ||L|| * ||rho||.

    Raises
    ------
    SolverError
        On failure to meet the residual bound, which covers both
        non-convergence and a degenerate (non-unique) null space.
    """
    d = L.space.dim
    m = L.matrix.tolil(copy=True)
    trace_cols = np.arange(d) * (d + 1)
    m.rows[0] = list(trace_cols)
    m.data[0] = [1.0] * d
    rhs = np.zeros(d * d, dtype=complex)
    rhs[0] = 1.0

    if method not in ("auto", "direct", "iterative"):
        raise ConfigError(f"unknown steady-state method {method!r}")
    direct = method == "direct" or (method == "auto" and d * d <= _DIRECT_LIMIT)
    a = m.tocsc()
    if direct:
        try:
            vec = spla.spsolve(a, rhs)
        except RuntimeError as exc:
            raise SolverError(
                f"sparse factorization failed ({exc}); the Liouvillian null "
                "space may be degenerate"
            ) from exc
    else:
        ilu = spla.spilu(a, drop_tol=1e-6, fill_factor=20)
        precond = spla.LinearOperator(a.shape, ilu.solve)
        vec, info = spla.lgmres(a, rhs, M=precond, rtol=1e-12, atol=0.0, maxiter=2000)
        if info != 0:
            raise SolverError(f"iterative steady-state solver stalled (info={info})")

    rho = vec.reshape((d, d), order="F")
    rho = (rho + rho.conj().T) / 2.0
    rho = rho / np.trace(rho).real

    residual = np.linalg.norm(L.apply(rho))
    bound = tol * L.norm * np.linalg.norm(rho)
    if not residual <= bound:
        raise SolverError(
            f"steady-state residual {residual:.2e} exceeds bound {bound:.2e}; "
            "the null space may be degenerate"
        )
    out = DensityMatrix(L.space, rho, residual=residual)
    return out.validate()


@dataclass(frozen=True)
class PropagationResult:
    """Trajectory output with trace-drift diagnostics."""

    times: np.ndarray
    states: list[DensityMatrix]
    step_drift: float
    total_drift: float


def propagate(
    rho0: DensityMatrix | np.ndarray,
    L: Liouvillian,
    t_grid,
    step_tol: float = 1e-10,
    total_tol: float = 1e-8,
) -> PropagationResult:
    """Integrate the master equation over the given time grid.

    Uses Krylov-free scaling-and-stepping of the matrix exponential
    (``expm_multiply``), which is exact to machine rounding for each
    interval; an interval whose trace drift exceeds ``step_tol`` is
    bisected adaptively.  Output states are re-Hermitized.

    Returns
    -------
    PropagationResult
        States at the grid points plus the worst per-step and the
        cumulative trace drift.

    Raises
    ------
    SolverError
        On step-size underflow or when the cumulative drift exceeds
        ``total_tol``.
    """
    t = np.asarray(t_grid, dtype=float)
    if t.ndim != 1 or len(t) < 1 or np.any(np.diff(t) <= 0):
        raise ConfigError("t_grid must be a strictly increasing 1-d sequence")
    rho_in = rho0.rho if isinstance(rho0, DensityMatrix) else np.asarray(rho0)
    d = L.space.dim
    if rho_in.shape != (d, d):
        raise ConfigError("initial state has the wrong dimension")

    min_dt = max(t[-1], 1.0e-30) * 1e-16
    states: list[DensityMatrix] = []
    step_drift = 0.0

    def advance(vec: np.ndarray, t0: float, t1: float, depth: int = 0) -> np.ndarray:
        nonlocal step_drift
        if t1 - t0 < min_dt:
            raise SolverError("propagation step size underflow")
        before = vec[trace_idx].sum().real
        out = spla.expm_multiply(L.matrix * (t1 - t0), vec)
        drift = abs(out[trace_idx].sum().real - before)
        if drift > step_tol:
            mid = (t0 + t1) / 2.0
            return advance(advance(vec, t0, mid, depth + 1), mid, t1, depth + 1)
        step_drift = max(step_drift, drift)
        return out

    trace_idx = np.arange(d) * (d + 1)
    vec = rho_in.reshape(-1, order="F").astype(complex)
    t_prev = t[0]
    if t[0] == 0.0:
        states.append(_as_state(L.space, vec, d))
    else:
        vec = advance(vec, 0.0, t[0])
        states.append(_as_state(L.space, vec, d))
    for t_next in t[1:]:
        vec = advance(vec, t_prev, t_next)
        states.append(_as_state(L.space, vec, d))
        t_prev = t_next

    total_drift = abs(vec[trace_idx].sum().real - 1.0)
    if total_drift > total_tol:
        raise SolverError(f"cumulative trace drift {total_drift:.2e} over budget")
    return PropagationResult(
        times=t, states=states, step_drift=step_drift, total_drift=total_drift
    )


def _as_state(space: SpaceSpec, vec: np.ndarray, d: int) -> DensityMatrix:
    rho = vec.reshape((d, d), order="F")
    rho = (rho + rho.conj().T) / 2.0
    return DensityMatrix(space, rho)


def gn0(rho_ss: DensityMatrix, n: int) -> float:
    """Equal-time n-th order photon correlation g^(n)(0) for n in {2, 3}.

    Computed from the photon-number distribution as
    <a^dag^n a^n> / <a^dag a>^n, i.e. factorial moments of p_n.

    Raises
    ------
    ConfigError
        If n is not 2 or 3, or the mean photon number is below 1e-12,
        in which case the correlation is undefined.
    """
    if n not in (2, 3):
        raise ConfigError("only g2 and g3 are defined")
    p = rho_ss.photon_distribution()
    k = np.arange(len(p), dtype=float)
    mean = float(p @ k)
    if mean <= 1e-12:
        raise ConfigError("mean photon number vanishes; correlation undefined")
    if n == 2:
        numer = float(p @ (k * (k - 1.0)))
    else:
        numer = float(p @ (k * (k - 1.0) * (k - 2.0)))
    return numer / mean**n


def classify(g2: float, g3: float, tie: float = 1e-6) -> str:
    """Five-way photon-statistics label from (g2, g3).

    OnePB for g2 < 1; TwoPB for g2 >= 1 with g3 < 1; TwoPIT for
    1 < g3 < g2; ThreePIT for 1 < g2 < g3; Poissonian when both
    correlations sit within ``tie`` of 1.  The tie band keeps sweep
    grids from speckling at the class boundaries.
    """
    if not (np.isfinite(g2) and np.isfinite(g3)):
        raise ConfigError("correlations must be finite")
    near2 = abs(g2 - 1.0) <= tie
    near3 = abs(g3 - 1.0) <= tie
    if near2 and near3:
        return "Poissonian"
    if g2 < 1.0 and not near2:
        return "OnePB"
    if g3 < 1.0 and not near3:
        return "TwoPB"
    return "TwoPIT" if g3 < g2 else "ThreePIT"


def liouvillian_spectral_gap(L: Liouvillian, k: int = 2) -> np.ndarray:
    """Magnitudes of the k smallest Liouvillian eigenvalues.

    Diagnostic for steady-state uniqueness: exactly one eigenvalue
    should sit at zero, and the second-smallest magnitude is the gap.
    Dense eigendecomposition, so only sensible at small truncations.
    """
    w = np.linalg.eigvals(L.matrix.toarray())
    mags = np.sort(np.abs(w))
    return mags[:k]
