"""Linearized photon-phonon entanglement for the strongly driven
cavity.

A strong drive displaces both modes; expanding around the mean-field
amplitudes (alpha, beta) leaves quadratic fluctuations with an
effective beam-splitter/two-mode-squeezing coupling

    g_eff = -2 (g0 + gtilde beta + 2 gprime beta^3) |alpha|

whose cubic term in beta is the lever the phonon-curvature coupling
provides.  Stationary fluctuations are Gaussian, so stability
(Routh-Hurwitz on the drift matrix), the steady covariance (Lyapunov
equation), and the logarithmic negativity fully characterize the
state.

Quadrature ordering is (q_m, p_m, x_c, y_c) with vacuum variance 1/2
per quadrature; the two-mode symplectic form in this ordering is
block-diag([[0, 1], [-1, 0]]) twice.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from .circuit import EffectiveCouplings
from .errors import ConfigError, SolverError
from .lindblad import DriveAndBath

__all__ = [
    "MeanField",
    "mean_field",
    "drift_matrix",
    "diffusion_matrix",
    "StabilityReport",
    "routh_hurwitz",
    "CovarianceSolution",
    "lyapunov_solve",
    "physicality_defect",
    "log_negativity",
    "SweepPoint",
    "entanglement_sweep",
]

_SYMPLECTIC = np.kron(np.eye(2), np.array([[0.0, 1.0], [-1.0, 0.0]]))


@dataclass(frozen=True)
class MeanField:
    """Self-consistent semiclassical amplitudes and dressed parameters.

    ``residual`` is the worse of the two fixed-point equation residuals,
    relative to the driving terms.  ``notes`` collects conditions under
    which the downstream linearization is questionable; they are
    advisory, not errors.
    """

    alpha: complex
    beta: complex
    Delta_eff: float
    omega_eff: float
    g_eff: complex
    residual: float
    notes: tuple[str, ...] = ()


def mean_field(
    eff: EffectiveCouplings,
    bath: DriveAndBath,
    steps: int = 50,
    damping: float = 0.5,
    max_iter: int = 400,
    rel_tol: float = 1e-9,
) -> MeanField:
    """Solve the coupled mean-field fixed point by drive continuation.

    The cavity and mechanical amplitudes obey

        (i Delta_eff + kappa) alpha = Omega
        (i omega_eff + gamma) beta  = -i g0 |alpha|^2

    with the dressed detuning and mechanical frequency themselves
    functions of (alpha, beta).  The drive is ramped from zero in
    ``steps`` stages with damped fixed-point iteration at each stage,
    which tracks the low-amplitude branch through the bistable region.

    Raises
    ------
    SolverError
        If the final residual exceeds ``rel_tol``.
    """
    omega_drive = bath.drive_amplitude()
    gt = eff.gtilde_CK
    gp = eff.g_CK_prime
    kappa, gamma = bath.kappa, bath.gamma
    delta_c, omega_m, g0 = bath.Delta_c, eff.omega_M, eff.g0

    if omega_drive == 0.0:
        return MeanField(0j, 0j, delta_c, omega_m, 0j, 0.0)

    def dressed(alpha: complex, beta: complex) -> tuple[float, float]:
        d_eff = (
            delta_c
            + 2.0 * g0 * beta.real
            + gt * abs(beta) ** 2
            + gp * abs(beta) ** 4
        )
        w_eff = omega_m + gt * abs(alpha) ** 2 + 2.0 * gp * abs(alpha) ** 2 * abs(beta) ** 2
        return d_eff, w_eff

    alpha = 0j
    beta = 0j
    for s in range(1, steps + 1):
        om = omega_drive * s / steps
        for _ in range(max_iter):
            d_eff, w_eff = dressed(alpha, beta)
            a_new = om / (1j * d_eff + kappa)
            b_new = -1j * g0 * abs(alpha) ** 2 / (1j * w_eff + gamma)
            alpha = damping * a_new + (1.0 - damping) * alpha
            beta = damping * b_new + (1.0 - damping) * beta

    d_eff, w_eff = dressed(alpha, beta)
    r1 = abs((1j * d_eff + kappa) * alpha - omega_drive) / max(abs(omega_drive), 1.0)
    r2 = abs((1j * w_eff + gamma) * beta + 1j * g0 * abs(alpha) ** 2) / max(
        abs(g0) * abs(alpha) ** 2, 1.0
    )
    residual = max(r1, r2)
    if residual > rel_tol:
        raise SolverError(f"mean-field residual {residual:.2e} exceeds {rel_tol:.0e}")

    g_eff = -2.0 * (g0 + gt * beta + 2.0 * gp * beta**3) * abs(alpha)

    notes: list[str] = []
    if abs(alpha) < 10.0:
        notes.append("cavity amplitude below ~10; linearization is marginal")
    if abs(beta) < 2.0:
        notes.append("mechanical displacement below ~2; cubic enhancement inactive")
    if abs(beta) > 0 and abs(beta.imag) >= 0.05 * abs(beta):
        notes.append(
            "mechanical displacement has a sizable imaginary part; the "
            "drift matrix keeps only Re(g_eff)"
        )
    if abs(eff.g_CK) > abs(gp * beta**3):
        notes.append("bare cross-Kerr term exceeds the displaced cubic term")

    return MeanField(alpha, beta, d_eff, w_eff, g_eff, residual, tuple(notes))


def drift_matrix(mf: MeanField, bath: DriveAndBath) -> np.ndarray:
    """Fluctuation drift matrix in the (q_m, p_m, x_c, y_c) basis."""
    w, d = mf.omega_eff, mf.Delta_eff
    g = mf.g_eff.real
    k, ga = bath.kappa, bath.gamma
    return np.array(
        [
            [-ga, w, 0.0, 0.0],
            [-w, -ga, g, 0.0],
            [0.0, 0.0, -k, d],
            [g, 0.0, -d, -k],
        ]
    )


def diffusion_matrix(bath: DriveAndBath, n_th: float) -> np.ndarray:
    """Input-noise diffusion matrix for a thermal mechanical bath."""
    heat = bath.gamma * (2.0 * n_th + 1.0)
    return np.diag([heat, heat, bath.kappa, bath.kappa])


@dataclass(frozen=True)
class StabilityReport:
    """Routh-Hurwitz minors for the quartic characteristic polynomial.

    The fixed point is asymptotically stable iff all four are
    positive.
    """

    c1: float
    c2: float
    c3: float
    c4: float

    @property
    def stable(self) -> bool:
        return self.c1 > 0 and self.c2 > 0 and self.c3 > 0 and self.c4 > 0

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.c1, self.c2, self.c3, self.c4)


def routh_hurwitz(
    Delta_eff: float,
    omega_eff: float,
    g_eff: float,
    kappa: float,
    gamma: float,
) -> StabilityReport:
    """Closed-form stability conditions for the fluctuation drift.

    Expressed directly in the dressed parameters so that sweeps can
    locate instability thresholds without eigenvalue calls.  Each
    returned value must be positive for stability; they agree with the
    eigenvalue criterion on the full drift matrix.
    """
    d, w, g = Delta_eff, omega_eff, g_eff
    k, ga = kappa, gamma
    c1 = 2.0 * ga + 2.0 * k
    c2 = k * d**2 + ga * w**2 + k**3 + ga**3 + 4.0 * k * ga**2 + k**2 * ga
    c3 = 4.0 * k * ga * (
        d**4
        + 2.0 * d**2 * (ga**2 + k**2 - w**2)
        + 4.0 * k * ga * (d**2 + k * ga + ga**2 + k**2 + w**2)
        + (ga**2 + k**2 + w**2) ** 2
    ) + 4.0 * g**2 * d * w * (ga + k) ** 2
    c4 = (ga**2 + w**2) * (k**2 + d**2) - w * g**2 * d
    return StabilityReport(c1, c2, c3, c4)


@dataclass(frozen=True)
class CovarianceSolution:
    """Steady covariance matrix with its equation residual."""

    V: np.ndarray
    residual: float


def lyapunov_solve(
    A: np.ndarray, D: np.ndarray, rel_tol: float = 1e-10
) -> CovarianceSolution:
    """Solve A V + V A^T + D = 0 for the stationary covariance.

    Direct Kronecker solve of the 16-unknown linear system followed by
    one step of iterative refinement and symmetrization.  The residual
    is checked against ``rel_tol * ||D||``; an unstable drift matrix is
    rejected up front since the stationary problem is then ill-posed.
    """
    if np.max(np.linalg.eigvals(A).real) >= 0:
        raise SolverError("drift matrix is not stable; no stationary covariance")
    n = A.shape[0]
    eye = np.eye(n)
    k_mat = np.kron(A, eye) + np.kron(eye, A)
    v = np.linalg.solve(k_mat, -D.reshape(-1)).reshape(n, n)
    r = A @ v + v @ A.T + D
    v = v + np.linalg.solve(k_mat, -r.reshape(-1)).reshape(n, n)
    v = (v + v.T) / 2.0
    residual = np.linalg.norm(A @ v + v @ A.T + D)
    bound = rel_tol * np.linalg.norm(D)
    if not residual <= bound:
        raise SolverError(
            f"Lyapunov residual {residual:.2e} exceeds bound {bound:.2e}"
        )
    return CovarianceSolution(v, residual)


def physicality_defect(V: np.ndarray) -> float:
    """Smallest eigenvalue of V + i Omega_s / 2.

    Nonnegative (within roundoff) for any physical Gaussian state;
    values below about -1e-8 indicate a broken covariance.
    """
    h = V + 0.5j * _SYMPLECTIC
    return float(np.linalg.eigvalsh((h + h.conj().T) / 2.0).min())


def log_negativity(V: np.ndarray) -> float:
    """Logarithmic negativity of a two-mode covariance matrix.

    E_N = max(0, -ln 2 nu_minus) with nu_minus the smaller symplectic
    eigenvalue of the partial transpose.  A negative discriminant means
    the covariance is unphysical and raises instead of being clamped.
    """
    vm = V[:2, :2]
    vc = V[2:, 2:]
    vcm = V[:2, 2:]
    sigma = np.linalg.det(vm) + np.linalg.det(vc) - 2.0 * np.linalg.det(vcm)
    disc = sigma**2 - 4.0 * np.linalg.det(V)
    if disc < 0:
        raise SolverError("covariance matrix has no real symplectic spectrum")
    nu_minus_sq = (sigma - math.sqrt(disc)) / 2.0
    if nu_minus_sq <= 0:
        raise SolverError("partial-transpose eigenvalue collapsed to zero")
    return max(0.0, -0.5 * math.log(4.0 * nu_minus_sq))


@dataclass(frozen=True)
class SweepPoint:
    """One detuning point of an entanglement sweep.

    ``error`` carries the failure reason when the Gaussian chain could
    not be completed (unstable point, residual breach); the numeric
    fields that were produced before the failure stay filled.
    """

    Delta_c: float
    mf: MeanField
    rh: StabilityReport
    stable: bool
    E_N: float | None = None
    lyapunov_residual: float | None = None
    physicality: float | None = None
    error: str | None = None


def entanglement_sweep(
    eff: EffectiveCouplings,
    bath: DriveAndBath,
    delta_c_values,
) -> list[SweepPoint]:
    """Mean field, stability, covariance, and E_N across detunings.

    Unstable points and per-point solver failures are recorded in the
    row rather than aborting the sweep.
    """
    n_th = bath.thermal_phonons(eff.omega_M)
    points: list[SweepPoint] = []
    for dc in np.asarray(delta_c_values, dtype=float):
        b = dataclasses.replace(bath, Delta_c=float(dc))
        try:
            mf = mean_field(eff, b)
        except SolverError as exc:
            dummy = MeanField(0j, 0j, float(dc), eff.omega_M, 0j, math.inf)
            rh = routh_hurwitz(dummy.Delta_eff, dummy.omega_eff, 0.0, b.kappa, b.gamma)
            points.append(
                SweepPoint(float(dc), dummy, rh, False, error=str(exc))
            )
            continue
        rh = routh_hurwitz(mf.Delta_eff, mf.omega_eff, mf.g_eff.real, b.kappa, b.gamma)
        if not rh.stable:
            points.append(SweepPoint(float(dc), mf, rh, False, error="unstable"))
            continue
        try:
            sol = lyapunov_solve(drift_matrix(mf, b), diffusion_matrix(b, n_th))
            en = log_negativity(sol.V)
            defect = physicality_defect(sol.V)
            if defect < -1e-8:
                raise SolverError(f"covariance physicality defect {defect:.2e}")
        except SolverError as exc:
            points.append(SweepPoint(float(dc), mf, rh, True, error=str(exc)))
            continue
        points.append(
            SweepPoint(
                float(dc),
                mf,
                rh,
                True,
                E_N=en,
                lyapunov_residual=sol.residual,
                physicality=defect,
            )
        )
    return points
