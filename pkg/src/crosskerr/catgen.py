"""Mechanical cat-state preparation conditioned on the cavity photon
number, plus Wigner-function tools for certifying the result.

With the radiation-pressure coupling tuned away (g0 = 0) the joint
Hamiltonian is diagonal in the photon number n, and the mechanics at
fixed n evolves under a Kerr-type phase

    phi_m(t) = t [ (omega_M + n gbar) m + n gprime m^2 ]

acting on phonon Fock amplitudes.  At the revival times
tau = pi / (k gprime n) the quadratic phase collapses to a k-branch
superposition of rotated coherent states, i.e. a cat with k lobes.

Nonclassicality is quantified by the negative volume of the Wigner
function, computed from the displaced-parity series with a stable
log-space Laguerre recursion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln
from scipy.stats import poisson

from .circuit import EffectiveCouplings
from .errors import ConfigError, TruncationError
from .fockspace import SpaceSpec, hamiltonian_lab
from .lindblad import DensityMatrix, DriveAndBath, liouvillian, propagate

__all__ = [
    "CatSpec",
    "WignerGrid",
    "coherent",
    "evolve_closed",
    "cat_state",
    "state_fidelity",
    "wigner",
    "wigner_negativity",
    "negativity_trajectory",
    "NegativityTrajectory",
]


@dataclass(frozen=True)
class CatSpec:
    """Target cat: k lobes, written by n cavity photons onto an initial
    mechanical coherent state xi."""

    k: int
    n_photons: int
    xi: complex

    def __post_init__(self) -> None:
        if self.k not in (2, 3, 4):
            raise ConfigError("cat branch count k must be 2, 3, or 4")
        if self.n_photons < 1:
            raise ConfigError("cat generation needs at least one photon")

    def tau(self, eff: EffectiveCouplings) -> float:
        """First revival time pi / (k gprime n)."""
        rate = self.k * eff.g_CK_prime * self.n_photons
        if rate <= 0:
            raise ConfigError(
                "cat revival needs a positive phonon-curvature coupling"
            )
        return math.pi / rate


@dataclass(frozen=True)
class WignerGrid:
    """Square phase-space grid in the (x, p) quadratures."""

    x_min: float = -10.0
    x_max: float = 10.0
    p_min: float = -10.0
    p_max: float = 10.0
    n_points: int = 401

    def __post_init__(self) -> None:
        if self.n_points < 2:
            raise ConfigError("grid needs at least two points per axis")
        if self.x_max <= self.x_min or self.p_max <= self.p_min:
            raise ConfigError("grid bounds must be increasing")

    @property
    def xs(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.n_points)

    @property
    def ps(self) -> np.ndarray:
        return np.linspace(self.p_min, self.p_max, self.n_points)

    @property
    def cell_area(self) -> float:
        dx = (self.x_max - self.x_min) / (self.n_points - 1)
        dp = (self.p_max - self.p_min) / (self.n_points - 1)
        return dx * dp


def coherent(xi: complex, N_m: int, tail_tol: float = 1e-10) -> np.ndarray:
    """Truncated coherent state |xi> on N_m phonon levels.

    The Poisson weight beyond the truncation must stay below
    ``tail_tol``; otherwise the cutoff would silently distort every
    overlap computed downstream.
    """
    if N_m < 1:
        raise ConfigError("need at least one phonon level")
    mean = abs(xi) ** 2
    tail = float(poisson.sf(N_m - 1, mean)) if mean > 0 else 0.0
    if tail > tail_tol:
        raise TruncationError(
            f"coherent-state tail {tail:.2e} beyond {N_m} levels exceeds "
            f"{tail_tol:.0e}; raise N_m"
        )
    if mean == 0.0:
        vec = np.zeros(N_m, dtype=complex)
        vec[0] = 1.0
        return vec
    m = np.arange(N_m)
    log_mag = -mean / 2.0 + m * math.log(abs(xi)) - 0.5 * gammaln(m + 1)
    vec = np.exp(log_mag + 1j * np.angle(xi) * m)
    return vec / np.linalg.norm(vec)


def evolve_closed(
    eff: EffectiveCouplings, n: int, xi: complex, t: float, N_m: int
) -> np.ndarray:
    """Mechanical state at time t for a cavity pinned in Fock level n.

    Exact for g0 = 0: each phonon amplitude picks up the phase
    exp(-i t [n omega_c + (omega_M + n gbar) m + n gprime m^2]).  The
    global cavity phase is kept so the result matches a full two-mode
    propagation on the n-photon block.
    """
    if eff.g0 != 0.0:
        raise ConfigError(
            "closed-form evolution holds only with the linear coupling off"
        )
    vec = coherent(xi, N_m)
    m = np.arange(N_m)
    phase = t * (
        n * eff.omega_c
        + (eff.omega_M + n * eff.gbar_CK) * m
        + n * eff.g_CK_prime * m**2
    )
    return vec * np.exp(-1j * phase)


def _superpose(amps_alphas: list[tuple[complex, complex]], N_m: int) -> np.ndarray:
    vec = np.zeros(N_m, dtype=complex)
    for amp, alpha in amps_alphas:
        vec += amp * coherent(alpha, N_m)
    return vec / np.linalg.norm(vec)


def cat_state(spec: CatSpec, eff: EffectiveCouplings, N_m: int) -> np.ndarray:
    """Analytic k-lobe cat at the first revival time.

    The branch amplitudes follow from resumming exp(-i pi m^2 / k) over
    phonon number; the coherent label xi' = xi exp(-i tau (omega_M +
    n gbar)) carries the accumulated rotation.  A global phase
    (the cavity term exp(-i omega_c n tau)) is dropped, so compare
    against propagated states through fidelities, not amplitudes.
    """
    tau = spec.tau(eff)
    xi_rot = spec.xi * np.exp(-1j * tau * (eff.omega_M + spec.n_photons * eff.gbar_CK))
    if spec.k == 2:
        branches = [
            ((1.0 - 1.0j) / 2.0, xi_rot),
            ((1.0 + 1.0j) / 2.0, -xi_rot),
        ]
    elif spec.k == 3:
        w = np.exp(-1j * math.pi / 3.0)
        branches = [
            ((1.0 + w) / 3.0, xi_rot * np.exp(-1j * math.pi / 3.0)),
            ((1.0 + w) / 3.0, xi_rot * np.exp(1j * math.pi / 3.0)),
            ((1.0 - 2.0 * w) / 3.0, -xi_rot),
        ]
    else:
        u = np.exp(-1j * math.pi / 4.0) / 2.0
        branches = [
            (u, xi_rot),
            (-u, -xi_rot),
            (0.5, -1j * xi_rot),
            (0.5, 1j * xi_rot),
        ]
    return _superpose(branches, N_m)


def state_fidelity(state, reference: np.ndarray) -> float:
    """Overlap fidelity <ref|rho|ref>, or |<ref|psi>|^2 for vectors."""
    ref = np.asarray(reference, dtype=complex)
    ref = ref / np.linalg.norm(ref)
    mat = np.asarray(state.rho if isinstance(state, DensityMatrix) else state)
    if mat.ndim == 1:
        psi = mat / np.linalg.norm(mat)
        return float(abs(np.vdot(ref, psi)) ** 2)
    return float(np.real(ref.conj() @ mat @ ref))


def wigner(state, grid: WignerGrid | None = None, norm_tol: float = 1e-3) -> np.ndarray:
    """Wigner function over the grid, in the x = (b + b^dag)/sqrt(2)
    quadrature convention.

    Evaluates the displaced-parity series diagonal by diagonal with the
    three-term associated-Laguerre recursion; factorial ratios go
    through log-gamma so high phonon cutoffs stay finite.  The grid
    integral of the result must reproduce the state norm to
    ``norm_tol`` or a TruncationError flags the window as too tight.
    """
    if grid is None:
        grid = WignerGrid()
    mat = np.asarray(state.rho if isinstance(state, DensityMatrix) else state, dtype=complex)
    if mat.ndim == 1:
        mat = np.outer(mat, mat.conj())
    n_lvl = mat.shape[0]

    x, p = np.meshgrid(grid.xs, grid.ps, indexing="ij")
    alpha = (x + 1j * p) / math.sqrt(2.0)
    b4 = 4.0 * np.abs(alpha) ** 2
    acc = np.zeros_like(b4, dtype=complex)

    for d in range(n_lvl):
        diag = np.ascontiguousarray(np.diagonal(mat, offset=d))
        if not np.any(diag):
            continue
        off = (2.0 * alpha) ** d if d else 1.0
        l_prev = np.zeros_like(b4)
        l_curr = np.ones_like(b4)
        diag_sum = np.zeros_like(acc)
        for m in range(n_lvl - d):
            if m == 1:
                l_prev, l_curr = l_curr, 1.0 + d - b4
            elif m > 1:
                l_next = ((2 * m - 1 + d - b4) * l_curr - (m - 1 + d) * l_prev) / m
                l_prev, l_curr = l_curr, l_next
            if diag[m] == 0:
                continue
            weight = math.exp(0.5 * (gammaln(m + 1) - gammaln(m + d + 1)))
            sign = -1.0 if m % 2 else 1.0
            diag_sum += diag[m] * sign * weight * l_curr
        term = diag_sum * off
        acc += term if d == 0 else 2.0 * term.real

    w = acc.real * np.exp(-2.0 * np.abs(alpha) ** 2) / math.pi

    total = w.sum() * grid.cell_area
    norm = float(np.trace(mat).real)
    if abs(total - norm) > norm_tol:
        raise TruncationError(
            f"Wigner integral {total:.6f} misses the state norm {norm:.6f}; "
            "widen the grid or refine it"
        )
    return w


def wigner_negativity(w: np.ndarray, grid: WignerGrid) -> float:
    """Negative volume: integral of |W| - W over the grid."""
    return float(np.sum(np.abs(w) - w) * grid.cell_area)


@dataclass(frozen=True)
class NegativityTrajectory:
    """Wigner negativity of the reduced mechanics along a trajectory."""

    times: np.ndarray
    values: np.ndarray
    mech_states: list[np.ndarray] | None = None


def negativity_trajectory(
    eff: EffectiveCouplings,
    bath: DriveAndBath,
    spec: CatSpec,
    t_grid,
    N_m: int = 60,
    grid: WignerGrid | None = None,
    keep_states: bool = False,
) -> NegativityTrajectory:
    """Open-system cat preparation from |n>_a |xi>_b under decay.

    The cavity frequency is gauged away before building the
    Liouvillian: every coupling term commutes with the photon number
    and photon loss is invariant under the rotation, so the reduced
    mechanical state is unchanged while the propagation avoids the
    optical-frequency stiffness.  With no drive the photon number only
    decreases, so n_photons + 1 cavity levels are exact.
    """
    if bath.drive_amplitude() != 0.0:
        raise ConfigError("cat trajectories are defined for an undriven cavity")
    if grid is None:
        grid = WignerGrid()
    space = SpaceSpec(n_a=spec.n_photons + 1, n_m=N_m)
    h = hamiltonian_lab(eff.replace(omega_c=0.0), space)

    mech0 = coherent(spec.xi, N_m)
    cav0 = np.zeros(space.n_a, dtype=complex)
    cav0[spec.n_photons] = 1.0
    psi0 = np.kron(cav0, mech0)
    rho0 = DensityMatrix(space, np.outer(psi0, psi0.conj()))

    lv = liouvillian(h, bath)
    traj = propagate(rho0, lv, t_grid)

    values = np.empty(len(traj.states))
    kept: list[np.ndarray] | None = [] if keep_states else None
    for i, st in enumerate(traj.states):
        mech = st.reduced_mechanics()
        values[i] = wigner_negativity(wigner(mech, grid), grid)
        if kept is not None:
            kept.append(mech)
    return NegativityTrajectory(times=traj.times, values=values, mech_states=kept)
