"""Polaron-frame spectrum, displacement overlaps, and perturbative
photon correlations for the weakly driven cavity.

After a photon-number dependent displacement of the mechanics, the
undriven Hamiltonian is diagonal on dressed states |n, m~(n)> with

    E_{n,m} = n omega_c + (omega_M + n gbar) m
              - (g0 n)^2 / (omega_M + n gbar) + n gprime m^2

where gbar = g_CK + g_CK' is the shift of the mechanical frequency per
photon and gprime = g_CK' the phonon-number curvature.  For a drive at
detuning Delta_c the same expression with omega_c -> Delta_c gives the
rotating-frame energies used in the correlation formulas.

Transition amplitudes between displaced phonon ladders are ordinary
displacement-operator matrix elements (associated Laguerre form),
evaluated here in log space so that large index differences stay
finite.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import eval_genlaguerre, gammaln

from .circuit import EffectiveCouplings
from .errors import ConfigError
from .lindblad import DriveAndBath

__all__ = [
    "PolaronSpectrum",
    "franck_condon",
    "photon_probabilities",
    "PhotonProbabilities",
    "g2_perturbative",
    "g3_perturbative",
    "g2_closed_form",
    "g3_closed_form",
]


@dataclass(frozen=True)
class PolaronSpectrum:
    """Dressed-state energies and displacements for a coupling set.

    All methods take the photon index n and (where relevant) the phonon
    index m of the dressed ladder.
    """

    eff: EffectiveCouplings

    def _omega_n(self, n: int) -> float:
        w = self.eff.omega_M + n * self.eff.gbar_CK
        if w <= 0:
            raise ConfigError(
                f"mechanical frequency dressed by {n} photons is nonpositive"
            )
        return w

    def displacement(self, n: int) -> float:
        """Dimensionless displacement f(n) = -g0 n / (omega_M + n gbar)."""
        if n == 0:
            return 0.0
        return -self.eff.g0 * n / self._omega_n(n)

    def polaron_shift(self, n: int) -> float:
        """Energy lowering (g0 n)^2 / (omega_M + n gbar)."""
        return (self.eff.g0 * n) ** 2 / self._omega_n(n)

    def mech_frequency(self, n: int) -> float:
        """Phonon spacing at fixed n including the curvature term,
        omega_M + n (gbar + gprime)."""
        return self.eff.omega_M + n * (self.eff.gbar_CK + self.eff.g_CK_prime)

    def energy(self, n: int, m: int, omega_c: float | None = None) -> float:
        """Lab-frame dressed energy E_{n,m}; pass omega_c=Delta_c for
        the rotating frame."""
        wc = self.eff.omega_c if omega_c is None else omega_c
        wn = self._omega_n(n)
        return (
            n * wc
            + wn * m
            - self.polaron_shift(n)
            + n * self.eff.g_CK_prime * m**2
        )

    def rotating_energy(self, n: int, m: int, Delta_c: float) -> float:
        return self.energy(n, m, omega_c=Delta_c)


def franck_condon(m: int, m_prime: int, x: float) -> float:
    """Overlap <m, shifted by x | m'> between displaced Fock ladders.

    Matrix element of the displacement operator with real argument x,

        <m|D(x)|m'> for m <= m':
            sqrt(m!/m'!) e^{-x^2/2} (-x)^{m'-m} L_m^{(m'-m)}(x^2)

    and the transpose relation with (+x) for m > m'.  The factorial
    ratio is taken through log-gamma so that overlaps between far
    ladder rungs underflow gracefully instead of overflowing.
    """
    if m < 0 or m_prime < 0:
        raise ConfigError("ladder indices must be nonnegative")
    if m <= m_prime:
        lo, hi, sgn = m, m_prime, -x
    else:
        lo, hi, sgn = m_prime, m, x
    diff = hi - lo
    log_amp = 0.5 * (gammaln(lo + 1) - gammaln(hi + 1)) - x * x / 2.0
    poly = eval_genlaguerre(lo, diff, x * x)
    return math.exp(log_amp) * sgn**diff * poly


@dataclass(frozen=True)
class PhotonProbabilities:
    """Weak-drive occupation probabilities with truncation bookkeeping.

    ``remainder`` estimates the phonon-sum weight beyond l_max from the
    last retained term of the single-photon amplitude series.
    """

    P1: float
    P2: float
    P3: float
    l_max: int
    remainder: float


def _rotating_energies(
    spec: PolaronSpectrum, Delta_c: float, n: int, l_max: int
) -> np.ndarray:
    return np.array(
        [spec.rotating_energy(n, m, Delta_c) for m in range(l_max + 1)]
    )


def photon_probabilities(
    eff: EffectiveCouplings, bath: DriveAndBath, l_max: int = 20
) -> PhotonProbabilities:
    """Steady-state P1, P2, P3 to leading order in the drive.

    Second-order perturbation theory in Omega on the dressed ladder:
    each photon manifold n decays at n kappa / 2, and the phonon sums
    run over the displaced ladders with displacement differences
    f(n) - f(n-1).

    Emits a warning when Omega / kappa > 0.3, where the perturbative
    ordering starts to degrade.
    """
    if l_max < 1:
        raise ConfigError("l_max must be at least 1")
    omega = bath.drive_amplitude()
    kappa = bath.kappa
    if kappa > 0 and omega / kappa > 0.3:
        warnings.warn(
            "drive exceeds 0.3 kappa; perturbative probabilities degrade",
            stacklevel=2,
        )
    spec = PolaronSpectrum(eff)
    dc = bath.Delta_c

    f1 = spec.displacement(1)
    f2 = spec.displacement(2)
    f3 = spec.displacement(3)

    ms = range(l_max + 1)
    e1 = _rotating_energies(spec, dc, 1, l_max) - 0.5j * kappa
    e2 = _rotating_energies(spec, dc, 2, l_max) - 1.0j * kappa
    e3 = _rotating_energies(spec, dc, 3, l_max) - 1.5j * kappa

    fc10 = np.array([franck_condon(m, 0, f1) for m in ms])
    a1 = fc10 / e1
    p1 = omega**2 * float(np.sum(np.abs(a1) ** 2))
    remainder = float(np.abs(a1[-1]) ** 2 * (l_max + 1))

    fc21 = np.array([[franck_condon(m, l, f2 - f1) for l in ms] for m in ms])
    c2 = math.sqrt(2.0) * omega**2 * (fc21 @ a1) / e2
    p2 = float(np.sum(np.abs(c2) ** 2))

    fc32 = np.array([[franck_condon(m, l, f3 - f2) for l in ms] for m in ms])
    c3 = math.sqrt(6.0) * omega**3 * (fc32 @ (fc21 @ a1 / e2)) / e3
    p3 = float(np.sum(np.abs(c3) ** 2))

    return PhotonProbabilities(
        P1=p1, P2=p2, P3=p3, l_max=l_max, remainder=remainder
    )


def g2_perturbative(
    eff: EffectiveCouplings, bath: DriveAndBath, l_max: int = 20
) -> float:
    """g2(0) = 2 P2 / P1^2 from the weak-drive probabilities."""
    p = photon_probabilities(eff, bath, l_max)
    if p.P1 < 1e-300:
        raise ConfigError("single-photon probability underflows; g2 undefined")
    return 2.0 * p.P2 / p.P1**2


def g3_perturbative(
    eff: EffectiveCouplings, bath: DriveAndBath, l_max: int = 20
) -> float:
    """g3(0) = 6 P3 / P1^3 from the weak-drive probabilities."""
    p = photon_probabilities(eff, bath, l_max)
    if p.P1 < 1e-300:
        raise ConfigError("single-photon probability underflows; g3 undefined")
    return 6.0 * p.P3 / p.P1**3


def g2_closed_form(eff: EffectiveCouplings, bath: DriveAndBath) -> float:
    """Resonance-dominated g2(0) keeping only the m = 0 dressed levels.

    g2 = [4 (Delta_c - d1)^2 + kappa^2] / [(2 Delta_c - d2)^2 + kappa^2]

    with d_n the full polaron shift of the n-photon manifold.  Valid
    away from phonon-sideband resonances, where the displacement
    overlap concentrates on m = 0.
    """
    spec = PolaronSpectrum(eff)
    d1 = spec.polaron_shift(1)
    d2 = spec.polaron_shift(2)
    dc = bath.Delta_c
    k = bath.kappa
    return (4.0 * (dc - d1) ** 2 + k**2) / ((2.0 * dc - d2) ** 2 + k**2)


def g3_closed_form(eff: EffectiveCouplings, bath: DriveAndBath) -> float:
    """Resonance-dominated g3(0) keeping only the m = 0 dressed levels.

    g3 = 36 |E1 - i kappa/2|^4 / (|E2 - i kappa|^2 |E3 - i 3 kappa/2|^2)

    with E_n the rotating-frame energy of |n, m=0>.  For a linear
    cavity (all nonlinear couplings zero) this is exactly 1 at every
    detuning, which is the calibration used in the tests.
    """
    spec = PolaronSpectrum(eff)
    dc = bath.Delta_c
    k = bath.kappa
    e1 = spec.rotating_energy(1, 0, dc) - 0.5j * k
    e2 = spec.rotating_energy(2, 0, dc) - 1.0j * k
    e3 = spec.rotating_energy(3, 0, dc) - 1.5j * k
    return 36.0 * abs(e1) ** 4 / (abs(e2) ** 2 * abs(e3) ** 2)
