"""Circuit parameters to effective optomechanical couplings.

A single-Cooper-pair transistor couples a microwave LC resonator to a
micromechanical oscillator.  With the transistor held in its ground
state, expanding its energy in the two oscillator displacements and
applying a Bogoliubov rotation to each mode leaves an effective
two-mode Hamiltonian

    H = w_c n_a + w_M n_b + g0 n_a (b + b^dag)
        + gbar_CK n_a n_b + g'_CK n_a n_b^2

whose couplings are set by the Josephson energy, the charging energy,
and the gate-charge deviation delta_ng0.  This module evaluates the
expansion coefficients, the Bogoliubov-dressed couplings, and the
validity conditions under which the truncation of the expansion is
trustworthy.

All energies and rates are stored as angular frequencies in rad/s.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from scipy.constants import e as E_CHARGE, hbar as HBAR

from .errors import ConfigError

__all__ = [
    "CircuitParams",
    "IntermediateCouplings",
    "EffectiveCouplings",
    "ValidityReport",
    "compute_intermediate",
    "compute_effective",
    "validity",
]


@dataclass(frozen=True)
class CircuitParams:
    """Raw circuit inputs.

    Parameters
    ----------
    E_J : float
        Josephson energy over hbar, rad/s.
    delta_ng0 : float
        Gate-charge deviation from integer filling, dimensionless,
        strictly inside (0, 1).  The charge degeneracy point is 0.5.
    ratio_EJ_EC : float, optional
        E_J / E_C.  Preferred way to fix the charging energy.
    V_g : float
        Gate voltage in volts.
    C : float
        Resonator capacitance in farads.
    C_g0 : float, optional
        Gate capacitance in farads.  Together with ``C_sum`` it gives an
        alternative route to E_C = e^2 / (2 hbar (C_sum + C_g0)).
    C_sum : float, optional
        Total junction capacitance C_1 + C_2 in farads.
    L : float
        Resonator inductance in henries.
    omega_c0 : float, optional
        Bare cavity frequency in rad/s.  Defaults to 1/sqrt(L C).
    omega_M0 : float
        Bare mechanical frequency in rad/s.
    phi_a : float
        External phase bias.  Only the symmetric zero-phase working
        point is modeled; nonzero values are rejected.
    g_m_override : float, optional
        Direct value for the mechanical coupling g_m in rad/s,
        bypassing the simplified gate-geometry estimate.
    """

    E_J: float
    delta_ng0: float
    ratio_EJ_EC: float | None = None
    V_g: float = 9.45
    C: float = 50e-15
    C_g0: float | None = None
    C_sum: float | None = None
    L: float = 2.085e-10
    omega_c0: float | None = None
    omega_M0: float = 2 * math.pi * 10e6
    phi_a: float = 0.0
    g_m_override: float | None = None

    def __post_init__(self) -> None:
        if self.E_J <= 0:
            raise ConfigError("E_J must be positive")
        if not 0.0 < self.delta_ng0 < 1.0:
            raise ConfigError(
                f"delta_ng0 must lie strictly inside (0, 1), got {self.delta_ng0}"
            )
        if self.phi_a != 0.0:
            raise ConfigError("only the zero-phase bias phi_a = 0 is supported")
        for name in ("V_g", "C", "L", "omega_M0"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive")
        for name in ("ratio_EJ_EC", "C_g0", "C_sum", "omega_c0"):
            value = getattr(self, name)
            if value is not None and value <= 0:
                raise ConfigError(f"{name} must be positive when given")
        if self.ratio_EJ_EC is None and (self.C_g0 is None or self.C_sum is None):
            raise ConfigError(
                "charging energy unspecified: give ratio_EJ_EC or both C_g0 and C_sum"
            )

    @property
    def bare_cavity_frequency(self) -> float:
        """omega_c0, defaulting to the LC value 1/sqrt(L C)."""
        if self.omega_c0 is not None:
            return self.omega_c0
        return 1.0 / math.sqrt(self.L * self.C)


@dataclass(frozen=True)
class IntermediateCouplings:
    """Expansion coefficients of the transistor ground-state energy.

    B1 and B3 parameterize the two-level charge Hamiltonian; the g and
    G coefficients multiply x_c^2 x_m^p and x_c^4 x_m^p respectively in
    the quartic expansion.  All values in rad/s.
    """

    E_C: float
    B1: float
    B3: float
    B: float
    Z0: float
    g_m: float
    g_q: float
    alpha_m: float
    g_Sc: float
    g_Sm: float
    g_rp: float
    g0_CK: float
    g0_cub: float
    g0_quartic: float
    G0_1: float
    G0_2: float
    G0_3: float
    G0_4: float


@dataclass(frozen=True)
class EffectiveCouplings:
    """Couplings of the effective two-mode Hamiltonian, rad/s.

    ``gbar_CK`` and ``gtilde_CK`` are the combinations g_CK + g_CK_prime
    and g_CK + 2 g_CK_prime that appear in the number-basis and
    linearized forms of the Hamiltonian.
    """

    omega_c: float
    omega_M: float
    g0: float
    g_CK: float
    g_CK_prime: float
    g_cub: float
    G2: float
    G4: float
    gbar_CK: float = field(init=False)
    gtilde_CK: float = field(init=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "gbar_CK", self.g_CK + self.g_CK_prime)
        object.__setattr__(self, "gtilde_CK", self.g_CK + 2.0 * self.g_CK_prime)

    def replace(self, **changes) -> "EffectiveCouplings":
        """Return a copy with the given fields replaced."""
        fields = {
            "omega_c": self.omega_c,
            "omega_M": self.omega_M,
            "g0": self.g0,
            "g_CK": self.g_CK,
            "g_CK_prime": self.g_CK_prime,
            "g_cub": self.g_cub,
            "G2": self.G2,
            "G4": self.G4,
        }
        fields.update(changes)
        return EffectiveCouplings(**fields)


@dataclass(frozen=True)
class ValidityReport:
    """Outcome of every validity condition, with worst-case ratios.

    The report is informational: it never mutates couplings, and
    downstream code decides whether a failed flag blocks a run.

    Attributes
    ----------
    rwa_ok : bool
        Rotating-wave condition: each of the seven expansion
        coefficients {g0_CK, g0_cub, g0_quartic, G0_1..G0_4} is small
        against min(|g0|, omega_M), or against omega_M alone when
        g0 = 0.
    truncation_ok : bool
        Two-photon terms G2, G4 small against the smallest nonzero
        coupling among |g0|, |g_CK|, |g_CK_prime|.
    polaron_ok : tuple of bool
        |f(n)| < 1 for n = 1..n_max, where f(n) is the conditional
        mechanical displacement -g0 n / (omega_M + n gbar_CK).
    dispersive_ok : bool
        Bare mode frequencies small against the charge-qubit gap B.
        Reported for completeness; it is the loosest condition of the
        derivation and is not used as a run gate.
    """

    rwa_ok: bool
    rwa_ratio: float
    truncation_ok: bool
    truncation_ratio: float
    polaron_ok: tuple[bool, ...]
    polaron_ratio: float
    dispersive_ok: bool
    dispersive_ratio: float
    threshold: float

    @property
    def all_ok(self) -> bool:
        """Gate flag: every condition except the dispersive report."""
        return self.rwa_ok and self.truncation_ok and all(self.polaron_ok)


def _charging_energy(params: CircuitParams) -> float:
    """Resolve E_C in rad/s from the ratio and/or the capacitances."""
    from_ratio = None
    from_caps = None
    if params.ratio_EJ_EC is not None:
        from_ratio = params.E_J / params.ratio_EJ_EC
    if params.C_g0 is not None and params.C_sum is not None:
        from_caps = E_CHARGE**2 / (2.0 * (params.C_sum + params.C_g0) * HBAR)
    if from_ratio is not None and from_caps is not None:
        mismatch = abs(from_ratio - from_caps) / from_ratio
        if mismatch > 0.01:
            raise ConfigError(
                "inconsistent charging energy: ratio_EJ_EC gives "
                f"{from_ratio:.4e} rad/s but the capacitances give "
                f"{from_caps:.4e} rad/s ({mismatch:.1%} apart)"
            )
        return from_ratio
    return from_ratio if from_ratio is not None else from_caps


def compute_intermediate(params: CircuitParams) -> IntermediateCouplings:
    """Evaluate the quartic-expansion coefficients.

    Parameters
    ----------
    params : CircuitParams

    Returns
    -------
    IntermediateCouplings

    Notes
    -----
    With the transistor in its ground state the charge-branch energy is
    -B/2 (1 + x)^(1/2) with B = sqrt(B1^2 + B3^2); expanding to fourth
    order in the two displacements produces the coefficient set below.
    B1 enters the expansion through the ground branch and therefore
    carries a negative sign, B1 = -2 E_J, which fixes the signs of all
    odd-power coefficients.  B3 = 4 E_C (1 - 2 delta_ng0) vanishes at
    charge degeneracy and with it every coefficient odd in the
    mechanical displacement.

    The mechanical coupling uses the simplified gate-geometry estimate
    g_m = -80 E_C V_g C / (e f_c) with f_c the cavity frequency in Hz;
    pass ``g_m_override`` to bypass it.
    """
    E_C = _charging_energy(params)
    B1 = -2.0 * params.E_J
    B3 = 4.0 * E_C * (1.0 - 2.0 * params.delta_ng0)
    B = math.hypot(B1, B3)
    Z0 = math.sqrt(params.L / params.C)
    g_q = (E_CHARGE**2 * Z0 / HBAR) * params.E_J / 4.0
    if params.g_m_override is not None:
        g_m = params.g_m_override
    else:
        f_c = params.bare_cavity_frequency / (2.0 * math.pi)
        g_m = -80.0 * E_C * params.V_g * params.C / (E_CHARGE * f_c)

    alpha_m = -B3 * g_m / B
    g_Sc = -g_q * B1 / B
    g_Sm = -(B1**2) * g_m**2 / B**3
    g_rp = 2.0 * B1 * B3 * g_m * g_q / B**3
    g0_CK = 2.0 * B1 * g_m**2 * g_q * (B**2 - 3.0 * B3**2) / B**5
    g0_cub = 4.0 * B1 * B3 * g_m**3 * g_q * (5.0 * B3**2 - 3.0 * B**2) / B**7
    g0_quartic = (
        2.0 * B1 * g_q * g_m**4 * (-3.0 * B**4 + 30.0 * (B * B3) ** 2 - 35.0 * B3**4) / B**9
    )
    G0_1 = 2.0 * B3 * g_m * g_q**2 * (B**2 - 3.0 * B3**2) / B**5
    G0_2 = 2.0 * g_m**2 * g_q**2 * (15.0 * B1**2 * B3**2 - 2.0 * B**4) / B**7
    G0_3 = (
        4.0
        * g_m**2
        * g_q**2
        * B3
        * (5.0 * B**2 * B3**2 + 15.0 * B1**2 * B**2 - 3.0 * B**4 - 35.0 * B3**2 * B1**2)
        / B**9
    )
    G0_4 = (
        g_m**4
        * g_q**2
        * (
            60.0 * B**2 * B3**2
            + 30.0 * B**2 * B1**2
            - 6.0 * B**4
            - 70.0 * B3**4
            - 420.0 * B3**2 * B1**2
        )
        / B**9
    )

    return IntermediateCouplings(
        E_C=E_C,
        B1=B1,
        B3=B3,
        B=B,
        Z0=Z0,
        g_m=g_m,
        g_q=g_q,
        alpha_m=alpha_m,
        g_Sc=g_Sc,
        g_Sm=g_Sm,
        g_rp=g_rp,
        g0_CK=g0_CK,
        g0_cub=g0_cub,
        g0_quartic=g0_quartic,
        G0_1=G0_1,
        G0_2=G0_2,
        G0_3=G0_3,
        G0_4=G0_4,
    )


def compute_effective(
    inter: IntermediateCouplings,
    params: CircuitParams,
    frequency_shift_policy: str = "self-consistent",
) -> EffectiveCouplings:
    """Dress the expansion coefficients into the effective couplings.

    Parameters
    ----------
    inter : IntermediateCouplings
    params : CircuitParams
    frequency_shift_policy : {"self-consistent", "absorbed"}
        "self-consistent" applies the quadratic-term frequency shifts
        and rescales every coupling by the bare-to-shifted frequency
        ratios.  "absorbed" treats the quoted frequencies as already
        dressed: no shift, all ratios one.  Working points quoted at
        measured mode frequencies want the latter.

    Returns
    -------
    EffectiveCouplings

    Raises
    ------
    SolverError
        If a shifted frequency would be imaginary, which signals a
        parametric instability of the quadratic model.
    """
    from .errors import SolverError

    w_c0 = params.bare_cavity_frequency
    w_m0 = params.omega_M0
    if frequency_shift_policy == "self-consistent":
        arg_c = w_c0 * (w_c0 + 4.0 * inter.g_Sc)
        arg_m = w_m0 * (w_m0 + 4.0 * inter.g_Sm)
        if arg_c <= 0 or arg_m <= 0:
            raise SolverError(
                "imaginary Bogoliubov-shifted frequency: "
                f"omega_c0 (omega_c0 + 4 g_Sc) = {arg_c:.3e}, "
                f"omega_M0 (omega_M0 + 4 g_Sm) = {arg_m:.3e}"
            )
        omega_c = math.sqrt(arg_c)
        omega_M = math.sqrt(arg_m)
        r_c = w_c0 / omega_c
        r_m = w_m0 / omega_M
    elif frequency_shift_policy == "absorbed":
        omega_c = w_c0
        omega_M = w_m0
        r_c = 1.0
        r_m = 1.0
    else:
        raise ConfigError(
            f"unknown frequency_shift_policy {frequency_shift_policy!r}"
        )

    return EffectiveCouplings(
        omega_c=omega_c,
        omega_M=omega_M,
        g0=2.0 * inter.g_rp * r_c * r_m**0.5,
        g_CK=4.0 * inter.g0_CK * r_c * r_m,
        g_CK_prime=12.0 * inter.g0_quartic * r_c * r_m**2,
        g_cub=2.0 * inter.g0_cub * r_c * r_m**1.5,
        G2=12.0 * inter.G0_2 * r_c**2 * r_m,
        G4=36.0 * inter.G0_4 * r_c**2 * r_m**2,
    )


def validity(
    inter: IntermediateCouplings,
    eff: EffectiveCouplings,
    n_max: int = 3,
    threshold: float = 0.1,
    params: CircuitParams | None = None,
) -> ValidityReport:
    """Evaluate every validity condition of the effective model.

    Parameters
    ----------
    inter, eff : couplings as returned by the compute functions.
    n_max : int
        Highest photon number for the polaron displacement check.
    threshold : float
        The single smallness bar applied to the rotating-wave and
        truncation ratios.
    params : CircuitParams, optional
        Needed only for the dispersive ratio; when absent that flag is
        computed from the dressed frequencies instead.

    Returns
    -------
    ValidityReport
    """
    coeffs = (
        inter.g0_CK,
        inter.g0_cub,
        inter.g0_quartic,
        inter.G0_1,
        inter.G0_2,
        inter.G0_3,
        inter.G0_4,
    )
    if eff.g0 == 0.0:
        rwa_scale = eff.omega_M
    else:
        rwa_scale = min(abs(eff.g0), eff.omega_M)
    rwa_ratio = max(abs(c) for c in coeffs) / rwa_scale
    rwa_ok = rwa_ratio < threshold

    denominators = [abs(g) for g in (eff.g0, eff.g_CK, eff.g_CK_prime) if g != 0.0]
    if denominators:
        truncation_ratio = max(abs(eff.G2), abs(eff.G4)) / min(denominators)
    else:
        truncation_ratio = math.inf
    truncation_ok = truncation_ratio < threshold

    polaron_flags = []
    worst_f = 0.0
    for n in range(1, n_max + 1):
        f_n = -eff.g0 * n / (eff.omega_M + n * eff.gbar_CK)
        worst_f = max(worst_f, abs(f_n))
        polaron_flags.append(abs(f_n) < 1.0)

    if params is not None:
        w_ref = max(params.bare_cavity_frequency, params.omega_M0)
    else:
        w_ref = max(eff.omega_c, eff.omega_M)
    dispersive_ratio = w_ref / inter.B
    dispersive_ok = dispersive_ratio < 1.0

    return ValidityReport(
        rwa_ok=rwa_ok,
        rwa_ratio=rwa_ratio,
        truncation_ok=truncation_ok,
        truncation_ratio=truncation_ratio,
        polaron_ok=tuple(polaron_flags),
        polaron_ratio=worst_f,
        dispersive_ok=dispersive_ok,
        dispersive_ratio=dispersive_ratio,
        threshold=threshold,
    )
