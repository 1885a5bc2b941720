"""Circuit pipeline: expansion coefficients, dressed couplings, and the
validity conditions."""

import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.constants import e as E_CHARGE, hbar as HBAR

from crosskerr import (
    CircuitParams,
    ConfigError,
    SolverError,
    compute_effective,
    compute_intermediate,
    default_circuit,
    validity,
)

TWO_PI = 2.0 * math.pi


def _oracle_pipeline(params, policy):
    """Recompute the whole chain at 50 significant digits."""
    mpmath.mp.dps = 50
    mpf = mpmath.mpf
    e = mpf(E_CHARGE)
    hbar = mpf(HBAR)

    E_J = mpf(params.E_J)
    E_C = E_J / mpf(params.ratio_EJ_EC)
    delta = mpf(params.delta_ng0)
    b1 = -2 * E_J
    b3 = 4 * E_C * (1 - 2 * delta)
    b = mpmath.sqrt(b1**2 + b3**2)
    z0 = mpmath.sqrt(mpf(params.L) / mpf(params.C))
    g_q = (e**2 * z0 / hbar) * E_J / 4
    if params.g_m_override is not None:
        g_m = mpf(params.g_m_override)
    else:
        f_c = mpf(params.omega_c0) / (2 * mpmath.pi)
        g_m = -80 * E_C * mpf(params.V_g) * mpf(params.C) / (e * f_c)

    g_sc = -g_q * b1 / b
    g_sm = -(b1**2) * g_m**2 / b**3
    g_rp = 2 * b1 * b3 * g_m * g_q / b**3
    g0_ck = 2 * b1 * g_m**2 * g_q * (b**2 - 3 * b3**2) / b**5
    g0_quartic = (
        2 * b1 * g_q * g_m**4 * (-3 * b**4 + 30 * (b * b3) ** 2 - 35 * b3**4) / b**9
    )
    g0_cub = 4 * b1 * b3 * g_m**3 * g_q * (5 * b3**2 - 3 * b**2) / b**7
    g0_2 = 2 * g_m**2 * g_q**2 * (15 * b1**2 * b3**2 - 2 * b**4) / b**7
    g0_4 = (
        g_m**4
        * g_q**2
        * (
            60 * b**2 * b3**2
            + 30 * b**2 * b1**2
            - 6 * b**4
            - 70 * b3**4
            - 420 * b3**2 * b1**2
        )
        / b**9
    )

    w_c0 = mpf(params.omega_c0)
    w_m0 = mpf(params.omega_M0)
    if policy == "self-consistent":
        w_c = mpmath.sqrt(w_c0 * (w_c0 + 4 * g_sc))
        w_m = mpmath.sqrt(w_m0 * (w_m0 + 4 * g_sm))
        r_c = w_c0 / w_c
        r_m = w_m0 / w_m
    else:
        w_c, w_m = w_c0, w_m0
        r_c = r_m = mpf(1)

    return {
        "B1": b1,
        "B3": b3,
        "B": b,
        "g_q": g_q,
        "g_m": g_m,
        "g_Sc": g_sc,
        "g_Sm": g_sm,
        "g_rp": g_rp,
        "omega_c": w_c,
        "omega_M": w_m,
        "g0": 2 * g_rp * r_c * mpmath.sqrt(r_m),
        "g_CK": 4 * g0_ck * r_c * r_m,
        "g_CK_prime": 12 * g0_quartic * r_c * r_m**2,
        "g_cub": 2 * g0_cub * r_c * r_m**1.5,
        "G2": 12 * g0_2 * r_c**2 * r_m,
        "G4": 36 * g0_4 * r_c**2 * r_m**2,
    }


@pytest.mark.parametrize(
    "ratio,delta",
    [(0.25, 0.5), (1 / 20, 0.533), (1 / 30, 0.527), (1 / 12, 0.46), (0.18, 0.553)],
)
def test_pipeline_matches_high_precision_oracle(ratio, delta):
    params = default_circuit(ratio, delta)
    inter = compute_intermediate(params)
    eff = compute_effective(inter, params, frequency_shift_policy="absorbed")
    oracle = _oracle_pipeline(params, "absorbed")
    got = {
        "B1": inter.B1,
        "B3": inter.B3,
        "B": inter.B,
        "g_q": inter.g_q,
        "g_m": inter.g_m,
        "g_Sc": inter.g_Sc,
        "g_Sm": inter.g_Sm,
        "g_rp": inter.g_rp,
        "omega_c": eff.omega_c,
        "omega_M": eff.omega_M,
        "g0": eff.g0,
        "g_CK": eff.g_CK,
        "g_CK_prime": eff.g_CK_prime,
        "g_cub": eff.g_cub,
        "G2": eff.G2,
        "G4": eff.G4,
    }
    for key, val in got.items():
        ref = float(oracle[key])
        scale = max(abs(ref), 1e-30)
        assert abs(val - ref) / scale < 1e-12, key


def test_self_consistent_policy_matches_oracle():
    # a modest g_m keeps the shifted mechanical frequency real
    params = CircuitParams(
        E_J=1e9,
        delta_ng0=0.53,
        ratio_EJ_EC=0.1,
        omega_c0=TWO_PI * 5e9,
        omega_M0=TWO_PI * 10e6,
        g_m_override=-1e7,
    )
    inter = compute_intermediate(params)
    eff = compute_effective(inter, params, frequency_shift_policy="self-consistent")
    oracle = _oracle_pipeline(params, "self-consistent")
    assert eff.omega_M == pytest.approx(float(oracle["omega_M"]), rel=1e-12)
    assert eff.g0 == pytest.approx(float(oracle["g0"]), rel=1e-12)
    assert eff.g_CK == pytest.approx(float(oracle["g_CK"]), rel=1e-12)


def test_self_consistent_policy_rejects_imaginary_frequency():
    params = default_circuit(0.25, 0.5)
    inter = compute_intermediate(params)
    with pytest.raises(SolverError):
        compute_effective(inter, params, frequency_shift_policy="self-consistent")


def test_unknown_policy_rejected():
    params = default_circuit(0.25, 0.5)
    inter = compute_intermediate(params)
    with pytest.raises(ConfigError):
        compute_effective(inter, params, frequency_shift_policy="bogus")


def test_degeneracy_point_kills_linear_coupling():
    params = default_circuit(0.25, 0.5)
    inter = compute_intermediate(params)
    eff = compute_effective(inter, params, frequency_shift_policy="absorbed")
    assert inter.B3 == 0.0
    assert eff.g0 == 0.0
    assert eff.g_cub == 0.0


def test_reference_point_quarter_ratio():
    params = default_circuit(0.25, 0.5)
    eff = compute_effective(
        compute_intermediate(params), params, frequency_shift_policy="absorbed"
    )
    assert eff.g_CK == pytest.approx(-2.7e6, rel=0.15)
    assert eff.g_CK_prime == pytest.approx(0.2e6, rel=0.15)


def test_reference_point_one_twentieth():
    params = default_circuit(1 / 20, 0.533)
    eff = compute_effective(
        compute_intermediate(params), params, frequency_shift_policy="absorbed"
    )
    assert eff.g0 == pytest.approx(-9.0e6, rel=0.2)
    assert eff.g_CK == pytest.approx(5.4e6, rel=0.2)
    assert eff.g_CK_prime == pytest.approx(0.9e6, rel=0.2)


def test_charging_energy_dual_route_agreement():
    # derive E_C from capacitances, then feed back a consistent ratio
    params = CircuitParams(
        E_J=1e10,
        delta_ng0=0.52,
        C_sum=40e-15,
        C_g0=10e-15,
        omega_c0=TWO_PI * 5e9,
    )
    inter = compute_intermediate(params)
    expected = E_CHARGE**2 / (2.0 * HBAR * 50e-15)
    assert inter.E_C == pytest.approx(expected, rel=1e-12)

    both = CircuitParams(
        E_J=1e10,
        delta_ng0=0.52,
        ratio_EJ_EC=1e10 / expected,
        C_sum=40e-15,
        C_g0=10e-15,
        omega_c0=TWO_PI * 5e9,
    )
    assert compute_intermediate(both).E_C == pytest.approx(expected, rel=1e-6)


def test_charging_energy_dual_route_mismatch_rejected():
    params = CircuitParams(
        E_J=1e10,
        delta_ng0=0.52,
        ratio_EJ_EC=0.05,
        C_sum=40e-15,
        C_g0=10e-15,
        omega_c0=TWO_PI * 5e9,
    )
    with pytest.raises(ConfigError):
        compute_intermediate(params)


def test_parameter_validation():
    with pytest.raises(ConfigError):
        CircuitParams(E_J=-1.0, delta_ng0=0.5, ratio_EJ_EC=0.1)
    with pytest.raises(ConfigError):
        CircuitParams(E_J=1e10, delta_ng0=1.2, ratio_EJ_EC=0.1)
    with pytest.raises(ConfigError):
        CircuitParams(E_J=1e10, delta_ng0=0.5)  # no charging-energy route
    with pytest.raises(ConfigError):
        CircuitParams(E_J=1e10, delta_ng0=0.5, ratio_EJ_EC=0.1, phi_a=0.3)


@settings(max_examples=25, deadline=None)
@given(
    ratio=st.floats(0.02, 0.3),
    delta=st.floats(0.4, 0.6),
    e_j=st.floats(1e9, 3e10),
)
def test_field_magnitude_identity(ratio, delta, e_j):
    params = CircuitParams(
        E_J=e_j,
        delta_ng0=delta,
        ratio_EJ_EC=ratio,
        omega_c0=TWO_PI * 5e9,
        omega_M0=TWO_PI * 10e6,
    )
    inter = compute_intermediate(params)
    assert inter.B == pytest.approx(math.hypot(inter.B1, inter.B3), rel=1e-14)
    assert inter.B1 == pytest.approx(-2.0 * e_j, rel=1e-14)
    # the qubit-induced cavity shift has the sign of -B1
    assert inter.g_Sc > 0.0
    # the mechanically induced softening is never positive
    assert inter.g_Sm <= 0.0


@settings(max_examples=25, deadline=None)
@given(delta=st.floats(0.401, 0.599))
def test_gate_charge_mirror_symmetry(delta):
    """B3 is odd about the degeneracy point, so even-power couplings
    match between delta and 1 - delta while odd-power ones flip."""
    p_lo = default_circuit(1 / 20, delta)
    p_hi = default_circuit(1 / 20, 1.0 - delta)
    lo = compute_effective(compute_intermediate(p_lo), p_lo, frequency_shift_policy="absorbed")
    hi = compute_effective(compute_intermediate(p_hi), p_hi, frequency_shift_policy="absorbed")
    assert lo.g_CK == pytest.approx(hi.g_CK, rel=1e-10)
    assert lo.g_CK_prime == pytest.approx(hi.g_CK_prime, rel=1e-10)
    assert lo.g0 == pytest.approx(-hi.g0, rel=1e-10, abs=1e-20)


def test_peak_couplings_grow_as_ratio_shrinks():
    deltas = np.linspace(0.46, 0.54, 81)
    peaks = []
    for ratio in (1 / 10, 1 / 20, 1 / 30):
        best = [0.0, 0.0, 0.0]
        for d in deltas:
            p = default_circuit(ratio, float(d))
            eff = compute_effective(
                compute_intermediate(p), p, frequency_shift_policy="absorbed"
            )
            best[0] = max(best[0], abs(eff.g0))
            best[1] = max(best[1], abs(eff.g_CK))
            best[2] = max(best[2], abs(eff.g_CK_prime))
        peaks.append(best)
    for i in range(3):
        assert peaks[0][i] < peaks[1][i] < peaks[2][i]


def test_coupling_sums():
    params = default_circuit(1 / 20, 0.533)
    eff = compute_effective(
        compute_intermediate(params), params, frequency_shift_policy="absorbed"
    )
    assert eff.gbar_CK == pytest.approx(eff.g_CK + eff.g_CK_prime, rel=1e-15)
    assert eff.gtilde_CK == pytest.approx(eff.g_CK + 2.0 * eff.g_CK_prime, rel=1e-15)
    changed = eff.replace(g_CK_prime=0.0)
    assert changed.gbar_CK == changed.g_CK
    assert changed.g0 == eff.g0


def test_validity_window_structure():
    """At the 0.15 bar the 1/20 device is valid on the flanks of the
    degeneracy point and invalid in the inner band."""

    def ok(delta):
        p = default_circuit(1 / 20, delta)
        inter = compute_intermediate(p)
        eff = compute_effective(inter, p, frequency_shift_policy="absorbed")
        return validity(inter, eff, threshold=0.15, params=p).all_ok

    assert ok(0.45)
    assert ok(0.533)
    assert ok(0.56)
    assert not ok(0.475)
    assert not ok(0.5)
    assert not ok(0.52)


def test_validity_report_contents():
    p = default_circuit(1 / 20, 0.533)
    inter = compute_intermediate(p)
    eff = compute_effective(inter, p, frequency_shift_policy="absorbed")
    rep = validity(inter, eff, threshold=0.15, params=p)
    assert rep.rwa_ratio == pytest.approx(0.145, abs=0.01)
    assert rep.rwa_ok and rep.truncation_ok and all(rep.polaron_ok)
    assert rep.dispersive_ok
    assert rep.all_ok


def test_dispersive_flag_reported_but_not_gating():
    """At the quarter-ratio working point the charge gap is smaller
    than the cavity frequency, so the dispersive report fails, yet the
    gate flag only tracks the other conditions."""
    p = default_circuit(0.25, 0.5)
    inter = compute_intermediate(p)
    eff = compute_effective(inter, p, frequency_shift_policy="absorbed")
    rep = validity(inter, eff, threshold=0.15, params=p)
    assert not rep.dispersive_ok
    assert rep.dispersive_ratio == pytest.approx(math.pi / 2, rel=1e-12)
    assert rep.all_ok
