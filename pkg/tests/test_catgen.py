"""Cat preparation, Wigner maps, and negativity bookkeeping."""

import math

import numpy as np
import pytest
import scipy.linalg

from crosskerr import (
    CatSpec,
    ConfigError,
    DriveAndBath,
    EffectiveCouplings,
    TruncationError,
    WignerGrid,
    cat_state,
    coherent,
    evolve_closed,
    negativity_trajectory,
    state_fidelity,
    wigner,
    wigner_negativity,
)

TWO_PI = 2.0 * math.pi

CAT_EFF = EffectiveCouplings(
    omega_c=TWO_PI * 5e9,
    omega_M=TWO_PI * 10e6,
    g0=0.0,
    g_CK=-2.7e6,
    g_CK_prime=0.2e6,
    g_cub=0.0,
    G2=0.0,
    G4=0.0,
)


def test_coherent_state_basics():
    vec = coherent(0.0, 8)
    assert vec[0] == 1.0 and np.linalg.norm(vec) == pytest.approx(1.0)
    xi = 1.3 - 0.4j
    vec = coherent(xi, 40)
    assert np.linalg.norm(vec) == pytest.approx(1.0, abs=1e-12)
    m = np.arange(40)
    assert float(np.abs(vec) ** 2 @ m) == pytest.approx(abs(xi) ** 2, rel=1e-10)
    # annihilation eigenstate property b|xi> = xi |xi>
    lowered = np.sqrt(m[1:]) * vec[1:]
    assert np.allclose(lowered, xi * vec[:-1], atol=1e-12)
    with pytest.raises(TruncationError):
        coherent(4.0, 20)
    with pytest.raises(ConfigError):
        coherent(1.0, 0)


def test_cat_spec_validation_and_timing():
    spec = CatSpec(k=2, n_photons=1, xi=4.0)
    assert spec.tau(CAT_EFF) == pytest.approx(math.pi / (2 * 0.2e6), rel=1e-12)
    with pytest.raises(ConfigError):
        CatSpec(k=5, n_photons=1, xi=4.0)
    with pytest.raises(ConfigError):
        CatSpec(k=2, n_photons=0, xi=4.0)
    flipped = CAT_EFF.replace(g_CK_prime=-0.2e6)
    with pytest.raises(ConfigError):
        spec.tau(flipped)


def test_evolve_closed_requires_zero_linear_coupling():
    eff = CAT_EFF.replace(g0=-1e5)
    with pytest.raises(ConfigError):
        evolve_closed(eff, 1, 2.0, 1e-6, 30)


def test_revival_matches_analytic_cat():
    n_m = 60
    for k in (2, 3, 4):
        spec = CatSpec(k=k, n_photons=1, xi=4.0)
        tau = spec.tau(CAT_EFF)
        evolved = evolve_closed(CAT_EFF, 1, 4.0, tau, n_m)
        target = cat_state(spec, CAT_EFF, n_m)
        assert state_fidelity(evolved, target) == pytest.approx(1.0, abs=1e-10)


def test_half_revival_of_two_lobe_cat_is_coherent():
    # at 2 tau the quadratic phase is e^{-i pi m^2} = (-1)^m: the state
    # is again coherent, with its label flipped and rotated
    spec = CatSpec(k=2, n_photons=1, xi=3.0)
    tau = spec.tau(CAT_EFF)
    evolved = evolve_closed(CAT_EFF, 1, 3.0, 2.0 * tau, 50)
    rotation = np.exp(-1j * 2.0 * tau * (CAT_EFF.omega_M + CAT_EFF.gbar_CK))
    assert state_fidelity(evolved, coherent(-3.0 * rotation, 50)) == pytest.approx(
        1.0, abs=1e-10
    )


def test_wigner_normalization_and_convention():
    grid = WignerGrid(-6, 6, -6, 6, 201)
    vacuum = coherent(0.0, 10)
    w = wigner(vacuum, grid)
    assert w.sum() * grid.cell_area == pytest.approx(1.0, abs=1e-6)
    center = np.unravel_index(np.argmax(w), w.shape)
    assert w[center] == pytest.approx(1.0 / math.pi, rel=1e-6)
    # displaced state peaks at (x, p) = sqrt(2) (Re xi, Im xi)
    xi = 1.0 + 0.5j
    w2 = wigner(coherent(xi, 40), grid)
    ix, ip = np.unravel_index(np.argmax(w2), w2.shape)
    dx = grid.xs[1] - grid.xs[0]
    assert grid.xs[ix] == pytest.approx(math.sqrt(2.0) * xi.real, abs=dx)
    assert grid.ps[ip] == pytest.approx(math.sqrt(2.0) * xi.imag, abs=dx)


def test_wigner_matches_displaced_parity_oracle():
    rng = np.random.default_rng(11)
    n_lvl, pad = 12, 80
    x = rng.normal(size=(n_lvl, n_lvl)) + 1j * rng.normal(size=(n_lvl, n_lvl))
    rho = x @ x.conj().T
    rho /= np.trace(rho).real
    grid = WignerGrid(-2.0, 2.0, -1.0, 3.0, 5)
    w = wigner(rho, grid, norm_tol=1.0)  # coarse grid: skip the norm gate
    b = np.diag(np.sqrt(np.arange(1, pad)), 1)
    parity = np.diag((-1.0) ** np.arange(pad))
    big = np.zeros((pad, pad), dtype=complex)
    big[:n_lvl, :n_lvl] = rho
    for i, xq in enumerate(grid.xs):
        for j, pq in enumerate(grid.ps):
            alpha = (xq + 1j * pq) / math.sqrt(2.0)
            d = scipy.linalg.expm(alpha * b.conj().T - np.conj(alpha) * b)
            oracle = np.trace(big @ d @ parity @ d.conj().T).real / math.pi
            assert w[i, j] == pytest.approx(oracle, abs=1e-8)


def test_fock_one_negativity():
    grid = WignerGrid()
    fock1 = np.zeros(6, dtype=complex)
    fock1[1] = 1.0
    w = wigner(fock1, grid)
    exact = 4.0 * math.exp(-0.5) - 2.0
    assert wigner_negativity(w, grid) == pytest.approx(exact, abs=5e-4)


def test_coherent_state_is_wigner_positive():
    grid = WignerGrid()
    w = wigner(coherent(4.0, 60), grid)
    assert wigner_negativity(w, grid) < 1e-3


def test_cat_negativities():
    grid = WignerGrid()
    frozen = {2: 0.6366, 3: 1.2716, 4: 1.6627}
    for k, expected in frozen.items():
        vec = cat_state(CatSpec(k=k, n_photons=1, xi=4.0), CAT_EFF, 60)
        value = wigner_negativity(wigner(vec, grid), grid)
        assert value == pytest.approx(expected, abs=1e-3)


def test_wigner_grid_validation_and_norm_gate():
    with pytest.raises(ConfigError):
        WignerGrid(n_points=1)
    with pytest.raises(ConfigError):
        WignerGrid(x_min=2.0, x_max=-2.0)
    vec = cat_state(CatSpec(k=2, n_photons=1, xi=4.0), CAT_EFF, 60)
    tight = WignerGrid(-3, 3, -3, 3, 101)
    with pytest.raises(TruncationError):
        wigner(vec, tight)


def test_state_fidelity_inputs():
    a = coherent(1.0, 20)
    rho = np.outer(a, a.conj())
    assert state_fidelity(rho, a) == pytest.approx(1.0, abs=1e-12)
    assert state_fidelity(a, 2.0 * a) == pytest.approx(1.0, abs=1e-12)
    b = coherent(-1.0, 20)
    assert state_fidelity(b, a) == pytest.approx(
        math.exp(-4.0), rel=1e-8
    )  # |<a|-a>|^2 = e^{-4|a|^2}


def test_negativity_trajectory_closed_limit():
    spec = CatSpec(k=2, n_photons=1, xi=2.0)
    tau = spec.tau(CAT_EFF)
    bath = DriveAndBath(Delta_c=0.0, kappa=0.0, gamma=0.0)
    grid = WignerGrid(-5, 5, -5, 5, 151)
    traj = negativity_trajectory(
        CAT_EFF, bath, spec, [0.0, tau], N_m=25, grid=grid, keep_states=True
    )
    assert traj.values[0] == pytest.approx(0.0, abs=1e-5)
    assert traj.values[-1] > 0.4
    target = cat_state(spec, CAT_EFF, 25)
    end = traj.mech_states[-1]
    assert float(np.real(target.conj() @ end @ target)) == pytest.approx(1.0, abs=1e-8)


def test_negativity_trajectory_rejects_drive():
    spec = CatSpec(k=2, n_photons=1, xi=2.0)
    bath = DriveAndBath(Delta_c=0.0, kappa=1e4, gamma=10.0, Omega=100.0)
    with pytest.raises(ConfigError):
        negativity_trajectory(CAT_EFF, bath, spec, [0.0, 1e-6], N_m=25)
