"""Named operating points for the batch front end.

Each preset bundles everything a subcommand needs to reproduce one of
the reference scenarios: either a circuit operating point (couplings
derived on the fly) or a pinned coupling set quoted directly from the
reported values, plus drive, bath, truncation, and default sweep axes.

Two device families appear.  The blockade and cat scenarios use a
5 GHz cavity with a 10 MHz mechanical mode and work in the few-photon
regime; the entanglement scenarios use a 10 GHz cavity with a 50 MHz
mode driven to large amplitude.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

from .catgen import CatSpec
from .circuit import (
    CircuitParams,
    EffectiveCouplings,
    compute_effective,
    compute_intermediate,
)
from .errors import ConfigError
from .lindblad import DriveAndBath

__all__ = ["Preset", "PRESETS", "get_preset", "default_circuit"]

TWO_PI = 2.0 * math.pi

# blockade / cat family
_W_M = TWO_PI * 10e6
_W_C = TWO_PI * 5e9
_KAPPA = 0.01 * _W_M
_GAMMA = 0.001 * _W_M
_OMEGA = 0.001 * _W_M

# driven entanglement family
_W_M_G = TWO_PI * 50e6
_W_C_G = TWO_PI * 10e9
_KAPPA_G = 1e6
_GAMMA_G = 5e5


def default_circuit(ratio: float, delta_ng0: float) -> CircuitParams:
    """Charge-qubit operating point used by the derived presets."""
    return CircuitParams(
        E_J=1e10,
        delta_ng0=delta_ng0,
        ratio_EJ_EC=ratio,
        omega_c0=_W_C,
        omega_M0=_W_M,
    )


def _pinned(g0: float, g_ck: float, g_prime: float, omega_c: float, omega_m: float) -> EffectiveCouplings:
    return EffectiveCouplings(
        omega_c=omega_c,
        omega_M=omega_m,
        g0=g0,
        g_CK=g_ck,
        g_CK_prime=g_prime,
        g_cub=0.0,
        G2=0.0,
        G4=0.0,
    )


@dataclass(frozen=True)
class Preset:
    """One named scenario.

    ``kind`` routes the preset to the subcommands that understand it:
    circuit presets feed coupling sweeps and maps, blockade presets the
    correlation solvers, cat presets the Wigner pipeline, gaussian
    presets the entanglement chain.  ``sweeps`` holds default
    (start, stop, points) axes keyed by sweep-parameter name.
    """

    name: str
    summary: str
    kind: str
    circuit: CircuitParams | None = None
    couplings: EffectiveCouplings | None = None
    kappa: float = 0.0
    gamma: float = 0.0
    Omega: float = 0.0
    n_th: float = 0.0
    Delta_c: float = 0.0
    cat: CatSpec | None = None
    n_a: int = 4
    n_m: int = 12
    threshold: float = 0.1
    sweeps: Mapping[str, tuple[float, float, int]] = field(default_factory=dict)
    decay_curves: tuple[tuple[float, float], ...] = ()
    compare_gprime_zero: bool = False

    @property
    def pinned(self) -> bool:
        return self.couplings is not None

    def effective(self) -> EffectiveCouplings:
        """Coupling set: pinned values, or derived from the circuit."""
        if self.couplings is not None:
            return self.couplings
        if self.circuit is None:
            raise ConfigError(f"preset {self.name} carries no coupling source")
        inter = compute_intermediate(self.circuit)
        return compute_effective(inter, self.circuit, frequency_shift_policy="absorbed")

    def bath(self, Delta_c: float | None = None, n_th: float | None = None) -> DriveAndBath:
        return DriveAndBath(
            Delta_c=self.Delta_c if Delta_c is None else Delta_c,
            kappa=self.kappa,
            gamma=self.gamma,
            Omega=self.Omega,
            n_th=self.n_th if n_th is None else n_th,
        )


_BLOCKADE_A = _pinned(-9.0e6, 5.4e6, 0.9e6, _W_C, _W_M)
_BLOCKADE_B = _pinned(-10.7e6, 9.63e6, 4.28e6, _W_C, _W_M)
_CAT = _pinned(0.0, -2.7e6, 0.2e6, _W_C, _W_M)
_GAUSS_A = _pinned(-2.985e5, 3.0e3, -1357.0, _W_C_G, _W_M_G)
_GAUSS_B = _pinned(-4.5946e5, 4.0e3, -1997.0, _W_C_G, _W_M_G)
_OMEGA_GAUSS_A = 4.776e11
_OMEGA_GAUSS_B = 7.3513e11

_DETUNING_BLOCKADE = (-1.5, 0.5, 81)
# gate-charge span covering both valid flanks; the masked middle shows
# where the effective model breaks down
_DELTA_WINDOW_20 = (0.44, 0.57, 27)
_DELTA_WINDOW_30 = (0.44, 0.57, 27)


def _blockade(name: str, summary: str, eff: EffectiveCouplings, sweeps=None, **kw) -> Preset:
    return Preset(
        name=name,
        summary=summary,
        kind="blockade",
        couplings=eff,
        kappa=_KAPPA,
        gamma=_GAMMA,
        Omega=_OMEGA,
        sweeps=sweeps if sweeps is not None else {"detuning": _DETUNING_BLOCKADE},
        **kw,
    )


def _map_preset(
    name: str, summary: str, kind: str, ratio: float, window, detuning=(-2.0, 0.0, 81)
) -> Preset:
    return Preset(
        name=name,
        summary=summary,
        kind=kind,
        circuit=default_circuit(ratio, 0.5),
        kappa=_KAPPA,
        gamma=_GAMMA,
        Omega=_OMEGA,
        threshold=0.15,
        sweeps={"detuning": detuning, "delta_ng0": window},
    )


def _gaussian(name: str, summary: str, eff, omega, window, compare=False) -> Preset:
    return Preset(
        name=name,
        summary=summary,
        kind="gaussian",
        couplings=eff,
        kappa=_KAPPA_G,
        gamma=_GAMMA_G,
        Omega=omega,
        n_th=0.5,
        sweeps={"detuning": window},
        compare_gprime_zero=compare,
    )


PRESETS: dict[str, Preset] = {
    "fig2": Preset(
        name="fig2",
        summary="couplings versus gate-charge deviation at E_J/E_C = 1/20",
        kind="circuit",
        circuit=default_circuit(1.0 / 20.0, 0.5),
        threshold=0.15,
        sweeps={"delta_ng0": (0.45, 0.56, 200)},
    ),
    "fig4a": _map_preset(
        "fig4a", "g2 map over detuning and gate charge, ratio 1/20", "map",
        1.0 / 20.0, _DELTA_WINDOW_20,
    ),
    "fig4b": _map_preset(
        "fig4b", "g2 map over detuning and gate charge, ratio 1/30", "map",
        1.0 / 30.0, _DELTA_WINDOW_30,
    ),
    "fig5a": _blockade(
        "fig5a", "blockade trace, moderate couplings", _BLOCKADE_A,
    ),
    "fig5b": _blockade(
        "fig5b", "blockade trace, strong couplings", _BLOCKADE_B,
    ),
    "fig6a": _blockade(
        "fig6a", "blockade trace with and without the curvature term",
        _BLOCKADE_A, compare_gprime_zero=True,
    ),
    "fig6b": _blockade(
        "fig6b", "strong-coupling trace with and without curvature",
        _BLOCKADE_B, compare_gprime_zero=True,
    ),
    "fig7a": _map_preset(
        "fig7a", "photon-statistics classification map, ratio 1/20", "classmap",
        1.0 / 20.0, _DELTA_WINDOW_20, detuning=(-1.5, 0.5, 81),
    ),
    "fig7b": _map_preset(
        "fig7b", "photon-statistics classification map, ratio 1/30", "classmap",
        1.0 / 30.0, _DELTA_WINDOW_30, detuning=(-1.5, 0.5, 81),
    ),
    "fig8a": _blockade(
        "fig8a", "thermal crossover at zero detuning, moderate couplings",
        _BLOCKADE_A, Delta_c=0.0, n_m=16,
        sweeps={"n_th": (0.0, 4.0, 41)},
    ),
    "fig8b": _blockade(
        "fig8b", "thermal crossover at zero detuning, strong couplings",
        _BLOCKADE_B, Delta_c=0.0, n_m=16,
        sweeps={"n_th": (0.0, 4.0, 41)},
    ),
    "fig9": Preset(
        name="fig9",
        summary="closed-system cat generation snapshots",
        kind="cat",
        couplings=_CAT,
        cat=CatSpec(k=2, n_photons=1, xi=4.0),
        n_a=2,
        n_m=60,
    ),
    "fig10": Preset(
        name="fig10",
        summary="cat negativity decay under photon and phonon loss",
        kind="cat",
        couplings=_CAT,
        cat=CatSpec(k=2, n_photons=1, xi=4.0),
        n_a=2,
        n_m=60,
        decay_curves=((0.0, 0.0), (1e4, 1e4), (1e5, 1e4)),
    ),
    "fig11a": _gaussian(
        "fig11a", "mean-field amplitudes across detuning, moderate drive",
        _GAUSS_A, _OMEGA_GAUSS_A, (6.5, 8.5, 41),
    ),
    "fig11b": _gaussian(
        "fig11b", "mean-field amplitudes across detuning, strong drive",
        _GAUSS_B, _OMEGA_GAUSS_B, (10.5, 13.0, 51),
    ),
    "fig12a": _gaussian(
        "fig12a", "entanglement peak near the dressed red sideband (A)",
        _GAUSS_A, _OMEGA_GAUSS_A, (6.5, 8.5, 41),
    ),
    "fig12b": _gaussian(
        "fig12b", "entanglement peak near the dressed red sideband (B)",
        _GAUSS_B, _OMEGA_GAUSS_B, (10.5, 13.0, 51),
    ),
    "fig13a": _gaussian(
        "fig13a", "entanglement with the curvature term switched off (A)",
        _GAUSS_A, _OMEGA_GAUSS_A, (0.5, 12.0, 47), compare=True,
    ),
    "fig13b": _gaussian(
        "fig13b", "entanglement with the curvature term switched off (B)",
        _GAUSS_B, _OMEGA_GAUSS_B, (0.5, 14.0, 55), compare=True,
    ),
}


def get_preset(name: str) -> Preset:
    try:
        return PRESETS[name]
    except KeyError:
        known = ", ".join(sorted(PRESETS))
        raise ConfigError(f"unknown preset {name!r}; known presets: {known}") from None
