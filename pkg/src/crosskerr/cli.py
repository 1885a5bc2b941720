"""Batch command-line front end.

Ten subcommands cover the coupling pipeline, the photon-statistics
solvers, the cat-state pipeline, and the Gaussian entanglement chain.
Every run writes delimited data plus a ``manifest.json`` recording the
fully resolved configuration, truncations, tolerances, residual
summaries, and wall time; rerunning from a manifest reproduces the
data files byte for byte.  Figures are rendered next to the data by
default and can be switched off with ``--no-figures``.

Exit codes: 0 success, 2 configuration error, 3 solver error,
4 validity-gate refusal (override with ``--force``).
"""

from __future__ import annotations

import csv
import dataclasses
import json
import math
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import click
import numpy as np

from . import __version__
from .analytic import g2_closed_form, g2_perturbative, g3_perturbative
from .catgen import (
    CatSpec,
    WignerGrid,
    cat_state,
    evolve_closed,
    negativity_trajectory,
    state_fidelity,
    wigner,
    wigner_negativity,
)
from .circuit import (
    CircuitParams,
    EffectiveCouplings,
    compute_effective,
    compute_intermediate,
    validity,
)
from .errors import ConfigError, CrossKerrError, SolverError, TruncationError, ValidityError
from .fockspace import SpaceSpec, hamiltonian_driven
from .gaussian import drift_matrix, entanglement_sweep, mean_field, routh_hurwitz
from .lindblad import DriveAndBath, classify, gn0, liouvillian, steady_state
from .plotting import (
    save_class_map,
    save_line_plot,
    save_map_plot,
    save_wigner_plot,
)
from .presets import PRESETS, Preset, get_preset
from .units import parse_quantity

_EXIT_CODES = {
    ConfigError: 2,
    ValidityError: 4,
    TruncationError: 3,
    SolverError: 3,
}

_FIELD_KINDS = {
    "E_J": "frequency",
    "delta_ng0": "dimensionless",
    "ratio_EJ_EC": "dimensionless",
    "V_g": "voltage",
    "C": "capacitance",
    "C_g0": "capacitance",
    "C_sum": "capacitance",
    "L": "inductance",
    "omega_c0": "frequency",
    "omega_M0": "frequency",
    "g_m_override": "frequency",
    "omega_c": "frequency",
    "omega_M": "frequency",
    "g0": "frequency",
    "g_CK": "frequency",
    "g_CK_prime": "frequency",
    "g_cub": "frequency",
    "G2": "frequency",
    "G4": "frequency",
    "kappa": "frequency",
    "gamma": "frequency",
    "Omega": "frequency",
    "Delta_c": "frequency",
    "omega_d": "frequency",
    "n_th": "dimensionless",
    "T": "temperature",
    "power_dBm": "power",
    "k": "dimensionless",
    "n_photons": "dimensionless",
    "xi": "dimensionless",
    "n_a": "dimensionless",
    "n_m": "dimensionless",
    "threshold": "dimensionless",
}

_CIRCUIT_FIELDS = (
    "E_J",
    "delta_ng0",
    "ratio_EJ_EC",
    "V_g",
    "C",
    "C_g0",
    "C_sum",
    "L",
    "omega_c0",
    "omega_M0",
    "g_m_override",
)
_COUPLING_FIELDS = ("omega_c", "omega_M", "g0", "g_CK", "g_CK_prime", "g_cub", "G2", "G4")


@dataclass
class Scenario:
    """Fully resolved run inputs in base units."""

    command: str
    preset: Preset | None
    circuit: CircuitParams | None = None
    eff: EffectiveCouplings | None = None
    kappa: float = 0.0
    gamma: float = 0.0
    Omega: float = 0.0
    n_th: float = 0.0
    Delta_c: float = 0.0
    cat: CatSpec | None = None
    n_a: int = 4
    n_m: int = 12
    threshold: float = 0.1
    tol: float = 1e-10
    sweeps: dict = field(default_factory=dict)
    decay_curves: tuple = ()
    compare_gprime_zero: bool = False

    def bath(self, Delta_c: float | None = None, n_th: float | None = None) -> DriveAndBath:
        return DriveAndBath(
            Delta_c=self.Delta_c if Delta_c is None else Delta_c,
            kappa=self.kappa,
            gamma=self.gamma,
            Omega=self.Omega,
            n_th=self.n_th if n_th is None else n_th,
        )

    def effective(self) -> EffectiveCouplings:
        if self.eff is not None:
            return self.eff
        if self.circuit is None:
            raise ConfigError("no coupling source: give a preset or parameters")
        inter = compute_intermediate(self.circuit)
        return compute_effective(inter, self.circuit, frequency_shift_policy="absorbed")

    def resolved(self) -> dict:
        """Plain-number configuration for the manifest."""
        out: dict = {"command": self.command}
        if self.circuit is not None:
            out["circuit"] = {
                k: getattr(self.circuit, k)
                for k in _CIRCUIT_FIELDS
                if getattr(self.circuit, k) is not None
            }
        if self.eff is not None:
            out["couplings"] = {k: getattr(self.eff, k) for k in _COUPLING_FIELDS}
        out["bath"] = {
            "kappa": self.kappa,
            "gamma": self.gamma,
            "Omega": self.Omega,
            "n_th": self.n_th,
            "Delta_c": self.Delta_c,
        }
        if self.cat is not None:
            out["cat"] = {
                "k": self.cat.k,
                "n_photons": self.cat.n_photons,
                "xi_re": self.cat.xi.real if isinstance(self.cat.xi, complex) else float(self.cat.xi),
                "xi_im": self.cat.xi.imag if isinstance(self.cat.xi, complex) else 0.0,
            }
        out["space"] = {"n_a": self.n_a, "n_m": self.n_m}
        out["threshold"] = self.threshold
        out["tol"] = self.tol
        out["sweeps"] = {k: list(v) for k, v in self.sweeps.items()}
        out["decay_curves"] = [list(c) for c in self.decay_curves]
        out["compare_gprime_zero"] = self.compare_gprime_zero
        return out


def _load_param_file(path: str) -> dict:
    try:
        raw = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read parameter file {path}: {exc}") from None
    if not isinstance(raw, dict):
        raise ConfigError("parameter file must hold a JSON object")
    return raw


def _scenario_from_resolved(command: str, cfg: dict) -> Scenario:
    """Rebuild a scenario from a manifest's resolved_config block."""
    scn = Scenario(command=command, preset=None)
    if "circuit" in cfg:
        scn.circuit = CircuitParams(**cfg["circuit"])
    if "couplings" in cfg:
        scn.eff = EffectiveCouplings(**cfg["couplings"])
    bath = cfg.get("bath", {})
    scn.kappa = bath.get("kappa", 0.0)
    scn.gamma = bath.get("gamma", 0.0)
    scn.Omega = bath.get("Omega", 0.0)
    scn.n_th = bath.get("n_th", 0.0)
    scn.Delta_c = bath.get("Delta_c", 0.0)
    if "cat" in cfg:
        c = cfg["cat"]
        scn.cat = CatSpec(
            k=int(c["k"]),
            n_photons=int(c["n_photons"]),
            xi=complex(c.get("xi_re", 0.0), c.get("xi_im", 0.0)),
        )
    space = cfg.get("space", {})
    scn.n_a = int(space.get("n_a", 4))
    scn.n_m = int(space.get("n_m", 12))
    scn.threshold = cfg.get("threshold", 0.1)
    scn.tol = cfg.get("tol", 1e-10)
    scn.sweeps = {k: tuple(v) for k, v in cfg.get("sweeps", {}).items()}
    scn.decay_curves = tuple(tuple(c) for c in cfg.get("decay_curves", []))
    scn.compare_gprime_zero = bool(cfg.get("compare_gprime_zero", False))
    return scn


def _apply_params(scn: Scenario, params: dict) -> None:
    """Overlay unit-tagged parameters onto a scenario."""
    circuit_updates: dict = {}
    coupling_updates: dict = {}
    cat_updates: dict = {}
    for key, value in params.items():
        if key not in _FIELD_KINDS:
            known = ", ".join(sorted(_FIELD_KINDS))
            raise ConfigError(f"unknown parameter {key!r}; known: {known}")
        num = parse_quantity(value, _FIELD_KINDS[key], key=key)
        if key in _CIRCUIT_FIELDS:
            circuit_updates[key] = num
        elif key in _COUPLING_FIELDS:
            coupling_updates[key] = num
        elif key in ("kappa", "gamma", "Omega", "n_th", "Delta_c"):
            setattr(scn, key, num)
        elif key in ("T",):
            raise ConfigError(
                "give the thermal occupation as n_th; convert temperatures "
                "with lindblad.thermal_occupation"
            )
        elif key in ("power_dBm", "omega_d"):
            raise ConfigError("give the drive as Omega in rad/s in parameter files")
        elif key in ("k", "n_photons", "xi"):
            cat_updates[key] = num
        elif key == "n_a":
            scn.n_a = int(num)
        elif key == "n_m":
            scn.n_m = int(num)
        elif key == "threshold":
            scn.threshold = num
    if circuit_updates:
        base = scn.circuit if scn.circuit is not None else CircuitParams(
            E_J=circuit_updates.get("E_J", 1e10),
            delta_ng0=circuit_updates.get("delta_ng0", 0.5),
        )
        scn.circuit = dataclasses.replace(base, **circuit_updates)
        scn.eff = None
    if coupling_updates:
        if scn.eff is not None:
            scn.eff = scn.eff.replace(**coupling_updates)
        else:
            missing = [k for k in ("omega_c", "omega_M") if k not in coupling_updates]
            if missing:
                raise ConfigError(
                    f"pinned couplings need {missing} alongside the coupling values"
                )
            defaults = {k: 0.0 for k in _COUPLING_FIELDS}
            defaults.update(coupling_updates)
            scn.eff = EffectiveCouplings(**defaults)
        scn.circuit = None
    if cat_updates:
        base_cat = scn.cat or CatSpec(k=2, n_photons=1, xi=4.0)
        scn.cat = CatSpec(
            k=int(cat_updates.get("k", base_cat.k)),
            n_photons=int(cat_updates.get("n_photons", base_cat.n_photons)),
            xi=cat_updates.get("xi", base_cat.xi),
        )


def _parse_sweeps(specs: tuple[str, ...], allowed: tuple[str, ...]) -> dict:
    out: dict = {}
    for spec in specs:
        if "=" not in spec:
            raise ConfigError(f"sweep {spec!r} must look like param=start:stop:steps")
        name, _, rng = spec.partition("=")
        name = name.strip()
        if name not in allowed:
            raise ConfigError(
                f"sweep parameter {name!r} not supported here; allowed: {', '.join(allowed) or 'none'}"
            )
        parts = rng.split(":")
        if len(parts) != 3:
            raise ConfigError(f"sweep {spec!r} must look like param=start:stop:steps")
        try:
            start, stop, steps = float(parts[0]), float(parts[1]), int(parts[2])
        except ValueError:
            raise ConfigError(f"cannot parse sweep range in {spec!r}") from None
        if steps < 1:
            raise ConfigError("sweep needs at least one step")
        out[name] = (start, stop, steps)
    return out


def _axis(scn: Scenario, name: str, fallback: tuple[float, float, int]) -> np.ndarray:
    start, stop, steps = scn.sweeps.get(name, fallback)
    return np.linspace(start, stop, int(steps))


def resolve_scenario(
    command: str,
    preset_name: str | None,
    param_file: str | None,
    sweep_specs: tuple[str, ...],
    allowed_sweeps: tuple[str, ...],
    na: int | None,
    nm: int | None,
    tol: float | None,
    default_preset: str | None = None,
) -> Scenario:
    params: dict | None = None
    if param_file is not None:
        raw = _load_param_file(param_file)
        if "resolved_config" in raw:
            scn = _scenario_from_resolved(command, raw["resolved_config"])
            scn.sweeps.update(_parse_sweeps(sweep_specs, allowed_sweeps))
            if na is not None:
                scn.n_a = na
            if nm is not None:
                scn.n_m = nm
            if tol is not None:
                scn.tol = tol
            return scn
        params = raw

    name = preset_name or default_preset
    if name is None and params is None:
        raise ConfigError("give --preset or --param-file")
    preset = get_preset(name) if name is not None else None

    scn = Scenario(command=command, preset=preset)
    if preset is not None:
        scn.circuit = preset.circuit
        scn.eff = preset.couplings
        scn.kappa = preset.kappa
        scn.gamma = preset.gamma
        scn.Omega = preset.Omega
        scn.n_th = preset.n_th
        scn.Delta_c = preset.Delta_c
        scn.cat = preset.cat
        scn.n_a = preset.n_a
        scn.n_m = preset.n_m
        scn.threshold = preset.threshold
        scn.sweeps = dict(preset.sweeps)
        scn.decay_curves = preset.decay_curves
        scn.compare_gprime_zero = preset.compare_gprime_zero
    if params:
        _apply_params(scn, params)
    scn.sweeps.update(_parse_sweeps(sweep_specs, allowed_sweeps))
    if na is not None:
        scn.n_a = na
    if nm is not None:
        scn.n_m = nm
    if tol is not None:
        scn.tol = tol
    return scn


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _write_rows(path: Path, fmt: str, header: list[str], rows: list[dict]) -> None:
    if fmt == "csv":
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([_fmt(row.get(col)) for col in header])
    else:
        payload = [
            {col: (None if row.get(col) is None else row.get(col)) for col in header}
            for row in rows
        ]
        cleaned = json.dumps(payload, default=_json_default, indent=1, sort_keys=False)
        path.write_text(cleaned + "\n")


def _json_default(obj):
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    raise TypeError(f"cannot serialize {type(obj)!r}")


class RunWriter:
    """Accumulates outputs and writes the manifest at the end."""

    def __init__(self, command: str, out: str, fmt: str, figures: bool, scn: Scenario):
        self.command = command
        self.dir = Path(out)
        self.dir.mkdir(parents=True, exist_ok=True)
        self.fmt = fmt
        self.figures = figures
        self.scn = scn
        self.outputs: list[str] = []
        self.extras: dict = {}
        self.residuals: list[float] = []
        self.t0 = time.monotonic()

    def table(self, name: str, header: list[str], rows: list[dict]) -> Path:
        path = self.dir / f"{name}.{self.fmt}"
        _write_rows(path, self.fmt, header, rows)
        self.outputs.append(path.name)
        return path

    def figure(self, name: str, painter) -> None:
        if not self.figures:
            return
        path = self.dir / f"{name}.png"
        painter(path)
        self.outputs.append(path.name)

    def note_residual(self, value: float | None) -> None:
        if value is not None:
            self.residuals.append(float(value))

    def finish(self) -> None:
        manifest = {
            "command": self.command,
            "argv": sys.argv[1:],
            "preset": self.scn.preset.name if self.scn.preset else None,
            "coupling_source": "pinned" if self.scn.eff is not None else "derived",
            "code_version": __version__,
            "created_utc": datetime.now(timezone.utc).isoformat(),
            "resolved_config": self.scn.resolved(),
            "truncations": {"n_a": self.scn.n_a, "n_m": self.scn.n_m},
            "tolerances": {"steady_state": self.scn.tol, "validity": self.scn.threshold},
            "residuals": {
                "count": len(self.residuals),
                "max": max(self.residuals) if self.residuals else None,
            },
            "wall_time_s": round(time.monotonic() - self.t0, 3),
            "outputs": self.outputs,
        }
        manifest.update(self.extras)
        path = self.dir / "manifest.json"
        path.write_text(json.dumps(manifest, indent=1, default=_json_default) + "\n")
        click.echo(f"{self.command}: wrote {', '.join(self.outputs)} -> {self.dir}")


def _guard(fn):
    """Map library errors to exit codes and an error record on disk."""

    def wrapper(*args, **kwargs):
        out = kwargs.get("out")
        try:
            return fn(*args, **kwargs)
        except CrossKerrError as exc:
            code = 3
            for cls, c in _EXIT_CODES.items():
                if isinstance(exc, cls):
                    code = c
                    break
            record = {
                "error_type": type(exc).__name__,
                "message": str(exc),
                "exit_code": code,
            }
            if out:
                try:
                    Path(out).mkdir(parents=True, exist_ok=True)
                    (Path(out) / "error.json").write_text(json.dumps(record, indent=1) + "\n")
                except OSError:
                    pass
            click.echo(f"error ({type(exc).__name__}): {exc}", err=True)
            sys.exit(code)

    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


def _common_options(fn):
    for opt in reversed(
        [
            click.option("--preset", "preset_name", default=None, help="named scenario"),
            click.option("--param-file", default=None, type=click.Path(), help="JSON parameters or a previous manifest"),
            click.option("--sweep", "sweep_specs", multiple=True, help="param=start:stop:steps"),
            click.option("--out", default=None, type=click.Path(), help="output directory"),
            click.option("--format", "fmt", default="csv", type=click.Choice(["csv", "json"])),
            click.option("--threads", default=1, show_default=True, type=click.IntRange(min=1)),
            click.option("--na", default=None, type=click.IntRange(min=2), help="cavity levels"),
            click.option("--nm", default=None, type=click.IntRange(min=2), help="phonon levels"),
            click.option("--tol", default=None, type=float, help="steady-state residual tolerance"),
            click.option("--force", is_flag=True, help="bypass the validity gate"),
            click.option("--figures/--no-figures", default=True, show_default=True),
        ]
    ):
        fn = opt(fn)
    return fn


def _pmap(threads: int, fn, items):
    if threads <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


@click.group()
@click.version_option(version=__version__, prog_name="crosskerr")
def main() -> None:
    """Cross-Kerr optomechanical circuit toolkit."""


# ----------------------------------------------------------------- couplings


def _validity_row(params: CircuitParams, threshold: float) -> dict:
    inter = compute_intermediate(params)
    eff = compute_effective(inter, params, frequency_shift_policy="absorbed")
    rep = validity(inter, eff, threshold=threshold, params=params)
    row = {
        "delta_ng0": params.delta_ng0,
        "ratio_EJ_EC": params.ratio_EJ_EC,
        "E_C": inter.E_C,
        "B1": inter.B1,
        "B3": inter.B3,
        "B": inter.B,
        "Z0": inter.Z0,
        "g_m": inter.g_m,
        "g_q": inter.g_q,
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
        "rwa_ratio": rep.rwa_ratio,
        "rwa_ok": rep.rwa_ok,
        "truncation_ratio": rep.truncation_ratio,
        "truncation_ok": rep.truncation_ok,
        "polaron_ok": all(rep.polaron_ok),
        "dispersive_ratio": rep.dispersive_ratio,
        "dispersive_ok": rep.dispersive_ok,
        "all_ok": rep.all_ok,
    }
    return row


_COUPLINGS_HEADER = [
    "delta_ng0",
    "ratio_EJ_EC",
    "E_C",
    "B1",
    "B3",
    "B",
    "Z0",
    "g_m",
    "g_q",
    "g_Sc",
    "g_Sm",
    "g_rp",
    "omega_c",
    "omega_M",
    "g0",
    "g_CK",
    "g_CK_prime",
    "g_cub",
    "G2",
    "G4",
    "rwa_ratio",
    "rwa_ok",
    "truncation_ratio",
    "truncation_ok",
    "polaron_ok",
    "dispersive_ratio",
    "dispersive_ok",
    "all_ok",
]


@main.command()
@_common_options
@_guard
def couplings(preset_name, param_file, sweep_specs, out, fmt, threads, na, nm, tol, force, figures):
    """Derive circuit couplings, optionally sweeping the gate charge or
    the energy ratio."""
    scn = resolve_scenario(
        "couplings", preset_name, param_file, sweep_specs,
        ("delta_ng0", "ratio_EJ_EC"), na, nm, tol, default_preset="fig2",
    )
    if scn.circuit is None:
        raise ConfigError("couplings needs a circuit operating point, not pinned values")
    writer = RunWriter("couplings", out or "runs/couplings", fmt, figures, scn)

    axes = [
        (name, _axis(scn, name, scn.sweeps[name]))
        for name in scn.sweeps
        if name in ("delta_ng0", "ratio_EJ_EC")
    ]
    if not axes:
        row = _validity_row(scn.circuit, scn.threshold)
        if not force and not row["all_ok"]:
            raise ValidityError(
                f"operating point fails validity (rwa_ratio={row['rwa_ratio']:.3f}, "
                f"truncation_ratio={row['truncation_ratio']:.3f}); use --force to emit anyway"
            )
        writer.table("couplings", _COUPLINGS_HEADER, [row])
        writer.finish()
        return

    points: list[CircuitParams] = []
    combos: list[tuple] = []
    if len(axes) == 1:
        name, values = axes[0]
        for v in values:
            combos.append(((name, float(v)),))
    else:
        (n1, v1), (n2, v2) = axes[0], axes[1]
        for b in v2:
            for a in v1:
                combos.append(((n1, float(a)), (n2, float(b))))
    for combo in combos:
        points.append(dataclasses.replace(scn.circuit, **dict(combo)))

    rows = _pmap(threads, lambda p: _validity_row(p, scn.threshold), points)
    writer.table("couplings", _COUPLINGS_HEADER, rows)
    if len(axes) == 1:
        name, values = axes[0]
        writer.figure(
            "couplings",
            lambda p: save_line_plot(
                p,
                values,
                {
                    "g0": np.array([r["g0"] for r in rows]),
                    "g_CK": np.array([r["g_CK"] for r in rows]),
                    "g_CK_prime": np.array([r["g_CK_prime"] for r in rows]),
                },
                name,
                "coupling (rad/s)",
            ),
        )
    writer.finish()


# ------------------------------------------------------------------ g2trace


def _correlation_point(eff: EffectiveCouplings, scn: Scenario, x: float) -> dict:
    bath = scn.bath(Delta_c=x * eff.omega_M)
    space = SpaceSpec(scn.n_a, scn.n_m)
    h = hamiltonian_driven(eff, bath, space)
    rho = steady_state(liouvillian(h, bath), tol=scn.tol)
    g2 = gn0(rho, 2)
    g3 = gn0(rho, 3)
    p = rho.photon_distribution()
    return {
        "detuning": x,
        "Delta_c": bath.Delta_c,
        "g2": g2,
        "g3": g3,
        "class": classify(g2, g3),
        "n_mean": float(p @ np.arange(len(p))),
        "residual": rho.residual,
        "g2_pert": g2_perturbative(eff, bath),
        "g3_pert": g3_perturbative(eff, bath),
        "g2_closed": g2_closed_form(eff, bath),
    }


@main.command()
@_common_options
@_guard
def g2trace(preset_name, param_file, sweep_specs, out, fmt, threads, na, nm, tol, force, figures):
    """Steady-state photon correlations across the drive detuning."""
    scn = resolve_scenario(
        "g2trace", preset_name, param_file, sweep_specs, ("detuning",), na, nm, tol,
    )
    eff = scn.effective()
    writer = RunWriter("g2trace", out or "runs/g2trace", fmt, figures, scn)
    xs = _axis(scn, "detuning", (-1.5, 0.5, 81))

    rows = _pmap(threads, lambda x: _correlation_point(eff, scn, float(x)), xs)
    header = [
        "detuning", "Delta_c", "g2", "g3", "class", "n_mean", "residual",
        "g2_pert", "g3_pert", "g2_closed",
    ]
    curves = {"g2": np.array([r["g2"] for r in rows]),
              "g2_pert": np.array([r["g2_pert"] for r in rows])}
    if scn.compare_gprime_zero:
        eff0 = eff.replace(g_CK_prime=0.0)
        rows0 = _pmap(threads, lambda x: _correlation_point(eff0, scn, float(x)), xs)
        for row, row0 in zip(rows, rows0):
            row["g2_gprime0"] = row0["g2"]
        header.append("g2_gprime0")
        curves["g2_gprime0"] = np.array([r["g2_gprime0"] for r in rows])
    for row in rows:
        writer.note_residual(row["residual"])

    writer.table("g2trace", header, rows)
    writer.figure(
        "g2trace",
        lambda p: save_line_plot(
            p, xs, curves, "Delta_c / omega_M", "g2(0)", logy=True, hline=1.0
        ),
    )
    writer.finish()


# -------------------------------------------------------------- g2map/pbmap


def _grid_rows(scn: Scenario, method: str, with_class: bool, threads: int):
    """Rows over (delta_ng0, detuning) with per-delta derived couplings."""
    if scn.circuit is None:
        raise ConfigError("maps need a circuit operating point")
    deltas = _axis(scn, "delta_ng0", (0.45, 0.56, 23))
    xs = _axis(scn, "detuning", (-2.0, 0.0, 81))

    def column(delta: float):
        params = dataclasses.replace(scn.circuit, delta_ng0=float(delta))
        inter = compute_intermediate(params)
        eff = compute_effective(inter, params, frequency_shift_policy="absorbed")
        rep = validity(inter, eff, threshold=scn.threshold, params=params)
        ok = rep.all_ok
        col = []
        for x in xs:
            bath = scn.bath(Delta_c=float(x) * eff.omega_M)
            if method == "numeric":
                space = SpaceSpec(scn.n_a, scn.n_m)
                rho = steady_state(
                    liouvillian(hamiltonian_driven(eff, bath, space), bath), tol=scn.tol
                )
                g2 = gn0(rho, 2)
                g3 = gn0(rho, 3)
            else:
                g2 = g2_perturbative(eff, bath)
                g3 = g3_perturbative(eff, bath)
            row = {
                "delta_ng0": float(delta),
                "detuning": float(x),
                "g0": eff.g0,
                "g_CK": eff.g_CK,
                "g_CK_prime": eff.g_CK_prime,
                "g2": g2,
                "g3": g3,
                "rwa_ok": rep.rwa_ok,
                "truncation_ok": rep.truncation_ok,
                "valid": ok,
            }
            if with_class:
                row["class"] = classify(g2, g3) if ok else "invalid"
            col.append(row)
        return col

    columns = _pmap(threads, column, deltas)
    rows = [row for col in columns for row in col]
    return xs, deltas, rows


@main.command()
@_common_options
@click.option("--method", default="pert", type=click.Choice(["pert", "numeric"]), show_default=True,
              help="perturbative (fast) or master-equation correlations")
@_guard
def g2map(preset_name, param_file, sweep_specs, out, fmt, threads, na, nm, tol, force, figures, method):
    """g2 over the (gate charge, detuning) plane with a validity mask."""
    scn = resolve_scenario(
        "g2map", preset_name, param_file, sweep_specs, ("detuning", "delta_ng0"),
        na, nm, tol, default_preset="fig4a",
    )
    writer = RunWriter("g2map", out or "runs/g2map", fmt, figures, scn)
    xs, deltas, rows = _grid_rows(scn, method, with_class=False, threads=threads)
    header = [
        "delta_ng0", "detuning", "g0", "g_CK", "g_CK_prime", "g2", "g3",
        "rwa_ok", "truncation_ok", "valid",
    ]
    writer.table("g2map", header, rows)
    writer.extras["method"] = method

    grid = np.array([r["g2"] if r["valid"] else np.nan for r in rows])
    grid = grid.reshape(len(deltas), len(xs))
    writer.figure(
        "g2map",
        lambda p: save_map_plot(
            p, xs, deltas, grid, "Delta_c / omega_M", "delta_ng0", "g2(0)", log=True
        ),
    )
    writer.finish()


@main.command()
@_common_options
@_guard
def pbmap(preset_name, param_file, sweep_specs, out, fmt, threads, na, nm, tol, force, figures):
    """Photon-statistics classification over the same plane as g2map."""
    scn = resolve_scenario(
        "pbmap", preset_name, param_file, sweep_specs, ("detuning", "delta_ng0"),
        na, nm, tol, default_preset="fig7a",
    )
    writer = RunWriter("pbmap", out or "runs/pbmap", fmt, figures, scn)
    xs, deltas, rows = _grid_rows(scn, "pert", with_class=True, threads=threads)
    header = [
        "delta_ng0", "detuning", "g0", "g_CK", "g_CK_prime", "g2", "g3",
        "rwa_ok", "truncation_ok", "valid", "class",
    ]
    writer.table("pbmap", header, rows)
    labels = np.array([r["class"] for r in rows]).reshape(len(deltas), len(xs))
    writer.figure(
        "pbmap",
        lambda p: save_class_map(p, xs, deltas, labels, "Delta_c / omega_M", "delta_ng0"),
    )
    writer.finish()


# ------------------------------------------------------------------ thermal


@main.command()
@_common_options
@_guard
def thermal(preset_name, param_file, sweep_specs, out, fmt, threads, na, nm, tol, force, figures):
    """Photon correlations against the thermal phonon number."""
    scn = resolve_scenario(
        "thermal", preset_name, param_file, sweep_specs, ("n_th",), na, nm, tol,
        default_preset="fig8a",
    )
    eff = scn.effective()
    writer = RunWriter("thermal", out or "runs/thermal", fmt, figures, scn)
    ns = _axis(scn, "n_th", (0.0, 4.0, 41))

    def point(n_th: float) -> dict:
        bath = scn.bath(n_th=float(n_th))
        space = SpaceSpec(scn.n_a, scn.n_m)
        rho = steady_state(liouvillian(hamiltonian_driven(eff, bath, space), bath), tol=scn.tol)
        g2 = gn0(rho, 2)
        g3 = gn0(rho, 3)
        return {
            "n_th": float(n_th),
            "g2": g2,
            "g3": g3,
            "class": classify(g2, g3),
            "residual": rho.residual,
        }

    rows = _pmap(threads, point, ns)
    for row in rows:
        writer.note_residual(row["residual"])
    writer.table("thermal", ["n_th", "g2", "g3", "class", "residual"], rows)

    g2s = np.array([r["g2"] for r in rows])
    above = np.nonzero(g2s >= 1.0)[0]
    if len(above) and above[0] > 0:
        i = above[0]
        x0, x1 = ns[i - 1], ns[i]
        y0, y1 = g2s[i - 1], g2s[i]
        writer.extras["g2_crossing_n_th"] = float(x0 + (1.0 - y0) * (x1 - x0) / (y1 - y0))
    writer.figure(
        "thermal",
        lambda p: save_line_plot(p, ns, {"g2": g2s}, "n_th", "g2(0)", hline=1.0),
    )
    writer.finish()


# -------------------------------------------------------------- cat family


def _wigner_table(grid: WignerGrid, w: np.ndarray) -> tuple[list[str], list[dict]]:
    xs, ps = grid.xs, grid.ps
    rows = [
        {"x": float(xs[i]), "p": float(ps[j]), "W": float(w[i, j])}
        for i in range(len(xs))
        for j in range(len(ps))
    ]
    return ["x", "p", "W"], rows


def _grid_option_values(points: int, half_width: float) -> WignerGrid:
    return WignerGrid(-half_width, half_width, -half_width, half_width, points)


@main.command()
@_common_options
@click.option("--k", default=None, type=click.IntRange(2, 4), help="number of cat lobes")
@click.option("--grid-points", default=401, show_default=True, type=click.IntRange(min=11))
@click.option("--half-width", default=10.0, show_default=True, type=float)
@_guard
def cat(preset_name, param_file, sweep_specs, out, fmt, threads, na, nm, tol, force, figures, k, grid_points, half_width):
    """Closed-system cat generation: Wigner snapshots along the revival."""
    scn = resolve_scenario(
        "cat", preset_name, param_file, sweep_specs, (), na, nm, tol, default_preset="fig9",
    )
    eff = scn.effective()
    if eff.g0 != 0.0:
        raise ConfigError("cat generation requires the linear coupling tuned to zero")
    if scn.cat is None:
        raise ConfigError("no cat specification in the scenario")
    spec = scn.cat if k is None else CatSpec(k=k, n_photons=scn.cat.n_photons, xi=scn.cat.xi)
    writer = RunWriter("cat", out or "runs/cat", fmt, figures, scn)
    grid = _grid_option_values(grid_points, half_width)

    tau = spec.tau(eff)
    stamps = [0.0, tau / 3.0, 2.0 * tau / 3.0, tau]
    summary = []
    for i, t in enumerate(stamps):
        psi = evolve_closed(eff, spec.n_photons, spec.xi, t, scn.n_m)
        w = wigner(psi, grid)
        header, rows = _wigner_table(grid, w)
        writer.table(f"wigner_t{i}", header, rows)
        writer.figure(
            f"wigner_t{i}",
            lambda p, w=w, t=t: save_wigner_plot(
                p, grid.xs, grid.ps, w, f"t = {t * 1e6:.3f} us"
            ),
        )
        summary.append(
            {"stamp": i, "t": t, "negativity": wigner_negativity(w, grid)}
        )
    target = cat_state(spec, eff, scn.n_m)
    psi_tau = evolve_closed(eff, spec.n_photons, spec.xi, tau, scn.n_m)
    writer.extras["tau"] = tau
    writer.extras["k"] = spec.k
    writer.extras["fidelity_at_tau"] = state_fidelity(psi_tau, target)
    writer.table("summary", ["stamp", "t", "negativity"], summary)
    writer.finish()


@main.command(name="wigner")
@_common_options
@click.option("--k", default=2, show_default=True, type=click.IntRange(2, 4))
@click.option("--grid-points", default=401, show_default=True, type=click.IntRange(min=11))
@click.option("--half-width", default=10.0, show_default=True, type=float)
@_guard
def wigner_cmd(preset_name, param_file, sweep_specs, out, fmt, threads, na, nm, tol, force, figures, k, grid_points, half_width):
    """Wigner function of the analytic k-lobe cat state."""
    scn = resolve_scenario(
        "wigner", preset_name, param_file, sweep_specs, (), na, nm, tol, default_preset="fig9",
    )
    eff = scn.effective()
    if scn.cat is None:
        raise ConfigError("no cat specification in the scenario")
    spec = CatSpec(k=k, n_photons=scn.cat.n_photons, xi=scn.cat.xi)
    writer = RunWriter("wigner", out or "runs/wigner", fmt, figures, scn)
    grid = _grid_option_values(grid_points, half_width)

    psi = cat_state(spec, eff, scn.n_m)
    w = wigner(psi, grid)
    header, rows = _wigner_table(grid, w)
    writer.table("wigner", header, rows)
    writer.extras["negativity"] = wigner_negativity(w, grid)
    writer.extras["k"] = k
    writer.figure(
        "wigner",
        lambda p: save_wigner_plot(p, grid.xs, grid.ps, w, f"{k}-lobe cat"),
    )
    writer.finish()


@main.command()
@_common_options
@click.option("--points", default=13, show_default=True, type=click.IntRange(min=2),
              help="time stamps along the revival")
@click.option("--grid-points", default=201, show_default=True, type=click.IntRange(min=11))
@click.option("--half-width", default=10.0, show_default=True, type=float)
@_guard
def negativity(preset_name, param_file, sweep_specs, out, fmt, threads, na, nm, tol, force, figures, points, grid_points, half_width):
    """Wigner negativity of the forming cat under photon/phonon loss."""
    scn = resolve_scenario(
        "negativity", preset_name, param_file, sweep_specs, (), na, nm, tol,
        default_preset="fig10",
    )
    eff = scn.effective()
    if scn.cat is None:
        raise ConfigError("no cat specification in the scenario")
    if not scn.decay_curves:
        raise ConfigError("scenario defines no decay curves")
    writer = RunWriter("negativity", out or "runs/negativity", fmt, figures, scn)
    grid = _grid_option_values(grid_points, half_width)

    tau = scn.cat.tau(eff)
    t_grid = np.linspace(0.0, tau, points)
    labels = []
    trajs = []
    for kappa, gamma in scn.decay_curves:
        bath = DriveAndBath(Delta_c=0.0, kappa=float(kappa), gamma=float(gamma), Omega=0.0, n_th=0.0)
        traj = negativity_trajectory(eff, bath, scn.cat, t_grid, N_m=scn.n_m, grid=grid)
        labels.append(f"E_N_kappa{int(kappa)}_gamma{int(gamma)}")
        trajs.append(traj.values)

    rows = []
    for i, t in enumerate(t_grid):
        row = {"t": float(t)}
        for label, vals in zip(labels, trajs):
            row[label] = float(vals[i])
        rows.append(row)
    writer.table("negativity", ["t", *labels], rows)
    writer.extras["tau"] = tau
    writer.figure(
        "negativity",
        lambda p: save_line_plot(
            p, t_grid * 1e6, dict(zip(labels, trajs)), "t (us)", "Wigner negativity"
        ),
    )
    writer.finish()


# ------------------------------------------------------- entangle/stability


_ENTANGLE_HEADER = [
    "detuning", "Delta_c", "alpha_re", "alpha_im", "beta_re", "beta_im",
    "Delta_eff", "omega_eff", "g_eff_re", "g_eff_im", "stable",
    "rh1", "rh2", "rh3", "rh4", "E_N", "lyapunov_residual", "physicality", "error",
]


def _entangle_rows(eff: EffectiveCouplings, scn: Scenario, xs: np.ndarray) -> list[dict]:
    points = entanglement_sweep(eff, scn.bath(), xs * eff.omega_M)
    rows = []
    for x, pt in zip(xs, points):
        mf = pt.mf
        rows.append(
            {
                "detuning": float(x),
                "Delta_c": pt.Delta_c,
                "alpha_re": mf.alpha.real,
                "alpha_im": mf.alpha.imag,
                "beta_re": mf.beta.real,
                "beta_im": mf.beta.imag,
                "Delta_eff": mf.Delta_eff,
                "omega_eff": mf.omega_eff,
                "g_eff_re": mf.g_eff.real,
                "g_eff_im": mf.g_eff.imag,
                "stable": pt.stable,
                "rh1": pt.rh.c1,
                "rh2": pt.rh.c2,
                "rh3": pt.rh.c3,
                "rh4": pt.rh.c4,
                "E_N": pt.E_N,
                "lyapunov_residual": pt.lyapunov_residual,
                "physicality": pt.physicality,
                "error": pt.error,
            }
        )
    return rows


@main.command()
@_common_options
@_guard
def entangle(preset_name, param_file, sweep_specs, out, fmt, threads, na, nm, tol, force, figures):
    """Gaussian photon-phonon entanglement across the drive detuning."""
    scn = resolve_scenario(
        "entangle", preset_name, param_file, sweep_specs, ("detuning",), na, nm, tol,
    )
    eff = scn.effective()
    writer = RunWriter("entangle", out or "runs/entangle", fmt, figures, scn)
    xs = _axis(scn, "detuning", (6.5, 8.5, 41))

    rows = _entangle_rows(eff, scn, xs)
    header = list(_ENTANGLE_HEADER)
    curves = {"E_N": np.array([r["E_N"] if r["E_N"] is not None else np.nan for r in rows])}
    if scn.compare_gprime_zero:
        rows0 = _entangle_rows(eff.replace(g_CK_prime=0.0), scn, xs)
        for row, row0 in zip(rows, rows0):
            row["E_N_gprime0"] = row0["E_N"]
        header.append("E_N_gprime0")
        curves["E_N_gprime0"] = np.array(
            [r["E_N_gprime0"] if r["E_N_gprime0"] is not None else np.nan for r in rows]
        )
    for row in rows:
        writer.note_residual(row["lyapunov_residual"])

    writer.table("entangle", header, rows)
    writer.figure(
        "entangle",
        lambda p: save_line_plot(p, xs, curves, "Delta_c / omega_M", "E_N"),
    )
    writer.finish()


@main.command()
@_common_options
@_guard
def stability(preset_name, param_file, sweep_specs, out, fmt, threads, na, nm, tol, force, figures):
    """Routh-Hurwitz stability trace with an eigenvalue cross-check."""
    scn = resolve_scenario(
        "stability", preset_name, param_file, sweep_specs, ("detuning",), na, nm, tol,
    )
    eff = scn.effective()
    writer = RunWriter("stability", out or "runs/stability", fmt, figures, scn)
    xs = _axis(scn, "detuning", (6.5, 8.5, 41))

    def point(x: float) -> dict:
        bath = scn.bath(Delta_c=float(x) * eff.omega_M)
        row = {"detuning": float(x), "Delta_c": bath.Delta_c}
        try:
            mf = mean_field(eff, bath)
        except SolverError as exc:
            row.update({"stable": None, "error": str(exc)})
            return row
        rh = routh_hurwitz(mf.Delta_eff, mf.omega_eff, mf.g_eff.real, bath.kappa, bath.gamma)
        eig_max = float(np.max(np.linalg.eigvals(drift_matrix(mf, bath)).real))
        row.update(
            {
                "Delta_eff": mf.Delta_eff,
                "omega_eff": mf.omega_eff,
                "g_eff_re": mf.g_eff.real,
                "rh1": rh.c1,
                "rh2": rh.c2,
                "rh3": rh.c3,
                "rh4": rh.c4,
                "stable": rh.stable,
                "max_re_eig": eig_max,
                "eig_agree": (eig_max < 0) == rh.stable,
                "error": None,
            }
        )
        return row

    rows = _pmap(threads, point, xs)
    header = [
        "detuning", "Delta_c", "Delta_eff", "omega_eff", "g_eff_re",
        "rh1", "rh2", "rh3", "rh4", "stable", "max_re_eig", "eig_agree", "error",
    ]
    writer.table("stability", header, rows)
    vals = np.array([r.get("max_re_eig", np.nan) if r.get("max_re_eig") is not None else np.nan for r in rows])
    writer.figure(
        "stability",
        lambda p: save_line_plot(
            p, xs, {"max Re eig": vals}, "Delta_c / omega_M", "max Re eigenvalue", hline=0.0
        ),
    )
    writer.finish()


if __name__ == "__main__":
    main()
