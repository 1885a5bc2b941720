"""Unit-tagged quantity parsing for parameter files.

Every physical number in a run configuration must carry a unit tag, as
a string like ``"10 MHz"`` or a two-element ``[value, "unit"]`` pair;
bare numbers are accepted only where the quantity is dimensionless.
Frequencies and rates resolve to rad/s: the Hz family is converted
with a factor 2 pi, the rad/s family is taken literally.  Powers stay
in dBm because the drive conversion wants them that way.
"""

from __future__ import annotations

import math

from .errors import ConfigError

__all__ = ["parse_quantity", "UNIT_TABLE", "KIND_OF_UNIT"]

TWO_PI = 2.0 * math.pi

# unit -> (kind, scale to base units)
UNIT_TABLE: dict[str, tuple[str, float]] = {
    "rad/s": ("frequency", 1.0),
    "krad/s": ("frequency", 1e3),
    "Mrad/s": ("frequency", 1e6),
    "Grad/s": ("frequency", 1e9),
    "Hz": ("frequency", TWO_PI),
    "kHz": ("frequency", TWO_PI * 1e3),
    "MHz": ("frequency", TWO_PI * 1e6),
    "GHz": ("frequency", TWO_PI * 1e9),
    "s": ("time", 1.0),
    "ms": ("time", 1e-3),
    "us": ("time", 1e-6),
    "ns": ("time", 1e-9),
    "V": ("voltage", 1.0),
    "F": ("capacitance", 1.0),
    "pF": ("capacitance", 1e-12),
    "fF": ("capacitance", 1e-15),
    "H": ("inductance", 1.0),
    "nH": ("inductance", 1e-9),
    "pH": ("inductance", 1e-12),
    "K": ("temperature", 1.0),
    "mK": ("temperature", 1e-3),
    "dBm": ("power", 1.0),
}

KIND_OF_UNIT = {unit: kind for unit, (kind, _) in UNIT_TABLE.items()}


def parse_quantity(value, expect: str, key: str = "value") -> float:
    """Resolve a tagged quantity to base units, checking its kind.

    Parameters
    ----------
    value : number, str, or [number, str]
        Bare numbers pass through only when ``expect`` is
        "dimensionless".
    expect : str
        Expected kind: frequency, time, voltage, capacitance,
        inductance, temperature, power, or dimensionless.
    key : str
        Configuration key, used in error messages.
    """
    if isinstance(value, bool):
        raise ConfigError(f"{key}: booleans are not quantities")
    if isinstance(value, (int, float)):
        if expect != "dimensionless":
            raise ConfigError(
                f"{key}: bare number {value!r} given where a {expect} with a "
                "unit tag is required"
            )
        return float(value)
    if isinstance(value, str):
        parts = value.split()
        if len(parts) != 2:
            raise ConfigError(
                f"{key}: expected '<number> <unit>', got {value!r}"
            )
        num_text, unit = parts
        try:
            num = float(num_text)
        except ValueError:
            raise ConfigError(f"{key}: cannot parse number in {value!r}") from None
    elif isinstance(value, (list, tuple)) and len(value) == 2:
        num, unit = float(value[0]), str(value[1])
    else:
        raise ConfigError(f"{key}: unrecognized quantity form {value!r}")

    if unit not in UNIT_TABLE:
        known = ", ".join(sorted(UNIT_TABLE))
        raise ConfigError(f"{key}: unknown unit {unit!r}; known units: {known}")
    kind, scale = UNIT_TABLE[unit]
    if kind != expect:
        raise ConfigError(
            f"{key}: unit {unit!r} is a {kind}, but a {expect} is required"
        )
    return num * scale
