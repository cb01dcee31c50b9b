"""Run configuration: TOML parsing, validation, and SI conversion.

The config file uses human units in suffixed keys (um, uK, MHz, us); the
parsed RunConfig exposes SI quantities.  Validation happens before any
computation and raises ConfigurationError with the offending key.
"""

from __future__ import annotations

import hashlib
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .errors import ConfigurationError

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class RunConfig:
    # species / channels
    species_data_file: str = ""
    channel_preset: str = "default"
    # geometry
    z: float = 3.8e-6
    y_scan_max: float = 20e-6
    y_scan_points: int = 41
    # field
    b_gauss: float = 3.0
    # trap
    omega_y: float = TWO_PI * 1390.0
    omega_r: float = TWO_PI * 16.9e3
    # temperatures
    t87: float = 8e-6
    t85: float = 9e-6
    t_scan_min: float = 0.5e-6
    t_scan_max: float = 40e-6
    t_scan_points: int = 12
    # Rabi frequencies (rad/s)
    omega_780_87: float = TWO_PI * 226e6
    omega_780_85: float = TWO_PI * 206e6
    omega_480: float = TWO_PI * 28e6
    delta_int: float = TWO_PI * 4.8e9
    # error model
    excitation_efficiency_87: float = 0.96
    excitation_efficiency_85: float = 0.96
    detection_efficiency: float = 0.90
    rydberg_lifetime: float = 180e-6
    doppler_enabled: bool = True
    doppler_dt: float = 3.6e-6
    doppler_lambda1: float = 480e-9
    doppler_lambda2: float = 780e-9
    raman_amplitude_drift: float = 0.0
    blockade: str | float = "auto"  # "auto", "inf", or a value in J
    # thermal averaging
    average_method: str = "quadrature"
    average_n: int = 32
    # blockade demo
    demo_t_max: float = 4e-6
    demo_points: int = 60
    # phase scans
    scan_points: int = 25
    # run control
    seed: int | None = 20250811
    jobs: int = 1
    out_dir: str = "out"
    # provenance
    config_hash: str = field(default="", compare=False)

    def __post_init__(self):
        positive = {
            "z": self.z,
            "omega_y": self.omega_y,
            "omega_r": self.omega_r,
            "t87": self.t87,
            "t85": self.t85,
            "delta_int": self.delta_int,
            "rydberg_lifetime": self.rydberg_lifetime,
            "doppler_dt": self.doppler_dt,
        }
        for key, val in positive.items():
            if val <= 0:
                raise ConfigurationError(f"config: {key} must be positive, got {val}")
        if self.b_gauss < 0:
            raise ConfigurationError("config: b_gauss must be non-negative")
        for key, val in {
            "excitation_efficiency_87": self.excitation_efficiency_87,
            "excitation_efficiency_85": self.excitation_efficiency_85,
            "detection_efficiency": self.detection_efficiency,
        }.items():
            if not 0.0 <= val <= 1.0:
                raise ConfigurationError(f"config: {key} must lie in [0, 1], got {val}")
        if self.channel_preset not in ("default", "full_fine_structure"):
            raise ConfigurationError(
                f"config: unknown channel preset '{self.channel_preset}'"
            )
        if self.average_method not in ("quadrature", "monte_carlo"):
            raise ConfigurationError(
                f"config: unknown averaging method '{self.average_method}'"
            )
        if self.jobs < 1:
            raise ConfigurationError("config: jobs must be >= 1")
        if isinstance(self.blockade, str) and self.blockade not in ("auto", "inf"):
            raise ConfigurationError(
                "config: blockade must be 'auto', 'inf', or a number (MHz)"
            )
        if self.y_scan_points < 1 or self.t_scan_points < 1 or self.scan_points < 2:
            raise ConfigurationError("config: scan point counts too small")

    @property
    def omega_eff_87(self) -> float:
        return self.omega_780_87 * self.omega_480 / (2.0 * self.delta_int)

    @property
    def omega_eff_85(self) -> float:
        return self.omega_780_85 * self.omega_480 / (2.0 * self.delta_int)


def _get(table: dict, section: str, key: str, default):
    sec = table.get(section, {})
    if not isinstance(sec, dict):
        raise ConfigurationError(f"config: [{section}] must be a table")
    val = sec.get(key, default)
    if val is None:
        return val
    if isinstance(default, bool):
        expected: tuple = (bool,)
    elif isinstance(default, (int, float)):
        expected = (int, float)
    else:
        expected = (type(default),)
    if default is not None and not isinstance(val, expected):
        raise ConfigurationError(
            f"config: [{section}] {key} has wrong type ({type(val).__name__})"
        )
    return val


def load_config(path: str | Path | None = None, overrides: dict | None = None) -> RunConfig:
    """Load and validate a TOML config; None gives the built-in defaults."""
    raw = b""
    table: dict = {}
    if path is not None:
        p = Path(path)
        if not p.exists():
            raise ConfigurationError(f"config file not found: {p}")
        raw = p.read_bytes()
        try:
            table = tomllib.loads(raw.decode("utf-8"))
        except tomllib.TOMLDecodeError as exc:
            raise ConfigurationError(f"config is not valid TOML: {exc}") from exc

    g = _get
    blockade_raw = table.get("error_model", {}).get("blockade", "auto")
    if isinstance(blockade_raw, str):
        blockade: str | float = blockade_raw
    else:
        # numeric blockade given in MHz (shift / h)
        from .constants import H_PLANCK

        blockade = float(blockade_raw) * 1e6 * H_PLANCK

    values = dict(
        species_data_file=g(table, "species", "data_file", ""),
        channel_preset=g(table, "channels", "preset", "default"),
        z=g(table, "geometry", "z_um", 3.8) * 1e-6,
        y_scan_max=g(table, "geometry", "y_scan_max_um", 20.0) * 1e-6,
        y_scan_points=int(g(table, "geometry", "y_scan_points", 41)),
        b_gauss=float(g(table, "field", "b_gauss", 3.0)),
        omega_y=TWO_PI * g(table, "trap", "omega_y_hz", 1390.0),
        omega_r=TWO_PI * g(table, "trap", "omega_r_hz", 16900.0),
        t87=g(table, "temperatures", "t87_uk", 8.0) * 1e-6,
        t85=g(table, "temperatures", "t85_uk", 9.0) * 1e-6,
        t_scan_min=g(table, "temperatures", "t_scan_min_uk", 0.5) * 1e-6,
        t_scan_max=g(table, "temperatures", "t_scan_max_uk", 40.0) * 1e-6,
        t_scan_points=int(g(table, "temperatures", "t_scan_points", 12)),
        omega_780_87=TWO_PI * g(table, "rabi", "omega_780_87_mhz", 226.0) * 1e6,
        omega_780_85=TWO_PI * g(table, "rabi", "omega_780_85_mhz", 206.0) * 1e6,
        omega_480=TWO_PI * g(table, "rabi", "omega_480_mhz", 28.0) * 1e6,
        delta_int=TWO_PI * g(table, "rabi", "delta_int_ghz", 4.8) * 1e9,
        excitation_efficiency_87=float(
            g(table, "error_model", "excitation_efficiency_87", 0.96)
        ),
        excitation_efficiency_85=float(
            g(table, "error_model", "excitation_efficiency_85", 0.96)
        ),
        detection_efficiency=float(g(table, "error_model", "detection_efficiency", 0.90)),
        rydberg_lifetime=g(table, "error_model", "rydberg_lifetime_us", 180.0) * 1e-6,
        doppler_enabled=bool(g(table, "error_model", "doppler_enabled", True)),
        doppler_dt=g(table, "error_model", "doppler_dt_us", 3.6) * 1e-6,
        doppler_lambda1=g(table, "error_model", "doppler_lambda1_nm", 480.0) * 1e-9,
        doppler_lambda2=g(table, "error_model", "doppler_lambda2_nm", 780.0) * 1e-9,
        raman_amplitude_drift=float(g(table, "error_model", "raman_amplitude_drift", 0.0)),
        blockade=blockade,
        average_method=g(table, "thermal_average", "method", "quadrature"),
        average_n=int(g(table, "thermal_average", "n", 32)),
        demo_t_max=g(table, "blockade_demo", "t_max_us", 4.0) * 1e-6,
        demo_points=int(g(table, "blockade_demo", "points", 60)),
        scan_points=int(g(table, "scans", "points", 25)),
        seed=g(table, "run", "seed", 20250811),
        jobs=int(g(table, "run", "jobs", 1)),
        out_dir=g(table, "run", "out_dir", "out"),
    )
    if overrides:
        values.update(overrides)

    # hash the physics-relevant values: output location and parallelism degree
    # must not change what is computed
    hashed = {k: v for k, v in values.items() if k not in ("out_dir", "jobs")}
    digest_src = repr(sorted((k, str(v)) for k, v in hashed.items())).encode()
    values["config_hash"] = hashlib.sha256(digest_src).hexdigest()[:16]
    return RunConfig(**values)
