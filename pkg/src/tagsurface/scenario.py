"""Scenario configuration and the per-scenario link budget."""

from __future__ import annotations

import configparser
import dataclasses
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .channel import (
    ChannelSet,
    NoiseSpec,
    SurfaceGeometry,
    build_geometry,
    draw_channels,
    noise_power,
    path_loss,
    path_losses,
    wavelength,
)
from .loads import LoadSet, binary_load_set, mean_square_deviation, read_load_table, synth_varactor_set

SECTIONS = ("scenario", "channel", "loads", "estimation", "gen2", "harness")
U64_MAX = 2**64 - 1


def dbm_to_watts(dbm: float) -> float:
    return 10.0 ** (dbm / 10.0) / 1000.0


@dataclass
class ScenarioConfig:
    """Every knob of a simulated deployment, in SI units.

    Defaults follow the line-of-sight indoor setup: 100 tags at half-wavelength
    spacing, ``kappa = 8`` on every link, ``eta = 0.1``, exponent 3,
    ``d0 = d_SD = 3 m``, 870 MHz, 5 dBm and a 10 dB end-to-end antenna gain
    advantage for the backscatter paths.
    """

    num_elements: int = 100
    num_loads: int = 2
    spacing_x: float | None = None
    spacing_y: float | None = None
    d_sd: float = 3.0
    d_ris_sd: float = 1.0
    d0: float = 3.0
    exponent_sd: float = 3.0
    exponent_st: float = 3.0
    exponent_td: float = 3.0
    kappa_sd: float = 8.0
    kappa_st: float = 8.0
    kappa_td: float = 8.0
    eta: float = 0.1
    power: float = field(default_factory=lambda: dbm_to_watts(5.0))
    carrier: float = 870e6
    rel_antenna_gain_db: float = 10.0
    temperature: float = 290.0
    bandwidth: float = 48e6
    trials: int = 10_000
    seed: int = 0
    # load sets
    binary_structural_mode: complex = 0j
    varactor_count: int = 21
    varactor_arc: float = 120.0
    varactor_span: float = 60.0
    load_table: str | None = None
    # channel estimation
    coherence_symbols: float = 2.4e6
    alpha: float | None = None
    alpha_min: float = 0.01
    alpha_max: float = 0.11
    # gen2 timing and search
    blf: float = 40e3
    mu: int = 50
    configs_tested: int = 50
    repetitions: int = 3

    def __post_init__(self):
        positive = (
            "d_sd", "d_ris_sd", "d0", "exponent_sd", "exponent_st", "exponent_td",
            "power", "carrier", "temperature", "bandwidth", "coherence_symbols",
        )
        for name in positive:
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)!r}")
        for name in ("spacing_x", "spacing_y"):
            value = getattr(self, name)
            if value is not None and not value > 0:
                raise ValueError(f"{name} must be positive, got {value!r}")
        for name in ("kappa_sd", "kappa_st", "kappa_td"):
            if not getattr(self, name) >= 0:
                raise ValueError(f"{name} must be non-negative")
        if self.num_elements < 0:
            raise ValueError("num_elements must be non-negative")
        if self.num_loads < 2:
            raise ValueError("num_loads must be at least 2")
        if not 0 < self.eta <= 1:
            raise ValueError("eta must lie in (0, 1]")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if not 0 <= self.seed <= U64_MAX:
            raise ValueError("seed must be an unsigned 64-bit integer")

    @property
    def wavelength(self) -> float:
        return wavelength(self.carrier)

    @property
    def rel_antenna_gain(self) -> float:
        return 10.0 ** (self.rel_antenna_gain_db / 10.0)

    @property
    def noise(self) -> NoiseSpec:
        return NoiseSpec(self.temperature, self.bandwidth)

    def replace(self, **changes) -> "ScenarioConfig":
        return dataclasses.replace(self, **changes)

    def geometry(self) -> SurfaceGeometry:
        half = self.wavelength / 2.0
        return build_geometry(
            self.num_elements,
            self.spacing_x if self.spacing_x is not None else half,
            self.spacing_y if self.spacing_y is not None else half,
            self.d_sd,
            self.d_ris_sd,
            self.wavelength,
            self.d0,
            self.exponent_sd,
            self.exponent_st,
            self.exponent_td,
        )

    def binary_loads(self) -> LoadSet:
        return binary_load_set(self.eta, self.binary_structural_mode)

    def multi_loads(self) -> LoadSet:
        """The many-load set: from ``load_table`` if given, else synthesized."""
        if self.load_table:
            table = read_load_table(self.load_table)
            return LoadSet(table.gammas, table.structural_mode, self.eta)
        return synth_varactor_set(self.varactor_count, self.varactor_arc, eta=self.eta, target_span=self.varactor_span)

    def loads(self) -> LoadSet:
        return self.binary_loads() if self.num_loads == 2 else self.multi_loads()

    def draw(self, rng: np.random.Generator) -> ChannelSet:
        return draw_channels(self.num_elements, rng, self.kappa_sd, self.kappa_st, self.kappa_td)


@dataclass(frozen=True)
class LinkBudget:
    """Average gains of one deployment.

    ``path_gain[m]`` is ``eta L_ST L_TD G`` without the load factor, so that
    ``g_m = path_gain[m] * msd`` for any load set.
    """

    g0: float
    path_gain: np.ndarray
    noise_power: float
    tx_power: float

    def element_gains(self, loads: LoadSet) -> np.ndarray:
        return self.path_gain * mean_square_deviation(loads)

    def snr(self, loads: LoadSet) -> np.ndarray:
        """Per-channel SNR ``2 P g / (N0 B)``, direct channel first."""
        gains = np.concatenate([[self.g0], self.element_gains(loads)])
        return 2.0 * self.tx_power * gains / self.noise_power


def link_budget(cfg: ScenarioConfig, geometry: SurfaceGeometry | None = None) -> LinkBudget:
    geometry = geometry if geometry is not None else cfg.geometry()
    d_st, d_td = geometry.distances()
    lam = cfg.wavelength
    loss_st = path_losses(d_st, cfg.d0, cfg.exponent_st, lam)
    loss_td = path_losses(d_td, cfg.d0, cfg.exponent_td, lam)
    return LinkBudget(
        g0=path_loss(geometry.direct),
        path_gain=cfg.eta * loss_st * loss_td * cfg.rel_antenna_gain,
        noise_power=noise_power(cfg.noise),
        tx_power=cfg.power,
    )


def _convert(name: str, raw: str):
    raw = raw.strip()
    hint = str(ScenarioConfig.__dataclass_fields__[name].type)
    if raw.lower() in ("none", ""):
        if "None" not in hint:
            raise ValueError(f"{name} cannot be empty")
        return None
    if hint.startswith("complex"):
        parts = raw.replace(",", " ").split()
        return complex(float(parts[0]), float(parts[1]) if len(parts) > 1 else 0.0)
    if hint.startswith("int"):
        return int(raw, 0)
    if hint.startswith("str"):
        return raw
    return float(raw)


def load_config(path, **overrides) -> ScenarioConfig:
    """Read a ``key = value`` config file with per-module sections.

    Keys may appear in any of the known sections; ``power_dbm`` and
    ``spacing`` (``half_lambda`` or a length in meters) are accepted as
    conveniences. Keyword overrides are applied last.
    """
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    path = Path(path)
    if not parser.read(path):
        raise FileNotFoundError(f"cannot read config {path}")
    values: dict = {}
    fields = ScenarioConfig.__dataclass_fields__
    for section in parser.sections():
        if section not in SECTIONS:
            raise ValueError(f"{path}: unknown section [{section}]")
        for key, raw in parser.items(section):
            if key == "power_dbm":
                values["power"] = dbm_to_watts(float(raw))
            elif key == "spacing":
                if raw.strip() == "half_lambda":
                    values["spacing_x"] = values["spacing_y"] = None
                else:
                    values["spacing_x"] = values["spacing_y"] = float(raw)
            elif key in fields:
                values[key] = _convert(key, raw)
            else:
                raise ValueError(f"{path}: unknown key {key!r} in [{section}]")
    values.update({k: v for k, v in overrides.items() if v is not None})
    return ScenarioConfig(**values)


def alpha_policy(num_elements: int, coherence_symbols: float, lo: float = 0.01, hi: float = 0.11) -> float:
    """Pilot fraction: smallest whole percent covering ``M + 1`` pilots, clipped."""
    needed = math.ceil((num_elements + 1) / coherence_symbols * 100.0) / 100.0
    return min(hi, max(lo, needed))
