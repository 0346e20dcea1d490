"""Large-scale path loss, Rician small-scale fading and surface geometry.

All randomness goes through an explicit ``numpy.random.Generator`` so that
trials can be reproduced (and parallelised) from a seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

SPEED_OF_LIGHT = 299792458.0
BOLTZMANN = 1.380649e-23


def _require_positive(name: str, value: float) -> None:
    if not value > 0:
        raise ValueError(f"{name} must be positive, got {value!r}")


@dataclass(frozen=True)
class LinkGeometry:
    """Distance and propagation parameters of one link.

    Attributes
    ----------
    distance : float
        Link length in meters.
    ref_distance : float
        Reference distance ``d0`` in meters.
    exponent : float
        Path-loss exponent.
    wavelength : float
        Carrier wavelength in meters.
    """

    distance: float
    ref_distance: float
    exponent: float
    wavelength: float

    def __post_init__(self):
        for name in ("distance", "ref_distance", "exponent", "wavelength"):
            _require_positive(name, getattr(self, name))


@dataclass(frozen=True)
class RicianSpec:
    """Rician fading parameters: K-factor and total mean power E[|h|^2]."""

    kappa: float = 0.0
    mean_power: float = 1.0

    def __post_init__(self):
        if not self.kappa >= 0:
            raise ValueError(f"kappa must be non-negative, got {self.kappa!r}")
        _require_positive("mean_power", self.mean_power)


@dataclass(frozen=True)
class NoiseSpec:
    temperature: float = 290.0
    bandwidth: float = 48e6
    boltzmann: float = BOLTZMANN

    def __post_init__(self):
        _require_positive("temperature", self.temperature)
        _require_positive("bandwidth", self.bandwidth)


@dataclass(frozen=True)
class ChannelSet:
    """One realization of the direct and per-element channels.

    ``h_st`` and ``h_td`` are the per-hop coefficients and ``h_cascade`` their
    elementwise product. Estimated channel sets only know the cascade, in
    which case the per-hop arrays are ``None``.
    """

    h0: complex
    h_cascade: np.ndarray
    h_st: np.ndarray | None = None
    h_td: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "h_cascade", np.asarray(self.h_cascade, dtype=complex))
        if (self.h_st is None) != (self.h_td is None):
            raise ValueError("h_st and h_td must be given together")
        if self.h_st is not None:
            h_st = np.asarray(self.h_st, dtype=complex)
            h_td = np.asarray(self.h_td, dtype=complex)
            if h_st.shape != self.h_cascade.shape or h_td.shape != self.h_cascade.shape:
                raise ValueError("per-hop channel shapes do not match the cascade")
            if not np.array_equal(h_st * h_td, self.h_cascade):
                raise ValueError("h_cascade must equal h_st * h_td")
            object.__setattr__(self, "h_st", h_st)
            object.__setattr__(self, "h_td", h_td)

    @classmethod
    def from_hops(cls, h0: complex, h_st, h_td) -> "ChannelSet":
        h_st = np.asarray(h_st, dtype=complex)
        h_td = np.asarray(h_td, dtype=complex)
        return cls(h0=complex(h0), h_cascade=cascade(h_st, h_td), h_st=h_st, h_td=h_td)

    @property
    def num_elements(self) -> int:
        return self.h_cascade.shape[0]


def wavelength(carrier_freq: float) -> float:
    """Free-space wavelength in meters for a carrier frequency in hertz."""
    _require_positive("carrier_freq", carrier_freq)
    return SPEED_OF_LIGHT / carrier_freq


def path_loss(geom: LinkGeometry) -> float:
    """Linear large-scale power gain ``(lambda / (4 pi d0))^2 (d0 / d)^v``.

    The proportionality constant of the simplified path-loss model is one,
    so the value at ``d == d0`` is exactly the free-space loss at ``d0``.
    """
    free_space = (geom.wavelength / (4.0 * math.pi * geom.ref_distance)) ** 2
    return free_space * (geom.ref_distance / geom.distance) ** geom.exponent


def path_losses(distances, ref_distance: float, exponent: float, wavelength: float) -> np.ndarray:
    """Vectorized :func:`path_loss` over an array of distances."""
    distances = np.asarray(distances, dtype=float)
    if np.any(distances <= 0):
        raise ValueError("distances must be positive")
    for name, value in (("ref_distance", ref_distance), ("exponent", exponent), ("wavelength", wavelength)):
        _require_positive(name, value)
    free_space = (wavelength / (4.0 * math.pi * ref_distance)) ** 2
    return free_space * (ref_distance / distances) ** exponent


def sample_rician(spec: RicianSpec, rng: np.random.Generator, size=None, los_phase=None):
    """Draw Rician-faded complex coefficients.

    Parameters
    ----------
    spec : RicianSpec
        K-factor and mean power.
    rng : numpy.random.Generator
        Random stream.
    size : int or tuple, optional
        Output shape; ``None`` returns a Python complex.
    los_phase : float or array, optional
        Phase of the line-of-sight term. Drawn uniformly in ``[0, 2 pi)``
        per sample when omitted.

    Returns
    -------
    complex or numpy.ndarray
    """
    shape = () if size is None else size
    kappa = spec.kappa
    if los_phase is None:
        los_phase = rng.uniform(0.0, 2.0 * math.pi, size=shape)
    if math.isinf(kappa):
        los_amp, scatter_var = math.sqrt(spec.mean_power), 0.0
    else:
        los_amp = math.sqrt(kappa / (kappa + 1.0) * spec.mean_power)
        scatter_var = spec.mean_power / (kappa + 1.0)
    scatter = rng.standard_normal(size=shape) + 1j * rng.standard_normal(size=shape)
    h = los_amp * np.exp(1j * np.asarray(los_phase)) + math.sqrt(scatter_var / 2.0) * scatter
    if size is None:
        return complex(h)
    return h


def cascade(h_st, h_td):
    """Cascaded source-tag-destination coefficient."""
    return h_st * h_td


def noise_power(spec: NoiseSpec) -> float:
    """Thermal noise power ``k_b T B`` in watts."""
    return spec.boltzmann * spec.temperature * spec.bandwidth


def draw_channels(
    num_elements: int,
    rng: np.random.Generator,
    kappa_sd: float = 0.0,
    kappa_st: float = 0.0,
    kappa_td: float = 0.0,
    mean_power: float = 1.0,
) -> ChannelSet:
    """Independent Rician realization of every link of the surface.

    The LoS phase is drawn once per link and realization.
    """
    h0 = sample_rician(RicianSpec(kappa_sd, mean_power), rng)
    h_st = sample_rician(RicianSpec(kappa_st, mean_power), rng, size=num_elements)
    h_td = sample_rician(RicianSpec(kappa_td, mean_power), rng, size=num_elements)
    return ChannelSet.from_hops(h0, h_st, h_td)


@dataclass(frozen=True)
class SurfaceGeometry:
    """Positions and per-link geometries of a surface deployment.

    The surface lies in the ``y = 0`` plane, centered at the origin; source and
    destination sit at ``y = d_ris_sd`` on a line parallel to the x axis.
    """

    positions: np.ndarray
    source: np.ndarray
    destination: np.ndarray
    direct: LinkGeometry
    source_to_tag: tuple[LinkGeometry, ...] = field(repr=False)
    tag_to_dest: tuple[LinkGeometry, ...] = field(repr=False)
    grid_shape: tuple[int, int] = (0, 0)

    @property
    def num_elements(self) -> int:
        return len(self.source_to_tag)

    def distances(self) -> tuple[np.ndarray, np.ndarray]:
        d_st = np.array([g.distance for g in self.source_to_tag], dtype=float)
        d_td = np.array([g.distance for g in self.tag_to_dest], dtype=float)
        return d_st, d_td


def grid_shape(num_elements: int) -> tuple[int, int]:
    """Near-square ``(rows, cols)`` grid holding ``num_elements`` cells."""
    if num_elements == 0:
        return (0, 0)
    cols = math.ceil(math.sqrt(num_elements))
    rows = math.ceil(num_elements / cols)
    return rows, cols


def build_geometry(
    num_elements: int,
    spacing_x: float,
    spacing_y: float,
    d_sd: float,
    d_ris_sd: float,
    wavelength: float,
    ref_distance: float = 3.0,
    exponent_sd: float = 3.0,
    exponent_st: float = 3.0,
    exponent_td: float = 3.0,
) -> SurfaceGeometry:
    """Lay out the surface grid and compute every link distance.

    Elements fill a ``rows x cols`` grid row-major, with ``cols`` equal to
    ``ceil(sqrt(M))``; the full grid is centered at the origin.
    """
    if num_elements < 0:
        raise ValueError("num_elements must be non-negative")
    for name, value in (("spacing_x", spacing_x), ("spacing_y", spacing_y), ("d_sd", d_sd), ("d_ris_sd", d_ris_sd)):
        _require_positive(name, value)

    rows, cols = grid_shape(num_elements)
    idx = np.arange(num_elements)
    row, col = np.divmod(idx, cols) if cols else (idx, idx)
    x = (col - (cols - 1) / 2.0) * spacing_x
    z = (row - (rows - 1) / 2.0) * spacing_y
    positions = np.column_stack([x, np.zeros(num_elements), z]).astype(float)

    source = np.array([-d_sd / 2.0, d_ris_sd, 0.0])
    destination = np.array([d_sd / 2.0, d_ris_sd, 0.0])
    d_st = np.linalg.norm(positions - source, axis=1)
    d_td = np.linalg.norm(positions - destination, axis=1)

    return SurfaceGeometry(
        positions=positions,
        source=source,
        destination=destination,
        direct=LinkGeometry(d_sd, ref_distance, exponent_sd, wavelength),
        source_to_tag=tuple(LinkGeometry(float(d), ref_distance, exponent_st, wavelength) for d in d_st),
        tag_to_dest=tuple(LinkGeometry(float(d), ref_distance, exponent_td, wavelength) for d in d_td),
        grid_shape=(rows, cols),
    )
