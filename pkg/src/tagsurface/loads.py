"""Tag load sets, structural mode and the normalized modulation alphabet."""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np


class DegenerateLoadSetError(ValueError):
    """All reflection coefficients coincide with the structural mode."""


@dataclass(frozen=True)
class LoadSet:
    """K reflection coefficients of one tag plus its structural mode.

    Attributes
    ----------
    gammas : numpy.ndarray
        Complex reflection coefficients, one per load, ``|gamma| <= 1``.
    structural_mode : complex
        Load-independent scattering term ``A_s``.
    eta : float
        Power scattering efficiency in ``(0, 1]``.
    """

    gammas: np.ndarray
    structural_mode: complex = 0j
    eta: float = 1.0

    def __post_init__(self):
        gammas = np.atleast_1d(np.asarray(self.gammas, dtype=complex))
        if gammas.ndim != 1 or gammas.size == 0:
            raise ValueError("load set needs a non-empty 1-D array of reflection coefficients")
        if gammas.size < 2:
            raise ValueError(f"a load set needs at least two loads, got {gammas.size}")
        if np.any(np.abs(gammas) > 1.0 + 1e-12):
            raise ValueError("passive loads require |gamma| <= 1")
        if not 0.0 < self.eta <= 1.0:
            raise ValueError(f"eta must lie in (0, 1], got {self.eta!r}")
        object.__setattr__(self, "gammas", gammas)
        object.__setattr__(self, "structural_mode", complex(self.structural_mode))
        if mean_square_deviation(self) <= 0.0:
            raise DegenerateLoadSetError("every load equals the structural mode")

    @property
    def size(self) -> int:
        return self.gammas.size


@dataclass(frozen=True)
class ModulationAlphabet:
    symbols: np.ndarray
    norm_factor: float

    @property
    def size(self) -> int:
        return self.symbols.size


def mean_square_deviation(loads: LoadSet) -> float:
    """Mean of ``|A_s - gamma_k|^2`` over the K loads (uniform load usage)."""
    gammas = np.asarray(loads.gammas)
    if gammas.size == 0:
        raise ValueError("empty load set")
    return float(np.mean(np.abs(loads.structural_mode - gammas) ** 2))


def modulation_alphabet(loads: LoadSet) -> ModulationAlphabet:
    """Unit mean-square symbols ``(A_s - gamma_k) / sqrt(msd)``."""
    msd = mean_square_deviation(loads)
    if msd <= 0.0:
        raise DegenerateLoadSetError("zero mean-square deviation")
    zeta = math.sqrt(msd)
    return ModulationAlphabet(symbols=(loads.structural_mode - loads.gammas) / zeta, norm_factor=zeta)


def binary_load_set(eta: float = 1.0, structural_mode: complex = 0j) -> LoadSet:
    """Commercial two-load tag: gamma in {+1, -1}."""
    return LoadSet(np.array([1.0, -1.0], dtype=complex), structural_mode, eta)


def angular_span(points) -> float:
    """Smallest arc (degrees) containing the arguments of ``points``."""
    angles = np.sort(np.mod(np.angle(np.asarray(points, dtype=complex)), 2 * math.pi))
    if angles.size < 2:
        return 0.0
    gaps = np.diff(np.concatenate([angles, angles[:1] + 2 * math.pi]))
    return math.degrees(2 * math.pi - gaps.max())


def arc_gammas(count: int, arc_span: float, axis: float = 0.0) -> np.ndarray:
    """``count`` unit-magnitude coefficients evenly spaced over an arc (degrees)."""
    if count < 2:
        raise ValueError(f"count must be at least 2, got {count}")
    if not 0.0 < arc_span <= 360.0:
        raise ValueError(f"arc_span must lie in (0, 360], got {arc_span}")
    half = math.radians(arc_span) / 2.0
    endpoint = arc_span < 360.0
    offsets = np.linspace(-half, half, count, endpoint=endpoint)
    return np.exp(1j * (math.radians(axis) + offsets))


def calibrate_structural_mode(
    gammas,
    target_span: float = 60.0,
    axis: float = 0.0,
    tol: float = 1e-10,
) -> complex:
    """Real-axis structural mode giving a ``target_span`` degree arc of ``A_s - gamma``.

    The structural mode is placed on the far side of the origin from the
    coefficient arc, ``A_s = -a * exp(j axis)``; growing ``a`` shrinks the span
    of ``A_s - gamma_k`` monotonically, so ``a`` is found by bisection.
    """
    gammas = np.asarray(gammas, dtype=complex)
    direction = -np.exp(1j * math.radians(axis))

    def span(a: float) -> float:
        return angular_span(a * direction - gammas)

    lo, hi = 0.0, 1.0
    if span(lo) <= target_span:
        raise ValueError("coefficient arc is already narrower than the target span")
    while span(hi) > target_span:
        hi *= 2.0
        if hi > 1e12:
            raise ValueError("target span not reachable")
    while hi - lo > tol * max(1.0, hi):
        mid = 0.5 * (lo + hi)
        if span(mid) > target_span:
            lo = mid
        else:
            hi = mid
    return complex(0.5 * (lo + hi) * direction)


def synth_varactor_set(
    count: int = 21,
    arc_span: float = 120.0,
    structural_mode: complex | None = None,
    eta: float = 1.0,
    axis: float = 0.0,
    target_span: float = 60.0,
) -> LoadSet:
    """Synthetic varactor-style load set on a circular arc.

    Parameters
    ----------
    count : int
        Number of loads.
    arc_span : float
        Angular extent of the reflection coefficients, in degrees.
    structural_mode : complex, optional
        Explicit ``A_s``. When omitted it is calibrated so that
        ``A_s - gamma_k`` spans ``target_span`` degrees.
    eta : float
        Scattering efficiency stored on the load set.
    axis : float
        Direction (degrees) of the arc center.
    target_span : float
        Calibration target for the default structural mode.
    """
    gammas = arc_gammas(count, arc_span, axis)
    if structural_mode is None:
        structural_mode = calibrate_structural_mode(gammas, target_span, axis)
    return LoadSet(gammas, structural_mode, eta)


def element_gain(eta: float, loss_st, loss_td, msd: float, rel_antenna_gain: float):
    """Average power gain ``eta * L_ST * L_TD * msd * G`` of one backscatter path.

    With ``eta = msd = rel_antenna_gain = loss_td = 1`` this is the direct-link
    gain ``g_0 = L_SD``. Accepts arrays for the two losses.
    """
    for name, value in (("eta", eta), ("msd", msd), ("rel_antenna_gain", rel_antenna_gain)):
        if not value > 0:
            raise ValueError(f"{name} must be positive, got {value!r}")
    if np.any(np.asarray(loss_st) <= 0) or np.any(np.asarray(loss_td) <= 0):
        raise ValueError("losses must be positive")
    return eta * loss_st * loss_td * msd * rel_antenna_gain


def read_load_table(path) -> LoadSet:
    """Parse a load table file.

    Format: ``#`` comments, header lines ``A_s = <re> <im>`` and ``eta = <x>``,
    then one ``<re> <im>`` line per reflection coefficient.
    """
    path = Path(path)
    structural_mode = 0j
    eta = 1.0
    gammas = []
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            if "=" in line:
                key, value = (s.strip() for s in line.split("=", 1))
                key = key.lower()
                if key in ("a_s", "as", "structural_mode"):
                    re, im = (float(v) for v in value.split())
                    structural_mode = complex(re, im)
                elif key == "eta":
                    eta = float(value)
                else:
                    raise ValueError(f"unknown header {key!r}")
            else:
                re, im = (float(v) for v in line.split())
                gammas.append(complex(re, im))
        except ValueError as exc:
            raise ValueError(f"{path}:{lineno}: {exc}") from None
    return LoadSet(np.array(gammas, dtype=complex), structural_mode, eta)


def write_load_table(loads: LoadSet, path) -> None:
    a_s = complex(loads.structural_mode)
    lines = [f"A_s = {a_s.real!r} {a_s.imag!r}", f"eta = {float(loads.eta)!r}"]
    lines += [f"{float(g.real)!r} {float(g.imag)!r}" for g in loads.gammas]
    Path(path).write_text("\n".join(lines) + "\n")
