"""Optimal load configuration of the surface.

The received amplitude ``|y0 + sum_m terms[m, c_m]|`` is maximized over all
``K**M`` configurations by sweeping an auxiliary phase ``phi`` over
``[0, 2 pi)``. For fixed ``phi`` every element independently picks the load
maximizing ``Re{exp(-j phi) terms[m, k]}``; that choice only changes at a
finite set of breakpoints, so sorting the breakpoints and walking the
intervals between them visits every candidate configuration that can be
optimal. Sorting dominates, giving ``O(M log M)`` for fixed ``K``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .channel import ChannelSet
from .loads import ModulationAlphabet

TWO_PI = 2.0 * math.pi
ANGLE_TOL = 1e-12
BRUTE_FORCE_LIMIT = 10**7


class CapacityError(RuntimeError):
    """Exhaustive search requested over too many configurations."""


@dataclass(frozen=True)
class ElementTerms:
    """Direct term ``y0`` and the ``(M, K)`` table of per-load element terms."""

    y0: complex
    terms: np.ndarray

    def __post_init__(self):
        terms = np.asarray(self.terms, dtype=complex)
        if terms.ndim == 1 and terms.size == 0:
            terms = terms.reshape(0, 2)
        if terms.ndim != 2:
            raise ValueError("terms must be a 2-D (M, K) array")
        object.__setattr__(self, "terms", terms)
        object.__setattr__(self, "y0", complex(self.y0))

    @property
    def num_elements(self) -> int:
        return self.terms.shape[0]

    @property
    def num_loads(self) -> int:
        return self.terms.shape[1]

    def rotated(self, factor: complex) -> "ElementTerms":
        return ElementTerms(self.y0 * factor, self.terms * factor)


class Solution(NamedTuple):
    config: np.ndarray
    amplitude: float


def element_terms(channels: ChannelSet, g0: float, gains, alphabet: ModulationAlphabet) -> ElementTerms:
    """Build ``y0 = sqrt(g0) h0`` and ``terms[m, k] = sqrt(g_m) h_m Y_k``."""
    gains = np.asarray(gains, dtype=float)
    h = channels.h_cascade
    if gains.shape != h.shape:
        raise ValueError(f"got {gains.size} gains for {h.size} elements")
    coeffs = np.sqrt(gains) * h
    return ElementTerms(math.sqrt(g0) * channels.h0, coeffs[:, None] * alphabet.symbols[None, :])


def received_amplitude(terms: ElementTerms, config) -> float:
    """``|y0 + sum_m terms[m, config[m]]|``."""
    config = np.asarray(config)
    m, k = terms.terms.shape
    if config.shape != (m,):
        raise ValueError(f"configuration has shape {config.shape}, expected ({m},)")
    if m and (config.min() < 0 or config.max() >= k):
        raise ValueError("load index out of range")
    return abs(terms.y0 + terms.terms[np.arange(m), config].sum())


def load_decision(phi: float, terms_m) -> int:
    """Two-load decision at auxiliary phase ``phi``; ties go to load 0."""
    diff = terms_m[0] - terms_m[1]
    return 0 if math.cos(phi - np.angle(diff)) >= 0 else 1


def _wrap(angles):
    angles = np.mod(angles, TWO_PI)
    return np.where(angles >= TWO_PI, angles - TWO_PI, angles)


def breakpoints_k2(terms: ElementTerms) -> np.ndarray:
    """Sorted phases where some two-load decision flips.

    Elements whose two terms coincide never flip and contribute nothing.
    """
    if terms.num_loads != 2:
        raise ValueError("breakpoints_k2 needs exactly two loads per element")
    diff = terms.terms[:, 0] - terms.terms[:, 1]
    angle = np.angle(diff[diff != 0])
    return np.sort(_wrap(np.concatenate([angle - math.pi / 2, angle + math.pi / 2])))


def _sweep(y0, table, elem, angle, after, init) -> Solution:
    """Walk all breakpoints in phase order and keep the best configuration.

    ``elem``, ``angle`` and ``after`` describe one event per breakpoint: the
    element switching and the load it holds on the interval that follows.
    ``init`` is the configuration at ``phi = 0``.
    """
    m = table.shape[0]
    rows = np.arange(m)
    total = y0 + table[rows, init].sum()
    if angle.size == 0:
        return Solution(init.copy(), float(abs(total)))

    # previous load of each event, following the element's own phase order
    own = np.lexsort((angle, elem))
    elem_o, after_o = elem[own], after[own]
    prev_o = np.empty_like(after_o)
    prev_o[1:] = after_o[:-1]
    first = np.ones(elem_o.size, dtype=bool)
    first[1:] = elem_o[1:] != elem_o[:-1]
    prev_o[first] = init[elem_o[first]]
    prev = np.empty_like(prev_o)
    prev[own] = prev_o

    order = np.argsort(angle, kind="stable")
    e, a = elem[order], angle[order]
    delta = table[e, after[order]] - table[e, prev[order]]
    running = total + np.cumsum(delta)

    # coincident breakpoints are applied together before scoring
    group_end = np.ones(a.size, dtype=bool)
    group_end[:-1] = np.diff(a) > ANGLE_TOL
    ends = np.flatnonzero(group_end)
    power = np.abs(running[ends]) ** 2
    best = int(np.argmax(power))

    config = init.copy()
    if power[best] > abs(total) ** 2:
        stop = ends[best] + 1
        last = np.full(m, -1)
        np.maximum.at(last, e[:stop], np.arange(stop))
        hit = last >= 0
        config[hit] = after[order][last[hit]]
    return Solution(config, received_amplitude(ElementTerms(y0, table), config))


def optimal_config_k2(terms: ElementTerms) -> Solution:
    """Exact optimum for two loads per element in ``O(M log M)``."""
    if terms.num_loads != 2:
        raise ValueError("optimal_config_k2 needs exactly two loads per element")
    table = terms.terms
    diff = table[:, 0] - table[:, 1]
    init = np.where(diff.real >= 0, 0, 1)
    live = np.flatnonzero(diff != 0)
    base = np.angle(diff[live])
    elem = np.concatenate([live, live])
    angle = _wrap(np.concatenate([base - math.pi / 2, base + math.pi / 2]))
    # past base - pi/2 load 0 wins, past base + pi/2 load 1 wins
    after = np.concatenate([np.zeros(live.size, dtype=int), np.ones(live.size, dtype=int)])
    return _sweep(terms.y0, table, elem, angle, after, init)


def _envelope_events(table: np.ndarray):
    """Upper-envelope switch phases of every element of an ``(M, K)`` table.

    Returns flat ``(elem, angle, after)`` arrays, per-element duplicates removed,
    and the ``phi = 0`` choices.
    """
    m, k = table.shape
    init = np.argmax(table.real, axis=1) if k else np.zeros(m, dtype=int)
    if m == 0 or k < 2:
        empty = np.zeros(0, dtype=int)
        return empty, np.zeros(0), empty, init

    i, j = np.triu_indices(k, 1)
    diff = table[:, i] - table[:, j]
    base = np.angle(diff)
    cand = _wrap(np.concatenate([base - math.pi / 2, base + math.pi / 2], axis=1))
    pair_ok = np.concatenate([diff != 0, diff != 0], axis=1)
    pi2 = np.concatenate([i, i])

    # crossing is on the envelope iff the crossing pair attains the maximum there
    rot = np.exp(-1j * cand)
    vals = (rot[:, :, None] * table[:, None, :]).real
    top = vals.max(axis=2)
    at_pair = vals[np.arange(m)[:, None], np.arange(cand.shape[1])[None, :], pi2[None, :]]
    scale = np.abs(table).max(axis=1, keepdims=True)
    keep = pair_ok & (at_pair >= top - 1e-11 * scale)

    elem, col = np.nonzero(keep)
    angle = cand[elem, col]
    order = np.lexsort((angle, elem))
    elem, angle = elem[order], angle[order]
    dup = np.zeros(elem.size, dtype=bool)
    dup[1:] = (elem[1:] == elem[:-1]) & (np.diff(angle) <= ANGLE_TOL)
    elem, angle = elem[~dup], angle[~dup]

    after = _choice_after(table, elem, angle)
    return elem, angle, after, init


def _choice_after(table, elem, angle):
    """Envelope argmax just past each breakpoint (midpoint to the next one)."""
    if elem.size == 0:
        return np.zeros(0, dtype=int)
    nxt = np.arange(1, elem.size + 1)
    nxt[-1] = 0
    last = np.ones(elem.size, dtype=bool)
    last[:-1] = elem[1:] != elem[:-1]
    # the last breakpoint of an element wraps to its first one
    starts = np.flatnonzero(np.concatenate([[True], elem[1:] != elem[:-1]]))
    group_start = starts[np.searchsorted(starts, np.arange(elem.size), side="right") - 1]
    nxt[last] = group_start[last]
    upper = np.where(last, angle[nxt] + TWO_PI, angle[nxt])
    mid = 0.5 * (angle + upper)
    vals = (np.exp(-1j * mid)[:, None] * table[elem]).real
    return np.argmax(vals, axis=1)


def envelope_breakpoints(terms_m) -> np.ndarray:
    """Sorted phases in ``[0, 2 pi)`` where the best load of one element changes."""
    table = np.asarray(terms_m, dtype=complex).reshape(1, -1)
    if table.shape[1] < 2:
        raise ValueError("need at least two loads")
    _, angle, _, _ = _envelope_events(table)
    return angle


def optimal_config_general(terms: ElementTerms) -> Solution:
    """Exact optimum for any number of loads per element."""
    if terms.num_loads < 2:
        raise ValueError("need at least two loads per element")
    elem, angle, after, init = _envelope_events(terms.terms)
    return _sweep(terms.y0, terms.terms, elem, angle, after, init)


def optimal_config_factored(y0: complex, coeffs, symbols) -> Solution:
    """Exact optimum when ``terms[m, k] = coeffs[m] * symbols[k]``.

    Every element shares the alphabet's envelope, rotated by ``arg(coeffs[m])``,
    so the envelope is computed once instead of per element.
    """
    coeffs = np.asarray(coeffs, dtype=complex)
    symbols = np.asarray(symbols, dtype=complex)
    table = coeffs[:, None] * symbols[None, :]
    if symbols.size < 2:
        raise ValueError("need at least two loads per element")
    _, base_angle, base_after, _ = _envelope_events(symbols.reshape(1, -1))
    live = np.flatnonzero(coeffs != 0)
    elem = np.repeat(live, base_angle.size)
    angle = _wrap((base_angle[None, :] + np.angle(coeffs[live])[:, None]).ravel())
    after = np.tile(base_after, live.size)
    init = np.argmax(table.real, axis=1)
    init[coeffs == 0] = 0
    return _sweep(complex(y0), table, elem, angle, after, init)


def optimize(terms: ElementTerms) -> Solution:
    if terms.num_loads == 2:
        return optimal_config_k2(terms)
    return optimal_config_general(terms)


def brute_force(terms: ElementTerms, limit: int = BRUTE_FORCE_LIMIT, chunk: int = 1 << 16) -> Solution:
    """Exhaustive search; ties resolve to the lexicographically smallest config."""
    m, k = terms.terms.shape
    total = k**m
    if total > limit:
        raise CapacityError(f"{k}**{m} = {total} configurations exceeds the limit of {limit}")
    if m == 0:
        return Solution(np.zeros(0, dtype=int), abs(terms.y0))
    weights = k ** np.arange(m - 1, -1, -1)
    best_power, best_index = -1.0, 0
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total))
        digits = (idx[:, None] // weights[None, :]) % k
        sums = terms.y0 + terms.terms[np.arange(m)[None, :], digits].sum(axis=1)
        power = sums.real**2 + sums.imag**2
        pos = int(np.argmax(power))
        if power[pos] > best_power:
            best_power, best_index = float(power[pos]), int(idx[pos])
    config = (best_index // weights) % k
    return Solution(config, received_amplitude(terms, config))


def dump_instance(terms: ElementTerms, path) -> None:
    """Write ``terms`` as text: the ``y0`` pair, then one line of K pairs per element."""
    lines = [f"{terms.y0.real!r} {terms.y0.imag!r}"]
    for row in terms.terms:
        lines.append(" ".join(f"{float(z.real)!r} {float(z.imag)!r}" for z in row))
    Path(path).write_text("\n".join(lines) + "\n")


def load_instance(path) -> ElementTerms:
    rows = []
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        values = [float(v) for v in line.split()]
        if len(values) % 2:
            raise ValueError(f"{path}:{lineno}: odd number of values")
        rows.append(np.array(values[0::2]) + 1j * np.array(values[1::2]))
    if not rows or rows[0].size != 1:
        raise ValueError(f"{path}: first line must hold the single direct term")
    body = rows[1:]
    if body and len({r.size for r in body}) != 1:
        raise ValueError(f"{path}: elements have differing load counts")
    table = np.vstack(body) if body else np.zeros((0, 2), dtype=complex)
    return ElementTerms(complex(rows[0][0]), table)
