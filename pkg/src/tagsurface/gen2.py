"""Reader-side control of the tag surface through Gen2 commands.

Models the observable effects only: Select commands toggle SL flags, a
single-slot Query makes every selected tag answer at once, and the
superposed preamble of those answers reveals the received power of the
configuration. No line coding, CRC or slot counting.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .channel import ChannelSet
from .loads import ModulationAlphabet
from .optimizer import ElementTerms, element_terms, optimal_config_k2

EPC_BITS = 96
RN16_BITS = 16
PREAMBLE = (1, 0, 1, 0, 1, 1)

ACTION_ASSERT = 0b001
ACTION_ASSERT_DEASSERT = 0b000
BLF_RANGE = (40e3, 640e3)

EVENTS = ("select", "query", "preamble", "rn16", "ack", "delay")


@dataclass(frozen=True)
class TagRecord:
    epc: str
    element_index: int
    sl_flag: bool = False

    def __post_init__(self):
        if set(self.epc) - {"0", "1"}:
            raise ValueError("EPC must be a bit string")


@dataclass(frozen=True)
class SelectCommand:
    """Select with a 3-bit action and a bit mask compared at ``mask_offset``.

    ``broadcast`` marks a mask chosen to match no tag; combined with action
    ``000`` it deasserts the whole population.
    """

    action: int = ACTION_ASSERT
    mask: str = ""
    mask_offset: int = 0
    broadcast: bool = False

    def __post_init__(self):
        if self.action not in (ACTION_ASSERT, ACTION_ASSERT_DEASSERT):
            raise ValueError(f"unsupported Select action {self.action:03b}")
        if set(self.mask) - {"0", "1"}:
            raise ValueError("mask must be a bit string")
        if self.mask_offset < 0:
            raise ValueError("mask offset must be non-negative")


def select_matches(cmd: SelectCommand, tag: TagRecord) -> bool:
    end = cmd.mask_offset + len(cmd.mask)
    if end > len(tag.epc):
        raise ValueError(f"mask bits {cmd.mask_offset}..{end} fall outside a {len(tag.epc)}-bit EPC")
    if cmd.broadcast:
        return False
    return tag.epc[cmd.mask_offset:end] == cmd.mask


def apply_select(cmd: SelectCommand, population: list[TagRecord]) -> list[TagRecord]:
    """Return the population after one Select.

    Action ``001`` asserts matching tags and leaves the rest alone; action
    ``000`` asserts matching tags and deasserts all others.
    """
    updated = []
    for tag in population:
        if select_matches(cmd, tag):
            updated.append(replace(tag, sl_flag=True))
        elif cmd.action == ACTION_ASSERT_DEASSERT:
            updated.append(replace(tag, sl_flag=False))
        else:
            updated.append(tag)
    return updated


def assert_command(tag: TagRecord) -> SelectCommand:
    return SelectCommand(ACTION_ASSERT, tag.epc, 0)


def deassert_all_command() -> SelectCommand:
    return SelectCommand(ACTION_ASSERT_DEASSERT, "", 0, broadcast=True)


def configuration_commands(selected, population: list[TagRecord]) -> list[SelectCommand]:
    """Selects that assert exactly ``selected`` (element indices), one tag at a time."""
    by_index = {tag.element_index: tag for tag in population}
    return [assert_command(by_index[m]) for m in sorted(selected)]


def random_population(num_tags: int, rng: np.random.Generator, epc_bits: int = EPC_BITS) -> list[TagRecord]:
    """Tags with distinct random EPCs, element indices ``0..num_tags-1``."""
    seen: set[str] = set()
    tags = []
    while len(tags) < num_tags:
        epc = "".join("1" if b else "0" for b in rng.integers(0, 2, size=epc_bits))
        if epc not in seen:
            seen.add(epc)
            tags.append(TagRecord(epc, len(tags)))
    return tags


def read_epc_file(path) -> list[TagRecord]:
    """One hexadecimal EPC per line; blank lines and ``#`` comments ignored."""
    tags = []
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        bits = bin(int(line, 16))[2:].zfill(4 * len(line))
        tags.append(TagRecord(bits, len(tags)))
    if len({t.epc for t in tags}) != len(tags):
        raise ValueError(f"{path}: duplicate EPCs")
    return tags


def write_epc_file(population: list[TagRecord], path) -> None:
    lines = [f"{int(t.epc, 2):0{len(t.epc) // 4}X}" for t in population]
    Path(path).write_text("\n".join(lines) + "\n")


@dataclass(frozen=True)
class Gen2Timing:
    """Reader timing; Select and power-up durations default to 61 and 184 BLF periods."""

    blf: float = 40e3
    t_select: float | None = None
    t4: float = 0.15e-3
    t_delay: float = 30e-3
    t_pu: float | None = None

    def __post_init__(self):
        lo, hi = BLF_RANGE
        if not lo <= self.blf <= hi:
            raise ValueError(f"BLF must lie in [{lo:g}, {hi:g}] Hz, got {self.blf:g}")
        if self.t_select is None:
            object.__setattr__(self, "t_select", 61.0 / self.blf)
        if self.t_pu is None:
            object.__setattr__(self, "t_pu", 184.0 / self.blf)
        for name in ("t_select", "t4", "t_delay", "t_pu"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")

    @property
    def symbol(self) -> float:
        return 1.0 / self.blf


def config_switch_time(mu: int, timing: Gen2Timing) -> float:
    """Time between the last reply of one configuration and the first of the next.

    ``mu`` asserting Selects plus one deasserting Select, each followed by the
    ``T4`` gap, then the quiet period and the power-up.
    """
    if mu < 1:
        raise ValueError("mu must be at least 1")
    return (mu + 1) * (timing.t_select + timing.t4) + timing.t_delay + timing.t_pu


@dataclass
class ConfigurationTrace:
    time: list[float] = field(default_factory=list)
    event: list[str] = field(default_factory=list)
    power: list[float] = field(default_factory=list)

    def add(self, t: float, event: str, power: float) -> None:
        if self.time and not t > self.time[-1]:
            raise ValueError("trace timestamps must increase")
        self.time.append(t)
        self.event.append(event)
        self.power.append(power)

    def segment(self, event: str) -> np.ndarray:
        return np.array([p for p, e in zip(self.power, self.event) if e == event])

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["time_s", "event", "power_w", "power_dbm"])
            for t, e, p in zip(self.time, self.event, self.power):
                dbm = 10 * math.log10(p * 1e3) if p > 0 else -math.inf
                writer.writerow([f"{t:.6g}", e, f"{p:.6g}", f"{dbm:.6g}"])


def _level(terms: ElementTerms, loads: dict[int, int]) -> float:
    total = terms.y0
    for m, k in loads.items():
        total += terms.terms[m, k]
    return abs(total) ** 2


def inventory_power_trace(
    selected,
    channels: ChannelSet,
    g0: float,
    gains,
    alphabet: ModulationAlphabet,
    tx_power: float,
    rn16_bits=None,
    rng: np.random.Generator | None = None,
    rounds: int = 1,
    timing: Gen2Timing | None = None,
    idle_load: int | None = 1,
) -> ConfigurationTrace:
    """Destination power, symbol by symbol, over one surface configuration.

    Parameters
    ----------
    selected : iterable of int
        Elements whose SL flag is asserted.
    channels, g0, gains, alphabet
        Channel realization and link gains; the alphabet must have two loads.
    tx_power : float
        Source power ``P`` in watts; powers are ``2 P |y|^2``.
    rn16_bits : mapping or array, optional
        16 bits per selected tag and round, shape ``(rounds, len(selected), 16)``.
        Drawn from ``rng`` when omitted.
    idle_load : int or None
        Load held by tags that are not replying, load 1 by default. ``None``
        leaves them out of the sum entirely.

    Returns
    -------
    ConfigurationTrace
    """
    if alphabet.size != 2:
        raise ValueError("backscatter replies need a two-load alphabet")
    timing = timing or Gen2Timing()
    selected = sorted(set(int(m) for m in selected))
    terms = element_terms(channels, g0, gains, alphabet)
    if any(m < 0 or m >= terms.num_elements for m in selected):
        raise ValueError("selected element out of range")
    if rn16_bits is None:
        rng = rng if rng is not None else np.random.default_rng()
        rn16_bits = rng.integers(0, 2, size=(rounds, len(selected), RN16_BITS))
    rn16_bits = np.asarray(rn16_bits, dtype=int).reshape(rounds, len(selected), RN16_BITS)

    idle = {} if idle_load is None else {m: idle_load for m in range(terms.num_elements)}
    scale = 2.0 * tx_power
    quiet = scale * _level(terms, idle)
    trace = ConfigurationTrace()
    t = 0.0

    def command(name: str, duration: float) -> None:
        nonlocal t
        trace.add(t, name, quiet)
        t += duration + timing.t4

    for _ in selected:
        command("select", timing.t_select)
    for r in range(rounds):
        command("query", timing.t_select)
        for bit in PREAMBLE:
            trace.add(t, "preamble", scale * _level(terms, {**idle, **{m: bit for m in selected}}))
            t += timing.symbol
        for s in range(RN16_BITS):
            loads = {m: int(rn16_bits[r, i, s]) for i, m in enumerate(selected)}
            trace.add(t, "rn16", scale * _level(terms, {**idle, **loads}))
            t += timing.symbol
        t += timing.t4
        command("ack", timing.t_select)
    command("select", timing.t_select)
    trace.add(t, "delay", quiet)
    return trace


def preamble_levels(terms: ElementTerms, selected) -> tuple[float, float]:
    """``|y|^2`` of both preamble levels, idle tags resting on load 1."""
    table = terms.terms
    rest = terms.y0 + table[:, 1].sum()
    sel = np.asarray(sorted(selected), dtype=int)
    flipped = rest + (table[sel, 0] - table[sel, 1]).sum()
    return abs(flipped) ** 2, abs(rest) ** 2


def random_search(
    terms: ElementTerms,
    mu: int,
    n_configs: int,
    repetitions: int,
    rng: np.random.Generator,
) -> np.ndarray:
    """Best power improvement (dB) found after each of ``n_configs`` random configurations.

    Every configuration asserts a uniformly random ``mu``-subset of tags; its
    power is the larger preamble level. The running maximum of each
    repetition is taken, then the maximum across repetitions.
    """
    if terms.num_loads != 2:
        raise ValueError("random search needs two loads per element")
    m = terms.num_elements
    if not 0 <= mu <= m:
        raise ValueError(f"mu must lie in [0, {m}], got {mu}")
    if n_configs < 1 or repetitions < 1:
        raise ValueError("n_configs and repetitions must be at least 1")
    table = terms.terms
    rest = terms.y0 + table[:, 1].sum()
    diff = table[:, 0] - table[:, 1]
    ref = abs(terms.y0) ** 2
    best = np.full(n_configs, -np.inf)
    for _ in range(repetitions):
        subsets = np.argsort(rng.random((n_configs, m)), axis=1)[:, :mu]
        flipped = rest + diff[subsets].sum(axis=1)
        power = np.maximum(np.abs(flipped) ** 2, abs(rest) ** 2)
        best = np.maximum(best, np.maximum.accumulate(power))
    return 10 * np.log10(best / ref)


def binary_optimum_db(terms: ElementTerms) -> float:
    """Best improvement (dB) over every two-state configuration of the surface."""
    return 10 * math.log10(optimal_config_k2(terms).amplitude ** 2 / abs(terms.y0) ** 2)
