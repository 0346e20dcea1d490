"""Monte Carlo studies of the surface and CSV output.

Every sweep point replays the same seeded random stream, so neighbouring
points see identical channel realizations (common random numbers) and
results do not depend on how points are spread over worker threads.
"""

from __future__ import annotations

import csv
import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .channel import draw_channels
from .estimation import estimation_trials
from .gen2 import binary_optimum_db, random_search
from .loads import LoadSet, modulation_alphabet
from .optimizer import ElementTerms, optimal_config_factored
from .scenario import ScenarioConfig, alpha_policy, link_budget

log = logging.getLogger(__name__)

THREADS_ENV = "TAGSURFACE_THREADS"
DENSE_SPACING = (0.1, 0.05)


@dataclass
class GainReport:
    """Table of results indexed by one sweep variable.

    ``columns`` keeps insertion order, which is also the CSV column order.
    """

    variable: str
    values: np.ndarray
    columns: dict[str, np.ndarray] = field(default_factory=dict)
    trials: int = 0

    def __getitem__(self, name: str) -> np.ndarray:
        return self.columns[name]

    def rows(self):
        names = list(self.columns)
        for i, value in enumerate(self.values):
            yield [value] + [self.columns[n][i] for n in names]


def _fmt(value) -> str:
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".6g")


def emit_csv(report: GainReport, path) -> Path:
    """Write ``report`` with a header row and 6 significant digits.

    Identical reports produce byte-identical files.
    """
    path = Path(path)
    try:
        with open(path, "w", newline="", encoding="ascii") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow([report.variable, *report.columns])
            for row in report.rows():
                writer.writerow([_fmt(v) for v in row])
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return path


def _threads() -> int:
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise ValueError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None


def _map(func, items):
    items = list(items)
    workers = min(_threads(), len(items)) or 1
    if workers == 1:
        return [func(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))


def _rng(cfg: ScenarioConfig) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(cfg.seed))


def _to_db(x) -> np.ndarray:
    return 10.0 * np.log10(x)


def _summarize(gains: np.ndarray) -> tuple[float, float, float]:
    """dB of the mean, mean of the dB values, and 95% halfwidth of the mean in dB."""
    mean = gains.mean()
    half = 1.96 * gains.std(ddof=1) / math.sqrt(gains.size) if gains.size > 1 else 0.0
    return float(_to_db(mean)), float(_to_db(gains).mean()), float(_to_db(1.0 + half / mean))


def power_gains(cfg: ScenarioConfig, load_sets: dict[str, LoadSet], trials: int | None = None,
                max_elements: int | None = None) -> dict[str, np.ndarray]:
    """Per-trial optimal power gain ``|y_opt|^2 / |y0|^2`` for each load set.

    All load sets see the same channel realizations. ``max_elements`` draws
    channels for a larger surface and keeps the first ``M``, so surfaces of
    different sizes share their common elements' channels.
    """
    trials = cfg.trials if trials is None else trials
    m = cfg.num_elements
    draw_m = m if max_elements is None else max_elements
    budget = link_budget(cfg)
    sqrt_g0 = math.sqrt(budget.g0)
    prepared = {
        name: (np.sqrt(budget.element_gains(ls)), modulation_alphabet(ls).symbols)
        for name, ls in load_sets.items()
    }
    rng = _rng(cfg)
    out = {name: np.empty(trials) for name in load_sets}
    for t in range(trials):
        channels = draw_channels(draw_m, rng, cfg.kappa_sd, cfg.kappa_st, cfg.kappa_td)
        h = channels.h_cascade[:m]
        y0 = sqrt_g0 * channels.h0
        ref = abs(y0) ** 2
        for name, (amp, symbols) in prepared.items():
            out[name][t] = optimal_config_factored(y0, amp * h, symbols).amplitude ** 2 / ref
    return out


def _load_sets(cfg: ScenarioConfig) -> dict[str, LoadSet]:
    return {"k2": cfg.binary_loads(), f"k{cfg.multi_loads().size}": cfg.multi_loads()}


def _gain_table(variable: str, values, per_point: list[dict[str, np.ndarray]], trials: int) -> GainReport:
    report = GainReport(variable, np.asarray(values), trials=trials)
    names = list(per_point[0]) if per_point else []
    stats = {n: np.array([_summarize(p[n]) for p in per_point]).reshape(-1, 3) for n in names}
    for n in names:
        report.columns[f"gain_{n}_db"] = stats[n][:, 0]
    for n in names:
        report.columns[f"gain_{n}_dbmean"] = stats[n][:, 1]
    for n in names:
        report.columns[f"halfwidth_{n}_db"] = stats[n][:, 2]
    if len(names) > 1:
        report.columns["gap_db"] = stats[names[1]][:, 0] - stats[names[0]][:, 0]
    report.columns["baseline_db"] = np.zeros(len(per_point))
    report.columns["trials"] = np.full(len(per_point), trials, dtype=int)
    return report


def run_gain_vs_distance(cfg: ScenarioConfig, distances) -> GainReport:
    """Average optimal power gain versus distance of the source-destination line from the surface."""
    distances = [float(d) for d in distances]
    sets = _load_sets(cfg)

    def point(d):
        log.info("gain-vs-distance d_ris_sd=%g", d)
        return power_gains(cfg.replace(d_ris_sd=d), sets)

    return _gain_table("d_ris_sd", distances, _map(point, distances), cfg.trials)


def run_gain_vs_elements(cfg: ScenarioConfig, element_counts, spacing_mode: str = "half_lambda",
                         load_sets: tuple[str, ...] | None = None) -> GainReport:
    """Average optimal power gain versus surface size.

    ``spacing_mode`` is ``"dense"`` (0.1 m by 0.05 m) or ``"half_lambda"``.
    Adds the per-element marginal gain ``d gain_db / d M`` for each load set.
    """
    counts = [int(m) for m in element_counts]
    if spacing_mode == "dense":
        cfg = cfg.replace(spacing_x=DENSE_SPACING[0], spacing_y=DENSE_SPACING[1])
    elif spacing_mode == "half_lambda":
        cfg = cfg.replace(spacing_x=None, spacing_y=None)
    else:
        raise ValueError(f"unknown spacing mode {spacing_mode!r}")
    sets = _load_sets(cfg)
    if load_sets is not None:
        sets = {k: v for k, v in sets.items() if k in load_sets}
    top = max(counts) if counts else 0

    def point(m):
        log.info("gain-vs-elements M=%d", m)
        return power_gains(cfg.replace(num_elements=m), sets, max_elements=top)

    report = _gain_table("num_elements", counts, _map(point, counts), cfg.trials)
    for name in sets:
        gain = report.columns[f"gain_{name}_db"]
        report.columns[f"marginal_{name}_db"] = (
            np.gradient(gain, np.asarray(counts, dtype=float)) if len(counts) > 1 else np.zeros(len(counts))
        )
    return report


def marginal_at(report: GainReport, name: str, m: int) -> float:
    idx = list(report.values).index(m)
    return float(report.columns[f"marginal_{name}_db"][idx])


def local_slope(report: GainReport, name: str, center: float, rel_window: float = 0.2) -> float:
    """Least-squares slope (dB per element) of ``gain_<name>_db`` over ``center * (1 +- rel_window)``."""
    m = np.asarray(report.values, dtype=float)
    keep = np.abs(m - center) <= rel_window * center + 1e-9
    if keep.sum() < 2:
        raise ValueError(f"fewer than two grid points within the window around M={center:g}")
    return float(np.polyfit(m[keep], report.columns[f"gain_{name}_db"][keep], 1)[0])


def csi_scenario(cfg: ScenarioConfig) -> ScenarioConfig:
    """Rayleigh fading, SD line 8 m from the surface, 15 m long."""
    return cfg.replace(kappa_sd=0.0, kappa_st=0.0, kappa_td=0.0, d_ris_sd=8.0, d_sd=15.0, d0=3.0)


def run_csi_impact(cfg: ScenarioConfig, element_counts, mmse=None) -> GainReport:
    """Gain with true versus estimated CSI across surface sizes.

    ``cfg`` is used as given; apply :func:`csi_scenario` for the Rayleigh
    far-surface setup. ``mmse`` overrides the pilot-budget variances.
    """
    counts = [int(m) for m in element_counts]
    top = max(counts) if counts else 0

    def point(m):
        log.info("csi-impact M=%d", m)
        sub = cfg.replace(num_elements=m)
        override = None if mmse is None else np.broadcast_to(np.asarray(mmse, dtype=float), (m + 1,))
        alpha = cfg.alpha if cfg.alpha is not None else alpha_policy(m, cfg.coherence_symbols, cfg.alpha_min, cfg.alpha_max)
        return estimation_trials(sub, _rng(cfg), mmse=override, max_elements=top), alpha

    results = _map(point, counts)
    report = GainReport("num_elements", np.asarray(counts), trials=cfg.trials)
    true_db = np.array([_summarize(r[0][0])[0] for r in results])
    est_db = np.array([_summarize(r[0][1])[0] for r in results])
    report.columns["gain_true_csi_db"] = true_db
    report.columns["gain_est_csi_db"] = est_db
    report.columns["gap_db"] = true_db - est_db
    report.columns["gain_true_csi_dbmean"] = np.array([_summarize(r[0][0])[1] for r in results])
    report.columns["gain_est_csi_dbmean"] = np.array([_summarize(r[0][1])[1] for r in results])
    report.columns["alpha"] = np.array([r[1] for r in results])
    report.columns["trials"] = np.full(len(counts), cfg.trials, dtype=int)
    return report


def run_random_search_experiment(cfg: ScenarioConfig, mu_list, n_configs: int, repetitions: int = 3) -> GainReport:
    """Running best improvement of random ``mu``-tag configurations on one static channel."""
    mu_list = [int(mu) for mu in mu_list]
    if any(mu > cfg.num_elements for mu in mu_list):
        raise ValueError(f"mu cannot exceed M = {cfg.num_elements}")
    budget = link_budget(cfg)
    loads = cfg.binary_loads()
    rng = _rng(cfg)
    channels = cfg.draw(rng)
    y0 = math.sqrt(budget.g0) * channels.h0
    coeffs = np.sqrt(budget.element_gains(loads)) * channels.h_cascade
    terms = ElementTerms(y0, coeffs[:, None] * modulation_alphabet(loads).symbols[None, :])
    streams = np.random.SeedSequence(cfg.seed).spawn(len(mu_list) + 1)[1:]

    report = GainReport("configs_tested", np.arange(1, n_configs + 1), trials=repetitions)
    for mu, seq in zip(mu_list, streams):
        report.columns[f"mu_{mu}_db"] = random_search(terms, mu, n_configs, repetitions, np.random.default_rng(seq))
    report.columns["binary_optimum_db"] = np.full(n_configs, binary_optimum_db(terms))
    return report
