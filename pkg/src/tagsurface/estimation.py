"""Imperfect channel knowledge from a pilot-limited MMSE estimator."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import ChannelSet, draw_channels
from .loads import modulation_alphabet
from .optimizer import ElementTerms, optimal_config_factored, received_amplitude
from .scenario import LinkBudget, ScenarioConfig, alpha_policy, link_budget


@dataclass(frozen=True)
class EstimationSpec:
    """Pilot budget: fraction ``alpha`` of an ``L_c``-symbol coherence block."""

    alpha: float
    coherence_symbols: float
    snr_per_channel: np.ndarray

    def __post_init__(self):
        snr = np.atleast_1d(np.asarray(self.snr_per_channel, dtype=float))
        object.__setattr__(self, "snr_per_channel", snr)
        if not 0 < self.alpha < 1:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha!r}")
        if self.alpha * self.coherence_symbols < snr.size:
            raise ValueError(
                f"{self.alpha * self.coherence_symbols:g} pilot symbols cannot resolve {snr.size} channels"
            )

    @property
    def num_elements(self) -> int:
        return self.snr_per_channel.size - 1

    def mmse(self) -> np.ndarray:
        return mmse_variance(self.snr_per_channel, self.alpha, self.coherence_symbols, self.num_elements)


def mmse_variance(snr, alpha: float, coherence_symbols: float, num_elements: int):
    """Residual error variance ``1 / (1 + SNR / (M + 1) * alpha * L_c)``.

    Model choice for pilot-based MMSE estimation of ``M + 1`` unit-power
    channels sharing ``alpha * L_c`` pilot symbols.
    """
    if not alpha > 0 or not coherence_symbols > 0 or num_elements < 0:
        raise ValueError("alpha and coherence_symbols must be positive, num_elements non-negative")
    if alpha * coherence_symbols < num_elements + 1:
        raise ValueError("pilot budget smaller than the number of unknown channels")
    snr = np.asarray(snr, dtype=float)
    if np.any(snr < 0):
        raise ValueError("snr must be non-negative")
    value = 1.0 / (1.0 + snr / (num_elements + 1) * alpha * coherence_symbols)
    return float(value) if value.ndim == 0 else value


def _estimate(h, mmse, noise, mean_power: float = 1.0):
    """MMSE estimate of ``h`` whose error ``h - h_hat`` has variance ``mmse * mean_power``.

    ``h_hat = (1 - e) h + sqrt(e (1 - e) P) w`` with ``w ~ CN(0, 1)``: the error
    is uncorrelated with the estimate, as for a linear MMSE estimator of a
    zero-mean channel, and the true realization is left untouched.
    """
    return (1.0 - mmse) * h + np.sqrt(mmse * (1.0 - mmse) * mean_power / 2.0) * noise


def _check_mmse(mmse) -> None:
    if np.any(mmse < 0) or np.any(mmse > 1):
        raise ValueError("MMSE variances must lie in [0, 1]")


def sample_estimated_channels(
    true_channels: ChannelSet,
    mmse,
    rng: np.random.Generator,
    mean_power: float = 1.0,
) -> ChannelSet:
    """Channel estimates with error power ``mmse * mean_power`` per channel.

    ``mmse`` holds the direct-channel variance first, then one per element
    (a scalar applies to all). The estimation error is ``h - h_hat``. The
    returned set carries only cascades.
    """
    m = true_channels.num_elements
    mmse = np.broadcast_to(np.asarray(mmse, dtype=float), (m + 1,))
    _check_mmse(mmse)
    noise = rng.standard_normal(m + 1) + 1j * rng.standard_normal(m + 1)
    h = np.concatenate([[true_channels.h0], true_channels.h_cascade])
    h_hat = _estimate(h, mmse, noise, mean_power)
    return ChannelSet(h0=complex(h_hat[0]), h_cascade=h_hat[1:])


def estimation_trials(
    cfg: ScenarioConfig,
    rng: np.random.Generator,
    mmse=None,
    max_elements: int | None = None,
    trials: int | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Per-trial linear power gains with true and with estimated CSI.

    The configuration found from the estimates is scored on the true
    channels; both gains are relative to the direct-link power.
    ``max_elements`` draws channels and errors for a larger surface and keeps
    the first ``M``, so sweeps over ``M`` share realizations.
    """
    budget = link_budget(cfg)
    loads = cfg.loads()
    m = cfg.num_elements
    draw_m = m if max_elements is None else max_elements
    if mmse is None:
        mmse = csi_mmse(cfg, budget)
    mmse = np.broadcast_to(np.asarray(mmse, dtype=float), (m + 1,))
    _check_mmse(mmse)
    trials = cfg.trials if trials is None else trials
    symbols = modulation_alphabet(loads).symbols
    amp = np.sqrt(budget.element_gains(loads))
    sqrt_g0 = math.sqrt(budget.g0)
    true_gain = np.empty(trials)
    est_gain = np.empty(trials)
    for t in range(trials):
        channels = draw_channels(draw_m, rng, cfg.kappa_sd, cfg.kappa_st, cfg.kappa_td)
        noise = rng.standard_normal(draw_m + 1) + 1j * rng.standard_normal(draw_m + 1)
        h = channels.h_cascade[:m]
        h_hat = _estimate(np.concatenate([[channels.h0], h]), mmse, noise[: m + 1])
        y0 = sqrt_g0 * channels.h0
        coeffs = amp * h
        best = optimal_config_factored(y0, coeffs, symbols)
        guess = optimal_config_factored(sqrt_g0 * h_hat[0], amp * h_hat[1:], symbols)
        terms = ElementTerms(y0, coeffs[:, None] * symbols[None, :])
        ref = abs(y0) ** 2
        true_gain[t] = best.amplitude**2 / ref
        est_gain[t] = received_amplitude(terms, guess.config) ** 2 / ref
    return true_gain, est_gain


def csi_mmse(cfg: ScenarioConfig, budget: LinkBudget | None = None) -> np.ndarray:
    """MMSE variance of every channel (direct first) under the scenario's pilot policy."""
    budget = budget if budget is not None else link_budget(cfg)
    alpha = cfg.alpha
    if alpha is None:
        alpha = alpha_policy(cfg.num_elements, cfg.coherence_symbols, cfg.alpha_min, cfg.alpha_max)
    spec = EstimationSpec(alpha, cfg.coherence_symbols, budget.snr(cfg.loads()))
    return spec.mmse()


def gain_under_estimation(cfg: ScenarioConfig, rng: np.random.Generator, mmse=None) -> tuple[float, float]:
    """Average power gain (dB) with true CSI and with estimated CSI."""
    true_gain, est_gain = estimation_trials(cfg, rng, mmse)
    return 10 * math.log10(true_gain.mean()), 10 * math.log10(est_gain.mean())
