"""Driving the tags with Gen2 commands.

Select commands assert the SL flag of the chosen tags one at a time, a
single-slot Query makes all of them reply at once, and the superposed
preamble shows the power of that configuration. Random configurations are
then searched the way a reader without channel knowledge would.
"""

import numpy as np

from tagsurface.gen2 import (
    Gen2Timing,
    apply_select,
    config_switch_time,
    configuration_commands,
    deassert_all_command,
    inventory_power_trace,
    random_population,
    random_search,
    binary_optimum_db,
)
from tagsurface.loads import modulation_alphabet
from tagsurface.optimizer import element_terms
from tagsurface.scenario import ScenarioConfig, link_budget

rng = np.random.default_rng(1)
cfg = ScenarioConfig()
tags = random_population(cfg.num_elements, rng)

state = apply_select(deassert_all_command(), tags)
for cmd in configuration_commands([3, 17, 42], tags):
    state = apply_select(cmd, state)
print("asserted:", [t.element_index for t in state if t.sl_flag])

for blf in (40e3, 640e3):
    print(f"switch time, 50 tags at BLF {blf / 1e3:.0f} kHz: {config_switch_time(50, Gen2Timing(blf)) * 1e3:.1f} ms")

budget = link_budget(cfg)
loads = cfg.binary_loads()
channels = cfg.draw(rng)
gains = budget.element_gains(loads)
alphabet = modulation_alphabet(loads)
trace = inventory_power_trace([3, 17, 42], channels, budget.g0, gains, alphabet, cfg.power, rng=rng, rounds=2)
pre = 10 * np.log10(trace.segment("preamble") * 1e3)
print("preamble levels [dBm]:", np.round(np.unique(pre), 3))

terms = element_terms(channels, budget.g0, gains, alphabet)
print(f"optimal two-state gain: {binary_optimum_db(terms):.2f} dB")
for mu in (1, 10, 50):
    best = random_search(terms, mu, 50, 3, rng)
    print(f"random search, mu={mu:2d}: {best[0]:.2f} dB after 1 config, {best[-1]:.2f} dB after 50")
