"""Exact surface configuration by the auxiliary-phase sweep.

Draws one channel realization, finds the best two-load and 21-load
configurations, checks a small instance against exhaustive search and times
the sweep on a large random instance.
"""

import time

import numpy as np

from tagsurface.loads import modulation_alphabet
from tagsurface.optimizer import ElementTerms, brute_force, element_terms, optimize, received_amplitude
from tagsurface.scenario import ScenarioConfig, link_budget

rng = np.random.default_rng(0)
cfg = ScenarioConfig()
budget = link_budget(cfg)
channels = cfg.draw(rng)

for loads in (cfg.binary_loads(), cfg.multi_loads()):
    terms = element_terms(channels, budget.g0, budget.element_gains(loads), modulation_alphabet(loads))
    best = optimize(terms)
    naive = received_amplitude(terms, np.zeros(terms.num_elements, dtype=int))
    gain = 20 * np.log10(best.amplitude / abs(terms.y0))
    print(f"K={loads.size:2d}: optimal gain {gain:5.2f} dB (all-load-0 gives {20 * np.log10(naive / abs(terms.y0)):5.2f} dB)")

# exhaustive check on a 4-tag sub-surface
small = ElementTerms(terms.y0, terms.terms[:4])
print("sweep == brute force on 4 tags x 21 loads:", np.isclose(optimize(small).amplitude, brute_force(small).amplitude, rtol=1e-12))

big = ElementTerms(1.0, rng.standard_normal((100_000, 2)) + 1j * rng.standard_normal((100_000, 2)))
t0 = time.perf_counter()
optimize(big)
print(f"M = 100000, K = 2 solved in {time.perf_counter() - t0:.3f} s")
