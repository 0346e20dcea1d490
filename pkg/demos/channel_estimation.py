"""Loss from configuring the surface with estimated instead of true channels.

Rayleigh fading, line 8 m from the surface, pilots take 1% of a 2.4e6-symbol
coherence block. The gap grows with the number of tags because more channels
share the same pilot budget.
"""

import numpy as np

from tagsurface.estimation import csi_mmse
from tagsurface.experiments import csi_scenario, run_csi_impact
from tagsurface.scenario import ScenarioConfig

cfg = csi_scenario(ScenarioConfig(trials=300))
print("direct-channel MMSE at M=100:", f"{csi_mmse(cfg.replace(num_elements=100))[0]:.2e}")
print("median tag-channel MMSE at M=100:", f"{np.median(csi_mmse(cfg.replace(num_elements=100))[1:]):.3f}")

r = run_csi_impact(cfg, [1, 25, 100, 200])
print("   M   true [dB]  est [dB]  gap [dB]")
for m, t, e, g in zip(r.values, r["gain_true_csi_db"], r["gain_est_csi_db"], r["gap_db"]):
    print(f"{m:4d}  {t:9.4f}  {e:8.4f}  {g:8.4f}")
