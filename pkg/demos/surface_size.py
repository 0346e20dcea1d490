"""Gain versus number of tags for dense and half-wavelength spacing.

Wider spacing pushes the outer tags further from source and destination,
so each added tag contributes less and the curve flattens sooner.
"""

from tagsurface.experiments import local_slope, run_gain_vs_elements
from tagsurface.scenario import ScenarioConfig

grid = list(range(20, 31, 2)) + [50, 100] + list(range(160, 241, 8))
cfg = ScenarioConfig(trials=300)
for mode in ("dense", "half_lambda"):
    r = run_gain_vs_elements(cfg, grid, mode, load_sets=("k2",))
    print(f"{mode}:")
    for m in (20, 50, 100, 200, 240):
        i = list(r.values).index(m)
        print(f"  M={m:3d}  {r['gain_k2_db'][i]:6.2f} dB")
    ratio = local_slope(r, "k2", 200) / local_slope(r, "k2", 25)
    print(f"  marginal gain at M=200 is {ratio:.2f} of that at M=25")
