"""Average power gain as the source-destination line moves away from the surface.

A reduced-trial version of the distance study; the CLI command
``tagsurface gain-vs-distance`` runs the full one and writes CSV.
"""

from tagsurface.experiments import run_gain_vs_distance
from tagsurface.scenario import ScenarioConfig

report = run_gain_vs_distance(ScenarioConfig(trials=500), [0.5, 1, 2, 3, 5, 10])
print(" d [m]   K=2 [dB]  K=21 [dB]  gap [dB]")
for d, g2, g21, gap in zip(report.values, report["gain_k2_db"], report["gain_k21_db"], report["gap_db"]):
    print(f"{d:6.1f}  {g2:8.2f}  {g21:9.2f}  {gap:+8.2f}")
