"""Coverage shoot-out on the variance model: five interval methods.

A desk-scale rerun of the classic comparison.  The biased pivot interval and
the percentile bootstrap both undercover; recalibrating the pivot restores
nominal coverage; the double bootstrap calibrates the percentile levels and
also recovers.  Recalibrating the *bootstrap* interval helps less here: its
endpoint shifts scale with the noisy variance estimate (see the note printed
at the end).

Runs about a minute at these budgets.
"""

from covershift import ExperimentConfig, run_coverage

COMMON = dict(model="normal-scale", m=20, R=300, alpha=0.05, seed=97)

RUNS = [
    ("pivot (endpoints biased down by 0.2)",
     dict(method="pivot", epsilon=0.2)),
    ("recalibrated pivot",
     dict(method="corrected-pivot", epsilon=0.2, n=1000)),
    ("percentile bootstrap (B=400)",
     dict(method="bootstrap", B=400)),
    ("recalibrated bootstrap (B=99, n=1000)",
     dict(method="corrected-bootstrap", n=1000)),
    ("double bootstrap (B=400, B2=25)",
     dict(method="double-bootstrap", B=400, B2=25)),
]

print(f"{'method':42s} {'coverage':>9s} {'mc se':>7s} {'width':>7s} {'secs':>6s}")
for label, overrides in RUNS:
    report = run_coverage(ExperimentConfig(**COMMON, **overrides))
    print(f"{label:42s} {report.coverage:9.3f} {report.mc_se:7.3f} "
          f"{report.mean_width:7.3f} {report.wall_time:6.1f}")

print()
print("Note: the recalibrated bootstrap stalls near 0.90 on this model. The")
print("percentile endpoints are proportional to the variance estimate with the")
print("wrong constant, and an additive shift estimated at the plug-in value")
print("inherits that estimate's noise at first order. The recalibrated pivot is")
print("immune: its endpoint constant is already the fixed point of the shift map.")
