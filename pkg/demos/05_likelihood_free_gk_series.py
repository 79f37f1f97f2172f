"""Shrinking oversmoothed likelihood-free credible intervals.

A time series is drawn from a g-and-k distribution (location a, scale b,
skewness g, tail weight k) whose latent normal quantiles follow an MA(1)
process.  The density is intractable, so inference runs by rejection
sampling: draw parameters from a uniform prior, simulate a series for each,
and keep the closest fraction by standardized summary distance.

Loose acceptance oversmooths the posterior and the central credible
intervals come out too wide.  The recalibration pipeline simulates replicate
series at the posterior mean, re-runs the sampler on each and shifts the
observed interval endpoints, which tightens them substantially.  A final
ladder of posterior means across acceptance fractions is the standard
diagnostic for whether the plug-in estimate has stabilized enough to trust
the recalibration (a caveat that matters: with series this short the skewness
and dependence margins are weakly identified).

Runs about half a minute.
"""

from covershift import (ABCConfig, GandKTheta, RngStream, abc_corrected_intervals,
                        gk_ma1_simulate, posterior_mean_ladder)
from covershift.models import PARAM_NAMES

TRUTH = GandKTheta(a=0.01, b=0.02, g=0.3, k=0.4, ma_coef=0.2)
T, ALPHA = 300, 0.05

root = RngStream(8_855)
observed = gk_ma1_simulate(TRUTH, T, root.child(0))
config = ABCConfig(n_sims=3000, accept_frac=0.02)

results = abc_corrected_intervals(observed, config, ALPHA, 60, root.child(1))

print(f"{'param':8s} {'truth':>7s} {'raw interval':>22s} {'recalibrated':>22s} {'shrink':>7s}")
for name, true_value, res in zip(PARAM_NAMES, TRUTH.as_array(), results):
    raw = f"({res.raw.lower:+.4f}, {res.raw.upper:+.4f})"
    cor = f"({res.corrected.lower:+.4f}, {res.corrected.upper:+.4f})"
    shrink = res.corrected.width / res.raw.width
    print(f"{name:8s} {true_value:7.3f} {raw:>22s} {cor:>22s} {shrink:7.2f}")

print()
print("posterior-mean stability across acceptance fractions:")
ladder = posterior_mean_ladder(observed, ABCConfig(n_sims=3000, accept_frac=0.05),
                               (0.01, 0.02, 0.05), root.child(2))
print(f"{'accept':>8s}  " + "  ".join(f"{n:>8s}" for n in PARAM_NAMES))
for frac, mean in ladder:
    print(f"{frac:8.3f}  " + "  ".join(f"{v:8.4f}" for v in mean))
print()
print("Stable columns (a, b here) indicate margins whose recalibrated intervals")
print("can be taken at face value; drifting columns warn that the plug-in")
print("estimate, and with it the recalibration, is still tolerance-dependent.")
