"""Recalibrating a variance interval whose endpoints are biased downward.

Data are i.i.d. N(0, theta) with theta the variance.  The chi-square interval
is correct, but both of its endpoints have been lowered by a constant epsilon,
so the interval systematically misses high.  The right correction is to raise
both endpoints by exactly epsilon, and the simulation-based shifts find that
number on their own.

Unlike the location example, here the discrepancy distribution scales with the
plug-in estimate, so the variance estimate from the observed data matters.
The second half of the demo holds the plug-in value at deliberately wrong
levels and shows the estimated shifts moving with it.
"""

import numpy as np

from covershift import (NormalScaleSpec, RngStream, correct_interval,
                        normal_scale_binding)

M, EPSILON, ALPHA, N_REPLICATES = 20, 0.2, 0.05, 5000

spec = NormalScaleSpec(m=M, epsilon=EPSILON)
binding = normal_scale_binding(spec)
root = RngStream(7_311)

x = binding.simulate(np.array([1.0]), root.child(0))
result = correct_interval(binding, x, ALPHA, N_REPLICATES, root.child(1))

print(f"sample variance           {float(np.var(x, ddof=1)):.4f}   (true theta = 1)")
print(f"raw (biased) interval     ({result.raw.lower:.4f}, {result.raw.upper:.4f})")
print(f"recalibrated interval     ({result.corrected.lower:.4f}, {result.corrected.upper:.4f})")
print(f"estimated shifts          ({result.shift_lower:+.4f}, {result.shift_upper:+.4f})"
      f"   ideal: ({EPSILON:+.4f}, {EPSILON:+.4f})")
print()

print("sensitivity to the plug-in value (shifts should be near +0.2 when it is right):")
for plug_in in (0.5, 1.0, 2.0):
    res = correct_interval(binding, x, ALPHA, N_REPLICATES, root.child(2),
                           theta_tilde=np.array([plug_in]))
    print(f"  plug-in {plug_in:.1f}: shifts ({res.shift_lower:+.4f}, {res.shift_upper:+.4f})")
print()
print("For this interval the shift quantiles happen to be pinned at epsilon")
print("regardless of the plug-in value, because the raw endpoints use the same")
print("chi-square quantiles that define the miss rates; only the Monte Carlo")
print("noise around +0.2 scales with the plug-in.")
