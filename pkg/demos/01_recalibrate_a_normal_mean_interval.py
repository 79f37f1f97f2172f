"""Recalibrating an overwide interval for a normal mean.

The setup: data are i.i.d. N(theta, 1), but the interval we are handed was
built with its half-width inflated by a factor (1 + epsilon), as if the noise
standard deviation were 1 + epsilon instead of 1.  For epsilon = 1 the raw
interval is twice as wide as it should be and covers far too often.

The fix needs no algebra: simulate replicate datasets at the estimated mean,
rebuild the (wrong) interval on each, and shift the observed endpoints by
empirical quantiles of the replicate discrepancies.  For this model the
correct shift is known in closed form, z_{0.975} * epsilon / sqrt(m), so we
can watch the estimated shifts land on it.
"""

import math

import numpy as np

from covershift import (NormalLocationSpec, RngStream, correct_interval,
                        nl_interval, normal_location_binding)

M, EPSILON, ALPHA, N_REPLICATES = 20, 1.0, 0.05, 5000

spec = NormalLocationSpec(m=M, epsilon=EPSILON)
binding = normal_location_binding(spec)
root = RngStream(20_240_501)

x = binding.simulate(np.array([0.0]), root.child(0))
result = correct_interval(binding, x, ALPHA, N_REPLICATES, root.child(1))

exact = nl_interval(x, ALPHA, NormalLocationSpec(m=M, epsilon=0.0))
known_shift = 1.959964 * EPSILON / math.sqrt(M)

print(f"observed mean                {np.mean(x):+.4f}")
print(f"raw (inflated) interval      ({result.raw.lower:+.4f}, {result.raw.upper:+.4f})"
      f"  width {result.raw.width:.4f}")
print(f"recalibrated interval        ({result.corrected.lower:+.4f}, "
      f"{result.corrected.upper:+.4f})  width {result.corrected.width:.4f}")
print(f"exactly calibrated interval  ({exact.lower:+.4f}, {exact.upper:+.4f})"
      f"  width {exact.width:.4f}")
print()
print(f"estimated endpoint shifts    ({result.shift_lower:+.5f}, {result.shift_upper:+.5f})")
print(f"closed-form shifts           ({known_shift:+.5f}, {-known_shift:+.5f})")
print()
print("The recalibrated endpoints sit on top of the exactly calibrated ones;")
print("the estimated shifts match the closed form to Monte Carlo accuracy.")
