"""Compare the sub-pixel landmark extraction operators.

All four operators form weighted centroids of a rectified heatmap; they
differ in how aggressively they suppress activations away from the peak.
The demo measures each on a clean blob, then adds a half-amplitude clutter
blob to show where the global centroid breaks down.
"""

import numpy as np

from balltrack.heatmaps import (
    bicubic_expectation,
    bilinear_expectation,
    biquadratic_expectation,
    coarse_to_fine_expectation,
    gaussian_target,
    hard_argmax,
)

OPS = {
    "hard argmax": lambda hm: hard_argmax(hm),
    "bilinear (global)": bilinear_expectation,
    "coarse-to-fine": coarse_to_fine_expectation,
    "biquadratic": biquadratic_expectation,
    "bicubic": bicubic_expectation,
}

center = (23.37, 30.81)
clean = gaussian_target(center, 56, 2.0)
clutter = clean + 0.5 * gaussian_target((44.0, 10.0), 56, 2.0)

print(f"true center: {center}")
for title, hm in (("clean blob", clean), ("blob + half-amplitude clutter", clutter)):
    print(f"\n{title}:")
    for name, op in OPS.items():
        x, y = op(hm)
        err = np.hypot(x - center[0], y - center[1])
        print(f"  {name:20s} -> ({float(x):6.3f}, {float(y):6.3f})  err {err:6.3f} px")

print(
    "\nthe global centroid is dragged toward the clutter, and the two-pass "
    "kernel operators inherit that drag through their first pass; only the "
    "detached-argmax window of coarse-to-fine stays locked on the main peak. "
    "the kernels earn their keep against diffuse far-field activation "
    "(see the biquadratic far-field test) and on multi-scale pyramids."
)
