#!/usr/bin/env python3
"""Largest-eigenvalue laws: Tracy-Widom, thinning and conditioning.

Compares the sigma-difference formula with the Painleve II double integral,
then shows finite-n Hankel ratios drifting toward the limit.
Run:  python3 demos/04_distributions.py
"""

import math

from fhsoftedge import finite_n_cdf, thinned_conditioned_cdf, tracy_widom_cdf
from fhsoftedge.distributions import ablowitz_segur_cdf

print("   s     F_2 (PII)        F_2 (sigma)      thinned w=0.36   Ablowitz-Segur k=0.8")
for s in (-4.0, -3.0, -2.0, -1.0, 0.0, 1.0, 2.0):
    print("%5.1f  %.12f  %.12f  %.12f  %.12f" % (s, tracy_widom_cdf(s), tracy_widom_cdf(s, "sigma"),
                                                 thinned_conditioned_cdf(s, 0.0, 0.36), ablowitz_segur_cdf(s, 0.8)))

alpha, omega = 0.5, 0.5
print("\nalpha=%g omega=%g: finite-n Hankel ratio vs the limit" % (alpha, omega))
for s in (-2.0, 0.0, 2.0):
    lim = thinned_conditioned_cdf(s, alpha, omega)
    row = ["n=%d %.3e" % (n, abs(finite_n_cdf(s, n, alpha, omega) - lim)) for n in (16, 32, 64)]
    print("   s=%+.0f  limit %.8f   |diff|: %s" % (s, lim, ", ".join(row)))

val, label = finite_n_cdf(0.0, 16, 0.3, 0.5 + 0.3j, with_label=True)
print("\ncomplex omega gives %s (%s)" % (val, label))
