#!/usr/bin/env python3
"""Recurrence coefficients near the soft edge.

Builds the three-term recurrence for the singular weight at mu_n and
compares a_n, b_n and d/dmu log H_n with their Painleve predictions as n
grows. Run:  python3 demos/01_recurrence_and_hankel.py
"""

import math

import numpy as np

from fhsoftedge import (PainleveParams, WeightSpec, hankel_scaling_report, recurrence_scaling_report, solve_sigma,
                        stieltjes_recurrence)

# Hermite first: a_k = 0, b_k^2 = k/2
t = stieltjes_recurrence(WeightSpec(0.0, 0.0, 1.0), 50)
print("Hermite check: max|a_k| = %.1e, max|b2_k - k/2| = %.1e"
      % (np.abs(t.a).max(), np.abs(t.b2 - np.arange(50) / 2).max()))

# a root singularity at the origin alternates b2_k between k/2 and (k + 2 alpha)/2
t = stieltjes_recurrence(WeightSpec(0.7, 0.0, 1.0), 8)
print("alpha = 0.7, mu = 0:  b2_k =", np.round(t.b2, 12))

alpha, omega, s = 0.5, 0.5, 0.0
sig = solve_sigma(PainleveParams(alpha, omega), -10.0, 8.0)
ra, rb = recurrence_scaling_report(alpha, omega, s, [16, 32, 64, 128], sig)
print("\nalpha=%g omega=%g s=%g, u(s) = %.10f" % (alpha, omega, s, ra.extra["u"].real))
print("   n        a_n        predicted     |err|*sqrt(n)     b_n err*sqrt(n)")
for i, n in enumerate(ra.n_values):
    print("%4d  %12.8f  %12.8f  %12.3e   %12.3e" % (n, ra.finite_n_values[i].real, ra.prediction[i].real,
                                                    ra.errors[i] * math.sqrt(n), rb.errors[i] * math.sqrt(n)))

h = hankel_scaling_report(0.5, 1.0, 0.0, [16, 32, 64])
print("\nlog-derivative of H_n (alpha=0.5, omega=1): remainder / (sqrt(2n)/n)")
for n, f, p in zip(h.n_values, h.finite_n_values, h.prediction):
    print("%4d  %+.6f" % (n, (f - p).real / (math.sqrt(2 * n) / n)))
