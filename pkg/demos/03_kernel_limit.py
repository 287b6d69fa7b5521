#!/usr/bin/env python3
"""The limiting kernel from the Lax system and the finite-n kernel.

First the Airy reduction, then the approach of the rescaled
Christoffel-Darboux kernel to K_Psi for a genuinely singular weight.
Run:  python3 demos/03_kernel_limit.py
"""

import numpy as np

from fhsoftedge import PainleveParams, airy_kernel, kernel_scaling_report, psi_kernel, psi_solve

psi = psi_solve(0.0, PainleveParams(0.0, 1.0), None, -3.0, 3.0)
pts = np.array([0.5, 1.0, 1.5, 2.0, 2.5])
X, Y = np.meshgrid(pts, pts, indexing="ij")
print("alpha=0, omega=1: max |K_Psi - K_Airy| on the 5x5 grid = %.1e"
      % np.abs(psi_kernel(psi, X, Y) - airy_kernel(X, Y)).max())

alpha, omega = 0.5, 0.5
for v in ((0.5, 1.5), (-1.0, 0.7), (0.8, 0.8)):
    rep = kernel_scaling_report(alpha, omega, 0.0, v[0], v[1], [16, 32, 64, 128])
    print("\nv = %s   K_Psi = %.8f" % (v, rep.prediction.real))
    for n, k, e in zip(rep.n_values, rep.finite_n_values, rep.errors):
        print("   n=%4d  scaled K_n = %.8f  error %.3e" % (n, k.real, e))
    print("   fitted rate n^%.2f" % rep.fitted_rate)
