#!/usr/bin/env python3
"""The sigma connection problem and its two solution routes.

Solves sigma(s; alpha, omega) on a wide interval, checks it against the
tail formulas at both ends, and compares u = -sigma' with the Painleve II
route through the Miura map. Run:  python3 demos/02_sigma_connection.py
"""

import numpy as np

from fhsoftedge import PainleveParams, sigma_tail_minus, sigma_tail_plus, solve_pii_alpha, solve_sigma
from fhsoftedge.painleve import u_from_pii

for alpha, omega in ((0.5, 0.0), (1.0, 0.5), (0.3, 0.5)):
    p = PainleveParams(alpha, omega)
    sol = solve_sigma(p, -30.0, 8.0)
    print("alpha=%g omega=%g  route=%s  first-integral residual %.1e"
          % (alpha, omega, sol.diagnostics["route"], sol.diagnostics["relative_residual"]))
    print("   s=8    solver %.12f   +inf series %.12f" % (sol.evaluate(8.0)[0], sigma_tail_plus(8.0, p)[0].real))
    for s in (-10.0, -20.0, -30.0):
        print("   s=%g  solver %.8f   -inf formula %.8f" % (s, sol.evaluate(s)[0], sigma_tail_minus(s, p)[0].real))
    grid = np.linspace(-6, 6, 121)
    pii = solve_pii_alpha(p, (-6.0, 6.0))
    gap = np.abs(-sol.evaluate(grid)[1] - u_from_pii(pii, grid)).max()
    print("   PII route: max |u_sigma - u_PII| = %.1e, real poles of q crossed at x = %s"
          % (gap, ", ".join("%.4f" % z.real for z in pii.poles) or "none"))
