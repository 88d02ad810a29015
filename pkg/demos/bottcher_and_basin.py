#! /usr/bin/env python3
"""Escape-side structures of z^2 - 1: Boettcher field and modulus sums.

Outside the filled Julia set a polynomial is conjugate to z -> z^d, and
the phase of the conjugacy derivative yields a Beltrami coefficient that
the pull-back operator fixes.  Deep in the basin of infinity the modulus
series over the backward tree converges geometrically; near the bounded
superattracting cycle it crawls.  Both effects are printed side by side.
"""

import numpy as np

from ruellelab import RationalMap, beltrami_apply, bottcher_field, gamma
from ruellelab.diagnostics import dissipative_partial_sums

R = RationalMap([-1.0, 0.0, 1.0], [1.0])
nu = bottcher_field(R, kind="beltrami")

z = np.array([4.0 + 1.0j, -5.0, 3.5j, 6.0 - 2.0j])
err = np.max(np.abs(beltrami_apply(R, nu)(z) - nu(z)))
print(f"Boettcher Beltrami invariance on |z| > 3: {err:.2e}")
print("unimodularity:", np.max(np.abs(np.abs(nu(z)) - 1.0)))

probe = np.array([500.0, 450.0 + 300.0j, 0.3, 0.1])
rows = dissipative_partial_sums(R, gamma(-1.0).abs(), probe, 12)
print("partial sums of the modulus series (N = 12 terms):")
for row in rows:
    flag = "cauchy" if row["cauchy"] else "slow"
    print(f"  z = {row['z']:>14}  S_12 = {row['partial_sums'][-1]:10.4e}"
          f"  last increment {row['tail']:.1e}  [{flag}]")
