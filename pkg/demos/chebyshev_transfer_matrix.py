#! /usr/bin/env python3
"""Transfer matrix of the degree-2 Chebyshev-like map g(w) = 3w^2 - 2w.

The postcritical set of g is {-1/3, 1, inf}, so the single cubic-decay
field gamma with pole triple (0, 1, -1/3) spans the invariant space.
The push-forward sends gamma to -gamma/2, which the script verifies three
ways: pointwise, through the residue table, and through the Cesaro
averages A_n whose L1 norms follow (2 / 3n) |1 - (-1/2)^n| ||gamma||_1.
"""

import numpy as np

from ruellelab import (RandomStream, RationalMap, WholePlane, gamma,
                       ruelle_apply)
from ruellelab.diagnostics import cesaro_trace
from ruellelab.holspec import (eigen_spectrum, pushforward_residues,
                               transfer_matrix)

g = RationalMap([0.0, -2.0, 3.0], [1.0])
gam = gamma(-1.0 / 3.0)

print("postcritical set:", g.postcritical_orbit(depth=10)[0])

z = np.linspace(-2.0, 2.0, 7) + 0.4j
err = np.max(np.abs(ruelle_apply(g, gam)(z) + 0.5 * gam(z)))
print(f"pointwise |R* gamma + gamma/2|: {err:.2e}")

print("residues of the pushed field:")
for pole, res in pushforward_residues(g, gam):
    print(f"  at {pole:+.4f}: {res:+.6f}")

M = transfer_matrix(g)
vals, _ = eigen_spectrum(M)
print("transfer matrix:", M.entries.ravel(), " eigenvalues:", vals)

rng = RandomStream(7)
records = cesaro_trace(g, -1.0 / 3.0, [1, 2, 4, 8], WholePlane(),
                       200_000, rng)
base = abs(records[0].value)
print("Cesaro average norms against the closed form:")
for r in records:
    closed = (2.0 / (3.0 * r.n)) * abs(1 - (-0.5) ** r.n) * base
    print(f"  n={r.n:2d}  ||A_n||_1 = {abs(r.value):8.4f}"
          f"  closed form {closed:8.4f}  stderr {r.stderr:.1e}")
