"""Frozen convention constants.

Each constant is measured once by running the Grassmann extraction or the
relevant identity on reference data, then pinned here; regression tests
recompute them and compare.
"""

from __future__ import annotations

# e1e2 part of the potential = C_YM * Yang-Mills symplectic current
C_YM = 1.0
# e1e2 part of sqrt(g) * potential = C_GR * sqrt(g) * gravitational symplectic current
C_GR = 0.5
# weight of the S-tensor bilinear in the current whose divergence balances the
# pairing of the linearized Einstein operator (equals the canonical e1e2 extraction)
E_CURRENT_FACTOR = 2.0

SIGNATURE = "-+++"
# Tr(X Y) = TRACE_NORM * X^a Y^a for the anti-Hermitian generators below
TRACE_NORM = -0.5
SU2_GENERATORS = "T_a = -(i/2) sigma_a, [T_a, T_b] = eps_abc T_c"
EXTRACTION = "variation slots carry e1 h1 + e2 h2 and sit rightmost; the e1e2 coefficient is read off"
