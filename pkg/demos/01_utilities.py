"""
Utilities behind a BNE decision
===============================

How comfort, expected comfort and walking speed respond to crowding.
"""

import numpy as np

from bnevac import comfort_utility, expected_comfort, speed_from_density
from bnevac.utilities import BnePredictionParams

# comfort of a patch shared with n other people
for n in range(7):
    print(f"n={n}  comfort={comfort_utility(n):.2f}")

# expected comfort: each neighbour enters with probability p_m
print()
for p_m in (0.05, 1 / 6, 0.4):
    params = BnePredictionParams(p_m=p_m)
    row = "  ".join(f"{expected_comfort(n, params):.3f}" for n in (3, 6, 12, 24))
    print(f"p_m={p_m:.3f}  N=3,6,12,24 -> {row}")

# speed against density (persons per square metre), at the default 2 m/s
print()
for rho in np.arange(0, 10.5, 1.0):
    print(f"rho={rho:4.1f}  v={speed_from_density(rho, 2.0):.3f} m/s")
