"""Fixed evaluation grids shared by the property tests and ``urcov validate``.

Bump GRID_VERSION whenever a value changes so that recorded failures stay
reproducible.
"""

import numpy as np

GRID_VERSION = 1

N_VALUES = (1, 2, 3, 5, 10)
ALPHA_VALUES = (2.5, 3.0, 4.0, 6.0)
THRESHOLDS = tuple(float(t) for t in np.logspace(-4.0, 2.0, 50))
ETA_VALUES = (0.3, 0.5, 0.9, 0.99, 0.999)

# Monte Carlo agreement points
MC_N_VALUES = (1, 2, 3)
MC_ALPHA_VALUES = (3.0, 4.0)
MC_THRESHOLDS = (0.1, 1.0, 10.0)
