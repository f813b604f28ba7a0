"""Matrix helpers shared by the oscillator and Verma verifiers.

Matrices act on column vectors: column m is the image of the m-th basis
state.  Arrays may hold floats or exact ``Fraction`` objects (dtype=object).
"""

from __future__ import annotations

import numpy as np


def commutator(X, Y):
    return X @ Y - Y @ X


def anticommutator(X, Y):
    return X @ Y + Y @ X


def max_abs(R, states=None):
    """Largest absolute entry of R, restricted to the given columns (states)."""
    R = np.asarray(R)
    if states is not None:
        R = R[:, list(states)]
    if R.size == 0:
        return 0
    return max(abs(x) for x in R.ravel())
