"""Random nilpotent and solvable Lie algebras for property tests.

Each draw takes a known algebra, optionally adds a direct summand, and
applies a random invertible rational change of basis.  The result passes
Jacobi by construction; tests still check it.
"""

import random
from fractions import Fraction
from itertools import combinations

import sympy as sp

from symalg.liealg import StructureConstants


def _unit(n, i, j):
    m = sp.zeros(n, n)
    m[i, j] = 1
    return m


def from_matrices(mats):
    """Structure constants of the span of the given matrices (assumed closed)."""
    n = len(mats)
    flat = sp.Matrix([[m[i] for m in mats] for i in range(mats[0].rows * mats[0].cols)])
    table = {}
    for j, k in combinations(range(n), 2):
        br = mats[j] * mats[k] - mats[k] * mats[j]
        sol, params = flat.gauss_jordan_solve(sp.Matrix(list(br)))
        assert not params
        row = {l: Fraction(str(v)) for l, v in enumerate(sol) if v != 0}
        if row:
            table[(j, k)] = row
    return n, table


def _heisenberg(k):
    n = 2 * k + 1
    return n, {(2 * i, 2 * i + 1): {n - 1: Fraction(1)} for i in range(k)}


def _filiform(n):
    return n, {(0, i): {i + 1: Fraction(1)} for i in range(1, n - 1)}


def _r3(lam):
    # [x3, x1] = x1, [x3, x2] = lam x2 stored with j < k
    return 3, {(0, 2): {0: Fraction(-1)}, (1, 2): {1: -lam}}


BASES = {
    "aff1": lambda rng: (2, {(0, 1): {1: Fraction(1)}}),
    "heis3": lambda rng: _heisenberg(1),
    "heis5": lambda rng: _heisenberg(2),
    "filiform4": lambda rng: _filiform(4),
    "filiform5": lambda rng: _filiform(5),
    "e2": lambda rng: (3, {(0, 1): {2: Fraction(1)}, (0, 2): {1: Fraction(-1)}}),
    "r3": lambda rng: _r3(Fraction(rng.randint(-3, 3), rng.randint(1, 3))),
    "b2": lambda rng: from_matrices([_unit(2, 0, 0), _unit(2, 1, 1), _unit(2, 0, 1)]),
    "n4": lambda rng: from_matrices([_unit(4, i, j) for i in range(4) for j in range(i + 1, 4)]),
}


def direct_sum(a, b):
    (na, ta), (nb, tb) = a, b
    table = dict(ta)
    for (j, k), row in tb.items():
        table[(j + na, k + na)] = {l + na: v for l, v in row.items()}
    return na + nb, table


def change_basis(n, table, P):
    """Constants in the basis y_a = sum_j P[a, j] x_j."""
    Q = P.inv()
    full = {}
    for (j, k), row in table.items():
        full[(j, k)] = row
        full[(k, j)] = {l: -v for l, v in row.items()}
    out = {}
    for a, b in combinations(range(n), 2):
        coeff = [Fraction(0)] * n  # in x basis
        for (j, k), row in full.items():
            w = P[a, j] * P[b, k]
            if w:
                for l, v in row.items():
                    coeff[l] += Fraction(str(w)) * v
        new = {}
        for m in range(n):
            s = sum((coeff[l] * Fraction(str(Q[l, m])) for l in range(n)), Fraction(0))
            if s:
                new[m] = s
        if new:
            out[(a, b)] = new
    return out


def random_algebra(rng: random.Random, max_dim: int = 5):
    name = rng.choice(sorted(BASES))
    n, table = BASES[name](rng)
    if n < max_dim and rng.random() < 0.4:
        extra = rng.choice(["aff1", "abelian"])
        n, table = direct_sum((n, table), (2, {(0, 1): {1: Fraction(1)}}) if extra == "aff1" else (1, {}))
        if n > max_dim:
            n, table = BASES[name](rng)
        else:
            name += "+" + extra
    while True:
        P = sp.Matrix(n, n, lambda i, j: sp.Rational(rng.randint(-2, 2), rng.randint(1, 2)))
        if P.det() != 0:
            break
    names = tuple(f"x{i + 1}" for i in range(n))
    return name, StructureConstants(names, change_basis(n, table, P))
