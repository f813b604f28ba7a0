"""The printed c(2) generators against the printed bracket table, for every algebra.

Unknowns are all 90 structure constants C_jk^l (j < k).  The Poisson
bracket of two fixed polynomials is linear in them, so each requested
bracket identity becomes a linear system.  An inconsistent system proves
that no six-dimensional Lie algebra (Jacobi not even imposed) realizes it.
"""

import json
from importlib import resources
from itertools import combinations

import pytest

from symalg import linalg
from symalg.polyring import Polynomial, parse_polynomial

NAMES = tuple(f"x{i}" for i in range(1, 7))
PAIRS = list(combinations(range(6), 2))
UNKNOWN = {(j, k, l): n for n, ((j, k), l) in enumerate((p, l) for p in PAIRS for l in range(6))}


def load(name):
    data = json.loads(resources.files("symalg.data").joinpath(f"{name}.json").read_text())
    return [parse_polynomial(g["poly"], NAMES) for g in data["generators"]]


def bracket_by_unknown(p, q):
    """{p, q} as a map unknown -> polynomial coefficient."""
    out = {}
    x = Polynomial.gens(NAMES)
    for (j, k) in PAIRS:
        cross = p.diff(j) * q.diff(k) - p.diff(k) * q.diff(j)
        if cross.is_zero():
            continue
        for l in range(6):
            out[UNKNOWN[(j, k, l)]] = x[l] * cross
    return out


def system(A, wanted):
    """Rows/rhs for {A_i, A_j} = target over all monomials."""
    rows, rhs = [], []
    for (i, j), target in wanted:
        coeffs = bracket_by_unknown(A[i], A[j])
        monos = set(target.terms)
        for poly in coeffs.values():
            monos |= set(poly.terms)
        for m in sorted(monos):
            rows.append({u: poly.coefficient(m) for u, poly in coeffs.items() if poly.coefficient(m)})
            rhs.append(target.coefficient(m))
    return rows, rhs


def G(A, text):
    names = tuple(f"A{i}" for i in range(1, 7))
    return parse_polynomial(text, names).substitute(A)


def central(A, idx):
    zero = Polynomial.zero(NAMES)
    return [((min(i, j), max(i, j)), zero) for i in idx for j in range(6) if i != j]


def flip(A):
    return A[:5] + [-A[5]]


CASES = {
    "A3A4 with center A1, A5": lambda A: [((2, 3), G(A, "-A1*A5 - 2*A2*A6"))] + central(A, (0, 4)),
    "A2 row": lambda A: [((1, 2), G(A, "A1^2 + A2^2")), ((1, 3), G(A, "2*A3")),
                         ((1, 5), G(A, "-2*A3"))],
}


@pytest.mark.parametrize("case", sorted(CASES))
def test_printed_generators_admit_no_structure_constants(case):
    A = load("c2_generators")
    rows, rhs = system(A, CASES[case](A))
    assert linalg.solve(rows, rhs, len(UNKNOWN)) is None


@pytest.mark.parametrize("case", sorted(CASES))
def test_same_systems_solvable_with_a6_sign_flipped(case):
    A = flip(load("c2_generators"))
    rows, rhs = system(A, CASES[case](A))
    assert linalg.solve(rows, rhs, len(UNKNOWN)) is not None
