"""Regenerate tests/fixtures/verma_m10.json with a dense sympy solve.

Independent of symalg: X2 is a symbolic banded matrix, the commutators are
formed with sympy matrices and the minimum-norm least-squares solution comes
from the Moore-Penrose pseudo-inverse.
"""

import json
from pathlib import Path

import sympy as sp

E, LAM, U, V1, M = 1, 1, 1, 1, 10
BAND = (-3, -2, -1, 0, 2)


def main():
    n = M + 1
    X1 = sp.diag(*[(m - 2) * U + LAM for m in range(n)])
    F = sp.zeros(n, n)
    for m in range(M):
        F[m + 1, m] = E
    syms = {}
    X2 = sp.zeros(n, n)
    for k in BAND:
        for m in range(n):
            if 0 <= m + k <= M:
                s = sp.Symbol(f"c_{k}_{m}".replace("-", "n"))
                syms[(k, m)] = s
                X2[m + k, m] = s
    R1 = X1 * X2 - X2 * X1 - F
    R2 = X2 * F - F * X2 - V1 * X1 ** 3
    eqs = [R[i, m] for R in (R1, R2) for m in range(3, M - 2) for i in range(n)]
    unknowns = list(syms.values())
    A, b = sp.linear_eq_to_matrix(eqs, unknowns)
    x = A.pinv() * b
    res = A * x - b
    sol = dict(zip(syms, x))
    out = {
        "instance": {"E": E, "lambda": LAM, "u": U, "v1": V1, "M": M, "band": list(BAND)},
        "band_coefficients": {
            str(k): [str(sol[(k, m)]) if (k, m) in sol else None for m in range(n)]
            for k in BAND
        },
        "residual_norm_squared": str(sum(r * r for r in res)),
    }
    path = Path(__file__).resolve().parents[1] / "fixtures" / "verma_m10.json"
    path.write_text(json.dumps(out, indent=1) + "\n")


if __name__ == "__main__":
    main()
