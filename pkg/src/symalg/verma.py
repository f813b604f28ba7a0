"""Truncated F-chain modules of the cubic algebra Q(3).

Relations (coefficients already evaluated at a fixed energy):

    [X1, X2] = F
    [X1, F]  = u1 X1^2 + u2 X1 + u3 X2 + u
    [X2, F]  = v1 X1^3 + v2 X1^2 + v3 X1 - u2 X2 - u1 {X1, X2} + v

Basis psi_0..psi_M with psi_m = F^m Psi; matrices act on columns, so column m
is the image of psi_m.  F psi_m = E psi_{m+1}, X1 psi_m = ((m-2)u + lam) psi_m
and X2 psi_m = sum_k c_k(m) psi_{m+k} over a band of offsets k.

Residuals are taken on interior states 3 <= m <= M-3 where no product
reaches past the truncation.  Exact Fraction arithmetic is used when every
input is an int, a Fraction or a rational string; floats switch to double
precision with tolerance 1e-9.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational

import numpy as np

from . import linalg
from .polyring import Polynomial, format_rational
from .residuals import anticommutator, commutator, max_abs

TOL = 1e-9
DEFAULT_BAND = (-3, -2, -1, 0, 2)


class InfeasibleAtBound(ValueError):
    """No band solution satisfies the relations; ``certificate`` has the details."""

    def __init__(self, message, certificate):
        super().__init__(message)
        self.certificate = certificate

    @property
    def detail(self):
        return self.certificate.to_json()


def _exact(x) -> bool:
    if isinstance(x, bool):
        return False
    if isinstance(x, Rational):
        return True
    if isinstance(x, str):
        try:
            Fraction(x)
            return True
        except ValueError:
            return False
    return False


def _num(x, exact):
    return Fraction(x) if exact else float(Fraction(x) if isinstance(x, str) else x)


@dataclass(frozen=True)
class CubicAlgebraSpec:
    u1: object = 0
    u2: object = 0
    u3: object = 0
    u: object = 0
    v1: object = 0
    v2: object = 0
    v3: object = 0
    v: object = 0

    FIELDS = ("u1", "u2", "u3", "u", "v1", "v2", "v3", "v")

    @property
    def v1_nonzero(self) -> bool:
        return Fraction(self.v1) != 0 if _exact(self.v1) else float(self.v1) != 0

    @property
    def exact(self) -> bool:
        return all(_exact(getattr(self, f)) for f in self.FIELDS)

    def values(self, exact: bool) -> dict:
        return {f: _num(getattr(self, f), exact) for f in self.FIELDS}

    def to_json(self) -> dict:
        return {f: _out(getattr(self, f)) for f in self.FIELDS}


def _out(x):
    if isinstance(x, Fraction) or (isinstance(x, int) and not isinstance(x, bool)):
        return format_rational(Fraction(x))
    if isinstance(x, str):
        return x
    return float(x)


@dataclass
class TruncatedModule:
    M: int
    E: object
    lam: object
    u: object
    exact: bool
    X1: np.ndarray
    F: np.ndarray
    X2: np.ndarray | None = None
    band: tuple = DEFAULT_BAND
    degenerate: bool = False

    @property
    def size(self) -> int:
        return self.M + 1

    @property
    def interior(self) -> range:
        return range(3, self.M - 2)

    def band_coefficients(self) -> dict:
        """{k: [c_k(m) for m = 0..M]} with None where psi_{m+k} is out of range."""
        out = {}
        for k in self.band:
            out[k] = [self.X2[m + k, m] if 0 <= m + k <= self.M else None
                      for m in range(self.size)]
        return out


def _zeros(n, exact):
    if exact:
        Z = np.empty((n, n), dtype=object)
        Z.fill(Fraction(0))
        return Z
    return np.zeros((n, n))


def build_base_actions(E, lam, u, M: int) -> TruncatedModule:
    """F and X1 of the truncated chain module; X2 left unset."""
    if M < 6:
        raise ValueError("M must be at least 6 so interior states exist")
    exact = all(_exact(x) for x in (E, lam, u))
    E_, lam_, u_ = (_num(x, exact) for x in (E, lam, u))
    n = M + 1
    X1 = _zeros(n, exact)
    F = _zeros(n, exact)
    for m in range(n):
        X1[m, m] = (m - 2) * u_ + lam_
        if m < M:
            F[m + 1, m] = E_
    return TruncatedModule(M, E_, lam_, u_, exact, X1, F, degenerate=(E_ == 0))


# -- band solve ---------------------------------------------------------------


@dataclass
class BandCertificate:
    """Least-squares band solution with per-relation residuals.

    ``feasible`` is True when the residual vanishes (exactly, or within tol in
    float mode).  ``violating`` lists relations that are inconsistent even
    when imposed alone; "joint" means each is solvable alone but not together.
    """

    module: TruncatedModule
    feasible: bool
    residual_norm2: object
    relation_residuals: dict
    violating: list
    tol: float = TOL

    def to_json(self) -> dict:
        return {
            "feasible": self.feasible,
            "exact": self.module.exact,
            "residual_norm_squared": _out(self.residual_norm2),
            "relation_residuals": {k: _out(v) for k, v in self.relation_residuals.items()},
            "violating": self.violating,
            "band": list(self.module.band),
            "band_coefficients": {str(k): [None if c is None else _out(c) for c in cs]
                                  for k, cs in self.module.band_coefficients().items()},
        }


def _band_system(spec_vals, base: TruncatedModule, band):
    """Linear equations in the unknowns c_k(m) for both X2-relations on interior states.

    Returns (unknowns, {relation: (rows, rhs)}) with rows as sparse dicts.
    """
    M = base.M
    unknowns = [(k, m) for k in band for m in range(M + 1) if 0 <= m + k <= M]
    col = {km: i for i, km in enumerate(unknowns)}
    d = [base.X1[m, m] for m in range(M + 1)]
    E = base.E
    zero = Fraction(0) if base.exact else 0.0
    v1, v2, v3, v = (spec_vals[f] for f in ("v1", "v2", "v3", "v"))
    rel12, rel2F = ([], []), ([], [])
    for m in base.interior:
        for i in range(M + 1):
            # ([X1,X2] - F)[i, m] = (d_i - d_m) c_{i-m}(m) - F[i, m]
            row = {}
            if (i - m, m) in col and d[i] != d[m]:
                row[col[(i - m, m)]] = d[i] - d[m]
            rel12[0].append(row)
            rel12[1].append(base.F[i, m])
            # ([X2,F] - rhs)[i, m] = E c_{i-m-1}(m+1) - E c_{i-m-1}(m) - rhs[i, m]
            row = {}
            if E != 0:
                if (i - m - 1, m + 1) in col:
                    row[col[(i - m - 1, m + 1)]] = E
                if (i - m - 1, m) in col:
                    j = col[(i - m - 1, m)]
                    row[j] = row.get(j, zero) - E
                    if row[j] == 0:
                        del row[j]
            rhs = v1 * d[m] ** 3 + v2 * d[m] ** 2 + v3 * d[m] + v if i == m else zero
            rel2F[0].append(row)
            rel2F[1].append(rhs)
    return unknowns, {"[X1,X2]-F": rel12, "[X2,F]-rhs": rel2F}


def _lstsq(rows, rhs, ncols, exact):
    if exact:
        return linalg.least_squares(rows, rhs, ncols)
    A = np.zeros((len(rows), ncols))
    for r, row in enumerate(rows):
        for c, val in row.items():
            A[r, c] = val
    b = np.asarray(rhs, dtype=float)
    x, *_ = np.linalg.lstsq(A, b, rcond=None)
    return {i: x[i] for i in range(ncols) if x[i] != 0}, list(A @ x - b)


def _feasible_alone(rows, rhs, ncols, exact):
    if exact:
        return linalg.solve(rows, rhs, ncols) is not None
    _, res = _lstsq(rows, rhs, ncols, exact)
    return max((abs(r) for r in res), default=0.0) <= TOL


def solve_X2_band(spec: CubicAlgebraSpec, base: TruncatedModule, band=DEFAULT_BAND,
                  strict: bool = False):
    """Band coefficients c_k(m) from [X1,X2] = F and [X2,F] = v1 X1^3 + ... + v.

    Returns a BandCertificate whose ``module`` carries the minimum-norm
    least-squares X2.  With ``strict`` an infeasible system raises
    InfeasibleAtBound instead.
    """
    if any(_num(getattr(spec, f), False) != 0 for f in ("u1", "u2", "u3")):
        raise ValueError("the band solver covers the u1 = u2 = u3 = 0 regime only")
    band = tuple(sorted(set(int(k) for k in band)))
    exact = base.exact and spec.exact
    if base.exact and not exact:
        base = _to_float(base)
    vals = spec.values(exact)
    unknowns, systems = _band_system(vals, base, band)
    n = len(unknowns)
    rows = systems["[X1,X2]-F"][0] + systems["[X2,F]-rhs"][0]
    rhs = systems["[X1,X2]-F"][1] + systems["[X2,F]-rhs"][1]
    x, res = _lstsq(rows, rhs, n, exact)
    X2 = _zeros(base.size, exact)
    for i, (k, m) in enumerate(unknowns):
        X2[m + k, m] = x.get(i, Fraction(0) if exact else 0.0)
    module = TruncatedModule(base.M, base.E, base.lam, base.u, exact, base.X1, base.F, X2,
                             band, base.degenerate)
    n12 = len(systems["[X1,X2]-F"][0])
    rel_res = {"[X1,X2]-F": max((abs(r) for r in res[:n12]), default=0),
               "[X2,F]-rhs": max((abs(r) for r in res[n12:]), default=0)}
    norm2 = sum(r * r for r in res)
    feasible = norm2 == 0 if exact else max(rel_res.values()) <= TOL
    violating = []
    if not feasible:
        violating = [name for name, (r, b) in systems.items()
                     if not _feasible_alone(r, b, n, exact)] or ["joint"]
    cert = BandCertificate(module, feasible, norm2, rel_res, violating)
    if strict and not feasible:
        raise InfeasibleAtBound(f"no X2 on band {list(band)} satisfies {', '.join(violating)}",
                                cert)
    return cert


def _to_float(mod: TruncatedModule) -> TruncatedModule:
    f = np.vectorize(float, otypes=[float])
    return TruncatedModule(mod.M, float(mod.E), float(mod.lam), float(mod.u), False,
                           f(mod.X1), f(mod.F), None if mod.X2 is None else f(mod.X2),
                           mod.band, mod.degenerate)


# -- verification -------------------------------------------------------------


@dataclass
class ResidualReport:
    interior: list
    residuals: dict
    casimir_diagonal: list
    casimir_mean: object
    casimir_variance: object
    casimir_offdiagonal: object
    exact: bool = field(default=False)

    def to_json(self) -> dict:
        return {
            "interior_states": self.interior,
            "residuals": {k: _out(v) for k, v in self.residuals.items()},
            "casimir": {"diagonal": [_out(x) for x in self.casimir_diagonal],
                        "mean": _out(self.casimir_mean),
                        "variance": _out(self.casimir_variance),
                        "offdiagonal_max": _out(self.casimir_offdiagonal)},
            "exact": self.exact,
        }


def casimir_c3(X1, X2, F, s: dict):
    """C(3) assembled term by term from the cubic-algebra Casimir formula."""
    n = X1.shape[0]
    I = np.eye(n, dtype=X1.dtype)
    if X1.dtype == object:
        I = np.array([[Fraction(int(i == j)) for j in range(n)] for i in range(n)], dtype=object)
    X11 = X1 @ X1
    return (F @ F - s["u1"] * anticommutator(X11, X2) - s["u2"] * anticommutator(X1, X2)
            + s["v1"] / 2 * (X11 @ X11) + Fraction(2, 3) * s["v2"] * (X11 @ X1)
            + (s["v3"] + s["u1"] ** 2) * X11 + (s["u1"] * s["u2"] + 2 * s["v"]) * X1
            - 2 * s["u"] * X2 - s["u3"] * (X2 @ X2) + 0 * I)


def verify_cubic_relations(module: TruncatedModule, spec: CubicAlgebraSpec) -> ResidualReport:
    """Residuals of the three cubic relations on interior states, plus C(3).

    The [X1,F] relation is reported twice: against the constant u*I of the
    algebra and against u*F, which is what the chain actions produce.
    """
    exact = module.exact and spec.exact
    mod = module if exact or not module.exact else _to_float(module)
    s = spec.values(exact)
    if not exact:
        s = {k: float(v) for k, v in s.items()}
    X1, F = mod.X1, mod.F
    X2 = mod.X2 if mod.X2 is not None else _zeros(mod.size, exact)
    n = mod.size
    I = _zeros(n, exact)
    for i in range(n):
        I[i, i] = Fraction(1) if exact else 1.0
    states = list(mod.interior)
    X11 = X1 @ X1
    rhs1 = s["u1"] * X11 + s["u2"] * X1 + s["u3"] * X2 + s["u"] * I
    rhs2 = (s["v1"] * (X11 @ X1) + s["v2"] * X11 + s["v3"] * X1 - s["u2"] * X2
            - s["u1"] * anticommutator(X1, X2) + s["v"] * I)
    X1F = commutator(X1, F)
    res = {
        "[X1,X2]-F": max_abs(commutator(X1, X2) - F, states),
        "[X1,F]-rhs": max_abs(X1F - rhs1, states),
        "[X1,F]-uF": max_abs(X1F - mod.u * F if mod.u is not None else X1F, states),
        "[X2,F]-rhs": max_abs(commutator(X2, F) - rhs2, states),
    }
    K = casimir_c3(X1, X2, F, s)
    diag = [K[m, m] for m in states]
    mean = sum(diag) / len(diag)
    var = sum((x - mean) ** 2 for x in diag) / len(diag)
    off = K.copy()
    for i in range(n):
        off[i, i] = 0 * off[i, i]
    return ResidualReport(states, res, diag, mean, var, max_abs(off, states), exact)


# -- band coefficient fits -----------------------------------------------------


def fit_band_polynomials(module: TruncatedModule, max_degree: int | None = None) -> dict:
    """Lowest-degree polynomial in m through c_k(m) on interior states, per offset.

    Exact mode returns Polynomials in ``m``; float mode numpy coefficient
    lists (ascending).  None when no polynomial of degree < #points fits,
    which cannot happen, so None only marks an empty range.
    """
    states = list(module.interior)
    coeffs = module.band_coefficients()
    out = {}
    for k, cs in coeffs.items():
        pts = [(m, cs[m]) for m in states if cs[m] is not None]
        if not pts:
            out[k] = None
            continue
        top = len(pts) - 1 if max_degree is None else min(max_degree, len(pts) - 1)
        out[k] = _fit_exact(pts, top) if module.exact else _fit_float(pts, top)
    return out


def _fit_exact(pts, top):
    for deg in range(top + 1):
        rows = [{j: Fraction(m) ** j for j in range(deg + 1) if m or j == 0} for m, _ in pts]
        sol = linalg.solve(rows, [c for _, c in pts], deg + 1)
        if sol is not None:
            return Polynomial(("m",), {(j,): c for j, c in sol.items()})
    return None


def _fit_float(pts, top):
    ms = np.array([m for m, _ in pts], dtype=float)
    cs = np.array([c for _, c in pts], dtype=float)
    for deg in range(top + 1):
        p = np.polynomial.Polynomial.fit(ms, cs, deg).convert()
        if np.max(np.abs(p(ms) - cs)) <= TOL * max(1.0, np.max(np.abs(cs))):
            return [float(c) for c in p.coef]
    return None
