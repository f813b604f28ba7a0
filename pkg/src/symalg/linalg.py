"""Sparse Gauss-Jordan elimination over the rationals.

Vectors and matrix rows are dicts ``{column: Fraction}`` without zero
entries.  Column order is the integer order of the keys; callers map their
monomial orders onto column indices so that "leftmost pivot" means "largest
monomial".
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

SparseVec = dict


def _axpy(target: dict, alpha: Fraction, src: dict) -> None:
    """target += alpha * src, dropping cancellations."""
    for c, v in src.items():
        s = target.get(c, 0) + alpha * v
        if s:
            target[c] = s
        else:
            target.pop(c, None)


class EchelonBasis:
    """Incrementally maintained reduced row echelon form.

    ``rows`` maps pivot column to a row whose pivot entry is 1 and whose other
    pivot-column entries are 0.
    """

    def __init__(self):
        self.rows: dict = {}

    def reduce(self, vec: dict) -> dict:
        """Return ``vec`` reduced modulo the current row space."""
        v = dict(vec)
        for col in sorted(c for c in v if c in self.rows):
            coef = v.get(col)
            if coef:
                _axpy(v, -coef, self.rows[col])
        return v

    def add(self, vec: dict) -> bool:
        """Insert ``vec``; returns False when it was already in the span."""
        v = self.reduce(vec)
        if not v:
            return False
        piv = min(v)
        inv = 1 / v[piv]
        v = {c: x * inv for c, x in v.items()}
        for row in self.rows.values():
            coef = row.get(piv)
            if coef:
                _axpy(row, -coef, v)
        self.rows[piv] = v
        return True

    def contains(self, vec: dict) -> bool:
        return not self.reduce(vec)

    @property
    def rank(self) -> int:
        return len(self.rows)

    @property
    def pivots(self) -> list:
        return sorted(self.rows)

    def basis(self) -> list:
        return [dict(self.rows[p]) for p in self.pivots]


def rref(rows: Iterable[dict]) -> EchelonBasis:
    eb = EchelonBasis()
    for r in rows:
        eb.add(r)
    return eb


def rank(rows: Iterable[dict]) -> int:
    return rref(rows).rank


def nullspace(rows: Iterable[dict], ncols: int) -> list:
    """Basis of {v : A v = 0}, itself in reduced row echelon form.

    ``rows`` are the equations; unknowns are columns ``0..ncols-1``.
    """
    eb = rref(rows)
    pivots = set(eb.rows)
    basis = []
    for free in range(ncols):
        if free in pivots:
            continue
        v = {free: Fraction(1)}
        for p, row in eb.rows.items():
            coef = row.get(free)
            if coef:
                v[p] = -coef
        basis.append(v)
    return rref(basis).basis()


def solve(rows: Sequence[dict], rhs: Sequence, ncols: int):
    """One solution of A v = b with every free unknown set to zero, or None.

    The augmented column sits at index ``ncols``.
    """
    aug = []
    for r, b in zip(rows, rhs):
        row = dict(r)
        b = Fraction(b)
        if b:
            row[ncols] = b
        aug.append(row)
    eb = rref(aug)
    if ncols in eb.rows:
        return None
    sol = {}
    for p, row in eb.rows.items():
        val = row.get(ncols)
        if val:
            sol[p] = val
    return sol


def span_complement(vectors: Iterable[dict], subspace: Iterable[dict]) -> list:
    """Reduced-echelon representatives of span(vectors) modulo span(subspace)."""
    sub = rref(subspace)
    reduced = [sub.reduce(v) for v in vectors]
    comp = EchelonBasis()
    for v in reduced:
        if v:
            comp.add(v)
    # re-reduce against the subspace so pivots of both stay clean
    return [sub.reduce(v) for v in comp.basis()]


def transpose(rows: Sequence[dict]) -> dict:
    cols: dict = {}
    for i, r in enumerate(rows):
        for c, v in r.items():
            cols.setdefault(c, {})[i] = v
    return cols


def matvec(rows: Sequence[dict], vec: dict) -> list:
    return [sum((v * vec.get(c, 0) for c, v in r.items()), Fraction(0)) for r in rows]


def least_squares(rows: Sequence[dict], rhs: Sequence, ncols: int):
    """Exact minimum-norm least-squares solution of A v ~ b.

    Returns ``(solution, residual_vector)``; both exact.
    """
    cols = transpose(rows)
    # normal equations A^T A v = A^T b
    normal_rows = []
    normal_rhs = []
    for j in range(ncols):
        cj = cols.get(j, {})
        row = {}
        for k in range(ncols):
            ck = cols.get(k, {})
            if len(cj) > len(ck):
                s = sum((v * cj[i] for i, v in ck.items() if i in cj), Fraction(0))
            else:
                s = sum((v * ck[i] for i, v in cj.items() if i in ck), Fraction(0))
            if s:
                row[k] = s
        normal_rows.append(row)
        normal_rhs.append(sum((v * Fraction(rhs[i]) for i, v in cj.items()), Fraction(0)))
    x0 = solve(normal_rows, normal_rhs, ncols)
    assert x0 is not None, "normal equations are always consistent"
    # project out the nullspace of A to get the minimum-norm representative
    null = nullspace(rows, ncols)
    if null:
        gram = [{k: _dot(u, w) for k, w in enumerate(null) if _dot(u, w)} for u in null]
        proj_rhs = [_dot(u, x0) for u in null]
        coeffs = solve(gram, proj_rhs, len(null))
        for k, c in coeffs.items():
            _axpy(x0, -c, null[k])
    residual = [a - Fraction(b) for a, b in zip(matvec(rows, x0), rhs)]
    return x0, residual


def _dot(u: dict, w: dict) -> Fraction:
    if len(u) > len(w):
        u, w = w, u
    return sum((v * w[c] for c, v in u.items() if c in w), Fraction(0))
