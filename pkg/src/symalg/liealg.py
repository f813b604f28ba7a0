"""Lie algebra structure constants and the induced Poisson-Lie bracket.

For a basis ``x_1..x_n`` of the dual space the bracket on polynomials is

    {p, q} = sum_{j,k,l} C_jk^l x_l (dp/dx_j)(dq/dx_k)

with ``{x_j, x_k} = sum_l C_jk^l x_l``.  Tables store only ``j < k``; the
other half follows from antisymmetry.  Indices are 0-based in Python and
1-based in the JSON file format.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from itertools import combinations
from typing import Mapping, Sequence

from .polyring import Polynomial, VariableMismatch, as_rational, format_rational


class AlgebraFileError(ValueError):
    """Malformed algebra JSON."""


@dataclass(frozen=True)
class StructureConstants:
    names: tuple
    # (j, k) with j < k  ->  {l: C_jk^l}
    brackets: Mapping = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(self.names))
        n = len(self.names)
        if n < 1:
            raise ValueError("a Lie algebra needs at least one basis element")
        clean = {}
        for (j, k), terms in self.brackets.items():
            if not (0 <= j < n and 0 <= k < n):
                raise ValueError(f"bracket index ({j}, {k}) out of range")
            if j == k:
                if any(as_rational(v) for v in terms.values()):
                    raise ValueError(f"[x{j + 1}, x{j + 1}] must vanish")
                continue
            if j > k:
                raise ValueError("store brackets with j < k only")
            row = {}
            for l, v in terms.items():
                if not 0 <= l < n:
                    raise ValueError(f"output index {l} out of range")
                v = as_rational(v)
                if v:
                    row[l] = v
            if row:
                clean[(j, k)] = row
        object.__setattr__(self, "brackets", clean)

    @property
    def dim(self) -> int:
        return len(self.names)

    def c(self, j: int, k: int, l: int) -> Fraction:
        """C_jk^l for any ordering of j, k."""
        if j == k:
            return Fraction(0)
        if j < k:
            return self.brackets.get((j, k), {}).get(l, Fraction(0))
        return -self.brackets.get((k, j), {}).get(l, Fraction(0))

    def bracket_row(self, j: int, k: int) -> dict:
        if j == k:
            return {}
        if j < k:
            return dict(self.brackets.get((j, k), {}))
        return {l: -v for l, v in self.brackets.get((k, j), {}).items()}

    def linear(self, j: int, k: int) -> Polynomial:
        """{x_j, x_k} as a degree-one polynomial."""
        row = self.bracket_row(j, k)
        out = {}
        for l, v in row.items():
            mono = [0] * self.dim
            mono[l] = 1
            out[tuple(mono)] = v
        return Polynomial(self.names, out)

    def ring_gens(self) -> list:
        return Polynomial.gens(self.names)

    # -- serialisation ------------------------------------------------------
    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "names": list(self.names),
            "brackets": [
                {"j": j + 1, "k": k + 1,
                 "terms": {str(l + 1): format_rational(v) for l, v in sorted(row.items())}}
                for (j, k), row in sorted(self.brackets.items())
            ],
        }

    @classmethod
    def from_json(cls, data) -> "StructureConstants":
        if not isinstance(data, dict):
            raise AlgebraFileError("algebra file must hold a JSON object")
        for key in ("dim", "names", "brackets"):
            if key not in data:
                raise AlgebraFileError(f"missing key {key!r}")
        dim, names, entries = data["dim"], data["names"], data["brackets"]
        if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
            raise AlgebraFileError("'dim' must be a positive integer")
        if not isinstance(names, list) or len(names) != dim \
                or not all(isinstance(s, str) and s.isidentifier() for s in names):
            raise AlgebraFileError("'names' must list dim identifier strings")
        if len(set(names)) != dim:
            raise AlgebraFileError("'names' has duplicates")
        if not isinstance(entries, list):
            raise AlgebraFileError("'brackets' must be a list")
        table = {}
        for pos, entry in enumerate(entries):
            where = f"brackets[{pos}]"
            if not isinstance(entry, dict) or set(entry) != {"j", "k", "terms"}:
                raise AlgebraFileError(f"{where}: expected keys j, k, terms")
            j, k, terms = entry["j"], entry["k"], entry["terms"]
            if not all(isinstance(i, int) and not isinstance(i, bool) for i in (j, k)):
                raise AlgebraFileError(f"{where}: j and k must be integers")
            if not (1 <= j < k <= dim):
                raise AlgebraFileError(f"{where}: need 1 <= j < k <= dim, got j={j}, k={k}")
            if (j - 1, k - 1) in table:
                raise AlgebraFileError(f"{where}: duplicate entry for (j, k) = ({j}, {k})")
            if not isinstance(terms, dict):
                raise AlgebraFileError(f"{where}: 'terms' must be an object")
            row = {}
            for l, v in terms.items():
                try:
                    li = int(l)
                except ValueError:
                    raise AlgebraFileError(f"{where}: bad output index {l!r}") from None
                if not 1 <= li <= dim:
                    raise AlgebraFileError(f"{where}: output index {li} out of range")
                try:
                    row[li - 1] = as_rational(v)
                except (TypeError, ValueError, ZeroDivisionError):
                    raise AlgebraFileError(f"{where}: bad coefficient {v!r}") from None
            table[(j - 1, k - 1)] = row
        return cls(tuple(names), table)


def load_algebra_file(path) -> StructureConstants:
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise AlgebraFileError(f"invalid JSON at line {exc.lineno}: {exc.msg}") from None
    return StructureConstants.from_json(data)


def bundled(name: str) -> StructureConstants:
    """Load a shipped fixture: ``"sl2"``, ``"c2"``."""
    text = resources.files("symalg.data").joinpath(f"{name}.json").read_text(encoding="utf-8")
    return StructureConstants.from_json(json.loads(text))


# -- validation ---------------------------------------------------------------
@dataclass
class ValidationReport:
    ok: bool
    failures: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {"pass": self.ok, "failures": self.failures}


def validate_jacobi(C: StructureConstants) -> ValidationReport:
    """Check the Jacobi identity on every triple j < k < l.

    Failures list the 1-based triple and the non-zero output components.
    """
    n = C.dim
    failures = []
    for j, k, l in combinations(range(n), 3):
        bad = {}
        for r in range(n):
            s = Fraction(0)
            for m in range(n):
                s += (C.c(j, k, m) * C.c(m, l, r)
                      + C.c(k, l, m) * C.c(m, j, r)
                      + C.c(l, j, m) * C.c(m, k, r))
            if s:
                bad[C.names[r]] = format_rational(s)
        if bad:
            failures.append({"triple": [j + 1, k + 1, l + 1],
                             "names": [C.names[j], C.names[k], C.names[l]],
                             "residual": bad})
    return ValidationReport(not failures, failures)


@dataclass(frozen=True)
class SubalgebraSelection:
    """0-based strictly increasing basis indices spanning a subalgebra."""

    indices: tuple

    def __post_init__(self):
        idx = tuple(int(i) for i in self.indices)
        if any(b <= a for a, b in zip(idx, idx[1:])):
            raise ValueError("subalgebra indices must be strictly increasing")
        if any(i < 0 for i in idx):
            raise ValueError("subalgebra indices must be non-negative")
        object.__setattr__(self, "indices", idx)

    @classmethod
    def one_based(cls, indices: Sequence[int]) -> "SubalgebraSelection":
        return cls(tuple(sorted(int(i) - 1 for i in indices)))

    @property
    def dim(self) -> int:
        return len(self.indices)


def validate_subalgebra(S: SubalgebraSelection, C: StructureConstants) -> ValidationReport:
    failures = []
    if any(i >= C.dim for i in S.indices):
        return ValidationReport(False, [{"error": "index out of range"}])
    inside = set(S.indices)
    for a, b in combinations(S.indices, 2):
        outside = {C.names[l]: format_rational(v)
                   for l, v in C.bracket_row(a, b).items() if l not in inside}
        if outside:
            failures.append({"pair": [a + 1, b + 1], "outside": outside})
    return ValidationReport(not failures, failures)


# -- brackets ----------------------------------------------------------------
def poisson_bracket(p: Polynomial, q: Polynomial, C: StructureConstants) -> Polynomial:
    if p.variables != C.names or q.variables != C.names:
        raise VariableMismatch(f"bracket needs polynomials in {C.names}")
    n = C.dim
    dp = [p.diff(i) if i in p.support() else None for i in range(n)]
    dq = [q.diff(i) if i in q.support() else None for i in range(n)]
    result = Polynomial.zero(C.names)
    for (j, k) in C.brackets:
        cross = Polynomial.zero(C.names)
        if dp[j] is not None and dq[k] is not None:
            cross = cross + dp[j] * dq[k]
        if dp[k] is not None and dq[j] is not None:
            cross = cross - dp[k] * dq[j]
        if cross:
            result = result + C.linear(j, k) * cross
    return result


def coadjoint_apply(j: int, p: Polynomial, C: StructureConstants) -> Polynomial:
    """{x_j, p}: the vector field sum_{k,l} C_jk^l x_l d/dx_k applied to p."""
    if not 0 <= j < C.dim:
        raise IndexError(f"basis index {j} out of range for dim {C.dim}")
    if p.variables != C.names:
        raise VariableMismatch(f"expected a polynomial in {C.names}")
    result = Polynomial.zero(C.names)
    for k in p.support():
        if k == j:
            continue
        lin = C.linear(j, k)
        if lin:
            result = result + lin * p.diff(k)
    return result
