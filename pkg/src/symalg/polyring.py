"""Exact multivariate polynomials over the rationals.

A :class:`Polynomial` lives in a ring fixed by an ordered tuple of variable
names.  Monomials are dense exponent tuples aligned with that tuple, so a
monomial never stores a name, only positions.  Coefficients are
:class:`fractions.Fraction` and zero coefficients are never stored.

Monomials are ordered graded reverse-lexicographically (grevlex) with the
first variable largest.  That order drives canonical printing and the column
order of every linear system assembled elsewhere in the package.

Canonical text form::

    >>> x = Polynomial.gens(("x1", "x2", "x3", "x4"))
    >>> str(x[0] * x[2] + x[1] * x[3])
    'x1*x3 + x2*x4'
    >>> str(Fraction(-1, 2) * x[2] ** 2 + 3)
    '-1/2*x3^2 + 3'
"""

from __future__ import annotations

import ast
import itertools
import math
from fractions import Fraction
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence, Union

Monomial = tuple  # tuple[int, ...], one exponent per ring variable
RationalLike = Union[int, Fraction, str]


class VariableMismatch(ValueError):
    """Raised when two polynomials from different rings are combined."""


def as_rational(value) -> Fraction:
    """Coerce ``value`` to a Fraction.

    Strings may be ``"num/den"``, integers or decimal literals.  Floats are
    read through their shortest decimal repr, so ``0.1`` becomes ``1/10``.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"non-finite value {value!r}")
        return Fraction(repr(value))
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot interpret {value!r} as a rational")


def format_rational(q: Fraction) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def grevlex_key(mono: Monomial):
    """Sort key; larger key means larger monomial in grevlex."""
    return (sum(mono), tuple(-e for e in reversed(mono)))


def monomials_of_degree(nvars: int, h: int) -> list:
    """All exponent tuples of total degree ``h`` in ``nvars`` variables.

    Returned in descending grevlex order; there are ``C(h + nvars - 1, h)``.
    """
    if nvars < 1:
        raise ValueError("nvars must be positive")
    if h < 0:
        return []
    out = []
    # stars and bars: choose positions of nvars-1 bars among h+nvars-1 slots
    for bars in itertools.combinations(range(h + nvars - 1), nvars - 1):
        prev = -1
        exps = []
        for b in bars:
            exps.append(b - prev - 1)
            prev = b
        exps.append(h + nvars - 2 - prev)
        out.append(tuple(exps))
    out.sort(key=grevlex_key, reverse=True)
    return out


def monomials_up_to_degree(nvars: int, h: int) -> list:
    out = []
    for d in range(h, -1, -1):
        out.extend(monomials_of_degree(nvars, d))
    return out


def _mono_str(names: Sequence[str], mono: Monomial) -> str:
    parts = []
    for name, e in zip(names, mono):
        if e == 1:
            parts.append(name)
        elif e > 1:
            parts.append(f"{name}^{e}")
    return "*".join(parts)


class Polynomial:
    """Immutable polynomial with rational coefficients in named variables."""

    __slots__ = ("_vars", "_terms", "_hash")

    def __init__(self, variables: Iterable[str], terms: Mapping | None = None):
        self._vars = tuple(variables)
        if len(set(self._vars)) != len(self._vars):
            raise ValueError(f"duplicate variable names in {self._vars}")
        n = len(self._vars)
        clean = {}
        if terms:
            for mono, c in terms.items():
                mono = tuple(mono)
                if len(mono) != n or any(e < 0 for e in mono):
                    raise ValueError(f"bad monomial {mono} for ring {self._vars}")
                c = as_rational(c)
                if c:
                    clean[mono] = clean.get(mono, 0) + c
                    if not clean[mono]:
                        del clean[mono]
        self._terms = clean
        self._hash = None

    # -- constructors -------------------------------------------------------
    @classmethod
    def zero(cls, variables: Iterable[str]) -> "Polynomial":
        return cls(variables)

    @classmethod
    def constant(cls, variables: Iterable[str], c: RationalLike) -> "Polynomial":
        variables = tuple(variables)
        return cls(variables, {(0,) * len(variables): c})

    @classmethod
    def variable(cls, variables: Iterable[str], which: Union[int, str]) -> "Polynomial":
        variables = tuple(variables)
        i = variables.index(which) if isinstance(which, str) else which
        mono = [0] * len(variables)
        mono[i] = 1
        return cls(variables, {tuple(mono): 1})

    @classmethod
    def gens(cls, variables: Iterable[str]) -> list:
        variables = tuple(variables)
        return [cls.variable(variables, i) for i in range(len(variables))]

    @classmethod
    def monomial(cls, variables: Iterable[str], mono: Monomial, c: RationalLike = 1):
        return cls(variables, {tuple(mono): c})

    # -- basic accessors ----------------------------------------------------
    @property
    def variables(self) -> tuple:
        return self._vars

    @property
    def nvars(self) -> int:
        return len(self._vars)

    @property
    def terms(self) -> Mapping:
        return MappingProxyType(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def coefficient(self, mono: Monomial) -> Fraction:
        return self._terms.get(tuple(mono), Fraction(0))

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(m) for m in self._terms), default=-1)

    def is_homogeneous(self) -> bool:
        return len({sum(m) for m in self._terms}) <= 1

    def sorted_terms(self) -> list:
        return sorted(self._terms.items(), key=lambda t: grevlex_key(t[0]), reverse=True)

    def leading_term(self):
        if not self._terms:
            return None
        return max(self._terms.items(), key=lambda t: grevlex_key(t[0]))

    def support(self) -> set:
        """Indices of variables that occur."""
        return {i for m in self._terms for i, e in enumerate(m) if e}

    def homogeneous_part(self, d: int) -> "Polynomial":
        return Polynomial(self._vars, {m: c for m, c in self._terms.items() if sum(m) == d})

    # -- arithmetic ---------------------------------------------------------
    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other._vars != self._vars:
                raise VariableMismatch(f"ring {self._vars} vs {other._vars}")
            return other
        return Polynomial.constant(self._vars, as_rational(other))

    def __add__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        out = dict(self._terms)
        for m, c in other._terms.items():
            s = out.get(m, 0) + c
            if s:
                out[m] = s
            else:
                out.pop(m, None)
        return Polynomial._raw(self._vars, out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._raw(self._vars, {m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            try:
                q = as_rational(other)
            except TypeError:
                return NotImplemented
            if not q:
                return Polynomial._raw(self._vars, {})
            return Polynomial._raw(self._vars, {m: c * q for m, c in self._terms.items()})
        other = self._coerce(other)
        out = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                s = out.get(m, 0) + c1 * c2
                if s:
                    out[m] = s
                else:
                    del out[m]
        return Polynomial._raw(self._vars, out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        q = as_rational(other)
        return self * (1 / q)

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        result = Polynomial.constant(self._vars, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self._vars == other._vars and self._terms == other._terms
        try:
            q = as_rational(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self._terms == ({(0,) * self.nvars: q} if q else {})

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self._vars, frozenset(self._terms.items())))
        return self._hash

    def __bool__(self):
        return bool(self._terms)

    # -- calculus and evaluation -------------------------------------------
    def diff(self, var: Union[int, str]) -> "Polynomial":
        i = self._vars.index(var) if isinstance(var, str) else var
        if not 0 <= i < self.nvars:
            raise IndexError(f"variable index {var} out of range")
        out = {}
        for m, c in self._terms.items():
            e = m[i]
            if e:
                dm = m[:i] + (e - 1,) + m[i + 1:]
                out[dm] = c * e
        return Polynomial._raw(self._vars, out)

    def evaluate(self, point: Sequence) -> Fraction:
        if len(point) != self.nvars:
            raise ValueError(f"point has {len(point)} entries, ring has {self.nvars}")
        pt = [as_rational(v) for v in point]
        total = Fraction(0)
        for m, c in self._terms.items():
            term = c
            for v, e in zip(pt, m):
                if e:
                    term *= v ** e
            total += term
        return total

    def substitute(self, values: Sequence["Polynomial"]) -> "Polynomial":
        """Replace the i-th variable by ``values[i]`` (all in one target ring)."""
        if len(values) != self.nvars:
            raise ValueError("need one value per variable")
        if not values:
            raise ValueError("cannot substitute into a ring with no variables")
        target = values[0].variables
        for v in values:
            if v.variables != target:
                raise VariableMismatch("substituted values live in different rings")
        cache = {}

        def power(i, e):
            key = (i, e)
            if key not in cache:
                cache[key] = values[i] ** e
            return cache[key]

        result = Polynomial.zero(target)
        for m, c in self._terms.items():
            term = Polynomial.constant(target, c)
            for i, e in enumerate(m):
                if e:
                    term = term * power(i, e)
            result = result + term
        return result

    def in_ring(self, variables: Sequence[str]) -> "Polynomial":
        """Re-embed into a ring whose variable list contains every used variable."""
        variables = tuple(variables)
        pos = []
        for i, name in enumerate(self._vars):
            if name in variables:
                pos.append(variables.index(name))
            else:
                pos.append(None)
        out = {}
        for m, c in self._terms.items():
            nm = [0] * len(variables)
            for i, e in enumerate(m):
                if e:
                    if pos[i] is None:
                        raise VariableMismatch(f"variable {self._vars[i]} not in {variables}")
                    nm[pos[i]] = e
            out[tuple(nm)] = c
        return Polynomial._raw(variables, out)

    # -- text ---------------------------------------------------------------
    def __str__(self):
        if not self._terms:
            return "0"
        pieces = []
        for idx, (m, c) in enumerate(self.sorted_terms()):
            body = _mono_str(self._vars, m)
            sign = "-" if c < 0 else "+"
            a = abs(c)
            if not body:
                text = format_rational(a)
            elif a == 1:
                text = body
            else:
                text = f"{format_rational(a)}*{body}"
            if idx == 0:
                pieces.append(("-" if sign == "-" else "") + text)
            else:
                pieces.append(f" {sign} {text}")
        return "".join(pieces)

    def __repr__(self):
        return f"Polynomial({str(self)!r}, vars={self._vars})"

    @classmethod
    def _raw(cls, variables, terms):
        obj = cls.__new__(cls)
        obj._vars = variables
        obj._terms = terms
        obj._hash = None
        return obj


# -- functional aliases used by the rest of the package ----------------------
def poly_add(p: Polynomial, q: Polynomial) -> Polynomial:
    return p + p._coerce(q)


def poly_mul(p: Polynomial, q: Polynomial) -> Polynomial:
    return p * p._coerce(q)


def partial_derivative(p: Polynomial, var: Union[int, str]) -> Polynomial:
    return p.diff(var)


def evaluate(p: Polynomial, point: Sequence) -> Fraction:
    return p.evaluate(point)


# -- parsing ------------------------------------------------------------------
class PolynomialParseError(ValueError):
    pass


def parse_polynomial(text: str, variables: Sequence[str]) -> Polynomial:
    """Parse the canonical text form (and ordinary arithmetic) into a Polynomial.

    Accepts ``+ - * /``, parentheses, ``^`` or ``**`` with non-negative integer
    exponents, integer and decimal literals, and ``num/den`` coefficients.
    Division is allowed only by non-zero constants.
    """
    variables = tuple(variables)
    src = text.replace("^", "**")
    try:
        tree = ast.parse(src, mode="eval")
    except SyntaxError as exc:
        raise PolynomialParseError(f"cannot parse {text!r}: {exc.msg}") from None

    def walk(node) -> Polynomial:
        if isinstance(node, ast.Expression):
            return walk(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) \
                and not isinstance(node.value, bool):
            return Polynomial.constant(variables, as_rational(node.value))
        if isinstance(node, ast.Name):
            if node.id not in variables:
                raise PolynomialParseError(f"unknown variable {node.id!r} in {text!r}")
            return Polynomial.variable(variables, node.id)
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            val = walk(node.operand)
            return -val if isinstance(node.op, ast.USub) else val
        if isinstance(node, ast.BinOp):
            left = walk(node.left)
            if isinstance(node.op, ast.Pow):
                exp = walk(node.right)
                if exp.degree() > 0:
                    raise PolynomialParseError(f"non-constant exponent in {text!r}")
                k = exp.coefficient((0,) * len(variables))
                if k.denominator != 1 or k < 0:
                    raise PolynomialParseError(f"exponent must be a non-negative integer in {text!r}")
                return left ** int(k)
            right = walk(node.right)
            if isinstance(node.op, ast.Add):
                return left + right
            if isinstance(node.op, ast.Sub):
                return left - right
            if isinstance(node.op, ast.Mult):
                return left * right
            if isinstance(node.op, ast.Div):
                if right.degree() > 0 or right.is_zero():
                    raise PolynomialParseError(f"division by non-constant or zero in {text!r}")
                return left / right.coefficient((0,) * len(variables))
        raise PolynomialParseError(f"unsupported syntax in {text!r}")

    return walk(tree)
