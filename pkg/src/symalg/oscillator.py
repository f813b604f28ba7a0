"""Quadratic algebras Q(3), deformed oscillators and Fock-space matrices.

Symbolic side (exact): the three-generator quadratic algebra

    [A, B] = C
    [A, C] = alpha A^2 + gamma {A,B} + delta A + epsilon B + zeta
    [B, C] = a A^2 - gamma B^2 - alpha {A,B} + d A - delta B + z

with coefficients polynomial in the central element H and model parameters.
Relation right-hand sides are Polynomials in the ring ``A, B, C, AB`` plus
the coefficient variables, where the symbol ``AB`` stands for the
anticommutator {A,B}.

Numeric side (double precision): structure functions Phi, their
constraints, the Darboux II energy families and explicit (p+1)-dimensional
matrices.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
from numpy.polynomial import Polynomial as ZPoly

from .polyring import Polynomial, parse_polynomial
from .residuals import anticommutator, commutator, max_abs

TOL = 1e-9

GENERATOR_SYMBOLS = ("A", "B", "C", "AB")
DARBOUX2_PARAMS = ("H", "a1", "a2", "a3")
DARBOUX2_RELATIONS = (
    "C",
    "-4*a1*B - 4*a2*A",
    "-24*A^2 + 4*a2*B + 32*H*A - 8*H^2 - 8*a1*H + 6*a1 + 8*a1*a3",
)

# -- errors ------------------------------------------------------------------------


class NotQuadraticForm(ValueError):
    def __init__(self, message, detail=None):
        super().__init__(message)
        self.detail = detail or {}


class InconsistentCoefficients(ValueError):
    def __init__(self, message, detail=None):
        super().__init__(message)
        self.detail = detail or {}


class RealityViolation(ValueError):
    def __init__(self, message, detail=None):
        super().__init__(message)
        self.detail = detail or {}


class NonUnitarizable(ValueError):
    def __init__(self, message, detail=None):
        super().__init__(message)
        self.detail = detail or {}


# -- symbolic template ---------------------------------------------------------------

_ANTI = re.compile(r"\{\s*A\s*,\s*B\s*\}")


def parse_relation(text: str, params: Sequence[str] = DARBOUX2_PARAMS) -> Polynomial:
    """Parse a bracket right-hand side; ``{A,B}`` is read as the anticommutator.

    A plain product ``A*B`` is taken in symmetric ordering, i.e. ``{A,B}/2``.
    """
    ring = GENERATOR_SYMBOLS + tuple(params)
    poly = parse_polynomial(_ANTI.sub("AB", text), ring)
    out = {}
    for m, c in poly.terms.items():
        if m[0] == 1 and m[1] == 1:
            m, c = (0, 0, m[2], m[3] + 1) + m[4:], c / 2
        out[m] = out.get(m, 0) + c
    return Polynomial(ring, out)


def _split(rel: Polynomial) -> dict:
    """Group a relation by generator monomial -> coefficient polynomial."""
    params = rel.variables[4:]
    groups = {}
    for m, c in rel.terms.items():
        key = m[:4]
        groups.setdefault(key, {})[m[4:]] = c
    return {k: Polynomial(params, v) for k, v in groups.items()}


_AC_SLOTS = {(2, 0, 0, 0): "alpha", (0, 0, 0, 1): "gamma", (1, 0, 0, 0): "delta",
             (0, 1, 0, 0): "epsilon", (0, 0, 0, 0): "zeta"}
_BC_SLOTS = {(2, 0, 0, 0): "a_coef", (0, 2, 0, 0): "-gamma", (0, 0, 0, 1): "-alpha",
             (1, 0, 0, 0): "d_coef", (0, 1, 0, 0): "-delta", (0, 0, 0, 0): "z_coef"}
_WORD = {(2, 0, 0, 0): "A^2", (0, 2, 0, 0): "B^2", (0, 0, 0, 1): "{A,B}",
         (1, 0, 0, 0): "A", (0, 1, 0, 0): "B", (0, 0, 0, 0): "1"}


@dataclass(frozen=True)
class QuadraticAlgebraSpec:
    alpha: Polynomial
    gamma: Polynomial
    delta: Polynomial
    epsilon: Polynomial
    zeta: Polynomial
    a_coef: Polynomial
    d_coef: Polynomial
    z_coef: Polynomial

    FIELDS = ("alpha", "gamma", "delta", "epsilon", "zeta", "a_coef", "d_coef", "z_coef")

    @property
    def params(self) -> tuple:
        return self.alpha.variables

    def relations(self) -> tuple:
        """Right-hand sides of [A,B], [A,C], [B,C] in the template ring."""
        ring = GENERATOR_SYMBOLS + self.params
        A, B, C, AB = (Polynomial.variable(ring, s) for s in GENERATOR_SYMBOLS)

        def lift(p):
            return p.in_ring(ring)

        ab = C
        ac = lift(self.alpha) * A ** 2 + lift(self.gamma) * AB + lift(self.delta) * A \
            + lift(self.epsilon) * B + lift(self.zeta)
        bc = lift(self.a_coef) * A ** 2 - lift(self.gamma) * B ** 2 - lift(self.alpha) * AB \
            + lift(self.d_coef) * A - lift(self.delta) * B + lift(self.z_coef)
        return ab, ac, bc

    def evaluate(self, values: dict) -> dict:
        """Numeric coefficients at a parameter point, e.g. {"H": E, "a1": -0.5, ...}."""
        out = {}
        for name in self.FIELDS:
            poly = getattr(self, name)
            total = 0.0
            for m, c in poly.terms.items():
                term = float(c)
                for var, e in zip(poly.variables, m):
                    if e:
                        term *= float(values[var]) ** e
                total += term
            out[name] = total
        return out

    def to_json(self) -> dict:
        return {name: str(getattr(self, name)) for name in self.FIELDS}


def match_generic_form(relations: Sequence[Polynomial]) -> QuadraticAlgebraSpec:
    """Read the eight coefficients off ([A,B], [A,C], [B,C]) right-hand sides."""
    if len(relations) != 3:
        raise ValueError("need the three right-hand sides [A,B], [A,C], [B,C]")
    ab, ac, bc = relations
    ring = ab.variables
    if ring[:4] != GENERATOR_SYMBOLS or ac.variables != ring or bc.variables != ring:
        raise ValueError("relations must share a template ring starting with A, B, C, AB")
    params = ring[4:]
    if ab != Polynomial.variable(ring, "C"):
        raise NotQuadraticForm("[A,B] must equal C", {"relation": "[A,B]", "got": str(ab)})
    zero = Polynomial.zero(params)
    found = {}
    mirrored = {}
    for label, rel, slots in (("[A,C]", ac, _AC_SLOTS), ("[B,C]", bc, _BC_SLOTS)):
        groups = _split(rel)
        for key in groups:
            if key not in slots:
                term = "*".join(f"{s}^{e}" for s, e in zip(GENERATOR_SYMBOLS, key) if e) or "1"
                raise NotQuadraticForm(f"{label} has a term outside the template: {term}",
                                       {"relation": label, "term": term})
        for key, slot in slots.items():
            coeff = groups.get(key, zero)
            if slot.startswith("-"):
                mirrored[slot[1:]] = (-coeff, _WORD[key])
            else:
                found[slot] = coeff
    # gamma, alpha, delta appear in both brackets and must agree
    for name, (value, word) in mirrored.items():
        if found[name] != value:
            raise InconsistentCoefficients(
                f"{name} from [A,C] is {found[name]} but the {word} term of [B,C] gives {value}",
                {"coefficient": name, "from_AC": str(found[name]), "from_BC": str(value)})
    return QuadraticAlgebraSpec(**{f: found[f] for f in QuadraticAlgebraSpec.FIELDS})


def darboux2_spec() -> QuadraticAlgebraSpec:
    return match_generic_form([parse_relation(t) for t in DARBOUX2_RELATIONS])


def darboux2_casimir_value(a1, a2, a3, H):
    """Value of the Casimir in the differential realization."""
    return (32 * a1 + 4 * a2 ** 2) * H - a2 ** 2 * (3 + 4 * a3)


@dataclass
class CasimirExpression:
    """Ordered list of (operator word, coefficient) pairs with non-zero coefficient."""

    terms: list

    WORDS = ("C^2", "{A^2,B}", "{A,B^2}", "{A,B}", "B^2", "B", "A^3", "A^2", "A")

    def coefficient(self, word: str) -> Polynomial | None:
        for w, c in self.terms:
            if w == word:
                return c
        return None

    def __str__(self):
        out = []
        for w, c in self.terms:
            if c == 1:
                text = w
            elif c == -1:
                text = "-" + w
            elif len(c.terms) == 1:
                text = f"{c}*{w}"
            else:
                text = f"({c})*{w}"
            out.append(text)
        return " + ".join(out).replace("+ -", "- ") if out else "0"

    def to_json(self) -> list:
        return [{"word": w, "coefficient": str(c)} for w, c in self.terms]


def casimir_expression(spec: QuadraticAlgebraSpec) -> CasimirExpression:
    """Casimir of the generic quadratic algebra with the given coefficients."""
    al, ga, de, ep, ze = spec.alpha, spec.gamma, spec.delta, spec.epsilon, spec.zeta
    a, d, z = spec.a_coef, spec.d_coef, spec.z_coef
    one = Polynomial.constant(spec.params, 1)
    coeffs = [
        ("C^2", one),
        ("{A^2,B}", -al),
        ("{A,B^2}", -ga),
        ("{A,B}", al * ga - de),
        ("B^2", ga * ga - ep),
        ("B", ga * de - 2 * ze),
        ("A^3", a * Fraction(2, 3)),
        ("A^2", d + a * ga / 3 + al * al),
        ("A", a * ep / 3 + al * de + 2 * z),
    ]
    return CasimirExpression([(w, c) for w, c in coeffs if not c.is_zero()])


# -- structure functions --------------------------------------------------------------


@dataclass
class StructureReport:
    p: int
    tol: float
    phi_at_zero: float
    phi_at_top: float
    interior: list
    zero_at_zero: bool
    zero_at_top: bool
    positive: bool

    @property
    def ok(self) -> bool:
        return self.zero_at_zero and self.zero_at_top and self.positive

    def to_json(self) -> dict:
        return {"p": self.p, "tol": self.tol, "phi_0": self.phi_at_zero,
                "phi_p_plus_1": self.phi_at_top, "phi_interior": self.interior,
                "zero_at_0": self.zero_at_zero, "zero_at_p_plus_1": self.zero_at_top,
                "positive": self.positive, "pass": self.ok}


def verify_structure_function(phi: ZPoly, p: int, tol: float = TOL) -> StructureReport:
    """Phi(0) = 0 and Phi(p+1) = 0 within tol, Phi(k) > tol for k = 1..p."""
    if p < 0:
        raise ValueError("p must be non-negative")
    f0 = float(phi(0))
    ftop = float(phi(p + 1))
    inner = [float(phi(k)) for k in range(1, p + 1)]
    return StructureReport(p, tol, f0, ftop, inner, abs(f0) <= tol, abs(ftop) <= tol,
                           all(v > tol for v in inner))


def _radicand(a: float, p: int) -> float:
    return 8 * a ** 1.5 * (p + 1) - 2 * a * a + a


@dataclass
class SpectrumSolution:
    family: str
    E: float
    p: int
    phi: ZPoly
    eta: float | None = None
    report: StructureReport | None = None

    def to_json(self) -> dict:
        return {"family": self.family, "E": self.E, "p": self.p, "eta": self.eta,
                "phi_coefficients": [float(c) for c in self.phi.coef],
                "verification": self.report.to_json() if self.report else None}


FAMILIES = ("eps+", "eps-", "second")


def darboux2_energy_families(a: float, p: int, tol: float = TOL) -> list:
    """Energies and structure functions for -a1 = a2 = a3 = a.

    Returns the two epsilon branches with Phi(z) = z (p+1-z)^2 and the second
    family E = p(p+2) + a + 3/4 with its cubic Phi, each carrying its
    constraint report.  Solutions are returned whether or not they pass.
    """
    if a <= 0:
        raise ValueError("a must be positive")
    if p < 0 or int(p) != p:
        raise ValueError("p must be a non-negative integer")
    p = int(p)
    rad = _radicand(a, p)
    if rad < 0:
        raise RealityViolation(f"radicand 8a^(3/2)(p+1) - 2a^2 + a = {rad} < 0",
                               {"a": a, "p": p, "radicand": rad})
    sa = math.sqrt(a)
    q = p + 1
    phi_eps = ZPoly([0.0, float(q * q), float(-2 * q), 1.0])  # z (q - z)^2
    out = []
    for eps, label in ((1, "eps+"), (-1, "eps-")):
        E = 0.25 * (8 * sa * q + 3 * a + 2 * eps * math.sqrt(rad))
        out.append(SpectrumSolution(label, E, p, phi_eps))
    shift = (3 * a ** 1.5 - 4 * a * q + sa * (4 * p * p + 8 * p + 3)) / (8 * a)
    phi2 = ZPoly([0.0, -float(q), 1.0]) * ZPoly([shift, 1.0])  # z (z - q) (z + shift)
    out.append(SpectrumSolution("second", p * (p + 2) + a + 0.75, p, phi2))
    for sol in out:
        sol.report = verify_structure_function(sol.phi, p, tol)
    return out


# -- Darboux II structure function induced by the realization ----------------------------


def _ladder_data(a1: float, a2: float):
    if a1 >= 0:
        raise ValueError("the realization needs a1 < 0")
    k = 2 * math.sqrt(-a1)
    c = 2 * a2 / math.sqrt(-a1)
    return k, c


def darboux2_induced_structure_function(a1, a2, a3, E, eta, shift=0.0) -> ZPoly:
    """Phi forced by the diagonal of [B,C] under A = k(N+eta), B = c(N+eta) + shift + b^+ + b.

    Phi(z) = sum_{j<z} D(j + eta) with
    D(M) = (a k^2 M^2 + (d k - delta c) M + z_coef - delta*shift) / (2k),
    which makes Phi(0) = 0 automatically.
    """
    k, c = _ladder_data(a1, a2)
    spec = darboux2_spec().evaluate({"H": E, "a1": a1, "a2": a2, "a3": a3})
    acoef, d, delta, zc = spec["a_coef"], spec["d_coef"], spec["delta"], spec["z_coef"]

    def D(M):
        return (acoef * k * k * M * M + (d * k - delta * c) * M + zc - delta * shift) / (2 * k)

    zs = np.arange(4.0)
    vals = [sum(D(j + eta) for j in range(int(z))) for z in zs]
    return ZPoly.fit(zs, vals, 3, domain=[0, 3], window=[0, 3]).convert()


def darboux2_eta(a1, a2, a3, E, p, shift=0.0) -> list:
    """Real eta with induced Phi(p+1) = 0, largest first, each with its positivity flag."""
    # Phi(p+1) is quadratic in eta; recover it from three samples
    g = [float(darboux2_induced_structure_function(a1, a2, a3, E, t, shift)(p + 1))
         for t in (-1.0, 0.0, 1.0)]
    c0 = g[1]
    c1 = (g[2] - g[0]) / 2
    c2 = (g[2] + g[0]) / 2 - c0
    roots = np.roots([c2, c1, c0]) if abs(c2) > 0 else np.roots([c1, c0])
    out = []
    for r in sorted((r.real for r in roots if abs(r.imag) < 1e-12), reverse=True):
        phi = darboux2_induced_structure_function(a1, a2, a3, E, r, shift)
        out.append((float(r), verify_structure_function(phi, p).positive))
    return out


# -- Fock space -----------------------------------------------------------------------------


@dataclass
class FockRepresentation:
    p: int
    phi_values: list  # Phi(0..p+1)
    N: np.ndarray
    b: np.ndarray
    bdag: np.ndarray

    @property
    def dim(self) -> int:
        return self.p + 1

    def residuals(self) -> dict:
        """Max-norm residuals of the oscillator identities.

        bb^+ = Phi(N+1) is checked on rows 0..p-1; the top state leaves the
        truncated space.
        """
        N, b, bd = self.N, self.b, self.bdag
        phiN = np.diag(self.phi_values[: self.dim])
        phiN1 = np.diag(self.phi_values[1: self.dim + 1])
        bbd = b @ bd - phiN1
        return {
            "[N,b+]-b+": _maxabs(N @ bd - bd @ N - bd),
            "[N,b]+b": _maxabs(N @ b - b @ N + b),
            "b+b-Phi(N)": _maxabs(bd @ b - phiN),
            "bb+-Phi(N+1)": _maxabs(bbd[: self.p]) if self.p else 0.0,
        }

    def to_json(self) -> dict:
        return {"p": self.p, "phi_values": list(self.phi_values), "N": self.N.tolist(),
                "b": self.b.tolist(), "b_dagger": self.bdag.tolist(),
                "residuals": self.residuals()}


def _maxabs(m) -> float:
    return float(max_abs(m))


def fock_representation(phi: ZPoly, p: int) -> FockRepresentation:
    """(p+1)-dimensional N, b, b^+ with b^+ psi_n = sqrt(Phi(n+1)) psi_{n+1}."""
    if p < 0:
        raise ValueError("p must be non-negative")
    vals = [float(phi(k)) for k in range(p + 2)]
    bad = [k for k in range(1, p + 1) if not vals[k] > 0]
    if bad:
        raise NonUnitarizable(f"Phi(k) <= 0 for k = {bad}",
                              {"k": bad, "values": [vals[k] for k in bad]})
    dim = p + 1
    N = np.diag(np.arange(dim, dtype=float))
    bdag = np.zeros((dim, dim))
    for n in range(p):
        bdag[n + 1, n] = math.sqrt(vals[n + 1])
    return FockRepresentation(p, vals, N, bdag.T.copy(), bdag)


# -- realization of the Darboux II algebra -------------------------------------------------------


def template_residuals(coeffs: dict, A, B, C) -> dict:
    """Residuals of the three quadratic-algebra relations for numeric matrices."""
    al, ga, de, ep, ze = (coeffs[k] for k in ("alpha", "gamma", "delta", "epsilon", "zeta"))
    a, d, z = coeffs["a_coef"], coeffs["d_coef"], coeffs["z_coef"]
    eye = np.eye(A.shape[0])
    AB = anticommutator(A, B)
    r_ab = commutator(A, B) - C
    r_ac = commutator(A, C) - (al * A @ A + ga * AB + de * A + ep * B + ze * eye)
    r_bc = commutator(B, C) - (a * A @ A - ga * B @ B - al * AB + d * A - de * B + z * eye)
    return {"[A,B]-C": _maxabs(r_ab), "[A,C]": _maxabs(r_ac), "[B,C]": _maxabs(r_bc)}


def casimir_matrix(expr: CasimirExpression, values: dict, A, B, C):
    """Evaluate a Casimir expression on matrices; anticommutators kept explicit."""
    words = {
        "C^2": C @ C, "{A^2,B}": anticommutator(A @ A, B), "{A,B^2}": anticommutator(A, B @ B),
        "{A,B}": anticommutator(A, B), "B^2": B @ B, "B": B, "A^3": A @ A @ A,
        "A^2": A @ A, "A": A,
    }
    K = np.zeros_like(A)
    for w, c in expr.terms:
        coef = 0.0
        for m, q in c.terms.items():
            t = float(q)
            for var, e in zip(c.variables, m):
                if e:
                    t *= float(values[var]) ** e
            coef += t
        K = K + coef * words[w]
    return K


@dataclass
class Realization:
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    shift: float
    residuals: dict
    casimir: dict
    fock: FockRepresentation = field(repr=False, default=None)

    def to_json(self) -> dict:
        return {"A": self.A.tolist(), "B": self.B.tolist(), "C": self.C.tolist(),
                "shift": self.shift, "residuals": self.residuals, "casimir": self.casimir}


def realize_quadratic_algebra(a1: float, a2: float, a3: float, E: float, eta: float,
                              phi: ZPoly, p: int, shift: float | None = None) -> Realization:
    """Matrices A = 2 sqrt(-a1)(N+eta), B = (2a2/sqrt(-a1))(N+eta) + shift + b^+ + b, C = [A,B].

    ``shift`` defaults to a2*E/a1, the constant part of B when H acts as E;
    with it [A,C] misses by epsilon*shift.  Pass ``shift=0`` together with
    the induced structure function for an exact realization.  Residuals are max-norms of the Darboux II
    relations with H replaced by E; the Casimir block reports how far the
    matrix Casimir is from a multiple of the identity and from the value
    (32 a1 + 4 a2^2) E - a2^2 (3 + 4 a3).  Report only: nothing is asserted.
    """
    k, c = _ladder_data(a1, a2)
    fock = fock_representation(phi, p)
    if shift is None:
        shift = a2 * E / a1
    dim = p + 1
    M = fock.N + eta * np.eye(dim)
    A = k * M
    B = c * M + shift * np.eye(dim) + fock.bdag + fock.b
    C = commutator(A, B)
    spec = darboux2_spec()
    values = {"H": E, "a1": a1, "a2": a2, "a3": a3}
    res = template_residuals(spec.evaluate(values), A, B, C)
    K = casimir_matrix(casimir_expression(spec), values, A, B, C)
    diag = np.diag(K)
    target = darboux2_casimir_value(a1, a2, a3, E)
    cas = {
        "diagonal": diag.tolist(),
        "off_diagonal_max": _maxabs(K - np.diag(diag)),
        "spread": float(np.max(diag) - np.min(diag)) if dim else 0.0,
        "expected_value": target,
        "max_deviation": _maxabs(K - target * np.eye(dim)),
    }
    return Realization(A, B, C, shift, res, cas, fock)
