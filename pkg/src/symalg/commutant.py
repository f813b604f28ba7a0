"""Commutants of Lie subalgebras in the symmetric algebra, and their algebras.

Pipeline:

1. :func:`solve_commutant_degree` solves ``{x_j, p} = 0`` (j in the
   subalgebra) over the homogeneous degree-h monomial ansatz by exact
   nullspace computation.
2. :func:`filter_new_generators` drops what is already spanned by products
   of lower-degree solutions.
3. :func:`closure_relations` writes every bracket ``{A_i, A_j}`` as a
   polynomial in the generators.
4. :func:`find_casimirs` and :func:`center_of` find the central elements.
5. :func:`build_algebraic_hamiltonian` assembles and checks a Hamiltonian.

Generator-side polynomials ("polynomials in generators") are ordinary
:class:`Polynomial` objects whose variables are the generator names; their
ambient value is obtained by substitution.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Mapping, Sequence

from . import linalg
from .liealg import (
    StructureConstants,
    SubalgebraSelection,
    coadjoint_apply,
    poisson_bracket,
    validate_jacobi,
    validate_subalgebra,
)
from .polyring import Polynomial, as_rational, format_rational, grevlex_key, monomials_of_degree

DEFAULT_SEED = 20231

# -- errors --------------------------------------------------------------------


class ValidationError(ValueError):
    def __init__(self, message, detail=None):
        super().__init__(message)
        self.detail = detail or {}


class NotClosed(ArithmeticError):
    """A bracket has no expression in the generators within the degree bound."""

    def __init__(self, i, j, names, maxdeg):
        super().__init__(
            f"{{{names[i]}, {names[j]}}} is not a polynomial of degree <= {maxdeg} in the generators")
        self.i, self.j = i, j
        self.detail = {"pair": [names[i], names[j]], "maxdeg": maxdeg}


# -- helpers -------------------------------------------------------------------


def _vector(p: Polynomial, index: Mapping) -> dict:
    return {index[m]: c for m, c in p.terms.items()}


class _Columns:
    """Assigns integer columns to monomials on first sight."""

    def __init__(self):
        self.index = {}

    def vec(self, p: Polynomial) -> dict:
        out = {}
        for m, c in p.terms.items():
            col = self.index.setdefault(m, len(self.index))
            out[col] = c
        return out


def _check_inputs(C: StructureConstants, S: SubalgebraSelection) -> None:
    rep = validate_jacobi(C)
    if not rep.ok:
        raise ValidationError("structure constants violate the Jacobi identity", rep.to_json())
    rep = validate_subalgebra(S, C)
    if not rep.ok:
        raise ValidationError("selection is not closed under the bracket", rep.to_json())


# -- 1. commutant at fixed degree ----------------------------------------------


def solve_commutant_degree(C: StructureConstants, S: SubalgebraSelection, h: int,
                           check: bool = True) -> list:
    """Basis of homogeneous degree-h polynomials commuting with every x_j, j in S.

    The basis is the reduced row echelon form of the solution space with
    columns in descending grevlex order, so each element has a distinct
    leading monomial with coefficient 1.
    """
    if h < 1:
        raise ValueError("degree must be at least 1")
    if check:
        _check_inputs(C, S)
    monos = monomials_of_degree(C.dim, h)
    rows = {}
    for i, m in enumerate(monos):
        p = Polynomial.monomial(C.names, m)
        for j in S.indices:
            image = coadjoint_apply(j, p, C)
            for om, c in image.terms.items():
                rows.setdefault((j, om), {})[i] = c
    basis = linalg.nullspace(rows.values(), len(monos))
    return [Polynomial(C.names, {monos[k]: v for k, v in vec.items()}) for vec in basis]


# -- 2. indecomposable generators ------------------------------------------------


@dataclass
class CommutantBasis:
    solutions: dict  # degree -> list[Polynomial]
    new: dict  # degree -> list[Polynomial]

    def generators(self) -> list:
        return [p for d in sorted(self.new) for p in self.new[d]]

    def counts(self) -> dict:
        return {d: {"solutions": len(self.solutions[d]), "new": len(self.new[d])}
                for d in sorted(self.solutions)}


def filter_new_generators(solutions: Mapping) -> CommutantBasis:
    """Split each degree into products of lower-degree solutions and new generators.

    ``solutions`` must cover every degree from 1 to its maximum.  New
    generators are echelon representatives of the quotient by the span of
    products, reduced against that span.
    """
    degrees = sorted(solutions)
    if degrees and degrees != list(range(1, degrees[-1] + 1)):
        raise ValueError("solutions must be supplied for every degree 1..h")
    new = {}
    for h in degrees:
        sols = solutions[h]
        if not sols:
            new[h] = []
            continue
        names = sols[0].variables
        monos = monomials_of_degree(len(names), h)
        index = {m: i for i, m in enumerate(monos)}
        products = []
        for d in range(1, h // 2 + 1):
            for p in solutions[d]:
                for q in solutions[h - d]:
                    products.append(_vector(p * q, index))
        reps = linalg.span_complement([_vector(p, index) for p in sols], products)
        new[h] = [Polynomial(names, {monos[k]: v for k, v in vec.items()}) for vec in reps]
    return CommutantBasis({h: list(solutions[h]) for h in degrees}, new)


def compute_commutant(C: StructureConstants, S: SubalgebraSelection, maxdeg: int) -> CommutantBasis:
    _check_inputs(C, S)
    sols = {h: solve_commutant_degree(C, S, h, check=False) for h in range(1, maxdeg + 1)}
    return filter_new_generators(sols)


# -- generator sets ----------------------------------------------------------------


@dataclass(frozen=True)
class GeneratorSet:
    names: tuple
    polys: tuple

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(self.names))
        object.__setattr__(self, "polys", tuple(self.polys))
        if len(self.names) != len(self.polys) or not self.names:
            raise ValueError("need one polynomial per generator name")
        ring = self.polys[0].variables
        for name, p in zip(self.names, self.polys):
            if p.variables != ring:
                raise ValueError("generators must share one ambient ring")
            if p.is_zero() or not p.is_homogeneous() or p.degree() < 1:
                raise ValueError(f"generator {name} must be a non-zero homogeneous polynomial of positive degree")

    @classmethod
    def named(cls, polys: Sequence[Polynomial], prefix: str = "A") -> "GeneratorSet":
        return cls(tuple(f"{prefix}{i + 1}" for i in range(len(polys))), tuple(polys))

    @property
    def ambient(self) -> tuple:
        return self.polys[0].variables

    @property
    def weights(self) -> tuple:
        return tuple(p.degree() for p in self.polys)

    def expand(self, P: Polynomial) -> Polynomial:
        if P.variables != self.names:
            raise ValueError(f"expected a polynomial in {self.names}")
        if P.is_zero():
            return Polynomial.zero(self.ambient)
        return P.substitute(list(self.polys))

    def monomials(self, weight: int, maxdeg: int, mindeg: int = 0) -> list:
        """Generator monomials of the given ambient weight, descending grevlex."""
        out = []
        for d in range(mindeg, maxdeg + 1):
            for m in monomials_of_degree(len(self.names), d):
                if sum(e * w for e, w in zip(m, self.weights)) == weight:
                    out.append(m)
        out.sort(key=grevlex_key, reverse=True)
        return out

    def to_json(self) -> list:
        return [{"name": n, "poly": str(p)} for n, p in zip(self.names, self.polys)]


class _Expander:
    """Caches ambient expansions of generator monomials."""

    def __init__(self, gens: GeneratorSet):
        self.gens = gens
        self.cache = {}

    def __call__(self, mono) -> Polynomial:
        mono = tuple(mono)
        if mono not in self.cache:
            if sum(mono) == 0:
                val = Polynomial.constant(self.gens.ambient, 1)
            else:
                i = next(k for k, e in enumerate(mono) if e)
                rest = mono[:i] + (mono[i] - 1,) + mono[i + 1:]
                val = self.gens.polys[i] * self(rest)
            self.cache[mono] = val
        return self.cache[mono]


# -- 3. closure relations -------------------------------------------------------------


@dataclass
class AlgebraPresentation:
    generators: GeneratorSet
    relations: dict  # (i, j) with i < j -> Polynomial in generator names
    center: list = field(default_factory=list)
    verified: bool = False

    def relation(self, i: int, j: int) -> Polynomial:
        if i == j:
            return Polynomial.zero(self.generators.names)
        if i < j:
            return self.relations[(i, j)]
        return -self.relations[(j, i)]

    def nonzero_relations(self) -> dict:
        return {k: v for k, v in self.relations.items() if not v.is_zero()}

    def to_json(self) -> dict:
        names = self.generators.names
        return {
            "generators": self.generators.to_json(),
            "relations": [
                {"i": names[i], "j": names[j], "bracket": str(p)}
                for (i, j), p in sorted(self.relations.items()) if not p.is_zero()
            ],
            "center": list(self.center),
            "verified": self.verified,
        }


def _express(target: Polynomial, gens: GeneratorSet, maxdeg: int, expander: _Expander):
    """Write ``target`` as a polynomial in the generators, or return None.

    Candidates are generator monomials of ambient weight equal to the target's
    degree.  Among multiple solutions the one supported on pivot columns of the
    reduced echelon form is returned (free monomials set to zero).
    """
    if target.is_zero():
        return Polynomial.zero(gens.names)
    if not target.is_homogeneous():
        return None
    cands = gens.monomials(target.degree(), maxdeg)
    if not cands:
        return None
    cols = _Columns()
    rhs_vec = cols.vec(target)
    colvecs = [cols.vec(expander(m)) for m in cands]
    rows = linalg.transpose(colvecs)
    nrows = len(cols.index)
    eqs = [rows.get(r, {}) for r in range(nrows)]
    rhs = [rhs_vec.get(r, 0) for r in range(nrows)]
    sol = linalg.solve(eqs, rhs, len(cands))
    if sol is None:
        return None
    return Polynomial(gens.names, {cands[k]: v for k, v in sol.items()})


def closure_relations(gens: GeneratorSet, C: StructureConstants, maxdeg: int) -> AlgebraPresentation:
    """Express every {A_i, A_j}, i < j, as a polynomial in the generators.

    Raises :class:`NotClosed` when some bracket has no such expression with
    generator-degree at most ``maxdeg``.  Every relation is re-expanded and
    compared to the true bracket before returning.
    """
    if gens.ambient != C.names:
        raise ValueError("generators do not live in the algebra's ring")
    expander = _Expander(gens)
    relations = {}
    n = len(gens.names)
    for i, j in combinations(range(n), 2):
        target = poisson_bracket(gens.polys[i], gens.polys[j], C)
        rel = _express(target, gens, maxdeg, expander)
        if rel is None:
            raise NotClosed(i, j, gens.names, maxdeg)
        relations[(i, j)] = rel
    pres = AlgebraPresentation(gens, relations)
    for (i, j), rel in relations.items():
        if gens.expand(rel) != poisson_bracket(gens.polys[i], gens.polys[j], C):
            raise AssertionError(f"relation ({i}, {j}) failed re-expansion")
    pres.verified = True
    pres.center = center_of(pres, C)
    return pres


def center_of(presentation: AlgebraPresentation, C: StructureConstants) -> list:
    """Generators whose ambient bracket with every generator vanishes."""
    gens = presentation.generators
    central = []
    for i, name in enumerate(gens.names):
        if all(poisson_bracket(gens.polys[i], q, C).is_zero() for q in gens.polys):
            central.append(name)
    return central


# -- 4. Casimirs ----------------------------------------------------------------------------


def presentation_bracket(P: Polynomial, Q: Polynomial, pres: AlgebraPresentation) -> Polynomial:
    """Poisson bracket of two polynomials in the generator symbols.

    Uses the relation table as the bracket of the free generators and extends
    it as a biderivation; no ambient syzygies are applied.
    """
    names = pres.generators.names
    if P.variables != names or Q.variables != names:
        raise ValueError(f"expected polynomials in {names}")
    dP = {i: P.diff(i) for i in P.support()}
    dQ = {i: Q.diff(i) for i in Q.support()}
    out = Polynomial.zero(names)
    for (i, j), R in pres.nonzero_relations().items():
        cross = Polynomial.zero(names)
        if i in dP and j in dQ:
            cross = cross + dP[i] * dQ[j]
        if j in dP and i in dQ:
            cross = cross - dP[j] * dQ[i]
        if cross:
            out = out + cross * R
    return out


@dataclass
class CasimirResult:
    casimirs: list  # Polynomial in generator names
    weights: list  # ambient degree of each Casimir
    mode: str
    jacobian_rank: dict  # {"generators": int, "ambient": int}
    points: dict  # same keys, evaluation points tried
    seed: int
    verified: bool

    @property
    def independent(self) -> bool:
        key = "generators" if self.mode == "presentation" else "ambient"
        return self.jacobian_rank[key] == len(self.casimirs)

    def to_json(self, gens: GeneratorSet) -> dict:
        return {
            "mode": self.mode,
            "casimirs": [{"weight": w, "degree": K.degree(), "poly": str(K),
                          "ambient": str(gens.expand(K))}
                         for K, w in zip(self.casimirs, self.weights)],
            "jacobian_rank": dict(self.jacobian_rank),
            "functionally_independent": self.independent,
            "points": {k: [[format_rational(v) for v in pt] for pt in pts]
                       for k, pts in self.points.items()},
            "seed": self.seed,
            "verified": self.verified,
        }


def _random_point(rng: random.Random, n: int) -> list:
    return [Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(n)]


def jacobian_rank(polys: Sequence[Polynomial], point: Sequence) -> int:
    if not polys:
        return 0
    names = polys[0].variables
    rows = []
    for p in polys:
        row = {}
        for k in range(len(names)):
            v = p.diff(k).evaluate(point)
            if v:
                row[k] = v
        rows.append(row)
    return linalg.rank(rows)


def certified_rank(polys: Sequence[Polynomial], nvars: int, rng: random.Random):
    """Jacobian rank at a random point, retried once on a rank drop."""
    points = [_random_point(rng, nvars)]
    r = jacobian_rank(polys, points[0])
    if r < len(polys):
        points.append(_random_point(rng, nvars))
        r = max(r, jacobian_rank(polys, points[1]))
    return r, points


def find_casimirs(gens: GeneratorSet, C: StructureConstants, maxdeg: int,
                  seed: int = DEFAULT_SEED, mode: str = "presentation",
                  presentation: AlgebraPresentation | None = None,
                  relation_maxdeg: int = 3) -> CasimirResult:
    """Polynomials in the generators that Poisson-commute with every generator.

    Candidates are generator monomials of degree 1..maxdeg, grouped by ambient
    weight.  In ``"presentation"`` mode the generators are free symbols with
    the bracket of the closure table, so a syzygy among the ambient
    polynomials does not make a candidate trivial.  In ``"ambient"`` mode the
    test is done on expansions and candidates are also taken modulo ambient
    syzygies.  Either way products of lower-weight Casimirs are factored out
    and the survivors are returned in reduced echelon form over the descending
    generator-monomial order.
    """
    if mode not in ("presentation", "ambient"):
        raise ValueError(f"unknown mode {mode!r}")
    if gens.ambient != C.names:
        raise ValueError("generators do not live in the algebra's ring")
    if mode == "presentation" and presentation is None:
        presentation = closure_relations(gens, C, relation_maxdeg)
    expander = _Expander(gens)
    gsyms = Polynomial.gens(gens.names)
    top = maxdeg * max(gens.weights)
    spaces = {}  # weight -> Casimir space, as polynomials in the mode's ring
    found, weights = [], []
    for weight in range(1, top + 1):
        cands = gens.monomials(weight, maxdeg, mindeg=1)
        spaces[weight] = []
        if not cands:
            continue
        if mode == "presentation":
            elems = [Polynomial.monomial(gens.names, m) for m in cands]
            images = [[presentation_bracket(e, g, presentation) for g in gsyms] for e in elems]
        else:
            elems = [expander(m) for m in cands]
            images = [[poisson_bracket(e, q, C) for q in gens.polys] for e in elems]
        cols = _Columns()
        bracket_cols = []
        for imgs in images:
            vec = {}
            for j, img in enumerate(imgs):
                for m, c in img.terms.items():
                    vec[cols.index.setdefault((j, m), len(cols.index))] = c
            bracket_cols.append(vec)
        W = linalg.nullspace(linalg.transpose(bracket_cols).values(), len(cands))
        if not W:
            continue
        w_elems = [_combine(elems, w) for w in W]
        spaces[weight] = [p for p in w_elems if not p.is_zero()]
        products = []
        for d in range(1, weight // 2 + 1):
            for p in spaces.get(d, []):
                for q in spaces.get(weight - d, []):
                    products.append(p * q)
        # U = {w in W : element(w) in span(products)}; in ambient mode it holds the syzygies too
        ecols = _Columns()
        stacked = [ecols.vec(p) for p in w_elems] + [ecols.vec(-p) for p in products]
        rel = linalg.nullspace(linalg.transpose(stacked).values(), len(stacked))
        U = []
        for r in rel:
            u = {}
            for k, c in r.items():
                if k < len(W):
                    linalg._axpy(u, c, W[k])
            if u:
                U.append(u)
        for vec in linalg.span_complement(W, U):
            found.append(Polynomial(gens.names, {cands[k]: v for k, v in vec.items()}))
            weights.append(weight)
    amb = [gens.expand(K) for K in found]
    verified = all(poisson_bracket(a, q, C).is_zero() for a in amb for q in gens.polys)
    if mode == "presentation":
        verified = verified and all(presentation_bracket(K, g, presentation).is_zero()
                                    for K in found for g in gsyms)
    rng = random.Random(seed)
    r_gen, p_gen = certified_rank(found, len(gens.names), rng)
    r_amb, p_amb = certified_rank(amb, C.dim, rng)
    return CasimirResult(found, weights, mode, {"generators": r_gen, "ambient": r_amb},
                         {"generators": p_gen, "ambient": p_amb}, seed, verified)


def _combine(polys: Sequence[Polynomial], coeffs: Mapping) -> Polynomial:
    out = Polynomial.zero(polys[0].variables)
    for k, c in coeffs.items():
        out = out + polys[k] * c
    return out


# -- 5. algebraic Hamiltonian ------------------------------------------------------------


def full_algebra_casimirs(C: StructureConstants, h: int) -> list:
    """Degree-h invariants of the whole algebra (commutant of every basis element)."""
    return solve_commutant_degree(C, SubalgebraSelection(tuple(range(C.dim))), h)


@dataclass
class HamiltonianResult:
    hamiltonian: Polynomial
    verified: bool
    failures: list

    def to_json(self) -> dict:
        return {"hamiltonian": str(self.hamiltonian), "verified": self.verified,
                "failures": self.failures}


def build_algebraic_hamiltonian(S: SubalgebraSelection, casimirs: Sequence[Polynomial],
                                coefficients: Sequence, C: StructureConstants,
                                generators: Sequence[Polynomial],
                                subalgebra_part: Polynomial | None = None) -> HamiltonianResult:
    """H = sum_i alpha_i x_{S_i} + subalgebra_part + sum_t gamma_t K_t.

    ``coefficients`` holds one alpha per subalgebra basis element followed by
    one gamma per Casimir.  ``subalgebra_part`` may add higher-order terms in
    the subalgebra variables only.  The result records every generator whose
    bracket with H fails to vanish.
    """
    coefficients = [as_rational(c) for c in coefficients]
    if len(coefficients) != S.dim + len(casimirs):
        raise ValueError(f"expected {S.dim + len(casimirs)} coefficients, got {len(coefficients)}")
    for K in casimirs:
        for k in range(C.dim):
            if not coadjoint_apply(k, K, C).is_zero():
                raise ValueError(f"{K} is not a Casimir of the full algebra")
    x = C.ring_gens()
    H = Polynomial.zero(C.names)
    for idx, a in zip(S.indices, coefficients[:S.dim]):
        H = H + x[idx] * a
    if subalgebra_part is not None:
        if not subalgebra_part.support() <= set(S.indices):
            raise ValueError("subalgebra_part uses variables outside the subalgebra")
        H = H + subalgebra_part
    for K, g in zip(casimirs, coefficients[S.dim:]):
        H = H + K * g
    failures = []
    for j, A in enumerate(generators):
        br = poisson_bracket(H, A, C)
        if not br.is_zero():
            failures.append({"generator": j + 1, "bracket": str(br)})
    return HamiltonianResult(H, not failures, failures)
