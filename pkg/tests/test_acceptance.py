"""Acceptance criteria, one test each.  Each prints a PASS/FAIL line.

The c(2) checks use the generators exactly as printed (bundled as
``c2_generators``).  Run alone with ``pytest tests/test_acceptance.py``.
"""

import json
import random
import time
from fractions import Fraction
from importlib import resources
from pathlib import Path

from numpy.polynomial import Polynomial as ZPoly

from random_algebras import random_algebra
from symalg.commutant import (GeneratorSet, NotClosed, build_algebraic_hamiltonian,
                              closure_relations, compute_commutant, find_casimirs,
                              full_algebra_casimirs)
from symalg.liealg import (SubalgebraSelection, bundled, coadjoint_apply, poisson_bracket,
                           validate_jacobi)
from symalg.oscillator import darboux2_energy_families, fock_representation
from symalg.polyring import Polynomial, parse_polynomial
from symalg.verma import (CubicAlgebraSpec, build_base_actions, solve_X2_band,
                          verify_cubic_relations)

C2 = bundled("c2")


def printed_generators():
    data = json.loads(resources.files("symalg.data").joinpath("c2_generators.json").read_text())
    return GeneratorSet(tuple(g["name"] for g in data["generators"]),
                        tuple(parse_polynomial(g["poly"], C2.names) for g in data["generators"]))


def G(text):
    return parse_polynomial(text, tuple(f"A{i}" for i in range(1, 7)))


def proportional(p, q):
    if p.terms.keys() != q.terms.keys():
        return False
    return len({q.coefficient(m) / c for m, c in p.terms.items()}) == 1


def test_criterion_1_commutant(criterion):
    t = time.perf_counter()
    basis = compute_commutant(C2, SubalgebraSelection((0,)), 2)
    elapsed = time.perf_counter() - t
    ours = basis.generators()
    counts = {d: len(v) for d, v in basis.new.items()}
    match = all(proportional(a, b) for a, b in zip(ours, printed_generators().polys))
    ok = counts == {1: 2, 2: 4} and len(ours) == 6 and match and elapsed < 1
    assert criterion(1, "c(2) commutant of x1 up to degree 2", ok,
                     f"new generators {counts}, match printed A1..A6 up to scale: {match}, {elapsed:.3f}s")


def test_criterion_2_closure(criterion):
    gens = printed_generators()
    pres = closure_relations(gens, C2, 3)
    want = {
        (1, 2): G("A1^2 + A2^2"),
        (1, 3): G("2*A3"),
        (1, 5): G("-2*A3"),
        (2, 3): G("-A1*A5 - 2*A2*A6"),
        (2, 5): G("A1*A5 + 2*A2*A6"),
    }
    zero = Polynomial.zero(gens.names)
    wrong = []
    for i in range(6):
        for j in range(i + 1, 6):
            if pres.relation(i, j) != want.get((i, j), zero):
                wrong.append(f"{{A{i + 1},A{j + 1}}} = {pres.relation(i, j)}")
    ok = not wrong and pres.center == ["A1", "A5"]
    assert criterion(2, "closure relations of the printed A1..A6", ok,
                     "mismatch: " + "; ".join(wrong) if wrong else "")


def test_criterion_3_casimirs(criterion):
    gens = printed_generators()
    res = find_casimirs(gens, C2, 3)
    expected = [G("A1"), G("A5"), G("A4 + A6"), G("(A1^2 + A2^2)*A6 + A2*A5*A1 + A3^2")]
    got = {str(K) for K in res.casimirs}
    missing = [str(K) for K in expected if str(K) not in got]
    not_central = [str(K) for K in expected
                   if any(not poisson_bracket(gens.expand(K), A, C2).is_zero() for A in gens.polys)]
    ok = not missing and not not_central and len(res.casimirs) == 4
    assert criterion(3, "Casimirs A1, A5, A4+A6, K31 of the printed generators", ok,
                     f"engine returned {sorted(got)}; not central: {not_central}" if not ok else "")


def test_criterion_4_hamiltonian(criterion):
    gens = printed_generators()
    cas = full_algebra_casimirs(C2, 2)
    rng = random.Random(4)
    results = []
    for _ in range(3):
        coeffs = [Fraction(rng.randint(-20, 20), rng.randint(1, 9)) for _ in range(3)]
        results.append(build_algebraic_hamiltonian(SubalgebraSelection((0,)), cas, coeffs,
                                                   C2, gens.polys).verified)
    ok = len(cas) == 2 and all(results)
    assert criterion(4, "algebraic Hamiltonian commutes with A1..A6", ok,
                     f"{sum(results)}/3 triples, {len(cas)} full-algebra Casimirs")


def test_criterion_5_spectrum(criterion):
    t = time.perf_counter()
    failures = []
    for a in (0.1, 0.25, 0.5):
        for p in range(6):
            for sol in darboux2_energy_families(a, p, 1e-9):
                if not sol.report.ok:
                    failures.append(f"{sol.family}(a={a},p={p})")
    elapsed = time.perf_counter() - t
    ok = not failures and elapsed < 1
    detail = f"{len(failures)}/54 family checks fail" + (f", e.g. {', '.join(failures[:3])}" if failures else "")
    assert criterion(5, "Darboux II families on the (a, p) grid", ok, f"{detail}, {elapsed:.3f}s")


def test_criterion_6_fock(criterion):
    worst = 0.0
    for p in range(6):
        phi = ZPoly([0, (p + 1) ** 2, -2 * (p + 1), 1])
        rep = fock_representation(phi, p)
        scale = max(max(abs(v) for v in rep.phi_values), 1e-300)
        res = rep.residuals()
        rel = max(res["[N,b+]-b+"], res["[N,b]+b"], res["b+b-Phi(N)"]) / scale
        worst = max(worst, rel)
    ok = worst <= 1e-12
    assert criterion(6, "Fock identities for Phi = z(p+1-z)^2, p = 0..5", ok,
                     f"worst relative residual {worst:.2e}")


def test_criterion_7_soundness(criterion):
    rng = random.Random(2024)
    checked = closed = relations = 0
    bad = []
    for trial in range(50):
        name, C = random_algebra(rng)
        if not validate_jacobi(C).ok:
            bad.append(f"{name}: Jacobi")
            continue
        S = SubalgebraSelection((rng.randrange(C.dim),))
        basis = compute_commutant(C, S, 3)
        for sols in basis.solutions.values():
            for p in sols:
                checked += 1
                if any(not coadjoint_apply(j, p, C).is_zero() for j in S.indices):
                    bad.append(f"{name}: {p}")
        gens = basis.generators()
        if not gens:
            continue
        gs = GeneratorSet.named(gens)
        try:
            pres = closure_relations(gs, C, 3)
        except NotClosed:
            continue
        closed += 1
        for i in range(len(gens)):
            for j in range(i + 1, len(gens)):
                relations += 1
                if gs.expand(pres.relation(i, j)) != poisson_bracket(gens[i], gens[j], C):
                    bad.append(f"{name}: relation {i},{j}")
    ok = not bad
    assert criterion(7, "soundness on 50 random nilpotent/solvable algebras", ok,
                     f"{checked} commutant elements, {relations} relations in {closed} closed sets"
                     + (f", failures {bad[:3]}" if bad else ""))


def test_criterion_8_verma(criterion):
    spec = CubicAlgebraSpec(u=1, v1=1)
    base = build_base_actions(1, 2, 1, 8)
    diag_ok = [base.X1[m, m] for m in range(9)] == [(m - 2) + 2 for m in range(9)]
    shift_ok = all(base.F[i, j] == (1 if i == j + 1 else 0) for i in range(9) for j in range(9))
    rep = verify_cubic_relations(base, spec)
    uf_zero = rep.residuals["[X1,F]-uF"] == 0
    ui_nonzero = rep.residuals["[X1,F]-rhs"] != 0
    fixture = json.loads((Path(__file__).parent / "fixtures" / "verma_m10.json").read_text())
    inst = fixture["instance"]
    cert = solve_X2_band(CubicAlgebraSpec(u=inst["u"], v1=inst["v1"]),
                         build_base_actions(inst["E"], inst["lambda"], inst["u"], inst["M"]),
                         inst["band"])
    out = cert.to_json()
    fixture_ok = (out["band_coefficients"] == fixture["band_coefficients"]
                  and out["residual_norm_squared"] == fixture["residual_norm_squared"])
    ok = diag_ok and shift_ok and uf_zero and ui_nonzero and fixture_ok
    assert criterion(8, "Verma base actions, both [X1,F] residuals, band-solve fixture", ok,
                     f"[X1,F]-uF = {rep.residuals['[X1,F]-uF']}, [X1,F]-u*I = {rep.residuals['[X1,F]-rhs']}, "
                     f"fixture match {fixture_ok}")
