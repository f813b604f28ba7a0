"""Command-line front end: ``symalg <command> <input> [options]``.

Every invocation writes exactly one JSON document to stdout and a one-line
summary to stderr.  Inputs beginning with ``@`` name bundled data files,
e.g. ``@c2`` or ``@c2_generators``.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from fractions import Fraction
from importlib import resources

from numpy.polynomial import Polynomial as ZPoly

from . import __version__
from .commutant import (DEFAULT_SEED, GeneratorSet, NotClosed, ValidationError,
                        build_algebraic_hamiltonian, closure_relations, compute_commutant,
                        find_casimirs, full_algebra_casimirs)
from .liealg import (AlgebraFileError, StructureConstants, SubalgebraSelection,
                     validate_jacobi, validate_subalgebra)
from .oscillator import (FAMILIES, NonUnitarizable, RealityViolation, darboux2_energy_families,
                         darboux2_eta, darboux2_induced_structure_function, fock_representation,
                         realize_quadratic_algebra)
from .polyring import PolynomialParseError, format_rational, parse_polynomial
from .verma import (DEFAULT_BAND, CubicAlgebraSpec, InfeasibleAtBound, build_base_actions,
                    fit_band_polynomials, solve_X2_band, verify_cubic_relations)
SCHEMA_VERSION = 1
EXIT_CODES = {"ParseError": 2, "ValidationError": 3, "EngineError": 4}


class ParseError(ValueError):
    def __init__(self, message, detail=None):
        super().__init__(message)
        self.detail = detail or {}


class EngineError(RuntimeError):
    def __init__(self, message, detail=None, kind=None):
        super().__init__(message)
        self.detail = detail or {}
        self.kind = kind


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ParseError(message)


# -- input ------------------------------------------------------------------------


class _Inputs:
    """Reads input files and remembers their hashes for provenance."""

    def __init__(self):
        self.hashes = {}

    def read(self, ref: str) -> bytes:
        if ref.startswith("@"):
            try:
                data = resources.files("symalg.data").joinpath(ref[1:] + ".json").read_bytes()
            except (FileNotFoundError, OSError):
                raise ParseError(f"no bundled file named {ref[1:]!r}") from None
        else:
            try:
                with open(ref, "rb") as fh:
                    data = fh.read()
            except OSError as exc:
                raise ParseError(f"cannot read {ref}: {exc.strerror}") from None
        self.hashes[ref] = hashlib.sha256(data).hexdigest()
        return data

    def json(self, ref: str):
        data = self.read(ref)
        try:
            return json.loads(data.decode("utf-8"))
        except UnicodeDecodeError:
            raise ParseError(f"{ref} is not UTF-8") from None
        except json.JSONDecodeError as exc:
            raise ParseError(f"{ref}: invalid JSON at line {exc.lineno}: {exc.msg}",
                             {"line": exc.lineno, "column": exc.colno}) from None


def load_algebra(inputs: _Inputs, ref: str, skip_jacobi: bool = False) -> StructureConstants:
    try:
        C = StructureConstants.from_json(inputs.json(ref))
    except (AlgebraFileError, ValueError) as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(f"{ref}: {exc}") from None
    if not skip_jacobi:
        report = validate_jacobi(C)
        if not report.ok:
            raise ValidationError("Jacobi identity fails", {"failures": report.failures})
    return C


def load_generators(inputs: _Inputs, ref: str, C: StructureConstants) -> GeneratorSet:
    data = inputs.json(ref)
    if not isinstance(data, dict) or not isinstance(data.get("generators"), list):
        raise ParseError(f"{ref}: expected an object with a 'generators' list")
    names, polys = [], []
    for pos, entry in enumerate(data["generators"]):
        if not isinstance(entry, dict) or not isinstance(entry.get("poly"), str):
            raise ParseError(f"{ref}: generators[{pos}] needs a 'poly' string")
        name = entry.get("name", f"A{pos + 1}")
        if not isinstance(name, str) or not name.isidentifier():
            raise ParseError(f"{ref}: generators[{pos}] has a bad name")
        try:
            polys.append(parse_polynomial(entry["poly"], C.names))
        except PolynomialParseError as exc:
            raise ParseError(f"{ref}: generators[{pos}]: {exc}") from None
        names.append(name)
    try:
        return GeneratorSet(tuple(names), tuple(polys))
    except ValueError as exc:
        raise ParseError(f"{ref}: {exc}") from None


def _subalgebra(text: str, C: StructureConstants) -> SubalgebraSelection:
    try:
        idx = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise ParseError(f"--sub expects comma-separated 1-based indices, got {text!r}") from None
    if not idx or any(not 1 <= i <= C.dim for i in idx) or len(set(idx)) != len(idx):
        raise ParseError(f"--sub indices must be distinct and within 1..{C.dim}")
    S = SubalgebraSelection.one_based(idx)
    report = validate_subalgebra(S, C)
    if not report.ok:
        raise ValidationError("selection is not a subalgebra", {"failures": report.failures})
    return S


def _rational(text: str, flag: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"{flag} expects a rational like 3/4, got {text!r}") from None


def _number(value, key):
    """JSON number or 'num/den' string; ints and strings stay exact."""
    if isinstance(value, bool):
        raise ParseError(f"{key} must be a number")
    if isinstance(value, int):
        return value
    if isinstance(value, float):
        return value
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError):
            pass
    raise ParseError(f"{key} must be a number or 'num/den' string")


def _job(inputs: _Inputs, ref: str, required=()) -> dict:
    data = inputs.json(ref)
    if not isinstance(data, dict):
        raise ParseError(f"{ref}: job file must hold a JSON object")
    missing = [k for k in required if k not in data]
    if missing:
        raise ParseError(f"{ref}: missing keys {missing}")
    return data


# -- commands -----------------------------------------------------------------------


def cmd_jacobi(args, inputs):
    C = load_algebra(inputs, args.input, skip_jacobi=True)
    report = validate_jacobi(C)
    if not report.ok:
        raise ValidationError("Jacobi identity fails", {"failures": report.failures})
    return {"dim": C.dim, "names": list(C.names), **report.to_json()}, "Jacobi identity holds"


def cmd_commutant(args, inputs):
    C = load_algebra(inputs, args.input, args.skip_jacobi)
    S = _subalgebra(args.sub, C)
    basis = compute_commutant(C, S, args.maxdeg)
    gens = basis.generators()
    payload = {
        "subalgebra": [i + 1 for i in S.indices],
        "maxdeg": args.maxdeg,
        "counts": {str(d): c for d, c in basis.counts().items()},
        "generators": [{"name": f"A{i + 1}", "degree": p.degree(), "poly": str(p)}
                       for i, p in enumerate(gens)],
    }
    return payload, f"{len(gens)} generators up to degree {args.maxdeg}"


def cmd_closure(args, inputs):
    C = load_algebra(inputs, args.input, args.skip_jacobi)
    gens = load_generators(inputs, args.gens, C)
    try:
        pres = closure_relations(gens, C, args.maxdeg)
    except NotClosed as exc:
        raise EngineError(str(exc), exc.detail, "NotClosed") from None
    return pres.to_json(), f"{len(pres.nonzero_relations())} non-zero brackets"


def cmd_casimirs(args, inputs):
    C = load_algebra(inputs, args.input, args.skip_jacobi)
    gens = load_generators(inputs, args.gens, C)
    try:
        res = find_casimirs(gens, C, args.maxdeg, seed=args.seed, mode=args.mode,
                            relation_maxdeg=args.relation_maxdeg)
    except NotClosed as exc:
        raise EngineError(str(exc), exc.detail, "NotClosed") from None
    return res.to_json(gens), f"{len(res.casimirs)} Casimirs ({args.mode} mode)"


def cmd_hamiltonian(args, inputs):
    C = load_algebra(inputs, args.input, args.skip_jacobi)
    S = _subalgebra(args.sub, C)
    gens = load_generators(inputs, args.gens, C)
    cas = full_algebra_casimirs(C, args.casimir_degree)
    alphas = [_rational(t, "--alpha") for t in args.alpha.split(",")]
    gammas = list(args.gamma or [])
    for flag in ("gamma1", "gamma2"):
        val = getattr(args, flag)
        if val is not None:
            gammas.append(val)
    gammas = [_rational(t, "--gamma") for t in gammas]
    if len(alphas) != S.dim:
        raise ParseError(f"--alpha needs {S.dim} comma-separated values")
    if len(gammas) != len(cas):
        raise ParseError(f"the full algebra has {len(cas)} Casimirs of degree "
                         f"{args.casimir_degree}; got {len(gammas)} gamma values")
    res = build_algebraic_hamiltonian(S, cas, alphas + gammas, C, gens.polys)
    payload = {"casimirs": [str(K) for K in cas], **res.to_json()}
    if not res.verified:
        raise EngineError("Hamiltonian does not commute with every generator", payload)
    return payload, "Hamiltonian commutes with all generators"


def cmd_spectrum(args, inputs):
    job = _job(inputs, args.input, ("a", "p"))
    a, p, family, tol = _spectrum_params(job)
    try:
        sols = darboux2_energy_families(float(a), p, tol)
    except RealityViolation as exc:
        raise EngineError(str(exc), exc.detail, "RealityViolation") from None
    sols = [s for s in sols if family == "all" or s.family == family]
    payload = {"a": float(a), "p": p, "family": family, "tol": tol,
               "solutions": [s.to_json() for s in sols],
               "all_verified": all(s.report.ok for s in sols)}
    passed = sum(s.report.ok for s in sols)
    return payload, f"{passed}/{len(sols)} solutions verified"


def _spectrum_params(job):
    a = _number(job["a"], "a")
    p = job["p"]
    if isinstance(p, bool) or not isinstance(p, int) or p < 0:
        raise ParseError("p must be a non-negative integer")
    family = job.get("family", "all")
    if family != "all" and family not in FAMILIES:
        raise ParseError(f"family must be one of {('all',) + FAMILIES}")
    tol = float(_number(job.get("tol", 1e-9), "tol"))
    if not float(a) > 0:
        raise ParseError("a must be positive")
    return a, p, family, tol


def cmd_fock(args, inputs):
    """Fock matrices from {"phi": [...], "p": p} or an energy family {"a", "p", "family"}.

    With "realize": {"shift": ...} the Darboux II algebra is realized on the
    structure function induced by the ladder ansatz (a1 = -a, a2 = a3 = a).
    """
    job = _job(inputs, args.input, ("p",))
    p = job["p"]
    if isinstance(p, bool) or not isinstance(p, int) or p < 0:
        raise ParseError("p must be a non-negative integer")
    realize = job.get("realize")
    if "phi" in job:
        coeffs = job["phi"]
        if not isinstance(coeffs, list) or not coeffs:
            raise ParseError("phi must be a non-empty list of ascending coefficients")
        phi = ZPoly([float(_number(c, "phi")) for c in coeffs])
        E = None
    else:
        if "a" not in job:
            raise ParseError("give either 'phi' or 'a' with an energy 'family'")
        a, p, family, tol = _spectrum_params({**job, "family": job.get("family", "eps+")})
        if family == "all":
            raise ParseError("fock needs a single family")
        try:
            sol = next(s for s in darboux2_energy_families(float(a), p, tol) if s.family == family)
        except RealityViolation as exc:
            raise EngineError(str(exc), exc.detail, "RealityViolation") from None
        phi, E = sol.phi, sol.E
    try:
        rep = fock_representation(phi, p)
    except NonUnitarizable as exc:
        raise EngineError(str(exc), exc.detail, "NonUnitarizable") from None
    payload = {"phi_coefficients": [float(c) for c in phi.coef], **rep.to_json()}
    if realize is not None:
        if E is None:
            raise ParseError("'realize' needs an energy family (give 'a' instead of 'phi')")
        payload["realization"] = _realize(float(job["a"]), E, p, realize)
    return payload, f"{p + 1}-dimensional representation"


def _realize(a, E, p, opts):
    if not isinstance(opts, dict):
        raise ParseError("'realize' must be an object")
    shift = opts.get("shift", 0.0)
    shift = None if shift is None else float(_number(shift, "shift"))
    a1, a2, a3 = -a, a, a
    etas = darboux2_eta(a1, a2, a3, E, p, 0.0 if shift is None else shift)
    good = [e for e, ok in etas if ok]
    if not good:
        raise EngineError("no eta gives a positive induced structure function",
                          {"eta_roots": [e for e, _ in etas]}, "NonUnitarizable")
    eta = good[0]
    phi = darboux2_induced_structure_function(a1, a2, a3, E, eta, 0.0 if shift is None else shift)
    try:
        real = realize_quadratic_algebra(a1, a2, a3, E, eta, phi, p, shift)
    except NonUnitarizable as exc:
        raise EngineError(str(exc), exc.detail, "NonUnitarizable") from None
    return {"eta": eta, "phi_coefficients": [float(c) for c in phi.coef], **real.to_json()}


def cmd_verma(args, inputs):
    job = _job(inputs, args.input, ("E", "lambda", "M"))
    spec_in = job.get("spec", {})
    if not isinstance(spec_in, dict) or set(spec_in) - set(CubicAlgebraSpec.FIELDS):
        raise ParseError(f"spec must be an object with keys from {CubicAlgebraSpec.FIELDS}")
    spec = CubicAlgebraSpec(**{k: _number(v, k) for k, v in spec_in.items()})
    M = job["M"]
    if isinstance(M, bool) or not isinstance(M, int) or M < 6:
        raise ParseError("M must be an integer >= 6")
    band = args.band or job.get("band") or list(DEFAULT_BAND)
    if isinstance(band, str):
        try:
            band = [int(t) for t in band.split(",")]
        except ValueError:
            raise ParseError("--band expects comma-separated integer offsets") from None
    u = spec.u
    base = build_base_actions(_number(job["E"], "E"), _number(job["lambda"], "lambda"), u, M)
    try:
        cert = solve_X2_band(spec, base, band)
    except ValueError as exc:
        raise ParseError(str(exc)) from None
    report = verify_cubic_relations(cert.module, spec)
    fits = fit_band_polynomials(cert.module)
    payload = {
        "spec": spec.to_json(), "M": M, "degenerate": base.degenerate,
        "solve": cert.to_json(),
        "band_fits": {str(k): _fit_json(f) for k, f in fits.items()},
        "report": report.to_json(),
    }
    if not cert.feasible:
        raise EngineError(f"no X2 on band {sorted(set(band))} satisfies "
                          + ", ".join(cert.violating), payload, "InfeasibleAtBound")
    return payload, "band solution found"


def _fit_json(f):
    if f is None:
        return None
    if isinstance(f, list):
        return f
    return str(f)


COMMANDS = {
    "jacobi": cmd_jacobi,
    "commutant": cmd_commutant,
    "closure": cmd_closure,
    "casimirs": cmd_casimirs,
    "hamiltonian": cmd_hamiltonian,
    "spectrum": cmd_spectrum,
    "fock": cmd_fock,
    "verma-verify": cmd_verma,
}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="symalg", description="Commutants, polynomial algebras and their representations.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def add(name, help_text, algebra=True):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("input", help="algebra JSON" if algebra else "job JSON")
        if algebra:
            p.add_argument("--skip-jacobi", action="store_true")
        return p

    add("jacobi", "check the Jacobi identity")
    p = add("commutant", "polynomial commutant of a subalgebra")
    p.add_argument("--sub", required=True, help="1-based basis indices, e.g. 1,2")
    p.add_argument("--maxdeg", type=int, default=2)
    p = add("closure", "brackets of generators as polynomials in the generators")
    p.add_argument("--gens", required=True)
    p.add_argument("--maxdeg", type=int, default=3)
    p = add("casimirs", "Casimirs of the algebra spanned by generators")
    p.add_argument("--gens", required=True)
    p.add_argument("--maxdeg", type=int, default=3)
    p.add_argument("--relation-maxdeg", type=int, default=3)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--mode", choices=("presentation", "ambient"), default="presentation")
    p = add("hamiltonian", "algebraic Hamiltonian from subalgebra and full-algebra Casimirs")
    p.add_argument("--sub", required=True)
    p.add_argument("--gens", required=True)
    p.add_argument("--alpha", required=True, help="one rational per subalgebra element")
    p.add_argument("--gamma1")
    p.add_argument("--gamma2")
    p.add_argument("--gamma", action="append", help="further Casimir coefficients")
    p.add_argument("--casimir-degree", type=int, default=2)
    add("spectrum", "Darboux II energy families", algebra=False)
    add("fock", "finite-dimensional deformed-oscillator matrices", algebra=False)
    p = add("verma-verify", "solve and verify the truncated cubic-algebra module", algebra=False)
    p.add_argument("--band", help="comma-separated X2 offsets, e.g. --band=-3,-2,-1,0,1,2")
    return parser


def _positive(args):
    for flag in ("maxdeg", "relation_maxdeg", "casimir_degree"):
        val = getattr(args, flag, None)
        if val is not None and val < 1:
            raise ParseError(f"--{flag.replace('_', '-')} must be at least 1")


def run(argv=None):
    """Execute one job; returns (report dict, exit code, summary line)."""
    inputs = _Inputs()
    command = None
    seed = None
    try:
        args = build_parser().parse_args(argv)
        command = args.command
        if command is None:
            raise ParseError("no command given")
        _positive(args)
        seed = getattr(args, "seed", None)
        payload, summary = COMMANDS[command](args, inputs)
        status, code, error = "ok", 0, None
    except (ParseError, ValidationError, EngineError) as exc:
        kind = type(exc).__name__
        payload = None
        error = {"type": kind, "message": str(exc), "detail": exc.detail}
        if isinstance(exc, EngineError) and exc.kind:
            error["engine_error"] = exc.kind
        status, code, summary = "error", EXIT_CODES[kind], f"{kind}: {exc}"
    except InfeasibleAtBound as exc:
        error = {"type": "EngineError", "engine_error": "InfeasibleAtBound",
                 "message": str(exc), "detail": exc.detail}
        payload, status, code, summary = None, "error", EXIT_CODES["EngineError"], str(exc)
    report = {
        "command": command,
        "status": status,
        "payload": payload,
        "provenance": {
            "inputs": dict(inputs.hashes),
            "engine_version": __version__,
            "seed": seed,
            "schema_version": SCHEMA_VERSION,
        },
    }
    if error is not None:
        report["error"] = error
    return report, code, summary


def main(argv=None) -> int:
    report, code, summary = run(argv)
    json.dump(report, sys.stdout, indent=2, default=_jsonable)
    sys.stdout.write("\n")
    prefix = f"symalg {report['command']}" if report["command"] else "symalg"
    print(f"{prefix}: {summary}", file=sys.stderr)
    return code


def _jsonable(obj):
    if isinstance(obj, Fraction):
        return format_rational(obj)
    if hasattr(obj, "item"):
        return obj.item()
    raise TypeError(f"cannot serialise {type(obj).__name__}")


if __name__ == "__main__":
    sys.exit(main())
