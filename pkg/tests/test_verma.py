import json
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest
from numpy.polynomial import Polynomial as ZPoly

from symalg.oscillator import fock_representation
from symalg.residuals import commutator, max_abs
from symalg.verma import (CubicAlgebraSpec, InfeasibleAtBound, build_base_actions, casimir_c3,
                          fit_band_polynomials, solve_X2_band, verify_cubic_relations)

FIXTURE = json.loads((Path(__file__).parent / "fixtures" / "verma_m10.json").read_text())


def test_base_actions_example():
    mod = build_base_actions(1, 2, 1, 8)
    assert [mod.X1[m, m] for m in range(9)] == list(range(9))
    assert mod.exact and mod.X2 is None
    for m in range(8):
        assert mod.F[m + 1, m] == 1
    assert sum(abs(x) for x in mod.F.ravel()) == 8


def test_base_actions_trivial_cases():
    mod = build_base_actions(1, 5, 0, 6)
    assert all(mod.X1[m, m] == 5 for m in range(7))
    zero = build_base_actions(0, 1, 1, 6)
    assert zero.degenerate and all(x == 0 for x in zero.F.ravel())
    with pytest.raises(ValueError):
        build_base_actions(1, 1, 1, 5)


def test_float_inputs_switch_mode():
    mod = build_base_actions(1.5, 2, 1, 6)
    assert not mod.exact and mod.X1.dtype == float


def test_interior_states():
    assert list(build_base_actions(1, 2, 1, 8).interior) == [3, 4, 5]


def test_x1f_reported_against_identity_and_against_f():
    spec = CubicAlgebraSpec(u=1, v1=1)
    mod = build_base_actions(1, 2, 1, 8)
    rep = verify_cubic_relations(mod, spec)
    assert rep.residuals["[X1,F]-uF"] == 0
    assert rep.residuals["[X1,F]-rhs"] == 1


def test_x1f_identity_residual_scales_with_u_and_e():
    spec = CubicAlgebraSpec(u=3)
    mod = build_base_actions(2, 0, 3, 8)
    rep = verify_cubic_relations(mod, spec)
    assert rep.residuals["[X1,F]-rhs"] == 6  # max(|u E|, |u|)
    assert rep.residuals["[X1,F]-uF"] == 0


def test_zero_module():
    spec = CubicAlgebraSpec()
    cert = solve_X2_band(spec, build_base_actions(0, 0, 0, 8))
    assert cert.feasible and cert.residual_norm2 == 0
    rep = verify_cubic_relations(cert.module, spec)
    assert all(v == 0 for v in rep.residuals.values())
    assert all(v == 0 for v in rep.casimir_diagonal) and rep.casimir_offdiagonal == 0


def test_scalar_x1_is_infeasible():
    cert = solve_X2_band(CubicAlgebraSpec(), build_base_actions(1, 0, 0, 8))
    assert not cert.feasible
    assert cert.violating == ["[X1,X2]-F"]
    with pytest.raises(InfeasibleAtBound) as err:
        solve_X2_band(CubicAlgebraSpec(), build_base_actions(1, 0, 0, 8), strict=True)
    assert err.value.detail["feasible"] is False


def test_fixture_instance_reproduced_exactly():
    inst = FIXTURE["instance"]
    spec = CubicAlgebraSpec(u=inst["u"], v1=inst["v1"])
    cert = solve_X2_band(spec, build_base_actions(inst["E"], inst["lambda"], inst["u"], inst["M"]),
                         inst["band"])
    out = cert.to_json()
    assert out["band_coefficients"] == FIXTURE["band_coefficients"]
    assert out["residual_norm_squared"] == FIXTURE["residual_norm_squared"]
    assert not cert.feasible and cert.violating == ["[X1,X2]-F"]


def test_float_mode_agrees_with_exact():
    spec = CubicAlgebraSpec(u=1.0, v1=1.0)
    cert = solve_X2_band(spec, build_base_actions(1.0, 1.0, 1.0, 10))
    for k, cs in FIXTURE["band_coefficients"].items():
        for m, c in enumerate(cs):
            if c is not None:
                assert cert.module.X2[m + int(k), m] == pytest.approx(float(Fraction(c)), abs=1e-9)


def test_widened_band_still_infeasible_jointly():
    spec = CubicAlgebraSpec(u=1, v1=1)
    base = build_base_actions(1, 1, 1, 10)
    cert = solve_X2_band(spec, base, band=(-3, -2, -1, 0, 1, 2))
    assert not cert.feasible and cert.violating == ["joint"]


def test_each_relation_alone():
    # with v1 = 0 the +1 band alone solves [X1,X2] = F and [X2,F] = 0
    spec = CubicAlgebraSpec(u=1)
    cert = solve_X2_band(spec, build_base_actions(1, 1, 1, 10), band=(-1, 0, 1))
    assert cert.feasible
    rep = verify_cubic_relations(cert.module, spec)
    assert rep.residuals["[X1,X2]-F"] == 0 and rep.residuals["[X2,F]-rhs"] == 0


def test_band_fits_reproduce_coefficients():
    spec = CubicAlgebraSpec(u=1, v1=1)
    cert = solve_X2_band(spec, build_base_actions(1, 1, 1, 10))
    fits = fit_band_polynomials(cert.module)
    for k, poly in fits.items():
        for m in cert.module.interior:
            assert poly.evaluate([m]) == cert.module.X2[m + k, m]


def test_verifier_is_pure():
    spec = CubicAlgebraSpec(u=1, v1=1)
    cert = solve_X2_band(spec, build_base_actions(1, 1, 1, 10))
    assert verify_cubic_relations(cert.module, spec).to_json() == \
        verify_cubic_relations(cert.module, spec).to_json()


def test_u_terms_outside_regime_rejected():
    with pytest.raises(ValueError):
        solve_X2_band(CubicAlgebraSpec(u1=1), build_base_actions(1, 1, 1, 8))


def test_casimir_formula_on_diagonal_module():
    X1 = np.diag([1.0, 2.0, 3.0])
    Z = np.zeros((3, 3))
    s = dict(u1=0.0, u2=0.0, u3=0.0, u=0.0, v1=2.0, v2=3.0, v3=0.0, v=0.5)
    K = casimir_c3(X1, Z, Z, s)
    d = np.diag(X1)
    assert np.allclose(np.diag(K), d ** 4 + 2 * d ** 3 + d)


def test_shared_residual_helper_agrees_with_oscillator():
    p = 4
    rep = fock_representation(ZPoly([0, 25, -10, 1]), p)
    ours = max_abs(commutator(rep.N, rep.bdag) - rep.bdag)
    assert ours == rep.residuals()["[N,b+]-b+"]
    assert max_abs(rep.bdag @ rep.b - np.diag(rep.phi_values[:p + 1])) == rep.residuals()["b+b-Phi(N)"]
