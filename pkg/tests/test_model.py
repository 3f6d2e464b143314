import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bifront import (ConvectionSpec, DomainError, MalformedModelError, ModelSpec, ReactionSpec,
                     fisher_burgers, power_model, validate)
from bifront.oracle import brute_scan_roots


def test_fisher_burgers_is_valid():
    assert validate(fisher_burgers(1.0, -0.5)) == []


def test_unit_slope_at_zero_violates_h():
    model = ModelSpec(ReactionSpec.logistic(1.0), ConvectionSpec.polynomial([0.0, 1.0]))
    out = validate(model)
    assert any(v.assumption == "H" for v in out)


def test_shifted_reaction_violates_f():
    s = np.linspace(0.0, 1.0, 32)
    model = ModelSpec(ReactionSpec.tabulated(s, s * (1 - s) - 0.3), ConvectionSpec.zero())
    out = validate(model)
    assert any(v.assumption == "F" for v in out)
    assert all(v.v is not None for v in out if v.assumption == "F")


def test_short_table_is_malformed():
    s = np.linspace(0.0, 1.0, 8)
    with pytest.raises(MalformedModelError):
        validate(ModelSpec(ReactionSpec.tabulated(s, s * (1 - s)), ConvectionSpec.zero()))


def test_evaluate_at_one():
    rec = fisher_burgers(1.0, -0.5).evaluate(1.0)
    assert rec["f"] == pytest.approx(0.0, abs=1e-15)
    assert rec["h"] == pytest.approx(-0.5)
    assert rec["F"] == pytest.approx(1.0 / 6.0)


def test_evaluate_at_zero_any_model():
    for m in (fisher_burgers(1.0, 0.3), power_model(2.0, 2.0), power_model(1.0, 1.5)):
        rec = m.evaluate(0.0)
        assert rec["f"] == rec["h"] == rec["F"] == 0.0


def test_power_primitive_at_one():
    assert power_model(2.0, 2.0).F(1.0) == pytest.approx(1.0 / 12.0, abs=1e-13)


def test_domain_errors():
    m = fisher_burgers(1.0, 0.0)
    with pytest.raises(DomainError):
        m.evaluate(1.5)
    with pytest.raises(DomainError):
        m.S_prime(0.0)


def test_S_values():
    assert fisher_burgers(1.0, -0.5).S(1.0) == pytest.approx(2.0 / 3.0)
    assert fisher_burgers(1.0, 0.05).S(0.675) == pytest.approx(0.151875, abs=1e-14)
    assert fisher_burgers(1.0, 0.3).S(1e-12) == pytest.approx(0.0, abs=1e-11)


def test_S_prime_signs():
    assert fisher_burgers(1.0, 0.05).S_prime(0.675) == pytest.approx(0.0, abs=1e-12)
    assert fisher_burgers(1.0, -0.5).S_prime(0.5) > 0
    assert fisher_burgers(1.0, 1.0).S_prime(0.5) < 0


def test_S_prime_root_agrees_with_scan():
    m = fisher_burgers(1.0, 0.05)
    roots = brute_scan_roots(lambda v: float(m.S_prime(v)), 2000, 1e-6, 1.0)
    assert roots == pytest.approx([0.675], abs=1e-10)
    assert brute_scan_roots(lambda v: float(fisher_burgers(1.0, -0.5).S_prime(v)), 2000, 1e-6, 1.0) == []


def test_tabulated_matches_closed_form():
    s = np.linspace(0.0, 1.0, 201)
    tab = ModelSpec(ReactionSpec.tabulated(s, s * (1 - s)), ConvectionSpec.quadratic(0.2))
    ref = fisher_burgers(1.0, 0.2)
    v = np.linspace(0.0, 1.0, 57)
    assert np.max(np.abs(tab.f(v) - ref.f(v))) < 1e-6  # PCHIP, not exact for quadratics
    assert np.max(np.abs(tab.F(v) - ref.F(v))) < 1e-6


@given(st.floats(-2.0, 2.0), st.floats(0.2, 5.0))
@settings(max_examples=30, deadline=None)
def test_dict_round_trip(alpha, k):
    m = fisher_burgers(k, alpha)
    back = ModelSpec.from_dict(json.loads(json.dumps(m.to_dict())))
    assert back.digest == m.digest
    v = np.linspace(0, 1, 11)
    assert np.allclose(back.S(v[1:]), m.S(v[1:]))


@given(st.floats(-1.0, 1.0))
@settings(max_examples=30, deadline=None)
def test_S_matches_integral_form(alpha):
    m = fisher_burgers(1.0, alpha)
    v = np.linspace(0.05, 1.0, 20)
    assert np.allclose(m.S(v), (0.5 - alpha) * v - v * v / 3.0, atol=1e-12)


def test_unknown_family_is_malformed():
    with pytest.raises(MalformedModelError):
        ModelSpec.from_dict({"f": {"family": "nope"}, "h": {"family": "zero"}})
    with pytest.raises(MalformedModelError):
        ModelSpec.from_dict({"f": {"family": "logistic"}})
