import csv
import io
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bifront import (Regime, RegimeError, analyze, classify_regime, find_v_plus, fisher_burgers,
                     inviscid_profile, limit_profile, limit_speed, power_model, sharpness_at_zero)
from bifront.limits import check_linear_piece_identity, richardson
from bifront.model import ConvectionSpec, ModelSpec, ReactionSpec


@pytest.mark.parametrize("alpha,regime", [(1.0, Regime.CASE1), (0.5, Regime.CASE1),
                                          (0.05, Regime.CASE2), (-0.05, Regime.CASE2),
                                          (-0.5, Regime.CASE3), (-1.0 / 6.0, Regime.CASE3)])
def test_fisher_burgers_regimes(alpha, regime):
    assert classify_regime(fisher_burgers(1.0, alpha)).regime is regime


def test_non_monotone_reaction_is_unclassified():
    # f - h' with two humps breaks the unique-maximum condition for case 2
    s = np.linspace(0.0, 1.0, 801)
    f = s * (1 - s) * (1 + 0.9 * np.sin(6 * np.pi * s))
    model = ModelSpec(ReactionSpec.tabulated(s, f), ConvectionSpec.quadratic(0.05), lipschitz_k=12.0)
    rep = classify_regime(model)
    assert rep.regime is Regime.UNCLASSIFIED
    with pytest.raises(RegimeError):
        limit_profile(model)
    record = analyze(model).to_record()
    assert record["theorem_hypotheses_satisfied"] is False


@pytest.mark.parametrize("alpha", ["0.05", "0", "-0.05", "0.2"])
def test_v_plus_and_c_bar_match_oracle(cert_records, alpha):
    m = fisher_burgers(1.0, float(alpha))
    vp = cert_records[f"v_plus.fb_a{alpha}"]
    cb = cert_records[f"c_bar.fb_a{alpha}"]
    assert find_v_plus(m) == pytest.approx(vp["value"], abs=vp["tolerance"])
    assert limit_speed(m).c_bar == pytest.approx(cb["value"], abs=cb["tolerance"])


@given(st.floats(-1.0 / 6.0 + 1e-3, 0.5 - 1e-3))
@settings(max_examples=25, deadline=None)
def test_v_plus_symmetry(alpha):
    # closed form v+ = 3 (1/2 - alpha) / 2, so v+(alpha) + v+(-alpha) = 3/2 when both are in range
    if not -1.0 / 6.0 < -alpha < 0.5:
        return
    a = find_v_plus(fisher_burgers(1.0, alpha))
    b = find_v_plus(fisher_burgers(1.0, -alpha))
    assert a + b == pytest.approx(1.5, abs=1e-9)


@pytest.mark.parametrize("alpha,expected", [(1.0, 0.0), (-1.0 / 6.0, 1.0 / 3.0), (0.05, 0.151875)])
def test_limit_speed(alpha, expected):
    assert limit_speed(fisher_burgers(1.0, alpha)).c_bar == pytest.approx(expected, abs=1e-9)


def test_sharpness():
    s1 = sharpness_at_zero(fisher_burgers(1.0, 1.0))
    assert s1.ell == pytest.approx(0.5, abs=1e-6) and s1.sharp
    s3 = sharpness_at_zero(power_model(1.0, 1.5))
    assert s3.ell == pytest.approx(0.0, abs=1e-3) and s3.z0_finite
    s4 = sharpness_at_zero(power_model(2.0, 2.0))
    assert s4.ell == pytest.approx(0.0, abs=1e-3) and not s4.z0_finite


def test_inviscid_profile_values(cert_records):
    inv = inviscid_profile(power_model(2.0, 2.0), 0.0)
    assert float(inv.value(2.0)) == pytest.approx(cert_records["inviscid.f4.V_I(2)"]["value"], abs=1e-7)
    assert float(inv.value(0.0)) == pytest.approx(0.5, abs=1e-12)
    z = np.linspace(-20, 20, 401)
    assert np.all(np.diff(inv.value(z)) > 0)   # positive everywhere, never reaches 0
    assert inv.z0 == -math.inf


def test_case1_profile_vanishes_left_of_z0(cert_records):
    inv = inviscid_profile(fisher_burgers(1.0, 1.0), 0.0)
    assert inv.z0 == pytest.approx(cert_records["z0.fb_a1"]["value"], abs=1e-6)
    assert float(inv.value(inv.z0 - 0.1)) == 0.0


def test_case3_limit_profile():
    prof = limit_profile(fisher_burgers(1.0, -0.5))
    z = np.array([-1.0, -0.5, 0.0, 0.25, 0.5, 1.0])
    assert np.allclose(prof.value(z), [0.0, 0.0, 0.5, 0.75, 1.0, 1.0])
    assert prof.joints == [-0.5, 0.5]


def test_case2_analysis_fields():
    a = analyze(fisher_burgers(1.0, 0.05))
    assert a.regime.regime is Regime.CASE2
    assert a.v_plus == pytest.approx(0.675)
    assert a.z_plus == pytest.approx(0.175)
    assert a.kink_points[-1] == pytest.approx(0.175, abs=1e-9)
    assert a.non_c1_points == pytest.approx([-0.5])
    rec = json.loads(a.to_json())
    assert rec["c_bar"] == pytest.approx(0.151875)


def test_case2_below_half_has_linear_onset():
    a = analyze(fisher_burgers(1.0, 0.2))
    z_plus, vp = a.z_plus, a.v_plus
    assert vp == pytest.approx(0.45) and z_plus < 0
    assert float(a.limit_profile.value(z_plus)) == pytest.approx(vp, abs=1e-9)
    assert float(a.limit_profile.value(z_plus - vp - 1e-3)) == 0.0


def test_profile_csv_tags():
    prof = limit_profile(fisher_burgers(1.0, 0.05))
    rows = list(csv.DictReader(io.StringIO(prof.to_csv(np.linspace(-1, 1, 21)))))
    assert [*rows[0]] == ["z", "v", "segment_tag"]
    assert {r["segment_tag"] for r in rows} == {"constant", "linear", "inviscid"}


def test_richardson_recovers_known_order():
    eps = np.array([4e-3, 2e-3, 1e-3, 5e-4])
    limit, order = richardson(eps, 0.3 + 2.0 * eps ** 1.5)
    assert limit == pytest.approx(0.3, abs=1e-10)
    assert order == pytest.approx(1.5, abs=1e-6)


def test_linear_piece_identity_case3():
    rep = check_linear_piece_identity(fisher_burgers(1.0, -0.5), [2e-3, 1e-3, 5e-4])
    assert rep.passed
    assert rep.identity_value == pytest.approx(2.0 / 3.0, abs=1e-3)
    part = check_linear_piece_identity(fisher_burgers(1.0, -0.5), [2e-3, 1e-3, 5e-4], 0.25, 0.75)
    assert part.passed


def test_linear_piece_identity_guards():
    with pytest.raises(ValueError):
        check_linear_piece_identity(fisher_burgers(1.0, -0.5), [2e-3, 1e-3, 5e-4], 0.5, 0.5)
    with pytest.raises(RegimeError):
        check_linear_piece_identity(fisher_burgers(1.0, 1.0), [2e-3, 1e-3, 5e-4])
