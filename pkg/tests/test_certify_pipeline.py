"""分解から証明書までの通し実行"""
import json

import pytest

from certify_pipeline import certify_product, describe_conjugates, make_target
from errors import EvenOrSmallM, NotFundamentalDiscriminant, UsageError
from numerics import EvalContext
from recognition import IntPolynomial, RadicalForm, quad_power
from run_tracker import RunTracker


def test_gaussian_m3_reproduces_known_certificate():
    tracker = RunTracker("certify phi d=-4 m=3")
    result = certify_product("phi", -4, 3, EvalContext(), workers=2, tracker=tracker)
    cert = result.certificate

    assert result.stable_power == 12
    assert cert.power_taken == 24
    assert cert.polynomial == IntPolynomial((729, -72954, 1)) ** 2
    assert cert.is_algebraic_integer
    assert cert.divides == 3 ** 12
    assert not cert.is_unit
    assert cert.radical == RadicalForm(3, 2, 3, 4)
    assert not result.hypothesis["holds"]
    assert not result.closed_under_conjugation
    # x は X² - 72954X + 729 の大きい方の根（72954 - 729/72954 程度）
    mp = result.ctx.mp
    u, v = 72954, 729
    expected = (u + mp.sqrt(u * u - 4 * v)) / 2
    assert abs(cert.value - expected) < mp.mpf(10) ** -40
    assert abs(cert.value.real - 72954) > 1e-3

    summary = tracker.get_summary()
    assert summary["attempts"] == [256]
    assert summary["conjugates"] == 4
    assert set(tracker.phase_seconds) == {"decompose", "stabilize", "conjugate+recognize", "certify"}


def test_gaussian_m5_is_a_unit():
    a, _ = quad_power(2, 1, 5, 60)
    result = certify_product("phi", -4, 5, EvalContext())
    cert = result.certificate

    assert result.stable_power == 60
    assert result.hypothesis["holds"]
    assert cert.is_unit
    assert cert.polynomial == IntPolynomial((1, -2 * a, 1)) ** 4
    assert cert.radical == RadicalForm(682, 305, 5, 10)


def test_gaussian_m5_radical_with_requested_root():
    # 根指数を指定すると最小の根指数 (2 + √5)^{1/2} から書き直す
    result = certify_product("phi", -4, 5, EvalContext(), radical_root=2)
    assert result.certificate.radical == RadicalForm(2, 1, 5, 2)
    result = certify_product("phi", -4, 5, EvalContext(), radical_root=20)
    a, b = quad_power(2, 1, 5, 10)
    assert result.certificate.radical == RadicalForm(a, b, 5, 20)


def test_split_prime_in_q_sqrt_minus_2_gives_unit():
    result = certify_product("phi", -8, 3, EvalContext())
    assert result.hypothesis["holds"]
    assert result.certificate.is_unit


def test_inert_prime_in_q_sqrt_minus_7():
    result = certify_product("phi", -7, 3, EvalContext())
    cert = result.certificate
    assert not result.hypothesis["holds"]
    assert cert.is_algebraic_integer
    assert cert.divides == 3 ** (cert.power_taken // 2)


def test_eta_ratio_m2_at_i():
    # √2·η(2i)/η(i) = 2^{1/8}
    result = certify_product("eta", -4, 2, EvalContext())
    cert = result.certificate
    assert cert.polynomial == IntPolynomial((-8, 1))
    assert cert.divides == 2 ** 12
    assert cert.radical == RadicalForm(2, 0, 1, 8)


def test_ramachandra_unit_for_two_prime_ideals():
    result = certify_product("ramachandra", -4, 5, EvalContext())
    assert result.hypothesis == {"prime_ideals": 2, "holds": True}
    assert result.certificate.is_unit
    assert result.certificate.radical is None


def test_result_json_is_deterministic():
    ctx = EvalContext()
    first = certify_product("phi", -4, 3, ctx).to_dict()
    second = certify_product("phi", -4, 3, ctx, workers=1).to_dict()
    assert json.dumps(first, sort_keys=True) == json.dumps(second, sort_keys=True)
    assert first["certificate"]["minpoly"][-1] == "1"
    assert first["certificate"]["radical"] == {"a": "3", "b": "2", "d": 3, "root": 4}


def test_preconditions():
    with pytest.raises(EvenOrSmallM):
        certify_product("phi", -4, 4, EvalContext())
    with pytest.raises(NotFundamentalDiscriminant):
        certify_product("phi", -5, 3, EvalContext())
    with pytest.raises(UsageError):
        make_target("theta", 3)


def test_describe_conjugates():
    data = describe_conjugates("phi", -4, 3, EvalContext(prec_bits=128), workers=1)
    assert data["stable_power"] == 12
    assert data["power_taken"] == 24
    assert data["level"] == 6
    assert len(data["conjugates"]) == 4
    assert all(set(row) == {"alpha", "product", "value"} for row in data["conjugates"])
