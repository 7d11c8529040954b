"""精度コンテキスト・点の解析・q 積の打ち切り"""
from fractions import Fraction

import pytest

from errors import (
    NonPositiveImaginaryPart, PointSyntaxError, QTooCloseToOne, UsageError
)
from numerics import (
    DecimalPoint, EvalContext, QuadraticPoint, format_complex, mp_context, parse_point,
    point_to_complex, relative_residual, to_complex, truncation_terms
)


def test_truncation_terms_for_theta_i_at_256_bits():
    mp = mp_context(128)
    terms = truncation_terms(mp.exp(-2 * mp.pi), 256)
    assert 27 <= terms <= 30


def test_truncation_terms_grow_with_precision_and_offset():
    mp = mp_context(128)
    q = mp.exp(-mp.pi)
    assert truncation_terms(q, 512) > truncation_terms(q, 256)
    # offset が大きいほど裾の減衰が遅い
    assert truncation_terms(q, 256, offset=Fraction(9, 10)) >= truncation_terms(q, 256)


def test_truncation_terms_rejects_q_near_one():
    mp = mp_context(128)
    with pytest.raises(QTooCloseToOne):
        truncation_terms(1 - mp.ldexp(mp.mpf(1), -200), 256)


def test_truncation_terms_zero_q():
    assert truncation_terms(0, 256) == 1


def test_eval_context_validation():
    with pytest.raises(UsageError):
        EvalContext(prec_bits=32)
    with pytest.raises(UsageError):
        EvalContext(prec_bits=128, guard_bits=128)
    ctx = EvalContext(prec_bits=128, guard_bits=16)
    assert ctx.working_bits == 144
    assert ctx.doubled().prec_bits == 256
    assert ctx.doubled().guard_bits == 16
    assert ctx.with_prec(200).prec_bits == 200


def test_eval_context_tolerance():
    ctx = EvalContext(prec_bits=128)
    assert ctx.tolerance() == ctx.mp.ldexp(1, -112)


def test_quadratic_point_normalization():
    pt = QuadraticPoint(-4, 0, -2, -4)
    assert (pt.D, pt.p, pt.q, pt.r) == (-4, 0, 1, 2)
    assert str(pt) == "quad:-4:0,1,2"


def test_quadratic_point_rejects_bad_input():
    with pytest.raises(UsageError):
        QuadraticPoint(5, 0, 1, 1)
    with pytest.raises(UsageError):
        QuadraticPoint(-3, 0, 1, 0)


def test_to_complex_values():
    ctx = EvalContext(prec_bits=128)
    mp = ctx.mp
    tau = to_complex(QuadraticPoint(-3, -1, 1, 2), ctx)
    assert abs(tau - mp.expjpi(mp.mpf(2) / 3)) < mp.ldexp(1, -120)
    assert to_complex(QuadraticPoint(-1, 0, 1, 1), ctx) == mp.mpc(0, 1)


def test_to_complex_rejects_lower_half_plane():
    ctx = EvalContext(prec_bits=128)
    with pytest.raises(NonPositiveImaginaryPart):
        to_complex(QuadraticPoint(-1, 0, -1, 1), ctx)


def test_parse_point_grammar():
    assert parse_point("quad:-1:0,1,1") == QuadraticPoint(-1, 0, 1, 1)
    assert parse_point(" c:0.25,1.5 ") == DecimalPoint("0.25", "1.5")
    for bad in ("quad:-1:0,1", "c:1", "1+2i", "quad:x:0,1,1", "c:a,b"):
        with pytest.raises(PointSyntaxError):
            parse_point(bad)


def test_decimal_point_must_be_in_upper_half_plane():
    ctx = EvalContext(prec_bits=128)
    with pytest.raises(NonPositiveImaginaryPart):
        point_to_complex(parse_point("c:0,-1"), ctx)
    value = point_to_complex(parse_point("c:0.5,2"), ctx)
    assert value == ctx.mp.mpc("0.5", "2")


def test_relative_residual_and_format():
    ctx = EvalContext(prec_bits=64)
    mp = ctx.mp
    assert relative_residual(mp.mpf(2), mp.mpf(2), ctx) == 0
    assert relative_residual(mp.mpf(3), mp.mpf(2), ctx) == mp.mpf(1) / 2
    data = format_complex(mp.mpc(1.5, -2), ctx)
    assert set(data) == {"re", "im"}
    assert float(data["re"]) == 1.5
    assert float(data["im"]) == -2.0
