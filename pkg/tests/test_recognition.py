"""整数係数多項式の復元と、整数演算による判定"""
import pytest

from errors import CoefficientNotNearInteger, ImaginaryResidue, NotQuadraticPower, UsageError, ZeroConstantTerm
from numerics import EvalContext, mp_context
from recognition import (
    AlgebraicCertificate, IntPolynomial, RadicalForm, build_polynomial, certificate_to_dict,
    certify_algebraic_integer, certify_divides, certify_unit, express_radical,
    has_real_coefficients, expand_conjugates, pth_power_in_quadratic, quad_power, simplify_radical
)

CTX = EvalContext(prec_bits=128)

# m = 3 の例: x = (3 + 2√3)^6 = 36477 + 21060√3
EXAMPLE_M3 = IntPolynomial((729, -72954, 1)) ** 2


def test_int_polynomial_basics():
    p = IntPolynomial((-1, -2, 1, 0, 0))
    assert p.coefficients == (-1, -2, 1)
    assert p.degree == 2
    assert p.is_monic
    assert p.constant == -1
    assert str(p) == "X^2 - 2X - 1"
    assert p.evaluate(3) == 2
    assert p.to_json() == ["-1", "-2", "1"]
    with pytest.raises(UsageError):
        IntPolynomial((1.5, 1))


def test_int_polynomial_power_expansion():
    u, v = 72954, 729
    assert EXAMPLE_M3.coefficients == (v * v, -2 * u * v, u * u + 2 * v, -2 * u, 1)


def test_build_polynomial_from_conjugates():
    mp = CTX.mp
    poly = build_polynomial([1 + mp.sqrt(2), 1 - mp.sqrt(2)], CTX)
    assert poly == IntPolynomial((-1, -2, 1))


def test_build_polynomial_from_complex_pair():
    mp = CTX.mp
    poly = build_polynomial([mp.mpc(1, mp.sqrt(3)), mp.mpc(1, -mp.sqrt(3))], CTX)
    assert poly == IntPolynomial((4, -2, 1))


def test_build_polynomial_rejects_non_integer_coefficients():
    mp = CTX.mp
    with pytest.raises(CoefficientNotNearInteger) as info:
        build_polynomial([mp.mpf("0.3"), mp.mpf("0.5")], CTX)
    assert info.value.retryable


def test_build_polynomial_rejects_imaginary_residue():
    mp = CTX.mp
    with pytest.raises(ImaginaryResidue):
        build_polynomial([mp.mpc(1, "0.1")], CTX)


def test_has_real_coefficients():
    mp = CTX.mp
    assert has_real_coefficients(expand_conjugates([mp.mpc(2, 1), mp.mpc(2, -1)], mp), CTX)
    assert not has_real_coefficients(expand_conjugates([mp.mpc(2, 1)], mp), CTX)


def test_certify_example_m3_polynomial():
    assert certify_algebraic_integer(EXAMPLE_M3)
    assert certify_divides(EXAMPLE_M3, 3 ** 12)
    assert not certify_divides(EXAMPLE_M3, 3)
    assert not certify_unit(EXAMPLE_M3)


def test_certify_divides_small_cases():
    # √-2 は 2 を割るが 1 は割らない
    p = IntPolynomial((2, 0, 1))
    assert certify_divides(p, 2)
    assert not certify_divides(p, 1)
    assert not certify_divides(IntPolynomial((2, 0, 3)), 2)


def test_zero_constant_term_is_rejected():
    with pytest.raises(ZeroConstantTerm):
        certify_divides(IntPolynomial((0, 1)), 3)
    with pytest.raises(ZeroConstantTerm):
        certify_unit(IntPolynomial((0, 0, 1)))


def test_unit_detection():
    assert certify_unit(IntPolynomial((1, -4, 1)))
    assert certify_unit(IntPolynomial((-1, -4, 1)))
    assert not certify_unit(IntPolynomial((1, -4, 2)))


def test_quad_power():
    assert quad_power(3, 2, 3, 6) == (36477, 21060)
    assert quad_power(2, 1, 5, 5) == (682, 305)
    assert quad_power(7, 0, 2, 0) == (1, 0)


def test_pth_power_in_quadratic():
    assert pth_power_in_quadratic(36477, 21060, 3, 6) == (3, 2)
    assert pth_power_in_quadratic(36477, 21060, 3, 2) == (135, 78)
    assert pth_power_in_quadratic(3, 2, 3, 2) is None
    a, b = quad_power(2, 1, 5, 60)
    assert pth_power_in_quadratic(a, b, 5, 12) == (682, 305)
    assert pth_power_in_quadratic(a, b, 5, 60) == (2, 1)
    with pytest.raises(UsageError):
        pth_power_in_quadratic(3, 2, 3, 1)


def test_simplify_radical_example_m3():
    mp = mp_context(256)
    x = 36477 + 21060 * mp.sqrt(3)
    form = simplify_radical(x, EXAMPLE_M3, 24)
    assert form == RadicalForm(3, 2, 3, 4)
    assert abs(form.value(mp) - mp.root(x, 24)) < mp.mpf(10) ** -60


def test_simplify_radical_example_m5():
    mp = mp_context(256)
    a, b = quad_power(2, 1, 5, 60)
    poly = IntPolynomial((1, -2 * a, 1)) ** 4
    x = a + b * mp.sqrt(5)
    # 既定では取り出す冪を 12 の約数に限る: (682 + 305√5)^{1/10}
    assert simplify_radical(x, poly, 120) == RadicalForm(682, 305, 5, 10)
    form = simplify_radical(x, poly, 120, max_exponent=None)
    assert form == RadicalForm(2, 1, 5, 2)
    assert express_radical(form, 10) == RadicalForm(682, 305, 5, 10)
    with pytest.raises(UsageError):
        express_radical(form, 5)


def test_simplify_radical_rational_power():
    form = simplify_radical(8, IntPolynomial((-8, 1)), 24)
    assert form == RadicalForm(2, 0, 1, 8)


def test_simplify_radical_rejects_other_shapes():
    with pytest.raises(NotQuadraticPower):
        simplify_radical(2, IntPolynomial((-2, 0, 0, 1)), 6)


def test_certificate_to_dict_shape():
    ctx = EvalContext(prec_bits=64)
    cert = AlgebraicCertificate(
        value=ctx.mp.mpf(8),
        power_taken=24,
        polynomial=IntPolynomial((-8, 1)),
        is_algebraic_integer=True,
        divides=4096,
        is_unit=False,
        radical=RadicalForm(2, 0, 1, 8),
        prec_bits=64,
    )
    data = certificate_to_dict(cert, ctx)
    assert data["minpoly"] == ["-8", "1"]
    assert data["divides"] == "4096"
    assert data["radical"] == {"a": "2", "b": "0", "d": 1, "root": 8}
    assert float(data["value"]["re"]) == 8.0
