"""恒等式チェック（通常実行と符号反転の対照実験）"""
import pytest

from errors import IdentityViolation, UsageError
from identities import build_identities, check_identity, run_identity_suite, sample_points
from numerics import EvalContext


def test_sample_points_are_reproducible():
    first = sample_points(5, seed=7)
    assert first == sample_points(5, seed=7)
    assert first != sample_points(5, seed=8)
    for re, im in first:
        assert -0.5 <= re <= 0.5
        assert 0.5 <= im <= 3.0
    with pytest.raises(UsageError):
        sample_points(0)


def test_identity_names_are_unique():
    names = [identity.name for identity in build_identities()]
    assert len(names) == len(set(names))
    assert "phi_eta_siegel" in names
    assert "eta_quotient_m7" in names


def test_suite_passes_at_low_precision():
    report = run_identity_suite(EvalContext(prec_bits=64), samples=3)
    assert report["failures"] == []
    assert all(row["passed"] for row in report["identities"])
    assert report["tolerance_bits"] == -48
    assert report["samples"] == 3


def test_suite_passes_at_default_check_precision():
    report = run_identity_suite(EvalContext(prec_bits=192), samples=2, seed=99)
    assert report["failures"] == []
    assert report["seed"] == 99


def test_sign_injection_is_detected():
    with pytest.raises(IdentityViolation) as info:
        run_identity_suite(EvalContext(prec_bits=64), samples=2, corrupt="phi_eta_siegel")
    error = info.value
    assert {f["identity"] for f in error.failures} == {"phi_eta_siegel"}
    assert len(error.failures) == 2
    assert not [row for row in error.report["identities"] if row["identity"] == "phi_eta_siegel"][0]["passed"]


def test_sign_injection_without_raising():
    report = run_identity_suite(
        EvalContext(prec_bits=64), samples=1, corrupt="half_period_constant", raise_on_failure=False
    )
    assert [f["identity"] for f in report["failures"]] == ["half_period_constant"]


def test_unknown_identity_name_is_rejected():
    with pytest.raises(UsageError):
        run_identity_suite(EvalContext(prec_bits=64), samples=1, corrupt="no_such_identity")


def test_check_identity_reports_worst_residual():
    ctx = EvalContext(prec_bits=64)
    identity = build_identities()[0]
    worst, failures = check_identity(identity, [(0.1, 1.0)], ctx)
    assert failures == []
    assert worst < ctx.tolerance()
