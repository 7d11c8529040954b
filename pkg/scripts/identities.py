"""
Siegel 関数・η・φ の恒等式を乱数の τ で数値検証する
"""
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Tuple

from config import (
    IDENTITY_IM_RANGE, IDENTITY_RE_RANGE, IDENTITY_SAMPLES, IDENTITY_SEED, RESIDUAL_SLACK_BITS
)
from errors import IdentityViolation, UsageError
from numerics import constants, relative_residual
from qseries import eta, eta_ratio, phi, phi_eta_quotient, siegel
from siegel_algebra import (
    SiegelIndex, eval_product, eta_ratio_squared_product, half_period_ratio_product
)

HALF = Fraction(1, 2)
HALF_PERIOD = SiegelIndex(HALF, HALF)


@dataclass(frozen=True)
class Identity:
    """左辺と右辺を τ の関数として持つ恒等式"""

    name: str
    description: str
    sides: Callable  # (tau, ctx) -> (lhs, rhs)


def _phi_eta_siegel(tau, ctx):
    rhs = -eta(tau, ctx) * siegel(HALF_PERIOD, tau, ctx) / constants(ctx).sqrt_two_pi
    return phi(tau, ctx), rhs


def _phi_eta_quotient(tau, ctx):
    return phi(tau, ctx), phi_eta_quotient(tau, ctx)


def _half_period_constant(tau, ctx):
    lhs = (
        siegel((0, HALF), tau, ctx) * siegel((HALF, 0), tau, ctx) * siegel(HALF_PERIOD, tau, ctx)
    )
    return lhs, 2 * constants(ctx).zeta8


def _half_period_ratio(m):
    def sides(tau, ctx):
        lhs = siegel(HALF_PERIOD, m * tau, ctx) / siegel(HALF_PERIOD, tau, ctx)
        return lhs, eval_product(half_period_ratio_product(m), tau, ctx)
    return sides


def _division_points(m):
    def sides(tau, ctx):
        value = ctx.mp.mpc(1)
        for a in range(m):
            for b in range(m):
                if a == 0 and b == 0:
                    continue
                value *= siegel((Fraction(a, m), Fraction(b, m)), tau, ctx)
        return value ** (12 * m), ctx.mp.mpf(m) ** (12 * m)
    return sides


def _eta_quotient(m):
    def sides(tau, ctx):
        lhs = eval_product(eta_ratio_squared_product(m), tau, ctx)
        return lhs, eta_ratio(m, tau, ctx) ** 2
    return sides


def build_identities():
    """恒等式の一覧（実行順）"""
    identities = [
        Identity("phi_eta_siegel", "φ = -η·g_(1/2,1/2)/√(2π)", _phi_eta_siegel),
        Identity("phi_eta_quotient", "φ = η((τ+1)/2)²/(√(2π)e^{πi/4}η(τ+1))", _phi_eta_quotient),
        Identity("half_period_constant", "g_(0,1/2)·g_(1/2,0)·g_(1/2,1/2) = 2e^{πi/4}",
                 _half_period_constant),
    ]
    for m in (3, 5, 7):
        identities.append(Identity(
            f"half_period_ratio_m{m}",
            f"g_(1/2,1/2)({m}τ)/g_(1/2,1/2)(τ) = ±∏ g_(1/2,1/2+k/{m})",
            _half_period_ratio(m),
        ))
    for m in (2, 3):
        identities.append(Identity(
            f"division_points_m{m}",
            f"∏ g_(a/{m},b/{m})^{12 * m} = {m}^{12 * m}",
            _division_points(m),
        ))
    for m in range(2, 8):
        identities.append(Identity(
            f"eta_quotient_m{m}",
            f"∏ g_(0,k/{m}) = i^{m - 1}·(√{m}·η({m}τ)/η(τ))²",
            _eta_quotient(m),
        ))
    return identities


def sample_points(count=IDENTITY_SAMPLES, seed=IDENTITY_SEED, im_range=IDENTITY_IM_RANGE,
                  re_range=IDENTITY_RE_RANGE):
    """
    乱数で τ を生成（シード固定で再現可能）

    Returns:
        list: (re, im) の float の組
    """
    if count < 1:
        raise UsageError(f"サンプル数は 1 以上: {count}")
    rng = random.Random(seed)
    return [(rng.uniform(*re_range), rng.uniform(*im_range)) for _ in range(count)]


def check_identity(identity, points, ctx, corrupt=False) -> Tuple[object, list]:
    """
    1つの恒等式を全サンプル点で検証

    Args:
        identity (Identity): 恒等式
        points: (re, im) の列
        ctx (EvalContext): 評価コンテキスト
        corrupt (bool): 右辺の符号を反転する（検出できることの確認用）

    Returns:
        (最大残差, 失敗した点のリスト)
    """
    mp = ctx.mp
    tol = ctx.tolerance()
    worst = mp.mpf(0)
    failures = []
    for re, im in points:
        tau = mp.mpc(re, im)
        lhs, rhs = identity.sides(tau, ctx)
        if corrupt:
            rhs = -rhs
        residual = relative_residual(lhs, rhs, ctx)
        worst = max(worst, residual)
        if not residual < tol:
            failures.append({
                "identity": identity.name,
                "tau": f"{re!r}+{im!r}i",
                "residual": mp.nstr(residual, 5),
            })
    return worst, failures


def run_identity_suite(ctx, samples=IDENTITY_SAMPLES, seed=IDENTITY_SEED, corrupt=None,
                       logger=None, raise_on_failure=True):
    """
    恒等式をすべて検証してレポートを返す

    Args:
        ctx (EvalContext): 評価コンテキスト
        samples (int): 恒等式ごとのサンプル数
        seed (int): 乱数シード
        corrupt (str): 符号を反転させる恒等式の名前（負の対照実験用）
        logger: ロガーインスタンス（オプション）
        raise_on_failure (bool): 失敗があれば IdentityViolation を送出する

    Returns:
        dict: {"seed", "samples", "prec_bits", "tolerance_bits", "identities": [...], "failures": [...]}

    Raises:
        IdentityViolation: いずれかの恒等式が許容値を超えた場合
    """
    identities = build_identities()
    names = {identity.name for identity in identities}
    if corrupt is not None and corrupt not in names:
        raise UsageError(f"不明な恒等式です: {corrupt}（候補: {', '.join(sorted(names))}）")

    points = sample_points(samples, seed)
    if logger:
        logger.log(f"🔍 恒等式チェック開始: {len(identities)}種 × {len(points)}点（seed={seed}、{ctx.prec_bits} bit）")

    rows = []
    failures = []
    for identity in identities:
        worst, failed = check_identity(identity, points, ctx, corrupt=(identity.name == corrupt))
        passed = not failed
        rows.append({
            "identity": identity.name,
            "description": identity.description,
            "max_residual": ctx.mp.nstr(worst, 5),
            "passed": passed,
        })
        failures.extend(failed)
        if logger:
            mark = "✅" if passed else "❌"
            logger.log(f"{mark} {identity.name}: 最大残差 {ctx.mp.nstr(worst, 5)}")

    report = {
        "seed": seed,
        "samples": len(points),
        "prec_bits": ctx.prec_bits,
        "tolerance_bits": -ctx.prec_bits + RESIDUAL_SLACK_BITS,
        "identities": rows,
        "failures": failures,
    }
    if failures and raise_on_failure:
        error = IdentityViolation(failures)
        error.report = report
        raise error
    return report
