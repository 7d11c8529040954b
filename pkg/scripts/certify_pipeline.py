"""
証明書パイプライン
分解 → 安定化 → 共役 → 多項式の復元 → 判定 の順に実行し、AlgebraicCertificate を作る

対象（target）:
  phi          √m·φ(mθ_K)/φ(θ_K)（m は3以上の奇数）
  eta          √m·η(mθ_K)/η(θ_K)（m は2以上）
  ramachandra  g_(0,1/N)(θ_K)^{12N}（N = m）
"""
from contextlib import nullcontext
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from config import MAX_PRECISION_RETRIES, MAX_WORKERS
from errors import CertificationFailure, EvenOrSmallM, NotQuadraticPower, PrecisionError, UsageError
from classfield import (
    class_number, conjugate_products, conjugates, eta_unit_report, make_field, ramachandra_report,
    unit_theorem_report
)
from numerics import format_complex, relative_residual, to_complex
from precision_retry_utils import call_with_precision_retry, is_retryable_error
from qseries import eta_ratio, phi_ratio, siegel
from recognition import (
    RADICAL_MAX_EXPONENT, AlgebraicCertificate, build_polynomial, certificate_to_dict,
    certify_algebraic_integer, certify_divides, certify_unit, coefficient_bits, expand_conjugates,
    express_radical, has_real_coefficients, simplify_radical
)
from siegel_algebra import (
    SiegelIndex, eta_ratio_squared_product, eval_product, galois_stable_power,
    phi_ratio_squared_product, product_to_json, ramachandra_product
)

TARGETS = ("phi", "eta", "ramachandra")


@dataclass(frozen=True)
class Target:
    """
    証明する量の定義

    product は「量の base_power 乗」を表す Siegel 積
    """

    name: str
    m: int
    product: object
    base_power: int
    direct: Callable          # (tau, ctx) -> 量そのものの値
    hypothesis: Callable      # (field) -> dict（"holds" を含む）
    divides_target: Callable  # (power_taken) -> int
    with_radical: bool


def make_target(name, m):
    """
    対象名と m から Target を作る

    Raises:
        UsageError: 未知の対象、または m が前提を満たさない場合
    """
    if name == "phi":
        return Target(
            name, m, phi_ratio_squared_product(m), 2,
            lambda tau, ctx: phi_ratio(m, tau, ctx),
            lambda field: unit_theorem_report(m, field),
            lambda power: m ** (power // 2),
            True,
        )
    if name == "eta":
        return Target(
            name, m, eta_ratio_squared_product(m), 2,
            lambda tau, ctx: eta_ratio(m, tau, ctx),
            lambda field: eta_unit_report(m, field),
            lambda power: m ** (power // 2),
            True,
        )
    if name == "ramachandra":
        if m < 2:
            raise EvenOrSmallM(f"N は 2 以上が必要です: {m}")
        index = SiegelIndex(0, Fraction(1, m))
        return Target(
            name, m, ramachandra_product(m), 1,
            lambda tau, ctx: siegel(index, tau, ctx) ** (12 * m),
            lambda field: ramachandra_report(m, field),
            lambda power: m ** (12 * m * power),
            False,
        )
    raise UsageError(f"不明な対象です: {name}（候補: {', '.join(TARGETS)}）")


@dataclass
class CertifyResult:
    """パイプラインの結果一式"""

    target: Target
    field: object
    stable_power: int
    x_product: object
    hypothesis: dict
    certificate: AlgebraicCertificate
    ctx: object
    closed_under_conjugation: bool

    def to_dict(self, run_summary=None):
        data = {
            "target": self.target.name,
            "disc": self.field.d_K,
            "m": self.target.m,
            "field": self.field.to_json(),
            "hypothesis": self.hypothesis,
            "stable_power": self.stable_power,
            "product": product_to_json(self.x_product),
            "complex_closure": self.closed_under_conjugation,
            "certificate": certificate_to_dict(self.certificate, self.ctx),
        }
        if run_summary is not None:
            data["run"] = run_summary
        return data


def _recover_polynomial(x_product, field, target, power_taken, ctx, workers, logger, tracker):
    """
    1回分の試行: 共役を評価して多項式を復元する（精度不足ならリトライされる）

    Returns:
        (x の値, 多項式, 複素共役で閉じたかどうか)
    """
    values = conjugates(x_product, field, ctx, max_workers=workers, logger=logger)
    if tracker:
        tracker.add_evaluations(len(values) + 1)
        tracker.set_conjugate_count(len(values))

    theta = to_complex(field.theta, ctx)
    x = eval_product(x_product, theta, ctx)

    # 形式積の値と、量を直接評価して冪を取った値が一致するか
    direct = target.direct(theta, ctx) ** power_taken
    residual = relative_residual(x, direct, ctx)
    if not residual < ctx.tolerance():
        raise CertificationFailure(
            f"Siegel 積と直接評価が一致しません（相対残差 {ctx.mp.nstr(residual, 5)}）"
        )

    closed = False
    if not has_real_coefficients(expand_conjugates(values, ctx.mp), ctx):
        h = class_number(field.d_K)
        if h != 1:
            raise CertificationFailure(
                f"対称式が実数になりません（h({field.d_K}) = {h} のため H_K 上の計算が必要）"
            )
        if logger:
            logger.log("📐 対称式が実数でないため、複素共役を合わせたノルム多項式を使います")
        values = values + [ctx.mp.conj(v) for v in values]
        closed = True

    poly = build_polynomial(values, ctx)
    return x, poly, closed


def certify_product(target_name, disc, m, ctx, max_retries=MAX_PRECISION_RETRIES,
                    workers=MAX_WORKERS, logger=None, tracker=None, radical_root=None):
    """
    θ_K での特殊値を証明する

    Args:
        target_name (str): "phi" / "eta" / "ramachandra"
        disc (int): 基本判別式 d_K
        m (int): m（ramachandra では N）
        ctx (EvalContext): 最初の評価コンテキスト
        max_retries (int): 精度を倍にするリトライの上限
        workers (int): 共役評価の並列数
        logger: ロガーインスタンス（オプション）
        tracker (RunTracker): 実行記録（オプション）
        radical_root (int): 冪根表示の根指数（指定時は最小の根指数で求めてから express_radical で書き直す）

    Returns:
        CertifyResult: 証明書と付随情報

    Raises:
        UsageError: 入力が前提を満たさない場合
        CertificationFailure: 精度を上げても復元できない、または定理の結論と矛盾する場合
    """
    field = make_field(disc)

    def phase(name):
        return tracker.phase(name) if tracker else nullcontext()

    # Phase 1: 分解
    with phase("decompose"):
        target = make_target(target_name, m)
    if logger:
        logger.log(f"🎯 対象: {target.name}（{field.name}、m={m}）")
        logger.log(f"🧮 Siegel 積: {target.product}")

    # Phase 2: 安定化
    with phase("stabilize"):
        e = galois_stable_power(target.product)
        x_product = target.product.power(e)
        power_taken = target.base_power * e
    hypothesis = target.hypothesis(field)
    if logger:
        logger.log(f"📋 Galois 安定な冪: e = {e}（x = 量^{power_taken}、導手 {x_product.level}）")

    # Phase 3-4: 共役と多項式（精度不足なら倍にしてリトライ）
    with phase("conjugate+recognize"):
        try:
            (x, poly, closed), used = call_with_precision_retry(
                lambda c: _recover_polynomial(
                    x_product, field, target, power_taken, c, workers, logger, tracker
                ),
                ctx,
                max_retries=max_retries,
                logger=logger,
                operation_name="多項式の復元",
                on_attempt=(lambda c: tracker.add_attempt(c.prec_bits)) if tracker else None,
            )
        except PrecisionError as err:
            if is_retryable_error(err):
                raise CertificationFailure(f"精度を上げても多項式を復元できませんでした: {err}") from err
            raise
    if logger:
        logger.log(f"🔢 多項式: 次数 {poly.degree}、係数 最大 {coefficient_bits(poly)} bit（{used.prec_bits} bit で成功）")

    # Phase 5: 判定（すべて整数演算）
    with phase("certify"):
        is_integer = certify_algebraic_integer(poly)
        n = target.divides_target(power_taken)
        if not certify_divides(poly, n):
            raise CertificationFailure(f"x が {n} を割りません: {poly}")
        is_unit = certify_unit(poly)
        if hypothesis["holds"] and not is_unit:
            raise CertificationFailure("単数になる条件を満たすのに定数項が ±1 ではありません")

        radical = None
        if target.with_radical and not closed:
            radical = _find_radical(
                x, poly, power_taken, target, field, used, logger,
                max_exponent=None if radical_root else RADICAL_MAX_EXPONENT,
            )
            if radical is not None and radical_root:
                radical = express_radical(radical, radical_root)

    certificate = AlgebraicCertificate(
        value=x,
        power_taken=power_taken,
        polynomial=poly,
        is_algebraic_integer=is_integer,
        divides=n,
        is_unit=is_unit,
        radical=radical,
        prec_bits=used.prec_bits,
    )
    if logger:
        unit_mark = "単数" if is_unit else "単数ではない"
        logger.log(f"✅ 証明完了: {n} を割る代数的整数（{unit_mark}）")
        if radical:
            logger.log(f"📝 冪根表示: 量 = {radical}")
    return CertifyResult(target, field, e, x_product, hypothesis, certificate, used, closed)


def _find_radical(x, poly, power_taken, target, field, ctx, logger, max_exponent=RADICAL_MAX_EXPONENT):
    """
    量そのものを (a + b√d)^{1/k} で表す（直接評価と一致するものだけ採用）
    """
    try:
        radical = simplify_radical(x, poly, power_taken, max_exponent=max_exponent)
    except NotQuadraticPower as err:
        if logger:
            logger.log(f"⚠️ 冪根表示は見つかりません: {err}")
        return None
    if radical is None:
        return None

    mp = ctx.mp
    direct = target.direct(to_complex(field.theta, ctx), ctx)
    if not relative_residual(radical.value(mp), direct, ctx) < ctx.tolerance():
        if logger:
            logger.log(f"⚠️ 冪根 {radical} は量の正の実数値と一致しないため採用しません")
        return None
    return radical


def describe_conjugates(target_name, disc, m, ctx, workers=MAX_WORKERS, logger=None):
    """
    共役を剰余類ごとに列挙する（conjugates コマンド用）

    Returns:
        dict: 剰余類の代表元・作用後の積・値の一覧
    """
    field = make_field(disc)
    target = make_target(target_name, m)
    e = galois_stable_power(target.product)
    x_product = target.product.power(e)
    pairs = conjugate_products(x_product, field)
    values = conjugates(x_product, field, ctx, max_workers=workers, logger=logger)
    return {
        "target": target.name,
        "disc": disc,
        "m": m,
        "stable_power": e,
        "power_taken": target.base_power * e,
        "level": x_product.level,
        "conjugates": [
            {"alpha": alpha.to_json(), "product": product_to_json(p), "value": format_complex(v, ctx)}
            for (alpha, p), v in zip(pairs, values)
        ],
    }
