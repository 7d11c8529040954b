"""
任意精度の複素数計算と q 積の打ち切り制御
バックエンドは mpmath。精度ごと・スレッドごとに MPContext を複製して使い回す
"""
import math
import threading
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Optional, Union

from mpmath import mp as _global_mp

from config import DEFAULT_GUARD_BITS, DEFAULT_PREC_BITS, MIN_PREC_BITS, RESIDUAL_SLACK_BITS
from errors import (
    NonFiniteValue, NonPositiveImaginaryPart, PointSyntaxError, QTooCloseToOne, UsageError
)

_LOCAL = threading.local()

LOG10_2 = math.log10(2)


def mp_context(bits):
    """
    指定精度の mpmath コンテキストを取得（スレッドごとにキャッシュ）

    mpmath のグローバル mp は精度を共有するため、並列評価ではスレッド別に複製する

    Args:
        bits (int): 仮数部の精度（ビット）

    Returns:
        MPContext: 精度 bits のコンテキスト
    """
    contexts = getattr(_LOCAL, "contexts", None)
    if contexts is None:
        contexts = _LOCAL.contexts = {}
    ctx = contexts.get(bits)
    if ctx is None:
        ctx = _global_mp.clone()
        ctx.prec = bits
        contexts[bits] = ctx
    return ctx


@dataclass(frozen=True)
class Constants:
    """working_bits で一度だけ計算して再利用する超越定数"""

    pi: object
    sqrt_two_pi: object
    zeta8: object          # e^{πi/4}
    eta_prefactor: object  # √(2π)·e^{πi/4}


def constants(ctx):
    """
    η の正規化に現れる定数を取得（スレッド・精度ごとにキャッシュ）

    Args:
        ctx (EvalContext): 評価コンテキスト

    Returns:
        Constants: 定数の組
    """
    cache = getattr(_LOCAL, "constants", None)
    if cache is None:
        cache = _LOCAL.constants = {}
    bits = ctx.working_bits
    found = cache.get(bits)
    if found is None:
        mp = ctx.mp
        sqrt_two_pi = mp.sqrt(2 * mp.pi)
        zeta8 = mp.expjpi(mp.mpf(1) / 4)
        found = Constants(
            pi=+mp.pi,
            sqrt_two_pi=sqrt_two_pi,
            zeta8=zeta8,
            eta_prefactor=sqrt_two_pi * zeta8,
        )
        cache[bits] = found
    return found


@dataclass(frozen=True)
class EvalContext:
    """
    評価精度の設定

    Args:
        prec_bits: 保証したい精度（ビット）
        guard_bits: 誤差の余裕（ビット）
        max_terms: q 積の打ち切り項数（None なら裾の評価から自動決定）
    """

    prec_bits: int = DEFAULT_PREC_BITS
    guard_bits: int = DEFAULT_GUARD_BITS
    max_terms: Optional[int] = None

    def __post_init__(self):
        if self.prec_bits < MIN_PREC_BITS:
            raise UsageError(f"prec_bits は {MIN_PREC_BITS} 以上が必要です: {self.prec_bits}")
        if not 0 < self.guard_bits < self.prec_bits:
            raise UsageError(f"guard_bits は 1 以上 prec_bits 未満: {self.guard_bits}")
        if self.max_terms is not None and self.max_terms < 1:
            raise UsageError(f"max_terms は正の整数: {self.max_terms}")

    @property
    def working_bits(self):
        return self.prec_bits + self.guard_bits

    @property
    def mp(self):
        return mp_context(self.working_bits)

    @property
    def digits(self):
        """prec_bits に相当する10進桁数"""
        return max(1, int(self.prec_bits * LOG10_2))

    def doubled(self):
        return replace(self, prec_bits=2 * self.prec_bits)

    def with_prec(self, prec_bits):
        return replace(self, prec_bits=prec_bits)

    def tolerance(self, slack_bits=RESIDUAL_SLACK_BITS):
        """残差の許容値 2^(-prec + slack)"""
        return self.mp.ldexp(self.mp.mpf(1), -self.prec_bits + slack_bits)

    def terms_for(self, abs_q, offset=Fraction(1, 2), extra_bits=0):
        """
        q 積の打ち切り項数を決める

        Args:
            abs_q: |q|
            offset (Fraction): 項 |q|^(n - offset) の指数のずれ
            extra_bits (int): 追加で確保する精度（二乗される因子など）

        Returns:
            int: 項数
        """
        if self.max_terms is not None:
            return self.max_terms
        return truncation_terms(abs_q, self.working_bits + extra_bits, offset=offset)


@dataclass(frozen=True)
class QuadraticPoint:
    """
    虚二次点 (p + q√D)/r

    生成時に r > 0 かつ gcd(p, q, r) = 1 に正規化する。
    上半平面に入るか (q/r > 0) は to_complex で検査する
    """

    D: int
    p: int
    q: int
    r: int

    def __post_init__(self):
        D, p, q, r = (int(v) for v in (self.D, self.p, self.q, self.r))
        if D >= 0:
            raise UsageError(f"D は負の整数で指定してください: {D}")
        if r == 0:
            raise UsageError("r = 0 の点は定義できません")
        if r < 0:
            p, q, r = -p, -q, -r
        g = math.gcd(math.gcd(p, q), r)
        object.__setattr__(self, "D", D)
        object.__setattr__(self, "p", p // g)
        object.__setattr__(self, "q", q // g)
        object.__setattr__(self, "r", r // g)

    def __str__(self):
        return f"quad:{self.D}:{self.p},{self.q},{self.r}"


@dataclass(frozen=True)
class DecimalPoint:
    """10進表記で与えられた点 re + im·i（CLI の c:<re>,<im> 形式）"""

    re: str
    im: str

    def __str__(self):
        return f"c:{self.re},{self.im}"


Point = Union[QuadraticPoint, DecimalPoint]


def to_complex(pt, ctx):
    """
    虚二次点を複素数に変換

    Args:
        pt (QuadraticPoint): 点
        ctx (EvalContext): 評価コンテキスト

    Returns:
        mpc: (p + q·√|D|·i)/r

    Raises:
        NonPositiveImaginaryPart: q/r <= 0 の場合
    """
    if pt.q <= 0:
        raise NonPositiveImaginaryPart(f"上半平面の点ではありません: {pt}")
    mp = ctx.mp
    im = pt.q * mp.sqrt(-pt.D) / pt.r
    re = mp.mpf(pt.p) / pt.r
    return mp.mpc(re, im)


def point_to_complex(pt, ctx):
    """QuadraticPoint / DecimalPoint のどちらでも複素数に変換"""
    if isinstance(pt, QuadraticPoint):
        return to_complex(pt, ctx)
    mp = ctx.mp
    value = mp.mpc(mp.mpf(pt.re), mp.mpf(pt.im))
    return upper_half_plane(value, ctx)


def parse_point(text):
    """
    CLI の点表記を解析

    quad:D:p,q,r  → (p + q√D)/r
    c:<re>,<im>   → re + im·i

    Args:
        text (str): 点の文字列

    Returns:
        QuadraticPoint または DecimalPoint

    Raises:
        PointSyntaxError: 書式が不正な場合
    """
    raw = text.strip()
    try:
        if raw.startswith("quad:"):
            _, d_part, rest = raw.split(":", 2)
            p, q, r = (int(v) for v in rest.split(","))
            return QuadraticPoint(int(d_part), p, q, r)
        if raw.startswith("c:"):
            re_part, im_part = raw[2:].split(",")
            # 数値として読めるかだけ先に確認する
            float(re_part)
            float(im_part)
            return DecimalPoint(re_part.strip(), im_part.strip())
    except (ValueError, UsageError) as e:
        raise PointSyntaxError(f"点の書式が不正です: {text!r} ({e})")
    raise PointSyntaxError(f"点は quad:D:p,q,r か c:<re>,<im> で指定してください: {text!r}")


def upper_half_plane(tau, ctx):
    """
    tau を ctx の複素数に変換し、Im(tau) > 0 を確認

    Raises:
        NonPositiveImaginaryPart: Im(tau) <= 0 の場合
    """
    mp = ctx.mp
    tau = mp.mpc(tau)
    if not mp.isfinite(tau.real) or not mp.isfinite(tau.imag):
        raise NonFiniteValue(f"tau が有限ではありません: {tau}")
    if tau.imag <= 0:
        raise NonPositiveImaginaryPart(f"Im(tau) > 0 が必要です: {mp.nstr(tau, 15)}")
    return tau


def nome(tau, ctx):
    """
    q = e^{2πiτ} を計算

    Raises:
        NonPositiveImaginaryPart: Im(tau) <= 0 の場合
    """
    tau = upper_half_plane(tau, ctx)
    return ctx.mp.expjpi(2 * tau)


def truncation_terms(abs_q, target_bits, offset=Fraction(1, 2)):
    """
    q 積の打ち切り項数 T を決める

    Σ_{n>T} |q|^(n - offset) / (1 - |q|) = |q|^(T + 1 - offset) / (1 - |q|)^2 < 2^(-target_bits)
    を満たす最小の T を返す。各因子 (1 + ε_n) の積の相対誤差は Σ|ε_n| で抑えられる

    Args:
        abs_q: |q|（0 <= |q| < 1）
        target_bits (int): 目標精度（ビット）
        offset (Fraction): 項の指数のずれ（既定 1/2、Siegel 関数では r1）

    Returns:
        int: 項数（1 以上）

    Raises:
        QTooCloseToOne: |q| が 1 に近すぎて精度が出せない場合
    """
    mp = mp_context(max(64, target_bits // 2 + 64))
    abs_q = mp.mpf(abs_q)
    if abs_q < 0:
        raise UsageError(f"|q| は非負: {abs_q}")
    if abs_q == 0:
        return 1
    limit = 1 - mp.ldexp(mp.mpf(1), -(target_bits // 2))
    if abs_q > limit:
        raise QTooCloseToOne(f"|q| = {mp.nstr(abs_q, 10)} が 1 に近すぎます（目標 {target_bits} bit）")
    offset = Fraction(offset)
    numer = target_bits * mp.log(2) - 2 * mp.log(1 - abs_q)
    threshold = numer / (-mp.log(abs_q)) - (1 - mp.mpf(offset.numerator) / offset.denominator)
    return max(1, int(mp.floor(threshold)) + 1)


def to_mpf(mp, value):
    """Fraction / int を指定コンテキストの mpf に変換"""
    value = Fraction(value)
    return mp.mpf(value.numerator) / value.denominator


def ensure_finite(value, what, nonzero=False):
    """
    NaN・無限大（必要ならゼロも）を例外に変える

    Raises:
        NonFiniteValue: 値が有限でない（またはゼロ）場合
    """
    mp = _global_mp
    parts = (value.real, value.imag) if hasattr(value, "imag") else (value,)
    for part in parts:
        if mp.isnan(part) or mp.isinf(part):
            raise NonFiniteValue(f"{what} の値が有限ではありません")
    if nonzero and not value:
        raise NonFiniteValue(f"{what} がゼロになりました（精度不足）")
    return value


def relative_residual(lhs, rhs, ctx):
    """|lhs - rhs| / max(|rhs|, 2^-working_bits)"""
    mp = ctx.mp
    lhs, rhs = mp.mpc(lhs), mp.mpc(rhs)
    floor = mp.ldexp(mp.mpf(1), -ctx.working_bits)
    return abs(lhs - rhs) / max(abs(rhs), floor)


def format_real(value, ctx):
    """決定的な10進文字列（prec_bits 相当の桁数）"""
    return ctx.mp.nstr(ctx.mp.mpf(value), ctx.digits)


def format_complex(value, ctx):
    """
    複素数を JSON 用の {"re": ..., "im": ...} に変換

    Returns:
        dict: 10進文字列の実部・虚部
    """
    value = ctx.mp.mpc(value)
    return {"re": format_real(value.real, ctx), "im": format_real(value.imag, ctx)}
