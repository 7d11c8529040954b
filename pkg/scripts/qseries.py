"""
q 積によるモジュラー関数の評価
η・φ・Δ・j・Siegel 関数 g_r と、それらの比
"""
from fractions import Fraction

from errors import NonFiniteValue
from numerics import constants, ensure_finite, nome, to_mpf, upper_half_plane
from siegel_algebra import SiegelIndex, reduce_translation


def bernoulli2(x):
    """第2 Bernoulli 多項式 B2(x) = x² - x + 1/6（有理数のまま）"""
    x = Fraction(x)
    return x * x - x + Fraction(1, 6)


def _euler_product(q, terms, mp):
    """∏_{n=1}^{terms} (1 - qⁿ)"""
    prod = mp.mpc(1)
    qn = mp.mpc(1)
    for _ in range(terms):
        qn *= q
        prod *= 1 - qn
    return prod


def eta(tau, ctx):
    """
    正規化した Dedekind η 関数

    η(τ) = √(2π)·e^{πi/4}·q^{1/24}·∏(1 - qⁿ)

    Args:
        tau: 上半平面の点
        ctx (EvalContext): 評価コンテキスト

    Returns:
        mpc: η(τ)
    """
    mp = ctx.mp
    tau = upper_half_plane(tau, ctx)
    q = nome(tau, ctx)
    terms = ctx.terms_for(abs(q))
    value = constants(ctx).eta_prefactor * mp.expjpi(tau / 12) * _euler_product(q, terms, mp)
    return ensure_finite(value, "η", nonzero=True)


def phi(tau, ctx):
    """
    φ(τ) = ∏(1 + q^{n-1/2})²(1 - qⁿ)

    η の商による表示は使わず、積をそのまま評価する。q^{1/2} = e^{πiτ}

    Returns:
        mpc: φ(τ)
    """
    mp = ctx.mp
    tau = upper_half_plane(tau, ctx)
    qh = mp.expjpi(tau)
    qh2 = qh * qh
    # 二乗される因子の分だけ余分に確保する
    terms = ctx.terms_for(abs(qh2), extra_bits=2)
    prod = mp.mpc(1)
    odd = qh
    qn = mp.mpc(1)
    for _ in range(terms):
        qn *= qh2
        prod *= (1 + odd) ** 2 * (1 - qn)
        odd *= qh2
    return ensure_finite(prod, "φ", nonzero=True)


def phi_eta_quotient(tau, ctx):
    """φ の η 商による表示（検算用）: η((τ+1)/2)² / (√(2π)·e^{πi/4}·η(τ+1))"""
    tau = upper_half_plane(tau, ctx)
    half = eta((tau + 1) / 2, ctx)
    return half * half / (constants(ctx).eta_prefactor * eta(tau + 1, ctx))


def delta(tau, ctx):
    """判別式 Δ(τ) = η(τ)^24 = (2π)^12·q·∏(1 - qⁿ)^24"""
    return eta(tau, ctx) ** 24


def jfun(tau, ctx):
    """
    j 不変量

    j = ((η(τ)^24 + 256·η(2τ)^24) / (η(τ)^16·η(2τ)^8))^3
    η の前因子は分子・分母で打ち消しあう

    Returns:
        mpc: j(τ)
    """
    tau = upper_half_plane(tau, ctx)
    e1 = eta(tau, ctx)
    e2 = eta(2 * tau, ctx)
    e1_8 = e1 ** 8
    e2_8 = e2 ** 8
    value = ((e1_8 ** 3 + 256 * e2_8 ** 3) / (e1_8 ** 2 * e2_8)) ** 3
    return ensure_finite(value, "j")


def _siegel_reduced(r, tau, ctx):
    """
    r ∈ [0,1)² のときの q 積

    g_r = -q^{B2(r1)/2}·e^{πi r2 (r1 - 1)}·(1 - q_z)·∏(1 - qⁿq_z)(1 - qⁿ/q_z)、z = r1·τ + r2

    各因子の絶対誤差は 項数·2^(-working_bits) 程度。
    その 2 倍以下の因子が現れたら値を 0 と区別できないので NonFiniteValue を送出する
    """
    mp = ctx.mp
    q = nome(tau, ctx)
    r1 = to_mpf(mp, r.r1)
    z = r1 * tau + to_mpf(mp, r.r2)
    qz = mp.expjpi(2 * z)
    qz_inv = 1 / qz

    value = -mp.expjpi(tau * to_mpf(mp, bernoulli2(r.r1)))
    value *= mp.expjpi(to_mpf(mp, r.r2 * (r.r1 - 1)))
    # 最も遅く減衰する項は |q|^{n - r1}
    terms = ctx.terms_for(abs(q), offset=r.r1, extra_bits=1)
    bound = 2 * (2 * terms + 1) * mp.ldexp(mp.mpf(1), -ctx.working_bits)

    first = 1 - qz
    smallest = abs(first)
    value *= first
    qn = mp.mpc(1)
    for _ in range(terms):
        qn *= q
        left = 1 - qn * qz
        right = 1 - qn * qz_inv
        smallest = min(smallest, abs(left), abs(right))
        value *= left * right
    if smallest <= bound:
        raise NonFiniteValue(f"g_{r} の因子が誤差限界 {mp.nstr(bound, 5)} を下回りました（精度不足）")
    return value


def siegel(r, tau, ctx):
    """
    Siegel 関数 g_r(τ)

    添字を平行移動で [0,1)² に移してから q 積で評価し、平行移動の位相を掛け戻す

    Args:
        r: SiegelIndex または (r1, r2)
        tau: 上半平面の点
        ctx (EvalContext): 評価コンテキスト

    Returns:
        mpc: g_r(τ)

    Raises:
        IntegerIndex: r ∈ Z² の場合
    """
    if not isinstance(r, SiegelIndex):
        r = SiegelIndex(*r)
    tau = upper_half_plane(tau, ctx)
    base, phase = reduce_translation(r)
    value = _siegel_reduced(base, tau, ctx)
    if phase:
        value *= ctx.mp.expjpi(2 * to_mpf(ctx.mp, phase))
    return ensure_finite(value, f"g_{r}", nonzero=True)


def eta_ratio(m, tau, ctx):
    """√m·η(mτ)/η(τ)"""
    tau = upper_half_plane(tau, ctx)
    return ctx.mp.sqrt(m) * eta(m * tau, ctx) / eta(tau, ctx)


def delta_ratio(m, tau, ctx):
    """m^12·Δ(mτ)/Δ(τ)"""
    tau = upper_half_plane(tau, ctx)
    return ctx.mp.mpf(m) ** 12 * delta(m * tau, ctx) / delta(tau, ctx)


def phi_ratio(m, tau, ctx):
    """
    φ の比

    m 奇数: √m·φ(mτ)/φ(τ)、m 偶数: 2√m·φ(mτ)/φ(τ)
    """
    tau = upper_half_plane(tau, ctx)
    scale = ctx.mp.sqrt(m) * (2 if m % 2 == 0 else 1)
    return scale * phi(m * tau, ctx) / phi(tau, ctx)
