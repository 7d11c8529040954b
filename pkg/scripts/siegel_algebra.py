"""
Siegel 関数の添字と形式積の代数

- 添字 r ∈ Q² の正規化（平行移動と r ↦ -r）
- SL2(Z) の作用（S・T の語への分解と位相の追跡）
- Galois 安定な冪と GL2(Z/NZ) の作用
- φ・η の比を Siegel 積として表す分解

位相は「回転数」 k ∈ Q/Z（値は e^{2πik}）として Fraction で持つ
"""
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Tuple

from sympy import factorint

from errors import (
    EvenOrSmallM, IntegerIndex, NotGaloisStable, NotInvertibleDeterminant,
    NotUnimodular, UsageError
)

# S の作用で現れる 1 の12乗根 ζ12^9 の回転数
S_PHASE = Fraction(9, 12)
HALF = Fraction(1, 2)


def normalize_phase(k):
    """回転数を [0, 1) に正規化"""
    k = Fraction(k)
    return k - math.floor(k)


def _parse_rational(text):
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"有理数として読めません: {text!r}")


@dataclass(frozen=True, order=True)
class SiegelIndex:
    """Siegel 関数の添字 r = (r1, r2) ∈ Q² \\ Z²"""

    r1: Fraction
    r2: Fraction

    def __post_init__(self):
        r1, r2 = Fraction(self.r1), Fraction(self.r2)
        if r1.denominator == 1 and r2.denominator == 1:
            raise IntegerIndex(f"添字が整数点です: ({r1}, {r2})")
        object.__setattr__(self, "r1", r1)
        object.__setattr__(self, "r2", r2)

    @classmethod
    def parse(cls, text):
        """'1/2,1/2' 形式の文字列から生成"""
        parts = text.split(",")
        if len(parts) != 2:
            raise UsageError(f"添字は r1,r2 の形で指定してください: {text!r}")
        return cls(_parse_rational(parts[0]), _parse_rational(parts[1]))

    def negate(self):
        return SiegelIndex(-self.r1, -self.r2)

    def times(self, mat):
        """行ベクトルとしての右作用 r·M"""
        return SiegelIndex(self.r1 * mat.a + self.r2 * mat.c, self.r1 * mat.b + self.r2 * mat.d)

    def to_json(self):
        return [str(self.r1), str(self.r2)]

    def __str__(self):
        return f"({self.r1}, {self.r2})"


class PrimitiveDenominator(NamedTuple):
    n: int
    composite: bool  # 異なる素因数を2つ以上持つか


def primitive_denominator(r):
    """
    r を含む (1/N)Z² の最小の N

    Returns:
        PrimitiveDenominator: N と、N が2つ以上の素因数を持つかどうか
    """
    n = r.r1.denominator * r.r2.denominator // math.gcd(r.r1.denominator, r.r2.denominator)
    return PrimitiveDenominator(n, len(factorint(n)) >= 2)


def _translation_phase(base, s1, s2):
    """g_{base + s} = e(phase)·g_base の phase（s ∈ Z²）"""
    sign = Fraction(s1 * s2 + s1 + s2, 2)
    return normalize_phase(sign - Fraction(1, 2) * (s1 * base.r2 - s2 * base.r1))


def reduce_translation(r):
    """
    平行移動だけで r を [0,1)² に移す

    Returns:
        (SiegelIndex, Fraction): 代表元 r0 と g_r = e(phase)·g_{r0} の phase
    """
    s1, s2 = math.floor(r.r1), math.floor(r.r2)
    base = SiegelIndex(r.r1 - s1, r.r2 - s2)
    return base, _translation_phase(base, s1, s2)


def reduce_index(r):
    """
    r を正規形に移す（平行移動と g_{-r} = -g_r を使う）

    [0,1)² の代表元 r0 と (-r0 mod 1) のうち辞書式で小さい方を選ぶ

    Returns:
        (SiegelIndex, Fraction): 正規形と g_r = e(phase)·g_{正規形} の phase
    """
    base, phase = reduce_translation(r)
    negated, neg_phase = reduce_translation(base.negate())
    if negated < base:
        return negated, normalize_phase(phase + HALF + neg_phase)
    return base, phase


@dataclass(frozen=True)
class Mat2:
    """2x2 整数行列 [[a, b], [c, d]]"""

    a: int
    b: int
    c: int
    d: int

    @classmethod
    def identity(cls):
        return cls(1, 0, 0, 1)

    @classmethod
    def S(cls):
        return cls(0, -1, 1, 0)

    @classmethod
    def T(cls, k=1):
        return cls(1, k, 0, 1)

    def det(self):
        return self.a * self.d - self.b * self.c

    def __matmul__(self, other):
        return Mat2(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def __neg__(self):
        return Mat2(-self.a, -self.b, -self.c, -self.d)

    def mod(self, n):
        return Mat2(self.a % n, self.b % n, self.c % n, self.d % n)

    def to_json(self):
        return [[self.a, self.b], [self.c, self.d]]

    def __str__(self):
        return f"[[{self.a}, {self.b}], [{self.c}, {self.d}]]"


def sl2_word(gamma):
    """
    γ ∈ SL2(Z) を S・T^k・(-I) の語に分解する

    γ = w[0]·w[1]·…·w[-1] となる生成元の列を返す

    Args:
        gamma (Mat2): 行列式 1 の行列

    Returns:
        list: ("S", 1) / ("T", k) / ("-I", 1) のタプルの列

    Raises:
        NotUnimodular: det γ ≠ 1 の場合
    """
    if gamma.det() != 1:
        raise NotUnimodular(f"det = {gamma.det()} の行列は SL2(Z) の元ではありません: {gamma}")
    word = []
    a, b, c, d = gamma.a, gamma.b, gamma.c, gamma.d
    while c != 0:
        k = a // c
        if k:
            word.append(("T", k))
        # T^{-k}·γ
        a, b = a - k * c, b - k * d
        word.append(("S", 1))
        # S^{-1}·γ
        a, b, c, d = c, d, -a, -b
    if a == -1:
        word.append(("-I", 1))
        b = -b
    if b:
        word.append(("T", b))
    return word


def word_product(word):
    """sl2_word の逆（語を行列に戻す）"""
    result = Mat2.identity()
    for gen, k in word:
        if gen == "S":
            result = result @ Mat2.S()
        elif gen == "T":
            result = result @ Mat2.T(k)
        else:
            result = -result
    return result


def act_sl2(r, gamma):
    """
    g_r(γτ) = e(phase)·g_{r'}(τ) となる正規形 r' と phase を求める

    生成元ごとに g_r(τ+k) = ζ12^k·g_{(r1, k·r1+r2)}(τ)、
    g_r(-1/τ) = ζ12^9·g_{(r2,-r1)}(τ)、-I は g_{-r} = -g_r を使って位相を積み上げる

    Args:
        r (SiegelIndex): 添字
        gamma (Mat2): SL2(Z) の元

    Returns:
        (SiegelIndex, Fraction): 正規形の添字と回転数
    """
    r1, r2 = r.r1, r.r2
    phase = Fraction(0)
    for gen, k in sl2_word(gamma):
        if gen == "T":
            phase += Fraction(k, 12)
            r2 = k * r1 + r2
        elif gen == "S":
            phase += S_PHASE
            r1, r2 = r2, -r1
        else:
            phase += HALF
            r1, r2 = -r1, -r2
    reduced, reduce_phase = reduce_index(SiegelIndex(r1, r2))
    return reduced, normalize_phase(phase + reduce_phase)


def order_at_infinity(r):
    """
    g_r の q 展開の先頭次数 B2(r1 mod 1)/2

    Returns:
        Fraction: ord_q g_r
    """
    x = r.r1 - math.floor(r.r1)
    return (x * x - x + Fraction(1, 6)) / 2


@dataclass(frozen=True)
class SiegelProduct:
    """
    e(phase)·∏ g_{r_i}^{e_i} の形式積

    添字は平行移動だけで [0,1)² に正規化して合併する。r と -r は合併しない
    （合併形は merged() で得る）
    """

    factors: Tuple[Tuple[SiegelIndex, int], ...] = ()
    phase: Fraction = Fraction(0)

    @classmethod
    def from_factors(cls, items, phase=0, merge_negatives=False):
        """
        (添字, 指数) の列から正規化した積を作る

        Args:
            items: (SiegelIndex, int) の列
            phase: 先頭の回転数
            merge_negatives (bool): r と -r も合併するか
        """
        reducer = reduce_index if merge_negatives else reduce_translation
        total_phase = Fraction(phase)
        exponents = {}
        for r, e in items:
            if e == 0:
                continue
            base, ph = reducer(r)
            total_phase += ph * e
            exponents[base] = exponents.get(base, 0) + e
        factors = tuple(sorted((r, e) for r, e in exponents.items() if e != 0))
        return cls(factors, normalize_phase(total_phase))

    def merged(self):
        return SiegelProduct.from_factors(self.factors, self.phase, merge_negatives=True)

    @property
    def level(self):
        """添字の原始分母の最小公倍数（空積なら 1）"""
        n = 1
        for r, _ in self.factors:
            d = primitive_denominator(r).n
            n = n * d // math.gcd(n, d)
        return n

    def power(self, e):
        return SiegelProduct(
            tuple((r, exp * e) for r, exp in self.factors), normalize_phase(self.phase * e)
        )

    def __mul__(self, other):
        return SiegelProduct.from_factors(self.factors + other.factors, self.phase + other.phase)

    def total_degree(self):
        return sum(abs(e) for _, e in self.factors)

    def to_json(self):
        return product_to_json(self)

    def __str__(self):
        body = " · ".join(f"g_{r}^{e}" if e != 1 else f"g_{r}" for r, e in self.factors) or "1"
        if self.phase:
            return f"e({self.phase}) · {body}"
        return body


def galois_stable_power(product):
    """
    形式積を Galois 安定にする最小の冪 e

    各因子の指数に e を掛けたものが 12·N_r/gcd(6, N_r) で割り切れ、
    かつ位相の e 倍が整数になる最小の e を返す

    Returns:
        int: e（1 ならすでに安定）
    """
    e = 1
    for r, exp in product.factors:
        n = primitive_denominator(r).n
        need = 12 * n // math.gcd(6, n)
        step = need // math.gcd(need, abs(exp))
        e = e * step // math.gcd(e, step)
    step = product.phase.denominator
    return e * step // math.gcd(e, step)


def is_galois_stable(product):
    return galois_stable_power(product) == 1


def act_gl2_on_power(product, alpha):
    """
    Galois 安定な積に α ∈ GL2(Z/NZ) を作用させる（各添字を r·α に置き換える）

    Args:
        product (SiegelProduct): Galois 安定な積
        alpha (Mat2): 行列式が N と互いに素な整数行列

    Returns:
        SiegelProduct: 作用後の積（位相は変わらない）

    Raises:
        NotGaloisStable: 積が安定でない場合
        NotInvertibleDeterminant: det α が N で可逆でない場合
    """
    if not is_galois_stable(product):
        raise NotGaloisStable(
            f"Galois 安定ではありません（必要な冪: {galois_stable_power(product)}）: {product}"
        )
    n = product.level
    if math.gcd(alpha.det() % n, n) != 1:
        raise NotInvertibleDeterminant(f"det α = {alpha.det()} は mod {n} で可逆ではありません")
    alpha = alpha.mod(n)
    acted = SiegelProduct.from_factors(
        ((r.times(alpha), e) for r, e in product.factors), product.phase
    )
    # 安定な積では平行移動の位相はすべて消える
    assert acted.phase == product.phase, f"位相が変化しました: {product.phase} → {acted.phase}"
    return acted


def require_odd_m(m):
    if m < 3 or m % 2 == 0:
        raise EvenOrSmallM(f"m は 3 以上の奇数が必要です: {m}")


def phi_ratio_squared_product(m):
    """
    (√m·φ(mτ)/φ(τ))² の Siegel 積表示（m は奇数）

    (-1)^{(1-m)/2} ∏_{k=1}^{m-1} g_{(0,k/m)} · g_{(1/2,1/2+k/m)}²

    Raises:
        EvenOrSmallM: m が 3 未満または偶数の場合
    """
    require_odd_m(m)
    items = []
    for k in range(1, m):
        items.append((SiegelIndex(0, Fraction(k, m)), 1))
        items.append((SiegelIndex(HALF, HALF + Fraction(k, m)), 2))
    return SiegelProduct.from_factors(items, Fraction((1 - m) // 2, 2))


def eta_ratio_squared_product(m):
    """
    (√m·η(mτ)/η(τ))² = i^{-(m-1)} ∏_{k=1}^{m-1} g_{(0,k/m)}

    Raises:
        EvenOrSmallM: m < 2 の場合
    """
    if m < 2:
        raise EvenOrSmallM(f"m は 2 以上が必要です: {m}")
    items = [(SiegelIndex(0, Fraction(k, m)), 1) for k in range(1, m)]
    return SiegelProduct.from_factors(items, Fraction(-(m - 1), 4))


def half_period_ratio_product(m):
    """
    g_{(1/2,1/2)}(mτ)/g_{(1/2,1/2)}(τ) = (-1)^{(m-1)/2} ∏_{k=1}^{m-1} g_{(1/2,1/2+k/m)}

    Raises:
        EvenOrSmallM: m が 3 未満または偶数の場合
    """
    require_odd_m(m)
    items = [(SiegelIndex(HALF, HALF + Fraction(k, m)), 1) for k in range(1, m)]
    return SiegelProduct.from_factors(items, Fraction((m - 1) // 2, 2))


def ramachandra_product(n):
    """
    g_{(0,1/N)}^{12N}（すでに Galois 安定）

    Raises:
        UsageError: N < 2 の場合
    """
    if n < 2:
        raise UsageError(f"N は 2 以上が必要です: {n}")
    return SiegelProduct.from_factors([(SiegelIndex(0, Fraction(1, n)), 12 * n)])


def eval_product(product, tau, ctx):
    """
    形式積を τ で数値評価する

    Args:
        product (SiegelProduct): 形式積
        tau: 上半平面の点
        ctx (EvalContext): 評価コンテキスト

    Returns:
        mpc: e(phase)·∏ g_r(τ)^e
    """
    from numerics import ensure_finite, to_mpf
    from qseries import siegel

    mp = ctx.mp
    value = mp.expjpi(2 * to_mpf(mp, product.phase)) if product.phase else mp.mpc(1)
    for r, e in product.factors:
        value *= siegel(r, tau, ctx) ** e
    return ensure_finite(value, f"Siegel 積 {product}", nonzero=True)


def product_to_json(product):
    """
    形式積を JSON 用の辞書に変換

    Returns:
        dict: {"factors": [[r1, r2, e], ...], "phase": "k"}
    """
    return {
        "factors": [[str(r.r1), str(r.r2), e] for r, e in product.factors],
        "phase": str(product.phase),
    }


def product_from_json(data):
    """product_to_json の逆"""
    try:
        items = [
            (SiegelIndex(Fraction(r1), Fraction(r2)), int(e)) for r1, r2, e in data["factors"]
        ]
        return SiegelProduct.from_factors(items, Fraction(data.get("phase", "0")))
    except (KeyError, TypeError, ValueError) as e:
        raise UsageError(f"形式積の JSON が不正です: {e}")
