"""
虚二次体と Shimura 相互律による共役の列挙

- 基本判別式 d_K から体 K と生成元 θ_K を作る
- Kronecker 記号・類数・素イデアルの個数
- W_{K,N} / (核) の剰余類代表と、Galois 安定な積の共役の並列評価
"""
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Tuple

from sympy import factorint, isprime, jacobi_symbol

from config import MAX_WORKERS
from errors import (
    NotFundamentalDiscriminant, NotGaloisStable, NotInvertibleDeterminant, NotPrime, UsageError
)
from numerics import QuadraticPoint, to_complex
from siegel_algebra import Mat2, act_gl2_on_power, eval_product, galois_stable_power


def _squarefree(n):
    return all(e == 1 for e in factorint(abs(n)).values())


def is_fundamental_discriminant(d):
    """負の基本判別式かどうか"""
    if d >= 0:
        return False
    if d % 4 == 1:
        return _squarefree(d)
    if d % 4 == 0:
        return (d // 4) % 4 in (2, 3) and _squarefree(d // 4)
    return False


@dataclass(frozen=True)
class QuadField:
    """
    虚二次体 K = Q(√d_K)

    θ_K は X² + B·X + C の根で、O_K = Z[θ_K]
    """

    d_K: int
    B: int
    C: int

    @property
    def theta(self):
        if self.d_K % 4 == 0:
            return QuadraticPoint(self.d_K, 0, 1, 2)
        return QuadraticPoint(self.d_K, -1, 1, 2)

    @property
    def name(self):
        return f"Q(sqrt({self.d_K}))"

    def to_json(self):
        return {"disc": self.d_K, "B": self.B, "C": self.C, "theta": str(self.theta)}


def make_field(d_K):
    """
    基本判別式から体を作る

    d_K ≡ 0 mod 4: θ = √d_K/2、最小多項式 X² - d_K/4
    d_K ≡ 1 mod 4: θ = (-1 + √d_K)/2、最小多項式 X² + X + (1 - d_K)/4

    Raises:
        NotFundamentalDiscriminant: 負の基本判別式でない場合
    """
    if not is_fundamental_discriminant(d_K):
        raise NotFundamentalDiscriminant(f"負の基本判別式ではありません: {d_K}")
    if d_K % 4 == 0:
        return QuadField(d_K, 0, -d_K // 4)
    return QuadField(d_K, 1, (1 - d_K) // 4)


def kronecker(d, n):
    """
    Kronecker 記号 (d|n)（n > 0）

    n の2の部分は (d|2) = 0（d 偶数）、1（d ≡ ±1 mod 8）、-1（d ≡ ±3 mod 8）で扱う
    """
    if n <= 0:
        raise UsageError(f"n は正の整数: {n}")
    result = 1
    while n % 2 == 0:
        n //= 2
        if d % 2 == 0:
            return 0
        if d % 8 in (3, 5):
            result = -result
    if n > 1:
        result *= jacobi_symbol(d % n, n)
    return result


def splits(p, field):
    """
    素数 p が K で分解するか

    Raises:
        NotPrime: p が素数でない場合
    """
    if not isprime(p):
        raise NotPrime(f"素数ではありません: {p}")
    return kronecker(field.d_K, p) == 1


def prime_ideal_count(n, field):
    """n を割る O_K の素イデアルの個数（分解する素数は2、それ以外は1と数える）"""
    if n < 1:
        raise UsageError(f"n は正の整数: {n}")
    return sum(2 if splits(p, field) else 1 for p in factorint(n))


def class_number(d):
    """
    類数 h(d)（簡約2次形式 (a, b, c) を数える）

    |b| <= a <= c、|b| = a または a = c なら b >= 0、gcd(a, b, c) = 1
    """
    if d >= 0 or d % 4 not in (0, 1):
        raise UsageError(f"負の判別式が必要です: {d}")
    h = 0
    a = 1
    while 3 * a * a <= -d:
        for b in range(-a + 1, a + 1):
            if (b * b - d) % (4 * a):
                continue
            c = (b * b - d) // (4 * a)
            if c < a or (b < 0 and a == c):
                continue
            if math.gcd(math.gcd(a, b), c) != 1:
                continue
            h += 1
        a += 1
    return h


def unit_theorem_report(m, field):
    """
    φ の比が単数になる条件の内訳

    Returns:
        dict: {"m_odd": bool, "primes": {p: "split"/"inert"/"ramified"}, "holds": bool}
    """
    statuses = {}
    for p in factorint(m):
        k = kronecker(field.d_K, p)
        statuses[str(p)] = {1: "split", -1: "inert", 0: "ramified"}[k]
    m_odd = m >= 3 and m % 2 == 1
    holds = m_odd and all(s == "split" for s in statuses.values())
    return {"m_odd": m_odd, "primes": statuses, "holds": holds}


def unit_theorem_hypothesis(m, field) -> bool:
    """φ の比が単数になる条件: m は3以上の奇数で、m の素因数がすべて K で分解する"""
    return unit_theorem_report(m, field)["holds"]


def eta_unit_report(m, field):
    """η の比が m を割る単数的な形になる条件（m の素因数がすべて K で分解する）の内訳"""
    report = unit_theorem_report(m, field)
    report["holds"] = m >= 2 and all(s == "split" for s in report["primes"].values())
    return report


def eta_unit_hypothesis(m, field) -> bool:
    return eta_unit_report(m, field)["holds"]


def ramachandra_report(n, field):
    """g_{(0,1/N)}^{12N}(θ_K) が単数になる条件: N を割る素イデアルが2個以上"""
    count = prime_ideal_count(n, field)
    return {"prime_ideals": count, "holds": count >= 2}


def ramachandra_hypothesis(n, field) -> bool:
    return ramachandra_report(n, field)["holds"]


def kernel_matrices(field):
    """
    θ_K の固定群に対応する W_{K,N} の核

    Q(i) では ±I, ±S、Q(√-3) では6つ、それ以外は ±I
    """
    base = [Mat2.identity(), -Mat2.identity()]
    if field.d_K == -4:
        return base + [Mat2.S(), -Mat2.S()]
    if field.d_K == -3:
        u = Mat2(-1, -1, 1, 0)
        v = Mat2(0, -1, 1, 1)
        return base + [u, -u, v, -v]
    return base


@dataclass(frozen=True)
class ReciprocityGroup:
    """W_{K,N} とその核による剰余類の代表元"""

    field: QuadField
    n: int
    order: int
    cosets: Tuple[Mat2, ...]

    def element(self, t, s):
        return _element(self.field, t, s).mod(self.n)

    def coset_of(self, alpha):
        """α の属する剰余類の代表元"""
        alpha = alpha.mod(self.n)
        orbit = {_ts((alpha @ k).mod(self.n)) for k in kernel_matrices(self.field)}
        return self.element(*min(orbit))


def _element(field, t, s):
    return Mat2(t - field.B * s, -field.C * s, s, t)


def _ts(mat):
    """W_{K,N} の元 [[t - Bs, -Cs], [s, t]] から (t, s) を取り出す"""
    return (mat.d, mat.c)


def enumerate_reciprocity(field, n):
    """
    W_{K,N} を核で割った剰余類の代表元を列挙する

    元は (t, s) ∈ (Z/NZ)² で det = t² - Bts + Cs² が可逆なもの。
    代表元は各剰余類で (t, s) が辞書式最小のもの、並びも (t, s) の昇順

    Args:
        field (QuadField): 体
        n (int): 導手 N（2以上）

    Returns:
        ReciprocityGroup: 剰余類の代表元
    """
    if n < 2:
        raise UsageError(f"N は 2 以上が必要です: {n}")
    kernel = [k.mod(n) for k in kernel_matrices(field)]
    seen = set()
    reps = []
    order = 0
    for t in range(n):
        for s in range(n):
            alpha = _element(field, t, s).mod(n)
            if math.gcd(alpha.det() % n, n) != 1:
                continue
            order += 1
            if (t, s) in seen:
                continue
            seen |= {_ts((alpha @ k).mod(n)) for k in kernel}
            reps.append(alpha)
    return ReciprocityGroup(field, n, order, tuple(reps))


def coset_of(field, n, alpha):
    """
    α ∈ W_{K,N} の属する剰余類の代表元

    Raises:
        NotInvertibleDeterminant: det α が N と互いに素でない場合
    """
    if math.gcd(alpha.det() % n, n) != 1:
        raise NotInvertibleDeterminant(f"det が mod {n} で可逆ではありません: {alpha}")
    if alpha.mod(n) != _element(field, alpha.d, alpha.c).mod(n):
        raise UsageError(f"W_{{K,{n}}} の元ではありません: {alpha}")
    return ReciprocityGroup(field, n, 0, ()).coset_of(alpha)


def conjugate_products(product, field):
    """
    Galois 安定な積の共役（形式積）を剰余類ごとに求める

    Returns:
        list: (代表元 α, 作用後の積) の列（剰余類の順）

    Raises:
        NotGaloisStable: 積が Galois 安定でない場合
    """
    if galois_stable_power(product) != 1:
        raise NotGaloisStable(f"Galois 安定ではありません: {product}")
    group = enumerate_reciprocity(field, max(2, product.level))
    return [(alpha, act_gl2_on_power(product, alpha)) for alpha in group.cosets]


def conjugates(product, field, ctx, max_workers=MAX_WORKERS, logger=None):
    """
    x = product(θ_K) の K 上の共役を数値で求める

    各剰余類 α について (product∘α)(θ_K) を評価する。評価は独立なので
    スレッドで並列化するが、結果の並びは剰余類の順に固定する

    Args:
        product (SiegelProduct): Galois 安定な積
        field (QuadField): 体
        ctx (EvalContext): 評価コンテキスト
        max_workers (int): 並列数
        logger: ロガーインスタンス（オプション）

    Returns:
        list: 共役の値（mpc）
    """
    pairs = conjugate_products(product, field)
    theta = to_complex(field.theta, ctx)

    if logger:
        logger.log(f"🔢 共役を評価します: {len(pairs)}個（{ctx.prec_bits} bit、並列数 {max_workers}）")

    def evaluate(pair):
        return eval_product(pair[1], theta, ctx)

    if max_workers <= 1 or len(pairs) == 1:
        return [evaluate(pair) for pair in pairs]
    with ThreadPoolExecutor(max_workers=max_workers) as executor:
        return list(executor.map(evaluate, pairs))
