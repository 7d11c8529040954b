"""
数値の共役から整数係数多項式を復元し、代数的性質を厳密に判定する

- 共役の積展開 → 係数の丸め（距離・ビット長・残差の3段階で検査）
- 代数的整数・n を割る・単数 の判定（すべて整数演算）
- 2次体の元の冪根の検出と、(a + b√d)^{1/k} の形への簡約
"""
import math
from dataclasses import dataclass
from typing import Optional, Tuple

from sympy import divisors, factorint, integer_nthroot

from errors import (
    CoefficientNotNearInteger, ImaginaryResidue, NotQuadraticPower, UsageError, ZeroConstantTerm
)
from numerics import format_complex, mp_context

# 判別式の試し割りの上限
SMALL_FACTOR_LIMIT = 2 ** 16

# 冪根として取り出す冪の上限（取り出す冪はこの約数に限る）
RADICAL_MAX_EXPONENT = 12


@dataclass(frozen=True)
class IntPolynomial:
    """整数係数多項式（係数は昇順: coefficients[i] が X^i の係数）"""

    coefficients: Tuple[int, ...]

    def __post_init__(self):
        coeffs = list(self.coefficients)
        for c in coeffs:
            if isinstance(c, bool) or not isinstance(c, int):
                if getattr(c, "denominator", None) == 1:
                    continue
                raise UsageError(f"係数は整数で指定してください: {c!r}")
        coeffs = [int(c) for c in coeffs]
        while len(coeffs) > 1 and coeffs[-1] == 0:
            coeffs.pop()
        if not coeffs:
            coeffs = [0]
        object.__setattr__(self, "coefficients", tuple(coeffs))

    @property
    def degree(self):
        return len(self.coefficients) - 1

    @property
    def leading(self):
        return self.coefficients[-1]

    @property
    def constant(self):
        return self.coefficients[0]

    @property
    def is_monic(self):
        return self.leading == 1

    def __mul__(self, other):
        out = [0] * (len(self.coefficients) + len(other.coefficients) - 1)
        for i, a in enumerate(self.coefficients):
            if a == 0:
                continue
            for j, b in enumerate(other.coefficients):
                out[i + j] += a * b
        return IntPolynomial(tuple(out))

    def __pow__(self, k):
        result = IntPolynomial((1,))
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def evaluate(self, x):
        """Horner 法で評価（x は mpc / int どちらでも）"""
        value = 0
        for c in reversed(self.coefficients):
            value = value * x + c
        return value

    def to_json(self):
        return [str(c) for c in self.coefficients]

    def __str__(self):
        terms = []
        for i in range(self.degree, -1, -1):
            c = self.coefficients[i]
            if c == 0 and self.degree > 0:
                continue
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            if i == 0:
                body = str(mag)
            else:
                power = "X" if i == 1 else f"X^{i}"
                body = power if mag == 1 else f"{mag}{power}"
            terms.append((sign, body))
        first_sign, first_body = terms[0]
        text = ("-" if first_sign == "-" else "") + first_body
        for sign, body in terms[1:]:
            text += f" {sign} {body}"
        return text


@dataclass(frozen=True)
class RadicalForm:
    """x = (a + b√d)^{1/root}"""

    a: int
    b: int
    d: int
    root: int

    def value(self, mp):
        return (mp.mpf(self.a) + self.b * mp.sqrt(self.d)) ** (mp.mpf(1) / self.root)

    def to_json(self):
        return {"a": str(self.a), "b": str(self.b), "d": self.d, "root": self.root}

    def __str__(self):
        inner = f"{self.a} + {self.b}√{self.d}" if self.b else str(self.a)
        return f"({inner})^(1/{self.root})"


@dataclass(frozen=True)
class AlgebraicCertificate:
    """x の代数的性質の証明書（x は φ の比などを power_taken 乗した値）"""

    value: object
    power_taken: int
    polynomial: IntPolynomial
    is_algebraic_integer: bool
    divides: Optional[int]
    is_unit: bool
    radical: Optional[RadicalForm]
    prec_bits: int


def expand_conjugates(conjugates, mp):
    """∏ (X - x_i) を数値で展開（昇順の複素係数）"""
    coeffs = [mp.mpc(1)]
    for x in conjugates:
        x = mp.mpc(x)
        nxt = [mp.mpc(0)] * (len(coeffs) + 1)
        for i, c in enumerate(coeffs):
            nxt[i + 1] += c
            nxt[i] -= x * c
        coeffs = nxt
    return coeffs


def has_real_coefficients(coeffs, ctx):
    """
    係数がすべて実数とみなせるか（相対誤差 2^{-guard_bits} で判定）

    共役の集合が複素共役で閉じていなければ、虚部は丸め誤差よりはるかに大きい
    """
    mp = ctx.mp
    loose = mp.ldexp(mp.mpf(1), -ctx.guard_bits)
    return all(abs(c.imag) <= loose * max(1, abs(c)) for c in coeffs)


def build_polynomial(conjugates, ctx):
    """
    共役 x_1..x_d から ∏ (X - x_i) を整数係数に丸める

    各係数について、虚部と最も近い整数との距離が 2^{-2·guard_bits} 以下で、
    ビット長が prec_bits - 2·guard_bits 以下であることを要求する。
    最後に丸めた多項式の各共役での残差を確認する

    Args:
        conjugates: 共役の値（mpc）の列
        ctx (EvalContext): 評価コンテキスト

    Returns:
        IntPolynomial: 最小多項式

    Raises:
        ImaginaryResidue: 虚部が許容値を超えた場合
        CoefficientNotNearInteger: 整数に近くない、またはビット長が大きすぎる場合
    """
    mp = ctx.mp
    coeffs = expand_conjugates(conjugates, mp)
    tol = mp.ldexp(mp.mpf(1), -2 * ctx.guard_bits)
    max_bits = ctx.prec_bits - 2 * ctx.guard_bits

    rounded = []
    for i, c in enumerate(coeffs):
        if abs(c.imag) > tol:
            raise ImaginaryResidue(i, mp.nstr(c.imag, 10))
        n = int(mp.nint(c.real))
        if n.bit_length() > max_bits:
            raise CoefficientNotNearInteger(i, n.bit_length(), "bitsize")
        distance = abs(c.real - n)
        if distance > tol:
            raise CoefficientNotNearInteger(i, mp.nstr(distance, 10), "distance")
        rounded.append(n)

    poly = IntPolynomial(tuple(rounded))

    # 丸めた多項式が本当に共役を根に持つか
    bound = ctx.tolerance()
    for x in conjugates:
        x = mp.mpc(x)
        scale = sum(abs(c) * abs(x) ** i for i, c in enumerate(poly.coefficients))
        residual = abs(poly.evaluate(x))
        if residual > bound * scale:
            raise CoefficientNotNearInteger(-1, mp.nstr(residual / scale, 10), "residual")
    return poly


def certify_algebraic_integer(poly):
    """整数係数かつモニックなら根は代数的整数"""
    return poly.is_monic


def certify_divides(poly, n):
    """
    根 x が O_K で n を割るか（n/x が代数的整数か）

    n/x の多項式 Y^d·P(n/Y) = Σ a_i·nⁱ·Y^{d-i} の先頭係数は a_0 なので、
    すべての i で a_0 | a_i·nⁱ なら n/x は代数的整数

    Raises:
        ZeroConstantTerm: a_0 = 0 の場合
    """
    a0 = poly.constant
    if a0 == 0:
        raise ZeroConstantTerm(f"定数項が 0 の多項式です: {poly}")
    if not poly.is_monic:
        return False
    return all((a * n ** i) % a0 == 0 for i, a in enumerate(poly.coefficients))


def certify_unit(poly):
    """モニックで |a_0| = 1 なら単数"""
    if poly.constant == 0:
        raise ZeroConstantTerm(f"定数項が 0 の多項式です: {poly}")
    return poly.is_monic and abs(poly.constant) == 1


def quad_power(a, b, d, e):
    """Z[√d] で (a + b√d)^e を厳密に計算"""
    ra, rb = 1, 0
    ba, bb = a, b
    while e:
        if e & 1:
            ra, rb = ra * ba + d * rb * bb, ra * bb + rb * ba
        ba, bb = ba * ba + d * bb * bb, 2 * ba * bb
        e >>= 1
    return ra, rb


def pth_power_in_quadratic(a, b, d, e):
    """
    a + b√d が Z[√d] の元の e 乗かどうかを判定する

    y = (a + b√d)^{1/e} と y' = (a - b√d)^{1/e} を数値で求め、
    a' = (y + y')/2、b' = (y - y')/(2√d) を丸めてから厳密に展開して確かめる

    Args:
        a, b (int): 元の係数
        d (int): 平方因子を持たない正の整数
        e (int): 冪（2以上）

    Returns:
        (int, int) または None: (a', b')
    """
    if e < 2:
        raise UsageError(f"冪は 2 以上: {e}")
    if d <= 0:
        raise UsageError(f"d は正の整数: {d}")
    bits = max(abs(a).bit_length(), abs(b).bit_length() + d.bit_length(), 1) + 64
    mp = mp_context(bits)
    sd = mp.sqrt(d)
    value = a + b * sd
    if value <= 0:
        return None

    # 共役は桁落ちしやすいのでノルムから求める
    norm = a * a - d * b * b
    conj = mp.mpf(norm) / value
    y = mp.root(value, e)
    if conj == 0:
        candidates = [mp.mpf(0)]
    else:
        c = mp.root(abs(conj), e)
        if conj > 0:
            candidates = [c, -c] if e % 2 == 0 else [c]
        elif e % 2 == 1:
            candidates = [-c]
        else:
            return None

    for yc in candidates:
        a1 = int(mp.nint((y + yc) / 2))
        b1 = int(mp.nint((y - yc) / (2 * sd)))
        if quad_power(a1, b1, d, e) == (a, b):
            return a1, b1
    return None


def _squarefree_decomposition(n):
    """
    n = f²·d（d は平方因子なし）となる (f, d)

    判別式は数十桁になるので完全には素因数分解しない。
    小さい素因数を除いた残りは、平方数ならそのまま f に入れ、そうでなければ平方因子なしとみなす
    （誤った d は pth_power_in_quadratic の厳密な検算で弾かれる）
    """
    f, d = 1, 1
    for p, k in factorint(n, limit=SMALL_FACTOR_LIMIT).items():
        root, exact = integer_nthroot(p, 2)
        if exact:
            f *= root ** k
            continue
        f *= p ** (k // 2)
        if k % 2:
            d *= p
    return f, d


def _power_pattern(poly):
    """
    P = (X - c)^n または (X² - uX + v)^k の形かどうかを判定

    Returns:
        ("linear", c, n) または ("quadratic", u, v, k)

    Raises:
        NotQuadraticPower: どちらでもない場合
    """
    n = poly.degree
    if not poly.is_monic or n < 1:
        raise NotQuadraticPower(f"モニックな多項式ではありません: {poly}")
    coeffs = poly.coefficients
    if coeffs[n - 1] % n == 0:
        c = -coeffs[n - 1] // n
        if IntPolynomial((-c, 1)) ** n == poly:
            return ("linear", c, n)
    if n % 2 == 0:
        k = n // 2
        if coeffs[n - 1] % k == 0:
            u = -coeffs[n - 1] // k
            rest = coeffs[n - 2] - (k * (k - 1) // 2) * u * u if n >= 2 else 0
            if rest % k == 0:
                v = rest // k
                if IntPolynomial((v, -u, 1)) ** k == poly:
                    return ("quadratic", u, v, k)
    raise NotQuadraticPower(f"1次式・2次式の冪ではありません: {poly}")


def _exponents(total_root, max_exponent):
    """試す冪 e（大きい順）: total_root の約数、max_exponent 指定時はその約数に限る"""
    bound = math.gcd(total_root, max_exponent) if max_exponent else total_root
    return sorted(divisors(bound), reverse=True)


def _rational_root_form(c, d, total_root, max_exponent):
    """正の整数 c について、c^{1/total_root} を冪根で簡約"""
    for e in _exponents(total_root, max_exponent):
        root, exact = integer_nthroot(c, e)
        if exact:
            return RadicalForm(root, 0, d, total_root // e)
    return RadicalForm(c, 0, d, total_root)


def simplify_radical(x_value, x_poly, total_root, d=None, max_exponent=RADICAL_MAX_EXPONENT):
    """
    x = (元の値)^{total_root} の多項式から、元の値を (a + b√d)^{1/k} の形で表す

    x の多項式が2次式 X² - uX + v の冪なら x = (u ± f√d)/2。
    冪 e を大きい順に試し、x が Z[√d] の e 乗ならその e 乗根を取る。
    e は既定で 12 の約数に限る（m=5 なら (682 + 305√5)^{1/10}）。
    max_exponent=None なら total_root の約数すべてを試す（m=5 なら (2 + √5)^{1/2}）

    Args:
        x_value: x の数値（符号の選択に使う）
        x_poly (IntPolynomial): x の最小多項式（またはその冪）
        total_root (int): 元の値から x を作るときの冪
        d (int): 期待する √d（指定すれば一致しないとき None）
        max_exponent (int): 取り出す冪 e を割り切る数（None なら制限なし）

    Returns:
        RadicalForm または None（x が実数でない、半整数係数になる等）

    Raises:
        NotQuadraticPower: 多項式が1次・2次式の冪でない場合
    """
    pattern = _power_pattern(x_poly)
    mp = mp_context(max(64, max(abs(c) for c in x_poly.coefficients).bit_length() + 64))
    x_value = mp.mpc(x_value)
    if x_value.real <= 0:
        return None

    if pattern[0] == "linear":
        c = pattern[1]
        if c <= 0:
            return None
        return _rational_root_form(c, d or 1, total_root, max_exponent)

    _, u, v, _ = pattern
    disc = u * u - 4 * v
    if disc <= 0:
        return None
    f, d_found = _squarefree_decomposition(disc)
    if d is not None and d_found not in (d, 1):
        return None

    # 数値に近い方の根を選ぶ
    sd = mp.sqrt(d_found)
    sign = 1 if abs((u + f * sd) / 2 - x_value.real) <= abs((u - f * sd) / 2 - x_value.real) else -1

    if d_found == 1:
        return _rational_root_form((u + sign * f) // 2, d or 1, total_root, max_exponent)
    if u % 2 or f % 2:
        return None
    a, b = u // 2, sign * f // 2

    for e in _exponents(total_root, max_exponent):
        if e == 1:
            break
        found = pth_power_in_quadratic(a, b, d_found, e)
        if found:
            return RadicalForm(found[0], found[1], d_found, total_root // e)
    return RadicalForm(a, b, d_found, total_root)


def express_radical(form, root_index):
    """
    (a + b√d)^{1/k} を (a' + b'√d)^{1/root_index} に書き直す（root_index は k の倍数）

    Raises:
        UsageError: root_index が k の倍数でない場合
    """
    if root_index % form.root:
        raise UsageError(f"{root_index} は {form.root} の倍数ではありません")
    a, b = quad_power(form.a, form.b, form.d, root_index // form.root)
    return RadicalForm(a, b, form.d, root_index)


def certificate_to_dict(cert, ctx):
    """
    証明書を JSON 用の辞書に変換（キー・書式は固定）

    Returns:
        dict: value / power_taken / minpoly / is_algebraic_integer / divides /
              is_unit / radical / prec_bits
    """
    return {
        "value": format_complex(cert.value, ctx),
        "power_taken": cert.power_taken,
        "minpoly": cert.polynomial.to_json(),
        "is_algebraic_integer": cert.is_algebraic_integer,
        "divides": str(cert.divides) if cert.divides is not None else None,
        "is_unit": cert.is_unit,
        "radical": cert.radical.to_json() if cert.radical else None,
        "prec_bits": cert.prec_bits,
    }


def coefficient_bits(poly):
    """係数の最大ビット長（精度見積もり用）"""
    return max(abs(c).bit_length() for c in poly.coefficients)
