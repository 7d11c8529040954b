"""
例外クラスの定義
CLI は exit_code 属性だけを見て終了コードを決める
"""
from config import EXIT_IDENTITY, EXIT_PRECISION, EXIT_USAGE


class ModularUnitError(Exception):
    """全例外の基底クラス"""

    exit_code = 1
    retryable = False


# --- 入力・前提条件のエラー（終了コード 2） ---

class UsageError(ModularUnitError):
    exit_code = EXIT_USAGE


class PointSyntaxError(UsageError):
    pass


class EvenOrSmallM(UsageError):
    pass


class NotFundamentalDiscriminant(UsageError):
    pass


class NotPrime(UsageError):
    pass


class IntegerIndex(UsageError):
    pass


class NotUnimodular(UsageError):
    pass


class NotInvertibleDeterminant(UsageError):
    pass


class NotGaloisStable(UsageError):
    pass


class ZeroConstantTerm(UsageError):
    pass


class NotQuadraticPower(UsageError):
    pass


# --- 精度・数値計算のエラー（終了コード 3） ---

class PrecisionError(ModularUnitError):
    exit_code = EXIT_PRECISION


class NonPositiveImaginaryPart(PrecisionError):
    pass


class QTooCloseToOne(PrecisionError):
    pass


class NonFiniteValue(PrecisionError):
    pass


class CoefficientNotNearInteger(PrecisionError):
    """
    係数が整数に十分近くない（精度不足か、共役の集合が誤っている）

    Args:
        index (int): 問題の係数の次数
        distance: 最も近い整数との距離（mpf）
        reason (str): "distance" / "bitsize"
    """

    retryable = True

    def __init__(self, index, distance, reason="distance"):
        self.index = index
        self.distance = distance
        self.reason = reason
        super().__init__(f"係数 X^{index} が整数に近くありません（{reason}: {distance}）")


class ImaginaryResidue(PrecisionError):
    retryable = True

    def __init__(self, index, imag):
        self.index = index
        self.imag = imag
        super().__init__(f"係数 X^{index} に無視できない虚部があります: {imag}")


class CertificationFailure(PrecisionError):
    pass


# --- 恒等式チェックのエラー（終了コード 4） ---

class IdentityViolation(ModularUnitError):
    exit_code = EXIT_IDENTITY

    def __init__(self, failures):
        self.failures = list(failures)
        names = ", ".join(f"{f['identity']} @ tau={f['tau']}" for f in self.failures[:5])
        super().__init__(f"恒等式が成立しません: {names}")
