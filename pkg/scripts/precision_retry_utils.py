"""
精度不足による失敗を、精度を倍にして自動リトライするユーティリティ
"""
from typing import Any, Callable, Optional

from config import MAX_PRECISION_RETRIES
from errors import ModularUnitError


def call_with_precision_retry(
    computation: Callable,
    ctx,
    max_retries: int = MAX_PRECISION_RETRIES,
    logger: Optional[Any] = None,
    operation_name: str = "計算",
    on_attempt: Optional[Callable] = None,
) -> Any:
    """
    計算を実行し、リトライ可能な精度エラーなら prec_bits を倍にして再実行する

    Args:
        computation: EvalContext を1つ受け取る関数
        ctx: 最初の EvalContext
        max_retries: 最大リトライ回数（256 → 512 → 1024 なら 2）
        logger: ロガーインスタンス（オプション）
        operation_name: 操作名（ログ用）
        on_attempt: 各試行の直前に EvalContext を渡して呼ぶコールバック（オプション）

    Returns:
        (結果, 最後に使った EvalContext)

    Raises:
        ModularUnitError: リトライ不可能なエラー、または最大リトライ回数を超えた場合

    Example:
        >>> poly, used = call_with_precision_retry(
        ...     lambda c: build_polynomial(conjugates(p, field, c), c),
        ...     EvalContext(prec_bits=256),
        ...     logger=logger,
        ... )
    """
    current = ctx
    for retry in range(max_retries + 1):
        if on_attempt:
            on_attempt(current)
        try:
            result = computation(current)

            if retry > 0 and logger:
                logger.log(f"✅ {operation_name}が成功しました（{current.prec_bits} bit、リトライ {retry}回目）")

            return result, current

        except ModularUnitError as e:
            if not is_retryable_error(e):
                raise

            if retry < max_retries:
                if logger:
                    logger.log(f"⚠️ {operation_name}で精度不足: {e}")
                    logger.log(
                        f"🔄 {current.prec_bits} → {2 * current.prec_bits} bit でリトライします"
                        f"（{retry + 1}/{max_retries}回目）"
                    )
                current = current.doubled()
            else:
                if logger:
                    logger.log(f"🚨 {operation_name}が{max_retries}回のリトライ後も失敗しました")
                    logger.log(f"最終エラー: {e}")
                raise


def is_retryable_error(error: Exception) -> bool:
    """
    精度を上げれば解消しうるエラーかどうかを判定

    Args:
        error: 発生した例外

    Returns:
        bool: リトライ可能な場合True
    """
    return bool(getattr(error, "retryable", False))
