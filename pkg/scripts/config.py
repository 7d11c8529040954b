"""
プロジェクト全体の設定を一元管理するモジュール
精度・並列数・乱数シードなどの既定値をここに集約し、.env / 環境変数で上書きできるようにする
"""
import os

from dotenv import load_dotenv

# .envファイルから環境変数を読み込む
load_dotenv()


def _env_int(name, default, minimum=None):
    """
    環境変数を整数として読み込む（不正値は起動時にエラー）

    Args:
        name (str): 環境変数名
        default (int): 未設定時の既定値
        minimum (int): 許容する最小値（オプション）

    Returns:
        int: 設定値
    """
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = int(raw.strip())
    except ValueError:
        raise ValueError(f"環境変数 {name} は整数で指定してください: {raw!r}")
    if minimum is not None and value < minimum:
        raise ValueError(f"環境変数 {name} は {minimum} 以上で指定してください: {value}")
    return value


# --- 環境判定 ---
IS_CLOUD_RUN = os.getenv("K_SERVICE") is not None  # コンテナ実行かどうか

# --- ディレクトリ構成 ---
BASE_DIR = os.path.dirname(os.path.abspath(__file__))
PROJECT_ROOT = os.path.dirname(BASE_DIR)

# ログディレクトリ（コンテナでは/tmpを使用）
if IS_CLOUD_RUN:
    LOGS_DIR = "/tmp/logs"
else:
    LOGS_DIR = os.path.join(BASE_DIR, "logs")

OUTPUT_DIR = os.path.join(PROJECT_ROOT, "output")

# --- 精度設定 ---
# m=3 の係数（約 127bit）をガード付きで丸めるには 190bit 程度必要
DEFAULT_PREC_BITS = _env_int("MODUNIT_PREC_BITS", 256, minimum=64)
DEFAULT_GUARD_BITS = _env_int("MODUNIT_GUARD_BITS", 32, minimum=1)
MIN_PREC_BITS = 64

# 残差の許容幅: 2^(-prec + RESIDUAL_SLACK_BITS)
RESIDUAL_SLACK_BITS = 16

# --- 精度リトライ設定 ---
MAX_PRECISION_RETRIES = _env_int("MODUNIT_MAX_RETRIES", 2, minimum=0)

# --- 並列処理設定 ---
MAX_WORKERS = _env_int("MODUNIT_MAX_WORKERS", 4, minimum=1)  # 共役計算のワーカー数

# --- 恒等式チェック設定 ---
IDENTITY_SAMPLES = _env_int("MODUNIT_IDENTITY_SAMPLES", 20, minimum=1)
IDENTITY_SEED = _env_int("MODUNIT_IDENTITY_SEED", 20100654, minimum=0)
IDENTITY_IM_RANGE = (0.5, 3.0)
IDENTITY_RE_RANGE = (-0.5, 0.5)
IDENTITY_PREC_BITS = 192

# --- 出力設定 ---
OUTPUT_FORMATS = ("json", "text")
DEFAULT_OUTPUT_FORMAT = "json"

# --- ログ設定 ---
LOG_PREFIX_ERROR = "ERROR_"
LOG_SUFFIX_EVAL = "_eval.txt"
LOG_SUFFIX_IDENTITY = "_identity_check.txt"
LOG_SUFFIX_CONJUGATES = "_conjugates.txt"
LOG_SUFFIX_CERTIFY = "_certify.txt"

# --- コマンド別の終了コード ---
EXIT_OK = 0
EXIT_USAGE = 2
EXIT_PRECISION = 3
EXIT_IDENTITY = 4
