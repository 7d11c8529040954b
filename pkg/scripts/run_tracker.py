"""
実行記録モジュール
各フェーズの所要時間・試行した精度・評価回数を集計してログ用サマリーを作る
"""
import time
from contextlib import contextmanager
from datetime import datetime


class RunTracker:
    """各フェーズの実行時間と精度リトライを追跡するクラス"""

    def __init__(self, run_name):
        """
        Args:
            run_name: 実行名（例: "certify d=-4 m=3"）
        """
        self.run_name = run_name
        self.timestamp = datetime.now()

        # フェーズ名 → 秒（実行順を保持）
        self.phase_seconds = {}

        # 試行した prec_bits（順番どおり）
        self.attempts = []

        self.evaluations = 0
        self.conjugate_count = 0

    @contextmanager
    def phase(self, name):
        """
        フェーズの所要時間を計測するコンテキストマネージャ

        Args:
            name: フェーズ名
        """
        start = time.perf_counter()
        try:
            yield
        finally:
            elapsed = time.perf_counter() - start
            self.phase_seconds[name] = self.phase_seconds.get(name, 0.0) + elapsed

    def add_attempt(self, prec_bits):
        self.attempts.append(prec_bits)

    def add_evaluations(self, count=1):
        self.evaluations += count

    def set_conjugate_count(self, count):
        self.conjugate_count = count

    def get_total_seconds(self):
        """総実行時間（秒）を取得"""
        return sum(self.phase_seconds.values())

    def get_summary(self):
        """
        機械可読なサマリー

        Returns:
            dict: 決定的な項目のみ（時間は含めない）
        """
        return {
            "attempts": list(self.attempts),
            "final_prec_bits": self.attempts[-1] if self.attempts else None,
            "evaluations": self.evaluations,
            "conjugates": self.conjugate_count,
        }

    def get_detailed_summary(self):
        """
        詳細サマリー（ログ出力用）

        Returns:
            str: 詳細サマリーテキスト
        """
        phase_lines = "\n".join(
            f"  - {name}: {seconds:.2f}秒" for name, seconds in self.phase_seconds.items()
        ) or "  - （記録なし）"
        attempts = " → ".join(str(bits) for bits in self.attempts) or "-"

        return f"""
{'='*60}
{self.run_name} - 実行サマリー ({self.timestamp.strftime('%Y-%m-%d %H:%M:%S')})
{'='*60}

フェーズ別時間:
{phase_lines}

精度の試行: {attempts} bit
共役の個数: {self.conjugate_count}
Siegel 積の評価回数: {self.evaluations}

{'-'*60}
総実行時間: {self.get_total_seconds():.2f}秒
{'='*60}
"""
