"""
ロガーユーティリティ（Windows絵文字対応版）
ログを標準エラーとメモリに出力し、エラー時のみファイルに保存
標準出力は JSON / テキストの結果専用にしておく
"""
import datetime
import os
import sys


class DualLogger:
    """
    標準エラーとメモリにログを記録し、エラー時のみファイルに保存するロガー
    Windows環境で絵文字が使えない問題に対応
    """

    # 絵文字マッピング（このプロジェクトで使うものだけ）
    EMOJI_MAP = {
        '✅': '[OK]',
        '🔄': '[Retry]',
        '⚠️': '[Warning]',
        '🚨': '[Error]',
        '📊': '[Chart]',
        '🎯': '[Target]',
        '📋': '[List]',
        '🚀': '[Rocket]',
        '⏱️': '[Timer]',
        '🔍': '[Search]',
        '🔢': '[Numbers]',
        '🧮': '[Abacus]',
        '📐': '[Ruler]',
        '📝': '[Memo]',
        '❌': '[X]',
    }

    def __init__(self, log_file_path, stream=None, quiet=False):
        """
        Args:
            log_file_path (str): エラー時に保存するログファイルのパス
            stream: 出力先（既定は sys.stderr）
            quiet (bool): True ならメモリにだけ記録する
        """
        self.log_file_path = log_file_path
        self.log_buffer = []
        self.stream = stream
        self.quiet = quiet

    @classmethod
    def remove_emojis(cls, text):
        """
        絵文字を除去してWindows互換の文字列にする

        Args:
            text (str): 元の文字列

        Returns:
            str: 絵文字を除去した文字列
        """
        result = text
        for emoji, replacement in cls.EMOJI_MAP.items():
            result = result.replace(emoji, replacement)

        # それ以外の絵文字を除去
        return ''.join(
            char for char in result
            if not (
                '\U0001F300' <= char <= '\U0001F9FF' or  # 絵文字
                '\U0001FA00' <= char <= '\U0001FAFF' or  # 拡張絵文字
                '\U00002600' <= char <= '\U000027BF' or  # 記号
                '\U0001F000' <= char <= '\U0001F2FF'     # 追加記号
            )
        )

    def log(self, message):
        """
        ログメッセージを標準エラーとメモリに記録

        Args:
            message (str): ログメッセージ
        """
        timestamp = datetime.datetime.now().strftime("%Y-%m-%d %H:%M:%S")
        formatted_message = f"[{timestamp}] {message}"

        # メモリに保存（元のメッセージ）
        self.log_buffer.append(formatted_message)

        if self.quiet:
            return

        stream = self.stream or sys.stderr
        try:
            print(formatted_message, file=stream, flush=True)
        except UnicodeEncodeError:
            safe_message = self.remove_emojis(formatted_message)
            try:
                print(safe_message, file=stream, flush=True)
            except Exception:
                # それでもダメなら ASCII のみ
                ascii_message = safe_message.encode('ascii', 'replace').decode('ascii')
                print(ascii_message, file=stream, flush=True)

    def save_on_error(self):
        """
        エラー時にログをファイルに保存（絵文字を除去して保存）

        Returns:
            bool: 保存できた場合 True
        """
        stream = self.stream or sys.stderr
        try:
            os.makedirs(os.path.dirname(self.log_file_path), exist_ok=True)

            with open(self.log_file_path, "w", encoding="utf-8") as f:
                for line in self.log_buffer:
                    f.write(self.remove_emojis(line) + "\n")

            safe_path = self.remove_emojis(self.log_file_path)
            print(f"\n[Error] ログをファイルに保存しました: {safe_path}", file=stream)
            return True
        except Exception as e:
            print(f"\n[Error] ログファイルの保存に失敗: {e}", file=stream)
            return False
