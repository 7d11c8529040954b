"""
結果ファイルの書き出しを管理する共通ユーティリティ
"""
import json
import os

from config import OUTPUT_DIR


def get_output_dir(run_name):
    """
    実行ごとの出力ディレクトリパスを取得

    Args:
        run_name (str): 実行名（例: 'certify_d-4_m3'）

    Returns:
        str: 出力ディレクトリの絶対パス
    """
    return os.path.join(OUTPUT_DIR, run_name)


def ensure_output_dir(run_name):
    """
    出力ディレクトリが存在しない場合は作成

    Returns:
        str: 出力ディレクトリの絶対パス
    """
    output_dir = get_output_dir(run_name)
    os.makedirs(output_dir, exist_ok=True)
    return output_dir


def write_file_safely(file_path, content, file_description="ファイル", logger=None):
    """
    ファイルに安全に書き込む（エラーハンドリング付き）

    Args:
        file_path (str): ファイルパス
        content (str): 書き込む内容
        file_description (str): エラーメッセージ用のファイル説明
        logger: ロガーインスタンス（オプション）

    Returns:
        bool: 成功時True、失敗時False
    """
    try:
        directory = os.path.dirname(file_path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        with open(file_path, "w", encoding="utf-8") as f:
            f.write(content)
        return True
    except Exception as e:
        if logger:
            logger.log(f"🚨 エラー: {file_description}の書き込みに失敗: {e}")
        return False


def dump_json(data):
    """決定的な JSON 文字列（キー順固定・末尾改行あり）"""
    return json.dumps(data, ensure_ascii=False, indent=2, sort_keys=True) + "\n"


def write_json_safely(file_path, data, file_description="結果JSON", logger=None):
    """
    JSON を安全に書き込む

    Returns:
        bool: 成功時True、失敗時False
    """
    return write_file_safely(file_path, dump_json(data), file_description, logger)
