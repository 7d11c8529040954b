#!/usr/bin/env python3
"""
モジュラー単数パイプライン - メインスクリプト
虚二次点での η・φ・Siegel 関数の評価、恒等式チェック、共役の列挙、
特殊値の証明書作成をコマンドごとに実行する

使い方:
  python scripts/main_pipeline.py eval phi_ratio --m 3 --tau quad:-1:0,1,1
  python scripts/main_pipeline.py identity-check --samples 20
  python scripts/main_pipeline.py conjugates --disc -4 --m 3
  python scripts/main_pipeline.py certify --disc -4 --m 5

結果は標準出力（JSON / テキスト）、ログは標準エラーに出す。
終了コード: 0 成功、2 入力エラー、3 精度・証明の失敗、4 恒等式の不成立
"""
import argparse
import os
import sys
import traceback
from dataclasses import dataclass
from datetime import datetime
from typing import Optional

from config import (
    DEFAULT_GUARD_BITS, DEFAULT_OUTPUT_FORMAT, DEFAULT_PREC_BITS, EXIT_OK, IDENTITY_PREC_BITS,
    IDENTITY_SAMPLES, IDENTITY_SEED, LOG_PREFIX_ERROR, LOG_SUFFIX_CERTIFY, LOG_SUFFIX_CONJUGATES,
    LOG_SUFFIX_EVAL, LOG_SUFFIX_IDENTITY, LOGS_DIR, MAX_PRECISION_RETRIES, MAX_WORKERS,
    OUTPUT_FORMATS
)
from certify_pipeline import TARGETS, certify_product, describe_conjugates
from errors import IdentityViolation, ModularUnitError, UsageError
from identities import run_identity_suite
from logger_utils import DualLogger
from numerics import EvalContext, format_complex, parse_point, point_to_complex, relative_residual
from output_utils import dump_json, ensure_output_dir, write_json_safely
from qseries import delta, delta_ratio, eta, eta_ratio, jfun, phi, phi_ratio, siegel
from run_tracker import RunTracker
from siegel_algebra import SiegelIndex

# eval で使える関数: 名前 → (評価関数, 必要な追加引数)
EVAL_FUNCTIONS = {
    "eta": (lambda tau, ctx, cfg: eta(tau, ctx), None),
    "phi": (lambda tau, ctx, cfg: phi(tau, ctx), None),
    "delta": (lambda tau, ctx, cfg: delta(tau, ctx), None),
    "j": (lambda tau, ctx, cfg: jfun(tau, ctx), None),
    "siegel": (lambda tau, ctx, cfg: siegel(cfg.index, tau, ctx), "index"),
    "phi_ratio": (lambda tau, ctx, cfg: phi_ratio(cfg.m, tau, ctx), "m"),
    "eta_ratio": (lambda tau, ctx, cfg: eta_ratio(cfg.m, tau, ctx), "m"),
    "delta_ratio": (lambda tau, ctx, cfg: delta_ratio(cfg.m, tau, ctx), "m"),
}

LOG_SUFFIXES = {
    "eval": LOG_SUFFIX_EVAL,
    "identity-check": LOG_SUFFIX_IDENTITY,
    "conjugates": LOG_SUFFIX_CONJUGATES,
    "certify": LOG_SUFFIX_CERTIFY,
}


@dataclass
class RunConfig:
    """コマンドライン引数を検証した実行設定"""

    command: str
    prec_bits: int
    guard_bits: int
    output: str = DEFAULT_OUTPUT_FORMAT
    seed: int = IDENTITY_SEED
    max_retries: int = MAX_PRECISION_RETRIES
    workers: int = MAX_WORKERS
    save: Optional[str] = None
    quiet: bool = False
    func: Optional[str] = None
    tau: object = None
    index: Optional[SiegelIndex] = None
    m: Optional[int] = None
    disc: Optional[int] = None
    target: str = "phi"
    radical_root: Optional[int] = None
    samples: int = IDENTITY_SAMPLES
    inject_sign_error: Optional[str] = None

    def context(self):
        return EvalContext(prec_bits=self.prec_bits, guard_bits=self.guard_bits)


def build_parser():
    """
    引数パーサーを作る

    共通オプションは親パーサーにまとめ、各サブコマンドに継承させる
    """
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--prec", type=int, default=None,
                        help=f"精度（bit）。既定 {DEFAULT_PREC_BITS}、identity-check は {IDENTITY_PREC_BITS}")
    common.add_argument("--guard", type=int, default=DEFAULT_GUARD_BITS, help="ガードビット")
    common.add_argument("--seed", type=int, default=IDENTITY_SEED, help="乱数シード")
    common.add_argument("--out", choices=OUTPUT_FORMATS, default=DEFAULT_OUTPUT_FORMAT,
                        help="出力形式")
    common.add_argument("--save", default=None, help="結果 JSON の保存先")
    common.add_argument("--max-retries", type=int, default=MAX_PRECISION_RETRIES,
                        help="精度を倍にするリトライの上限")
    common.add_argument("--workers", type=int, default=MAX_WORKERS, help="共役評価の並列数")
    common.add_argument("--quiet", action="store_true", help="ログを標準エラーに出さない")

    parser = argparse.ArgumentParser(
        description="虚二次点でのモジュラー単数の評価と証明",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_eval = sub.add_parser("eval", parents=[common], help="関数を1点で評価")
    p_eval.add_argument("func", choices=sorted(EVAL_FUNCTIONS))
    p_eval.add_argument("--tau", required=True, help="quad:D:p,q,r または c:<re>,<im>")
    p_eval.add_argument("--index", default=None, help="Siegel 関数の添字 r1,r2（例: 1/2,1/2）")
    p_eval.add_argument("--m", type=int, default=None)

    p_identity = sub.add_parser("identity-check", parents=[common], help="恒等式の数値チェック")
    p_identity.add_argument("--samples", type=int, default=IDENTITY_SAMPLES)
    p_identity.add_argument("--inject-sign-error", default=None, metavar="NAME",
                            help="指定した恒等式の右辺の符号を反転（検出の確認用）")

    for name, help_text in (("conjugates", "共役を剰余類ごとに列挙"), ("certify", "特殊値の証明書を作成")):
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.add_argument("--disc", type=int, required=True, help="基本判別式 d_K")
        p.add_argument("--m", type=int, required=True)
        p.add_argument("--target", choices=TARGETS, default="phi")
        if name == "certify":
            p.add_argument("--radical-root", type=int, default=None,
                           help="冪根表示の根指数（最小の根指数の倍数。例: 2）")
    return parser


def make_config(args):
    """
    argparse の結果を RunConfig に変換（コマンドごとの前提も確認）

    Raises:
        UsageError: 引数の組み合わせが不正な場合
    """
    prec = args.prec
    if prec is None:
        prec = IDENTITY_PREC_BITS if args.command == "identity-check" else DEFAULT_PREC_BITS
    if args.workers < 1:
        raise UsageError(f"--workers は 1 以上: {args.workers}")
    if args.max_retries < 0:
        raise UsageError(f"--max-retries は 0 以上: {args.max_retries}")

    cfg = RunConfig(
        command=args.command,
        prec_bits=prec,
        guard_bits=args.guard,
        output=args.out,
        seed=args.seed,
        max_retries=args.max_retries,
        workers=args.workers,
        save=args.save,
        quiet=args.quiet,
    )

    if args.command == "eval":
        cfg.func = args.func
        cfg.tau = parse_point(args.tau)
        cfg.m = args.m
        needs = EVAL_FUNCTIONS[args.func][1]
        if needs == "index":
            if args.index is None:
                raise UsageError("siegel には --index が必要です")
            cfg.index = SiegelIndex.parse(args.index)
        if needs == "m" and (args.m is None or args.m < 1):
            raise UsageError(f"{args.func} には 1 以上の --m が必要です")
    elif args.command == "identity-check":
        cfg.samples = args.samples
        cfg.inject_sign_error = args.inject_sign_error
    else:
        cfg.disc = args.disc
        cfg.m = args.m
        cfg.target = args.target
        cfg.radical_root = getattr(args, "radical_root", None)
        if cfg.radical_root is not None and cfg.radical_root < 1:
            raise UsageError(f"--radical-root は 1 以上: {cfg.radical_root}")
    return cfg


def cmd_eval(cfg, logger):
    """
    関数を1点で評価し、倍精度との差を誤差の見積もりとして添える

    Returns:
        (結果の辞書, テキスト出力の行)
    """
    ctx = cfg.context()
    evaluate = EVAL_FUNCTIONS[cfg.func][0]
    logger.log(f"🚀 {cfg.func} を評価します: τ = {cfg.tau}（{ctx.prec_bits} bit）")

    value = evaluate(point_to_complex(cfg.tau, ctx), ctx, cfg)
    check_ctx = ctx.doubled()
    reference = evaluate(point_to_complex(cfg.tau, check_ctx), check_ctx, cfg)
    error = relative_residual(value, reference, check_ctx)

    data = {
        "func": cfg.func,
        "tau": str(cfg.tau),
        "prec_bits": ctx.prec_bits,
        "value": format_complex(value, ctx),
        "relative_error_estimate": ctx.mp.nstr(error, 5),
    }
    if cfg.index is not None:
        data["index"] = cfg.index.to_json()
    if cfg.m is not None:
        data["m"] = cfg.m
    lines = [
        f"{cfg.func}({cfg.tau}) = {data['value']['re']} + {data['value']['im']}i",
        f"相対誤差の見積もり: {data['relative_error_estimate']}",
    ]
    return data, lines


def cmd_identity_check(cfg, logger):
    """恒等式を乱数の τ で検証（失敗時は IdentityViolation）"""
    report = run_identity_suite(
        cfg.context(),
        samples=cfg.samples,
        seed=cfg.seed,
        corrupt=cfg.inject_sign_error,
        logger=logger,
    )
    return report, _identity_lines(report)


def _identity_lines(report):
    lines = [f"seed={report['seed']} samples={report['samples']} prec={report['prec_bits']} bit"]
    for row in report["identities"]:
        mark = "OK  " if row["passed"] else "FAIL"
        lines.append(f"{mark} {row['identity']}: 最大残差 {row['max_residual']}")
    for failure in report["failures"]:
        lines.append(f"  - {failure['identity']} @ τ = {failure['tau']}（残差 {failure['residual']}）")
    return lines


def cmd_conjugates(cfg, logger):
    """Galois 安定な冪の共役を剰余類ごとに表示"""
    data = describe_conjugates(
        cfg.target, cfg.disc, cfg.m, cfg.context(), workers=cfg.workers, logger=logger
    )
    lines = [f"{data['target']} d={data['disc']} m={data['m']}: 安定な冪 {data['stable_power']}、"
             f"導手 {data['level']}、共役 {len(data['conjugates'])}個"]
    for row in data["conjugates"]:
        lines.append(f"  α = {row['alpha']}: {row['value']['re']} + {row['value']['im']}i")
    return data, lines


def cmd_certify(cfg, logger):
    """証明書を作成（実行記録はログと JSON の "run" に出す）"""
    tracker = RunTracker(f"certify {cfg.target} d={cfg.disc} m={cfg.m}")
    result = certify_product(
        cfg.target, cfg.disc, cfg.m, cfg.context(),
        max_retries=cfg.max_retries,
        workers=cfg.workers,
        logger=logger,
        tracker=tracker,
        radical_root=cfg.radical_root,
    )
    logger.log(tracker.get_detailed_summary())

    cert = result.certificate
    data = result.to_dict(run_summary=tracker.get_summary())
    lines = [
        f"{cfg.target} d={cfg.disc} m={cfg.m}: x = 量^{cert.power_taken}",
        f"最小多項式: {cert.polynomial}",
        f"代数的整数: {cert.is_algebraic_integer}",
        f"割る数: {cert.divides}",
        f"単数: {cert.is_unit}（条件 {result.hypothesis['holds']}）",
        f"冪根表示: {cert.radical if cert.radical else 'なし'}",
    ]
    return data, lines


COMMANDS = {
    "eval": cmd_eval,
    "identity-check": cmd_identity_check,
    "conjugates": cmd_conjugates,
    "certify": cmd_certify,
}


def emit(cfg, data, lines, logger):
    """結果を標準出力へ（--save があればファイルにも）"""
    if cfg.output == "json":
        sys.stdout.write(dump_json(data))
    else:
        sys.stdout.write("\n".join(lines) + "\n")
    sys.stdout.flush()

    if cfg.save:
        path = save_path(cfg)
        if write_json_safely(path, data, logger=logger):
            logger.log(f"📝 結果を保存しました: {path}")
        else:
            logger.log(f"⚠️ 結果の保存に失敗しました: {path}")


def save_path(cfg):
    """ファイル名だけなら output/<コマンド>/ の下に置く"""
    if os.path.dirname(cfg.save):
        return cfg.save
    return os.path.join(ensure_output_dir(cfg.command), cfg.save)


def main(argv=None):
    """
    メイン処理

    Returns:
        int: 終了コード
    """
    parser = build_parser()
    args = parser.parse_args(argv)

    timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")
    log_file = os.path.join(
        LOGS_DIR, f"{LOG_PREFIX_ERROR}{timestamp}_{args.command}{LOG_SUFFIXES[args.command]}"
    )
    logger = DualLogger(log_file, quiet=args.quiet)

    try:
        cfg = make_config(args)
        data, lines = COMMANDS[cfg.command](cfg, logger)
        emit(cfg, data, lines, logger)
        return EXIT_OK

    except IdentityViolation as e:
        logger.log(f"🚨 {e}")
        report = getattr(e, "report", None)
        if report is not None:
            emit(cfg, report, _identity_lines(report), logger)
        logger.save_on_error()
        return e.exit_code

    except ModularUnitError as e:
        logger.log(f"🚨 {type(e).__name__}: {e}")
        logger.save_on_error()
        return e.exit_code

    except Exception as e:
        logger.log(f"🚨 予期せぬエラー: {e}")
        logger.log(traceback.format_exc())
        logger.save_on_error()
        return 1


if __name__ == "__main__":
    sys.exit(main())
