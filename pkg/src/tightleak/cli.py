"""Command-line entry point.

Exit codes: 0 success, 1 infeasible physics (zero rate everywhere or no
positive-rate code), 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import replace
from pathlib import Path

from tightleak.io import ConfigError, RunConfig, load_config, write_csv, write_json
from tightleak.keyrate import sweep
from tightleak.ldpc.code import design_rate, feasible_block_length, generate_regular_ldpc
from tightleak.ldpc.crs import CrsFormatError, deserialize_crs, serialize_crs
from tightleak.ldpc.storage import dense_storage_bits, predicted_storage, sparse_storage_bits
from tightleak.plan import code_plan
from tightleak.protocol import Detection, Direction
from tightleak.selftest import run_selftest

__all__ = ["main", "run", "parse_range", "parse_list"]

EXIT_OK, EXIT_INFEASIBLE, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def parse_range(text: str) -> list[float]:
    """``START:STEP:END`` with END included (up to float rounding)."""
    try:
        start, step, end = (float(x) for x in text.split(":"))
    except ValueError:
        raise UsageError(f"--db expects START:STEP:END, got {text!r}") from None
    if step <= 0 or end < start:
        raise UsageError(f"--db needs STEP > 0 and END >= START, got {text!r}")
    count = int(math.floor((end - start) / step + 1e-9)) + 1
    return [round(start + i * step, 12) for i in range(count)]


def parse_list(text: str) -> list[int]:
    try:
        values = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"--bigN expects a comma-separated list, got {text!r}") from None
    if not values or any(v != int(v) or v < 3 for v in values):
        raise UsageError(f"--bigN values must be integers >= 3, got {text!r}")
    return [int(v) for v in values]


def _load(args) -> RunConfig:
    run = load_config(args.config) if args.config else RunConfig()
    proto = run.protocol
    if getattr(args, "heterodyne", False):
        proto = replace(proto, detection=Detection.HETERODYNE)
    if getattr(args, "rr", False):
        proto = replace(proto, direction=Direction.RR)
    return replace(run, protocol=proto)


def _out_dir(args) -> Path:
    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
        probe = out / ".write-test"
        probe.touch()
        probe.unlink()
    except OSError as exc:
        raise UsageError(f"output directory {out} is not writable: {exc.strerror or exc}") from None
    return out


def _emit(points, out: Path, stem: str, axis: str, fmt: str) -> Path:
    path = out / f"{stem}.{fmt}"
    if fmt == "csv":
        write_csv(points, path, axis)
    else:
        write_json(points, path)
    return path


def _cmd_rate_vs_loss(args) -> int:
    run = _load(args)
    dbs = parse_range(args.db)
    N = parse_list(args.bigN)[0] if args.bigN else run.N
    points = sweep(run.protocol, "loss_db", dbs, xi=run.xi, N=N,
                   V_fixed=run.V, ratio_fixed=run.n_ratio)
    path = _emit(points, _out_dir(args), "rate_vs_loss", "loss_db", args.format)
    positive = [p for p in points if p.R > 0]
    print(f"wrote {len(points)} points to {path}")
    if not positive:
        print("infeasible: zero secret key rate at every loss")
        return EXIT_INFEASIBLE
    print(f"positive rate up to {positive[-1].loss_db:g} dB")
    return EXIT_OK


def _cmd_rate_vs_blocksize(args) -> int:
    run = _load(args)
    Ns = parse_list(args.bigN or "100000,200000,300000,400000")
    points = sweep(run.protocol, "N", Ns, xi=run.xi, loss_db=run.loss_db,
                   V_fixed=run.V, ratio_fixed=run.n_ratio)
    path = _emit(points, _out_dir(args), "rate_vs_blocksize", "N", args.format)
    print(f"wrote {len(points)} points to {path}")
    if not any(p.R > 0 for p in points):
        print("infeasible: zero secret key rate at every block size")
        return EXIT_INFEASIBLE
    return EXIT_OK


def _print_report(report: dict, args, name: str) -> None:
    text = json.dumps(report, indent=1, sort_keys=True)
    print(text)
    if args.out:
        (_out_dir(args) / name).write_text(text + "\n")


def _cmd_code_plan(args) -> int:
    report = code_plan(_load(args))
    _print_report(report, args, "code_plan.json")
    return EXIT_OK if report["feasible"] else EXIT_INFEASIBLE


def _cmd_gen_parity(args) -> int:
    if args.dv < 2 or args.dv >= args.dc:
        raise UsageError(f"need 2 <= dv < dc, got dv={args.dv}, dc={args.dc}")
    if not 1 <= args.d <= 8:
        raise UsageError(f"--d must be in 1..8, got {args.d}")
    hn = feasible_block_length(args.hn, args.dv, args.dc)
    if hn < args.dc:
        raise UsageError(f"--hn {args.hn} is too small for dc={args.dc}")
    code = generate_regular_ldpc(hn, args.d, args.dv, args.dc, seed=args.seed)
    path = Path(args.output) if args.output else _out_dir(args) / "parity.crs"
    size = serialize_crs(code, path)
    report = _storage_report(code, size, args.rcode_star)
    report.update(path=str(path), hn_requested=args.hn, truncated=hn != args.hn)
    print(json.dumps(report, indent=1, sort_keys=True))
    return EXIT_OK


def _storage_report(code, serialized_bytes: int, rcode_star: float | None) -> dict:
    r_synd = code.n_rows / code.n_cols
    report = {
        "hn": code.n_cols,
        "r": code.n_rows,
        "d": code.d,
        "d_v": code.d_v,
        "d_c": code.d_c,
        "seed": code.seed,
        "R_design": design_rate(code.d_v, code.d_c),
        "m_dense_bits": dense_storage_bits(code.n_cols, code.d, r_synd),
        "m_sparse_bits": sparse_storage_bits(code.n_cols, code.d, code.d_v, r_synd),
        "serialized_bytes": serialized_bytes,
    }
    if rcode_star is not None:
        dense, sparse = predicted_storage(code.n_cols, 1, code.d, code.d_v, 1.0 - rcode_star)
        report.update(
            R_code_star=rcode_star,
            m_dense_star_bits=dense,
            m_sparse_star_bits=sparse,
            size_over_prediction=serialized_bytes * 8 / sparse,
        )
    return report


def _cmd_storage_report(args) -> int:
    if args.crs:
        try:
            code = deserialize_crs(args.crs)
        except CrsFormatError as exc:
            raise UsageError(f"{args.crs}: {exc}") from None
        report = _storage_report(code, Path(args.crs).stat().st_size, args.rcode_star)
        _print_report(report, args, "storage_report.json")
        return EXIT_OK
    plan = code_plan(_load(args))
    if not plan["feasible"]:
        _print_report(plan, args, "storage_report.json")
        return EXIT_INFEASIBLE
    keys = ("n", "h", "d", "d_v", "R_synd_star", "R_code_star",
            "m_dense_star_bits", "m_sparse_star_bits", "m_dense_star_GB", "m_sparse_star_MB")
    _print_report({k: plan[k] for k in keys}, args, "storage_report.json")
    return EXIT_OK


def _cmd_selftest(args) -> int:
    return EXIT_OK if run_selftest(sys.stdout) else EXIT_INFEASIBLE


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="JSON run configuration")
    common.add_argument("--out", metavar="DIR", default=None, help="output directory")
    common.add_argument("--heterodyne", action="store_true", help="heterodyne detection")
    common.add_argument("--rr", action="store_true", help="reverse reconciliation")

    sweep_opts = argparse.ArgumentParser(add_help=False)
    sweep_opts.add_argument("--format", choices=("csv", "json"), default="csv")
    sweep_opts.add_argument("--bigN", metavar="LIST", help="total signals N (comma list)")

    parser = argparse.ArgumentParser(
        prog="tightleak",
        description="Finite-size CV-QKD key rates, LDPC code plans and storage budgets.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("rate-vs-loss", parents=[common, sweep_opts], help="optimized rate vs loss")
    p.add_argument("--db", metavar="START:STEP:END", default="0:0.1:3")
    p.set_defaults(func=_cmd_rate_vs_loss)

    p = sub.add_parser("rate-vs-blocksize", parents=[common, sweep_opts],
                       help="optimized rate vs block size N")
    p.set_defaults(func=_cmd_rate_vs_blocksize)

    p = sub.add_parser("code-plan", parents=[common], help="optimal code rate and storage")
    p.set_defaults(func=_cmd_code_plan)

    p = sub.add_parser("gen-parity", parents=[common], help="generate a regular parity-check matrix")
    p.add_argument("--hn", type=int, required=True, help="message nodes (h n)")
    p.add_argument("--d", type=int, required=True, help="bits per symbol")
    p.add_argument("--dv", type=int, default=2, help="column weight")
    p.add_argument("--dc", type=int, required=True, help="row weight")
    p.add_argument("--seed", type=int, default=0, help="PCG64 seed (u64)")
    p.add_argument("--rcode-star", type=float, default=None, help="target R*_code for predictions")
    p.add_argument("-o", "--output", metavar="PATH", help="CRS file to write")
    p.set_defaults(func=_cmd_gen_parity)

    p = sub.add_parser("storage-report", parents=[common], help="storage model for a point or file")
    p.add_argument("--crs", metavar="PATH", help="measure an existing CRS file")
    p.add_argument("--rcode-star", type=float, default=None, help="target R*_code for predictions")
    p.set_defaults(func=_cmd_storage_report)

    p = sub.add_parser("selftest", help="run the built-in invariant checks")
    p.set_defaults(func=_cmd_selftest)
    return parser


def run(argv=None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    if getattr(args, "out", None) is None:
        args.out = "." if args.command in ("rate-vs-loss", "rate-vs-blocksize") else None
    if args.command == "gen-parity" and args.output is None and args.out is None:
        args.out = "."
    if getattr(args, "seed", 0) is not None and not 0 <= getattr(args, "seed", 0) < 2**64:
        print("error: --seed must be an unsigned 64-bit integer", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except (ConfigError, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
