"""Command-line entry point: ``grvbroker <subcommand>``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

from .errors import BrokerError, DatasetError, InvalidConfig, InvalidParams
from .grv import GrvParams, weight_table
from .qos import AttributeSet
from .ranking import RankTable, initialize_ranks, rank_csv_text

EXIT_OK, EXIT_USAGE, EXIT_CONFIG, EXIT_DATA, EXIT_INTERNAL = 0, 1, 2, 3, 4

log = logging.getLogger("grvbroker")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> List[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def table3_csv(c_bp_values: Sequence[int], c: float = 1.0, x_max: float = 2.0) -> str:
    columns = weight_table(c_bp_values, c, x_max)
    rows = ["k," + ",".join(f"C={col['c_bp']}" for col in columns)]
    for k in range(1, max(c_bp_values) + 1):
        cells = [f"{col['weights'][k - 1]:.6f}" if k <= col["c_bp"] else "-" for col in columns]
        rows.append(f"{k}," + ",".join(cells))
    for label, key in (("Min", "min"), ("Max", "max"), ("Av. Diff.", "avg_diff")):
        rows.append(f"{label}," + ",".join(f"{col[key]:.6f}" for col in columns))
    return "\n".join(rows) + "\n"


def timed_rank_init(
    providers: Sequence[Tuple[str, Sequence[float]]], aset: AttributeSet, p: GrvParams
) -> Tuple[RankTable, float]:
    """Bootstrap ranking from constant per-provider vectors; returns the table and seconds spent."""
    vectors = dict(providers)
    samples = [f"sample-{i}" for i in range(1, p.c_bp + 1)]
    start = time.perf_counter()
    table = initialize_ranks([pid for pid, _ in providers], samples, lambda pid, _c: vectors[pid], aset, p)
    return table, time.perf_counter() - start


def _write_outputs(out: Path, files: dict) -> None:
    out.mkdir(parents=True, exist_ok=True)
    for name, text in files.items():
        (out / name).write_text(text, encoding="utf-8")


def cmd_validate_config(args) -> int:
    from .sim.config import load_config

    cfg = load_config(_require(args.config, "--config"))
    print(f"ok: {cfg.name} m={cfg.attributes.m} c_bp={cfg.params.c_bp} algorithms={','.join(cfg.algorithms)}")
    return EXIT_OK


def cmd_table3(args) -> int:
    try:
        text = table3_csv(args.cbp, args.c, args.xmax)
    except InvalidParams as exc:
        raise InvalidConfig(str(exc)) from exc
    if args.out:
        _write_outputs(Path(args.out), {"table3.csv": text})
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_rank_init(args) -> int:
    from .sim.config import load_attribute_config, load_grv_section
    from .sim.dataset import ingest_dataset, qws_attributes

    aset = load_attribute_config(args.config) if args.config else qws_attributes()
    if args.m:
        try:
            aset = aset.subset(args.m)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
    if args.config:
        p = load_grv_section(args.config, aset)
    else:
        p = GrvParams(m=aset.m, omega=aset.omega)
    roster = ingest_dataset(_require(args.dataset, "--dataset"), args.keyword, aset)
    table, seconds = timed_rank_init(roster.providers, aset, p)
    text = rank_csv_text([table])
    if args.out:
        _write_outputs(Path(args.out), {"rank_init.csv": text})
    else:
        sys.stdout.write(text)
    print(f"grv_time_ms={seconds * 1000:.6f} providers={len(table)} m={aset.m} skipped={roster.skipped}")
    return EXIT_OK


def cmd_simulate(args) -> int:
    from .sim.config import load_config
    from .sim.scenario import run_scenario

    cfg = load_config(_require(args.config, "--config"))
    if args.seed is not None:
        cfg = cfg.with_seed(args.seed)
    out = Path(_require(args.out, "--out"))
    report = run_scenario(cfg)
    for path in report.write(out):
        log.info("wrote %s", path)
    print(json.dumps(report.summary()["algorithms"], indent=2, sort_keys=True))
    return EXIT_OK


def cmd_report(args) -> int:
    from .sim.scenario import summarize_directory

    try:
        summary = summarize_directory(args.run_dir)
    except (OSError, KeyError, ValueError) as exc:
        raise DatasetError(f"cannot summarize {args.run_dir}: {exc}") from exc
    print(json.dumps(summary, indent=2, sort_keys=True))
    return EXIT_OK


def _require(value, flag):
    if value is None:
        raise UsageError(f"{flag} is required")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="grvbroker", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("validate-config", help="check a scenario config")
    p.add_argument("--config", required=True)
    p.set_defaults(func=cmd_validate_config)

    p = sub.add_parser("table3", help="measurement weights per epoch length")
    p.add_argument("--cbp", type=_int_list, default=[5, 10, 20])
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--xmax", type=float, default=2.0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_table3)

    p = sub.add_parser("rank-init", help="bootstrap ranking from a QoS dataset")
    p.add_argument("--dataset", required=True)
    p.add_argument("--keyword")
    p.add_argument("--config", help="YAML with an 'attributes' (and optional 'grv') section")
    p.add_argument("--m", type=int, help="use only the first m attributes")
    p.add_argument("--out")
    p.set_defaults(func=cmd_rank_init)

    p = sub.add_parser("simulate", help="run a scenario")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("report", help="re-summarize trace files of a finished run")
    p.add_argument("run_dir")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"grvbroker: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InvalidConfig as exc:
        print(f"grvbroker: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DatasetError, OSError) as exc:
        print(f"grvbroker: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except BrokerError as exc:
        print(f"grvbroker: invariant violation: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
