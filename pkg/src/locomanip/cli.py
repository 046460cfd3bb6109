"""Command-line entry point: run scenarios, verify properties, export series.

Exit codes are part of the contract:
  0  success
  1  property-group failure (verify)
  2  validation error (bad config, bad flags, unknown channel)
  3  run ended in a safety stop
  4  numerical integration fault
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys

from .config import ConfigError, builtin_scenarios, load_config
from .errors import IntegrationFault, LocomanipError
from .sim import mode_switch_count, read_log_csv, rms_tracking_error, run_scenario

EXIT_OK = 0
EXIT_VERIFY_FAIL = 1
EXIT_VALIDATION = 2
EXIT_SAFETY_STOP = 3
EXIT_INTEGRATION_FAULT = 4


@dataclasses.dataclass(frozen=True)
class RunReport:
    scenario: str
    duration: float
    completed: bool
    safety_stop: bool
    peak_f_ext: float
    rms_tracking_error: float
    mode_switches: int
    log_path: str

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)


def _print_report(report: RunReport, stream) -> None:
    for key, value in report.as_dict().items():
        print(f"{key} = {value}", file=stream)


def cmd_run(args, stdout, stderr) -> int:
    try:
        cfg = load_config(args.config, overrides=args.set or [])
    except (ConfigError, OSError) as err:
        print(f"error: {err}", file=stderr)
        return EXIT_VALIDATION

    try:
        log = run_scenario(cfg)
    except IntegrationFault as err:
        print(f"error: {err}", file=stderr)
        return EXIT_INTEGRATION_FAULT

    out_dir = args.out or "."
    os.makedirs(out_dir, exist_ok=True)
    log_path = os.path.join(out_dir, f"{cfg.name}.csv")
    log.save(log_path)
    with open(os.path.join(out_dir, f"{cfg.name}.effective.cfg"), "w") as fh:
        fh.write(cfg.dump())

    report = RunReport(
        scenario=cfg.name,
        duration=cfg.duration,
        completed=True,
        safety_stop=log.safety_stop,
        peak_f_ext=log.peak_f_ext,
        rms_tracking_error=rms_tracking_error(log),
        mode_switches=mode_switch_count(log),
        log_path=log_path,
    )
    with open(os.path.join(out_dir, f"{cfg.name}.report.json"), "w") as fh:
        json.dump(report.as_dict(), fh, indent=2)
        fh.write("\n")
    _print_report(report, stdout)
    return EXIT_SAFETY_STOP if log.safety_stop else EXIT_OK


def cmd_verify(args, stdout, stderr) -> int:
    from . import verify

    names = args.group or None
    try:
        results = verify.run_all(names)
    except KeyError as err:
        print(f"error: {err.args[0]}", file=stderr)
        return EXIT_VALIDATION
    for res in results:
        print(json.dumps(res.as_dict()), file=stdout)
    return EXIT_OK if all(r.passed for r in results) else EXIT_VERIFY_FAIL


def cmd_plotdata(args, stdout, stderr) -> int:
    channels = [c.strip() for c in (args.channels or "").split(",") if c.strip()]
    if not channels:
        print("error: no channels requested", file=stderr)
        return EXIT_VALIDATION
    try:
        columns, data = read_log_csv(args.log)
    except (OSError, ValueError) as err:
        print(f"error: {err}", file=stderr)
        return EXIT_VALIDATION
    unknown = [c for c in channels if c not in columns]
    if unknown:
        print(
            f"error: unknown channel(s) {', '.join(unknown)}; "
            f"valid channels: {', '.join(columns)}",
            file=stderr,
        )
        return EXIT_VALIDATION
    # time leads; a redundant explicit 't' is not duplicated
    ordered = ["t"] + [c for c in channels if c != "t"]
    idx = [columns.index(c) for c in ordered]
    print(",".join(ordered), file=stdout)
    for row in data:
        print(",".join(repr(float(row[i])) for i in idx), file=stdout)
    return EXIT_OK


def cmd_serve(args, stdout, stderr) -> int:
    from . import bridge

    bridge.serve(host=args.host, port=args.port, scenario=args.scenario)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="locomanip",
        description="whole-body loco-manipulation control toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run a scenario and export its log")
    run_p.add_argument(
        "config",
        help="config file path or builtin scenario name "
        f"({', '.join(sorted(builtin_scenarios()))})",
    )
    run_p.add_argument(
        "--set", action="append", metavar="SECTION.KEY=VALUE",
        help="override a config entry (repeatable)",
    )
    run_p.add_argument("--out", metavar="DIR", help="output directory (default: .)")
    run_p.set_defaults(fn=cmd_run)

    ver_p = sub.add_parser("verify", help="run the property-check groups")
    ver_p.add_argument(
        "--group", action="append", metavar="NAME",
        help="restrict to one group (repeatable)",
    )
    ver_p.set_defaults(fn=cmd_verify)

    plot_p = sub.add_parser("plotdata", help="extract channels from a run log")
    plot_p.add_argument("log", help="CSV log written by `run`")
    plot_p.add_argument(
        "--channels", required=True, metavar="A,B,C", help="comma-separated channel names",
    )
    plot_p.set_defaults(fn=cmd_plotdata)

    serve_p = sub.add_parser("serve", help="expose a live simulation over websockets")
    serve_p.add_argument("--host", default="127.0.0.1")
    serve_p.add_argument("--port", type=int, default=8765)
    serve_p.add_argument(
        "--scenario", default=None, metavar="NAME",
        help="config file or builtin scenario to load at startup",
    )
    serve_p.set_defaults(fn=cmd_serve)
    return parser


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout if stdout is not None else sys.stdout
    stderr = stderr if stderr is not None else sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        # argparse exits 2 on bad flags, which matches the validation code
        return int(err.code or 0)
    try:
        return args.fn(args, stdout, stderr)
    except LocomanipError as err:
        print(f"error: {err}", file=stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
