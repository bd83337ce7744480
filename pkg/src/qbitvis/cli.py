"""Command-line entry point.

Subcommands::

    qbitvis scan        analytic coincidence curves (defaults: six classical curves)
    qbitvis mc          the same curves estimated by seeded Monte Carlo
    qbitvis chsh        CHSH value at given settings, or its grid maximum
    qbitvis visibility  curve visibility per channel-1 angle

Angles are radians unless ``--degrees`` is given; radian inputs may also be
written as multiples of pi, e.g. ``3pi/16``. Output angles are always radians.
Exit status: 0 success, 1 runtime error, 2 usage error.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import os
import re
import sys

from .chsh import ChshSettings, chsh_statistic, maximize_chsh
from .core import DomainError, SourceConfig
from .models import ModelKind, visibility_result
from .report import (
    DEFAULT_THETA1,
    ScanSpec,
    emit_csv,
    emit_json,
    format_real,
    scan,
    simulate_scan,
)

_PI_EXPR = re.compile(r"^([+-]?(?:\d+(?:\.\d*)?|\.\d+)?)\*?pi(?:/(\d+(?:\.\d*)?))?$")


class UsageError(Exception):
    pass


def parse_angle(text: str, degrees: bool) -> float:
    text = text.strip().lower()
    m = _PI_EXPR.match(text)
    if m:
        if degrees:
            raise UsageError(f"pi expression {text!r} is not allowed with --degrees")
        coef = m.group(1)
        k = 1.0 if coef in ("", "+") else -1.0 if coef == "-" else float(coef)
        return k * math.pi / (float(m.group(2)) if m.group(2) else 1.0)
    try:
        x = float(text)
    except ValueError:
        raise UsageError(f"not an angle: {text!r}") from None
    if not math.isfinite(x):
        raise UsageError(f"angle must be finite: {text!r}")
    return math.radians(x) if degrees else x


def parse_angle_list(text: str, degrees: bool) -> list[float]:
    items = [t for t in text.split(",") if t.strip()]
    if not items:
        raise UsageError("empty angle list")
    return [parse_angle(t, degrees) for t in items]


def parse_range(text: str, degrees: bool) -> tuple[float, float, int]:
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError(f"expected start:end:steps, got {text!r}")
    try:
        steps = int(parts[2])
    except ValueError:
        raise UsageError(f"steps must be an integer, got {parts[2]!r}") from None
    return parse_angle(parts[0], degrees), parse_angle(parts[1], degrees), steps


def _model(name: str) -> ModelKind:
    return ModelKind(name)


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--model", choices=[m.value for m in ModelKind], default="classical")
    p.add_argument("--degrees", action="store_true", help="read every angle input in degrees")
    p.add_argument("--source-axis", default="0", help="source axis orientation")
    p.add_argument("--mode-weight", type=float, default=0.5, help="probability of emission mode HV")
    p.add_argument("--out", help="output file (default: standard output)")


def _scan_flags(p: argparse.ArgumentParser) -> None:
    _common(p)
    p.add_argument("--theta1", help="comma-separated channel-1 angles (default: 0,pi/8,3pi/16,pi/4,3pi/8,pi/2)")
    p.add_argument("--theta2-range", help="start:end:steps, endpoints inclusive (default: 0 to pi, 181 steps)")
    p.add_argument("--format", choices=["csv", "json"], default="csv")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qbitvis", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    _scan_flags(sub.add_parser("scan", help="analytic coincidence curves"))

    mc = sub.add_parser("mc", help="Monte Carlo coincidence curves")
    _scan_flags(mc)
    mc.add_argument("--theta2", help="comma-separated channel-2 angles (overrides --theta2-range)")
    mc.add_argument("--trials", type=int, default=100_000)
    mc.add_argument("--seed", type=int, default=0)
    mc.add_argument("--chunks", type=int, default=1, help="worker threads; results do not depend on it")

    ch = sub.add_parser("chsh", help="CHSH statistic")
    _common(ch)
    group = ch.add_mutually_exclusive_group()
    group.add_argument("--settings", help="a,a',b,b'")
    group.add_argument("--grid-step", help="grid search step (default pi/64)")
    ch.add_argument("--format", choices=["text", "json"], default="text")

    vis = sub.add_parser("visibility", help="coincidence-curve visibility")
    _common(vis)
    vis.add_argument("--theta1", help="comma-separated channel-1 angles")
    return parser


def _spec(args, degrees: bool) -> ScanSpec:
    theta1 = DEFAULT_THETA1 if args.theta1 is None else parse_angle_list(args.theta1, degrees)
    if args.theta2_range is None:
        start, end, steps = 0.0, math.pi, 181
    else:
        start, end, steps = parse_range(args.theta2_range, degrees)
    return ScanSpec(tuple(theta1), start, end, steps, _model(args.model), _source(args, degrees))


def _source(args, degrees: bool) -> SourceConfig:
    return SourceConfig(parse_angle(args.source_axis, degrees), args.mode_weight)


def _run_scan(args, out) -> None:
    spec = _spec(args, args.degrees)
    rows = scan(spec)
    if args.format == "json":
        emit_json(rows, spec.to_dict(), out)
    else:
        emit_csv(rows, out)


def _run_mc(args, out) -> None:
    spec = _spec(args, args.degrees)
    theta2 = None if args.theta2 is None else parse_angle_list(args.theta2, args.degrees)
    results = simulate_scan(spec, args.trials, args.seed, args.chunks, theta2)
    rows = [r for r, _ in results]
    if args.format == "json":
        meta = spec.to_dict() | {"trials": args.trials, "seed": args.seed}
        if theta2 is not None:
            meta["theta2_rad"] = theta2
        counts = [
            {"n_vv": c.n_vv, "n_vh": c.n_vh, "n_hv": c.n_hv, "n_hh": c.n_hh, "trials": c.trials}
            for _, c in results
        ]
        emit_json(rows, meta, out, counts)
    else:
        emit_csv(rows, out)


def _run_chsh(args, out) -> None:
    model = _model(args.model)
    src = _source(args, args.degrees)
    if args.settings is not None:
        angles = parse_angle_list(args.settings, args.degrees)
        if len(angles) != 4:
            raise UsageError("--settings needs exactly four angles a,a',b,b'")
        res = chsh_statistic(ChshSettings(*angles), model, src)
        how = "settings"
    else:
        step = math.pi / 64 if args.grid_step is None else parse_angle(args.grid_step, args.degrees)
        res = maximize_chsh(model, step, src)
        how = f"grid-step={format_real(step)}"
    a, ap, b, bp = (float(x) for x in res.settings.as_tuple())
    if args.format == "json":
        payload = {"model": model.value, "s": res.s, "a": a, "a_prime": ap, "b": b, "b_prime": bp}
        out.write((json.dumps(payload) + "\n").encode())
    else:
        out.write(
            f"model={model.value} {how} s={res.s:.9f} "
            f"a={format_real(a)} a'={format_real(ap)} b={format_real(b)} b'={format_real(bp)}\n".encode()
        )


def _run_visibility(args, out) -> None:
    model = _model(args.model)
    src = _source(args, args.degrees)
    theta1 = DEFAULT_THETA1 if args.theta1 is None else parse_angle_list(args.theta1, args.degrees)
    lines = ["model,theta1_rad,visibility,degenerate"]
    for t1 in theta1:
        res = visibility_result(model, t1, src)
        lines.append(f"{model.value},{format_real(t1)},{format_real(res.value)},{int(res.degenerate)}")
    out.write(("\n".join(lines) + "\n").encode())


_COMMANDS = {"scan": _run_scan, "mc": _run_mc, "chsh": _run_chsh, "visibility": _run_visibility}


def cli_main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    buf = io.BytesIO()
    try:
        _COMMANDS[args.command](args, buf)
        if args.out:
            with open(args.out, "wb") as fh:
                fh.write(buf.getvalue())
        else:
            sys.stdout.buffer.write(buf.getvalue())
            sys.stdout.flush()
    except BrokenPipeError:
        # reader went away (e.g. piped into head); keep the interpreter from complaining at exit
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return 0
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"qbitvis: error: {exc}", file=sys.stderr)
        return 2
    except (DomainError, OSError) as exc:
        print(f"qbitvis: {exc}", file=sys.stderr)
        return 1
    return 0


def main() -> None:
    sys.exit(cli_main())
