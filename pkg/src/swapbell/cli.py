"""Command line interface.

Subcommands::

    probabilities    conditional pattern table for one setting
    correlation      correlation value for one setting
    chsh-max         maximize S over the four analyzer angles
    alpha-threshold  smallest distinguishability with S* = 2
    scan             CSV sweeps: chsh-vs-alpha | hom-dip | fringe
    verify           run the built-in consistency checks

Every numeric option can also come from a flat ``key = value`` config file
(``--config``); explicit flags win over file values.  Angles are radians
unless ``--degrees`` is given, outputs carry both the angles and their
doubled values, and numbers are serialized with 9 significant digits.

Exit codes: 0 on success, 1 when ``verify`` finds a numerical
disagreement, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np

from . import bell, experiment, oracle
from .bell import AngleSet
from .experiment import Configuration, TWO_PHOTON_PATTERNS


class UsageError(Exception):
    """Bad invocation: wrong values, missing required settings, bad config file."""


def _fmt(x: float) -> str:
    return f"{x:.9g}"


def _num(x: float) -> float:
    """Round-trip through 9 significant digits so JSON stays numeric."""
    return float(_fmt(x))


# -- config file ---------------------------------------------------------------

_FLOAT_KEYS = {"alpha", "theta1", "theta2", "theta1p", "theta2p", "grid_step"}
_INT_KEYS = {"points"}
_BOOL_KEYS = {"degrees"}
_STR_KEYS = {"variant", "format", "out", "which"}
_ALL_KEYS = _FLOAT_KEYS | _INT_KEYS | _BOOL_KEYS | _STR_KEYS


def _parse_config_file(path: str) -> dict[str, Any]:
    values: dict[str, Any] = {}
    try:
        with open(path, "r", encoding="utf-8") as handle:
            lines = handle.readlines()
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from exc
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        key, _, value = line.partition("=")
        key = key.strip().replace("-", "_")
        value = value.strip()
        if key not in _ALL_KEYS:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            if key in _FLOAT_KEYS:
                values[key] = float(value)
            elif key in _INT_KEYS:
                values[key] = int(value)
            elif key in _BOOL_KEYS:
                lowered = value.lower()
                if lowered in ("true", "yes", "1", "on"):
                    values[key] = True
                elif lowered in ("false", "no", "0", "off"):
                    values[key] = False
                else:
                    raise ValueError(value)
            else:
                values[key] = value
        except ValueError as exc:
            raise UsageError(f"{path}:{lineno}: bad value for {key}: {value!r}") from exc
    return values


@dataclass
class Settings:
    """Resolved options for one invocation: flags over config file over defaults."""

    variant: str | None
    alpha: float | None
    theta1: float
    theta2: float
    theta1p: float | None
    theta2p: float | None
    degrees: bool
    format: str | None
    out: str | None
    grid_step: float
    points: int
    which: str | None


def _resolve(args: argparse.Namespace) -> Settings:
    file_values: dict[str, Any] = {}
    if getattr(args, "config", None):
        file_values = _parse_config_file(args.config)

    def pick(key: str, default: Any = None) -> Any:
        flag = getattr(args, key, None)
        if flag is not None:
            return flag
        if key in file_values:
            return file_values[key]
        return default

    settings = Settings(
        variant=pick("variant"),
        alpha=pick("alpha"),
        theta1=pick("theta1", 0.0),
        theta2=pick("theta2", 0.0),
        theta1p=pick("theta1p"),
        theta2p=pick("theta2p"),
        degrees=bool(pick("degrees", False)),
        format=pick("format"),
        out=pick("out"),
        grid_step=pick("grid_step", bell.GRID_STEP),
        points=pick("points", 50),
        which=pick("which"),
    )
    if settings.variant is not None and settings.variant not in ("A", "B"):
        raise UsageError(f"variant must be A or B, got {settings.variant!r}")
    if settings.format is not None and settings.format not in ("json", "csv"):
        raise UsageError(f"format must be json or csv, got {settings.format!r}")
    if settings.alpha is not None and not 0.0 <= settings.alpha <= 1.0:
        raise UsageError(f"alpha must lie in [0, 1], got {settings.alpha}")
    if settings.points < 2:
        raise UsageError(f"points must be at least 2, got {settings.points}")
    if settings.degrees:
        settings.theta1 = math.radians(settings.theta1)
        settings.theta2 = math.radians(settings.theta2)
        if settings.theta1p is not None:
            settings.theta1p = math.radians(settings.theta1p)
        if settings.theta2p is not None:
            settings.theta2p = math.radians(settings.theta2p)
    return settings


def _require(settings: Settings, *names: str) -> None:
    for name in names:
        if getattr(settings, name) is None:
            raise UsageError(f"missing required setting: --{name.replace('_', '-')}")


def _emit(text: str, settings: Settings) -> None:
    if settings.out:
        with open(settings.out, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


def _csv_text(header: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


def _angle_fields(prefix: str, value: float) -> dict[str, float]:
    return {prefix: _num(value), f"{prefix}_doubled": _num(2 * value)}


# -- subcommands ---------------------------------------------------------------


def cmd_probabilities(settings: Settings) -> int:
    _require(settings, "variant")
    table = experiment.station_probabilities(
        Configuration(settings.variant, settings.theta1, settings.theta2)
    )
    rows = table.rows()
    total = table.total()
    if settings.format == "json":
        payload = {
            "variant": settings.variant,
            **_angle_fields("theta1", settings.theta1),
            **_angle_fields("theta2", settings.theta2),
            "conditioned_on": table.conditioned_on,
            "patterns": [
                {
                    "label": pattern.label(),
                    "n_a_plus": pattern.n_a_plus,
                    "n_a_minus": pattern.n_a_minus,
                    "n_b_plus": pattern.n_b_plus,
                    "n_b_minus": pattern.n_b_minus,
                    "probability": _num(p),
                }
                for pattern, p in rows
            ],
            "sum": _num(total),
        }
        _emit(json.dumps(payload, indent=2) + "\n", settings)
    elif settings.format == "csv":
        body = [
            [pattern.label(), pattern.n_a_plus, pattern.n_a_minus,
             pattern.n_b_plus, pattern.n_b_minus, _fmt(p)]
            for pattern, p in rows
        ]
        body.append(["sum", "", "", "", "", _fmt(total)])
        _emit(
            _csv_text(["label", "n_a_plus", "n_a_minus", "n_b_plus", "n_b_minus", "probability"], body),
            settings,
        )
    else:
        lines = [
            f"variant {settings.variant}, theta1 = {_fmt(settings.theta1)} "
            f"(2*theta1 = {_fmt(2 * settings.theta1)}), theta2 = {_fmt(settings.theta2)} "
            f"(2*theta2 = {_fmt(2 * settings.theta2)})",
            f"conditioned on: {table.conditioned_on}",
        ]
        lines += [f"P({pattern.label()}) = {_fmt(p)}" for pattern, p in rows]
        lines.append(f"sum = {_fmt(total)}")
        _emit("\n".join(lines) + "\n", settings)
    return 0


def cmd_correlation(settings: Settings) -> int:
    _require(settings, "variant", "alpha")
    table = experiment.station_probabilities(
        Configuration(settings.variant, settings.theta1, settings.theta2)
    )
    value = bell.correlation(table, settings.alpha)
    payload = {
        "variant": settings.variant,
        "alpha": _num(settings.alpha),
        **_angle_fields("theta1", settings.theta1),
        **_angle_fields("theta2", settings.theta2),
        "correlation": _num(value),
    }
    if settings.format == "csv":
        _emit(_csv_text(list(payload), [list(payload.values())]), settings)
    else:
        _emit(json.dumps(payload, indent=2) + "\n", settings)
    return 0


def _chsh_payload(result: bell.ChshResult, mode: str) -> dict[str, Any]:
    angles = result.angles
    return {
        "mode": mode,
        "alpha": _num(result.alpha),
        "s": _num(result.s),
        "violated": result.violated,
        "angles": {
            "theta1": _num(angles.theta1),
            "theta1p": _num(angles.theta1p),
            "theta2": _num(angles.theta2),
            "theta2p": _num(angles.theta2p),
        },
        "doubled_angles": {
            "theta1": _num(2 * angles.theta1),
            "theta1p": _num(2 * angles.theta1p),
            "theta2": _num(2 * angles.theta2),
            "theta2p": _num(2 * angles.theta2p),
        },
    }


def cmd_chsh_max(settings: Settings) -> int:
    _require(settings, "variant", "alpha")
    primed = (settings.theta1p, settings.theta2p)
    if any(v is not None for v in primed) and not all(v is not None for v in primed):
        raise UsageError("give both --theta1p and --theta2p to evaluate a fixed angle set")
    if all(v is not None for v in primed):
        angles = AngleSet(settings.theta1, settings.theta1p, settings.theta2, settings.theta2p)
        result = bell.chsh(settings.variant, angles, settings.alpha)
        payload = {"variant": settings.variant, **_chsh_payload(result, "evaluated")}
    else:
        result = bell.maximize_chsh(settings.variant, settings.alpha, grid_step=settings.grid_step)
        payload = {"variant": settings.variant, **_chsh_payload(result, "maximized")}
    if settings.format == "csv":
        flat = {
            "variant": payload["variant"],
            "mode": payload["mode"],
            "alpha": payload["alpha"],
            "s": payload["s"],
            "violated": payload["violated"],
            **{k: v for k, v in payload["angles"].items()},
            **{f"{k}_doubled": v for k, v in payload["doubled_angles"].items()},
        }
        _emit(_csv_text(list(flat), [list(flat.values())]), settings)
    else:
        _emit(json.dumps(payload, indent=2) + "\n", settings)
    return 0


def cmd_alpha_threshold(settings: Settings) -> int:
    _require(settings, "variant")
    result = bell.alpha_threshold(settings.variant, grid_step=settings.grid_step)
    payload = {
        "variant": settings.variant,
        "alpha_star": _num(result.alpha_star),
        "always_violated": result.always_violated,
    }
    if settings.format == "csv":
        _emit(_csv_text(list(payload), [list(payload.values())]), settings)
    else:
        _emit(json.dumps(payload, indent=2) + "\n", settings)
    return 0


def cmd_scan(settings: Settings) -> int:
    _require(settings, "which")
    which = settings.which
    n = settings.points
    if which == "chsh-vs-alpha":
        _require(settings, "variant")
        alphas = np.linspace(0.0, 1.0, n)
        rows = []
        for a in alphas:
            result = bell.maximize_chsh(settings.variant, float(a), grid_step=settings.grid_step)
            rows.append([_fmt(float(a)), _fmt(result.s)])
        text = _csv_text(["alpha", "s_max"], rows)
    elif which == "hom-dip":
        grid = np.linspace(0.0, math.pi / 2, n)
        pairs = experiment.hom_scan(float(t) for t in grid)
        text = _csv_text(
            ["theta1", "coincidence_probability"],
            [[_fmt(t), _fmt(p)] for t, p in pairs],
        )
    elif which == "fringe":
        _require(settings, "variant", "alpha")
        deltas = np.linspace(0.0, math.pi, n)
        rows = []
        for d in deltas:
            table = experiment.station_probabilities(
                Configuration(settings.variant, float(d), 0.0)
            )
            rows.append([_fmt(float(d)), _fmt(bell.correlation(table, settings.alpha))])
        text = _csv_text(["delta", "correlation"], rows)
    else:
        raise UsageError(f"unknown scan {which!r} (chsh-vs-alpha | hom-dip | fringe)")
    if settings.format == "json":
        reader = csv.reader(io.StringIO(text))
        header = next(reader)
        payload = {"which": which, "rows": [dict(zip(header, row)) for row in reader]}
        _emit(json.dumps(payload, indent=2) + "\n", settings)
    else:
        _emit(text, settings)
    return 0


def _verify_suites(inject_error: bool) -> list[tuple[str, bool, str]]:
    rng = np.random.default_rng(20260819)
    results: list[tuple[str, bool, str]] = []
    bias = 1e-6 if inject_error else 0.0

    worst = 0.0
    for _ in range(5):
        t1, t2 = rng.uniform(-math.pi, math.pi, size=2)
        for variant in ("A", "B"):
            cfg = Configuration(variant, float(t1), float(t2))
            pipe = experiment.station_probabilities(cfg)
            dense = oracle.oracle_probabilities(cfg)
            for p in TWO_PHOTON_PATTERNS:
                worst = max(worst, abs(pipe[p] - dense[p]))
    results.append((
        "pipeline vs dense reference (10 settings, both variants)",
        worst < 1e-10, f"max deviation {worst:.3e}",
    ))

    worst = 0.0
    for _ in range(5):
        t1, t2 = rng.uniform(-math.pi, math.pi, size=2)
        for variant in ("A", "B"):
            pipe = experiment.station_probabilities(Configuration(variant, float(t1), float(t2)))
            closed = oracle.analytic_probabilities(variant, float(t1), float(t2))
            for p in TWO_PHOTON_PATTERNS:
                worst = max(worst, abs(pipe[p] + bias - closed[p]))
    results.append((
        "pipeline vs closed-form tables (10 settings, both variants)",
        worst < 1e-10, f"max deviation {worst:.3e}",
    ))

    worst = 0.0
    for _ in range(20):
        t1, t2 = rng.uniform(-math.pi, math.pi, size=2)
        a = float(rng.uniform(0.0, 1.0))
        for variant in ("A", "B"):
            table = experiment.station_probabilities(Configuration(variant, float(t1), float(t2)))
            got = bell.correlation(table, a)
            want = oracle.analytic_correlation(variant, float(t1), float(t2), a)
            worst = max(worst, abs(got - want))
    results.append((
        "pipeline correlation vs closed form (20 settings, both variants)",
        worst < 1e-9, f"max deviation {worst:.3e}",
    ))

    pinned = [
        ("B", 1.0, AngleSet(-1.30278 / 2, -2.87435 / 2, 1.05326 / 2, 2.62386 / 2), 2.16569),
        ("B", 0.0, AngleSet(0.0837317 / 2, -1.0749 / 2, 3.05769 / 2, 4.21568 / 2), 2.11453),
    ]
    worst = 0.0
    cross = 0.0
    for variant, a, angles, expected in pinned:
        result = bell.chsh(variant, angles, a)
        worst = max(worst, abs(result.s - expected))
        cross = max(cross, abs(result.s - oracle.analytic_chsh(variant, angles, a)))
    results.append((
        "CHSH at the two pinned angle sets",
        worst < 1e-4 and cross < 1e-9,
        f"max deviation from reported values {worst:.3e}, from closed form {cross:.3e}",
    ))

    from .experiment import _selected_state

    dev_a = abs(_selected_state("A")[1] - 13.0)
    dev_b = abs(_selected_state("B")[1] - 2.5)
    results.append((
        "post-selected squared norms (13 and 5/2)",
        dev_a < 1e-10 and dev_b < 1e-10, f"deviations {dev_a:.3e}, {dev_b:.3e}",
    ))
    return results


def cmd_verify(settings: Settings, inject_error: bool = False) -> int:
    suites = _verify_suites(inject_error)
    lines = []
    failed = 0
    for name, ok, detail in suites:
        status = "ok" if ok else "FAIL"
        if not ok:
            failed += 1
        lines.append(f"[{status}] {name}: {detail}")
    lines.append(
        "all checks passed" if failed == 0 else f"{failed} of {len(suites)} suites failed"
    )
    _emit("\n".join(lines) + "\n", settings)
    return 0 if failed == 0 else 1


# -- parser --------------------------------------------------------------------


def _add_common(sub: argparse.ArgumentParser, *, angles: bool = False, primed: bool = False) -> None:
    sub.add_argument("--config", help="flat key = value file; flags win over file values")
    sub.add_argument("--variant", choices=["A", "B"], default=None, help="trigger configuration")
    sub.add_argument("--alpha", type=float, default=None, help="detector distinguishability in [0, 1]")
    if angles:
        sub.add_argument("--theta1", type=float, default=None, help="station-a analyzer angle")
        sub.add_argument("--theta2", type=float, default=None, help="station-b analyzer angle")
    if primed:
        sub.add_argument("--theta1p", type=float, default=None, help="alternate station-a angle")
        sub.add_argument("--theta2p", type=float, default=None, help="alternate station-b angle")
    sub.add_argument("--degrees", action="store_true", default=None, help="angles are degrees")
    sub.add_argument("--format", choices=["json", "csv"], default=None, help="output format")
    sub.add_argument("--out", default=None, help="write output to this file instead of stdout")
    sub.add_argument("--grid-step", dest="grid_step", type=float, default=None,
                     help="coarse grid step of the maximizer, radians")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="swapbell",
        description="post-selected detection statistics and CHSH analysis "
                    "for entanglement swapping with spontaneous pair sources",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    sub = commands.add_parser("probabilities", help="conditional pattern table for one setting")
    _add_common(sub, angles=True)
    sub.set_defaults(handler=cmd_probabilities)

    sub = commands.add_parser("correlation", help="correlation value for one setting")
    _add_common(sub, angles=True)
    sub.set_defaults(handler=cmd_correlation)

    sub = commands.add_parser("chsh-max", help="maximize S (or evaluate it at a full angle set)")
    _add_common(sub, angles=True, primed=True)
    sub.set_defaults(handler=cmd_chsh_max)

    sub = commands.add_parser("alpha-threshold", help="distinguishability where S* reaches 2")
    _add_common(sub)
    sub.set_defaults(handler=cmd_alpha_threshold)

    sub = commands.add_parser("scan", help="CSV sweeps")
    sub.add_argument("--which", choices=["chsh-vs-alpha", "hom-dip", "fringe"], default=None)
    sub.add_argument("--points", type=int, default=None, help="number of grid points")
    _add_common(sub, angles=True)
    sub.set_defaults(handler=cmd_scan)

    sub = commands.add_parser("verify", help="run the built-in consistency checks")
    _add_common(sub)
    sub.add_argument("--inject-error", action="store_true", help=argparse.SUPPRESS)
    sub.set_defaults(handler=cmd_verify)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        settings = _resolve(args)
        if args.handler is cmd_verify:
            return cmd_verify(settings, inject_error=bool(getattr(args, "inject_error", False)))
        return args.handler(settings)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entry() -> None:
    raise SystemExit(main())
