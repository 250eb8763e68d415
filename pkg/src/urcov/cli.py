"""Command-line front end.

Subcommands write CSV (comma separated, ``\\n`` line endings, 17 significant
digits) preceded by ``# key=value`` lines that echo the fully resolved
configuration. Settings come from flags, then from an optional flat
``key=value`` file given with ``--config``, then from built-in defaults.

Exit codes: 0 success, 1 validation failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import enum
import math
import sys
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, TextIO

import numpy as np

from urcov import __version__, validation
from urcov.coverage import BoundKind, coverage_bound, coverage_exact
from urcov.rate import RATE_BOUND_KINDS, rate_bound, rate_max_exact
from urcov.simulator import Mode, SimConfig, simulate_joint_coverage
from urcov.specfun import ModelParams

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2

COVERAGE_KINDS = (
    BoundKind.LbA,
    BoundKind.UbA,
    BoundKind.LbB,
    BoundKind.UbB,
    BoundKind.LbC,
    BoundKind.UbC,
    BoundKind.LbX,
    BoundKind.LbPlus,
)


class UsageError(Exception):
    """Invalid command-line or config-file input (exit code 2)."""


class Axis(enum.Enum):
    Threshold = "threshold"
    Reliability = "reliability"


class Spacing(enum.Enum):
    Linear = "linear"
    Log = "log"
    LogitComplement = "logit-complement"


class Unit(enum.Enum):
    Nats = "nats"
    Bits = "bits"


def _parse_enum(cls, text: str):
    key = str(text).strip().lower()
    for member in cls:
        if member.value == key:
            return member
    choices = ", ".join(m.value for m in cls)
    raise UsageError(f"invalid {cls.__name__.lower()} {text!r} (choose from {choices})")


@dataclass(frozen=True)
class SweepSpec:
    params: ModelParams
    axis: Axis
    axis_min: float
    axis_max: float
    points: int
    spacing: Spacing
    kinds: tuple
    unit: Unit = Unit.Nats

    def __post_init__(self):
        if not self.axis_min < self.axis_max:
            raise UsageError(f"axis range must satisfy min < max, got [{self.axis_min}, {self.axis_max}]")
        if self.points < 2:
            raise UsageError(f"points must be >= 2, got {self.points}")
        if self.axis is Axis.Reliability:
            if not (0.0 < self.axis_min and self.axis_max < 1.0):
                raise UsageError("reliability values must lie strictly inside (0, 1)")
        else:
            if self.axis_min < 0.0 or not math.isfinite(self.axis_max):
                raise UsageError("thresholds must be finite and >= 0")
            if self.spacing is Spacing.LogitComplement:
                raise UsageError("logit-complement spacing applies to the reliability axis only")
        if self.spacing is Spacing.Log and self.axis_min <= 0.0:
            raise UsageError("log spacing needs a positive lower end")

    def values(self) -> np.ndarray:
        lo, hi, k = self.axis_min, self.axis_max, self.points
        if self.spacing is Spacing.Linear:
            return np.linspace(lo, hi, k)
        if self.spacing is Spacing.Log:
            return np.geomspace(lo, hi, k)
        # uniform in log(1 - eta): dense near eta = 1
        return 1.0 - np.geomspace(1.0 - lo, 1.0 - hi, k)


# ---------------------------------------------------------------------------
# option resolution

# key -> (type, default) per subcommand
_MODEL_DEFAULTS = {"alpha": (float, 4.0), "n": (int, 3)}
DEFAULTS: Dict[str, Dict[str, tuple]] = {
    "coverage-sweep": {
        **_MODEL_DEFAULTS,
        "t_min": (float, 0.01),
        "t_max": (float, 100.0),
        "points": (int, 81),
        "spacing": (str, "log"),
        "kinds": (str, ",".join(k.value for k in COVERAGE_KINDS)),
    },
    "rate-sweep": {
        **_MODEL_DEFAULTS,
        "n": (int, 1),
        "eta_min": (float, 0.3),
        "eta_max": (float, 0.999),
        "points": (int, 50),
        "spacing": (str, "linear"),
        "kinds": (str, ",".join(k.value for k in RATE_BOUND_KINDS)),
        "unit": (str, "nats"),
    },
    "simulate": {
        **_MODEL_DEFAULTS,
        "thresholds": (str, "0.1,1,10"),
        "trials": (int, 100_000),
        "seed": (int, 0),
        "mode": (str, "static"),
        "radius": (float, 30.0),
        "density": (float, 1.0),
        "far_field": (bool, True),
    },
    "validate": {"quick": (bool, False)},
}


def _convert(key: str, typ, raw):
    if isinstance(raw, typ) and not (typ is int and isinstance(raw, bool)):
        return raw
    text = str(raw).strip()
    try:
        if typ is bool:
            lowered = text.lower()
            if lowered in ("1", "true", "yes", "on"):
                return True
            if lowered in ("0", "false", "no", "off"):
                return False
            raise ValueError(text)
        if typ is int:
            return int(text)
        if typ is float:
            return float(text)
    except ValueError:
        raise UsageError(f"invalid value for {key}: {raw!r}") from None
    return text


def read_config_file(path: str) -> Dict[str, str]:
    """Parse a flat ``key=value`` file; ``#`` starts a comment line."""
    out = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from None
    for lineno, line in enumerate(lines, start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        out[key.strip().replace("-", "_")] = value.strip()
    return out


def resolve_options(command: str, flags: Dict[str, object], config_path: Optional[str]) -> Dict[str, object]:
    """Merge flags > config file > defaults into a typed dict."""
    table = DEFAULTS[command]
    from_file = read_config_file(config_path) if config_path else {}
    unknown = sorted(set(from_file) - set(table))
    if unknown:
        raise UsageError(f"unknown key(s) in config file for {command}: {', '.join(unknown)}")
    resolved = {}
    for key, (typ, default) in table.items():
        if flags.get(key) is not None:
            raw = flags[key]
        elif key in from_file:
            raw = from_file[key]
        else:
            raw = default
        resolved[key] = _convert(key, typ, raw)
    return resolved


def _parse_kinds(text: str, allowed: Sequence[BoundKind]) -> tuple:
    kinds = []
    for part in text.split(","):
        if not part.strip():
            continue
        try:
            kind = BoundKind.parse(part)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        if kind not in allowed:
            names = ", ".join(k.value for k in allowed)
            raise UsageError(f"kind {kind.value} not available here (choose from {names})")
        if kind not in kinds:
            kinds.append(kind)
    if not kinds:
        raise UsageError("at least one bound kind is required")
    return tuple(kinds)


def _parse_floats(key: str, text: str) -> tuple:
    try:
        return tuple(float(p) for p in text.split(",") if p.strip())
    except ValueError:
        raise UsageError(f"invalid value for {key}: {text!r}") from None


def _model(opts) -> ModelParams:
    try:
        return ModelParams(opts["alpha"], opts["n"])
    except ValueError as exc:
        raise UsageError(str(exc)) from None


# ---------------------------------------------------------------------------
# output

def fmt(x: float) -> str:
    return format(float(x), ".17g")


def _write_header(out: TextIO, command: str, opts: Dict[str, object]) -> None:
    out.write(f"# urcov {__version__} {command}\n")
    for key in sorted(opts):
        value = opts[key]
        if isinstance(value, bool):
            value = str(value).lower()
        out.write(f"# {key}={value}\n")


def _writer(out: TextIO):
    return csv.writer(out, lineterminator="\n")


def cmd_coverage_sweep(spec: SweepSpec, out: TextIO) -> int:
    if spec.axis is not Axis.Threshold:
        raise UsageError("coverage sweep needs the threshold axis")
    w = _writer(out)
    w.writerow(["t", "t_dB", "exact"] + [k.value for k in spec.kinds])
    for t in spec.values():
        t = float(t)
        t_db = 10.0 * math.log10(t) if t > 0.0 else -math.inf
        row = [fmt(t), fmt(t_db), fmt(coverage_exact(spec.params, t))]
        for kind in spec.kinds:
            if kind is BoundKind.UbB and t == 0.0:
                row.append(fmt(math.inf))
            else:
                row.append(fmt(coverage_bound(spec.params, t, kind)))
        w.writerow(row)
    return EXIT_OK


def cmd_rate_sweep(spec: SweepSpec, out: TextIO) -> int:
    if spec.axis is not Axis.Reliability:
        raise UsageError("rate sweep needs the reliability axis")
    scale = 1.0 / math.log(2.0) if spec.unit is Unit.Bits else 1.0
    w = _writer(out)
    w.writerow(["eta", "exact"] + [k.value for k in spec.kinds] + ["binding"])
    for eta in spec.values():
        eta = float(eta)
        sol = rate_max_exact(spec.params, eta)
        row = [fmt(eta), fmt(sol.rate_nats * scale)]
        row += [fmt(rate_bound(spec.params, eta, k) * scale) for k in spec.kinds]
        row.append("true" if sol.binding else "false")
        w.writerow(row)
    return EXIT_OK


def analytic_joint(config: SimConfig, t: float) -> float:
    """Analytic joint coverage for the simulated location model."""
    if config.mode is Mode.Iid:
        return coverage_exact(ModelParams(config.params.alpha, 1), t) ** config.params.n
    return coverage_exact(config.params, t)


def cmd_simulate(config: SimConfig, out: TextIO, workers: Optional[int] = None) -> int:
    w = _writer(out)
    w.writerow(["threshold", "mode", "joint", "std_error", "marginal", "analytic_exact", "z_score"])
    for est in simulate_joint_coverage(config, workers):
        exact = analytic_joint(config, est.threshold)
        diff = est.joint_coverage - exact
        if est.std_error > 0.0:
            z = diff / est.std_error
        else:
            z = 0.0 if diff == 0.0 else math.copysign(math.inf, diff)
        w.writerow([
            fmt(est.threshold),
            config.mode.value,
            fmt(est.joint_coverage),
            fmt(est.std_error),
            fmt(est.marginal_coverage),
            fmt(exact),
            fmt(z),
        ])
    return EXIT_OK


def cmd_validate(out: TextIO, quick: bool = False, suites=None) -> int:
    if suites is None:
        suites = validation.SUITES
    failed = 0
    for suite in suites:
        result = suite(quick)
        out.write(result.summary() + "\n")
        out.flush()
        failed += not result.passed
    out.write(f"{len(suites) - failed}/{len(suites)} suites passed\n")
    return EXIT_OK if failed == 0 else EXIT_FAILED


# ---------------------------------------------------------------------------
# argument parsing

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="urcov",
        description="n-successive SIR coverage, reliability-constrained rate and Monte Carlo checks.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="FILE", help="flat key=value file (flags override it)")
    common.add_argument("--output", "-o", metavar="FILE", help="write CSV here instead of stdout")

    model = argparse.ArgumentParser(add_help=False)
    model.add_argument("--alpha", help="path-loss exponent (> 2)")
    model.add_argument("--n", help="number of successive receptions")

    spacing = [s.value for s in Spacing]

    p = sub.add_parser("coverage-sweep", parents=[common, model], help="coverage and bounds versus threshold")
    p.add_argument("--t-min", dest="t_min")
    p.add_argument("--t-max", dest="t_max")
    p.add_argument("--points")
    p.add_argument("--spacing", choices=spacing)
    p.add_argument("--kinds", help="comma-separated bound kinds")

    p = sub.add_parser("rate-sweep", parents=[common, model], help="maximum average rate versus reliability")
    p.add_argument("--eta-min", dest="eta_min")
    p.add_argument("--eta-max", dest="eta_max")
    p.add_argument("--points")
    p.add_argument("--spacing", choices=spacing)
    p.add_argument("--kinds", help="comma-separated bound kinds")
    p.add_argument("--unit", choices=[u.value for u in Unit])

    p = sub.add_parser("simulate", parents=[common, model], help="Monte Carlo joint coverage")
    p.add_argument("--thresholds", help="comma-separated linear SIR thresholds")
    p.add_argument("--trials")
    p.add_argument("--seed")
    p.add_argument("--mode", choices=[m.value for m in Mode])
    p.add_argument("--radius", help="simulation disc radius")
    p.add_argument("--density", help="BS density per unit area")
    p.add_argument("--no-far-field", dest="far_field", action="store_const", const=False,
                   help="drop the mean interference from outside the disc")

    p = sub.add_parser("validate", parents=[common], help="run every self-check suite")
    p.add_argument("--quick", action="store_const", const=True, help="reduced Monte Carlo trial counts")
    return parser


def _build_spec(command: str, opts) -> SweepSpec:
    params = _model(opts)
    spacing = _parse_enum(Spacing, opts["spacing"])
    if command == "coverage-sweep":
        return SweepSpec(params, Axis.Threshold, opts["t_min"], opts["t_max"], opts["points"], spacing,
                         _parse_kinds(opts["kinds"], COVERAGE_KINDS))
    return SweepSpec(params, Axis.Reliability, opts["eta_min"], opts["eta_max"], opts["points"], spacing,
                     _parse_kinds(opts["kinds"], RATE_BOUND_KINDS), _parse_enum(Unit, opts["unit"]))


def _build_sim_config(opts) -> SimConfig:
    params = _model(opts)
    try:
        return SimConfig(
            params,
            _parse_floats("thresholds", opts["thresholds"]),
            trials=opts["trials"],
            seed=opts["seed"],
            mode=_parse_enum(Mode, opts["mode"]),
            bs_density=opts["density"],
            region_radius=opts["radius"],
            far_field=opts["far_field"],
        )
    except UsageError:
        raise
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _run(args) -> int:
    flags = {k: v for k, v in vars(args).items() if k not in ("command", "config", "output")}
    opts = resolve_options(args.command, flags, args.config)
    if args.command == "coverage-sweep" or args.command == "rate-sweep":
        spec = _build_spec(args.command, opts)
        job = cmd_coverage_sweep if args.command == "coverage-sweep" else cmd_rate_sweep
        run = lambda out: job(spec, out)  # noqa: E731
    elif args.command == "simulate":
        config = _build_sim_config(opts)
        run = lambda out: cmd_simulate(config, out)  # noqa: E731
    else:
        return cmd_validate(sys.stdout, quick=opts["quick"])

    with contextlib.ExitStack() as stack:
        if args.output and args.output != "-":
            try:
                out = stack.enter_context(open(args.output, "w", encoding="utf-8", newline=""))
            except OSError as exc:
                raise UsageError(f"cannot write {args.output}: {exc}") from None
        else:
            out = sys.stdout
        _write_header(out, args.command, opts)
        return run(out)


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _run(args)
    except UsageError as exc:
        print(f"urcov {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
