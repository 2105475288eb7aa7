"""Command-line runner for the verification suites.

Usage::

    wandering-verify                                  # every suite, Bergman, n=2, d=(10,10)
    wandering-verify --suite scalar-inequality --trials 100000 --seed 7
    wandering-verify --suite beurling-1d --theta 0,0,1
    wandering-verify --config run.yaml --format json --format csv

Exit codes:
    0: every selected suite passed
    1: at least one verification failed
    2: configuration error (nothing was computed)
    3: I/O error while writing reports
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import asdict, dataclass, field, replace
from datetime import datetime, timezone
from pathlib import Path
from typing import Sequence

import yaml

from . import __version__
from .errors import ArgumentError
from .spaces import SPACE_KINDS, CUSTOM
from .suites import (
    ANGLE_TOL,
    PSD_TOL,
    RESIDUAL_TOL,
    CaseSpec,
    VerificationReport,
    clean_coefficients,
    run_beurling_1d,
    run_converse_suite,
    run_negative_examples,
    run_single_shift_suite,
    run_wandering_tuple_suite,
    scalar_inequality_suite,
)

EXIT_PASS, EXIT_FAIL, EXIT_CONFIG, EXIT_IO = 0, 1, 2, 3

SUITES = ("scalar-inequality", "theorem-2-1", "theorem-2-3", "theorem-2-5", "beurling-1d", "negative-examples")
SELECTORS = SUITES + ("all",)
OUTPUT_ENV = "WANDERING_OUTPUT_DIR"
DEFAULT_OUTPUT = "wandering-reports"
FORMATS = ("json", "csv")

_SETTING_KEYS = ("space", "n", "caps", "alpha", "seed", "trials", "theta", "generators", "recipe", "margin",
                 "residual_tol", "angle_tol", "psd_tol")


class ConfigError(ValueError):
    """Malformed or inconsistent run configuration."""


@dataclass(frozen=True)
class SuiteSettings:
    space: str = "bergman"
    n: int = 2
    caps: tuple[int, ...] = (10, 10)
    alpha: tuple[int, ...] = (1, 2)
    seed: int = 42
    trials: int = 100_000
    theta: tuple = (0.0, 0.0, 1.0)
    generators: tuple = ()
    recipe: str = "tensor"
    margin: int = 1
    residual_tol: float = RESIDUAL_TOL
    angle_tol: float = ANGLE_TOL
    psd_tol: float = PSD_TOL

    def case(self) -> CaseSpec:
        return CaseSpec(space=self.space, caps=self.caps, alpha=self.alpha, recipe=self.recipe,
                        generators=self.generators, margin=self.margin, residual_tol=self.residual_tol,
                        angle_tol=self.angle_tol, psd_tol=self.psd_tol, seed=self.seed)

    def to_dict(self) -> dict:
        d = asdict(self)
        for k in ("caps", "alpha"):
            d[k] = list(d[k])
        d["theta"] = [_plain_coef(c) for c in self.theta]
        d["generators"] = _listify(self.generators)
        return d


@dataclass(frozen=True)
class RunConfig:
    suites: tuple[str, ...] = SUITES
    defaults: SuiteSettings = field(default_factory=SuiteSettings)
    overrides: dict = field(default_factory=dict)
    output_dir: str = DEFAULT_OUTPUT
    formats: tuple[str, ...] = ("json",)
    quiet: bool = False

    def settings(self, suite: str) -> SuiteSettings:
        return self.overrides.get(suite, self.defaults)

    def to_dict(self) -> dict:
        return {
            "suites": list(self.suites),
            "settings": {s: self.settings(s).to_dict() for s in self.suites},
            "output_dir": self.output_dir,
            "formats": list(self.formats),
        }


def _listify(x):
    if isinstance(x, (list, tuple)):
        return [_listify(v) for v in x]
    if isinstance(x, complex):
        return _plain_coef(x)
    return x


def _plain_coef(c):
    if isinstance(c, (list, tuple)):
        return [float(v) for v in c]
    c = complex(c)
    return c.real if c.imag == 0 else [c.real, c.imag]


def _parse_coef(text, where: str):
    if isinstance(text, (int, float)):
        return complex(text)
    if isinstance(text, (list, tuple)) and len(text) == 2:
        return complex(float(text[0]), float(text[1]))
    try:
        return complex(str(text).replace(" ", ""))
    except ValueError:
        raise ConfigError(f"field {where!r}: cannot read coefficient {text!r}") from None


def _int_list(value, where: str) -> tuple[int, ...]:
    if isinstance(value, str):
        value = [v for v in value.replace(" ", "").split(",") if v]
    if isinstance(value, int):
        value = [value]
    try:
        return tuple(int(v) for v in value)
    except (TypeError, ValueError):
        raise ConfigError(f"field {where!r}: expected a list of integers, got {value!r}") from None


def _number(value, where: str, kind=float):
    try:
        return kind(value)
    except (TypeError, ValueError):
        raise ConfigError(f"field {where!r}: expected a number, got {value!r}") from None


def _apply(base: SuiteSettings, raw: dict, where: str) -> SuiteSettings:
    if not isinstance(raw, dict):
        raise ConfigError(f"field {where!r}: expected a mapping")
    unknown = set(raw) - set(_SETTING_KEYS) - {"tolerances", "tolerance"}
    if unknown:
        raise ConfigError(f"field {where!r}: unknown keys {sorted(unknown)}")
    upd = {}
    if "space" in raw:
        upd["space"] = str(raw["space"]).lower()
    if "n" in raw:
        upd["n"] = _number(raw["n"], f"{where}.n", int)
    if "caps" in raw:
        upd["caps"] = _int_list(raw["caps"], f"{where}.caps")
    if "alpha" in raw:
        upd["alpha"] = _int_list(raw["alpha"], f"{where}.alpha")
    for key in ("seed", "trials", "margin"):
        if key in raw:
            upd[key] = _number(raw[key], f"{where}.{key}", int)
    if "recipe" in raw:
        upd["recipe"] = str(raw["recipe"])
    if "theta" in raw:
        theta = raw["theta"]
        if isinstance(theta, str):
            theta = [t for t in theta.replace(" ", "").split(",") if t]
        upd["theta"] = tuple(_parse_coef(c, f"{where}.theta") for c in theta)
    if "generators" in raw:
        upd["generators"] = _listify(raw["generators"])
    tol = raw.get("tolerance")
    if tol is not None:
        t = _number(tol, f"{where}.tolerance")
        upd.update(residual_tol=t, angle_tol=t, psd_tol=t)
    tols = dict(raw.get("tolerances") or {})
    for key in ("residual", "angle", "psd"):
        if key in tols:
            upd[f"{key}_tol"] = _number(tols.pop(key), f"{where}.tolerances.{key}")
    if tols:
        raise ConfigError(f"field {where}.tolerances: unknown keys {sorted(tols)}")
    for key in ("residual_tol", "angle_tol", "psd_tol"):
        if key in raw:
            upd[key] = _number(raw[key], f"{where}.{key}")
    s = replace(base, **upd)
    # caps and n follow each other unless both are given
    if "n" in upd and "caps" not in upd:
        s = replace(s, caps=(10 if s.n <= 2 else 5,) * s.n)
    elif "caps" in upd and "n" not in upd:
        s = replace(s, n=len(s.caps))
    if "n" in upd and "alpha" not in upd:
        s = replace(s, alpha=tuple(a for a in s.alpha if a <= s.n) or (1,))
    return s


def _validate(s: SuiteSettings, suite: str) -> None:
    where = f"settings[{suite}]"
    if s.space not in SPACE_KINDS or s.space == CUSTOM:
        raise ConfigError(f"{where}.space: unknown space {s.space!r}; use hardy, bergman or dirichlet")
    if s.n < 1:
        raise ConfigError(f"{where}.n: must be >= 1")
    if len(s.caps) != s.n:
        raise ConfigError(f"{where}.caps: {list(s.caps)} has {len(s.caps)} entries but n = {s.n}")
    if any(c < 2 for c in s.caps):
        raise ConfigError(f"{where}.caps: every cap must be >= 2")
    if not s.alpha or min(s.alpha) < 1 or max(s.alpha) > s.n:
        raise ConfigError(f"{where}.alpha: {list(s.alpha)} is not a non-empty subset of 1..{s.n}")
    if s.trials < 1:
        raise ConfigError(f"{where}.trials: must be >= 1")
    if s.margin < 1:
        raise ConfigError(f"{where}.margin: must be >= 1")
    if min(s.residual_tol, s.angle_tol, s.psd_tol) <= 0:
        raise ConfigError(f"{where}.tolerances: must be positive")
    if suite in ("theorem-2-5", "negative-examples") and s.n < 2:
        raise ConfigError(f"{where}.n: suite {suite} needs n >= 2")
    if suite == "beurling-1d":
        theta = list(s.theta)
        while theta and theta[-1] == 0:
            theta.pop()
        if not theta:
            raise ConfigError(f"{where}.theta: must be a nonzero polynomial")
        if len(theta) - 1 >= s.caps[0]:
            raise ConfigError(f"{where}.theta: degree {len(theta) - 1} must be below the cap {s.caps[0]}")
    if suite in ("theorem-2-3", "theorem-2-5"):
        try:
            s.case()
        except (ArgumentError, TypeError, ValueError) as e:
            raise ConfigError(f"{where}: {e}") from None
        if s.recipe == "tensor" and s.generators and len(s.generators) != s.n:
            raise ConfigError(f"{where}.generators: need one generator list per variable ({s.n})")


def _load_file(path: str) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from None
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        loc = f" at line {mark.line + 1}, column {mark.column + 1}" if mark else ""
        raise ConfigError(f"malformed config {path}{loc}: {getattr(e, 'problem', e)}") from None
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError(f"config {path}: top level must be a mapping")
    return data


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="wandering-verify",
                                description="Verify wandering-subspace properties of truncated shift tuples.")
    p.add_argument("--config", help="YAML (or JSON) run configuration")
    p.add_argument("--suite", action="append", choices=SELECTORS, help="suite to run (repeatable; default all)")
    p.add_argument("--space", help="hardy, bergman or dirichlet")
    p.add_argument("--n", type=int, help="number of variables")
    p.add_argument("--caps", help="comma-separated degree caps, e.g. 10,10")
    p.add_argument("--alpha", help="comma-separated 1-based variable subset, e.g. 1,2")
    p.add_argument("--seed", type=int)
    p.add_argument("--trials", type=int, help="samples for scalar-inequality")
    p.add_argument("--theta", help="ascending coefficients of theta for beurling-1d, e.g. 0,0,1 or 1,0.5j")
    p.add_argument("--generators", help="JSON list of per-variable generator coefficient lists")
    p.add_argument("--tolerance", type=float, help="set residual, angle and PSD tolerances at once")
    p.add_argument("--residual-tol", type=float)
    p.add_argument("--angle-tol", type=float)
    p.add_argument("--psd-tol", type=float)
    p.add_argument("--output-dir", help=f"report directory (default ${OUTPUT_ENV} or ./{DEFAULT_OUTPUT})")
    p.add_argument("--format", action="append", choices=FORMATS, help="report format (repeatable; default json)")
    p.add_argument("--quiet", action="store_true")
    return p


def parse_config(argv: Sequence[str] | None = None) -> RunConfig:
    """Resolve flags, an optional config file and defaults into a :class:`RunConfig`.

    Precedence: flags > file > defaults.  Raises :class:`ConfigError`.
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        if e.code == 0:
            raise
        raise ConfigError("invalid command-line arguments") from None
    data = _load_file(args.config) if args.config else {}
    known = {"suites", "output_dir", "formats", "overrides", "tolerances", "tolerance", *_SETTING_KEYS}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"config: unknown top-level keys {sorted(unknown)}")

    suites = args.suite or data.get("suites") or ["all"]
    if isinstance(suites, str):
        suites = [suites]
    bad = [s for s in suites if s not in SELECTORS]
    if bad:
        raise ConfigError(f"field 'suites': unknown selector(s) {bad}; expected {list(SELECTORS)}")
    resolved = []
    for s in suites:
        for name in (SUITES if s == "all" else (s,)):
            if name not in resolved:
                resolved.append(name)

    base = _apply(SuiteSettings(), {k: v for k, v in data.items() if k in _SETTING_KEYS or k.startswith("toler")},
                  "config")
    flag_raw = {}
    for key in ("space", "n", "caps", "alpha", "seed", "trials", "theta", "tolerance", "residual_tol",
                "angle_tol", "psd_tol"):
        v = getattr(args, key)
        if v is not None:
            flag_raw[key] = v
    if args.generators is not None:
        try:
            flag_raw["generators"] = json.loads(args.generators)
        except json.JSONDecodeError as e:
            raise ConfigError(f"--generators: {e}") from None

    overrides_raw = data.get("overrides") or {}
    if not isinstance(overrides_raw, dict):
        raise ConfigError("field 'overrides': expected a mapping of suite name to settings")
    for name in overrides_raw:
        if name not in SUITES:
            raise ConfigError(f"field 'overrides': unknown suite {name!r}")
    defaults = _apply(base, flag_raw, "flags")
    overrides = {}
    for name in resolved:
        s = defaults
        if name in overrides_raw:
            s = _apply(_apply(base, overrides_raw[name], f"overrides.{name}"), flag_raw, "flags")
        if name == "beurling-1d":
            s = replace(s, n=1, caps=(s.caps[0],), alpha=(1,))
        _validate(s, name)
        if s != defaults:
            overrides[name] = s
    output_dir = args.output_dir or data.get("output_dir") or os.environ.get(OUTPUT_ENV) or DEFAULT_OUTPUT
    formats = args.format or data.get("formats") or ["json"]
    if isinstance(formats, str):
        formats = [formats]
    bad = [f for f in formats if f not in FORMATS]
    if bad:
        raise ConfigError(f"field 'formats': unknown format(s) {bad}")
    return RunConfig(tuple(resolved), defaults, overrides, str(output_dir), tuple(dict.fromkeys(formats)),
                     args.quiet)


# -- execution -----------------------------------------------------------------------

def run_suite(name: str, s: SuiteSettings) -> VerificationReport:
    if name == "scalar-inequality":
        return scalar_inequality_suite(s.trials, s.seed, s.psd_tol)
    if name == "theorem-2-1":
        return run_single_shift_suite(s.space, s.caps, s.residual_tol, s.angle_tol, s.psd_tol)
    if name == "theorem-2-3":
        return run_wandering_tuple_suite(s.case())
    if name == "theorem-2-5":
        probe = replace(s.case(), recipe="vanishing", generators=())
        return run_converse_suite([s.case(), probe])
    if name == "beurling-1d":
        return run_beurling_1d(s.space, s.theta, s.caps[0], s.residual_tol, s.angle_tol)
    if name == "negative-examples":
        return run_negative_examples(s.space, s.caps, s.residual_tol, s.angle_tol, s.margin)
    raise ConfigError(f"unknown suite {name!r}")


def _fmt_float(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    text = format(x, ".17g")
    if not any(ch in text for ch in ".en"):
        text += ".0"
    return text


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON text with floats written to 17 significant digits."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return _fmt_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k), ensure_ascii=False)}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(dumps(v) for v in obj) + "]"
        items = [pad + dumps(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def build_report(config: RunConfig, reports: list[VerificationReport]) -> dict:
    return {
        "tool_version": __version__,
        "config": config.to_dict(),
        "suites": [r.to_dict() for r in reports],
        "overall_pass": all(r.passed for r in reports),
        "timestamp": {
            "utc": datetime.now(timezone.utc).isoformat(timespec="seconds"),
            "wall_time_s": {r.suite: round(r.wall_time, 6) for r in reports},
        },
    }


def _csv_text(config: RunConfig, reports: list[VerificationReport]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["suite", "space", "n", "d", "alpha", "residual", "angle", "min_eig", "pass"])
    for r in reports:
        s = config.settings(r.suite)
        for c in r.cases:
            inp = c.inputs
            space = inp.get("space", s.space if r.suite != "scalar-inequality" else "")
            caps = inp.get("caps", [inp["cap"]] if "cap" in inp else list(s.caps))
            alpha = inp.get("alpha", list(s.alpha))
            opt = [c.max_residual, c.max_angle, c.min_eigenvalue]
            w.writerow([r.suite + ":" + c.name, space, len(caps), "x".join(map(str, caps)),
                        ",".join(map(str, alpha))]
                       + ["" if v is None else _fmt_float(float(v)) for v in opt]
                       + [str(bool(c.passed)).lower()])
    return buf.getvalue()


def _summary(r: VerificationReport) -> str:
    tag = "PASS" if r.passed else "FAIL"
    res = [c.max_residual for c in r.cases if c.max_residual is not None]
    ang = [c.max_angle for c in r.cases if c.max_angle is not None]
    parts = [f"[{tag}] {r.suite:<18} cases={len(r.cases)}"]
    if res:
        parts.append(f"max_residual={max(res):.3e}")
    if ang:
        parts.append(f"max_angle={max(ang):.3e}")
    return "  ".join(parts)


def _coef_text(c) -> str:
    if isinstance(c, list):
        z = complex(*c)
        return f"{z}".strip("()")
    return str(int(c)) if float(c).is_integer() else repr(float(c))


def run(config: RunConfig, out=None) -> int:
    """Execute the suites of ``config``, write reports and return the exit status."""
    out = out or sys.stdout
    quiet = config.quiet
    reports = []
    for name in config.suites:
        r = run_suite(name, config.settings(name))
        reports.append(r)
        if not quiet:
            print(_summary(r), file=out)
            if name == "beurling-1d":
                for vec in r.cases[0].details["w_basis"]:
                    print("    W basis: [" + ", ".join(_coef_text(c) for c in vec) + "]", file=out)
    doc = build_report(config, reports)
    try:
        outdir = Path(config.output_dir)
        outdir.mkdir(parents=True, exist_ok=True)
        if "json" in config.formats:
            (outdir / "report.json").write_text(dumps(doc) + "\n")
        if "csv" in config.formats:
            (outdir / "report.csv").write_text(_csv_text(config, reports))
    except OSError as e:
        print(f"error: cannot write reports to {config.output_dir}: {e}", file=sys.stderr)
        return EXIT_IO
    if not quiet:
        print(f"overall: {'PASS' if doc['overall_pass'] else 'FAIL'}  ->  {config.output_dir}", file=out)
    return EXIT_PASS if doc["overall_pass"] else EXIT_FAIL


def main(argv: Sequence[str] | None = None) -> int:
    try:
        config = parse_config(argv)
    except ConfigError as e:
        print(f"configuration error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
