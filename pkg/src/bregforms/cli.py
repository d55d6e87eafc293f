"""Batch verification runner.

``bregforms --suite douglas --out reports`` runs a named suite of
checks and writes, into the output directory, a JSONL stream of the
full reports, CSV tables of their scalar fields (plus per-suite
detail tables), and chart renderings of the same data.  Exit status:
0 when every check passed, 1 when any failed, 2 for configuration
errors.

Configuration comes from an optional TOML file plus a handful of
command-line overrides; everything has a sensible default, so
``bregforms --suite inequalities`` works from a bare checkout.
"""

from __future__ import annotations

import argparse
import csv
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

try:
    import tomllib
except ModuleNotFoundError:
    import tomli as tomllib

from .figures import render_suite_figures
from .presets import PRESETS
from .report import VerificationReport
from .suites import SUITE_NAMES, build_suite, suite_tables

__all__ = ["ConfigError", "SuiteConfig", "load_toml_config", "run_suite",
           "write_outputs", "main"]


class ConfigError(ValueError):
    """A configuration value the runner refuses to start with."""


@dataclass(frozen=True)
class SuiteConfig:
    """Everything a suite run depends on.

    Attributes
    ----------
    suite : str
        Which check suite to run; see ``--list-suites``.
    d : int
        Ambient dimension.  The suites are one-dimensional; 1 is the
        only accepted value here even though the kernel layer also
        covers d = 2.
    alphas : tuple of float
        Kernel orders, each strictly inside (0, 2).
    center, radius : float
        The ball (interval) the forms live on.
    ps : tuple of float
        Form exponents, each > 1.
    presets : tuple of str
        Exterior data presets by registry name; the first one anchors
        the single-data checks.
    preset_params : dict
        Optional keyword overrides per preset name.
    tolerance : float
        Relative tolerance for the identity checks.
    rel_tol, abs_tol, max_subdivisions, tail_cut : quadrature budget.
    mc_n : int
        Monte Carlo sample count.
    seed : int
        Philox seed; fixes every random draw in the run.
    resolution, box, trials : grid minimization controls.
    inequality_ps : tuple of float
        Exponents for the scalar inequality sweeps.
    nonmin_alpha, nonmin_p : float
        Kernel order and exponent for the nonminimizer search.
    out_dir : str
        Output directory, created on demand.
    jobs : int
        Thread pool width; 1 runs checks inline.
    """

    suite: str = "douglas"
    d: int = 1
    alphas: tuple = (0.5, 1.0, 1.5)
    center: float = 0.0
    radius: float = 1.0
    ps: tuple = (1.5, 2.0, 3.0)
    presets: tuple = ("annulus-indicator", "smooth-annulus-bump", "two-level")
    preset_params: dict = field(default_factory=dict)
    tolerance: float = 2e-2
    rel_tol: float = 1e-6
    abs_tol: float = 1e-9
    max_subdivisions: int = 600
    tail_cut: float = 60.0
    mc_n: int = 100_000
    seed: int = 1234
    resolution: int = 128
    box: tuple = (-4.0, 4.0)
    trials: int = 20
    inequality_ps: tuple = (1.1, 1.5, 2.0, 3.0, 4.0)
    nonmin_alpha: float = 0.75
    nonmin_p: float = 3.0
    out_dir: str = "reports"
    jobs: int = 1


def validate_config(cfg: SuiteConfig) -> SuiteConfig:
    """Reject impossible configurations with a readable message."""
    if cfg.suite not in SUITE_NAMES:
        raise ConfigError(f"unknown suite {cfg.suite!r}; choose from "
                          f"{', '.join(SUITE_NAMES)}")
    if cfg.d != 1:
        raise ConfigError("the suites are one-dimensional (d = 1)")
    if not cfg.alphas:
        raise ConfigError("at least one kernel order is required")
    for a in cfg.alphas:
        if not 0.0 < a < 2.0:
            raise ConfigError(f"kernel order {a} outside (0, 2)")
    if not 0.0 < cfg.nonmin_alpha < 2.0:
        raise ConfigError(f"kernel order {cfg.nonmin_alpha} outside (0, 2)")
    if cfg.radius <= 0.0:
        raise ConfigError("radius must be positive")
    if not cfg.ps:
        raise ConfigError("at least one exponent is required")
    for p in tuple(cfg.ps) + tuple(cfg.inequality_ps) + (cfg.nonmin_p,):
        if p <= 1.0:
            raise ConfigError(f"exponent {p} must be > 1")
    if not cfg.presets:
        raise ConfigError("at least one preset is required")
    for name in cfg.presets:
        if name not in PRESETS:
            raise ConfigError(f"unknown preset {name!r}; choose from "
                              f"{', '.join(sorted(PRESETS))}")
    if cfg.rel_tol <= 0.0 or cfg.abs_tol < 0.0:
        raise ConfigError("quadrature tolerances must be positive")
    if cfg.max_subdivisions < 10:
        raise ConfigError("max_subdivisions must be at least 10")
    if cfg.tail_cut <= 0.0:
        raise ConfigError("tail_cut must be positive")
    if cfg.mc_n < 100:
        raise ConfigError("mc_n below 100 estimates nothing")
    if cfg.seed < 0:
        raise ConfigError("seed must be nonnegative")
    if cfg.resolution < 8:
        raise ConfigError("resolution must be at least 8")
    if len(cfg.box) != 2:
        raise ConfigError("box must be [lo, hi]")
    lo, hi = cfg.box
    if lo >= cfg.center - cfg.radius or hi <= cfg.center + cfg.radius:
        raise ConfigError("grid box must strictly contain the domain")
    if cfg.trials < 1:
        raise ConfigError("trials must be at least 1")
    if cfg.jobs < 1:
        raise ConfigError("jobs must be at least 1")
    return cfg


# TOML schema: section -> {key -> SuiteConfig field}.  Strict by
# design; a misspelled key should stop the run, not silently fall
# back to a default.
_TOP_KEYS = {"suite": "suite", "seed": "seed", "out_dir": "out_dir",
             "jobs": "jobs", "tolerance": "tolerance"}
_SECTIONS = {
    "kernel": {"d": "d", "alpha": "alphas"},
    "domain": {"center": "center", "radius": "radius"},
    "forms": {"p": "ps", "presets": "presets",
              "preset_params": "preset_params"},
    "quadrature": {"rel_tol": "rel_tol", "abs_tol": "abs_tol",
                   "max_subdivisions": "max_subdivisions",
                   "tail_cut": "tail_cut"},
    "mc": {"n": "mc_n"},
    "grid": {"resolution": "resolution", "box": "box", "trials": "trials"},
    "inequalities": {"p": "inequality_ps"},
    "nonminimizer": {"alpha": "nonmin_alpha", "p": "nonmin_p"},
}
_TUPLE_FLOAT_FIELDS = {"alphas", "ps", "inequality_ps", "box"}
_TUPLE_STR_FIELDS = {"presets"}


def _coerce(field_name, value):
    if field_name in _TUPLE_FLOAT_FIELDS:
        seq = value if isinstance(value, (list, tuple)) else [value]
        try:
            return tuple(float(v) for v in seq)
        except (TypeError, ValueError):
            raise ConfigError(f"{field_name} must be numeric, got {value!r}")
    if field_name in _TUPLE_STR_FIELDS:
        seq = value if isinstance(value, (list, tuple)) else [value]
        if not all(isinstance(v, str) for v in seq):
            raise ConfigError(f"{field_name} must be a list of names")
        return tuple(seq)
    if field_name == "preset_params":
        if not isinstance(value, dict):
            raise ConfigError("preset_params must be a table of tables")
        return {k: dict(v) for k, v in value.items()}
    return value


def load_toml_config(path: str) -> SuiteConfig:
    """Parse and validate a TOML configuration file."""
    try:
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
    except OSError as e:
        raise ConfigError(f"cannot read {path}: {e.strerror}")
    except tomllib.TOMLDecodeError as e:
        raise ConfigError(f"invalid TOML in {path}: {e}")

    updates = {}
    for key, value in raw.items():
        if key in _TOP_KEYS:
            updates[_TOP_KEYS[key]] = _coerce(_TOP_KEYS[key], value)
        elif key in _SECTIONS:
            if not isinstance(value, dict):
                raise ConfigError(f"[{key}] must be a table")
            for sub, sval in value.items():
                if sub not in _SECTIONS[key]:
                    raise ConfigError(f"unknown key {sub!r} in [{key}]")
                fname = _SECTIONS[key][sub]
                updates[fname] = _coerce(fname, sval)
        else:
            raise ConfigError(f"unknown top-level key {key!r}")
    if "box" in updates and len(updates["box"]) != 2:
        raise ConfigError("box must be [lo, hi]")
    return replace(SuiteConfig(), **updates)


# ---------------------------------------------------------------------------
# execution
# ---------------------------------------------------------------------------


def _guarded(task):
    try:
        return task.run()
    except Exception as e:  # a crashed check is a failed check
        return VerificationReport.from_sides(
            task.name, "error", math.nan, math.nan, 0.0, passed=False,
            extra={"error": repr(e)})


def run_suite(cfg: SuiteConfig):
    """Run every task of the configured suite; reports come back in
    configuration order regardless of the pool width, with post-hook
    aggregates appended."""
    plan = build_suite(cfg)
    if cfg.jobs <= 1:
        reports = [_guarded(t) for t in plan.tasks]
    else:
        with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
            futures = [pool.submit(_guarded, t) for t in plan.tasks]
            reports = [f.result() for f in futures]
    for hook in plan.post:
        agg = hook(reports)
        if agg is not None:
            reports.append(agg)
    return plan.name, reports


def _cell(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_outputs(suite: str, reports, out_dir: str) -> list:
    """Write JSONL, CSV tables, and figures; return the paths."""
    os.makedirs(out_dir, exist_ok=True)
    paths = []
    jsonl = os.path.join(out_dir, f"{suite}.jsonl")
    with open(jsonl, "w", encoding="utf-8") as fh:
        for r in reports:
            fh.write(r.to_json_record() + "\n")
    paths.append(jsonl)
    for fname, (head, rows) in suite_tables(suite, reports).items():
        path = os.path.join(out_dir, fname)
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(head)
            for row in rows:
                writer.writerow([_cell(v) for v in row])
        paths.append(path)
    paths.extend(render_suite_figures(suite, reports, out_dir))
    return paths


def _build_parser():
    ap = argparse.ArgumentParser(
        prog="bregforms",
        description="Run numerical verification suites for nonlocal "
                    "Sobolev-Bregman form identities.")
    ap.add_argument("--config", metavar="FILE",
                    help="TOML configuration file")
    ap.add_argument("--suite", choices=SUITE_NAMES,
                    help="suite to run (overrides the config file)")
    ap.add_argument("--seed", type=int, help="seed override")
    ap.add_argument("--out", metavar="DIR", help="output directory override")
    ap.add_argument("--jobs", type=int, help="thread pool width override")
    ap.add_argument("--list-suites", action="store_true",
                    help="print available suite names and exit")
    return ap


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.list_suites:
        for name in SUITE_NAMES:
            print(name)
        return 0
    try:
        cfg = load_toml_config(args.config) if args.config else SuiteConfig()
        overrides = {}
        if args.suite is not None:
            overrides["suite"] = args.suite
        if args.seed is not None:
            overrides["seed"] = args.seed
        if args.out is not None:
            overrides["out_dir"] = args.out
        if args.jobs is not None:
            overrides["jobs"] = args.jobs
        if overrides:
            cfg = replace(cfg, **overrides)
        validate_config(cfg)
    except ConfigError as e:
        print(f"configuration error: {e}", file=sys.stderr)
        return 2

    suite, reports = run_suite(cfg)
    paths = write_outputs(suite, reports, cfg.out_dir)
    for r in reports:
        print(r.one_line())
    n_pass = sum(1 for r in reports if r.passed)
    print(f"{suite}: {n_pass}/{len(reports)} checks passed; "
          f"{len(paths)} files in {cfg.out_dir}")
    return 0 if n_pass == len(reports) else 1


if __name__ == "__main__":
    sys.exit(main())
