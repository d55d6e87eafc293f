"""Render suite reports to static charts.

Every figure is deterministic for a fixed report list: fixed sizes,
fixed dpi, no timestamps, iteration in report order.  The renderer
never recomputes anything; it only reads values already recorded in
the reports, so a figure can be regenerated from a JSONL file alone.
"""

from __future__ import annotations

import math
import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .divergence import RATIO_LOWER, RATIO_UPPER
from .report import VerificationReport

__all__ = ["render_suite_figures"]

DPI = 150
PASS_COLOR = "#2a7fbe"
FAIL_COLOR = "#c84b3c"
BOUND_COLOR = "#555555"


def _save(fig, path):
    fig.savefig(path, dpi=DPI, bbox_inches="tight")
    plt.close(fig)
    return path


def _short(name, limit=46):
    return name if len(name) <= limit else name[: limit - 2] + ".."


def _gap_chart(reports, path, title):
    """Horizontal bars of relative gap per check, log scale, with a
    tick at each check's own tolerance."""
    rows = [r for r in reports if math.isfinite(r.rel_err) and r.rel_err >= 0.0]
    skipped = len(reports) - len(rows)
    if not rows:
        return None
    names = [_short(r.check) for r in rows]
    gaps = np.array([max(r.rel_err, 1e-17) for r in rows])
    tols = np.array([r.tolerance if r.tolerance > 0 else np.nan for r in rows])
    colors = [PASS_COLOR if r.passed else FAIL_COLOR for r in rows]

    height = max(2.2, 0.34 * len(rows) + 1.2)
    fig, ax = plt.subplots(figsize=(8.5, height))
    ypos = np.arange(len(rows))[::-1]
    ax.barh(ypos, gaps, color=colors, height=0.62)
    finite_tol = ~np.isnan(tols)
    ax.plot(tols[finite_tol], ypos[finite_tol], marker="|", markersize=14,
            linestyle="none", color=BOUND_COLOR, label="tolerance")
    ax.set_xscale("log")
    ax.set_yticks(ypos)
    ax.set_yticklabels(names, fontsize=7)
    ax.set_xlabel("relative gap")
    sub = f" ({skipped} non-finite entries omitted)" if skipped else ""
    ax.set_title(title + sub, fontsize=10)
    ax.legend(loc="lower right", fontsize=7)
    ax.grid(axis="x", alpha=0.25, linewidth=0.5)
    return _save(fig, path)


def _mc_panel(reports, path):
    """Monte Carlo means with 3 standard-error bars against the
    quadrature values they must straddle."""
    rows = [r for r in reports
            if r.anchor == "hardy-stein" and "std_error" in r.extra]
    if not rows:
        return None
    idx = np.arange(len(rows))
    mc = np.array([r.lhs for r in rows])
    se = np.array([3.0 * r.extra["std_error"] for r in rows])
    quad = np.array([r.rhs for r in rows])

    fig, ax = plt.subplots(figsize=(6.5, 3.6))
    ax.errorbar(idx, mc, yerr=se, fmt="o", color=PASS_COLOR, capsize=4,
                label="Monte Carlo mean (3 s.e.)")
    ax.plot(idx, quad, "x", color=FAIL_COLOR, markersize=9, label="quadrature")
    ax.set_xticks(idx)
    ax.set_xticklabels([_short(r.check, 24) for r in rows], fontsize=7,
                       rotation=20, ha="right")
    ax.set_ylabel("pointwise identity value")
    ax.set_title("sample averages against the integral route", fontsize=10)
    ax.legend(fontsize=7)
    ax.grid(alpha=0.25, linewidth=0.5)
    return _save(fig, path)


def _defect_panel(reports, path):
    """Remainder defect against the exterior data level, one line per
    check, with the zero crossing that certifies a nonminimizer."""
    rows = [r for r in reports
            if r.anchor == "nonminimizer" and "defects" in r.extra]
    if not rows:
        return None
    fig, ax = plt.subplots(figsize=(6.0, 3.6))
    for r in rows:
        items = sorted(((float(n), d) for n, d in r.extra["defects"].items()),
                       key=lambda t: t[0])
        ns = [t[0] for t in items]
        ds = [t[1] for t in items]
        ax.semilogx(ns, ds, "o-", label=_short(r.check, 30))
        chosen = r.extra.get("chosen_n")
        if chosen is not None:
            ax.semilogx([float(chosen)], [dict(items)[float(chosen)]], "s",
                        markersize=10, markerfacecolor="none",
                        markeredgecolor=FAIL_COLOR)
    ax.axhline(0.0, color=BOUND_COLOR, linewidth=0.8)
    ax.set_xlabel("data level n")
    ax.set_ylabel("remainder defect")
    ax.set_title("defect sign change along the blowup family", fontsize=10)
    ax.legend(fontsize=7)
    ax.grid(alpha=0.25, linewidth=0.5)
    return _save(fig, path)


def _refinement_panel(reports, path):
    """Both grid forms against resolution on log axes; a flat line is
    convergent, a climbing one is not."""
    rows = [r for r in reports
            if r.anchor == "increment-form-refinement" and "w_values" in r.extra]
    if not rows:
        return None
    fig, ax = plt.subplots(figsize=(6.0, 3.6))
    for r in rows:
        res = r.extra["resolutions"]
        ax.loglog(res, r.extra["w_values"], "o-", color=FAIL_COLOR,
                  label=_short(r.check, 28) + " increment form")
        ax.loglog(res, r.extra["e_values"], "s--", color=PASS_COLOR,
                  label=_short(r.check, 28) + " energy form")
    ax.set_xlabel("resolution")
    ax.set_ylabel("form value")
    ax.set_title("refinement behaviour of the two grid forms", fontsize=10)
    ax.legend(fontsize=7)
    ax.grid(alpha=0.25, linewidth=0.5, which="both")
    return _save(fig, path)


def _quasimin_panel(reports, path):
    """Energy ratios over random patches against the universal bound."""
    rows = [r for r in reports
            if "ratios" in r.extra and "K_bound" in r.extra]
    if not rows:
        return None
    fig, ax = plt.subplots(figsize=(6.0, 3.6))
    for i, r in enumerate(rows):
        ratios = np.asarray(r.extra["ratios"], dtype=float)
        xs = i + np.linspace(-0.18, 0.18, len(ratios))
        ax.plot(xs, ratios, ".", color=PASS_COLOR if r.passed else FAIL_COLOR)
        ax.hlines(r.extra["K_bound"], i - 0.3, i + 0.3, color=BOUND_COLOR,
                  linewidth=1.4)
    ax.set_xticks(range(len(rows)))
    ax.set_xticklabels([_short(r.check, 22) for r in rows], fontsize=7,
                       rotation=20, ha="right")
    ax.set_ylabel("restricted energy ratio")
    ax.set_title("patch perturbation ratios against the bound", fontsize=10)
    ax.grid(axis="y", alpha=0.25, linewidth=0.5)
    return _save(fig, path)


def _ratio_panel(reports, path):
    """Observed increment ratio range per exponent inside the sharp
    two-sided bracket."""
    rows = [r for r in reports
            if "min_ratio" in r.extra and "p" in r.extra]
    if not rows:
        return None
    rows = sorted(rows, key=lambda r: r.extra["p"])
    ps = np.array([r.extra["p"] for r in rows])
    lo_obs = np.array([r.extra["min_ratio"] for r in rows])
    hi_obs = np.array([r.extra["max_ratio"] for r in rows])
    grid = np.linspace(min(ps.min(), 1.05), ps.max() + 0.2, 200)

    fig, ax = plt.subplots(figsize=(6.0, 3.6))
    ax.plot(grid, [RATIO_LOWER(t) for t in grid], "-", color=BOUND_COLOR,
            label="lower bound 4(p-1)/p^2")
    ax.plot(grid, [RATIO_UPPER(t) for t in grid], "--", color=BOUND_COLOR,
            label="upper bound 2")
    ax.vlines(ps, lo_obs, hi_obs, color=PASS_COLOR, linewidth=3.0,
              label="observed range")
    ax.plot(ps, lo_obs, "v", ps, hi_obs, "^", color=PASS_COLOR, markersize=5)
    ax.set_xlabel("p")
    ax.set_ylabel("increment ratio")
    ax.set_title("sampled ratio range inside the sharp bracket", fontsize=10)
    ax.legend(fontsize=7)
    ax.grid(alpha=0.25, linewidth=0.5)
    return _save(fig, path)


_PANELS = (
    ("mc", _mc_panel),
    ("defects", _defect_panel),
    ("refinement", _refinement_panel),
    ("quasimin", _quasimin_panel),
    ("ratios", _ratio_panel),
)


def render_suite_figures(suite: str, reports: list[VerificationReport],
                         out_dir: str) -> list[str]:
    """Write the figures for one suite run and return their paths.

    Parameters
    ----------
    suite : str
        Suite name; used as the filename stem.
    reports : list of VerificationReport
        Reports in execution order.  Which panels appear depends on
        the anchors and extra payloads present.
    out_dir : str
        Existing directory to write ``<suite>-*.png`` files into.

    Returns
    -------
    list of str
        Paths of the files written, in a fixed order.  The overview
        gap chart comes first whenever any report has a finite
        relative gap.
    """
    written = []
    p = _gap_chart(reports, os.path.join(out_dir, f"{suite}-gaps.png"),
                   f"{suite}: relative gaps")
    if p:
        written.append(p)
    for stem, panel in _PANELS:
        p = panel(reports, os.path.join(out_dir, f"{suite}-{stem}.png"))
        if p:
            written.append(p)
    return written
