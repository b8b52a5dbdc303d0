"""Batch rendering of the solver's delimited outputs into static figures.

Three figure kinds are supported:

* ``profile``     -- overlay of (v, u, theta) profiles from one or more
                     CSV files with columns t,x,v,u,theta;
* ``residual``    -- the ansatz residual fields from CSV files with
                     columns t,x,q1,q2, drawn on a log magnitude axis;
* ``convergence`` -- log-log error-vs-epsilon plot from a report JSON,
                     with the fitted power law and a reference slope-1/5
                     line through the first data point.

Inputs are validated against their schemas before any file is written;
a mismatch raises SchemaError naming the offending column.  Rendering is
deterministic: a fixed style, the Agg backend, and no timestamps.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib
matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

FIGURE_KINDS = ("profile", "residual", "convergence")

PROFILE_COLUMNS = ["t", "x", "v", "u", "theta"]
RESIDUAL_COLUMNS = ["t", "x", "q1", "q2"]
REPORT_FIELDS = ("eps", "errors", "fitted_rate", "fitted_constant")

#: fixed style, the "seed" of deterministic output
STYLE = {
    "figure.figsize": (6.4, 4.8),
    "figure.dpi": 110,
    "font.size": 9,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "lines.linewidth": 1.2,
    "legend.fontsize": 8,
    "svg.hashsalt": "wavelimit-plots",
}


class SchemaError(ValueError):
    """An input file does not match its declared schema."""


@dataclass(frozen=True)
class FigureSpec:
    kind: str
    inputs: tuple
    output: str
    title: str = ""
    xlabel: str = "x"

    def __post_init__(self):
        if self.kind not in FIGURE_KINDS:
            raise SchemaError(f"unknown figure kind {self.kind!r}")
        if not self.inputs:
            raise SchemaError("figure needs at least one input file")


def read_csv(path, expected_columns):
    """Parse a delimited file, insisting on the exact expected header."""
    path = Path(path)
    if not path.exists():
        raise SchemaError(f"input file not found: {path}")
    lines = path.read_text(encoding="utf-8").splitlines()
    if not lines:
        raise SchemaError(f"{path}: empty file")
    header = lines[0].split(",")
    for col in expected_columns:
        if col not in header:
            raise SchemaError(f"{path}: missing column {col!r}")
    for col in header:
        if col not in expected_columns:
            raise SchemaError(f"{path}: unexpected column {col!r}")
    try:
        data = np.array([[float(tok) for tok in line.split(",")] for line in lines[1:]])
    except ValueError as exc:
        raise SchemaError(f"{path}: non-numeric row ({exc})") from exc
    if data.size == 0 or data.shape[1] != len(header):
        raise SchemaError(f"{path}: malformed rows")
    return {col: data[:, i] for i, col in enumerate(header)}


def read_report(path):
    path = Path(path)
    if not path.exists():
        raise SchemaError(f"input file not found: {path}")
    try:
        report = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: not valid JSON ({exc})") from exc
    for key in REPORT_FIELDS:
        if key not in report:
            raise SchemaError(f"{path}: missing report field {key!r}")
    if not report["eps"]:
        raise SchemaError(f"{path}: empty eps list, nothing to plot")
    return report


def _label_for(path):
    return Path(path).stem


def _render_profile(spec: FigureSpec, fig):
    axes = fig.subplots(3, 1, sharex=True)
    names = ("v", "u", "theta")
    for path in spec.inputs:
        cols = read_csv(path, PROFILE_COLUMNS)
        order = np.argsort(cols["x"])
        for ax, name in zip(axes, names):
            ax.plot(cols["x"][order], cols[name][order], label=_label_for(path))
    for ax, name in zip(axes, names):
        ax.set_ylabel(name)
    axes[0].legend(loc="best")
    axes[-1].set_xlabel(spec.xlabel)
    axes[0].set_title(spec.title or "wave profiles")
    return ""


def _render_residual(spec: FigureSpec, fig):
    axes = fig.subplots(2, 1, sharex=True)
    for path in spec.inputs:
        cols = read_csv(path, RESIDUAL_COLUMNS)
        order = np.argsort(cols["x"])
        x = cols["x"][order]
        for ax, name in zip(axes, ("q1", "q2")):
            ax.semilogy(x, np.abs(cols[name][order]) + 1e-300, label=_label_for(path))
    axes[0].set_ylabel("|q1|")
    axes[1].set_ylabel("|q2|")
    axes[0].legend(loc="best")
    axes[-1].set_xlabel(spec.xlabel)
    axes[0].set_title(spec.title or "ansatz residuals")
    return ""


def _render_convergence(spec: FigureSpec, fig):
    report = read_report(spec.inputs[0])
    eps = np.array(report["eps"], dtype=float)
    errors = np.array(
        [max(e["sup_error"] for e in errs) if errs else np.nan
         for errs in report["errors"]]
    )
    keep = np.isfinite(errors)
    if not np.any(keep):
        raise SchemaError(f"{spec.inputs[0]}: no surviving error entries")
    eps, errors = eps[keep], errors[keep]
    ax = fig.subplots()
    ax.loglog(eps, errors, "o", color="C0", label="measured")
    annotation = ""
    if report["fitted_rate"] is not None:
        rate = float(report["fitted_rate"])
        const = float(report["fitted_constant"])
        grid = np.geomspace(eps.min(), eps.max(), 50)
        ax.loglog(grid, const * grid**rate, "-", color="C0",
                  label=f"fit: slope {rate:.3f}")
        annotation = f"slope {rate:.3f}"
    ref = errors[0] * (np.geomspace(eps.min(), eps.max(), 50) / eps[0]) ** 0.2
    ax.loglog(np.geomspace(eps.min(), eps.max(), 50), ref, "--", color="C1",
              label="reference slope 1/5")
    ax.set_xlabel("epsilon")
    ax.set_ylabel("sup error on the exclusion set")
    ax.set_title(spec.title or "convergence study")
    ax.legend(loc="best")
    if annotation:
        ax.annotate(annotation, xy=(0.05, 0.05), xycoords="axes fraction")
    return annotation


def render(spec: FigureSpec) -> str:
    """Render one figure to spec.output; returns the slope annotation of
    convergence figures (empty string otherwise).

    All inputs are read and validated before the output file is created,
    so a schema error never leaves a partial file behind.
    """
    with plt.rc_context(STYLE):
        fig = plt.figure()
        try:
            if spec.kind == "profile":
                annotation = _render_profile(spec, fig)
            elif spec.kind == "residual":
                annotation = _render_residual(spec, fig)
            else:
                annotation = _render_convergence(spec, fig)
            out = Path(spec.output)
            out.parent.mkdir(parents=True, exist_ok=True)
            fig.savefig(out, metadata=_clean_metadata(out.suffix))
        finally:
            plt.close(fig)
    return annotation


def _clean_metadata(suffix):
    # strip creation dates so identical inputs give identical bytes
    if suffix == ".svg":
        return {"Date": None}
    if suffix == ".png":
        return {"Software": "wavelimit-plots"}
    if suffix == ".pdf":
        return {"CreationDate": None}
    return None
