"""Batch front end: strict ``key = value`` configs, CSV tables and SVG plots.

A config looks like::

    command = sweep
    phase = cos_abs2d

    [phase]          # overrides of the catalog constructor's parameters
    [sweep]          # lambda, tol, tail_cap, max_axis_size, slack
    [covering]       # epsilons, samples
    [output]         # path, plot, axes, timing, input

Every key is checked; all errors are collected with their line numbers.
"""

import argparse
import csv
from dataclasses import dataclass, field, replace
import inspect
import io
import math
import os
import re
import sys
import time
import warnings

import numpy as np

from . import __version__
from .checks import run_all
from .covering import box_count, dimension_fit, dyadic_epsilons, sample_curve
from .fourier import a_norm_estimate
from .growth import DEFAULT_LAMBDAS, SWEEP_HEADER, GrowthFitError, compare_to_theorem, fit_growth, sweep
from .phases import CurveMap, Phase, _FACTORIES, lookup
from ._numerics import DEFAULT_MEM_GIB, MemoryBudgetError

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "ResultTable",
    "DEFAULTS",
    "parse_config",
    "run",
    "write_csv",
    "format_csv",
    "emit_svg_plot",
    "main",
]

COMMANDS = ("norm", "sweep", "boxdim", "curve", "check", "report")

DEFAULTS = {
    "tol": 0.02,
    "tail_cap": 0.01,
    "max_axis_size": None,
    "slack": 0.15,
    "epsilons": dyadic_epsilons(3, 10),
    "samples": 1_000_000,
    "sweep_samples": 1 << 20,
    "mem_gib": DEFAULT_MEM_GIB,
    "workers": os.cpu_count() or 1,
    "axes": "loglog",
    "plot": False,
    "timing": False,
}

EXIT_OK, EXIT_FAILED, EXIT_USAGE, EXIT_REFUSED = 0, 1, 2, 3


class ConfigError(ValueError):
    """All problems found in a config, as ``(line, message)`` pairs."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("\n".join(f"line {n}: {msg}" if n else msg for n, msg in self.errors))


@dataclass(frozen=True)
class ExperimentConfig:
    command: str
    target: str = None
    params: dict = field(default_factory=dict)
    sweep: dict = field(default_factory=dict)
    covering: dict = field(default_factory=dict)
    output: dict = field(default_factory=dict)
    mem_gib: float = None
    workers: int = None

    def echo(self):
        """Canonical ``key = value`` rendering (worker count excluded: it never changes results)."""
        lines = [f"command = {self.command}"]
        if self.target is not None:
            lines.append(f"target = {self.target}")
        for section in ("params", "sweep", "covering", "output"):
            for key in sorted(getattr(self, section)):
                lines.append(f"{section}.{key} = {_render(getattr(self, section)[key])}")
        lines.append(f"mem_gib = {_render(self.mem_gib if self.mem_gib is not None else DEFAULTS['mem_gib'])}")
        return lines


@dataclass
class ResultTable:
    header: tuple
    rows: list
    provenance: list
    complete: bool = True

    def __post_init__(self):
        for r in self.rows:
            if len(r) != len(self.header):
                raise ValueError(f"row {r!r} does not match header {self.header!r}")


# -- parsing -------------------------------------------------------------------

_NUM = re.compile(r"^[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?$")
_INT = re.compile(r"^[+-]?\d+$")
_NAME = re.compile(r"^[A-Za-z_./~][A-Za-z0-9_.\-/~]*$")


def _scalar(text):
    t = text.strip()
    if t in ("true", "false"):
        return t == "true"
    if _INT.match(t):
        return int(t)
    if _NUM.match(t):
        return float(t)
    if len(t) >= 2 and t[0] == t[-1] == '"':
        return t[1:-1]
    if _NAME.match(t):
        return t
    raise ValueError(f"cannot parse value {text!r}")


def _value(text):
    t = text.strip()
    if t.startswith("["):
        if not t.endswith("]"):
            raise ValueError(f"unterminated list {text!r}")
        inner = t[1:-1].strip()
        return [] if not inner else [_scalar(x) for x in inner.split(",")]
    return _scalar(t)


def _render(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format(v, ".17g")
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_render(x) for x in v) + "]"
    if v is None:
        return "none"
    return str(v)


def _is_num(v):
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def _positive(v):
    return _is_num(v) and v > 0 and math.isfinite(v)


def _check_real_list(v, scalar_ok=True):
    if _is_num(v) and scalar_ok:
        v = [v]
    if not isinstance(v, list) or not v or not all(_is_num(x) for x in v):
        raise ValueError("expected a nonempty list of numbers")
    return [float(x) for x in v]


def _v_positive(v):
    if not _positive(v):
        raise ValueError(f"must be a positive number, got {_render(v)}")
    return float(v)


def _v_fraction(v):
    if not (_is_num(v) and 0 < v <= 1):
        raise ValueError(f"must lie in (0, 1], got {_render(v)}")
    return float(v)


def _v_axis(v):
    if not (isinstance(v, int) and not isinstance(v, bool) and v >= 4 and v & (v - 1) == 0):
        raise ValueError(f"must be a power of two >= 4, got {_render(v)}")
    return v


def _v_samples(v):
    if not (isinstance(v, int) and not isinstance(v, bool) and v >= 2):
        raise ValueError(f"must be an integer >= 2, got {_render(v)}")
    return v


def _v_lambdas(v):
    lams = _check_real_list(v)
    if any(not math.isfinite(x) for x in lams):
        raise ValueError("lambda values must be finite")
    if len(set(lams)) != len(lams):
        raise ValueError("duplicate lambda values")
    return sorted(lams)


def _v_epsilons(v):
    eps = _check_real_list(v)
    if any(not _positive(x) for x in eps):
        raise ValueError("epsilons must be positive")
    if len(set(eps)) != len(eps):
        raise ValueError("duplicate epsilons")
    return sorted(eps, reverse=True)


def _v_bool(v):
    if not isinstance(v, bool):
        raise ValueError(f"must be true or false, got {_render(v)}")
    return v


def _v_axes(v):
    if v not in ("loglog", "semilogx"):
        raise ValueError(f"must be loglog or semilogx, got {_render(v)}")
    return v


def _v_path(v):
    if not isinstance(v, str) or isinstance(v, bool):
        raise ValueError("must be a path")
    return v


_SECTIONS = {
    "sweep": {"lambda": _v_lambdas, "tol": _v_positive, "tail_cap": _v_fraction,
              "max_axis_size": _v_axis, "slack": _v_positive},
    "covering": {"epsilons": _v_epsilons, "samples": _v_samples},
    "output": {"path": _v_path, "plot": _v_bool, "axes": _v_axes, "timing": _v_bool, "input": _v_path},
}


def _check_params(target, params, lines, errors):
    if target not in _FACTORIES:
        return
    sig = inspect.signature(_FACTORIES[target])
    for key, value in params.items():
        if key not in sig.parameters:
            errors.append((lines[key], f"unknown parameter {key!r} for {target}; "
                                       f"allowed: {sorted(sig.parameters)}"))
        elif _is_num(sig.parameters[key].default) and isinstance(sig.parameters[key].default, int) \
                and not isinstance(value, int):
            errors.append((lines[key], f"parameter {key!r} must be an integer, got {_render(value)}"))
        elif not _is_num(value):
            errors.append((lines[key], f"parameter {key!r} must be a number, got {_render(value)}"))
    if any(n for n, _ in errors):
        return
    try:
        lookup(target, **params)
    except (ValueError, TypeError) as exc:
        first = min(lines.values()) if lines else 0
        errors.append((first, f"invalid parameters for {target}: {exc}"))


def parse_config(text, default_command=None):
    """Parse and validate a config document.

    ``default_command`` stands in for a missing top-level ``command`` key.

    Raises
    ------
    ConfigError
        Listing every problem with its line number.
    """
    errors = []
    top, top_lines = {}, {}
    sections = {"phase": {}, "sweep": {}, "covering": {}, "output": {}}
    section_lines = {k: {} for k in sections}
    current = None
    for n, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]") and "=" not in line:
            name = line[1:-1].strip()
            if name not in sections:
                errors.append((n, f"unknown section [{name}]; allowed: {sorted(sections)}"))
                current = "__bad__"
            else:
                current = name
            continue
        if "=" not in line:
            errors.append((n, f"expected 'key = value', got {raw.strip()!r}"))
            continue
        key, _, val = line.partition("=")
        key = key.strip()
        try:
            value = _value(val)
        except ValueError as exc:
            errors.append((n, str(exc)))
            continue
        if current == "__bad__":
            continue
        store, store_lines = (top, top_lines) if current is None else (sections[current], section_lines[current])
        if key in store:
            errors.append((n, f"duplicate key {key!r}"))
            continue
        if current is None and key not in ("command", "phase", "curve"):
            errors.append((n, f"unknown key {key!r}; top-level keys: command, phase, curve"))
            continue
        if current in _SECTIONS:
            if key not in _SECTIONS[current]:
                errors.append((n, f"unknown key {key!r} in [{current}]; allowed: {sorted(_SECTIONS[current])}"))
                continue
            try:
                value = _SECTIONS[current][key](value)
            except ValueError as exc:
                errors.append((n, f"{key}: {exc}"))
                continue
        store[key] = value
        store_lines[key] = n

    command = top.get("command", default_command)
    if command is None:
        errors.append((0, "missing 'command'"))
    elif command not in COMMANDS:
        errors.append((top_lines["command"], f"unknown command {command!r}; allowed: {', '.join(COMMANDS)}"))
    if "phase" in top and "curve" in top:
        errors.append((top_lines["curve"], "give either 'phase' or 'curve', not both"))
    target = top.get("phase", top.get("curve"))
    if target is not None:
        tline = top_lines.get("phase", top_lines.get("curve"))
        if target not in _FACTORIES:
            errors.append((tline, f"unknown phase or curve {target!r}; known: {sorted(_FACTORIES)}"))
        else:
            is_phase = isinstance(lookup(target), Phase)
            if "phase" in top and not is_phase:
                errors.append((tline, f"{target!r} is a curve; use 'curve = {target}'"))
            if "curve" in top and is_phase:
                errors.append((tline, f"{target!r} is a phase; use 'phase = {target}'"))
            if command in ("norm", "sweep") and not is_phase:
                errors.append((tline, f"command {command} needs a phase, got curve {target!r}"))
            if command in ("boxdim", "curve") and is_phase and lookup(target).curve is None:
                errors.append((tline, f"phase {target!r} has no curve to sample"))
    elif command in ("norm", "sweep", "boxdim", "curve"):
        errors.append((0, f"command {command} needs 'phase' or 'curve'"))
    if command == "report" and "input" not in sections["output"]:
        errors.append((0, "command report needs 'input' in [output]"))
    if command == "sweep" and "lambda" in sections["sweep"] and any(x <= 0 for x in sections["sweep"]["lambda"]):
        errors.append((section_lines["sweep"]["lambda"], "sweep lambdas must be positive"))
    _check_params(target, sections["phase"], section_lines["phase"], errors)
    if errors:
        raise ConfigError(sorted(errors, key=lambda e: e[0]))
    return ExperimentConfig(command, target, sections["phase"], sections["sweep"], sections["covering"],
                            sections["output"])


# -- running -------------------------------------------------------------------


def _opt(cfg, section, key, fallback=None):
    d = getattr(cfg, section)
    if key in d:
        return d[key]
    return DEFAULTS.get(key, fallback) if fallback is None else fallback


def _provenance(cfg, extra=()):
    lines = [f"wgl {__version__}", f"command: {cfg.command}"]
    lines += [f"config: {line}" for line in cfg.echo()]
    lines += [f"default: {k} = {_render(v)}" for k, v in sorted(DEFAULTS.items()) if k != "workers"]
    lines += list(extra)
    return lines


def _curve_of(obj):
    return obj if isinstance(obj, CurveMap) else obj.curve


def _run_norm(cfg):
    phase = lookup(cfg.target, **cfg.params)
    lams = cfg.sweep.get("lambda", [1.0])
    header = ("phase", "lambda", "a_norm", "converged", "relative_delta", "tail_fraction", "grid",
              "stop_reason", "seconds")
    rows, notes, complete = [], [], True
    for lam in lams:
        t0 = time.perf_counter()
        try:
            e = a_norm_estimate(phase, lam, tol=_opt(cfg, "sweep", "tol"), tail_cap=_opt(cfg, "sweep", "tail_cap"),
                                max_axis_size=cfg.sweep.get("max_axis_size"), workers=cfg.workers,
                                mem_gib=cfg.mem_gib)
        except (MemoryBudgetError, MemoryError, FloatingPointError) as exc:
            complete = False
            notes.append(f"error at lambda={_render(lam)}: {exc}")
            continue
        secs = time.perf_counter() - t0 if _opt(cfg, "output", "timing") else ""
        rows.append((phase.name, lam, e.value, e.converged, e.relative_delta, e.tail_fraction,
                     "x".join(str(s) for s in e.grid_used.sizes), e.stop_reason, secs))
    return header, rows, notes, complete


def _run_sweep(cfg):
    phase = lookup(cfg.target, **cfg.params)
    lams = cfg.sweep.get("lambda", DEFAULT_LAMBDAS.get(phase.dim, DEFAULT_LAMBDAS[3]))
    records = sweep(phase, lams, tol=_opt(cfg, "sweep", "tol"), tail_cap=_opt(cfg, "sweep", "tail_cap"),
                    max_axis_size=cfg.sweep.get("max_axis_size"), workers=cfg.workers, mem_gib=cfg.mem_gib)
    timing = _opt(cfg, "output", "timing")
    notes = [f"error at lambda={_render(r.lam)}: {r.error}" for r in records if not r.ok]
    complete = not notes
    summary = []
    try:
        pfit = fit_growth(records, "power", require_converged=False)
        notes.append(f"power fit: slope {_render(pfit.slope)} stderr {_render(pfit.stderr)} "
                     f"over records {pfit.range_used[0]}..{pfit.range_used[1]}")
        if all(r.lam > 1 for r in records if r.ok):
            lfit = fit_growth(records, "log", require_converged=False)
            notes.append(f"log fit: slope {_render(lfit.slope)} ratio_band {_render(lfit.ratio_band)}")
    except GrowthFitError as exc:
        pfit = None
        notes.append(f"fit refused: {exc}")
    curve = phase.curve
    if curve is not None and pfit is not None:
        cloud = sample_curve(curve, _opt(cfg, "covering", "samples", DEFAULTS["sweep_samples"]), cfg.mem_gib)
        rep = compare_to_theorem(records, cloud, slack=_opt(cfg, "sweep", "slack"), name=phase.name)
        rows = [tuple(r) for r in rep.rows(include_timing=timing)]
        notes.append(f"verdict: {rep.verdict} (slack {_render(rep.slack)}, stable {_render(rep.stable)}, "
                     f"shift {_render(rep.stability_shift)})")
        notes += [f"caveat: {c}" for c in rep.caveats]
        summary = [("fit", "", rep.measured_fit.slope, rep.verdict, rep.predicted_fit.slope, "")]
    else:
        rows = [(phase.name, r.lam, r.value, r.converged, "", r.wall_seconds if timing else "") for r in records]
        if pfit is not None:
            verdict = "n/a"
            summary = [("fit", "", pfit.slope, verdict, "", "")]
    return SWEEP_HEADER, rows + summary, notes, complete


def _cloud_for(cfg, samples):
    obj = lookup(cfg.target, **cfg.params)
    return sample_curve(_curve_of(obj), samples, cfg.mem_gib)


def _run_boxdim(cfg):
    samples = _opt(cfg, "covering", "samples")
    cloud = _cloud_for(cfg, samples)
    eps = cfg.covering.get("epsilons", DEFAULTS["epsilons"])
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        curve = box_count(cloud, eps)
    notes = [f"under_resolved: {_render(curve.under_resolved)}", f"spacing: {_render(cloud.spacing)}"]
    if len(curve) >= 4:
        fit = dimension_fit(curve)
        notes.append(f"dimension fit: slope {_render(fit.slope)} stderr {_render(fit.stderr)} r2 {_render(fit.r2)}")
    rows = [(float(e), int(c)) for e, c in zip(curve.epsilons, curve.counts)]
    return ("epsilon", "count"), rows, notes, True


def _run_curve(cfg):
    samples = _opt(cfg, "covering", "samples")
    obj = lookup(cfg.target, **cfg.params)
    a = _curve_of(obj)
    cloud = sample_curve(a, samples, cfg.mem_gib)
    lo, hi = cloud.bbox
    sup = float(np.sqrt((cloud.points**2).sum(axis=1)).max())
    rows = [("name", a.name), ("k", a.k), ("m", a.m), ("samples", samples), ("spacing", cloud.spacing),
            ("sup_norm", sup), ("sup_norm_bound", a.sup_norm_bound),
            ("lipschitz_bound", a.lipschitz_bound if a.lipschitz_bound is not None else ""),
            ("diameter_bound", cloud.diameter_bound)]
    rows += [(f"bbox_lo_{j}", float(lo[j])) for j in range(a.m)]
    rows += [(f"bbox_hi_{j}", float(hi[j])) for j in range(a.m)]
    return ("quantity", "value"), rows, [], True


def _run_check(cfg):
    reports = run_all()
    rows = [(r.name, r.passed, r.worst_margin, r.refused) for r in reports]
    return ("name", "passed", "worst_margin", "refused"), rows, [], True


def _run_report(cfg):
    table = read_csv(cfg.output["input"])
    return tuple(table.header), table.rows, [f"input: {cfg.output['input']}"], table.complete


_DISPATCH = {"norm": _run_norm, "sweep": _run_sweep, "boxdim": _run_boxdim, "curve": _run_curve,
             "check": _run_check, "report": _run_report}


def run(config):
    """Execute a parsed config and return its :class:`ResultTable`."""
    try:
        header, rows, notes, complete = _DISPATCH[config.command](config)
    except (MemoryBudgetError, MemoryError, FloatingPointError, OSError) as exc:
        header, rows, notes, complete = ("error",), [], [f"{config.command}: {type(exc).__name__}: {exc}"], False
    extra = [f"note: {n}" for n in notes]
    extra.append("status: complete" if complete else "status: incomplete")
    if not _opt(config, "output", "timing"):
        extra.append("wall_time: omitted (set timing = true in [output])")
    return ResultTable(tuple(header), list(rows), _provenance(config, extra), complete)


# -- csv -------------------------------------------------------------------------


def _cell(v):
    if isinstance(v, bool) or isinstance(v, np.bool_):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return "" if v is None else str(v)


def format_csv(table):
    buf = io.StringIO()
    for line in table.provenance:
        buf.write(f"# {line}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(table.header)
    for r in table.rows:
        w.writerow([_cell(v) for v in r])
    return buf.getvalue()


def write_csv(table, path):
    """Write provenance comment lines, the header and the rows; reals with 17 significant digits."""
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            fh.write(format_csv(table))
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


def read_csv(path):
    with open(path, encoding="utf-8", newline="") as fh:
        lines = fh.read().splitlines()
    prov = [ln[2:] if ln.startswith("# ") else ln[1:] for ln in lines if ln.startswith("#")]
    body = [ln for ln in lines if not ln.startswith("#")]
    reader = list(csv.reader(body))
    if not reader:
        raise ValueError(f"{path} has no header")
    header, rows = reader[0], [tuple(r) for r in reader[1:]]
    return ResultTable(tuple(header), rows, prov, "status: incomplete" not in prov)


# -- svg -------------------------------------------------------------------------

_W, _H, _ML, _MR, _MT, _MB = 640, 440, 70, 170, 20, 50
_COLORS = ("#1f5fa8", "#c0392b", "#2e8b57", "#8e44ad", "#d35400")


def _num(v):
    if isinstance(v, bool):
        return None
    try:
        x = float(v)
    except (TypeError, ValueError):
        return None
    return x if math.isfinite(x) else None


def _fmt(x):
    return format(x, ".6g")


def emit_svg_plot(table, axes="loglog", path=None, x=None, ys=None):
    """Render numeric columns of ``table`` against column ``x`` as a deterministic SVG.

    By default ``x`` is the first column holding numbers and every later
    numeric column except ``seconds`` is a series.  Non-positive values on a
    log axis drop the series with an annotation.  Returns the SVG text and
    writes it to ``path`` when given.
    """
    if axes not in ("loglog", "semilogx"):
        raise ValueError(f"axes must be loglog or semilogx, got {axes!r}")
    header = list(table.header)
    numeric = [j for j in range(len(header))
               if any(_num(r[j]) is not None for r in table.rows) and header[j] != "seconds"
               and not all(str(r[j]) in ("true", "false", "True", "False") for r in table.rows)]
    if x is None:
        if not numeric:
            raise ValueError("table has no numeric columns")
        xj = numeric[0]
    else:
        xj = header.index(x)
    yjs = [j for j in numeric if j != xj] if ys is None else [header.index(y) for y in ys]
    if not yjs:
        raise ValueError("table needs at least one y column")

    series, skipped = [], []
    for j in yjs:
        pts = [(_num(r[xj]), _num(r[j])) for r in table.rows]
        pts = [(a, b) for a, b in pts if a is not None and b is not None]
        ylog = axes == "loglog"
        if any(a <= 0 for a, _ in pts) or (ylog and any(b <= 0 for _, b in pts)) or not pts:
            skipped.append(header[j])
            continue
        series.append((header[j], sorted(pts)))

    def tx(v):
        return math.log10(v)

    def ty(v):
        return math.log10(v) if axes == "loglog" else v

    all_x = [tx(a) for _, p in series for a, _ in p] or [0.0, 1.0]
    all_y = [ty(b) for _, p in series for _, b in p] or [0.0, 1.0]
    x0, x1 = math.floor(min(all_x)), math.ceil(max(all_x))
    if axes == "loglog":
        y0, y1 = math.floor(min(all_y)), math.ceil(max(all_y))
    else:
        y0, y1 = min(all_y), max(all_y)
    if x1 == x0:
        x1 = x0 + 1
    if y1 == y0:
        y1 = y0 + 1
    pw, ph = _W - _ML - _MR, _H - _MT - _MB

    def px(v):
        return _ML + (tx(v) - x0) / (x1 - x0) * pw

    def py(v):
        return _MT + ph - (ty(v) - y0) / (y1 - y0) * ph

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
           f'viewBox="0 0 {_W} {_H}" font-family="sans-serif" font-size="11">',
           f'<rect x="{_ML}" y="{_MT}" width="{pw}" height="{ph}" fill="none" stroke="#000"/>']
    for e in range(x0, x1 + 1):
        xp = _ML + (e - x0) / (x1 - x0) * pw
        out.append(f'<line x1="{_fmt(xp)}" y1="{_MT + ph}" x2="{_fmt(xp)}" y2="{_MT + ph + 5}" stroke="#000"/>')
        out.append(f'<text x="{_fmt(xp)}" y="{_MT + ph + 18}" text-anchor="middle">1e{e}</text>')
    if axes == "loglog":
        yticks = [(e, f"1e{e}") for e in range(y0, y1 + 1)]
    else:
        yticks = [(y0 + i * (y1 - y0) / 4, _fmt(y0 + i * (y1 - y0) / 4)) for i in range(5)]
    for e, label in yticks:
        yp = _MT + ph - (e - y0) / (y1 - y0) * ph
        out.append(f'<line x1="{_ML - 5}" y1="{_fmt(yp)}" x2="{_ML}" y2="{_fmt(yp)}" stroke="#000"/>')
        out.append(f'<text x="{_ML - 8}" y="{_fmt(yp + 4)}" text-anchor="end">{label}</text>')
    out.append(f'<text x="{_ML + pw / 2:g}" y="{_H - 10}" text-anchor="middle">{header[xj]}</text>')

    legend_y = _MT + 10
    for i, (name, pts) in enumerate(series):
        color = _COLORS[i % len(_COLORS)]
        if len(pts) == 1:
            a, b = pts[0]
            out.append(f'<circle cx="{_fmt(px(a))}" cy="{_fmt(py(b))}" r="3" fill="{color}"/>')
            label = name
        else:
            coords = " ".join(f"{_fmt(px(a))},{_fmt(py(b))}" for a, b in pts)
            out.append(f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="1.5"/>')
            lx = np.log([a for a, _ in pts])
            ly = np.log([b for _, b in pts]) if axes == "loglog" else np.array([b for _, b in pts])
            slope = float(np.polyfit(lx, ly, 1)[0]) if len(set(lx.tolist())) > 1 else 0.0
            label = f"{name} (slope {slope:.3f})"
        lx0 = _ML + pw + 10
        out.append(f'<line x1="{lx0}" y1="{legend_y}" x2="{lx0 + 18}" y2="{legend_y}" stroke="{color}" '
                   f'stroke-width="2"/>')
        out.append(f'<text x="{lx0 + 22}" y="{legend_y + 4}">{label}</text>')
        legend_y += 16
    for name in skipped:
        out.append(f'<text x="{_ML + pw + 10}" y="{legend_y + 4}" fill="#888">{name}: skipped '
                   f'(non-positive values on a log axis)</text>')
        legend_y += 16
    out.append("</svg>")
    svg = "\n".join(out) + "\n"
    if skipped:
        warnings.warn(f"series skipped on log axes: {', '.join(skipped)}")
    if path is not None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(svg)
    return svg


# -- entry point -----------------------------------------------------------------


def _parser():
    p = argparse.ArgumentParser(prog="wgl", description="Wiener-algebra norm and covering-number lab.")
    p.add_argument("command", choices=COMMANDS + ("verify",))
    p.add_argument("--config", help="experiment config file")
    p.add_argument("--out", help="output CSV path (default: the config's [output] path, else stdout)")
    p.add_argument("--plot", action="store_true", help="also write an SVG next to the CSV")
    p.add_argument("--workers", type=int, help="FFT worker threads (results do not depend on it)")
    p.add_argument("--mem-gib", type=float, help="memory budget in GiB")
    p.add_argument("--slow", action="store_true", help="verify: include the slow criteria")
    return p


def _exit_code_for(cfg, table):
    if not table.complete:
        return EXIT_FAILED
    if cfg.command == "check":
        if any(r[3] for r in table.rows):
            return EXIT_REFUSED
        if not all(r[1] for r in table.rows):
            return EXIT_FAILED
    return EXIT_OK


def main(argv=None):
    args = _parser().parse_args(argv)
    if args.workers is not None and args.workers < 1:
        print("wgl: --workers must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    if args.mem_gib is not None and not args.mem_gib > 0:
        print("wgl: --mem-gib must be positive", file=sys.stderr)
        return EXIT_USAGE
    if args.command == "verify":
        from .acceptance import run_criteria
        results = run_criteria(include_slow=args.slow, workers=args.workers, mem_gib=args.mem_gib)
        for r in results:
            print(r.line())
        return EXIT_OK if all(r.passed for r in results) else EXIT_FAILED
    if args.config is None:
        if args.command != "check":
            print(f"wgl: {args.command} needs --config", file=sys.stderr)
            return EXIT_USAGE
        text = "command = check\n"
    else:
        try:
            with open(args.config, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            print(f"wgl: cannot read {args.config}: {exc}", file=sys.stderr)
            return EXIT_USAGE
    try:
        cfg = parse_config(text, default_command=args.command)
    except ConfigError as exc:
        for n, msg in exc.errors:
            print(f"{args.config or '<config>'}:{n}: {msg}", file=sys.stderr)
        return EXIT_USAGE
    if cfg.command != args.command:
        print(f"wgl: config command {cfg.command!r} does not match {args.command!r}", file=sys.stderr)
        return EXIT_USAGE
    cfg = replace(cfg, workers=args.workers, mem_gib=args.mem_gib)
    table = run(cfg)
    out = args.out or cfg.output.get("path")
    if out is None:
        sys.stdout.write(format_csv(table))
    else:
        write_csv(table, out)
    if args.plot or cfg.output.get("plot", False):
        if out is None:
            print("wgl: --plot needs an output path", file=sys.stderr)
            return EXIT_USAGE
        svg_path = os.path.splitext(out)[0] + ".svg"
        axes = cfg.output.get("axes", DEFAULTS["axes"])
        plot_table = table
        if cfg.command == "sweep":
            emit_svg_plot(plot_table, axes, svg_path, x="lambda", ys=["a_norm", "predicted_count"])
        elif cfg.command == "report" and "lambda" in table.header:
            emit_svg_plot(plot_table, axes, svg_path, x="lambda",
                          ys=[c for c in ("a_norm", "predicted_count") if c in table.header])
        else:
            emit_svg_plot(plot_table, axes, svg_path)
    return _exit_code_for(cfg, table)


if __name__ == "__main__":
    sys.exit(main())
