"""Lambda sweeps of A-norm estimates, growth-exponent fits and the covering comparison.

A sweep evaluates :func:`wgl.fourier.a_norm_estimate` at each lambda in turn.
Parallelism lives inside each evaluation (the FFT worker count), so the
values, the grids reached and the memory footprint do not depend on how many
workers are used.
"""

from dataclasses import dataclass, field
import math
import time
from typing import Optional

import numpy as np

from .covering import ExponentFit, covering_bound, power_fit, _fit
from .fourier import GridSpec, a_norm_estimate
from ._numerics import MemoryBudgetError

__all__ = [
    "SweepRecord",
    "GrowthReport",
    "GrowthFitError",
    "sweep",
    "fit_growth",
    "fit_range",
    "compare_to_theorem",
    "DEFAULT_LAMBDAS",
    "SWEEP_HEADER",
]

DEFAULT_LAMBDAS = {
    1: [2.0**j for j in range(3, 11)],
    2: [2.0**j for j in range(3, 9)],
    3: [2.0**j for j in range(2, 6)],
}

SWEEP_HEADER = ("phase", "lambda", "a_norm", "converged", "predicted_count", "seconds")


class GrowthFitError(ValueError):
    """Raised when a growth fit is refused for lack of usable records."""


@dataclass(frozen=True)
class SweepRecord:
    """One lambda of a sweep.

    ``a_norm`` is ``None`` and ``error`` holds the message when the estimate
    could not be computed (memory budget, non-finite phase values).
    """

    lam: float
    a_norm: Optional[object]
    wall_seconds: float
    grid_final: Optional[GridSpec]
    error: Optional[str] = None

    @property
    def ok(self):
        return self.a_norm is not None

    @property
    def converged(self):
        return self.ok and bool(self.a_norm.converged)

    @property
    def value(self):
        return self.a_norm.value if self.ok else math.nan


@dataclass(frozen=True)
class GrowthReport:
    """Measured growth of a phase set against the covering-number prediction.

    ``verdict`` is ``"consistent"`` when the measured power slope is at least
    the predicted slope minus ``slack`` and every record in the fit range
    converged; ``"inconclusive"`` when some record in the range did not
    converge; ``"inconsistent"`` otherwise.  ``stable`` is False when
    dropping the smallest lambda of the fit range moves the measured slope by
    more than 0.1.
    """

    phase_name: str
    records: tuple
    measured_fit: ExponentFit
    predicted_counts: tuple
    predicted_fit: ExponentFit
    verdict: str
    slack: float
    stable: bool
    stability_shift: float
    caveats: tuple = field(default=())

    def rows(self, include_timing=False):
        """Rows matching :data:`SWEEP_HEADER`; ``seconds`` is blank unless ``include_timing``."""
        counts = dict(self.predicted_counts)
        out = []
        for r in self.records:
            out.append((self.phase_name, r.lam, r.value, r.converged, counts.get(r.lam, ""),
                        r.wall_seconds if include_timing else ""))
        return out


def _check_lambdas(lambdas):
    lams = [float(x) for x in lambdas]
    if not lams:
        raise ValueError("at least one lambda is required")
    for x in lams:
        if not (x > 0 and math.isfinite(x)):
            raise ValueError(f"lambda values must be positive and finite, got {x}")
    if len(set(lams)) != len(lams):
        raise ValueError("duplicate lambda values")
    if any(b <= a for a, b in zip(lams, lams[1:])):
        raise ValueError("lambda values must be strictly increasing")
    return lams


def sweep(phase, lambdas, tol=0.02, tail_cap=0.01, max_axis_size=None, workers=None, mem_gib=None,
          progress=None):
    """A-norm estimates of ``e^{i lam phase}`` for each ``lam`` in ``lambdas``.

    Parameters
    ----------
    phase : Phase
    lambdas : sequence of float
        Positive and strictly increasing.
    tol, tail_cap, max_axis_size, mem_gib
        Passed to :func:`wgl.fourier.a_norm_estimate`.
    workers : int, optional
        FFT worker threads.  Results do not depend on it.
    progress : callable, optional
        Called with each finished record.

    Returns
    -------
    list of SweepRecord
        Sorted by lambda.  Resource failures are recorded, not raised.
    """
    lams = _check_lambdas(lambdas)
    records = []
    for lam in lams:
        t0 = time.perf_counter()
        try:
            est = a_norm_estimate(phase, lam, tol=tol, tail_cap=tail_cap, max_axis_size=max_axis_size,
                                  workers=workers, mem_gib=mem_gib)
            rec = SweepRecord(lam, est, time.perf_counter() - t0, est.grid_used)
        except (MemoryBudgetError, MemoryError, FloatingPointError) as exc:
            rec = SweepRecord(lam, None, time.perf_counter() - t0, None, f"{type(exc).__name__}: {exc}")
        records.append(rec)
        if progress is not None:
            progress(rec)
    return records


def fit_range(n):
    """Index of the first record in the fit range for ``n`` records: the top half, at least 3 points."""
    return max(0, min(n // 2, n - 3))


def _usable(records, require_converged):
    recs = sorted(records, key=lambda r: r.lam)
    good = [r for r in recs if (r.converged if require_converged else r.ok)]
    if len(good) < 4:
        kind = "converged" if require_converged else "successful"
        raise GrowthFitError(f"growth fit needs at least 4 {kind} records, got {len(good)} of {len(recs)}")
    return good


def fit_growth(records, model="power", require_converged=True):
    """Fit the growth of the A-norm against lambda.

    ``"power"`` regresses ``log a_norm`` on ``log lam`` over the top half of
    the records (see :func:`fit_range`).  ``"log"`` regresses ``a_norm`` on
    ``log lam`` over all records and sets ``ratio_band`` to
    ``max(a_norm / log lam) / min(a_norm / log lam)``; it needs ``lam > 1``.
    """
    good = _usable(records, require_converged)
    lam = np.array([r.lam for r in good])
    val = np.array([r.value for r in good])
    if model == "power":
        return power_fit(lam, val, first=fit_range(len(good)))
    if model == "log":
        if np.any(lam <= 1):
            raise GrowthFitError("the log model needs every lambda > 1")
        loglam = np.log(lam)
        base = _fit(loglam, val, (0, len(good) - 1))
        ratio = val / loglam
        return ExponentFit(base.slope, base.intercept, base.stderr, base.r2, base.range_used,
                           base.degenerate, float(ratio.max() / ratio.min()))
    raise ValueError(f"unknown growth model {model!r}; use 'power' or 'log'")


def compare_to_theorem(records, cloud, slack=0.15, name=None):
    """Compare measured growth with the cube count of ``cloud`` at ``eps = 1/lam``.

    ``cloud`` samples the image of the phase's curve ``a``.  Both sides are
    fitted over the same lambda range.  Unconverged records are kept in the
    fit but make the verdict inconclusive.
    """
    good = _usable(records, require_converged=False)
    lam = np.array([r.lam for r in good])
    val = np.array([r.value for r in good])
    first = fit_range(len(good))
    measured = power_fit(lam, val, first=first)
    counts = tuple((r.lam, covering_bound(cloud, r.lam)) for r in good)
    predicted = power_fit(lam, [c for _, c in counts], first=first)

    caveats = []
    in_range = good[first:]
    skipped = [r.lam for r in records if not r.ok]
    if skipped:
        caveats.append(f"records without an estimate: {skipped}")
    unconverged = [r.lam for r in in_range if not r.converged]
    unconverged += [x for x in skipped if x >= in_range[0].lam]
    if len(in_range) > 2:
        shifted = power_fit(lam, val, first=first + 1)
        shift = abs(shifted.slope - measured.slope)
    else:
        shift = 0.0
    stable = shift <= 0.1
    if not stable:
        caveats.append(f"dropping lambda={in_range[0].lam:g} moves the slope by {shift:.3f}")
    if unconverged:
        verdict = "inconclusive"
        caveats.append(f"unconverged in fit range: {unconverged}")
    elif measured.slope >= predicted.slope - slack:
        verdict = "consistent"
    else:
        verdict = "inconsistent"
    phase_name = name if name is not None else str(cloud.source.get("phase", cloud.source.get("curve", "")))
    return GrowthReport(phase_name, tuple(sorted(records, key=lambda r: r.lam)), measured, counts, predicted,
                        verdict, slack, stable, shift, tuple(caveats))
