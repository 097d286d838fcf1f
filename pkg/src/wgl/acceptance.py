"""Acceptance criteria with pinned tolerances, shared by ``wgl verify`` and the test suite.

Each ``criterion_N`` returns a :class:`Criterion`; :func:`run_criteria` runs
them in order.  Sweeps shared between criteria are computed once per process.
"""

from dataclasses import dataclass
import functools
import math
import os
import warnings

import numpy as np
from scipy.special import jv

from .checks import check_covering_inequality, check_lemma1, check_lemma2, check_triangle_ft, default_clouds, \
    make_probe
from .cli import format_csv, parse_config, run
from .covering import PointCloud, box_count, dimension_fit, dyadic_epsilons, sample_curve
from .fourier import GridSpec, a_norm_estimate, coefficient_oracle, discrete_a_norm, field_from_function, \
    sample_field, spectrum
from .growth import compare_to_theorem, fit_growth, sweep
from .phases import TriangleWindow, cos_curve, lookup, triangle_eval, weierstrass_graph

__all__ = ["Criterion", "CRITERIA", "SLOW", "run_criteria", "DEFAULT_SUITE"]

# pinned tolerances
TRIANGLE_ABS = 1e-8
EXACT_ABS = 1e-12
TENT_ABS = 1e-3
ORACLE_ABS = 1e-6
JACOBI_ABS = 1e-6
C2_BAND = (0.40, 0.60)
PWLIN_RATIO_MAX = 4.0
PWLIN_SLOPE_MAX = 0.15
COR1_SLOPE_MIN = 0.85
THEOREM_SLACK = 0.15
FILL_SLOPE_MIN = 1.3
COVERING_SLACK = 1.05
WEIER_BAND = (1.35, 1.65)
SQUARE_BAND = (1.95, 2.05)
SEGMENT_BAND = (0.95, 1.05)

LAM_1D = [2.0**j for j in range(3, 11)]
LAM_2D = [2.0**j for j in range(3, 9)]
LAM_3D = [2.0**j for j in range(2, 6)]
CAP_2D = 4096
CAP_3D = 512


@dataclass(frozen=True)
class Criterion:
    number: int
    title: str
    passed: bool
    measured: str

    def line(self):
        return f"[{'PASS' if self.passed else 'FAIL'}] criterion {self.number:2d} {self.title}: {self.measured}"


_RUNTIME = {"workers": None, "mem_gib": None}


@functools.lru_cache(maxsize=None)
def _sweep(name, lams, cap):
    return sweep(lookup(name), list(lams), max_axis_size=cap, workers=_RUNTIME["workers"],
                 mem_gib=_RUNTIME["mem_gib"])


def criterion_1():
    r = check_triangle_ft((0.5, 1.0, 2.0), np.linspace(-20.0, 20.0, 401))
    err = r.details["max_abs_error"]
    return Criterion(1, "tent transform closed form vs quadrature", err <= TRIANGLE_ABS,
                     f"max abs error {err:.3g} (tol {TRIANGLE_ABS:g})")


def criterion_2():
    def norm_of(func, n):
        return discrete_a_norm(spectrum(field_from_function(func, GridSpec((n,)))))

    const = norm_of(lambda t: np.ones_like(t, dtype=np.complex128), 64)
    exp3 = norm_of(lambda t: np.exp(3j * t), 16)
    cos = norm_of(lambda t: np.cos(t).astype(np.complex128), 64)
    tent = TriangleWindow.centered([1.0])
    tent_n = norm_of(lambda t: triangle_eval(tent, t[:, None]).astype(np.complex128), 4096)
    errs = [abs(const - 1), abs(exp3 - 1), abs(cos - 1)]
    ok = const == 1.0 and max(errs) <= EXACT_ABS and abs(tent_n - 1) <= TENT_ABS
    return Criterion(2, "A-norm unit cases", ok,
                     f"constant {const!r}, e^(3it) {exp3!r}, cos {cos!r}, tent {tent_n:.6f}")


def criterion_3():
    worst = 0.0
    n_fft, n_quad = 1 << 14, 1 << 15
    for name in ("cos1d", "pwlin1d"):
        phase = lookup(name)
        for lam in (1.0, 4.0, 8.0):
            spec = spectrum(sample_field(phase, lam, GridSpec((n_fft,))))
            for n in range(-16, 17):
                diff = abs(spec.coefficient((n,)) - coefficient_oracle(phase, lam, (n,), n_quad))
                worst = max(worst, diff)
    est = a_norm_estimate(lookup("cos1d"), 1.0)
    ja = math.fsum(abs(jv(n, 1.0)) for n in range(-32, 33))
    ja_err = abs(est.value - ja)
    ok = worst <= ORACLE_ABS and ja_err <= JACOBI_ABS
    return Criterion(3, "FFT coefficients vs quadrature oracle; Jacobi-Anger", ok,
                     f"max coefficient diff {worst:.3g} (tol {ORACLE_ABS:g}), "
                     f"|A-norm - sum|J_n(1)|| {ja_err:.3g} (tol {JACOBI_ABS:g})")


def criterion_4():
    recs = _sweep("cos1d", tuple(LAM_1D), None)
    fit = fit_growth(recs, "power")
    lo, hi = C2_BAND
    ok = lo <= fit.slope <= hi
    return Criterion(4, "cos t growth exponent", ok,
                     f"power slope {fit.slope:.4f} in [{lo}, {hi}]; converged "
                     f"{sum(r.converged for r in recs)}/{len(recs)}")


def criterion_5():
    recs = _sweep("pwlin1d", tuple(LAM_1D), None)
    lfit = fit_growth(recs, "log")
    pfit = fit_growth(recs, "power")
    ok = lfit.ratio_band <= PWLIN_RATIO_MAX and pfit.slope <= PWLIN_SLOPE_MAX
    return Criterion(5, "piecewise-linear log law", ok,
                     f"ratio band {lfit.ratio_band:.3f} (max {PWLIN_RATIO_MAX}), power slope {pfit.slope:.4f} "
                     f"(max {PWLIN_SLOPE_MAX})")


def criterion_6():
    recs = _sweep("cos_abs2d", tuple(LAM_2D), CAP_2D)
    conv = all(r.converged for r in recs)
    fit = fit_growth(recs, "power", require_converged=False)
    ok = conv and fit.slope >= COR1_SLOPE_MIN
    return Criterion(6, "cos(x)|y| linear growth", ok,
                     f"power slope {fit.slope:.4f} (min {COR1_SLOPE_MIN}); all converged {conv}")


def _covering_report(name):
    phase = lookup(name)
    recs = _sweep(name, tuple(LAM_2D), CAP_2D)
    cloud = sample_curve(phase.curve, 1 << 20)
    return compare_to_theorem(recs, cloud, slack=THEOREM_SLACK, name=name)


def criterion_7():
    parts, ok = [], True
    for name in ("cos_abs2d", "weier_abs2d"):
        rep = _covering_report(name)
        good = rep.verdict == "consistent" and rep.measured_fit.slope >= rep.predicted_fit.slope - THEOREM_SLACK
        ok = ok and good
        parts.append(f"{name} measured {rep.measured_fit.slope:.4f} vs predicted {rep.predicted_fit.slope:.4f} "
                     f"({rep.verdict})")
    return Criterion(7, "measured vs covering-predicted slope", ok, "; ".join(parts))


def criterion_8():
    fill = _sweep("fill3d", tuple(LAM_3D), CAP_3D)
    ref = _sweep("cos_abs2d", tuple(LAM_3D), CAP_2D)
    f_fit = fit_growth(fill, "power", require_converged=False)
    r_fit = fit_growth(ref, "power", require_converged=False)
    ok = f_fit.slope >= FILL_SLOPE_MIN and f_fit.slope > r_fit.slope
    conv = sum(r.converged for r in fill)
    return Criterion(8, "3D space-filling example growth", ok,
                     f"fill3d slope {f_fit.slope:.4f} (min {FILL_SLOPE_MIN}), cos_abs2d slope {r_fit.slope:.4f}; "
                     f"fill3d converged {conv}/{len(fill)}, tails "
                     + ", ".join(f"{r.a_norm.tail_fraction:.2f}" for r in fill if r.ok))


def criterion_9():
    reps = [check_lemma1(d, delta, 201) for d in (1, 2, 3) for delta in (0.5, 1.0, 2.0)]
    worst = min(r.worst_margin for r in reps)
    return Criterion(9, "tent-window lower bound on lattices", all(r.passed for r in reps),
                     f"worst margin {worst:.4g} over {len(reps)} (d, delta) cases")


def criterion_10():
    parts, ok = [], True
    for lam in (64, 256):
        probe = make_probe(cos_curve(), lam, J_center=math.pi / 2, l=math.pi / 4)
        r = check_lemma2(probe)
        ok = ok and r.passed and not r.refused
        if r.refused:
            parts.append(f"lambda {lam}: refused ({r.details['refused']})")
        else:
            parts.append(f"lambda {lam}: min {r.details['min_value']:.4g} vs bound {r.details['bound']:.4g}")
    return Criterion(10, "window concentration at the explicit constant", ok, "; ".join(parts))


def criterion_11():
    r = check_covering_inequality(default_clouds(), (0.2, 0.1, 0.05))
    return Criterion(11, "covering inequality", r.passed,
                     f"worst relative margin {r.worst_margin:.4f} with slack {COVERING_SLACK}")


def _dense_square(n=1000):
    s = np.arange(n) / n
    gx, gy = np.meshgrid(s, s, indexing="ij")
    return PointCloud(np.stack([gx.ravel(), gy.ravel()], axis=1), {"curve": "square"})


def _dense_segment(n=100000):
    s = np.arange(n) / n
    return PointCloud(np.stack([s, np.zeros_like(s)], axis=1), {"curve": "segment"})


def criterion_12():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        w = dimension_fit(box_count(sample_curve(weierstrass_graph(1.5, 20), 10**6), dyadic_epsilons(3, 10)))
    sq = dimension_fit(box_count(_dense_square(), dyadic_epsilons(1, 8)))
    seg = dimension_fit(box_count(_dense_segment(), dyadic_epsilons(3, 10)))
    ok = (WEIER_BAND[0] <= w.slope <= WEIER_BAND[1] and SQUARE_BAND[0] <= sq.slope <= SQUARE_BAND[1]
          and SEGMENT_BAND[0] <= seg.slope <= SEGMENT_BAND[1])
    return Criterion(12, "box dimensions", ok,
                     f"Weierstrass graph {w.slope:.4f} in {list(WEIER_BAND)}, square {sq.slope:.4f}, "
                     f"segment {seg.slope:.4f}")


DEFAULT_SUITE = {
    "check": "command = check\n",
    "norm_cos1d": "command = norm\nphase = cos1d\n[sweep]\nlambda = [0, 1, 16]\n",
    "sweep_cos1d": "command = sweep\nphase = cos1d\n",
    "sweep_pwlin1d": "command = sweep\nphase = pwlin1d\n",
    "sweep_cos_abs2d": "command = sweep\nphase = cos_abs2d\n[sweep]\nmax_axis_size = 4096\n",
    "boxdim_weierstrass": "command = boxdim\ncurve = weierstrass_graph\n",
    "curve_gaussian": "command = curve\ncurve = gaussian\n[covering]\nsamples = 100000\n",
}


def suite_outputs(workers=None, mem_gib=None):
    """CSV text of every config in :data:`DEFAULT_SUITE`."""
    from dataclasses import replace

    out = {}
    for key, text in DEFAULT_SUITE.items():
        cfg = replace(parse_config(text), workers=workers, mem_gib=mem_gib)
        out[key] = format_csv(run(cfg))
    return out


def criterion_13():
    first = suite_outputs(workers=1, mem_gib=_RUNTIME["mem_gib"])
    second = suite_outputs(workers=os.cpu_count() or 1, mem_gib=_RUNTIME["mem_gib"])
    diff = [k for k in first if first[k].encode() != second[k].encode()]
    return Criterion(13, "byte-identical CSV across runs and worker counts", not diff,
                     f"{len(first)} outputs compared, differing: {diff or 'none'}")


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7,
            criterion_8, criterion_9, criterion_10, criterion_11, criterion_12, criterion_13]
SLOW = {8}


def run_criteria(include_slow=False, workers=None, mem_gib=None):
    _RUNTIME.update(workers=workers, mem_gib=mem_gib)
    results = []
    for i, fn in enumerate(CRITERIA, start=1):
        if i in SLOW and not include_slow:
            continue
        results.append(fn())
    return results
