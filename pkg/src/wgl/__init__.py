"""Wiener-algebra norms of ``exp(i lambda phi)`` on tori, covering numbers and box dimensions.

Modules
-------
phases
    Phase functions, curves, tent windows and the named catalog.
fourier
    Torus sampling, FFT coefficients, A-norm estimates and quadrature oracles.
covering
    Box counting, dimension fits and neighbourhood volumes of point clouds.
growth
    Lambda sweeps, growth fits and the covering-number comparison.
checks
    Numerical checks of the window estimates and the covering inequality.
cli
    The ``wgl`` batch runner.
"""

__version__ = "0.1.0"

from .phases import Phase, CurveMap, TriangleWindow, catalog, lookup, product_phase, triangle_ft
from .fourier import GridSpec, Field, Spectrum, ANormEstimate, a_norm_estimate, coefficient_oracle, \
    discrete_a_norm, sample_field, spectrum, tail_fraction, window_ft_quadrature
from .covering import PointCloud, BoxCountCurve, ExponentFit, box_count, covering_bound, dimension_fit, \
    neighborhood_measure, sample_curve
from .growth import SweepRecord, GrowthReport, sweep, fit_growth, compare_to_theorem
from .checks import CheckReport, ConcentrationProbe, make_probe, run_all

__all__ = [
    "Phase", "CurveMap", "TriangleWindow", "catalog", "lookup", "product_phase", "triangle_ft",
    "GridSpec", "Field", "Spectrum", "ANormEstimate", "a_norm_estimate", "coefficient_oracle",
    "discrete_a_norm", "sample_field", "spectrum", "tail_fraction", "window_ft_quadrature",
    "PointCloud", "BoxCountCurve", "ExponentFit", "box_count", "covering_bound", "dimension_fit",
    "neighborhood_measure", "sample_curve",
    "SweepRecord", "GrowthReport", "sweep", "fit_growth", "compare_to_theorem",
    "CheckReport", "ConcentrationProbe", "make_probe", "run_all",
]
