"""Phase functions, curves and triangle windows.

A :class:`CurveMap` is a map ``a: T^k -> R^m`` and a :class:`Phase` is a real
function on ``T^d``.  Both evaluate on numpy arrays with broadcasting, so a
phase on a tensor grid can be sampled from sparse (open) coordinate arrays
without materializing ``d`` full coordinate grids.

The concrete constructions are

* cosine and piecewise-linear phases on the circle,
* product phases ``phi(x, y) = sum_j a_j(x) b_j(y)``,
* the Weierstrass function, the lacunary series ``sum k^-sigma e^{i 2^k t}``
  and the Gaussian random series ``sum 2^{-n/s0} (X_n cos 2^n t + Y_n sin 2^n t)``.
"""

from dataclasses import dataclass, field
import math
from typing import Callable, Optional

import numpy as np
from numpy.random import Generator, Philox
from scipy.special import ndtri

from ._numerics import TWO_PI, reduce_angle

__all__ = [
    "Phase",
    "CurveMap",
    "TriangleWindow",
    "triangle_eval",
    "triangle_ft",
    "product_phase",
    "constant_phase",
    "abs_map",
    "constant_curve",
    "cos_curve",
    "circle_curve",
    "weierstrass_eval",
    "weierstrass_tail_bound",
    "lacunary_eval",
    "gaussian_coefficients",
    "gaussian_curve_eval",
    "weierstrass_curve",
    "weierstrass_graph",
    "lacunary_curve",
    "gaussian_curve",
    "estimate_modulus",
    "catalog",
    "lookup",
]


@dataclass(frozen=True)
class CurveMap:
    """A map ``a: T^k -> R^m``.

    ``func`` takes ``k`` broadcastable coordinate arrays and returns a tuple of
    ``m`` arrays.  Call the instance with an ``(M, k)`` array of points to get
    an ``(M, m)`` array.
    """

    name: str
    k: int
    m: int
    func: Callable
    sup_norm_bound: float
    params: dict = field(default_factory=dict)
    lipschitz_bound: Optional[float] = None

    def components(self, *coords):
        if len(coords) != self.k:
            raise ValueError(f"{self.name}: expected {self.k} coordinates, got {len(coords)}")
        out = self.func(*coords)
        shape = np.broadcast_shapes(*(np.shape(c) for c in coords))
        return tuple(np.broadcast_to(np.asarray(c, dtype=np.float64), shape) for c in out)

    def __call__(self, x):
        x = np.asarray(x, dtype=np.float64)
        if self.k == 1 and x.ndim == 1:
            x = x[:, None]
        if x.shape[-1] != self.k:
            raise ValueError(f"{self.name}: points must have trailing dimension {self.k}")
        comps = self.components(*(x[..., j] for j in range(self.k)))
        return np.stack(comps, axis=-1)

    def scaled(self, c):
        return CurveMap(
            name=f"{c!r}*{self.name}",
            k=self.k,
            m=self.m,
            func=lambda *xs: tuple(c * v for v in self.func(*xs)),
            sup_norm_bound=abs(c) * self.sup_norm_bound,
            params={**self.params, "scale": c},
            lipschitz_bound=None if self.lipschitz_bound is None else abs(c) * self.lipschitz_bound,
        )


@dataclass(frozen=True)
class Phase:
    """A real phase function on ``[-pi, pi)^dim``.

    ``oscillation_hint`` bounds how fast the phase varies, either as one
    scalar or as one value per axis; the Fourier engine sizes its starting
    grid from it.  ``expected_exponent`` is
    documentation for reports (0 means logarithmic growth) and never feeds
    back into computation.  ``curve`` is the inner map ``a`` for product
    phases, used to build the covering-number prediction.
    """

    name: str
    dim: int
    func: Callable
    oscillation_hint: object
    expected_exponent: Optional[float] = None
    params: dict = field(default_factory=dict)
    curve: Optional[CurveMap] = None

    def __call__(self, *coords):
        if len(coords) != self.dim:
            raise ValueError(f"{self.name}: expected {self.dim} coordinates, got {len(coords)}")
        return np.asarray(self.func(*coords), dtype=np.float64)

    def axis_hints(self):
        h = np.broadcast_to(np.asarray(self.oscillation_hint, dtype=np.float64), (self.dim,))
        return tuple(float(v) for v in h)

    @property
    def max_hint(self):
        return max(self.axis_hints())

    def shifted(self, c):
        """The phase ``phi + c``."""
        return Phase(
            name=f"{self.name}+{c!r}",
            dim=self.dim,
            func=lambda *t: self.func(*t) + c,
            oscillation_hint=self.oscillation_hint,
            expected_exponent=self.expected_exponent,
            params={**self.params, "shift": c},
            curve=self.curve,
        )

    def to_config(self):
        """Render the parameter record in the runner's ``key = value`` format."""
        lines = ["[phase]", f"name = {self.params.get('catalog_name', self.name)}"]
        for key in sorted(self.params):
            if key == "catalog_name":
                continue
            lines.append(f"{key} = {_format_value(self.params[key])}")
        return "\n".join(lines) + "\n"


def _format_value(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


# -- triangle windows -------------------------------------------------------


@dataclass(frozen=True)
class TriangleWindow:
    """Product of per-axis tents ``max(0, 1 - |t - c_j| / delta_j)``."""

    centers: tuple
    half_widths: tuple

    def __post_init__(self):
        c = tuple(float(v) for v in np.atleast_1d(self.centers))
        h = tuple(float(v) for v in np.atleast_1d(self.half_widths))
        if len(c) != len(h):
            raise ValueError("centers and half_widths must have equal length")
        if any(not v > 0 for v in h):
            raise ValueError(f"half widths must be positive, got {h}")
        object.__setattr__(self, "centers", c)
        object.__setattr__(self, "half_widths", h)

    @classmethod
    def centered(cls, half_widths):
        h = np.atleast_1d(np.asarray(half_widths, dtype=np.float64))
        return cls(tuple(np.zeros_like(h)), tuple(h))

    @property
    def dim(self):
        return len(self.centers)

    def axis_values(self, j, t):
        return np.maximum(0.0, 1.0 - np.abs(np.asarray(t, dtype=np.float64) - self.centers[j]) / self.half_widths[j])


def triangle_eval(window, t):
    """Evaluate a :class:`TriangleWindow` at points ``t`` of shape ``(..., d)``."""
    t = np.asarray(t, dtype=np.float64)
    if window.dim == 1 and t.ndim == 0:
        t = t[None]
    if t.shape[-1] != window.dim:
        raise ValueError(f"point dimension {t.shape[-1]} does not match window dimension {window.dim}")
    out = np.ones(t.shape[:-1])
    for j in range(window.dim):
        out = out * window.axis_values(j, t[..., j])
    return out if out.ndim else float(out)


def triangle_ft(delta, u):
    """Fourier transform on R of the tent of half-width ``delta``.

    Uses the ``(1/2pi) int f(t) e^{-iut} dt`` normalization, so the value at
    ``u = 0`` is ``delta / (2 pi)``.  For ``|delta u| < 1e-4`` a two-term
    series replaces the closed form.
    """
    if not delta > 0:
        raise ValueError(f"delta must be positive, got {delta!r}")
    u = np.asarray(u, dtype=np.float64)
    x = delta * u
    small = np.abs(x) < 1e-4
    safe = np.where(small, 1.0, u)
    closed = (2.0 / math.pi) * np.sin(delta * safe / 2.0) ** 2 / (delta * safe**2)
    # sin^2(x/2) / x^2 = 1/4 - x^2/48 + ...
    series = (delta / (2.0 * math.pi)) * (1.0 - x**2 / 12.0)
    out = np.where(small, series, closed)
    return out if out.ndim else float(out)


# -- elementary curves and maps ----------------------------------------------


def constant_curve(value, k=1):
    value = np.atleast_1d(np.asarray(value, dtype=np.float64))
    vals = tuple(float(v) for v in value)
    return CurveMap(
        name="constant",
        k=k,
        m=len(vals),
        func=lambda *xs: tuple(np.full(np.broadcast_shapes(*(np.shape(x) for x in xs)), v) for v in vals),
        sup_norm_bound=float(np.linalg.norm(value)),
        params={"value": list(vals)},
        lipschitz_bound=0.0,
    )


def cos_curve():
    return CurveMap(name="cos", k=1, m=1, func=lambda x: (np.cos(x),), sup_norm_bound=1.0,
                    lipschitz_bound=1.0)


def circle_curve():
    return CurveMap(
        name="circle", k=1, m=2, func=lambda x: (np.cos(x), np.sin(x)), sup_norm_bound=1.0,
        lipschitz_bound=1.0,
    )


def abs_map(m=1):
    """``b(y) = (|y_1|, ..., |y_m|)`` on ``[-pi, pi]^m``; affine on ``(0, pi)^m``."""
    return CurveMap(
        name="abs",
        k=m,
        m=m,
        func=lambda *ys: tuple(np.abs(reduce_angle(y)) for y in ys),
        sup_norm_bound=math.pi * math.sqrt(m),
        lipschitz_bound=1.0,
    )


def constant_phase(value=0.0, dim=1):
    return Phase(
        name="constant",
        dim=dim,
        func=lambda *t: np.full(np.broadcast_shapes(*(np.shape(x) for x in t)), float(value)),
        oscillation_hint=0.0,
        expected_exponent=0.0,
        params={"value": float(value)},
    )


def product_phase(a, b, name=None, expected_exponent=None, params=None):
    """``phi(x, y) = sum_j a_j(x) b_j(y)`` on ``T^(a.k + b.m)``."""
    if a.m != b.m:
        raise ValueError(f"inner dimensions differ: a maps to R^{a.m}, b maps to R^{b.m}")
    if b.k != b.m:
        raise ValueError(f"b must map T^m to R^m, got k={b.k}, m={b.m}")
    k, m = a.k, b.m
    if a.lipschitz_bound is not None and b.lipschitz_bound is not None:
        # |d phi / dx| <= Lip(a) sup|b|,  |d phi / dy| <= sup|a| Lip(b)
        hint = (a.lipschitz_bound * b.sup_norm_bound,) * k + (a.sup_norm_bound * b.lipschitz_bound,) * m
    else:
        hint = a.sup_norm_bound * b.sup_norm_bound

    def func(*t):
        left = a.components(*t[:k])
        right = b.components(*t[k:])
        out = left[0] * right[0]
        for j, (lj, rj) in enumerate(zip(left[1:], right[1:])):
            # in-place after the first add keeps one full-size temporary
            if j == 0:
                out = out + lj * rj
            else:
                out += lj * rj
        return out

    return Phase(
        name=name or f"({a.name},{b.name})",
        dim=k + m,
        func=func,
        oscillation_hint=hint,
        expected_exponent=expected_exponent,
        params=dict(params or {}),
        curve=a,
    )


# -- series curves -------------------------------------------------------------


def _check_terms(terms):
    if int(terms) != terms or terms < 0:
        raise ValueError(f"number of terms must be a nonnegative integer, got {terms!r}")
    return int(terms)


def weierstrass_eval(s0, terms, t):
    """Partial sum ``sum_{n<terms} 2^{-(2-s0) n} cos(2^n t)``.

    The truncation error is at most :func:`weierstrass_tail_bound`.
    """
    if not 1.0 < s0 < 2.0:
        raise ValueError(f"s0 must lie in (1, 2), got {s0!r}")
    terms = _check_terms(terms)
    t = reduce_angle(t)
    out = np.zeros_like(t)
    r = 2.0 ** -(2.0 - s0)
    for n in range(terms):
        out += r**n * np.cos(2.0**n * t)
    return out


def weierstrass_tail_bound(s0, terms):
    r = 2.0 ** -(2.0 - s0)
    return r**terms / (1.0 - r)


def lacunary_eval(sigma, terms, t):
    """Real and imaginary parts of ``sum_{k=1}^{terms} k^-sigma e^{i 2^k t}``.

    Returns an array of shape ``t.shape + (2,)``.
    """
    if not sigma > 1.0:
        raise ValueError(f"sigma must exceed 1, got {sigma!r}")
    re, im = _lacunary_parts(sigma, _check_terms(terms), t)
    return np.stack([re, im], axis=-1)


def _lacunary_parts(sigma, terms, t):
    t = reduce_angle(t)
    re = np.zeros_like(t)
    im = np.zeros_like(t)
    for k in range(1, terms + 1):
        arg = 2.0**k * t
        re += k**-sigma * np.cos(arg)
        im += k**-sigma * np.sin(arg)
    return re, im


def gaussian_coefficients(seed, m, terms):
    """Standard normal ``X_n, Y_n`` in ``R^m`` for ``n < terms``.

    Uniforms come from the counter-based Philox generator as 53-bit midpoints
    ``(j + 1/2) / 2^53`` and are mapped through the inverse normal CDF, so the
    values are bitwise reproducible and a longer series extends a shorter one.
    """
    terms = _check_terms(terms)
    bits = Generator(Philox(int(seed))).integers(0, 1 << 53, size=2 * m * terms, dtype=np.uint64)
    u = (bits.astype(np.float64) + 0.5) / 2.0**53
    z = ndtri(u).reshape(terms, 2, m)
    return z[:, 0, :], z[:, 1, :]


def gaussian_curve_eval(seed, s0, m, terms, t):
    """Partial sum of the Gaussian series; returns ``t.shape + (m,)``."""
    if not 1.0 <= s0 <= m:
        raise ValueError(f"s0 must lie in [1, m={m}], got {s0!r}")
    X, Y = gaussian_coefficients(seed, m, terms)
    t = reduce_angle(t)
    out = np.zeros(t.shape + (m,))
    for n in range(X.shape[0]):
        arg = 2.0**n * t
        out += 2.0 ** (-n / s0) * (np.cos(arg)[..., None] * X[n] + np.sin(arg)[..., None] * Y[n])
    return out


def weierstrass_curve(s0=1.5, terms=20):
    r = 2.0 ** -(2.0 - s0)
    return CurveMap(
        name="weierstrass",
        k=1,
        m=1,
        func=lambda x: (weierstrass_eval(s0, terms, x),),
        sup_norm_bound=(1.0 - r**terms) / (1.0 - r),
        params={"s0": s0, "terms": terms},
        lipschitz_bound=_weierstrass_lipschitz(s0, terms),
    )


def _weierstrass_lipschitz(s0, terms):
    return float(sum(2.0 ** ((s0 - 1.0) * n) for n in range(terms)))


def weierstrass_graph(s0=1.5, terms=20):
    """``a(t) = (|t|, w(t))``: a periodic curve whose image is the graph of w on [0, pi]."""
    w = weierstrass_curve(s0, terms)
    return CurveMap(
        name="weierstrass_graph",
        k=1,
        m=2,
        func=lambda x: (np.abs(reduce_angle(x)), weierstrass_eval(s0, terms, x)),
        sup_norm_bound=math.hypot(math.pi, w.sup_norm_bound),
        params={"s0": s0, "terms": terms},
        lipschitz_bound=math.hypot(1.0, w.lipschitz_bound),
    )


def lacunary_curve(sigma=1.1, terms=20):
    return CurveMap(
        name="lacunary",
        k=1,
        m=2,
        func=lambda x: _lacunary_parts(sigma, terms, x),
        sup_norm_bound=float(sum(k**-sigma for k in range(1, terms + 1))),
        params={"sigma": sigma, "terms": terms},
        lipschitz_bound=float(sum(2.0**k * k**-sigma for k in range(1, terms + 1))),
    )


def gaussian_curve(seed=42, s0=1.5, m=2, terms=20):
    X, Y = gaussian_coefficients(seed, m, terms)
    bound = float(sum(2.0 ** (-n / s0) * (np.linalg.norm(X[n]) + np.linalg.norm(Y[n])) for n in range(terms)))

    def func(x):
        pts = gaussian_curve_eval(seed, s0, m, terms, x)
        return tuple(pts[..., j] for j in range(m))

    return CurveMap(
        name="gaussian",
        k=1,
        m=m,
        func=func,
        sup_norm_bound=bound,
        params={"seed": seed, "s0": s0, "m": m, "terms": terms},
        lipschitz_bound=float(sum(2.0 ** (n - n / s0) * (np.linalg.norm(X[n]) + np.linalg.norm(Y[n]))
                                  for n in range(terms))),
    )


# -- modulus of continuity ----------------------------------------------------


def _unit_directions(k):
    dirs = [np.eye(k)[j] for j in range(k)]
    if k > 1:
        for signs in np.ndindex(*(2,) * (k - 1)):
            v = np.array([1.0] + [1.0 if s == 0 else -1.0 for s in signs])
            dirs.append(v / np.linalg.norm(v))
    return dirs


def estimate_modulus(a, delta, samples=4096, lags=16):
    """Lower estimate of ``omega(delta) = sup_{|x1-x2|<=delta} |a(x1) - a(x2)|``.

    Base points form a uniform grid of ``samples`` points per axis; each is
    paired with displacements ``delta * j / lags`` (``j = 1..lags``) along the
    coordinate axes and, for ``k > 1``, the main diagonals.  Several deltas may
    be passed at once, in which case a running maximum over sorted deltas
    enforces monotonicity.
    """
    if samples < 2:
        raise ValueError("need at least two samples per axis")
    deltas = np.atleast_1d(np.asarray(delta, dtype=np.float64))
    if np.any(deltas < 0):
        raise ValueError("delta must be nonnegative")
    axis = -math.pi + TWO_PI * np.arange(samples) / samples
    if a.k == 1:
        base = axis[:, None]
    else:
        mesh = np.meshgrid(*([axis] * a.k), indexing="ij")
        base = np.stack([g.ravel() for g in mesh], axis=-1)
    ref = a(base)
    dirs = _unit_directions(a.k)
    raw = np.zeros(deltas.size)
    for i, d in enumerate(deltas):
        if d == 0:
            continue
        best = 0.0
        for j in range(1, lags + 1):
            h = d * j / lags
            for e in dirs:
                diff = a(base + h * e) - ref
                best = max(best, float(np.sqrt((diff**2).sum(axis=-1)).max()))
        raw[i] = best
    order = np.argsort(deltas, kind="stable")
    mono = np.empty_like(raw)
    mono[order] = np.maximum.accumulate(raw[order])
    return float(mono[0]) if np.ndim(delta) == 0 else mono


# -- catalog -------------------------------------------------------------------


def _pwlin(t):
    # 0 at -pi, 0, pi; 1 at +-pi/2
    return 1.0 - np.abs(1.0 - 2.0 * np.abs(reduce_angle(t)) / math.pi)


def _cos1d():
    return Phase("cos1d", 1, lambda t: np.cos(t), oscillation_hint=1.0, expected_exponent=0.5,
                 params={"catalog_name": "cos1d"})


def _pwlin1d():
    return Phase("pwlin1d", 1, _pwlin, oscillation_hint=2.0 / math.pi, expected_exponent=0.0,
                 params={"catalog_name": "pwlin1d"})


def _cos_abs2d():
    return product_phase(cos_curve(), abs_map(1), name="cos_abs2d", expected_exponent=1.0,
                         params={"catalog_name": "cos_abs2d"})


def _weier_abs2d(s0=1.5, terms=8):
    # scaled to Lipschitz bound 1: exponents are scale invariant, grid needs are not
    w = weierstrass_curve(s0, terms)
    return product_phase(w.scaled(1.0 / w.lipschitz_bound), abs_map(1), name="weier_abs2d",
                         expected_exponent=1.0,
                         params={"catalog_name": "weier_abs2d", "s0": s0, "terms": terms})


def _fill3d(sigma=1.1, terms=20):
    return product_phase(lacunary_curve(sigma, terms), abs_map(2), name="fill3d", expected_exponent=2.0,
                         params={"catalog_name": "fill3d", "sigma": sigma, "terms": terms})


_FACTORIES = {
    "cos1d": _cos1d,
    "pwlin1d": _pwlin1d,
    "cos_abs2d": _cos_abs2d,
    "weier_abs2d": _weier_abs2d,
    "fill3d": _fill3d,
    "cos": cos_curve,
    "circle": circle_curve,
    "weierstrass": weierstrass_curve,
    "weierstrass_graph": weierstrass_graph,
    "lacunary": lacunary_curve,
    "gaussian": gaussian_curve,
}


def catalog():
    """All named constructions, built with default parameters."""
    return [factory() for factory in _FACTORIES.values()]


def lookup(name, **params):
    """Build the named phase or curve, overriding default parameters."""
    try:
        factory = _FACTORIES[name]
    except KeyError:
        raise KeyError(f"unknown phase or curve {name!r}; known: {sorted(_FACTORIES)}") from None
    return factory(**params)
