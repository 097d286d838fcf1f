"""Fourier coefficients and Wiener-algebra norms on the torus.

The fast path samples ``e^{i lam phi}`` on a uniform grid of ``[-pi, pi)^d``
and takes a normalized FFT; :func:`a_norm_estimate` doubles the grid until the
l1 sum of the coefficients stabilizes.  Because the discrete coefficients are
aliased sums of the true ones, the discrete l1 sum never exceeds the true
norm.

The slow path (:func:`coefficient_oracle`, :func:`window_ft_quadrature`)
evaluates the defining integrals by direct trapezoidal sums and shares no
transform code with the fast path.
"""

from dataclasses import dataclass, field
import math
from typing import Optional

import numpy as np
import scipy.fft

from ._numerics import TWO_PI, MemoryBudgetError, memory_budget_bytes, next_pow2, stable_sum

__all__ = [
    "GridSpec",
    "Field",
    "Spectrum",
    "ANormEstimate",
    "sample_field",
    "field_from_function",
    "spectrum",
    "discrete_a_norm",
    "tail_fraction",
    "a_norm_estimate",
    "starting_axis_size",
    "coefficient_oracle",
    "function_coefficient",
    "window_ft_quadrature",
    "QuadratureResult",
]

# complex samples, FFT scratch and a real modulus array
_BYTES_PER_POINT = 40


@dataclass(frozen=True)
class GridSpec:
    """Uniform grid on ``[-pi, pi)^d`` with ``sizes[j]`` points on axis ``j``."""

    sizes: tuple

    def __post_init__(self):
        sizes = tuple(int(n) for n in np.atleast_1d(self.sizes))
        if not sizes:
            raise ValueError("grid needs at least one axis")
        for n in sizes:
            if n < 4 or n & (n - 1):
                raise ValueError(f"axis sizes must be powers of two >= 4, got {sizes}")
        object.__setattr__(self, "sizes", sizes)

    @classmethod
    def cube(cls, n, dim):
        return cls((n,) * dim)

    @property
    def dim(self):
        return len(self.sizes)

    @property
    def total(self):
        return math.prod(self.sizes)

    def axis(self, j):
        n = self.sizes[j]
        return -math.pi + TWO_PI * np.arange(n) / n

    def open_axes(self):
        """Per-axis coordinate arrays shaped for broadcasting."""
        out = []
        for j in range(self.dim):
            shape = [1] * self.dim
            shape[j] = self.sizes[j]
            out.append(self.axis(j).reshape(shape))
        return out

    def point(self, idx):
        return tuple(-math.pi + TWO_PI * i / n for i, n in zip(idx, self.sizes))

    def check_budget(self, mem_gib=None):
        need = self.total * _BYTES_PER_POINT
        budget = memory_budget_bytes(mem_gib)
        if need > budget:
            raise MemoryBudgetError(
                f"grid {self.sizes} needs ~{need / 2**30:.2f} GiB, budget is {budget / 2**30:.2f} GiB"
            )


def _frozen(a):
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class Field:
    """Complex samples on a :class:`GridSpec`, shaped ``grid.sizes``."""

    grid: GridSpec
    samples: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=np.complex128)
        if s.shape != self.grid.sizes:
            raise ValueError(f"samples shape {s.shape} does not match grid {self.grid.sizes}")
        if not np.all(np.isfinite(s)):
            raise ValueError("field samples must be finite")
        object.__setattr__(self, "samples", _frozen(s))


@dataclass(frozen=True)
class Spectrum:
    """Discrete Fourier coefficients in numpy FFT order.

    ``coefficients[i_1, ..., i_d]`` belongs to the frequency with components
    ``i_j`` for ``i_j < N_j/2`` and ``i_j - N_j`` otherwise.  The normalization
    makes the constant field 1 have a single unit coefficient at ``n = 0``.
    """

    grid: GridSpec
    coefficients: np.ndarray

    def frequencies(self, j):
        n = self.grid.sizes[j]
        return np.rint(np.fft.fftfreq(n) * n).astype(np.int64)

    def coefficient(self, n):
        n = tuple(int(v) for v in np.atleast_1d(n))
        if len(n) != self.grid.dim:
            raise ValueError("frequency vector has wrong dimension")
        idx = []
        for v, size in zip(n, self.grid.sizes):
            if not -size // 2 <= v < size // 2:
                raise ValueError(f"frequency {n} not represented on grid {self.grid.sizes}")
            idx.append(v % size)
        return complex(self.coefficients[tuple(idx)])

    def inverse(self):
        """Samples reconstructed from the coefficients."""
        c = np.array(self.coefficients)
        _alternate_sign(c)
        return scipy.fft.ifftn(c, norm="forward")


def _alternate_sign(c):
    # t_j = -pi + 2 pi j / N, so e^{-i n t_j} carries a factor (-1)^n
    for ax in range(c.ndim):
        sl = [slice(None)] * c.ndim
        sl[ax] = slice(1, None, 2)
        c[tuple(sl)] *= -1


def sample_field(phase, lam, grid, mem_gib=None):
    """Sample ``exp(i * lam * phase)`` on ``grid``."""
    if phase.dim != grid.dim:
        raise ValueError(f"phase {phase.name} has dim {phase.dim}, grid has dim {grid.dim}")
    if not math.isfinite(lam):
        raise ValueError(f"lambda must be finite, got {lam!r}")
    grid.check_budget(mem_gib)
    return Field(grid, _sample(phase, lam, grid))


def _sample(phase, lam, grid, slab_points=1 << 22):
    # slabs along axis 0 bound the size of real temporaries
    out = np.empty(grid.sizes, dtype=np.complex128)
    axes = grid.open_axes()
    rest = math.prod(grid.sizes[1:])
    step = max(1, slab_points // max(rest, 1))
    for i0 in range(0, grid.sizes[0], step):
        sl = slice(i0, i0 + step)
        phi = np.asarray(phase(axes[0][sl], *axes[1:]), dtype=np.float64)
        phi = np.array(np.broadcast_to(phi, out[sl].shape))
        bad = ~np.isfinite(phi)
        if bad.any():
            idx = np.argwhere(bad)[0]
            idx[0] += i0
            raise FloatingPointError(
                f"phase {phase.name} is not finite at grid point {grid.point(tuple(int(i) for i in idx))}"
            )
        phi *= lam
        np.cos(phi, out=out[sl].real)
        np.sin(phi, out=out[sl].imag)
    return out


def field_from_function(func, grid):
    """Field from an arbitrary complex function of the open grid axes."""
    vals = np.broadcast_to(np.asarray(func(*grid.open_axes()), dtype=np.complex128), grid.sizes)
    return Field(grid, np.array(vals))


def spectrum(field, workers=None):
    return Spectrum(field.grid, _frozen(_transform(np.array(field.samples), workers)))


def _transform(samples, workers):
    c = scipy.fft.fftn(samples, norm="forward", overwrite_x=True, workers=workers)
    _alternate_sign(c)
    return c


def discrete_a_norm(spec):
    """l1 sum of the coefficients of a :class:`Spectrum`."""
    return stable_sum(np.abs(spec.coefficients))


def _core_slices(sizes):
    # |n_j| < N_j/4 on every axis, as two index ranges per axis in FFT order
    ranges = []
    for n in sizes:
        q = n // 4
        ranges.append((slice(0, q), slice(n - q + 1, n)))
    return ranges


def _l1_and_tail(modulus):
    total = stable_sum(modulus)
    core = 0.0
    for combo in np.ndindex(*(2,) * modulus.ndim):
        sl = tuple(r[c] for r, c in zip(_core_slices(modulus.shape), combo))
        core += stable_sum(modulus[sl])
    tail = max(total - core, 0.0)
    return total, (tail / total if total > 0 else 0.0)


def tail_fraction(spec):
    """Share of l1 mass at frequencies with some ``|n_j| >= N_j / 4``."""
    return _l1_and_tail(np.abs(spec.coefficients))[1]


@dataclass(frozen=True)
class ANormEstimate:
    """Result of :func:`a_norm_estimate`.

    ``history`` lists ``(axis_sizes, value, tail_fraction)`` for every grid
    evaluated.  ``mean_modulus`` is ``|f^(0)|``, a lower bound for ``value``.
    """

    value: float
    grid_used: GridSpec
    relative_delta: float
    converged: bool
    tail_fraction: float
    mean_modulus: float = 0.0
    stop_reason: str = ""
    history: tuple = field(default=())


def starting_axis_size(phase, lam, floor=64):
    """Per-axis starting sizes ``max(floor, 2^ceil(log2(8 (1 + |lam| h_j))))``."""
    return tuple(max(floor, next_pow2(8.0 * (1.0 + abs(lam) * h))) for h in phase.axis_hints())


def _measure(phase, lam, sizes, workers, mem_gib):
    grid = GridSpec(sizes)
    grid.check_budget(mem_gib)
    samples = _sample(phase, lam, grid)
    coef = _transform(samples, workers)
    del samples
    c0 = abs(coef[(0,) * grid.dim])
    modulus = np.abs(coef)
    del coef
    value, tail = _l1_and_tail(modulus)
    return grid, value, tail, c0


def a_norm_estimate(phase, lam, tol=0.02, tail_cap=0.01, max_axis_size=None, workers=None,
                    mem_gib=None, min_axis_size=64):
    """Estimate ``||exp(i lam phi)||_A`` by grid doubling.

    Axis ``j`` starts at ``starting_axis_size(phase, lam)[j]`` (capped at
    ``max_axis_size``) and every axis below the cap doubles until the
    relative change of the l1 sum over the last doubling is at most ``tol``
    and the tail fraction is at most ``tail_cap``.  When the starting grid is
    already at the cap on every axis, the grid halved on every axis supplies
    the comparison value.  Reaching the cap or the memory budget ends the loop
    with ``converged=False``; a starting grid over the budget raises
    :class:`MemoryBudgetError`.

    ``max_axis_size=None`` allows any axis size that fits the memory budget.
    """
    if not tol > 0 or not tail_cap > 0:
        raise ValueError("tol and tail_cap must be positive")
    if max_axis_size is None:
        max_axis_size = 1 << 40
    elif max_axis_size < 4 or max_axis_size & (max_axis_size - 1):
        raise ValueError(f"max_axis_size must be a power of two >= 4, got {max_axis_size}")
    sizes = tuple(min(n, max_axis_size) for n in starting_axis_size(phase, lam, min_axis_size))
    history = []
    prev = None
    if all(n == max_axis_size for n in sizes) and min(sizes) >= 8:
        half = tuple(n // 2 for n in sizes)
        _, prev, tail, _ = _measure(phase, lam, half, workers, mem_gib)
        history.append((half, prev, tail))
    while True:
        grid, value, tail, c0 = _measure(phase, lam, sizes, workers, mem_gib)
        history.append((sizes, value, tail))
        delta = abs(value - prev) / value if prev is not None else math.inf
        converged = delta <= tol and tail <= tail_cap
        nxt = tuple(min(2 * n, max_axis_size) for n in sizes)
        stop = ""
        if converged:
            stop = "converged"
        elif nxt == sizes:
            stop = "max_axis_size"
        else:
            try:
                GridSpec(nxt).check_budget(mem_gib)
            except MemoryBudgetError:
                stop = "memory"
        if stop:
            return ANormEstimate(
                value=value,
                grid_used=grid,
                relative_delta=delta,
                converged=converged,
                tail_fraction=tail,
                mean_modulus=c0,
                stop_reason=stop,
                history=tuple(history),
            )
        prev = value
        sizes = nxt


# -- direct quadrature ------------------------------------------------------


def function_coefficient(func, dim, n, quad_points_per_axis):
    """``(2pi)^-d int f(t) e^{-i(n,t)} dt`` by the periodic trapezoidal rule.

    ``func`` receives ``dim`` open coordinate arrays.  The sum is contracted
    axis by axis against explicit exponentials.
    """
    n = np.atleast_1d(np.asarray(n, dtype=np.float64))
    if n.size != dim:
        raise ValueError(f"frequency {n} does not have dimension {dim}")
    M = int(quad_points_per_axis)
    t = -math.pi + TWO_PI * np.arange(M) / M
    axes = []
    for j in range(dim):
        shape = [1] * dim
        shape[j] = M
        axes.append(t.reshape(shape))
    vals = np.broadcast_to(np.asarray(func(*axes), dtype=np.complex128), (M,) * dim)
    out = vals
    for j in range(dim):
        out = np.tensordot(out, np.exp(-1j * n[j] * t), axes=([0], [0]))
    return complex(out) / M**dim


def coefficient_oracle(phase, lam, n, quad_points_per_axis=None):
    """Fourier coefficient of ``exp(i lam phi)`` at integer frequency ``n``.

    Requires ``quad_points_per_axis >= 8 (|lam| h + |n|_inf + 1)`` where ``h``
    is the largest per-axis oscillation hint; passing ``None`` picks four times that.
    """
    n = np.atleast_1d(np.asarray(n))
    need = 8.0 * (abs(lam) * phase.max_hint + float(np.max(np.abs(n))) + 1.0)
    if quad_points_per_axis is None:
        quad_points_per_axis = next_pow2(4 * need)
    if quad_points_per_axis < need:
        raise ValueError(f"{quad_points_per_axis} quadrature points per axis; need at least {need:.0f}")
    return function_coefficient(lambda *t: np.exp(1j * lam * phase(*t)), phase.dim, n, quad_points_per_axis)


@dataclass(frozen=True)
class QuadratureResult:
    value: object
    points_per_axis: tuple
    richardson: bool


def window_ft_quadrature(window, phase, lam, freq, points_per_axis=None, richardson=True, min_points=2048):
    """``(2pi)^-d int window(t) e^{i lam phi(t)} e^{-i(freq,t)} dt`` over R^d.

    ``freq`` is one frequency vector or an ``(F, d)`` array of them.  Each
    axis of the window's support is split into ``M_j`` equal intervals (an
    even number, so the tent's peak is a node) and integrated with the
    composite trapezoidal rule; with ``richardson`` the steps ``h`` and ``2h``
    are combined to cancel the ``h^2`` error term.  Without an explicit
    ``points_per_axis``, each axis gets ``64`` nodes per wave of the
    integrand, and at least ``min_points``.
    """
    d = window.dim
    if phase is not None and phase.dim != d:
        raise ValueError(f"phase dim {phase.dim} does not match window dim {d}")
    for c, h in zip(window.centers, window.half_widths):
        if c - h < -math.pi - 1e-12 or c + h > math.pi + 1e-12:
            raise ValueError(f"window support [{c - h}, {c + h}] leaves the fundamental cell")
    freqs = np.asarray(freq, dtype=np.float64)
    single = freqs.ndim <= 1
    freqs = np.atleast_2d(freqs)
    if freqs.shape[1] != d:
        raise ValueError(f"frequencies must have {d} components")
    hints = phase.axis_hints() if phase is not None else (0.0,) * d
    if points_per_axis is None:
        points = []
        for j, h in enumerate(window.half_widths):
            waves = 2 * h * (np.max(np.abs(freqs[:, j])) + abs(lam) * hints[j]) / TWO_PI
            points.append(max(int(min_points), next_pow2(64 * waves)))
    else:
        points = [int(p) for p in np.broadcast_to(np.atleast_1d(points_per_axis), (d,))]
    if any(p < 4 or p % 4 for p in points):
        raise ValueError(f"points per axis must be multiples of 4, got {points}")

    nodes, weights = [], []
    for j, (c, h) in enumerate(zip(window.centers, window.half_widths)):
        M = points[j]
        t = c - h + 2.0 * h * np.arange(M + 1) / M
        w = np.full(M + 1, 2.0 * h / M)
        w[0] = w[-1] = h / M
        nodes.append(t)
        weights.append(w)

    shaped = []
    for j, t in enumerate(nodes):
        shape = [1] * d
        shape[j] = t.size
        shaped.append(t.reshape(shape))
    vals = np.ones(tuple(t.size for t in nodes), dtype=np.complex128)
    for j, t in enumerate(shaped):
        vals = vals * window.axis_values(j, t)
    if phase is not None and lam != 0:
        vals = vals * np.exp(1j * lam * np.broadcast_to(phase(*shaped), vals.shape))

    fine = _contract(vals, nodes, weights, freqs)
    if richardson:
        sl = tuple(slice(None, None, 2) for _ in range(d))
        coarse_w = []
        for w in weights:
            cw = 2.0 * w[::2]
            cw[0] = cw[-1] = w[0] * 2.0
            coarse_w.append(cw)
        coarse = _contract(vals[sl], [t[::2] for t in nodes], coarse_w, freqs)
        fine = (4.0 * fine - coarse) / 3.0
    fine = fine / TWO_PI**d
    value = complex(fine[0]) if single else fine
    return QuadratureResult(value=value, points_per_axis=tuple(points), richardson=richardson)


def _contract(vals, nodes, weights, freqs):
    # sum_j vals[j] prod_a w_a[j_a] exp(-i f_a t_a[j_a]) for each row f of freqs
    d = vals.ndim
    e0 = np.exp(-1j * np.outer(freqs[:, 0], nodes[0])) * weights[0]
    out = e0 @ vals.reshape(vals.shape[0], -1)
    out = out.reshape((freqs.shape[0],) + vals.shape[1:])
    for a in range(1, d):
        ea = np.exp(-1j * np.outer(freqs[:, a], nodes[a])) * weights[a]
        shape = [freqs.shape[0]] + [1] * (out.ndim - 1)
        shape[1] = nodes[a].size
        out = (out * ea.reshape(shape)).sum(axis=1)
    return out
