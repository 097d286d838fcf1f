"""Numerical checks of the tent-transform identity, the window lower bounds and the covering inequality.

Every check returns a :class:`CheckReport` whose ``worst_margin`` is the
smallest slack by which the inequality under test held (negative when it
failed).  A check that cannot reach trustworthy numbers is *refused*, which is
reported separately from failure.
"""

from dataclasses import dataclass, field
import itertools
import math
import numpy as np

from .covering import PointCloud, box_count, neighborhood_measure, unit_ball_volume
from .fourier import window_ft_quadrature
from .phases import TriangleWindow, abs_map, cos_curve, estimate_modulus, product_phase, triangle_ft
from ._numerics import TWO_PI, next_pow2

__all__ = [
    "CheckReport",
    "ConcentrationProbe",
    "ProbeError",
    "make_probe",
    "check_triangle_ft",
    "check_lemma1",
    "check_lemma2",
    "check_covering_inequality",
    "default_clouds",
    "run_all",
]

TRIANGLE_TOL = 1e-8
COVERING_SLACK = 1.05


@dataclass(frozen=True)
class CheckReport:
    """Outcome of one check.  ``passed`` holds exactly when ``worst_margin >= 0``."""

    name: str
    passed: bool
    worst_margin: float
    details: dict = field(default_factory=dict)
    refused: bool = False

    @classmethod
    def from_margin(cls, name, margin, details=None):
        margin = float(margin)
        return cls(name, bool(margin >= 0), margin, dict(details or {}))

    @classmethod
    def refusal(cls, name, reason, details=None):
        d = dict(details or {})
        d["refused"] = reason
        return cls(name, False, math.nan, d, refused=True)


class ProbeError(ValueError):
    """Raised when a concentration probe's defining constraints cannot be met."""


@dataclass(frozen=True)
class ConcentrationProbe:
    """Set-up for the window concentration estimate at one ``lambda``.

    ``J`` is the cube with center ``J_center`` and half-width ``l`` on which
    ``b(y) = P y + y0``; ``rho = sup_J |P y + y0|``.  ``eps0`` and
    ``delta_lambda`` satisfy ``eps0 <= 1/2``, ``2 rho eps0 <= 4^-k / 2`` and
    ``lambda * omega(sqrt(k) * 2 delta_lambda) = eps0`` to within 10%.
    """

    a: object
    b: object
    J_center: tuple
    l: float
    P: np.ndarray
    y0: np.ndarray
    rho: float
    eps0: float
    lam: float
    delta_lambda: float
    omega_at_delta: float
    probe_points: tuple

    @property
    def k(self):
        return self.a.k

    @property
    def m(self):
        return self.a.m

    @property
    def constant(self):
        """``(1/2) 4^-k (l/2pi)^m (1/2pi)^k``."""
        k, m = self.k, self.m
        return 0.5 * 4.0**-k * (self.l / TWO_PI) ** m * TWO_PI**-k

    @property
    def bound(self):
        return self.constant * self.delta_lambda**self.k

    def validate(self):
        P = np.asarray(self.P, dtype=np.float64)
        if P.shape != (self.m, self.m):
            raise ProbeError(f"P must be {self.m}x{self.m}")
        if abs(np.linalg.det(P)) < 1e-12:
            raise ProbeError("P is singular")
        if not 0 < self.eps0 <= 0.5:
            raise ProbeError(f"eps0 = {self.eps0} must lie in (0, 1/2]")
        if 2 * self.rho * self.eps0 > 0.5 * 4.0**-self.k * (1 + 1e-12):
            raise ProbeError(f"2 rho eps0 = {2 * self.rho * self.eps0:.4g} exceeds 4^-k/2")
        ratio = self.lam * self.omega_at_delta / self.eps0
        if not 0.9 <= ratio <= 1.1:
            raise ProbeError(f"lambda omega(sqrt(k) 2 delta) / eps0 = {ratio:.4g} is outside [0.9, 1.1]")
        if not 2 * self.delta_lambda < TWO_PI:
            raise ProbeError(f"2 delta_lambda = {2 * self.delta_lambda:.4g} is not below 2 pi; lambda is too small")


def _solve_delta(a, lam, eps0, samples, iterations=60):
    # bisection for lam * omega(sqrt(k) * 2 delta) = eps0 on the sampled modulus
    k = a.k
    omega = lambda d: estimate_modulus(a, math.sqrt(k) * 2 * d, samples=samples)
    if lam * omega(math.pi) <= 0:
        raise ProbeError("the curve is constant, so its modulus of continuity vanishes")
    lo, hi = 0.0, math.pi
    if lam * omega(hi) < eps0:
        raise ProbeError(f"lambda = {lam} is too small: the solution would have 2 delta_lambda >= 2 pi")
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        if lam * omega(mid) < eps0:
            lo = mid
        else:
            hi = mid
    return hi, omega(hi)


def make_probe(a, lam, J_center, l, P=None, y0=None, probe_points=None, omega_samples=4096):
    """Build and validate a :class:`ConcentrationProbe`.

    ``b`` is the coordinatewise ``|y|``, affine with ``P = I`` and ``y0 = 0``
    on cubes inside ``(0, pi)^m``.  ``eps0`` is the largest value allowed,
    ``min(1/2, 4^-k / (4 rho))``.  ``probe_points`` are the parameter points
    ``x*`` whose images ``lam * a(x*)`` supply the frequencies ``v``; by
    default nine points spread over ``[-pi, pi]^k`` along the diagonal.
    """
    k, m = a.k, a.m
    c = np.broadcast_to(np.asarray(J_center, dtype=np.float64), (m,))
    if not 0 < l < math.pi:
        raise ProbeError(f"half-width l = {l} must lie in (0, pi)")
    P = np.eye(m) if P is None else np.asarray(P, dtype=np.float64)
    y0 = np.zeros(m) if y0 is None else np.asarray(y0, dtype=np.float64)
    if np.any(c - l < -math.pi) or np.any(c + l > math.pi):
        raise ProbeError("J must lie in [-pi, pi]^m")
    corners = np.array(list(itertools.product(*[(ci - l, ci + l) for ci in c])))
    rho = float(np.linalg.norm(corners @ P.T + y0, axis=1).max())
    eps0 = min(0.5, 4.0**-k / (4.0 * rho))
    delta, om = _solve_delta(a, lam, eps0, omega_samples)
    if probe_points is None:
        s = np.linspace(-math.pi, math.pi, 9)
        probe_points = np.repeat(s[:, None], k, axis=1)
    pts = tuple(tuple(float(v) for v in np.atleast_1d(p)) for p in probe_points)
    probe = ConcentrationProbe(a, abs_map(m), tuple(c), float(l), P, y0, rho, eps0, float(lam), delta, om, pts)
    probe.validate()
    return probe


def check_triangle_ft(deltas=(0.5, 1.0, 2.0), u_samples=None):
    """Closed-form tent transform against quadrature; passes at max abs error ``<= 1e-8``."""
    u = np.linspace(-20.0, 20.0, 401) if u_samples is None else np.asarray(u_samples, dtype=np.float64)
    worst, per = 0.0, {}
    for delta in deltas:
        q = window_ft_quadrature(TriangleWindow.centered([delta]), None, 0.0, u[:, None])
        err = float(np.max(np.abs(q.value - triangle_ft(delta, u))))
        per[float(delta)] = err
        worst = max(worst, err)
    return CheckReport.from_margin("triangle_ft", TRIANGLE_TOL - worst,
                                   {"max_abs_error": worst, "per_delta": per, "tolerance": TRIANGLE_TOL,
                                    "u_points": int(u.size)})


def check_lemma1(d, delta, u_grid=201):
    """``|Delta_Q^(u)| >= 4^-d (delta/2pi)^d`` on a ``u_grid^d`` lattice inside ``(-1/delta, 1/delta)^d``.

    The lattice spans ``+-(1 - 1e-7)/delta`` so its outer points sit within
    ``1e-6`` of the boundary for ``delta >= 0.1``.
    """
    if d not in (1, 2, 3):
        raise ValueError(f"d must be 1, 2 or 3, got {d}")
    u = np.linspace(-1.0, 1.0, u_grid) * (1.0 - 1e-7) / delta
    f = np.abs(triangle_ft(delta, u))
    prod = f
    for _ in range(d - 1):
        prod = np.multiply.outer(prod, f)
    bound = 4.0**-d * (delta / TWO_PI) ** d
    margin = float(prod.min() - bound)
    return CheckReport.from_margin(f"lemma1_d{d}_delta{delta:g}", margin,
                                   {"bound": bound, "min_value": float(prod.min()), "lattice": u_grid**d})


def _lemma2_values(probe, phase, center, v, u, points):
    window = TriangleWindow(tuple(center) + probe.J_center, (probe.delta_lambda,) * probe.k + (probe.l,) * probe.m)
    pv = probe.P.T @ v
    freqs = np.concatenate([u, np.broadcast_to(pv, (u.shape[0], probe.m))], axis=1)
    q = window_ft_quadrature(window, phase, probe.lam, freqs, points_per_axis=points)
    return np.abs(q.value)


def check_lemma2(probe, u_grid=21, max_refinements=3):
    """Windowed transform floor ``>= c delta_lambda^k`` at every probe point and lattice frequency.

    For each ``x*`` in ``probe.probe_points`` the window is the tent on
    ``I x J`` with ``I`` the cube of half-width ``delta_lambda`` centred at
    ``x*`` (shifted to stay in ``[-pi, pi]^k``).  Frequencies are ``(u, P^T v)``
    with ``v = lam a(x*)`` and ``u`` on a ``u_grid^k`` lattice inside
    ``(-1/delta_lambda, 1/delta_lambda)^k``.  Quadrature is doubled until
    the smallest value moves by less than 1%; the check is refused otherwise.
    """
    k, m = probe.k, probe.m
    phase = product_phase(probe.a, probe.b, name="lemma2_probe")
    d = probe.delta_lambda
    axis_u = np.linspace(-1.0, 1.0, u_grid) * (1.0 - 1e-7) / d
    u = np.array(list(itertools.product(axis_u, repeat=k)))
    hints = phase.axis_hints()
    worst_value, rows, history = math.inf, [], []
    for x in probe.probe_points:
        center = tuple(min(max(xi, -math.pi + d), math.pi - d) for xi in x)
        v = probe.lam * np.asarray(probe.a(np.asarray(x)[None, :])[0])
        pv = probe.P.T @ v
        points = []
        for j in range(k + m):
            h = d if j < k else probe.l
            fmax = (1.0 / d) if j < k else abs(pv[j - k])
            waves = 2 * h * (fmax + probe.lam * hints[j]) / TWO_PI
            points.append(max(256, next_pow2(64 * waves)))
        prev = None
        for _ in range(max_refinements + 1):
            cur = float(_lemma2_values(probe, phase, center, v, u, points).min())
            if prev is not None and abs(cur - prev) <= 0.01 * abs(cur):
                break
            prev = cur
            points = [2 * p for p in points]
        else:
            return CheckReport.refusal(f"lemma2_lam{probe.lam:g}",
                                       f"quadrature did not settle at x*={x}",
                                       {"last_values": (prev, cur), "points": tuple(points)})
        history.append(tuple(points))
        rows.append((x, cur))
        worst_value = min(worst_value, cur)
    bound = probe.bound
    details = {
        "bound": bound,
        "constant": probe.constant,
        "delta_lambda": d,
        "eps0": probe.eps0,
        "rho": probe.rho,
        "min_value": worst_value,
        "floor_over_delta_k": worst_value / d**k,
        "per_probe_min": rows,
        "points_per_axis": history,
    }
    return CheckReport.from_margin(f"lemma2_lam{probe.lam:g}", worst_value - bound, details)


def check_covering_inequality(clouds, epsilons=(0.2, 0.1, 0.05), grid_resolution=64):
    """``v_m N(2 eps) eps^m <= 1.05 |(F)_eps|`` for every cloud and ``eps``.

    ``N(2 eps)`` is bounded by the count of cubes of side ``4 eps / sqrt(m)``,
    each of which lies in a ball of radius ``2 eps``.  The margin is
    ``1.05 |(F)_eps| / (v_m N eps^m) - 1``.
    """
    worst, rows = math.inf, []
    for name, cloud in clouds:
        m = cloud.m
        for eps in epsilons:
            side = 4.0 * eps / math.sqrt(m)
            n = int(box_count(cloud, [side], connect=False).counts[0])
            lhs = unit_ball_volume(m) * n * eps**m
            meas = neighborhood_measure(cloud, eps, grid_resolution=grid_resolution)
            margin = COVERING_SLACK * meas / lhs - 1.0
            rows.append((name, float(eps), n, lhs, meas, margin))
            worst = min(worst, margin)
    return CheckReport.from_margin("covering_inequality", worst,
                                   {"rows": rows, "slack": COVERING_SLACK,
                                    "cube_side": "4 eps / sqrt(m)"})


def default_clouds(density=200):
    """Point, unit segment and unit square clouds in the plane."""
    s = np.arange(density + 1) / density
    point = PointCloud(np.zeros((1, 2)), {"curve": "point"})
    segment = PointCloud(np.stack([s, np.zeros_like(s)], axis=1), {"curve": "segment"})
    gx, gy = np.meshgrid(s, s, indexing="ij")
    square = PointCloud(np.stack([gx.ravel(), gy.ravel()], axis=1), {"curve": "square"})
    return [("point", point), ("segment", segment), ("square", square)]


def run_all(lemma2_lambdas=(64, 256)):
    """All checks with default parameters, in a fixed order."""
    reports = [check_triangle_ft()]
    for d in (1, 2, 3):
        for delta in (0.5, 1.0, 2.0):
            reports.append(check_lemma1(d, delta))
    for lam in lemma2_lambdas:
        try:
            probe = make_probe(cos_curve(), lam, J_center=math.pi / 2, l=math.pi / 4)
        except ProbeError as exc:
            reports.append(CheckReport.refusal(f"lemma2_lam{lam:g}", str(exc)))
            continue
        reports.append(check_lemma2(probe))
    reports.append(check_covering_inequality(default_clouds()))
    return reports
