import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from wgl._numerics import MemoryBudgetError, stable_sum
from wgl.fourier import (
    Field, GridSpec, a_norm_estimate, coefficient_oracle, discrete_a_norm, field_from_function,
    function_coefficient, sample_field, spectrum, starting_axis_size, tail_fraction, window_ft_quadrature,
)
from wgl.phases import Phase, TriangleWindow, constant_phase, lookup, triangle_eval, triangle_ft

# sum_{|n|<=N} |J_n(lam)|, mpmath at 30 digits
JACOBI_ANGER_1 = 1.91973041008976023931
JACOBI_ANGER_16 = 5.55044835921230638775
# exact piecewise integrals of exp(i lam phi) e^{-int} / 2pi for the piecewise-linear phase, mpmath
PWLIN_COEFFS = {
    (4.0, 0): complex(-0.18920062382698206284, 0.41341090521590297866),
    (4.0, 2): complex(0.49380336593117122134, 0.22599284078693707635),
    (4.0, -4): complex(0.12893586068040136747, -0.28172999539061046703),
    (4.0, -16): complex(0.0049170583305264690343, -0.010743968462182468753),
    (8.0, 0): complex(0.12366978082792272223, 0.14318750422607669073),
    (8.0, 8): complex(-0.084278102834303758393, -0.097578981097603146621),
}


def linear_phase(k):
    return Phase("linear", 1, lambda t: k * t, oscillation_hint=abs(k))


def test_gridspec_validation():
    assert GridSpec((4, 8)).total == 32
    for bad in [(3,), (6,), (2,), ()]:
        with pytest.raises(ValueError):
            GridSpec(bad)
    with pytest.raises(MemoryBudgetError):
        GridSpec((1 << 12,) * 3).check_budget(mem_gib=1e-3)


def test_sample_field_examples():
    g = GridSpec((4,))
    assert np.all(sample_field(constant_phase(0.0), 3.0, g).samples == 1)
    assert np.all(sample_field(lookup("cos1d"), 0.0, GridSpec((16,))).samples == 1)
    f = sample_field(lookup("cos_abs2d"), 1.0, GridSpec((8, 8)))
    # t = -pi + 2 pi idx / N, so x = 0 at idx 4 and y = pi/2 at idx 6
    assert f.samples[4, 6] == pytest.approx(1j, abs=1e-15)
    with pytest.raises(ValueError):
        sample_field(lookup("cos_abs2d"), 1.0, GridSpec((8,)))


def test_nonfinite_phase_names_grid_point():
    bad = Phase("bad", 1, lambda t: np.where(t > 1.0, np.nan, t), oscillation_hint=1.0)
    with pytest.raises(FloatingPointError, match="grid point"):
        sample_field(bad, 1.0, GridSpec((16,)))


def test_field_rejects_nonfinite():
    with pytest.raises(ValueError):
        Field(GridSpec((4,)), np.array([1, np.inf, 1, 1], dtype=complex))


def test_discrete_a_norm_examples():
    def norm(func, n):
        return discrete_a_norm(spectrum(field_from_function(func, GridSpec((n,)))))

    assert norm(lambda t: np.ones_like(t, dtype=complex), 32) == 1.0
    assert norm(lambda t: np.exp(3j * t), 16) == pytest.approx(1.0, abs=1e-14)
    assert norm(lambda t: np.cos(t).astype(complex), 16) == pytest.approx(1.0, abs=1e-14)


def test_spectrum_normalization_and_indexing():
    s = spectrum(field_from_function(lambda t: np.exp(-5j * t), GridSpec((32,))))
    assert s.coefficient((-5,)) == pytest.approx(1.0, abs=1e-14)
    assert abs(s.coefficient((5,))) < 1e-14
    const = spectrum(field_from_function(lambda x, y: np.ones_like(x * y, dtype=complex), GridSpec((8, 4))))
    assert const.coefficient((0, 0)) == 1.0
    assert np.count_nonzero(const.coefficients) == 1


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(["cos1d", "pwlin1d", "cos_abs2d", "weier_abs2d"]), st.floats(-40, 40),
       st.integers(3, 7))
def test_parseval_and_inverse(name, lam, logn):
    phase = lookup(name)
    g = GridSpec((2**logn,) * phase.dim)
    f = sample_field(phase, lam, g)
    s = spectrum(f)
    energy = stable_sum(np.abs(s.coefficients.ravel()) ** 2)
    assert energy == pytest.approx(stable_sum(np.abs(f.samples.ravel()) ** 2) / g.total, rel=1e-10)
    back = s.inverse()
    assert np.max(np.abs(back - f.samples)) <= 1e-10


def test_a_norm_zero_lambda():
    e = a_norm_estimate(lookup("cos1d"), 0.0)
    assert e.value == pytest.approx(1.0, abs=1e-15) and e.converged
    assert len(e.history) == 2 and e.grid_used.sizes == (128,)


def test_a_norm_jacobi_anger():
    e = a_norm_estimate(lookup("cos1d"), 1.0)
    assert e.value == pytest.approx(JACOBI_ANGER_1, abs=1e-6)
    e16 = a_norm_estimate(lookup("cos1d"), 16.0)
    assert e16.value == pytest.approx(JACOBI_ANGER_16, abs=1e-6)


def test_a_norm_cos16_against_quadrature_oracle():
    phase = lookup("cos1d")
    oracle = math.fsum(abs(coefficient_oracle(phase, 16.0, (n,))) for n in range(-64, 65))
    assert a_norm_estimate(phase, 16.0).value == pytest.approx(oracle, rel=1e-3)


def test_pwlin_log_band():
    phase = lookup("pwlin1d")
    v64 = a_norm_estimate(phase, 64.0).value
    v1024 = a_norm_estimate(phase, 1024.0).value
    target = v64 * math.log(1024) / math.log(64)
    assert target / 4 <= v1024 <= target * 4


@pytest.mark.parametrize("key", sorted(PWLIN_COEFFS))
def test_pwlin_coefficients_exact(key):
    lam, n = key
    s = spectrum(sample_field(lookup("pwlin1d"), lam, GridSpec((1 << 16,))))
    assert abs(s.coefficient((n,)) - PWLIN_COEFFS[key]) <= 1e-8


@settings(max_examples=10, deadline=None)
@given(st.sampled_from(["cos1d", "pwlin1d", "cos_abs2d"]), st.floats(0.5, 24), st.floats(-10, 10))
def test_modulus_invariance(name, lam, c):
    phase = lookup(name)
    a = a_norm_estimate(phase, lam)
    b = a_norm_estimate(phase.shifted(c), lam)
    assert b.value == pytest.approx(a.value, rel=1e-12)


@settings(max_examples=10, deadline=None)
@given(st.sampled_from(["cos1d", "pwlin1d", "cos_abs2d", "weier_abs2d"]), st.floats(0.5, 24))
def test_conjugation_symmetry(name, lam):
    phase = lookup(name)
    assert a_norm_estimate(phase, -lam).value == pytest.approx(a_norm_estimate(phase, lam).value, rel=1e-10)


@pytest.mark.parametrize("name,lam", [("cos1d", 64.0), ("pwlin1d", 256.0), ("cos_abs2d", 32.0),
                                      ("weier_abs2d", 32.0)])
def test_estimate_contract_and_tail_monotone(name, lam):
    e = a_norm_estimate(lookup(name), lam)
    assert e.value >= e.mean_modulus
    if e.converged:
        assert e.relative_delta <= 0.02 and e.tail_fraction <= 0.01
    tails = [t for _, _, t in e.history]
    assert all(b <= a + 1e-12 for a, b in zip(tails, tails[1:]))


def test_estimate_stops_at_cap_and_budget():
    e = a_norm_estimate(lookup("cos_abs2d"), 256.0, max_axis_size=256)
    assert not e.converged and e.stop_reason == "max_axis_size"
    with pytest.raises(MemoryBudgetError):
        a_norm_estimate(lookup("cos_abs2d"), 8.0, mem_gib=1e-5)
    with pytest.raises(ValueError):
        a_norm_estimate(lookup("cos1d"), 1.0, tol=0.0)


def test_starting_axis_size_rule():
    p = lookup("cos_abs2d")
    sizes = starting_axis_size(p, 16.0)
    for n, h in zip(sizes, p.axis_hints()):
        assert n >= max(64, 8 * (1 + 16 * h)) and n & (n - 1) == 0


def test_coefficient_oracle_examples():
    assert coefficient_oracle(linear_phase(2.0), 1.0, (2,)) == pytest.approx(1.0, abs=1e-14)
    assert abs(coefficient_oracle(linear_phase(2.0), 1.0, (0,))) < 1e-14
    for n in (-1, 1):
        assert function_coefficient(lambda t: np.cos(t).astype(complex), 1, [n], 16) == pytest.approx(0.5)
    tent = TriangleWindow.centered([1.0])
    c0 = function_coefficient(lambda t: triangle_eval(tent, t[:, None]).astype(complex), 1, [0], 1 << 16)
    assert c0 == pytest.approx(1 / (2 * math.pi), abs=1e-8)
    with pytest.raises(ValueError):
        coefficient_oracle(lookup("cos1d"), 8.0, (0,), quad_points_per_axis=16)


@pytest.mark.parametrize("name", ["cos1d", "pwlin1d"])
@pytest.mark.parametrize("lam", [1.0, 4.0, 8.0])
def test_fft_matches_oracle_1d(name, lam):
    phase = lookup(name)
    s = spectrum(sample_field(phase, lam, GridSpec((1 << 14,))))
    worst = max(abs(s.coefficient((n,)) - coefficient_oracle(phase, lam, (n,), 1 << 15)) for n in range(-16, 17))
    assert worst <= 1e-6


@pytest.mark.parametrize("name", ["cos_abs2d", "weier_abs2d"])
def test_fft_matches_oracle_2d(name):
    phase = lookup(name)
    s = spectrum(sample_field(phase, 8.0, GridSpec((2048, 2048))))
    for n in [(0, 0), (1, 0), (0, 2), (3, -2), (16, 16), (-16, 5)]:
        assert abs(s.coefficient(n) - coefficient_oracle(phase, 8.0, n, 4096)) <= 1e-6


def test_fft_matches_oracle_3d_conventions():
    phase = lookup("fill3d", terms=2)
    s = spectrum(sample_field(phase, 1.0, GridSpec((256,) * 3)))
    for n in [(0, 0, 0), (1, 0, 0), (0, 0, 2), (3, -2, -2), (4, 4, 4)]:
        assert abs(s.coefficient(n) - coefficient_oracle(phase, 1.0, n, 256)) <= 1e-12


def test_window_quadrature_examples():
    w = TriangleWindow.centered([1.0])
    assert window_ft_quadrature(w, None, 0.0, [0.0]).value == pytest.approx(1 / (2 * math.pi), abs=1e-12)
    for u in (0.5, math.pi, 10.0):
        assert abs(window_ft_quadrature(w, None, 0.0, [u]).value - triangle_ft(1.0, u)) <= 1e-8
    w2 = TriangleWindow.centered([0.7, 1.3])
    v = window_ft_quadrature(w2, None, 0.0, [0.0, 0.0]).value
    assert v == pytest.approx(0.7 / (2 * math.pi) * 1.3 / (2 * math.pi), rel=1e-10)
    with pytest.raises(ValueError):
        window_ft_quadrature(TriangleWindow((3.0,), (0.5,)), None, 0.0, [0.0])


def test_window_quadrature_with_phase_matches_shifted_transform():
    # phase exp(i lam c) constant on the window: value is e^{i lam c} times the tent transform
    w = TriangleWindow((0.5,), (0.3,))
    q = window_ft_quadrature(w, constant_phase(0.8), 5.0, [[2.0], [-7.0]])
    expect = np.exp(4j) * triangle_ft(0.3, np.array([2.0, -7.0])) * np.exp(-1j * 0.5 * np.array([2.0, -7.0]))
    assert np.max(np.abs(q.value - expect)) <= 1e-10


def test_tail_fraction_of_smooth_field_is_small():
    s = spectrum(sample_field(lookup("cos1d"), 4.0, GridSpec((256,))))
    assert tail_fraction(s) < 1e-12
