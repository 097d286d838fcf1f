import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from wgl._numerics import MemoryBudgetError, memory_budget_bytes, next_pow2, reduce_angle, stable_sum


def test_stable_sum_matches_fsum():
    rng = np.random.default_rng(0)
    x = rng.standard_normal(300_000) * 10.0 ** rng.integers(-8, 8, 300_000)
    assert stable_sum(x) == pytest.approx(math.fsum(x), rel=1e-12, abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 200_000))
def test_stable_sum_permutation_invariant(seed, n):
    rng = np.random.default_rng(seed)
    x = np.abs(rng.standard_normal(n))
    y = rng.permutation(x)
    assert abs(stable_sum(x) - stable_sum(y)) <= 1e-12 * stable_sum(x)


def test_stable_sum_is_deterministic_across_calls():
    x = np.random.default_rng(3).random(1 << 18)
    assert stable_sum(x) == stable_sum(x.copy())


@given(st.floats(-math.pi, math.pi))
def test_reduce_angle_identity_on_cell(t):
    assert reduce_angle(np.array(t)) == t


@given(st.integers(-int(3.1 * 2**50), int(3.1 * 2**50)), st.sampled_from([-1, 1]))
def test_reduce_angle_exact_shift_on_dyadic_grid(k, j):
    # t on the 2^-50 grid: t + 2 pi j and the reduction are both exact
    t = math.ldexp(k, -50)
    shifted = t + j * 2 * math.pi
    if abs(shifted) < 8:
        assert float(reduce_angle(np.array(shifted))) == t


def test_next_pow2():
    assert [next_pow2(x) for x in (0.3, 1, 2, 3, 64, 65)] == [1, 1, 2, 4, 64, 128]


def test_memory_budget_env(monkeypatch):
    monkeypatch.setenv("WGL_MEM_GIB", "2")
    assert memory_budget_bytes() == 2 * 2**30
    assert memory_budget_bytes(1.5) == int(1.5 * 2**30)
    assert issubclass(MemoryBudgetError, MemoryError)
