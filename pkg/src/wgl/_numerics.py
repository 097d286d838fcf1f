"""Deterministic reductions and small numeric helpers shared across modules."""

import math
import os

import numpy as np

TWO_PI = 2.0 * math.pi

# Fixed block length for two-level summation; results depend only on this
# partition, never on thread count.
_BLOCK = 1 << 16

DEFAULT_MEM_GIB = 8.0


class MemoryBudgetError(MemoryError):
    """Raised before an allocation that would exceed the configured budget."""


def memory_budget_bytes(mem_gib=None):
    if mem_gib is None:
        env = os.environ.get("WGL_MEM_GIB")
        mem_gib = float(env) if env else DEFAULT_MEM_GIB
    if not mem_gib > 0:
        raise ValueError(f"memory budget must be positive, got {mem_gib!r}")
    return int(mem_gib * (1 << 30))


def stable_sum(values):
    """Sum an array of reals with an error independent of summation order.

    Blocks of fixed length are reduced with numpy's pairwise sum and the
    block partials are combined with :func:`math.fsum` (exactly rounded), so
    the relative error is bounded by roughly ``log2(_BLOCK) * eps`` for
    nonnegative inputs and the result is bitwise reproducible.
    """
    a = np.asarray(values, dtype=np.float64).ravel()
    if a.size <= _BLOCK:
        return math.fsum(a.tolist())
    nfull = a.size // _BLOCK
    partials = a[: nfull * _BLOCK].reshape(nfull, _BLOCK).sum(axis=1).tolist()
    partials.append(float(a[nfull * _BLOCK:].sum()))
    return math.fsum(partials)


def reduce_angle(t):
    """Map angles to the fundamental cell; identity on [-pi, pi]."""
    t = np.asarray(t, dtype=np.float64)
    return t - TWO_PI * np.round(t / TWO_PI)


def next_pow2(x):
    x = max(int(math.ceil(x)), 1)
    return 1 << (x - 1).bit_length()
