import math
from types import SimpleNamespace

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from wgl.covering import sample_curve
from wgl.fourier import a_norm_estimate
from wgl.growth import (
    SWEEP_HEADER, GrowthFitError, SweepRecord, compare_to_theorem, fit_growth, fit_range, sweep,
)
from wgl.phases import abs_map, constant_curve, cos_curve, lookup, product_phase

JACOBI_ANGER_1 = 1.91973041008976023931


def fake(lams, values, converged=True):
    if isinstance(converged, bool):
        converged = [converged] * len(lams)
    return [SweepRecord(float(l), SimpleNamespace(value=float(v), converged=c), 0.0, None)
            for l, v, c in zip(lams, values, converged)]


LAMS = [2.0**j for j in range(3, 11)]


def test_fit_examples():
    assert fit_growth(fake(LAMS, [l**2 for l in LAMS])).slope == pytest.approx(2.0, abs=1e-12)
    band = fit_growth(fake(LAMS, [3 * math.log(l) for l in LAMS]), model="log")
    assert band.ratio_band == pytest.approx(1.0, abs=1e-12)
    assert band.slope == pytest.approx(3.0, abs=1e-12)
    const = fit_growth(fake(LAMS, [5.0] * len(LAMS)))
    assert const.slope == 0.0


def test_fit_uses_top_half():
    vals = [1.0] * 4 + [l**0.5 for l in LAMS[4:]]
    fit = fit_growth(fake(LAMS, vals))
    assert fit.range_used == (4, 7) and fit.slope == pytest.approx(0.5, abs=1e-12)
    assert [fit_range(n) for n in (3, 4, 5, 6, 8)] == [0, 1, 2, 3, 4]


def test_fit_refused_with_too_few_records():
    with pytest.raises(GrowthFitError, match="at least 4"):
        fit_growth(fake(LAMS[:3], [1, 2, 3]))
    recs = fake(LAMS[:5], [1, 2, 3, 4, 5], converged=[True, True, False, True, False])
    with pytest.raises(GrowthFitError):
        fit_growth(recs)
    assert fit_growth(recs, require_converged=False).slope > 0
    with pytest.raises(GrowthFitError):
        fit_growth(fake([1.0, 2.0, 4.0, 8.0], [1, 2, 3, 4]), model="log")
    with pytest.raises(ValueError):
        fit_growth(fake(LAMS, LAMS), model="spline")


def test_sweep_contract():
    recs = sweep(lookup("cos1d"), [1, 2, 4])
    assert [r.lam for r in recs] == [1.0, 2.0, 4.0]
    assert all(r.converged and r.error is None for r in recs)
    assert recs[0].value == pytest.approx(JACOBI_ANGER_1, abs=1e-6)
    for bad in ([0, 1], [1, 1, 2], [2, 1], [], [1, math.inf], [-1, 2]):
        with pytest.raises(ValueError):
            sweep(lookup("cos1d"), bad)


def test_sweep_records_resource_failures():
    recs = sweep(lookup("cos_abs2d"), [8, 16], mem_gib=1e-5)
    assert [r.ok for r in recs] == [False, False]
    assert all("MemoryBudgetError" in r.error for r in recs)
    assert math.isnan(recs[0].value)


@settings(max_examples=5, deadline=None)
@given(st.sampled_from(["cos1d", "pwlin1d", "cos_abs2d"]), st.floats(1, 32))
def test_negation_symmetry(name, lam):
    phase = lookup(name)
    assert a_norm_estimate(phase, -lam).value == pytest.approx(sweep(phase, [lam])[0].value, rel=1e-10)


def test_constant_curve_is_trivially_consistent():
    a = constant_curve(0.7)
    recs = sweep(product_phase(a, abs_map(1)), [8, 16, 32, 64, 128])
    rep = compare_to_theorem(recs, sample_curve(a, 1000))
    assert rep.predicted_fit.slope == 0.0
    assert rep.verdict == "consistent"


def test_cos_abs2d_consistent():
    recs = sweep(lookup("cos_abs2d"), [2.0**j for j in range(3, 9)])
    rep = compare_to_theorem(recs, sample_curve(cos_curve(), 10**5), name="cos_abs2d")
    assert 0.9 <= rep.predicted_fit.slope <= 1.1
    assert rep.measured_fit.slope >= 0.85
    assert rep.verdict == "consistent" and rep.stable
    assert all(r.converged for r in rep.records[fit_range(len(rep.records)):])


def test_unconverged_in_range_is_inconclusive():
    cloud = sample_curve(cos_curve(), 10**4)
    recs = fake(LAMS, LAMS, converged=[True] * 7 + [False])
    rep = compare_to_theorem(recs, cloud)
    assert rep.verdict == "inconclusive" and any("unconverged" in c for c in rep.caveats)
    # unconverged entries below the fit range do not matter
    recs = fake(LAMS, LAMS, converged=[False] + [True] * 7)
    assert compare_to_theorem(recs, cloud).verdict == "consistent"


def test_measured_below_prediction_is_inconsistent():
    rep = compare_to_theorem(fake(LAMS, [l**0.3 for l in LAMS]), sample_curve(cos_curve(), 10**4))
    assert rep.verdict == "inconsistent" and rep.slack == 0.15


def test_failed_record_in_range_is_inconclusive():
    recs = fake(LAMS[:-1], LAMS[:-1]) + [SweepRecord(LAMS[-1], None, 0.0, None, "MemoryBudgetError: x")]
    rep = compare_to_theorem(recs, sample_curve(cos_curve(), 10**4))
    assert rep.verdict == "inconclusive"


def test_stability_flag():
    vals = [1.0] * 5 + [30.0, 31.0, 32.0]
    rep = compare_to_theorem(fake(LAMS, vals), sample_curve(cos_curve(), 10**4))
    assert not rep.stable and rep.stability_shift > 0.1


def test_report_rows_match_header():
    rep = compare_to_theorem(fake(LAMS, LAMS), sample_curve(cos_curve(), 10**4), name="x")
    rows = rep.rows()
    assert len(rows) == len(LAMS) and all(len(r) == len(SWEEP_HEADER) for r in rows)
    assert all(r[-1] == "" for r in rows)
    assert rep.rows(include_timing=True)[0][-1] == 0.0


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(0.1, 100), min_size=4, max_size=10, unique=True), st.floats(-2, 3))
def test_power_fit_recovers_exponent(lams, p):
    lams = sorted(lams)
    if any(b / a < 1.01 for a, b in zip(lams, lams[1:])):
        return
    fit = fit_growth(fake(lams, [2.5 * l**p for l in lams]))
    assert fit.slope == pytest.approx(p, abs=1e-8)
