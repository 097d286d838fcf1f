"""Growth of ||exp(i lam phi)||_A for the catalog phases.

Prints the measured power slopes next to the slope predicted from the
covering numbers of the curve image, for the 1D and 2D phases.

    python demos/growth_laws.py
"""

import numpy as np

from wgl import compare_to_theorem, fit_growth, lookup, sample_curve, sweep


def main():
    lams = [2.0**j for j in range(3, 11)]
    for name in ("cos1d", "pwlin1d"):
        recs = sweep(lookup(name), lams)
        fit = fit_growth(recs)
        vals = np.array([r.value for r in recs])
        print(f"{name:12s} slope {fit.slope:6.3f}  values {np.array2string(vals, precision=2)}")
    band = fit_growth(sweep(lookup("pwlin1d"), lams), model="log")
    print(f"{'pwlin1d':12s} a_norm / log(lam) stays within a factor {band.ratio_band:.2f}")

    lams2 = [2.0**j for j in range(3, 9)]
    for name in ("cos_abs2d", "weier_abs2d"):
        phase = lookup(name)
        rep = compare_to_theorem(sweep(phase, lams2), sample_curve(phase.curve, 1 << 18), name=name)
        print(f"{name:12s} measured {rep.measured_fit.slope:6.3f}  predicted {rep.predicted_fit.slope:6.3f}"
              f"  {rep.verdict}")


if __name__ == "__main__":
    main()
