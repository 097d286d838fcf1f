"""Box-counting dimensions of the curve images in the catalog.

    python demos/box_dimensions.py
"""

import warnings

from wgl import box_count, dimension_fit, lookup, sample_curve
from wgl.covering import dyadic_epsilons

CASES = [
    ("cos", {}, 10**5, (3, 10)),
    ("weierstrass_graph", {}, 10**6, (3, 10)),
    ("gaussian", {}, 10**6, (1, 8)),
    ("lacunary", {}, 10**6, (1, 6)),
]


def main():
    for name, params, samples, (lo, hi) in CASES:
        cloud = sample_curve(lookup(name, **params), samples)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            curve = box_count(cloud, dyadic_epsilons(lo, hi))
        fit = dimension_fit(curve)
        print(f"{name:18s} eps 2^-{lo}..2^-{hi}  dimension {fit.slope:.3f} +- {fit.stderr:.3f}")


if __name__ == "__main__":
    main()
