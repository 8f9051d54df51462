"""How the scalar measures grow with the canonical shape delta*.

Run with ``python demos/skewness_landscape.py``.  For each generator family
at k = 2 the script tabulates Mardia skewness and kurtosis, the Isogai
mean-mode distance and the Song approximation over a grid of delta*.
"""

from __future__ import annotations

import numpy as np

from skewelliptic.generators import GeneratorFamily
from skewelliptic.measures import isogai_scalar, mardia_kurtosis, mardia_skewness, song_scalar

FAMILIES = ["normal", "t:5", "logistic", "laplace", "pearson2:2", "pearson7:4"]


def main() -> None:
    grid = np.round(np.linspace(0.0, 0.9, 4), 2)
    print(f"{'family':<12} {'delta*':>6} {'beta_1k':>11} {'beta_2k':>9} {'S_I':>11} {'Song':>11}")
    for spec in FAMILIES:
        fam = GeneratorFamily.parse(spec, 2)
        for ds in grid:
            b1 = mardia_skewness(fam, ds)
            b2 = mardia_kurtosis(fam, ds)
            si, _ = isogai_scalar(fam, ds)
            song = song_scalar(fam, ds)
            print(f"{spec:<12} {ds:>6.2f} {b1:>11.4e} {b2:>9.4f} {si:>11.4e} {song:>11.4e}")
        print()


if __name__ == "__main__":
    main()
