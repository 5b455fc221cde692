"""
Carleson intensities of a discrete measure
==========================================

A random measure on the right half-plane, its alpha-intensities, the
per-strip table and the summability functionals built from it.
"""

import numpy as np

from carleson_admit import DiscreteMeasure, alpha_intensity, best_square, intensity_table, summability_functionals

rng = np.random.default_rng(0)
m = 40
re = 2.0 ** rng.uniform(-3, 4, m)
mu = DiscreteMeasure(re + 1j * rng.normal(0, 6, m), rng.exponential(1.0, m))
print(f"{len(mu)} atoms, real parts in [{mu.re.min():.3f}, {mu.re.max():.3f}]")

# The supremum over squares is attained; best_square reports the square.
for alpha in (1.0, 2.0, 3.0):
    sq = best_square(mu, alpha)
    print(f"C_{alpha:g}[mu] = {sq.value:.6f}  (square of side {sq.length:.4f} centred at {sq.center:+.3f}i)")

# Each dyadic strip 2^n <= Re z < 2^(n+1) gets its own intensity.
table = intensity_table(mu, 2.0)
print("\n  n   C_2[mu_n]")
for n, c in table:
    print(f"{n:3d}   {c:.6f}")
print(f"sum over strips: {table.strip_sum:.6f}   global: {table.total:.6f}")

# The three flavours of summability functional.
for weights in ("unit", "n_squared"):
    f = summability_functionals(mu, 2.0, weights)
    print(f"{weights:>10}: {f.value:.6f}  ({f.extra_label or 'no extra term'} = {f.extra:.4f})")
f = summability_functionals(mu, 2.0, finite_time=1)
print(f"finite time M=1: {f.value:.6f}  (head intensity {f.extra:.4f})")

# Intensities scale like |I|^alpha under dilation z -> 2z.
big = DiscreteMeasure(2 * mu.points, mu.weights)
print(f"\nC_2 after dilation by 2: {alpha_intensity(big, 2.0):.6f} = C_2 / 4 = {alpha_intensity(mu, 2.0) / 4:.6f}")
