"""
Young functions and Luxemburg norms
===================================

Complementary functions, Luxemburg norms of indicators and the
exponential integral identity that links them.
"""

import numpy as np

from carleson_admit import ExpYoung, PowerYoung, complementary, exp_orlicz_integral, luxemburg_norm, modulated_indicator
from carleson_admit.orlicz import exp_orlicz_integral_direct, indicator_norm

phi = ExpYoung()
phic = complementary(phi)
s = np.array([0.5, 1.0, 2.0, 5.0])
print("Phi_exp^c(s) vs (1+s)log(1+s) - s")
for si, a in zip(s, phic(s)):
    print(f"  s={si:4.1f}  {a:.12f}  {(1 + si) * np.log1p(si) - si:.12f}")

# (1/p) t^p and (1/p') s^p' are each other's conjugates.
c = complementary(PowerYoung(3.0, 1 / 3))
print(f"\nconjugate of t^3/3: coef {c.coef:.6f} * s^{c.p:.6f}")

# The Luxemburg norm of chi_(0,tau] solves tau * Phi(1/k) = 1, so it
# shrinks as the support does, more slowly the faster Phi grows.
print("\n   tau     L^2         Phi_exp")
for tau in (1.0, 1e-1, 1e-2, 1e-4):
    print(f"{tau:7.0e}  {indicator_norm(tau, PowerYoung(2.0)):.6f}   {indicator_norm(tau, phi):.6f}")

f = modulated_indicator(0.0, 0.3, c=4.0, coef=2.0)
print(f"\n||2 e^(4it) chi_(0,0.3]||_Phi_exp = {luxemburg_norm(f, phi):.10f}")

# int_0^inf Phi(e^(-alpha t)/C) dt by two independent routes.
for alpha, C in ((1.0, 1.0), (0.3, 2.5), (4.0, 0.8)):
    a = exp_orlicz_integral(phi, alpha, C)
    b = exp_orlicz_integral_direct(phi, alpha, C)
    print(f"alpha={alpha:3.1f} C={C:3.1f}:  {a:.12e}  {b:.12e}")
