"""Evaluating a Maass form from its Fourier expansion
=====================================================

Given spectral parameters and a coefficient table A(m1, m2), a rank-3
Maass form is evaluated through the even cosine expansion: a double sum
over (m1, m2) whose inner sum runs over coprime pairs (c, d) inside the
annulus allowed by the decay cutoff C.

Genuine coefficient tables come from rank-3 L-function computations; this
demo builds a synthetic multiplicative table instead, so the value is not
an automorphic function and the rotation words S1, S2 need not fix it.
The unipotent translations T1, T2, T3 are built into the expansion itself
and must (and do) leave the value unchanged for any coefficients.
"""

import time

import numpy as np

from sl3maass import (H3Point, LanglandsParams, MaassForm,
                      automorphy_residual, coefficient_demand, eval_maass,
                      eval_maass_report, expand_coefficients)

params = LanglandsParams(-3.7, 1.2)

# synthetic Dirichlet coefficients A(1, n), Hecke-normalized, expanded to
# a full table by the Moebius identity
rng = np.random.default_rng(12)
a1 = {1: 1.0 + 0j}
for n in range(2, 41):
    a1[n] = complex(rng.normal(scale=0.6), rng.normal(scale=0.6))
table = expand_coefficients(a1, 24)
form = MaassForm(params=params, coeffs=table, eps=1e-8)

z0 = H3Point(x1=0.13, x2=0.27, x3=-0.41, y1=1.1, y2=0.95)
t0 = time.perf_counter()
value, stats = eval_maass_report(form, z0)
dt = time.perf_counter() - t0
print(f"f(z0)              = {value:.12g}")
print(f"decay cutoff C     = {stats.cutoff:.3f}")
print(f"max contributing m2 = {stats.max_contributing_m2}, m1 = {stats.max_m1}")
print(f"terms / caches      = {stats.n_terms} / {stats.n_caches}   ({dt:.1f}s)")

print("\ntranslation residuals (exact symmetries of the expansion):")
for word in ("T1", "T2", "T3"):
    print(f"  |f(z) - f({word}.z)| = {automorphy_residual(form, z0, word):.3e}")

print("\nrotation residuals (nonzero for synthetic, non-automorphic data):")
for word in ("S1", "S2 S1"):
    print(f"  |f(z) - f({word}.z)| = {automorphy_residual(form, z0, word):.3e}")

# how many coefficients a high-accuracy evaluation of the first lifted
# form would need at the identity
lift = LanglandsParams(-2 * 9.533695, 2 * 9.533695)
print("\ncoefficient demand for the r = 9.533695 lift at the identity "
      "(eps = 1e-12):")
t0 = time.perf_counter()
demand = coefficient_demand(lift, H3Point(0, 0, 0, 1.0, 1.0), 1e-12)
print(f"  max contributing m2 = {demand.max_contributing_m2}, "
      f"m1 = {demand.max_m1}, C = {demand.cutoff:.2f} "
      f"({time.perf_counter() - t0:.0f}s)")
