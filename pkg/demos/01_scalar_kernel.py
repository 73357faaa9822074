"""Tour of the scalar kernel: the Gaussian tail, the posterior-mean denoiser,
and the channel overlap F_eps(q) with its simplified surrogate.

Run:  python3 demos/01_scalar_kernel.py
"""

import numpy as np

from uncertain_ssl import (
    approx_error_grid,
    channel_overlap,
    channel_overlap_approx,
    gaussian_tail,
    overlap_integrand,
    overlap_integrand_series,
    posterior_mean,
)

print("== Gaussian tail ==")
for x in (0.0, 0.5, 1.0, 2.0, 3.0):
    print(f"  Q({x:.1f}) = {gaussian_tail(x):.6f}")

print()
print("== Posterior mean of a ±1 signal with prior mean eps ==")
print("  eps = 0 recovers tanh; eps = ±1 pins the estimate:")
for eps in (0.0, 0.5, 1.0):
    values = ", ".join(f"{posterior_mean(eps, t):+.4f}" for t in (-2.0, 0.0, 2.0))
    print(f"  eps={eps:+.1f}:  f(-2), f(0), f(2) = {values}")

print()
print("== Overlap integrand and its series form ==")
t = 1.5
for eps in (0.3, 0.6, 0.9):
    closed = overlap_integrand(eps, t)
    series = overlap_integrand_series(eps, t, 200)
    print(f"  eps={eps}: closed {closed:.12f}  series {series:.12f}")

print()
print("== Channel overlap: eps**2 at zero SNR, saturating to 1 ==")
for q in (0.0, 0.5, 1.0, 2.0, 5.0, 25.0):
    row = "  ".join(f"F_{eps}({q:g})={channel_overlap(eps, q):.4f}" for eps in (0.0, 0.5))
    print(f"  {row}")

print()
print("== Quality of the simplified surrogate ==")
print("  F~_eps(q) = eps^2 + (1 - eps^2) F(q) keeps only the eps^2 dependence.")
gap = channel_overlap_approx(0.6, 1.0) - (0.36 + 0.64 * channel_overlap(0.0, 1.0))
print(f"  affine identity residual at (0.6, 1.0): {gap:.2e}")
eps_grid = np.linspace(0.0, 1.0, 101)
q_grid = np.linspace(0.1, 10.0, 100)
surface = approx_error_grid(eps_grid, q_grid)
i, j = np.unravel_index(surface.argmax(), surface.shape)
print(
    f"  worst relative error {surface.max():.2%} at eps={eps_grid[i]:.2f}, "
    f"q={q_grid[j]:.1f}; exact at eps in {{0, 1}} and washing out for large q"
)
