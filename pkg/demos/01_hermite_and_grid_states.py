"""Building blocks: Hermite-Gauss functions and grid-sampled states.

Walks through the numerically stable special functions and the Gaussian
operations every later stage is made of.
"""

import numpy as np

from gkpsim import (
    GridSpec,
    displace_p,
    displace_x,
    fidelity,
    hermite_phi,
    hermite_table,
    squeeze,
    to_momentum,
)
from gkpsim.wavefield import from_samples

grid = GridSpec()  # 4096 points on [-25, 25)
print(f"grid: {grid.points} points, dx = {grid.dx:.4f}, momentum extent {grid.p[-1]:.1f}")

# The recurrence stays finite far past the regime where raw Hermite
# polynomials overflow (H_40(9) is about 1e47).
print(f"phi_40(9.0) = {hermite_phi(40, 9.0):.6e}")

# Discrete orthonormality on the grid
table = hermite_table(40, grid.x)
gram = table.values @ table.values.T * grid.dx
print(f"orthonormality error up to n=40: {np.max(np.abs(gram - np.eye(41))):.2e}")

# Hermite-Gauss functions are Fourier eigenfunctions with eigenvalue (-i)^n
for n in (0, 1, 3):
    psi = from_samples(grid, table.row(n))
    psit = to_momentum(psi)
    ref = (-1j) ** n * hermite_phi(n, grid.p)
    overlap = np.sum(np.conj(ref) * psit.values) * grid.dp
    print(f"n={n}: <(-i)^n phi_n | F phi_n> = {overlap:.10f}")

# Gaussian operations: squeeze narrows x by sigma, displacements shift
vac = from_samples(grid, table.row(0))
narrow = squeeze(vac, 2.0)
x2 = np.sum(grid.x**2 * np.abs(narrow.values) ** 2) * grid.dx
print(f"<x^2> of vacuum squeezed by 2: {x2:.4f} (vacuum has 0.5)")

shifted = displace_x(vac, 1.0)
print(f"overlap with a unit-displaced copy: {fidelity(vac, shifted):.4f} "
      f"(analytic exp(-1/2) = {np.exp(-0.5):.4f})")

rotated = displace_p(vac, 1.0)
print(f"|psi(x)| untouched by momentum displacement: "
      f"{np.allclose(np.abs(rotated.values), np.abs(vac.values))}")
