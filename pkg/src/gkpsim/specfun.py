"""Hermite-Gauss functions and Gaussian envelope shapes.

Everything here is a *shape*: global normalization constants are left to the
wavefunction layer, except for the Hermite-Gauss functions phi_n which carry
their natural L2 normalization because the three-term recurrence produces it
for free (and keeps the evaluation stable far beyond n = 40, where raw
Hermite polynomials overflow).
"""

from dataclasses import dataclass

import numpy as np

from .errors import CapabilityError

# Highest photon number supported by default. Large enough for n_max = 40
# plus headroom for distribution tails and oracle checks.
DEFAULT_MAX_ORDER = 60


def hermite_phi(n, x, max_order=DEFAULT_MAX_ORDER):
    """Evaluate the L2-normalized Hermite-Gauss function phi_n(x).

    phi_n(x) = (pi^-1/4 / sqrt(2^n n!)) H_n(x) exp(-x^2/2), computed with the
    normalized recurrence

        phi_{n+1}(x) = x sqrt(2/(n+1)) phi_n(x) - sqrt(n/(n+1)) phi_{n-1}(x)

    which never forms the (overflowing) polynomial values.

    Parameters
    ----------
    n : int
        Photon number, 0 <= n <= max_order.
    x : array_like
        Evaluation points.

    Returns
    -------
    ndarray of phi_n values, same shape as x.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    if n > max_order:
        raise CapabilityError(f"order {n} above configured maximum {max_order}")
    x = np.asarray(x, dtype=float)
    prev = np.zeros_like(x)
    cur = np.pi ** -0.25 * np.exp(-0.5 * x * x)
    for m in range(n):
        prev, cur = cur, x * np.sqrt(2.0 / (m + 1)) * cur - np.sqrt(m / (m + 1.0)) * prev
    return cur


@dataclass(frozen=True)
class HermiteTable:
    """phi_n(x) samples for all orders 0..max_order on a fixed grid.

    values[n, j] = phi_n(x[j]); rows are read-only after construction.
    """

    max_order: int
    x: np.ndarray
    values: np.ndarray

    def row(self, n):
        if not 0 <= n <= self.max_order:
            raise CapabilityError(f"order {n} outside table range 0..{self.max_order}")
        return self.values[n]


def hermite_table(max_order, x):
    """Build a HermiteTable via the normalized recurrence (one pass)."""
    if max_order < 0:
        raise ValueError("max_order must be >= 0")
    x = np.asarray(x, dtype=float)
    values = np.zeros((max_order + 1, x.size))
    values[0] = np.pi ** -0.25 * np.exp(-0.5 * x * x)
    if max_order >= 1:
        values[1] = np.sqrt(2.0) * x * values[0]
    for n in range(1, max_order):
        values[n + 1] = (
            x * np.sqrt(2.0 / (n + 1)) * values[n]
            - np.sqrt(n / (n + 1.0)) * values[n - 1]
        )
    values.setflags(write=False)
    return HermiteTable(max_order=max_order, x=x, values=values)


def gaussian_power(c, x):
    """Gaussian envelope exp(-c x^2 / 2), i.e. the c-th power of the vacuum
    shape with its normalization constant dropped.

    c > 0 need not be an integer.
    """
    if c <= 0:
        raise ValueError("exponent c must be > 0")
    x = np.asarray(x, dtype=float)
    return np.exp(-0.5 * c * x * x)


def comb_wavenumber(n):
    """Rescale factor k_n mapping the oscillation of phi_n onto the grid-state
    lattice.

    Near the origin phi_n oscillates with angular wavenumber sqrt(2n+1), so
    phi_n(k_n x) with

        k_n = sqrt(pi / (2 (2n+1)))

    oscillates with angular wavenumber sqrt(pi/2): antinodes (comb teeth) fall
    on the sqrt(2*pi) lattice and adjacent teeth alternate in sign, exactly
    the structure a sqrt(2*pi)-spaced grid state needs. Satisfies
    k_n^2 * (4n+2) = pi.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    return np.sqrt(np.pi / (2.0 * (2 * n + 1)))
