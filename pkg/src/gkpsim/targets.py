"""Target grid states and the effective-squeezing figure of merit.

The quality of a candidate grid state is the pair (delta_x, delta_p) obtained
from the magnitudes of the sqrt(2*pi) displacement expectation values

    delta_x = sqrt(-(1/pi) ln |<exp(i sqrt(2*pi) x)>|^2)

and the momentum analog with exp(-i sqrt(2*pi) p). For the reference comb
state below these reduce exactly to its tooth width and inverse envelope
width, and 10 dB (delta = 0.316) is the usual fault-tolerance bar.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, GridOverflowError, MetricUndefinedError
from .specfun import comb_wavenumber, gaussian_power, hermite_phi
from .wavefield import GridWavefunction, from_samples, to_momentum

SQRT_2PI = math.sqrt(2.0 * math.pi)

# Displacement expectations below this have no comb structure to measure.
COMB_OVERLAP_FLOOR = 1e-12


def to_decibels(delta):
    """Squeezing in dB: 10 dB corresponds to delta = 0.316."""
    return -20.0 * math.log10(delta)


def from_decibels(db):
    return 10.0 ** (-db / 20.0)


@dataclass(frozen=True)
class EffectiveSqueezing:
    delta_x: float
    delta_p: float

    @property
    def delta_x_db(self):
        return to_decibels(self.delta_x)

    @property
    def delta_p_db(self):
        return to_decibels(self.delta_p)

    @property
    def min_db(self):
        return min(self.delta_x_db, self.delta_p_db)


@dataclass(frozen=True)
class SensorParams:
    """Tooth width delta_x, inverse envelope width delta_p, lattice parity t."""

    delta_x: float
    delta_p: float
    parity: int = 0

    def __post_init__(self):
        if not (0 < self.delta_x < 1 and 0 < self.delta_p < 1):
            raise ConfigurationError("delta_x and delta_p must lie in (0, 1)")
        if self.parity not in (0, 1):
            raise ConfigurationError("parity must be 0 or 1")


def sensor_state(params, grid):
    """Reference comb state: Gaussian teeth of width delta_x at
    (s + t/2) sqrt(2*pi), under a Gaussian envelope of width 1/delta_p.

    The lattice sum is truncated where the envelope weight drops below 1e-12,
    which is beneath grid quadrature noise.
    """
    if 1.0 / params.delta_p >= 0.3 * grid.half_width:
        raise GridOverflowError("sensor envelope too wide for the grid")
    x = grid.x
    psi = np.zeros(grid.points)
    # envelope weight exp(-pi dp^2 (s+t/2)^2) >= 1e-12
    reach = math.sqrt(math.log(1e12) / math.pi) / params.delta_p
    s_max = int(math.ceil(reach)) + 1
    for s in range(-s_max, s_max + 1):
        lattice = s + params.parity / 2.0
        weight = math.exp(-math.pi * params.delta_p ** 2 * lattice ** 2)
        if weight < 1e-12:
            continue
        psi += weight * np.exp(-0.5 * (x - lattice * SQRT_2PI) ** 2 / params.delta_x ** 2)
    return from_samples(grid, psi)


def breeding_target(envelope_c, n, copies, grid):
    """Product target state: Gaussian envelope of exponent c times the
    `copies`-th power of phi_n, both with arguments rescaled by the comb
    wavenumber so the teeth land on the sqrt(2*pi) lattice.
    """
    if envelope_c <= 0:
        raise ConfigurationError("envelope exponent must be > 0")
    if n < 1 or copies < 1:
        raise ConfigurationError("need n >= 1 and copies >= 1")
    y = comb_wavenumber(n) * grid.x
    psi = gaussian_power(envelope_c, y) * hermite_phi(n, y) ** copies
    return from_samples(grid, psi)


def displacement_expectations(psi):
    """Complex expectation values of the two lattice displacement operators.

    Returns (<exp(i sqrt(2*pi) x)>, <exp(-i sqrt(2*pi) p)>); their magnitudes
    feed the metric, their phases encode the comb offsets.
    """
    if psi.basis != "x":
        raise ConfigurationError("expected a position-basis state")
    rho_x = np.abs(psi.values) ** 2
    cx = np.sum(np.exp(1j * SQRT_2PI * psi.grid.x) * rho_x) * psi.grid.dx
    psit = to_momentum(psi)
    rho_p = np.abs(psit.values) ** 2
    cp = np.sum(np.exp(-1j * SQRT_2PI * psi.grid.p) * rho_p) * psi.grid.dp
    return complex(cx), complex(cp)


def _delta_from_overlap(mag):
    if mag < COMB_OVERLAP_FLOOR:
        raise MetricUndefinedError("no comb structure: displacement overlap < 1e-12")
    mag = min(mag, 1.0)
    return math.sqrt(max(-math.log(mag * mag), 0.0) / math.pi)


def effective_squeezing(psi):
    """Effective squeezing pair of a normalized pure state, by quadrature."""
    cx, cp = displacement_expectations(psi)
    return EffectiveSqueezing(
        delta_x=_delta_from_overlap(abs(cx)),
        delta_p=_delta_from_overlap(abs(cp)),
    )


def phase_reference_offset(copies):
    """Momentum displacement sqrt(pi/2) * (copies mod 2) relating the bred
    product state to the sensor state; for odd multiplicities the momentum
    comb sits at half-integer lattice points and needs this shift.
    """
    if copies < 1:
        raise ConfigurationError("copies must be >= 1")
    return math.sqrt(math.pi / 2.0) * (copies % 2)


def imaginary_fraction(psi):
    """Smallest L2 fraction carried by the imaginary part over global phase.

    For a normalized state this is (1 - |integral psi(x)^2 dx|) / 2: zero for
    any state that is real up to a global phase.
    """
    pseudo = np.sum(psi.values ** 2) * psi.step
    total = np.sum(np.abs(psi.values) ** 2) * psi.step
    return float((1.0 - abs(pseudo) / total) / 2.0)
