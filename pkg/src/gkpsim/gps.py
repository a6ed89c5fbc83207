"""One generalized-photon-subtraction (GPS) unit.

Two counter-squeezed vacua interfere on a beam splitter of transmittance T;
photon-number detection of n on one port heralds a non-Gaussian state on the
other. With R = 1 - T and

    a = T e^{-2r} + R e^{2r},   b = sqrt(RT) (e^{-2r} - e^{2r}),

the heralded wavefunction is

    psi_n(x) ~ phi_0(x / sqrt(a)) * (G_a * phi_n)(b x / a),

where G_a(y) = exp(-a y^2 / 2) and * is convolution. For e^{2r} >> 1 this
collapses to the separable form

    psi_n(x) ~ G_{e^{-2r}/T}(sqrt(T/R) x) * phi_n(sqrt(T/R) x),

whose envelope exponent e^{-2r}/T is what parameter solving pins down.

Beam-splitter quadrature convention used throughout the package:
x1' = sqrt(T) x1 + sqrt(R) x2, x2' = -sqrt(R) x1 + sqrt(T) x2 (orthogonal,
unit Jacobian). The detected port is 2'; with the x-squeezed input on port 1
the heralded state reproduces the formula above, which the two-mode oracle
cross-checks numerically.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.optimize import minimize_scalar
from scipy.signal import fftconvolve

from .errors import ConfigurationError
from .specfun import (
    DEFAULT_MAX_ORDER,
    comb_wavenumber,
    gaussian_power,
    hermite_phi,
    hermite_table,
)
from .wavefield import GridWavefunction, from_samples

# Default photon-number cutoff for distribution tails.
DEFAULT_N_CAP = DEFAULT_MAX_ORDER


@dataclass(frozen=True)
class GpsParams:
    """Squeezer magnitude r (inputs phi_0(e^{-r} x), phi_0(e^{r} x)) and
    beam-splitter transmittance."""

    r: float
    transmittance: float

    def __post_init__(self):
        if not 0.0 < self.transmittance < 1.0:
            raise ConfigurationError("transmittance must lie in (0, 1)")
        if self.r < 0:
            raise ConfigurationError("r must be >= 0 (magnitude of the pair)")

    @property
    def reflectance(self):
        return 1.0 - self.transmittance

    @property
    def a(self):
        return self.transmittance * math.exp(-2 * self.r) + self.reflectance * math.exp(2 * self.r)

    @property
    def b(self):
        return math.sqrt(self.reflectance * self.transmittance) * (
            math.exp(-2 * self.r) - math.exp(2 * self.r)
        )

    @property
    def envelope_exponent(self):
        """e^{-2r}/T, the envelope-to-oscillation exponent of the output."""
        return math.exp(-2 * self.r) / self.transmittance

    @property
    def input_squeezing_db(self):
        return 10.0 * math.log10(math.exp(2 * self.r))


@dataclass(frozen=True, eq=False)
class GpsOutcome:
    """A sampled unit result: detected count, its heralded (post-adaptive)
    state, the count probability, and the window-acceptance flag."""

    n: int
    state: GridWavefunction
    probability: float
    accepted: bool


def _convolved_oscillation(params, n, z_points):
    """(G_a * phi_n)(z) on the given z samples via FFT convolution on an
    auxiliary uniform grid wide enough for phi_n plus the kernel."""
    a = params.a
    z_max = math.sqrt(2 * n + 1) + 8.0
    # odd sample count keeps a node exactly at z = 0, so the 'same' window of
    # the discrete convolution stays centered and parity survives exactly
    aux = np.linspace(-z_max, z_max, 4097)
    dz = aux[1] - aux[0]
    kernel = np.exp(-0.5 * a * aux ** 2)
    conv = fftconvolve(hermite_phi(n, aux), kernel, mode="same") * dz
    spline = CubicSpline(aux, conv, extrapolate=False)
    out = spline(np.clip(z_points, aux[0], aux[-1]))
    return np.where(np.abs(z_points) > z_max, 0.0, out)


def _heralded_samples(params, n, x):
    """Unnormalized exact heralded amplitudes on arbitrary position samples."""
    a, b = params.a, params.b
    envelope = np.exp(-x ** 2 / (2.0 * a))
    return envelope * _convolved_oscillation(params, n, b * x / a)


def heralded_state_exact(params, n, grid):
    """Exact heralded state of one GPS unit for detected count n."""
    if n < 0:
        raise ConfigurationError("n must be >= 0")
    return from_samples(grid, _heralded_samples(params, n, grid.x))


def heralded_state_approx(params, n, grid):
    """Large-squeezing separable approximation of the heralded state."""
    if params.input_squeezing_db < 10.0:
        warnings.warn(
            "separable approximation assumes e^{2r} >> 1; "
            f"input squeezing is only {params.input_squeezing_db:.1f} dB",
            stacklevel=2,
        )
    scale = math.sqrt(params.transmittance / params.reflectance)
    y = scale * grid.x
    psi = gaussian_power(params.envelope_exponent, y) * hermite_phi(n, y)
    return from_samples(grid, psi)


def oscillation_scale(params):
    """Argument coefficient |b|/a of the exact output oscillation; tends to
    sqrt(T/R) for large squeezing."""
    return abs(params.b) / params.a


def adaptive_breeding_input(params, n, copies, grid):
    """Heralded state mapped onto common breeding coordinates.

    The squeeze sigma = k_n sqrt(copies) / (|b|/a) scales the oscillation so
    the comb teeth of every accepted n land on the same lattice (spacing
    sqrt(2*pi)/sqrt(copies)); odd counts additionally get the half-tooth
    position shift that moves their antinodes from half-integer to integer
    lattice sites. Both are folded into the argument map, so no resampling of
    a narrow intermediate state ever happens.
    """
    if n < 1:
        raise ConfigurationError("adaptive inputs need n >= 1")
    sigma = comb_wavenumber(n) * math.sqrt(copies) / oscillation_scale(params)
    shift = math.sqrt(math.pi / 2.0) / math.sqrt(copies) if n % 2 else 0.0
    xs = sigma * (grid.x - shift)
    return from_samples(grid, _heralded_samples(params, n, xs))


def _two_mode_setup(params, n_cap, points):
    """Detected-port conditional amplitudes from the explicit two-mode state.

    Builds Psi'(x1, x2) = N exp(-(abar x1^2 + a x2^2)/2 - b x1 x2) on a
    reduced grid (the exact post-beam-splitter Gaussian for our convention)
    and projects the detected port onto phi_n rows.
    """
    r, T = params.r, params.transmittance
    R = 1.0 - T
    a, b = params.a, params.b
    abar = R * math.exp(-2 * r) + T * math.exp(2 * r)
    s1 = math.sqrt(a / 2.0)
    s2 = math.sqrt(abar / 2.0)
    half1 = 8.0 * s1 + 2.0
    half2 = max(8.0 * s2 + 2.0, math.sqrt(2.0 * n_cap + 1.0) + 6.0)
    x1 = np.linspace(-half1, half1, points)
    x2 = np.linspace(-half2, half2, points)
    dx1 = x1[1] - x1[0]
    dx2 = x2[1] - x2[0]
    expo = (
        -0.5 * (abar * x1[:, None] ** 2 + a * x2[None, :] ** 2)
        - b * x1[:, None] * x2[None, :]
    )
    joint = np.exp(expo)
    joint /= math.sqrt(np.sum(joint ** 2) * dx1 * dx2)
    table = hermite_table(n_cap, x2)
    cond = table.values @ joint.T * dx2  # cond[n, j] = c_n(x1_j)
    return x1, dx1, cond


def two_mode_conditional(params, n, n_cap=DEFAULT_N_CAP, points=1024):
    """(x1 samples, normalized conditional amplitude) for detected count n.

    This is the circuit-level construction, independent of the closed-form
    heralded_state_exact; the two must agree (consistency check in tests).
    """
    x1, dx1, cond = _two_mode_setup(params, max(n, 1), points)
    amp = cond[n]
    return x1, amp / math.sqrt(np.sum(amp ** 2) * dx1)


def photon_distribution(params, n_cap=DEFAULT_N_CAP, points=1024):
    """P(n) for n = 0..n_cap on the detected port, from the two-mode state.

    The result is a plain probability array; sum_{n<=n_cap} P(n) <= 1 up to
    quadrature noise, approaching 1 as n_cap grows.
    """
    if n_cap < 0:
        raise ConfigurationError("n_cap must be >= 0")
    x1, dx1, cond = _two_mode_setup(params, n_cap, points)
    return np.sum(cond ** 2, axis=1) * dx1


def p_ngs(params, n_min, n_max, distribution=None):
    """Window acceptance probability sum_{n_min..n_max} P(n)."""
    if not 0 <= n_min <= n_max:
        raise ConfigurationError("need 0 <= n_min <= n_max")
    if distribution is None:
        distribution = photon_distribution(params, n_cap=max(n_max, DEFAULT_N_CAP))
    if n_max >= distribution.size:
        raise ConfigurationError("n_max beyond the tabulated distribution")
    return float(np.sum(distribution[n_min : n_max + 1]))


def solve_params(envelope_c, copies, n_min, n_max, r_max=3.5):
    """Choose (r, T) for a GPS unit feeding a `copies`-fold breeding run.

    The separable-form envelope exponent is pinned to the target value,
    e^{-2r}/T = c/copies (so the unit emits the per-copy root of the product
    target up to squeezing), which leaves one free parameter; r is then
    chosen to maximize the window acceptance probability.
    """
    if envelope_c <= 0 or copies < 1:
        raise ConfigurationError("need envelope_c > 0 and copies >= 1")
    ratio = envelope_c / copies

    def transmittance_of(r):
        return math.exp(-2.0 * r) / ratio

    r_min = -0.5 * math.log(ratio) if ratio < 1 else 0.0
    r_lo = r_min + 1e-3
    if transmittance_of(r_lo) >= 1.0 or r_lo >= r_max:
        raise ConfigurationError("envelope constraint admits no T in (0, 1)")

    def objective(r):
        pars = GpsParams(r=r, transmittance=transmittance_of(r))
        return -p_ngs(pars, n_min, n_max)

    rs = np.linspace(r_lo, r_max, 24)
    vals = [objective(r) for r in rs]
    i = int(np.argmin(vals))
    lo = rs[max(i - 1, 0)]
    hi = rs[min(i + 1, rs.size - 1)]
    res = minimize_scalar(objective, bounds=(lo, hi), method="bounded", options={"xatol": 1e-4})
    best = res.x if res.fun < vals[i] else rs[i]
    return GpsParams(r=float(best), transmittance=transmittance_of(float(best)))


def distribution_csv(distribution, n_min, n_max, path):
    """Dump n, P(n), cumulative, accepted rows."""
    cum = 0.0
    with open(path, "w", encoding="ascii") as fh:
        fh.write("n,p,cumulative,accepted\n")
        for n, p in enumerate(distribution):
            cum += p
            fh.write(f"{n},{p:.12g},{cum:.12g},{str(n_min <= n <= n_max).lower()}\n")
