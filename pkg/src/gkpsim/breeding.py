"""Beam-splitter breeding with homodyne conditioning and output correction.

N inputs are folded left to right through beam splitters; after each merge
the reflected port is measured in x and the kept port is conditioned on the
outcome. Under the package convention the conditioned wavefunction is

    psi_out(x) ~ psi_A(sqrt(T) x - sqrt(R) x_m) * psi_B(sqrt(R) x + sqrt(T) x_m),

so with the merge schedule T_k = k/(k+1) and all outcomes zero, N identical
inputs psi produce prod psi(x/sqrt(N)): the multiplicative synthesis the
protocol is built on. Outcomes are either supplied (oracle runs) or sampled
from the exact marginal density.

The output correction searches a position squeeze for the best balanced
effective squeezing and then reads both comb offsets from the phases of the
displacement expectations, which aligns the state to the reference lattice
without touching the metric (displacements leave it invariant).
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import (
    ConfigurationError,
    DegenerateConditioningError,
    DegenerateStateError,
)
from .targets import (
    SQRT_2PI,
    COMB_OVERLAP_FLOOR,
    EffectiveSqueezing,
    effective_squeezing,
    to_decibels,
)
from .wavefield import (
    GridWavefunction,
    displace_p,
    displace_x,
    eval_at,
    normalize,
    squeeze,
    to_momentum,
)

# Outcome-table defaults: extent covers every state the tail guard admits,
# resolution stays well under a comb tooth width.
DENSITY_POINTS = 1024
DENSITY_EXTENT_FRACTION = 0.8
# Grid stride when tabulating the marginal; the sampling density needs far
# less x-resolution than the conditioned state itself.
DENSITY_STRIDE = 4


def default_transmittances(n_inputs):
    """Merge schedule T_k = k/(k+1) for k = 1..N-1."""
    return tuple(k / (k + 1.0) for k in range(1, n_inputs))


@dataclass(frozen=True)
class BreedingPlan:
    """Number of inputs, merge transmittances, and fixed outcomes (None to
    sample each outcome from the marginal density)."""

    n_inputs: int
    transmittances: tuple = None
    outcomes: tuple = None

    def __post_init__(self):
        if self.n_inputs < 2:
            raise ConfigurationError("breeding needs at least two inputs")
        ts = self.transmittances
        if ts is None:
            ts = default_transmittances(self.n_inputs)
        ts = tuple(float(t) for t in ts)
        if len(ts) != self.n_inputs - 1:
            raise ConfigurationError("need one transmittance per merge (N-1)")
        if any(not 0.0 < t < 1.0 for t in ts):
            raise ConfigurationError("transmittances must lie in (0, 1)")
        object.__setattr__(self, "transmittances", ts)
        if self.outcomes is not None:
            outs = tuple(float(v) for v in self.outcomes)
            if len(outs) != self.n_inputs - 1:
                raise ConfigurationError("need one outcome per merge (N-1)")
            object.__setattr__(self, "outcomes", outs)


@dataclass(frozen=True)
class HomodyneRecord:
    """Sampled (or supplied) outcomes, their marginal densities, and the
    product conditioning weight of one breeding run."""

    outcomes: tuple
    densities: tuple
    weight: float


@dataclass(frozen=True)
class GaussianCorrection:
    sigma: float
    x0: float
    p0: float

    def __post_init__(self):
        if self.sigma <= 0:
            raise ConfigurationError("correction squeeze must be > 0")


def bs_condition(psi_a, psi_b, transmittance, outcome):
    """Condition one beam-splitter merge on homodyne outcome x_m.

    Returns (normalized state, marginal density p(x_m)); the density is the
    squared pre-normalization norm of the conditioned wavefunction.
    """
    if psi_a.grid != psi_b.grid:
        raise ConfigurationError("inputs live on different grids")
    if not 0.0 < transmittance < 1.0:
        raise ConfigurationError("transmittance must lie in (0, 1)")
    rt = math.sqrt(transmittance)
    rr = math.sqrt(1.0 - transmittance)
    x = psi_a.grid.x
    vals_a = eval_at(psi_a, rt * x - rr * outcome, fill=0.0)
    vals_b = eval_at(psi_b, rr * x + rt * outcome, fill=0.0)
    raw = GridWavefunction(psi_a.grid, vals_a * vals_b, "x")
    try:
        state, nrm = normalize(raw)
    except DegenerateStateError as exc:
        raise DegenerateConditioningError(
            f"outcome {outcome:.4g} has zero conditional density"
        ) from exc
    return state, nrm * nrm


def homodyne_density(psi_a, psi_b, transmittance, outcome_grid=None):
    """Tabulated marginal density of the homodyne outcome for one merge.

    Returns (outcome grid, density) with the density trapezoid-normalized
    to unit mass.
    """
    if psi_a.grid != psi_b.grid:
        raise ConfigurationError("inputs live on different grids")
    g = psi_a.grid
    if outcome_grid is None:
        extent = DENSITY_EXTENT_FRACTION * g.half_width
        outcome_grid = np.linspace(-extent, extent, DENSITY_POINTS)
    rt = math.sqrt(transmittance)
    rr = math.sqrt(1.0 - transmittance)
    xs = g.x[::DENSITY_STRIDE]
    dxs = g.dx * DENSITY_STRIDE
    dens_a = np.abs(psi_a.values) ** 2
    dens_b = np.abs(psi_b.values) ** 2
    u = rt * xs[None, :] - rr * outcome_grid[:, None]
    v = rr * xs[None, :] + rt * outcome_grid[:, None]
    prob = np.interp(u, g.x, dens_a, left=0.0, right=0.0) * np.interp(
        v, g.x, dens_b, left=0.0, right=0.0
    )
    density = np.sum(prob, axis=1) * dxs
    mass = np.trapezoid(density, outcome_grid)
    if mass <= 0:
        raise DegenerateConditioningError("outcome density vanished everywhere")
    return outcome_grid, density / mass


def sample_outcome(outcome_grid, density, rng):
    """Inverse-CDF draw from a tabulated density, linear between nodes."""
    steps = np.diff(outcome_grid)
    cdf = np.concatenate([[0.0], np.cumsum((density[1:] + density[:-1]) * 0.5 * steps)])
    total = cdf[-1]
    if total <= 0:
        raise DegenerateConditioningError("cannot sample from an empty density")
    u = rng.random() * total
    idx = int(np.searchsorted(cdf, u, side="right") - 1)
    idx = min(max(idx, 0), cdf.size - 2)
    span = cdf[idx + 1] - cdf[idx]
    frac = 0.0 if span <= 0 else (u - cdf[idx]) / span
    return float(outcome_grid[idx] + frac * steps[idx])


def breed(inputs, plan=None, rng=None):
    """Fold N inputs through the breeding chain.

    Outcomes come from plan.outcomes when given, otherwise each merge samples
    from its exact marginal (which then requires an rng). Returns the final
    normalized state plus the homodyne record.
    """
    inputs = list(inputs)
    if plan is None:
        plan = BreedingPlan(n_inputs=len(inputs))
    if len(inputs) != plan.n_inputs:
        raise ConfigurationError("plan size does not match the input count")
    if plan.outcomes is None and rng is None:
        raise ConfigurationError("sampled outcomes need an rng stream")
    state = inputs[0]
    outcomes = []
    densities = []
    weight = 1.0
    for k, nxt in enumerate(inputs[1:]):
        t_k = plan.transmittances[k]
        if plan.outcomes is not None:
            x_m = plan.outcomes[k]
        else:
            grid_m, dens = homodyne_density(state, nxt, t_k)
            x_m = sample_outcome(grid_m, dens, rng)
        state, p_m = bs_condition(state, nxt, t_k, x_m)
        outcomes.append(x_m)
        densities.append(p_m)
        weight *= p_m
    record = HomodyneRecord(tuple(outcomes), tuple(densities), weight)
    return state, record


def _comb_overlaps(psi):
    """Precompute the ingredients for the squeeze-scan objective.

    Squeezing by sigma maps the displacement expectations onto the state's
    own characteristic functions at shifted wavenumbers:
    <exp(i sqrt(2pi) x)>_sigma = C_x(sqrt(2pi)/sigma) and
    <exp(-i sqrt(2pi) p)>_sigma = C_p(sqrt(2pi) sigma), so the whole scan
    reuses one momentum transform.
    """
    g = psi.grid
    rho_x = np.abs(psi.values) ** 2
    rho_p = np.abs(to_momentum(psi).values) ** 2

    def c_x(kappa):
        return complex(np.sum(np.exp(1j * kappa * g.x) * rho_x) * g.dx)

    def c_p(kappa):
        return complex(np.sum(np.exp(-1j * kappa * g.p) * rho_p) * g.dp)

    return c_x, c_p


def _min_db(c_x, c_p, sigma):
    ox = abs(c_x(SQRT_2PI / sigma))
    op = abs(c_p(SQRT_2PI * sigma))
    if ox < COMB_OVERLAP_FLOOR or op < COMB_OVERLAP_FLOOR:
        return -math.inf
    delta = lambda o: math.sqrt(max(-math.log(min(o, 1.0) ** 2), 1e-300) / math.pi)
    return min(to_decibels(delta(ox)), to_decibels(delta(op)))


def optimize_correction(psi, parity=0, sigma_bounds=(0.5, 2.0)):
    """Search the output Gaussian correction for a bred state.

    Maximizes min(dB_x, dB_p) over the squeeze factor (coarse scan plus a
    bounded refine, about 80 objective evaluations), then reads the position
    and momentum comb offsets off the displacement-expectation phases of the
    squeezed state; for odd input multiplicities that phase is pi and the
    momentum offset lands on +sqrt(pi/2), the half-lattice reference shift.

    Returns (correction, corrected state, its effective squeezing).
    """
    c_x, c_p = _comb_overlaps(psi)
    scan = np.geomspace(sigma_bounds[0], sigma_bounds[1], 61)
    vals = [_min_db(c_x, c_p, s) for s in scan]
    i = int(np.argmax(vals))
    if not math.isfinite(vals[i]):
        # no comb anywhere in range; let the metric raise its own error
        effective_squeezing(psi)
        raise ConfigurationError("squeeze scan failed on a comb state")
    lo = scan[max(i - 1, 0)]
    hi = scan[min(i + 1, scan.size - 1)]
    res = minimize_scalar(
        lambda s: -_min_db(c_x, c_p, s),
        bounds=(lo, hi),
        method="bounded",
        options={"xatol": 1e-4},
    )
    sigma = float(res.x) if -res.fun >= vals[i] else float(scan[i])

    half = SQRT_2PI / 2.0
    theta_x = np.angle(c_x(SQRT_2PI / sigma))
    theta_p = np.angle(c_p(SQRT_2PI * sigma))
    x0 = -theta_x / SQRT_2PI
    p0 = theta_p / SQRT_2PI
    x0 = (x0 + half) % SQRT_2PI - half
    p0 = (p0 + half) % SQRT_2PI - half
    if parity and abs(p0 + half) < 1e-9:
        p0 = half  # +-half a lattice step are equivalent; keep the + branch

    correction = GaussianCorrection(sigma=sigma, x0=float(x0), p0=float(p0))
    corrected = displace_p(displace_x(squeeze(psi, sigma), correction.x0), correction.p0)
    metrics = effective_squeezing(corrected)
    return correction, corrected, metrics


def success(metrics: EffectiveSqueezing, threshold_db=10.0):
    """Both quadratures at or above the squeezing bar."""
    return metrics.min_db >= threshold_db
