"""Full multiplexed Monte Carlo experiment.

M GPS units fire in parallel; a selector keeps the first N whose photon
counts fall inside the acceptance window, the kept states are bred with
sampled homodyne outcomes, the output correction runs, and a trial succeeds
when both effective squeezings clear the threshold.

Estimation is two-phase: a cheap count-only phase measures the window
acceptance statistics, and a conditioned phase (counts drawn from the
in-window distribution, licensed by unit independence) measures the homodyne
stage success rate. The analytic total combines them through the binomial
selector tail

    P_total = P_HD * sum_{j=N..M} C(M,j) P_NGS^j (1-P_NGS)^{M-j}.

Reproducibility: every trial derives its own generator from
(seed, phase, trial), so aggregate results are independent of worker count
and execution order.
"""

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.stats import binom

from .breeding import BreedingPlan, breed, optimize_correction
from .errors import ConfigurationError, GkpSimError
from .gps import (
    DEFAULT_N_CAP,
    GpsParams,
    adaptive_breeding_input,
    p_ngs,
    photon_distribution,
    solve_params,
)
from .targets import imaginary_fraction
from .wavefield import GridSpec

_COUNT_PHASE = 0
_CONDITIONED_PHASE = 1
_FULL_PHASE = 2


@dataclass(frozen=True)
class FactoryConfig:
    m_units: int
    n_inputs: int
    n_min: int
    n_max: int
    envelope_c: float
    grid: GridSpec = field(default_factory=GridSpec)
    trials: int = 2000
    count_trials: int = 100_000
    seed: int = 12345
    threshold_db: float = 10.0

    def __post_init__(self):
        if not self.m_units >= self.n_inputs >= 2:
            raise ConfigurationError("need m_units >= n_inputs >= 2")
        if not 0 <= self.n_min <= self.n_max:
            raise ConfigurationError("need 0 <= n_min <= n_max")
        if self.envelope_c <= 0:
            raise ConfigurationError("envelope_c must be > 0")
        if self.trials < 1 or self.count_trials < 1:
            raise ConfigurationError("trial counts must be >= 1")


def cat_baseline_config(cfg):
    """Same experiment with the envelope exponent pinned to the multiplicity,
    which is what breeding pre-made cat states amounts to."""
    return replace(cfg, envelope_c=float(cfg.n_inputs))


@dataclass(frozen=True)
class TrialRecord:
    trial_id: int
    counts: tuple
    accepted: tuple
    ngs_success: bool
    outcomes: tuple = ()
    sigma: float = None
    x0: float = None
    p0: float = None
    delta_x_db: float = None
    delta_p_db: float = None
    imag_fraction: float = None
    success: bool = False
    error_tag: str = ""


@dataclass(frozen=True)
class ProbabilityReport:
    p_ngs_analytic: float
    p_ngs_empirical: float
    p_ngs_halfwidth: float
    ngs_rate_empirical: float
    p_hd: float
    p_hd_halfwidth: float
    p_total_analytic: float
    p_total_empirical: float
    conditioned_trials: int
    count_trials: int


def trial_rng(seed, phase, trial_id):
    """Deterministic per-trial stream keyed by (seed, phase, trial)."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(phase, trial_id)))


def solve_for_config(cfg):
    return solve_params(cfg.envelope_c, cfg.n_inputs, cfg.n_min, cfg.n_max)


def build_input_cache(cfg, params):
    """Adaptive breeding inputs for every accepted count, built once."""
    return {
        n: adaptive_breeding_input(params, n, cfg.n_inputs, cfg.grid)
        for n in range(max(cfg.n_min, 1), cfg.n_max + 1)
    }


def _count_sampler_pvals(distribution):
    """Sampling weights over 0..n_cap+1 where the last slot collects the mass
    above the tabulated cap (kept so window statistics stay unbiased)."""
    overflow = max(1.0 - float(distribution.sum()), 0.0)
    pvals = np.append(distribution, overflow)
    return pvals / pvals.sum()


def count_phase(cfg, distribution):
    """Window-acceptance statistics from count-only sampling.

    Returns (per-unit empirical acceptance rate, fraction of trials with at
    least n_inputs acceptances). Vectorized; runs in the driver.
    """
    rng = trial_rng(cfg.seed, _COUNT_PHASE, 0)
    pvals = _count_sampler_pvals(distribution)
    counts = rng.choice(pvals.size, size=(cfg.count_trials, cfg.m_units), p=pvals)
    inside = (counts >= cfg.n_min) & (counts <= cfg.n_max)
    per_unit = float(np.mean(inside))
    enough = float(np.mean(np.sum(inside, axis=1) >= cfg.n_inputs))
    return per_unit, enough


def _homodyne_stage(cfg, cache, ns, rng, base):
    """Breed + correct; a numerical failure yields a tagged failed record
    that keeps whatever stage data existed (the batch never aborts).
    Returns (record, corrected state or None)."""
    inputs = [cache[n] for n in ns]
    plan = BreedingPlan(n_inputs=cfg.n_inputs)
    try:
        state, record = breed(inputs, plan, rng=rng)
    except GkpSimError as exc:
        return TrialRecord(**base, error_tag=type(exc).__name__), None
    try:
        corr, corrected, metrics = optimize_correction(state, parity=cfg.n_inputs % 2)
    except GkpSimError as exc:
        return (
            TrialRecord(**base, outcomes=record.outcomes, error_tag=type(exc).__name__),
            None,
        )
    rec = TrialRecord(
        **base,
        outcomes=record.outcomes,
        sigma=corr.sigma,
        x0=corr.x0,
        p0=corr.p0,
        delta_x_db=metrics.delta_x_db,
        delta_p_db=metrics.delta_p_db,
        imag_fraction=imaginary_fraction(corrected),
        success=metrics.min_db >= cfg.threshold_db,
    )
    return rec, corrected


def window_probabilities(cfg, distribution):
    window = distribution[cfg.n_min : cfg.n_max + 1]
    return window / window.sum()


def run_conditioned_trial(cfg, params, trial_id, window_p=None, cache=None, keep_state=False):
    """One homodyne-stage trial with all counts drawn in-window."""
    if window_p is None:
        window_p = window_probabilities(cfg, photon_distribution(params, n_cap=max(cfg.n_max, DEFAULT_N_CAP)))
    if cache is None:
        cache = build_input_cache(cfg, params)
    rng = trial_rng(cfg.seed, _CONDITIONED_PHASE, trial_id)
    ns = tuple(
        int(v) for v in rng.choice(np.arange(cfg.n_min, cfg.n_max + 1), size=cfg.n_inputs, p=window_p)
    )
    base = dict(trial_id=trial_id, counts=ns, accepted=tuple(range(cfg.n_inputs)), ngs_success=True)
    rec, corrected = _homodyne_stage(cfg, cache, ns, rng, base)
    return rec, (corrected if keep_state else None)


def run_trial(cfg, params, trial_id, distribution=None, cache=None):
    """One full-system trial: M counts, selector, breeding, correction."""
    if distribution is None:
        distribution = photon_distribution(params, n_cap=max(cfg.n_max, DEFAULT_N_CAP))
    if cache is None:
        cache = build_input_cache(cfg, params)
    rng = trial_rng(cfg.seed, _FULL_PHASE, trial_id)
    pvals = _count_sampler_pvals(distribution)
    counts = tuple(int(v) for v in rng.choice(pvals.size, size=cfg.m_units, p=pvals))
    accepted = tuple(i for i, n in enumerate(counts) if cfg.n_min <= n <= cfg.n_max)
    if len(accepted) < cfg.n_inputs:
        return TrialRecord(trial_id=trial_id, counts=counts, accepted=accepted, ngs_success=False)
    chosen = accepted[: cfg.n_inputs]
    base = dict(trial_id=trial_id, counts=counts, accepted=chosen, ngs_success=True)
    rec, _ = _homodyne_stage(cfg, cache, [counts[i] for i in chosen], rng, base)
    return rec


_WORKER_CTX = {}


def _worker_init(cfg, params, window_p):
    _WORKER_CTX["cfg"] = cfg
    _WORKER_CTX["params"] = params
    _WORKER_CTX["window_p"] = window_p
    _WORKER_CTX["cache"] = build_input_cache(cfg, params)


def _worker_run(trial_ids):
    cfg = _WORKER_CTX["cfg"]
    out = []
    for tid in trial_ids:
        rec, _ = run_conditioned_trial(
            cfg,
            _WORKER_CTX["params"],
            tid,
            window_p=_WORKER_CTX["window_p"],
            cache=_WORKER_CTX["cache"],
        )
        out.append(rec)
    return out


def conditioned_phase(cfg, params, distribution, workers=1, keep_states=0):
    """Run the conditioned trials, optionally keeping the first successful
    corrected states (overlay dumps; forces the sequential path).
    Returns (records sorted by id, [(record, state), ...])."""
    window_p = window_probabilities(cfg, distribution)
    records = []
    states = []
    if workers and workers > 1 and keep_states == 0:
        chunks = [list(range(i, cfg.trials, workers)) for i in range(workers)]
        with ProcessPoolExecutor(
            max_workers=workers, initializer=_worker_init, initargs=(cfg, params, window_p)
        ) as pool:
            for part in pool.map(_worker_run, chunks):
                records.extend(part)
        records.sort(key=lambda r: r.trial_id)
    else:
        cache = build_input_cache(cfg, params)
        for tid in range(cfg.trials):
            keep = len(states) < keep_states
            rec, state = run_conditioned_trial(
                cfg, params, tid, window_p=window_p, cache=cache, keep_state=keep
            )
            records.append(rec)
            if keep and rec.success and state is not None:
                states.append((rec, state))
    return records, states


def _halfwidth(p, n):
    """Normal-approximation 95 percent binomial half-width."""
    if n == 0:
        return math.nan
    return 1.96 * math.sqrt(max(p * (1.0 - p), 0.0) / n)


def analytic_total(p_ngs_value, p_hd_value, m_units, n_inputs):
    """Selector tail times conditional success; exact binomial survival."""
    if not 0 <= p_ngs_value <= 1 or not 0 <= p_hd_value <= 1:
        raise ConfigurationError("probabilities must lie in [0, 1]")
    if m_units < n_inputs:
        raise ConfigurationError("need m_units >= n_inputs")
    tail = float(binom.sf(n_inputs - 1, m_units, p_ngs_value))
    return p_hd_value * tail


def estimate(cfg, distribution, records, count_stats):
    """Combine both phases into the probability report."""
    per_unit_emp, ngs_rate_emp = count_stats
    p_window = float(np.sum(distribution[cfg.n_min : cfg.n_max + 1]))
    # error-tagged trials are homodyne-stage failures, they stay in the count
    conditioned = [r for r in records if r.ngs_success]
    n_cond = len(conditioned)
    if n_cond == 0:
        p_hd = math.nan
    else:
        p_hd = sum(r.success for r in conditioned) / n_cond
    p_total_analytic = analytic_total(p_window, 0.0 if math.isnan(p_hd) else p_hd,
                                      cfg.m_units, cfg.n_inputs)
    p_total_empirical = (0.0 if math.isnan(p_hd) else p_hd) * ngs_rate_emp
    return ProbabilityReport(
        p_ngs_analytic=p_window,
        p_ngs_empirical=per_unit_emp,
        p_ngs_halfwidth=_halfwidth(per_unit_emp, cfg.count_trials * cfg.m_units),
        ngs_rate_empirical=ngs_rate_emp,
        p_hd=p_hd,
        p_hd_halfwidth=_halfwidth(p_hd if not math.isnan(p_hd) else 0.0, max(n_cond, 1)),
        p_total_analytic=p_total_analytic,
        p_total_empirical=p_total_empirical,
        conditioned_trials=n_cond,
        count_trials=cfg.count_trials,
    )


def sweep_m(p_ngs_value, p_hd_value, n_inputs, m_values):
    """(M, P_total) curve at fixed unit statistics."""
    return [(int(m), analytic_total(p_ngs_value, p_hd_value, int(m), n_inputs)) for m in m_values]


def scatter_metrics(records):
    """Per-trial (dB_x, dB_p) pairs of the conditioned trials."""
    return [
        (r.delta_x_db, r.delta_p_db)
        for r in records
        if r.ngs_success and not r.error_tag and r.delta_x_db is not None
    ]


def simulate(cfg, workers=1, keep_states=0):
    """Full two-phase run. Returns (params, distribution, records, states, report)."""
    params = solve_for_config(cfg)
    distribution = photon_distribution(params, n_cap=max(cfg.n_max, DEFAULT_N_CAP))
    count_stats = count_phase(cfg, distribution)
    records, states = conditioned_phase(cfg, params, distribution, workers=workers,
                                        keep_states=keep_states)
    report = estimate(cfg, distribution, records, count_stats)
    return params, distribution, records, states, report


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, float) and math.isnan(v):
        return "nan"
    return f"{v:.12g}" if isinstance(v, float) else str(v)


def records_to_csv(records, path):
    """One row per trial, semicolon-joined sequence fields, stable formatting."""
    cols = (
        "trial_id,n_counts,accepted_idx,ngs_success,x_m,sigma,x0,p0,"
        "delta_x_db,delta_p_db,success,error_tag"
    )
    with open(path, "w", encoding="ascii") as fh:
        fh.write(cols + "\n")
        for r in records:
            row = [
                str(r.trial_id),
                ";".join(str(c) for c in r.counts),
                ";".join(str(i) for i in r.accepted),
                _fmt(r.ngs_success),
                ";".join(_fmt(float(v)) for v in r.outcomes),
                _fmt(r.sigma),
                _fmt(r.x0),
                _fmt(r.p0),
                _fmt(r.delta_x_db),
                _fmt(r.delta_p_db),
                _fmt(r.success),
                r.error_tag,
            ]
            fh.write(",".join(row) + "\n")
