import math

import numpy as np
import pytest

from gkpsim import (
    ConfigurationError,
    GpsParams,
    adaptive_breeding_input,
    fidelity,
    hermite_phi,
    p_ngs,
    photon_distribution,
    solve_params,
    two_mode_conditional,
)
from gkpsim.gps import heralded_state_approx, heralded_state_exact, oscillation_scale
from gkpsim.specfun import comb_wavenumber
from gkpsim.wavefield import from_samples

SQRT_2PI = math.sqrt(2 * math.pi)


def db_to_r(db):
    return db * math.log(10) / 20.0


@pytest.fixture(scope="module")
def row1_params():
    # acceptance-window (10, 20), envelope exponent 1.3, five-fold breeding
    return solve_params(1.3, 5, 10, 20)


class TestGpsParams:
    def test_coefficients(self):
        p = GpsParams(r=1.0, transmittance=0.4)
        assert p.a == pytest.approx(0.4 * math.exp(-2) + 0.6 * math.exp(2))
        assert p.b == pytest.approx(math.sqrt(0.24) * (math.exp(-2) - math.exp(2)))
        assert p.b < 0
        assert p.reflectance == pytest.approx(0.6)

    def test_input_squeezing_db(self):
        p = GpsParams(r=db_to_r(17.7), transmittance=0.1)
        assert p.input_squeezing_db == pytest.approx(17.7, abs=1e-9)

    def test_rejects_bad_transmittance(self):
        with pytest.raises(ConfigurationError):
            GpsParams(r=1.0, transmittance=1.0)


class TestPhotonDistribution:
    @pytest.mark.parametrize("r", [0.5, 1.0, 1.5])
    def test_epr_law_at_balanced_splitter(self, r):
        # T = 1/2 makes the unit an EPR source: P(n) = tanh^2n(r)/cosh^2(r)
        dist = photon_distribution(GpsParams(r=r, transmittance=0.5), n_cap=30)
        n = np.arange(21)
        law = np.tanh(r) ** (2 * n) / np.cosh(r) ** 2
        assert np.max(np.abs(dist[:21] - law)) < 1e-6

    def test_vacuum_input_all_in_zero(self):
        dist = photon_distribution(GpsParams(r=0.0, transmittance=0.5), n_cap=10)
        assert dist[0] == pytest.approx(1.0, abs=1e-9)
        assert np.all(dist[1:] < 1e-12)

    def test_total_mass_bounded(self, row1_params):
        dist = photon_distribution(row1_params, n_cap=60)
        assert dist.sum() <= 1 + 1e-9

    def test_window_sum_row1(self, row1_params):
        assert p_ngs(row1_params, 10, 20) == pytest.approx(0.19, abs=0.02)

    def test_window_sum_widest_row(self):
        pars = solve_params(1.4, 5, 6, 40)
        assert p_ngs(pars, 6, 40) == pytest.approx(0.46, abs=0.03)

    def test_completeness_window(self, row1_params):
        # the heavily squeezed detected port has a long count tail; the window
        # sum approaches unity once the cap clears it
        dist = photon_distribution(row1_params, n_cap=250, points=2048)
        assert float(dist.sum()) == pytest.approx(1.0, abs=1e-3)
        assert float(dist.sum()) <= 1 + 1e-9


class TestHeraldedStates:
    def test_balanced_high_squeezing_heralds_fock(self, grid):
        pars = GpsParams(r=2.0, transmittance=0.5)
        psi = heralded_state_exact(pars, 3, grid)
        ref = from_samples(grid, hermite_phi(3, grid.x))
        assert fidelity(psi, ref) > 0.99

    def test_zero_count_is_gaussian(self, grid, row1_params):
        psi = heralded_state_exact(row1_params, 0, grid)
        dens = np.abs(psi.values) ** 2
        # no nodes in the supported region, peak at the origin
        body = psi.values.real[dens > 1e-12 * dens.max()]
        assert np.all(np.sign(body) == np.sign(body[0]))
        assert dens[grid.points // 2] == pytest.approx(dens.max(), rel=1e-6)

    @pytest.mark.parametrize("n", [2, 5, 11])
    def test_parity(self, grid, row1_params, n):
        # x_j = -L + j dx is half open; the exact reflection is j -> (G-j) % G
        psi = heralded_state_exact(row1_params, n, grid)
        reflected = np.roll(psi.values[::-1], 1)
        overlap = np.sum(np.conj(reflected) * psi.values) * grid.dx
        assert overlap.real == pytest.approx((-1) ** n, abs=1e-6)

    def test_exact_matches_approx_at_high_squeezing(self, grid):
        pars = GpsParams(r=db_to_r(18.7), transmittance=5 * math.exp(-2 * db_to_r(18.7)) / 1.4)
        exact = heralded_state_exact(pars, 10, grid)
        approx = heralded_state_approx(pars, 10, grid)
        assert fidelity(exact, approx) > 0.99

    def test_exact_matches_eq5_form_row1(self, grid, row1_params):
        exact = heralded_state_exact(row1_params, 20, grid)
        approx = heralded_state_approx(row1_params, 20, grid)
        assert fidelity(exact, approx) > 0.99

    def test_approx_warns_at_low_squeezing(self, grid):
        with pytest.warns(UserWarning):
            heralded_state_approx(GpsParams(r=0.5, transmittance=0.5), 2, grid)

    @pytest.mark.parametrize("n", [0, 1, 5, 12, 20])
    def test_circuit_consistency(self, grid, row1_params, n):
        # conditional amplitude of the explicit two-mode state vs closed form
        x1, amp = two_mode_conditional(row1_params, n, points=1024)
        dx1 = x1[1] - x1[0]
        from gkpsim.gps import _heralded_samples

        ref = _heralded_samples(row1_params, n, x1)
        ref = ref / math.sqrt(np.sum(ref ** 2) * dx1)
        fid = (np.sum(ref * amp) * dx1) ** 2
        assert fid > 0.999


class TestSolveParams:
    def test_row1_squeezing_and_envelope(self, row1_params):
        assert row1_params.input_squeezing_db == pytest.approx(17.7, abs=0.5)
        assert row1_params.envelope_exponent == pytest.approx(1.3 / 5, abs=1e-12)

    def test_row3_squeezing(self):
        pars = solve_params(1.4, 5, 10, 40)
        assert pars.input_squeezing_db == pytest.approx(19.4, abs=0.5)

    def test_infeasible_constraint_rejected(self):
        # envelope ratio 0.1 forces r > 1.15 for T < 1; capping r below that
        # leaves no feasible transmittance
        with pytest.raises(ConfigurationError):
            solve_params(0.5, 5, 0, 5, r_max=1.0)


class TestAdaptiveInputs:
    def test_even_count_not_displaced(self, grid, row1_params):
        psi = adaptive_breeding_input(row1_params, 20, 5, grid)
        dens = np.abs(psi.values) ** 2
        j = np.argmax(dens)
        lattice = SQRT_2PI / math.sqrt(5)
        assert abs(grid.x[j]) % lattice == pytest.approx(0.0, abs=0.02) or abs(
            grid.x[j]
        ) % lattice == pytest.approx(lattice, abs=0.02)

    def test_odd_count_lands_on_lattice_after_shift(self, grid, row1_params):
        lattice = SQRT_2PI / math.sqrt(5)
        psi = adaptive_breeding_input(row1_params, 19, 5, grid)
        dens = np.abs(psi.values) ** 2
        peaks = [
            grid.x[j]
            for j in range(1, grid.points - 1)
            if dens[j] > dens[j - 1] and dens[j] > dens[j + 1] and dens[j] > 0.5 * dens.max()
        ]
        for pk in peaks:
            offset = (pk + lattice / 2) % lattice - lattice / 2
            assert abs(offset) < 0.02 * lattice

    def test_oscillation_zero_crossings_align_across_counts(self, grid, row1_params):
        # zero crossings near the origin of different accepted counts agree
        # within 2 percent of half a lattice step
        lattice = SQRT_2PI / math.sqrt(5)

        def central_zeros(n):
            psi = adaptive_breeding_input(row1_params, n, 5, grid)
            v = psi.values.real
            flips = np.where(np.diff(np.sign(v)) != 0)[0]
            zs = grid.x[flips]
            return np.sort(zs[np.abs(zs) < 2 * lattice])

        z18 = central_zeros(18)
        z20 = central_zeros(20)
        assert z18.size == z20.size
        assert np.max(np.abs(z18 - z20)) < 0.02 * (lattice / 2)

    def test_oscillation_scale_close_to_ideal_ratio(self, row1_params):
        t_over_r = math.sqrt(row1_params.transmittance / row1_params.reflectance)
        assert oscillation_scale(row1_params) == pytest.approx(t_over_r, rel=1e-3)
