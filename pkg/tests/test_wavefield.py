import math

import numpy as np
import pytest

from gkpsim import (
    ConfigurationError,
    DegenerateStateError,
    GridOverflowError,
    GridSpec,
    GridWavefunction,
    displace_p,
    displace_x,
    eval_at,
    fidelity,
    hermite_phi,
    inner_product,
    normalize,
    squeeze,
    to_momentum,
    to_position,
)
from gkpsim.wavefield import dump_csv, from_samples, tail_mass


def second_moment(psi):
    return float(np.sum(psi.grid.x ** 2 * np.abs(psi.values) ** 2) * psi.grid.dx)


class TestGridSpec:
    def test_momentum_extent(self):
        g = GridSpec(half_width=25.0, points=4096)
        assert g.p[-1] == pytest.approx(math.pi * 4096 / 50 - g.dp)
        assert g.dx == pytest.approx(50.0 / 4096)

    def test_rejects_bad_sizes(self):
        with pytest.raises(ConfigurationError):
            GridSpec(points=1000)
        with pytest.raises(ConfigurationError):
            GridSpec(half_width=-1.0)


class TestNormalize:
    def test_constant_on_subinterval(self):
        g = GridSpec(half_width=25.0, points=1024)
        vals = np.where(np.abs(g.x) <= 1.0, 1.0, 0.0)
        state, nrm = normalize(GridWavefunction(g, vals))
        assert nrm == pytest.approx(math.sqrt(2.0), rel=1e-2)
        peak = np.max(np.abs(state.values))
        assert peak == pytest.approx(1 / math.sqrt(2.0), rel=1e-2)

    def test_already_normalized(self, grid):
        state = from_samples(grid, hermite_phi(0, grid.x))
        _, nrm = normalize(state)
        assert nrm == pytest.approx(1.0, abs=1e-10)

    def test_linearity(self, grid):
        vals = 2.0 * hermite_phi(5, grid.x)
        _, nrm = normalize(GridWavefunction(grid, vals))
        assert nrm == pytest.approx(2.0, abs=1e-9)

    def test_zero_state_raises(self, grid):
        with pytest.raises(DegenerateStateError):
            normalize(GridWavefunction(grid, np.zeros(grid.points)))


class TestMomentumTransform:
    def test_vacuum_self_fourier(self, grid, number_state):
        psi = number_state(0)
        psit = to_momentum(psi)
        ref = hermite_phi(0, grid.p)
        overlap = np.sum(np.conj(ref) * psit.values) * grid.dp
        assert abs(overlap) ** 2 > 1 - 1e-10

    @pytest.mark.parametrize("n", [1, 2, 3, 5])
    def test_eigenfunction_phase(self, grid, number_state, n):
        # phi_n maps to (-i)^n phi_n including the phase
        psit = to_momentum(number_state(n))
        ref = (-1j) ** n * hermite_phi(n, grid.p)
        overlap = np.sum(np.conj(ref) * psit.values) * grid.dp
        assert overlap.real > 1 - 1e-8
        assert abs(overlap.imag) < 1e-8

    def test_round_trip(self, grid, number_state):
        psi = number_state(7)
        back = to_position(to_momentum(psi))
        assert fidelity(GridWavefunction(grid, back.values), psi) > 1 - 1e-10

    def test_parseval(self, grid, number_state):
        psi = number_state(12)
        psit = to_momentum(psi)
        nx = np.sum(np.abs(psi.values) ** 2) * grid.dx
        np_ = np.sum(np.abs(psit.values) ** 2) * grid.dp
        assert nx == pytest.approx(np_, abs=1e-10)

    def test_scaling_theorem(self, grid, number_state):
        # squeeze then transform equals transform then inverse squeeze;
        # the latter written analytically: (-i)^2 sqrt(1/sigma) phi_2(p/sigma)
        psi = number_state(2)
        sigma = 1.7
        lhs = to_momentum(squeeze(psi, sigma))
        vals = (-1j) ** 2 * np.sqrt(1 / sigma) * hermite_phi(2, grid.p / sigma)
        overlap = np.abs(np.sum(np.conj(vals) * lhs.values) * grid.dp) ** 2
        assert overlap > 1 - 1e-8


class TestGaussianOps:
    def test_squeeze_identity(self, grid, number_state):
        psi = number_state(0)
        assert fidelity(squeeze(psi, 1.0), psi) > 1 - 1e-12

    def test_squeeze_vacuum_second_moment(self, grid, number_state):
        out = squeeze(number_state(0), 2.0)
        assert second_moment(out) == pytest.approx(1.0 / 8.0, rel=1e-6)

    def test_squeeze_phi1_widening(self, grid, number_state):
        # <x^2> of phi_1 is 3/2; widening by sigma=0.5 scales it by 4
        out = squeeze(number_state(1), 0.5)
        assert second_moment(out) == pytest.approx(6.0, rel=1e-6)

    def test_squeeze_preserves_norm(self, grid, number_state):
        out = squeeze(number_state(3), 1.3)
        assert out.norm() == pytest.approx(1.0, abs=1e-8)

    def test_squeeze_overflow_guard(self, grid, number_state):
        wide = squeeze(number_state(0), 0.2)  # still fine
        with pytest.raises(GridOverflowError):
            squeeze(wide, 0.01)

    def test_displace_x_mean(self, grid, number_state):
        d = math.sqrt(math.pi / 2)
        out = displace_x(number_state(0), d)
        mean = np.sum(grid.x * np.abs(out.values) ** 2) * grid.dx
        assert mean == pytest.approx(d, abs=1e-8)

    def test_displace_p_leaves_density(self, grid, number_state):
        d = math.sqrt(math.pi / 2)
        psi = number_state(0)
        out = displace_p(psi, d)
        assert np.allclose(np.abs(out.values), np.abs(psi.values))
        psit = to_momentum(out)
        mean_p = np.sum(grid.p * np.abs(psit.values) ** 2) * grid.dp
        assert mean_p == pytest.approx(d, abs=1e-8)

    def test_displace_p_zero_is_identity(self, grid, number_state):
        psi = number_state(4)
        out = displace_p(psi, 0.0)
        assert np.array_equal(out.values, psi.values)


class TestInnerProduct:
    def test_self_overlap(self, grid, number_state):
        assert fidelity(number_state(2), number_state(2)) == pytest.approx(1.0, abs=1e-10)

    def test_orthogonality(self, grid, number_state):
        assert fidelity(number_state(2), number_state(3)) == pytest.approx(0.0, abs=1e-8)

    def test_displaced_gaussian_overlap(self, grid, number_state):
        # analytic: <phi_0 | phi_0 shifted by d> = exp(-d^2/4)
        psi = number_state(0)
        val = inner_product(psi, displace_x(psi, 1.0))
        assert val.real == pytest.approx(math.exp(-0.25), rel=1e-7)
        assert abs(val.imag) < 1e-12

    def test_mismatched_grids_rejected(self, grid, small_grid):
        a = from_samples(grid, hermite_phi(0, grid.x))
        b = from_samples(small_grid, hermite_phi(0, small_grid.x))
        with pytest.raises(ConfigurationError):
            inner_product(a, b)


class TestEvalAt:
    def test_grid_nodes_exact(self, grid, number_state):
        psi = number_state(0)
        got = eval_at(psi, grid.x[10:20])
        assert np.allclose(got, psi.values[10:20], atol=1e-12)

    def test_half_step_offsets_match_analytic(self, grid, number_state):
        psi = number_state(0)
        pts = grid.x[1000:3000] + 0.5 * grid.dx
        ref = hermite_phi(0, pts)
        assert np.max(np.abs(eval_at(psi, pts) - ref)) < 1e-6

    def test_oscillatory_midpoints_against_recurrence(self, grid, number_state):
        psi = number_state(20)
        pts = grid.x[1000:3000] + 0.5 * grid.dx
        ref = hermite_phi(20, pts)
        assert np.max(np.abs(eval_at(psi, pts) - ref)) < 1e-5

    def test_out_of_range_raises(self, grid, number_state):
        with pytest.raises(GridOverflowError):
            eval_at(number_state(0), np.array([grid.half_width + 1.0]))


def test_tail_mass_small_for_vacuum(grid, number_state):
    assert tail_mass(number_state(0)) < 1e-10


def test_dump_csv_round_trip(tmp_path, grid, number_state):
    psi = number_state(1)
    path = tmp_path / "state.csv"
    dump_csv(psi, path)
    data = np.loadtxt(path, delimiter=",", skiprows=1)
    assert data.shape == (grid.points, 3)
    assert np.allclose(data[:, 0], grid.x, atol=1e-9)
    assert np.allclose(data[:, 1] + 1j * data[:, 2], psi.values, atol=1e-9)
