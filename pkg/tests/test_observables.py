import math

import numpy as np
import pytest

from magnonblockade.dynamics import build_liouvillian, evolve, steady_state
from magnonblockade.hilbert import DensityMatrix, HilbertSpace, dagger, fock_annihilation
from magnonblockade.model import MHZ, SystemParams, build_h_eff, collapse_channels
from magnonblockade.observables import (
    UndefinedCorrelationError,
    g2_from_populations,
    g2_time_series,
    g2_zero,
    partial_trace_qubit,
    populations,
)


def composite_dm(matrix, n):
    return DensityMatrix(np.asarray(matrix, dtype=complex), HilbertSpace(n), True)


def magnon_dm(matrix, n):
    return DensityMatrix(np.asarray(matrix, dtype=complex), HilbertSpace(n), False)


def vacuum(p):
    d = p.space.total_dim
    rho = np.zeros((d, d), dtype=complex)
    rho[0, 0] = 1.0
    return DensityMatrix(rho, p.space, True)


def fig2a_params(**kwargs):
    base = dict(J=20.0 * MHZ, Delta_plus=20.0 * MHZ, Omega_m=0.1 * MHZ,
                Omega_q=0.1 * MHZ, kappa_m=1.0 * MHZ, kappa_q=1.0 * MHZ)
    base.update(kwargs)
    return SystemParams.from_detunings(**base)


def coherent_magnon(alpha, n):
    amps = np.array([
        math.exp(-abs(alpha) ** 2 / 2) * alpha**k / math.sqrt(math.factorial(k))
        for k in range(n)
    ], dtype=complex)
    return magnon_dm(np.outer(amps, amps.conj()), n)


def thermal_magnon(m_th, n):
    weights = (m_th / (1.0 + m_th)) ** np.arange(n) / (1.0 + m_th)
    weights /= weights.sum()
    return magnon_dm(np.diag(weights), n)


class TestPartialTrace:
    def test_product_state(self):
        n = 4
        rng = np.random.default_rng(31)
        a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        sigma = a @ a.conj().T
        sigma /= np.trace(sigma)
        excited = np.diag([0.0, 1.0]).astype(complex)
        rho = composite_dm(np.kron(excited, sigma), n)
        reduced = partial_trace_qubit(rho)
        assert not reduced.composite
        assert np.abs(reduced.matrix - sigma).max() <= 1e-14

    def test_maximally_entangled_pair(self):
        n = 4
        psi = np.zeros(2 * n, dtype=complex)
        psi[0] = 1 / math.sqrt(2)      # |g,0>
        psi[n + 1] = 1 / math.sqrt(2)  # |e,1>
        rho = composite_dm(np.outer(psi, psi.conj()), n)
        reduced = partial_trace_qubit(rho)
        assert np.allclose(np.diag(reduced.matrix).real, [0.5, 0.5, 0.0, 0.0], atol=1e-14)
        assert np.abs(reduced.matrix - np.diag(np.diag(reduced.matrix))).max() <= 1e-14

    def test_commutes_with_magnon_observables(self):
        n = 5
        rng = np.random.default_rng(33)
        a = rng.normal(size=(2 * n, 2 * n)) + 1j * rng.normal(size=(2 * n, 2 * n))
        rho_mat = a @ a.conj().T
        rho_mat /= np.trace(rho_mat)
        rho = composite_dm(rho_mat, n)
        m = fock_annihilation(HilbertSpace(n))
        n_op = dagger(m) @ m
        full = np.trace(rho.matrix @ np.kron(np.eye(2), n_op))
        reduced = np.trace(partial_trace_qubit(rho).matrix @ n_op)
        assert abs(full - reduced) <= 1e-12

    def test_rejects_already_reduced(self):
        with pytest.raises(ValueError):
            partial_trace_qubit(magnon_dm(np.eye(4) / 4, 4))


class TestPopulations:
    def test_sum_to_one_and_nonnegative(self):
        p = fig2a_params()
        rho = steady_state(build_liouvillian(build_h_eff(p), collapse_channels(p)))
        pops = populations(rho)
        assert pops.sum() == pytest.approx(1.0, abs=1e-8)
        assert pops.min() >= -1e-9


class TestG2Zero:
    def test_single_fock_state(self):
        n = 5
        rho = np.zeros((n, n))
        rho[1, 1] = 1.0
        assert g2_zero(magnon_dm(rho, n)) == 0.0

    def test_coherent_state_poissonian(self):
        assert g2_zero(coherent_magnon(0.3, 20)) == pytest.approx(1.0, abs=1e-6)

    def test_thermal_state_bunching(self):
        # geometric-distribution moments give exactly 2 in the untruncated limit
        assert g2_zero(thermal_magnon(0.1, 20)) == pytest.approx(2.0, abs=1e-6)

    def test_thermal_dissipator_steady_state(self):
        # the m_th dissipator alone relaxes the mode to the thermal state
        n = 20
        space = HilbertSpace(n)
        m = fock_annihilation(space)
        kappa, m_th = 1.0 * MHZ, 0.1
        channels = [(kappa * (m_th + 1), m), (kappa * m_th, dagger(m))]
        rho = steady_state(build_liouvillian(np.zeros_like(m), channels),
                           space=space, composite=False)
        assert g2_zero(rho) == pytest.approx(2.0, abs=1e-6)

    def test_vacuum_raises(self):
        n = 4
        rho = np.zeros((n, n))
        rho[0, 0] = 1.0
        with pytest.raises(UndefinedCorrelationError):
            g2_zero(magnon_dm(rho, n))

    def test_invariant_under_number_dephasing(self):
        n = 8
        rng = np.random.default_rng(37)
        a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        rho = a @ a.conj().T
        rho /= np.trace(rho)
        base = g2_zero(magnon_dm(rho, n))
        for theta in rng.uniform(0, 2 * math.pi, size=5):
            u = np.diag(np.exp(1j * theta * np.arange(n)))
            rotated = u @ rho @ u.conj().T
            assert g2_zero(magnon_dm(rotated, n)) == pytest.approx(base, rel=1e-12)

    def test_composite_equals_reduced(self):
        p = fig2a_params()
        rho = steady_state(build_liouvillian(build_h_eff(p), collapse_channels(p)))
        assert g2_zero(rho) == pytest.approx(g2_zero(partial_trace_qubit(rho)), rel=1e-12)

    def test_single_excitation_support_is_zero(self):
        n = 6
        rho = np.diag([0.7, 0.3, 0, 0, 0, 0]).astype(complex)
        rho[0, 1] = rho[1, 0] = 0.2
        assert g2_zero(magnon_dm(rho, n)) == 0.0

    def test_on_composite_flag_consistency(self):
        p = fig2a_params()
        rho = steady_state(build_liouvillian(build_h_eff(p), collapse_channels(p)))
        assert g2_zero(rho, on_composite=True) == g2_zero(rho)
        with pytest.raises(ValueError, match="on_composite"):
            g2_zero(rho, on_composite=False)


class TestG2TimeSeries:
    def test_asymptote_at_resonant_coupling(self):
        p = fig2a_params()
        kappa = p.kappa_m
        t_grid = np.linspace(0.0, 30.0 / kappa, 61)
        traj = evolve(vacuum(p), p, t_grid)
        series = g2_time_series(traj)
        tail = [g2 for t, g2 in series if kappa * t >= 20.0]
        assert all(math.log10(v) == pytest.approx(-2.0, abs=0.2) for v in tail)

    def test_bunching_asymptote_above_one(self):
        p = fig2a_params(Delta_plus=0.7 * 20.0 * MHZ)
        kappa = p.kappa_m
        traj = evolve(vacuum(p), p, np.linspace(0.0, 30.0 / kappa, 31))
        series = g2_time_series(traj)
        assert series[-1][1] > 1.0

    def test_constant_input_gives_constant_series(self):
        p = fig2a_params()
        rho_ss = steady_state(build_liouvillian(build_h_eff(p), collapse_channels(p)))
        traj = evolve(rho_ss, p, np.linspace(0.0, 2.0 / p.kappa_m, 9))
        series = g2_time_series(traj)
        values = [g2 for _, g2 in series]
        assert max(values) - min(values) <= 1e-6 * values[0]

    def test_undefined_points_become_gaps(self):
        p = fig2a_params(Omega_m=0.0, Omega_q=0.0)
        traj = evolve(vacuum(p), p, np.linspace(0.0, 1.0 / p.kappa_m, 5))
        series = g2_time_series(traj)
        assert all(math.isnan(g2) for _, g2 in series)


class TestG2FromPopulations:
    def test_single_excitation_limit(self):
        eps = 1e-3
        assert g2_from_populations([1 - eps, eps, 0.0, 0.0]) == 0.0

    def test_poissonian_populations(self):
        # oracle: 2 (e^-L L^2/2) / (e^-L L)^2 = e^L at L = |alpha|^2
        lam = 0.01
        pops = np.exp(-lam) * lam ** np.arange(10) / [math.factorial(k) for k in range(10)]
        value = g2_from_populations(pops)
        assert value == pytest.approx(math.exp(lam), rel=1e-10)
        assert value == pytest.approx(1.0, abs=0.011)

    def test_matches_full_correlation_at_optimal_point(self):
        p = SystemParams.from_detunings(
            J=35.0 * MHZ, Delta_plus=35.0 * MHZ, Omega_m=0.033 * MHZ,
            Omega_q=0.099 * MHZ, kappa_m=0.5 * MHZ, kappa_q=0.5 * MHZ)
        rho = steady_state(build_liouvillian(build_h_eff(p), collapse_channels(p)))
        approx = g2_from_populations(populations(rho))
        assert approx == pytest.approx(g2_zero(rho), rel=0.05)

    def test_vanishing_p1_raises(self):
        with pytest.raises(UndefinedCorrelationError):
            g2_from_populations([1.0, 0.0, 0.0])
