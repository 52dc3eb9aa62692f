import numpy as np
import pytest

import lvpoisson as lv
from lvpoisson import (
    SingularFormula,
    delta_analytic_eigenvalues,
    delta_spectral_matrix,
    drift_report,
    linearize,
    lyapunov_eigenvector,
    lyapunov_tangent_basis,
    principal_angles,
    resonance_search,
    se_modified_hamiltonian,
    se_time_dependent_hamiltonian,
    simulate,
    spectrum,
)
from lvpoisson.trajectory import Trajectory


def _match_eigs(got, expected):
    """Max distance from each expected eigenvalue to its nearest computed one."""
    return max(np.min(np.abs(np.asarray(got) - w)) for w in expected)


class TestLinearize:
    def test_equilibrium_jacobian_is_scaled_interaction_matrix(self, corpus):
        # the diagonal growth term vanishes at q, leaving diag(q) A
        for name, sys in corpus.items():
            M = linearize(sys, sys.q)
            np.testing.assert_allclose(M, np.diag(sys.q) @ sys.A, atol=1e-13, err_msg=name)

    def test_zero_interaction_zero_eps(self):
        sys = lv.build_system(np.zeros((3, 3)), np.zeros(3))
        np.testing.assert_array_equal(linearize(sys, sys.q), np.zeros((3, 3)))

    def test_finite_difference_agreement(self, corpus, rng):
        step = 1e-6
        for name, sys in corpus.items():
            for _ in range(20):
                x = rng.uniform(0.5, 3.0, size=sys.dim)
                M = linearize(sys, x)
                for k in range(sys.dim):
                    e = np.zeros(sys.dim)
                    e[k] = step
                    fd = (lv.vector_field(sys, x + e) - lv.vector_field(sys, x - e)) / (
                        2 * step
                    )
                    np.testing.assert_allclose(M[:, k], fd, atol=1e-6, err_msg=name)

    def test_zero_trace_at_equilibrium(self, corpus):
        for name, sys in corpus.items():
            assert abs(np.trace(linearize(sys, sys.q))) <= 1e-10, name


class TestSpectrum:
    def test_harmonic_oscillator_pair(self):
        rep = spectrum(np.array([[0.0, 1.0], [-1.0, 0.0]]))
        assert _match_eigs(rep.eigenvalues, [1j, -1j]) <= 1e-12
        assert rep.elliptic
        assert rep.zero_count == 0

    def test_delta_zero_closed_form(self):
        rep = spectrum(delta_spectral_matrix(0.0))
        expected = [0.0, 1j, -1j, 1j * np.sqrt(3), -1j * np.sqrt(3)]
        assert _match_eigs(rep.eigenvalues, expected) <= 1e-10
        assert rep.zero_count == 1
        assert rep.elliptic

    @pytest.mark.parametrize("delta", [0.0, 1e-3, 1e-2, 1e-1])
    def test_analytic_numeric_agreement(self, delta):
        rep = spectrum(delta_spectral_matrix(delta))
        assert _match_eigs(rep.eigenvalues, delta_analytic_eigenvalues(delta)) <= 1e-10

    def test_conjugate_closure(self, corpus):
        for name, sys in corpus.items():
            w = spectrum(linearize(sys, sys.q)).eigenvalues
            assert _match_eigs(w, np.conj(w)) <= 1e-10, name

    def test_zero_count_matches_kernel(self, corpus):
        for name, sys in corpus.items():
            rep = spectrum(linearize(sys, sys.q))
            assert rep.zero_count == len(lv.casimir_basis(sys)), name

    def test_delta_ellipticity(self):
        rep = spectrum(delta_spectral_matrix(1e-2))
        assert rep.elliptic

    def test_hyperbolic_not_elliptic(self):
        rep = spectrum(np.array([[1.0, 0.0], [0.0, -1.0]]))
        assert not rep.elliptic


class TestResonanceSearch:
    def test_irrational_pair_has_no_relation(self):
        assert resonance_search(np.array([1.0, np.sqrt(3.0)]), 100) is None

    def test_exact_double(self):
        np.testing.assert_array_equal(resonance_search(np.array([1.0, 2.0]), 100), [2, -1])

    def test_equal_frequencies(self):
        np.testing.assert_array_equal(resonance_search(np.array([1.0, 1.0]), 100), [1, -1])

    def test_complex_eigenvalue_input(self):
        w = np.array([1j, -1j, 2j, -2j])
        rel = resonance_search(w, 10)
        # frequencies are reported in descending order (2, 1)
        np.testing.assert_array_equal(rel, [1, -2])

    def test_three_frequencies(self):
        om = np.array([1.0, 2.0, 5.0])
        rel = resonance_search(om, 10)
        assert rel is not None
        assert np.any(rel != 0)
        assert abs(rel @ om) <= 1e-9 * np.linalg.norm(rel)

    def test_three_frequencies_irrational(self):
        assert resonance_search(np.array([1.0, np.sqrt(2), np.sqrt(3)]), 40) is None

    def test_bound_validation(self):
        with pytest.raises(ValueError):
            resonance_search(np.array([1.0, 2.0]), 10**7)

    def test_via_spectrum_report(self):
        rep = spectrum(delta_spectral_matrix(0.0), resonance_max_coeff=50)
        # sqrt(3) vs 1: no integer relation within the bound
        assert rep.resonance is None
        assert rep.resonance_bound == 50


class TestLyapunovEigenvector:
    @pytest.mark.parametrize("delta", [1e-4, 1e-3, 1e-2, 1e-1])
    @pytest.mark.parametrize("branch", [1, 3])
    def test_residual(self, delta, branch):
        lam = delta_analytic_eigenvalues(delta)[branch]
        x = lyapunov_eigenvector(delta, lam)
        M = delta_spectral_matrix(delta)
        resid = np.linalg.norm((M - lam * np.eye(5)) @ x, np.inf)
        assert resid <= 1e-9 * np.linalg.norm(x, np.inf)

    def test_fast_branch_plane_limit(self):
        # tangent planes approach the triple-block plane spanned by
        # (1,-2,-1,0,0) and (1,0,1,0,0); the e4/e5 content decays like delta
        target = np.stack([[1, -2, -1, 0, 0], [1, 0, 1, 0, 0]], axis=1).astype(float)
        angles = []
        for delta in (1e-2, 1e-3, 1e-4):
            tb = lyapunov_tangent_basis(delta, branch=1)
            ang = principal_angles(tb.plane(), target)
            angles.append(np.max(ang))
        assert angles[0] > angles[1] > angles[2]
        assert angles[2] <= 1e-3

    def test_slow_branch_limit_is_planar_pair_plane(self):
        target = np.stack([[0, 0, 0, 1, 0], [0, 0, 0, 0, 1]], axis=1).astype(float)
        tb = lyapunov_tangent_basis(1e-4, branch=2)
        assert np.max(principal_angles(tb.plane(), target)) <= 1e-3

    def test_delta_zero_slow_pair_limit(self):
        x = lyapunov_eigenvector(0.0, 1j)
        M = delta_spectral_matrix(0.0)
        resid = np.linalg.norm((M - 1j * np.eye(5)) @ x, np.inf)
        assert resid <= 1e-12
        plane = np.stack([np.real(x), np.imag(x)], axis=1)
        target = np.stack([[0, 0, 0, 1, 0], [0, 0, 0, 0, 1]], axis=1).astype(float)
        assert np.max(principal_angles(plane, target)) <= 1e-12

    def test_pole_rejected_for_nonzero_delta(self):
        with pytest.raises(SingularFormula):
            lyapunov_eigenvector(1e-2, 1j)

    def test_scales_with_published_normalization(self):
        # second component is delta + lambda^2 + 1; fourth is -delta*lambda
        delta = 1e-2
        lam = delta_analytic_eigenvalues(delta)[1]
        x = lyapunov_eigenvector(delta, lam)
        assert x[1] == pytest.approx(delta + lam**2 + 1)
        assert x[3] == pytest.approx(-delta * lam)


class TestSEModifiedHamiltonian:
    def test_h_one(self):
        rep = se_modified_hamiltonian(1.0)
        assert rep.char_poly == pytest.approx((1.0, 0.0, 0.75))
        assert rep.elliptic
        assert rep.quad == pytest.approx((0.5, 0.5, -0.5))

    def test_boundary(self):
        rep = se_modified_hamiltonian(2.0)
        assert rep.char_poly[2] == pytest.approx(0.0, abs=1e-15)
        assert not rep.elliptic

    def test_above_boundary(self):
        assert not se_modified_hamiltonian(2.001).elliptic

    @pytest.mark.parametrize("h", [0.1, 0.5, 1.0, 1.5, 1.999, 2.0, 2.001, 3.0])
    def test_flag_matches_sign(self, h):
        rep = se_modified_hamiltonian(h)
        assert rep.elliptic == (1.0 - h * h / 4.0 > 0.0)

    def test_positive_step_required(self):
        with pytest.raises(ValueError):
            se_modified_hamiltonian(0.0)


class TestSETimeDependentHamiltonian:
    def test_initial_time(self, rng):
        for _ in range(10):
            u, v = rng.normal(size=2)
            assert se_time_dependent_hamiltonian(u, v, 0.0) == pytest.approx(
                0.5 * (u * u + v * v)
            )

    def test_substitution(self):
        assert se_time_dependent_hamiltonian(1.0, 1.0, 1.0) == pytest.approx(-1.5)

    def test_origin(self):
        assert se_time_dependent_hamiltonian(0.0, 0.0, 3.7) == 0.0


class TestDriftReport:
    def test_constant_column(self):
        n = 50
        traj = Trajectory(
            times=np.arange(n, dtype=float),
            states=np.ones((n, 2)),
            diagnostics={"H": np.full(n, 4.2)},
        )
        stats = drift_report(traj)["H"]
        assert stats.max_abs_dev == 0.0
        assert stats.slope == 0.0

    def test_secular_contrast(self, sys5):
        x0 = np.full(5, 2.0)
        hp = simulate(sys5, "hp1", x0, 0.1, 2000)
        rk = simulate(sys5, "rk4_fixed", x0, 0.1, 2000)
        s_hp = drift_report(hp)["H"]
        s_rk = drift_report(rk)["H"]
        assert abs(s_hp.slope) <= 3.0 * s_hp.slope_sigma
        assert abs(s_rk.slope) >= 10.0 * abs(s_hp.slope)

    def test_casimir_column_flat(self, sys5):
        traj = simulate(sys5, "hp1", np.full(5, 2.0), 1.0, 100)
        assert drift_report(traj)["C1"].max_abs_dev <= 1e-9

    def test_nonfinite_tail_restricts_fit(self):
        col = np.array([1.0, 1.1, 0.9, 1.05, np.nan, np.nan])
        traj = Trajectory(
            times=np.arange(6, dtype=float),
            states=np.ones((6, 1)),
            diagnostics={"H": col},
        )
        stats = drift_report(traj)["H"]
        assert stats.n_used == 4
        assert np.isfinite(stats.slope)

    def test_skips_solver_columns(self, sys5):
        traj = simulate(sys5, "hp1", np.full(5, 2.0), 0.5, 10)
        report = drift_report(traj)
        assert "stage_iters" not in report
        assert set(report) == {"H", "C1", "I1", "I2"}

    def test_empty_rejected(self):
        traj = Trajectory(
            times=np.array([0.0]), states=np.ones((1, 1)), diagnostics={}
        )
        assert len(drift_report(traj)) == 0
