"""Time integration, perturbations, and outcome classification."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ptoligo.branches import (
    all_solutions,
    dimer_asymmetric,
    dimer_special_symmetric,
    dimer_symmetric,
    trimer_solutions,
)
from ptoligo.dynamics import (
    OUTCOME_BLOW_UP,
    OUTCOME_CONVERGED,
    OUTCOME_OSCILLATORY,
    OUTCOME_PRESERVED,
    IntegrationControls,
    classify_outcome,
    deviation_series,
    integrate,
    measured_growth_rate,
    perturb,
)
from ptoligo.errors import InvalidInputError
from ptoligo.linearize import spectrum_of
from ptoligo.model import Params, StateVector, total_power

from conftest import DIMER, TRIMER


def _conservative(topology="dimer"):
    return Params(
        epsilon=1.0, gamma=0.0, rho_r=-1.0, rho_im=0.0, E=1.0, topology=topology
    )


class TestControls:
    def test_defaults(self):
        c = IntegrationControls()
        assert c.rel_tol == 1e-10 and c.abs_tol == 1e-12
        assert c.blow_up_threshold == 1e6 and c.output_dt == 0.1

    def test_rejects_nonpositive(self):
        with pytest.raises(InvalidInputError):
            IntegrationControls(rel_tol=0.0)
        with pytest.raises(InvalidInputError):
            IntegrationControls(output_dt=-0.1)


class TestIntegrate:
    def test_sample_grid(self):
        state = StateVector(np.array([0.1 + 0j, 0.1j]), topology="dimer")
        traj = integrate(state, _conservative(), 1.05, IntegrationControls())
        assert traj.times[0] == 0.0
        assert traj.times[-1] == pytest.approx(1.05)
        inner = np.asarray(traj.times[1:-1])
        assert np.allclose(inner, 0.1 * np.round(inner / 0.1), atol=1e-12)

    def test_rejects_bad_horizon(self):
        state = StateVector(np.zeros(2, dtype=complex), topology="dimer")
        with pytest.raises(InvalidInputError):
            integrate(state, _conservative(), 0.0)

    def test_topology_mismatch(self):
        state = StateVector(np.zeros(3, dtype=complex), topology="trimer")
        with pytest.raises(InvalidInputError):
            integrate(state, _conservative(), 1.0)

    def test_conservative_power_drift(self):
        p = _conservative()
        state = StateVector(np.array([0.7 + 0.2j, -0.3 + 0.5j]), topology="dimer")
        traj = integrate(state, p, 100.0, IntegrationControls())
        powers = traj.site_powers.sum(axis=1)
        assert np.max(np.abs(powers - powers[0])) <= 1e-8

    def test_accuracy_against_tighter_tolerance(self):
        p = DIMER.with_gamma(0.7)
        sol = dimer_symmetric(p, "+")
        start = StateVector(
            sol.complex_amplitudes() * (1 + 1e-3), topology="dimer"
        )
        loose = integrate(start, p, 5.0, IntegrationControls())
        tight = integrate(
            start, p, 5.0, IntegrationControls(rel_tol=1e-12, abs_tol=1e-14)
        )
        gap = np.max(np.abs(loose.state_matrix() - tight.state_matrix()))
        assert gap < 1e-7

    def test_blow_up_terminates_early(self):
        p = DIMER.with_gamma(1.5)
        sol = dimer_asymmetric(p, "-")
        traj = integrate(perturb(sol, 1e-8, 1234), p, 20.0, IntegrationControls())
        assert traj.blow_up_time is not None
        assert traj.blow_up_time < 20.0
        assert traj.times[-1] == traj.blow_up_time
        assert traj.site_powers[-1].max() >= 1e6
        assert traj.outcome is not None
        assert traj.outcome.kind == OUTCOME_BLOW_UP


class TestPerturb:
    def test_deterministic_per_seed(self):
        p = DIMER.with_gamma(1.5)
        sol = dimer_asymmetric(p, "+")
        a = perturb(sol, 1e-6, 42)
        b = perturb(sol, 1e-6, 42)
        c = perturb(sol, 1e-6, 43)
        assert np.array_equal(a.sites, b.sites)
        assert not np.array_equal(a.sites, c.sites)

    def test_zero_amplitude_is_exact(self):
        p = DIMER.with_gamma(1.5)
        sol = dimer_asymmetric(p, "+")
        assert np.array_equal(
            perturb(sol, 0.0, 1).sites, sol.complex_amplitudes()
        )

    @settings(max_examples=20)
    @given(st.integers(min_value=0, max_value=2**31), st.floats(1e-12, 1e-2))
    def test_kick_is_bounded(self, seed, amplitude):
        p = TRIMER.with_gamma(1.5)
        sol = trimer_solutions(p)[0]
        kicked = perturb(sol, amplitude, seed)
        assert np.all(
            np.abs(kicked.sites - sol.complex_amplitudes()) <= amplitude + 1e-18
        )

    def test_negative_amplitude_rejected(self):
        p = DIMER.with_gamma(1.5)
        sol = dimer_asymmetric(p, "+")
        with pytest.raises(InvalidInputError):
            perturb(sol, -1e-8, 1)


class TestClassify:
    def test_stable_point_is_preserved(self):
        p = DIMER.with_gamma(1.5)
        sol = dimer_special_symmetric(p.with_energy(None), "-")
        traj = integrate(perturb(sol, 1e-8, 7), p, 50.0, IntegrationControls())
        out = classify_outcome(traj, all_solutions(p.with_energy(None)))
        assert out.kind == OUTCOME_PRESERVED

    def test_convergence_reports_target(self):
        p = DIMER.with_energy(None).with_gamma(1.5)
        sol = dimer_special_symmetric(p, "+")
        traj = integrate(perturb(sol, 1e-8, 42), p, 200.0, IntegrationControls())
        out = classify_outcome(traj, all_solutions(p))
        assert out.kind == OUTCOME_CONVERGED
        assert out.target_id == "dimer/asym-II/+"
        assert out.deviation_metric <= 1e-2

    def test_oscillatory_fallback(self):
        p = TRIMER.with_gamma(1.5)
        sol = trimer_solutions(p)[0]
        traj = integrate(perturb(sol, 1e-8, 21), p, 200.0, IntegrationControls())
        out = classify_outcome(traj, trimer_solutions(p))
        assert out.kind == OUTCOME_OSCILLATORY

    def test_blow_up_label_passes_through(self):
        p = DIMER.with_gamma(1.5)
        sol = dimer_asymmetric(p, "-")
        traj = integrate(perturb(sol, 1e-8, 1234), p, 20.0, IntegrationControls())
        out = classify_outcome(traj, all_solutions(p.with_energy(None)))
        assert out.kind == OUTCOME_BLOW_UP


class TestDeviation:
    def test_gauge_and_rotation_invariance(self):
        # the metric ignores the free global phase, so a trajectory that
        # just rotates at the propagation rate has zero deviation
        p = DIMER.with_gamma(1.2)
        sol = dimer_symmetric(p, "+")
        start = StateVector(sol.complex_amplitudes(), topology="dimer")
        traj = integrate(start, p, 10.0, IntegrationControls())
        dev = deviation_series(traj, sol)
        # the metric cancels catastrophically at zero, so its floor sits
        # near sqrt(machine epsilon)
        assert np.max(dev) < 1e-7

    def test_detects_real_displacement(self):
        p = DIMER.with_gamma(1.2)
        sol = dimer_symmetric(p, "+")
        other = dimer_symmetric(p, "-")
        start = StateVector(other.complex_amplitudes(), topology="dimer")
        traj = integrate(start, p, 1.0, IntegrationControls())
        dev = deviation_series(traj, sol)
        assert dev[0] > 0.1

    def test_growth_rate_matches_spectrum(self):
        p = DIMER.with_gamma(1.5)
        sol = dimer_asymmetric(p, "-")
        lam = spectrum_of(sol, p).max_growth_rate
        traj = integrate(perturb(sol, 1e-8, 7), p, 20.0, IntegrationControls())
        rate = measured_growth_rate(traj, sol)
        assert rate == pytest.approx(lam, rel=0.05)

    def test_growth_rate_needs_escape(self):
        # a trajectory this short has too few samples above the noise
        # floor for any fit window
        p = DIMER.with_energy(None).with_gamma(1.5)
        sol = dimer_special_symmetric(p, "-")
        traj = integrate(perturb(sol, 1e-10, 3), p, 0.3, IntegrationControls())
        with pytest.raises(InvalidInputError):
            measured_growth_rate(traj, sol)


class TestTrajectoryViews:
    def test_moduli_and_power(self):
        p = _conservative()
        state = StateVector(np.array([0.6 + 0j, 0.8j]), topology="dimer")
        traj = integrate(state, p, 1.0, IntegrationControls())
        assert traj.moduli().shape == traj.site_powers.shape
        assert total_power(traj.final_state()) == pytest.approx(1.0, abs=1e-9)
        assert len(traj) == len(traj.times)
