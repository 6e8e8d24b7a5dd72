"""Acceptance gate: eleven headline checks, one test per criterion.

Run ``pytest -v tests/test_acceptance.py`` to get one pass/fail line per
criterion (c01..c11).  The numeric targets and tolerances are frozen here
on purpose; loosening them is a contract change, not a test fix.  The
session sweeps from conftest feed most criteria, and the dynamics-heavy
ones (c10, c11) integrate a few dozen trajectories, so the module takes
about two minutes end to end.
"""

import numpy as np

from ptoligo.branches import (
    dimer_asymmetric,
    dimer_special_symmetric,
    dimer_symmetric,
    trimer_asymmetric,
    trimer_special_symmetric,
    trimer_symmetric,
    all_solutions,
)
from ptoligo.dynamics import (
    IntegrationControls,
    classify_outcome,
    integrate,
    measured_growth_rate,
    perturb,
)
from ptoligo.linearize import classify_stability, spectrum_of, stability_matrix
from ptoligo.model import (
    Params,
    StateVector,
    real_flow_jacobian,
    rotating_rhs_array,
    stationary_residual,
)

from conftest import DIMER, RHO0_TRIMER, TRIMER

KICK = 1e-8
HORIZON = 200.0
EVENT_MARGIN = 0.05


def _events(result, kind=None, participant=None):
    out = []
    for e in result.events:
        if kind is not None and e.kind != kind:
            continue
        if participant is not None and participant not in e.participants:
            continue
        out.append(e)
    return out


def _multiset_gap(a, b):
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    gap = np.abs(a[:, None] - b[None, :])
    return float(max(gap.min(axis=0).max(), gap.min(axis=1).max()))


def _curve(result, branch_id):
    for c in result.curves:
        if c.branch_id == branch_id:
            return c
    raise AssertionError(f"no curve {branch_id}")


def _nearest_point(curve, gamma):
    return min(curve.points, key=lambda p: abs(p.gamma - gamma))


def test_c01_equal_amplitude_saddle(dimer_sweep):
    """The two equal-amplitude dimer branches annihilate at 1.6180."""
    folds = [
        e
        for e in _events(dimer_sweep, kind="termination/saddle-node")
        if set(e.participants) == {"dimer/sym-I/+", "dimer/sym-I/-"}
    ]
    assert len(folds) == 1
    assert abs(folds[0].gamma_located - 1.6180) <= 1e-3


def test_c02_pitchfork_location_and_energy(dimer_sweep):
    """Unequal-amplitude branches fork off at 0.8944 with E = 1.7889."""
    forks = _events(dimer_sweep, kind="pitchfork")
    assert len(forks) == 1
    event = forks[0]
    assert abs(event.gamma_located - 0.8944) <= 1e-3
    assert {"dimer/asym-II/+", "dimer/asym-II/-"} <= set(event.participants)
    assert "dimer/special-III/+" in event.participants
    parent = dimer_special_symmetric(
        DIMER.with_energy(None).with_gamma(event.gamma_located), "+"
    )
    assert abs(parent.E - 1.7889) <= 1e-3


def test_c03_intersection_family_termination(dimer_sweep):
    """Both fixed-ratio dimer branches stop existing at 2.0000."""
    ends = [
        e
        for e in _events(dimer_sweep, kind="termination/saddle-node")
        if set(e.participants)
        == {"dimer/special-III/+", "dimer/special-III/-"}
    ]
    assert len(ends) == 1
    assert abs(ends[0].gamma_located - 2.0000) <= 1e-4


def test_c04_mirror_branch_spectra_negate():
    """The two unequal-amplitude dimer spectra are elementwise negatives."""
    p = DIMER.with_energy(None).with_gamma(1.5)
    plus = np.array(spectrum_of(dimer_asymmetric(p, "+"), p).eigenvalues)
    minus = np.array(spectrum_of(dimer_asymmetric(p, "-"), p).eigenvalues)
    assert _multiset_gap(plus, -minus) <= 1e-8


def test_c05_unequal_families_persist_beyond_linear_breaking():
    """Certified unequal-amplitude states exist at gamma five times coupling."""
    pd = DIMER.with_energy(None).with_gamma(5.0)
    for sign in "+-":
        sol = dimer_asymmetric(pd, sign)
        assert sol is not None
        assert stationary_residual(sol, pd) <= 1e-10
    pt = TRIMER.with_energy(None).with_gamma(5.0)
    sols = trimer_asymmetric(pt)
    assert len(sols) == 6
    assert all(stationary_residual(s, pt) <= 1e-10 for s in sols)


def _sym_tracks_by_size(result, gamma=1.5):
    alive = []
    for c in result.curves:
        pts = [p for p in c.points if abs(p.gamma - gamma) < 0.003]
        if pts:
            alive.append((pts[0].solution.amplitudes[0], c))
    assert len(alive) == 3
    alive.sort(key=lambda t: t[0])
    return alive[0][1], alive[1][1], alive[2][1]  # small, middle, large


def test_c06_trimer_equal_outer_stability_map(trimer_sym_sweep):
    """Saddle at 2.59; small branch destabilizes at 1.25; the middle branch
    is stable exactly on [1.26, 1.33] and [2.00, 2.11]."""
    small, middle, large = _sym_tracks_by_size(trimer_sym_sweep)

    folds = [
        e
        for e in _events(trimer_sym_sweep, kind="termination/saddle-node")
        if len(e.participants) == 2
    ]
    assert len(folds) == 1
    assert abs(folds[0].gamma_located - 2.59) <= 0.02
    assert set(folds[0].participants) == {middle.branch_id, large.branch_id}

    losses = _events(
        trimer_sym_sweep, kind="stability-change", participant=small.branch_id
    )
    assert len(losses) == 1
    assert abs(losses[0].gamma_located - 1.25) <= 0.02

    changes = sorted(
        e.gamma_located
        for e in _events(
            trimer_sym_sweep,
            kind="stability-change",
            participant=middle.branch_id,
        )
    )
    assert len(changes) == 4
    for got, want in zip(changes, (1.26, 1.33, 2.00, 2.11)):
        assert abs(got - want) <= 0.02
    # flag pattern: unstable / window / unstable / window / unstable
    for gamma, stable in ((1.13, False), (1.29, True), (1.66, False), (2.05, True), (2.35, False)):
        assert _nearest_point(middle, gamma).stable is stable


def test_c07_trimer_unequal_catalog_and_links(trimer_asym_special_sweep):
    """Six states in three mirror pairs at gamma=3; family born at 2.00 with
    a pitchfork link at 2.05."""
    p3 = TRIMER.with_energy(None).with_gamma(3.0)
    sols = trimer_asymmetric(p3)
    assert len(sols) == 6
    paired = set()
    for i, s in enumerate(sols):
        partners = [
            j
            for j, t in enumerate(sols)
            if j != i
            and max(abs(np.array(t.amplitudes) - s.amplitudes[::-1])) <= 1e-8
            and abs(t.E - s.E) <= 1e-8
        ]
        assert len(partners) == 1
        paired.add(frozenset((i, partners[0])))
    assert len(paired) == 3

    births = [
        e.gamma_located
        for e in _events(trimer_asym_special_sweep, kind="emergence")
        if any(p.startswith("trimer/asym-II/") for p in e.participants)
    ]
    assert births and abs(min(births) - 2.00) <= 0.02

    forks = _events(trimer_asym_special_sweep, kind="pitchfork")
    assert len(forks) == 1
    assert abs(forks[0].gamma_located - 2.05) <= 0.02


def test_c08_trimer_intersection_family(trimer_asym_special_sweep):
    """Four fixed-ratio branches at gamma=0.5; one pair dies at 0.65, the
    surviving pair collides at 2.10."""
    assert len(trimer_special_symmetric(TRIMER.with_energy(None).with_gamma(0.5))) == 4
    ends = [
        e
        for e in _events(trimer_asym_special_sweep, kind="termination/saddle-node")
        if len(e.participants) == 2
        and all(p.startswith("trimer/special-III/") for p in e.participants)
    ]
    assert len(ends) == 2
    ends.sort(key=lambda e: e.gamma_located)
    assert abs(ends[0].gamma_located - 0.65) <= 0.02
    assert abs(ends[1].gamma_located - 2.10) <= 0.02


def test_c09_real_coefficient_validation(rho0_trimer_sweep):
    """With a purely real cubic coefficient the dimer spectra match the
    closed form to 1e-8, and the trimer shows the saddle-center (1.043),
    zero-amplitude birth (1.000), and instability onset (1.13)."""
    p0 = Params(
        epsilon=1.0, gamma=0.0, rho_r=-2.0, rho_im=0.0, E=1.0, topology="dimer"
    )
    for g in np.linspace(0.0, 0.99, 34):
        pg = p0.with_gamma(float(g))
        Q = np.sqrt(1.0 - g * g)
        for sign, orient in (("+", 1.0), ("-", -1.0)):
            sol = dimer_symmetric(pg, sign)
            assert sol is not None
            lam = 2j * np.sqrt(complex(2.0 * Q * Q + orient * 1.0 * Q))
            got = np.array(spectrum_of(sol, pg).eigenvalues)
            # one-sided: both closed-form values appear in the spectrum;
            # the remaining pair is the phase mode, checked in c11
            assert np.min(np.abs(got - lam)) <= 1e-8
            assert np.min(np.abs(got + lam)) <= 1e-8

    folds = [
        e
        for e in _events(rho0_trimer_sweep, kind="termination/saddle-node")
        if len(e.participants) == 2
    ]
    assert len(folds) == 1
    assert abs(folds[0].gamma_located - 1.043) <= 5e-3

    persisting = [
        c for c in rho0_trimer_sweep.curves if c.points[-1].gamma >= 1.5 - 1e-9
    ]
    assert len(persisting) == 1
    track = persisting[0]
    births = _events(
        rho0_trimer_sweep, kind="emergence", participant=track.branch_id
    )
    assert len(births) == 1
    assert abs(births[0].gamma_located - 1.000) <= 1e-3

    onsets = _events(
        rho0_trimer_sweep, kind="stability-change", participant=track.branch_id
    )
    assert len(onsets) == 1
    assert abs(onsets[0].gamma_located - 1.13) <= 0.02
    assert _nearest_point(track, 1.09).stable is True
    assert _nearest_point(track, 1.17).stable is False


def _concordance_points(curve, events):
    """Sample points away from events: midpoints of wide event-free spans,
    or the single farthest point for short-lived branches."""
    own = sorted(
        e.gamma_located for e in events if curve.branch_id in e.participants
    )
    lo, hi = curve.points[0].gamma, curve.points[-1].gamma
    bounds = [lo] + [g for g in own if lo < g < hi] + [hi]
    mids = [
        0.5 * (a + b)
        for a, b in zip(bounds, bounds[1:])
        if b - a > 2 * EVENT_MARGIN
    ]
    if not mids:

        def clearance(pt):
            return min((abs(pt.gamma - g) for g in own), default=np.inf)

        best = max(curve.points, key=clearance)
        if clearance(best) >= EVENT_MARGIN:
            mids = [best.gamma]
    return [_nearest_point(curve, g) for g in mids]


def test_c10_dynamics_concordance(
    dimer_sweep, trimer_sym_sweep, trimer_asym_special_sweep
):
    """Perturbed integrations agree with the linear verdicts on every
    branch, and the unstable profiles land on their mirror states."""
    mismatches = []
    for result in (dimer_sweep, trimer_sym_sweep, trimer_asym_special_sweep):
        for curve in result.curves:
            for pt in _concordance_points(curve, result.events):
                par = curve.spec.params.with_gamma(pt.gamma)
                traj = integrate(
                    perturb(pt.solution, KICK, 1234),
                    par,
                    HORIZON,
                    IntegrationControls(),
                )
                out = classify_outcome(traj)
                held = out.kind == "stationary-preserved"
                if held != pt.stable:
                    mismatches.append(
                        f"{curve.branch_id} at gamma={pt.gamma:.3f}: "
                        f"stable={pt.stable} but outcome={out.kind}"
                    )
    assert not mismatches, "\n".join(mismatches)

    # same agreement for the full catalog at the reference gamma=3 point
    p3 = TRIMER.with_energy(None).with_gamma(3.0)
    sols3 = trimer_asymmetric(p3)
    for s in sols3:
        report = classify_stability(spectrum_of(s, p3))
        traj = integrate(
            perturb(s, KICK, 1234), p3, HORIZON, IntegrationControls()
        )
        held = classify_outcome(traj).kind == "stationary-preserved"
        assert held == report.stable, s.label()

    # the marginally-stable intersection state drains onto the unequal
    # "+" profile
    p15 = DIMER.with_energy(None).with_gamma(1.5)
    start = dimer_special_symmetric(p15, "+")
    traj = integrate(
        perturb(start, KICK, 42), p15, HORIZON, IntegrationControls()
    )
    out = classify_outcome(traj, all_solutions(p15))
    assert out.kind == "converged-to-fixed-point"
    assert out.target_id == "dimer/asym-II/+"
    assert out.deviation_metric <= 1e-2

    # unstable trimer profiles are absorbed by their mirror partners
    def by_amplitudes(target):
        best = min(
            sols3, key=lambda s: max(abs(np.array(s.amplitudes) - target))
        )
        assert max(abs(np.array(best.amplitudes) - target)) <= 1e-3
        return best

    def mirror_of(sol):
        return by_amplitudes(np.array(sol.amplitudes)[::-1])

    small_forked = by_amplitudes(np.array([0.517191, 1.618034, 1.653032]))
    small_folded = by_amplitudes(np.array([0.138538, 0.618034, 1.726501]))
    for start, seed in ((small_forked, 1234), (small_folded, 1)):
        traj = integrate(
            perturb(start, KICK, seed), p3, HORIZON, IntegrationControls()
        )
        out = classify_outcome(traj, sols3)
        assert out.kind == "converged-to-fixed-point", start.label()
        assert out.target_id == mirror_of(start).label()
        assert out.deviation_metric <= 1e-2


def _fd_jacobian_gap(sol, par):
    z = sol.complex_amplitudes()
    E = sol.E
    J = real_flow_jacobian(z, par, E)
    n = len(z)
    x = np.empty(2 * n)
    x[0::2], x[1::2] = z.real, z.imag

    def flow(xv):
        zz = xv[0::2] + 1j * xv[1::2]
        F = rotating_rhs_array(zz, par, E)
        out = np.empty(2 * n)
        out[0::2], out[1::2] = F.real, F.imag
        return out

    h = 1e-7
    fd = np.empty((2 * n, 2 * n))
    for k in range(2 * n):
        dx = np.zeros(2 * n)
        dx[k] = h
        fd[:, k] = (flow(x + dx) - flow(x - dx)) / (2 * h)
    return float(np.max(np.abs(J - fd)))


def test_c11_invariant_suite(
    dimer_sweep, trimer_sym_sweep, trimer_asym_special_sweep
):
    """Spectral symmetries, the exact phase mode, Jacobian consistency,
    conservative power drift, and growth-rate agreement on a 50-point grid
    per branch."""
    for result in (dimer_sweep, trimer_sym_sweep, trimer_asym_special_sweep):
        for curve in result.curves:
            pts = curve.points
            idx = np.unique(np.linspace(0, len(pts) - 1, 50).astype(int))
            for i in idx:
                pt = pts[i]
                par = curve.spec.params.with_gamma(pt.gamma)
                M = stability_matrix(pt.solution, par)
                scale = float(np.linalg.norm(M))
                assert pt.spectrum.conjugation_defect() <= 1e-5 * scale
                # the phase mode is a defective pair, so its computed
                # eigenvalues split by roughly the quarter root of the
                # backward error near degenerate branch endpoints
                assert (
                    min(abs(ev) for ev in pt.spectrum.eigenvalues)
                    <= 2e-4 * scale
                )
                z = pt.solution.complex_amplitudes()
                q = np.empty(2 * len(z), dtype=complex)
                q[0::2], q[1::2] = z, np.conj(z)
                assert np.linalg.norm(M @ q) <= 1e-12 * scale * np.linalg.norm(q)
            for i in idx[::10]:
                pt = pts[i]
                par = curve.spec.params.with_gamma(pt.gamma)
                assert _fd_jacobian_gap(pt.solution, par) < 1e-6

    # lossless limit: total power is conserved to integrator accuracy
    for topo, sites in (("dimer", [0.6, 0.8j]), ("trimer", [0.5, 0.4j, 0.3])):
        pc = Params(
            epsilon=1.0, gamma=0.0, rho_r=-2.0, rho_im=0.0, E=1.0, topology=topo
        )
        state = StateVector(np.array(sites, dtype=complex), topo)
        traj = integrate(state, pc, 100.0, IntegrationControls())
        powers = traj.site_powers.sum(axis=1)
        assert float(np.max(np.abs(powers - powers[0]))) < 1e-8

    # measured escape rates track the leading eigenvalue within 5%
    p15 = DIMER.with_energy(None).with_gamma(1.5)
    p166 = TRIMER.with_gamma(1.66)
    middle = sorted(trimer_symmetric(p166), key=lambda s: s.amplitudes[0])[1]
    p3 = TRIMER.with_energy(None).with_gamma(3.0)
    steep = [s for s in trimer_asymmetric(p3) if s.sign_choice == "#1"][0]
    for sol, par in (
        (dimer_asymmetric(p15, "-"), p15),
        (middle, p166),
        (steep, p3),
    ):
        lam = max(ev.real for ev in spectrum_of(sol, par).eigenvalues)
        traj = integrate(
            perturb(sol, KICK, 1234), par, HORIZON, IntegrationControls()
        )
        fit = measured_growth_rate(traj, sol)
        assert abs(fit - lam) / lam <= 0.05
