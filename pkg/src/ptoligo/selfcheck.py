"""Built-in quick checks behind the `validate` subcommand.

Each check is small enough to run in about a second and probes one load
bearing property end to end: closed forms against the flow residual,
spectra against their symmetry, located events against analytic values,
the integrator against conservation and blow-up, and the serializers
against round-trip identity.  The pytest suite is the thorough version;
this battery is a field diagnostic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import tables
from .branches import (
    dimer_asymmetric,
    dimer_solutions,
    dimer_symmetric,
    trimer_solutions,
)
from .continuation import (
    analytic_critical_points,
    detect_events,
    sweep_all,
)
from .dynamics import (
    IntegrationControls,
    integrate,
    measured_growth_rate,
    perturb,
)
from .errors import PtoligoError
from .linearize import linear_pt_dimer_spectrum, spectrum_of
from .model import Params, StateVector, stationary_residual

#: reference parameter sets used by the battery
DIMER = Params(epsilon=1.0, gamma=0.0, rho_r=-2.0, rho_im=1.0, E=1.0, topology="dimer")
TRIMER = Params(epsilon=1.0, gamma=0.0, rho_r=-1.0, rho_im=1.0, E=1.0, topology="trimer")


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _check_stationary_residuals() -> CheckResult:
    worst = 0.0
    count = 0
    for gamma in (0.0, 0.4, 0.8, 1.2, 1.5):
        p = DIMER.with_gamma(gamma)
        for sol in dimer_solutions(p):
            worst = max(worst, stationary_residual(sol, p))
            count += 1
    for gamma in (1.5, 2.5):
        p = TRIMER.with_gamma(gamma)
        for sol in trimer_solutions(p):
            worst = max(worst, stationary_residual(sol, p))
            count += 1
    return CheckResult(
        "stationary-residuals",
        worst <= 1e-10 and count >= 20,
        f"{count} states, worst flow residual {worst:.2e}",
    )


def _check_mirror_spectra() -> CheckResult:
    p = TRIMER.with_gamma(3.0).with_energy(None)
    sols = trimer_solutions(p)
    worst = 0.0
    pairs = 0
    for sol in sols:
        mirror_amps = tuple(reversed(sol.amplitudes))
        partner = min(
            sols,
            key=lambda s: max(
                abs(a - b) for a, b in zip(s.amplitudes, mirror_amps)
            ),
        )
        ev = np.array(spectrum_of(sol, p).eigenvalues)
        me = np.array(spectrum_of(partner, p).eigenvalues)
        # compare as multisets: lexicographic sorting is unstable when
        # conjugate pairs tie in the real part
        gap = np.abs(ev[:, None] + me[None, :])
        worst = max(worst, float(max(gap.min(axis=0).max(), gap.min(axis=1).max())))
        pairs += 1
    return CheckResult(
        "mirror-spectra",
        worst <= 1e-8 and pairs >= 6,
        f"{pairs} states, worst mirror mismatch {worst:.2e}",
    )


def _check_linear_pt() -> CheckResult:
    p = Params(epsilon=1.0, gamma=0.0, rho_r=-1.0, rho_im=0.0, E=1.0, topology="dimer")
    worst = 0.0
    for gamma in (0.0, 0.3, 0.6, 0.9):
        pg = p.with_gamma(gamma)
        for sign in ("+", "-"):
            sol = dimer_symmetric(pg, sign)
            if sol is None or sol.amplitudes[0] < 1e-6:
                continue
            predicted = sorted(
                linear_pt_dimer_spectrum(pg, sign), key=lambda z: (z.real, z.imag)
            )
            numeric = spectrum_of(sol, pg).eigenvalues
            nonzero = sorted(
                (z for z in numeric if abs(z) > 1e-7),
                key=lambda z: (z.real, z.imag),
            )
            if len(nonzero) != len(predicted):
                return CheckResult(
                    "linear-pt-spectrum",
                    False,
                    f"expected {len(predicted)} nonzero modes, got {len(nonzero)}",
                )
            worst = max(
                worst,
                max(abs(a - b) for a, b in zip(predicted, nonzero)),
            )
    return CheckResult(
        "linear-pt-spectrum",
        worst <= 1e-8,
        f"worst closed-form mismatch {worst:.2e}",
    )


def _check_critical_points() -> CheckResult:
    pts = analytic_critical_points(DIMER)
    curves = sweep_all(DIMER, (0.5, 2.1), 0.01)
    events = detect_events(curves)
    targets = {
        "dimer_caseI_saddle": pts["dimer_caseI_saddle"],
        "dimer_pitchfork": pts["dimer_pitchfork"],
        "dimer_caseIII_termination": pts["dimer_caseIII_termination"],
    }
    misses = []
    for name, target in targets.items():
        best = min(
            (abs(e.gamma_located - target) for e in events), default=math.inf
        )
        if best > 1e-3:
            misses.append(f"{name} off by {best:.2e}")
    return CheckResult(
        "critical-points",
        not misses,
        "; ".join(misses) if misses else
        "3 analytic values matched by located events to 1e-3",
    )


def _check_conservation() -> CheckResult:
    p = Params(epsilon=1.0, gamma=0.0, rho_r=2.0, rho_im=0.0, topology="dimer")
    state = StateVector(np.array([0.7 + 0.2j, -0.3 + 0.5j]), "dimer")
    traj = integrate(state, p, 100.0)
    powers = traj.site_powers.sum(axis=1)
    drift = float(np.max(np.abs(powers - powers[0])))
    return CheckResult(
        "conservative-drift",
        drift <= 1e-8,
        f"total power drift {drift:.2e} over t=100",
    )


def _check_blow_up() -> CheckResult:
    p = DIMER.with_gamma(1.5).with_energy(None)
    sol = dimer_asymmetric(p, "-")
    traj = integrate(perturb(sol, 1e-8, seed=1234), p, 200.0)
    ok = traj.blow_up_time is not None and traj.site_powers[-1].max() >= 1e6
    detail = (
        f"blow-up at t={traj.blow_up_time:.2f}"
        if traj.blow_up_time is not None
        else "no blow-up detected"
    )
    return CheckResult("blow-up-detection", ok, detail)


def _check_growth_rate() -> CheckResult:
    p = DIMER.with_gamma(1.5).with_energy(None)
    sol = dimer_asymmetric(p, "-")
    lam = spectrum_of(sol, p).max_growth_rate
    traj = integrate(
        perturb(sol, 1e-6, seed=7), p, 30.0, IntegrationControls(output_dt=0.01)
    )
    rate = measured_growth_rate(traj, sol)
    rel = abs(rate - lam) / lam
    return CheckResult(
        "growth-rate-agreement",
        rel <= 0.05,
        f"measured {rate:.4f} vs eigenvalue {lam:.4f} ({rel:.2%})",
    )


def _check_round_trip() -> CheckResult:
    header = ["gamma", "A", "stable"]
    rows = [[0.1, 1.0 / 3.0, True], [0.2, math.pi, False]]
    text = tables.emit_csv(header, rows)
    _, parsed = tables.parse_csv(text, header)
    again = tables.emit_csv(header, parsed)
    csv_ok = again == text and parsed == rows
    obj = {"x": 1.0 / 3.0, "names": ["a", "b"], "n": 3}
    json_ok = tables.parse_json(tables.emit_json(obj)) == obj
    return CheckResult(
        "serialization-round-trip",
        csv_ok and json_ok,
        "byte-identical CSV and JSON round-trips"
        if csv_ok and json_ok
        else f"csv_ok={csv_ok} json_ok={json_ok}",
    )


def _check_perturb_determinism() -> CheckResult:
    p = DIMER.with_gamma(1.5).with_energy(None)
    sol = dimer_asymmetric(p, "+")
    a = perturb(sol, 1e-8, seed=5).sites
    b = perturb(sol, 1e-8, seed=5).sites
    c = perturb(sol, 1e-8, seed=6).sites
    bound = float(np.max(np.abs(a - sol.complex_amplitudes())))
    ok = np.array_equal(a, b) and not np.array_equal(a, c) and bound <= 1e-8
    return CheckResult(
        "perturbation-determinism",
        ok,
        f"repeatable per seed, max modulus {bound:.2e}",
    )


ALL_CHECKS = (
    _check_stationary_residuals,
    _check_mirror_spectra,
    _check_linear_pt,
    _check_critical_points,
    _check_conservation,
    _check_blow_up,
    _check_growth_rate,
    _check_round_trip,
    _check_perturb_determinism,
)


def run_checks() -> list[CheckResult]:
    """Run the whole battery, never raising; failures become results."""
    results = []
    for check in ALL_CHECKS:
        try:
            results.append(check())
        except PtoligoError as exc:
            results.append(
                CheckResult(check.__name__.strip("_"), False, f"error: {exc}")
            )
    return results
