"""Time integration of the full flow and classification of where it goes.

The integrator is an embedded Dormand-Prince 5(4) pair with PI-free step
control, dense sampling on a uniform output grid, and an explicit blow-up
monitor in site power.  Outcomes are judged on modulus profiles only; the
rotating-frame phase is pure gauge and never compared.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError, StepUnderflowError
from .model import (
    Params,
    StateVector,
    StationarySolution,
    rhs_array,
    state_array,
)

OUTCOME_PRESERVED = "stationary-preserved"
OUTCOME_OSCILLATORY = "oscillatory-bounded"
OUTCOME_BLOW_UP = "blow-up"
OUTCOME_CONVERGED = "converged-to-fixed-point"

#: modulus-profile drift below which the initial state counts as held
PRESERVED_TOL = 1e-3
#: final-window modulus match radius against catalog entries
CONVERGED_TOL = 1e-2
#: fraction of the horizon averaged when matching against the catalog
FINAL_WINDOW = 0.1
#: hard floor on the adaptive step; reaching it is a stiffness failure,
#: reported separately from genuine blow-up
STEP_FLOOR = 1e-14

# Dormand-Prince 5(4) tableau; the last stage row doubles as the fifth
# order weights, so the accepted derivative is reused (FSAL).
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B4 = (
    5179 / 57600,
    0.0,
    7571 / 16695,
    393 / 640,
    -92097 / 339200,
    187 / 2100,
    1 / 40,
)


@dataclass(frozen=True)
class IntegrationControls:
    """Step-size and termination policy for one integration."""

    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    blow_up_threshold: float = 1e6
    output_dt: float = 0.1
    max_step: float | None = None

    def __post_init__(self):
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise InvalidInputError("tolerances must be positive")
        if self.blow_up_threshold <= 0:
            raise InvalidInputError("blow-up threshold must be positive")
        if self.output_dt <= 0:
            raise InvalidInputError("output_dt must be positive")
        if self.max_step is not None and self.max_step <= 0:
            raise InvalidInputError("max_step must be positive when set")


@dataclass(frozen=True)
class OutcomeLabel:
    kind: str
    target_id: str | None
    deviation_metric: float


@dataclass(frozen=True)
class Trajectory:
    """One completed integration sampled on a uniform grid.

    ``outcome`` is the blow-up label when the run ended early and is filled
    in by ``classify_outcome`` otherwise.  Treat records as immutable.
    """

    times: tuple[float, ...]
    states: tuple[StateVector, ...]
    site_powers: np.ndarray
    outcome: OutcomeLabel | None
    blow_up_time: float | None
    topology: str

    def __len__(self) -> int:
        return len(self.times)

    def state_matrix(self) -> np.ndarray:
        return np.array([s.sites for s in self.states])

    def moduli(self) -> np.ndarray:
        return np.sqrt(self.site_powers)

    def final_state(self) -> StateVector:
        return self.states[-1]


def _error_norm(z, z5, z4, rel_tol, abs_tol) -> float:
    scale = abs_tol + rel_tol * np.maximum(np.abs(z), np.abs(z5))
    ratio = np.abs(z5 - z4) / scale
    err = math.sqrt(float(np.mean(ratio * ratio)))
    return err if math.isfinite(err) else 1e6


def integrate(
    initial: StateVector | np.ndarray,
    params: Params,
    t_end: float,
    controls: IntegrationControls | None = None,
) -> Trajectory:
    """Evolve a state to t_end, sampling every output_dt.

    Terminates early with ``blow_up_time`` set once any site power crosses
    the blow-up threshold; the crossing sample is kept as the final row.
    Raises a step-underflow error when the controller cannot make progress,
    which signals stiffness rather than growth.
    """
    if controls is None:
        controls = IntegrationControls()
    z = state_array(initial).copy()
    if len(z) != params.n_sites:
        raise InvalidInputError(
            f"state has {len(z)} sites but params are {params.topology}"
        )
    if not (math.isfinite(t_end) and t_end > 0):
        raise InvalidInputError(f"t_end must be positive, got {t_end}")

    dt = controls.output_dt
    n_out = max(1, int(math.ceil(t_end / dt - 1e-12)))
    grid = [min(k * dt, t_end) for k in range(1, n_out + 1)]

    h_cap = controls.max_step if controls.max_step is not None else math.inf
    times = [0.0]
    states = [z.copy()]
    blow_time: float | None = None

    t = 0.0
    k_first = rhs_array(z, params)
    h = min(dt, 0.05, h_cap)
    for t_next in grid:
        while t < t_next - 1e-12 * max(1.0, t_next):
            h_try = min(h, h_cap, t_next - t)
            if h_try < STEP_FLOOR:
                raise StepUnderflowError(
                    f"step collapsed below {STEP_FLOOR:g} at t={t:.6g}", time=t
                )
            ks = [k_first]
            zi = z
            for row in _A[1:]:
                zi = z + h_try * sum(a * k for a, k in zip(row, ks))
                ks.append(rhs_array(zi, params))
            z5 = zi  # the last stage row is the 5th order update
            z4 = z + h_try * sum(b * k for b, k in zip(_B4, ks))
            err = _error_norm(z, z5, z4, controls.rel_tol, controls.abs_tol)
            if err <= 1.0:
                t += h_try
                z = z5
                k_first = ks[-1]
                if float(np.max(np.abs(z) ** 2)) >= controls.blow_up_threshold:
                    blow_time = t
                    break
            h = h_try * min(5.0, max(0.2, 0.9 * err**-0.2 if err > 0 else 5.0))
        if blow_time is not None:
            times.append(t)
            states.append(z.copy())
            break
        times.append(t_next)
        states.append(z.copy())

    powers = np.abs(np.array(states)) ** 2
    outcome = None
    if blow_time is not None:
        outcome = OutcomeLabel(
            OUTCOME_BLOW_UP, None, float(np.max(powers[-1]))
        )
    return Trajectory(
        times=tuple(times),
        states=tuple(StateVector(s, params.topology) for s in states),
        site_powers=powers,
        outcome=outcome,
        blow_up_time=blow_time,
        topology=params.topology,
    )


def perturb(
    sol: StationarySolution, amplitude: float, seed: int
) -> StateVector:
    """Stationary state plus a seeded random kick of bounded modulus.

    Each site gets an independent complex offset drawn uniformly from the
    disk of the given radius; amplitude zero reproduces the exact state.
    """
    if amplitude < 0:
        raise InvalidInputError("perturbation amplitude must be non-negative")
    z = sol.complex_amplitudes()
    if amplitude > 0:
        rng = np.random.default_rng(seed)
        radius = amplitude * np.sqrt(rng.uniform(size=len(z)))
        angle = rng.uniform(0.0, 2.0 * math.pi, size=len(z))
        z = z + radius * np.exp(1j * angle)
    return StateVector(z, sol.topology)


def classify_outcome(
    traj: Trajectory, catalog: list[StationarySolution] | tuple = ()
) -> OutcomeLabel:
    """Label where a completed trajectory went.

    Order of tests: blow-up flag, modulus profile held near the initial one
    for the whole run, final-window average matching a catalog entry, and
    otherwise bounded oscillation.
    """
    if traj.blow_up_time is not None:
        if traj.outcome is not None:
            return traj.outcome
        return OutcomeLabel(
            OUTCOME_BLOW_UP, None, float(np.max(traj.site_powers[-1]))
        )
    moduli = traj.moduli()
    drift = float(np.max(np.abs(moduli - moduli[0])))
    if drift <= PRESERVED_TOL:
        return OutcomeLabel(OUTCOME_PRESERVED, None, drift)
    window = max(1, int(round(FINAL_WINDOW * len(traj))))
    final = moduli[-window:].mean(axis=0)
    best = None
    best_dist = math.inf
    for sol in catalog:
        if sol.topology != traj.topology:
            continue
        dist = float(np.max(np.abs(final - np.asarray(sol.amplitudes))))
        if dist < best_dist:
            best, best_dist = sol, dist
    if best is not None and best_dist <= CONVERGED_TOL:
        return OutcomeLabel(OUTCOME_CONVERGED, best.label(), best_dist)
    return OutcomeLabel(OUTCOME_OSCILLATORY, None, drift)


def deviation_series(traj: Trajectory, sol: StationarySolution) -> np.ndarray:
    """Distance of each sample from the stationary orbit of ``sol``.

    The orbit fills the whole gauge circle, so the measure minimizes over a
    global phase; the e^{-iEt} rotation then drops out inside the modulus.
    """
    ref = sol.complex_amplitudes()
    ref_norm = float(np.vdot(ref, ref).real)
    out = np.empty(len(traj))
    for i, state in enumerate(traj.states):
        z = state.sites
        overlap = abs(np.vdot(ref, z))
        d2 = float(np.vdot(z, z).real) + ref_norm - 2.0 * overlap
        out[i] = math.sqrt(max(d2, 0.0))
    return out


def measured_growth_rate(
    traj: Trajectory, sol: StationarySolution, cap: float | None = None
) -> float:
    """Exponential rate of departure from a stationary state.

    Fits log-deviation against time over the last decade below the linear
    ceiling.  A generic kick excites every mode, so the early record blends
    their rates; by the top decade the fastest one dominates and the slope
    is comparable with the leading eigenvalue.
    """
    dev = deviation_series(traj, sol)
    if cap is None:
        ref = sol.complex_amplitudes()
        cap = 1e-2 * math.sqrt(float(np.vdot(ref, ref).real))
    floor = 5.0 * max(dev[0], 1e-300)
    for lo in (cap / 10.0, cap / 100.0, floor):
        mask = (dev >= max(lo, floor)) & (dev <= cap)
        if int(mask.sum()) >= 5:
            times = np.asarray(traj.times)[mask]
            slope = np.polyfit(times, np.log(dev[mask]), 1)[0]
            return float(slope)
    raise InvalidInputError(
        "deviation never cleared the fit window; "
        "integrate longer or perturb harder"
    )
