"""Core model types for coupled oscillator chains with balanced gain and loss.

The dimer couples a site with linear gain and cubic loss to its mirror
image with linear loss and cubic gain.  The trimer inserts an inert middle
site (purely conservative, self-focusing coefficient -1) between the two.
All dynamical quantities are complex site amplitudes; stationary states
rotate as ``exp(i E t)`` with real propagation constant E.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import InvalidInputError

TOPOLOGIES = ("dimer", "trimer")

ROLE_GAIN_SITE = "nonlinear-loss/linear-gain"
ROLE_LOSS_SITE = "nonlinear-gain/linear-loss"
ROLE_INERT = "inert"

CASE_SYMMETRIC = "sym-I"
CASE_ASYMMETRIC = "asym-II"
CASE_SPECIAL = "special-III"
CASE_LABELS = (CASE_SYMMETRIC, CASE_ASYMMETRIC, CASE_SPECIAL)

#: constructors must certify stationarity at least this tightly
RESIDUAL_TOL = 1e-10
#: tolerance for the factorized amplitude condition
FACTORED_TOL = 1e-10


def _require_finite(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise InvalidInputError(f"{name} must be finite, got {value!r}")
    return value


@dataclass(frozen=True)
class Params:
    """Model parameters.

    Attributes
    ----------
    epsilon : float
        Coupling between neighbouring sites, strictly positive.
    gamma : float
        Linear gain/loss coefficient.
    rho_r : float
        Real (conservative) part of the cubic coefficient on the outer sites.
    rho_im : float
        Imaginary (gain/loss) part of the cubic coefficient.
    E : float or None
        Propagation constant.  Only meaningful for operations where E is a
        free parameter; solution families that determine E themselves ignore
        it, and it may be left as None in that case.
    topology : str
        Either ``"dimer"`` or ``"trimer"``.
    """

    epsilon: float
    gamma: float
    rho_r: float
    rho_im: float
    E: float | None = None
    topology: str = "dimer"

    def __post_init__(self):
        object.__setattr__(self, "epsilon", _require_finite("epsilon", self.epsilon))
        object.__setattr__(self, "gamma", _require_finite("gamma", self.gamma))
        object.__setattr__(self, "rho_r", _require_finite("rho_r", self.rho_r))
        object.__setattr__(self, "rho_im", _require_finite("rho_im", self.rho_im))
        if self.E is not None:
            object.__setattr__(self, "E", _require_finite("E", self.E))
        if self.epsilon <= 0.0:
            raise InvalidInputError(f"epsilon must be positive, got {self.epsilon}")
        if self.topology not in TOPOLOGIES:
            raise InvalidInputError(
                f"topology must be one of {TOPOLOGIES}, got {self.topology!r}"
            )

    @property
    def n_sites(self) -> int:
        return 2 if self.topology == "dimer" else 3

    def energy(self) -> float:
        """E as a plain float; raises when it was never supplied."""
        if self.E is None:
            raise InvalidInputError("operation requires the propagation constant E")
        return self.E

    def with_gamma(self, gamma: float) -> Params:
        return replace(self, gamma=gamma)

    def with_energy(self, E: float | None) -> Params:
        return replace(self, E=E)


def site_roles(topology: str) -> tuple[str, ...]:
    if topology == "dimer":
        return (ROLE_GAIN_SITE, ROLE_LOSS_SITE)
    if topology == "trimer":
        return (ROLE_GAIN_SITE, ROLE_INERT, ROLE_LOSS_SITE)
    raise InvalidInputError(f"unknown topology {topology!r}")


@dataclass(frozen=True)
class StateVector:
    """Ordered complex site amplitudes for one topology.

    The first site always carries linear gain and cubic loss, the last one
    the mirrored roles; a trimer keeps its conservative site in the middle.
    Treat instances as immutable even though numpy arrays technically allow
    writes.
    """

    sites: np.ndarray
    topology: str = "dimer"

    def __post_init__(self):
        arr = np.asarray(self.sites, dtype=complex)
        if self.topology not in TOPOLOGIES:
            raise InvalidInputError(
                f"topology must be one of {TOPOLOGIES}, got {self.topology!r}"
            )
        expected = 2 if self.topology == "dimer" else 3
        if arr.shape != (expected,):
            raise InvalidInputError(
                f"{self.topology} state needs {expected} sites, got shape {arr.shape}"
            )
        if not np.all(np.isfinite(arr.view(float))):
            raise InvalidInputError("state amplitudes must be finite")
        object.__setattr__(self, "sites", arr)

    def __len__(self) -> int:
        return len(self.sites)

    @property
    def roles(self) -> tuple[str, ...]:
        return site_roles(self.topology)


@dataclass(frozen=True)
class StationarySolution:
    """One stationary state in polar form.

    Amplitudes are non-negative; phases absorb all signs.  The gauge fixes
    ``phases[0] == 0`` for the dimer and ``phases[1] == 0`` (middle site)
    for the trimer.  ``case_label`` records which amplitude relation the
    state satisfies: equal outer amplitudes ("sym-I"), the gain/loss sum
    rule with unequal amplitudes ("asym-II"), or both at once
    ("special-III").  ``sign_choice`` identifies the root/branch used by
    its constructor.
    """

    amplitudes: tuple[float, ...]
    phases: tuple[float, ...]
    E: float
    case_label: str
    sign_choice: str
    topology: str = "dimer"
    #: set on degenerate double roots picked up exactly at a fold
    critical: bool = False

    def __post_init__(self):
        n = 2 if self.topology == "dimer" else 3
        if self.topology not in TOPOLOGIES:
            raise InvalidInputError(f"unknown topology {self.topology!r}")
        if len(self.amplitudes) != n or len(self.phases) != n:
            raise InvalidInputError(
                f"{self.topology} solution needs {n} amplitudes and phases"
            )
        if any(a < 0 for a in self.amplitudes):
            raise InvalidInputError("amplitudes must be non-negative")
        if self.case_label not in CASE_LABELS:
            raise InvalidInputError(f"unknown case label {self.case_label!r}")
        object.__setattr__(self, "amplitudes", tuple(float(a) for a in self.amplitudes))
        object.__setattr__(self, "phases", tuple(float(p) for p in self.phases))
        object.__setattr__(self, "E", _require_finite("E", self.E))

    @property
    def gauge_index(self) -> int:
        return 0 if self.topology == "dimer" else 1

    def complex_amplitudes(self) -> np.ndarray:
        amps = np.asarray(self.amplitudes, dtype=float)
        return amps * np.exp(1j * np.asarray(self.phases, dtype=float))

    def state(self) -> StateVector:
        return StateVector(self.complex_amplitudes(), self.topology)

    def label(self) -> str:
        return f"{self.topology}/{self.case_label}/{self.sign_choice}"

    def factored_condition(self, params: Params) -> float:
        """Residual of the factorized amplitude condition.

        Every stationary state satisfies
        ``(A^2 - Z^2) * (rho_im*(A^2 + Z^2) - gamma) == 0`` where A and Z
        are the outer amplitudes.  Returns the absolute value of the
        product for diagnostics.
        """
        a2 = self.amplitudes[0] ** 2
        z2 = self.amplitudes[-1] ** 2
        return abs((a2 - z2) * (params.rho_im * (a2 + z2) - params.gamma))


def state_array(state: StateVector | np.ndarray) -> np.ndarray:
    if isinstance(state, StateVector):
        return state.sites
    return np.asarray(state, dtype=complex)


def rhs_array(z: np.ndarray, params: Params) -> np.ndarray:
    """Time derivative of the site amplitudes (plain array fast path)."""
    eps = params.epsilon
    g = params.gamma
    rm = params.rho_r - 1j * params.rho_im
    rp = params.rho_r + 1j * params.rho_im
    if params.topology == "dimer":
        u, v = z
        return np.array(
            [
                1j * eps * v - 1j * rm * (u.real**2 + u.imag**2) * u + g * u,
                1j * eps * u - 1j * rp * (v.real**2 + v.imag**2) * v - g * v,
            ]
        )
    u, v, w = z
    return np.array(
        [
            1j * eps * v - 1j * rm * (u.real**2 + u.imag**2) * u + g * u,
            1j * eps * (u + w) + 1j * (v.real**2 + v.imag**2) * v,
            1j * eps * v - 1j * rp * (w.real**2 + w.imag**2) * w - g * w,
        ]
    )


def evaluate_rhs(state: StateVector, params: Params) -> np.ndarray:
    """Evaluate the equations of motion at a state.

    Parameters
    ----------
    state : StateVector
        Current site amplitudes.
    params : Params
        Model parameters; the topology must match the state.

    Returns
    -------
    numpy.ndarray
        Complex derivative per site.
    """
    if not isinstance(state, StateVector):
        raise InvalidInputError("evaluate_rhs expects a StateVector")
    if state.topology != params.topology:
        raise InvalidInputError(
            f"state topology {state.topology!r} does not match params "
            f"topology {params.topology!r}"
        )
    return rhs_array(state.sites, params)


def rotating_rhs_array(z: np.ndarray, params: Params, E: float) -> np.ndarray:
    """Flow in the frame co-rotating at rate E; zero exactly at stationary states."""
    return rhs_array(z, params) - 1j * E * z


def residual_array(z: np.ndarray, params: Params, E: float) -> float:
    """Max-norm of the real stationary equations at complex amplitudes z."""
    F = rotating_rhs_array(z, params, E)
    return float(max(np.abs(F.real).max(), np.abs(F.imag).max()))


def stationary_residual(sol: StationarySolution, params: Params) -> float:
    """Max-norm stationarity defect of a solution.

    Reconstructs the complex amplitudes from polar data and evaluates the
    stationary equations at the solution's own propagation constant.
    """
    if sol.topology != params.topology:
        raise InvalidInputError(
            f"solution topology {sol.topology!r} does not match params "
            f"topology {params.topology!r}"
        )
    return residual_array(sol.complex_amplitudes(), params, sol.E)


def total_power(state: StateVector | StationarySolution) -> float:
    """Sum of squared moduli over the sites."""
    if isinstance(state, StationarySolution):
        return float(sum(a * a for a in state.amplitudes))
    return float(np.sum(np.abs(state_array(state)) ** 2))


def power_balance_rate(state: StateVector | np.ndarray, params: Params) -> float:
    """Exact rate of change of the total power.

    The coupling and the conservative cubic terms cancel; gain/loss on the
    outer sites alone drives the balance:
    ``2*gamma*(|u|^2 - |w|^2) - 2*rho_im*(|u|^4 - |w|^4)``.
    """
    z = state_array(state)
    p_first = abs(z[0]) ** 2
    p_last = abs(z[-1]) ** 2
    return float(
        2.0 * params.gamma * (p_first - p_last)
        - 2.0 * params.rho_im * (p_first**2 - p_last**2)
    )


def _cubic_partials(z_k: complex, coeff: complex) -> tuple[complex, complex]:
    # d/dz and d/dzbar of -i*coeff*|z|^2 z
    mod2 = z_k.real**2 + z_k.imag**2
    return -2j * coeff * mod2, -1j * coeff * z_k * z_k


def complex_flow_jacobian(
    z: np.ndarray, params: Params, E: float
) -> tuple[np.ndarray, np.ndarray]:
    """Wirtinger blocks (dF/dz, dF/dzbar) of the rotating-frame flow."""
    eps = params.epsilon
    g = params.gamma
    rm = params.rho_r - 1j * params.rho_im
    rp = params.rho_r + 1j * params.rho_im
    n = params.n_sites
    J1 = np.zeros((n, n), dtype=complex)
    J2 = np.zeros((n, n), dtype=complex)
    if params.topology == "dimer":
        d0, c0 = _cubic_partials(z[0], rm)
        d1, c1 = _cubic_partials(z[1], rp)
        J1[0, 0] = d0 + g - 1j * E
        J1[1, 1] = d1 - g - 1j * E
        J1[0, 1] = 1j * eps
        J1[1, 0] = 1j * eps
        J2[0, 0] = c0
        J2[1, 1] = c1
    else:
        d0, c0 = _cubic_partials(z[0], rm)
        d1, c1 = _cubic_partials(z[1], -1.0)
        d2, c2 = _cubic_partials(z[2], rp)
        J1[0, 0] = d0 + g - 1j * E
        J1[1, 1] = d1 - 1j * E
        J1[2, 2] = d2 - g - 1j * E
        J1[0, 1] = 1j * eps
        J1[1, 0] = 1j * eps
        J1[1, 2] = 1j * eps
        J1[2, 1] = 1j * eps
        J2[0, 0] = c0
        J2[1, 1] = c1
        J2[2, 2] = c2
    return J1, J2


def real_flow_jacobian(z: np.ndarray, params: Params, E: float) -> np.ndarray:
    """Real 2N x 2N Jacobian of the rotating-frame flow.

    Coordinates interleave as (Re z1, Im z1, Re z2, Im z2, ...).
    """
    J1, J2 = complex_flow_jacobian(z, params, E)
    n = len(z)
    J = np.zeros((2 * n, 2 * n))
    for j in range(n):
        for k in range(n):
            a, b = J1[j, k], J2[j, k]
            J[2 * j, 2 * k] = a.real + b.real
            J[2 * j, 2 * k + 1] = -a.imag + b.imag
            J[2 * j + 1, 2 * k] = a.imag + b.imag
            J[2 * j + 1, 2 * k + 1] = a.real - b.real
    return J


def polar_solution(
    z: np.ndarray,
    E: float,
    case_label: str,
    sign_choice: str,
    params: Params,
) -> StationarySolution:
    """Build a gauge-fixed StationarySolution from complex amplitudes.

    Rotates the global phase so the gauge site has phase exactly zero,
    then splits into non-negative amplitudes and phases.
    """
    z = np.asarray(z, dtype=complex)
    gauge = 0 if params.topology == "dimer" else 1
    shift = np.angle(z[gauge]) if abs(z[gauge]) > 0 else 0.0
    zg = z * np.exp(-1j * shift)
    amps = np.abs(zg)
    phases = np.where(amps > 0, np.angle(zg), 0.0)
    phases[gauge] = 0.0
    return StationarySolution(
        amplitudes=tuple(amps),
        phases=tuple(phases),
        E=float(E),
        case_label=case_label,
        sign_choice=sign_choice,
        topology=params.topology,
    )
