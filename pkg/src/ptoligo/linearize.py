"""Linear stability analysis around stationary states.

Perturbing a stationary state and keeping first-order terms gives a small
complex eigenvalue problem M X = i lambda X in the doubled basis
(p, -conj(P), q, -conj(Q)[, r, -conj(R)]).  Growth rates are the real
parts of lambda; every spectrum carries per-eigenpair residual
certificates so no eigensolver output is trusted blindly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError, InvalidRegimeError, NumericalFailureError
from .model import Params, StationarySolution

#: default growth-rate threshold separating stable from unstable
STABILITY_TOL = 1e-7
#: eigenpair residual certificates must beat this times the matrix norm
CERTIFICATE_FACTOR = 1e-9

INSTABILITY_REAL = "real-pair"
INSTABILITY_QUARTET = "complex-quartet"
INSTABILITY_MIXED = "mixed"


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues lambda of one linearization, certified and ordered.

    Ordering is deterministic: descending real part, then descending
    imaginary part.  ``residuals[k]`` is the 2-norm of ``M v - i*lambda*v``
    for the k-th normalized eigenvector.
    """

    eigenvalues: tuple[complex, ...]
    residuals: tuple[float, ...]
    solution_id: str | None = None

    def __len__(self) -> int:
        return len(self.eigenvalues)

    @property
    def max_growth_rate(self) -> float:
        return max(ev.real for ev in self.eigenvalues)

    def has_zero_mode(self, tol: float = STABILITY_TOL) -> bool:
        return any(abs(ev) <= tol for ev in self.eigenvalues)

    def conjugation_defect(self) -> float:
        """How far the set is from closure under complex conjugation."""
        worst = 0.0
        for ev in self.eigenvalues:
            target = ev.conjugate()
            worst = max(worst, min(abs(other - target) for other in self.eigenvalues))
        return worst

    def negation_defect(self) -> float:
        """How far the set is from closure under lambda -> -lambda."""
        worst = 0.0
        for ev in self.eigenvalues:
            worst = max(worst, min(abs(other + ev) for other in self.eigenvalues))
        return worst


@dataclass(frozen=True)
class StabilityReport:
    stable: bool
    max_growth_rate: float
    instability_type: str | None
    tol: float


def _check_sol(sol: StationarySolution, params: Params, topology: str) -> None:
    if sol.topology != topology or params.topology != topology:
        raise InvalidInputError(
            f"expected {topology} solution and params, got solution "
            f"{sol.topology!r} with params {params.topology!r}"
        )
    from .model import stationary_residual

    if stationary_residual(sol, params) > 1e-8:
        raise InvalidInputError(
            "solution is not stationary enough for linearization"
        )


def build_dimer_matrix(sol: StationarySolution, params: Params) -> np.ndarray:
    """4x4 complex linearization matrix around a dimer state."""
    _check_sol(sol, params, "dimer")
    a, b = sol.complex_amplitudes()
    E = sol.E
    eps, g = params.epsilon, params.gamma
    rm = params.rho_r - 1j * params.rho_im
    rp = params.rho_r + 1j * params.rho_im
    a2, b2 = abs(a) ** 2, abs(b) ** 2
    M = np.zeros((4, 4), dtype=complex)
    M[0, 0] = E + 2 * a2 * rm + 1j * g
    M[0, 1] = -a * a * rm
    M[0, 2] = -eps
    M[1, 0] = np.conj(a) ** 2 * rp
    M[1, 1] = -2 * a2 * rp - E + 1j * g
    M[1, 3] = eps
    M[2, 0] = -eps
    M[2, 2] = E - 1j * g + 2 * b2 * rp
    M[2, 3] = -b * b * rp
    M[3, 1] = eps
    M[3, 2] = np.conj(b) ** 2 * rm
    M[3, 3] = -E - 1j * g - 2 * b2 * rm
    return M


def build_trimer_matrix(sol: StationarySolution, params: Params) -> np.ndarray:
    """6x6 complex linearization matrix around a trimer state."""
    _check_sol(sol, params, "trimer")
    a, b, c = sol.complex_amplitudes()
    E = sol.E
    eps, g = params.epsilon, params.gamma
    rm = params.rho_r - 1j * params.rho_im
    rp = params.rho_r + 1j * params.rho_im
    a2, b2, c2 = abs(a) ** 2, abs(b) ** 2, abs(c) ** 2
    M = np.zeros((6, 6), dtype=complex)
    M[0, 0] = E + 2 * a2 * rm + 1j * g
    M[0, 1] = -a * a * rm
    M[0, 2] = -eps
    M[1, 0] = np.conj(a) ** 2 * rp
    M[1, 1] = -2 * a2 * rp - E + 1j * g
    M[1, 3] = eps
    # middle site: conservative, cubic coefficient exactly -1
    M[2, 0] = -eps
    M[2, 2] = E - 2 * b2
    M[2, 3] = b * b
    M[2, 4] = -eps
    M[3, 1] = eps
    M[3, 2] = -np.conj(b) ** 2
    M[3, 3] = -E + 2 * b2
    M[3, 5] = eps
    M[4, 2] = -eps
    M[4, 4] = E - 1j * g + 2 * c2 * rp
    M[4, 5] = -c * c * rp
    M[5, 3] = eps
    M[5, 4] = np.conj(c) ** 2 * rm
    M[5, 5] = -E - 1j * g - 2 * c2 * rm
    return M


def stability_matrix(sol: StationarySolution, params: Params) -> np.ndarray:
    if sol.topology == "dimer":
        return build_dimer_matrix(sol, params)
    return build_trimer_matrix(sol, params)


def eigenvalues(matrix: np.ndarray, solution_id: str | None = None) -> Spectrum:
    """Certified spectrum of the problem M X = i lambda X.

    Each eigenpair must satisfy its residual certificate; a certificate
    miss is reported as a numerical failure rather than silently returned.
    """
    M = np.asarray(matrix, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] not in (4, 6):
        raise InvalidInputError(
            f"expected a 4x4 or 6x6 matrix, got shape {M.shape}"
        )
    mu, vecs = np.linalg.eig(M)
    norm = float(np.linalg.norm(M, 2))
    lams = []
    for k in range(len(mu)):
        v = vecs[:, k]
        v = v / np.linalg.norm(v)
        res = float(np.linalg.norm(M @ v - mu[k] * v))
        if res > CERTIFICATE_FACTOR * max(norm, 1e-300):
            raise NumericalFailureError(
                f"eigenpair residual {res:.3e} exceeds certificate "
                f"{CERTIFICATE_FACTOR * norm:.3e}"
            )
        lams.append((complex(-1j * mu[k]), res))
    # round the sort keys so conjugate pairs order stably despite eps-level
    # asymmetry in the raw eigenvalues
    lams.sort(key=lambda t: (-round(t[0].real, 9), -round(t[0].imag, 9)))
    return Spectrum(
        eigenvalues=tuple(ev for ev, _ in lams),
        residuals=tuple(r for _, r in lams),
        solution_id=solution_id,
    )


def spectrum_of(sol: StationarySolution, params: Params) -> Spectrum:
    return eigenvalues(stability_matrix(sol, params), solution_id=sol.label())


def classify_stability(spectrum: Spectrum, tol: float = STABILITY_TOL) -> StabilityReport:
    """Stable iff no growth rate exceeds tol.

    Unstable spectra are typed by the eigenvalues that actually grow:
    purely real ones give "real-pair", oscillatory ones "complex-quartet",
    and "mixed" when both kinds grow at once.
    """
    if tol <= 0:
        raise InvalidInputError(f"tol must be positive, got {tol}")
    growth = spectrum.max_growth_rate
    growing = [ev for ev in spectrum.eigenvalues if ev.real > tol]
    if not growing:
        return StabilityReport(True, growth, None, tol)
    real = any(abs(ev.imag) <= tol for ev in growing)
    osc = any(abs(ev.imag) > tol for ev in growing)
    kind = INSTABILITY_MIXED if (real and osc) else (
        INSTABILITY_REAL if real else INSTABILITY_QUARTET
    )
    return StabilityReport(False, growth, kind, tol)


def linear_pt_dimer_spectrum(params: Params, branch_sign: str) -> tuple[complex, complex]:
    """Closed-form nonzero eigenvalue pair of the Kerr dimer without cubic gain/loss.

    Valid for rho_im = 0 below the linear transition point gamma = epsilon.
    The branch sign matches the amplitude root: "+" takes the larger
    squared amplitude, whose pair stays on the imaginary axis for all
    admissible gamma; the "-" pair turns real once
    gamma > sqrt(epsilon^2 - E^2/4).
    """
    if params.rho_im != 0.0:
        raise InvalidRegimeError("closed form requires rho_im = 0")
    if abs(params.gamma) > params.epsilon:
        raise InvalidRegimeError(
            "gamma exceeds the linear transition point epsilon"
        )
    if branch_sign not in ("+", "-"):
        raise InvalidInputError(f"branch_sign must be '+' or '-', got {branch_sign!r}")
    s = 1.0 if branch_sign == "+" else -1.0
    E = params.energy()
    root = math.sqrt(params.epsilon**2 - params.gamma**2)
    lam = 2j * np.sqrt(complex(2.0 * root * root + s * E * root))
    return (complex(lam), complex(-lam))
