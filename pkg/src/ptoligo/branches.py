"""Constructors for the stationary solution families.

Stationary states split into three families according to the factorized
amplitude condition: equal outer amplitudes (case "sym-I"), unequal
amplitudes obeying the gain/loss sum rule (case "asym-II"), and states
satisfying both conditions at once (case "special-III").  Dimer families
come in closed form; trimer families are enumerated by scanning a scalar
defect function, bracketing its sign changes, and polishing every
candidate with a damped Newton iteration on the full stationary system.
"""

from __future__ import annotations

import dataclasses
import math
from collections.abc import Callable

import numpy as np

from .errors import (
    InvalidInputError,
    InvalidRegimeError,
    NoConvergenceError,
    NumericalFailureError,
    SingularJacobianError,
)
from .model import (
    CASE_ASYMMETRIC,
    CASE_SPECIAL,
    CASE_SYMMETRIC,
    Params,
    StationarySolution,
    polar_solution,
    real_flow_jacobian,
    residual_array,
)

SIGNS = ("+", "-")

#: scan resolution for the trimer amplitude interval
GRID_NODES = 2000
#: default upper bound for the squared-amplitude scan
AMP2_MAX = 20.0
#: default half-width of the propagation-constant scan for case III
ENERGY_SCAN = 50.0
#: accept a defect extremum as a double root only this close to zero
TANGENT_TOL = 1e-11
#: phase reconstruction must satisfy sin^2 + cos^2 = 1 this tightly
PHASE_CONSISTENCY_TOL = 1e-9

NEWTON_MAX_ITER = 50
NEWTON_TOL = 1e-12
CERTIFY_TOL = 1e-10


def _sign_value(sign: str) -> float:
    if sign not in SIGNS:
        raise InvalidInputError(f"sign must be '+' or '-', got {sign!r}")
    return 1.0 if sign == "+" else -1.0


def _rho2(params: Params) -> float:
    return params.rho_r**2 + params.rho_im**2


# ---------------------------------------------------------------------------
# Newton refinement on the full stationary system


def newton_refine(
    guess: StationarySolution,
    params: Params,
    tol: float = NEWTON_TOL,
    max_iter: int = NEWTON_MAX_ITER,
) -> StationarySolution:
    """Polish a stationary solution by damped Newton iteration.

    Works on the real and imaginary parts of all sites, with one gauge row
    pinning the gauged phase.  For the families that determine their own
    propagation constant (cases II and III) E is refined together with the
    amplitudes; for case I it stays fixed.

    The guess must already be close: an initial residual of 0.1 or more is
    outside any refinement basin and raises a no-convergence error.
    """
    if guess.topology != params.topology:
        raise InvalidInputError("guess topology does not match params")
    free_energy = guess.case_label in (CASE_ASYMMETRIC, CASE_SPECIAL)
    z = guess.complex_amplitudes()
    E = guess.E
    n = len(z)
    gauge = guess.gauge_index

    def residual_vec(zc: np.ndarray, Ec: float) -> np.ndarray:
        from .model import rotating_rhs_array

        F = rotating_rhs_array(zc, params, Ec)
        r = np.empty(2 * n + 1)
        r[0:2 * n:2] = F.real
        r[1:2 * n:2] = F.imag
        r[2 * n] = zc[gauge].imag
        return r

    r = residual_vec(z, E)
    res = np.abs(r).max()
    if res >= 0.1:
        raise NoConvergenceError(
            f"initial residual {res:.3e} is outside the refinement basin",
            residual=float(res),
        )

    for _ in range(max_iter):
        if res <= tol:
            return polar_solution(
                z, E, guess.case_label, guess.sign_choice, params
            )
        J = np.zeros((2 * n + 1, 2 * n + 1 if free_energy else 2 * n))
        J[: 2 * n, : 2 * n] = real_flow_jacobian(z, params, E)
        if free_energy:
            # dF/dE = -i z
            J[0:2 * n:2, 2 * n] = z.imag
            J[1:2 * n:2, 2 * n] = -z.real
        J[2 * n, 2 * gauge + 1] = 1.0
        step, _, rank, sv = np.linalg.lstsq(J, -r, rcond=None)
        if sv[0] > 0 and (sv[-1] == 0.0 or sv[0] / sv[-1] > 1e14):
            cond = math.inf if sv[-1] == 0.0 else sv[0] / sv[-1]
            if res > 1e-9:
                raise SingularJacobianError("stationary Jacobian is singular", cond)
            # at a fold the system degenerates but the point is converged enough
            return polar_solution(z, E, guess.case_label, guess.sign_choice, params)
        norm0 = float(np.linalg.norm(r))
        alpha = 1.0
        improved = False
        while alpha >= 1.0 / 64.0:
            z_try = z + (step[0:2 * n:2] + 1j * step[1:2 * n:2]) * alpha
            E_try = E + alpha * step[2 * n] if free_energy else E
            r_try = residual_vec(z_try, E_try)
            if np.linalg.norm(r_try) < (1.0 - 1e-4 * alpha) * norm0:
                z, E, r = z_try, E_try, r_try
                improved = True
                break
            alpha *= 0.5
        if not improved:
            raise NoConvergenceError(
                f"refinement stalled at residual {res:.3e}", residual=float(res)
            )
        res = np.abs(r).max()
    if res <= tol:
        return polar_solution(z, E, guess.case_label, guess.sign_choice, params)
    raise NoConvergenceError(
        f"no convergence after {max_iter} iterations, residual {res:.3e}",
        residual=float(res),
    )


def _certify(sol: StationarySolution, params: Params) -> StationarySolution:
    from .model import stationary_residual

    res = stationary_residual(sol, params)
    if res > CERTIFY_TOL:
        raise NumericalFailureError(
            f"constructed solution fails the residual certificate: {res:.3e}"
        )
    return sol


def _polish(
    z: np.ndarray,
    E: float,
    case: str,
    sign: str,
    params: Params,
) -> StationarySolution:
    raw = polar_solution(z, E, case, sign, params)
    if residual_array(z, params, E) > NEWTON_TOL:
        raw = newton_refine(raw, params)
    return _certify(raw, params)


# ---------------------------------------------------------------------------
# Dimer families (closed form)


def dimer_symmetric(params: Params, sign: str) -> StationarySolution | None:
    """Equal-amplitude dimer state for the chosen quadratic root.

    Requires the propagation constant E as a free parameter.  Returns None
    when the discriminant of the squared-amplitude quadratic is negative
    or the selected root is negative.
    """
    if params.topology != "dimer":
        raise InvalidInputError("dimer_symmetric needs dimer params")
    s = _sign_value(sign)
    E = params.energy()
    eps, g = params.epsilon, params.gamma
    rho2 = _rho2(params)
    if rho2 == 0.0:
        raise InvalidRegimeError("cubic coefficient must not vanish")
    half = params.E * params.rho_r - g * params.rho_im
    disc = half * half - rho2 * (g * g + E * E - eps * eps)
    if disc < 0.0:
        return None
    x = (-half + s * math.sqrt(disc)) / rho2
    if x < -1e-12:
        return None
    x = max(x, 0.0)
    A = math.sqrt(x)
    sin_d = (g - params.rho_im * x) / eps
    cos_d = (E + params.rho_r * x) / eps
    if abs(sin_d * sin_d + cos_d * cos_d - 1.0) > PHASE_CONSISTENCY_TOL:
        return None
    delta = math.atan2(sin_d, cos_d)
    z = np.array([A, A * np.exp(1j * delta)])
    return _polish(z, E, CASE_SYMMETRIC, sign, params)


def dimer_asymmetric(params: Params, sign: str) -> StationarySolution | None:
    """Unequal-amplitude dimer state on the gain/loss sum rule.

    E is determined by the family (any params.E is ignored).  Returns None
    outside the existence region; gamma and rho_im must have the same sign
    for the sum rule to admit positive amplitudes.
    """
    if params.topology != "dimer":
        raise InvalidInputError("dimer_asymmetric needs dimer params")
    s = _sign_value(sign)
    g, ri, rr, eps = params.gamma, params.rho_im, params.rho_r, params.epsilon
    if g * ri <= 0.0:
        raise InvalidRegimeError(
            "asymmetric states need gamma and rho_im of equal sign"
        )
    rho2 = _rho2(params)
    rad = g * g / (4 * ri * ri) - eps * eps / rho2
    if rad < 0.0:
        return None
    root = math.sqrt(rad)
    A2 = g / (2 * ri) + s * root
    B2 = g / (2 * ri) - s * root
    if A2 < 0.0 or B2 < 0.0:
        return None
    E = -g * rr / ri
    # both phase components are parameter-fixed on this family
    cos_d = -rr / math.sqrt(rho2)
    sin_d = ri / math.sqrt(rho2)
    delta = math.atan2(sin_d, cos_d)
    z = np.array([math.sqrt(A2), math.sqrt(B2) * np.exp(1j * delta)])
    return _polish(z, E, CASE_ASYMMETRIC, sign, params)


def dimer_special_symmetric(params: Params, energy_sign: str) -> StationarySolution | None:
    """Equal-amplitude dimer state that also satisfies the sum rule.

    Both amplitudes equal sqrt(gamma/(2 rho_im)); the propagation constant
    follows from the phase closure and carries a sign choice.  Returns
    None when |gamma| exceeds 2*epsilon.
    """
    if params.topology != "dimer":
        raise InvalidInputError("dimer_special_symmetric needs dimer params")
    s = _sign_value(energy_sign)
    g, ri, rr, eps = params.gamma, params.rho_im, params.rho_r, params.epsilon
    if g * ri <= 0.0:
        raise InvalidRegimeError(
            "special symmetric states need gamma and rho_im of equal sign"
        )
    rad = 1.0 - g * g / (4 * eps * eps)
    if rad < 0.0:
        return None
    A = math.sqrt(g / (2 * ri))
    E = -g * rr / (2 * ri) + s * eps * math.sqrt(rad)
    sin_d = g / (2 * eps)
    cos_d = (2 * ri * E + g * rr) / (2 * eps * ri)
    if abs(sin_d * sin_d + cos_d * cos_d - 1.0) > PHASE_CONSISTENCY_TOL:
        return None
    delta = math.atan2(sin_d, cos_d)
    z = np.array([A, A * np.exp(1j * delta)])
    return _polish(z, E, CASE_SPECIAL, energy_sign, params)


# ---------------------------------------------------------------------------
# Scalar scan machinery for the trimer families


def _bisect_root(f: Callable[[float], float], lo: float, hi: float, flo: float) -> float:
    for _ in range(90):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if not math.isfinite(fm):
            break
        if flo * fm <= 0.0:
            hi = mid
        else:
            lo, flo = mid, fm
    return 0.5 * (lo + hi)


def _refine_extremum(
    f: Callable[[float], float], lo: float, hi: float, want_max: bool
) -> float:
    # golden-section search; f assumed smooth on [lo, hi]
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(120):
        if b - a < 1e-13 * max(1.0, abs(a), abs(b)):
            break
        pick_left = (fc > fd) if want_max else (fc < fd)
        if pick_left:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def scan_scalar_roots(
    fvec: Callable[[np.ndarray], np.ndarray],
    knots: np.ndarray,
) -> tuple[list[float], list[float]]:
    """Roots of a scalar defect on a knot set.

    Returns (simple_roots, tangent_roots).  Simple roots come from sign
    changes between finite knots.  Tangent roots are interior extrema whose
    defect value vanishes to within TANGENT_TOL of the local scale; they
    capture fold points where two roots coincide and sign-based bracketing
    is blind.
    """
    knots = np.asarray(knots, dtype=float)
    vals = fvec(knots)
    fs = lambda x: float(fvec(np.array([x]))[0])  # noqa: E731

    finite = np.isfinite(vals)
    roots: list[float] = [float(x) for x in knots[finite & (vals == 0.0)]]
    for i in range(len(knots) - 1):
        if finite[i] and finite[i + 1] and vals[i] * vals[i + 1] < 0.0:
            roots.append(_bisect_root(fs, knots[i], knots[i + 1], vals[i]))
    scale = 1.0
    if finite.any():
        scale += float(np.median(np.abs(vals[finite])))
    tangents: list[float] = []
    for i in range(1, len(knots) - 1):
        if not (finite[i - 1] and finite[i] and finite[i + 1]):
            continue
        left, mid, right = vals[i - 1], vals[i], vals[i + 1]
        if (mid - left) * (right - mid) >= 0.0:
            continue
        want_max = mid > left
        x_ext = _refine_extremum(fs, knots[i - 1], knots[i + 1], want_max)
        f_ext = fs(x_ext)
        if not math.isfinite(f_ext):
            continue
        if f_ext * left < 0.0:
            # a root pair hiding inside the cell; split at the extremum
            roots.append(_bisect_root(fs, knots[i - 1], x_ext, left))
            roots.append(_bisect_root(fs, x_ext, knots[i + 1], f_ext))
            continue
        if abs(f_ext) > TANGENT_TOL * scale:
            continue
        span = knots[i + 1] - knots[i - 1]
        if any(abs(x_ext - r) < span for r in roots):
            continue
        tangents.append(x_ext)
    return roots, tangents


def _with_validity_knots(grid: np.ndarray, boundaries: list[float]) -> np.ndarray:
    lo, hi = grid[0], grid[-1]
    extra = []
    for b in boundaries:
        for off in (-1e-9, 1e-9):
            x = b + off
            if lo < x < hi:
                extra.append(x)
    if not extra:
        return grid
    return np.unique(np.concatenate([grid, np.array(extra)]))


# ---------------------------------------------------------------------------
# Trimer case I: equal outer amplitudes, E free


def trimer_sym_b2(x: np.ndarray, params: Params) -> np.ndarray:
    """Middle-site squared amplitude implied by the outer one (case I)."""
    E = params.energy()
    g = params.gamma
    q = (
        _rho2(params) * x * x
        + 2.0 * (E * params.rho_r - g * params.rho_im) * x
        + (E * E + g * g)
    )
    return x * q / params.epsilon**2


def trimer_sym_defect(x: np.ndarray, params: Params) -> np.ndarray:
    """Scalar defect whose positive roots are case I trimer states."""
    x = np.asarray(x, dtype=float)
    E = params.energy()
    y = trimer_sym_b2(x, params)
    out = y * y - E * y + 2.0 * E * x + 2.0 * params.rho_r * x * x
    return np.where(y > 0.0, out, np.nan)


def _trimer_phases(
    A: float, B: float, C: float, E: float, params: Params
) -> tuple[float, float] | None:
    eps, g, rr, ri = params.epsilon, params.gamma, params.rho_r, params.rho_im
    cos_a = (E * A + rr * A**3) / (eps * B)
    sin_a = (g * A - ri * A**3) / (eps * B)
    cos_c = (E * C + rr * C**3) / (eps * B)
    sin_c = -(g * C - ri * C**3) / (eps * B)
    if abs(cos_a**2 + sin_a**2 - 1.0) > PHASE_CONSISTENCY_TOL:
        return None
    if abs(cos_c**2 + sin_c**2 - 1.0) > PHASE_CONSISTENCY_TOL:
        return None
    # gauge: middle phase is zero, so phi_a = -(phi_b - phi_a) etc.
    return -math.atan2(sin_a, cos_a), -math.atan2(sin_c, cos_c)


def _build_trimer(
    x: float, y: float, E: float, case: str, params: Params
) -> StationarySolution | None:
    if x <= 1e-12 or y <= 0.0:
        return None
    A, B = math.sqrt(x), math.sqrt(y)
    phases = _trimer_phases(A, B, A, E, params)
    if phases is None:
        return None
    phi_a, phi_c = phases
    z = np.array([A * np.exp(1j * phi_a), B, A * np.exp(1j * phi_c)])
    return _polish(z, E, case, "#", params)


def _tagged(
    roots: list[float], tangents: list[float]
) -> list[tuple[float, bool]]:
    return [(r, False) for r in roots] + [(t, True) for t in tangents]


def _ordered(sols: list[StationarySolution]) -> list[StationarySolution]:
    def key(s: StationarySolution):
        return (*s.amplitudes, s.E)

    # fold points polish to copies a few 1e-7 apart (the Jacobian null
    # direction leaves the residual flat there), so dedupe generously
    uniq: list[StationarySolution] = []
    for s in sorted(sols, key=key):
        dup = False
        for t in uniq:
            if (
                max(abs(a - b) for a, b in zip(s.amplitudes, t.amplitudes)) < 1e-6
                and abs(s.E - t.E) < 1e-6
            ):
                dup = True
                break
        if not dup:
            uniq.append(s)
    return [
        dataclasses.replace(s, sign_choice=f"#{k}") for k, s in enumerate(uniq)
    ]


def trimer_symmetric(
    params: Params, amp2_max: float = AMP2_MAX, n_grid: int = GRID_NODES
) -> list[StationarySolution]:
    """All equal-outer-amplitude trimer states at the given E and gamma.

    Scans the squared outer amplitude on (0, amp2_max], brackets sign
    changes of the scalar defect, picks up fold tangencies, and Newton
    polishes every candidate.  Solutions come back sorted by amplitude
    with ordinal sign_choice tags.
    """
    if params.topology != "trimer":
        raise InvalidInputError("trimer_symmetric needs trimer params")
    params.energy()
    grid = np.linspace(amp2_max / n_grid * 1e-3, amp2_max, n_grid)
    roots, tangents = scan_scalar_roots(lambda x: trimer_sym_defect(x, params), grid)
    sols = []
    for x, crit in _tagged(roots, tangents):
        y = float(trimer_sym_b2(np.array([x]), params)[0])
        try:
            sol = _build_trimer(x, y, params.energy(), CASE_SYMMETRIC, params)
        except (NoConvergenceError, NumericalFailureError, SingularJacobianError):
            continue
        if sol is not None:
            sols.append(dataclasses.replace(sol, critical=True) if crit else sol)
    return _ordered(sols)


# ---------------------------------------------------------------------------
# Trimer case II: sum rule with unequal outer amplitudes, E determined


def trimer_asym_energy(s: np.ndarray, params: Params, esign: float) -> np.ndarray:
    """Propagation constant on the sum-rule manifold, per energy branch."""
    P = params.gamma / params.rho_im
    Q = s * (P - s)
    return -params.rho_r * P + esign * np.sqrt(_rho2(params) * Q)


def trimer_asym_b2(s: np.ndarray, params: Params, esign: float) -> np.ndarray:
    E = trimer_asym_energy(s, params, esign)
    g, rr, ri = params.gamma, params.rho_r, params.rho_im
    return s * ((E + rr * s) ** 2 + (g - ri * s) ** 2) / params.epsilon**2


def trimer_asym_defect(s: np.ndarray, params: Params, esign: float) -> np.ndarray:
    """Scalar defect for case II, parameterized by the first squared amplitude."""
    s = np.asarray(s, dtype=float)
    P = params.gamma / params.rho_im
    E = trimer_asym_energy(s, params, esign)
    B2 = trimer_asym_b2(s, params, esign)
    out = B2 * B2 - E * B2 + E * P + params.rho_r * (s * s + (P - s) ** 2)
    return np.where(B2 > 0.0, out, np.nan)


def trimer_asymmetric(
    params: Params, n_grid: int = GRID_NODES
) -> list[StationarySolution]:
    """All sum-rule trimer states with unequal outer amplitudes.

    Mirror partners (outer amplitudes swapped) are genuinely distinct
    states and are returned separately.  Empty below the emergence point.
    """
    if params.topology != "trimer":
        raise InvalidInputError("trimer_asymmetric needs trimer params")
    g, ri = params.gamma, params.rho_im
    if g * ri <= 0.0:
        raise InvalidRegimeError(
            "sum-rule states need gamma and rho_im of equal sign"
        )
    P = g / ri
    grid = np.linspace(P * 1e-9, P * (1.0 - 1e-9), n_grid)
    sols: list[StationarySolution] = []
    for esign in (1.0, -1.0):
        roots, tangents = scan_scalar_roots(
            lambda s: trimer_asym_defect(s, params, esign), grid
        )
        for s, crit in _tagged(roots, tangents):
            if abs(s - 0.5 * P) <= 1e-10 * P:
                continue  # belongs to case III
            E = float(trimer_asym_energy(np.array([s]), params, esign)[0])
            B2 = float(trimer_asym_b2(np.array([s]), params, esign)[0])
            c2 = P - s
            if s <= 1e-12 or c2 <= 1e-12 or B2 <= 0.0:
                continue
            A, B, C = math.sqrt(s), math.sqrt(B2), math.sqrt(c2)
            phases = _trimer_phases(A, B, C, E, params)
            if phases is None:
                continue
            z = np.array(
                [A * np.exp(1j * phases[0]), B, C * np.exp(1j * phases[1])]
            )
            try:
                sol = _polish(z, E, CASE_ASYMMETRIC, "#", params)
            except (NoConvergenceError, NumericalFailureError, SingularJacobianError):
                continue
            sols.append(dataclasses.replace(sol, critical=True) if crit else sol)
    return _ordered(sols)


# ---------------------------------------------------------------------------
# Trimer case III: sum rule with equal outer amplitudes, E determined


def trimer_special_b2(E: np.ndarray, params: Params, bsign: float) -> np.ndarray:
    g, ri = params.gamma, params.rho_im
    c0 = E * g / ri + params.rho_r * g * g / (2.0 * ri * ri)
    disc = E * E - 4.0 * c0
    with np.errstate(invalid="ignore"):
        out = 0.5 * (E + bsign * np.sqrt(disc))
    return np.where(disc >= 0.0, out, np.nan)


def trimer_special_defect(E: np.ndarray, params: Params, bsign: float) -> np.ndarray:
    """Scalar defect for case III, parameterized by the propagation constant."""
    E = np.asarray(E, dtype=float)
    g, ri = params.gamma, params.rho_im
    x = g / (2.0 * ri)
    B2 = trimer_special_b2(E, params, bsign)
    out = (
        _rho2(params) * x**3
        + 2.0 * (E * params.rho_r - g * params.rho_im) * x * x
        + (E * E + g * g) * x
        - params.epsilon**2 * B2
    )
    return np.where(np.isfinite(B2) & (B2 > 0.0), out, np.nan)


def trimer_special_symmetric(
    params: Params,
    energy_scan: float = ENERGY_SCAN,
    n_grid: int = 2 * GRID_NODES,
) -> list[StationarySolution]:
    """All sum-rule trimer states with equal outer amplitudes.

    Eliminates the middle amplitude through its quadratic and scans the
    propagation constant on [-energy_scan, energy_scan].  Knots are added
    at the validity boundaries of the quadratic so that roots living in
    narrow admissible windows are not stepped over.
    """
    if params.topology != "trimer":
        raise InvalidInputError("trimer_special_symmetric needs trimer params")
    g, ri, rr = params.gamma, params.rho_im, params.rho_r
    if g * ri <= 0.0:
        raise InvalidRegimeError(
            "sum-rule states need gamma and rho_im of equal sign"
        )
    x = g / (2.0 * ri)
    grid = np.linspace(-energy_scan, energy_scan, n_grid + 1)
    # validity boundaries: product of roots zero, and discriminant zero
    boundaries = [-rr * g / (2.0 * ri)]
    bb, cc = -4.0 * g / ri, -2.0 * rr * g * g / (ri * ri)
    dsc = bb * bb - 4.0 * cc
    if dsc >= 0.0:
        boundaries += [(-bb - math.sqrt(dsc)) / 2.0, (-bb + math.sqrt(dsc)) / 2.0]
    grid = _with_validity_knots(grid, boundaries)
    sols: list[StationarySolution] = []
    for bsign in (1.0, -1.0):
        roots, tangents = scan_scalar_roots(
            lambda E: trimer_special_defect(E, params, bsign), grid
        )
        for E, crit in _tagged(roots, tangents):
            B2 = float(trimer_special_b2(np.array([E]), params, bsign)[0])
            if not math.isfinite(B2) or B2 <= 0.0 or x <= 1e-12:
                continue
            try:
                sol = _build_trimer(x, B2, E, CASE_SPECIAL, params)
            except (NoConvergenceError, NumericalFailureError, SingularJacobianError):
                continue
            if sol is not None:
                sols.append(dataclasses.replace(sol, critical=True) if crit else sol)
    return _ordered(sols)


# ---------------------------------------------------------------------------
# Catalogs


def dimer_solutions(params: Params) -> list[StationarySolution]:
    """Every dimer state available at these parameters, deterministically ordered."""
    sols: list[StationarySolution] = []
    if params.E is not None:
        for sign in SIGNS:
            sol = dimer_symmetric(params, sign)
            if sol is not None and sol.amplitudes[0] > 1e-12:
                sols.append(sol)
    for ctor in (dimer_asymmetric, dimer_special_symmetric):
        for sign in SIGNS:
            try:
                sol = ctor(params, sign)
            except InvalidRegimeError:
                continue
            if sol is not None:
                sols.append(sol)
    return sols


def trimer_solutions(params: Params) -> list[StationarySolution]:
    """Every trimer state available at these parameters, deterministically ordered."""
    sols: list[StationarySolution] = []
    if params.E is not None:
        sols.extend(trimer_symmetric(params))
    for ctor in (trimer_asymmetric, trimer_special_symmetric):
        try:
            sols.extend(ctor(params))
        except InvalidRegimeError:
            continue
    return sols


def all_solutions(params: Params) -> list[StationarySolution]:
    if params.topology == "dimer":
        return dimer_solutions(params)
    return trimer_solutions(params)
