"""Branch continuation in the gain/loss parameter and event location.

Sweeps walk gamma on a uniform grid, reconstructing each family at every
node (closed forms for the dimer, enumeration plus nearest-neighbour
tracking for the trimer) and attaching a certified spectrum to each point.
Branch endpoints and qualitative changes are refined by bisection:
termination/saddle-node and emergence on existence of the solution,
stability changes on the sign of the leading growth rate, pitchforks by
matching a coalescing asymmetric pair onto its symmetric parent.
"""

from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass, field

from .branches import (
    SIGNS,
    dimer_asymmetric,
    dimer_special_symmetric,
    dimer_symmetric,
    trimer_asymmetric,
    trimer_special_symmetric,
    trimer_symmetric,
)
from .errors import (
    EmptyBranchError,
    InvalidInputError,
    InvalidRegimeError,
    NoConvergenceError,
    NumericalFailureError,
)
from .linearize import Spectrum, classify_stability, spectrum_of
from .model import (
    CASE_ASYMMETRIC,
    CASE_SPECIAL,
    CASE_SYMMETRIC,
    Params,
    StationarySolution,
)

EVENT_TERMINATION = "termination/saddle-node"
EVENT_PITCHFORK = "pitchfork"
EVENT_STABILITY = "stability-change"
EVENT_EMERGENCE = "emergence"

#: contractual refinement width for located events
EVENT_WIDTH = 1e-6
#: endpoints are refined tighter so coalescing branches measurably meet
FOLD_WIDTH = 1e-10
#: two endpoint solutions this close count as one degenerate point
COALESCE_TOL = 1e-4
#: default continuation step in gamma
DEFAULT_STEP = 0.005

#: how far a solution may move per node before tracking refuses the match
MATCH_RADIUS = 0.25

#: growth-rate threshold used for sweep stability flags.  The phase zero
#: mode is a defective pair, so eigensolver noise splits it by roughly the
#: square root of the backward error; 1e-5 sits safely above that while
#: remaining far below any genuine growth rate of these systems.
SWEEP_STABILITY_TOL = 1e-5

Locator = Callable[[float, StationarySolution | None], StationarySolution | None]


@dataclass(frozen=True)
class BranchSpec:
    """Identity of one branch: topology, case, and root/track selection.

    ``params`` holds everything except gamma, which the sweep supplies.
    Families that determine their own propagation constant must not carry
    an E; the equal-amplitude family at free E must.
    """

    topology: str
    case_label: str
    sign_choice: str
    params: Params

    def __post_init__(self):
        if self.params.topology != self.topology:
            raise InvalidInputError("spec topology does not match params")
        if self.case_label in (CASE_ASYMMETRIC, CASE_SPECIAL):
            if self.params.E is not None:
                raise InvalidInputError(
                    f"case {self.case_label} determines E itself; "
                    "leave params.E unset"
                )
        elif self.case_label == CASE_SYMMETRIC:
            if self.params.E is None:
                raise InvalidInputError(
                    "the equal-amplitude case needs a propagation constant E"
                )
        else:
            raise InvalidInputError(f"unknown case label {self.case_label!r}")

    @property
    def branch_id(self) -> str:
        return f"{self.topology}/{self.case_label}/{self.sign_choice}"


@dataclass(frozen=True)
class BranchPoint:
    gamma: float
    solution: StationarySolution
    spectrum: Spectrum
    stable: bool


@dataclass(frozen=True)
class Event:
    kind: str
    gamma_located: float
    refinement_width: float
    participants: tuple[str, ...]


@dataclass
class BranchCurve:
    """One swept branch: ordered points plus the events found on it."""

    spec: BranchSpec
    points: list[BranchPoint]
    events: list[Event] = field(default_factory=list)
    locator: Locator | None = field(default=None, repr=False, compare=False)

    @property
    def branch_id(self) -> str:
        return self.spec.branch_id

    @property
    def gammas(self) -> list[float]:
        return [p.gamma for p in self.points]

    def __len__(self) -> int:
        return len(self.points)


def _solution_distance(a: StationarySolution, b: StationarySolution) -> float:
    f = _features(a)
    return _feature_distance(f, b)


def _features(sol: StationarySolution) -> tuple[float, ...]:
    return (*sol.amplitudes, sol.E)


def _feature_distance(f: tuple[float, ...], sol: StationarySolution) -> float:
    g = _features(sol)
    d = max(abs(x - y) for x, y in zip(f[:-1], g[:-1]))
    # E is unbounded (it can run like 1/gamma on one trimer family), so its
    # mismatch is measured relative to its size once that passes unity
    scale = max(1.0, 0.5 * (abs(f[-1]) + abs(g[-1])))
    return max(d, abs(f[-1] - g[-1]) / scale)


def _gamma_grid(gamma_range: tuple[float, float], step: float) -> list[float]:
    lo, hi = float(gamma_range[0]), float(gamma_range[1])
    if not (math.isfinite(lo) and math.isfinite(hi)) or lo >= hi:
        raise InvalidInputError(f"need gamma_min < gamma_max, got {gamma_range}")
    if step <= 0:
        raise InvalidInputError(f"step must be positive, got {step}")
    n = int(math.floor((hi - lo) / step + 1e-9))
    grid = [lo + k * step for k in range(n + 1)]
    if grid[-1] < hi - 1e-12:
        grid.append(hi)
    else:
        grid[-1] = hi
    return grid


_TRIMER_ENUM = {
    CASE_SYMMETRIC: trimer_symmetric,
    CASE_ASYMMETRIC: trimer_asymmetric,
    CASE_SPECIAL: trimer_special_symmetric,
}


def _dimer_locator(spec: BranchSpec) -> Locator:
    ctor = {
        CASE_SYMMETRIC: dimer_symmetric,
        CASE_ASYMMETRIC: dimer_asymmetric,
        CASE_SPECIAL: dimer_special_symmetric,
    }[spec.case_label]

    def locate(gamma: float, guess=None):
        try:
            return ctor(spec.params.with_gamma(gamma), spec.sign_choice)
        except (InvalidRegimeError, NoConvergenceError, NumericalFailureError):
            return None

    return locate


def _trimer_locator(spec: BranchSpec, radius: float = MATCH_RADIUS) -> Locator:
    enum = _TRIMER_ENUM[spec.case_label]

    def locate(gamma: float, guess=None):
        try:
            sols = enum(spec.params.with_gamma(gamma))
        except (InvalidRegimeError, NoConvergenceError, NumericalFailureError):
            return None
        if not sols or guess is None:
            return None
        best = min(sols, key=lambda s: _solution_distance(s, guess))
        if _solution_distance(best, guess) > radius:
            return None
        return best

    return locate


def locator_for(spec: BranchSpec) -> Locator:
    if spec.topology == "dimer":
        return _dimer_locator(spec)
    return _trimer_locator(spec)


def _point(gamma: float, sol: StationarySolution, params: Params) -> BranchPoint:
    spectrum = spectrum_of(sol, params.with_gamma(gamma))
    return BranchPoint(
        gamma=float(gamma),
        solution=sol,
        spectrum=spectrum,
        stable=classify_stability(spectrum, SWEEP_STABILITY_TOL).stable,
    )


def _existence_boundary(
    locate: Locator,
    g_yes: float,
    g_no: float,
    guess: StationarySolution,
    width: float = FOLD_WIDTH,
) -> tuple[float, float, StationarySolution]:
    """Bisect the gamma where a tracked solution stops existing.

    The matching guess walks with the bisection so the search follows the
    branch all the way into a fold.
    """
    sol_yes = locate(g_yes, guess) or guess
    while abs(g_no - g_yes) > width:
        mid = 0.5 * (g_yes + g_no)
        sol = locate(mid, sol_yes)
        if sol is not None:
            g_yes, sol_yes = mid, sol
        else:
            g_no = mid
    return 0.5 * (g_yes + g_no), abs(g_no - g_yes), sol_yes


def sweep_branch(
    spec: BranchSpec,
    gamma_range: tuple[float, float],
    step: float = DEFAULT_STEP,
) -> BranchCurve:
    """Continue one branch over a gamma interval.

    Records a point per grid node while the branch exists; endpoint events
    (emergence after the range start, termination before its end) are
    located by bisection.  Raises an empty-branch error when the family
    never exists on the range.
    """
    if spec.topology == "trimer":
        curves = sweep_case(spec.params, spec.case_label, gamma_range, step)
        for curve in curves:
            if curve.spec.sign_choice == spec.sign_choice:
                return curve
        raise EmptyBranchError(
            f"no track {spec.sign_choice!r} found on {gamma_range}"
        )
    locate = locator_for(spec)
    grid = _gamma_grid(gamma_range, step)
    points: list[BranchPoint] = []
    prev_gap: float | None = None
    died_at: float | None = None
    for g in grid:
        sol = locate(g, points[-1].solution if points else None)
        if sol is None:
            if points:
                died_at = g
                break
            prev_gap = g
            continue
        points.append(_point(g, sol, spec.params))
    if not points:
        raise EmptyBranchError(
            f"{spec.branch_id} has no solutions on gamma range {gamma_range}"
        )
    events: list[Event] = []
    if prev_gap is not None:
        g_star, width, _ = _existence_boundary(
            locate, points[0].gamma, prev_gap, points[0].solution
        )
        events.append(Event(EVENT_EMERGENCE, g_star, width, (spec.branch_id,)))
    if died_at is not None:
        g_star, width, _ = _existence_boundary(
            locate, points[-1].gamma, died_at, points[-1].solution
        )
        events.append(Event(EVENT_TERMINATION, g_star, width, (spec.branch_id,)))
    return BranchCurve(spec=spec, points=points, events=events, locator=locate)


def sweep_case(
    params: Params,
    case_label: str,
    gamma_range: tuple[float, float],
    step: float = DEFAULT_STEP,
) -> list[BranchCurve]:
    """Continue every branch of one family over a gamma interval.

    Dimer families have two closed-form branches each.  Trimer families are
    enumerated per node and joined into tracks by nearest-neighbour
    matching; tracks are tagged "track-0", "track-1", ... in order of first
    appearance, which is deterministic for a fixed grid.
    """
    if params.topology == "dimer":
        curves = []
        for sign in SIGNS:
            spec = _make_spec(params, case_label, sign)
            try:
                curves.append(sweep_branch(spec, gamma_range, step))
            except EmptyBranchError:
                continue
        return curves

    enum = _TRIMER_ENUM[case_label]
    base = _spec_params(params, case_label)
    grid = _gamma_grid(gamma_range, step)

    class _Track:
        def __init__(self, tag: str, born_after: float | None):
            self.tag = tag
            self.born_after = born_after
            self.points: list[BranchPoint] = []
            self.dead_at: float | None = None

        def predicted(self) -> tuple[float, ...]:
            # linear extrapolation keeps fast-moving families (E can run
            # like 1/gamma at small gamma) within the match radius
            last = _features(self.points[-1].solution)
            if len(self.points) < 2:
                return last
            prev = _features(self.points[-2].solution)
            return tuple(2.0 * a - b for a, b in zip(last, prev))

    tracks: list[_Track] = []
    counter = 0
    prev_g: float | None = None
    for g in grid:
        try:
            sols = enum(base.with_gamma(g))
        except InvalidRegimeError:
            sols = []
        live = [t for t in tracks if t.dead_at is None]
        pairs = sorted(
            (_feature_distance(t.predicted(), s), ti, si)
            for ti, t in enumerate(live)
            for si, s in enumerate(sols)
        )
        taken_t: set[int] = set()
        taken_s: set[int] = set()
        matched: dict[int, int] = {}
        for d, ti, si in pairs:
            if d > MATCH_RADIUS or ti in taken_t or si in taken_s:
                continue
            taken_t.add(ti)
            taken_s.add(si)
            matched[ti] = si
        for ti, t in enumerate(live):
            if ti in matched:
                t.points.append(_point(g, sols[matched[ti]], base))
            else:
                t.dead_at = g
        for si, s in enumerate(sols):
            if si in taken_s:
                continue
            t = _Track(f"track-{counter}", prev_g)
            counter += 1
            t.points.append(_point(g, s, base))
            tracks.append(t)
        prev_g = g

    curves: list[BranchCurve] = []
    for t in tracks:
        spec = BranchSpec(params.topology, case_label, t.tag, base)
        locate = locator_for(spec)
        events: list[Event] = []
        if t.born_after is not None:
            g_star, width, _ = _existence_boundary(
                locate, t.points[0].gamma, t.born_after, t.points[0].solution
            )
            events.append(Event(EVENT_EMERGENCE, g_star, width, (spec.branch_id,)))
        if t.dead_at is not None:
            g_star, width, _ = _existence_boundary(
                locate, t.points[-1].gamma, t.dead_at, t.points[-1].solution
            )
            events.append(Event(EVENT_TERMINATION, g_star, width, (spec.branch_id,)))
        curves.append(
            BranchCurve(spec=spec, points=t.points, events=events, locator=locate)
        )
    return curves


def _spec_params(params: Params, case_label: str) -> Params:
    if case_label == CASE_SYMMETRIC:
        return params
    return params.with_energy(None)


def _make_spec(params: Params, case_label: str, sign: str) -> BranchSpec:
    return BranchSpec(params.topology, case_label, sign, _spec_params(params, case_label))


def sweep_all(
    params: Params,
    gamma_range: tuple[float, float],
    step: float = DEFAULT_STEP,
) -> list[BranchCurve]:
    """Sweep every family available for the topology (needs params.E for sym-I)."""
    curves: list[BranchCurve] = []
    cases = [CASE_ASYMMETRIC, CASE_SPECIAL]
    if params.E is not None:
        cases.insert(0, CASE_SYMMETRIC)
    for case in cases:
        curves.extend(sweep_case(params, case, gamma_range, step))
    return curves


def _endpoint_probe(
    curve: BranchCurve, event: Event, side_sign: float, offset: float
) -> StationarySolution | None:
    """Solution of a curve a given distance inside its refined endpoint."""
    if curve.locator is None:
        return None
    tail = (
        curve.points[0] if event.kind == EVENT_EMERGENCE else curve.points[-1]
    )
    return curve.locator(event.gamma_located + side_sign * offset, tail.solution)


def _first_probe(
    curve: BranchCurve, event: Event, side_sign: float, h0: float
) -> tuple[float, StationarySolution | None]:
    """Walk a decade ladder of offsets until the branch resolves again.

    Right next to a degenerate point the enumeration may not separate the
    participants (the root pair sits below scan resolution), so the probe
    backs away until it sees the branch.
    """
    h = h0
    for _ in range(5):
        sol = _endpoint_probe(curve, event, side_sign, h)
        if sol is not None:
            return h, sol
        h *= 10.0
    return h, None


def _endpoint_solution(
    curve: BranchCurve, event: Event, side_sign: float
) -> StationarySolution | None:
    h0 = max(2.0 * event.refinement_width, 1e-9)
    return _first_probe(curve, event, side_sign, h0)[1]


def _coalescing(
    ci: BranchCurve, ei: Event, cj: BranchCurve, ej: Event, side: float
) -> bool:
    """Whether two endpoint events are one degenerate point.

    Partners of a single fold approach each other like the square root of
    the distance to it, so the separation may still exceed the absolute
    tolerance at the probe offset; a second probe further out tells a
    shrinking pair from two families that merely pass close by.
    """
    h0 = max(2.0 * max(ei.refinement_width, ej.refinement_width), 1e-9)
    ha, a1 = _first_probe(ci, ei, side, h0)
    hb, b1 = _first_probe(cj, ej, side, h0)
    if a1 is None or b1 is None:
        return False
    h1 = max(ha, hb)
    if ha < h1:
        a1 = _endpoint_probe(ci, ei, side, h1)
    if hb < h1:
        b1 = _endpoint_probe(cj, ej, side, h1)
    if a1 is None or b1 is None:
        return False
    d1 = _solution_distance(a1, b1)
    if d1 < COALESCE_TOL:
        return True
    if d1 > 1e-2:
        return False
    h2 = 100.0 * h1
    a2 = _endpoint_probe(ci, ei, side, h2)
    b2 = _endpoint_probe(cj, ej, side, h2)
    if a2 is None or b2 is None:
        return False
    # sqrt scaling over two decades shrinks a true pair about tenfold
    return d1 <= 0.5 * _solution_distance(a2, b2)


def _merge_endpoint_events(
    curves: list[BranchCurve], kind: str
) -> list[Event]:
    """Group endpoint events that happen at one gamma with coalescing states."""
    # existing side: below the endpoint for terminations, above for births
    side = -1.0 if kind == EVENT_TERMINATION else 1.0
    items = []
    for curve in curves:
        for ev in curve.events:
            if ev.kind == kind:
                items.append((curve, ev))
    merged: list[Event] = []
    used = [False] * len(items)
    for i, (ci, ei) in enumerate(items):
        if used[i]:
            continue
        participants = [ci.branch_id]
        width = ei.refinement_width
        for j in range(i + 1, len(items)):
            cj, ej = items[j]
            if used[j]:
                continue
            if abs(ei.gamma_located - ej.gamma_located) > 1e-5:
                continue
            if _coalescing(ci, ei, cj, ej, side):
                participants.append(cj.branch_id)
                width = max(width, ej.refinement_width)
                used[j] = True
        used[i] = True
        merged.append(Event(kind, ei.gamma_located, width, tuple(sorted(participants))))
    return merged


def _pitchfork_events(curves: list[BranchCurve], births: list[Event]) -> list[Event]:
    """Asymmetric pairs born as one point on a symmetric parent branch."""
    out: list[Event] = []
    by_id = {c.branch_id: c for c in curves}
    for ev in births:
        asym = [p for p in ev.participants if f"/{CASE_ASYMMETRIC}/" in p]
        if len(asym) < 2:
            continue
        child = _endpoint_solution(by_id[asym[0]], ev, +1.0)
        if child is None:
            continue
        for parent in curves:
            if parent.spec.case_label == CASE_ASYMMETRIC:
                continue
            if parent.locator is None or not parent.points:
                continue
            # the parent's nearest recorded point seeds the match
            near = min(parent.points, key=lambda p: abs(p.gamma - ev.gamma_located))
            psol = parent.locator(
                ev.gamma_located + 2.0 * max(ev.refinement_width, 1e-9),
                near.solution,
            )
            if psol is None:
                continue
            if _solution_distance(psol, child) < 1e-3:
                out.append(
                    Event(
                        EVENT_PITCHFORK,
                        ev.gamma_located,
                        ev.refinement_width,
                        tuple(sorted((*ev.participants, parent.branch_id))),
                    )
                )
                break
    return out


def _stability_events(curve: BranchCurve, tol: float) -> list[Event]:
    out: list[Event] = []
    if curve.locator is None:
        return out
    for a, b in zip(curve.points, curve.points[1:]):
        if a.stable == b.stable:
            continue
        g_lo, g_hi = a.gamma, b.gamma
        guess = a.solution
        lo_stable = a.stable
        while g_hi - g_lo > EVENT_WIDTH:
            mid = 0.5 * (g_lo + g_hi)
            sol = curve.locator(mid, guess)
            if sol is None:
                break
            guess = sol
            mid_stable = classify_stability(
                spectrum_of(sol, curve.spec.params.with_gamma(mid)), tol
            ).stable
            if mid_stable == lo_stable:
                g_lo = mid
            else:
                g_hi = mid
        out.append(
            Event(
                EVENT_STABILITY,
                0.5 * (g_lo + g_hi),
                g_hi - g_lo,
                (curve.branch_id,),
            )
        )
    return out


def detect_events(
    curves: list[BranchCurve], tol: float = SWEEP_STABILITY_TOL
) -> list[Event]:
    """Consolidated events across a set of swept curves.

    Endpoint events from the individual sweeps are merged when branches
    meet at a common gamma (saddle-node collisions, twin births); births of
    an asymmetric pair sitting on a symmetric branch additionally produce a
    pitchfork event; stability changes are refined per curve.
    """
    events: list[Event] = []
    events.extend(_merge_endpoint_events(curves, EVENT_TERMINATION))
    births = _merge_endpoint_events(curves, EVENT_EMERGENCE)
    events.extend(births)
    events.extend(_pitchfork_events(curves, births))
    for curve in curves:
        events.extend(_stability_events(curve, tol))
    events.sort(key=lambda e: (e.gamma_located, e.kind, e.participants))
    return events


def analytic_critical_points(params: Params) -> dict[str, float]:
    """Closed-form critical gamma values implied by the parameters.

    Entries are omitted when the defining expression is not real or not
    defined for the given parameters.
    """
    out: dict[str, float] = {}
    eps = params.epsilon
    rho2 = params.rho_r**2 + params.rho_im**2
    out["linear_PT_dimer"] = eps
    out["linear_PT_trimer"] = math.sqrt(2.0) * eps
    if params.rho_im != 0.0:
        out["dimer_pitchfork"] = abs(2.0 * eps * params.rho_im) / math.sqrt(rho2)
        out["dimer_caseIII_termination"] = 2.0 * eps
    if params.E is not None:
        E = params.E
        if params.rho_r != 0.0:
            # gamma where the equal-amplitude discriminant first vanishes
            a = params.rho_r**2
            b = 2.0 * E * params.rho_r * params.rho_im
            c = params.rho_im**2 * E * E - rho2 * eps * eps
            disc = b * b - 4.0 * a * c
            if disc >= 0.0:
                roots = [(-b - math.sqrt(disc)) / (2 * a), (-b + math.sqrt(disc)) / (2 * a)]
                pos = [r for r in roots if r > 0.0]
                if pos:
                    out["dimer_caseI_saddle"] = min(pos)
        if 2.0 * eps * eps - E * E >= 0.0:
            out["trimer_zero_amplitude"] = math.sqrt(2.0 * eps * eps - E * E)
    return out
