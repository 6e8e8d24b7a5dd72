"""Shared fixtures: the reference parameter sets and the session sweeps.

The sweeps are the expensive part of the suite (tens of seconds), so they
run once per session and are shared between the continuation tests and the
acceptance criteria.
"""

from typing import NamedTuple

import pytest

from ptoligo.continuation import BranchCurve, Event, detect_events, sweep_all, sweep_case
from ptoligo.model import Params

# reference parameter sets used throughout the suite
DIMER = Params(epsilon=1.0, gamma=0.0, rho_r=-2.0, rho_im=1.0, E=1.0, topology="dimer")
TRIMER = Params(epsilon=1.0, gamma=0.0, rho_r=-1.0, rho_im=1.0, E=1.0, topology="trimer")
RHO0_TRIMER = Params(
    epsilon=1.0, gamma=0.0, rho_r=-1.0, rho_im=0.0, E=1.0, topology="trimer"
)


class SweepResult(NamedTuple):
    curves: list[BranchCurve]
    events: list[Event]


def _swept(curves: list[BranchCurve]) -> SweepResult:
    return SweepResult(curves, detect_events(curves))


@pytest.fixture(scope="session")
def dimer_sweep() -> SweepResult:
    """All six dimer branches over a range containing every bifurcation."""
    return _swept(sweep_all(DIMER, (0.5, 2.2), step=0.005))


@pytest.fixture(scope="session")
def trimer_sym_sweep() -> SweepResult:
    """Equal-outer-amplitude trimer branches at fixed E=1."""
    return _swept(sweep_case(TRIMER, "sym-I", (0.9, 3.0), step=0.005))


@pytest.fixture(scope="session")
def trimer_asym_special_sweep() -> SweepResult:
    """Free-E trimer branches; sym-I is dropped because E is not pinned."""
    return _swept(sweep_all(TRIMER.with_energy(None), (0.5, 2.2), step=0.005))


@pytest.fixture(scope="session")
def rho0_trimer_sweep() -> SweepResult:
    """Purely real cubic coefficient: the linear-PT validation regime."""
    return _swept(sweep_case(RHO0_TRIMER, "sym-I", (0.9, 1.5), step=0.0025))
