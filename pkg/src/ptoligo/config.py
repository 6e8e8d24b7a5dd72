"""Run configuration: schema, validation, and JSON loading.

A run is described by one JSON file with four blocks:

    {
      "params":   {"epsilon": 1.0, "rho_r": -2.0, "rho_im": 1.0,
                   "topology": "dimer", "gamma": 1.5 | "gamma_range": [a, b],
                   "E": 1.0},
      "command":  {"name": "sweep", "case": "all", "sign": "+"},
      "numerics": {"step": 0.005, "seed": 1234, "t_end": 200.0, ...},
      "output":   {"directory": "out", "formats": ["csv", "json"]}
    }

``command`` may also be a bare string when no selection is needed.  The
propagation constant E must be omitted for the families that determine it
themselves; supplying one there is rejected rather than ignored.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

from .errors import SchemaError
from .model import (
    CASE_ASYMMETRIC,
    CASE_LABELS,
    CASE_SPECIAL,
    CASE_SYMMETRIC,
    Params,
    TOPOLOGIES,
)

COMMANDS = ("sweep", "spectrum", "evolve", "critical", "validate")
CASE_ALL = "all"

#: commands that act on a single gamma rather than an interval
POINT_COMMANDS = ("spectrum", "evolve")


@dataclass(frozen=True)
class Numerics:
    step: float = 0.005
    seed: int = 1234
    t_end: float = 200.0
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    output_dt: float = 0.1
    perturbation: float = 1e-8
    stability_tol: float = 1e-5
    blow_up_threshold: float = 1e6

    def __post_init__(self):
        for name in (
            "step",
            "t_end",
            "rel_tol",
            "abs_tol",
            "output_dt",
            "blow_up_threshold",
        ):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value)):
                raise SchemaError(f"numerics.{name} must be a finite number")
            if value <= 0:
                raise SchemaError(f"numerics.{name} must be positive")
        if not (
            isinstance(self.perturbation, (int, float))
            and math.isfinite(self.perturbation)
            and self.perturbation >= 0
        ):
            raise SchemaError("numerics.perturbation must be >= 0 and finite")
        if not (
            isinstance(self.stability_tol, (int, float))
            and math.isfinite(self.stability_tol)
            and self.stability_tol > 0
        ):
            raise SchemaError("numerics.stability_tol must be positive")
        if not isinstance(self.seed, int) or isinstance(self.seed, bool):
            raise SchemaError("numerics.seed must be an integer")
        if self.seed < 0:
            raise SchemaError("numerics.seed must be non-negative")


@dataclass(frozen=True)
class OutputOptions:
    directory: str = "."
    formats: tuple[str, ...] = ("csv", "json")

    def __post_init__(self):
        if not isinstance(self.directory, str) or not self.directory:
            raise SchemaError("output.directory must be a non-empty string")
        fmts = self.formats
        if isinstance(fmts, str):
            fmts = ("csv", "json") if fmts == "both" else (fmts,)
        if not fmts:
            raise SchemaError("output.formats must not be empty")
        for f in fmts:
            if f not in ("csv", "json"):
                raise SchemaError(
                    f"output.formats entries must be 'csv' or 'json', got {f!r}"
                )
        object.__setattr__(self, "formats", tuple(dict.fromkeys(fmts)))

    @property
    def wants_csv(self) -> bool:
        return "csv" in self.formats

    @property
    def wants_json(self) -> bool:
        return "json" in self.formats


@dataclass(frozen=True)
class RunConfig:
    """Validated description of one CLI run."""

    params: Params
    command: str
    gamma_range: tuple[float, float] | None = None
    case: str = CASE_ALL
    sign: str | None = None
    numerics: Numerics = field(default_factory=Numerics)
    output: OutputOptions = field(default_factory=OutputOptions)

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise SchemaError(
                f"command must be one of {COMMANDS}, got {self.command!r}"
            )
        if self.case != CASE_ALL and self.case not in CASE_LABELS:
            raise SchemaError(
                f"case must be one of {CASE_LABELS} or 'all', got {self.case!r}"
            )
        if self.command == "sweep":
            if self.gamma_range is None:
                raise SchemaError("sweep needs params.gamma_range")
        elif self.command in POINT_COMMANDS:
            if self.gamma_range is not None:
                raise SchemaError(
                    f"{self.command} works at a single gamma; "
                    "give params.gamma, not gamma_range"
                )
        if self.command in ("spectrum", "evolve") and self.case == CASE_ALL:
            raise SchemaError(f"{self.command} needs a specific command.case")
        # E is determined by the family itself for these two cases; a
        # supplied value would silently contradict the constructed states
        if self.params.E is not None and self.case in (
            CASE_ASYMMETRIC,
            CASE_SPECIAL,
        ):
            raise SchemaError(
                f"case {self.case} determines E = -gamma*rho_r/rho_im"
                " (up to the root choice); remove params.E"
            )
        # "all" without E quietly drops the equal-amplitude family (it has
        # no determined E); asking for that family explicitly does not
        if (
            self.command in ("spectrum", "evolve", "sweep")
            and self.case == CASE_SYMMETRIC
            and self.params.E is None
        ):
            raise SchemaError(
                "the equal-amplitude family needs params.E; set it or pick "
                "a self-determined case"
            )

    def with_output(self, **kw) -> RunConfig:
        return replace(self, output=replace(self.output, **kw))

    def with_seed(self, seed: int) -> RunConfig:
        return replace(self, numerics=replace(self.numerics, seed=seed))


def _require_mapping(obj, where: str) -> dict:
    if not isinstance(obj, dict):
        raise SchemaError(f"{where} must be an object, got {type(obj).__name__}")
    return obj


def _finite_number(obj, where: str) -> float:
    if isinstance(obj, bool) or not isinstance(obj, (int, float)):
        raise SchemaError(f"{where} must be a number")
    value = float(obj)
    if not math.isfinite(value):
        raise SchemaError(f"{where} must be finite")
    return value


def config_from_mapping(raw: dict, default_command: str | None = None) -> RunConfig:
    """Build and validate a run configuration from parsed JSON.

    ``default_command`` fills in a missing command block (the CLI passes
    its subcommand); an explicit block always wins.
    """
    raw = _require_mapping(raw, "config")
    if "command" not in raw and default_command is not None:
        raw = {**raw, "command": default_command}
    unknown = set(raw) - {"params", "command", "numerics", "output"}
    if unknown:
        raise SchemaError(f"unknown top-level keys: {sorted(unknown)}")

    pblock = _require_mapping(raw.get("params"), "params")
    allowed = {"epsilon", "gamma", "gamma_range", "rho_r", "rho_im", "E", "topology"}
    unknown = set(pblock) - allowed
    if unknown:
        raise SchemaError(f"unknown params keys: {sorted(unknown)}")
    for key in ("epsilon", "rho_r", "rho_im"):
        if key not in pblock:
            raise SchemaError(f"params.{key} is required")
    topology = pblock.get("topology", "dimer")
    if topology not in TOPOLOGIES:
        raise SchemaError(f"params.topology must be one of {TOPOLOGIES}")

    has_gamma = "gamma" in pblock
    has_range = "gamma_range" in pblock
    if has_gamma == has_range:
        raise SchemaError("give exactly one of params.gamma or params.gamma_range")
    gamma_range = None
    if has_range:
        rng = pblock["gamma_range"]
        if not (isinstance(rng, (list, tuple)) and len(rng) == 2):
            raise SchemaError("params.gamma_range must be a [min, max] pair")
        lo = _finite_number(rng[0], "params.gamma_range[0]")
        hi = _finite_number(rng[1], "params.gamma_range[1]")
        if lo >= hi:
            raise SchemaError("params.gamma_range needs min < max")
        gamma_range = (lo, hi)
        gamma = lo
    else:
        gamma = _finite_number(pblock["gamma"], "params.gamma")

    energy = None
    if pblock.get("E") is not None:
        energy = _finite_number(pblock["E"], "params.E")

    params = Params(
        epsilon=_finite_number(pblock["epsilon"], "params.epsilon"),
        gamma=gamma,
        rho_r=_finite_number(pblock["rho_r"], "params.rho_r"),
        rho_im=_finite_number(pblock["rho_im"], "params.rho_im"),
        E=energy,
        topology=topology,
    )

    cblock = raw.get("command")
    if isinstance(cblock, str):
        command, case, sign = cblock, CASE_ALL, None
    else:
        cblock = _require_mapping(cblock, "command")
        unknown = set(cblock) - {"name", "case", "sign"}
        if unknown:
            raise SchemaError(f"unknown command keys: {sorted(unknown)}")
        command = cblock.get("name")
        if not isinstance(command, str):
            raise SchemaError("command.name must be a string")
        case = cblock.get("case", CASE_ALL)
        sign = cblock.get("sign")
        if sign is not None and not isinstance(sign, str):
            raise SchemaError("command.sign must be a string")

    nblock = raw.get("numerics", {})
    nblock = _require_mapping(nblock, "numerics")
    unknown = set(nblock) - set(Numerics.__dataclass_fields__)
    if unknown:
        raise SchemaError(f"unknown numerics keys: {sorted(unknown)}")
    numerics = Numerics(**nblock)

    oblock = raw.get("output", {})
    oblock = _require_mapping(oblock, "output")
    unknown = set(oblock) - {"directory", "formats"}
    if unknown:
        raise SchemaError(f"unknown output keys: {sorted(unknown)}")
    kw = {}
    if "directory" in oblock:
        kw["directory"] = oblock["directory"]
    if "formats" in oblock:
        kw["formats"] = (
            tuple(oblock["formats"])
            if isinstance(oblock["formats"], list)
            else oblock["formats"]
        )
    output = OutputOptions(**kw)

    return RunConfig(
        params=params,
        command=command,
        gamma_range=gamma_range,
        case=case,
        sign=sign,
        numerics=numerics,
        output=output,
    )


def load_config(path: str | Path, default_command: str | None = None) -> RunConfig:
    """Read and validate a JSON config file."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise SchemaError(f"cannot read config {path}: {exc}") from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"config {path} is not valid JSON: {exc}") from exc
    return config_from_mapping(raw, default_command)
