"""INI run configuration: one ``[model]`` and one ``[experiment]`` section.

Example::

    [model]
    family = CompoundPoissonDrift
    rate = 1
    jump_law = constant
    jump_param = 1

    [experiment]
    name = stationarity
    t_list = 1, 5
    n_reps = 10000
    seed = 7

Keys in ``[experiment]`` are the experiment's own parameters plus the
shared keys below; anything else is rejected.  Omitted parameters take the
experiment's defaults, and the filled-in table is echoed into the outputs.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .errors import ConfigError
from .experiments import EXPERIMENTS
from .models import LevyModel, model_from_config, model_to_config

MAX_SEED = (1 << 64) - 1

# keys accepted in [experiment] for every command, with their defaults
SHARED_DEFAULTS: dict[str, Any] = {"seed": 0, "out": "out", "step": 0.0, "rel_tol": 1e-8, "budget_s": 0.0}

SIMULATE_DEFAULTS: dict[str, Any] = {"kind": "U", "start": 1.0, "horizon": 10.0, "n_points": 101, "n_reps": 1}
ORACLE_DEFAULTS: dict[str, Any] = {"n_max": 10}
PROCESS_KINDS = ("X", "U", "V", "U-stationary")


@dataclass
class RunConfig:
    command: str
    model: LevyModel
    experiment: str
    params: dict[str, Any]
    seed: int = 0
    out: str = "out"
    step: float | None = None
    rel_tol: float = 1e-8
    budget_s: float | None = None
    source: dict[str, dict[str, str]] = field(default_factory=dict, repr=False)

    def echo(self) -> dict[str, Any]:
        """Fully resolved configuration, defaults included."""
        return {
            "command": self.command,
            "model": model_to_config(self.model),
            "experiment": {
                "name": self.experiment,
                **self.params,
                "seed": self.seed,
                "out": self.out,
                "step": self.step or 0.0,
                "rel_tol": self.rel_tol,
                "budget_s": self.budget_s or 0.0,
            },
        }


def _coerce(key: str, raw: str, default: Any) -> Any:
    text = raw.strip()
    try:
        if isinstance(default, bool):
            if text.lower() in ("1", "true", "yes", "on"):
                return True
            if text.lower() in ("0", "false", "no", "off"):
                return False
            raise ValueError
        if isinstance(default, int):
            try:
                return int(text)
            except ValueError:
                v = float(text)  # accept "1e4"
                if not v.is_integer():
                    raise
                return int(v)
        if isinstance(default, float):
            return float(text)
        if isinstance(default, tuple):
            items = [p.strip() for p in text.split(",") if p.strip()]
            if not items:
                raise ValueError
            conv = int if all(isinstance(d, int) for d in default) else float
            return tuple(conv(p) for p in items)
    except ValueError:
        raise ConfigError(f"experiment section: key {key!r} has an invalid value {raw!r}") from None
    return text


def _defaults_for(command: str, name: str) -> dict[str, Any]:
    if command == "simulate":
        return dict(SIMULATE_DEFAULTS)
    if command == "oracle":
        return dict(ORACLE_DEFAULTS)
    if name not in EXPERIMENTS:
        known = ", ".join(sorted(EXPERIMENTS))
        raise ConfigError(f"experiment section: unknown experiment {name!r} (expected one of {known})")
    return dict(EXPERIMENTS[name].defaults)


def parse_config(text: str, command: str) -> RunConfig:
    """Parse INI text for `command` (``simulate``, ``oracle`` or ``verify``)."""
    cp = configparser.ConfigParser(interpolation=None, delimiters=("=",), comment_prefixes=("#", ";"))
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}".splitlines()[0]) from None
    extra = [s for s in cp.sections() if s not in ("model", "experiment")]
    if extra:
        raise ConfigError(f"unknown section [{extra[0]}]")
    if not cp.has_section("model"):
        raise ConfigError("missing [model] section")
    model_section = dict(cp["model"])
    model = model_from_config(model_section)
    exp_section = dict(cp["experiment"]) if cp.has_section("experiment") else {}

    if command == "verify":
        if "name" not in exp_section:
            raise ConfigError("experiment section: missing required key 'name'")
        name = exp_section["name"].strip()
    else:
        name = exp_section.get("name", command).strip()
        if name != command:
            raise ConfigError(f"experiment section: name {name!r} does not match command {command!r}")
    defaults = _defaults_for(command, name)

    params = dict(defaults)
    shared = dict(SHARED_DEFAULTS)
    for key, raw in exp_section.items():
        if key == "name":
            continue
        if key in defaults:
            params[key] = _coerce(key, raw, defaults[key])
        elif key in shared:
            shared[key] = _coerce(key, raw, SHARED_DEFAULTS[key])
        else:
            raise ConfigError(f"experiment section: unknown key {key!r} for {name!r}")
    if command == "simulate" and params["kind"] not in PROCESS_KINDS:
        raise ConfigError(f"experiment section: kind must be one of {', '.join(PROCESS_KINDS)}")
    if not 0 <= shared["seed"] <= MAX_SEED:
        raise ConfigError("experiment section: seed must be an unsigned 64-bit integer")
    if shared["step"] < 0 or not 0 < shared["rel_tol"] <= 0.1 or shared["budget_s"] < 0:
        raise ConfigError("experiment section: step and budget_s must be >= 0 and rel_tol in (0, 0.1]")
    return RunConfig(
        command=command,
        model=model,
        experiment=name,
        params=params,
        seed=shared["seed"],
        out=shared["out"],
        step=shared["step"] or None,
        rel_tol=shared["rel_tol"],
        budget_s=shared["budget_s"] or None,
        source={"model": model_section, "experiment": exp_section},
    )


def load_config(path: str | Path, command: str) -> RunConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    return parse_config(text, command)
