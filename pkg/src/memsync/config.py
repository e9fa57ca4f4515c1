"""Scenario configuration files and full-state checkpoints.

Configs are strict JSON: unknown keys are rejected with their full key path,
missing sections fall back to the reference defaults (32x32 grid, dx = 1,
dt = 0.00025, m = 4, 2000 steps, C* = 0.4). A parsed config round-trips
through ``to_dict`` / ``from_dict`` unchanged.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigurationError
from .grids import FieldGrid, NetworkState, NeuronFields
from .models import (
    FHN_DEFAULTS,
    HR_DEFAULTS,
    CouplingParams,
    GeneralParams,
    ReactionModel,
    fhn_general_params,
    fhn_model,
    hr_assumption_params,
    hr_general_params,
    hr_model,
)
from .solver import Scenario

MODEL_KINDS = ("hindmarsh_rose", "fitzhugh_nagumo")
# P defaults are the reference coupling strengths the built-in scenarios are
# exercised with.
_DEFAULT_P = {"hindmarsh_rose": 19.60, "fitzhugh_nagumo": 19.58}
_MODEL_DEFAULTS = {"hindmarsh_rose": HR_DEFAULTS, "fitzhugh_nagumo": FHN_DEFAULTS}


@dataclass
class ScenarioConfig:
    """Parsed, validated scenario configuration."""

    model_kind: str = "hindmarsh_rose"
    model_params: dict = field(default_factory=dict)
    nx: int = 32
    ny: int = 32
    dx: float = 1.0
    dt: float = 0.00025
    n_steps: int = 2000
    record_every: int = 1
    m: int = 4
    include_self: bool = True
    P: float | None = None
    r: float = 0.1
    V: float = 0.5
    u_e: float | None = None
    seed: int = 0
    amplitude: float = 0.1
    checkpoint: str | None = None
    C_star: float = 0.4
    tail_fraction: float = 0.1
    burn_in_fraction: float = 0.1
    output_dir: str | None = None

    def __post_init__(self):
        if self.model_kind not in MODEL_KINDS:
            raise ConfigurationError(
                f"unknown model kind {self.model_kind!r}, expected one of {MODEL_KINDS}",
                key_path="model.kind",
            )
        allowed = set(_MODEL_DEFAULTS[self.model_kind])
        for key in self.model_params:
            if key not in allowed:
                raise ConfigurationError(
                    f"unknown parameter {key!r} for model {self.model_kind}",
                    key_path=f"model.params.{key}",
                )
        if self.P is None:
            self.P = _DEFAULT_P[self.model_kind]

    @property
    def coupling_P(self) -> float:
        return self.P

    def full_model_params(self) -> dict:
        merged = dict(_MODEL_DEFAULTS[self.model_kind])
        merged.update(self.model_params)
        return merged

    def build_model(self) -> ReactionModel:
        params = self.full_model_params()
        factory = hr_model if self.model_kind == "hindmarsh_rose" else fhn_model
        return factory(**params)

    def build_coupling(self) -> CouplingParams:
        return CouplingParams(P=self.P, r=self.r, V=self.V, u_e=self.u_e)

    def general_params(self) -> GeneralParams:
        """Abstract constants feeding the threshold chain."""
        p = self.full_model_params()
        if self.model_kind == "hindmarsh_rose":
            return hr_general_params(p["a1"], p["b1"], p["alpha1"], p["beta1"], p["q1"], p["r1"])
        return fhn_general_params(p["alpha2"], p["beta2"], p["gamma2"], p["a2"], p["b2"], p["c2"])

    def assumption_params(self) -> GeneralParams:
        """Abstract constants the model satisfies pointwise (for verification)."""
        p = self.full_model_params()
        if self.model_kind == "hindmarsh_rose":
            return hr_assumption_params(p["a1"], p["b1"], p["alpha1"], p["beta1"], p["q1"], p["r1"])
        return fhn_general_params(p["alpha2"], p["beta2"], p["gamma2"], p["a2"], p["b2"], p["c2"])

    @property
    def area(self) -> float:
        return self.nx * self.dx * self.ny * self.dx

    def build_scenario(
        self,
        workers: int = 1,
        probe: tuple[int, int] | None = None,
        allow_unstable: bool = False,
        config_dir: Path | None = None,
    ) -> Scenario:
        initial = None
        if self.checkpoint is not None:
            path = Path(self.checkpoint)
            if config_dir is not None and not path.is_absolute():
                path = config_dir / path
            initial = load_state(path)
        return Scenario(
            model=self.build_model(),
            coupling=self.build_coupling(),
            nx=self.nx,
            ny=self.ny,
            dx=self.dx,
            dt=self.dt,
            n_steps=self.n_steps,
            m=self.m,
            seed=self.seed,
            amplitude=self.amplitude,
            initial_state=initial,
            record_every=self.record_every,
            include_self=self.include_self,
            workers=workers,
            allow_unstable=allow_unstable,
            probe=probe,
        )

    def to_dict(self) -> dict:
        init: dict = (
            {"checkpoint": self.checkpoint}
            if self.checkpoint is not None
            else {"seed": self.seed, "amplitude": self.amplitude}
        )
        coupling = {"P": self.P, "r": self.r, "V": self.V}
        if self.u_e is not None:
            coupling["u_e"] = self.u_e
        d = {
            "model": {"kind": self.model_kind, "params": dict(self.model_params)},
            "grid": {"nx": self.nx, "ny": self.ny, "dx": self.dx},
            "time": {"dt": self.dt, "n_steps": self.n_steps, "record_every": self.record_every},
            "network": {"m": self.m, "include_self": self.include_self, "coupling": coupling},
            "init": init,
            "analysis": {
                "C_star": self.C_star,
                "tail_fraction": self.tail_fraction,
                "burn_in_fraction": self.burn_in_fraction,
            },
        }
        if self.output_dir is not None:
            d["output"] = {"dir": self.output_dir}
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "ScenarioConfig":
        return _parse_config(data)


def _expect_mapping(value, path):
    if not isinstance(value, dict):
        raise ConfigurationError(f"expected an object, got {type(value).__name__}", key_path=path)
    return value


def _check_keys(section: dict, allowed: set, path: str):
    for key in section:
        if key not in allowed:
            raise ConfigurationError("unknown key", key_path=f"{path}.{key}")


def _number(section, key, path, default, kind=float, optional=False):
    if key not in section:
        return default
    val = section[key]
    if val is None and optional:
        return None
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise ConfigurationError(f"expected a number, got {val!r}", key_path=f"{path}.{key}")
    if kind is int and not float(val).is_integer():
        raise ConfigurationError(f"expected an integer, got {val!r}", key_path=f"{path}.{key}")
    return kind(val)


def _parse_config(data: dict) -> ScenarioConfig:
    _expect_mapping(data, "<root>")
    _check_keys(data, {"model", "grid", "time", "network", "init", "analysis", "output"}, "<root>")

    model = _expect_mapping(data.get("model", {}), "model")
    _check_keys(model, {"kind", "params"}, "model")
    kind = model.get("kind", "hindmarsh_rose")
    params = _expect_mapping(model.get("params", {}), "model.params")
    for key, val in params.items():
        if isinstance(val, bool) or not isinstance(val, (int, float)):
            raise ConfigurationError(f"expected a number, got {val!r}", key_path=f"model.params.{key}")

    grid = _expect_mapping(data.get("grid", {}), "grid")
    _check_keys(grid, {"nx", "ny", "dx"}, "grid")
    time_sec = _expect_mapping(data.get("time", {}), "time")
    _check_keys(time_sec, {"dt", "n_steps", "record_every"}, "time")

    network = _expect_mapping(data.get("network", {}), "network")
    _check_keys(network, {"m", "include_self", "coupling"}, "network")
    coupling = _expect_mapping(network.get("coupling", {}), "network.coupling")
    _check_keys(coupling, {"P", "r", "V", "u_e"}, "network.coupling")
    include_self = network.get("include_self", True)
    if not isinstance(include_self, bool):
        raise ConfigurationError("expected true/false", key_path="network.include_self")

    init = _expect_mapping(data.get("init", {}), "init")
    _check_keys(init, {"seed", "amplitude", "checkpoint"}, "init")
    if "checkpoint" in init and ("seed" in init or "amplitude" in init):
        raise ConfigurationError(
            "give either a checkpoint or seed/amplitude, not both", key_path="init"
        )
    checkpoint = init.get("checkpoint")
    if checkpoint is not None and not isinstance(checkpoint, str):
        raise ConfigurationError("expected a path string", key_path="init.checkpoint")

    analysis = _expect_mapping(data.get("analysis", {}), "analysis")
    _check_keys(analysis, {"C_star", "tail_fraction", "burn_in_fraction"}, "analysis")

    output = _expect_mapping(data.get("output", {}), "output")
    _check_keys(output, {"dir"}, "output")
    output_dir = output.get("dir")
    if output_dir is not None and not isinstance(output_dir, str):
        raise ConfigurationError("expected a path string", key_path="output.dir")

    try:
        return ScenarioConfig(
            model_kind=kind,
            model_params={k: float(v) for k, v in params.items()},
            nx=_number(grid, "nx", "grid", 32, int),
            ny=_number(grid, "ny", "grid", 32, int),
            dx=_number(grid, "dx", "grid", 1.0),
            dt=_number(time_sec, "dt", "time", 0.00025),
            n_steps=_number(time_sec, "n_steps", "time", 2000, int),
            record_every=_number(time_sec, "record_every", "time", 1, int),
            m=_number(network, "m", "network", 4, int),
            include_self=include_self,
            P=_number(coupling, "P", "network.coupling", None, optional=True),
            r=_number(coupling, "r", "network.coupling", 0.1),
            V=_number(coupling, "V", "network.coupling", 0.5),
            u_e=_number(coupling, "u_e", "network.coupling", None, optional=True),
            seed=_number(init, "seed", "init", 0, int),
            amplitude=_number(init, "amplitude", "init", 0.1),
            checkpoint=checkpoint,
            C_star=_number(analysis, "C_star", "analysis", 0.4),
            tail_fraction=_number(analysis, "tail_fraction", "analysis", 0.1),
            burn_in_fraction=_number(analysis, "burn_in_fraction", "analysis", 0.1),
            output_dir=output_dir,
        )
    except ConfigurationError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigurationError(str(exc)) from exc


def load_config(path: str | Path) -> ScenarioConfig:
    """Read and validate a JSON scenario config."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigurationError(f"cannot read config: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"invalid JSON in {path}: {exc}") from exc
    return _parse_config(data)


def save_config(cfg: ScenarioConfig, path: str | Path):
    Path(path).write_text(json.dumps(cfg.to_dict(), indent=2) + "\n", encoding="utf-8")


_STATE_FORMAT = "memsync state v1"


def save_state(path: str | Path, state: NetworkState):
    """Write a full network state as an .npz checkpoint."""
    arrays = {
        "format": np.array(_STATE_FORMAT),
        "t": np.array(state.t),
        "dx": np.array(state.dx),
        "m": np.array(state.m),
        "ell": np.array(state.ell),
    }
    for i, n in enumerate(state.neurons):
        arrays[f"u_{i}"] = n.u.values
        for c, g in enumerate(n.z):
            arrays[f"z_{i}_{c}"] = g.values
        arrays[f"rho_{i}"] = n.rho.values
    np.savez(path, **arrays)


def load_state(path: str | Path) -> NetworkState:
    """Read an .npz checkpoint back into a network state."""
    try:
        data = np.load(path)
    except OSError as exc:
        raise ConfigurationError(f"cannot read checkpoint: {exc}") from exc
    if "format" not in data or str(data["format"]) != _STATE_FORMAT:
        raise ConfigurationError(f"not a state checkpoint: {path}")
    dx = float(data["dx"])
    m, ell = int(data["m"]), int(data["ell"])
    neurons = []
    for i in range(m):
        u = data[f"u_{i}"]
        nx, ny = u.shape
        neurons.append(
            NeuronFields(
                FieldGrid(nx, ny, dx, u),
                [FieldGrid(nx, ny, dx, data[f"z_{i}_{c}"]) for c in range(ell)],
                FieldGrid(nx, ny, dx, data[f"rho_{i}"]),
            )
        )
    return NetworkState(neurons, t=float(data["t"]))
