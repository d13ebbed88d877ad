"""Experiment configuration schema: strict parsing and canonical hashing.

Configs are plain JSON objects.  Unknown fields are rejected everywhere so a
typo cannot silently change an experiment.  A config carries exactly one
command block, named after the CLI subcommand it belongs to.
"""

import hashlib
import json
from dataclasses import dataclass, field

from ..dependence import AmhModel, FrankModel, SarmanovModel, ShiftModel
from ..errors import ConfigError
from ..kernels import (
    ExpKernel,
    FgmKernel,
    PowerKernel,
    ReciprocalKernel,
    ScaledFgmKernel,
    TruncatedExpKernel,
)
from ..marginals import (
    Degenerate,
    Exponential,
    LogPareto,
    Pareto,
    ShiftedPareto,
    Uniform,
)

__all__ = [
    "ExperimentConfig",
    "COMMANDS",
    "marginal_from_dict",
    "model_from_dict",
    "parse_config",
    "canonical_json",
    "config_sha256",
]

COMMANDS = ("validate", "breiman", "tail-ratio", "cd-check", "ruin", "term-tail")


def _check_fields(obj, where, required, optional=()):
    if not isinstance(obj, dict):
        raise ConfigError(f"{where}: expected an object")
    keys = set(obj)
    missing = set(required) - keys
    if missing:
        raise ConfigError(f"{where}: missing fields {sorted(missing)}")
    unknown = keys - set(required) - set(optional)
    if unknown:
        raise ConfigError(f"{where}: unknown fields {sorted(unknown)}")


def _number(obj, where, key, optional=False, default=None):
    if key not in obj:
        if optional:
            return default
        raise ConfigError(f"{where}: missing numeric field {key!r}")
    v = obj[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{where}.{key}: expected a number")
    return float(v)


def _integer(obj, where, key, optional=False, default=None):
    v = obj.get(key, None)
    if v is None:
        if optional:
            return default
        raise ConfigError(f"{where}: missing integer field {key!r}")
    if isinstance(v, bool) or not isinstance(v, int):
        raise ConfigError(f"{where}.{key}: expected an integer")
    return v


def _number_list(obj, where, key):
    v = obj.get(key)
    if not isinstance(v, list) or not v or \
            any(isinstance(t, bool) or not isinstance(t, (int, float)) for t in v):
        raise ConfigError(f"{where}.{key}: expected a nonempty list of numbers")
    return [float(t) for t in v]


def marginal_from_dict(d, where="marginal"):
    _check_fields(d, where, ["family"],
                  ["alpha", "scale", "shift", "beta", "onset", "lo", "hi",
                   "rate", "location"])
    family = d.get("family")
    try:
        if family == "pareto":
            _check_fields(d, where, ["family", "alpha"], ["scale"])
            return Pareto(_number(d, where, "alpha"),
                          _number(d, where, "scale", optional=True, default=1.0))
        if family == "shifted_pareto":
            _check_fields(d, where, ["family", "alpha", "shift"], ["scale"])
            return ShiftedPareto(_number(d, where, "alpha"),
                                 _number(d, where, "scale", optional=True, default=1.0),
                                 _number(d, where, "shift"))
        if family == "log_pareto":
            _check_fields(d, where, ["family", "alpha", "beta"], ["onset"])
            onset = _number(d, where, "onset", optional=True)
            if onset is None:
                return LogPareto(_number(d, where, "alpha"), _number(d, where, "beta"))
            return LogPareto(_number(d, where, "alpha"), _number(d, where, "beta"), onset)
        if family == "uniform":
            _check_fields(d, where, ["family", "lo", "hi"])
            return Uniform(_number(d, where, "lo"), _number(d, where, "hi"))
        if family == "exponential":
            _check_fields(d, where, ["family", "rate"])
            return Exponential(_number(d, where, "rate"))
        if family == "degenerate":
            _check_fields(d, where, ["family", "location"])
            return Degenerate(_number(d, where, "location"))
    except ConfigError:
        raise
    except Exception as exc:
        raise ConfigError(f"{where}: {exc}") from exc
    raise ConfigError(f"{where}: unknown family {family!r}")


_KERNEL_KINDS = {
    "fgm1": ("x", lambda m, d, w: FgmKernel(m)),
    "fgm2": ("y", lambda m, d, w: FgmKernel(m)),
    "exp1": ("x", lambda m, d, w: TruncatedExpKernel(m)),
    "exp2": ("y", lambda m, d, w: ExpKernel(m)),
    "reciprocal2": ("y", lambda m, d, w: ReciprocalKernel(m)),
    "scaled_fgm1": ("x", lambda m, d, w: ScaledFgmKernel(m, _number(d, w, "limit"))),
    "power": (None, lambda m, d, w: PowerKernel(m, _number(d, w, "exponent"))),
}


def _kernel_from_dict(d, marginal, side, where):
    _check_fields(d, where, ["kind"], ["limit", "exponent"])
    kind = d.get("kind")
    if kind not in _KERNEL_KINDS:
        raise ConfigError(f"{where}: unknown kernel kind {kind!r}")
    expected_side, build = _KERNEL_KINDS[kind]
    if expected_side is not None and expected_side != side:
        raise ConfigError(f"{where}: kernel kind {kind!r} belongs on the "
                          f"{expected_side}-side")
    try:
        return build(marginal, d, where)
    except ConfigError:
        raise
    except Exception as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def model_from_dict(d, where="model"):
    if not isinstance(d, dict):
        raise ConfigError(f"{where}: expected an object")
    variant = d.get("variant")
    try:
        if variant == "sarmanov":
            _check_fields(d, where, ["variant", "theta", "kernel1", "kernel2", "F", "G"])
            F = marginal_from_dict(d["F"], f"{where}.F")
            G = marginal_from_dict(d["G"], f"{where}.G")
            k1 = _kernel_from_dict(d["kernel1"], F, "x", f"{where}.kernel1")
            k2 = _kernel_from_dict(d["kernel2"], G, "y", f"{where}.kernel2")
            return SarmanovModel(_number(d, where, "theta"), k1, k2, F, G)
        if variant == "frank":
            _check_fields(d, where, ["variant", "theta", "F", "G"])
            return FrankModel(_number(d, where, "theta"),
                              marginal_from_dict(d["F"], f"{where}.F"),
                              marginal_from_dict(d["G"], f"{where}.G"))
        if variant == "amh":
            _check_fields(d, where, ["variant", "theta", "F", "G"])
            return AmhModel(_number(d, where, "theta"),
                            marginal_from_dict(d["F"], f"{where}.F"),
                            marginal_from_dict(d["G"], f"{where}.G"))
        if variant == "shift":
            _check_fields(d, where, ["variant", "base"])
            return ShiftModel(model_from_dict(d["base"], f"{where}.base"))
    except ConfigError:
        raise
    except Exception as exc:
        raise ConfigError(f"{where}: {exc}") from exc
    raise ConfigError(f"{where}: unknown variant {variant!r}")


@dataclass
class ExperimentConfig:
    model_spec: dict
    command: str
    params: dict
    seed: int = 0
    output: dict = field(default_factory=dict)

    def to_dict(self):
        d = {"model": self.model_spec, "seed": self.seed, self.command: self.params}
        if self.output:
            d["output"] = self.output
        return d

    def build_model(self):
        return model_from_dict(self.model_spec)


def _parse_command_params(command, block):
    where = command
    if command == "validate":
        _check_fields(block, where, [])
        return {}
    if command == "breiman":
        _check_fields(block, where, [], ["alpha", "method", "n_samples"])
        method = block.get("method", "quadrature")
        if method not in ("quadrature", "monte_carlo"):
            raise ConfigError(f"{where}.method: expected quadrature or monte_carlo")
        return {"alpha": _number(block, where, "alpha", optional=True),
                "method": method,
                "n_samples": _integer(block, where, "n_samples", optional=True,
                                      default=10 ** 6)}
    if command == "tail-ratio":
        _check_fields(block, where, ["thresholds", "n_samples"])
        return {"thresholds": _number_list(block, where, "thresholds"),
                "n_samples": _integer(block, where, "n_samples")}
    if command == "cd-check":
        _check_fields(block, where, ["x_grid"], ["policy", "y_max"])
        policy = block.get("policy", "fixed_quantiles")
        if policy not in ("fixed_quantiles", "tail_extended"):
            raise ConfigError(f"{where}.policy: expected fixed_quantiles or tail_extended")
        return {"x_grid": _number_list(block, where, "x_grid"), "policy": policy,
                "y_max": _number(block, where, "y_max", optional=True)}
    if command == "ruin":
        _check_fields(block, where, ["x_grid", "n", "n_samples"], ["tail_tol"])
        n = block.get("n")
        if n != "inf" and (isinstance(n, bool) or not isinstance(n, int) or n < 1):
            raise ConfigError(f'{where}.n: expected a positive integer or "inf"')
        return {"x_grid": _number_list(block, where, "x_grid"), "n": n,
                "n_samples": _integer(block, where, "n_samples"),
                "tail_tol": _number(block, where, "tail_tol", optional=True,
                                    default=1e-3)}
    if command == "term-tail":
        _check_fields(block, where, ["i", "x_grid", "n_samples"])
        return {"i": _integer(block, where, "i"),
                "x_grid": _number_list(block, where, "x_grid"),
                "n_samples": _integer(block, where, "n_samples")}
    raise ConfigError(f"unknown command {command!r}")


def parse_config(data, expected_command=None) -> ExperimentConfig:
    _check_fields(data, "config", ["model"],
                  ["seed", "output"] + list(COMMANDS))
    present = [c for c in COMMANDS if c in data]
    if len(present) != 1:
        raise ConfigError(f"config must contain exactly one command block, got {present}")
    command = present[0]
    if expected_command is not None and command != expected_command:
        raise ConfigError(
            f"config carries a {command!r} block but the {expected_command!r} "
            "subcommand was invoked")
    params = _parse_command_params(command, data[command])
    seed = _integer(data, "config", "seed", optional=True, default=0)
    output = data.get("output", {})
    _check_fields(output, "output", [], ["csv_path", "json_path", "svg_path"])
    for key, value in output.items():
        if not isinstance(value, str):
            raise ConfigError(f"output.{key}: expected a path string")
    if "svg_path" in output and command in ("validate", "breiman"):
        raise ConfigError(f"output.svg_path: the {command} command produces no chart")
    # Validate the model spec eagerly so schema errors surface before compute.
    model_from_dict(data["model"])
    return ExperimentConfig(model_spec=data["model"], command=command,
                            params=params, seed=seed, output=dict(output))


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def config_sha256(config: ExperimentConfig) -> str:
    return hashlib.sha256(canonical_json(config.to_dict()).encode()).hexdigest()
