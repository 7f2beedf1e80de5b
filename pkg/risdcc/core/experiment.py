"""
Experiment files: loading, overrides and assembly

An experiment is a TOML file validated by ExperimentConfig. Command-line
``--set dotted.key=value`` overrides are applied to the raw mapping before
validation; ``--seed`` and ``--output`` are applied last.
"""

from __future__ import annotations

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from collections.abc import Sequence
from pathlib import Path
from typing import Any

from pydantic import ValidationError

from risdcc.core.codec_trellis import TrellisSpec, build_trellis_generator
from risdcc.core.detect import DetectorKind
from risdcc.core.diffraction import build_generator
from risdcc.core.errors import ConfigError
from risdcc.core.geofile import read_geometry
from risdcc.core.geometry import (
    CarrierSpec,
    RisStack,
    evenly_spaced_stack,
    preset_74,
    preset_repetition_42,
    preset_systematic_42,
)
from risdcc.core.harness import StoppingRule, sweep_points
from risdcc.core.links import (
    BlockDccLink,
    ConcatenatedLink,
    ConvLink,
    HammingLink,
    Link,
    TrellisDccLink,
    UncodedLink,
)
from risdcc.core.modem import get_scheme
from risdcc.core.optimizer import SearchSpace
from risdcc.models.requests import ExperimentConfig, GeometryConfig


def parse_override(item: str) -> tuple[list[str], Any]:
    """'a.b=value' -> (['a', 'b'], value); the value is read as a TOML literal, else kept as a string"""
    key, sep, raw = item.partition("=")
    key = key.strip()
    if not sep or not key or any(not part for part in key.split(".")):
        raise ConfigError(f"override {item!r} must have the form dotted.key=value")
    try:
        value = tomllib.loads(f"v = {raw.strip()}")["v"]
    except tomllib.TOMLDecodeError:
        value = raw.strip()
    return key.split("."), value


def apply_overrides(data: dict[str, Any], overrides: Sequence[str]) -> dict[str, Any]:
    for item in overrides:
        path, value = parse_override(item)
        node = data
        for part in path[:-1]:
            child = node.setdefault(part, {})
            if not isinstance(child, dict):
                raise ConfigError(f"override {item!r}: {part} is not a table")
            node = child
        node[path[-1]] = value
    return data


def _format_validation_error(error: ValidationError) -> str:
    lines = []
    for e in error.errors():
        where = ".".join(str(p) for p in e["loc"]) or "<root>"
        lines.append(f"{where}: {e['msg']}")
    return "invalid experiment configuration:\n  " + "\n  ".join(lines)


def validate_experiment(data: dict[str, Any]) -> ExperimentConfig:
    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigError(_format_validation_error(e)) from None


def load_experiment(path: str | Path | None, overrides: Sequence[str] = (), seed: int | None = None,
                    output: str | None = None) -> ExperimentConfig:
    """Read, override and validate an experiment file"""
    data: dict[str, Any] = {}
    if path is not None:
        try:
            with open(path, "rb") as f:
                data = tomllib.load(f)
        except FileNotFoundError:
            raise ConfigError(f"experiment file {path} not found") from None
        except tomllib.TOMLDecodeError as e:
            raise ConfigError(f"{path}: {e}") from None
    apply_overrides(data, overrides)
    if seed is not None:
        data["seed"] = seed
    if output is not None:
        data["output"] = output
    return validate_experiment(data)


def trellis_spec(config: ExperimentConfig, stack: RisStack | None = None) -> TrellisSpec:
    code = config.code
    b = get_scheme(config.modulation).bits_per_symbol
    k, n = code.k, code.n
    if stack is not None:
        n = n or stack.output_dim
        k = k or (stack.input_dim // (code.mu + 1) if code.variant == "extra_atoms" else stack.input_dim)
    if k is None or n is None:
        raise ConfigError("trellis codes on an evenly_spaced stack need code.k and code.n")
    return TrellisSpec(code.variant, k, n, code.mu, b)


def requires_expansion(config: ExperimentConfig) -> bool:
    """Block codes must expand dimension; trellis stacks compress k*(mu+1) inputs into n"""
    return config.code.type != "trellis"


def length_unit(geometry: GeometryConfig) -> float:
    """Meters per configured length unit"""
    return CarrierSpec(geometry.frequency_hz).wavelength_m if geometry.units == "wavelength" else 1.0


def build_stack(config: ExperimentConfig) -> RisStack:
    """Stack named by the [geometry] section"""
    geometry = config.geometry
    if geometry is None:
        raise ConfigError("this command requires a [geometry] section")
    if geometry.preset == "file":
        stack = read_geometry(geometry.file)
        if geometry.allow_near_field and not stack.allow_near_field:
            stack = RisStack(stack.carrier, stack.layer1, stack.layer2, allow_near_field=True)
        return stack

    carrier = CarrierSpec(geometry.frequency_hz)
    unit = length_unit(geometry)
    p = geometry.params
    if geometry.preset == "repetition_42":
        stack = preset_repetition_42(carrier, p.a * unit, p.h * unit, p.dz * unit)
    elif geometry.preset == "systematic_42":
        stack = preset_systematic_42(carrier, p.d * unit, p.dz * unit)
    elif geometry.preset == "evenly_spaced_74":
        stack = preset_74(carrier, "evenly_spaced", p.pitch * unit, p.dz * unit)
    else:
        n_in, n_out = geometry.n_in, geometry.n_out
        if config.code.type == "trellis" and (n_in is None or n_out is None):
            spec = trellis_spec(config)
            n_in, n_out = n_in or spec.layer1_atoms, n_out or spec.n
        if n_in is None or n_out is None:
            raise ConfigError("preset 'evenly_spaced' requires geometry.n_in and geometry.n_out")
        stack = evenly_spaced_stack(carrier, n_in, n_out, p.pitch * unit, p.dz * unit,
                                    require_expansion=requires_expansion(config))
    return stack


def build_link(config: ExperimentConfig) -> Link:
    """Transmit/receive chain for the [code] section"""
    code = config.code
    m = get_scheme(config.modulation)
    if code.type == "uncoded":
        return UncodedLink(m, code.symbols_per_frame)
    if code.type == "hamming":
        return HammingLink(code.decoding)
    if code.type == "conv":
        return ConvLink(code.message_bits, code.decoding)

    stack = build_stack(config)
    if code.type == "trellis":
        spec = trellis_spec(config, stack)
        return TrellisDccLink(spec, build_trellis_generator(stack, spec), m, code.frames_per_sequence)

    G = build_generator(stack, code.normalization, code.insertion_loss_db)
    detector = DetectorKind(config.detector.kind)
    if code.type == "concatenated":
        return ConcatenatedLink(G, m, detector, code.decoding)
    return BlockDccLink(G, m, detector)


def build_sweep(config: ExperimentConfig) -> list[float]:
    sweep = config.sweep
    if sweep is None:
        raise ConfigError("this command requires a [sweep] section")
    if sweep.points is not None:
        return sorted(sweep.points)
    return sweep_points(sweep.start_db, sweep.stop_db, sweep.step_db)


def build_stopping(config: ExperimentConfig) -> StoppingRule:
    s = config.stopping
    return StoppingRule(s.target_errors, s.max_bits, s.frames_per_batch)


def build_search_space(config: ExperimentConfig) -> SearchSpace:
    if config.code.type != "block":
        raise ConfigError(f"geometry optimization covers block codes only, got code.type {config.code.type!r}")
    base = build_stack(config)
    unit = base.wavelength_m if config.geometry.units == "wavelength" else 1.0
    opt = config.optimizer
    return SearchSpace(
        base=base,
        free=tuple(opt.free),
        z_max_m=None if opt.z_max is None else opt.z_max * unit,
        aperture_m=None if opt.aperture is None else opt.aperture * unit,
    )
