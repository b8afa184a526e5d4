"""Flat key-value experiment configuration files.

The format is one ``dotted.key = value`` pair per line; blank lines and lines
starting with ``#`` are ignored.  Every key has a default (`default_config`),
so a file only needs the keys it overrides.  Lists are comma-separated.
`render_config` emits the complete key set, and
``parse_config(render_config(cfg)) == cfg`` holds exactly.

Example::

    model.mu_u = 1.0
    channel.sigma_h = 0.15
    experiment.methods = raw,rc
    experiment.snr_db_grid = 0,20,40
"""

from __future__ import annotations

from dataclasses import replace
from typing import Callable

from .channel import ChannelParams, ChannelScenario
from .experiments import ExperimentConfig, default_config
from .signal_model import Method, ModelParams

__all__ = ["ConfigError", "parse_config", "render_config", "CONFIG_KEYS"]


class ConfigError(ValueError):
    """A configuration file could not be parsed or validated."""


def _parse_bool(text: str) -> bool:
    lowered = text.lower()
    if lowered in ("true", "false"):
        return lowered == "true"
    raise ValueError(f"expected 'true' or 'false', got {text!r}")


def _parse_float_list(text: str) -> tuple[float, ...]:
    items = [item.strip() for item in text.split(",") if item.strip()]
    if not items:
        raise ValueError("expected a comma-separated list of numbers")
    return tuple(float(item) for item in items)


def _parse_enum_list(enum_cls) -> Callable[[str], tuple]:
    valid = ", ".join(member.value for member in enum_cls)

    def parse(text: str) -> tuple:
        items = [item.strip() for item in text.split(",") if item.strip()]
        if not items:
            raise ValueError(f"expected a comma-separated list from: {valid}")
        try:
            return tuple(enum_cls(item) for item in items)
        except ValueError:
            raise ValueError(f"expected values from: {valid}; got {text!r}") from None

    return parse


def _render_enum_list(values: tuple) -> str:
    return ",".join(member.value for member in values)


def _render_float_list(values: tuple) -> str:
    return ",".join(repr(float(v)) for v in values)


#: key -> (section, attribute, parse, render)
CONFIG_KEYS: dict[str, tuple[str, str, Callable[[str], object], Callable]] = {}


def _register(section: str, attribute: str, parse, render=repr) -> None:
    CONFIG_KEYS[f"{section}.{attribute}"] = (section, attribute, parse, render)


for _name in ("x", "f_ra", "f_ta", "f_ru", "f_tu_l", "eta",
              "mu_u", "sigma_u", "mu_s", "sigma_s", "sigma_n"):
    _register("model", _name, float)
for _name in ("r_l", "r_s"):
    _register("model", _name, int)
for _name in ("mu_h", "sigma_h", "mu_h_non", "sigma_h_non"):
    _register("channel", _name, float)
for _name in ("n_devices", "n_train", "n_test", "n_trials", "master_seed"):
    _register("experiment", _name, int)
_register("experiment", "scenarios", _parse_enum_list(ChannelScenario), _render_enum_list)
_register("experiment", "methods", _parse_enum_list(Method), _render_enum_list)
_register("experiment", "snr_db_grid", _parse_float_list, _render_float_list)
_register("experiment", "classify_normalized", _parse_bool,
          lambda v: "true" if v else "false")


def parse_config(text: str) -> ExperimentConfig:
    """Build an `ExperimentConfig` from file text (defaults fill gaps).

    Raises `ConfigError` naming the offending line for unknown keys, bad
    syntax, bad values, and duplicates, or describing the constraint for
    values that fail validation.
    """
    overrides: dict[str, object] = {}
    seen_lines: dict[str, int] = {}
    for line_no, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"line {line_no}: expected 'key = value', got {line!r}")
        key, _, value_text = line.partition("=")
        key = key.strip()
        value_text = value_text.strip()
        if key not in CONFIG_KEYS:
            raise ConfigError(f"line {line_no}: unknown key {key!r}")
        if key in seen_lines:
            raise ConfigError(
                f"line {line_no}: duplicate key {key!r} (first set on line "
                f"{seen_lines[key]})"
            )
        seen_lines[key] = line_no
        _, _, parse, _ = CONFIG_KEYS[key]
        try:
            overrides[key] = parse(value_text)
        except ValueError as exc:
            raise ConfigError(f"line {line_no}: bad value for {key!r}: {exc}") from None

    base = default_config()
    by_section: dict[str, dict[str, object]] = {"model": {}, "channel": {}, "experiment": {}}
    for key, value in overrides.items():
        section, attribute, _, _ = CONFIG_KEYS[key]
        by_section[section][attribute] = value

    try:
        channel = replace(base.params.channel, **by_section["channel"])
        params = replace(base.params, channel=channel, **by_section["model"])
        return replace(base, params=params, **by_section["experiment"])
    except ValueError as exc:
        raise ConfigError(f"configuration invalid: {exc}") from None


def _lookup(cfg: ExperimentConfig, section: str, attribute: str):
    if section == "model":
        return getattr(cfg.params, attribute)
    if section == "channel":
        return getattr(cfg.params.channel, attribute)
    return getattr(cfg, attribute)


def render_config(cfg: ExperimentConfig) -> str:
    """Complete config text for ``cfg``; parsing it back reproduces ``cfg``."""
    sections = {
        "model": "# Signal model constants and fingerprint distributions",
        "channel": "# CSI distribution parameters (train and shifted-test)",
        "experiment": "# Sweep layout and Monte-Carlo sizes",
    }
    lines: list[str] = []
    for section, header in sections.items():
        lines.append(header)
        for key, (key_section, attribute, _, render) in CONFIG_KEYS.items():
            if key_section != section:
                continue
            lines.append(f"{key} = {render(_lookup(cfg, section, attribute))}")
        lines.append("")
    return "\n".join(lines)
