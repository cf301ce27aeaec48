"""Run configuration assembly.

A RunConfig is built from three layers, later ones winning: the named
preset, the ``key = value`` file, then explicit overrides (CLI flags).
Every value passes through the converter registered for its key, so the
same spelling works in presets, files and flags.
"""

import logging
from dataclasses import replace
from pathlib import Path
from typing import Any, Callable, Mapping, Optional

from ..domain import (
    ChannelConfig,
    CodecConfig,
    ConfigError,
    DatasetConfig,
    PrecoderConfig,
    RunConfig,
)
from ..repositories import ConfigRepository

logger = logging.getLogger(__name__)

DEFAULT_PRESET = "desk"

_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


def _to_int(value: Any) -> int:
    if isinstance(value, bool):
        raise ValueError("expected an integer")
    if isinstance(value, int):
        return value
    if isinstance(value, float) and value.is_integer():
        return int(value)
    return int(str(value).strip())


def _to_float(value: Any) -> float:
    if isinstance(value, bool):
        raise ValueError("expected a number")
    return float(value)


def _to_bool(value: Any) -> bool:
    if isinstance(value, bool):
        return value
    text = str(value).strip().lower()
    if text in _TRUE:
        return True
    if text in _FALSE:
        return False
    raise ValueError("expected true or false")


def _split(value: Any) -> list[Any]:
    if isinstance(value, (list, tuple)):
        return list(value)
    return [part for part in str(value).replace(" ", "").split(",") if part]


def _to_int_tuple(value: Any) -> tuple[int, ...]:
    return tuple(_to_int(v) for v in _split(value))


def _to_float_tuple(value: Any) -> Optional[tuple[float, ...]]:
    items = _split(value)
    return tuple(_to_float(v) for v in items) if items else None


def _to_budget(value: Any) -> Optional[float]:
    if value is None or str(value).strip().lower() in ("", "none", "inf", "unlimited"):
        return None
    return _to_float(value)


def _to_policy(value: Any) -> str:
    return str(value).strip().lower()


def _ns_to_seconds(value: Any) -> float:
    return _to_float(value) * 1e-9


# key -> (section, dataclass field, converter)
FIELDS: dict[str, tuple[str, str, Callable[[Any], Any]]] = {
    "tx_antennas": ("channel", "num_tx_antennas", _to_int),
    "users": ("channel", "num_users", _to_int),
    "rbs": ("channel", "num_rbs", _to_int),
    "subcarriers_per_rb": ("channel", "subcarriers_per_rb", _to_int),
    "subcarrier_spacing_hz": ("channel", "subcarrier_spacing", _to_float),
    "paths": ("channel", "num_paths", _to_int),
    "delay_spread_ns": ("channel", "rms_delay_spread", _ns_to_seconds),
    "carrier_freq_hz": ("channel", "carrier_freq", _to_float),
    "rb_average": ("channel", "rb_average", _to_bool),
    "total_power": ("precoder", "total_power", _to_float),
    "noise_power": ("precoder", "noise_power", _to_float),
    "wmmse_max_iters": ("precoder", "max_iters", _to_int),
    "wmmse_tol": ("precoder", "convergence_tol", _to_float),
    "rb_weights": ("precoder", "rb_weights", _to_float_tuple),
    "latent_dim": ("codec", "latent_dim", _to_int),
    "codebook_sizes": ("codec", "codebook_sizes", _to_int_tuple),
    "lbg_iters": ("codec", "lbg_iters", _to_int),
    "entropy_order": ("codec", "entropy_order", _to_int),
    "rate_weight": ("codec", "rate_weight", _to_float),
    "commitment_weight": ("codec", "commitment_weight", _to_float),
    "budget_bits_per_token": ("codec", "budget_bits_per_token", _to_budget),
    "stage_policy": ("codec", "stage_policy", _to_policy),
    "project_power": ("codec", "project_power", _to_bool),
    "num_samples": ("dataset", "num_samples", _to_int),
    "train_fraction": ("dataset", "train_fraction", _to_float),
}

SPECIAL_KEYS = ("preset", "seed", "stages", "out")
KNOWN_KEYS = frozenset(FIELDS) | frozenset(SPECIAL_KEYS)


def _convert(key: str, value: Any, converter: Callable[[Any], Any]) -> Any:
    try:
        return converter(value)
    except (TypeError, ValueError) as e:
        raise ConfigError(key, f"invalid value {value!r} ({e})") from e


def _check_keys(values: Mapping[str, Any], source: str) -> None:
    unknown = sorted(set(values) - KNOWN_KEYS)
    if unknown:
        raise ConfigError(unknown[0], f"unknown key in {source}")


def apply_stage_count(sizes: tuple[int, ...], stages: int) -> tuple[int, ...]:
    """Truncate ``sizes`` to ``stages`` entries or extend by repeating the last."""
    if stages < 1:
        raise ConfigError("stages", f"must be >= 1, got {stages}")
    if not sizes:
        raise ConfigError("codebook_sizes", "need at least one stage")
    if stages <= len(sizes):
        return sizes[:stages]
    return sizes + (sizes[-1],) * (stages - len(sizes))


class ConfigService:
    """Builds validated RunConfig objects from presets, files and overrides."""

    def __init__(self, config_repository: ConfigRepository) -> None:
        self._repo = config_repository

    def preset_names(self) -> list[str]:
        return sorted(self._repo.load_presets())

    def build(
        self,
        config_path: Optional[Path] = None,
        overrides: Optional[Mapping[str, Any]] = None,
    ) -> RunConfig:
        """Assemble and validate a RunConfig.

        Args:
            config_path: Optional flat key=value file.
            overrides: Highest-priority values by key; ``None`` entries are
                ignored so unset CLI flags fall through.

        Returns:
            The validated RunConfig.

        Raises:
            ConfigError: On unknown keys or presets, unparsable values, or
                values that fail validation.
            StorageError: If the config file cannot be read.
        """
        flags = {k: v for k, v in (overrides or {}).items() if v is not None}
        _check_keys(flags, "overrides")
        file_values: dict[str, Any] = {}
        if config_path is not None:
            file_values = dict(self._repo.load_key_values(config_path))
            _check_keys(file_values, str(config_path))

        presets = self._repo.load_presets()
        name = str(flags.get("preset") or file_values.get("preset") or DEFAULT_PRESET)
        if name not in presets:
            raise ConfigError("preset", f"unknown preset {name!r}; choose from {', '.join(sorted(presets))}")
        preset_values = dict(presets[name] or {})
        _check_keys(preset_values, f"preset {name}")

        merged = {**preset_values, **file_values, **flags}
        merged.pop("preset", None)
        logger.debug("config layers: preset=%s file=%s overrides=%s", name, sorted(file_values), sorted(flags))

        sections: dict[str, dict[str, Any]] = {s: {} for s in ("channel", "precoder", "codec", "dataset")}
        for key, value in merged.items():
            if key in FIELDS:
                section, field, converter = FIELDS[key]
                sections[section][field] = _convert(key, value, converter)
        if "seed" in merged:
            seed = _convert("seed", merged["seed"], _to_int)
            sections["channel"]["seed"] = seed
            sections["dataset"]["seed"] = seed

        codec = replace(CodecConfig(), **sections["codec"])
        if "stages" in merged:
            stages = _convert("stages", merged["stages"], _to_int)
            codec = replace(codec, codebook_sizes=apply_stage_count(codec.codebook_sizes, stages))

        run = RunConfig(
            channel=replace(ChannelConfig(), **sections["channel"]),
            precoder=replace(PrecoderConfig(), **sections["precoder"]),
            codec=codec,
            dataset=replace(DatasetConfig(), **sections["dataset"]),
            out_dir=Path(str(merged["out"])) if "out" in merged else Path.cwd(),
        )
        run.validate()
        return run
