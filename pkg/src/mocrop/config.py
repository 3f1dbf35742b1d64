"""Pipeline configuration: every tunable of a MoCrop run in one place.

A ``MoCropConfig`` is validated when it is built, so an impossible setting
(say, an area band that admits no integer rectangle) fails at load time
rather than halfway through a batch.  Values can come from defaults, the
``MOCROP_SEED`` environment variable, a ``key=value`` file, and CLI flags,
in increasing order of precedence.
"""

from __future__ import annotations

import logging
import os
from collections.abc import Mapping
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Any

from mocrop.errors import ConfigError, ValidationError
from mocrop.models import DEFAULT_MAX_GRID_CELLS, GridSpec

logger = logging.getLogger(__name__)

SEED_ENV_VAR = "MOCROP_SEED"
BACKENDS = ("naive", "integral", "sliding")

_U64_MAX = 2**64 - 1
_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


@dataclass(frozen=True)
class MoCropConfig:
    """Hyperparameters and feature toggles for one pipeline run."""

    # Stage 1: exactly one of epsilon / epsilon_percentile is set
    epsilon: float | None = None
    epsilon_percentile: float | None = 25.0
    # Stage 2
    sample_budget: int = 4096  # N
    grid: GridSpec = field(default_factory=lambda: GridSpec(6, 8))
    # Stage 3: target area ratio and tolerance
    alpha: float = 0.75
    delta: float = 0.1
    seed: int = 0
    enable_dm: bool = True
    enable_mcs: bool = True
    enable_gmc: bool = False
    flat_fallback: bool = True
    flatness_threshold: float = 0.0
    backend: str = "integral"
    max_grid_cells: int = DEFAULT_MAX_GRID_CELLS

    def __post_init__(self) -> None:
        if (self.epsilon is None) == (self.epsilon_percentile is None):
            raise ConfigError("Set exactly one of epsilon and epsilon_percentile")
        if self.epsilon is not None and not self.epsilon >= 0:
            raise ConfigError(f"epsilon must be >= 0, got {self.epsilon}")
        if self.epsilon_percentile is not None and not 0 <= self.epsilon_percentile < 100:
            raise ConfigError(
                f"epsilon_percentile must be in [0, 100), got {self.epsilon_percentile}"
            )
        if self.sample_budget < 1:
            raise ConfigError(f"sample_budget must be positive, got {self.sample_budget}")
        if not 0 < self.alpha <= 1:
            raise ConfigError(f"alpha must be in (0, 1], got {self.alpha}")
        if not 0 <= self.delta < 1:
            raise ConfigError(f"delta must be in [0, 1), got {self.delta}")
        if not 0 <= self.seed <= _U64_MAX:
            raise ConfigError(f"seed must be an unsigned 64-bit integer, got {self.seed}")
        if not 0 <= self.flatness_threshold <= 1:
            raise ConfigError(
                f"flatness_threshold must be in [0, 1], got {self.flatness_threshold}"
            )
        if self.backend not in BACKENDS:
            raise ConfigError(f"backend must be one of {BACKENDS}, got {self.backend!r}")
        if self.grid.cells > self.max_grid_cells:
            raise ConfigError(
                f"Grid {self.grid} exceeds max_grid_cells={self.max_grid_cells}"
            )

        # Imported here: search depends on models only, config sits above it.
        from mocrop.modeling.search import enumerate_shapes

        try:
            enumerate_shapes(self.grid, self.alpha, self.delta)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc


def seed_from_env(default: int = 0) -> int:
    """Read ``MOCROP_SEED`` if set, otherwise return *default*."""
    raw = os.environ.get(SEED_ENV_VAR)
    if raw is None or not raw.strip():
        return default
    try:
        return int(raw.strip(), 0)
    except ValueError as exc:
        raise ConfigError(f"{SEED_ENV_VAR} is not an integer: {raw!r}") from exc


def load_config_file(path: str | Path) -> dict[str, str]:
    """Read a ``key=value`` configuration file into a raw string mapping."""
    values: dict[str, str] = {}
    text = Path(path).read_text(encoding="utf-8")
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        values[key.replace("-", "_")] = value
    logger.debug("Loaded %d config keys from %s", len(values), path)
    return values


def _parse_bool(key: str, value: str) -> bool:
    lowered = value.strip().lower()
    if lowered in _TRUE:
        return True
    if lowered in _FALSE:
        return False
    raise ConfigError(f"{key}: expected a boolean, got {value!r}")


def _parse_optional_float(key: str, value: str) -> float | None:
    if value.strip().lower() in ("", "none"):
        return None
    try:
        return float(value)
    except ValueError as exc:
        raise ConfigError(f"{key}: expected a number, got {value!r}") from exc


def _coerce(key: str, value: Any, max_cells: int) -> Any:
    """Convert one raw config value to the type of the matching field."""
    if not isinstance(value, str):
        return value
    try:
        if key == "grid":
            return GridSpec.parse(value, max_cells=max_cells)
        if key in ("epsilon", "epsilon_percentile"):
            return _parse_optional_float(key, value)
        if key in ("enable_dm", "enable_mcs", "enable_gmc", "flat_fallback"):
            return _parse_bool(key, value)
        if key in ("sample_budget", "seed", "max_grid_cells"):
            return int(value, 0)
        if key in ("alpha", "delta", "flatness_threshold"):
            return float(value)
    except ValidationError as exc:
        raise ConfigError(f"{key}: {exc}") from exc
    except ValueError as exc:
        raise ConfigError(f"{key}: cannot parse {value!r}") from exc
    return value


def config_from_mapping(
    mapping: Mapping[str, Any],
    *,
    base: MoCropConfig | None = None,
) -> MoCropConfig:
    """Overlay *mapping* onto *base* (defaults when omitted).

    Setting ``epsilon`` clears ``epsilon_percentile`` and vice versa unless
    both are given explicitly.
    """
    known = {f.name for f in fields(MoCropConfig)}
    unknown = sorted(set(mapping) - known)
    if unknown:
        raise ConfigError(f"Unknown configuration keys: {', '.join(unknown)}")

    raw_max_cells = mapping.get("max_grid_cells", DEFAULT_MAX_GRID_CELLS)
    max_cells = _coerce("max_grid_cells", raw_max_cells, DEFAULT_MAX_GRID_CELLS)
    changes = {key: _coerce(key, value, max_cells) for key, value in mapping.items()}

    if "epsilon" in changes and changes["epsilon"] is not None:
        changes.setdefault("epsilon_percentile", None)
    if "epsilon_percentile" in changes and changes["epsilon_percentile"] is not None:
        changes.setdefault("epsilon", None)

    if base is None:
        # Skip validating a throwaway default when the mapping replaces it anyway.
        return MoCropConfig(**{**_default_kwargs(), **changes})
    return replace(base, **changes)


def _default_kwargs() -> dict[str, Any]:
    return {"seed": seed_from_env()}
