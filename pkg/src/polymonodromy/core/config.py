"""Loading of numeric settings from config.yaml and the environment."""

import os
import logging
from dataclasses import dataclass, field, replace
from typing import Any, Dict, Optional

import yaml

from polymonodromy.core.errors import InputError
from polymonodromy.core.tracker import TrackOptions

logger = logging.getLogger(__name__)

CONFIG_ENV_VAR = "MONODROMY_CONFIG"
SEED_ENV_VAR = "MONODROMY_SEED"


@dataclass(frozen=True)
class Tolerances:
    """Thresholds used when numeric screening backs an exact certificate."""

    cluster_tol: float = 1e-8
    cofiber_tol: float = 1e-8
    vanish_tol: float = 1e-9
    witness_threshold: float = 1e-6
    period_vanish_tol: float = 1e-8


@dataclass(frozen=True)
class QuadratureSettings:
    nodes: int = 64
    agreement: float = 1e-10
    max_doublings: int = 6


@dataclass(frozen=True)
class Settings:
    """Everything the scripts pass down into the library."""

    tracking: TrackOptions = field(default_factory=TrackOptions)
    tolerances: Tolerances = field(default_factory=Tolerances)
    quadrature: QuadratureSettings = field(default_factory=QuadratureSettings)
    seed: Optional[str] = None

    def with_tracking(
        self,
        step: Optional[float] = None,
        tol: Optional[float] = None,
        guard: Optional[float] = None,
    ) -> "Settings":
        """Return a copy with command-line tracking overrides applied."""
        opts = self.tracking
        if step is not None:
            opts = replace(
                opts,
                initial_step=step,
                max_step=max(step, opts.max_step),
                min_step=min(opts.min_step, step),
            )
        if tol is not None:
            opts = replace(opts, corrector_tol=tol)
        if guard is not None:
            opts = replace(opts, collision_guard=guard)
        opts.validate()
        return replace(self, tracking=opts)


def _section(raw: Dict[str, Any], name: str) -> Dict[str, Any]:
    value = raw.get(name) or {}
    if not isinstance(value, dict):
        raise InputError(f"Config section '{name}' must be a mapping")
    return value


def _build(cls: Any, values: Dict[str, Any], section: str) -> Any:
    known = set(cls.__dataclass_fields__)
    unknown = set(values) - known
    if unknown:
        raise InputError(f"Unknown keys in config section '{section}': {sorted(unknown)}")
    try:
        return cls(**values)
    except TypeError as e:
        raise InputError(f"Invalid config section '{section}': {e}")


def load_settings(config_path: Optional[str] = None) -> Settings:
    """
    Load settings from a YAML file, falling back to built-in defaults.

    Args:
        config_path: Explicit path. When None, MONODROMY_CONFIG is consulted and
            a missing file simply means defaults.

    Returns:
        A validated, frozen Settings instance.

    Raises:
        InputError: if the file exists but is malformed.
    """
    path = config_path or os.getenv(CONFIG_ENV_VAR)
    raw: Dict[str, Any] = {}
    if path:
        if not os.path.exists(path):
            if config_path:
                raise InputError(f"Config file not found: {path}")
            logger.warning(f"{CONFIG_ENV_VAR} points to a missing file: {path}")
        else:
            with open(path, "r", encoding="utf-8") as f:
                try:
                    raw = yaml.safe_load(f) or {}
                except yaml.YAMLError as e:
                    raise InputError(f"Could not parse config file {path}: {e}")
            if not isinstance(raw, dict):
                raise InputError(f"Config file {path} must contain a mapping")
            logger.info(f"Loaded settings from {path}")

    tracking = _build(TrackOptions, _section(raw, "tracking"), "tracking")
    tracking.validate()
    tolerances = _build(Tolerances, _section(raw, "tolerances"), "tolerances")
    quadrature = _build(QuadratureSettings, _section(raw, "quadrature"), "quadrature")

    seed = os.getenv(SEED_ENV_VAR)
    if seed:
        logger.info(f"{SEED_ENV_VAR}={seed} is reserved; all computations are deterministic")

    return Settings(
        tracking=tracking, tolerances=tolerances, quadrature=quadrature, seed=seed
    )
