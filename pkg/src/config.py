"""
Configuration dataclasses and numerical defaults for the rotation-algebra toolkit.
"""

import math
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Dict, List, Optional

from dotenv import dotenv_values

from .errors import ConfigError


# Numerical defaults shared by all modules
DEFAULT_GRID = 256                     # Grid points for sup-norm evaluation
DROP_TOLERANCE = 1e-14                 # Relative to max |c_k|
POSITIVITY_FLOOR = 1e-10               # Lower bound required before taking 1/phi
UNIMODULAR_TOLERANCE = 1e-9            # | |u(z)| - 1 | allowed on the grid
SELF_ADJOINT_TOLERANCE = 1e-12         # l1 distance between F and F*
PLAN_M_CEILING = 10 ** 6               # Largest averaging family
MAX_REFINED_GRID = 2 ** 16             # Grid refinement stops here
SUP_NORM_OVERSAMPLING = 16             # Cells per frequency of |phi|^2 when refining sup norms
SUP_NORM_POLISH_STEPS = 80             # Safeguarded Newton steps per maximizer
SUP_NORM_MAX_PIECES = 20000            # Subintervals examined before a looser bound is accepted
GOLDEN_THETA = (math.sqrt(5.0) - 1.0) / 2.0
DEFAULT_SIGMA = math.e


@dataclass
class RunConfig:
    """Overall run configuration shared by all CLI commands."""
    theta: float = GOLDEN_THETA        # Rotation number, 0 < theta < 1
    sigma: float = DEFAULT_SIGMA       # Weight base, omega(n) = sigma**|n|
    grid: int = DEFAULT_GRID           # Sup-norm grid size G
    Ls: List[int] = field(default_factory=lambda: [16, 32, 64])
    z0s: List[float] = field(default_factory=lambda: [0.0])
    tol: float = 1e-6                  # Residual tolerance (module, inversion)
    epsilon: float = 1e-3              # Tail / averaging tolerance
    lam: complex = 2.0                 # Witness parameter lambda
    N: int = 30                        # Witness partial sums / support cutoff
    seed: int = 0                      # Seed for randomized suites and base points
    output_dir: str = "results"
    convergents: Optional[List[str]] = None   # "p/q" strings, optional
    workers: int = 4                   # Parallel (L, z0) workers

    def validate(self) -> "RunConfig":
        """
        Check the configuration invariants.

        Returns:
            self, for chaining

        Raises:
            ConfigError: If any invariant fails
        """
        if not 0.0 < self.theta < 1.0:
            raise ConfigError(f"theta must lie in (0, 1), got {self.theta}")
        if self.sigma < 1.0:
            raise ConfigError(f"sigma must be >= 1, got {self.sigma}")
        if self.grid < 8:
            raise ConfigError(f"grid must be >= 8, got {self.grid}")
        if self.tol <= 0 or self.epsilon < 0:
            raise ConfigError("tolerances must be positive")
        if not self.Ls:
            raise ConfigError("Ls must list at least one truncation size")
        if list(self.Ls) != sorted(self.Ls) or any(L < 1 for L in self.Ls):
            raise ConfigError(f"Ls must be positive and ascending, got {self.Ls}")
        if not self.z0s:
            raise ConfigError("z0s must list at least one base point")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        return self


def _coerce(name: str, raw: str, default):
    """Convert a config-file string to the type of the RunConfig default."""
    try:
        if name == "Ls":
            return [int(v) for v in raw.split(",") if v.strip()]
        if name == "z0s":
            return [float(v) for v in raw.split(",") if v.strip()]
        if name == "convergents":
            return [v.strip() for v in raw.split(",") if v.strip()]
        if name == "lam":
            return complex(raw.replace(" ", ""))
        if isinstance(default, bool):
            return raw.strip().lower() in ("1", "true", "yes")
        if isinstance(default, int):
            return int(raw)
        if isinstance(default, float):
            return float(raw)
        return raw
    except ValueError as e:
        raise ConfigError(f"config key '{name}': cannot parse '{raw}' ({e})") from e


def load_run_config(path: Optional[str] = None, overrides: Optional[Dict] = None) -> RunConfig:
    """
    Build a RunConfig from an optional key=value file plus command-line overrides.

    Args:
        path: Flat key=value file (same syntax as a .env file), or None
        overrides: Values from CLI flags; None entries are ignored

    Returns:
        Validated RunConfig

    Raises:
        ConfigError: If the file is missing, has unknown keys or invalid values
    """
    config = RunConfig()
    defaults = {f.name: getattr(config, f.name) for f in fields(RunConfig)}

    if path is not None:
        file_path = Path(path)
        if not file_path.exists():
            raise ConfigError(f"config file not found: {path}")
        for key, raw in dotenv_values(file_path).items():
            name = "output_dir" if key == "out" else key
            if name == "lambda":
                name = "lam"
            if name not in defaults:
                raise ConfigError(f"unknown config key '{key}' in {path}")
            if raw is None:
                continue
            setattr(config, name, _coerce(name, raw, defaults[name]))

    for name, value in (overrides or {}).items():
        if value is None:
            continue
        if name not in defaults:
            raise ConfigError(f"unknown override '{name}'")
        setattr(config, name, value)

    return config.validate()
