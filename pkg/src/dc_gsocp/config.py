"""
Run configuration.

A run is described by :class:`RunConfig`, loaded with the precedence
command-line flag > config file > ``GSOCP_*`` environment > defaults. The config
file is a flat dotenv-style ``key=value`` document; keys are case-insensitive
and may use dashes or underscores.
"""

from pathlib import Path
from typing import Annotated, Any

from dotenv import dotenv_values
from pydantic import Field, ValidationError, field_validator
from pydantic_settings import BaseSettings, NoDecode, SettingsConfigDict

from .solver import SolverConfig
from .utils.constants import (
    CONFIG_ENV_PREFIX,
    CONFIG_INVALID_ERROR,
    DEFAULT_EXTRA_LEVELS,
    DEFAULT_GH_ORDER,
    DEFAULT_GRID_FACTOR,
    DEFAULT_MC_PATHS,
    DEFAULT_SEED,
    MIN_MC_PATHS,
    N_LIST_EMPTY_ERROR,
    N_LIST_ORDER_ERROR,
)
from .utils.definitions import GridScale, InterpMethod, PathLike, RunMode, SchemeKind
from .utils.exceptions import ConfigFileNotFoundError, ConfigurationError

DEFAULT_N_LIST = (16, 32, 64, 128, 256)


class RunConfig(BaseSettings):
    """
    Everything needed to reproduce one experiment.

    Example usage:
    ```python
    cfg = RunConfig(problem="lq", scheme="trinomial", n_list=[16, 32])
    cfg = RunConfig.from_file("experiments/table1.env", out="table1.csv")
    ```
    """

    mode: RunMode = Field(default=RunMode.CONVERGE, description="Experiment to run")
    problem: str = Field(default="gheat", description="Registered problem name")
    kappa: float | None = Field(default=None, description="lq mean-reversion rate")
    r0: float | None = Field(default=None, description="lq discount rate")
    sigma_lo: float | None = Field(default=None, ge=0.0, description="Lower volatility")
    sigma_hi: float | None = Field(default=None, ge=0.0, description="Upper volatility")

    scheme: SchemeKind = Field(
        default=SchemeKind.TRINOMIAL,
        description="Lattice scheme",
    )
    gh_order: int = Field(default=DEFAULT_GH_ORDER, description="Gauss-Hermite order")
    extra_levels: int = Field(default=DEFAULT_EXTRA_LEVELS, ge=0)
    n_list: Annotated[list[int], NoDecode] = Field(
        default_factory=lambda: list(DEFAULT_N_LIST),
    )
    x0: float = 0.0
    controls: int | None = Field(default=None, ge=1, description="Control samples M")
    grid_factor: float = Field(default=DEFAULT_GRID_FACTOR, gt=0.0)
    grid_scale: GridScale = GridScale.DELTA
    grid_spacing: float | None = Field(default=None, gt=0.0)
    truncation_radius: float | None = Field(default=None, gt=0.0)
    interp: InterpMethod = InterpMethod.LINEAR
    strict_domain: bool = False
    workers: int = Field(default=1, ge=1)

    out: Path | None = Field(default=None, description="Output CSV (stdout when unset)")
    dump_fields: Path | None = Field(
        default=None,
        description="Directory for field CSVs",
    )
    timings: bool = Field(default=True, description="Record wall times in reports")

    seed: int = Field(default=DEFAULT_SEED, ge=0, lt=2**64)
    paths: int = Field(default=DEFAULT_MC_PATHS, ge=MIN_MC_PATHS)
    theta: float | None = Field(default=None, ge=0.0)

    model_config = SettingsConfigDict(
        env_prefix=CONFIG_ENV_PREFIX,
        extra="ignore",
        case_sensitive=False,
        validate_default=True,
    )

    @field_validator("n_list", mode="before")
    @classmethod
    def parse_n_list(cls, v: Any) -> Any:
        if isinstance(v, str):
            return [int(item) for item in v.replace(" ", "").split(",") if item]
        if isinstance(v, int):
            return [v]
        return v

    @field_validator("n_list")
    @classmethod
    def validate_n_list(cls, v: list[int]) -> list[int]:
        if not v:
            raise ValueError(N_LIST_EMPTY_ERROR)
        if v[0] < 1 or any(b <= a for a, b in zip(v, v[1:], strict=False)):
            raise ValueError(N_LIST_ORDER_ERROR)
        return v

    def problem_overrides(self) -> dict[str, float | None]:
        return {
            "kappa": self.kappa,
            "r0": self.r0,
            "sigma_lo": self.sigma_lo,
            "sigma_hi": self.sigma_hi,
        }

    def solver_config(self, n_steps: int) -> SolverConfig:
        """Solver settings for one entry of ``n_list``."""
        return SolverConfig(
            n_steps=n_steps,
            scheme=self.scheme,
            gh_order=self.gh_order,
            extra_levels=self.extra_levels,
            control_samples=self.controls,
            grid_factor=self.grid_factor,
            grid_scale=self.grid_scale,
            grid_spacing=self.grid_spacing,
            truncation_radius=self.truncation_radius,
            interp=self.interp,
            strict_domain=self.strict_domain,
            workers=self.workers,
        )

    @classmethod
    def from_file(
        cls,
        file_path: PathLike | None = None,
        **overrides: Any,
    ) -> "RunConfig":
        """
        Load a configuration file and apply overrides on top of it.

        Args:
            file_path: dotenv-style ``key=value`` file (optional)
            **overrides: Values taking precedence over the file; ``None`` is
                treated as "not given"

        Returns:
            RunConfig

        Raises:
            ConfigFileNotFoundError: If the file does not exist
            ConfigurationError: If the merged values are invalid
        """
        data: dict[str, Any] = {}
        if file_path is not None:
            path = Path(file_path)
            if not path.is_file():
                raise ConfigFileNotFoundError(path)
            for key, value in dotenv_values(path).items():
                if value is not None:
                    data[normalize_key(key)] = value
        data.update({k: v for k, v in overrides.items() if v is not None})
        return build_run_config(**data)


def normalize_key(key: str) -> str:
    """``--Sigma-Lo`` style keys to ``sigma_lo``."""
    return key.strip().lstrip("-").lower().replace("-", "_")


def build_run_config(**values: Any) -> RunConfig:
    """Construct a RunConfig, converting validation failures to ConfigurationError."""
    try:
        return RunConfig(**values)
    except ValidationError as exc:
        errors = [
            f"{'.'.join(str(p) for p in err['loc'])}: {err['msg']}"
            for err in exc.errors()
        ]
        raise ConfigurationError(
            CONFIG_INVALID_ERROR.format("; ".join(errors)),
            {"errors": errors},
        ) from exc
