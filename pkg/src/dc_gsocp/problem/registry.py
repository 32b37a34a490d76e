"""
Named problem registry backed by pluggy.

Built-in problems register through the same ``register_problems`` hook that
plugins discovered from the ``dc_gsocp.problems`` entry-point group use.
"""

import inspect
from collections.abc import Callable, Mapping
from dataclasses import dataclass, field
from importlib import metadata
from typing import Any

import pluggy

from ..hookspecs import ProblemHookSpecs
from ..utils.constants import PLUGIN_NAMESPACE, PROBLEM_ENTRY_POINT_GROUP
from ..utils.exceptions import UnknownProblemError
from ..utils.logging import get_logger
from .spec import ExactSolution, ProblemSpec

logger = get_logger(__name__)

ProblemFactory = Callable[..., tuple[ProblemSpec, ExactSolution | None]]


@dataclass(frozen=True)
class ProblemEntry:
    """A named problem factory with its default parameters."""

    name: str
    factory: ProblemFactory
    defaults: Mapping[str, float] = field(default_factory=dict)
    description: str = ""

    def parameters(self) -> list[str]:
        return list(inspect.signature(self.factory).parameters)

    def build(
        self,
        **overrides: float | None,
    ) -> tuple[ProblemSpec, ExactSolution | None]:
        """
        Build the problem, applying overrides on top of the defaults.

        ``None`` overrides are ignored, as are parameters the factory does not
        take (a warning is logged for the latter).
        """
        accepted = set(self.parameters())
        params = dict(self.defaults)
        for key, val in overrides.items():
            if val is None:
                continue
            if key not in accepted:
                logger.warning("ignoring parameter", problem=self.name, parameter=key)
                continue
            params[key] = val
        return self.factory(**params)


class ProblemRegistry:
    """Mapping from problem names to entries."""

    def __init__(self) -> None:
        self._entries: dict[str, ProblemEntry] = {}

    def add(self, entry: ProblemEntry) -> None:
        if entry.name in self._entries:
            logger.warning("replacing registered problem", problem=entry.name)
        self._entries[entry.name] = entry

    def get(self, name: str) -> ProblemEntry:
        try:
            return self._entries[name]
        except KeyError:
            raise UnknownProblemError(name, self.names()) from None

    def names(self) -> list[str]:
        return sorted(self._entries)

    def __contains__(self, name: object) -> bool:
        return name in self._entries


def create_plugin_manager() -> pluggy.PluginManager:
    """Create a plugin manager with the built-ins and entry-point plugins."""
    from . import builtins

    pm = pluggy.PluginManager(PLUGIN_NAMESPACE)
    pm.add_hookspecs(ProblemHookSpecs)
    pm.register(builtins, name="dc_gsocp.builtins")

    for entry_point in metadata.entry_points(group=PROBLEM_ENTRY_POINT_GROUP):
        try:
            pm.register(entry_point.load(), name=entry_point.name)
            logger.info("loaded problem plugin", plugin=entry_point.name)
        except Exception:  # noqa: BLE001
            logger.exception("error loading problem plugin", plugin=entry_point.name)

    pm.check_pending()
    return pm


class _RegistryState:
    registry: ProblemRegistry | None = None


_state = _RegistryState()


def get_registry(*, reload: bool = False) -> ProblemRegistry:
    """Return the process-wide registry, populating it on first use."""
    if _state.registry is None or reload:
        registry = ProblemRegistry()
        create_plugin_manager().hook.register_problems(registry=registry)
        _state.registry = registry
    return _state.registry


def available_problems() -> list[str]:
    return get_registry().names()


def problem_defaults(name: str) -> dict[str, float]:
    return dict(get_registry().get(name).defaults)


def get_problem(
    name: str,
    **overrides: Any,
) -> tuple[ProblemSpec, ExactSolution | None]:
    """
    Build a registered problem by name.

    Args:
        name: Registered problem name, e.g. "gheat", "lq" or "sine"
        **overrides: Parameter overrides (kappa, r0, sigma_lo, sigma_hi)

    Returns:
        The problem and its exact solution (None when not known)

    Raises:
        UnknownProblemError: If the name is not registered
    """
    return get_registry().get(name).build(**overrides)
