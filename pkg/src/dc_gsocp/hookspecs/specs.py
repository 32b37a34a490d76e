"""
Hook specifications for problem providers.
"""

from typing import TYPE_CHECKING

import pluggy

from ..utils.constants import PLUGIN_NAMESPACE

if TYPE_CHECKING:
    from ..problem.registry import ProblemRegistry

hookspec = pluggy.HookspecMarker(PLUGIN_NAMESPACE)
hookimpl = pluggy.HookimplMarker(PLUGIN_NAMESPACE)


class ProblemHookSpecs:
    """Hook specifications for problem registration."""

    @hookspec
    def register_problems(self, registry: "ProblemRegistry") -> None:
        """Register named problems.

        Args:
            registry: Registry to add ``ProblemEntry`` objects to
        """
