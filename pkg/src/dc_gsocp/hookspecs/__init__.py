"""
Hook specifications for the dc-gsocp plugin system.

Third-party packages expose problems by implementing ``register_problems`` in a
module listed under the ``dc_gsocp.problems`` entry-point group.
"""

from .specs import ProblemHookSpecs, hookimpl, hookspec

__all__ = ["ProblemHookSpecs", "hookimpl", "hookspec"]
