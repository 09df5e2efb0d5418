"""Optimal placement of a conductive disc in a heated two-material square.

Thin wrapper over the compiled ``_heatshape`` extension.
"""

try:
    from ._heatshape import *  # noqa: F401,F403
    from ._heatshape import __doc__ as _ext_doc  # noqa: F401
except ImportError:  # in-tree build: extension sits next to the package
    from _heatshape import *  # noqa: F401,F403

__all__ = [
    "ConfigError",
    "ContractViolation",
    "GeometryError",
    "IoError",
    "Mesh",
    "MeshError",
    "OptimizerConfig",
    "Problem",
    "SolverError",
    "generate_mesh",
    "project_center",
]
