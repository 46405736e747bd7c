"""Compressed-sensing MRI reconstruction with automatic tuning-parameter selection.

The heavy lifting lives in the C++ extension ``_core``; this package re-exports
its operations: phantom/coil/trajectory simulation, the measurement operator
and its adjoint, TV-LASSO reconstruction by ADMM, the iterative
tuning-parameter search (``alma_run``), the L-curve baseline and the image
quality metrics.
"""

try:
    from ._core import *  # noqa: F401,F403  (installed package layout)
    from ._core import __version__  # noqa: F401
except ImportError:  # pragma: no cover - build-tree layout used by the tests
    from _core import *  # noqa: F401,F403
    from _core import __version__  # noqa: F401
