"""Numerical checks of curvature comparison conditions on concrete metric spaces."""
from ._kernels import BACKEND, available_backends, get_backend
from .conditions import *  # noqa: F401,F403
from .doubling import *  # noqa: F401,F403
from .modelspace import *  # noqa: F401,F403
from .reporting import *  # noqa: F401,F403
from .spaces import *  # noqa: F401,F403
from .supportsense import *  # noqa: F401,F403

__version__ = "0.1.0"
