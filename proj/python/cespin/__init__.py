"""Central-spin coherence and optical-pumping toolkit (compiled core)."""

from ._core import *  # noqa: F401,F403
from ._core import __doc__ as _core_doc  # noqa: F401
from ._core import constants  # noqa: F401

__version__ = "1.0.0"
