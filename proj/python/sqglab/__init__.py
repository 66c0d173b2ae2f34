"""Critical SQG solver, De Giorgi diagnostics and barrier lemmas."""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
