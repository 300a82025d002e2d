from ._anaflow import *  # noqa: F401,F403
from ._anaflow import __version__  # noqa: F401
