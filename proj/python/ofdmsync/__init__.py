"""DVB-T 2K OFDM simulator with cyclic-prefix timing estimation."""

from ofdmsync._core import *  # noqa: F401,F403
from ofdmsync._core import __doc__  # noqa: F401

__version__ = "0.1.0"
