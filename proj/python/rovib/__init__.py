"""Rovibrational structure, transition strengths and polarizabilities of diatomics."""
from ._core import *  # noqa: F401,F403
from ._core import __version__, RovibError  # noqa: F401
