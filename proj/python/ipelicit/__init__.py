"""Imprecise-probability uncertainty elicitation for language models."""

from ipelicit._core import *  # noqa: F401,F403
from ipelicit._core import IpelicitError, synth  # noqa: F401

__version__ = "0.1.0"
