"""Series of time-dependent similarity maps for PT-symmetric coupled oscillators."""

from . import algebra, auxode, fock, forge, paths, profiles, seeds
from .config import RunConfig

__all__ = ["algebra", "auxode", "fock", "forge", "paths", "profiles",
           "seeds", "RunConfig"]

__version__ = "0.1.0"
