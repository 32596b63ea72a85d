"""Dispersive Maxwell media: passivity, band structure, Herglotz measures and FDTD."""

from . import dispersion, material, nevanlinna, ratfun
from .errors import DispersiaError

__all__ = ["ratfun", "material", "dispersion", "nevanlinna", "DispersiaError"]
__version__ = "0.1.0"
