__version__ = "0.1.0"

from .circle import GridFunction, TrigPoly
from .exceptions import LacunaryError, NumericalAnomalyError, PreconditionError
from .expressions import parse_function
from .lac_config import LacunaryConfig
from .spectra import SpectralSet, parse_descriptor
