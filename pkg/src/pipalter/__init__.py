from .instances.bases import NormalizedInstance, PipInstance
from .instances.normalization import normalize
from .rounding.framework import round_and_alter
from .rounding.regimes import select_regime
from .solvers.simplex import solve_lp

__version__ = "0.1.0"
