"""Speed of convergence of ergodic means for shift operators.

Exact lattice dynamics of toral endomorphisms, a coefficient-space shift model, toral
averages and their convergence profiles, and the Walsh/baker and Laguerre shifts.
"""

from .errors import (CaseNotApplicable, ConfigInvalid, FrequencyOverflow, NonErgodicMatrix,
                     NullSetPoint, PeriodicOrbitWarning, PrecisionExhausted, RationalEigenvalue,
                     ShiftRateError, UnimodularMatrix, WindowExhausted)
from .intmat import IntMatrix
from .qfield import QuadElem
from .lattice import (Spectral, SpectralClass, OrbitRep, ShellPartition, classify, delta_growth,
                      diagonalizer, dirichlet_bound, orbit_representative, rep_growth, shell_index,
                      verify_svp)
from .shift import (CoeffVector, Kind, MaximalPair, PowerLog, apply_shift, banach_witness,
                    ergodic_mean, kronecker_limit, norm_bound_check, projection_norms, rm_rhs,
                    weighted_maximal_pair)
from .rates import RateSeries, geometric_grid
from .torus import (FourierFunction, RationalPoint, pointwise_mean, rate_series, spectral_mean,
                    projection_norm_sum, random_generic_point)
from .discrepancy import (BoxDomain, DiskDomain, PolygonDomain, boundary_shell_measure,
                          dyadic_modulus_bound, indicator_discrepancy, modulus_of_continuity)
from .walsh import (DyadicPoint, WalshIndexSet, baker_apply, baker_rate_series, rademacher,
                    walsh_eval, walsh_shift_check)
from .laguerre import (LaguerrePoly, laguerre_mean_check, laguerre_pointwise_rate, laguerre_poly,
                       laguerre_shift)

__all__ = [
    "CaseNotApplicable", "ConfigInvalid", "FrequencyOverflow", "NonErgodicMatrix",
    "NullSetPoint", "PeriodicOrbitWarning", "PrecisionExhausted", "RationalEigenvalue",
    "ShiftRateError", "UnimodularMatrix", "WindowExhausted", "IntMatrix", "QuadElem",
    "Spectral", "SpectralClass", "OrbitRep", "ShellPartition", "classify", "delta_growth",
    "diagonalizer", "dirichlet_bound", "orbit_representative", "rep_growth", "shell_index",
    "verify_svp", "CoeffVector", "Kind", "MaximalPair", "PowerLog", "apply_shift",
    "banach_witness", "ergodic_mean", "kronecker_limit", "norm_bound_check",
    "projection_norms", "rm_rhs", "weighted_maximal_pair", "RateSeries", "geometric_grid",
    "FourierFunction", "RationalPoint", "pointwise_mean", "rate_series", "spectral_mean",
    "projection_norm_sum", "random_generic_point", "BoxDomain", "DiskDomain", "PolygonDomain",
    "boundary_shell_measure", "dyadic_modulus_bound", "indicator_discrepancy",
    "modulus_of_continuity", "DyadicPoint", "WalshIndexSet", "baker_apply",
    "baker_rate_series", "rademacher", "walsh_eval", "walsh_shift_check", "LaguerrePoly",
    "laguerre_mean_check", "laguerre_pointwise_rate", "laguerre_poly", "laguerre_shift",
]

__version__ = "0.1.0"
