"""Exact computer algebra for the (ell, trig) double elliptic system.

Finite-N Dell-Cherednik operators and their generating functions, the
inverse-limit construction on symmetric functions, and verifiers for the
identities that tie the two together.  All arithmetic is exact over Q(q, t, w)
with formal truncation in omega and a finite window in u.
"""

from .reports import Report
from .scalars import BigRat, ParamLaurent, ParamScalar, qt, rat
from .series import OmegaUSeries, ptheta_weights, series_invert, theta_scalar
from .symfunc import SymFunc, VElement, macdonald_poly, partitions, q_coeff, qstar_apply

__version__ = "0.1.0"

__all__ = [
    "BigRat", "OmegaUSeries", "ParamLaurent", "ParamScalar", "Report", "SymFunc", "VElement",
    "macdonald_poly", "partitions", "ptheta_weights", "q_coeff", "qstar_apply", "qt", "rat",
    "series_invert", "theta_scalar",
]
