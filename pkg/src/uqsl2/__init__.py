"""Exact and numeric computations for tensor products of U_q(sl2) modules.

Coefficients live either in Q(q^{1/4}) (exact mode) or are complex floats at
a sample q (numeric mode); :class:`EvalContext` selects which.
"""

__version__ = "0.1.0"

from .qfield import (  # noqa: E402
    EXACT,
    NUMERIC,
    EvalContext,
    InvalidParameterError,
    PoleError,
    QError,
    QFrac,
    Radical,
    Residual,
    UnsupportedParameterError,
    bracket,
    compare,
    qfact,
    qpoch_bracket,
    qpoch_exp,
)
from .qseries import phi, phi_exp, q_hahn, q_racah, summation_sides, verify_summation  # noqa: E402
from .repsl2 import ModuleId, TensorElement  # noqa: E402
from .intertwine import cgc, q3j  # noqa: E402
from .fusion import boundary_apply, fusion_apply, fusion_elem, fusion_inv_elem  # noqa: E402
from .exchange import (  # noqa: E402
    SixJLabel,
    check_qdybe,
    exchange_apply,
    exchange_elem,
    racah_W,
    sixj,
    sixj_symbol,
)

__all__ = [
    "EXACT",
    "NUMERIC",
    "EvalContext",
    "InvalidParameterError",
    "PoleError",
    "QError",
    "QFrac",
    "Radical",
    "Residual",
    "UnsupportedParameterError",
    "bracket",
    "compare",
    "qfact",
    "qpoch_bracket",
    "qpoch_exp",
    "SixJLabel",
    "check_qdybe",
    "exchange_apply",
    "exchange_elem",
    "racah_W",
    "sixj",
    "sixj_symbol",
    "phi",
    "phi_exp",
    "q_hahn",
    "q_racah",
    "summation_sides",
    "verify_summation",
    "ModuleId",
    "TensorElement",
    "cgc",
    "q3j",
    "boundary_apply",
    "fusion_apply",
    "fusion_elem",
    "fusion_inv_elem",
]
