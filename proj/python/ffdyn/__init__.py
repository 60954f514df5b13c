"""Exact arithmetic dynamics over k(t).

Thin re-export of the compiled extension: places and valuations, resultants,
reduction reports, isotriviality verdicts, local heights, filled-Julia
membership, transfinite diameters, preperiodic points and stabilizers.
"""

from _ffdyn import (  # noqa: F401
    __version__,
    isotriviality,
    julia_membership,
    local_height,
    log_abs,
    m_diameter,
    ord,
    preperiodic_points,
    product_formula_sum,
    reduction_report,
    res_ord,
    resultant,
    stabilizer_order,
    support,
    verify,
)
