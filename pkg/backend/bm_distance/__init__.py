# bm_distance/__init__.py
"""
Banach–Mazur distance toolkit
=============================
Public API surface:

    from bm_distance import certify_sandwich, EXTREMAL_3D_MATRIX, asymmetry

    cert = certify_sandwich(EXTREMAL_3D_MATRIX, Fraction(5, 9))
    cert.ratio            # Fraction(9, 5)

    # CLI
    python backend/main.py --help
"""

from bm_distance.asymmetry   import AsymmetryResult, asymmetry, polygon_asymmetry
from bm_distance.certify     import (
    EXTREMAL_3D_MATRIX,
    EXTREMAL_4D_MATRICES,
    OperatorT,
    SandwichCertificate,
    certify_sandwich,
    enumerate_nice_octahedra,
    inner_radius,
    is_nice,
    outer_radius,
    ratio,
)
from bm_distance.equidistant import PentagonParams, certify_equidistance, pentagon
from bm_distance.exact       import HPolytope, QMatrix, VPolytope, cross_polytope, cube
from bm_distance.lp          import LPResult, lp_max

__all__ = [
    "AsymmetryResult", "asymmetry", "polygon_asymmetry",
    "EXTREMAL_3D_MATRIX", "EXTREMAL_4D_MATRICES", "OperatorT", "SandwichCertificate",
    "certify_sandwich", "enumerate_nice_octahedra", "inner_radius", "is_nice", "outer_radius", "ratio",
    "PentagonParams", "certify_equidistance", "pentagon",
    "HPolytope", "QMatrix", "VPolytope", "cross_polytope", "cube",
    "LPResult", "lp_max",
]
