"""Facet counts, cap measures and covering numbers of easily covered polytopes."""

__version__ = "0.1.0"

from .polytope import (  # noqa: E402
    PolytopeH,
    PolytopeV,
    circumradius_at_origin,
    facet_at_direction,
    facet_enumeration,
    gauge,
    inradius_at_origin,
    polar_dual,
    radial,
    support,
)
from .sphere import exact_cap_measure, lemma5_bound, prop2_bound  # noqa: E402
