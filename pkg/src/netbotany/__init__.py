"""Geodesic network graph enumeration and random-geometry simulation toolkit."""

__version__ = "0.1.0"

from .netgraph import (  # noqa: F401
    NetworkGraph,
    RuleReport,
    CanonicalCode,
    GraphInvariants,
    check_rules,
    transpose,
    canonical_code,
    is_planar,
    face_count,
    count_geodesics,
    d_value,
    is_dense_class,
)
from .botany import (  # noqa: F401
    StarProfile,
    Catalog,
    enumerate_landscape,
    enumerate_with_star_profile,
    catalog_summary,
    export_catalog,
    parse_profile,
)
