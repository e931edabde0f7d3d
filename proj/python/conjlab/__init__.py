"""Pedal-ratio geometry and generalized Fermat prime search."""

from conjlab._core import (  # noqa: F401
    ConjlabError,
    ConstantEstimate,
    ConvexPolygon2D,
    Polyhedron3D,
    RatioReport,
    RatioReport3,
    __version__,
    contains_interior,
    contains_interior_3d,
    cube,
    edge_pedal,
    em_ratio,
    em_ratio_3d,
    estimate_constant_2d,
    estimate_constant_3d,
    face_pedal,
    fermat_search,
    fermat_test,
    find_k0,
    min_ratio_over_probes,
    oblique_pedal,
    perpendicular_pedal,
    prime_positions,
    prime_streak,
    regular_polygon,
    regular_tetrahedron,
    sample_convex_polygon,
    tower_value,
    validate_polygon,
    validate_polyhedron,
    validate_triplet,
    vertex_distances,
)
