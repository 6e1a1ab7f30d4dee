"""Parallel-beam tomography test problems."""

from .geometry import ProjectionGeometry, chord_length, detector_basis, trace_ray
from .lebedev import SUPPORTED_PROJECTIONS, lebedev_directions, lebedev_rule
from .phantom import Ellipsoid, shepp_logan_3d, shepp_logan_ellipsoids, voxel_centers
from .system import (
    PRESETS,
    BuiltProblem,
    TestProblem,
    add_noise,
    build_system_matrix,
    generate_test_problem,
    get_preset,
    load_problem_source,
    make_test_problem,
)

__all__ = [
    "PRESETS",
    "SUPPORTED_PROJECTIONS",
    "BuiltProblem",
    "Ellipsoid",
    "ProjectionGeometry",
    "TestProblem",
    "add_noise",
    "build_system_matrix",
    "chord_length",
    "detector_basis",
    "generate_test_problem",
    "get_preset",
    "lebedev_directions",
    "lebedev_rule",
    "load_problem_source",
    "make_test_problem",
    "shepp_logan_3d",
    "shepp_logan_ellipsoids",
    "trace_ray",
    "voxel_centers",
]
