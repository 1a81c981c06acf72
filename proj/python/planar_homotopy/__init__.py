"""Raster-scale tools for homotopically 1-dimensional planar sets."""

from ._core import (
    Raster,
    Scene,
    build_spine,
    builtin_scene,
    cancellation_lamination,
    cli,
    find_2x2_block,
    homotopy_dimension_verdict,
    ideal_triangulation,
    injectivity_probe,
    label_components,
    random_loop,
    run_graph,
    run_stages,
    sierpinski_carpet,
    validate_scene,
    word_string,
)

__all__ = [
    "Raster",
    "Scene",
    "build_spine",
    "builtin_scene",
    "cancellation_lamination",
    "cli",
    "find_2x2_block",
    "homotopy_dimension_verdict",
    "ideal_triangulation",
    "injectivity_probe",
    "label_components",
    "random_loop",
    "run_graph",
    "run_stages",
    "sierpinski_carpet",
    "validate_scene",
    "word_string",
]
