"""
Formation subspaces and the cyclic controllers that converge to them.

- linalg: circulant and block-circulant matrices, rotations
- subspace: the polygon constraint matrix and its orthonormal factors
- cyclic: symmetric cyclic pursuit and its eigenvalue certificate
- polyhedron: developments, minimal partial surfaces, per-face control
- report: certification results
"""

from cyclic_formation.core.cyclic import (
    CyclicParams,
    InternalDynamics,
    assemble_L,
    closed_form_eigenvalues,
    closed_form_margin,
    contraction_rate,
    cyclic_control,
    numeric_margin,
    theorem4_margin,
)
from cyclic_formation.core.linalg import (
    BlockCirculant,
    CirculantSpec,
    Rotation3,
    ShiftCirculant,
    block_circulant_eigenvalues,
    build_shift_circulant,
    circulant,
    circulant_eigenpairs,
    circulant_eigenvalues,
    kron,
    plane_rotation,
    rotation_about_axis,
    rotation_about_z,
    similarity_rotate,
)
from cyclic_formation.core.polyhedron import (
    Development,
    Face,
    MinimalPPS,
    Rule,
    SelectionMatrix,
    ValidationReport,
    build_face_constraints,
    build_reduced_V,
    dual_graph,
    extract_minimal_pps,
    face_params,
    face_selection,
    polyhedron_control,
    polyhedron_laplacian,
    stacked_full_V,
    theorem7_certify,
    validate_development,
)
from cyclic_formation.core.report import CertificationEntry, CertificationReport
from cyclic_formation.core.subspace import (
    ConstraintMatrix,
    PolygonSpec,
    build_polygon_V,
    formation_error,
    orthonormalize,
    regular_polygon,
    spiral,
)

__all__ = [
    "BlockCirculant",
    "CertificationEntry",
    "CertificationReport",
    "CirculantSpec",
    "ConstraintMatrix",
    "CyclicParams",
    "Development",
    "Face",
    "InternalDynamics",
    "MinimalPPS",
    "PolygonSpec",
    "Rotation3",
    "Rule",
    "SelectionMatrix",
    "ShiftCirculant",
    "ValidationReport",
    "assemble_L",
    "block_circulant_eigenvalues",
    "build_face_constraints",
    "build_polygon_V",
    "build_reduced_V",
    "build_shift_circulant",
    "circulant",
    "circulant_eigenpairs",
    "circulant_eigenvalues",
    "closed_form_eigenvalues",
    "closed_form_margin",
    "contraction_rate",
    "cyclic_control",
    "dual_graph",
    "extract_minimal_pps",
    "face_params",
    "face_selection",
    "formation_error",
    "kron",
    "numeric_margin",
    "orthonormalize",
    "plane_rotation",
    "polyhedron_control",
    "polyhedron_laplacian",
    "regular_polygon",
    "rotation_about_axis",
    "rotation_about_z",
    "similarity_rotate",
    "spiral",
    "stacked_full_V",
    "theorem4_margin",
    "theorem7_certify",
    "validate_development",
]
