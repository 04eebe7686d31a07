"""
Shape library: vertex templates and developments of built-in polyhedra.

Faces are declared as vertex cycles in either winding; ``orient_face`` turns
each into a counterclockwise cycle about its outward normal (the normal that
points away from the centroid of all vertices). Rules are generated for every
pair of faces that share an edge.
"""

from __future__ import annotations

from collections.abc import Callable, Sequence
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np
from numpy.typing import ArrayLike, NDArray

from cyclic_formation.core.polyhedron import Development, Face, Rule
from cyclic_formation.exceptions import ParameterError

if TYPE_CHECKING:
    from cyclic_formation.simulation.scenario import Scenario

DOME_INNER_DEG = 35.0
DOME_OUTER_DEG = 70.0


@dataclass(frozen=True, eq=False)
class ShapeTemplate:
    """
    A built-in formation.

    Attributes:
        name: Library name
        vertices: Robot positions, shape (n, 3), side length ``side``
        development: Oriented faces plus generated rules
        side: Edge length of the template
    """

    name: str
    vertices: NDArray[np.float64]
    development: Development
    side: float

    @property
    def n(self) -> int:
        return len(self.vertices)


def newell_normal(points: ArrayLike) -> NDArray[np.float64]:
    """Unit normal of a planar polygon, right-handed with its vertex order."""
    p = np.asarray(points, dtype=float)
    normal = np.cross(p, np.roll(p, -1, axis=0)).sum(axis=0)
    return normal / np.linalg.norm(normal)


def orient_face(
    cycle: Sequence[int], vertices: NDArray[np.float64], body_center: ArrayLike
) -> Face:
    """Build a Face whose vertex order is counterclockwise about the outward normal."""
    ids = list(cycle)
    normal = newell_normal(vertices[ids])
    outward = vertices[ids].mean(axis=0) - np.asarray(body_center, dtype=float)
    if float(np.dot(normal, outward)) < 0.0:
        ids = [ids[0], *reversed(ids[1:])]
        normal = -normal
    return Face(ids, normal=normal)


def generate_rules(faces: Sequence[Face]) -> tuple[Rule, ...]:
    """One rule per pair of faces sharing an edge."""
    rules = []
    for i, a in enumerate(faces):
        for j in range(i + 1, len(faces)):
            for edge in sorted(tuple(sorted(e)) for e in a.edges() & faces[j].edges()):
                rules.append(Rule(i, j, (edge[0], edge[1])))
    return tuple(rules)


def _template(
    name: str, vertices: ArrayLike, cycles: Sequence[Sequence[int]], side: float
) -> ShapeTemplate:
    v = np.asarray(vertices, dtype=float)
    center = v.mean(axis=0)
    faces = tuple(orient_face(c, v, center) for c in cycles)
    return ShapeTemplate(name, v, Development(faces, generate_rules(faces)), side)


# =========================================================================
# Built-in shapes
# =========================================================================


def cube(side: float = 1.0) -> ShapeTemplate:
    """Eight robots; faces top, front, right, back, left, bottom."""
    h = side / 2.0
    top = [(-h, -h, h), (h, -h, h), (h, h, h), (-h, h, h)]
    bottom = [(x, y, -h) for x, y, _ in top]
    cycles = [
        (0, 1, 2, 3),
        (0, 1, 5, 4),
        (1, 2, 6, 5),
        (2, 3, 7, 6),
        (3, 0, 4, 7),
        (4, 5, 6, 7),
    ]
    return _template("cube", top + bottom, cycles, side)


def octahedron(side: float = 1.0) -> ShapeTemplate:
    """Six robots, eight triangles; the four upper faces come first."""
    a = side / np.sqrt(2.0)
    vertices = [(a, 0, 0), (0, a, 0), (-a, 0, 0), (0, -a, 0), (0, 0, a), (0, 0, -a)]
    cycles = [(pole, i, (i + 1) % 4) for pole in (4, 5) for i in range(4)]
    return _template("octahedron", vertices, cycles, side)


def hexagonal_box(side: float = 1.0) -> ShapeTemplate:
    """Twelve robots: a hexagonal prism with square sides."""
    angles = np.arange(6) * np.pi / 3.0
    ring = np.column_stack([side * np.cos(angles), side * np.sin(angles)])
    top = np.column_stack([ring, np.full(6, side / 2.0)])
    bottom = np.column_stack([ring, np.full(6, -side / 2.0)])
    cycles = [tuple(range(6))]
    cycles += [(i, (i + 1) % 6, 6 + (i + 1) % 6, 6 + i) for i in range(6)]
    cycles += [tuple(range(6, 12))]
    return _template("hexagonal_box", np.vstack([top, bottom]), cycles, side)


def tetrahedron(side: float = 1.0) -> ShapeTemplate:
    """Four robots, four triangles."""
    scale = side / (2.0 * np.sqrt(2.0))
    vertices = scale * np.array(
        [[1.0, 1.0, 1.0], [1.0, -1.0, -1.0], [-1.0, 1.0, -1.0], [-1.0, -1.0, 1.0]]
    )
    cycles = [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)]
    return _template("tetrahedron", vertices, cycles, side)


def dome(
    side: float = 1.0,
    inner_deg: float = DOME_INNER_DEG,
    outer_deg: float = DOME_OUTER_DEG,
) -> ShapeTemplate:
    """
    Twenty robots on a tree of nine squares.

    A horizontal top square carries one square on each edge, tilted
    ``inner_deg`` below horizontal, and each of those carries a further
    square tilted ``outer_deg`` below horizontal.
    """
    h = side / 2.0
    top = np.array([(h, -h, 0.0), (h, h, 0.0), (-h, h, 0.0), (-h, -h, 0.0)])
    vertices = list(top)
    cycles: list[tuple[int, ...]] = [(0, 1, 2, 3)]
    inner, outer = np.radians(inner_deg), np.radians(outer_deg)
    for i in range(4):
        a, b = i, (i + 1) % 4
        mid = 0.5 * (top[a] + top[b])
        out = mid / np.linalg.norm(mid)
        step1 = side * (np.cos(inner) * out - np.sin(inner) * np.array([0, 0, 1.0]))
        step2 = side * (np.cos(outer) * out - np.sin(outer) * np.array([0, 0, 1.0]))
        a1, b1 = len(vertices), len(vertices) + 1
        vertices += [top[a] + step1, top[b] + step1]
        a2, b2 = len(vertices), len(vertices) + 1
        vertices += [vertices[a1] + step2, vertices[b1] + step2]
        cycles.append((a, b, b1, a1))
        cycles.append((a1, b1, b2, a2))
    return _template("dome", vertices, cycles, side)


SHAPES: dict[str, Callable[..., ShapeTemplate]] = {
    "cube": cube,
    "dome": dome,
    "hexagonal_box": hexagonal_box,
    "octahedron": octahedron,
    "tetrahedron": tetrahedron,
}


def shape_names() -> list[str]:
    return sorted(SHAPES)


def build_shape(name: str, side: float = 1.0) -> ShapeTemplate:
    """
    Look up a built-in shape.

    Raises:
        ParameterError: If the name is unknown or the side is not positive
    """
    if name not in SHAPES:
        raise ParameterError(f"unknown shape {name!r}; known: {shape_names()}")
    if side <= 0.0:
        raise ParameterError(f"side must be positive, got {side}")
    return SHAPES[name](side)


def _rounded(v: ArrayLike) -> tuple[float, float, float]:
    x, y, z = (round(float(c), 12) + 0.0 for c in np.asarray(v).reshape(3))
    return (x, y, z)


def skeleton_scenario(name: str, side: float = 1.0) -> Scenario:
    """
    A complete point-mass scenario for a built-in shape.

    Face normals are computed from the template and frozen into the
    scenario, so the file does not depend on the library at load time.
    """
    from cyclic_formation.simulation.scenario import (
        FaceSpec,
        FormationSpec,
        InitialSpec,
        RuleSpec,
        Scenario,
        SimSpec,
    )

    template = build_shape(name, side)
    faces = [
        FaceSpec(
            vertices=list(face.vertex_ids),
            normal=_rounded(face.normal),
        )
        for face in template.development.faces
    ]
    rules = [
        RuleSpec(faces=(r.face_i, r.face_j), edge=r.edge)
        for r in template.development.rules
    ]
    return Scenario(
        name=name,
        description=f"Built-in {name} formation with {template.n} robots",
        tag="shape-library",
        formation=FormationSpec(
            kind="polyhedron", side_m=side, faces=faces, rules=rules
        ),
        initial=InitialSpec(kind="random_ball", radius_m=2.0 * side),
        sim=SimSpec(t_end_s=30.0, dt_s=0.01, log_interval_s=0.1),
    )
