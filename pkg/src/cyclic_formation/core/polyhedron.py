"""
Polyhedral formations built from regular polygonal faces.

A Development is a set of faces plus rules identifying shared edges. A
minimal partial polyhedral surface (PPS) is a vertex-spanning subset of faces
whose dual graph is a tree. The reduced constraint matrix keeps the full
polygon constraints on the first two faces and only the rotational rows on
the rest.

Face vertex ids are listed counterclockwise about the outward normal. The
controllers and constraints walk each face in the opposite (clockwise) order,
which is the order the polygon constraints expect.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass, field

import networkx as nx
import numpy as np
import scipy.linalg
from numpy.typing import ArrayLike, NDArray

from cyclic_formation.core.cyclic import (
    CERTIFY_TOL,
    CyclicParams,
    assemble_L,
    cyclic_control,
)
from cyclic_formation.core.linalg import E_Z, is_rotation, kron, plane_rotation
from cyclic_formation.core.report import CertificationEntry
from cyclic_formation.core.subspace import (
    ConstraintMatrix,
    constraint_matrix,
    numeric_rank,
    polygon_operator,
    selection_matrices,
)
from cyclic_formation.exceptions import ParameterError, StructuralError

logger = logging.getLogger(__name__)


# =========================================================================
# Domain types
# =========================================================================


@dataclass(frozen=True, eq=False)
class Face:
    """
    One regular polygonal face.

    Attributes:
        vertex_ids: Robot ids, counterclockwise about the outward normal
        normal_rotation: R_eta_k with R_eta_k^T e_z equal to the outward normal
    """

    vertex_ids: tuple[int, ...]
    normal_rotation: NDArray[np.float64]

    def __init__(
        self,
        vertex_ids: Sequence[int],
        normal: ArrayLike | None = None,
        normal_rotation: ArrayLike | None = None,
    ) -> None:
        ids = tuple(int(v) for v in vertex_ids)
        if len(ids) < 3:
            raise ParameterError(f"a face needs at least 3 vertices, got {ids}")
        if len(set(ids)) != len(ids):
            raise ParameterError(f"face vertex ids must be unique, got {ids}")
        if normal_rotation is not None:
            r = np.asarray(normal_rotation, dtype=float)
            if not is_rotation(r):
                raise ParameterError("normal_rotation must be a proper rotation")
        elif normal is not None:
            r = plane_rotation(normal)
        else:
            raise ParameterError("a face needs a normal or a normal_rotation")
        object.__setattr__(self, "vertex_ids", ids)
        object.__setattr__(self, "normal_rotation", r)

    @property
    def size(self) -> int:
        return len(self.vertex_ids)

    @property
    def normal(self) -> NDArray[np.float64]:
        return np.asarray(self.normal_rotation.T @ E_Z)

    @property
    def cyclic_order(self) -> tuple[int, ...]:
        """Vertex ids clockwise about the outward normal, starting at the first id."""
        first, *rest = self.vertex_ids
        return (first, *reversed(rest))

    def edges(self) -> set[frozenset[int]]:
        ids = self.vertex_ids
        return {frozenset((ids[i], ids[(i + 1) % len(ids)])) for i in range(len(ids))}

    def has_edge(self, a: int, b: int) -> bool:
        return frozenset((a, b)) in self.edges()


@dataclass(frozen=True)
class Rule:
    """Identification of an edge shared by two faces (indices into the face list)."""

    face_i: int
    face_j: int
    edge: tuple[int, int]

    @property
    def key(self) -> tuple[frozenset[int], frozenset[int]]:
        return frozenset((self.face_i, self.face_j)), frozenset(self.edge)


@dataclass(frozen=True)
class Development:
    """Faces plus the rules that glue them together."""

    faces: tuple[Face, ...]
    rules: tuple[Rule, ...] = ()

    @property
    def vertex_ids(self) -> list[int]:
        return sorted({v for f in self.faces for v in f.vertex_ids})

    @property
    def n(self) -> int:
        """Robot count (largest vertex id + 1)."""
        return max(self.vertex_ids) + 1


@dataclass(frozen=True)
class Violation:
    """One failed development property."""

    kind: str
    message: str
    faces: tuple[int, ...] = ()
    edge: tuple[int, int] | None = None


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return not self.violations


@dataclass(frozen=True)
class MinimalPPS:
    """
    Tree-structured, vertex-spanning subset of a development.

    Attributes:
        faces: Selected faces, breadth-first from the root
        rules: Rules joining each non-root face to its parent
        face_ids: Index of each selected face in the source development
        n: Robot count
    """

    faces: tuple[Face, ...]
    rules: tuple[Rule, ...]
    face_ids: tuple[int, ...]
    n: int

    def as_development(self) -> Development:
        return Development(self.faces, self.rules)


@dataclass(frozen=True, eq=False)
class SelectionMatrix:
    """E^(k) = Ebar^(k) (x) I_3, extracting face k's robots in cyclic order."""

    face_id: int
    matrix: NDArray[np.float64]


# =========================================================================
# Development checks
# =========================================================================


def dual_graph(d: Development) -> nx.Graph:
    """Graph with one node per face and one edge per rule."""
    graph = nx.Graph()
    graph.add_nodes_from(range(len(d.faces)))
    for rule in d.rules:
        graph.add_edge(rule.face_i, rule.face_j, edge=rule.edge)
    return graph


def validate_development(d: Development) -> ValidationReport:
    """
    Check the development properties and report every violation.

    1. Each edge shared by two faces is identified by exactly one rule.
    2. The dual graph is connected.
    3. Each side of a polygon is matched with at most one other polygon.
    """
    report = ValidationReport()
    count = len(d.faces)

    sides: dict[tuple[int, frozenset[int]], int] = {}
    pair_rules: dict[tuple[frozenset[int], frozenset[int]], int] = {}
    for rule in d.rules:
        if not (0 <= rule.face_i < count and 0 <= rule.face_j < count):
            report.violations.append(
                Violation("rule", f"rule {rule} references an unknown face")
            )
            continue
        a, b = rule.edge
        if rule.face_i == rule.face_j or not (
            d.faces[rule.face_i].has_edge(a, b) and d.faces[rule.face_j].has_edge(a, b)
        ):
            report.violations.append(
                Violation(
                    "rule",
                    f"edge {rule.edge} is not a side of both faces "
                    f"{rule.face_i} and {rule.face_j}",
                    (rule.face_i, rule.face_j),
                    rule.edge,
                )
            )
            continue
        pair_rules[rule.key] = pair_rules.get(rule.key, 0) + 1
        for face in (rule.face_i, rule.face_j):
            side = (face, frozenset(rule.edge))
            sides[side] = sides.get(side, 0) + 1

    # Property 1
    for i in range(count):
        for j in range(i + 1, count):
            for edge in d.faces[i].edges() & d.faces[j].edges():
                hits = pair_rules.get((frozenset((i, j)), edge), 0)
                if hits != 1:
                    pair = tuple(sorted(edge))
                    report.violations.append(
                        Violation(
                            "shared_edge",
                            f"edge {pair} shared by faces {i} and {j} "
                            f"appears in {hits} rules",
                            (i, j),
                            (pair[0], pair[1]),
                        )
                    )

    # Property 2
    if count and not nx.is_connected(dual_graph(d)):
        parts = [sorted(c) for c in nx.connected_components(dual_graph(d))]
        report.violations.append(
            Violation("disconnected", f"dual graph has components {parts}")
        )

    # Property 3
    for (face, edge), hits in sorted(sides.items(), key=lambda kv: kv[0][0]):
        if hits > 1:
            pair = tuple(sorted(edge))
            report.violations.append(
                Violation(
                    "multiple_match",
                    f"side {pair} of face {face} is matched {hits} times",
                    (face,),
                    (pair[0], pair[1]),
                )
            )
    return report


# =========================================================================
# Minimal partial polyhedral surfaces
# =========================================================================


def extract_minimal_pps(d: Development, root: int = 0) -> MinimalPPS:
    """
    Grow a vertex-spanning tree of faces from ``root``.

    At each step the candidate adjacent to exactly one selected face that
    covers the most new vertices is added; ties go to the lowest face index.
    When no candidate adds a vertex, the candidate closest (in the dual graph)
    to an uncovered vertex is taken. The result is ordered breadth-first from
    the root, so faces 1 and 2 share an edge.

    Raises:
        StructuralError: If the development is invalid or no spanning tree exists
    """
    report = validate_development(d)
    if not report.valid:
        raise StructuralError(
            "invalid development: " + "; ".join(v.message for v in report.violations)
        )
    if not 0 <= root < len(d.faces):
        raise StructuralError(f"root face {root} does not exist")

    graph = dual_graph(d)
    all_vertices = set(d.vertex_ids)
    selected = [root]
    parent_rule: dict[int, Rule] = {}
    covered = set(d.faces[root].vertex_ids)

    while covered != all_vertices:
        candidates = []
        for face in sorted(set(graph.nodes) - set(selected)):
            links = [s for s in selected if graph.has_edge(face, s)]
            if len(links) == 1:
                gain = len(set(d.faces[face].vertex_ids) - covered)
                candidates.append((gain, face, links[0]))
        if not candidates:
            raise StructuralError(
                f"no tree of faces spans vertices {sorted(all_vertices - covered)}"
            )
        best_gain = max(c[0] for c in candidates)
        if best_gain > 0:
            _, face, link = min(
                (c for c in candidates if c[0] == best_gain), key=lambda c: c[1]
            )
        else:
            targets = [
                f for f, face_obj in enumerate(d.faces)
                if set(face_obj.vertex_ids) - covered
            ]
            lengths = nx.multi_source_dijkstra_path_length(graph, targets)
            _, face, link = min(
                candidates, key=lambda c: (lengths.get(c[1], np.inf), c[1])
            )
        selected.append(face)
        parent_rule[face] = _rule_between(d, face, link)
        covered |= set(d.faces[face].vertex_ids)

    tree = nx.Graph()
    tree.add_nodes_from(selected)
    tree.add_edges_from((r.face_i, r.face_j) for r in parent_rule.values())
    rank = {face: pos for pos, face in enumerate(selected)}
    order = [root]
    for _, child in nx.bfs_edges(
        tree, root, sort_neighbors=lambda v: sorted(v, key=rank.__getitem__)
    ):
        order.append(child)

    new_index = {face: pos for pos, face in enumerate(order)}
    rules = tuple(
        Rule(new_index[r.face_i], new_index[r.face_j], r.edge)
        for r in sorted(
            parent_rule.values(),
            key=lambda r: max(new_index[r.face_i], new_index[r.face_j]),
        )
    )
    logger.debug("minimal PPS faces %s (from %d)", order, len(d.faces))
    return MinimalPPS(
        faces=tuple(d.faces[f] for f in order),
        rules=rules,
        face_ids=tuple(order),
        n=d.n,
    )


def _rule_between(d: Development, a: int, b: int) -> Rule:
    for rule in d.rules:
        if {rule.face_i, rule.face_j} == {a, b}:
            return rule
    raise StructuralError(f"faces {a} and {b} share no rule")


def is_tree(pps: MinimalPPS) -> bool:
    """True if the dual graph induced by the PPS faces is a tree."""
    return bool(nx.is_tree(dual_graph(pps.as_development())))


# =========================================================================
# Constraint matrices
# =========================================================================


def face_selection(face: Face, n: int, face_id: int = 0) -> SelectionMatrix:
    """Return E^(k) for ``face`` among ``n`` robots."""
    ebar = np.zeros((face.size, n))
    ebar[np.arange(face.size), list(face.cyclic_order)] = 1.0
    return SelectionMatrix(face_id=face_id, matrix=kron(ebar, np.eye(3)))


def build_face_constraints(face: Face, n: int, reduced: bool = False) -> NDArray:
    """
    Return the face constraint block W P R_eta E.

    The full block has 3(|V_k| - 2) + 1 rows; the reduced block drops the
    in-plane row and keeps the 3(|V_k| - 2) rotational rows.
    """
    k = face.size
    block = (
        selection_matrices(k)
        @ polygon_operator(k)
        @ kron(np.eye(k), face.normal_rotation)
        @ face_selection(face, n).matrix
    )
    if reduced:
        return block[: 3 * (k - 2)]
    return block


def expected_rank(pps: MinimalPPS) -> int:
    """Row count 3 sum|V_k| - 6L + 2 of the reduced matrix (L >= 2)."""
    sizes = [f.size for f in pps.faces]
    return 3 * sum(sizes) - 6 * len(sizes) + 2


def build_reduced_V(pps: MinimalPPS, n: int | None = None) -> ConstraintMatrix:
    """
    Stack full constraints for faces 1-2 and rotational-only rows for the rest.

    Raises:
        StructuralError: If faces 1 and 2 do not share an edge or a face
            makes the stack rank deficient (the face is named)
    """
    n = pps.n if n is None else n
    if len(pps.faces) >= 2 and not (pps.faces[0].edges() & pps.faces[1].edges()):
        raise StructuralError("faces 1 and 2 of the PPS must share an edge")
    blocks: list[NDArray] = []
    rows = 0
    for pos, face in enumerate(pps.faces):
        block = build_face_constraints(face, n, reduced=pos >= 2)
        blocks.append(block)
        rows += block.shape[0]
        if numeric_rank(np.vstack(blocks)) < rows:
            raise StructuralError(
                f"face {pps.face_ids[pos]} (vertices {face.vertex_ids}) makes the "
                "reduced constraint matrix rank deficient"
            )
    return constraint_matrix(np.vstack(blocks))


def stacked_full_V(pps: MinimalPPS, n: int | None = None) -> NDArray[np.float64]:
    """Full constraints of every face stacked; generally not full row rank."""
    n = pps.n if n is None else n
    return np.vstack([build_face_constraints(f, n) for f in pps.faces])


# =========================================================================
# Control
# =========================================================================


def face_params(
    pps: MinimalPPS | Development,
    N: int = 1,
    gains: Sequence[float] | None = None,
    *,
    allow_zero: bool = False,
) -> list[CyclicParams]:
    """Default per-face parameters: alpha_m = m pi / |V_k| and the face rotation."""
    out = []
    for face in pps.faces:
        horizon = min(N, max(1, face.size - 2))
        k = tuple(gains[:horizon]) if gains is not None else (1.0,) * horizon
        out.append(
            CyclicParams(
                face.size, horizon, k, None, face.normal_rotation, allow_zero=allow_zero
            )
        )
    return out


def _check_face_params(
    faces: Sequence[Face], params: Sequence[CyclicParams]
) -> None:
    if len(faces) != len(params):
        raise ParameterError(
            f"expected {len(faces)} face parameter sets, got {len(params)}"
        )
    for face, p in zip(faces, params, strict=True):
        if p.n != face.size:
            raise ParameterError(
                f"face {face.vertex_ids} has {face.size} robots, params n={p.n}"
            )
        if not np.allclose(p.angles, p.nominal_angles, atol=1e-12):
            raise ParameterError(
                f"face {face.vertex_ids} angles must be m pi / {face.size}"
            )
        if not np.allclose(p.plane_rotation, face.normal_rotation, atol=1e-9):
            raise ParameterError(f"face {face.vertex_ids} plane rotation mismatch")


def polyhedron_control(
    x: ArrayLike,
    params: Sequence[CyclicParams],
    pps: MinimalPPS,
    angle_offsets: ArrayLike | None = None,
    faces: Sequence[int] | None = None,
) -> NDArray[np.float64]:
    """
    Superpose the per-face cyclic controllers: u = sum_k E_k^T u^(k)(E_k x).

    Args:
        x: Stacked state of all robots
        params: One CyclicParams per PPS face (angles m pi / |V_k|)
        pps: The minimal PPS
        angle_offsets: Optional per-robot angle perturbations (global indexing)
        faces: Restrict the sum to these PPS face positions

    Raises:
        ParameterError: If a face's parameters do not match the face
    """
    _check_face_params(pps.faces, params)
    pos = np.asarray(x, dtype=float).reshape(-1, 3)
    offsets = None if angle_offsets is None else np.asarray(angle_offsets, float)
    u = np.zeros_like(pos)
    active = range(len(pps.faces)) if faces is None else faces
    for k in active:
        idx = list(pps.faces[k].cyclic_order)
        sub_offsets = None if offsets is None else offsets[idx]
        u[idx] += cyclic_control(
            pos[idx].reshape(-1), params[k], angle_offsets=sub_offsets
        ).reshape(-1, 3)
    return u.reshape(-1)


def polyhedron_laplacian(
    params: Sequence[CyclicParams], pps: MinimalPPS, n: int | None = None
) -> NDArray[np.float64]:
    """Dense matrix sum_k E_k^T L^(k) E_k, so that u = -(this) x."""
    _check_face_params(pps.faces, params)
    n = pps.n if n is None else n
    total = np.zeros((3 * n, 3 * n))
    for face, p in zip(pps.faces, params, strict=True):
        e = face_selection(face, n).matrix
        total += e.T @ assemble_L(p) @ e
    return total


def theorem7_certify(
    cm: ConstraintMatrix, pps: MinimalPPS, params: Sequence[CyclicParams]
) -> CertificationEntry:
    """
    Certify convergence to the polyhedral formation.

    Certified iff lambda_max of sym(V̄ (-sum_k E_k^T L^(k) E_k) V̄ᵀ) is
    negative. The margin reported is -lambda_max, which is also the
    contraction rate of the formation error.
    """
    lap = polyhedron_laplacian(params, pps, cm.n)
    j = -(cm.Vbar @ lap @ cm.Vbar.T)
    lam_max = float(scipy.linalg.eigvalsh(0.5 * (j + j.T)).max())
    raw = -(cm.V @ lap @ cm.V.T)
    raw_max = float(scipy.linalg.eigvalsh(0.5 * (raw + raw.T)).max())
    return CertificationEntry(
        name="polyhedron_convergence",
        certified=lam_max < -CERTIFY_TOL,
        margin=-lam_max,
        numeric_margin=-lam_max,
        details={"lambda_max_V": raw_max, "faces": len(pps.faces)},
    )
