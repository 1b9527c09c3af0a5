"""
Polyhedral hyperbolic surfaces.

A surface is a closed orientable complex of triangles glued along edges, each
triangle carrying the metric of constant curvature face_curvature < 0 with the
stored edge lengths. Cone angles, the comparison polyhedron of a distance
oracle, intrinsic vertex distances and the scaling formulas live here.
"""

import logging
import math
import threading
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra

from .exceptions import DomainViolation, SurfaceError
from .hyperboloid import HPoint, dist
from .trig import TriangleSides, angle_defect_area, angle_from_sides

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi
Edge = Tuple[int, int]
Face = Tuple[int, int, int]


def edge_key(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class Combinatorics:
    """A triangle complex without lengths."""

    vertex_count: int
    triangles: Tuple[Face, ...]

    def __post_init__(self):
        object.__setattr__(self, "vertex_count", int(self.vertex_count))
        object.__setattr__(
            self, "triangles", tuple(tuple(int(x) for x in t) for t in self.triangles)
        )

    def edges(self) -> List[Edge]:
        seen = set()
        for t in self.triangles:
            for u, v in ((t[0], t[1]), (t[1], t[2]), (t[2], t[0])):
                seen.add(edge_key(u, v))
        return sorted(seen)


@dataclass(frozen=True)
class Triangulation:
    """Triangle complex with one hyperbolic length per undirected edge."""

    vertex_count: int
    triangles: Tuple[Face, ...]
    edge_lengths: Dict[Edge, float]
    face_curvature: float = -1.0
    length_conflicts: Tuple[Tuple[int, int, float, float], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "vertex_count", int(self.vertex_count))
        object.__setattr__(
            self, "triangles", tuple(tuple(int(x) for x in t) for t in self.triangles)
        )
        object.__setattr__(
            self,
            "edge_lengths",
            {edge_key(int(u), int(v)): float(x) for (u, v), x in self.edge_lengths.items()},
        )
        object.__setattr__(self, "face_curvature", float(self.face_curvature))

    @classmethod
    def from_entries(
        cls,
        vertex_count: int,
        triangles: Iterable[Sequence[int]],
        entries: Iterable[Sequence[float]],
        face_curvature: float = -1.0,
        tol: float = 1e-12,
    ) -> "Triangulation":
        """Build from [i, j, length] rows; disagreeing repeats are kept as conflicts."""
        lengths: Dict[Edge, float] = {}
        conflicts = []
        for i, j, length in entries:
            key = edge_key(int(i), int(j))
            length = float(length)
            if key in lengths and abs(lengths[key] - length) > tol:
                conflicts.append((key[0], key[1], lengths[key], length))
                continue
            lengths.setdefault(key, length)
        return cls(vertex_count, tuple(tuple(t) for t in triangles), lengths, face_curvature, tuple(conflicts))

    @classmethod
    def from_combinatorics(
        cls, comb: Combinatorics, length: Callable[[int, int], float], face_curvature: float = -1.0
    ) -> "Triangulation":
        lengths = {e: float(length(*e)) for e in comb.edges()}
        return cls(comb.vertex_count, comb.triangles, lengths, face_curvature)

    def combinatorics(self) -> Combinatorics:
        return Combinatorics(self.vertex_count, self.triangles)

    def edges(self) -> List[Edge]:
        return self.combinatorics().edges()

    def length(self, u: int, v: int) -> float:
        try:
            return self.edge_lengths[edge_key(u, v)]
        except KeyError:
            raise SurfaceError(f"no edge between vertices {u} and {v}") from None


@dataclass(frozen=True)
class Violation:
    kind: str
    location: Tuple[int, ...]
    message: str


@dataclass
class ValidationReport:
    violations: List[Violation] = field(default_factory=list)

    @property
    def clean(self) -> bool:
        return not self.violations

    def kinds(self) -> List[str]:
        return sorted({v.kind for v in self.violations})


class SurfaceValidator:
    """Checks every invariant of a triangulation and records violations with their location."""

    def __init__(self, tri: Triangulation, tol: float = 1e-12):
        self.tri = tri
        self.tol = tol
        self.errors: List[Violation] = []

    def _add(self, kind: str, location: Sequence[int], message: str):
        self.errors.append(Violation(kind, tuple(int(x) for x in location), message))

    def validate_indices(self) -> bool:
        ok = True
        if self.tri.vertex_count < 1:
            self._add("vertex_count", (), f"vertex_count must be positive, got {self.tri.vertex_count}")
            ok = False
        for f, t in enumerate(self.tri.triangles):
            if len(t) != 3:
                self._add("index", (f,), f"triangle {f} has {len(t)} vertices")
                ok = False
                continue
            if any(v < 0 or v >= self.tri.vertex_count for v in t):
                self._add("index", (f,), f"triangle {f} = {t} has a vertex out of range")
                ok = False
            elif len(set(t)) != 3:
                self._add("index", (f,), f"triangle {f} = {t} repeats a vertex")
                ok = False
        return ok

    def validate_lengths(self) -> bool:
        ok = True
        for u, v in self.tri.edges():
            length = self.tri.edge_lengths.get((u, v))
            if length is None:
                self._add("missing_length", (u, v), f"edge ({u}, {v}) has no length")
                ok = False
            elif not (math.isfinite(length) and length > 0):
                self._add("nonpositive_length", (u, v), f"edge ({u}, {v}) has length {length}")
                ok = False
        for u, v, first, second in self.tri.length_conflicts:
            self._add(
                "length_conflict",
                (u, v),
                f"edge ({u}, {v}) is given lengths {first} and {second}",
            )
            ok = False
        return ok

    def validate_triangle_inequalities(self) -> bool:
        ok = True
        for f, t in enumerate(self.tri.triangles):
            sides = [self.tri.edge_lengths.get(edge_key(t[(k + 1) % 3], t[(k + 2) % 3])) for k in range(3)]
            if any(s is None or not s > 0 for s in sides):
                continue
            a, b, c = sides
            if not (a < b + c and b < a + c and c < a + b):
                self._add(
                    "triangle_inequality",
                    (f,),
                    f"triangle {f} = {t} has sides ({a}, {b}, {c})",
                )
                ok = False
        return ok

    def validate_edge_incidence(self) -> bool:
        ok = True
        count: Dict[Edge, int] = defaultdict(int)
        for t in self.tri.triangles:
            for k in range(3):
                count[edge_key(t[k], t[(k + 1) % 3])] += 1
        for e, n in sorted(count.items()):
            if n != 2:
                self._add("edge_incidence", e, f"edge {e} lies in {n} triangles, expected 2")
                ok = False
        return ok

    def validate_orientation(self) -> bool:
        ok = True
        used: Dict[Edge, int] = {}
        for f, t in enumerate(self.tri.triangles):
            for k in range(3):
                directed = (t[k], t[(k + 1) % 3])
                if directed in used:
                    self._add(
                        "orientation",
                        directed,
                        f"directed edge {directed} appears in triangles {used[directed]} and {f}",
                    )
                    ok = False
                else:
                    used[directed] = f
        return ok

    def validate_vertex_links(self) -> bool:
        ok = True
        links = defaultdict(nx.MultiGraph)
        for t in self.tri.triangles:
            for k in range(3):
                links[t[k]].add_edge(t[(k + 1) % 3], t[(k + 2) % 3])
        for v in range(self.tri.vertex_count):
            link = links.get(v)
            if link is None:
                self._add("vertex_link", (v,), f"vertex {v} lies in no triangle")
                ok = False
            elif not nx.is_connected(link) or any(d != 2 for _, d in link.degree()):
                self._add("vertex_link", (v,), f"link of vertex {v} is not a single cycle")
                ok = False
        return ok

    def run_all_validations(self) -> ValidationReport:
        self.errors = []
        if self.validate_indices():
            self.validate_lengths()
            self.validate_triangle_inequalities()
            self.validate_edge_incidence()
            self.validate_orientation()
            self.validate_vertex_links()
        if self.errors:
            logger.info(f"Surface validation found {len(self.errors)} violation(s)")
        return ValidationReport(list(self.errors))


@dataclass(frozen=True)
class CurvatureClass:
    accepted: bool
    offending: Tuple[int, ...]
    max_cone_angle: float

    @property
    def label(self) -> str:
        if self.accepted:
            return "K >= -1 (Alexandrov)"
        return f"rejected at vertices {list(self.offending)}"


@dataclass(frozen=True, eq=False)
class PolyhedralSurface:
    """A triangulation viewed as a metric space. Immutable; distance queries are thread-safe."""

    tri: Triangulation

    def __post_init__(self):
        object.__setattr__(self, "_engine", _SurfaceEngine(self.tri))

    @property
    def vertex_count(self) -> int:
        return self.tri.vertex_count

    @property
    def triangles(self) -> Tuple[Face, ...]:
        return self.tri.triangles

    @property
    def face_curvature(self) -> float:
        return self.tri.face_curvature

    def edge_length(self, u: int, v: int) -> float:
        return self.tri.length(u, v)

    def report(self) -> ValidationReport:
        return self._engine.report()

    def require_valid(self):
        report = self.report()
        if not report.clean:
            raise SurfaceError(f"surface is invalid: {', '.join(report.kinds())}")

    def check_vertex(self, v: int):
        if not (0 <= int(v) < self.vertex_count):
            raise SurfaceError(f"vertex {v} is out of range [0, {self.vertex_count})")

    def cone_angles(self) -> Tuple[float, ...]:
        return self._engine.cone_angles()

    def vertex_distances(self, refinement: int) -> np.ndarray:
        return self._engine.vertex_distances(refinement)


def validate(s) -> ValidationReport:
    tri = s.tri if isinstance(s, PolyhedralSurface) else s
    return SurfaceValidator(tri).run_all_validations()


def _realization_scale(face_curvature: float) -> float:
    if not face_curvature < 0:
        raise SurfaceError(f"faces must be negatively curved, got curvature {face_curvature}")
    return math.sqrt(-face_curvature)


def _face_angles(tri: Triangulation, t: Face, scale: float) -> Tuple[float, float, float]:
    u, v, w = t
    sides = TriangleSides(
        tri.length(v, w) * scale, tri.length(u, w) * scale, tri.length(u, v) * scale
    )
    return tuple(angle_from_sides(sides, k) for k in range(3))


def cone_angle(s: PolyhedralSurface, vertex: int) -> float:
    s.check_vertex(vertex)
    s.require_valid()
    return s.cone_angles()[vertex]


def curvature_class(s: PolyhedralSurface, tol: float = 1e-9) -> CurvatureClass:
    angles = s.cone_angles()
    offending = tuple(v for v, a in enumerate(angles) if a > TWO_PI + tol)
    return CurvatureClass(not offending, offending, max(angles))


def euler_characteristic(s) -> int:
    tri = s.tri if isinstance(s, PolyhedralSurface) else s
    return tri.vertex_count - len(tri.edges()) + len(tri.triangles)


def gauss_bonnet_residual(s: PolyhedralSurface) -> float:
    """sum_v (2 pi - cone angle) - sum_f defect_f - 2 pi chi; zero on a closed surface."""
    s.require_valid()
    scale = _realization_scale(s.face_curvature)
    curvature = sum(TWO_PI - a for a in s.cone_angles())
    defect = 0.0
    for t in s.triangles:
        u, v, w = t
        defect += angle_defect_area(
            TriangleSides(
                s.edge_length(v, w) * scale, s.edge_length(u, w) * scale, s.edge_length(u, v) * scale
            )
        )
    return curvature - defect - TWO_PI * euler_characteristic(s)


def comparison_polyhedron(oracle, combinatorics: Combinatorics) -> PolyhedralSurface:
    """Glue the comparison triangles of the oracle's distances along the given complex."""
    tri = Triangulation.from_combinatorics(combinatorics, oracle.distance, face_curvature=-1.0)
    report = validate(tri)
    if not report.clean:
        unbuildable = [v for v in report.violations if v.kind == "triangle_inequality"]
        if unbuildable:
            logger.error(f"Comparison triangle cannot be built: {unbuildable[0].message}")
            raise SurfaceError(f"unbuildable comparison triangle: {unbuildable[0].message}")
        logger.error(f"Combinatorics is not a closed surface: {report.kinds()}")
        raise SurfaceError(f"combinatorics is not a closed surface: {', '.join(report.kinds())}")
    surface = PolyhedralSurface(tri)
    cls = curvature_class(surface)
    logger.info(f"Comparison polyhedron built: {len(tri.triangles)} faces, curvature class {cls.label}")
    return surface


def intrinsic_distance(s: PolyhedralSurface, u: int, v: int, refinement: int) -> float:
    """Upper bound on the intrinsic distance from u to v, non-increasing in refinement."""
    s.check_vertex(u)
    s.check_vertex(v)
    if refinement < 0:
        raise DomainViolation(f"refinement must be nonnegative, got {refinement}")
    if u == v:
        return 0.0
    s.require_valid()
    return float(s.vertex_distances(refinement)[u, v])


def embedded_chordal_distance(points: Sequence[HPoint], u: int, v: int) -> float:
    """H^3 distance between two vertices of a surface embedded with the given positions."""
    return dist(points[u], points[v])


def metric_deviation(
    a: Callable[[int, int], float],
    b: Callable[[int, int], float],
    pairs: Iterable[Tuple[int, int]],
) -> float:
    worst = 0.0
    for u, v in pairs:
        worst = max(worst, abs(a(u, v) - b(u, v)))
    return worst


def scale_curvature(k: float, lam: float) -> float:
    if not lam > 0:
        raise DomainViolation(f"scaling factor must be positive, got {lam}")
    return k / lam


def scale_distances(s: PolyhedralSurface, lam: float) -> PolyhedralSurface:
    """Multiply every distance by sqrt(lam); the faces now have curvature K / lam."""
    if not lam > 1:
        raise DomainViolation(f"distances are only scaled up, lambda must exceed 1, got {lam}")
    factor = math.sqrt(lam)
    tri = s.tri
    return PolyhedralSurface(
        Triangulation(
            tri.vertex_count,
            tri.triangles,
            {e: x * factor for e, x in tri.edge_lengths.items()},
            scale_curvature(tri.face_curvature, lam),
            tri.length_conflicts,
        )
    )


def diameter_estimate(s: PolyhedralSurface, refinement: int) -> float:
    s.require_valid()
    return float(np.max(s.vertex_distances(refinement)))


# --- refined-graph distances -------------------------------------------------


def _place(d: float, phi: float) -> np.ndarray:
    """Planar hyperboloid point at distance d from e0 in direction phi."""
    sh = math.sinh(d)
    return np.array([math.cosh(d), sh * math.cos(phi), sh * math.sin(phi)])


def _edge_nodes(p: np.ndarray, q: np.ndarray, length: float, m: int) -> np.ndarray:
    """The m interior nodes of the geodesic p -> q at fractions k / (m + 1)."""
    if m == 0:
        return np.zeros((0, 3))
    t = np.arange(1, m + 1) / (m + 1)
    wp = np.sinh((1.0 - t) * length) / math.sinh(length)
    wq = np.sinh(t * length) / math.sinh(length)
    return wp[:, None] * p[None, :] + wq[:, None] * q[None, :]


def _pairwise(points_a: np.ndarray, points_b: np.ndarray) -> np.ndarray:
    diff = points_a[:, None, :] - points_b[None, :, :]
    s = -diff[..., 0] ** 2 + diff[..., 1] ** 2 + diff[..., 2] ** 2
    return 2.0 * np.arcsinh(np.sqrt(np.maximum(s, 0.0)) / 2.0)


class _SurfaceEngine:
    """Lazily computed, lock-protected caches of one surface."""

    def __init__(self, tri: Triangulation):
        self.tri = tri
        self._lock = threading.Lock()
        self._report: Optional[ValidationReport] = None
        self._angles: Optional[Tuple[float, ...]] = None
        self._levels: Dict[int, np.ndarray] = {}
        self._minima: Dict[int, np.ndarray] = {}
        self._edges: Optional[List[Edge]] = None
        self._edge_index: Dict[Edge, int] = {}
        self._faces_of_edge: Dict[Edge, List[int]] = {}

    def report(self) -> ValidationReport:
        with self._lock:
            if self._report is None:
                self._report = SurfaceValidator(self.tri).run_all_validations()
            return self._report

    def cone_angles(self) -> Tuple[float, ...]:
        with self._lock:
            if self._angles is None:
                scale = _realization_scale(self.tri.face_curvature)
                totals = [0.0] * self.tri.vertex_count
                for t in self.tri.triangles:
                    for vertex, angle in zip(t, _face_angles(self.tri, t, scale)):
                        totals[vertex] += angle
                self._angles = tuple(totals)
            return self._angles

    def vertex_distances(self, refinement: int) -> np.ndarray:
        with self._lock:
            if refinement not in self._minima:
                best = None
                for level in range(refinement + 1):
                    if level not in self._levels:
                        self._levels[level] = self._level_distances(level)
                    best = self._levels[level] if best is None else np.minimum(best, self._levels[level])
                best.setflags(write=False)
                self._minima[refinement] = best
            return self._minima[refinement]

    def _index_edges(self):
        if self._edges is not None:
            return
        self._edges = self.tri.edges()
        self._edge_index = {e: k for k, e in enumerate(self._edges)}
        faces = defaultdict(list)
        for f, t in enumerate(self.tri.triangles):
            for k in range(3):
                faces[edge_key(t[k], t[(k + 1) % 3])].append(f)
        self._faces_of_edge = dict(faces)

    def _edge_node_ids(self, u: int, v: int, m: int) -> np.ndarray:
        """Node ids of edge (u, v) listed from u towards v."""
        e = edge_key(u, v)
        start = self.tri.vertex_count + self._edge_index[e] * m
        ids = np.arange(start, start + m)
        return ids if u < v else ids[::-1]

    def _layout(self, a: int, b: int, c: int, m: int, scale: float):
        """Face (a, b, c) placed with a at e0, b on the +x1 axis and c above it.

        Returns node ids, planar coordinates and the mask of nodes off the edge ab.
        """
        lab = self.tri.length(a, b) * scale
        lac = self.tri.length(a, c) * scale
        lbc = self.tri.length(b, c) * scale
        angle_a = angle_from_sides(TriangleSides(lbc, lac, lab), "A")
        pa, pb, pc = _place(0.0, 0.0), _place(lab, 0.0), _place(lac, angle_a)

        ids = [np.array([a, b, c])]
        coords = [np.vstack([pa, pb, pc])]
        off_ab = [np.array([False, False, True])]
        for p, q, (x, y), length, on_ab in (
            (pa, pb, (a, b), lab, False),
            (pb, pc, (b, c), lbc, True),
            (pa, pc, (a, c), lac, True),
        ):
            ids.append(self._edge_node_ids(x, y, m))
            coords.append(_edge_nodes(p, q, length, m))
            off_ab.append(np.full(m, on_ab))
        return np.concatenate(ids), np.vstack(coords), np.concatenate(off_ab)

    def _level_distances(self, m: int) -> np.ndarray:
        self._index_edges()
        scale = _realization_scale(self.tri.face_curvature)
        n_vertices = self.tri.vertex_count
        n_nodes = n_vertices + len(self._edges) * m
        rows, cols, weights = [], [], []

        def add(ids_a, ids_b, w, mask=None):
            ra = np.broadcast_to(ids_a[:, None], w.shape)
            cb = np.broadcast_to(ids_b[None, :], w.shape)
            keep = ra != cb
            if mask is not None:
                keep &= mask
            rows.append(ra[keep])
            cols.append(cb[keep])
            weights.append(w[keep])

        for t in self.tri.triangles:
            ids, coords, _ = self._layout(t[0], t[1], t[2], m, scale)
            w = _pairwise(coords, coords)
            # vertex-vertex arcs carry the stored lengths
            for i in range(3):
                for j in range(3):
                    if i != j:
                        w[i, j] = self.tri.length(int(ids[i]), int(ids[j])) * scale
            add(ids, ids, w)

        for (a, b), faces in self._faces_of_edge.items():
            if len(faces) != 2:
                continue
            sides = []
            for f in faces:
                t = self.tri.triangles[f]
                c = next(x for x in t if x != a and x != b)
                ids, coords, off_ab = self._layout(a, b, c, m, scale)
                sides.append((ids[off_ab], coords[off_ab]))
            (ids1, c1), (ids2, c2) = sides
            c2 = c2 * np.array([1.0, 1.0, -1.0])

            # a chord is a surface path when it crosses the open edge ab
            k1 = c1[:, 1:] / c1[:, :1]
            k2 = c2[:, 1:] / c2[:, :1]
            y1 = k1[:, 1][:, None]
            y2 = k2[:, 1][None, :]
            denom = y1 - y2
            with np.errstate(divide="ignore", invalid="ignore"):
                cross = k1[:, 0][:, None] + (k2[:, 0][None, :] - k1[:, 0][:, None]) * y1 / denom
            end = math.tanh(self.tri.length(a, b) * scale)
            mask = (y1 > 0) & (y2 < 0) & (cross > 0) & (cross < end)
            if not mask.any():
                continue
            w = _pairwise(c1, c2)
            add(ids1, ids2, w, mask)
            add(ids2, ids1, w.T, mask.T)

        r = np.concatenate(rows)
        c = np.concatenate(cols)
        w = np.concatenate(weights)
        # keep the lightest of parallel arcs
        key = r.astype(np.int64) * n_nodes + c
        order = np.argsort(key, kind="stable")
        key, w = key[order], w[order]
        unique, starts = np.unique(key, return_index=True)
        w = np.minimum.reduceat(w, starts)
        graph = csr_matrix((w, (unique // n_nodes, unique % n_nodes)), shape=(n_nodes, n_nodes))

        distances = dijkstra(graph, directed=True, indices=np.arange(n_vertices))
        logger.debug(f"Level {m} graph: {n_nodes} nodes, {len(w)} arcs")
        return distances[:, :n_vertices] / scale
