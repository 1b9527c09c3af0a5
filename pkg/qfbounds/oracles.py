"""
Distance oracles: metrics on a finite vertex set that comparison polyhedra approximate.
"""

import logging
import math
from abc import ABC, abstractmethod
from itertools import combinations
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize_scalar

from .exceptions import OracleError
from .hyperboloid import HPoint, dist
from .models import KleinPoint, from_klein
from .surface import Combinatorics, PolyhedralSurface, edge_key, intrinsic_distance

logger = logging.getLogger(__name__)


class DistanceOracle(ABC):
    """
    Base class for all distance oracles.
    """

    name: str = "base_oracle"

    @property
    @abstractmethod
    def vertex_count(self) -> int:
        pass

    @abstractmethod
    def distance(self, u: int, v: int) -> float:
        pass

    def __call__(self, u: int, v: int) -> float:
        return self.distance(u, v)

    def declared_pairs(self) -> List[Tuple[int, int]]:
        """Pairs whose distance the oracle states explicitly, for deviation reports."""
        return []

    def check(self, sample: Iterable[Tuple[int, int, int]], slack: float = 1e-9) -> List[str]:
        """Symmetry, zero diagonal and triangle inequality on sampled triples."""
        issues = []
        for u, v, w in sample:
            duv, dvu = self.distance(u, v), self.distance(v, u)
            if abs(duv - dvu) > slack:
                issues.append(f"asymmetric pair ({u}, {v}): {duv} != {dvu}")
            if self.distance(u, u) != 0.0:
                issues.append(f"nonzero diagonal at {u}")
            if duv > self.distance(u, w) + self.distance(w, v) + slack:
                issues.append(f"triangle inequality fails on ({u}, {w}, {v})")
        if issues:
            logger.warning(f"Oracle {self.name} failed {len(issues)} sampled check(s)")
        return issues


class PairTableOracle(DistanceOracle):
    """Distances read from an explicit [i, j, d] table."""

    name = "pairs"

    def __init__(self, entries: Iterable[Sequence[float]], vertex_count: Optional[int] = None):
        self.table: Dict[Tuple[int, int], float] = {}
        for i, j, d in entries:
            d = float(d)
            if not (math.isfinite(d) and d >= 0):
                raise OracleError(f"pair ({i}, {j}) has invalid distance {d}")
            self.table[edge_key(int(i), int(j))] = d
        largest = max((max(k) for k in self.table), default=-1)
        self._vertex_count = vertex_count if vertex_count is not None else largest + 1

    def declared_pairs(self) -> List[Tuple[int, int]]:
        return sorted(self.table)

    @property
    def vertex_count(self) -> int:
        return self._vertex_count

    def distance(self, u: int, v: int) -> float:
        if u == v:
            return 0.0
        try:
            return self.table[edge_key(int(u), int(v))]
        except KeyError:
            raise OracleError(f"oracle has no distance for pair ({u}, {v})") from None


class SurfaceVertexOracle(DistanceOracle):
    """Intrinsic vertex distances of a polyhedral surface."""

    name = "surface"

    def __init__(self, surface: PolyhedralSurface, refinement: int):
        self.surface = surface
        self.refinement = refinement

    @property
    def vertex_count(self) -> int:
        return self.surface.vertex_count

    def distance(self, u: int, v: int) -> float:
        return intrinsic_distance(self.surface, u, v, self.refinement)


class H2GridOracle(DistanceOracle):
    """
    A pillowcase: two copies of a geodesic square of H^2 glued along the boundary.

    The square is [-half_width, half_width]^2 in Klein coordinates, cut into
    cells x cells squares. The top sheet carries every grid point, the bottom
    sheet only the interior ones. Distances are multiplied by sqrt(scale), so the
    metric has curvature -1/scale.
    """

    name = "h2-grid"

    def __init__(self, cells: int = 4, half_width: float = 0.5, scale: float = 4.0):
        if cells < 2:
            raise OracleError(f"h2-grid needs at least 2 cells per side, got {cells}")
        if not (0 < half_width < 1 / math.sqrt(2)):
            raise OracleError(f"half_width must lie in (0, 1/sqrt(2)), got {half_width}")
        if not scale >= 1:
            raise OracleError(f"scale must be at least 1, got {scale}")
        self.cells = cells
        self.half_width = half_width
        self.scale = scale
        self.factor = math.sqrt(scale)

        n = cells + 1
        self._top = {}
        self._bottom = {}
        self._points: List[HPoint] = []
        self._sheet: List[int] = []
        for i in range(n):
            for j in range(n):
                self._top[(i, j)] = len(self._points)
                self._points.append(self._grid_point(i, j))
                self._sheet.append(0 if self._on_boundary(i, j) else 1)
        for i in range(1, cells):
            for j in range(1, cells):
                self._bottom[(i, j)] = len(self._points)
                self._points.append(self._grid_point(i, j))
                self._sheet.append(-1)
        corners = [(0, 0), (cells, 0), (cells, cells), (0, cells)]
        self._sides = [
            (self._grid_point(*corners[k]).array, self._grid_point(*corners[(k + 1) % 4]).array)
            for k in range(4)
        ]

    def _grid_point(self, i: int, j: int) -> HPoint:
        w = self.half_width
        return from_klein(KleinPoint(-w + 2 * w * i / self.cells, -w + 2 * w * j / self.cells, 0.0))

    def _on_boundary(self, i: int, j: int) -> bool:
        return i in (0, self.cells) or j in (0, self.cells)

    def _vertex(self, i: int, j: int, bottom: bool) -> int:
        if bottom and not self._on_boundary(i, j):
            return self._bottom[(i, j)]
        return self._top[(i, j)]

    @property
    def vertex_count(self) -> int:
        return len(self._points)

    def distance(self, u: int, v: int) -> float:
        if not (0 <= u < self.vertex_count and 0 <= v < self.vertex_count):
            raise OracleError(f"pair ({u}, {v}) is out of range for {self.vertex_count} vertices")
        if u == v:
            return 0.0
        p, q = self._points[u], self._points[v]
        if self._sheet[u] * self._sheet[v] >= 0:
            return self.factor * dist(p, q)
        return self.factor * self._through_boundary(p, q)

    def _through_boundary(self, p: HPoint, q: HPoint) -> float:
        """Shortest path from p on one sheet to q on the other, through a boundary side."""
        best = math.inf
        for start, end in self._sides:

            def length(t: float) -> float:
                z = HPoint.from_array(_on_segment(start, end, t), tol=1e-8)
                return dist(p, z) + dist(z, q)

            result = minimize_scalar(length, bounds=(0.0, 1.0), method="bounded", options={"xatol": 1e-12})
            best = min(best, float(result.fun), length(0.0), length(1.0))
        return best

    def combinatorics(self) -> Combinatorics:
        triangles = []
        for i in range(self.cells):
            for j in range(self.cells):
                a, b = self._vertex(i, j, False), self._vertex(i + 1, j, False)
                c, d = self._vertex(i + 1, j + 1, False), self._vertex(i, j + 1, False)
                triangles.append((a, b, d))
                triangles.append((b, c, d))
                a, b = self._vertex(i, j, True), self._vertex(i + 1, j, True)
                c, d = self._vertex(i + 1, j + 1, True), self._vertex(i, j + 1, True)
                triangles.append((a, c, b))
                triangles.append((a, d, c))
        return Combinatorics(self.vertex_count, tuple(triangles))

    def declared_pairs(self) -> List[Tuple[int, int]]:
        """Non-edge pairs among the coarse top-sheet points {0, cells/2, cells}^2."""
        marks = sorted({0, self.cells // 2, self.cells})
        coarse = [self._top[(i, j)] for i in marks for j in marks]
        edges = set(self.combinatorics().edges())
        return [edge_key(u, v) for u, v in combinations(coarse, 2) if edge_key(u, v) not in edges]

    def interior_vertices(self) -> List[int]:
        return [v for v, sheet in enumerate(self._sheet) if sheet != 0]


def _on_segment(start: np.ndarray, end: np.ndarray, t: float) -> np.ndarray:
    """Point of the geodesic segment start -> end at Klein-linear parameter t."""
    ks = start[1:] / start[0]
    ke = end[1:] / end[0]
    k = (1.0 - t) * ks + t * ke
    x0 = 1.0 / math.sqrt(1.0 - float(k @ k))
    return np.concatenate([[x0], x0 * k])


class OracleRegistry:
    def __init__(self):
        self.oracles: Dict[str, Callable[..., DistanceOracle]] = {}

    def register(self, name: str, factory: Callable[..., DistanceOracle]):
        self.oracles[name] = factory

    def get_oracle(self, name: str) -> Optional[Callable[..., DistanceOracle]]:
        return self.oracles.get(name)

    def build(self, name: str, params: Optional[Dict[str, Any]] = None) -> DistanceOracle:
        factory = self.get_oracle(name)
        if factory is None:
            raise OracleError(f"unknown built-in oracle {name!r}; known: {sorted(self.oracles)}")
        try:
            return factory(**(params or {}))
        except TypeError as e:
            raise OracleError(f"bad parameters for oracle {name!r}: {e}") from e

    def names(self) -> List[str]:
        return sorted(self.oracles)


# Global registry
oracle_registry = OracleRegistry()
oracle_registry.register(H2GridOracle.name, H2GridOracle)
