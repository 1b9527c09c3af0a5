"""
Built-in surfaces: bipyramids of equilateral triangles and the doubled triangle.
"""

import math
from typing import Dict, List, Tuple

from .exceptions import DomainViolation
from .hyperboloid import HPoint, Vec4
from .surface import PolyhedralSurface, Triangulation, edge_key
from .trig import equilateral_side


def bipyramid(k: int, corner_angle: float = math.pi / 4) -> PolyhedralSurface:
    """Two cones of k equilateral triangles glued along an equator.

    Vertex 0 is the north apex, 1 the south apex and 2..k+1 the equator. Apex
    cone angles are k * corner_angle, equator cone angles 4 * corner_angle.
    """
    if k < 3:
        raise DomainViolation(f"a bipyramid needs at least 3 equator vertices, got {k}")
    side = equilateral_side(corner_angle)
    triangles: List[Tuple[int, int, int]] = []
    for i in range(k):
        a, b = 2 + i, 2 + (i + 1) % k
        triangles.append((0, a, b))
        triangles.append((1, b, a))
    lengths: Dict[Tuple[int, int], float] = {}
    for t in triangles:
        for u, v in ((t[0], t[1]), (t[1], t[2]), (t[2], t[0])):
            lengths[edge_key(u, v)] = side
    return PolyhedralSurface(Triangulation(k + 2, tuple(triangles), lengths))


def octahedron() -> PolyhedralSurface:
    """Eight equilateral triangles with corner angle pi/4; every cone angle is pi."""
    return bipyramid(4)


def doubled_triangle(a: float, b: float, c: float) -> PolyhedralSurface:
    """Two copies of the triangle with sides a = |12|, b = |02|, c = |01| glued along the boundary."""
    lengths = {(1, 2): a, (0, 2): b, (0, 1): c}
    return PolyhedralSurface(Triangulation(3, ((0, 1, 2), (0, 2, 1)), lengths))


def embedded_octahedron() -> Tuple[PolyhedralSurface, List[HPoint]]:
    """The octahedron with its vertices at +-r e_i in H^3, cosh^2 r = 1 + sqrt(2)."""
    r = math.acosh(math.sqrt(1.0 + math.sqrt(2.0)))
    ch, sh = math.cosh(r), math.sinh(r)
    points = [
        HPoint(Vec4(ch, 0.0, 0.0, sh)),
        HPoint(Vec4(ch, 0.0, 0.0, -sh)),
        HPoint(Vec4(ch, sh, 0.0, 0.0)),
        HPoint(Vec4(ch, 0.0, sh, 0.0)),
        HPoint(Vec4(ch, -sh, 0.0, 0.0)),
        HPoint(Vec4(ch, 0.0, -sh, 0.0)),
    ]
    return octahedron(), points


FIXTURES = {
    "octahedron": octahedron,
    "bipyramid-6": lambda: bipyramid(6),
    "bipyramid-10": lambda: bipyramid(10),
    "doubled-unit": lambda: doubled_triangle(1.0, 1.0, 1.0),
}
