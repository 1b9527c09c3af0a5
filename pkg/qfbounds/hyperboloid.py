"""
Hyperboloid model of H^3, with H^2 as the x3 = 0 slice.

Points live on the upper sheet {<x,x>_M = -1, x0 > 0} of R^{3,1}. Isometries are
4x4 pseudo-orthogonal matrices that keep the upper cone in place. The planar
helpers at the bottom of the module (line normals, projections, intersections)
only accept points of the H^2 slice.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from .config import DEFAULT_MODEL
from .exceptions import InvariantViolation

logger = logging.getLogger(__name__)

J = np.diag([-1.0, 1.0, 1.0, 1.0])
J3 = np.diag([-1.0, 1.0, 1.0])
SQRT2 = math.sqrt(2.0)


def _tol(tol: Optional[float]) -> float:
    return DEFAULT_MODEL.tol_model if tol is None else tol


@dataclass(frozen=True)
class Vec4:
    """A vector of the pseudo-Euclidean space R^{3,1}."""

    x0: float
    x1: float
    x2: float
    x3: float

    def __post_init__(self):
        for name in ("x0", "x1", "x2", "x3"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise InvariantViolation(f"Vec4.{name} is not finite: {value}")
            object.__setattr__(self, name, value)

    @classmethod
    def from_array(cls, values) -> "Vec4":
        a = np.asarray(values, dtype=float).reshape(4)
        return cls(a[0], a[1], a[2], a[3])

    def as_array(self) -> np.ndarray:
        return np.array([self.x0, self.x1, self.x2, self.x3])


Vectorish = Union[Vec4, "HPoint", "TangentVec", np.ndarray, Sequence[float]]


def _coords(x) -> np.ndarray:
    if isinstance(x, (HPoint, TangentVec)):
        return x.array
    if isinstance(x, Vec4):
        return x.as_array()
    return np.asarray(x, dtype=float).reshape(4)


def _mdot(a: np.ndarray, b: np.ndarray) -> float:
    return float(-a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3])


def mdot(u: Vectorish, v: Vectorish) -> float:
    """Minkowski scalar product -u0 v0 + u1 v1 + u2 v2 + u3 v3."""
    return _mdot(_coords(u), _coords(v))


@dataclass(frozen=True)
class HPoint:
    """A point of the upper sheet of the hyperboloid."""

    v: Vec4
    tol: Optional[float] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if not isinstance(self.v, Vec4):
            object.__setattr__(self, "v", Vec4.from_array(self.v))
        a = self.v.as_array()
        a.setflags(write=False)
        object.__setattr__(self, "_a", a)

        if a[0] <= 0:
            raise InvariantViolation(f"point is not on the upper sheet: x0 = {a[0]}")
        residual = abs(_mdot(a, a) + 1.0)
        if residual > _tol(self.tol) * max(1.0, a[0] * a[0]):
            raise InvariantViolation(
                f"point is off the hyperboloid: |<v,v> + 1| = {residual:.3e}"
            )

    @classmethod
    def from_array(cls, values, tol: Optional[float] = None) -> "HPoint":
        return cls(Vec4.from_array(values), tol=tol)

    @property
    def array(self) -> np.ndarray:
        return self._a

    @property
    def is_planar(self) -> bool:
        """True when the point lies in the H^2 slice x3 = 0."""
        return abs(self._a[3]) <= _tol(self.tol) * max(1.0, self._a[0])


@dataclass(frozen=True)
class TangentVec:
    """A vector Minkowski-orthogonal to its base point."""

    base: HPoint
    v: Vec4
    tol: Optional[float] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if not isinstance(self.v, Vec4):
            object.__setattr__(self, "v", Vec4.from_array(self.v))
        a = self.v.as_array()
        a.setflags(write=False)
        object.__setattr__(self, "_a", a)

        scale = max(1.0, self.base.array[0] * float(np.max(np.abs(a))))
        residual = abs(_mdot(self.base.array, a))
        if residual > _tol(self.tol) * scale:
            raise InvariantViolation(
                f"vector is not tangent at its base: <base, v> = {residual:.3e}"
            )

    @property
    def array(self) -> np.ndarray:
        return self._a

    def norm(self) -> float:
        return math.sqrt(max(_mdot(self._a, self._a), 0.0))


@dataclass(frozen=True)
class Frame:
    """An origin together with a Minkowski-orthonormal basis of its tangent space."""

    origin: HPoint
    basis: Tuple[TangentVec, TangentVec, TangentVec]
    tol: Optional[float] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if len(self.basis) != 3:
            raise InvariantViolation(f"frame needs 3 basis vectors, got {len(self.basis)}")
        object.__setattr__(self, "basis", tuple(self.basis))
        tol = _tol(self.tol)
        scale = max(1.0, self.origin.array[0] ** 2)
        for e in self.basis:
            if not np.allclose(e.base.array, self.origin.array, rtol=0.0, atol=tol * scale):
                raise InvariantViolation("basis vector is attached to another point")
        for i, ei in enumerate(self.basis):
            for j, ej in enumerate(self.basis):
                expected = 1.0 if i == j else 0.0
                if abs(_mdot(ei.array, ej.array) - expected) > tol * scale:
                    raise InvariantViolation(
                        f"frame basis is not orthonormal at ({i}, {j})"
                    )

    def matrix(self) -> np.ndarray:
        """Columns (origin, e1, e2, e3)."""
        return np.column_stack(
            [self.origin.array] + [e.array for e in self.basis]
        )


def is_pseudo_orthogonal(m, tol: float) -> bool:
    """True iff ||m^T J m - J||_max <= tol and m keeps the upper cone in place."""
    a = np.asarray(m, dtype=float)
    if a.shape != (4, 4) or not np.all(np.isfinite(a)):
        return False
    residual = float(np.max(np.abs(a.T @ J @ a - J)))
    return residual <= tol and a[0, 0] > 0


def _pseudo_orthogonality_residual(a: np.ndarray) -> float:
    return float(np.max(np.abs(a.T @ J @ a - J)))


@dataclass(frozen=True, eq=False)
class Isometry:
    """A 4x4 pseudo-orthogonal matrix acting on the hyperboloid."""

    m: np.ndarray
    tol: Optional[float] = field(default=None, repr=False)

    def __post_init__(self):
        a = np.array(self.m, dtype=float)
        if a.shape != (4, 4) or not np.all(np.isfinite(a)):
            raise InvariantViolation(f"isometry must be a finite 4x4 matrix, got {a.shape}")
        a.setflags(write=False)
        object.__setattr__(self, "m", a)

        scale = max(1.0, float(np.max(np.abs(a))) ** 2)
        residual = _pseudo_orthogonality_residual(a)
        if residual > _tol(self.tol) * scale:
            raise InvariantViolation(
                f"matrix is not pseudo-orthogonal: ||m^T J m - J|| = {residual:.3e}"
            )
        if a[0, 0] <= 0:
            raise InvariantViolation("matrix swaps the two sheets of the hyperboloid")

    def residual(self) -> float:
        return _pseudo_orthogonality_residual(self.m)

    def allclose(self, other: "Isometry", atol: float = 1e-9) -> bool:
        return bool(np.allclose(self.m, other.m, rtol=0.0, atol=atol))

    def __matmul__(self, other: "Isometry") -> "Isometry":
        return compose(self, other)


def identity() -> Isometry:
    return Isometry(np.eye(4))


def compose(a: Isometry, b: Isometry) -> Isometry:
    """The isometry a after b."""
    return Isometry(a.m @ b.m, tol=_looser(a.tol, b.tol))


def inverse(a: Isometry) -> Isometry:
    return Isometry(J @ a.m.T @ J, tol=a.tol)


def _looser(*tols: Optional[float]) -> Optional[float]:
    given = [t for t in tols if t is not None]
    return max(given) if given else None


def origin() -> HPoint:
    return HPoint(Vec4(1.0, 0.0, 0.0, 0.0))


def basis_vector(i: int) -> np.ndarray:
    e = np.zeros(4)
    e[i] = 1.0
    return e


def standard_frame() -> Frame:
    o = origin()
    return Frame(o, tuple(TangentVec(o, Vec4.from_array(basis_vector(i))) for i in (1, 2, 3)))


def normalize_point(values, tol: Optional[float] = None) -> HPoint:
    """Rescale a timelike vector onto the upper sheet."""
    a = np.asarray(values, dtype=float).reshape(4)
    norm2 = -_mdot(a, a)
    if not norm2 > 0:
        raise InvariantViolation(f"vector is not timelike: <v,v> = {-norm2:.3e}")
    a = a / math.sqrt(norm2)
    if a[0] < 0:
        a = -a
    return HPoint.from_array(a, tol=tol)


def dist(p: HPoint, q: HPoint) -> float:
    """Hyperbolic distance arcosh(-<p,q>)."""
    if not isinstance(p, HPoint):
        p = HPoint.from_array(_coords(p))
    if not isinstance(q, HPoint):
        q = HPoint.from_array(_coords(q))
    c = -_mdot(p.array, q.array)
    if c > 2.0:
        return math.acosh(c)
    # 2 arsinh(|p - q|_M / 2) avoids the cancellation of arcosh near 1
    diff = p.array - q.array
    s = max(_mdot(diff, diff), 0.0)
    return 2.0 * math.asinh(math.sqrt(s) / 2.0)


def apply(iso: Isometry, p: HPoint) -> HPoint:
    return HPoint.from_array(iso.m @ p.array, tol=_looser(iso.tol, p.tol))


def apply_tangent(iso: Isometry, t: TangentVec) -> TangentVec:
    return TangentVec(apply(iso, t.base), Vec4.from_array(iso.m @ t.array), tol=t.tol)


def frame_image(iso: Isometry, frame: Optional[Frame] = None) -> Frame:
    """Image of a frame (the standard frame by default) under iso."""
    frame = frame or standard_frame()
    return Frame(
        apply(iso, frame.origin),
        tuple(apply_tangent(iso, e) for e in frame.basis),
        tol=_looser(iso.tol, frame.tol),
    )


def isometry_from_frames(f1: Frame, f2: Frame) -> Isometry:
    """The unique isometry taking f1 to f2, computed as M2 M1^-1."""
    m1 = f1.matrix()
    m2 = f2.matrix()
    # pseudo-orthonormal columns give M1^-1 = J M1^T J
    m1_inv = J @ m1.T @ J
    scale = max(1.0, float(np.max(np.abs(m1))) ** 2)
    if float(np.max(np.abs(m1 @ m1_inv - np.eye(4)))) > _tol(f1.tol) * scale:
        raise InvariantViolation("source frame matrix is singular")
    return Isometry(m2 @ m1_inv, tol=_looser(f1.tol, f2.tol))


def probe_points() -> List[HPoint]:
    """P0 = e0 and P_k = sqrt(2) e0 + e_k for k = 1, 2, 3."""
    points = [origin()]
    for k in (1, 2, 3):
        a = SQRT2 * basis_vector(0) + basis_vector(k)
        points.append(HPoint.from_array(a))
    return points


def probe_images(iso: Isometry) -> List[HPoint]:
    return [apply(iso, p) for p in probe_points()]


def reconstruct_from_probes(images: Sequence[HPoint], tol: Optional[float] = None) -> Isometry:
    """Rebuild an isometry from the images of the four probe points.

    Column 0 is the image of P0; column k is image(P_k) - sqrt(2) image(P0).
    Images that did not come from one isometry fail the pseudo-orthogonality
    check and raise InvariantViolation.
    """
    if len(images) != 4:
        raise InvariantViolation(f"need 4 probe images, got {len(images)}")
    columns = [_coords(images[0])]
    for k in (1, 2, 3):
        columns.append(_coords(images[k]) - SQRT2 * columns[0])
    m = np.column_stack(columns)
    try:
        return Isometry(m, tol=tol)
    except InvariantViolation as e:
        logger.warning(f"Probe images are inconsistent: {e}")
        raise InvariantViolation(f"probe images are inconsistent: {e}") from e


def isometry_to_list(iso: Isometry) -> List[float]:
    """Row-major list of 16 reals."""
    return [float(x) for x in iso.m.reshape(16)]


def isometry_from_list(values: Sequence[float], tol: Optional[float] = None) -> Isometry:
    if len(values) != 16:
        raise InvariantViolation(f"isometry needs 16 values, got {len(values)}")
    return Isometry(np.asarray(values, dtype=float).reshape(4, 4), tol=tol)


def boost(axis: int, t: float) -> Isometry:
    """Translation by t along the coordinate axis x_axis through e0."""
    if axis not in (1, 2, 3):
        raise InvariantViolation(f"boost axis must be 1, 2 or 3, got {axis}")
    m = np.eye(4)
    m[0, 0] = m[axis, axis] = math.cosh(t)
    m[0, axis] = m[axis, 0] = math.sinh(t)
    return Isometry(m)


def rotation(i: int, j: int, angle: float) -> Isometry:
    """Rotation about e0 in the spatial (x_i, x_j) plane."""
    if i == j or i not in (1, 2, 3) or j not in (1, 2, 3):
        raise InvariantViolation(f"invalid rotation plane ({i}, {j})")
    m = np.eye(4)
    c, s = math.cos(angle), math.sin(angle)
    m[i, i] = m[j, j] = c
    m[i, j] = -s
    m[j, i] = s
    return Isometry(m)


def exp_map(p: HPoint, t) -> HPoint:
    """Point reached by following the tangent vector t from p."""
    a = _coords(t)
    n = math.sqrt(max(_mdot(a, a), 0.0))
    if n == 0.0:
        return p
    return normalize_point(math.cosh(n) * p.array + math.sinh(n) * a / n, tol=p.tol)


def unit_tangent(p: HPoint, q: HPoint) -> TangentVec:
    """Unit tangent at p pointing toward q."""
    w = q.array + _mdot(p.array, q.array) * p.array
    n2 = _mdot(w, w)
    if not n2 > 0:
        raise InvariantViolation("unit tangent is undefined for coincident points")
    return TangentVec(p, Vec4.from_array(w / math.sqrt(n2)), tol=p.tol)


def geodesic_point(p: HPoint, q: HPoint, t: float) -> HPoint:
    """Point at fraction t of the way from p to q along the geodesic."""
    d = dist(p, q)
    if d < 1e-12:
        return p
    a = (math.sinh((1.0 - t) * d) * p.array + math.sinh(t * d) * q.array) / math.sinh(d)
    return normalize_point(a, tol=p.tol)


def midpoint(p: HPoint, q: HPoint) -> HPoint:
    return normalize_point(p.array + q.array, tol=p.tol)


def _gram_schmidt(base: np.ndarray, vectors: List[np.ndarray]) -> List[np.ndarray]:
    out: List[np.ndarray] = []
    for v in vectors:
        w = v + _mdot(base, v) * base
        for e in out:
            w = w - _mdot(e, w) * e
        n2 = _mdot(w, w)
        if n2 <= 1e-12:
            raise InvariantViolation("random basis is degenerate")
        out.append(w / math.sqrt(n2))
    return out


def random_frame(
    rng: np.random.Generator, max_distance: float = 1.0, planar: bool = False
) -> Frame:
    """A random frame whose origin lies within max_distance of e0.

    Planar frames keep e3 fixed so that their isometries preserve the H^2 slice.
    """
    dims = 2 if planar else 3
    direction = np.zeros(4)
    direction[1 : 1 + dims] = rng.normal(size=dims)
    direction /= np.linalg.norm(direction)
    o = exp_map(origin(), direction * rng.uniform(0.0, max_distance))

    while True:
        raw = []
        for _ in range(dims):
            v = np.zeros(4)
            v[: 1 + dims] = rng.normal(size=1 + dims)
            raw.append(v)
        try:
            basis = _gram_schmidt(o.array, raw)
            break
        except InvariantViolation:
            continue
    if planar:
        basis.append(basis_vector(3))
    return Frame(o, tuple(TangentVec(o, Vec4.from_array(e)) for e in basis))


def random_isometry(
    rng: np.random.Generator, max_distance: float = 1.0, planar: bool = False
) -> Isometry:
    return isometry_from_frames(standard_frame(), random_frame(rng, max_distance, planar))


def random_point(
    rng: np.random.Generator, max_distance: float = 1.0, planar: bool = False
) -> HPoint:
    return apply(random_isometry(rng, max_distance, planar), origin())


# --- H^2 slice ---------------------------------------------------------------


def _require_planar(*points: HPoint):
    for p in points:
        if not p.is_planar:
            raise InvariantViolation("operation needs points of the H^2 slice x3 = 0")


def line_normal(p: HPoint, q: HPoint) -> np.ndarray:
    """Unit spacelike normal n of the H^2 line through p and q (<n, p> = <n, q> = 0)."""
    _require_planar(p, q)
    c = np.cross(p.array[:3], q.array[:3])
    n = np.zeros(4)
    n[:3] = J3 @ c
    n2 = _mdot(n, n)
    if not n2 > 0:
        raise InvariantViolation("line through coincident points is undefined")
    return n / math.sqrt(n2)


def side_of_line(x: HPoint, n: np.ndarray) -> float:
    """Signed <x, n>; its sign tells the half-plane, its arsinh the distance."""
    return _mdot(x.array, n)


def distance_to_line(x: HPoint, n: np.ndarray) -> float:
    return math.asinh(abs(_mdot(x.array, n)))


def project_to_line(x: HPoint, n: np.ndarray) -> HPoint:
    """Foot of the perpendicular from x to the line with unit normal n."""
    s = _mdot(x.array, n)
    return normalize_point(x.array - s * n, tol=x.tol)


def line_intersection(n1: np.ndarray, n2: np.ndarray) -> Optional[HPoint]:
    """Common point of two H^2 lines, or None when they do not meet."""
    c = np.cross(n1[:3], n2[:3])
    x = np.zeros(4)
    x[:3] = J3 @ c
    if not _mdot(x, x) < 0:
        return None
    return normalize_point(x)
