"""
Flattened cylinders of type Cyl.

A fundamental domain of the cylinder is the quadrilateral R+0 R-0 R-1 R+1 made
of the triangles (R+0, R-0, R+1) and (R+1, R-1, R-0), glued along the diagonal
R-0 R+1. The deck transformation maps R+0 -> R+1 and R-0 -> R-1; its axis chi
meets the boundary lines chi_R = R+0 R-0 and chi_Q = R+1 R-1 at equal angles and
equal offsets. Marked points live in the H^2 slice of the hyperboloid; the axis
is solved in Fermi coordinates, the signed distance to the axis and the
position along it.
"""

import logging
import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import NamedTuple, Optional, Tuple

import numpy as np
from scipy.optimize import bisect

from qfbounds_project import settings

from .exceptions import CylinderError, DomainViolation, InvariantViolation, VacuousBoundError
from .hyperboloid import (
    J3,
    Frame,
    HPoint,
    Isometry,
    TangentVec,
    Vec4,
    apply,
    basis_vector,
    boost,
    dist,
    isometry_from_frames,
    line_normal,
    origin,
    random_isometry,
    side_of_line,
    unit_tangent,
)
from .trig import (
    TriangleSides,
    angle_from_sides,
    equidistant_length,
    right_hypotenuse,
    side_from_sas,
)

logger = logging.getLogger(__name__)

# relative mismatch allowed between the measured and the predicted diagonal sum
GLUING_TOL = 1e-4
# the translation length is bracketed on a log grid over [LENGTH_RANGE * l_max, l_max]
LENGTH_RANGE = 1e-16
LENGTH_GRID = 400


class SituationClass(str, Enum):
    CONTAINS_AXIS = "ContainsAxis"
    AVOIDS_AXIS = "AvoidsAxis"


@dataclass(frozen=True)
class CylQuad:
    """Side lengths of a flattened fundamental domain, plus the axis data once solved.

    offset_plus and offset_minus are the signed positions of R+0 and R-0 along
    chi_R, measured from the axis point O_R and positive towards R+0.
    """

    h: float
    l_plus: float
    l_minus: float
    diag: float
    alpha: Optional[float] = None
    l_O: Optional[float] = None
    offset_plus: Optional[float] = None
    offset_minus: Optional[float] = None
    h_plus: Optional[float] = None
    h_minus: Optional[float] = None
    h_O_plus: Optional[float] = None
    h_O_minus: Optional[float] = None
    l_OO_plus: Optional[float] = None
    l_OO_minus: Optional[float] = None
    d: Optional[float] = None
    d_plus: Optional[float] = None
    d_minus: Optional[float] = None
    angle_residual: Optional[float] = None
    offset_residual: Optional[float] = None
    sweep: Optional[str] = None

    def __post_init__(self):
        for name in ("h", "l_plus", "l_minus", "diag"):
            value = float(getattr(self, name))
            if not (math.isfinite(value) and value > 0):
                raise CylinderError(f"{name} must be positive, got {value}")
            object.__setattr__(self, name, value)
        try:
            self.first_triangle()
            self.second_triangle()
        except InvariantViolation as e:
            raise CylinderError(f"fundamental domain is degenerate: {e}") from e

    def first_triangle(self) -> TriangleSides:
        """(R+0, R-0, R+1) with the side opposite R-0 first."""
        return TriangleSides(self.l_plus, self.h, self.diag)

    def second_triangle(self) -> TriangleSides:
        """(R+1, R-1, R-0) with the side opposite R-0 first."""
        return TriangleSides(self.h, self.l_minus, self.diag)

    @property
    def solved(self) -> bool:
        return self.alpha is not None

    def sides(self) -> "CylQuad":
        return CylQuad(self.h, self.l_plus, self.l_minus, self.diag)


class Threshold(NamedTuple):
    value: float
    log_space: bool


class Minimality(NamedTuple):
    holds: bool
    window: int
    min_margin: float
    worst_power: int


class PathLengths(NamedTuple):
    l_hat: float
    l_hat_R_plus: float
    l_hat_R_minus: float
    l_hat_O_plus: float
    l_hat_O_minus: float


def flatten_fd(
    p_plus_0: HPoint,
    p_minus_0: HPoint,
    p_plus_1: HPoint,
    p_minus_1: HPoint,
    tol: float = 1e-8,
) -> CylQuad:
    """Unfold the two triangles of a fundamental domain in H^3 into the plane."""
    h0 = dist(p_plus_0, p_minus_0)
    h1 = dist(p_plus_1, p_minus_1)
    if abs(h0 - h1) > tol * max(1.0, h0):
        logger.warning(f"Transversal sides differ: {h0} vs {h1}")
        raise CylinderError(f"transversal sides have different lengths {h0} and {h1}")
    return CylQuad(
        h=h0,
        l_plus=dist(p_plus_0, p_plus_1),
        l_minus=dist(p_minus_0, p_minus_1),
        diag=dist(p_minus_0, p_plus_1),
    )


def _planar(d: float, phi: float) -> HPoint:
    sh = math.sinh(d)
    return HPoint(Vec4(math.cosh(d), sh * math.cos(phi), sh * math.sin(phi), 0.0))


def realize(q: CylQuad) -> Tuple[HPoint, HPoint, HPoint, HPoint]:
    """Planar points (R+0, R-0, R+1, R-1): R-0 at e0, R+1 on the +x1 axis, R+0 above it, R-1 below."""
    theta = angle_from_sides(q.first_triangle(), "A")
    theta_prime = angle_from_sides(q.second_triangle(), "A")
    r_minus_0 = origin()
    r_plus_1 = _planar(q.diag, 0.0)
    r_plus_0 = _planar(q.h, theta)
    r_minus_1 = _planar(q.l_minus, -theta_prime)
    return r_plus_0, r_minus_0, r_plus_1, r_minus_1


def _perpendicular_tangent(p: HPoint, e: np.ndarray) -> np.ndarray:
    """Unit tangent at planar p orthogonal to the planar tangent e."""
    w = np.zeros(4)
    w[:3] = J3 @ np.cross(p.array[:3], e[:3])
    return w / math.sqrt(float(w[1:3] @ w[1:3] - w[0] * w[0]))


def _planar_frame(p: HPoint, e1: np.ndarray) -> Frame:
    e2 = _perpendicular_tangent(p, e1)
    return Frame(
        p,
        (
            TangentVec(p, Vec4.from_array(e1)),
            TangentVec(p, Vec4.from_array(e2)),
            TangentVec(p, Vec4.from_array(basis_vector(3))),
        ),
    )


class AxisFrame(NamedTuple):
    """Fermi coordinates of R+0 and R-0 relative to the axis.

    a_plus > a_minus are their signed distances to the axis and shift is the
    axis coordinate of R+0 minus that of R-0, positive along the translation.
    """

    l_O: float
    a_plus: float
    a_minus: float
    shift: float

    def orbit_distance(self, k: int) -> float:
        """d(R+0, gamma^k R-0)."""
        along = 0.5 * (self.shift - k * self.l_O)
        if abs(along) > 300.0:
            return math.inf
        sq = (
            math.sinh(0.5 * (self.a_plus - self.a_minus)) ** 2
            + math.cosh(self.a_plus) * math.cosh(self.a_minus) * math.sinh(along) ** 2
        )
        return 2.0 * math.asinh(math.sqrt(sq))


def _sinh2_gap(a: float, b: float) -> float:
    """sinh^2(a/2) - sinh^2(b/2)."""
    return math.sinh(0.5 * (a + b)) * math.sinh(0.5 * (a - b))


def _other_diagonal(q: CylQuad, sweep: str) -> float:
    """d(R+0, R-1) from the two angles at one end of the glued diagonal.

    Sweep R adds the angles at R-0, sweep Q the angles at R+1.
    """
    at, first_leg, second_leg = ("A", q.h, q.l_minus) if sweep == "R" else ("B", q.l_plus, q.h)
    total = angle_from_sides(q.first_triangle(), at) + angle_from_sides(q.second_triangle(), at)
    if total > math.pi:
        total = 2.0 * math.pi - total
    return side_from_sas(first_leg, second_leg, total)


def _axis_frame(q: CylQuad, sweep: str = "R", solver_tol: float = settings.SOLVER_TOL) -> AxisFrame:
    """Locate the axis of the deck transformation in Fermi coordinates.

    A point at distance a from the axis moves by sinh(l/2) = cosh(a) sinh(l_O/2),
    and two marked points at axis distances a, a' and axis separation s are
    sinh^2(d/2) = sinh^2((a - a')/2) + cosh(a) cosh(a') sinh^2(s/2) apart. For a
    trial l_O the difference of the two diagonals fixes the shift and h fixes the
    gap a_plus - a_minus; the root in l_O is where the gap agrees with both
    boundary sides. Roots are bracketed on a log grid, refined by bisection in
    log l_O, and the one reproducing the sum of the diagonals is kept.
    """
    other = _other_diagonal(q, sweep)
    p = math.sinh(0.5 * q.l_plus)
    m = math.sinh(0.5 * q.l_minus)
    pm = p * m
    half_h = math.sinh(0.5 * q.h) ** 2
    # sinh(shift) coth(l_O / 2) and cosh(shift)
    spread = _sinh2_gap(q.diag, other) / (2.0 * pm)
    cosh_shift = (_sinh2_gap(q.diag, q.h) + _sinh2_gap(other, q.h)) / (2.0 * pm)
    plus_far = p >= m
    far, near = (p, m) if plus_far else (m, p)

    def shift_at(l_o: float) -> float:
        return math.asinh(spread * math.tanh(0.5 * l_o))

    def gap_at(l_o: float) -> Optional[float]:
        rest = half_h - pm * (math.sinh(0.5 * shift_at(l_o)) / math.sinh(0.5 * l_o)) ** 2
        if rest < 0:
            return None
        return 2.0 * math.asinh(math.sqrt(rest))

    def defect(log_l: float) -> float:
        l_o = math.exp(log_l)
        gap = gap_at(l_o)
        if gap is None:
            return math.nan
        x = math.sinh(0.5 * l_o)
        a_far = math.acosh(max(far / x, 1.0))
        return math.cosh(a_far - gap) - max(near / x, 1.0)

    l_max = 2.0 * math.asinh(near)
    grid = np.linspace(math.log(LENGTH_RANGE * l_max), math.log(l_max), LENGTH_GRID)
    values = [defect(float(y)) for y in grid]
    roots = [float(grid[-1])] if values[-1] == 0 else []
    for lo, hi, f_lo, f_hi in zip(grid[:-1], grid[1:], values[:-1], values[1:]):
        if f_lo == 0:
            roots.append(float(lo))
        elif f_lo * f_hi < 0:
            roots.append(bisect(defect, lo, hi, xtol=solver_tol, maxiter=settings.SOLVER_MAX_ITER))

    best = None
    for log_l in roots:
        l_o = math.exp(log_l)
        mismatch = abs(math.cosh(shift_at(l_o)) - cosh_shift) / max(cosh_shift, 1.0)
        if best is None or mismatch < best[0]:
            best = (mismatch, l_o)
    if best is None or best[0] > GLUING_TOL:
        logger.warning(f"No translation fits the quad ({len(roots)} candidate root(s))")
        raise CylinderError("boundary geodesics intersect or are asymptotic: no translation fits the side lengths")

    l_o = best[1]
    gap = gap_at(l_o)
    a_far = math.acosh(max(far / math.sinh(0.5 * l_o), 1.0))
    if plus_far:
        a_plus, a_minus = a_far, a_far - gap
    else:
        a_plus, a_minus = gap - a_far, -a_far
    return AxisFrame(l_o, a_plus, a_minus, shift_at(l_o))


def solve_axis(
    q: CylQuad,
    solver_tol: float = settings.SOLVER_TOL,
    sweep: str = "R",
    tol: float = 1e-9,
) -> CylQuad:
    """Find the axis chi and fill in every derived field of the quad.

    A line crossing the axis at angle beta carries the point at signed distance
    t from the crossing to sinh a = sin(beta) sinh t and
    cosh a sinh s = cos(beta) sinh t, so the Fermi coordinates of R+0 and R-0
    give the offsets and the angle in closed form.
    """
    if sweep not in ("R", "Q"):
        raise CylinderError(f"sweep must be 'R' or 'Q', got {sweep!r}")
    frame = _axis_frame(q, sweep, solver_tol)
    s_plus, s_minus = math.sinh(frame.a_plus), math.sinh(frame.a_minus)
    sin_sq = ((s_plus - s_minus) ** 2 - 4.0 * s_plus * s_minus * math.sinh(0.5 * q.h) ** 2) / math.sinh(q.h) ** 2
    if not 0.0 < sin_sq <= 1.0 + tol:
        logger.warning(f"Boundary line misses the axis: sin^2(beta) = {sin_sq:.6g}")
        raise CylinderError(f"boundary line chi_R does not cross the axis (sin^2 beta = {sin_sq:.6g})")
    sin_beta = math.sqrt(min(sin_sq, 1.0))
    offset_plus = math.asinh(s_plus / sin_beta)
    offset_minus = math.asinh(s_minus / sin_beta)

    t_plus, t_minus = math.tanh(offset_plus), math.tanh(offset_minus)
    slope = math.tanh(frame.shift)
    spread = t_plus - t_minus
    disc = spread**2 + 4.0 * slope**2 * t_plus * t_minus
    if disc < 0 or spread <= 0:
        raise CylinderError("no crossing angle reproduces the shift along the axis")
    # root of tanh(shift) (1 - c^2 t+ t-) = c (t+ - t-) that stays bounded as the shift vanishes
    cos_beta = 2.0 * slope / (spread + math.sqrt(disc))

    def foot(offset: float, a: float) -> float:
        return abs(math.asinh(cos_beta * math.sinh(offset) / math.cosh(a)))

    def height(t: float) -> float:
        return math.asinh(sin_beta * abs(math.sinh(t)))

    solved = replace(
        q,
        alpha=math.atan2(sin_beta, abs(cos_beta)),
        l_O=frame.l_O,
        offset_plus=offset_plus,
        offset_minus=offset_minus,
        h_plus=abs(offset_plus),
        h_minus=abs(offset_minus),
        h_O_plus=abs(frame.a_plus),
        h_O_minus=abs(frame.a_minus),
        l_OO_plus=foot(offset_plus, frame.a_plus),
        l_OO_minus=foot(offset_minus, frame.a_minus),
        d=height(0.5 * (offset_plus + offset_minus)),
        d_plus=height(0.5 * offset_plus),
        d_minus=height(0.5 * offset_minus),
        angle_residual=abs(math.hypot(sin_beta, cos_beta) - 1.0),
        offset_residual=abs(offset_plus - offset_minus - q.h),
        sweep=sweep,
    )
    logger.debug(
        f"Axis solved ({sweep} sweep): l_O={solved.l_O:.12g}, alpha={solved.alpha:.12g}, "
        f"offsets=({offset_plus:.6g}, {offset_minus:.6g})"
    )
    return solved


def _require_solved(q: CylQuad):
    if not q.solved:
        raise CylinderError("quad has not been solved; run solve_axis first")


def classify(q: CylQuad, tol: float = settings.CLASSIFY_TOL) -> SituationClass:
    _require_solved(q)
    scale = max(1.0, q.h)
    contains = abs(q.h - (q.h_plus + q.h_minus)) <= tol * scale
    avoids = abs(q.h - abs(q.h_plus - q.h_minus)) <= tol * scale
    if contains:
        return SituationClass.CONTAINS_AXIS
    if avoids:
        return SituationClass.AVOIDS_AXIS
    logger.error(f"Inconsistent solve: h={q.h}, h+={q.h_plus}, h-={q.h_minus}")
    raise CylinderError("neither h = h+ + h- nor h = |h+ - h-| holds; inconsistent solve")


def midpoint_path_length(q: CylQuad) -> float:
    """Length l_O cosh d of the equidistant path joining the midpoints of the two transversals."""
    if classify(q) is not SituationClass.CONTAINS_AXIS:
        raise CylinderError("midpoint path length needs a quad that contains the axis")
    return equidistant_length(q.l_O, q.d)


def equidistant_path_lengths(q: CylQuad) -> PathLengths:
    _require_solved(q)
    return PathLengths(
        l_hat=equidistant_length(q.l_O, q.d),
        l_hat_R_plus=equidistant_length(q.l_O, q.d_plus),
        l_hat_R_minus=equidistant_length(q.l_O, q.d_minus),
        l_hat_O_plus=equidistant_length(q.l_O, q.h_O_plus / 2),
        l_hat_O_minus=equidistant_length(q.l_O, q.h_O_minus / 2),
    )


def deck_transformation(q: CylQuad) -> Isometry:
    """Orientation-preserving isometry of the realized plane with R+0 -> R+1 and R-0 -> R-1."""
    r_plus_0, r_minus_0, r_plus_1, r_minus_1 = realize(q)
    source = _planar_frame(r_minus_0, unit_tangent(r_minus_0, r_plus_0).array)
    target = _planar_frame(r_minus_1, unit_tangent(r_minus_1, r_plus_1).array)
    return isometry_from_frames(source, target)


def translation_length(iso: Isometry) -> float:
    """Translation length of a planar isometry, from trace = 1 + 2 cosh(length)."""
    half = (float(np.trace(iso.m[:3, :3])) - 1.0) / 2.0
    if half < 1.0:
        raise CylinderError(f"isometry is not a translation (trace parameter {half:.6g})")
    return math.acosh(half)


def check_minimality(q: CylQuad, window: int = settings.MINIMALITY_WINDOW, tol: float = 1e-9) -> Minimality:
    """Check d(R+0, gamma^k R-0) >= h for every k != 0.

    The powers |k| <= window are scanned. The orbit distance only grows with
    |shift - k l_O|, so the two powers around shift / l_O cover the rest.
    """
    frame = _axis_frame(q)
    centre = frame.shift / frame.l_O
    if not math.isfinite(centre) or abs(centre) > 1e9:
        raise CylinderError(f"orbit minimizer out of reach (shift {centre:.3g} translation lengths)")
    nearest = math.floor(centre)
    powers = set(range(-window, window + 1))
    powers.update((nearest, nearest + 1))
    powers.discard(0)
    base = frame.orbit_distance(0)
    margin, power = min((frame.orbit_distance(k) - base, k) for k in sorted(powers))
    holds = margin >= -tol * max(1.0, q.h)
    if not holds:
        logger.info(f"Minimality fails at power {power}: margin {margin:.3e}")
    return Minimality(holds, window, margin, power)




def generate_cyl(
    translation_length: float,
    offset_plus: float,
    offset_minus: float,
    phase: float,
    seed: Optional[int] = None,
    require_minimal: bool = True,
) -> CylQuad:
    """Quad of a translation along the x1 axis with marked points on a transversal at angle phase.

    The transversal passes through e0 in direction (0, cos phase, sin phase, 0);
    R+-0 sit at the signed offsets along it and R+-1 are their translates. A
    seed moves the whole configuration by a random planar isometry. With
    require_minimal the quad must also be the fundamental domain of a minimal
    cylinder.
    """
    if not translation_length > 0:
        raise CylinderError(f"translation length must be positive, got {translation_length}")
    if not offset_plus > offset_minus:
        raise CylinderError(f"offset_plus must exceed offset_minus, got {offset_plus} <= {offset_minus}")
    if not (0.0 < phase <= 0.5 * math.pi):
        raise CylinderError(f"phase must lie in (0, pi/2], got {phase}")

    u = np.array([0.0, math.cos(phase), math.sin(phase), 0.0])
    e0 = basis_vector(0)
    r_plus_0 = HPoint.from_array(math.cosh(offset_plus) * e0 + math.sinh(offset_plus) * u)
    r_minus_0 = HPoint.from_array(math.cosh(offset_minus) * e0 + math.sinh(offset_minus) * u)
    translation = boost(1, translation_length)
    points = [r_plus_0, r_minus_0, apply(translation, r_plus_0), apply(translation, r_minus_0)]
    if seed is not None:
        placement = random_isometry(np.random.default_rng(seed), max_distance=1.0, planar=True)
        points = [apply(placement, p) for p in points]
    p_plus_0, p_minus_0, p_plus_1, p_minus_1 = points

    n_diag = line_normal(p_minus_0, p_plus_1)
    if side_of_line(p_plus_0, n_diag) * side_of_line(p_minus_1, n_diag) >= 0:
        raise CylinderError("fundamental triangles do not lie on opposite sides of the diagonal")

    q = flatten_fd(p_plus_0, p_minus_0, p_plus_1, p_minus_1)
    if not require_minimal:
        return q
    minimality = check_minimality(q)
    if not minimality.holds:
        raise CylinderError(
            f"generated cylinder is not minimal: d(R+0, gamma^{minimality.worst_power} R-0) < h"
        )
    return q


# --- threshold formulas ------------------------------------------------------


def _log_arcosh_argument(l: float, eps3: float) -> float:
    """log(e^l l^2 / eps3^2)."""
    if not (l > 0 and eps3 > 0):
        raise VacuousBoundError(f"lengths must be positive, got l={l}, eps3={eps3}")
    return l + 2.0 * math.log(l) - 2.0 * math.log(eps3)


def _arcosh_exp(log_a: float) -> float:
    """arcosh(e^log_a) for log_a >= 0."""
    if log_a > settings.LOG_SPACE_SWITCH:
        return log_a + math.log(2.0)
    return math.acosh(math.exp(log_a))


def h_ort_int(l_rq: float, eps3: float) -> float:
    """l + arcosh(e^l l^2 / eps3^2)."""
    log_a = _log_arcosh_argument(l_rq, eps3)
    if log_a < 0:
        raise VacuousBoundError(
            f"e^l l^2 / eps3^2 < 1 for l={l_rq}, eps3={eps3}; the bound is vacuous"
        )
    return l_rq + _arcosh_exp(log_a)


def situation1_term(l: float, eps3: float) -> Threshold:
    """2 arcosh[cosh l cosh(h_ort_int(l, eps3))]."""
    inner = h_ort_int(l, eps3)
    log_space = (
        _log_arcosh_argument(l, eps3) > settings.LOG_SPACE_SWITCH
        or l + inner > settings.LOG_SPACE_SWITCH
    )
    return Threshold(2.0 * right_hypotenuse(l, inner), log_space)


def situation1_threshold(l_plus: float, l_minus: float, eps3: float) -> Threshold:
    terms = [situation1_term(l_plus, eps3), situation1_term(l_minus, eps3)]
    return Threshold(max(t.value for t in terms), any(t.log_space for t in terms))


def situation2_term(l_a: float, l_b: float) -> float:
    """l_a + l_b + ln(2 l_a / l_b)."""
    if not (l_a > 0 and l_b > 0):
        raise DomainViolation(f"lengths must be positive, got {l_a}, {l_b}")
    return l_a + l_b + math.log(2.0) + math.log(l_a) - math.log(l_b)


def situation2_bound(l_plus: float, l_minus: float) -> float:
    """max(l+ + l- + ln(2 l+ / l-), l+ + l- + ln(2 l- / l+))."""
    return max(situation2_term(l_plus, l_minus), situation2_term(l_minus, l_plus))
