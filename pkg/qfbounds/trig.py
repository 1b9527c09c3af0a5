"""
Hyperbolic plane trigonometry at curvature -1.

Every formula is written in a half-angle or arsinh form so that small triangles
and nearly degenerate angles keep full relative precision.
"""

import logging
import math
from dataclasses import dataclass
from typing import Tuple, Union

from qfbounds_project import settings

from .exceptions import DomainViolation, InvariantViolation

logger = logging.getLogger(__name__)

VERTICES = {"A": 0, "B": 1, "C": 2}
# math.sinh overflows just above 710
SINH_LIMIT = 700.0


def clamp(value: float, lo: float, hi: float, what: str = "value") -> float:
    """Clamp rounding noise back into [lo, hi]; larger deviations are errors."""
    if lo <= value <= hi:
        return value
    deviation = lo - value if value < lo else value - hi
    if deviation > settings.CLAMP_LIMIT or math.isnan(value):
        raise DomainViolation(f"{what} = {value!r} lies outside [{lo}, {hi}]")
    if deviation > settings.CLAMP_SILENT:
        logger.debug(f"Clamped {what} = {value!r} by {deviation:.2e}")
    return lo if value < lo else hi


@dataclass(frozen=True)
class TriangleSides:
    """Side lengths of a hyperbolic triangle; a is opposite A, b opposite B, c opposite C."""

    a: float
    b: float
    c: float

    def __post_init__(self):
        a, b, c = float(self.a), float(self.b), float(self.c)
        for name, value in (("a", a), ("b", b), ("c", c)):
            if not (math.isfinite(value) and value > 0):
                raise InvariantViolation(f"side {name} must be positive and finite, got {value}")
        if not (a < b + c and b < a + c and c < a + b):
            raise InvariantViolation(f"sides ({a}, {b}, {c}) violate the strict triangle inequality")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)

    def as_tuple(self) -> Tuple[float, float, float]:
        return (self.a, self.b, self.c)

    def semiperimeter(self) -> float:
        return 0.5 * (self.a + self.b + self.c)


def _rotate(s: TriangleSides, at: Union[str, int]) -> Tuple[float, float, float]:
    index = VERTICES[at] if isinstance(at, str) else int(at)
    if index not in (0, 1, 2):
        raise DomainViolation(f"vertex must be A, B, C or 0, 1, 2, got {at!r}")
    sides = s.as_tuple()
    return sides[index], sides[(index + 1) % 3], sides[(index + 2) % 3]


def angle_from_sides(s: TriangleSides, at: Union[str, int] = "A") -> float:
    """Interior angle at vertex `at`, from tan(A/2)^2 = sinh(p-b) sinh(p-c) / (sinh p sinh(p-a))."""
    a, b, c = _rotate(s, at)
    p = 0.5 * (a + b + c)
    num = math.sinh(p - b) * math.sinh(p - c)
    den = math.sinh(p) * math.sinh(p - a)
    return 2.0 * math.atan2(math.sqrt(num), math.sqrt(den))


def angles(s: TriangleSides) -> Tuple[float, float, float]:
    return tuple(angle_from_sides(s, i) for i in range(3))


def side_from_sas(b: float, c: float, angle: float) -> float:
    """Side opposite `angle` given the two adjacent sides b and c."""
    if b < 0 or c < 0:
        raise DomainViolation(f"sides must be nonnegative, got b={b}, c={c}")
    angle = clamp(angle, 0.0, math.pi, "included angle")
    half = math.sinh(0.5 * (b - c)) ** 2 + math.sinh(b) * math.sinh(c) * math.sin(0.5 * angle) ** 2
    return 2.0 * math.asinh(math.sqrt(half))


def angle_defect_area(s: TriangleSides) -> float:
    """Area pi - (A + B + C), via tan(area/4)^2 = tanh(p/2) tanh((p-a)/2) tanh((p-b)/2) tanh((p-c)/2)."""
    p = s.semiperimeter()
    product = (
        math.tanh(0.5 * p)
        * math.tanh(0.5 * (p - s.a))
        * math.tanh(0.5 * (p - s.b))
        * math.tanh(0.5 * (p - s.c))
    )
    return 4.0 * math.atan(math.sqrt(product))


def equidistant_length(l: float, h: float) -> float:
    """Length l cosh h of the equidistant arc at height h over a segment of length l."""
    if l < 0 or h < 0:
        raise DomainViolation(f"equidistant length needs l, h >= 0, got l={l}, h={h}")
    return l * math.cosh(h)


def right_hypotenuse(a: float, b: float) -> float:
    """Hypotenuse of a right triangle with legs a and b: cosh c = cosh a cosh b."""
    if a < 0 or b < 0:
        raise DomainViolation(f"legs must be nonnegative, got a={a}, b={b}")
    if a + b > settings.LOG_SPACE_SWITCH:
        return a + b + math.log1p(math.exp(-2 * a)) + math.log1p(math.exp(-2 * b)) - math.log(2.0)
    if a == 0.0 or b == 0.0:
        return max(a, b)
    # cosh c - 1 = 2 sinh^2(a/2) + 2 sinh^2(b/2) + 4 sinh^2(a/2) sinh^2(b/2)
    sa = math.sinh(0.5 * a) ** 2
    sb = math.sinh(0.5 * b) ** 2
    return 2.0 * math.asinh(math.sqrt(sa + sb + 2.0 * sa * sb))


def right_leg(hyp: float, leg: float) -> float:
    """The other leg of a right triangle: cosh b = cosh hyp / cosh leg."""
    if leg < 0 or hyp < 0:
        raise DomainViolation(f"lengths must be nonnegative, got hyp={hyp}, leg={leg}")
    ratio = clamp(math.cosh(hyp) / math.cosh(leg), 1.0, math.inf, "cosh of the remaining leg")
    return math.acosh(ratio)


def sinh_opposite(alpha: float, hyp: float) -> float:
    """Leg opposite alpha in a right triangle with hypotenuse hyp: sinh x = sin(alpha) sinh(hyp)."""
    if not (0.0 < alpha <= 0.5 * math.pi):
        raise DomainViolation(f"alpha must lie in (0, pi/2], got {alpha}")
    if hyp < 0:
        raise DomainViolation(f"hypotenuse must be nonnegative, got {hyp}")
    if alpha == 0.5 * math.pi:
        return hyp
    if hyp < SINH_LIMIT:
        return math.asinh(math.sin(alpha) * math.sinh(hyp))
    # log of sin(alpha) sinh(hyp); e^-2hyp is below double precision here
    log_y = hyp - math.log(2.0) + math.log(math.sin(alpha))
    if log_y > settings.LOG_SPACE_SWITCH:
        return log_y + math.log(2.0)
    return math.asinh(math.exp(log_y))


def equilateral_side(angle: float) -> float:
    """Side of the equilateral triangle with all angles equal to `angle`."""
    if not (0.0 < angle < math.pi / 3):
        raise DomainViolation(f"equilateral angle must lie in (0, pi/3), got {angle}")
    c = math.cos(angle)
    return math.acosh(c / (1.0 - c))


def saccheri_top(base: float, h: float) -> float:
    """Summit of a Saccheri quadrilateral with base `base` and legs h."""
    if base < 0 or h < 0:
        raise DomainViolation(f"base and legs must be nonnegative, got base={base}, h={h}")
    return 2.0 * math.asinh(math.cosh(h) * math.sinh(0.5 * base))
