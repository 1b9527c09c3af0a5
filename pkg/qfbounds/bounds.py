"""
Closed-form bounds on the distance between the two boundary components of a
convex domain, and the covering constants of the compactness argument.
"""

import logging
import math
from typing import Dict, List, Optional, Tuple

import mpmath
from pydantic import BaseModel, ConfigDict, Field, model_validator

from qfbounds_project import settings

from .cylinder import situation1_term, situation2_term
from .exceptions import DomainViolation, VacuousBoundError

logger = logging.getLogger(__name__)


class BoundInputs(BaseModel):
    """Lengths of the shortest curves c+-_i on the two boundary surfaces."""

    model_config = ConfigDict(frozen=True)

    l_plus_1: float = Field(gt=0)
    l_minus_1: float = Field(gt=0)
    l_plus_2: float = Field(gt=0)
    l_minus_2: float = Field(gt=0)
    eps3: float = Field(default=settings.DEFAULT_MARGULIS_EPS, gt=0)

    def cylinders(self) -> List[Tuple[int, float, float]]:
        return [(1, self.l_plus_1, self.l_minus_1), (2, self.l_plus_2, self.l_minus_2)]


class UniformBoundInputs(BaseModel):
    """Upper envelopes Omega and lower envelopes omega of the lengths over a sequence of metrics."""

    model_config = ConfigDict(frozen=True)

    Omega_plus_1: float = Field(gt=0)
    omega_plus_1: float = Field(gt=0)
    Omega_minus_1: float = Field(gt=0)
    omega_minus_1: float = Field(gt=0)
    Omega_plus_2: float = Field(gt=0)
    omega_plus_2: float = Field(gt=0)
    Omega_minus_2: float = Field(gt=0)
    omega_minus_2: float = Field(gt=0)
    eps3: float = Field(default=settings.DEFAULT_MARGULIS_EPS, gt=0)

    @model_validator(mode="after")
    def check_envelopes(self):
        for side in ("plus_1", "minus_1", "plus_2", "minus_2"):
            upper = getattr(self, f"Omega_{side}")
            lower = getattr(self, f"omega_{side}")
            if upper < lower:
                raise ValueError(f"Omega_{side} = {upper} is below omega_{side} = {lower}")
        return self

    def collapsed(self) -> BoundInputs:
        """The lengths-only inputs whose envelopes coincide with the upper bounds."""
        return BoundInputs(
            l_plus_1=self.Omega_plus_1,
            l_minus_1=self.Omega_minus_1,
            l_plus_2=self.Omega_plus_2,
            l_minus_2=self.Omega_minus_2,
            eps3=self.eps3,
        )


class CoveringConstants(BaseModel):
    model_config = ConfigDict(frozen=True)

    delta_S: float = Field(ge=0)
    sigma_S: float = Field(ge=0)
    delta_M: float
    neighbor_radius: float
    rho_hat: float


class BoundTerm(BaseModel):
    name: str
    value: Optional[float] = None
    vacuous: bool = False
    log_space: bool = False


class BoundResult(BaseModel):
    value: float
    attained: str
    log_space: bool
    terms: List[BoundTerm]


class AuditResult(BaseModel):
    dps: int
    max_relative_error: float
    attained: str
    attained_agrees: bool


def _arcosh_term(name: str, l: float, eps3: float) -> BoundTerm:
    try:
        threshold = situation1_term(l, eps3)
    except VacuousBoundError as e:
        logger.warning(f"Term {name} is vacuous and left out of the maximum: {e}")
        return BoundTerm(name=name, vacuous=True)
    return BoundTerm(name=name, value=threshold.value, log_space=threshold.log_space)


def _collect(terms: List[BoundTerm]) -> BoundResult:
    live = [t for t in terms if not t.vacuous]
    best = max(live, key=lambda t: t.value)
    return BoundResult(
        value=best.value,
        attained=best.name,
        log_space=any(t.log_space for t in terms),
        terms=terms,
    )


def separation_bound(inputs: BoundInputs) -> BoundResult:
    """Maximum of the four logarithmic and the four arcosh terms over both cylinders."""
    terms: List[BoundTerm] = []
    for i, l_plus, l_minus in inputs.cylinders():
        terms.append(BoundTerm(name=f"log_{i}_plus", value=situation2_term(l_plus, l_minus)))
        terms.append(BoundTerm(name=f"log_{i}_minus", value=situation2_term(l_minus, l_plus)))
    for i, l_plus, l_minus in inputs.cylinders():
        terms.append(_arcosh_term(f"arcosh_{i}_plus", l_plus, inputs.eps3))
        terms.append(_arcosh_term(f"arcosh_{i}_minus", l_minus, inputs.eps3))
    result = _collect(terms)
    logger.info(f"Separation bound {result.value:.12g} attained by {result.attained}")
    return result


def uniform_separation_bound(inputs: UniformBoundInputs) -> BoundResult:
    """The separation bound with Omega in every increasing slot and omega in every denominator."""
    terms: List[BoundTerm] = []
    for i in (1, 2):
        upper_plus = getattr(inputs, f"Omega_plus_{i}")
        upper_minus = getattr(inputs, f"Omega_minus_{i}")
        lower_plus = getattr(inputs, f"omega_plus_{i}")
        lower_minus = getattr(inputs, f"omega_minus_{i}")
        total = upper_plus + upper_minus
        terms.append(BoundTerm(name=f"log_{i}_plus", value=total + math.log(2 * upper_plus / lower_minus)))
        terms.append(BoundTerm(name=f"log_{i}_minus", value=total + math.log(2 * upper_minus / lower_plus)))
    for i in (1, 2):
        terms.append(_arcosh_term(f"arcosh_{i}_plus", getattr(inputs, f"Omega_plus_{i}"), inputs.eps3))
        terms.append(_arcosh_term(f"arcosh_{i}_minus", getattr(inputs, f"Omega_minus_{i}"), inputs.eps3))
    result = _collect(terms)
    logger.info(f"Uniform separation bound {result.value:.12g} attained by {result.attained}")
    return result


def _mp_terms(inputs: BoundInputs) -> Dict[str, Optional[mpmath.mpf]]:
    eps = mpmath.mpf(inputs.eps3)
    out: Dict[str, Optional[mpmath.mpf]] = {}

    def log_term(a, b):
        return a + b + mpmath.log(2 * a / b)

    def arcosh_term(l):
        argument = mpmath.exp(l) * l**2 / eps**2
        if argument < 1:
            return None
        inner = l + mpmath.acosh(argument)
        return 2 * mpmath.acosh(mpmath.cosh(l) * mpmath.cosh(inner))

    for i, l_plus, l_minus in inputs.cylinders():
        a, b = mpmath.mpf(l_plus), mpmath.mpf(l_minus)
        out[f"log_{i}_plus"] = log_term(a, b)
        out[f"log_{i}_minus"] = log_term(b, a)
    for i, l_plus, l_minus in inputs.cylinders():
        out[f"arcosh_{i}_plus"] = arcosh_term(mpmath.mpf(l_plus))
        out[f"arcosh_{i}_minus"] = arcosh_term(mpmath.mpf(l_minus))
    return out


def audit_separation_bound(inputs: BoundInputs, dps: int = 50) -> AuditResult:
    """Re-evaluate all eight terms with mpmath and compare them with the double-precision result."""
    result = separation_bound(inputs)
    with mpmath.workdps(dps):
        reference = _mp_terms(inputs)
        worst = mpmath.mpf(0)
        for term in result.terms:
            exact = reference[term.name]
            if (exact is None) != term.vacuous:
                raise DomainViolation(f"term {term.name} is vacuous in only one precision")
            if exact is None:
                continue
            worst = max(worst, abs(mpmath.mpf(term.value) - exact) / abs(exact))
        live = {name: value for name, value in reference.items() if value is not None}
        attained = max(live, key=lambda name: live[name])
        max_relative_error = float(worst)
    if attained != result.attained:
        logger.warning(f"Audit picks {attained}, double precision picked {result.attained}")
    return AuditResult(
        dps=dps,
        max_relative_error=max_relative_error,
        attained=attained,
        attained_agrees=attained == result.attained,
    )


def covering_constants(delta_S: float, sigma_S: float) -> CoveringConstants:
    """delta_M = sigma_S + 2 delta_S, neighbor radius 3 delta_S, rho_hat = 9 delta_S + delta_M."""
    if delta_S < 0 or sigma_S < 0:
        raise DomainViolation(f"covering inputs must be nonnegative, got delta_S={delta_S}, sigma_S={sigma_S}")
    delta_M = sigma_S + 2 * delta_S
    return CoveringConstants(
        delta_S=delta_S,
        sigma_S=sigma_S,
        delta_M=delta_M,
        neighbor_radius=3 * delta_S,
        rho_hat=9 * delta_S + delta_M,
    )
