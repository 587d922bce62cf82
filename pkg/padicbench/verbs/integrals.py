"""
Integration verb.

The integrand is one of a few closed forms over the box, optionally
restricted to a definable set given by a formula in x0, x1, ...
"""

import logging
from functools import reduce

from padicbench.denefpas import VF, EvalContext, definable_set, parse
from padicbench.integrate import ONE_SHOT, Box, IntegrationJob, form_measure, integrate
from padicbench.localfield import FieldSpec, character
from padicbench.routing import CellResult, VerbRouter
from padicbench.schemas import IntegrandKind, IntegrateRequest, Verb

logger = logging.getLogger(__name__)

router = VerbRouter(tags=["integrals"])


def _domain(field: FieldSpec, request: IntegrateRequest):
    if request.domain is None:
        return None
    variables = [f"x{i}" for i in range(request.dimension)]
    formula = parse(request.domain, {name: VF for name in variables})
    return definable_set(formula, variables, EvalContext(field))


@router.verb(Verb.INTEGRATE, request_model=IntegrateRequest)
def integrate_box(field: FieldSpec, request: IntegrateRequest) -> CellResult:
    """
    Exact integral over a box of valuation windows.

    Integrands: `one` (Haar volume), `character` (Lambda of a linear form)
    and `measure` (|prod x_i^e_i| d x, the measure of a monomial volume form).
    """
    box = Box(tuple(request.lo), tuple(request.hi) if request.hi else ())
    domain = _domain(field, request)

    if request.integrand == IntegrandKind.MEASURE:
        if request.mode != ONE_SHOT:
            raise ValueError("the measure integrand is evaluated in one-shot mode only")
        if any(e < 0 for e in request.exponents):
            raise ValueError("density exponents must be non-negative")

        def density(point):
            factors = [x**e for x, e in zip(point, request.exponents)]
            return reduce(lambda u, v: u * v, factors, field.one())

        value = form_measure(field, density, box, request.depth, domain)
        return {"value": value.to_json()}, {"mode": request.mode, "depth": request.depth, "box": box.to_json()}

    if request.integrand == IntegrandKind.CHARACTER:
        coefficients = [c.to_element(field) for c in request.coefficients]

        def integrand(point):
            total = field.zero()
            for a, x in zip(coefficients, point):
                total = total + a * x
            return character(total)

    else:

        def integrand(point):
            return 1

    job = IntegrationJob(field, box, integrand, request.depth, request.mode, domain)
    result = integrate(job)
    return {"value": result.value.to_json()}, {**result.certificate, "box": box.to_json()}
