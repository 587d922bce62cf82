"""
Denef-Pas formula verb.
"""

import logging

from padicbench.denefpas import EvalContext, certify, free_variables, parse, to_text
from padicbench.localfield import FieldSpec
from padicbench.routing import CellResult, VerbRouter
from padicbench.schemas import EvalFormulaRequest, Verb

logger = logging.getLogger(__name__)

router = VerbRouter(tags=["formulas"])


@router.verb(Verb.EVAL_FORMULA, request_model=EvalFormulaRequest)
def eval_formula(field: FieldSpec, request: EvalFormulaRequest) -> CellResult:
    """
    Truth value of a formula over the boxed model of the field.

    The value is recomputed on a box one step wider; `box_too_small` flags a
    quantifier whose decision depends on the box.
    """
    formula = parse(request.formula, request.sorts or None)
    assignment = {}
    for name, value in request.assignment.items():
        if value.vf is not None:
            assignment[name] = value.vf.to_element(field)
        elif value.rf is not None:
            assignment[name] = value.rf % field.p
        else:
            assignment[name] = value.z
    ctx = EvalContext(
        field,
        assignment,
        vf_window=tuple(request.vf_window),
        digit_depth=request.digit_depth,
        z_window=tuple(request.z_window),
    )
    certificate = certify(formula, ctx, request.sorts or None)
    outputs = {
        "formula": to_text(formula),
        "free_variables": free_variables(formula, request.sorts or None),
        "value": certificate.value,
        "box_too_small": certificate.box_too_small,
    }
    return outputs, {"box": certificate.box}
