"""
Harmonic analysis verbs on sl2.

eta and eta_r, orbital integrals, the Fourier self-check, mu^ by both
routes and the niceness scan. Every value is an exact CycValue block.
"""

import logging
from fractions import Fraction

from padicbench.errors import NotStabilized
from padicbench.localfield import FieldSpec
from padicbench.orbital.eta import eta, eta_r, sufficiency_depth
from padicbench.orbital.fourier import (
    SchwartzFunction,
    corpus,
    coset_indicator,
    double_transform_defect,
    fourier_transform,
    lattice_indicator,
    twisted_indicator,
)
from padicbench.orbital.lie import classify, square_class
from padicbench.orbital.muhat import DIRECT, HUNTSINGER, constancy_certificate, mu_hat, niceness_scan
from padicbench.orbital.orbits import orbit_charts, orbital_integral
from padicbench.routing import CellResult, VerbRouter
from padicbench.schemas import (
    EtaRequest,
    FourierCheckRequest,
    MuHatRequest,
    MuHatRoute,
    NicenessRequest,
    OrbitalRequest,
    SchwartzKind,
    SchwartzSpec,
    Verb,
)

logger = logging.getLogger(__name__)

router = VerbRouter(tags=["harmonic"])


def schwartz_function(field: FieldSpec, spec: SchwartzSpec) -> SchwartzFunction:
    if spec.kind == SchwartzKind.COSET:
        return coset_indicator(spec.center.to_lie(field), spec.k)
    if spec.kind == SchwartzKind.TWISTED:
        return twisted_indicator(spec.y.to_lie(field), spec.k)
    return lattice_indicator(spec.k)


@router.verb(Verb.ETA, request_model=EtaRequest)
def eta_value(field: FieldSpec, request: EtaRequest) -> CellResult:
    """eta_X(Y), or eta_{X,r}(Y) when r is given."""
    x, y = request.x.to_lie(field), request.y.to_lie(field)
    method = request.method.value
    if request.r is not None:
        value = eta_r(x, y, Fraction(request.r), request.m, method)
    else:
        value = eta(x, y, request.m, method)
    certificates = {"method": method, "sufficiency_depth": sufficiency_depth(x, y)}
    if request.m is not None:
        certificates["m"] = request.m
    return {"value": value.to_json()}, certificates


@router.verb(Verb.ORBITAL, request_model=OrbitalRequest)
def orbital(field: FieldSpec, request: OrbitalRequest) -> CellResult:
    """
    Phi_X(f) for a lattice, coset or twisted test function.

    A non-stabilized truncation is reported through the `stabilized` flag
    and does not fail the job.
    """
    x = request.x.to_lie(field)
    f = schwartz_function(field, request.function)
    result = orbital_integral(x, f, request.window, request.depth)
    outputs = {
        "value": result.value.to_json(),
        "stabilized": result.stabilized,
        "shells": result.sums.shells_json(),
    }
    certificates = {
        "function": f.name,
        "window": request.window,
        "square_class": square_class(x).value,
        "charts": [chart.label for chart in orbit_charts(x)],
        **result.sums.statistics,
    }
    return outputs, certificates


@router.verb(Verb.FOURIER_CHECK, request_model=FourierCheckRequest)
def fourier_check(field: FieldSpec, request: FourierCheckRequest) -> CellResult:
    """f^ at the given points and the double-transform identity f^^ = q^-3 f(-.)."""
    functions = corpus(field)
    names = request.functions or list(functions)
    unknown = [name for name in names if name not in functions]
    if unknown:
        raise ValueError(f"unknown corpus functions: {unknown}")
    points = [p.to_lie(field) for p in request.points]
    outputs = {}
    for name in names:
        f = functions[name]
        transform = fourier_transform(f)
        defects = [double_transform_defect(f, point) for point in points]
        outputs[name] = {
            "transform": [transform(point).to_json() for point in points],
            "double_transform_holds": all(d.is_zero() for d in defects),
        }
    certificates = {
        name: {"support": functions[name].support, "constancy": functions[name].constancy} for name in names
    }
    return outputs, certificates


@router.verb(Verb.MU_HAT, request_model=MuHatRequest)
def mu_hat_value(field: FieldSpec, request: MuHatRequest) -> CellResult:
    """
    mu^_X(Y) by the direct route, the huntsinger route, or both.

    With both routes the agreement verdict is part of the outputs. A
    non-stabilized direct value fails the cell unless require_stabilized is
    switched off.
    """
    x, y = request.x.to_lie(field), request.y.to_lie(field)
    params = {"window": request.window, "max_window": request.max_window, "support_shells": request.support_shells}
    if request.level is not None:
        params["level"] = Fraction(request.level)
    routes = [DIRECT, HUNTSINGER] if request.route == MuHatRoute.BOTH else [request.route.value]
    reports = {route: mu_hat(x, y, route, **params) for route in routes}

    outputs = {route: report.value.to_json() for route, report in reports.items()}
    certificates = {route: {k: v for k, v in report.to_json().items() if k != "value"} for route, report in reports.items()}
    if len(reports) == 2:
        outputs["agree"] = reports[DIRECT].value == reports[HUNTSINGER].value
        if not outputs["agree"]:
            logger.warning("routes disagree on %s for X=%r, Y=%r", field.name(), x, y)
    direct = reports.get(DIRECT)
    if direct is not None and request.require_stabilized and not direct.stabilized:
        raise NotStabilized(f"direct route not stabilized at window {direct.window}")

    if request.constancy_depth is not None:
        certificate = constancy_certificate(
            x, y, request.constancy_depth, request.samples, routes[0], **params
        )
        outputs["constancy_depth"] = certificate.depth
        outputs["constancy_minimal"] = certificate.minimal
        certificates["constancy"] = certificate.to_json()
    certificates["classes"] = {"x": classify(x).value, "y": classify(y).value}
    return outputs, certificates


@router.verb(Verb.NICENESS_SCAN, request_model=NicenessRequest)
def niceness(field: FieldSpec, request: NicenessRequest) -> CellResult:
    """|D(Y)|^(1/2) |mu^_X(Y)|^2 over valuation shells and the partial L1 trend."""
    x = request.x.to_lie(field)
    scan = niceness_scan(x, tuple(request.shells), request.samples, request.route.value, request.max_window)
    outputs = {key: scan[key] for key in ("rows", "partial_l1", "increments_decreasing", "bounded_by_shell_zero")}
    return outputs, {"increments": scan["increments"], "errors": scan["errors"]}
