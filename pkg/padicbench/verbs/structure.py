"""
Building combinatorics verbs.

Root systems and alcoves, optimal points, and Moy-Prasad lattices. Apart
from the lattice volume (a power of q) and the membership tests, outputs
do not depend on the field.
"""

import logging
from fractions import Fraction

from padicbench.denefpas import lattice_formula
from padicbench.localfield import FieldSpec
from padicbench.moyprasad import (
    chevalley_model,
    dual_lattice,
    group_member,
    lattice_member,
    lattice_volume,
    mp_lattice,
)
from padicbench.optimal import optimal_points_all
from padicbench.rootdata import build_root_system, fundamental_alcove
from padicbench.routing import CellResult, VerbRouter
from padicbench.schemas import MpLatticeRequest, OptimalPointsRequest, RootsRequest, Verb

logger = logging.getLogger(__name__)

router = VerbRouter(tags=["structure"])


@router.verb(Verb.ROOTS, request_model=RootsRequest)
def roots(field: FieldSpec, request: RootsRequest) -> CellResult:
    """
    Root system, Dynkin type and fundamental alcove of a Cartan matrix.

    With a diagram automorphism tau, the counts of alcove faces it fixes
    setwise and pointwise are reported too.
    """
    rs = build_root_system(request.cartan)
    alcove = fundamental_alcove(rs)
    outputs = {"root_system": rs.to_json(), "alcove": alcove.to_json()}
    if request.tau is not None:
        if not rs.preserves(request.tau):
            raise ValueError(f"permutation {request.tau} does not preserve the Cartan matrix")
        outputs["tau_fixed_faces"] = alcove.fixed_faces(request.tau)
    return outputs, {"closure_roots": len(rs.roots)}


@router.verb(Verb.OPTIMAL_POINTS, request_model=OptimalPointsRequest)
def optimal_points(field: FieldSpec, request: OptimalPointsRequest) -> CellResult:
    """The optimal point set of the alcove closure, one LP per invariant subset of Sigma."""
    rs = build_root_system(request.cartan)
    points, reports = optimal_points_all(rs, request.tau, request.level_bound)
    outputs = {"points": [[str(c) for c in point] for point in points]}
    certificates = {"optimizers": [report.to_json() for report in reports]}
    return outputs, certificates


@router.verb(Verb.MP_LATTICE, request_model=MpLatticeRequest)
def moy_prasad_lattice(field: FieldSpec, request: MpLatticeRequest) -> CellResult:
    """
    The lattice g_{x,r} (or g_{x,r+}) as a shift table, with its dual, Haar
    volume and the Denef-Pas membership formula; optional membership tests
    for given matrices and SL_n elements.
    """
    model = chevalley_model(request.n)
    point = [Fraction(c) for c in request.point]
    lattice = mp_lattice(model, point, request.depth, request.strict)
    variables = [f"y{i}" for i in range(model.dimension)]
    outputs = {
        "lattice": lattice.to_json(),
        "dual": dual_lattice(lattice, model).to_json(),
        "volume": str(lattice_volume(lattice, field.q)),
        "formula": lattice_formula(lattice.shifts, variables),
    }
    if request.members:
        outputs["members"] = [
            lattice_member([[e.to_element(field) for e in row] for row in m], lattice, model)
            for m in request.members
        ]
    if request.group:
        outputs["group_members"] = [
            group_member([[e.to_element(field) for e in row] for row in g], point, request.depth, model)
            for g in request.group
        ]
    logger.debug("lattice %s at r=%s on %s", lattice.shifts, request.r, field.name())
    return outputs, {"model": model.name}
