"""
Pydantic schemas for job validation and report serialization.

Organized by concern:
- Field and element descriptions
- Job spec and per-verb requests
- Reports
"""

from enum import Enum
from fractions import Fraction
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field, field_validator, model_validator
from sympy import isprime

from padicbench.config import settings
from padicbench.localfield import FieldSpec, TruncatedElement
from padicbench.orbital.lie import LieElement


class FieldChar(str, Enum):
    """Characteristic flag: Q_p or F_p((t))."""
    ZERO = "zero"
    POSITIVE = "pos"


class FieldSpecModel(BaseModel):
    """A local field with residue field F_p."""
    p: int = Field(..., ge=2, description="Residue characteristic")
    char: FieldChar = Field(FieldChar.ZERO, description="'zero' for Q_p, 'pos' for F_p((t))")

    @field_validator("p")
    @classmethod
    def validate_prime(cls, p: int) -> int:
        if not isprime(p):
            raise ValueError(f"p must be prime, got {p}")
        return p

    def to_field(self) -> FieldSpec:
        return FieldSpec(self.p, self.char.value)


class ElementDescription(BaseModel):
    """
    A field-independent element: sum_i digits[i] * w^(val + i).

    The same description read over Q_p and F_p((t)) gives digit-matched
    inputs. `val` absent means the exact zero; `exact` pads the digits with
    zeros to the precision cap, making the element exact to that precision.
    """
    val: Optional[int] = Field(None, description="Valuation of the first digit; null for exact zero")
    digits: List[int] = Field(default_factory=list, description="Base-p digits, lowest first")
    exact: bool = Field(True, description="Pad with zeros to the precision cap")
    negate: bool = Field(False, description="Negate the element")

    @field_validator("digits")
    @classmethod
    def validate_digits(cls, digits: List[int]) -> List[int]:
        if any(d < 0 for d in digits):
            raise ValueError("digits must be non-negative")
        return digits

    @model_validator(mode="after")
    def validate_nonempty(self) -> "ElementDescription":
        if self.val is not None and not self.digits and self.exact:
            raise ValueError("an exact element with a valuation needs at least one digit")
        return self

    def to_element(self, field: FieldSpec) -> TruncatedElement:
        if self.val is None:
            return field.zero()
        for d in self.digits:
            if d >= field.p:
                raise ValueError(f"digit {d} is not a residue modulo {field.p}")
        digits = list(self.digits)
        if self.exact:
            digits += [0] * max(settings.precision_cap - len(digits), 0)
        return field.from_digits(self.val, digits, self.negate)


class LieElementModel(BaseModel):
    """Y = a H + b E + c F in sl2."""
    a: ElementDescription = Field(default_factory=ElementDescription)
    b: ElementDescription = Field(default_factory=ElementDescription)
    c: ElementDescription = Field(default_factory=ElementDescription)

    def to_lie(self, field: FieldSpec) -> LieElement:
        return LieElement(self.a.to_element(field), self.b.to_element(field), self.c.to_element(field))


def _fraction(value: str) -> Fraction:
    try:
        return Fraction(value)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not an exact rational: {value!r}") from exc


class Verb(str, Enum):
    """Computations a job can request."""
    ROOTS = "roots"
    OPTIMAL_POINTS = "optimal-points"
    MP_LATTICE = "mp-lattice"
    EVAL_FORMULA = "eval-formula"
    INTEGRATE = "integrate"
    ETA = "eta"
    ORBITAL = "orbital"
    FOURIER_CHECK = "fourier-check"
    MU_HAT = "mu-hat"
    NICENESS_SCAN = "niceness-scan"
    TRANSFER_CHECK = "transfer-check"


class JobSpec(BaseModel):
    """A computation over one or more fields, with field-independent inputs."""
    computation: Verb = Field(..., description="Verb to run")
    fields: List[FieldSpecModel] = Field(..., min_length=1, description="Fields the computation runs over")
    inputs: Dict[str, Any] = Field(default_factory=dict, description="Verb inputs (elements, formulas, matrices)")
    parameters: Dict[str, Any] = Field(default_factory=dict, description="Depths, windows, r, l")
    output: Optional[str] = Field(None, description="Report path; stdout when absent")

    @model_validator(mode="after")
    def validate_transfer_fields(self) -> "JobSpec":
        if self.computation == Verb.TRANSFER_CHECK:
            if len(self.fields) < 2:
                raise ValueError("transfer-check needs at least two fields")
            if len({f.p for f in self.fields}) != 1:
                raise ValueError("transfer-check fields must share the residue characteristic")
        return self


# per-verb requests (inputs and parameters merged)


class RootsRequest(BaseModel):
    cartan: List[List[int]] = Field(..., min_length=1, description="Cartan matrix, rows a_ij = <alpha_i, alpha_j^vee>")
    tau: Optional[List[int]] = Field(None, description="Diagram automorphism acting on the alcove faces")


class OptimalPointsRequest(BaseModel):
    cartan: List[List[int]] = Field(..., min_length=1)
    tau: Optional[List[int]] = Field(None, description="Unramified twist; only tau-invariant subsets are optimized")
    level_bound: int = Field(2, ge=1, le=4, description="Largest |n| among the affine roots alpha + n scanned")


class MpLatticeRequest(BaseModel):
    n: int = Field(2, ge=2, le=4, description="sl_n")
    point: List[str] = Field(..., description="Alcove coordinates alpha_i(x) as exact rationals")
    r: str = Field(..., description="Depth r as a rational; a trailing '+' asks for g_{x,r+}")
    members: List[List[List[ElementDescription]]] = Field(
        default_factory=list, description="Matrices (rows of entries) tested for membership"
    )
    group: List[List[List[ElementDescription]]] = Field(
        default_factory=list, description="SL_n matrices tested against G_{x,r} (r > 0)"
    )

    @field_validator("point")
    @classmethod
    def validate_point(cls, point: List[str]) -> List[str]:
        for value in point:
            _fraction(value)
        return point

    @field_validator("r")
    @classmethod
    def validate_r(cls, r: str) -> str:
        _fraction(r.rstrip("+"))
        return r

    @property
    def depth(self) -> Fraction:
        return _fraction(self.r.rstrip("+"))

    @property
    def strict(self) -> bool:
        return self.r.endswith("+")


class FormulaAssignment(BaseModel):
    """A value for one free variable: VF element, residue, or integer."""
    vf: Optional[ElementDescription] = None
    rf: Optional[int] = None
    z: Optional[int] = None

    @model_validator(mode="after")
    def validate_one(self) -> "FormulaAssignment":
        if sum(v is not None for v in (self.vf, self.rf, self.z)) != 1:
            raise ValueError("exactly one of vf, rf, z must be given")
        return self


class EvalFormulaRequest(BaseModel):
    formula: str = Field(..., min_length=1, description="Concrete syntax, see README")
    sorts: Dict[str, str] = Field(default_factory=dict, description="Pinned sorts of free variables")
    assignment: Dict[str, FormulaAssignment] = Field(default_factory=dict)
    vf_window: List[int] = Field([-2, 4], min_length=2, max_length=2)
    digit_depth: int = Field(3, ge=1, le=6)
    z_window: List[int] = Field([-4, 8], min_length=2, max_length=2)


class IntegrandKind(str, Enum):
    ONE = "one"
    CHARACTER = "character"
    MEASURE = "measure"


class IntegrateRequest(BaseModel):
    dimension: int = Field(..., ge=1, le=3)
    lo: List[int] = Field(..., description="Per-coordinate valuation lower bound of the box")
    hi: Optional[List[int]] = Field(None, description="Optional valuation upper bounds (excluded shells)")
    depth: int = Field(1, ge=1, le=6)
    mode: str = Field("one-shot", description="one-shot | refine | adaptive")
    integrand: IntegrandKind = IntegrandKind.ONE
    coefficients: List[ElementDescription] = Field(
        default_factory=list, description="character: Lambda(sum_i coefficients[i] * x_i)"
    )
    exponents: List[int] = Field(default_factory=list, description="measure: density prod_i x_i^e_i")
    domain: Optional[str] = Field(None, description="Formula in the variables x0, x1, ... restricting the box")

    @model_validator(mode="after")
    def validate_shapes(self) -> "IntegrateRequest":
        if len(self.lo) != self.dimension:
            raise ValueError("lo must have one entry per coordinate")
        if self.hi is not None and len(self.hi) != self.dimension:
            raise ValueError("hi must have one entry per coordinate")
        if self.integrand == IntegrandKind.CHARACTER and len(self.coefficients) != self.dimension:
            raise ValueError("character integrand needs one coefficient per coordinate")
        if self.integrand == IntegrandKind.MEASURE and len(self.exponents) != self.dimension:
            raise ValueError("measure integrand needs one exponent per coordinate")
        return self


class EtaMethod(str, Enum):
    ORBIT = "orbit"
    ENUMERATE = "enumerate"


class EtaRequest(BaseModel):
    x: LieElementModel
    y: LieElementModel
    m: Optional[int] = Field(None, ge=1, le=4, description="Enumeration depth (enumerate method)")
    method: EtaMethod = EtaMethod.ORBIT
    r: Optional[str] = Field(None, description="When set, eta times the indicator of g_r at Y")

    @field_validator("r")
    @classmethod
    def validate_r(cls, r: Optional[str]) -> Optional[str]:
        if r is not None:
            _fraction(r)
        return r


class SchwartzKind(str, Enum):
    LATTICE = "lattice"
    COSET = "coset"
    TWISTED = "twisted"


class SchwartzSpec(BaseModel):
    """1 on w^k g(Omega); 1 on center + w^k g(Omega); or Lambda(<., y>) on w^k g(Omega)."""
    kind: SchwartzKind = SchwartzKind.LATTICE
    k: int = Field(0, ge=-3, le=4)
    center: Optional[LieElementModel] = None
    y: Optional[LieElementModel] = None

    @model_validator(mode="after")
    def validate_kind(self) -> "SchwartzSpec":
        if self.kind == SchwartzKind.COSET and self.center is None:
            raise ValueError("coset test function needs a center")
        if self.kind == SchwartzKind.TWISTED and self.y is None:
            raise ValueError("twisted test function needs y")
        return self


class OrbitalRequest(BaseModel):
    x: LieElementModel
    function: SchwartzSpec = Field(default_factory=SchwartzSpec)
    window: int = Field(1, ge=0, le=4)
    depth: int = Field(1, ge=1, le=4)


class FourierCheckRequest(BaseModel):
    points: List[LieElementModel] = Field(..., min_length=1)
    functions: Optional[List[str]] = Field(None, description="Corpus names; all when absent")


class MuHatRoute(str, Enum):
    DIRECT = "direct"
    HUNTSINGER = "huntsinger"
    BOTH = "both"


class MuHatRequest(BaseModel):
    x: LieElementModel
    y: LieElementModel
    route: MuHatRoute = MuHatRoute.BOTH
    window: Optional[int] = Field(None, ge=0, le=4)
    max_window: int = Field(2, ge=0, le=4)
    level: Optional[str] = Field(None, description="Kernel cutoff l <= depth(X); floor of depth(X) when absent")
    support_shells: int = Field(1, ge=1, le=2, description="Shells beyond the window on which the kernel must vanish")
    constancy_depth: Optional[int] = Field(None, ge=1, le=4, description="Certify local constancy up to this depth")
    samples: int = Field(20, ge=1, le=100)
    require_stabilized: bool = True

    @field_validator("level")
    @classmethod
    def validate_level(cls, level: Optional[str]) -> Optional[str]:
        if level is not None:
            _fraction(level)
        return level


class NicenessRequest(BaseModel):
    x: LieElementModel
    shells: List[int] = Field([0, -1, -2], min_length=1)
    samples: int = Field(2, ge=1, le=20)
    route: MuHatRoute = MuHatRoute.DIRECT
    max_window: int = Field(2, ge=0, le=4)

    @field_validator("route")
    @classmethod
    def validate_route(cls, route: MuHatRoute) -> MuHatRoute:
        if route == MuHatRoute.BOTH:
            raise ValueError("niceness-scan runs a single route")
        return route


class TransferCheckRequest(BaseModel):
    computation: Verb = Field(..., description="Verb recomputed over every field")
    inputs: Dict[str, Any] = Field(default_factory=dict)

    @field_validator("computation")
    @classmethod
    def validate_inner(cls, computation: Verb) -> Verb:
        if computation == Verb.TRANSFER_CHECK:
            raise ValueError("transfer-check cannot nest")
        return computation


# reports


class CycValueModel(BaseModel):
    """sum_k coeffs[k] zeta_{p^level}^k in canonical form; level 0 is a rational."""
    level: int = Field(..., ge=0)
    p: int = Field(..., ge=0)
    coeffs: Dict[str, str]
    scale: str = "1"


class ErrorModel(BaseModel):
    error: str
    detail: str
    exit_code: int
    pointer: Optional[str] = None


class CellStatus(str, Enum):
    OK = "ok"
    FAILED = "failed"


class CellReport(BaseModel):
    field: FieldSpecModel
    status: CellStatus
    outputs: Dict[str, Any] = Field(default_factory=dict)
    certificates: Dict[str, Any] = Field(default_factory=dict)
    error: Optional[ErrorModel] = None


class JobReport(BaseModel):
    computation: Verb
    exit_code: int
    cells: List[CellReport]


class Disagreement(BaseModel):
    output: str
    fields: List[FieldSpecModel]
    traces: List[Dict[str, Any]]


class TransferReport(BaseModel):
    computation: Verb
    inner: Verb
    exit_code: int
    verdicts: Dict[str, bool] = Field(default_factory=dict, description="Per output: equal across all fields")
    agree: bool
    compared_fields: List[FieldSpecModel]
    failed_cells: List[CellReport] = Field(default_factory=list)
    disagreements: List[Disagreement] = Field(default_factory=list)
