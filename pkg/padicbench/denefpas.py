"""
Three-sorted Denef-Pas formulas: AST, parser, printer and bounded evaluator.

Sorts: VF (valued field), RF (residue field), Z (value group with INF).
Concrete syntax:

    EX x:VF. ord(x) >= 2 /\\ ac(x) = 1
    ALL n:Z. n =_2= 0 \\/ n =_2= 1          (also written n ≡_2 0)
    ~ (ord(x + y) >= ord(x))

Evaluation is three-valued. Quantifiers range over finite boxes: VF
quantifiers over the exact zero and the elements w^v (d_0 + ... + d_{m-1} w^{m-1})
with d_0 != 0 and v in a valuation window; Z quantifiers over an integer window;
RF quantifiers over all of F_p.
"""

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Dict, Iterator, Optional, Sequence, Tuple, Union

import pyparsing as pp

from padicbench.config import settings
from padicbench.errors import FormulaSyntaxError, InsufficientPrecision, SortError
from padicbench.localfield import FieldSpec, TruncatedElement

logger = logging.getLogger(__name__)

pp.ParserElement.enable_packrat()

VF, RF, Z = "VF", "RF", "Z"
SORTS = (VF, RF, Z)


# terms


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Lit:
    value: int


@dataclass(frozen=True)
class Infinity:
    pass


@dataclass(frozen=True)
class Sum:
    args: Tuple["Term", ...]


@dataclass(frozen=True)
class Product:
    args: Tuple["Term", ...]


@dataclass(frozen=True)
class Ord:
    arg: "Term"


@dataclass(frozen=True)
class Ac:
    arg: "Term"


Term = Union[Var, Lit, Infinity, Sum, Product, Ord, Ac]


# formulas


@dataclass(frozen=True)
class Equals:
    left: Term
    right: Term


@dataclass(frozen=True)
class AtLeast:
    left: Term
    right: Term


@dataclass(frozen=True)
class Congruent:
    left: Term
    right: Term
    modulus: int


@dataclass(frozen=True)
class Conj:
    args: Tuple["Formula", ...]


@dataclass(frozen=True)
class Disj:
    args: Tuple["Formula", ...]


@dataclass(frozen=True)
class Neg:
    arg: "Formula"


@dataclass(frozen=True)
class Exists:
    var: str
    sort: str
    body: "Formula"


@dataclass(frozen=True)
class Forall:
    var: str
    sort: str
    body: "Formula"


Formula = Union[Equals, AtLeast, Congruent, Conj, Disj, Neg, Exists, Forall]
ATOMS = (Equals, AtLeast, Congruent)


# grammar


def _flat(cls):
    def action(tokens):
        items = list(tokens)
        return items[0] if len(items) == 1 else cls(tuple(items))

    return action


def _build_grammar() -> pp.ParserElement:
    keywords = pp.MatchFirst([pp.Keyword(k) for k in ("EX", "ALL", "INF", "ord", "ac", "VF", "RF", "Z")])
    identifier = pp.Combine(~keywords + pp.Word(pp.alphas + "_", pp.alphanums + "_"))
    integer = pp.Word(pp.nums)

    term = pp.Forward()
    variable = identifier.copy().set_parse_action(lambda t: Var(t[0]))
    literal = integer.copy().set_parse_action(lambda t: Lit(int(t[0])))
    infinity = pp.Keyword("INF").set_parse_action(lambda t: Infinity())
    lpar, rpar = pp.Suppress("("), pp.Suppress(")")
    ord_term = (pp.Suppress(pp.Keyword("ord")) + lpar + term + rpar).set_parse_action(lambda t: Ord(t[0]))
    ac_term = (pp.Suppress(pp.Keyword("ac")) + lpar + term + rpar).set_parse_action(lambda t: Ac(t[0]))
    factor = ord_term | ac_term | infinity | literal | variable | (lpar + term + rpar)
    product = (factor + pp.ZeroOrMore(pp.Suppress("*") + factor)).set_parse_action(_flat(Product))
    term <<= (product + pp.ZeroOrMore(pp.Suppress("+") + product)).set_parse_action(_flat(Sum))

    congruence = pp.Regex(r"≡_(?P<a>\d+)|=_(?P<b>\d+)=").set_parse_action(
        lambda t: ("cong", int(t.get("a") or t.get("b")))
    )
    at_least = (pp.Literal(">=") | pp.Literal("≥")).set_parse_action(lambda t: ("ge", 0))
    equals = pp.Literal("=").set_parse_action(lambda t: ("eq", 0))
    relation = congruence | at_least | equals

    def make_atom(t):
        left, (kind, modulus), right = t[0], t[1], t[2]
        if kind == "eq":
            return Equals(left, right)
        if kind == "ge":
            return AtLeast(left, right)
        return Congruent(left, right, modulus)

    atom = (term + relation + term).set_parse_action(make_atom)

    formula = pp.Forward()
    sort = pp.MatchFirst([pp.Keyword(s) for s in SORTS])
    quantifier = (
        (pp.Keyword("EX") | pp.Keyword("ALL"))
        + identifier
        + pp.Suppress(":")
        + sort
        + pp.Suppress(".")
        + formula
    ).set_parse_action(lambda t: (Exists if t[0] == "EX" else Forall)(t[1], t[2], t[3]))
    unary = pp.Forward()
    negation = (pp.Suppress("~") + unary).set_parse_action(lambda t: Neg(t[0]))
    unary <<= negation | quantifier | atom | (lpar + formula + rpar)
    conjunction = (unary + pp.ZeroOrMore(pp.Suppress("/\\") + unary)).set_parse_action(_flat(Conj))
    formula <<= (conjunction + pp.ZeroOrMore(pp.Suppress("\\/") + conjunction)).set_parse_action(_flat(Disj))
    return formula


_GRAMMAR = _build_grammar()


def parse(text: str, sorts: Optional[Dict[str, str]] = None) -> Formula:
    """
    Parse concrete syntax into an AST and check sorts.

    `sorts` pins the sorts of free variables; unpinned free variables whose
    sort is not forced by context default to VF.
    """
    try:
        result = _GRAMMAR.parse_string(text, parse_all=True)
    except pp.ParseBaseException as exc:
        raise FormulaSyntaxError(f"cannot parse formula: {exc.msg}", exc.loc) from exc
    formula = result[0]
    free_variables(formula, sorts)
    return formula


# sorts


def _term_sort(t: Term, env: Dict[str, Optional[str]], hint: Optional[str]) -> Optional[str]:
    if isinstance(t, Lit):
        return hint
    if isinstance(t, Infinity):
        _expect(Z, hint, "INF")
        return Z
    if isinstance(t, Var):
        known = env.get(t.name)
        if known is None:
            if hint is not None:
                env[t.name] = hint
            return hint
        _expect(known, hint, t.name)
        return known
    if isinstance(t, Ord):
        _term_sort(t.arg, env, VF)
        _expect(Z, hint, "ord(...)")
        return Z
    if isinstance(t, Ac):
        _term_sort(t.arg, env, VF)
        _expect(RF, hint, "ac(...)")
        return RF
    if isinstance(t, (Sum, Product)):
        sort = hint
        for arg in t.args:
            found = _term_sort(arg, env, sort)
            sort = sort or found
        if sort is not None:
            for arg in t.args:
                _term_sort(arg, env, sort)
        if isinstance(t, Product) and sort == Z:
            raise SortError("multiplication is not defined on the value-group sort Z")
        return sort
    raise SortError(f"unknown term {t!r}")


def _expect(actual: str, hint: Optional[str], what: str) -> None:
    if hint is not None and hint != actual:
        raise SortError(f"{what} has sort {actual}, expected {hint}")


def _formula_sorts(f: Formula, env: Dict[str, Optional[str]], bound: Dict[str, str]) -> None:
    if isinstance(f, Equals):
        scope = {**env, **bound}
        sort = _term_sort(f.left, scope, None) or _term_sort(f.right, scope, None) or VF
        _term_sort(f.left, scope, sort)
        _term_sort(f.right, scope, sort)
        _merge_free(env, scope, bound)
    elif isinstance(f, (AtLeast, Congruent)):
        scope = {**env, **bound}
        _term_sort(f.left, scope, Z)
        _term_sort(f.right, scope, Z)
        _merge_free(env, scope, bound)
    elif isinstance(f, (Conj, Disj)):
        for arg in f.args:
            _formula_sorts(arg, env, bound)
    elif isinstance(f, Neg):
        _formula_sorts(f.arg, env, bound)
    elif isinstance(f, (Exists, Forall)):
        if f.sort not in SORTS:
            raise SortError(f"unknown sort {f.sort}")
        _formula_sorts(f.body, env, {**bound, f.var: f.sort})
    else:
        raise SortError(f"unknown formula node {f!r}")


def _merge_free(env, scope, bound) -> None:
    for name, sort in scope.items():
        if name in bound:
            continue
        if env.get(name) is None and sort is not None:
            env[name] = sort
        elif name not in env:
            env[name] = sort


def _term_vars(t: Term) -> Iterator[str]:
    if isinstance(t, Var):
        yield t.name
    elif isinstance(t, (Ord, Ac)):
        yield from _term_vars(t.arg)
    elif isinstance(t, (Sum, Product)):
        for arg in t.args:
            yield from _term_vars(arg)


def _free_names(f: Formula, bound: frozenset = frozenset()) -> Iterator[str]:
    if isinstance(f, ATOMS):
        for name in (*_term_vars(f.left), *_term_vars(f.right)):
            if name not in bound:
                yield name
    elif isinstance(f, (Conj, Disj)):
        for arg in f.args:
            yield from _free_names(arg, bound)
    elif isinstance(f, Neg):
        yield from _free_names(f.arg, bound)
    elif isinstance(f, (Exists, Forall)):
        yield from _free_names(f.body, bound | {f.var})


def free_variables(f: Formula, pinned: Optional[Dict[str, str]] = None) -> Dict[str, str]:
    """Sorts of the free variables, checking the whole formula is well-sorted."""
    names = list(dict.fromkeys(_free_names(f)))
    env: Dict[str, Optional[str]] = {name: None for name in names}
    for name, sort in (pinned or {}).items():
        if sort not in SORTS:
            raise SortError(f"unknown sort {sort} for {name}")
        if name in env:
            env[name] = sort
    # two passes let sorts discovered late flow back to earlier atoms
    for _ in range(2):
        _formula_sorts(f, env, {})
    return {name: (env.get(name) or VF) for name in names}


# printing


def _print_term(t: Term) -> str:
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Lit):
        return str(t.value)
    if isinstance(t, Infinity):
        return "INF"
    if isinstance(t, Ord):
        return f"ord({_print_term(t.arg)})"
    if isinstance(t, Ac):
        return f"ac({_print_term(t.arg)})"
    if isinstance(t, Sum):
        return " + ".join(f"({_print_term(a)})" if isinstance(a, Sum) else _print_term(a) for a in t.args)
    if isinstance(t, Product):
        return " * ".join(
            f"({_print_term(a)})" if isinstance(a, (Sum, Product)) else _print_term(a) for a in t.args
        )
    raise ValueError(f"unknown term {t!r}")


def to_text(f: Formula) -> str:
    """Concrete syntax with composite operands fully parenthesized."""
    if isinstance(f, Equals):
        return f"{_print_term(f.left)} = {_print_term(f.right)}"
    if isinstance(f, AtLeast):
        return f"{_print_term(f.left)} >= {_print_term(f.right)}"
    if isinstance(f, Congruent):
        return f"{_print_term(f.left)} =_{f.modulus}= {_print_term(f.right)}"
    if isinstance(f, Conj):
        return " /\\ ".join(_wrap(a) for a in f.args)
    if isinstance(f, Disj):
        return " \\/ ".join(_wrap(a) for a in f.args)
    if isinstance(f, Neg):
        return f"~{_wrap(f.arg)}"
    if isinstance(f, (Exists, Forall)):
        word = "EX" if isinstance(f, Exists) else "ALL"
        return f"{word} {f.var}:{f.sort}. {to_text(f.body)}"
    raise ValueError(f"unknown formula {f!r}")


def _wrap(f: Formula) -> str:
    if isinstance(f, ATOMS):
        return to_text(f)
    return f"({to_text(f)})"


# evaluation


@dataclass(frozen=True)
class ZValue:
    """A value-group element; when exact is False only value <= true value is known."""

    value: Union[int, float]
    exact: bool = True


@dataclass(frozen=True)
class EvalContext:
    field: FieldSpec
    assignment: Dict[str, object] = field(default_factory=dict)
    vf_window: Tuple[int, int] = (-2, 4)
    digit_depth: int = 3
    z_window: Tuple[int, int] = (-4, 8)

    def bind(self, name: str, value) -> "EvalContext":
        return replace(self, assignment={**self.assignment, name: value})

    def widened(self) -> "EvalContext":
        lo, hi = self.vf_window
        zlo, zhi = self.z_window
        return replace(self, vf_window=(lo - 1, hi + 1), digit_depth=self.digit_depth + 1, z_window=(zlo - 1, zhi + 1))


def vf_box(ctx: EvalContext) -> Iterator[TruncatedElement]:
    """The exact zero and every w^v (d_0 + ... + d_{m-1} w^{m-1}), d_0 != 0, as exact elements."""
    field_ = ctx.field
    p, m = field_.p, ctx.digit_depth
    pad = [0] * max(settings.precision_cap - m, 0)
    yield field_.zero()
    for v in range(ctx.vf_window[0], ctx.vf_window[1] + 1):
        for index in range(p ** (m - 1) * (p - 1)):
            rest, lead = divmod(index, p - 1)
            digits = [lead + 1]
            for _ in range(m - 1):
                rest, d = divmod(rest, p)
                digits.append(d)
            yield field_.from_digits(v, digits + pad)


def _eval_term(t: Term, sort: str, ctx: EvalContext, sorts: Dict[str, str]):
    """VF -> TruncatedElement, RF -> int or None, Z -> ZValue or None (unknown)."""
    if isinstance(t, Lit):
        if sort == VF:
            return ctx.field.from_int(t.value)
        if sort == RF:
            return t.value % ctx.field.p
        return ZValue(t.value)
    if isinstance(t, Infinity):
        return ZValue(math.inf)
    if isinstance(t, Var):
        value = ctx.assignment[t.name]
        if sort == Z and not isinstance(value, ZValue):
            return ZValue(math.inf if value is None else value)
        return value
    if isinstance(t, Ord):
        x = _eval_term(t.arg, VF, ctx, sorts)
        if x.valuation is None:
            return ZValue(math.inf)
        return ZValue(x.valuation, exact=x.is_nonzero)
    if isinstance(t, Ac):
        x = _eval_term(t.arg, VF, ctx, sorts)
        if x.valuation is None:
            return 0
        if not x.is_nonzero:
            return None
        return x.digits[0]
    if isinstance(t, Sum):
        values = [_eval_term(a, sort, ctx, sorts) for a in t.args]
        if sort == VF:
            total = values[0]
            for v in values[1:]:
                total = total + v
            return total
        if sort == RF:
            return None if any(v is None for v in values) else sum(values) % ctx.field.p
        if any(v is None for v in values):
            return None
        return ZValue(sum(v.value for v in values), all(v.exact for v in values))
    if isinstance(t, Product):
        values = [_eval_term(a, sort, ctx, sorts) for a in t.args]
        if sort == VF:
            total = values[0]
            for v in values[1:]:
                total = total * v
            return total
        if any(v is None for v in values):
            return None
        out = 1
        for v in values:
            out = (out * v) % ctx.field.p
        return out
    raise ValueError(f"unknown term {t!r}")


def _atom_sort(f, ctx: EvalContext, sorts: Dict[str, str]) -> str:
    if not isinstance(f, Equals):
        return Z
    scope: Dict[str, Optional[str]] = dict(sorts)
    return _term_sort(f.left, scope, None) or _term_sort(f.right, scope, None) or VF


def _vf_equal(x: TruncatedElement, y: TruncatedElement) -> Optional[bool]:
    d = x - y
    if d.is_exact_zero:
        return True
    if d.is_nonzero:
        return False
    return None


def _z_compare(kind: str, a: ZValue, b: ZValue, modulus: int = 0) -> Optional[bool]:
    if a is None or b is None:
        return None
    if kind == "ge":
        if a.exact and b.exact:
            return a.value >= b.value
        if b.exact and a.value >= b.value:
            return True
        if a.exact and b.value > a.value:
            return False
        return None
    if kind == "eq":
        if a.exact and b.exact:
            return a.value == b.value
        if (a.exact and b.value > a.value) or (b.exact and a.value > b.value):
            return False
        return None
    if not (a.exact and b.exact):
        return None
    if math.isinf(a.value) or math.isinf(b.value):
        return False
    return (a.value - b.value) % modulus == 0


def _eval(f: Formula, ctx: EvalContext, sorts: Dict[str, str]) -> Optional[bool]:
    if isinstance(f, ATOMS):
        sort = _atom_sort(f, ctx, sorts)
        left = _eval_term(f.left, sort, ctx, sorts)
        right = _eval_term(f.right, sort, ctx, sorts)
        if isinstance(f, Equals):
            if sort == VF:
                return _vf_equal(left, right)
            if sort == RF:
                return None if left is None or right is None else left == right
            return _z_compare("eq", left, right)
        if isinstance(f, AtLeast):
            return _z_compare("ge", left, right)
        return _z_compare("cong", left, right, f.modulus)
    if isinstance(f, Conj):
        unknown = False
        for arg in f.args:
            value = _eval(arg, ctx, sorts)
            if value is False:
                return False
            unknown = unknown or value is None
        return None if unknown else True
    if isinstance(f, Disj):
        unknown = False
        for arg in f.args:
            value = _eval(arg, ctx, sorts)
            if value is True:
                return True
            unknown = unknown or value is None
        return None if unknown else False
    if isinstance(f, Neg):
        value = _eval(f.arg, ctx, sorts)
        return None if value is None else not value
    if isinstance(f, (Exists, Forall)):
        target = isinstance(f, Exists)
        inner_sorts = {**sorts, f.var: f.sort}
        unknown = False
        for value in _range(f.sort, ctx):
            verdict = _eval(f.body, ctx.bind(f.var, value), inner_sorts)
            if verdict is target:
                return target
            unknown = unknown or verdict is None
        return None if unknown else not target
    raise ValueError(f"unknown formula {f!r}")


def _range(sort: str, ctx: EvalContext):
    if sort == VF:
        return vf_box(ctx)
    if sort == RF:
        return range(ctx.field.p)
    return (ZValue(z) for z in range(ctx.z_window[0], ctx.z_window[1] + 1))


def evaluate_three_valued(f: Formula, ctx: EvalContext, sorts: Optional[Dict[str, str]] = None) -> Optional[bool]:
    sorts = free_variables(f, sorts)
    missing = [name for name in sorts if name not in ctx.assignment]
    if missing:
        raise ValueError(f"free variables without assignment: {missing}")
    return _eval(f, ctx, sorts)


def evaluate(f: Formula, ctx: EvalContext, sorts: Optional[Dict[str, str]] = None) -> bool:
    """Truth value over the boxed model; InsufficientPrecision when undecided."""
    value = evaluate_three_valued(f, ctx, sorts)
    if value is None:
        raise InsufficientPrecision("formula value depends on digits the assignment does not carry")
    return value


@dataclass(frozen=True)
class Certificate:
    value: bool
    box_too_small: bool
    box: Dict[str, object]

    def to_json(self) -> dict:
        return {"value": self.value, "box_too_small": self.box_too_small, "box": self.box}


def certify(f: Formula, ctx: EvalContext, sorts: Optional[Dict[str, str]] = None) -> Certificate:
    """Evaluate at the box and one step wider; flag box sensitivity when they differ."""
    value = evaluate(f, ctx, sorts)
    wider = evaluate(f, ctx.widened(), sorts)
    if wider != value:
        logger.warning("formula value changes when the quantifier box is widened: %s", to_text(f))
    box = {"vf_window": list(ctx.vf_window), "digit_depth": ctx.digit_depth, "z_window": list(ctx.z_window)}
    return Certificate(value, wider != value, box)


def definable_set(
    f: Formula,
    variables: Sequence[str],
    ctx: EvalContext,
    sorts: Optional[Dict[str, str]] = None,
) -> Callable[[Sequence[TruncatedElement]], Optional[bool]]:
    """A three-valued membership predicate on tuples of VF values for the free variables."""
    pinned = {name: VF for name in variables}
    pinned.update(sorts or {})
    free = free_variables(f, pinned)
    unknown = [name for name in free if name not in variables and name not in ctx.assignment]
    if unknown:
        raise ValueError(f"free variables not listed or assigned: {unknown}")

    def predicate(point: Sequence[TruncatedElement]) -> Optional[bool]:
        local = ctx
        for name, value in zip(variables, point):
            local = local.bind(name, value)
        return _eval(f, local, free)

    return predicate


def lattice_formula(shifts: Sequence[Tuple[str, int]], variables: Sequence[str]) -> str:
    """Membership formula ord(c_i) >= shift_i for a Moy-Prasad lattice."""
    atoms = []
    for (name, shift), var in zip(shifts, variables):
        if shift >= 0:
            atoms.append(f"ord({var}) >= {shift}")
        else:
            atoms.append(f"ord({var}) + {-shift} >= 0")
    return " /\\ ".join(atoms)
