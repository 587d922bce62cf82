from fractions import Fraction
from itertools import product

import pytest

from padicbench.denefpas import (
    RF,
    VF,
    Z,
    AtLeast,
    Conj,
    Congruent,
    Disj,
    EvalContext,
    Exists,
    Forall,
    certify,
    definable_set,
    evaluate,
    evaluate_three_valued,
    free_variables,
    lattice_formula,
    parse,
    to_text,
    vf_box,
)
from padicbench.errors import FormulaSyntaxError, InsufficientPrecision, SortError
from padicbench.moyprasad import lattice_member, mp_lattice, sl2_model

CORPUS = [
    "EX x:VF. ord(x) >= 2 /\\ ac(x) = 1",
    "ALL n:Z. n =_2= 0 \\/ n =_2= 1",
    "ALL y:RF. y * 0 = 0",
    "x * y + 1 = z",
    "~(ord(x) >= 0) \\/ ac(x) = 3",
    "(EX u:VF. u * u = x) /\\ ~(x = 0)",
    "ord(x) + ord(y) >= 3",
    "ord(x) = INF",
    "ALL m:Z. EX n:Z. n + n = m \\/ n + n = m + 1",
    "~(~(ac(x + y) = ac(x)))",
]

ATOM_TEMPLATES = [
    "ord(x) >= {k}",
    "ac(x) = {k}",
    "ord(x + y) >= ord(x)",
    "ord(x) + {k} >= ord(y)",
    "ord(y) =_{m}= {k}",
    "x * y + {k} = x",
    "ord(x * y) = INF",
]

SHAPES = [
    "{a}",
    "{a} /\\ {b}",
    "{a} \\/ {b}",
    "~({a})",
    "~({a} /\\ {b}) \\/ {a}",
    "EX u:VF. ord(u) >= {k} /\\ ({a})",
    "ALL n:Z. n =_{m}= {k} \\/ ({a})",
    "(EX r:RF. ac(x) = r) /\\ ~({b})",
]


def generated_corpus(count=50):
    """Formulas over the free VF variables x, y; distinct for count <= 56."""
    out = []
    for i in range(count):
        k, m = i % 4, 2 + i % 3
        a = ATOM_TEMPLATES[i % len(ATOM_TEMPLATES)].format(k=k, m=m)
        b = ATOM_TEMPLATES[(3 * i + 1) % len(ATOM_TEMPLATES)].format(k=(k + 1) % 4, m=m)
        out.append(SHAPES[i % len(SHAPES)].format(a=a, b=b, k=k, m=m))
    return out


def test_parse_existential():
    formula = parse("EX x:VF. ord(x) >= 2 /\\ ac(x) = 1")
    assert isinstance(formula, Exists)
    assert formula.sort == VF
    assert isinstance(formula.body, Conj)
    assert isinstance(formula.body.args[0], AtLeast)


def test_parse_congruences():
    formula = parse("ALL n:Z. n ≡_2 0 \\/ n ≡_2 1")
    assert isinstance(formula, Forall)
    assert isinstance(formula.body, Disj)
    assert all(isinstance(arg, Congruent) and arg.modulus == 2 for arg in formula.body.args)


@pytest.mark.parametrize("text", CORPUS + generated_corpus())
def test_printed_formula_parses_back(text):
    formula = parse(text)
    assert parse(to_text(formula)) == formula


def test_printer_uses_ascii_congruence():
    assert to_text(parse("n ≡_3 1", {"n": Z})) == "n =_3= 1"


def test_free_variable_sorts():
    assert free_variables(parse("ord(x) >= k /\\ ac(y) = r")) == {"x": VF, "k": Z, "y": VF, "r": RF}
    assert free_variables(parse("x = y")) == {"x": VF, "y": VF}
    assert free_variables(parse("x = y"), {"x": RF}) == {"x": RF, "y": RF}


def test_product_on_value_group_is_rejected():
    with pytest.raises(SortError):
        parse("ord(x) * 2 >= 0")


def test_conflicting_sorts_are_rejected():
    with pytest.raises(SortError):
        parse("ord(x) >= 0 /\\ ac(x) = x")


def test_syntax_error():
    with pytest.raises(FormulaSyntaxError):
        parse("EX x:VF ord(x) >= 0")


def test_witness_in_box(q5):
    formula = parse("EX x:VF. ord(x) >= 2 /\\ ac(x) = 1")
    ctx = EvalContext(q5, vf_window=(-2, 4), digit_depth=3)
    assert evaluate(formula, ctx)
    certificate = certify(formula, ctx)
    assert certificate.value and not certificate.box_too_small


def test_residue_quantifier(q5):
    assert evaluate(parse("ALL y:RF. y * 0 = 0"), EvalContext(q5))
    assert not evaluate(parse("ALL y:RF. y * y = 1"), EvalContext(q5))


def test_value_group_parity(q3):
    assert evaluate(parse("ALL n:Z. n =_2= 0 \\/ n =_2= 1"), EvalContext(q3))


def test_square_class_of_assigned_element(q5):
    formula = parse("EX u:VF. u * u = x")
    two = EvalContext(q5, {"x": q5.from_int(2)}, vf_window=(0, 1), digit_depth=1)
    assert not evaluate(formula, two)
    # 2 * 2 - 4 cancels through every known digit, so equality stays open
    four = EvalContext(q5, {"x": q5.from_int(4)}, vf_window=(0, 1), digit_depth=1)
    assert evaluate_three_valued(formula, four) is None


def test_missing_assignment(q5):
    with pytest.raises(ValueError):
        evaluate(parse("ord(x) >= 0"), EvalContext(q5))


def test_undecided_value_raises(q5):
    ctx = EvalContext(q5, {"x": q5.bigoh(1)})
    assert evaluate_three_valued(parse("ord(x) >= 2"), ctx) is None
    with pytest.raises(InsufficientPrecision):
        evaluate(parse("ord(x) >= 2"), ctx)
    assert evaluate(parse("ord(x) >= 1"), ctx)


def test_box_contents(q3):
    box = list(vf_box(EvalContext(q3, vf_window=(0, 1), digit_depth=2)))
    assert box[0].is_exact_zero
    assert len(box) == 1 + 2 * (2 * 3)
    assert all(x.is_nonzero for x in box[1:])


@pytest.mark.parametrize("field_name", ["q5", "f5"])
def test_lattice_formula_matches_membership(field_name, request):
    field = request.getfixturevalue(field_name)
    lattice = mp_lattice(sl2_model(), [Fraction(1, 2)], 0)
    variables = ["y0", "y1", "y2"]
    formula = parse(lattice_formula(lattice.shifts, variables))
    for c in (1, 5):
        y = [field.zero(), field.zero(), field.from_int(c)]
        ctx = EvalContext(field, dict(zip(variables, y)))
        assert evaluate(formula, ctx) == lattice_member(y, lattice)
    y = [field.zero(), field.zero(), field.from_int(1)]
    assert not evaluate(formula, EvalContext(field, dict(zip(variables, y))))


def test_lattice_formula_negative_shift():
    assert lattice_formula((("H", -1), ("E", 2)), ["a", "b"]) == "ord(a) + 1 >= 0 /\\ ord(b) >= 2"


def test_definable_set_predicate(q5):
    inside = definable_set(parse("ord(x0) >= 1"), ["x0"], EvalContext(q5))
    assert inside([q5.from_int(5)]) is True
    assert inside([q5.from_int(1)]) is False
    assert inside([q5.bigoh(0)]) is None


def test_definable_set_rejects_unassigned_parameters(q5):
    with pytest.raises(ValueError):
        definable_set(parse("ord(x0) >= k"), ["x0"], EvalContext(q5))


def lattice_samples(field):
    """Zero and units times w^e for -1 <= e <= 3: 11 values per coordinate, 1331 triples."""
    values = [field.zero()]
    for e in range(-1, 4):
        for u in (1, 3):
            values.append(field.from_int(u).scale_by_uniformizer(e))
    return values


@pytest.mark.slow
@pytest.mark.parametrize("field_name", ["q5", "f5"])
@pytest.mark.parametrize(
    "point, r, strict",
    [([Fraction(1, 2)], Fraction(0), False), ([Fraction(0)], Fraction(1, 2), True), ([Fraction(1, 2)], Fraction(-1), False)],
)
def test_lattice_formula_agrees_on_sampled_elements(field_name, point, r, strict, request):
    field = request.getfixturevalue(field_name)
    lattice = mp_lattice(sl2_model(), point, r, strict)
    variables = ["y0", "y1", "y2"]
    formula = parse(lattice_formula(lattice.shifts, variables))
    values = lattice_samples(field)
    checked = 0
    for y in product(values, repeat=3):
        ctx = EvalContext(field, dict(zip(variables, y)))
        assert evaluate(formula, ctx) == lattice_member(list(y), lattice)
        checked += 1
    assert checked == 11**3
