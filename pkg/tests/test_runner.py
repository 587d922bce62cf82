import json
from fractions import Fraction
from pathlib import Path

import jsonschema
import pytest

from padicbench.cyclotomic import CycValue
from padicbench.errors import SpecValidationError
from padicbench.main import create_workbench, main
from padicbench.runner import render
from padicbench.schemas import CellStatus, Verb

E = {"b": {"val": 0, "digits": [1]}}
H = {"a": {"val": 0, "digits": [1]}}

SCHEMA_DIR = Path(__file__).resolve().parent.parent / "schemas"


@pytest.fixture
def workbench():
    return create_workbench(workers=2)


def test_malformed_field_points_at_p(workbench):
    with pytest.raises(SpecValidationError) as info:
        workbench.validate({"computation": "roots", "fields": [{"p": 6}]})
    assert info.value.pointer == "/fields/0/p"
    assert info.value.exit_code == 1


def test_unknown_verb_is_rejected(workbench):
    with pytest.raises(SpecValidationError) as info:
        workbench.validate({"computation": "summon", "fields": [{"p": 5}]})
    assert info.value.pointer == "/computation"


def test_missing_input_points_into_inputs(workbench):
    spec = workbench.validate({"computation": "eta", "fields": [{"p": 5}], "inputs": {"y": H}})
    with pytest.raises(SpecValidationError) as info:
        workbench.run(spec)
    assert info.value.pointer == "/inputs/x"


def test_bad_parameter_points_into_parameters(workbench):
    spec = workbench.validate(
        {"computation": "eta", "fields": [{"p": 5}], "inputs": {"x": E, "y": H}, "parameters": {"m": 9}}
    )
    with pytest.raises(SpecValidationError) as info:
        workbench.run(spec)
    assert info.value.pointer == "/parameters/m"


def test_optimal_points_job(workbench):
    spec = workbench.validate({"computation": "optimal-points", "fields": [{"p": 5}], "inputs": {"cartan": [[2]]}})
    report = workbench.run(spec)
    assert report.exit_code == 0
    assert report.cells[0].outputs["points"] == [["0"], ["1/2"], ["1"]]


def test_integrate_job(workbench):
    spec = workbench.validate(
        {"computation": "integrate", "fields": [{"p": 5}], "inputs": {"dimension": 1, "lo": [1]}}
    )
    report = workbench.run(spec)
    assert report.cells[0].outputs["value"] == CycValue.rational(Fraction(1, 5)).to_json()


def test_eval_formula_job(workbench):
    spec = workbench.validate(
        {"computation": "eval-formula", "fields": [{"p": 5}], "inputs": {"formula": "ALL y:RF. y * 0 = 0"}}
    )
    outputs = workbench.run(spec).cells[0].outputs
    assert outputs["value"] is True
    assert outputs["box_too_small"] is False


def test_failing_cell_carries_its_exit_code(workbench):
    spec = workbench.validate(
        {"computation": "mu-hat", "fields": [{"p": 5}], "inputs": {"x": H, "y": E}}
    )
    report = workbench.run(spec)
    cell = report.cells[0]
    assert cell.status == CellStatus.FAILED
    assert cell.error.error == "NotRegular"
    assert report.exit_code == cell.error.exit_code


@pytest.mark.asyncio
async def test_transfer_check_of_eta(workbench):
    spec = workbench.validate(
        {
            "computation": "transfer-check",
            "fields": [{"p": 5}, {"p": 5, "char": "pos"}],
            "inputs": {"computation": "eta", "inputs": {"x": E, "y": H}},
        }
    )
    report = await workbench.run_async(spec)
    assert report.inner == Verb.ETA
    assert report.agree
    assert report.verdicts == {"value": True}
    assert report.exit_code == 0
    assert not report.disagreements


def transfer_spec(inner, inputs, parameters=None):
    return {
        "computation": "transfer-check",
        "fields": [{"p": 5}, {"p": 5, "char": "pos"}],
        "inputs": {"computation": inner, "inputs": inputs},
        "parameters": parameters or {},
    }


@pytest.mark.asyncio
async def test_transfer_check_of_mp_lattice(workbench):
    member = [[{"val": 0, "digits": [1]}, {}], [{}, {"val": 0, "digits": [1], "negate": True}]]
    outsider = [[{}, {}], [{"val": 0, "digits": [1]}, {}]]
    unipotent = [[{"val": 0, "digits": [1]}, {"val": 1, "digits": [1]}], [{}, {"val": 0, "digits": [1]}]]
    spec = workbench.validate(
        transfer_spec(
            "mp-lattice",
            {"point": ["1/2"], "members": [member, outsider], "group": [unipotent]},
            {"r": "1"},
        )
    )
    report = await workbench.run_async(spec)
    assert report.inner == Verb.MP_LATTICE
    assert report.agree
    assert report.exit_code == 0
    assert set(report.verdicts) == {"lattice", "dual", "volume", "formula", "members", "group_members"}
    assert all(report.verdicts.values())


@pytest.mark.asyncio
async def test_transfer_check_of_fourier_check(workbench):
    spec = workbench.validate(transfer_spec("fourier-check", {"points": [H]}))
    report = await workbench.run_async(spec)
    assert report.inner == Verb.FOURIER_CHECK
    assert report.agree
    assert report.exit_code == 0
    assert set(report.verdicts) == {"unit-lattice", "deep-lattice", "wide-lattice", "coset-H", "twisted-E"}
    assert not report.disagreements


@pytest.mark.slow
@pytest.mark.asyncio
async def test_transfer_check_of_mu_hat(workbench):
    spec = workbench.validate(transfer_spec("mu-hat", {"x": H, "y": H}, {"route": "both", "max_window": 0}))
    report = await workbench.run_async(spec)
    assert report.inner == Verb.MU_HAT
    assert report.agree
    assert report.exit_code == 0
    assert report.verdicts == {"direct": True, "huntsinger": True, "agree": True}
    assert not report.failed_cells


def test_transfer_check_needs_shared_prime(workbench):
    with pytest.raises(SpecValidationError):
        workbench.validate(
            {
                "computation": "transfer-check",
                "fields": [{"p": 5}, {"p": 7, "char": "pos"}],
                "inputs": {"computation": "eta", "inputs": {"x": E, "y": H}},
            }
        )


@pytest.mark.asyncio
async def test_report_does_not_depend_on_workers():
    data = {
        "computation": "eta",
        "fields": [{"p": 5}, {"p": 5, "char": "pos"}, {"p": 7}],
        "inputs": {"x": E, "y": H},
    }
    reports = []
    for workers in (1, 3):
        workbench = create_workbench(workers)
        reports.append(render(await workbench.run_async(workbench.validate(data))))
    assert reports[0] == reports[1]


def test_published_schemas(tmp_path):
    assert main(["schemas", "--out", str(tmp_path)]) == 0
    names = {path.name for path in tmp_path.iterdir()}
    assert "job-spec.schema.json" in names
    assert "mu-hat-request.schema.json" in names
    schema = json.loads((tmp_path / "job-spec.schema.json").read_text())
    assert "computation" in schema["properties"]


def schema_outline(schema):
    """Title, type, property names, required keys and enum values, recursively through $defs."""
    outline = {
        "title": schema.get("title"),
        "type": schema.get("type"),
        "properties": list(schema.get("properties", {})),
        "required": schema.get("required", []),
        "enum": schema.get("enum"),
    }
    if "$defs" in schema:
        outline["$defs"] = {name: schema_outline(d) for name, d in schema["$defs"].items()}
    return outline


def test_committed_schemas_match_published(workbench, tmp_path):
    written = workbench.publish_schemas(tmp_path)
    assert sorted(path.name for path in written) == sorted(path.name for path in SCHEMA_DIR.glob("*.schema.json"))
    for path in written:
        published = json.loads(path.read_text())
        committed = json.loads((SCHEMA_DIR / path.name).read_text())
        assert schema_outline(published) == schema_outline(committed), path.name


def test_rendered_job_report_validates_against_schema(workbench):
    schema = json.loads((SCHEMA_DIR / "job-report.schema.json").read_text())
    jobs = [
        {"computation": "optimal-points", "fields": [{"p": 5}], "inputs": {"cartan": [[2]]}},
        {"computation": "mu-hat", "fields": [{"p": 5}, {"p": 5, "char": "pos"}], "inputs": {"x": H, "y": E}},
    ]
    for data in jobs:
        report = workbench.run(workbench.validate(data))
        jsonschema.validate(instance=json.loads(render(report)), schema=schema)


def test_rendered_job_report_with_wrong_exit_code_type_is_rejected(workbench):
    schema = json.loads((SCHEMA_DIR / "job-report.schema.json").read_text())
    report = workbench.run(
        workbench.validate({"computation": "optimal-points", "fields": [{"p": 5}], "inputs": {"cartan": [[2]]}})
    )
    document = json.loads(render(report))
    document["exit_code"] = "zero"
    with pytest.raises(jsonschema.ValidationError):
        jsonschema.validate(instance=document, schema=schema)


@pytest.mark.asyncio
async def test_rendered_transfer_report_validates_against_schema(workbench):
    schema = json.loads((SCHEMA_DIR / "transfer-report.schema.json").read_text())
    spec = workbench.validate(transfer_spec("eta", {"x": E, "y": H}))
    report = await workbench.run_async(spec)
    jsonschema.validate(instance=json.loads(render(report)), schema=schema)


def test_main_runs_spec_file(tmp_path):
    spec = tmp_path / "job.json"
    out = tmp_path / "report.json"
    spec.write_text(json.dumps({"fields": [{"p": 5}], "inputs": {"cartan": [[2]]}}))
    assert main(["optimal-points", "--spec", str(spec), "--output", str(out)]) == 0
    report = json.loads(out.read_text())
    assert report["cells"][0]["outputs"]["points"] == [["0"], ["1/2"], ["1"]]


def test_main_rejects_mismatched_verb(tmp_path, capsys):
    spec = tmp_path / "job.json"
    spec.write_text(json.dumps({"computation": "roots", "fields": [{"p": 5}], "inputs": {"cartan": [[2]]}}))
    assert main(["eta", "--spec", str(spec)]) == 1
    assert json.loads(capsys.readouterr().out)["pointer"] == "/computation"


def test_main_rejects_invalid_json(tmp_path):
    spec = tmp_path / "job.json"
    spec.write_text("{not json")
    assert main(["run", "--spec", str(spec)]) == 1
