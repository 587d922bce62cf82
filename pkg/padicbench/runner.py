"""
Job orchestration.

A job runs one verb over every listed field. Cells (one per field) are
dispatched to a thread pool and gathered in field order, so the report does
not depend on the number of workers. Failures are captured per cell with the
exit code of their error class; the job exit code is that of the first
failing cell.
"""

import asyncio
import json
import logging
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

from pydantic import BaseModel, ValidationError

from padicbench.config import settings
from padicbench.errors import SpecValidationError, WorkbenchError
from padicbench.routing import VerbRoute, VerbRouter, VerbTable
from padicbench.schemas import (
    CellReport,
    CellStatus,
    Disagreement,
    ErrorModel,
    FieldSpecModel,
    JobReport,
    JobSpec,
    TransferCheckRequest,
    TransferReport,
    Verb,
)

logger = logging.getLogger(__name__)

INVALID_INPUT_EXIT = 1
DISAGREEMENT_EXIT = 2
INTERNAL_ERROR_EXIT = 4


def _pointer(loc: Tuple[Union[str, int], ...], prefix: str = "") -> str:
    return prefix + "".join(f"/{part}" for part in loc)


def _spec_error(exc: ValidationError, locate) -> SpecValidationError:
    first = exc.errors()[0]
    pointer = locate(tuple(first["loc"]))
    return SpecValidationError(f"{first['msg']} at {pointer or '/'}", pointer)


def _field_free(value: Any) -> Any:
    """Drop the characteristic flag from serialized elements so reports compare across fields."""
    if isinstance(value, dict):
        return {k: _field_free(v) for k, v in value.items() if k != "char"}
    if isinstance(value, list):
        return [_field_free(v) for v in value]
    return value


class Workbench:
    """The verb table plus the job runner."""

    def __init__(self, workers: Optional[int] = None):
        self.verbs = VerbTable()
        self.workers = workers or settings.workers

    def include_router(self, router: VerbRouter) -> None:
        self.verbs.include_router(router)

    # validation

    def validate(self, data: Dict[str, Any]) -> JobSpec:
        try:
            return JobSpec.model_validate(data)
        except ValidationError as exc:
            raise _spec_error(exc, lambda loc: _pointer(loc)) from exc

    def _route(self, verb: Verb) -> VerbRoute:
        route = self.verbs.get(verb)
        if route is None:
            raise SpecValidationError(f"verb {verb.value} is not available", "/computation")
        return route

    def _request(self, route: VerbRoute, inputs: Dict[str, Any], parameters: Dict[str, Any], base: str) -> BaseModel:
        merged = {**inputs, **parameters}

        def locate(loc):
            if not loc:
                return base or ""
            if loc[0] in parameters:
                return _pointer(loc, "/parameters")
            return _pointer(loc, f"{base}/inputs")

        try:
            return route.request_model.model_validate(merged)
        except ValidationError as exc:
            raise _spec_error(exc, locate) from exc

    # cells

    def _run_cell(self, route: VerbRoute, field_model: FieldSpecModel, request: BaseModel) -> CellReport:
        field = field_model.to_field()
        logger.info("running %s over %s", route.verb.value, field.name())
        try:
            outputs, certificates = route.handler(field, request)
        except WorkbenchError as exc:
            logger.warning("%s over %s failed: %s", route.verb.value, field.name(), exc.detail)
            error = ErrorModel(
                error=type(exc).__name__,
                detail=exc.detail,
                exit_code=exc.exit_code,
                pointer=getattr(exc, "pointer", None),
            )
            return CellReport(field=field_model, status=CellStatus.FAILED, error=error)
        except ValueError as exc:
            logger.warning("%s over %s rejected its input: %s", route.verb.value, field.name(), exc)
            error = ErrorModel(error="InvalidInput", detail=str(exc), exit_code=INVALID_INPUT_EXIT)
            return CellReport(field=field_model, status=CellStatus.FAILED, error=error)
        except Exception as exc:
            logger.error(f"Unhandled exception in {route.verb.value}: {exc}", exc_info=True)
            error = ErrorModel(
                error="InternalError",
                detail="An internal error occurred. Rerun with PADICBENCH_LOG_LEVEL=DEBUG for details.",
                exit_code=INTERNAL_ERROR_EXIT,
            )
            return CellReport(field=field_model, status=CellStatus.FAILED, error=error)
        logger.info("finished %s over %s", route.verb.value, field.name())
        return CellReport(
            field=field_model,
            status=CellStatus.OK,
            outputs=json.loads(json.dumps(outputs, default=str)),
            certificates=json.loads(json.dumps(certificates, default=str)),
        )

    async def _run_cells(
        self, route: VerbRoute, fields: List[FieldSpecModel], request: BaseModel
    ) -> List[CellReport]:
        loop = asyncio.get_running_loop()
        with ThreadPoolExecutor(max_workers=self.workers) as pool:
            tasks = [loop.run_in_executor(pool, self._run_cell, route, f, request) for f in fields]
            return list(await asyncio.gather(*tasks))

    @staticmethod
    def _exit_code(cells: List[CellReport]) -> int:
        failed = next((cell for cell in cells if cell.status == CellStatus.FAILED), None)
        return failed.error.exit_code if failed is not None else 0

    # jobs

    async def run_async(self, spec: JobSpec) -> Union[JobReport, TransferReport]:
        if spec.computation == Verb.TRANSFER_CHECK:
            return await self.transfer_compare(spec)
        route = self._route(spec.computation)
        request = self._request(route, spec.inputs, spec.parameters, "")
        cells = await self._run_cells(route, spec.fields, request)
        return JobReport(computation=spec.computation, exit_code=self._exit_code(cells), cells=cells)

    def run(self, spec: JobSpec) -> Union[JobReport, TransferReport]:
        return asyncio.run(self.run_async(spec))

    async def transfer_compare(self, spec: JobSpec) -> TransferReport:
        """
        Run the inner computation over every field and compare each output
        across the successful cells; a disagreement dumps every trace.
        """
        try:
            check = TransferCheckRequest.model_validate(spec.inputs)
        except ValidationError as exc:
            raise _spec_error(exc, lambda loc: _pointer(loc, "/inputs")) from exc
        route = self._route(check.computation)
        request = self._request(route, check.inputs, spec.parameters, "/inputs")
        cells = await self._run_cells(route, spec.fields, request)
        ok = [cell for cell in cells if cell.status == CellStatus.OK]
        failed = [cell for cell in cells if cell.status == CellStatus.FAILED]

        keys = sorted({key for cell in ok for key in cell.outputs})
        verdicts: Dict[str, bool] = {}
        disagreements: List[Disagreement] = []
        for key in keys:
            values = [_field_free(cell.outputs.get(key)) for cell in ok]
            same = all(key in cell.outputs for cell in ok) and all(v == values[0] for v in values)
            verdicts[key] = same
            if not same:
                logger.warning("transfer disagreement on output %s", key)
                disagreements.append(
                    Disagreement(
                        output=key,
                        fields=[cell.field for cell in ok],
                        traces=[cell.model_dump(mode="json") for cell in ok],
                    )
                )
        agree = len(ok) >= 2 and all(verdicts.values())
        if failed:
            exit_code = self._exit_code(cells)
        elif not agree:
            exit_code = DISAGREEMENT_EXIT
        else:
            exit_code = 0
        return TransferReport(
            computation=Verb.TRANSFER_CHECK,
            inner=check.computation,
            exit_code=exit_code,
            verdicts=verdicts,
            agree=agree,
            compared_fields=[cell.field for cell in ok],
            failed_cells=failed,
            disagreements=disagreements,
        )

    # reports

    def publish_schemas(self, out_dir: Union[str, Path]) -> List[Path]:
        """Write the JSON Schemas of job specs, verb requests and reports."""
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        models = {"job-spec": JobSpec, "job-report": JobReport, "transfer-report": TransferReport}
        for route in self.verbs:
            models[f"{route.verb.value}-request"] = route.request_model
        models["transfer-check-request"] = TransferCheckRequest
        written = []
        for name, model in sorted(models.items()):
            path = out / f"{name}.schema.json"
            path.write_text(json.dumps(model.model_json_schema(), indent=settings.report_indent) + "\n")
            written.append(path)
        logger.info("wrote %d schemas to %s", len(written), out)
        return written


def render(report: BaseModel) -> str:
    return report.model_dump_json(indent=settings.report_indent)


def load_spec(path: Union[str, Path]) -> Dict[str, Any]:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SpecValidationError(f"job file is not valid JSON: {exc.msg} (line {exc.lineno})", "") from exc
