"""
padicbench - p-adic harmonic analysis workbench

Command-line entry point: validates a JSON job spec, runs the requested verb
over every listed field and writes a JSON report.

    python -m padicbench.main mu-hat --spec jobs/mu_hat_h.json
    python -m padicbench.main run --spec jobs/transfer_eta.json --workers 1
    python -m padicbench.main schemas --out schemas/
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional

from padicbench.config import settings
from padicbench.errors import SpecValidationError, WorkbenchError
from padicbench.runner import Workbench, load_spec, render
from padicbench.schemas import Verb
from padicbench.verbs import formulas, harmonic, integrals, structure

logging.basicConfig(
    level=getattr(logging, settings.log_level),
    format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    stream=sys.stderr,
)
logger = logging.getLogger(__name__)


def create_workbench(workers: Optional[int] = None) -> Workbench:
    workbench = Workbench(workers)
    workbench.include_router(structure.router)
    workbench.include_router(formulas.router)
    workbench.include_router(integrals.router)
    workbench.include_router(harmonic.router)
    return workbench


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="padicbench", description=__doc__.strip().splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    for name in ["run"] + [verb.value for verb in Verb]:
        cmd = sub.add_parser(name, help="run a job spec" if name == "run" else f"run a {name} job")
        cmd.add_argument("--spec", required=True, help="job spec (JSON)")
        cmd.add_argument("--workers", type=int, default=None, help="worker threads (default PADICBENCH_WORKERS)")
        cmd.add_argument("--output", default=None, help="report path (overrides the job spec's output)")

    schemas = sub.add_parser("schemas", help="write the JSON Schemas of specs, requests and reports")
    schemas.add_argument("--out", required=True, help="output directory")
    return parser


def _emit_error(exc: WorkbenchError) -> int:
    print(json.dumps(exc.to_dict(), indent=settings.report_indent))
    return exc.exit_code


def run_command(args: argparse.Namespace) -> int:
    workbench = create_workbench(args.workers)
    data = load_spec(args.spec)
    if args.command != "run":
        if isinstance(data, dict) and "computation" not in data:
            data["computation"] = args.command
        elif isinstance(data, dict) and data["computation"] != args.command:
            raise SpecValidationError(
                f"spec computation {data['computation']!r} does not match verb {args.command!r}", "/computation"
            )
    spec = workbench.validate(data)
    logger.info("job %s over %s", spec.computation.value, ", ".join(f"{f.p}/{f.char.value}" for f in spec.fields))
    report = workbench.run(spec)
    text = render(report)
    output = args.output or spec.output
    if output:
        path = Path(output)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text + "\n", encoding="utf-8")
        logger.info("report written to %s", output)
    else:
        print(text)
    return report.exit_code


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "schemas":
            create_workbench().publish_schemas(args.out)
            return 0
        return run_command(args)
    except WorkbenchError as exc:
        logger.warning("job rejected: %s", exc.detail)
        return _emit_error(exc)
    except Exception as exc:
        logger.error(f"Unhandled exception: {exc}", exc_info=True)
        print(json.dumps({"detail": "An internal error occurred."}, indent=settings.report_indent))
        return 4


if __name__ == "__main__":
    sys.exit(main())
