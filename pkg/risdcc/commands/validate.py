"""
validate: check a geometry against the physical constraints
"""

import argparse
from typing import IO

from risdcc.commands.common import common_options, load_config, open_output
from risdcc.core.errors import ConstraintViolation
from risdcc.core.experiment import build_stack, requires_expansion
from risdcc.core.geometry import ValidationReport, encoding_latency_s, stack_digest, validate_stack
from risdcc.log import logger
from risdcc.models import ExperimentConfig, ValidationResponse, ViolationModel


def register(subparsers):
    parser = subparsers.add_parser("validate", parents=[common_options], help="check geometry constraints")
    parser.add_argument("--format", choices=("text", "json"), default="text")
    parser.set_defaults(handler=run)


def execute(config: ExperimentConfig, stream: IO[str], fmt: str = "text") -> ValidationResponse:
    try:
        stack = build_stack(config)
    except ConstraintViolation as e:
        if e.report is None:
            raise
        stack, report = None, e.report
    else:
        report = validate_stack(stack, requires_expansion(config))

    response = _response(stack, report)
    if fmt == "json":
        stream.write(response.model_dump_json(indent=2) + "\n")
    elif report.ok:
        stream.write("ok\n")
    else:
        stream.write(report.to_text())
    return response


def _response(stack, report: ValidationReport) -> ValidationResponse:
    violations = [ViolationModel(constraint=v.constraint, detail=v.detail, value=v.value) for v in report.violations]
    if stack is None:
        return ValidationResponse(ok=False, geometry_digest="none", input_dim=0, output_dim=0,
                                  separation_wavelengths=0.0, encoding_latency_s=0.0, violations=violations)
    return ValidationResponse(
        ok=report.ok,
        geometry_digest=stack_digest(stack),
        input_dim=stack.input_dim,
        output_dim=stack.output_dim,
        separation_wavelengths=stack.separation_m / stack.wavelength_m,
        encoding_latency_s=encoding_latency_s(stack),
        violations=violations,
    )


def run(args: argparse.Namespace) -> int:
    config = load_config(args)
    with open_output(config.output) as stream:
        response = execute(config, stream, args.format)
    if response.ok:
        logger.info(f"✓ geometry {response.geometry_digest} satisfies every constraint")
        return 0
    logger.warning(f"geometry violates {len(response.violations)} constraint(s)")
    return ConstraintViolation.exit_code
