"""
tangents subcommands: tangent analysis of sampled sets and builtin clouds
"""

import argparse
from typing import Optional

import pandas as pd

from frenet_kit.cli.common import EXIT_OK, read_model, write_csv, write_model
from frenet_kit.core.config import TangentSettings, settings
from frenet_kit.core.logging import get_logger
from frenet_kit.core.utils import (
    formula_to_schema,
    ratio_table_to_schema,
    sampled_set_from_schema,
    sampled_set_to_schema,
    tangent_report_to_schema,
)
from frenet_kit.models.tangent import (
    OutgoingReport,
    SampledSet,
    TangentRecord,
    TangentReport,
    Verdict,
)
from frenet_kit.models.witness import RatioTable
from frenet_kit.schemas.tangent import SampledSetFile
from frenet_kit.schemas.witness import WitnessReport
from frenet_kit.services.pl_witness import build_witness, ratio_table
from frenet_kit.services.sample_clouds import CloudKind, sample_cloud
from frenet_kit.services.tangent_analysis import analyze

logger = get_logger(__name__)


def register(subparsers) -> None:
    tangents = subparsers.add_parser("tangents", help="Tangent analysis of sampled sets")
    commands = tangents.add_subparsers(dest="tangents_command", required=True)

    run = commands.add_parser("analyze", help="Detect tangents and test them for outgoingness")
    run.add_argument("--input", required=True, help="SampledSet JSON")
    run.add_argument("--out", help="Report JSON (stdout if omitted)")
    run.add_argument("--witness", help="Build a witness pair and write its ratio table CSV here")
    run.add_argument("--witness-out", help="Witness formulas and table as JSON")
    run.add_argument("--mem-tol", type=float, help="Absolute flag membership tolerance")
    run.add_argument("--min-tail", type=int, help="Determining points required in the test ball")
    run.add_argument("--cluster-angle", type=float, help="Angular cluster threshold (rad)")
    run.add_argument("--scales", type=float, nargs="+", help="Explicit flag scales")
    run.set_defaults(handler=cmd_tangents)

    cloud = commands.add_parser("sample-cloud", help="Write a builtin sampled set")
    cloud.add_argument("--kind", required=True, choices=[k.value for k in CloudKind])
    cloud.add_argument("--count", type=int, help="Samples per accumulating branch")
    cloud.add_argument("--out", help="SampledSet JSON (stdout if omitted)")
    cloud.set_defaults(handler=cmd_sample_cloud)


def tangent_settings(args: argparse.Namespace) -> TangentSettings:
    """settings.tangent with the command-line overrides applied and validated"""
    overrides = {
        "mem_tol": args.mem_tol,
        "min_tail": args.min_tail,
        "cluster_angle": args.cluster_angle,
        "scales": args.scales,
    }
    merged = settings.tangent.model_dump()
    merged.update({k: v for k, v in overrides.items() if v is not None})
    return TangentSettings(**merged)


def witness_candidate(report: TangentReport) -> Optional[tuple[TangentRecord, OutgoingReport]]:
    """First tangent (or prefix tangent) tested outgoing, else the first record"""
    first = None
    for analysis in report.analyses:
        for rec, out, prefix_reports in zip(
            analysis.records, analysis.reports, analysis.prefix_reports
        ):
            first = first or (rec, out)
            if out.verdict is Verdict.YES:
                return rec, out
            for prefix, prefix_out in zip(rec.prefixes(), prefix_reports):
                if prefix_out.verdict is Verdict.YES:
                    return prefix, prefix_out
    return first


def table_frame(table: RatioTable) -> pd.DataFrame:
    return pd.DataFrame(
        {"multiplier": table.multipliers, "value": table.values, "argmax": table.argmax}
    )


def _write_witness(S: SampledSet, report: TangentReport, args, cfg: TangentSettings) -> None:
    candidate = witness_candidate(report)
    if candidate is None:
        logger.warning("No tangent record to build a witness on")
        return
    rec, out = candidate
    f1, f2 = build_witness(rec.base, rec.frame, out.scales)
    table = ratio_table(f1, f2, S, settings.witness.multipliers, cfg.mem_tol)
    logger.info("Witness on a %d-frame: %s", rec.k, table.message)
    if args.witness:
        write_csv(table_frame(table), args.witness)
    if args.witness_out:
        write_model(
            WitnessReport(
                schema_version=settings.app.schema_version,
                f1=formula_to_schema(f1),
                f2=formula_to_schema(f2),
                table=ratio_table_to_schema(table),
            ),
            args.witness_out,
        )


def cmd_tangents(args: argparse.Namespace) -> int:
    """
    Analyze a sampled set and write the tangent report

    Returns:
        Exit code
    """
    S = sampled_set_from_schema(read_model(args.input, SampledSetFile))
    cfg = tangent_settings(args)
    report = analyze(S, cfg)
    write_model(tangent_report_to_schema(report), args.out)
    if args.witness or args.witness_out:
        _write_witness(S, report, args, cfg)
    return EXIT_OK


def cmd_sample_cloud(args: argparse.Namespace) -> int:
    S = sample_cloud(CloudKind(args.kind), args.count)
    logger.info("Builtin %s cloud with %d points", args.kind, len(S))
    write_model(sampled_set_to_schema(S), args.out)
    return EXIT_OK
