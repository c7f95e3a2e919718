"""
Rendering of fiber, pipeline and homology reports as json, csv or text
"""
import csv
import io
import json
from typing import Optional

from .complexes import HomologyProfile
from .models import CounterexampleReport, FiberReport, PipelineReport

FORMATS = ("json", "csv", "text")


def _verdict(flag: bool) -> str:
    return "yes" if flag else "no"


def fiber_csv(report: FiberReport) -> str:
    """Columns: point, h0..hn, psi, parity, jump_flags"""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    degrees = len(report.generic_dims)
    writer.writerow(["point"] + [f"h{i}" for i in range(degrees)] + ["psi", "parity", "jump_flags"])
    for row in report.rows:
        writer.writerow([row.point] + row.dims + [row.psi, row.parity, ";".join(f"h{i}" for i in row.jumps)])
    return buffer.getvalue()


def fiber_text(report: FiberReport) -> str:
    lines = [
        f"field: {report.field}, s0 = {report.base_point}",
        f"generic dims: {' '.join(map(str, report.generic_dims))}",
        f"euler characteristic: {report.euler_characteristic} (constant: {_verdict(report.euler_constant)})",
        "",
        "point\tdims\tpsi\tparity\tjumps",
    ]
    for row in report.rows:
        jumps = ",".join(f"h{i}" for i in row.jumps) or "-"
        lines.append(f"{row.point}\t{' '.join(map(str, row.dims))}\t{row.psi}\t{row.parity}\t{jumps}")
    lines.append("")
    lines.append(f"psi parity constant: {_verdict(report.parity_constant)}")
    return "\n".join(lines) + "\n"


def render_fiber_report(report: FiberReport, fmt: str) -> str:
    if fmt == "json":
        return report.model_dump_json(indent=2) + "\n"
    if fmt == "csv":
        return fiber_csv(report)
    return fiber_text(report)


def pipeline_text(report: PipelineReport, fiber: Optional[FiberReport] = None) -> str:
    lines = [
        f"field: {report.field}, s0 = {report.base_point}",
        f"twist n = {report.n}, m = {report.m} ({report.symmetry_kind})",
        f"input ranks: {' '.join(map(str, report.input_ranks))}",
        f"minimal ranks: {' '.join(map(str, report.minimal_ranks))} (splits {' '.join(map(str, report.split_count))})",
        f"beta: {json.dumps(report.beta)}",
        f"beta exponents: {' '.join(map(str, report.beta_exponents)) or '-'}",
        f"beta alternating: {_verdict(report.beta_skew)}",
        f"composite chain map: {_verdict(report.composite_is_chain_map)}",
    ]
    if report.composite_is_quasi_iso is not None:
        lines.append(f"composite quasi-isomorphism: {_verdict(report.composite_is_quasi_iso)}")
    if report.dropped_points:
        lines.append(f"dropped points (pole after normalization): {' '.join(report.dropped_points)}")
    lines += ["", "point\tpsi\tspecial\tformula\tparity\tdims agree"]
    for check in report.checks:
        lines.append(f"{check.point}\t{check.psi_input}\t{check.psi_special}\t{check.psi_formula}\t"
                     f"{check.parity}\t{_verdict(check.dims_agree)}")
    lines.append("")
    lines.append(f"psi formula matches: {_verdict(report.formula_matches)}")
    if fiber is not None:
        lines += ["", fiber_text(fiber).rstrip("\n")]
    else:
        lines.append(f"psi parity constant: {_verdict(report.parity_constant)}")
    return "\n".join(lines) + "\n"


def render_pipeline(report: PipelineReport, fiber: Optional[FiberReport], fmt: str) -> str:
    if fmt == "json":
        payload = {"pipeline": report.model_dump(mode="json")}
        if fiber is not None:
            payload["fiber"] = fiber.model_dump(mode="json")
        return json.dumps(payload, indent=2) + "\n"
    if fmt == "csv":
        if fiber is None:
            raise ValueError("csv output needs a fiber scan")
        return fiber_csv(fiber)
    return pipeline_text(report, fiber)


def render_homology(profile: HomologyProfile, fmt: str) -> str:
    if fmt == "json":
        payload = [{"degree": i, "free_rank": g.free_rank, "torsion": list(g.torsion)}
                   for i, g in enumerate(profile.groups)]
        return json.dumps(payload, indent=2) + "\n"
    if fmt == "csv":
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["degree", "free_rank", "torsion"])
        for i, g in enumerate(profile.groups):
            writer.writerow([i, g.free_rank, ";".join(map(str, g.torsion))])
        return buffer.getvalue()
    return "\n".join(profile.describe()) + "\n"


def render_counterexample(report: CounterexampleReport, fmt: str) -> str:
    if fmt == "json":
        return report.model_dump_json(indent=2) + "\n"
    if fmt == "csv":
        return fiber_csv(report.fiber)
    lines = [
        "O -pi-> O without a duality:",
        fiber_text(report.fiber).rstrip("\n"),
        "",
        f"symmetrize over F2: {report.char_two_error}",
        f"pipeline on a degenerate pairing: {report.cohomology_error}",
    ]
    return "\n".join(lines) + "\n"
