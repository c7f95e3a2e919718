"""
Command-line front end: load documents, run checks and the pipeline, emit reports
"""
import argparse
import sys
import uuid
from pathlib import Path
from typing import Callable, List, Optional, Sequence

from pydantic import ValidationError

from .complexes import homology, semi_euler, validate
from .config import LabSettings, get_settings
from .documents import dump_document, load_objects, objects_to_document, write_text
from .exceptions import (
    EXIT_INTERNAL, CharTwo, ConfigurationError, MissingPairing, PsiParityError, UsageError
)
from .lab import (
    GenParams, counterexample_demo, default_points, fiber_scan, gen_complex, gen_special
)
from .logging import configure_logging, logger, run_id_var
from .models import error_response
from .pairings import (
    check_chain, check_perfection_on_cohomology, check_symmetry, perfection_at_point,
    symmetry_kind, transport
)
from .reports import (
    FORMATS, render_counterexample, render_fiber_report, render_homology, render_pipeline
)
from .specialization import lemma3_specialize, normalize_at_point, theorem2_pipeline


class ToolkitArgumentParser(argparse.ArgumentParser):
    """Usage errors raise instead of exiting, so they share the error line format"""

    def error(self, message: str) -> None:  # type: ignore[override]
        raise UsageError(message)


def _emit(text: str, out: Optional[Path]) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        write_text(out, text)
        logger.info("Output written", path=str(out), size=len(text))


def _format(args: argparse.Namespace, settings: LabSettings) -> str:
    return args.format or settings.report_format


# Commands

def cmd_check(args: argparse.Namespace, settings: LabSettings) -> int:
    """Verify every structure the document declares; the first failure wins"""
    _, C, P = load_objects(args.input)
    validate(C)
    lines = [f"complex: ok (ranks {' '.join(map(str, C.ranks))})"]
    if P is not None:
        if not C.ring.field.two_is_unit:
            raise CharTwo("symmetry check")
        check_chain(P)
        lines.append("pairing chain condition: ok")
        check_symmetry(P)
        lines.append(f"pairing symmetry: ok ({symmetry_kind(P.n)}, m={P.m})")
        check_perfection_on_cohomology(P, C.ring.base_point)
        lines.append(f"perfect on cohomology at s0 = {C.ring.base_point_label}: ok")
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def cmd_homology(args: argparse.Namespace, settings: LabSettings) -> int:
    _, C, _ = load_objects(args.input)
    validate(C)
    _emit(render_homology(homology(C), _format(args, settings)), args.out)
    return 0


def cmd_psi(args: argparse.Namespace, settings: LabSettings) -> int:
    _, C, _ = load_objects(args.input)
    validate(C)
    point = C.ring.point(args.point) if args.point is not None else C.ring.base_point
    _emit(f"{semi_euler(C, point)}\n", args.out)
    return 0


def cmd_normalize(args: argparse.Namespace, settings: LabSettings) -> int:
    document, C, P = load_objects(args.input)
    result = normalize_at_point(C)
    Q = transport(P, result.to_original) if P is not None else None
    name = document.metadata.name if document.metadata else None
    seed = document.metadata.seed if document.metadata else None
    _emit(dump_document(objects_to_document(result.minimal, Q, name=name, seed=seed)), args.out)
    return 0


def cmd_specialize(args: argparse.Namespace, settings: LabSettings) -> int:
    _, C, P = load_objects(args.input)
    if P is None:
        raise MissingPairing("specialize")
    special, _ = lemma3_specialize(C, P)
    _emit(dump_document(objects_to_document(special.full(), special.pairing())), args.out)
    return 0


def cmd_pipeline(args: argparse.Namespace, settings: LabSettings) -> int:
    _, C, P = load_objects(args.input)
    fmt = _format(args, settings)
    if P is None:
        if not args.force_scan:
            raise MissingPairing("pipeline")
        logger.warning("Document has no pairing; running the fiber scan only", input=str(args.input))
        validate(C)
        report = fiber_scan(C, default_points(C, args.samples, args.seed), settings.max_workers)
        _emit(render_fiber_report(report, fmt), args.out)
        return 0

    points = default_points(C, args.samples, args.seed, extra=P.components)
    outcome = theorem2_pipeline(C, P, points, settings.max_workers)
    fiber = fiber_scan(C, points, settings.max_workers)
    _emit(render_pipeline(outcome.report, fiber, fmt), args.out)
    return 0


def cmd_scan(args: argparse.Namespace, settings: LabSettings) -> int:
    _, C, _ = load_objects(args.input)
    validate(C)
    report = fiber_scan(C, default_points(C, args.samples, args.seed), settings.max_workers)
    _emit(render_fiber_report(report, _format(args, settings)), args.out)
    return 0


def cmd_gen(args: argparse.Namespace, settings: LabSettings) -> int:
    """Generate a seeded instance and check it before writing"""
    try:
        params = GenParams.from_settings(
            n=args.n,
            max_rank=args.rank,
            seed=args.seed,
            field=args.field,
            base_point=args.base_point,
            require_nonzero_beta=args.nonzero_beta or None,
        )
    except ValidationError as e:
        raise UsageError(str(e.errors()[0]["msg"])) from e

    if args.complex_only:
        C = gen_complex(params)
        validate(C)
        document = objects_to_document(C, name=f"complex-n{params.n}", seed=params.seed)
    else:
        C, P = gen_special(params)
        validate(C)
        check_chain(P)
        check_symmetry(P)
        perfection_at_point(P, C.ring.base_point)
        document = objects_to_document(C, P, name=f"special-n{params.n}", seed=params.seed)
    _emit(dump_document(document), args.out)
    return 0


def cmd_demo_counterexample(args: argparse.Namespace, settings: LabSettings) -> int:
    samples = settings.samples if args.samples is None else args.samples
    seed = settings.seed if args.seed is None else args.seed
    report = counterexample_demo(samples, seed, settings.max_workers)
    _emit(render_counterexample(report, _format(args, settings)), args.out)
    return 0


# Parser

def build_parser() -> ToolkitArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", type=Path, default=None, help="Write output here instead of stdout")
    common.add_argument("--format", choices=FORMATS, default=None, help="Report format")
    common.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING, ERROR")
    common.add_argument("--log-format", choices=("json", "text"), default=None)

    source = argparse.ArgumentParser(add_help=False)
    source.add_argument("--input", type=Path, required=True, help="Complex document (JSON)")

    sampling = argparse.ArgumentParser(add_help=False)
    sampling.add_argument("--samples", type=int, default=None, help="Random points added to s0")
    sampling.add_argument("--seed", type=int, default=None)

    parser = ToolkitArgumentParser(
        prog="psi-parity",
        description="Exact toolkit for self-dual free complexes and the parity of psi",
    )
    commands = parser.add_subparsers(dest="command", required=True, parser_class=ToolkitArgumentParser)

    def add(name: str, handler: Callable[[argparse.Namespace, LabSettings], int], help_text: str,
            parents: List[argparse.ArgumentParser]) -> argparse.ArgumentParser:
        sub = commands.add_parser(name, help=help_text, parents=parents)
        sub.set_defaults(handler=handler)
        return sub

    add("check", cmd_check, "Verify complex, pairing, symmetry and duality", [common, source])
    add("homology", cmd_homology, "Homology over the local ring", [common, source])
    psi = add("psi", cmd_psi, "Semi-Euler characteristic at a point", [common, source])
    psi.add_argument("--point", default=None, help="Evaluation point, defaults to s0")
    add("normalize", cmd_normalize, "Minimal complex at s0", [common, source])
    add("specialize", cmd_specialize, "Special complex of a minimal self-dual complex", [common, source])
    pipeline = add("pipeline", cmd_pipeline, "Full pipeline with parity report", [common, source, sampling])
    pipeline.add_argument("--force-scan", action="store_true",
                          help="Without a pairing, run the fiber scan alone")
    add("scan", cmd_scan, "Fiber cohomology across sample points", [common, source, sampling])

    gen = add("gen", cmd_gen, "Generate a seeded instance", [common])
    gen.add_argument("--n", type=int, default=None, help="Odd twist n = 2m+1")
    gen.add_argument("--rank", type=int, default=None, help="Rank bound per degree")
    gen.add_argument("--seed", type=int, default=None)
    gen.add_argument("--field", default=None, help="Q or F<p>")
    gen.add_argument("--base-point", default=None)
    gen.add_argument("--nonzero-beta", action="store_true")
    gen.add_argument("--complex-only", action="store_true",
                     help="Random complex without a pairing")

    add("demo-counterexample", cmd_demo_counterexample,
        "Parity jump and failures without the hypotheses", [common, sampling])
    return parser


def _print_error(error: PsiParityError) -> None:
    payload = error_response(error.code, error.message, error.details, run_id_var.get())
    sys.stderr.write(payload.model_dump_json() + "\n")


def main(argv: Optional[Sequence[str]] = None) -> int:
    run_id_var.set(uuid.uuid4().hex[:12])
    try:
        try:
            settings = get_settings()
        except ValidationError as e:
            first = e.errors()[0]
            raise ConfigurationError(".".join(map(str, first["loc"])), first["msg"]) from e
        args = build_parser().parse_args(argv)
        configure_logging(args.log_level or settings.log_level, args.log_format or settings.log_format)
        logger.debug("Command started", command=args.command)
        return args.handler(args, settings)
    except PsiParityError as e:
        logger.debug("Command failed", code=e.code, exit_code=e.exit_code)
        _print_error(e)
        return e.exit_code
    except SystemExit as e:
        # --help
        return int(e.code or 0)
    except Exception as e:
        logger.error("Unexpected error", error=str(e), type=type(e).__name__)
        payload = error_response("INTERNAL_ERROR", f"unexpected {type(e).__name__}: {e}", run_id=run_id_var.get())
        sys.stderr.write(payload.model_dump_json() + "\n")
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
