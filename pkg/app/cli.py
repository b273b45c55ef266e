"""
Command-line front end

    welch solve --p 7 --g 2 --e 1 --c 3
    welch table --p 7 --g 2 --e 1 --format csv
    welch verify --max-modulus 1000

Reports go to stdout and are byte-deterministic for identical requests;
diagnostics and logs go to stderr. Exit status: 0 ok, 1 verification
failure, 2 invalid input.
"""
import argparse
import csv
import io
import json
import sys
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, ValidationError, model_validator

from app.config import settings
from app.errors import CountMismatchError, InvalidInputError, WelchError
from app.services import hensel, padic, welch
from app.services.modring import PrimePowerModulus, is_prime
from app.services.verification import VerificationReport, VerifyConfig, run_verification
from app.utils.logger import get_logger

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_INVALID_INPUT = 2


class Subcommand(str, Enum):
    SOLVE = "solve"
    PAIRS = "pairs"
    VALUE_SET = "value-set"
    TABLE = "table"
    COUNT_C = "count-c"
    TEICHMULLER = "teichmuller"
    LIFT = "lift"
    VERIFY = "verify"


class OutputFormat(str, Enum):
    JSON = "json"
    CSV = "csv"
    TEXT = "text"


# flags each subcommand cannot run without
_REQUIRED = {
    Subcommand.SOLVE: ("c",),
    Subcommand.COUNT_C: ("x",),
    Subcommand.LIFT: ("x0", "c"),
}

# subcommands that read --x-range and --k
_RANGE_FLAGS = {
    Subcommand.SOLVE: ("x_range", "k"),
    Subcommand.TABLE: ("x_range",),
}


class CommandRequest(BaseModel):
    model_config = ConfigDict(frozen=True)

    subcommand: Subcommand
    p: Optional[int] = None
    e: int = 1
    g: Optional[int] = None
    c: Optional[int] = None
    x: Optional[int] = None
    x0: Optional[int] = None
    x_range: Optional[Tuple[int, int]] = None
    k: int = 1
    format: OutputFormat = OutputFormat.JSON
    max_modulus: Optional[int] = None
    max_prime: Optional[int] = None
    seed: int = 0
    exhaustive: bool = False
    theorems: Optional[Tuple[str, ...]] = None

    @model_validator(mode="after")
    def _check_instance(self):
        if self.subcommand is Subcommand.VERIFY:
            return self
        if self.p is None or self.g is None:
            raise InvalidInputError(f"{self.subcommand.value} needs --p and --g")
        if not is_prime(self.p):
            raise InvalidInputError(f"--p {self.p} is not prime")
        if self.e < 1:
            raise InvalidInputError(f"--e {self.e} must be at least 1")
        if self.g % self.p == 0:
            raise InvalidInputError(f"--g {self.g} must be a unit mod {self.p}")
        if self.k < 1:
            raise InvalidInputError(f"--k {self.k} must be at least 1")
        if self.x_range and self.x_range[0] > self.x_range[1]:
            raise InvalidInputError(f"--x-range {self.x_range[0]}:{self.x_range[1]} is empty")
        ignored = [
            flag for flag, given in (("x_range", self.x_range is not None), ("k", self.k != 1))
            if given and flag not in _RANGE_FLAGS.get(self.subcommand, ())
        ]
        if self.exhaustive:
            ignored.append("exhaustive")
        if self.theorems:
            ignored.append("theorem")
        if ignored:
            flags = ", ".join("--" + flag.replace("_", "-") for flag in ignored)
            raise InvalidInputError(f"{self.subcommand.value} does not take {flags}")
        missing = [flag for flag in _REQUIRED.get(self.subcommand, ()) if getattr(self, flag) is None]
        if missing:
            flags = ", ".join("--" + flag.replace("_", "-") for flag in missing)
            raise InvalidInputError(f"{self.subcommand.value} needs {flags}")
        return self


def _instance(request: CommandRequest) -> welch.WelchInstance:
    return welch.WelchInstance.create(request.p, request.e, request.g)


def _report_payload(report: welch.SolutionReport) -> Dict[str, Any]:
    query = {"kind": report.query.kind.value}
    for key in ("c", "x"):
        value = getattr(report.query, key)
        if value is not None:
            query[key] = value
    if report.query.x_range is not None:
        query["x_range"] = list(report.query.x_range)
    return {
        "instance": report.instance.summary(),
        "query": query,
        "solutions": [s.as_tuple() if isinstance(s, welch.SolutionPair) else s for s in report.solutions],
        "predicted_count": report.predicted_count,
        "observed_count": report.observed_count,
        "formula": report.formula,
        "theorem": report.theorem,
    }


def _csv(header: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


def _render_report(report: welch.SolutionReport, output: OutputFormat) -> str:
    payload = _report_payload(report)
    if output is OutputFormat.JSON:
        return json.dumps(payload)
    pairs = report.query.kind is welch.QueryKind.ALL_PAIRS
    rows = [list(s) if pairs else [s] for s in payload["solutions"]]
    if output is OutputFormat.CSV:
        header = ["x", "c"] if pairs else ["c"] if report.query.kind is welch.QueryKind.FIXED_X else ["x"]
        return _csv(header, rows)
    lines = [
        f"instance: {payload['instance']}",
        f"query: {payload['query']}",
        f"solutions: {', '.join(str(tuple(r)) if pairs else str(r[0]) for r in rows)}",
        f"observed: {report.observed_count}  predicted: {report.predicted_count} ({report.formula})",
        f"theorem: {report.theorem}",
    ]
    return "\n".join(lines) + "\n"


def _render_table(instance: welch.WelchInstance, table: welch.WelchTable, output: OutputFormat) -> str:
    header = ["x"] + [f"c={c}" for c in table.cs]
    rows = [[x] + row for x, row in zip(table.xs, table.rows)]
    if output is OutputFormat.CSV:
        return _csv(header, rows)
    if output is OutputFormat.JSON:
        return json.dumps({
            "instance": instance.summary(),
            "cs": table.cs,
            "rows": [{"x": x, "values": row} for x, row in zip(table.xs, table.rows)],
        })
    width = max(len(cell) for cell in header + [str(v) for row in rows for v in row])
    return "\n".join(" ".join(str(cell).rjust(width) for cell in line) for line in [header] + rows) + "\n"


def _render_mapping(payload: Dict[str, Any], output: OutputFormat) -> str:
    if output is OutputFormat.JSON:
        return json.dumps(payload)
    flat = {key: value for key, value in payload.items() if not isinstance(value, dict)}
    if output is OutputFormat.CSV:
        return _csv(list(flat), [[_cell(v) for v in flat.values()]])
    return "\n".join(f"{key}: {_cell(value)}" for key, value in payload.items()) + "\n"


def _cell(value: Any) -> str:
    if isinstance(value, (list, tuple)):
        return " ".join(str(v) for v in value)
    return str(value)


def _render_verification(report: VerificationReport, output: OutputFormat) -> str:
    rows = [
        [r.name, r.checks, r.failures, r.skipped, "pass" if r.passed else "FAIL", r.anchor]
        for r in report.results
    ]
    if output is OutputFormat.JSON:
        return json.dumps({
            "passed": report.passed,
            "instances": report.instances,
            "config": report.config.model_dump(),
            "budget": report.config.budget().model_dump(),
            "theorems": [
                {
                    "name": r.name,
                    "theorem": r.anchor,
                    "checks": r.checks,
                    "failures": r.failures,
                    "skipped": r.skipped,
                    "first_failure": r.first_failure,
                }
                for r in report.results
            ],
        })
    header = ["theorem", "checks", "failures", "skipped", "status", "statement"]
    if output is OutputFormat.CSV:
        return _csv(header, rows)
    lines = [f"{r[0]:<32} {r[4]:<5} checks={r[1]} failures={r[2]} skipped={r[3]}" for r in rows]
    lines.append(f"{report.instances} instances, {'all theorems pass' if report.passed else 'FAILURES'}")
    return "\n".join(lines) + "\n"


def _solve(request: CommandRequest) -> str:
    instance = _instance(request)
    if instance.p == 2:
        report = welch.solve_p2(instance, request.c, k=request.k, x_range=request.x_range)
    else:
        report = welch.solve_fixed_c(instance, request.c, k=request.k, x_range=request.x_range)
    return _render_report(report, request.format)


def _value_set(request: CommandRequest) -> str:
    instance = _instance(request)
    value_set = welch.value_set_at_p(instance)
    payload = {
        "instance": instance.summary(),
        "values": sorted(value_set.values),
        "generating_c_range": list(value_set.generating_c_range),
        "solutions": [
            {
                "x": s.x,
                "c_prime": s.c_prime,
                "generating_c": s.generating_c,
                "matches_c_minus_x_plus_1": s.matches_c_minus_x_plus_1,
                "matches_minus_x_plus_1_minus_c": s.matches_minus_x_plus_1_minus_c,
            }
            for s in welch.value_set_solutions(instance)
        ],
    }
    if request.format is OutputFormat.CSV:
        rows = [[s["x"], s["c_prime"], s["generating_c"]] for s in payload["solutions"]]
        return _csv(["x", "c_prime", "generating_c"], rows)
    if request.format is OutputFormat.TEXT:
        lines = [f"value set: {{{', '.join(str(v) for v in payload['values'])}}}"]
        lines += [f"x={s['x']}: c'={s['c_prime']} (g^{s['generating_c']} = x)" for s in payload["solutions"]]
        return "\n".join(lines) + "\n"
    return json.dumps(payload)


def _teichmuller(request: CommandRequest) -> str:
    modulus = PrimePowerModulus.of(request.p, request.e)
    decomposition = padic.decompose_unit(request.g, modulus)
    payload = {
        "p": request.p,
        "precision": decomposition.precision,
        "g": request.g % modulus.modulus,
        "omega": decomposition.omega.value,
        "one_unit": decomposition.one_unit.value,
    }
    return _render_mapping(payload, request.format)


def _lift(request: CommandRequest) -> str:
    instance = _instance(request)
    result = hensel.lift_welch_fixed_c_with_trace(instance, request.x0, request.c)
    payload = {
        "instance": instance.summary(),
        "x0": request.x0 % instance.m,
        "c": request.c,
        "root": result.root.value,
        "trace": result.trace,
    }
    return _render_mapping(payload, request.format)


def _verify(request: CommandRequest) -> Tuple[int, str]:
    config = VerifyConfig(
        max_modulus=request.max_modulus or VerifyConfig().max_modulus,
        max_prime=request.max_prime or VerifyConfig().max_prime,
        seed=request.seed,
        exhaustive=request.exhaustive,
        theorems=request.theorems,
    )
    report = run_verification(config)
    status = EXIT_OK if report.passed else EXIT_VERIFY_FAILED
    return status, _render_verification(report, request.format)


def run(request: CommandRequest) -> Tuple[int, str]:
    """Dispatch one request; returns (exit status, stdout text or diagnostic)"""
    try:
        if request.subcommand is Subcommand.VERIFY:
            return _verify(request)
        if request.subcommand is Subcommand.SOLVE:
            return EXIT_OK, _solve(request)
        if request.subcommand is Subcommand.PAIRS:
            return EXIT_OK, _render_report(welch.solve_all_pairs(_instance(request)), request.format)
        if request.subcommand is Subcommand.VALUE_SET:
            return EXIT_OK, _value_set(request)
        if request.subcommand is Subcommand.TABLE:
            instance = _instance(request)
            return EXIT_OK, _render_table(instance, welch.welch_table(instance, request.x_range), request.format)
        if request.subcommand is Subcommand.COUNT_C:
            return EXIT_OK, _render_report(welch.solve_fixed_x(_instance(request), request.x), request.format)
        if request.subcommand is Subcommand.TEICHMULLER:
            return EXIT_OK, _teichmuller(request)
        return EXIT_OK, _lift(request)
    except CountMismatchError as e:
        logger.error(f"{request.subcommand.value}: {e}")
        return EXIT_VERIFY_FAILED, f"error: {e}\n"
    except (WelchError, ValidationError) as e:
        logger.error(f"{request.subcommand.value} rejected: {e}")
        return EXIT_INVALID_INPUT, f"error: {e}\n"


def _parse_range(raw: str) -> Tuple[int, int]:
    try:
        start, stop = (int(part) for part in raw.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected A:B, got {raw!r}")
    return start, stop


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", type=int, help="prime p")
    common.add_argument("--e", type=int, default=1, help="exponent e (default 1)")
    common.add_argument("--g", type=int, help="base g, a unit mod p")
    common.add_argument("--c", type=int, help="shift c")
    common.add_argument("--x", type=int, help="fixed x for count-c")
    common.add_argument("--x0", type=int, help="residue class of x-1+c mod m for lift")
    common.add_argument("--x-range", type=_parse_range, help="x range A:B (default 1:m*p^e)")
    common.add_argument("--k", type=int, default=1, help="range multiplier k for solve")
    common.add_argument("--format", choices=[f.value for f in OutputFormat], default=OutputFormat.JSON.value)
    common.add_argument("--max-modulus", type=int, help="largest p^e swept by verify")
    common.add_argument("--max-prime", type=int, help="largest p swept by verify")
    common.add_argument("--seed", type=int, default=settings.seed, help="seed for sampled checks")
    common.add_argument("--exhaustive", action="store_true", help="verify: check every cell, unit and pair instead of samples")
    common.add_argument(
        "--theorem", dest="theorems", action="append", metavar="NAME",
        help="verify: only this theorem family (repeatable)",
    )

    parser = argparse.ArgumentParser(prog="welch", description="Solve and count g^(x-1+c) = x mod p^e")
    subparsers = parser.add_subparsers(dest="subcommand", required=True)
    helps = {
        Subcommand.SOLVE: "all x for a fixed c",
        Subcommand.PAIRS: "all (x, c) pairs over one period",
        Subcommand.VALUE_SET: "the value set {g^c mod p} and its solutions",
        Subcommand.TABLE: "the f(x, c) grid",
        Subcommand.COUNT_C: "the c values for a fixed x",
        Subcommand.TEICHMULLER: "omega(g) and <g>",
        Subcommand.LIFT: "Hensel lift of the fixed point for one x0, with trace",
        Subcommand.VERIFY: "check every theorem against brute force",
    }
    for subcommand, text in helps.items():
        subparsers.add_parser(subcommand.value, parents=[common], help=text)
    return parser


def request_from_args(args: argparse.Namespace) -> CommandRequest:
    fields = {key: value for key, value in vars(args).items() if value is not None}
    return CommandRequest(**fields)


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        request = request_from_args(args)
    except (WelchError, ValidationError) as e:
        logger.error(f"invalid request: {e}")
        sys.stderr.write(f"error: {e}\n")
        return EXIT_INVALID_INPUT

    status, text = run(request)
    if text.startswith("error: "):
        sys.stderr.write(text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    return status
