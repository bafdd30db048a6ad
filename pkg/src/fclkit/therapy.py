"""Therapy knowledge-base loading, batch scoring and expectation checks.

Case files are CSV with header
``case_id,speech_problems_level,child_age,family_implication[,expected_sessions]``;
any additional numeric column is passed through as an input too, so extended
knowledge bases with more variables reuse the same format. A knowledge base
is either a single ``.fcl`` file or a directory of ``.fcl`` fragments that
are merged before linking.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

from .engine import infer
from .fcl import parse_sources
from .fcl.diagnostics import Diagnostic
from .model import RuleBase

BUNDLED_KB = "dyslalia.fcl"

CASE_ID_COLUMN = "case_id"
EXPECTED_COLUMN = "expected_sessions"


class KnowledgeBaseError(Exception):
    """A knowledge base failed to parse or link."""

    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = diagnostics
        super().__init__("\n".join(d.format() for d in diagnostics))


def bundled_kb_path() -> Path:
    """Filesystem path of the packaged session-recommendation KB."""
    return Path(resources.files("fclkit").joinpath("data", BUNDLED_KB))  # type: ignore[arg-type]


def load_kb(path: str | Path) -> RuleBase:
    """Load and link a KB file, or merge every ``*.fcl`` in a directory.

    Raises KnowledgeBaseError carrying the parse diagnostics on failure and
    FileNotFoundError when nothing is there to read.
    """
    path = Path(path)
    if path.is_dir():
        files = sorted(path.glob("*.fcl"))
        if not files:
            raise FileNotFoundError(f"no .fcl files in directory {path}")
    else:
        if not path.is_file():
            raise FileNotFoundError(f"knowledge base {path} does not exist")
        files = [path]
    sources = [(str(f), f.read_text(encoding="utf-8")) for f in files]
    result = parse_sources(sources)
    if result.rulebase is None:
        raise KnowledgeBaseError(result.diagnostics)
    return result.rulebase


def load_bundled_kb() -> RuleBase:
    return load_kb(bundled_kb_path())


@dataclass(frozen=True)
class ChildCase:
    """One assessment row: crisp inputs keyed by variable name."""

    case_id: str
    inputs: dict[str, float]
    expected_sessions: int | None = None

    @property
    def speech_problems_level(self) -> float | None:
        return self.inputs.get("speech_problems_level")

    @property
    def child_age(self) -> float | None:
        return self.inputs.get("child_age")

    @property
    def family_implication(self) -> float | None:
        return self.inputs.get("family_implication")


@dataclass(frozen=True)
class Recommendation:
    """Batch result for one case.

    ``sessions`` is the crisp value rounded half-up, floored at one whenever
    any rule fired; when nothing fired it reflects the KB default as-is.
    """

    case_id: str
    crisp: float | None
    sessions: int | None
    fired: bool
    top_rule: str | None = None
    error: str | None = None
    warnings: tuple[str, ...] = field(default_factory=tuple)


def discrete_sessions(crisp: float, fired: bool) -> int:
    rounded = math.floor(crisp + 0.5)
    if fired:
        return max(1, rounded)
    return rounded


def load_cases(path: str | Path) -> list[ChildCase]:
    """Read a case CSV; raises ValueError on a malformed header."""
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or CASE_ID_COLUMN not in reader.fieldnames:
            raise ValueError(f"case file {path} must have a header with a {CASE_ID_COLUMN!r} column")
        cases = []
        for row in reader:
            case_id = (row.get(CASE_ID_COLUMN) or "").strip()
            inputs: dict[str, float] = {}
            expected: int | None = None
            for column, raw in row.items():
                if column is None or column == CASE_ID_COLUMN:
                    continue
                raw = (raw or "").strip()
                if not raw:
                    continue
                if column == EXPECTED_COLUMN:
                    expected = int(raw)
                    continue
                inputs[column] = float(raw)  # non-numeric cells surface per-row later
            cases.append(ChildCase(case_id, inputs, expected))
    return cases


def _parse_case_row(row: dict[str, str]) -> ChildCase:
    """Like the loader's row handling but error-isolated for run_batch."""
    case_id = (row.get(CASE_ID_COLUMN) or "").strip()
    inputs: dict[str, float] = {}
    expected: int | None = None
    for column, raw in row.items():
        if column is None or column == CASE_ID_COLUMN:
            continue
        raw_value = (raw or "").strip()
        if not raw_value:
            continue
        if column == EXPECTED_COLUMN:
            expected = int(raw_value)
            continue
        inputs[column] = float(raw_value)
    return ChildCase(case_id, inputs, expected)


def session_variable(rb: RuleBase) -> str:
    """Output variable the discrete session count is derived from."""
    names = rb.output_names()
    return "weekly_session_number" if "weekly_session_number" in names else names[0]


def recommend(rb: RuleBase, case: ChildCase, samples: int | None = None) -> Recommendation:
    """Evaluate one case; problems come back on the row, never as exceptions."""
    warnings: list[str] = []
    missing = [name for name in rb.input_names() if name not in case.inputs]
    if missing:
        return Recommendation(
            case.case_id, None, None, False,
            error="missing input " + ", ".join(missing),
        )
    extra = [name for name in case.inputs if name not in rb.input_names()]
    if extra:
        return Recommendation(
            case.case_id, None, None, False,
            error="unknown input " + ", ".join(sorted(extra)),
        )
    for var in rb.input_vars:
        lo, hi = var.universe
        value = case.inputs[var.name]
        if not lo <= value <= hi:
            warnings.append(f"{var.name}={value} outside universe ({lo}, {hi})")

    kwargs = {} if samples is None else {"samples": samples}
    context = infer(rb, case.inputs, **kwargs)
    out_name = session_variable(rb)
    result = context.outputs[out_name]
    if result.error is not None:
        return Recommendation(case.case_id, None, None, result.fired, error=result.error,
                              warnings=tuple(warnings))
    relevant = [t for t in context.trace if t.variable == out_name]
    top_rule = None
    if relevant:
        best = max(relevant, key=lambda t: t.activation)
        if best.activation > 0.0:
            top_rule = best.rule
    assert result.crisp is not None
    return Recommendation(
        case.case_id,
        result.crisp,
        discrete_sessions(result.crisp, result.fired),
        result.fired,
        top_rule=top_rule,
        warnings=tuple(warnings),
    )


def run_batch(rb: RuleBase, cases: Iterable[ChildCase], samples: int | None = None) -> list[Recommendation]:
    """One Recommendation per case, input order preserved; rows never abort the batch."""
    return [recommend(rb, case, samples) for case in cases]


BATCH_COLUMNS = ["case_id", "crisp", "sessions", "fired", "top_rule", "warnings", "error"]


def write_batch_csv(recs: Sequence[Recommendation], path: str | Path) -> None:
    """Write batch results; formatting is exact (repr) so reruns are byte-identical."""
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(BATCH_COLUMNS)
        for rec in recs:
            writer.writerow(_batch_row(rec))


def _batch_row(rec: Recommendation) -> list[str]:
    return [
        rec.case_id,
        "" if rec.crisp is None else repr(rec.crisp),
        "" if rec.sessions is None else str(rec.sessions),
        "true" if rec.fired else "false",
        rec.top_rule or "",
        "; ".join(rec.warnings),
        rec.error or "",
    ]


@dataclass(frozen=True)
class ValidationRow:
    case_id: str
    expected: int
    got: int | None
    dominant_rule: str | None
    error: str | None

    @property
    def matched(self) -> bool:
        return self.error is None and self.got == self.expected


@dataclass(frozen=True)
class ValidationReport:
    rows: tuple[ValidationRow, ...]

    @property
    def total(self) -> int:
        return len(self.rows)

    @property
    def matches(self) -> int:
        return sum(1 for row in self.rows if row.matched)

    @property
    def mismatches(self) -> tuple[ValidationRow, ...]:
        return tuple(row for row in self.rows if not row.matched)

    def render_text(self) -> str:
        lines = [f"checked {self.total} case(s): {self.matches} match, {self.total - self.matches} mismatch"]
        for row in self.mismatches:
            if row.error is not None:
                lines.append(f"  {row.case_id}: expected {row.expected}, failed ({row.error})")
            else:
                via = f" (dominant rule {row.dominant_rule})" if row.dominant_rule else ""
                lines.append(f"  {row.case_id}: expected {row.expected}, got {row.got}{via}")
        return "\n".join(lines) + "\n"

    def render_csv(self) -> str:
        lines = ["case_id,expected,got,matched,dominant_rule,error"]
        for row in self.rows:
            got = "" if row.got is None else str(row.got)
            lines.append(
                f"{row.case_id},{row.expected},{got},{'true' if row.matched else 'false'},"
                f"{row.dominant_rule or ''},{row.error or ''}"
            )
        return "\n".join(lines) + "\n"


def validate_against_expected(
    recs: Sequence[Recommendation], cases: Sequence[ChildCase]
) -> ValidationReport:
    """Compare recommendations to therapist expectations, case by case.

    Cases without an expectation are skipped; mismatch rows name the rule
    that dominated the decision so KB maintainers know where to look.
    """
    by_id = {rec.case_id: rec for rec in recs}
    rows: list[ValidationRow] = []
    for case in cases:
        if case.expected_sessions is None:
            continue
        rec = by_id.get(case.case_id)
        if rec is None:
            rows.append(ValidationRow(case.case_id, case.expected_sessions, None, None, "not evaluated"))
            continue
        rows.append(
            ValidationRow(case.case_id, case.expected_sessions, rec.sessions, rec.top_rule, rec.error)
        )
    return ValidationReport(tuple(rows))
