"""Historical preliminary-vs-final discrepancy statistics and
flip-vulnerability assessment.

The discrepancy of one (canton, referendum) pair is |Δyes| + |Δno| between
the preliminary and the final count; relative values divide by that
referendum's final total. The federal aggregate appears in result files as
canton code "CH".
"""

from __future__ import annotations

import csv
import datetime
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping

from .counts import VoteCount, accumulate
from .errors import DuplicateRecord, MissingCanton, ParseError
from .flips import FlipPlan, min_flips_cantonal, min_flips_popular
from .swiss import FEDERAL_CODE
from .tally import (
    MajorityRule,
    Outcome,
    ReferendumSpec,
    cantonal_outcome,
    referendum_outcome,
)
from .tree import JurisdictionId, JurisdictionTree

RESULTS_HEADER = (
    "referendum_id",
    "date",
    "canton",
    "prelim_yes",
    "prelim_no",
    "final_yes",
    "final_no",
    "final_total",
)


@dataclass(frozen=True, slots=True)
class HistoricalRecord:
    referendum_id: str
    canton: str
    date: datetime.date
    preliminary: VoteCount
    final: VoteCount

    def discrepancy(self) -> int:
        return abs(self.preliminary.yes - self.final.yes) + abs(
            self.preliminary.no - self.final.no
        )

    def final_total(self) -> int:
        return self.final.total()

    def relative_discrepancy(self) -> Fraction:
        total = self.final_total()
        if total == 0:
            return Fraction(0)
        return Fraction(self.discrepancy(), total)


@dataclass(frozen=True, slots=True)
class DiscrepancyStat:
    canton: str
    max_abs_discrepancy: int
    total_at_max: int
    max_relative: Fraction

    def max_relative_percent(self) -> float:
        return round(100 * float(self.max_relative), 2)


@dataclass(frozen=True, slots=True)
class DiscrepancySummary:
    per_canton: tuple[DiscrepancyStat, ...]
    federal_average_discrepancy: Fraction
    average_max_cantonal_discrepancy: Fraction

    def stat(self, canton: str) -> DiscrepancyStat:
        for s in self.per_canton:
            if s.canton == canton:
                return s
        raise KeyError(canton)


@dataclass(frozen=True, slots=True)
class VulnerabilityAssessment:
    referendum_id: str
    outcome: Outcome
    popular_plan: FlipPlan
    popular_reference: int
    popular_vulnerable: bool
    cantonal_plan: FlipPlan | None
    cantonal_reference: int | None
    cantonal_vulnerable: bool | None

    @property
    def vulnerable(self) -> bool:
        return self.popular_vulnerable or bool(self.cantonal_vulnerable)


def bundled_results_path(name: str) -> Path:
    """Filesystem path of a bundled results file, e.g. ``rtvg_2015``."""
    return Path(str(resources.files("votewire.data").joinpath(f"{name}.csv")))


def load_results(source: str | Path) -> list[HistoricalRecord]:
    """Parse a results CSV; errors carry the 1-based row number."""
    text = Path(source).read_text(encoding="utf-8")
    return parse_results(text)


def parse_results(text: str) -> list[HistoricalRecord]:
    lines = text.splitlines()
    if not lines:
        raise ParseError("row 1: missing header")
    reader = csv.reader(lines)
    header = tuple(next(reader))
    if header != RESULTS_HEADER:
        raise ParseError(f"row 1: header must be {','.join(RESULTS_HEADER)}")
    records: list[HistoricalRecord] = []
    seen: set[tuple[str, str]] = set()
    for rowno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(RESULTS_HEADER):
            raise ParseError(f"row {rowno}: expected {len(RESULTS_HEADER)} fields, got {len(row)}")
        ref_id, date_text, canton = row[0], row[1], row[2]
        if not ref_id or not canton:
            raise ParseError(f"row {rowno}: referendum_id and canton must be nonempty")
        try:
            date = datetime.date.fromisoformat(date_text)
        except ValueError as exc:
            raise ParseError(f"row {rowno}: bad date {date_text!r}") from exc
        try:
            p_yes, p_no, f_yes, f_no, f_total = (int(v) for v in row[3:])
        except ValueError as exc:
            raise ParseError(f"row {rowno}: counts must be integers") from exc
        if min(p_yes, p_no, f_yes, f_no, f_total) < 0:
            raise ParseError(f"row {rowno}: counts must be >= 0")
        if f_total < f_yes + f_no:
            raise ParseError(
                f"row {rowno}: final_total {f_total} is less than final yes+no {f_yes + f_no}"
            )
        key = (ref_id, canton)
        if key in seen:
            raise DuplicateRecord(f"row {rowno}: duplicate entry for {canton} in {ref_id}")
        seen.add(key)
        records.append(
            HistoricalRecord(
                referendum_id=ref_id,
                canton=canton,
                date=date,
                preliminary=VoteCount(yes=p_yes, no=p_no),
                # Whatever the final total holds beyond yes+no is blank/invalid.
                final=VoteCount(yes=f_yes, no=f_no, blank=f_total - f_yes - f_no),
            )
        )
    return records


def discrepancy_stats(records: Iterable[HistoricalRecord]) -> DiscrepancySummary:
    """Per-canton maxima plus the two cross-referendum averages."""
    records = list(records)
    if not records:
        raise ValueError("no records to analyze")
    by_canton: dict[str, list[HistoricalRecord]] = {}
    by_ref: dict[str, list[HistoricalRecord]] = {}
    for rec in records:
        by_canton.setdefault(rec.canton, []).append(rec)
        by_ref.setdefault(rec.referendum_id, []).append(rec)

    stats = []
    for canton, recs in by_canton.items():
        at_max = max(recs, key=lambda r: r.discrepancy())
        stats.append(
            DiscrepancyStat(
                canton=canton,
                max_abs_discrepancy=at_max.discrepancy(),
                total_at_max=at_max.final_total(),
                max_relative=max(r.relative_discrepancy() for r in recs),
            )
        )

    federal = [r for r in records if r.canton == FEDERAL_CODE]
    federal_avg = (
        Fraction(sum(r.discrepancy() for r in federal), len(federal))
        if federal
        else Fraction(0)
    )
    per_ref_max = []
    for recs in by_ref.values():
        cantonal = [r for r in recs if r.canton != FEDERAL_CODE]
        if cantonal:
            per_ref_max.append(max(r.discrepancy() for r in cantonal))
    avg_max = (
        Fraction(sum(per_ref_max), len(per_ref_max)) if per_ref_max else Fraction(0)
    )
    return DiscrepancySummary(
        per_canton=tuple(stats),
        federal_average_discrepancy=federal_avg,
        average_max_cantonal_discrepancy=avg_max,
    )


def canton_final_counts(
    records: Iterable[HistoricalRecord],
    tree: JurisdictionTree,
) -> dict[JurisdictionId, VoteCount]:
    """Final counts per canton for one referendum's records.

    The federal aggregate row is skipped; each canton of the tree must
    appear exactly once.
    """
    by_name = {c.name: c for c in tree.cantons()}
    out: dict[JurisdictionId, VoteCount] = {}
    for rec in records:
        if rec.canton == FEDERAL_CODE:
            continue
        canton = by_name.get(rec.canton)
        if canton is None:
            raise MissingCanton(f"{rec.canton} is not a canton of the given tree")
        out[canton] = rec.final
    missing = set(by_name.values()) - set(out)
    if missing:
        raise MissingCanton(
            f"no final counts for: {', '.join(sorted(c.name for c in missing))}"
        )
    return out


def _max_observed(records: Iterable[HistoricalRecord], cantons: set[str] | None) -> int:
    values = [
        r.discrepancy() for r in records if cantons is None or r.canton in cantons
    ]
    return max(values, default=0)


def vulnerability_report(
    records: Iterable[HistoricalRecord],
    tree: JurisdictionTree,
    specs: ReferendumSpec | Iterable[ReferendumSpec],
    baseline: Iterable[HistoricalRecord] | None = None,
) -> list[VulnerabilityAssessment]:
    """Minimum-flip plans per referendum, flagged against observed error sizes.

    A plan is vulnerable when its flip total does not exceed the largest
    historical discrepancy observed for the cantons it touches (for the
    popular plan: anywhere, since the flips may be spread over any canton).
    ``baseline`` supplies the discrepancy history; by default the assessed
    records themselves serve as their own history.
    """
    records = list(records)
    history = list(baseline) if baseline is not None else records
    if isinstance(specs, ReferendumSpec):
        specs = [specs]
    by_id: Mapping[str, ReferendumSpec] = {s.election_id: s for s in specs}
    by_ref: dict[str, list[HistoricalRecord]] = {}
    for rec in records:
        by_ref.setdefault(rec.referendum_id, []).append(rec)

    out: list[VulnerabilityAssessment] = []
    for ref_id, spec in by_id.items():
        rows = by_ref.get(ref_id)
        if not rows:
            raise MissingCanton(f"no records for referendum {ref_id}")
        per_canton = canton_final_counts(rows, tree)
        outcome = referendum_outcome(spec, per_canton, tree)

        national = accumulate(per_canton.values())
        popular_plan = min_flips_popular(national, outcome.popular.opposite())
        popular_ref = _max_observed(history, None)
        popular_vuln = 0 < popular_plan.total_flips <= popular_ref

        cantonal_plan = cantonal_ref = cantonal_vuln = None
        if spec.majority_rule is MajorityRule.DOUBLE_MAJORITY:
            current, _, _ = cantonal_outcome(per_canton, tree)
            cantonal_plan = min_flips_cantonal(per_canton, tree, current.opposite())
            touched = {c.name for c in cantonal_plan.cantons()}
            cantonal_ref = _max_observed(history, touched)
            cantonal_vuln = 0 < cantonal_plan.total_flips <= cantonal_ref

        out.append(
            VulnerabilityAssessment(
                referendum_id=ref_id,
                outcome=outcome,
                popular_plan=popular_plan,
                popular_reference=popular_ref,
                popular_vulnerable=popular_vuln,
                cantonal_plan=cantonal_plan,
                cantonal_reference=cantonal_ref,
                cantonal_vulnerable=cantonal_vuln,
            )
        )
    return out
