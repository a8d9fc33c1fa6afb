import logging
from enum import Enum
from dataclasses import dataclass
from typing import (
    Optional,
    Sequence,
    Tuple
)

from matchsim.market import ALLPROGRAMS


L = logging.getLogger('matchsim.report')

# displayed points of the lexicographic interface
LEXNEST_WEIGHTS = (100, 10, 1)
WEIGHT_RANGE = (0., 100.)


class InterfaceKind(str, Enum):
    DIRECT = 'DIRECT'
    WEIGHT = 'WEIGHT'
    LEXNEST = 'LEXNEST'
    CHOICE = 'CHOICE'
    ACCURACY = 'ACCURACY'


class ReportError(ValueError):

    def __init__(self, reason, message):
        self.reason = reason
        super().__init__(message)


@dataclass(frozen=True)
class FullRankingReport:
    order: Tuple[int, ...]
    ties: bool = False

    def __len__(self):
        return len(self.order)

    def top_in(self, available):
        available = set(available)
        for cid in self.order:
            if cid in available:
                return cid

    def todict(self):
        return list(self.order)


@dataclass(frozen=True)
class AttributeReport:
    """Attribute rankings: `university_ranks[i]` is the rank (1 = best)
    given to university i, and likewise for fields and tuition levels.
    Weights only exist in the weighted interface.
    """
    university_ranks: Tuple[int, int, int]
    field_ranks: Tuple[int, int, int]
    tuition_ranks: Tuple[int, int, int]
    weights: Optional[Tuple[float, float, float]] = None

    def __post_init__(self):
        for name in ('university_ranks', 'field_ranks', 'tuition_ranks'):
            ranks = tuple(getattr(self, name))
            if sorted(ranks) != [1, 2, 3]:
                raise ReportError(
                    'malformed',
                    f'{name} {ranks} is not a permutation of 1, 2, 3'
                )
            object.__setattr__(self, name, ranks)
        if self.weights is not None:
            weights = tuple(float(w) for w in self.weights)
            if len(weights) != 3:
                raise ReportError('malformed', f'three weights expected, got {weights}')
            low, high = WEIGHT_RANGE
            for w in weights:
                if not low <= w <= high:
                    raise ReportError(
                        'weight-range',
                        f'weight {w} outside [{low}, {high}]'
                    )
            object.__setattr__(self, 'weights', weights)

    def ranks(self, program):
        return (
            self.university_ranks[program.university],
            self.field_ranks[program.field],
            self.tuition_ranks[program.tuition]
        )

    def todict(self):
        doc = {
            'university': list(self.university_ranks),
            'field': list(self.field_ranks),
            'tuition': list(self.tuition_ranks)
        }
        if self.weights is not None:
            doc['weights'] = list(self.weights)
        return doc


def bundle_points(report: AttributeReport, program, weights=None):
    """The points index displayed for a bundle: lower points mean a
    better rank. Without weights (and none in the report) the
    lexicographic 100/10/1 weights apply.
    """
    if weights is None:
        weights = report.weights or LEXNEST_WEIGHTS
    return sum(
        rank * weight
        for rank, weight in zip(report.ranks(program), weights)
    )


def _expand(report, weights, programs):
    points = {
        p.canonical_id: bundle_points(report, p, weights)
        for p in programs
    }
    order = tuple(
        sorted(points, key=lambda cid: (points[cid], cid))
    )
    ties = len(set(points.values())) < len(points)
    return FullRankingReport(order, ties)


def expand_lexnest(report: AttributeReport, programs=ALLPROGRAMS) -> FullRankingReport:
    if report.weights is not None:
        raise ReportError(
            'unexpected-weights',
            'the lexicographic interface takes no weights'
        )
    # the digit structure of the points makes them all distinct
    return _expand(report, LEXNEST_WEIGHTS, programs)


def expand_weight(report: AttributeReport, programs=ALLPROGRAMS) -> FullRankingReport:
    if report.weights is None:
        raise ReportError(
            'missing-weights',
            'the weighted interface needs three weights'
        )
    expanded = _expand(report, report.weights, programs)
    if expanded.ties:
        L.warning(
            'equal points under weights %s, broken by canonical id',
            report.weights
        )
    return expanded


def expand(kind, report, programs=ALLPROGRAMS) -> FullRankingReport:
    " the full ranking a report stands for under an interface "
    kind = InterfaceKind(kind)
    if kind == InterfaceKind.LEXNEST:
        return expand_lexnest(report, programs)
    if kind == InterfaceKind.WEIGHT:
        return expand_weight(report, programs)
    if kind == InterfaceKind.CHOICE:
        raise ValueError('the choice interface stores no report')
    return report


def _check_permutation(order: Sequence[int], programs):
    expected = {p.canonical_id for p in programs}
    seen = set()
    for cid in order:
        if cid in seen:
            raise ReportError('duplicate', f'program {cid} is listed twice')
        if cid not in expected:
            raise ReportError('unknown', f'program {cid} is not in the market')
        seen.add(cid)
    missing = expected - seen
    if missing:
        raise ReportError(
            'omission',
            f'{len(missing)} programs missing from the ranking: {sorted(missing)}'
        )


def validate_report(kind, raw, programs=ALLPROGRAMS):
    """Structural validation of a report for an interface.

    `raw` may be a report object or its json form (a list of canonical
    ids for full rankings, a dict of rank lists for attribute reports).
    The choice interface carries no stored report: None is returned.
    """
    kind = InterfaceKind(kind)
    if kind == InterfaceKind.CHOICE:
        return None

    if kind in (InterfaceKind.DIRECT, InterfaceKind.ACCURACY):
        if isinstance(raw, AttributeReport):
            raise ReportError('malformed', f'{kind.value} needs a full ranking')
        order = raw.order if isinstance(raw, FullRankingReport) else raw
        try:
            order = tuple(int(cid) for cid in order)
        except (TypeError, ValueError):
            raise ReportError('malformed', f'not a list of program ids: {raw!r}')
        _check_permutation(order, programs)
        return FullRankingReport(order)

    # attribute interfaces
    if isinstance(raw, FullRankingReport):
        raise ReportError('malformed', f'{kind.value} needs attribute rankings')
    if isinstance(raw, AttributeReport):
        doc = raw.todict()
    else:
        doc = dict(raw)
    weights = doc.get('weights')
    if kind == InterfaceKind.LEXNEST and weights is not None:
        raise ReportError(
            'unexpected-weights',
            'the lexicographic interface takes no weights'
        )
    if kind == InterfaceKind.WEIGHT and weights is None:
        raise ReportError(
            'missing-weights',
            'the weighted interface needs three weights'
        )
    try:
        return AttributeReport(
            tuple(doc['university']),
            tuple(doc['field']),
            tuple(doc['tuition']),
            None if weights is None else tuple(weights)
        )
    except (KeyError, TypeError) as exc:
        raise ReportError('malformed', f'bad attribute report {raw!r} ({exc})')
