from dataclasses import dataclass
from typing import (
    Dict,
    Tuple
)

import numpy as np


UNIVERSITIES = ('A', 'B', 'C')
FIELDS = ('Economics', 'Finance', 'Law')
TUITIONS = ('NoTuition', 'HalfTuition', 'FullTuition')

UNIVERSITY_POINTS = (500, 200, 600)
TUITION_POINTS = (0, 250, 500)
FIELD_POINTS = (300, 500, 700)

NPROGRAMS = 27
MARKS = 101  # marks live in 0..100, both ends included


class InfeasibleMarksError(ValueError):
    reason = 'infeasible-marks'


class MarketError(ValueError):

    def __init__(self, reason, message):
        self.reason = reason
        super().__init__(message)


@dataclass(frozen=True)
class AttributeCatalog:
    """Point values of the three attributes.

    `field_assignment` gives the points of each field label, in the
    FIELDS order; it is one of the 6 bijections onto FIELD_POINTS.
    """
    field_assignment: Tuple[int, int, int] = FIELD_POINTS
    university_points: Tuple[int, int, int] = UNIVERSITY_POINTS
    tuition_points: Tuple[int, int, int] = TUITION_POINTS

    def __post_init__(self):
        if sorted(self.field_assignment) != sorted(FIELD_POINTS):
            raise ValueError(
                f'field assignment {self.field_assignment} is not a '
                f'bijection onto {FIELD_POINTS}'
            )
        if tuple(self.university_points) != UNIVERSITY_POINTS:
            raise ValueError(f'bad university points {self.university_points}')
        if tuple(self.tuition_points) != TUITION_POINTS:
            raise ValueError(f'bad tuition points {self.tuition_points}')

    @property
    def field_points(self):
        return frozenset(FIELD_POINTS)

    def points(self, program):
        return (
            self.university_points[program.university],
            self.field_assignment[program.field],
            self.tuition_points[program.tuition]
        )

    def todict(self):
        return {
            'university_points': list(self.university_points),
            'tuition_points': list(self.tuition_points),
            'field_points': sorted(FIELD_POINTS),
            'field_assignment': {
                label: points
                for label, points in zip(FIELDS, self.field_assignment)
            }
        }

    @classmethod
    def fromdict(cls, doc):
        return cls(
            field_assignment=tuple(
                int(doc['field_assignment'][label])
                for label in FIELDS
            )
        )


@dataclass(frozen=True, order=True)
class Program:
    university: int
    field: int
    tuition: int

    @property
    def canonical_id(self):
        return 9 * self.university + 3 * self.field + self.tuition

    @classmethod
    def fromid(cls, cid):
        if not 0 <= cid < NPROGRAMS:
            raise ValueError(f'no program with canonical id {cid}')
        university, rest = divmod(cid, 9)
        field, tuition = divmod(rest, 3)
        return cls(university, field, tuition)

    @property
    def label(self):
        return (
            f'{UNIVERSITIES[self.university]}/'
            f'{FIELDS[self.field]}/'
            f'{TUITIONS[self.tuition]}'
        )


ALLPROGRAMS = tuple(Program.fromid(cid) for cid in range(NPROGRAMS))


@dataclass(frozen=True)
class Participant:
    participant_id: int
    mark: int


@dataclass(frozen=True)
class PriorityOrder:
    ordering: Tuple[int, ...]

    def __iter__(self):
        return iter(self.ordering)

    def __len__(self):
        return len(self.ordering)

    def position(self):
        " participant id -> 0-based priority position "
        return {
            pid: idx for idx, pid in enumerate(self.ordering)
        }


@dataclass(frozen=True)
class Market:
    catalog: AttributeCatalog
    programs: Tuple[Program, ...]
    participants: Tuple[Participant, ...]
    market_seed: int = 0

    def __post_init__(self):
        if len(self.programs) != len(self.participants):
            raise MarketError(
                'size-mismatch',
                f'{len(self.programs)} programs for '
                f'{len(self.participants)} participants'
            )

    @property
    def n(self):
        return len(self.participants)

    @property
    def program_ids(self):
        return tuple(p.canonical_id for p in self.programs)

    def marks(self) -> Dict[int, int]:
        return {
            p.participant_id: p.mark
            for p in self.participants
        }

    def program_points(self, program):
        return self.catalog.points(program)

    def tojson(self):
        return {
            'seed': self.market_seed,
            'catalog': self.catalog.todict(),
            'programs': [
                {
                    'id': p.canonical_id,
                    'label': p.label,
                    'points': list(self.catalog.points(p))
                }
                for p in self.programs
            ],
            'participants': [
                {'id': p.participant_id, 'mark': p.mark}
                for p in self.participants
            ]
        }

    @classmethod
    def fromjson(cls, doc):
        return cls(
            catalog=AttributeCatalog.fromdict(doc['catalog']),
            programs=tuple(
                Program.fromid(int(p['id']))
                for p in doc['programs']
            ),
            participants=tuple(
                Participant(int(p['id']), int(p['mark']))
                for p in doc['participants']
            ),
            market_seed=int(doc['seed'])
        )


def generate_market(seed: int, n: int = NPROGRAMS) -> Market:
    """Draw a market: distinct marks in 0..100, a random field-points
    bijection and (for toy sizes) a random subset of the programs.
    Identical seeds yield identical markets.
    """
    if n > MARKS:
        raise InfeasibleMarksError(
            f'cannot draw {n} distinct marks out of {MARKS} values'
        )
    if not 1 <= n <= NPROGRAMS:
        raise ValueError(
            f'market size must be within 1..{NPROGRAMS} (got {n})'
        )
    rng = np.random.default_rng(seed)
    marks = rng.permutation(MARKS)[:n]
    assignment = rng.permutation(3)
    if n == NPROGRAMS:
        programs = ALLPROGRAMS
    else:
        programs = tuple(
            ALLPROGRAMS[cid]
            for cid in sorted(rng.choice(NPROGRAMS, size=n, replace=False))
        )
    return Market(
        catalog=AttributeCatalog(
            field_assignment=tuple(
                FIELD_POINTS[idx] for idx in assignment
            )
        ),
        programs=programs,
        participants=tuple(
            Participant(pid, int(mark))
            for pid, mark in enumerate(marks)
        ),
        market_seed=seed
    )


def priority_of(market: Market) -> PriorityOrder:
    marks = [p.mark for p in market.participants]
    if len(set(marks)) != len(marks):
        raise MarketError(
            'duplicate-marks',
            'duplicate marks: the priority order is not strict'
        )
    return PriorityOrder(
        tuple(
            p.participant_id
            for p in sorted(
                market.participants,
                key=lambda p: -p.mark
            )
        )
    )


def program_points(market: Market, program: Program):
    return market.program_points(program)
