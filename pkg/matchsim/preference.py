import logging
from enum import Enum
from dataclasses import dataclass
from typing import (
    Dict,
    Iterable,
    Tuple
)


L = logging.getLogger('matchsim.preference')


class DomainKind(str, Enum):
    LEX = 'LEX'
    SEP = 'SEP'
    COMP = 'COMP'


# closed intervals of the score coefficients
INTERVALS = {
    DomainKind.LEX: {
        'a': (90., 110.),
        'b': (9., 11.),
        'c': (.9, 1.1),
        'd': (0., 0.)
    },
    DomainKind.SEP: {
        'a': (30., 40.),
        'b': (30., 40.),
        'c': (30., 40.),
        'd': (0., 0.)
    },
    DomainKind.COMP: {
        'a': (30., 40.),
        'b': (30., 40.),
        'c': (30., 40.),
        'd': (-5., 5.)
    }
}


@dataclass(frozen=True)
class UtilitySpec:
    kind: DomainKind
    a: float
    b: float
    c: float
    d: float = 0.

    def __post_init__(self):
        object.__setattr__(self, 'kind', DomainKind(self.kind))
        for name, (low, high) in INTERVALS[self.kind].items():
            value = getattr(self, name)
            if not low <= value <= high:
                raise ValueError(
                    f'{self.kind.value} coefficient {name}={value} '
                    f'outside [{low}, {high}]'
                )

    def scaled(self, factor):
        " same spec with all coefficients multiplied (no interval check) "
        spec = object.__new__(UtilitySpec)
        for name, value in (('kind', self.kind),
                            ('a', self.a * factor),
                            ('b', self.b * factor),
                            ('c', self.c * factor),
                            ('d', self.d * factor)):
            object.__setattr__(spec, name, value)
        return spec

    def todict(self):
        return {
            'kind': self.kind.value,
            'a': self.a,
            'b': self.b,
            'c': self.c,
            'd': self.d
        }

    @classmethod
    def fromdict(cls, doc):
        return cls(
            DomainKind(doc['kind']),
            float(doc['a']),
            float(doc['b']),
            float(doc['c']),
            float(doc.get('d', 0.))
        )


def draw_spec(kind: DomainKind, rng) -> UtilitySpec:
    """Draw the coefficients of a score formula independently and
    uniformly from the intervals of the domain."""
    kind = DomainKind(kind)
    intervals = INTERVALS[kind]
    coefs = {
        name: float(rng.uniform(low, high)) if high > low else low
        for name, (low, high) in intervals.items()
    }
    return UtilitySpec(kind, **coefs)


def score(spec: UtilitySpec, points: Tuple[float, float, float]) -> float:
    U, F, T = points
    return spec.a * U + spec.b * F - spec.c * T + spec.d * U * T


@dataclass(frozen=True)
class InducedRanking:
    """The true ordinal ranking of a participant, best first, with the
    scores it derives from.

    `ties` is set when two programs had the exact same score and the
    canonical id had to decide.
    """
    order: Tuple[int, ...]
    scores: Dict[int, float]
    ties: bool = False

    def __len__(self):
        return len(self.order)

    def position(self):
        return {
            cid: idx for idx, cid in enumerate(self.order)
        }

    def rank_of(self, cid):
        " 1-based true rank of a program "
        return self.order.index(cid) + 1

    def best_in(self, available: Iterable[int]):
        available = set(available)
        for cid in self.order:
            if cid in available:
                return cid


def induce_ranking(spec: UtilitySpec, market) -> InducedRanking:
    scores = {
        p.canonical_id: score(spec, market.program_points(p))
        for p in market.programs
    }
    order = tuple(
        sorted(scores, key=lambda cid: (-scores[cid], cid))
    )
    ties = len(set(scores.values())) < len(scores)
    if ties:
        L.warning(
            'exact score tie under %s, broken by canonical id',
            spec
        )
    return InducedRanking(order, scores, ties)
