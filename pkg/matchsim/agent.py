from enum import Enum
from dataclasses import dataclass
from typing import (
    Optional,
    Tuple
)

from matchsim.market import (
    FIELD_POINTS,
    TUITION_POINTS,
    UNIVERSITY_POINTS
)
from matchsim.preference import induce_ranking
from matchsim.report import (
    AttributeReport,
    FullRankingReport,
    InterfaceKind
)


class PolicyKind(str, Enum):
    TRUTHFUL = 'TRUTHFUL'
    NOISY = 'NOISY'
    STRATEGIC = 'STRATEGIC'


DEFAULT_P_MAX = .6

# attribute point ranges, used to scale the naive weights
RANGES = (
    max(UNIVERSITY_POINTS) - min(UNIVERSITY_POINTS),
    max(FIELD_POINTS) - min(FIELD_POINTS),
    max(TUITION_POINTS) - min(TUITION_POINTS)
)


@dataclass(frozen=True)
class AgentPolicy:
    """How a simulated participant reports.

    * TRUTHFUL: reports (or picks) what its score formula says
    * NOISY: truthful output hit by random adjacent swaps, `epsilon`
      sets how many; picks the second best of a menu of two or more
      programs with probability `epsilon`
    * STRATEGIC: with a probability `p_max` at mid marks, falling to
      0 at marks 0 and 100, it moves a program it expects to still be
      available at its turn to the top of its ranking
    """
    kind: PolicyKind = PolicyKind.TRUTHFUL
    epsilon: float = 0.
    p_max: float = DEFAULT_P_MAX

    def __post_init__(self):
        object.__setattr__(self, 'kind', PolicyKind(self.kind))
        if not 0 <= self.epsilon <= 1:
            raise ValueError(f'epsilon {self.epsilon} outside [0, 1]')
        if not 0 <= self.p_max <= 1:
            raise ValueError(f'p_max {self.p_max} outside [0, 1]')

    def todict(self):
        return {
            'kind': self.kind.value,
            'epsilon': self.epsilon,
            'p_max': self.p_max
        }

    @classmethod
    def fromdict(cls, doc):
        doc = dict(doc)
        return cls(
            PolicyKind(str(doc.pop('kind', 'TRUTHFUL')).upper()),
            float(doc.pop('epsilon', 0.)),
            float(doc.pop('p_max', DEFAULT_P_MAX))
        )


@dataclass(frozen=True)
class TruthfulAttributeDerivation:
    university_ranks: Tuple[int, int, int]
    field_ranks: Tuple[int, int, int]
    tuition_ranks: Tuple[int, int, int]
    weights: Tuple[float, float, float]

    def report(self, interface):
        return AttributeReport(
            self.university_ranks,
            self.field_ranks,
            self.tuition_ranks,
            self.weights if InterfaceKind(interface) == InterfaceKind.WEIGHT else None
        )


def _ranks(values, descending=True):
    " rank (1 = best) of each position of values "
    order = sorted(
        range(len(values)),
        key=lambda idx: (-values[idx] if descending else values[idx], idx)
    )
    ranks = [0] * len(values)
    for rank, idx in enumerate(order, start=1):
        ranks[idx] = rank
    return tuple(ranks)


def naive_weights(spec) -> Tuple[float, float, float]:
    """Weights proportional to each coefficient times the point range
    of its attribute, rescaled so that the largest is 100."""
    raw = (
        spec.a * RANGES[0],
        spec.b * RANGES[1],
        spec.c * RANGES[2]
    )
    top = max(raw)
    if top <= 0:
        return (0., 0., 0.)
    return tuple(100 * w / top for w in raw)


def truthful_attributes(spec, market) -> TruthfulAttributeDerivation:
    cat = market.catalog
    return TruthfulAttributeDerivation(
        _ranks([spec.a * u for u in cat.university_points]),
        _ranks([spec.b * f for f in cat.field_assignment]),
        _ranks(list(cat.tuition_points), descending=False),
        naive_weights(spec)
    )


# distortions

def strategic_probability(mark, p_max) -> float:
    return p_max * (1 - abs(mark / 100 - .5) * 2)


def expected_predecessors(mark, n) -> int:
    " how many participants an agent expects to choose before it "
    return int(round((100 - mark) / 100 * (n - 1)))


def safe_program(order, mark):
    """The best program beyond the ones the agent expects higher
    priority participants to take, or None when it expects nothing
    to be taken."""
    reach = expected_predecessors(mark, len(order))
    if reach < 1 or reach >= len(order):
        return None
    return order[reach]


def swap_count(epsilon, maxswaps, rng) -> int:
    if epsilon <= 0:
        return 0
    if epsilon >= 1:
        return maxswaps
    return min(int(rng.geometric(1 - epsilon)) - 1, maxswaps)


def adjacent_swaps(order, count, rng):
    order = list(order)
    if len(order) < 2:
        return tuple(order)
    for _ in range(count):
        idx = int(rng.integers(len(order) - 1))
        order[idx], order[idx + 1] = order[idx + 1], order[idx]
    return tuple(order)


def _noisy_attributes(derived, epsilon, rng):
    lists = [
        list(derived.university_ranks),
        list(derived.field_ranks),
        list(derived.tuition_ranks)
    ]
    for _ in range(swap_count(epsilon, 9, rng)):
        # 3 lists x 2 adjacent rank positions
        slot = int(rng.integers(6))
        ranks = lists[slot // 2]
        low = slot % 2 + 1
        first, second = ranks.index(low), ranks.index(low + 1)
        ranks[first], ranks[second] = low + 1, low
    return TruthfulAttributeDerivation(
        tuple(lists[0]), tuple(lists[1]), tuple(lists[2]),
        derived.weights
    )


def _promote_attributes(derived, program):
    def promote(ranks, level):
        old = ranks[level]
        return tuple(
            1 if idx == level
            else rank + 1 if rank < old
            else rank
            for idx, rank in enumerate(ranks)
        )

    return TruthfulAttributeDerivation(
        promote(derived.university_ranks, program.university),
        promote(derived.field_ranks, program.field),
        promote(derived.tuition_ranks, program.tuition),
        derived.weights
    )


def pick_from_menu(policy, truth, menu, rng):
    best = truth.best_in(menu)
    if policy.kind != PolicyKind.NOISY or len(menu) < 2:
        return best
    if rng.random() < policy.epsilon:
        rest = [cid for cid in menu if cid != best]
        return truth.best_in(rest)
    return best


def act(policy: AgentPolicy, spec, market, interface, mark,
        menu: Optional[tuple] = None, rng=None, truth=None):
    """What a simulated participant submits: a full ranking (DIRECT,
    ACCURACY), an attribute report (LEXNEST, WEIGHT) or a pick from
    the menu (CHOICE).
    """
    interface = InterfaceKind(interface)
    if policy.kind != PolicyKind.TRUTHFUL and rng is None:
        raise ValueError(f'a {policy.kind.value} agent needs a random generator')
    if truth is None:
        truth = induce_ranking(spec, market)

    if interface == InterfaceKind.CHOICE:
        if menu is None:
            raise ValueError('a choice needs a menu')
        return pick_from_menu(policy, truth, menu, rng)

    n = len(truth.order)
    strategic = (
        policy.kind == PolicyKind.STRATEGIC and
        interface != InterfaceKind.ACCURACY and
        rng.random() < strategic_probability(mark, policy.p_max)
    )
    safe = safe_program(truth.order, mark) if strategic else None

    if interface in (InterfaceKind.DIRECT, InterfaceKind.ACCURACY):
        order = truth.order
        if policy.kind == PolicyKind.NOISY:
            order = adjacent_swaps(
                order,
                swap_count(policy.epsilon, n * (n - 1) // 2, rng),
                rng
            )
        elif safe is not None:
            order = (safe,) + tuple(cid for cid in order if cid != safe)
        return FullRankingReport(tuple(order))

    derived = truthful_attributes(spec, market)
    if policy.kind == PolicyKind.NOISY:
        derived = _noisy_attributes(derived, policy.epsilon, rng)
    elif safe is not None:
        derived = _promote_attributes(derived, _program(market, safe))
    return derived.report(interface)


def _program(market, cid):
    for program in market.programs:
        if program.canonical_id == cid:
            return program
    raise ValueError(f'program {cid} not in the market')
