import logging
from dataclasses import (
    dataclass,
    field
)
from typing import (
    Dict,
    List,
    Mapping,
    Optional,
    Tuple
)

import numpy as np

from matchsim.market import PriorityOrder


L = logging.getLogger('matchsim.mechanism')

UNASSIGNED = None
EMPTY = None  # an empty sequential choice


class TurnError(ValueError):

    def __init__(self, reason, message):
        self.reason = reason
        super().__init__(message)


@dataclass
class Allocation:
    assignment: Dict[int, Optional[int]] = field(default_factory=dict)

    def __getitem__(self, pid):
        return self.assignment[pid]

    def holder(self):
        " program id -> participant id "
        return {
            cid: pid
            for pid, cid in self.assignment.items()
            if cid is not UNASSIGNED
        }

    def feasible(self):
        assigned = [
            cid for cid in self.assignment.values()
            if cid is not UNASSIGNED
        ]
        return len(assigned) == len(set(assigned))

    def todict(self):
        return {
            str(pid): cid
            for pid, cid in sorted(self.assignment.items())
        }


@dataclass(frozen=True)
class Turn:
    index: int
    participant_id: int
    available: Tuple[int, ...]
    action: Optional[int]

    def todict(self):
        return {
            'turn': self.index,
            'participant': self.participant_id,
            'available': list(self.available),
            'action': self.action
        }


@dataclass
class MechanismTrace:
    turns: List[Turn] = field(default_factory=list)

    def __iter__(self):
        return iter(self.turns)

    def __len__(self):
        return len(self.turns)

    def byparticipant(self):
        return {
            turn.participant_id: turn
            for turn in self.turns
        }

    def todict(self):
        return [turn.todict() for turn in self.turns]

    @classmethod
    def fromdict(cls, doc):
        return cls([
            Turn(
                t['turn'],
                t['participant'],
                tuple(t['available']),
                t['action']
            )
            for t in doc
        ])


def run_sd(priority: PriorityOrder,
           reports: Mapping,
           programs=None) -> Tuple[Allocation, MechanismTrace]:
    """Serial dictatorship over full rankings: in priority order each
    participant receives the highest listed program still available.

    The program pool defaults to the items of the first report.
    """
    for pid in priority:
        if pid not in reports:
            raise ValueError(f'missing report for participant {pid}')
    if programs is None:
        programs = reports[priority.ordering[0]].order if len(priority) else ()
    remaining = set(programs)

    allocation = Allocation()
    trace = MechanismTrace()
    for idx, pid in enumerate(priority):
        available = tuple(sorted(remaining))
        pick = reports[pid].top_in(remaining)
        allocation.assignment[pid] = pick
        trace.turns.append(Turn(idx, pid, available, pick))
        if pick is not None:
            remaining.remove(pick)

    return allocation, trace


class SequentialSession:
    """Sequential serial dictatorship as a turn based state machine:
    the participant whose turn it is picks one program from the
    remaining menu (or nothing at all).

    One writer at a time: a session is not meant to be shared.
    """
    __slots__ = ('market', 'priority', 'turn', 'remaining',
                 'allocation', 'trace')

    def __init__(self, market, priority: PriorityOrder):
        self.market = market
        self.priority = priority
        self.turn = 0
        self.remaining = set(market.program_ids)
        self.allocation = Allocation()
        self.trace = MechanismTrace()

    def __repr__(self):
        return (
            f'session(turn={self.turn}/{len(self.priority)},'
            f'remaining={len(self.remaining)})'
        )

    @property
    def done(self):
        return self.turn >= len(self.priority)

    @property
    def current(self):
        if self.done:
            return None
        return self.priority.ordering[self.turn]

    def menu(self):
        return tuple(sorted(self.remaining))

    def choose(self, pid, pick=EMPTY):
        if self.done:
            raise TurnError(
                'session-complete',
                'all participants have already chosen'
            )
        if pid != self.current:
            raise TurnError(
                'out-of-turn',
                f'participant {pid} acts out of turn '
                f'(expected {self.current})'
            )
        if pick is not EMPTY and pick not in self.remaining:
            raise TurnError(
                'not-in-menu',
                f'program {pick} is not on the menu'
            )
        menu = self.menu()
        self.allocation.assignment[pid] = pick
        self.trace.turns.append(Turn(self.turn, pid, menu, pick))
        if pick is EMPTY:
            L.debug('participant %s submits an empty choice', pid)
        else:
            self.remaining.remove(pick)
        self.turn += 1
        return self


def session_new(market, priority: PriorityOrder) -> SequentialSession:
    return SequentialSession(market, priority)


def session_menu(session: SequentialSession):
    return session.menu()


def session_choose(session: SequentialSession, pid, pick=EMPTY):
    return session.choose(pid, pick)


# random priority

def random_priority(pids, rng) -> PriorityOrder:
    return PriorityOrder(
        tuple(int(pid) for pid in rng.permutation(np.array(sorted(pids))))
    )


def rp_draws(reports: Mapping, draws: int, rng, programs=None):
    """Yield (priority, allocation, trace) for each random priority
    draw, serial dictatorship running on the reported preferences."""
    if draws < 1:
        raise ValueError(f'at least one draw is needed (got {draws})')
    for _ in range(draws):
        priority = random_priority(reports.keys(), rng)
        allocation, trace = run_sd(priority, reports, programs)
        yield priority, allocation, trace


def simulate_rp(reports: Mapping, truths: Mapping,
                draws: int = 100, rng=None, programs=None) -> float:
    """Market level choice accuracy under random priority: averaged
    over the participants of a draw, then across draws."""
    from matchsim.metrics import choice_accuracy

    if rng is None:
        rng = np.random.default_rng()
    means = []
    for _, _, trace in rp_draws(reports, draws, rng, programs):
        accuracy = choice_accuracy(trace, truths, reports)
        means.append(sum(accuracy.values()) / len(accuracy))
    return float(np.mean(means))
