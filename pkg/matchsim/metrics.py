import logging
from dataclasses import (
    asdict,
    dataclass
)
from itertools import combinations
from typing import (
    Dict,
    Mapping,
    Optional,
    Sequence
)

import numpy as np
import pandas as pd
from scipy.optimize import linear_sum_assignment

from matchsim.mechanism import (
    UNASSIGNED,
    run_sd
)
from matchsim.report import FullRankingReport


L = logging.getLogger('matchsim.metrics')

TOP_PAYOFF = 160
PAYOFF_STEP = 5


class UndefinedLossError(ValueError):
    reason = 'undefined-loss'


@dataclass
class MetricsRow:
    participant_id: int
    choice_accuracy: float
    kendall: Optional[float]  # None under the choice interface
    justified_envy: int
    true_rank: Optional[int]  # None when unassigned
    payoff: float
    mark: Optional[int] = None
    menu_size: Optional[int] = None
    top_accuracy: Optional[int] = None

    def todict(self):
        return asdict(self)


@dataclass
class MarketMetrics:
    efficiency_loss: float
    efficiency_loss_m: float
    accuracy_mean: float
    envy_share: float
    utilitarian_loss: Optional[float] = None

    def todict(self):
        return asdict(self)


def _order(ranking):
    return tuple(getattr(ranking, 'order', ranking))


# accuracy

def choice_accuracy(trace, truths: Mapping, reports: Optional[Mapping] = None) -> Dict[int, int]:
    """1 when the participant's top reported program among the
    programs available at their turn is their true best among them.

    Without reports (sequential choice) the action of the turn is
    what was chosen; an empty choice scores 0.
    """
    turns = trace.byparticipant()
    missing = set(truths) - set(turns)
    if missing:
        raise ValueError(f'participants missing from the trace: {sorted(missing)}')

    accuracy = {}
    for pid in truths:
        turn = turns[pid]
        truebest = truths[pid].best_in(turn.available)
        if reports is None or pid not in reports:
            picked = turn.action
        else:
            picked = reports[pid].top_in(turn.available)
        accuracy[pid] = int(picked is not None and picked == truebest)
    return accuracy


def top_accuracy(report, truth) -> int:
    " reported overall top equals true overall top "
    return int(_order(report)[0] == _order(truth)[0])


# kendall

def discordant_pairs(reported: Sequence, truth: Sequence) -> int:
    reported = _order(reported)
    truth = _order(truth)
    if len(reported) != len(truth) or set(reported) != set(truth):
        raise ValueError('rankings are not over the same items')
    position = {cid: idx for idx, cid in enumerate(reported)}
    return sum(
        1
        for better, worse in combinations(truth, 2)
        if position[better] > position[worse]
    )


def kendall_distance(reported, truth) -> float:
    """Normalized Kendall distance: discordant pairs over all pairs,
    0 for identical rankings and 1 for a complete reversal."""
    n = len(_order(truth))
    if n < 2:
        discordant_pairs(reported, truth)
        return 0.
    return discordant_pairs(reported, truth) / (n * (n - 1) // 2)


# payoffs

def payoff_rank(true_rank, n=27) -> int:
    if true_rank is UNASSIGNED:
        return 0
    if not 1 <= true_rank <= n:
        raise ValueError(f'rank {true_rank} out of 1..{n}')
    return TOP_PAYOFF - PAYOFF_STEP * (true_rank - 1)


def payoff_accuracy(kendall: float) -> float:
    return TOP_PAYOFF * (1 - kendall)


def true_ranks(truths: Mapping, allocation) -> Dict[int, Optional[int]]:
    return {
        pid: (
            UNASSIGNED if allocation[pid] is UNASSIGNED
            else truths[pid].rank_of(allocation[pid])
        )
        for pid in truths
    }


def _total_payoff(truths, allocation):
    return sum(
        payoff_rank(rank)
        for rank in true_ranks(truths, allocation).values()
    )


def _truthful_reports(truths):
    return {
        pid: FullRankingReport(truth.order)
        for pid, truth in truths.items()
    }


# welfare

def efficiency_loss(market, truths: Mapping, allocation, priority,
                    denominator='R') -> float:
    """Percentage shortfall of the realized rank payoff R from the
    payoff M of truthful serial dictatorship under the same priority:
    (M - R) / R * 100 (or / M with denominator='M').
    """
    ideal, _ = run_sd(
        priority,
        _truthful_reports(truths),
        market.program_ids
    )
    M = _total_payoff(truths, ideal)
    R = _total_payoff(truths, allocation)
    L.debug('ideal payoff %s, realized payoff %s', M, R)
    base = R if denominator == 'R' else M
    if base == 0:
        raise UndefinedLossError(
            f'efficiency loss undefined: {denominator} = 0'
        )
    return (M - R) / base * 100


def utilitarian_loss(market, truths: Mapping, allocation) -> float:
    """Loss relative to the assignment maximizing the total rank
    payoff (not the serial dictatorship benchmark)."""
    pids = sorted(truths)
    cids = list(market.program_ids)
    benefits = np.array([
        [payoff_rank(truths[pid].rank_of(cid)) for cid in cids]
        for pid in pids
    ])
    rows, cols = linear_sum_assignment(benefits, maximize=True)
    U = benefits[rows, cols].sum()
    R = _total_payoff(truths, allocation)
    if R == 0:
        raise UndefinedLossError('efficiency loss undefined: R = 0')
    return float((U - R) / R * 100)


def justified_envy(market, truths: Mapping, allocation, priority):
    """Flag participants who truly prefer the program of someone with
    a lower priority to their own (anything beats being unassigned).

    Returns the per participant flags and the market share.
    """
    position = priority.position()
    holder = allocation.holder()
    envy = {}
    for pid, truth in truths.items():
        own = allocation[pid]
        ranked = truth.position()
        ownpos = ranked[own] if own is not UNASSIGNED else None
        flag = 0
        for cid, other in holder.items():
            if other == pid or position[other] <= position[pid]:
                continue
            if ownpos is None or ranked[cid] < ownpos:
                flag = 1
                break
        envy[pid] = flag
    share = sum(envy.values()) / len(envy) if envy else 0.
    return envy, share


# tables

def summarize(rows: pd.DataFrame, markets: pd.DataFrame) -> pd.DataFrame:
    """Treatment x domain table of mean accuracy, mean Kendall
    distance, envy share and mean efficiency loss (in percent)."""
    keys = ['treatment', 'domain']
    if not len(rows):
        return pd.DataFrame(
            columns=keys + ['accuracy', 'kendall', 'envy', 'efficiency_loss']
        ).set_index(keys)
    part = rows.groupby(keys).agg(
        accuracy=('accuracy', 'mean'),
        kendall=('kendall', 'mean'),
        envy=('envy', 'mean')
    )
    part[['accuracy', 'envy']] *= 100
    loss = markets.groupby(keys).agg(
        efficiency_loss=('efficiency_loss', 'mean')
    )
    return part.join(loss)
